"""Workbench for second-order choice principles in finitely supported Henkin structures."""

from .formula import (
    And, Atom, EqTuple, ExistsExactlyOne, ExistsIndiv, ExistsPred, ForallIndiv, ForallPred,
    Formula, FormulaError, Iff, Implies, IndivVar, Not, Or, PredVar, free_vars, substitute_pred,
)
from .syntax import ParseError, parse, render
from .group_action import GroupKind, GroupSpec, Individual, Permutation
from .kernels import BACKEND
from .predicate_domain import (
    BudgetExceeded, CertificateError, EnumerationGuardError, FidelityWarning, HenkinStructure,
    QuantifierPolicy, Strategy, SymbolicPredicate, build_full, build_model, build_sigma0, build_sigma2,
    build_sigma3, comprehend,
)
from .evaluator import Assignment, EvalOutcome, WitnessSearchFailed, evaluate, evaluate_tensor
from .choice_constructions import (  # importing registers the witness providers
    ChoiceInput, FidelityError, PreconditionError, construct_choice_sigma2, construct_choice_sigma3,
    refute_choice_h_sigma3, refute_choice_star1_sigma2,
)
from .claims import ClaimResult, registry, run_all, run_claim

__version__ = "0.1.0"
