"""Checking implications between closed axioms over a battery of small structures.

An axiom with a leading universal predicate prefix is either evaluated
exhaustively (when the prefix domains are small enough) or on seeded random
admissible values of the prefix.  The status of an axiom in a structure is one
of ``true``, ``false``, ``not-refuted`` (sampled, no failure seen) or
``undetermined`` (some sample could not be decided within the budgets).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .evaluator import Assignment, WitnessSearchFailed, evaluate
from .formula import ForallPred, Formula, PredVar
from .predicate_domain import (
    EnumerationGuardError,
    HenkinStructure,
    QuantifierPolicy,
    Strategy,
    SymbolicPredicate,
    build_full,
    build_sigma0,
    build_sigma2,
)

HOLDS = ("true", "not-refuted")
DEFAULT_CAP = 4096
DEFAULT_SAMPLES = 12
BATTERY_PROVIDERS = ("canonical-choice", "sigma2-choice", "sigma3-choice")


def battery_structures(full_sizes: Sequence[int] = (1, 2, 3), N: int = 4, s_univ: int = 1,
                       s_exist: int = 3) -> list[HenkinStructure]:
    full_pol = QuantifierPolicy(s_univ=0, s_exist=0, strategy=Strategy.HYBRID,
                                providers=BATTERY_PROVIDERS)
    pol = QuantifierPolicy(s_univ=s_univ, s_exist=s_exist, strategy=Strategy.HYBRID,
                           providers=BATTERY_PROVIDERS)
    out = [build_full(k, full_pol) for k in full_sizes]
    out.append(build_sigma0(N, pol))
    out.append(build_sigma2(N, pol))
    return out


def structure_label(h: HenkinStructure) -> str:
    return ",".join(f"{k}={v}" for k, v in h.params().items())


# -- random admissible predicates ------------------------------------------------

def random_predicate(h: HenkinStructure, arity: int, rng: np.random.Generator, budget: int,
                     density: Optional[float] = None) -> SymbolicPredicate:
    """A random union of tuple orbits under the stabilizer of a random support of at most ``budget`` units."""
    supports = list(h.group.supports_up_to(budget))
    K = supports[int(rng.integers(len(supports)))]
    labels, n_orb = h.orbits(K, arity)
    p = density if density is not None else float(rng.choice([0.1, 0.3, 0.6]))
    chosen = rng.random(n_orb) < p
    ext = chosen[labels].reshape((h.n_points,) * arity)
    return h.make_predicate(ext, K)


def disjointify(h: HenkinStructure, rho: SymbolicPredicate, n: int) -> SymbolicPredicate:
    """Keep the tuples (x, y) whose y has exactly one x; definable from rho, so the support carries over."""
    ext = rho.ext
    axes_x = tuple(range(n))
    count = ext.sum(axis=axes_x)
    keep = ext & (count == 1)[(None,) * n]
    return h.make_predicate(keep, rho.support)


def projection(h: HenkinStructure, rho: SymbolicPredicate, n: int) -> SymbolicPredicate:
    return h.make_predicate(rho.ext.any(axis=tuple(range(n, rho.arity))), rho.support)


def random_AR(h: HenkinStructure, n: int, m: int, rng: np.random.Generator,
              budget: int) -> tuple[SymbolicPredicate, SymbolicPredicate]:
    """A random (A, R) pair: R an orbit union, disjointified half the time; A its projection half the time."""
    R = random_predicate(h, n + m, rng, budget)
    if rng.random() < 0.5:
        R = disjointify(h, R, n)
    A = projection(h, R, n) if rng.random() < 0.5 else random_predicate(h, n, rng, budget)
    return A, R


# -- axiom status -----------------------------------------------------------------

@dataclass
class AxiomStatus:
    status: str
    mode: str  # exhaustive | sampled
    checked: int = 0
    undetermined: int = 0
    counterexample: Optional[dict] = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"status": self.status, "mode": self.mode, "checked": self.checked,
                "undetermined": self.undetermined, "counterexample": self.counterexample,
                "notes": self.notes}


def _prefix(phi: Formula) -> tuple[list[PredVar], Formula]:
    pvs = []
    while isinstance(phi, ForallPred):
        pvs.append(phi.pred)
        phi = phi.body
    return pvs, phi


def _domain_size(h: HenkinStructure, pvs: Sequence[PredVar], cap: int) -> Optional[int]:
    total = 1
    for pv in pvs:
        try:
            total *= len(h.universal_domain(pv.arity))
        except EnumerationGuardError:
            return None
        if total > cap:
            return None
    return total


def axiom_status(h: HenkinStructure, phi: Formula, rng: np.random.Generator, *,
                 cap: int = DEFAULT_CAP, samples: int = DEFAULT_SAMPLES,
                 sampler: Optional[Callable[[HenkinStructure, np.random.Generator], dict[PredVar, SymbolicPredicate]]] = None
                 ) -> AxiomStatus:
    """Decide a closed axiom in ``h`` exhaustively when feasible, else on ``samples`` random prefix values."""
    pvs, matrix = _prefix(phi)
    size = _domain_size(h, pvs, cap)
    if size is not None:
        try:
            out = evaluate(h, None, phi)
            st = AxiomStatus("true" if out.value else "false", "exhaustive", checked=size)
            if not out.value:
                tr = evaluate(h, None, phi, trace=True).trace
                st.counterexample = {"trace": tr}
            return st
        except (WitnessSearchFailed, EnumerationGuardError) as e:
            note = f"exhaustive evaluation not decidable within budgets ({type(e).__name__}); sampled instead"
        else:  # pragma: no cover
            note = ""
    else:
        note = f"prefix domain exceeds cap {cap} or the orbit guard; sampled"
    st = AxiomStatus("not-refuted", "sampled", notes=[note])
    for _ in range(samples):
        env = sampler(h, rng) if sampler else {pv: random_predicate(h, pv.arity, rng, h.policy.s_univ) for pv in pvs}
        st.checked += 1
        try:
            val = evaluate(h, Assignment({}, env), matrix).value
        except (WitnessSearchFailed, EnumerationGuardError):
            st.undetermined += 1
            continue
        if not val:
            st.status = "false"
            st.counterexample = {pv.name: h.predicate_to_json(p) for pv, p in sorted(env.items())}
            break
    if st.status == "not-refuted" and st.undetermined:
        st.status = "undetermined" if st.undetermined == st.checked else "not-refuted"
        st.notes.append(f"{st.undetermined} of {st.checked} samples undetermined")
    return st


def ar_sampler(n: int, m: int) -> Callable:
    """Sampler for the (A, R) prefix of the Zermelo/Russell axioms."""
    A, R = PredVar("A", n), PredVar("R", n + m)

    def sample(h: HenkinStructure, rng: np.random.Generator) -> dict[PredVar, SymbolicPredicate]:
        a, r = random_AR(h, n, m, rng, h.policy.s_univ)
        return {A: a, R: r}

    return sample


def implication_over_battery(structures: Sequence[HenkinStructure], ante: Formula, cons: Formula,
                             ante_nm: tuple[int, int], cons_nm: tuple[int, int], seed: int, *,
                             cap: int = DEFAULT_CAP, samples: int = DEFAULT_SAMPLES,
                             cache: Optional[dict] = None) -> dict[str, Any]:
    """Material implication ante -> cons in every structure; a counterexample needs ante holding and cons false."""
    rows = []
    first = None
    for idx, h in enumerate(structures):
        sts = []
        for f, nm in ((ante, ante_nm), (cons, cons_nm)):
            key = (structure_label(h), repr(f), seed, cap, samples)
            if cache is not None and key in cache:
                sts.append(cache[key])
                continue
            rng = np.random.default_rng([seed, idx, *nm])
            st = axiom_status(h, f, rng, cap=cap, samples=samples, sampler=ar_sampler(*nm))
            if cache is not None:
                cache[key] = st
            sts.append(st)
        a, c = sts
        bad = a.status in HOLDS and c.status == "false"
        row = {"structure": h.params(), "antecedent": a.to_json(), "consequent": c.to_json(),
               "counterexample": bad}
        rows.append(row)
        if bad and first is None:
            first = row
    return {"rows": rows, "first_counterexample": first,
            "exhaustive": sum(1 for r in rows if r["antecedent"]["mode"] == r["consequent"]["mode"] == "exhaustive"),
            "sampled": sum(1 for r in rows if "sampled" in (r["antecedent"]["mode"], r["consequent"]["mode"]))}


# -- pointwise implications with free A, R ----------------------------------------

def all_AR(h: HenkinStructure, n: int, m: int) -> list[tuple[SymbolicPredicate, SymbolicPredicate]]:
    return list(itertools.product(h.universal_domain(n), h.universal_domain(n + m)))


def pointwise_implication(h: HenkinStructure, left: Formula, right: Formula, n: int, m: int,
                          rng: np.random.Generator, *, cap: int = DEFAULT_CAP,
                          samples: int = 40) -> dict[str, Any]:
    """Check left -> right for each (A, R): exhaustively if the pair count is within ``cap``, else sampled."""
    A, R = PredVar("A", n), PredVar("R", n + m)
    try:
        count = len(h.universal_domain(n)) * len(h.universal_domain(n + m))
    except EnumerationGuardError:
        count = math.inf
    if count <= cap:
        pairs = all_AR(h, n, m)
        mode = "exhaustive"
    else:
        pairs = [random_AR(h, n, m, rng, h.policy.s_univ) for _ in range(samples)]
        mode = "sampled"
    held = 0
    undetermined = 0
    first = None
    for a, r in pairs:
        asg = Assignment({}, {A: a, R: r})
        try:
            lv = evaluate(h, asg, left).value
            if not lv:
                continue
            held += 1
            rv = evaluate(h, asg, right).value
        except (WitnessSearchFailed, EnumerationGuardError):
            undetermined += 1
            continue
        if not rv and first is None:
            first = {"A": h.predicate_to_json(a), "R": h.predicate_to_json(r)}
    return {"structure": h.params(), "mode": mode, "checked": len(pairs), "antecedent_held": held,
            "undetermined": undetermined, "counterexample": first}
