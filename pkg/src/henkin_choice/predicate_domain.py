"""Finitely supported predicates and the truncated Henkin structures built from them.

A predicate is stored as an explicit boolean tensor over the truncated domain
together with a support; it is *certified* once its extension has been checked
invariant under every generator of the pointwise stabilizer of that support.
Enumeration works orbit-wise: for a support K the admissible extensions are
exactly the unions of orbits of n-tuples under the stabilizer of K.
"""

from __future__ import annotations

import enum
import itertools
import json
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping, Optional, Sequence

import numpy as np

from . import kernels
from .group_action import DomainError, GroupKind, GroupSpec, Permutation

MAX_POINTS = 64
DEFAULT_MAX_ORBITS = 24


class EnumerationGuardError(RuntimeError):
    """Too many tuple orbits for exhaustive enumeration of orbit unions."""


class CertificateError(ValueError):
    """An extension is not invariant under the stabilizer of its claimed support."""


class BudgetExceeded(RuntimeError):
    """A comprehended predicate needs a larger support than the existential budget allows."""


class FidelityWarning(UserWarning):
    pass


class Strategy(enum.Enum):
    ENUMERATE = "enumerate"
    WITNESS = "witness"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class QuantifierPolicy:
    s_univ: int = 1
    s_exist: Optional[int] = None
    strategy: Strategy = Strategy.HYBRID
    providers: tuple[str, ...] = ()
    allow_fallback: bool = True
    max_orbits: int = DEFAULT_MAX_ORBITS

    def __post_init__(self) -> None:
        if self.s_exist is None:
            object.__setattr__(self, "s_exist", self.s_univ + 2)
        if self.s_univ < 0 or self.s_exist < self.s_univ:
            raise ValueError("need 0 <= s_univ <= s_exist")
        object.__setattr__(self, "providers", tuple(self.providers))

    def with_(self, **kw) -> "QuantifierPolicy":
        d = dict(s_univ=self.s_univ, s_exist=self.s_exist, strategy=self.strategy,
                 providers=self.providers, allow_fallback=self.allow_fallback, max_orbits=self.max_orbits)
        d.update(kw)
        return QuantifierPolicy(**d)


class SymbolicPredicate:
    """An n-ary predicate over the truncated domain with a finite support."""

    __slots__ = ("arity", "support", "ext", "key", "certified", "__weakref__")

    def __init__(self, arity: int, support: frozenset[int], ext: np.ndarray, certified: bool = False):
        ext = np.asarray(ext, dtype=bool)
        if ext.ndim != arity:
            raise ValueError(f"extension has {ext.ndim} axes, expected {arity}")
        if arity and len(set(ext.shape)) != 1:
            raise ValueError("extension must be a cube over the domain")
        ext = ext.copy()
        ext.setflags(write=False)
        self.arity = arity
        self.support = frozenset(support)
        self.ext = ext
        self.key = bytes([arity]) + np.packbits(ext.ravel()).tobytes() + ext.size.to_bytes(4, "big")
        self.certified = certified

    @property
    def flat(self) -> np.ndarray:
        return self.ext.ravel()

    @property
    def n_points(self) -> int:
        return self.ext.shape[0]

    def __contains__(self, t) -> bool:
        if isinstance(t, (int, np.integer)):
            t = (t,)
        return bool(self.ext[tuple(t)])

    def tuples(self) -> list[tuple[int, ...]]:
        return [tuple(int(i) for i in t) for t in np.argwhere(self.ext)]

    def count(self) -> int:
        return int(self.ext.sum())

    def is_empty(self) -> bool:
        return not self.ext.any()

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SymbolicPredicate) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: "SymbolicPredicate") -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        shown = self.tuples()
        body = ", ".join(map(str, shown[:6])) + (", ..." if len(shown) > 6 else "")
        return f"SymbolicPredicate(arity={self.arity}, support={sorted(self.support)}, {{{body}}})"


class HenkinStructure:
    """A truncated permutation model: domain, admissible predicates per arity, named predicates."""

    def __init__(self, name: str, group: GroupSpec, policy: QuantifierPolicy,
                 fidelity_notes: Sequence[str] = ()):
        if group.n_points > MAX_POINTS:
            raise ValueError(f"domain of {group.n_points} points exceeds the limit {MAX_POINTS}")
        self.name = name
        self.group = group
        self.policy = policy
        self.named: dict[str, SymbolicPredicate] = {}
        self.fidelity_notes: list[str] = list(fidelity_notes)
        self._tables: dict[tuple[frozenset[int], int], np.ndarray] = {}
        self._orbits: dict[tuple[frozenset[int], int], tuple[np.ndarray, int]] = {}
        self._domains: dict[tuple[int, int], list[SymbolicPredicate]] = {}

    @property
    def n_points(self) -> int:
        return self.group.n_points

    @property
    def domain(self):
        return self.group.domain

    def params(self) -> dict[str, Any]:
        out: dict[str, Any] = {"model": self.name, "N": self.group.size}
        if self.group.kind is GroupKind.FIX_PART1:
            out["N1"] = self.group.size1
        out.update(s_univ=self.policy.s_univ, s_exist=self.policy.s_exist)
        return out

    # -- stabilizer machinery -------------------------------------------------
    def tables(self, support: Iterable[int], arity: int) -> np.ndarray:
        """Tuple tables of the stabilizer generators of ``support`` (one row per generator)."""
        s = self.group.normalize_support(support)
        key = (s, arity)
        if key not in self._tables:
            gens = self.group.stabilizer_generators(s)
            n_codes = self.n_points ** arity
            if gens:
                t = np.stack([kernels.tuple_table(np.asarray(g.image), self.n_points, arity) for g in gens])
            else:
                t = np.empty((0, n_codes), dtype=np.int64)
            self._tables[key] = t
        return self._tables[key]

    def orbits(self, support: Iterable[int], arity: int) -> tuple[np.ndarray, int]:
        s = self.group.normalize_support(support)
        key = (s, arity)
        if key not in self._orbits:
            self._orbits[key] = kernels.orbit_labels(self.tables(s, arity), self.n_points ** arity)
        return self._orbits[key]

    def is_supported_by(self, ext: np.ndarray, support: Iterable[int]) -> bool:
        ext = np.asarray(ext, dtype=bool)
        return bool(kernels.is_invariant(ext.ravel(), self.tables(support, ext.ndim)))

    def make_predicate(self, ext_or_tuples, support: Iterable[int] = (), arity: Optional[int] = None) -> SymbolicPredicate:
        """Build and certify a predicate; raises CertificateError if the support is too small."""
        ext = self._as_ext(ext_or_tuples, arity)
        s = self.group.normalize_support(support)
        if not self.is_supported_by(ext, s):
            raise CertificateError(f"extension is not invariant under the stabilizer of {sorted(s)}")
        return SymbolicPredicate(ext.ndim, s, ext, certified=True)

    def _as_ext(self, ext_or_tuples, arity: Optional[int]) -> np.ndarray:
        if isinstance(ext_or_tuples, np.ndarray):
            ext = ext_or_tuples.astype(bool)
            if ext.shape != (self.n_points,) * ext.ndim:
                raise ValueError("extension shape does not match the domain")
            return ext
        tuples = [(t,) if isinstance(t, (int, np.integer)) else tuple(t) for t in ext_or_tuples]
        if arity is None:
            if not tuples:
                raise ValueError("arity needed for an empty tuple list")
            arity = len(tuples[0])
        ext = np.zeros((self.n_points,) * arity, dtype=bool)
        for t in tuples:
            if len(t) != arity:
                raise ValueError("tuples of mixed arity")
            for x in t:
                self.group.individual(x)
            ext[t] = True
        return ext

    def full(self, arity: int) -> SymbolicPredicate:
        return self.make_predicate(np.ones((self.n_points,) * arity, dtype=bool))

    def empty(self, arity: int) -> SymbolicPredicate:
        return self.make_predicate(np.zeros((self.n_points,) * arity, dtype=bool))

    def minimal_support(self, p: SymbolicPredicate, budget: Optional[int] = None) -> frozenset[int]:
        """A smallest support of ``p`` within ``budget`` units (raises BudgetExceeded if none)."""
        budget = len(self.group.support_units()) if budget is None else budget
        for s in self.group.supports_up_to(budget):
            if self.is_supported_by(p.ext, s):
                return s
        raise BudgetExceeded(f"no support of at most {budget} units")

    # -- predicate domains ----------------------------------------------------
    def invariant_predicates(self, arity: int, support: Iterable[int],
                             max_orbits: Optional[int] = None) -> list[SymbolicPredicate]:
        """Every extension invariant under the stabilizer of ``support``, certified with it."""
        s = self.group.normalize_support(support)
        labels, n_orb = self.orbits(s, arity)
        limit = self.policy.max_orbits if max_orbits is None else max_orbits
        if n_orb > limit:
            raise EnumerationGuardError(
                f"{self.name}: {n_orb} orbits of {arity}-tuples under the stabilizer of a "
                f"{self.group.support_size(s)}-unit support exceed the guard {limit}")
        rows = kernels.expand_subsets(labels, n_orb)
        shape = (self.n_points,) * arity
        return [SymbolicPredicate(arity, s, row.reshape(shape), certified=True) for row in rows]

    def enumerate_predicates(self, arity: int, budget: int) -> list[SymbolicPredicate]:
        """All admissible predicates with some support of at most ``budget`` units, canonically ordered."""
        key = (arity, budget)
        if key not in self._domains:
            found: dict[bytes, SymbolicPredicate] = {}
            for s in self.group.supports_up_to(budget):
                for p in self.invariant_predicates(arity, s):
                    found.setdefault(p.key, p)
            self._domains[key] = sorted(found.values())
        return self._domains[key]

    def universal_domain(self, arity: int) -> list[SymbolicPredicate]:
        return self.enumerate_predicates(arity, self.policy.s_univ)

    def existential_domain(self, arity: int) -> list[SymbolicPredicate]:
        return self.enumerate_predicates(arity, self.policy.s_exist)

    def within_budget(self, p: SymbolicPredicate, budget: int) -> bool:
        if self.group.support_size(p.support) <= budget and p.certified:
            return True
        try:
            self.minimal_support(p, budget)
        except BudgetExceeded:
            return False
        return True

    # -- group action on predicates -------------------------------------------
    def act(self, perm: Permutation, p: SymbolicPredicate) -> SymbolicPredicate:
        return act_on_predicate(self, perm, p)

    # -- serialization --------------------------------------------------------
    def predicate_to_json(self, p: SymbolicPredicate) -> dict[str, Any]:
        ind = self.group.individual
        return {
            "arity": p.arity,
            "support": [list(ind(x)) for x in sorted(p.support)],
            "tuples": [[list(ind(x)) for x in t] for t in p.tuples()],
        }

    def predicate_from_json(self, obj: Mapping[str, Any]) -> SymbolicPredicate:
        """Load a predicate and re-verify its invariance certificate."""
        arity = int(obj["arity"])
        pt = self.group.point
        support = [pt(*ind) for ind in obj.get("support", [])]
        tuples = []
        for t in obj["tuples"]:
            if len(t) != arity:
                raise ValueError(f"tuple {t} does not have arity {arity}")
            tuples.append(tuple(pt(*ind) for ind in t))
        return self.make_predicate(tuples, support, arity=arity)

    def load_predicate(self, path: str) -> SymbolicPredicate:
        with open(path, encoding="utf-8") as fh:
            return self.predicate_from_json(json.load(fh))

    def __repr__(self) -> str:
        return f"HenkinStructure({self.name}, {self.params()})"


def act_on_predicate(h: HenkinStructure, perm: Permutation, p: SymbolicPredicate) -> SymbolicPredicate:
    """Pointwise image of ``p`` under ``perm``; the support moves along."""
    if perm.size != h.n_points:
        raise DomainError("permutation and structure sizes differ")
    table = kernels.tuple_table(np.asarray(perm.image), h.n_points, p.arity)
    flat = np.zeros(h.n_points ** p.arity, dtype=bool)
    flat[table] = p.flat
    support = h.group.normalize_support(perm(x) for x in p.support)
    ext = flat.reshape(p.ext.shape)
    certified = p.certified and h.group.contains(perm)
    if certified and not h.is_supported_by(ext, support):
        raise CertificateError("image of a certified predicate lost its certificate")
    return SymbolicPredicate(p.arity, support, ext, certified=certified)


# -- structure builders -------------------------------------------------------

def _guard(name: str, free_units: int, policy: QuantifierPolicy, notes: list[str]) -> None:
    need = 2 * policy.s_exist + 2
    if free_units < need:
        msg = (f"{name}: {free_units} support units < 2*s_exist+2 = {need}; orbit arguments "
               f"that need two free units outside every support may not transfer")
        notes.append(msg)
        warnings.warn(msg, FidelityWarning, stacklevel=3)
    else:
        notes.append(f"{name}: {free_units} support units >= 2*s_exist+2 = {need}")


def build_sigma0(N: int, policy: Optional[QuantifierPolicy] = None) -> HenkinStructure:
    """Basic Fraenkel model: all permutations of [N], finite supports."""
    policy = policy or QuantifierPolicy()
    notes: list[str] = []
    _guard("sigma0", N, policy, notes)
    return HenkinStructure("sigma0", GroupSpec(GroupKind.FULL_FINITARY, N), policy, notes)


def build_sigma2(N: int, policy: Optional[QuantifierPolicy] = None) -> HenkinStructure:
    """Pair model: domain [N] x {0,1}, group permutes and flips pairs; named T = partner relation."""
    policy = policy or QuantifierPolicy()
    notes: list[str] = []
    _guard("sigma2", N, policy, notes)
    h = HenkinStructure("sigma2", GroupSpec(GroupKind.PAIR_AUTO, N), policy, notes)
    h.named["T"] = h.make_predicate(sorted(h.group.edge_relation()), (), arity=2)
    return h


def build_sigma3(N0: int, N1: int, policy: Optional[QuantifierPolicy] = None) -> HenkinStructure:
    """Two-copy model: part 0 permuted freely, part 1 fixed; named A0, A1, T."""
    policy = policy or QuantifierPolicy(s_univ=2, s_exist=2)
    notes = ["sigma3: part-1 predicates range over every subset of the truncated part-1 copy"]
    _guard("sigma3", N0, policy, notes)
    g = GroupSpec(GroupKind.FIX_PART1, N0, N1)
    h = HenkinStructure("sigma3", g, policy, notes)
    h.named["A0"] = h.make_predicate([(g.point(0, i),) for i in range(N0)], (), arity=1)
    h.named["A1"] = h.make_predicate([(g.point(1, i),) for i in range(N1)], (), arity=1)
    h.named["T"] = h.make_predicate(
        [(g.point(1, a), g.point(1, b)) for a in range(N1) for b in range(N1) if b <= a], (), arity=2)
    return h


def build_full(N: int, policy: Optional[QuantifierPolicy] = None) -> HenkinStructure:
    """Standard structure on N individuals: every predicate is admissible."""
    policy = policy or QuantifierPolicy(s_univ=0, s_exist=0, strategy=Strategy.ENUMERATE)
    return HenkinStructure("full", GroupSpec(GroupKind.STANDARD, N), policy,
                           [f"full: all predicates on {N} individuals"])


def build_model(model: str, size: int, size1: Optional[int] = None,
                policy: Optional[QuantifierPolicy] = None) -> HenkinStructure:
    if model == "sigma0":
        return build_sigma0(size, policy)
    if model == "sigma2":
        return build_sigma2(size, policy)
    if model == "sigma3":
        return build_sigma3(size, size if size1 is None else size1, policy)
    if model == "full":
        return build_full(size, policy)
    raise ValueError(f"unknown model {model!r}")


def comprehend(h: HenkinStructure, f, vars: Sequence, asg=None,
               policy: Optional[QuantifierPolicy] = None) -> SymbolicPredicate:
    """The predicate {t | h satisfies f with vars := t}, certified with its parameter support."""
    from .evaluator import Assignment, evaluate_tensor
    from .formula import IndivVar, free_vars

    asg = asg if asg is not None else Assignment()
    policy = policy or h.policy
    vars = tuple(v if isinstance(v, IndivVar) else IndivVar(v) for v in vars)
    iv, pv = free_vars(f)
    support: set[int] = set()
    for v in iv - set(vars):
        support.add(asg.individual(v))
    for p in pv:
        pred = asg.preds.get(p) or h.named.get(p.name)
        if pred is not None:
            support |= pred.support
    ext = evaluate_tensor(h, asg, f, vars, policy)
    s = h.group.normalize_support(support)
    if h.group.support_size(s) > policy.s_exist:
        raise BudgetExceeded(
            f"comprehension needs {h.group.support_size(s)} support units, budget is {policy.s_exist}")
    return h.make_predicate(ext, s)
