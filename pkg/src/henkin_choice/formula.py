"""Abstract syntax of second-order formulas and capture-avoiding substitution."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union


class FormulaError(ValueError):
    pass


class ArityError(FormulaError):
    pass


@dataclass(frozen=True, order=True)
class IndivVar:
    name: str

    def __post_init__(self) -> None:
        if not self.name:
            raise FormulaError("individual variable names must be nonempty")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class PredVar:
    name: str
    arity: int

    def __post_init__(self) -> None:
        if not self.name:
            raise FormulaError("predicate variable names must be nonempty")
        if self.arity < 1:
            raise ArityError(f"predicate {self.name} needs arity >= 1, got {self.arity}")

    def __str__(self) -> str:
        return f"{self.name}:{self.arity}"


def _vars(vs: Iterable[Union[IndivVar, str]]) -> tuple[IndivVar, ...]:
    return tuple(v if isinstance(v, IndivVar) else IndivVar(v) for v in vs)


class Formula:
    """Base class; all nodes are immutable and compare structurally."""

    __slots__ = ()

    def children(self) -> tuple["Formula", ...]:
        return ()

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)

    def __rshift__(self, other: "Formula") -> "Formula":
        return Implies(self, other)

    def __str__(self) -> str:
        from .syntax import render

        return render(self)


@dataclass(frozen=True)
class Atom(Formula):
    pred: PredVar
    args: tuple[IndivVar, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", _vars(self.args))
        if len(self.args) != self.pred.arity:
            raise ArityError(
                f"{self.pred.name} has arity {self.pred.arity} but got {len(self.args)} arguments"
            )


@dataclass(frozen=True)
class EqTuple(Formula):
    left: tuple[IndivVar, ...]
    right: tuple[IndivVar, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "left", _vars(self.left))
        object.__setattr__(self, "right", _vars(self.right))
        if len(self.left) != len(self.right) or not self.left:
            raise ArityError("tuple equality needs two nonempty sides of equal length")


@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    def children(self) -> tuple[Formula, ...]:
        return (self.body,)


@dataclass(frozen=True)
class _Binary(Formula):
    left: Formula
    right: Formula

    def children(self) -> tuple[Formula, ...]:
        return (self.left, self.right)


class And(_Binary):
    pass


class Or(_Binary):
    pass


class Implies(_Binary):
    pass


class Iff(_Binary):
    pass


@dataclass(frozen=True)
class _IndivQuant(Formula):
    vars: tuple[IndivVar, ...]
    body: Formula

    def __post_init__(self) -> None:
        object.__setattr__(self, "vars", _vars(self.vars))
        if not self.vars:
            raise FormulaError("quantifier needs at least one variable")
        if len(set(self.vars)) != len(self.vars):
            raise FormulaError(f"duplicate quantified variables in {self.vars}")

    def children(self) -> tuple[Formula, ...]:
        return (self.body,)


class ForallIndiv(_IndivQuant):
    pass


class ExistsIndiv(_IndivQuant):
    pass


class ExistsExactlyOne(_IndivQuant):
    """Exactly one tuple of values for ``vars`` satisfies the body."""


@dataclass(frozen=True)
class _PredQuant(Formula):
    pred: PredVar
    body: Formula

    def children(self) -> tuple[Formula, ...]:
        return (self.body,)


class ForallPred(_PredQuant):
    pass


class ExistsPred(_PredQuant):
    pass


INDIV_QUANTS = (ForallIndiv, ExistsIndiv, ExistsExactlyOne)
PRED_QUANTS = (ForallPred, ExistsPred)
BINARY = (And, Or, Implies, Iff)


# -- convenience constructors -------------------------------------------------

def atom(pred: PredVar, *args: Union[str, IndivVar]) -> Atom:
    return Atom(pred, _vars(args))


def eq(left, right) -> EqTuple:
    if isinstance(left, (str, IndivVar)):
        left, right = (left,), (right,)
    return EqTuple(_vars(left), _vars(right))


def conj(*fs: Formula) -> Formula:
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def forall(vs, body: Formula) -> Formula:
    return ForallIndiv(_vars([vs] if isinstance(vs, (str, IndivVar)) else vs), body)


def exists(vs, body: Formula) -> Formula:
    return ExistsIndiv(_vars([vs] if isinstance(vs, (str, IndivVar)) else vs), body)


def exists1(vs, body: Formula) -> Formula:
    return ExistsExactlyOne(_vars([vs] if isinstance(vs, (str, IndivVar)) else vs), body)


# -- traversal ----------------------------------------------------------------

def subformulas(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(g.children()))


def free_vars(f: Formula) -> tuple[set[IndivVar], set[PredVar]]:
    """Free individual and predicate variables of ``f``."""
    if isinstance(f, Atom):
        return set(f.args), {f.pred}
    if isinstance(f, EqTuple):
        return set(f.left) | set(f.right), set()
    if isinstance(f, INDIV_QUANTS):
        iv, pv = free_vars(f.body)
        return iv - set(f.vars), pv
    if isinstance(f, PRED_QUANTS):
        iv, pv = free_vars(f.body)
        return iv, pv - {f.pred}
    iv, pv = set(), set()
    for c in f.children():
        ci, cp = free_vars(c)
        iv |= ci
        pv |= cp
    return iv, pv


def all_names(f: Formula) -> set[str]:
    """Every variable name occurring in ``f``, free or bound."""
    names: set[str] = set()
    for g in subformulas(f):
        if isinstance(g, Atom):
            names.add(g.pred.name)
            names.update(v.name for v in g.args)
        elif isinstance(g, EqTuple):
            names.update(v.name for v in g.left + g.right)
        elif isinstance(g, INDIV_QUANTS):
            names.update(v.name for v in g.vars)
        elif isinstance(g, PRED_QUANTS):
            names.add(g.pred.name)
    return names


def is_closed(f: Formula) -> bool:
    iv, pv = free_vars(f)
    return not iv and not pv


def fresh_name(base: str, taken: set[str]) -> str:
    stem = base.rstrip("0123456789_") or base
    for i in itertools.count(1):
        cand = f"{stem}_{i}" if stem[0].islower() else f"{stem}{i}"
        if cand not in taken:
            return cand
    raise AssertionError  # pragma: no cover


def _rebuild(f: Formula, *kids: Formula) -> Formula:
    if isinstance(f, Not):
        return Not(kids[0])
    if isinstance(f, BINARY):
        return type(f)(kids[0], kids[1])
    if isinstance(f, INDIV_QUANTS):
        return type(f)(f.vars, kids[0])
    if isinstance(f, PRED_QUANTS):
        return type(f)(f.pred, kids[0])
    return f


# -- substitution -------------------------------------------------------------

def subst_indiv(f: Formula, mapping: Mapping[IndivVar, IndivVar]) -> Formula:
    """Simultaneously replace free individual variables, renaming binders that would capture."""
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping:
        return f
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(mapping.get(a, a) for a in f.args))
    if isinstance(f, EqTuple):
        return EqTuple(tuple(mapping.get(a, a) for a in f.left), tuple(mapping.get(a, a) for a in f.right))
    if isinstance(f, INDIV_QUANTS):
        inner = {k: v for k, v in mapping.items() if k not in f.vars}
        if not inner:
            return f
        body_free = free_vars(f.body)[0]
        incoming = {v for k, v in inner.items() if k in body_free}
        new_vars = list(f.vars)
        rename: dict[IndivVar, IndivVar] = {}
        taken = all_names(f) | {v.name for v in inner.values()} | {k.name for k in inner}
        for i, v in enumerate(f.vars):
            if v in incoming:
                nv = IndivVar(fresh_name(v.name, taken))
                taken.add(nv.name)
                rename[v] = nv
                new_vars[i] = nv
        body = subst_indiv(f.body, {**inner, **rename})
        return type(f)(tuple(new_vars), body)
    if isinstance(f, PRED_QUANTS):
        return type(f)(f.pred, subst_indiv(f.body, mapping))
    return _rebuild(f, *(subst_indiv(c, mapping) for c in f.children()))


def rename_pred(f: Formula, old: PredVar, new: PredVar) -> Formula:
    """Rename free occurrences of predicate ``old`` to ``new`` (same arity)."""
    if old.arity != new.arity:
        raise ArityError(f"cannot rename {old} to {new}")
    return substitute_pred(f, old, tuple(IndivVar(f"_p{i}") for i in range(old.arity)),
                           Atom(new, tuple(IndivVar(f"_p{i}") for i in range(old.arity))))


def substitute_pred(
    f: Formula,
    target: PredVar,
    params: tuple[Union[IndivVar, str], ...],
    body: Formula,
) -> Formula:
    """Replace every atom ``target(t)`` in ``f`` by ``body[params := t]``.

    Binders of ``f`` that would capture a free variable of ``body`` are renamed.
    """
    params = _vars(params)
    if len(params) != target.arity:
        raise ArityError(f"{target.name} has arity {target.arity}, got {len(params)} parameters")
    if len(set(params)) != len(params):
        raise FormulaError("substitution parameters must be distinct")
    b_indiv, b_pred = free_vars(body)
    if target in b_pred:
        raise FormulaError(f"substituted body mentions {target.name} itself")
    for g in subformulas(f):
        if isinstance(g, PRED_QUANTS) and g.pred == target:
            raise FormulaError(f"{target.name} occurs quantified in the formula")
    outer_free = b_indiv - set(params)
    return _subst_pred(f, target, params, body, outer_free, b_pred)


def _subst_pred(f, target, params, body, body_free_iv, body_free_pv):
    if isinstance(f, Atom):
        if f.pred != target:
            return f
        return subst_indiv(body, dict(zip(params, f.args)))
    if isinstance(f, EqTuple):
        return f
    if isinstance(f, INDIV_QUANTS):
        clash = [v for v in f.vars if v in body_free_iv]
        if clash:
            taken = all_names(f) | all_names(body)
            ren = {}
            for v in clash:
                nv = IndivVar(fresh_name(v.name, taken))
                taken.add(nv.name)
                ren[v] = nv
            f = type(f)(tuple(ren.get(v, v) for v in f.vars), subst_indiv(f.body, ren))
        return type(f)(f.vars, _subst_pred(f.body, target, params, body, body_free_iv, body_free_pv))
    if isinstance(f, PRED_QUANTS):
        if f.pred in body_free_pv:
            taken = all_names(f) | all_names(body)
            np_ = PredVar(fresh_name(f.pred.name, taken), f.pred.arity)
            f = type(f)(np_, rename_pred(f.body, f.pred, np_))
        return type(f)(f.pred, _subst_pred(f.body, target, params, body, body_free_iv, body_free_pv))
    return _rebuild(f, *(_subst_pred(c, target, params, body, body_free_iv, body_free_pv)
                         for c in f.children()))


def desugar_exactly_one(f: ExistsExactlyOne, taken: set[str] | None = None) -> Formula:
    """First-order rendering: some tuple satisfies the body and every satisfying tuple equals it."""
    taken = set(taken or ()) | all_names(f)
    zs = []
    for v in f.vars:
        z = IndivVar(fresh_name(v.name, taken))
        taken.add(z.name)
        zs.append(z)
    moved = subst_indiv(f.body, dict(zip(f.vars, zs)))
    return ExistsIndiv(f.vars, And(f.body, ForallIndiv(tuple(zs), Implies(moved, EqTuple(tuple(zs), f.vars)))))
