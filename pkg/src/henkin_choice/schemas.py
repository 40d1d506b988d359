"""Builders for the second-order choice schemas and the auxiliary formulas bij and image."""

from __future__ import annotations

from typing import Iterable, Optional

from .formula import (
    And,
    Atom,
    EqTuple,
    ExistsExactlyOne,
    ExistsIndiv,
    ExistsPred,
    ForallIndiv,
    ForallPred,
    Formula,
    FormulaError,
    Iff,
    Implies,
    IndivVar,
    Not,
    PredVar,
    free_vars,
    substitute_pred,
)
from .syntax import parse


class SlotSignatureError(FormulaError):
    """A formula filled into a schema slot has a free variable the schema would capture."""


def xs(n: int, base: str = "x") -> tuple[IndivVar, ...]:
    """Variable tuple of length ``n``: ``x`` for n=1, ``x1..xn`` otherwise."""
    if n < 1:
        raise ValueError("tuple length must be >= 1")
    if n == 1:
        return (IndivVar(base),)
    return tuple(IndivVar(f"{base}{i}") for i in range(1, n + 1))


def _check_nm(*ks: int) -> None:
    for k in ks:
        if k < 1:
            raise ValueError("schema parameters must be >= 1")


def _check_slot(h: Formula, captured_iv: Iterable[IndivVar], captured_pv: Iterable[str], box: str) -> None:
    iv, pv = free_vars(h)
    bad = sorted(v.name for v in iv if v in set(captured_iv))
    bad += sorted(p.name for p in pv if p.name in set(captured_pv))
    if bad:
        raise SlotSignatureError(f"{box}: free variable(s) {', '.join(bad)} would be captured by the schema")


def _check_sort(h: Formula, name: str, arity: int, box: str) -> None:
    for p in free_vars(h)[1]:
        if p.name == name and p.arity != arity:
            raise SlotSignatureError(f"{box}: slot predicate {name} must have sort {arity}, got {p.arity}")


def build_AC(n: int, m: int) -> Formula:
    """Zermelo-Asser axiom AC^{n,m}."""
    _check_nm(n, m)
    x, y = xs(n), xs(m, "y")
    A, R, S = PredVar("A", n), PredVar("R", n + m), PredVar("S", n + m)
    dom = ForallIndiv(x, Iff(Atom(A, x), ExistsIndiv(y, Atom(R, x + y))))
    sel = ForallIndiv(x, Implies(Atom(A, x), ExistsExactlyOne(y, And(Atom(R, x + y), Atom(S, x + y)))))
    return ForallPred(A, ForallPred(R, ExistsPred(S, Implies(dom, sel))))


def build_AC_star(n: int, m: int) -> Formula:
    """Russell-Asser axiom AC_*^{n,m}: choice from pairwise disjoint rows."""
    _check_nm(n, m)
    x, y = xs(n), xs(m, "y")
    x1 = xs(n, "x1_") if n > 1 else (IndivVar("x1"),)
    x2 = xs(n, "x2_") if n > 1 else (IndivVar("x2"),)
    A, R, S = PredVar("A", n), PredVar("R", n + m), PredVar("S", n + m)
    dom = ForallIndiv(x, Iff(Atom(A, x), ExistsIndiv(y, Atom(R, x + y))))
    disj = ForallIndiv(x1, ForallIndiv(x2, Implies(
        And(And(Atom(A, x1), Atom(A, x2)), Not(EqTuple(x1, x2))),
        Not(ExistsIndiv(y, And(Atom(R, x1 + y), Atom(R, x2 + y)))))))
    sel = ForallIndiv(x, Implies(Atom(A, x), ExistsExactlyOne(y, And(Atom(R, x + y), Atom(S, x + y)))))
    return ForallPred(A, ForallPred(R, ExistsPred(S, Implies(And(dom, disj), sel))))


def ac_matrix(phi: Formula) -> Formula:
    """Strip the leading universal predicate prefix of a closed schema instance."""
    while isinstance(phi, ForallPred):
        phi = phi.body
    return phi


def build_AC_HA(n: int, m: int, H: Formula) -> Formula:
    """Hilbert-Ackermann axiom AC^{n,m}(H); ``H`` has free x (n vars) and y (m vars)."""
    _check_nm(n, m)
    x, y = xs(n), xs(m, "y")
    A, S = PredVar("A", n), PredVar("S", n + m)
    _check_slot(H, (), ("A", "S"), "AC^{n,m}(H)")
    dom = ForallIndiv(x, Iff(Atom(A, x), ExistsIndiv(y, H)))
    sel = ForallIndiv(x, Implies(Atom(A, x), ExistsExactlyOne(y, And(H, Atom(S, x + y)))))
    return ForallPred(A, ExistsPred(S, Implies(dom, sel)))


def build_choice(n: int, m: int, H: Formula) -> Formula:
    """Ackermann axiom choice^{n,m}(H); ``H`` has free x and a free slot predicate D of sort m."""
    _check_nm(n, m)
    x, y = xs(n), xs(m, "y")
    D, S = PredVar("D", m), PredVar("S", n + m)
    _check_sort(H, "D", m, "choice^{n,m}(H)")
    _check_slot(H, (), ("S",), "choice^{n,m}(H)")
    lam = substitute_pred(H, D, y, Atom(S, x + y))
    return Implies(ForallIndiv(x, ExistsPred(D, H)), ExistsPred(S, ForallIndiv(x, lam)))


def build_choice_h(n: int, m: int, H: Formula) -> Formula:
    """Ackermann axiom in the Henkin form choice_h^{n,m}(H)."""
    _check_nm(n, m)
    x, y = xs(n), xs(m, "y")
    D, S = PredVar("D", m), PredVar("S", n + m)
    _check_sort(H, "D", m, "choice_h^{n,m}(H)")
    _check_slot(H, (), ("S",), "choice_h^{n,m}(H)")
    slice_ = ForallIndiv(y, Iff(Atom(D, y), Atom(S, x + y)))
    return Implies(ForallIndiv(x, ExistsPred(D, H)),
                   ExistsPred(S, ForallIndiv(x, ExistsPred(D, And(slice_, H)))))


def build_choice_star(m: int, H: Formula) -> Formula:
    """Asser axiom choice_*^m(H); ``H`` has the free slot predicate C of sort m."""
    _check_nm(m)
    y = xs(m, "y")
    C, C1, C2, D = PredVar("C", m), PredVar("C1", m), PredVar("C2", m), PredVar("D", m)
    _check_sort(H, "C", m, "choice_*^m(H)")
    _check_slot(H, (), ("C1", "C2", "D"), "choice_*^m(H)")
    H1 = substitute_pred(H, C, y, Atom(C1, y))
    H2 = substitute_pred(H, C, y, Atom(C2, y))
    nonempty = ForallPred(C, Implies(H, ExistsIndiv(y, Atom(C, y))))
    distinct = Not(ForallIndiv(y, Iff(Atom(C1, y), Atom(C2, y))))
    disjoint = ForallPred(C1, ForallPred(C2, Implies(
        And(And(H1, H2), distinct), Not(ExistsIndiv(y, And(Atom(C1, y), Atom(C2, y)))))))
    transversal = ExistsPred(D, ForallPred(C, Implies(H, ExistsExactlyOne(y, And(Atom(C, y), Atom(D, y))))))
    return Implies(And(nonempty, disjoint), transversal)


def build_bij(r: str = "R", a: str = "A", d: str = "D") -> Formula:
    """``R`` is the graph of a bijection from ``A`` onto ``D``."""
    R, A, D = PredVar(r, 2), PredVar(a, 1), PredVar(d, 1)
    x, y = IndivVar("x"), IndivVar("y")
    c1 = ForallIndiv((x,), ForallIndiv((y,), Implies(Atom(R, (x, y)), And(Atom(A, (x,)), Atom(D, (y,))))))
    c2 = ForallIndiv((y,), Implies(Atom(D, (y,)), ExistsExactlyOne((x,), Atom(R, (x, y)))))
    c3 = ForallIndiv((x,), Implies(Atom(A, (x,)), ExistsExactlyOne((y,), Atom(R, (x, y)))))
    return And(And(c1, c2), c3)


def build_image(x: str = "x", r: str = "R", c: str = "C") -> Formula:
    """``C`` is the image of ``{x}`` under ``R``."""
    X, Y = IndivVar(x), IndivVar("y" if x != "y" else "w")
    return ForallIndiv((Y,), Iff(Atom(PredVar(r, 2), (X, Y)), Atom(PredVar(c, 1), (Y,))))


def witness_H_pair() -> Formula:
    """H(C): C is exactly one T-linked pair (free C, T)."""
    return parse(
        "exists x. exists y. C(x) & C(y) & T(x,y) & "
        "(forallP B:1. B(x) & B(y) & T(x,y) -> forall z. C(z) -> B(z))"
    )


def witness_G_bij() -> Formula:
    """G(x,D,R): for x in A1, R is a bijection from the T-image of x onto D, and D lies in A0."""
    A0, A1 = PredVar("A0", 1), PredVar("A1", 1)
    x, y = IndivVar("x"), IndivVar("y")
    C = PredVar("C", 1)
    inner = ForallPred(C, Implies(build_image("x", "T", "C"), build_bij("R", "C", "D")))
    sub = ForallIndiv((y,), Implies(Atom(PredVar("D", 1), (y,)), Atom(A0, (y,))))
    return Implies(Atom(A1, (x,)), And(sub, inner))


def witness_H_bij() -> Formula:
    """H(x,D) = exists R. G(x,D,R)."""
    return ExistsPred(PredVar("R", 2), witness_G_bij())


# -- the instances used to derive the Zermelo/Russell axioms ------------------

def asser_H_choice(n: int, m: int) -> Formula:
    """H(x,D) = A x -> exists1 y. D y  &  exists y. (R x y & D y)."""
    x, y = xs(n), xs(m, "y")
    A, R, D = PredVar("A", n), PredVar("R", n + m), PredVar("D", m)
    return Implies(Atom(A, x), And(ExistsExactlyOne(y, Atom(D, y)),
                                   ExistsIndiv(y, And(Atom(R, x + y), Atom(D, y)))))


def asser_H_star(n: int, m: int, close_x: bool = True) -> Formula:
    """H(C) = A x & forall y. (C y <-> R x y) & exists y. C y, with x existentially closed by default."""
    x, y = xs(n), xs(m, "y")
    A, R, C = PredVar("A", n), PredVar("R", n + m), PredVar("C", m)
    g = And(Atom(A, x), ForallIndiv(y, Iff(Atom(C, y), Atom(R, x + y))))
    if close_x:
        g = ExistsIndiv(x, g)
    return And(g, ExistsIndiv(y, Atom(C, y)))


def asser_H_star_nm(n: int, m: int, close_x0: bool = True) -> Formula:
    """H(C) = (A x0 & forall x y. (R x y & x = x0 <-> C x y)) & exists x y. C x y."""
    x, y, x0 = xs(n), xs(m, "y"), xs(n, "x0_") if n > 1 else (IndivVar("x0"),)
    A, R, C = PredVar("A", n), PredVar("R", n + m), PredVar("C", n + m)
    g = And(Atom(A, x0), ForallIndiv(x + y, Iff(And(Atom(R, x + y), EqTuple(x, x0)), Atom(C, x + y))))
    if close_x0:
        g = ExistsIndiv(x0, g)
    return And(g, ExistsIndiv(x + y, Atom(C, x + y)))


def ac_body(n: int, m: int, star: bool = False) -> Formula:
    """The AC (or AC_*) matrix below the universal A, R prefix, S still quantified."""
    return ac_matrix(build_AC_star(n, m) if star else build_AC(n, m))


def schema_instance(kind: str, n: int, m: int, H: Optional[Formula] = None) -> Formula:
    """Dispatch by schema name: AC, AC*, AC_HA, choice, choice_h, choice*."""
    if kind == "AC":
        return build_AC(n, m)
    if kind == "AC*":
        return build_AC_star(n, m)
    if H is None:
        raise ValueError(f"schema {kind} needs a formula H")
    if kind == "AC_HA":
        return build_AC_HA(n, m, H)
    if kind == "choice":
        return build_choice(n, m, H)
    if kind == "choice_h":
        return build_choice_h(n, m, H)
    if kind == "choice*":
        return build_choice_star(m, H)
    raise ValueError(f"unknown schema {kind!r}")
