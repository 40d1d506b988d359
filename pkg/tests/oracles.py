"""Independent reference implementations used as test oracles.

Nothing here touches the tensor evaluator or the orbit kernels: the naive
evaluator recurses over explicit assignments, and invariance is checked
against group elements listed by brute force.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from henkin_choice.formula import (
    And, Atom, EqTuple, ExistsExactlyOne, ExistsIndiv, ExistsPred, ForallIndiv, ForallPred,
    Iff, Implies, IndivVar, Not, Or, PredVar,
)


def naive_eval(f, D, indivs, preds, univ, exist):
    """Tarski satisfaction; ``univ``/``exist`` map arity -> list of extensions (sets of tuples)."""
    rec = lambda g, i=indivs, p=preds: naive_eval(g, D, i, p, univ, exist)
    if isinstance(f, Atom):
        return tuple(indivs[v] for v in f.args) in preds[f.pred]
    if isinstance(f, EqTuple):
        return all(indivs[a] == indivs[b] for a, b in zip(f.left, f.right))
    if isinstance(f, Not):
        return not rec(f.body)
    if isinstance(f, And):
        return rec(f.left) and rec(f.right)
    if isinstance(f, Or):
        return rec(f.left) or rec(f.right)
    if isinstance(f, Implies):
        return (not rec(f.left)) or rec(f.right)
    if isinstance(f, Iff):
        return rec(f.left) == rec(f.right)
    if isinstance(f, (ForallIndiv, ExistsIndiv, ExistsExactlyOne)):
        vals = [rec(f.body, {**indivs, **dict(zip(f.vars, t))})
                for t in itertools.product(range(D), repeat=len(f.vars))]
        if isinstance(f, ForallIndiv):
            return all(vals)
        if isinstance(f, ExistsIndiv):
            return any(vals)
        return sum(vals) == 1
    if isinstance(f, (ForallPred, ExistsPred)):
        dom = (univ if isinstance(f, ForallPred) else exist)[f.pred.arity]
        vals = (rec(f.body, indivs, {**preds, f.pred: ext}) for ext in dom)
        return all(vals) if isinstance(f, ForallPred) else any(vals)
    raise TypeError(type(f))


def as_set(p) -> frozenset:
    return frozenset(p.tuples())


def all_subsets(D: int, arity: int):
    tuples = list(itertools.product(range(D), repeat=arity))
    for mask in range(1 << len(tuples)):
        yield frozenset(t for i, t in enumerate(tuples) if mask >> i & 1)


def brute_invariant(ext: frozenset, perms) -> bool:
    return all(frozenset(tuple(g.image[x] for x in t) for t in ext) == ext for g in perms)


def brute_stabilizer(group, pts):
    return [g for g in group.elements() if all(g.image[p] == p for p in pts)]


def brute_orbits(D: int, arity: int, perms) -> int:
    seen: set = set()
    count = 0
    for t in itertools.product(range(D), repeat=arity):
        if t in seen:
            continue
        count += 1
        stack = [t]
        seen.add(t)
        while stack:
            u = stack.pop()
            for g in perms:
                v = tuple(g.image[x] for x in u)
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
    return count


# -- random formulas --------------------------------------------------------------

X, Y, Z = IndivVar("x"), IndivVar("y"), IndivVar("z")
P, Q, B = PredVar("P", 1), PredVar("Q", 2), PredVar("B", 1)
VARS = (X, Y, Z)


def random_formula(rng: random.Random, depth: int = 3, pred_quants: bool = True):
    """Formula over free P:1, Q:2 and free/bound x, y, z; B:1 only under a predicate quantifier."""
    return _rf(rng, depth, pred_quants, bound_B=False)


def _rf(rng, depth, pq, bound_B):
    if depth == 0 or rng.random() < 0.25:
        k = rng.randrange(4 if bound_B else 3)
        v = [rng.choice(VARS) for _ in range(2)]
        if k == 0:
            return Atom(P, (v[0],))
        if k == 1:
            return Atom(Q, tuple(v))
        if k == 2:
            return EqTuple((v[0],), (v[1],))
        return Atom(B, (v[0],))
    k = rng.randrange(10 if pq else 8)
    sub = lambda: _rf(rng, depth - 1, pq, bound_B)
    if k == 0:
        return Not(sub())
    if k in (1, 2, 3, 4):
        return (And, Or, Implies, Iff)[k - 1](sub(), sub())
    if k in (5, 6, 7):
        vs = tuple(rng.sample(VARS, rng.choice([1, 1, 2])))
        return (ForallIndiv, ExistsIndiv, ExistsExactlyOne)[k - 5](vs, sub())
    body = _rf(rng, depth - 1, pq, True)
    return (ForallPred if k == 8 else ExistsPred)(B, body)


def random_assignment(h, rng: np.random.Generator, budget: int):
    from henkin_choice.battery import random_predicate

    indivs = {v: int(rng.integers(h.n_points)) for v in VARS}
    preds = {P: random_predicate(h, 1, rng, budget), Q: random_predicate(h, 2, rng, budget)}
    return indivs, preds
