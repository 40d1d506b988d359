"""Satisfaction of second-order formulas in truncated Henkin structures.

Every subformula is evaluated to a boolean tensor with one axis per free
individual variable (axes in name order), so individual quantifiers are array
reductions.  Predicate quantifiers loop over the structure's predicate domain:
universals over the ``s_univ`` budget, existentials over ``s_exist``, with
registered witness providers tried first.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

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
    Or,
    PredVar,
    free_vars,
)
from .group_action import Permutation
from .predicate_domain import (
    CertificateError,
    EnumerationGuardError,
    HenkinStructure,
    QuantifierPolicy,
    Strategy,
    SymbolicPredicate,
    act_on_predicate,
)

MEMO_LIMIT = 200_000


class UnassignedError(FormulaError):
    pass


class WitnessSearchFailed(RuntimeError):
    """Providers found no witness and enumeration of the existential domain is not allowed or feasible."""


@dataclass(frozen=True)
class Assignment:
    indivs: Mapping[IndivVar, int] = field(default_factory=dict)
    preds: Mapping[PredVar, SymbolicPredicate] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for pv, p in self.preds.items():
            if pv.arity != p.arity:
                raise FormulaError(f"{pv.name} has arity {pv.arity} but is assigned an arity-{p.arity} predicate")

    def individual(self, v: IndivVar) -> int:
        try:
            return self.indivs[v]
        except KeyError:
            raise UnassignedError(f"individual variable {v.name} is unassigned") from None

    def with_indivs(self, **kw: int) -> "Assignment":
        d = dict(self.indivs)
        d.update({IndivVar(k): v for k, v in kw.items()})
        return Assignment(d, self.preds)

    def with_pred(self, pv: PredVar, p: SymbolicPredicate) -> "Assignment":
        d = dict(self.preds)
        d[pv] = p
        return Assignment(self.indivs, d)

    def act(self, h: HenkinStructure, perm: Permutation) -> "Assignment":
        return Assignment({v: perm(x) for v, x in self.indivs.items()},
                          {pv: act_on_predicate(h, perm, p) for pv, p in self.preds.items()})

    @classmethod
    def of(cls, indivs: Optional[Mapping[str, int]] = None,
           preds: Optional[Mapping[str, SymbolicPredicate]] = None) -> "Assignment":
        return cls({IndivVar(k): v for k, v in (indivs or {}).items()},
                   {PredVar(k, p.arity): p for k, p in (preds or {}).items()})


@dataclass
class EvalOutcome:
    value: bool
    stats: dict[str, int]
    trace: Optional[list[dict]] = None

    def __bool__(self) -> bool:
        return self.value

    def to_json(self) -> dict:
        out = {"value": self.value, "stats": dict(self.stats)}
        if self.trace is not None:
            out["trace"] = self.trace
        return out


# -- witness providers --------------------------------------------------------

ProviderFn = Callable[[HenkinStructure, Mapping[str, SymbolicPredicate], PredVar], Iterable[SymbolicPredicate]]


@dataclass(frozen=True)
class Provider:
    name: str
    fn: ProviderFn
    reads: tuple[str, ...]


PROVIDERS: dict[str, Provider] = {}


def register_provider(name: str, reads: Sequence[str] = ()):
    """Decorator: ``fn(h, env, pred)`` proposes witnesses for ``exists pred``; ``env`` maps names to predicates."""
    def deco(fn: ProviderFn) -> ProviderFn:
        PROVIDERS[name] = Provider(name, fn, tuple(reads))
        return fn
    return deco


# -- tensors ------------------------------------------------------------------

Tensor = tuple[tuple[IndivVar, ...], np.ndarray]


def _align(t: Tensor, target: tuple[IndivVar, ...]) -> np.ndarray:
    vs, arr = t
    shape = [arr.shape[vs.index(v)] if v in vs else 1 for v in target]
    return arr.reshape(shape)


def _binary(op, a: Tensor, b: Tensor) -> Tensor:
    target = tuple(sorted(set(a[0]) | set(b[0])))
    # every target axis has full length in a or b, so broadcasting yields the full shape
    return target, op(_align(a, target), _align(b, target))


def _conjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return _conjuncts(f.left) + _conjuncts(f.right)
    return [f]


class _Evaluator:
    def __init__(self, h: HenkinStructure, policy: QuantifierPolicy, base: Mapping[PredVar, SymbolicPredicate]):
        self.h = h
        self.D = h.n_points
        self.policy = policy
        self.base = dict(base)
        self.stats = {"pred_candidates": 0, "witness_candidates": 0, "witness_hits": 0,
                      "enumerated_existentials": 0, "hoisted": 0, "memo_hits": 0,
                      "witness_over_budget": 0}
        self._fp: dict[int, tuple[PredVar, ...]] = {}
        self._memo: dict = {}
        self._provider_memo: dict = {}

    # free predicate variables of a node, cached by identity
    def free_preds(self, f: Formula) -> tuple[PredVar, ...]:
        k = id(f)
        if k not in self._fp:
            self._fp[k] = tuple(sorted(free_vars(f)[1]))
        return self._fp[k]

    def lookup(self, pv: PredVar, env: Mapping[PredVar, SymbolicPredicate]) -> SymbolicPredicate:
        p = env.get(pv)
        if p is None:
            named = self.h.named.get(pv.name)
            if named is None:
                raise UnassignedError(f"predicate variable {pv.name} is unassigned")
            if named.arity != pv.arity:
                raise FormulaError(f"{pv.name} is a named predicate of arity {named.arity}, used with {pv.arity}")
            p = named
        return p

    def ev(self, f: Formula, env: Mapping[PredVar, SymbolicPredicate]) -> Tensor:
        if isinstance(f, (Atom, EqTuple)):
            return self._leaf(f, env)
        key = (id(f),) + tuple(self.lookup(pv, env).key for pv in self.free_preds(f))
        hit = self._memo.get(key)
        if hit is not None:
            self.stats["memo_hits"] += 1
            return hit
        out = self._ev(f, env)
        if len(self._memo) > MEMO_LIMIT:
            self._memo.clear()
        self._memo[key] = out
        return out

    def _leaf(self, f: Formula, env) -> Tensor:
        if isinstance(f, Atom):
            p = self.lookup(f.pred, env)
            vs = tuple(sorted(set(f.args)))
            letters = {v: chr(97 + i) for i, v in enumerate(vs)}
            src = "".join(letters[a] for a in f.args)
            dst = "".join(letters[v] for v in vs)
            if src == dst:
                return vs, p.ext
            return vs, np.einsum(f"{src}->{dst}", p.ext.view(np.uint8)).astype(bool)
        out: Tensor = ((), np.array(True))
        for a, b in zip(f.left, f.right):
            if a == b:
                continue
            t = (tuple(sorted((a, b))), np.eye(self.D, dtype=bool))
            out = _binary(np.logical_and, out, t)
        return out

    def _ev(self, f: Formula, env) -> Tensor:
        if isinstance(f, Not):
            vs, arr = self.ev(f.body, env)
            return vs, ~arr
        # a tensor missing an axis is constant along it, so short-circuits may drop the right operand
        if isinstance(f, And):
            a = self.ev(f.left, env)
            if not a[1].any():
                return a
            return _binary(np.logical_and, a, self.ev(f.right, env))
        if isinstance(f, Or):
            a = self.ev(f.left, env)
            if a[1].all():
                return a
            return _binary(np.logical_or, a, self.ev(f.right, env))
        if isinstance(f, Implies):
            a = self.ev(f.left, env)
            if not a[1].any():
                return a[0], ~a[1]
            return _binary(np.logical_or, (a[0], ~a[1]), self.ev(f.right, env))
        if isinstance(f, Iff):
            return _binary(np.equal, self.ev(f.left, env), self.ev(f.right, env))
        if isinstance(f, (ForallIndiv, ExistsIndiv, ExistsExactlyOne)):
            vs, arr = self.ev(f.body, env)
            axes = tuple(i for i, v in enumerate(vs) if v in f.vars)
            rest = tuple(v for v in vs if v not in f.vars)
            if isinstance(f, ForallIndiv):
                return rest, arr.all(axis=axes) if axes else arr
            if isinstance(f, ExistsIndiv):
                return rest, arr.any(axis=axes) if axes else arr
            absent = sum(1 for v in f.vars if v not in vs)
            cnt = arr.sum(axis=axes) if axes else arr.astype(np.int64)
            return rest, cnt * (self.D ** absent) == 1
        if isinstance(f, (ForallPred, ExistsPred)):
            return self._pred_quant(f, env)
        raise TypeError(f"unknown formula node {type(f).__name__}")

    # -- predicate quantifiers -------------------------------------------------
    def _pred_quant(self, f, env) -> Tensor:
        pv, body = f.pred, f.body
        guard: Optional[Tensor] = None
        if isinstance(body, Implies):
            if pv not in self.free_preds(body.left):
                # Q P (phi -> psi) with P not free in phi equals phi -> Q P psi
                guard = self.ev(body.left, env)
                if not guard[1].any():
                    self.stats["hoisted"] += 1
                    return guard[0], np.ones_like(guard[1])
                body = body.right
            else:
                # conjuncts of the premise that do not mention P: if they fail, the body holds for every P
                outer = [c for c in _conjuncts(body.left) if pv not in self.free_preds(c)]
                for c in outer:
                    t = self.ev(c, env)
                    if not t[1].any():
                        self.stats["hoisted"] += 1
                        return t[0], np.ones_like(t[1])
        exists = isinstance(f, ExistsPred)
        acc: Optional[Tensor] = None

        def done(a: Tensor) -> bool:
            if guard is None:
                return bool(a[1].all()) if exists else not a[1].any()
            rel = _binary(np.logical_or, (guard[0], ~guard[1]), a)[1]
            return bool(rel.all()) if exists else not rel.any()

        for cand, provided in self._candidates(pv, exists, env, body):
            self.stats["pred_candidates"] += 1
            sub = dict(env)
            sub[pv] = cand
            val = self.ev(body, sub)
            acc = val if acc is None else _binary(np.logical_or if exists else np.logical_and, acc, val)
            if done(acc):
                if provided:
                    self.stats["witness_hits"] += 1
                break
        if acc is None:
            # only a witness-only search can come up empty; report "no witness found"
            acc = ((), np.zeros((), dtype=bool))
        if guard is not None:
            acc = _binary(np.logical_or, (guard[0], ~guard[1]), acc)
        return acc

    def _candidates(self, pv: PredVar, exists: bool, env, body):
        if not exists:
            for cand in self.h.universal_domain(pv.arity):
                yield cand, False
            return
        strategy = self.policy.strategy
        seen: set[bytes] = set()
        if strategy is not Strategy.ENUMERATE:
            for cand in self._provided(pv, env):
                if cand.key in seen:
                    continue
                seen.add(cand.key)
                self.stats["witness_candidates"] += 1
                yield cand, True
            if strategy is Strategy.WITNESS and not self.policy.allow_fallback:
                return
        try:
            domain = self.h.existential_domain(pv.arity)
        except EnumerationGuardError as e:
            raise WitnessSearchFailed(
                f"no provided witness for {pv.name} and enumeration is infeasible: {e}") from None
        self.stats["enumerated_existentials"] += 1
        for cand in domain:
            if cand.key not in seen:
                yield cand, False

    def _provided(self, pv: PredVar, env) -> list[SymbolicPredicate]:
        out: list[SymbolicPredicate] = []
        named = {p.name: q for p, q in env.items()}
        for name in self.policy.providers:
            prov = PROVIDERS.get(name)
            if prov is None:
                raise KeyError(f"unknown witness provider {name!r}")
            view = dict(self.h.named)
            view.update(named)
            key = (name, pv) + tuple(view[r].key if r in view else None for r in prov.reads)
            if key not in self._provider_memo:
                kept = []
                for c in prov.fn(self.h, view, pv):
                    if c.arity != pv.arity:
                        continue
                    if not c.certified or not self.h.is_supported_by(c.ext, c.support):
                        raise CertificateError(f"provider {name} returned an uncertified predicate")
                    if self.h.group.support_size(c.support) > self.policy.s_exist:
                        # admissible in the model, but outside this truncation's budget
                        self.stats["witness_over_budget"] += 1
                        continue
                    kept.append(c)
                self._provider_memo[key] = kept
            out.extend(self._provider_memo[key])
        return out


def _base_env(h: HenkinStructure, asg: Assignment) -> dict[PredVar, SymbolicPredicate]:
    return dict(asg.preds)


def _check_covered(h: HenkinStructure, asg: Assignment, f: Formula, extra: Iterable[IndivVar] = ()) -> None:
    iv, pv = free_vars(f)
    for v in iv - set(extra):
        asg.individual(v)
    for p in pv:
        if p not in asg.preds and p.name not in h.named:
            raise UnassignedError(f"predicate variable {p.name} is unassigned")


def evaluate_tensor(h: HenkinStructure, asg: Assignment, f: Formula, vars: Sequence[IndivVar],
                    policy: Optional[QuantifierPolicy] = None) -> np.ndarray:
    """Truth values of ``f`` for every tuple of values of ``vars`` (axes in the given order)."""
    vars = tuple(vars)
    _check_covered(h, asg, f, vars)
    e = _Evaluator(h, policy or h.policy, _base_env(h, asg))
    vs, arr = e.ev(f, e.base)
    idx = []
    for v in vs:
        idx.append(slice(None) if v in vars else asg.individual(v))
    arr = arr[tuple(idx)]
    arr = _reorder(arr, [v for v in vs if v in vars], vars)
    return np.broadcast_to(arr, (e.D,) * len(vars)).copy()


def _reorder(arr: np.ndarray, kept: list[IndivVar], vars: tuple[IndivVar, ...]) -> np.ndarray:
    order = [v for v in vars if v in kept]
    arr = np.transpose(arr, [kept.index(v) for v in order])
    return arr.reshape([arr.shape[order.index(v)] if v in order else 1 for v in vars])


def evaluate(h: HenkinStructure, asg: Optional[Assignment], f: Formula,
             policy: Optional[QuantifierPolicy] = None, trace: bool = False) -> EvalOutcome:
    """Truth value of ``f`` in ``h`` under ``asg``."""
    asg = asg or Assignment()
    policy = policy or h.policy
    _check_covered(h, asg, f)
    e = _Evaluator(h, policy, _base_env(h, asg))
    t0 = time.perf_counter()
    vs, arr = e.ev(f, e.base)
    value = bool(arr[tuple(asg.individual(v) for v in vs)])
    e.stats["elapsed_ms"] = int((time.perf_counter() - t0) * 1000)
    tr = _trace(e, f, asg) if (trace and not value) else None
    return EvalOutcome(value, e.stats, tr)


def _trace(e: _Evaluator, f: Formula, asg: Assignment) -> list[dict]:
    """First failing choice along each quantifier of the leading universal prefix."""
    steps: list[dict] = []
    env = dict(e.base)
    indivs = dict(asg.indivs)
    while isinstance(f, (ForallPred, ForallIndiv)):
        if isinstance(f, ForallPred):
            for cand in e.h.universal_domain(f.pred.arity):
                sub = dict(env)
                sub[f.pred] = cand
                vs, arr = e.ev(f.body, sub)
                if not arr[tuple(indivs[v] for v in vs)]:
                    steps.append({"var": f.pred.name, "value": e.h.predicate_to_json(cand)})
                    env = sub
                    break
            else:  # pragma: no cover - the quantifier would not have failed
                break
        else:
            vs, arr = e.ev(f.body, env)
            bound = [v for v in vs if v in f.vars]
            idx = tuple(slice(None) if v in f.vars else indivs[v] for v in vs)
            bad = np.argwhere(~arr[idx])
            if not len(bad):
                break
            vals = dict(zip(bound, (int(i) for i in bad[0])))
            for v in f.vars:
                indivs[v] = vals.get(v, 0)
            steps.append({"var": [v.name for v in f.vars],
                          "value": [list(e.h.group.individual(indivs[v])) for v in f.vars]})
        f = f.body
    return steps


def eval_equivariant_check(h: HenkinStructure, asg: Assignment, f: Formula, perm: Permutation,
                           policy: Optional[QuantifierPolicy] = None) -> bool:
    """Truth is unchanged when every assigned value is moved by a group element."""
    if not h.group.contains(perm):
        raise ValueError("permutation is not in the structure's group")
    a = evaluate(h, asg, f, policy).value
    b = evaluate(h, asg.act(h, perm), f, policy).value
    return a == b
