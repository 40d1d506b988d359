"""Registry of executable claims about the choice axioms, and the runner that produces ClaimResults.

Verdicts are ``true``/``false`` for statements about one structure and
``no-counterexample``/``counterexample`` for implications checked over a
battery of structures.  An implication that survives the battery is only that:
no counterexample was found at desk scale.
"""

from __future__ import annotations

import itertools
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Optional

import numpy as np

from .battery import (
    battery_structures,
    implication_over_battery,
    pointwise_implication,
    random_AR,
)
from .choice_constructions import (
    FidelityError,
    refute_choice_h_sigma3,
    refute_choice_star1_sigma2,
    verify_choice_sigma2,
    verify_choice_sigma3,
)
from .evaluator import Assignment, evaluate
from .formula import And, Atom, ExistsExactlyOne, ForallPred, Implies, IndivVar, PredVar
from .group_action import GroupKind, GroupSpec, generated_group, pointwise_stabilizer
from .predicate_domain import (
    FidelityWarning,
    QuantifierPolicy,
    Strategy,
    build_full,
    build_sigma0,
    build_sigma2,
    build_sigma3,
    comprehend,
)
from .schemas import (
    ac_matrix,
    asser_H_choice,
    asser_H_star,
    asser_H_star_nm,
    build_AC,
    build_AC_star,
    build_choice,
    build_choice_h,
    build_choice_star,
    witness_H_pair,
)
from .syntax import parse

VERDICTS = ("true", "false", "no-counterexample")
TIMING_KEYS = ("elapsed_ms", "elapsed_s")


class UnknownClaim(KeyError):
    pass


class GuardViolation(ValueError):
    """Parameters below a claim's fidelity guard, and no force flag."""


@dataclass(frozen=True)
class Claim:
    id: str
    statement: str
    structure: Mapping[str, Any]
    procedure: str
    expected: str
    defaults: Mapping[str, Any]
    fidelity: tuple[str, ...] = ()
    depends: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.expected not in VERDICTS:
            raise ValueError(f"{self.id}: expected verdict must be one of {VERDICTS}")

    def to_json(self) -> dict:
        return {"id": self.id, "statement": self.statement, "structure": dict(self.structure),
                "procedure": self.procedure, "expected": self.expected, "defaults": dict(self.defaults),
                "fidelity": list(self.fidelity), "depends": list(self.depends)}


@dataclass(frozen=True)
class Annotation:
    """A relationship recorded for completeness but not executed here."""
    id: str
    statement: str
    status: str  # realized-by | unchecked
    claims: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"id": self.id, "statement": self.statement, "status": self.status, "claims": list(self.claims)}


@dataclass
class ClaimResult:
    claim_id: str
    verdict: str
    expected: str
    elapsed_s: float
    payload: dict
    params: dict
    fidelity: list[str] = field(default_factory=list)

    @property
    def match(self) -> bool:
        return self.verdict == self.expected

    def to_json(self, timing: bool = True) -> dict:
        out = {"claim": self.claim_id, "verdict": self.verdict, "expected": self.expected,
               "match": self.match, "elapsed_s": round(self.elapsed_s, 3), "params": self.params,
               "fidelity": self.fidelity, "payload": self.payload}
        return out if timing else _scrub(out)


def _scrub(obj):
    if isinstance(obj, dict):
        return {k: _scrub(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [_scrub(v) for v in obj]
    return obj


def _tf(b: bool) -> str:
    return "true" if b else "false"


# -- procedures ---------------------------------------------------------------------
# Each takes (params, seed, deps) and returns (verdict, payload, fidelity notes).

Proc = Callable[[dict, int, Mapping[str, ClaimResult]], tuple[str, dict, list[str]]]


def _policy(p: dict, providers: tuple[str, ...] = (), strategy: Strategy = Strategy.HYBRID) -> QuantifierPolicy:
    return QuantifierPolicy(s_univ=p["s_univ"], s_exist=p["s_exist"], strategy=strategy, providers=providers)


def _quiet(fn, *a, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FidelityWarning)
        return fn(*a, **kw)


def _prop_choice_implies_ac(p, seed, deps):
    n, m = p["n"], p["m"]
    left = build_choice(n, m, asser_H_choice(n, m))
    right = ac_matrix(build_AC(n, m))
    return _pointwise(p, seed, [(left, right, n, m, f"choice^{{{n},{m}}}(H) -> AC^{{{n},{m}}}")])


def _prop_choicestar_implies_acstar(p, seed, deps):
    cases = []
    for n in range(1, p["max_nm"] + 1):
        for m in range(1, p["max_nm"] + 1):
            cases.append((build_choice_star(m, asser_H_star(n, m)), ac_matrix(build_AC_star(n, m)), n, m,
                          f"choice_*^{m}(H) -> AC_*^{{{n},{m}}}"))
    return _pointwise(p, seed, cases)


def _prop_choicestar_implies_ac(p, seed, deps):
    n, m = p["n"], p["m"]
    left = build_choice_star(n + m, asser_H_star_nm(n, m))
    right = ac_matrix(build_AC(n, m))
    return _pointwise(p, seed, [(left, right, n, m, f"choice_*^{n + m}(H) -> AC^{{{n},{m}}}")])


def _pointwise(p, seed, cases):
    rows = []
    bad = None
    for k, size in enumerate(p["sizes"]):
        h = build_full(size, QuantifierPolicy(s_univ=0, s_exist=0, providers=("canonical-choice",)))
        for idx, (left, right, n, m, label) in enumerate(cases):
            rng = np.random.default_rng([seed, k, idx])
            cap = p["cap"] if size in p["exhaustive_sizes"] else 0
            r = pointwise_implication(h, left, right, n, m, rng, cap=cap, samples=p["samples"])
            r["instance"] = label
            rows.append(r)
            if r["counterexample"] and bad is None:
                bad = r
    undetermined = sum(r["undetermined"] for r in rows)
    verdict = "counterexample" if bad else ("no-counterexample" if not undetermined else "undetermined")
    notes = [f"full structures with |I| in {list(p['sizes'])}; exhaustive over (A, R) at |I| in "
             f"{list(p['exhaustive_sizes'])} when at most {p['cap']} pairs, otherwise {p['samples']} seeded samples"]
    return verdict, {"rows": rows, "first_counterexample": bad}, notes


def _example_steps(p, seed, deps):
    """Replay the semantic steps from the transversal D to the selector S = {(x,y) | R x y & D y}."""
    x, y = IndivVar("x"), IndivVar("y")
    A, R, C, D, S = PredVar("A", 1), PredVar("R", 2), PredVar("C", 1), PredVar("D", 1), PredVar("S", 2)
    H = asser_H_star(1, 1)
    transversal = ForallPred(C, Implies(H, ExistsExactlyOne((y,), And(Atom(C, (y,)), Atom(D, (y,))))))
    guard = ac_matrix(build_AC_star(1, 1)).body.left  # dom & disjointness
    step_f = parse("A(x) -> exists1 y. C(y) & D(y)", {"A": 1, "C": 1, "D": 1})
    step_g = parse("forall y. (R(x,y) & D(y) <-> C(y) & D(y))", {"R": 2, "C": 1, "D": 1})
    step_h = parse("forall x y. (R(x,y) & D(y) <-> R(x,y) & S(x,y))", {"R": 2, "D": 1, "S": 2})
    concl = parse("forall x. A(x) -> exists1 y. R(x,y) & S(x,y)", {"A": 1, "R": 2, "S": 2})
    row_f = parse("R(x,y)", {"R": 2})
    sel_f = parse("R(x,y) & D(y)", {"R": 2, "D": 1})
    structures = [_quiet(build_full, k) for k in p["sizes"]]
    structures.append(_quiet(build_sigma2, p["N"], QuantifierPolicy(s_univ=p["s_univ"], s_exist=p["s_exist"],
                                                                     strategy=Strategy.ENUMERATE)))
    rows = []
    failures = []
    for k, h in enumerate(structures):
        rng = np.random.default_rng([seed, k])
        if h.group.kind is GroupKind.STANDARD:
            pairs = [(a, r) for r in h.universal_domain(2) for a in h.universal_domain(1)
                     if np.array_equal(a.ext, r.ext.any(axis=1))]
        else:
            pairs = [random_AR(h, 1, 1, rng, h.policy.s_univ) for _ in range(p["samples"])]
        row = {"structure": h.params(), "pairs": len(pairs), "premises_held": 0, "e_held": 0, "steps_checked": 0}
        for a, r in pairs:
            base = Assignment({}, {A: a, R: r})
            if not evaluate(h, base, guard).value:
                continue
            row["premises_held"] += 1
            delta = next((d for d in h.existential_domain(1)
                          if evaluate(h, base.with_pred(D, d), transversal).value), None)
            if delta is None:
                continue  # no transversal here: (e) is not available, nothing to replay
            row["e_held"] += 1
            env = base.with_pred(D, delta)
            ok = True
            for xi in map(int, np.flatnonzero(a.ext)):
                at = env.with_indivs(x=xi)
                gamma = comprehend(h, row_f, (y,), at, h.policy.with_(s_exist=max(h.policy.s_exist, 3)))
                at = at.with_pred(C, gamma)
                ok &= evaluate(h, at, H).value and evaluate(h, at, step_f).value and evaluate(h, at, step_g).value
            sigma = comprehend(h, sel_f, (x, y), env, h.policy.with_(s_exist=max(h.policy.s_exist, 3)))
            env = env.with_pred(S, sigma)
            ok &= evaluate(h, env, step_h).value and evaluate(h, env, concl).value
            row["steps_checked"] += 1
            if not ok and len(failures) < 5:
                failures.append({"structure": h.params(), "A": h.predicate_to_json(a), "R": h.predicate_to_json(r)})
        rows.append(row)
    exercised = sum(r["steps_checked"] for r in rows)
    verdict = _tf(exercised > 0 and not failures)
    return verdict, {"rows": rows, "failures": failures, "exercised": exercised}, [
        f"full structures |I| in {list(p['sizes'])} exhaustive; sigma2 N={p['N']} sampled ({p['samples']})"]


def _sigma2_guard(p):
    if p["N"] - p["s_univ"] < 2:
        return f"sigma2 construction needs two free pairs beyond every support: N - s_univ = {p['N'] - p['s_univ']} < 2"
    return None


def _sigma2_notes(p):
    notes = [f"sigma2 N={p['N']} s_univ={p['s_univ']} s_exist={p['s_exist']}"]
    if p["N"] < 2 * p["s_exist"] + 2:
        notes.append(f"below the generic guard N >= 2*s_exist+2 = {2 * p['s_exist'] + 2}; "
                     f"the procedure-specific guards (two free pairs, N > s_exist) hold")
    return notes


def _sigma2_ac11(p, seed, deps):
    h = _quiet(build_sigma2, p["N"], _policy(p, ("sigma2-choice",)))
    rep = verify_choice_sigma2(h)
    payload = {"construction": rep.to_json()}
    ok = rep.ok
    if p["formula"]:
        out = evaluate(h, None, build_AC(1, 1))
        payload["formula"] = {"value": out.value, "stats": out.stats}
        ok = ok and out.value
    return _tf(ok), payload, _sigma2_notes(p)


def _sigma2_not_choicestar1(p, seed, deps):
    if p["N"] <= p["s_exist"]:
        raise FidelityError(f"need a free pair beyond every {p['s_exist']}-pair support (N={p['N']})")
    h = _quiet(build_sigma2, p["N"], _policy(p))
    rep = refute_choice_star1_sigma2(h, cross_check=p["cross_check"])
    payload = rep.to_json(limit=10)
    if rep.cross_check is not None and not rep.cross_check["agrees"]:
        return "undetermined", payload, _sigma2_notes(p)
    return _tf(rep.verdict), payload, _sigma2_notes(p)


def _lemma_sigma2_support(p, seed, deps):
    """Rows of a binary rho are constant on the free pairs outside K and the pair of xi; unary predicates split."""
    h = _quiet(build_sigma2, p["N"], _policy(p))
    g = h.group
    checked = 0
    failures = []
    for rho in h.enumerate_predicates(2, p["budget"]):
        K = {q // 2 for q in rho.support}
        for xi in range(h.n_points):
            free = [q for q in range(h.n_points) if q // 2 not in K and q // 2 != xi // 2]
            vals = {bool(rho.ext[xi, q]) for q in free}
            checked += 1
            if len(vals) > 1 and len(failures) < 5:
                failures.append({"rho": h.predicate_to_json(rho), "xi": list(g.individual(xi))})
    dich = 0
    for alpha in h.enumerate_predicates(1, p["budget"]):
        K = set(alpha.support)
        inside = all(q in K for q in np.flatnonzero(alpha.ext))
        covers = all(alpha.ext[q] for q in range(h.n_points) if q not in K)
        dich += 1
        if not (inside or covers) and len(failures) < 5:
            failures.append({"alpha": h.predicate_to_json(alpha), "error": "unary dichotomy"})
    return _tf(not failures), {"row_checks": checked, "unary_checks": dich, "failures": failures}, [
        f"sigma2 N={p['N']}, every predicate with support of at most {p['budget']} pairs"]


def _sigma3_guard(p):
    if p["N0"] - p["s_univ"] < 2:
        return f"sigma3 construction needs two free part-0 points beyond every support (N0={p['N0']})"
    return None


def _sigma3_notes(p):
    return [f"sigma3 N0={p['N0']} N1={p['N1']} s_univ={p['s_univ']} s_exist={p['s_exist']}"]


def _sigma3_ac11(p, seed, deps):
    h = _quiet(build_sigma3, p["N0"], p["N1"], _policy(p, ("sigma3-choice",)))
    rep = verify_choice_sigma3(h, samples=p["samples"], seed=seed)
    payload = {"construction": rep.to_json()}
    notes = _sigma3_notes(p) + ["every admissible rho factors into row classes, each checked; "
                                f"plus {p['samples']} random unions"]
    return _tf(rep.ok), payload, notes


def _sigma3_not_choiceh11(p, seed, deps):
    h = _quiet(build_sigma3, p["N0"], p["N1"], _policy(p))
    rep = refute_choice_h_sigma3(h, cross_check=p["cross_check"])
    payload = rep.to_json(limit=10)
    notes = _sigma3_notes(p) + [
        f"antecedent verified with explicit witnesses at s_exist={rep.guards['forall_x_exists_D_H']['witness_s_exist']}; "
        f"consequent refuted over every candidate of the s_exist={p['s_exist']} domain"]
    if rep.cross_check is not None and not (rep.cross_check["agrees"] and not rep.cross_check["consequent_value"]):
        return "undetermined", payload, notes
    return _tf(rep.verdict), payload, notes


def _lemma_sigma3_stabilizer(p, seed, deps):
    """Fixing part-1 points adds nothing: the stabilizer of K equals that of K plus any part-1 set."""
    checked = 0
    failures = []
    for N0 in range(1, p["N"] + 1):
        for N1 in range(1, p["N"] + 1):
            g = GroupSpec(GroupKind.FIX_PART1, N0, N1)
            part0 = [g.point(0, i) for i in range(N0)]
            part1 = [g.point(1, i) for i in range(N1)]
            for r in range(len(part0) + 1):
                for K in itertools.combinations(part0, r):
                    base = pointwise_stabilizer(g, K)
                    gen = generated_group(g.stabilizer_generators(K), g.n_points)
                    for q in range(len(part1) + 1):
                        for P in itertools.combinations(part1, q):
                            checked += 1
                            if pointwise_stabilizer(g, K + P) != base or gen != base:
                                if len(failures) < 5:
                                    failures.append({"N0": N0, "N1": N1, "K": list(K), "P": list(P)})
    return _tf(not failures), {"checked": checked, "failures": failures}, [f"all N0, N1 <= {p['N']}"]


def _sigma0_ac11(p, seed, deps):
    h = _quiet(build_sigma0, p["N"], _policy(p, ("sigma3-choice", "canonical-choice")))
    out = evaluate(h, None, build_AC(1, 1))
    return _tf(out.value), {"value": out.value, "stats": out.stats}, [
        f"sigma0 N={p['N']} s_univ={p['s_univ']} s_exist={p['s_exist']}"]


def _sigma0_choice_star1(p, seed, deps):
    T = PredVar("T", 2)
    h = _quiet(build_sigma0, p["N"], _policy(p, strategy=Strategy.ENUMERATE))
    inst = build_choice_star(1, witness_H_pair())
    checked = 0
    nontrivial = 0
    failures = []
    for t in h.enumerate_predicates(2, p["t_budget"]):
        asg = Assignment({}, {T: t})
        checked += 1
        if evaluate(h, asg, inst.left).value:
            nontrivial += 1
        if not evaluate(h, asg, inst).value and len(failures) < 5:
            failures.append(h.predicate_to_json(t))
    return _tf(not failures), {"T_checked": checked, "antecedent_held": nontrivial, "failures": failures}, [
        f"sigma0 N={p['N']} s_univ={p['s_univ']} s_exist={p['s_exist']}; T over supports of at most "
        f"{p['t_budget']} points; instance with the pair-selecting H"]


def _sigma0_choice_h11(p, seed, deps):
    pol = QuantifierPolicy(s_univ=p["s_univ"], s_exist=p["s_exist"], strategy=Strategy.WITNESS,
                           providers=("sigma3-choice", "slices", "singletons"), allow_fallback=False)
    h = _quiet(build_sigma0, p["N"], pol)
    A, R = PredVar("A", 1), PredVar("R", 2)
    inst = ForallPred(A, ForallPred(R, build_choice_h(1, 1, asser_H_choice(1, 1))))
    out = evaluate(h, None, inst)
    verdict = "true" if out.value else "undetermined"  # witness-only search cannot refute
    return verdict, {"value": out.value, "stats": out.stats}, [
        f"sigma0 N={p['N']} s_univ={p['s_univ']} s_exist={p['s_exist']}; instance with the choice-function H",
        "existentials decided by explicit witnesses only, so only a true value is conclusive"]


def _composite(expect: Mapping[str, str]) -> Proc:
    def run(p, seed, deps):
        parts = {cid: {"verdict": deps[cid].verdict, "needed": v} for cid, v in expect.items()}
        ok = all(deps[cid].verdict == v for cid, v in expect.items())
        return _tf(ok), {"parts": parts}, ["composite of the listed claims at their default parameters"]
    return run


# -- implication-diagram arrows -----------------------------------------------------

def _node(kind: str, n: int, m: int):
    if kind == "AC":
        return build_AC(n, m), (n, m), f"AC^{{{n},{m}}}"
    return build_AC_star(n, m), (n, m), f"AC_*^{{{n},{m}}}"


ARROWS: list[tuple[str, tuple[str, str, str], tuple[str, str, str]]] = [
    # id suffix, (kind, n-expr, m-expr) of antecedent, same of consequent
    ("ACnm-implies-ACstar-n-nm", ("AC", "n", "m"), ("AC*", "n", "n+m")),
    ("ACstar-n-nm-implies-ACnm", ("AC*", "n", "n+m"), ("AC", "n", "m")),
    ("AC1m-implies-ACstar-1-nm", ("AC", "1", "m"), ("AC*", "1", "n+m")),
    ("ACstar-1-nm-implies-AC1m", ("AC*", "1", "n+m"), ("AC", "1", "m")),
    ("ACstar-n-nm-implies-ACstar-n-n1", ("AC*", "n", "n+m"), ("AC*", "n", "n+1")),
    ("ACstar-n-n1-implies-ACstar-n-nm", ("AC*", "n", "n+1"), ("AC*", "n", "n+m")),
    ("ACstar-1-nm-implies-ACstar-1-2", ("AC*", "1", "n+m"), ("AC*", "1", "2")),
    ("ACstar-1-2-implies-ACstar-1-nm", ("AC*", "1", "2"), ("AC*", "1", "n+m")),
    ("ACstar-n-n1-implies-ACstar-1-2", ("AC*", "n", "n+1"), ("AC*", "1", "2")),
    ("ACstar-n-n1-implies-ACstar-n-1", ("AC*", "n", "n+1"), ("AC*", "n", "1")),
    ("ACstar-1-2-implies-ACstar-1-1", ("AC*", "1", "2"), ("AC*", "1", "1")),
    ("ACstar-n-1-implies-ACstar-1-1", ("AC*", "n", "1"), ("AC*", "1", "1")),
    ("ACnm-implies-AC1m", ("AC", "n", "m"), ("AC", "1", "m")),
]


def _ev(expr: str, n: int, m: int) -> int:
    return int(eval(expr, {"__builtins__": {}}, {"n": n, "m": m}))


def _arrow_proc(ante: tuple[str, str, str], cons: tuple[str, str, str]) -> Proc:
    def run(p, seed, deps):
        structures = _quiet(battery_structures, p["full_sizes"], p["N"], p["s_univ"], p["s_exist"])
        cache = deps.get("__battery_cache__", {})  # type: ignore[arg-type]
        rows = []
        bad = None
        undetermined = False
        for n in p["n_values"]:
            for m in p["m_values"]:
                a = _node(ante[0], _ev(ante[1], n, m), _ev(ante[2], n, m))
                c = _node(cons[0], _ev(cons[1], n, m), _ev(cons[2], n, m))
                r = implication_over_battery(structures, a[0], c[0], a[1], c[1], seed,
                                             cap=p["cap"], samples=p["samples"], cache=cache)
                rows.append({"n": n, "m": m, "antecedent": a[2], "consequent": c[2], **r})
                undetermined |= any(row["consequent"]["status"] == "undetermined" for row in r["rows"])
                if r["first_counterexample"] and bad is None:
                    bad = {"n": n, "m": m, **r["first_counterexample"]}
        verdict = "counterexample" if bad else "no-counterexample"
        notes = [f"battery: full |I| in {list(p['full_sizes'])}, sigma0 and sigma2 at N={p['N']} "
                 f"s_univ={p['s_univ']} s_exist={p['s_exist']}; prefix domains above {p['cap']} sampled "
                 f"({p['samples']} seeded samples)"]
        if undetermined:
            notes.append("some consequent samples were undetermined within the existential budget")
        return verdict, {"instances": rows, "first_counterexample": bad}, notes
    return run


# -- registry --------------------------------------------------------------------

SIGMA2 = {"N": 4, "s_univ": 1, "s_exist": 3}
SIGMA3 = {"N0": 6, "N1": 6, "s_univ": 2, "s_exist": 2}
BATTERY = {"full_sizes": (1, 2, 3), "N": 4, "s_univ": 1, "s_exist": 3, "cap": 4096, "samples": 12,
           "n_values": (2,), "m_values": (1, 2)}
PROPS = {"sizes": (2, 3), "exhaustive_sizes": (2,), "cap": 4096, "samples": 40}

_PROCS: dict[str, Proc] = {}
_GUARDS: dict[str, Callable[[dict], Optional[str]]] = {}


def _build_registry() -> tuple[list[Claim], list[Annotation]]:
    claims: list[Claim] = []

    def add(cid, statement, structure, proc, expected, defaults, fidelity=(), depends=(), guard=None):
        claims.append(Claim(cid, statement, structure, proc.__name__.lstrip("_") if hasattr(proc, "__name__") else cid,
                            expected, dict(defaults), tuple(fidelity), tuple(depends)))
        _PROCS[cid] = proc
        if guard:
            _GUARDS[cid] = guard

    add("prop-choice-implies-AC",
        "The Ackermann instance with H(x,D) = A x -> (exactly one D-point and it is R-related to x) implies AC^{1,1}.",
        {"model": "full", "sizes": [2, 3]}, _prop_choice_implies_ac, "no-counterexample",
        {**PROPS, "n": 1, "m": 1})
    add("prop-choicestar-implies-ACstar",
        "The Asser instance with H(C) = some A-point x has C as its R-row, and C is nonempty, implies AC_*^{n,m}.",
        {"model": "full", "sizes": [2, 3]}, _prop_choicestar_implies_acstar, "no-counterexample",
        {**PROPS, "max_nm": 2})
    add("prop-choicestar-implies-AC",
        "The Asser instance of order n+m whose H picks the R-row of one A-point as an (n+m)-ary set implies AC^{n,m}.",
        {"model": "full", "sizes": [2, 3]}, _prop_choicestar_implies_ac, "no-counterexample",
        {**PROPS, "n": 1, "m": 1})
    add("example-steps-e-h",
        "From a transversal D of the rows of R, S = {(x,y) | R x y & D y} is a selector for R on A.",
        {"model": "full+sigma2"}, _example_steps, "true",
        {"sizes": (2, 3), **SIGMA2, "samples": 30})
    add("sigma2-AC11", "The pair model satisfies AC^{1,1}.", {"model": "sigma2", **SIGMA2},
        _sigma2_ac11, "true", {**SIGMA2, "formula": True}, guard=_sigma2_guard)
    add("sigma2-not-choicestar1",
        "In the pair model the Asser axiom of order 1 fails for H(C) = C is a single T-linked pair.",
        {"model": "sigma2", **SIGMA2}, _sigma2_not_choicestar1, "false",
        {**SIGMA2, "cross_check": True}, guard=lambda p: None if p["N"] > p["s_exist"] and p["s_univ"] >= 1
        else f"need N > s_exist and s_univ >= 1 (N={p['N']}, s_exist={p['s_exist']})")
    add("lemma-sigma2-support",
        "In the pair model the row of a binary predicate at xi is constant on the free pairs outside its support "
        "and the pair of xi; a unary predicate lies inside its support or contains its complement.",
        {"model": "sigma2", "N": 4}, _lemma_sigma2_support, "true", {**SIGMA2, "budget": 1})
    add("sigma3-AC11", "The two-copy model satisfies AC^{1,1}.", {"model": "sigma3", **SIGMA3},
        _sigma3_ac11, "true", {**SIGMA3, "samples": 200}, guard=_sigma3_guard)
    add("sigma3-not-choiceh11",
        "In the two-copy model the Henkin-form Ackermann axiom choice_h^{1,1} fails for "
        "H(x,D) = there is a bijection from the T-image of x onto D, with D inside part 0.",
        {"model": "sigma3", **SIGMA3}, _sigma3_not_choiceh11, "false", {**SIGMA3, "cross_check": True},
        guard=lambda p: None if p["N0"] > 2 * p["s_exist"] + 1 and p["N1"] >= p["s_exist"] + 1
        else f"need N0 > 2*s_exist+1 and N1 >= s_exist+1 (N0={p['N0']}, N1={p['N1']}, s_exist={p['s_exist']})")
    add("lemma-sigma3-stabilizer",
        "In the two-copy model the pointwise stabilizer of a part-0 set K equals that of K plus any part-1 set.",
        {"model": "sigma3", "N": 4}, _lemma_sigma3_stabilizer, "true", {"N": 4})
    add("sigma0-AC11", "The basic Fraenkel model satisfies AC^{1,1}.",
        {"model": "sigma0", "N": 8, "s_univ": 1, "s_exist": 3}, _sigma0_ac11, "true",
        {"N": 8, "s_univ": 1, "s_exist": 3})
    add("sigma0-choice-star-1",
        "The basic Fraenkel model satisfies the Asser axiom of order 1 (instance: H(C) = C is a single T-linked pair, "
        "every admissible T).",
        {"model": "sigma0", "N": 6, "s_univ": 2, "s_exist": 2}, _sigma0_choice_star1, "true",
        {"N": 6, "s_univ": 2, "s_exist": 2, "t_budget": 1})
    add("sigma0-choice-h11",
        "The basic Fraenkel model satisfies choice_h^{1,1} (instance: H(x,D) = A x -> D is a single point of the row of x).",
        {"model": "sigma0", "N": 12, "s_univ": 1, "s_exist": 5}, _sigma0_choice_h11, "true",
        {"N": 12, "s_univ": 1, "s_exist": 5})
    add("thm1-choicestar1-indep-AC11",
        "choice_*^1 is independent of AC^{1,1}: the pair model satisfies AC^{1,1} and refutes an instance; "
        "the basic Fraenkel model satisfies both.",
        {"model": "composite"}, _composite({"sigma2-AC11": "true", "sigma2-not-choicestar1": "false",
                                            "sigma0-AC11": "true", "sigma0-choice-star-1": "true"}),
        "true", {}, depends=("sigma2-AC11", "sigma2-not-choicestar1", "sigma0-AC11", "sigma0-choice-star-1"))
    add("thm2-choiceh11-indep-AC11",
        "choice_h^{1,1} is independent of AC^{1,1}: the two-copy model satisfies AC^{1,1} and refutes an instance; "
        "the basic Fraenkel model satisfies both.",
        {"model": "composite"}, _composite({"sigma3-AC11": "true", "sigma3-not-choiceh11": "false",
                                            "sigma0-AC11": "true", "sigma0-choice-h11": "true"}),
        "true", {}, depends=("sigma3-AC11", "sigma3-not-choiceh11", "sigma0-AC11", "sigma0-choice-h11"))
    for suffix, ante, cons in ARROWS:
        proc = _arrow_proc(ante, cons)
        proc.__name__ = "arrow"
        a = f"{'AC' if ante[0] == 'AC' else 'AC_*'}^{{{ante[1]},{ante[2]}}}"
        c = f"{'AC' if cons[0] == 'AC' else 'AC_*'}^{{{cons[1]},{cons[2]}}}"
        add(f"fig1-{suffix}", f"{a} implies {c} (n > 1, m >= 1).", {"model": "battery"}, proc,
            "no-counterexample", BATTERY)

    notes = [
        Annotation("fig1-blocked-ACstar12-ACstar-n-n1", "AC_*^{1,2} does not imply AC_*^{n,n+1}.", "unchecked"),
        Annotation("fig1-blocked-ACstar-n1-ACstar-n-n1", "AC_*^{n,1} does not imply AC_*^{n,n+1}.", "unchecked"),
        Annotation("fig1-blocked-ACstar11-ACstar12", "AC_*^{1,1} does not imply AC_*^{1,2}.", "unchecked"),
        Annotation("fig1-blocked-ACstar-n1-ACstar12", "AC_*^{n,1} does not imply AC_*^{1,2}.", "unchecked"),
        Annotation("fig2-blocked-AC11-choicestar1", "AC^{1,1} does not imply choice_*^1.", "realized-by",
                   ("thm1-choicestar1-indep-AC11",)),
        Annotation("fig2-blocked-AC11-choiceh11", "AC^{1,1} does not imply choice_h^{1,1}.", "realized-by",
                   ("thm2-choiceh11-indep-AC11",)),
        Annotation("fig2-choicestar-nm-implies-ACnm", "choice_*^{n+m} implies AC^{n,m}.", "realized-by",
                   ("prop-choicestar-implies-AC",)),
        Annotation("fig2-choicestar-m-implies-ACstar-nm", "choice_*^m implies AC_*^{n,m}.", "realized-by",
                   ("prop-choicestar-implies-ACstar",)),
        Annotation("corollary-two-copy", "The two-copy model satisfies AC_*^{1,1} and refutes choice_*^2 and "
                   "choice^{1,1}.", "unchecked"),
    ]
    return claims, notes


_CLAIMS, _ANNOTATIONS = _build_registry()
_BY_ID = {c.id: c for c in _CLAIMS}


def registry() -> list[Claim]:
    return list(_CLAIMS)


def annotations() -> list[Annotation]:
    return list(_ANNOTATIONS)


def get_claim(cid: str) -> Claim:
    try:
        return _BY_ID[cid]
    except KeyError:
        raise UnknownClaim(f"unknown claim id {cid!r}") from None


def _coerce(old: Any, value: Any) -> Any:
    if not isinstance(value, str):
        return value
    if isinstance(old, bool):
        if value.lower() in ("1", "true", "yes"):
            return True
        if value.lower() in ("0", "false", "no"):
            return False
        raise ValueError(f"not a boolean: {value!r}")
    if isinstance(old, int):
        return int(value)
    if isinstance(old, float):
        return float(value)
    if isinstance(old, tuple):
        return tuple(int(v) for v in value.split(",") if v)
    return value


def run_claim(cid: str, overrides: Optional[Mapping[str, Any]] = None, seed: int = 0, force: bool = False,
              _results: Optional[dict] = None) -> ClaimResult:
    """Run one claim; dependencies of composites run first (or come from ``_results``)."""
    claim = get_claim(cid)
    params = dict(claim.defaults)
    for k, v in (overrides or {}).items():
        if k not in params:
            raise KeyError(f"{cid}: unknown parameter {k!r} (known: {sorted(params)})")
        params[k] = _coerce(params[k], v)
    guard = _GUARDS.get(cid)
    msg = guard(params) if guard else None
    if msg and not force:
        raise GuardViolation(f"{cid}: {msg}")
    results = _results if _results is not None else {}
    deps: dict[str, Any] = {"__battery_cache__": results.setdefault("__battery_cache__", {})}
    for d in claim.depends:
        if d not in results:
            results[d] = run_claim(d, seed=seed, _results=results)
        deps[d] = results[d]
    t0 = time.perf_counter()
    try:
        verdict, payload, notes = _PROCS[cid](params, seed, deps)
    except FidelityError as e:
        if not force:
            raise GuardViolation(f"{cid}: {e}") from None
        verdict, payload, notes = "undetermined", {"error": str(e)}, []
    if msg:
        notes = notes + [f"forced below guard: {msg}"]
    res = ClaimResult(cid, verdict, claim.expected, time.perf_counter() - t0, payload,
                      {k: list(v) if isinstance(v, tuple) else v for k, v in params.items()} | {"seed": seed},
                      list(claim.fidelity) + notes)
    results[cid] = res
    return res


def _run_one(args) -> ClaimResult:
    cid, seed = args
    return run_claim(cid, seed=seed)


def run_all(filter: Optional[str] = None, seed: int = 0, workers: int = 1) -> list[ClaimResult]:
    """Run every claim whose id contains ``filter``; results keep registry order."""
    ids = [c.id for c in _CLAIMS if filter is None or filter in c.id]
    results: dict[str, Any] = {}
    if workers > 1:
        plain = [i for i in ids if not _BY_ID[i].depends]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            for cid, res in zip(plain, ex.map(_run_one, [(i, seed) for i in plain])):
                results[cid] = res
    out = []
    for cid in ids:
        if cid not in results:
            run_claim(cid, seed=seed, _results=results)
        out.append(results[cid])
    return out


def report(results: Iterable[ClaimResult], timing: bool = True) -> list[dict]:
    return [r.to_json(timing) for r in results]
