"""Explicit choice relations in the pair and two-copy models, and the two refutations.

Both constructions pick, for every xi in alpha, one rho-successor by a rule that
only looks at the support K of rho plus two extra free units, so the resulting
relation is certified with support K + {first two free units}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

import numpy as np

from .evaluator import Assignment, evaluate, register_provider
from .formula import ExistsPred, ForallIndiv, IndivVar, PredVar
from .group_action import GroupKind
from .predicate_domain import (
    BudgetExceeded,
    CertificateError,
    HenkinStructure,
    QuantifierPolicy,
    Strategy,
    SymbolicPredicate,
    build_sigma3,
)
from .schemas import build_choice_h, build_choice_star, witness_H_bij, witness_H_pair


class PreconditionError(ValueError):
    pass


class FidelityError(RuntimeError):
    """The truncation is too small for the orbit argument behind a construction or refutation."""


@dataclass(frozen=True)
class ChoiceInput:
    alpha: SymbolicPredicate
    rho: SymbolicPredicate
    K: frozenset[int]

    @classmethod
    def from_rho(cls, h: HenkinStructure, rho: SymbolicPredicate,
                 alpha: Optional[SymbolicPredicate] = None) -> "ChoiceInput":
        if rho.arity != 2:
            raise PreconditionError("rho must be binary")
        if alpha is None:
            alpha = h.make_predicate(rho.ext.any(axis=1), rho.support)
        return cls(alpha, rho, h.group.normalize_support(rho.support))

    def check(self, h: HenkinStructure) -> None:
        if self.alpha.arity != 1:
            raise PreconditionError("alpha must be unary")
        if not np.array_equal(self.alpha.ext, self.rho.ext.any(axis=1)):
            raise PreconditionError("domain condition fails: alpha is not the projection of rho")
        if not h.is_supported_by(self.rho.ext, self.K):
            raise PreconditionError(f"{sorted(self.K)} is not a support of rho")


@dataclass
class ChoiceTrace:
    sigma: SymbolicPredicate
    phi: dict[int, int]
    cases: dict[int, str]
    extra: tuple[int, ...]


def is_choice_relation(alpha: SymbolicPredicate, rho: SymbolicPredicate, sigma: SymbolicPredicate) -> bool:
    """Every xi in alpha has exactly one eta with (xi, eta) in both rho and sigma."""
    counts = (rho.ext & sigma.ext).sum(axis=1)
    return bool(np.all(counts[alpha.ext] == 1))


# -- pair model ---------------------------------------------------------------

def _sigma2(inp: ChoiceInput, h: HenkinStructure) -> ChoiceTrace:
    if h.group.kind is not GroupKind.PAIR_AUTO:
        raise PreconditionError("the pair construction needs the pair model")
    inp.check(h)
    D = h.n_points
    M = set(inp.K)
    Mc = [p for p in range(D) if p not in M]
    phi: dict[int, int] = {}
    cases: dict[int, str] = {}
    for xi in map(int, np.flatnonzero(inp.alpha.ext)):
        own = {xi & ~1, xi | 1}
        row = set(map(int, np.flatnonzero(inp.rho.ext[xi])))
        mc_xi = sorted(row - M - own)
        m_xi = sorted((row & M) - own)
        if mc_xi:
            phi[xi], cases[xi] = mc_xi[0], "a"
        elif m_xi:
            phi[xi], cases[xi] = m_xi[0], "b"
        elif xi in row:
            phi[xi], cases[xi] = xi, "c"
        else:
            if xi ^ 1 not in row:
                raise PreconditionError(f"row of {xi} is empty although it lies in alpha")
            phi[xi], cases[xi] = xi ^ 1, "d"
    on_free = [xi for xi in phi if xi not in M]
    if on_free:
        tags = {cases[xi] for xi in on_free}
        if len(tags) != 1:
            raise FidelityError(f"free individuals fall into different cases {sorted(tags)}")
        if len(on_free) != len(Mc):
            raise FidelityError("alpha meets the free part without containing it")
        if tags == {"b"}:
            ref = sorted((set(map(int, np.flatnonzero(inp.rho.ext[on_free[0]]))) & M))
            for xi in on_free:
                if sorted(set(map(int, np.flatnonzero(inp.rho.ext[xi]))) & M) != ref:
                    raise FidelityError("case (b) rows differ on the supported part")
    if len(Mc) < 4:
        raise FidelityError("need two free pairs outside the support of rho")
    zeta0 = Mc[0]
    zeta1 = min(p for p in Mc if p // 2 != zeta0 // 2)
    ext = np.zeros((D, D), dtype=bool)
    for xi, eta in phi.items():
        ext[xi, eta] = True
    support = M | {zeta0, zeta1}
    sigma = h.make_predicate(ext, support)
    return ChoiceTrace(sigma, phi, cases, (zeta0, zeta1))


def construct_choice_sigma2(inp: ChoiceInput, h: HenkinStructure) -> SymbolicPredicate:
    """Choice relation for (alpha, rho) in the pair model, supported by K and two free pairs."""
    return _sigma2(inp, h).sigma


# -- two-copy model (also the basic model: no fixed part) ----------------------

def _sigma3(inp: ChoiceInput, h: HenkinStructure) -> ChoiceTrace:
    if h.group.kind not in (GroupKind.FIX_PART1, GroupKind.FULL_FINITARY):
        raise PreconditionError("the two-copy construction needs a model whose movable points are freely permuted")
    inp.check(h)
    D = h.n_points
    L = set(h.group.fixed_points) | set(inp.K)
    Lc = [p for p in range(D) if p not in L]
    phi: dict[int, int] = {}
    cases: dict[int, str] = {}
    for xi in map(int, np.flatnonzero(inp.alpha.ext)):
        row = set(map(int, np.flatnonzero(inp.rho.ext[xi])))
        l_xi = sorted(row & L)
        n_xi = sorted(row - L - {xi})
        side = "2" if xi in L else "1"
        if l_xi:
            phi[xi], cases[xi] = l_xi[0], "a" + side
        elif n_xi:
            phi[xi], cases[xi] = n_xi[0], "b" + side
        elif xi in row:
            phi[xi], cases[xi] = xi, "c" + side
        else:  # pragma: no cover - excluded by the domain condition
            raise PreconditionError(f"row of {xi} is empty although it lies in alpha")
    if len(Lc) < 2:
        raise FidelityError("need two free points outside the support of rho")
    eta0, eta1 = Lc[0], Lc[1]
    ext = np.zeros((D, D), dtype=bool)
    for xi, eta in phi.items():
        ext[xi, eta] = True
    sigma = h.make_predicate(ext, set(inp.K) | {eta0, eta1})
    return ChoiceTrace(sigma, phi, cases, (eta0, eta1))


def construct_choice_sigma3(inp: ChoiceInput, h: HenkinStructure) -> SymbolicPredicate:
    """Choice relation for (alpha, rho) in the two-copy model, supported by K and two free points."""
    return _sigma3(inp, h).sigma


# -- exhaustive validity runs -------------------------------------------------

@dataclass
class ValidityReport:
    checked: int = 0
    failures: list[dict] = field(default_factory=list)
    cases: dict[str, int] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.checked > 0 and not self.failures

    def to_json(self) -> dict:
        return {"checked": self.checked, "failures": self.failures[:20], "n_failures": len(self.failures),
                "cases": dict(sorted(self.cases.items())), "notes": self.notes}


def _check_one(h: HenkinStructure, rho: SymbolicPredicate, builder, rep: ValidityReport,
               alpha_domain: Optional[set[bytes]] = None) -> None:
    rep.checked += 1
    try:
        inp = ChoiceInput.from_rho(h, rho)
        if alpha_domain is not None and inp.alpha.key not in alpha_domain:
            raise PreconditionError("projection of rho is not an admissible unary predicate")
        tr = builder(inp, h)
    except (PreconditionError, FidelityError, CertificateError) as e:
        rep.failures.append({"rho": h.predicate_to_json(rho), "error": f"{type(e).__name__}: {e}"})
        return
    if not is_choice_relation(inp.alpha, rho, tr.sigma):
        rep.failures.append({"rho": h.predicate_to_json(rho), "error": "not a choice relation"})
        return
    allowed = h.group.normalize_support(set(inp.K) | set(tr.extra))
    if not tr.sigma.support <= allowed:
        rep.failures.append({"rho": h.predicate_to_json(rho), "error": "support bound violated"})
        return
    for c in set(tr.cases.values()):
        rep.cases[c] = rep.cases.get(c, 0) + 1


def verify_choice_sigma2(h: HenkinStructure) -> ValidityReport:
    """Run the pair construction on every binary predicate of the universal domain."""
    rep = ValidityReport()
    alphas = {p.key for p in h.universal_domain(1)}
    for rho in h.universal_domain(2):
        _check_one(h, rho, _sigma2, rep, alphas)
    return rep


def row_class_relations(h: HenkinStructure, budget: Optional[int] = None):
    """Yield (K, rho) for every rho that is a single row class under the stabilizer of K.

    An admissible rho with support K is the union of its rows at fixed points
    (each invariant under the stabilizer of K) and the orbit of its row at the
    least free point xi0 (invariant under the stabilizer of K + {xi0}).  The
    construction acts row by row, so these pieces cover every admissible rho.
    """
    budget = h.policy.s_univ if budget is None else budget
    D = h.n_points
    g = h.group
    for K in g.supports_up_to(budget):
        fixed = sorted(set(g.fixed_points) | set(K))
        for a in fixed:
            for row in h.invariant_predicates(1, K, max_orbits=D):
                ext = np.zeros((D, D), dtype=bool)
                ext[a] = row.ext
                yield K, SymbolicPredicate(2, K, ext, certified=False)
        free = g.free_points(K)
        if not free:
            continue
        xi0 = free[0]
        for row in h.invariant_predicates(1, set(K) | {xi0}, max_orbits=D):
            ext = np.zeros((D, D), dtype=bool)
            for xi in free:
                # a permutation in the stabilizer of K sending xi0 to xi
                img = list(range(D))
                img[xi0], img[xi] = xi, xi0
                ext[xi, np.asarray(img)[np.flatnonzero(row.ext)]] = True
            yield K, SymbolicPredicate(2, K, ext, certified=False)


def verify_choice_sigma3(h: HenkinStructure, budget: Optional[int] = None, samples: int = 200,
                         seed: int = 0) -> ValidityReport:
    """Run the two-copy construction on every single-row-class rho, then on random unions of them."""
    rep = ValidityReport()
    by_K: dict[frozenset[int], list[SymbolicPredicate]] = {}
    for K, rho in row_class_relations(h, budget):
        rho = h.make_predicate(rho.ext, K)
        by_K.setdefault(K, []).append(rho)
        _check_one(h, rho, _sigma3, rep)
    rng = np.random.default_rng(seed)
    Ks = sorted(by_K, key=lambda k: (len(k), sorted(k)))
    for _ in range(samples):
        K = Ks[rng.integers(len(Ks))]
        pool = by_K[K]
        pick = rng.choice(len(pool), size=min(3, len(pool)), replace=False)
        ext = np.zeros_like(pool[0].ext)
        for i in pick:
            ext |= pool[i].ext
        _check_one(h, h.make_predicate(ext, K), _sigma3, rep)
    rep.notes.append(f"{rep.checked - samples} single-row-class relations and {samples} random unions")
    return rep


# -- pair model refutation ------------------------------------------------------

@dataclass
class RefutationReport:
    procedure: str
    verdict: bool  # truth value of the refuted axiom instance in the structure
    guards: dict[str, Any]
    records: list[dict]
    params: dict[str, Any]
    cross_check: Optional[dict] = None

    @property
    def all_failed(self) -> bool:
        return bool(self.records) and all(r["failed"] for r in self.records)

    def to_json(self, limit: Optional[int] = None) -> dict:
        recs = self.records if limit is None else self.records[:limit]
        return {"procedure": self.procedure, "verdict": self.verdict, "guards": self.guards,
                "n_candidates": len(self.records), "n_failed": sum(r["failed"] for r in self.records),
                "records": recs, "params": self.params, "cross_check": self.cross_check}


def pair_predicate(h: HenkinStructure, nu: int) -> SymbolicPredicate:
    """The unary predicate {(nu,0),(nu,1)}."""
    return h.make_predicate([(2 * nu,), (2 * nu + 1,)], [2 * nu], arity=1)


def refute_choice_star1_sigma2(h: HenkinStructure, cross_check: bool = True) -> RefutationReport:
    """Show that every unary delta of the existential domain selects 0 or 2 points from some free pair."""
    if h.group.kind is not GroupKind.PAIR_AUTO:
        raise PreconditionError("needs the pair model")
    N, s_exist = h.group.size, h.policy.s_exist
    if N <= s_exist or h.policy.s_univ < 1:
        raise FidelityError(f"need a free pair beyond every {s_exist}-pair support and s_univ >= 1")
    H = witness_H_pair()
    inst = build_choice_star(1, H)
    g1, g2 = inst.left.left, inst.left.right
    pol = h.policy.with_(strategy=Strategy.ENUMERATE)
    guards = {"nonempty": evaluate(h, None, g1, pol).value, "disjoint": evaluate(h, None, g2, pol).value}
    C = PredVar("C", 1)
    h_true: dict[int, bool] = {}
    records = []
    for delta in h.existential_domain(1):
        pairs = sorted({p // 2 for p in delta.support})
        nu = min(i for i in range(N) if i not in pairs)
        if nu not in h_true:
            h_true[nu] = evaluate(h, Assignment({}, {C: pair_predicate(h, nu)}), H, pol).value
        selected = int(delta.ext[2 * nu]) + int(delta.ext[2 * nu + 1])
        records.append({"delta": h.predicate_to_json(delta), "support_pairs": pairs, "nu": nu,
                        "H_holds": h_true[nu], "selected": selected,
                        "failed": h_true[nu] and selected != 1})
    transversal_exists = not all(r["failed"] for r in records)
    verdict = (not (guards["nonempty"] and guards["disjoint"])) or transversal_exists
    rep = RefutationReport("refute_choice_star1_sigma2", verdict, guards, records, h.params())
    if cross_check:
        full = evaluate(h, None, inst, pol)
        rep.cross_check = {"formula_value": full.value, "agrees": full.value == verdict, "stats": full.stats}
    return rep


# -- two-copy model refutation --------------------------------------------------

def _part0_run(h: HenkinStructure, n: int) -> list[int]:
    g = h.group
    if n >= g.size:
        raise IndexError(f"index {n} exceeds the part-0 truncation {g.size}")
    return [g.point(0, m) for m in range(n + 1)]


def build_rho_n(h: HenkinStructure, n: int) -> SymbolicPredicate:
    """{((1,m),(0,m)) | m <= n}."""
    g = h.group
    if n >= g.size1:
        raise IndexError(f"index {n} exceeds the part-1 truncation {g.size1}")
    tuples = [(g.point(1, m), g.point(0, m)) for m in range(n + 1)]
    ext = h._as_ext(tuples, 2)
    return h.make_predicate(ext, _smallest_support(h, ext))


def build_delta_n(h: HenkinStructure, n: int) -> SymbolicPredicate:
    """{(0,0), ..., (0,n)}."""
    ext = h._as_ext([(p,) for p in _part0_run(h, n)], 1)
    return h.make_predicate(ext, _smallest_support(h, ext))


def _smallest_support(h: HenkinStructure, ext: np.ndarray) -> frozenset[int]:
    for s in h.group.supports_up_to(len(h.group.support_units())):
        if h.is_supported_by(ext, s):
            return s
    raise CertificateError("no finite support")  # pragma: no cover


def witness_policy(h: HenkinStructure) -> QuantifierPolicy:
    """Existential budget wide enough for every delta_n and rho_n witness."""
    need = max(h.group.support_size(build_delta_n(h, n).support) for n in range(min(h.group.size, h.group.size1)))
    need = max(need, max((h.group.support_size(build_rho_n(h, n).support)
                          for n in range(min(h.group.size, h.group.size1))), default=0))
    return h.policy.with_(s_exist=max(h.policy.s_exist, need), strategy=Strategy.WITNESS,
                          providers=("sigma3-delta", "sigma3-bij"), allow_fallback=False)


def verify_bij_witnesses(h: HenkinStructure) -> dict[str, Any]:
    """Check forall x exists D H(x,D) using the delta_n / rho_n witnesses."""
    H = witness_H_bij()
    pol = witness_policy(h)
    f = ForallIndiv((IndivVar("x"),), ExistsPred(PredVar("D", 1), H))
    out = evaluate(h, None, f, pol)
    per_n = []
    G = H.body
    for n in range(min(h.group.size, h.group.size1)):
        asg = Assignment({IndivVar("x"): h.group.point(1, n)},
                         {PredVar("D", 1): build_delta_n(h, n), PredVar("R", 2): build_rho_n(h, n)})
        per_n.append({"n": n, "G_holds": evaluate(h, asg, G, pol).value})
    return {"value": out.value and all(r["G_holds"] for r in per_n), "per_n": per_n,
            "witness_s_exist": pol.s_exist, "stats": out.stats}


def refute_choice_h_sigma3(h: HenkinStructure, cross_check: bool = True) -> RefutationReport:
    """Show that no binary sigma of the existential domain has a slice at xi_nu satisfying H.

    Candidates are classes (K, D): K a support of at most s_exist part-0 points,
    nu = |K|, and D a row at the fixed individual (1,nu), i.e. any unary predicate
    invariant under the stabilizer of K.  Every sigma falls in the class of its
    recorded support and its row at (1,nu).
    """
    if h.group.kind is not GroupKind.FIX_PART1:
        raise PreconditionError("needs the two-copy model")
    N0, N1, s = h.group.size, h.group.size1, h.policy.s_exist
    if N0 <= 2 * s + 1 or N1 < s + 1:
        raise FidelityError(f"need N0 > 2*s_exist+1 and N1 >= s_exist+1 (N0={N0}, N1={N1}, s_exist={s})")
    guards = {"forall_x_exists_D_H": verify_bij_witnesses(h)}
    part0 = np.zeros(h.n_points, dtype=bool)
    part0[:N0] = True
    records = []
    for K in h.group.supports_up_to(s):
        nu = len(K)
        xi = h.group.point(1, nu)
        for D in h.invariant_predicates(1, K, max_orbits=h.n_points):
            size = D.count()
            inside = bool(np.all(part0[D.ext]))
            records.append({"K": [list(h.group.individual(p)) for p in sorted(K)], "nu": nu,
                            "xi": list(h.group.individual(xi)), "D_size": size, "D_in_part0": inside,
                            "failed": not (inside and size == nu + 1)})
    consequent = not all(r["failed"] for r in records)
    antecedent = guards["forall_x_exists_D_H"]["value"]
    verdict = (not antecedent) or consequent
    rep = RefutationReport("refute_choice_h_sigma3", verdict, guards, records, h.params())
    if cross_check:
        rep.cross_check = small_choice_h_cross_check()
    return rep


def small_choice_h_cross_check(N0: int = 3, N1: int = 1) -> dict[str, Any]:
    """At a size where every quantifier can be enumerated, evaluate the consequent of the axiom directly."""
    pol = QuantifierPolicy(s_univ=0, s_exist=0, strategy=Strategy.ENUMERATE)
    h = build_sigma3(N0, N1, pol)
    inst = build_choice_h(1, 1, witness_H_bij())
    consequent = evaluate(h, None, inst.right, pol)
    direct = refute_choice_h_sigma3(h, cross_check=False)
    return {"params": h.params(), "consequent_value": consequent.value,
            "direct_all_failed": direct.all_failed,
            "agrees": consequent.value == (not direct.all_failed),
            "antecedent_with_witnesses": direct.guards["forall_x_exists_D_H"]["value"]}


# -- witness providers ----------------------------------------------------------

def _env_choice_input(h: HenkinStructure, env: Mapping[str, SymbolicPredicate]) -> Optional[ChoiceInput]:
    R, A = env.get("R"), env.get("A")
    if R is None or R.arity != 2 or (A is not None and A.arity != 1):
        return None
    if A is None or np.array_equal(A.ext, R.ext.any(axis=1)):
        return ChoiceInput.from_rho(h, R, A)
    if np.any(A.ext & ~R.ext.any(axis=1)):
        return None
    # A inside the domain of R: choose for the restriction of R to A
    rho = h.make_predicate(R.ext & A.ext[:, None], R.support | A.support)
    return ChoiceInput.from_rho(h, rho, A)


@register_provider("sigma2-choice", reads=("A", "R"))
def _provide_sigma2(h, env, pv):
    if pv.arity != 2 or h.group.kind is not GroupKind.PAIR_AUTO:
        return []
    inp = _env_choice_input(h, env)
    if inp is None:
        return []
    try:
        return [construct_choice_sigma2(inp, h)]
    except (FidelityError, PreconditionError):
        return []


@register_provider("sigma3-choice", reads=("A", "R"))
def _provide_sigma3(h, env, pv):
    if pv.arity != 2 or h.group.kind not in (GroupKind.FIX_PART1, GroupKind.FULL_FINITARY):
        return []
    inp = _env_choice_input(h, env)
    if inp is None:
        return []
    try:
        return [construct_choice_sigma3(inp, h)]
    except (FidelityError, PreconditionError):
        return []


@register_provider("canonical-choice", reads=("A", "R"))
def _provide_canonical(h, env, pv):
    """Select the least row entry under a ranking that only uses fixed points and x itself."""
    R = env.get("R")
    if R is None or R.arity != pv.arity or R.arity < 2:
        return []
    A = env.get("A")
    n = A.arity if A is not None else 1
    m = R.arity - n
    if m < 1:
        return []
    g = h.group
    K = set(g.normalize_support(R.support | (A.support if A is not None else frozenset())))
    units = [u for u in g.support_units() if not set(u) & K]
    E = {p for u in units[: n + m] for p in u}
    fixed = K | E | set(g.fixed_points)
    D = h.n_points
    pair = g.kind is GroupKind.PAIR_AUTO
    ext = np.zeros(R.ext.shape, dtype=bool)
    for xt in itertools.product(range(D), repeat=n):
        row = R.ext[xt]
        if not row.any():
            continue

        def rank(q: int) -> tuple:
            if q in fixed:
                return (0, q)
            for i, p in enumerate(xt):
                if p == q:
                    return (1, i, 0)
                if pair and p ^ 1 == q:
                    return (1, i, 1)
            return (2, q)

        best = min((tuple(int(v) for v in y) for y in np.argwhere(row)), key=lambda y: tuple(rank(q) for q in y))
        ext[xt + best] = True
    try:
        sel = h.make_predicate(ext, fixed - set(g.fixed_points))
    except CertificateError:
        return []
    if g.support_size(sel.support) > h.policy.s_exist:
        # the declared support is generous; the selection itself may need less
        try:
            sel = SymbolicPredicate(sel.arity, h.minimal_support(sel, h.policy.s_exist), sel.ext, certified=True)
        except BudgetExceeded:
            pass
    return [sel]


@register_provider("sigma3-delta")
def _provide_delta(h, env, pv):
    if pv.arity != 1 or h.group.kind is not GroupKind.FIX_PART1:
        return []
    return [build_delta_n(h, n) for n in range(min(h.group.size, h.group.size1))]


@register_provider("sigma3-bij", reads=("D",))
def _provide_bij(h, env, pv):
    """Bijection from the T-image of (1,n) onto D when D lies in part 0 and has n+1 points."""
    D = env.get("D")
    if pv.arity != 2 or D is None or D.arity != 1 or h.group.kind is not GroupKind.FIX_PART1:
        return [h.empty(2)] if pv.arity == 2 else []
    g = h.group
    pts = [int(p) for p in np.flatnonzero(D.ext)]
    out = [h.empty(2)]
    if pts and all(p < g.size for p in pts) and len(pts) <= g.size1:
        tuples = [(g.point(1, mu), p) for mu, p in enumerate(pts)]
        ext = h._as_ext(tuples, 2)
        out.append(h.make_predicate(ext, _smallest_support(h, ext)))
    return out


@register_provider("slices", reads=("S",))
def _provide_slices(h, env, pv):
    """Rows S(x, .) of a binary S, for the slice quantifier of the Henkin form."""
    S = env.get("S")
    if S is None or S.arity != pv.arity + 1:
        return []
    out = []
    for x in range(h.n_points):
        ext = S.ext[x]
        out.append(h.make_predicate(ext, set(S.support) | {x}))
    return out


@register_provider("singletons")
def _provide_singletons(h, env, pv):
    """Every one-point unary predicate; each is supported by its point."""
    if pv.arity != 1:
        return []
    out = []
    for p in range(h.n_points):
        ext = np.zeros(h.n_points, dtype=bool)
        ext[p] = True
        out.append(h.make_predicate(ext, {p}))
    return out
