import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from henkin_choice import (
    Assignment, ChoiceInput, FidelityError, PreconditionError, QuantifierPolicy, Strategy,
    build_sigma0, build_sigma2, build_sigma3, construct_choice_sigma2, construct_choice_sigma3,
    evaluate, parse, refute_choice_h_sigma3, refute_choice_star1_sigma2,
)
from henkin_choice.battery import projection, random_predicate
from henkin_choice.choice_constructions import (
    _sigma2, _sigma3, build_delta_n, build_rho_n, is_choice_relation, small_choice_h_cross_check,
    verify_bij_witnesses,
)
from henkin_choice.evaluator import PROVIDERS

seeds = st.integers(0, 2**32 - 1)
S2 = build_sigma2(5, QuantifierPolicy(s_univ=1, s_exist=3))
S3 = build_sigma3(6, 6, QuantifierPolicy(s_univ=2, s_exist=2))
S0 = build_sigma0(6, QuantifierPolicy(s_univ=2, s_exist=4))


def _nonempty_rho(h, seed, budget):
    rng = np.random.default_rng(seed)
    rho = random_predicate(h, 2, rng, budget)
    return rho if rho.ext.any() else h.full(2)


def _check(h, builder, seed, budget):
    rho = _nonempty_rho(h, seed, budget)
    inp = ChoiceInput.from_rho(h, rho)
    tr = builder(inp, h)
    assert tr.sigma.certified and h.is_supported_by(tr.sigma.ext, tr.sigma.support)
    assert is_choice_relation(inp.alpha, rho, tr.sigma)
    assert tr.sigma.support <= h.group.normalize_support(set(inp.K) | set(tr.extra))
    assert h.group.support_size(tr.sigma.support) <= h.group.support_size(inp.K) + 2


@given(seeds)
@settings(max_examples=80, deadline=None)
def test_pair_construction(seed):
    _check(S2, _sigma2, seed, 1)


@given(seeds)
@settings(max_examples=80, deadline=None)
def test_two_copy_construction(seed):
    _check(S3, _sigma3, seed, 2)


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_two_copy_construction_on_basic_model(seed):
    _check(S0, _sigma3, seed, 2)


def test_preconditions():
    rho = S3.full(2)
    with pytest.raises(PreconditionError):
        construct_choice_sigma2(ChoiceInput.from_rho(S3, rho), S3)
    with pytest.raises(PreconditionError):
        construct_choice_sigma3(ChoiceInput.from_rho(S2, S2.full(2)), S2)
    with pytest.raises(PreconditionError):
        ChoiceInput.from_rho(S2, S2.full(1))
    bad = ChoiceInput(S2.full(1), S2.empty(2), frozenset())
    with pytest.raises(PreconditionError):
        construct_choice_sigma2(bad, S2)


def test_pair_construction_needs_room():
    h = build_sigma2(2, QuantifierPolicy(s_univ=1, s_exist=1))
    rho = h.make_predicate([(0, 1), (1, 0)], [0], arity=2)
    with pytest.raises(FidelityError):
        construct_choice_sigma2(ChoiceInput.from_rho(h, rho), h)


def test_pair_relation_refuted():
    h = build_sigma2(3, QuantifierPolicy(s_univ=1, s_exist=2))
    rep = refute_choice_star1_sigma2(h)
    assert rep.all_failed and rep.verdict is False
    assert rep.guards == {"nonempty": True, "disjoint": True}
    assert rep.cross_check["agrees"] and rep.cross_check["formula_value"] is False
    with pytest.raises(FidelityError):
        refute_choice_star1_sigma2(build_sigma2(2, QuantifierPolicy(s_univ=1, s_exist=2)))


def test_bijection_witnesses():
    h = build_sigma3(4, 4, QuantifierPolicy(s_univ=1, s_exist=1))
    for n in range(4):
        assert build_delta_n(h, n).count() == n + 1
        rho = build_rho_n(h, n)
        assert h.minimal_support(rho) == rho.support
        assert h.group.support_size(rho.support) == min(n + 1, 3)  # the last free point is forced
    out = verify_bij_witnesses(h)
    assert out["value"] and len(out["per_n"]) == 4


def test_two_copy_refutation_guard_and_cross_check():
    with pytest.raises(FidelityError):
        refute_choice_h_sigma3(build_sigma3(4, 4, QuantifierPolicy(s_univ=2, s_exist=2)))
    cc = small_choice_h_cross_check()
    assert cc["agrees"] and cc["direct_all_failed"] and not cc["consequent_value"]


def test_providers_registered():
    for name in ("sigma2-choice", "sigma3-choice", "canonical-choice", "sigma3-delta", "sigma3-bij",
                 "slices", "singletons"):
        assert name in PROVIDERS


def test_singletons_provider_supplies_witness():
    h = build_sigma0(6, QuantifierPolicy(s_univ=0, s_exist=1, strategy=Strategy.WITNESS,
                                         providers=("singletons",), allow_fallback=False))
    f = parse("forall x. existsP B:1. B(x) & forall y. B(y) -> y = x")
    out = evaluate(h, None, f)
    assert out.value and out.stats["witness_hits"] >= 1


def test_pair_provider_gives_choice():
    h = build_sigma2(5, QuantifierPolicy(s_univ=1, s_exist=3, strategy=Strategy.WITNESS,
                                         providers=("sigma2-choice",), allow_fallback=False))
    R = h.named["T"]
    f = parse("existsP S:2. forall x. exists1 y. R(x,y) & S(x,y)", {"R": 2})
    assert evaluate(h, Assignment.of(preds={"R": R, "A": projection(h, R, 1)}), f).value
