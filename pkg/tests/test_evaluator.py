import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from henkin_choice import (
    Assignment, QuantifierPolicy, Strategy, WitnessSearchFailed, build_full, build_sigma2, evaluate,
    evaluate_tensor, parse,
)
from henkin_choice.evaluator import UnassignedError, eval_equivariant_check
from henkin_choice.formula import free_vars

from oracles import P, Q, X, Y, Z, as_set, naive_eval, random_assignment, random_formula

seeds = st.integers(0, 2**32 - 1)


def _check_against_naive(h, seed, budget):
    rng = random.Random(seed)
    f = random_formula(rng, depth=4)
    indivs, preds = random_assignment(h, np.random.default_rng(seed), budget)
    univ = {1: [as_set(p) for p in h.universal_domain(1)]}
    exist = {1: [as_set(p) for p in h.existential_domain(1)]}
    want = naive_eval(f, h.n_points, indivs, {k: as_set(v) for k, v in preds.items()}, univ, exist)
    assert evaluate(h, Assignment(indivs, preds), f).value == want


@given(seeds)
@settings(max_examples=150, deadline=None)
def test_agrees_with_naive_full(seed):
    _check_against_naive(build_full(2), seed, 0)


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_agrees_with_naive_henkin_sigma2(seed):
    # quantifiers range over the stratified domains, not all subsets
    h = build_sigma2(3, QuantifierPolicy(s_univ=0, s_exist=1, strategy=Strategy.ENUMERATE))
    _check_against_naive(h, seed, 1)


@pytest.mark.parametrize("i", range(3))
def test_equivariance(small_models, i):
    h, budget = small_models[i]
    rng = random.Random(i)
    nrng = np.random.default_rng(i)
    for _ in range(100):
        f = random_formula(rng, depth=3)
        indivs, preds = random_assignment(h, nrng, budget)
        g = h.group.random_element(rng)
        assert eval_equivariant_check(h, Assignment(indivs, preds), f, g)


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_tensor_matches_pointwise(seed):
    h = build_full(2)
    f = random_formula(random.Random(seed), depth=3, pred_quants=False)
    indivs, preds = random_assignment(h, np.random.default_rng(seed), 0)
    asg = Assignment(indivs, preds)
    t = evaluate_tensor(h, asg, f, (X, Y))
    for a in range(2):
        for b in range(2):
            assert t[a, b] == evaluate(h, Assignment({**indivs, X: a, Y: b}, preds), f).value


def test_named_predicate_visible():
    h = build_sigma2(3)
    assert evaluate(h, None, parse("forall x. exists1 y. T(x,y)", {"T": 2})).value
    assert not evaluate(h, None, parse("exists x. T(x,x)", {"T": 2})).value


def test_unassigned_variable():
    with pytest.raises(UnassignedError):
        evaluate(build_full(2), None, parse("P(x)"))


def test_witness_only_search_without_candidates_is_false():
    h = build_sigma2(3, QuantifierPolicy(s_univ=0, s_exist=1, strategy=Strategy.WITNESS, allow_fallback=False))
    out = evaluate(h, None, parse("existsP B:1. forall x. B(x)"))
    assert not out.value and out.stats["pred_candidates"] == 0


def test_witness_search_reports_infeasible_enumeration():
    h = build_sigma2(3, QuantifierPolicy(s_univ=0, s_exist=3, strategy=Strategy.WITNESS, max_orbits=4))
    with pytest.raises(WitnessSearchFailed):
        evaluate(h, None, parse("existsP B:2. forall x. B(x,x)"))


def test_trace_names_failing_choice():
    h = build_full(2)
    out = evaluate(h, None, parse("forallP B:1. exists x. B(x)"), trace=True)
    assert not out.value
    assert out.trace[0]["var"] == "B" and out.trace[0]["value"]["tuples"] == []


def test_hoisting_and_short_circuit_counted():
    h = build_sigma2(3, QuantifierPolicy(s_univ=1, s_exist=1, strategy=Strategy.ENUMERATE))
    f = parse("forallP B:1. (exists x. x = x & !(x = x)) -> B(y)")
    out = evaluate(h, Assignment({Y: 0}), f)
    assert out.value and out.stats.get("hoisted", 0) >= 1
