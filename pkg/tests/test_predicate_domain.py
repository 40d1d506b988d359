import json
import random
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from henkin_choice import (
    Assignment, BudgetExceeded, CertificateError, EnumerationGuardError, FidelityWarning, QuantifierPolicy,
    build_full, build_sigma0, build_sigma2, build_sigma3, comprehend, parse,
)

from oracles import all_subsets, as_set, brute_invariant, brute_orbits, brute_stabilizer

seeds = st.integers(0, 2**32 - 1)


def _s2(N, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FidelityWarning)
        return build_sigma2(N, QuantifierPolicy(**kw) if kw else None)


def test_unary_budget1_sigma2_matches_brute_force():
    h = _s2(3)
    stabs = [brute_stabilizer(h.group, s) for s in ([], [0, 1], [2, 3], [4, 5])]
    brute = {e for e in all_subsets(6, 1) if any(brute_invariant(e, st_) for st_ in stabs)}
    got = {as_set(p) for p in h.enumerate_predicates(1, 1)}
    assert len(brute) == 20
    assert got == brute


def test_binary_budget0_count_matches_orbits():
    h = _s2(4)
    n_orb = brute_orbits(8, 2, list(h.group.elements()))
    assert 2 ** n_orb == 8
    assert len(h.enumerate_predicates(2, 0)) == 8


@pytest.mark.parametrize("build,arity,budget", [
    (lambda: build_sigma0(4), 1, 1), (lambda: build_sigma0(4), 2, 1),
    (lambda: build_sigma3(3, 2), 1, 1), (lambda: _s2(3), 2, 0),
], ids=["sigma0-unary", "sigma0-binary", "sigma3-unary", "sigma2-binary"])
def test_enumeration_matches_brute_filter(build, arity, budget):
    h = build()
    supports = list(h.group.supports_up_to(budget))
    stabs = [brute_stabilizer(h.group, s) for s in supports]
    for s, st_ in zip(supports, stabs):
        assert len(h.invariant_predicates(arity, s)) == 2 ** brute_orbits(h.n_points, arity, st_)
    if h.n_points ** arity <= 16:
        brute = {e for e in all_subsets(h.n_points, arity) if any(brute_invariant(e, s) for s in stabs)}
        assert {as_set(p) for p in h.enumerate_predicates(arity, budget)} == brute


def test_full_structure_admits_everything():
    h = build_full(2)
    assert len(h.enumerate_predicates(1, 0)) == 4
    assert len(h.enumerate_predicates(2, 0)) == 16


@given(seeds)
@settings(max_examples=50, deadline=None)
def test_domain_closed_under_action(seed):
    rng = random.Random(seed)
    h = _s2(3)
    dom = h.enumerate_predicates(1, 1)
    keys = {p.key for p in dom}
    p = dom[rng.randrange(len(dom))]
    g = h.group.random_element(rng)
    q = h.act(g, p)
    assert q.key in keys and q.certified
    assert h.act(g.inverse, q) == p


def test_unary_dichotomy_sigma2():
    # a unary predicate with a budget-k support either holds on every point outside it or none
    h = _s2(4)
    for p in h.enumerate_predicates(1, 2):
        outside = [x for x in range(h.n_points) if x not in p.support]
        assert len({x in p for x in outside}) <= 1


def test_certificates():
    h = build_sigma0(4)
    assert h.make_predicate([0], [0], arity=1).support == {0}
    with pytest.raises(CertificateError):
        h.make_predicate([0], [], arity=1)
    p = h.make_predicate([(0, 1)], [0, 1, 2], arity=2)
    assert h.minimal_support(p) == {0, 1}
    with pytest.raises(BudgetExceeded):
        h.minimal_support(p, 1)
    assert h.within_budget(p, 2) and not h.within_budget(p, 1)


def test_json_round_trip(tmp_path):
    h = build_sigma3(3, 2)
    p = h.make_predicate([(0, 3), (1, 4)], [0, 1], arity=2)
    path = tmp_path / "p.json"
    path.write_text(json.dumps(h.predicate_to_json(p)))
    assert h.load_predicate(str(path)) == p
    bad = h.predicate_to_json(p)
    bad["support"] = []
    with pytest.raises(CertificateError):
        h.predicate_from_json(bad)


def test_fidelity_guard_warns():
    with pytest.warns(FidelityWarning):
        build_sigma2(4, QuantifierPolicy(s_univ=1, s_exist=3))
    with warnings.catch_warnings():
        warnings.simplefilter("error", FidelityWarning)
        h = build_sigma0(8, QuantifierPolicy(s_univ=1, s_exist=3))
    assert any(">=" in n for n in h.fidelity_notes)


def test_orbit_guard():
    h = build_sigma0(6, QuantifierPolicy(s_univ=2, s_exist=2))
    with pytest.raises(EnumerationGuardError):
        h.invariant_predicates(3, [0, 1])


def test_named_pair_relation():
    h = _s2(3)
    assert as_set(h.named["T"]) == h.group.edge_relation()
    assert h.named["T"].support == frozenset()


def test_comprehend():
    h = build_sigma0(4)
    p = comprehend(h, parse("x = y | Q(x)", {"Q": 1}), ["x"],
                   Assignment.of({"y": 2}, {"Q": h.make_predicate([0], [0], arity=1)}))
    assert as_set(p) == {(0,), (2,)}
    assert p.support == {0, 2}
    with pytest.raises(BudgetExceeded):
        comprehend(h, parse("x = y | x = z"), ["x"],
                   Assignment.of({"y": 0, "z": 1}),
                   QuantifierPolicy(s_univ=1, s_exist=1))
