import itertools
import random

import pytest
from hypothesis import given, strategies as st

from henkin_choice.group_action import (
    DomainError, GroupKind, GroupSpec, Permutation, generated_group, orbit, pointwise_stabilizer,
)

GROUPS = [GroupSpec(GroupKind.FULL_FINITARY, 4), GroupSpec(GroupKind.PAIR_AUTO, 3),
          GroupSpec(GroupKind.FIX_PART1, 3, 2)]
ORDERS = [24, 48, 6]
seeds = st.integers(0, 2**32 - 1)
groups = st.sampled_from(GROUPS)


@pytest.mark.parametrize("g,order", list(zip(GROUPS, ORDERS)))
def test_element_count(g, order):
    els = list(g.elements())
    assert len(els) == len(set(els)) == order
    assert all(g.contains(p) for p in els)


@given(groups, seeds)
def test_group_laws(g, seed):
    rng = random.Random(seed)
    a, b, c = (g.random_element(rng) for _ in range(3))
    e = Permutation.identity(g.n_points)
    assert (a * b) * c == a * (b * c)
    assert a * a.inverse == e == a.inverse * a
    assert a * e == a
    assert g.contains(a * b) and g.contains(a.inverse)


@given(groups, seeds)
def test_cycles_round_trip(g, seed):
    p = g.random_element(random.Random(seed))
    assert Permutation.from_cycles(g.n_points, p.cycles()) == p
    assert g.permutation_from_json(g.permutation_to_json(p)) == p


def test_pair_group_preserves_edges():
    g = GROUPS[1]
    T = g.edge_relation()
    assert len(T) == 6
    for p in g.elements():
        assert {p.apply_tuple(t) for t in T} == T


def test_fix_part1_fixes_copy():
    g = GROUPS[2]
    assert g.fixed_points == {3, 4}
    assert all(p(3) == 3 and p(4) == 4 for p in g.elements())


@pytest.mark.parametrize("g", GROUPS)
def test_stabilizer_generators_match_brute_force(g):
    units = g.support_units()
    for k in range(len(units) + 1):
        for combo in itertools.combinations(units, k):
            s = [x for u in combo for x in u]
            gen = generated_group(g.stabilizer_generators(s), g.n_points)
            assert gen == pointwise_stabilizer(g, s)


@given(groups, seeds, st.integers(1, 3))
def test_orbit_is_closed_and_transitive(g, seed, arity):
    rng = random.Random(seed)
    t = tuple(rng.randrange(g.n_points) for _ in range(arity))
    gens = g.stabilizer_generators(())
    orb = orbit(t, gens)
    assert {p.apply_tuple(t) for p in g.elements()} == orb


def test_support_normalization():
    g = GROUPS[1]
    assert g.normalize_support([0]) == {0, 1}
    assert g.support_size([0, 1, 5]) == 2
    assert GROUPS[2].normalize_support([0, 3]) == {0}
    with pytest.raises(DomainError):
        g.normalize_support([9])
    with pytest.raises(DomainError):
        Permutation.identity(3)(5)


def test_bad_permutation():
    with pytest.raises(ValueError):
        Permutation((0, 0, 1))
