import random

import pytest
from hypothesis import given, settings, strategies as st

from henkin_choice import (
    Atom, EqTuple, ExistsExactlyOne, ExistsPred, ForallIndiv, FormulaError, IndivVar,
    ParseError, PredVar, build_full, evaluate, free_vars, parse, render, substitute_pred,
)
from henkin_choice.formula import ArityError, desugar_exactly_one, rename_pred, subformulas
from henkin_choice.schemas import (
    SlotSignatureError, build_AC, build_AC_star, build_choice, build_choice_h, build_choice_star,
    schema_instance, witness_H_bij, witness_H_pair,
)

from oracles import P, Q, X, Y, Z, naive_eval, random_formula

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@given(seeds)
def test_render_parse_round_trip(seed):
    f = random_formula(random.Random(seed), depth=4)
    assert parse(render(f), {"P": 1, "Q": 2}) == f


@given(seeds)
def test_render_is_stable(seed):
    f = random_formula(random.Random(seed), depth=4)
    assert render(parse(render(f), {"P": 1, "Q": 2})) == render(f)


def test_parse_precedence():
    f = parse("P(x) & P(y) -> P(z) | !P(x)")
    assert render(f) == "P(x) & P(y) -> P(z) | !P(x)"
    assert parse("forall x. P(x) -> P(x)") == ForallIndiv((X,), parse("P(x) -> P(x)"))


@pytest.mark.parametrize("text", ["P(x", "forall . P(x)", "P(x) &", "existsP B. B(x)", "P(x) P(y)"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse(text)


def test_parse_arity_conflict():
    with pytest.raises(ParseError):
        parse("P(x) & P(x,y)")
    with pytest.raises(ParseError):
        parse("P(x)", {"P": 2})


def test_arity_checked_on_construction():
    with pytest.raises(ArityError):
        Atom(PredVar("R", 2), ("x",))
    with pytest.raises(ArityError):
        EqTuple(("x",), ("y", "z"))
    with pytest.raises(FormulaError):
        ForallIndiv((X, X), Atom(P, (X,)))


def _all_preds(h, arity):
    return [frozenset(p.tuples()) for p in h.enumerate_predicates(arity, 0)]


@given(seeds, seeds)
@settings(max_examples=60, deadline=None)
def test_substitution_matches_comprehension(seed, seed2):
    """phi[P := psi] holds iff phi holds with P set to the extension of psi."""
    rng = random.Random(seed)
    R = PredVar("R", 1)
    phi = random_formula(rng, depth=3, pred_quants=False)
    psi = rename_pred(random_formula(random.Random(seed2), depth=2, pred_quants=False), P, R)
    h = build_full(2)
    dom = {1: _all_preds(h, 1), 2: _all_preds(h, 2)}
    base = {Q: dom[2][rng.randrange(16)], R: dom[1][rng.randrange(4)], P: frozenset()}
    indivs = {X: rng.randrange(2), Y: rng.randrange(2), Z: rng.randrange(2)}
    # P(t) := psi[z := t]; the free x, y of psi act as parameters
    ext = frozenset((t,) for t in range(2) if naive_eval(psi, 2, {**indivs, Z: t}, base, dom, dom))
    direct = naive_eval(phi, 2, indivs, {**base, P: ext}, dom, dom)
    assert naive_eval(substitute_pred(phi, P, (Z,), psi), 2, indivs, base, dom, dom) == direct


def test_substitution_avoids_capture():
    phi = parse("forall y. P(y) & Q(x,y)", {"P": 1, "Q": 2})
    out = substitute_pred(phi, P, (Z,), parse("Q(z,y)", {"Q": 2}))
    # the free y of the body must not be captured by the quantifier
    assert IndivVar("y") in free_vars(out)[0]


def test_substitution_rejects_self_reference():
    with pytest.raises(FormulaError):
        substitute_pred(parse("P(x)"), P, (X,), parse("P(x)"))


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_desugared_exactly_one_agrees(seed):
    rng = random.Random(seed)
    body = random_formula(rng, depth=2, pred_quants=False)
    vs = tuple(rng.sample([X, Y], rng.choice([1, 2])))
    f = ExistsExactlyOne(vs, body)
    g = desugar_exactly_one(f)
    assert not any(isinstance(s, ExistsExactlyOne) and s is not f for s in subformulas(g) if s == f)
    h = build_full(2)
    dom = {1: _all_preds(h, 1), 2: _all_preds(h, 2)}
    indivs = {X: rng.randrange(2), Y: rng.randrange(2), Z: rng.randrange(2)}
    preds = {P: dom[1][rng.randrange(4)], Q: dom[2][rng.randrange(16)]}
    assert naive_eval(f, 2, indivs, preds, dom, dom) == naive_eval(g, 2, indivs, preds, dom, dom)


def test_schema_builders_are_closed():
    for f in (build_AC(1, 1), build_AC(2, 2), build_AC_star(1, 2), build_AC_star(2, 1)):
        assert free_vars(f) == (set(), set())
    inst = build_choice_star(1, witness_H_pair())
    assert free_vars(inst)[1] == {PredVar("T", 2)}


def test_schema_slot_checks():
    with pytest.raises(ValueError):
        build_AC(0, 1)
    with pytest.raises(SlotSignatureError):
        build_choice(1, 1, parse("D(x) & S(x,x)", {"D": 1, "S": 2}))
    with pytest.raises(SlotSignatureError):
        build_choice_star(1, parse("C(x,y)"))
    with pytest.raises(ValueError):
        schema_instance("choice", 1, 1)


def test_choice_instance_substitutes_slices():
    inst = build_choice(1, 1, parse("D(x)", {"D": 1}))
    assert render(inst) == "(forall x. existsP D:1. D(x)) -> existsP S:2. forall x. S(x,x)"


def test_trivial_choice_star_guard_is_tautology(full2):
    inst = build_choice_star(1, parse("exists y. C(y)", {"C": 1}))
    assert evaluate(full2, None, inst.left.left).value


def test_choice_h_has_slice_quantifier():
    inst = build_choice_h(1, 1, witness_H_bij())
    assert isinstance(inst.right, ExistsPred)
