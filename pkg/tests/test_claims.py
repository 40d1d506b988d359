import json

import pytest

from henkin_choice.claims import (
    VERDICTS, GuardViolation, UnknownClaim, annotations, get_claim, registry, report, run_all, run_claim,
)

CHEAP = ["sigma2-not-choicestar1", "sigma3-not-choiceh11", "lemma-sigma2-support", "lemma-sigma3-stabilizer",
         "sigma0-AC11", "fig1-ACnm-implies-AC1m"]


def test_registry_shape():
    ids = [c.id for c in registry()]
    assert len(ids) == len(set(ids))
    assert {c.expected for c in registry()} <= set(VERDICTS)
    assert get_claim("sigma2-AC11").expected == "true"
    assert get_claim("sigma2-not-choicestar1").expected == "false"
    assert get_claim("sigma0-choice-star-1").expected == "true"
    assert get_claim("fig1-ACnm-implies-AC1m").expected == "no-counterexample"
    assert sum(i.startswith("fig1-") for i in ids) == 13
    for c in registry():
        assert set(c.depends) <= set(ids)


def test_annotations_point_at_claims():
    ids = {c.id for c in registry()}
    for a in annotations():
        assert a.status in ("realized-by", "unchecked")
        assert set(a.claims) <= ids
        assert (a.status == "realized-by") == bool(a.claims)


@pytest.mark.parametrize("cid", CHEAP)
def test_cheap_claims_match(cid):
    r = run_claim(cid)
    assert r.match, r.payload
    assert r.fidelity and r.params  # truncation parameters are always recorded


def test_report_is_deterministic_without_timing():
    a = report([run_claim(c, seed=3) for c in CHEAP], timing=False)
    b = report([run_claim(c, seed=3) for c in CHEAP], timing=False)
    assert json.dumps(a) == json.dumps(b)
    assert "elapsed_s" not in json.dumps(a)


def test_unknown_claim():
    with pytest.raises(UnknownClaim):
        run_claim("no-such-claim")


def test_unknown_parameter():
    with pytest.raises(KeyError):
        run_claim("sigma2-not-choicestar1", {"bogus": 1})


def test_guard_violation_and_force():
    with pytest.raises(GuardViolation):
        run_claim("sigma2-not-choicestar1", {"N": "3"})
    r = run_claim("sigma2-not-choicestar1", {"N": "3"}, force=True)
    assert r.verdict == "undetermined"
    assert any("forced" in n for n in r.fidelity)


def test_overrides_are_coerced():
    r = run_claim("sigma2-not-choicestar1", {"N": "5", "s_exist": "2"})
    assert r.params["N"] == 5 and r.match


def test_composite_uses_dependencies():
    c = get_claim("thm2-choiceh11-indep-AC11")
    assert c.depends
    cache = {d: run_claim(d) for d in c.depends}
    r = run_claim(c.id, _results=cache)
    assert r.match


def test_run_all_filter_keeps_order():
    res = run_all("lemma-")
    assert [r.claim_id for r in res] == [c.id for c in registry() if "lemma-" in c.id]
    assert all(r.match for r in res)
