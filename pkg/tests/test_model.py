import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from skilllogic import skills as sk
from skilllogic.model import (CapabilityUpdate, ModelError, WeightedModel, accessible, apply_update,
                              dumps_model, group_reachable, load_model, model_to_json, validate)
from skilllogic.skills import FULL

from .conftest import AGENTS, models, skill_sets


def test_fig1_accessibility(fig1):
    # read off the edge table by hand: a sees u iff {s1,s2,s3} <= E(w,u)
    assert accessible(fig1, "a", "w5") == {"w2", "w5"}
    assert accessible(fig1, "b", "w4") == {"w4", "w5"}
    assert accessible(fig1, "c", "w3") == {"w3", "w4", "w5"}
    assert group_reachable(fig1, ("a", "c"), "w5") == {"w1", "w2", "w3", "w4", "w5"}
    assert group_reachable(fig1, ("b",), "w1") == {"w1"}


def test_diagonal_defaults_to_full_and_off_diagonal_to_bottom():
    M = WeightedModel.build(["x", "y"], {}, {"a": frozenset({"s"})})
    assert M.edge("x", "x") is FULL
    assert M.edge("x", "y") == frozenset()
    assert accessible(M, "a", "x") == {"x"}
    # agents with no listed capability have the bottom value and see along every edge
    assert accessible(M, "z", "x") == {"x", "y"}


def test_asymmetric_edges_rejected():
    with pytest.raises(ModelError, match="asymmetric"):
        WeightedModel.build(["x", "y"], [(("x", "y"), frozenset("a")), (("y", "x"), frozenset())])


def test_validate_reports_each_kind():
    M = WeightedModel.build(["x", "y"], {("x", "y"): FULL}, {"a": frozenset({"zz"})},
                            {"nowhere": ["p"]}, skills=["s"])
    kinds = sorted(v.kind for v in validate(M))
    assert kinds == ["domain", "domain", "positivity"]


def test_validate_family_mismatch():
    M = WeightedModel.build(["x", "y"], {("x", "y"): sk.FuzzySet()}, skills=[])
    assert [v.kind for v in validate(M)] == ["family"]


def test_lattice_updates_use_meet():
    lat = sk.FiniteLattice(["0", "m", "1"], [("0", "m"), ("m", "1"), ("0", "1")])
    M = WeightedModel.build(["x"], {}, {"a": lat.element("1")}, family="lattice", lattice=lat)
    down = apply_update(M, CapabilityUpdate("minus", "a", lat.element("m")))
    assert down.capability("a").name == "m"
    with pytest.raises(sk.SkillError):
        M.skill_value(["m", "1"])


def test_learn_copies_the_source_capability(fig1):
    N = apply_update(fig1, CapabilityUpdate("learn", "c", "a"))
    assert N.capability("c") == fig1.capability("a")
    assert fig1.capability("c") == frozenset({"s4"})


@given(models(), st.sampled_from(("union", "minus", "assign")), st.sampled_from(AGENTS),
       skill_sets)
def test_apply_update_is_pure(M, kind, a, S):
    before = dict(M.capabilities)
    N = apply_update(M, CapabilityUpdate(kind, a, S))
    assert dict(M.capabilities) == before
    assert N.frame is M.frame
    for b in AGENTS:
        if b != a:
            assert N.capability(b) == M.capability(b)
    expected = {"union": M.capability(a) | S, "minus": M.capability(a) - S, "assign": S}[kind]
    assert N.capability(a) == expected


@given(models(), st.sampled_from(AGENTS))
def test_accessibility_is_symmetric_and_matches_brute_force(M, a):
    cap = M.capability(a)
    for w in M.worlds:
        brute = {u for u in M.worlds if M.edge(w, u) is FULL or cap <= M.edge(w, u)}
        assert accessible(M, a, w) == brute
        for u in accessible(M, a, w):
            assert w in accessible(M, a, u)


@given(models(), skill_sets, skill_sets)
def test_accessibility_antitone_in_capability(M, S, T):
    small, big = S & T, S | T
    for w in M.worlds:
        assert M.frame.successors(big)[w] <= M.frame.successors(small)[w]


@given(models())
def test_group_reachable_monotone_in_group(M):
    for w in M.worlds:
        one = group_reachable(M, ("a",), w)
        both = group_reachable(M, ("a", "b"), w)
        assert one <= both
        assert accessible(M, "a", w) <= one


@given(models())
def test_json_round_trip(M):
    again = load_model(json.loads(dumps_model(M)))
    assert model_to_json(again) == model_to_json(M)


def test_fuzzy_json():
    data = {"worlds": ["x", "y"], "family": "fuzzy",
            "edges": [{"between": ["x", "y"], "skills": [{"skill": "s", "mu": "0.5"}]}],
            "capabilities": {"a": [{"skill": "s", "mu": 0.25}]}}
    M = load_model(data)
    assert M.edge("x", "y").mu("s") == Fraction(1, 2)
    assert accessible(M, "a", "x") == {"x", "y"}
    assert model_to_json(load_model(model_to_json(M))) == model_to_json(M)


def test_lattice_json_by_path(tmp_path):
    lat = {"elements": ["0", "1"], "leq_pairs": [["0", "1"]]}
    (tmp_path / "lat.json").write_text(json.dumps(lat))
    data = {"worlds": ["x", "y"], "family": {"lattice": "lat.json"},
            "edges": [{"between": ["x", "y"], "skills": "0"}], "capabilities": {"a": "1"}}
    M = load_model(data, str(tmp_path))
    assert accessible(M, "a", "x") == {"x"}


def test_unknown_family_rejected():
    with pytest.raises(ModelError, match="family"):
        load_model({"worlds": ["x"], "family": "probabilistic"})
