from __future__ import annotations

from importlib import resources
from itertools import combinations

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from skilllogic import syntax as sx
from skilllogic.model import WeightedModel, load_model_file

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

AGENTS = ("a", "b")
PROPS = ("p", "q")
SKILLS = ("s1", "s2", "s3")


def fixture_path(name: str) -> str:
    return str(resources.files("skilllogic") / "fixtures" / name)


@pytest.fixture(scope="session")
def solar():
    return load_model_file(fixture_path("solar.json"))


@pytest.fixture(scope="session")
def fig1():
    return load_model_file(fixture_path("fig1.json"))


skill_sets = st.frozensets(st.sampled_from(SKILLS), max_size=3)
groups = st.lists(st.sampled_from(AGENTS), min_size=1, max_size=2, unique=True)
agents = st.sampled_from(AGENTS)


def _extend(children, ops):
    opts = [
        st.builds(sx.Not, children),
        st.builds(sx.And, children, children),
        st.builds(sx.Or, children, children),
        st.builds(sx.Implies, children, children),
        st.builds(sx.Iff, children, children),
    ]
    table = {
        "K": st.builds(sx.K, agents, children),
        "C": st.builds(sx.C, groups, children),
        "D": st.builds(sx.D, groups, children),
        "E": st.builds(sx.E, groups, children),
        "F": st.builds(sx.F, groups, children),
        "Univ": st.builds(sx.Univ, children),
        "Up": st.builds(sx.Up, agents, skill_sets, children),
        "Down": st.builds(sx.Down, agents, skill_sets, children),
        "SetTo": st.builds(sx.SetTo, agents, skill_sets, children),
        "Learn": st.builds(sx.Learn, agents, agents, children),
        "BoxPlus": st.builds(sx.BoxPlus, agents, children),
        "BoxMinus": st.builds(sx.BoxMinus, agents, children),
        "BoxAny": st.builds(sx.BoxAny, agents, children),
    }
    opts += [table[o] for o in ops]
    return st.one_of(opts)


def formulas(ops=("K", "C", "D", "E", "F", "Univ", "Up", "Down", "SetTo", "Learn", "BoxPlus",
                  "BoxMinus", "BoxAny"), max_leaves: int = 8):
    leaves = st.one_of(st.sampled_from([sx.Atom(p) for p in PROPS]), st.just(sx.TOP),
                       st.just(sx.BOT))
    return st.recursive(leaves, lambda ch: _extend(ch, ops), max_leaves=max_leaves)


@st.composite
def models(draw, max_worlds: int = 4):
    n = draw(st.integers(1, max_worlds))
    worlds = [f"w{i}" for i in range(1, n + 1)]
    edges = {pair: draw(skill_sets) for pair in combinations(worlds, 2)}
    caps = {a: draw(skill_sets) for a in AGENTS}
    val = {w: draw(st.frozensets(st.sampled_from(PROPS))) for w in worlds}
    return WeightedModel.build(worlds, edges, caps, val, skills=list(SKILLS))


def pytest_terminal_summary(terminalreporter):
    from .test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
