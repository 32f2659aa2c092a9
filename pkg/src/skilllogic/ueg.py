"""Undirected edge geography and its encoding as a model-checking instance.

Two players move a token along edges of an undirected graph, deleting each
edge once it is used.  A player with no edge to take loses.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable

from .checker import Checker
from .model import WeightedModel
from .syntax import (BOT, And, Atom, BoxAny, BoxMinus, BoxPlus, Formula, K, Not, Or, big_or,
                     diamond, hat_k)

MAX_NODES = 5
MAX_EDGES = 6


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class UegGraph:
    nodes: tuple[str, ...]
    edges: frozenset  # of frozenset({x, y})
    root: str

    def __post_init__(self):
        if not self.nodes:
            raise GraphError("graph needs at least one node")
        if self.root not in self.nodes:
            raise GraphError(f"root {self.root!r} is not a node")
        for e in self.edges:
            if len(e) != 2:
                raise GraphError("edges join two distinct nodes")
            if not e <= set(self.nodes):
                raise GraphError(f"edge {sorted(e)} mentions an unknown node")

    @classmethod
    def make(cls, nodes: Iterable[str], edges: Iterable[tuple[str, str]], root: str) -> "UegGraph":
        return cls(tuple(nodes), frozenset(frozenset(e) for e in edges), root)

    @classmethod
    def from_json(cls, data) -> "UegGraph":
        return cls.make([str(n) for n in data["nodes"]],
                        [(str(x), str(y)) for x, y in data["edges"]], str(data["root"]))

    @classmethod
    def load(cls, path: str) -> "UegGraph":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def ordered_edge(self, e: frozenset) -> tuple[str, str]:
        x, y = sorted(e, key=self.nodes.index)
        return x, y

    def sorted_edges(self) -> list[tuple[str, str]]:
        return sorted((self.ordered_edge(e) for e in self.edges),
                      key=lambda p: (self.nodes.index(p[0]), self.nodes.index(p[1])))


PLAYER_I = "PlayerI"
PLAYER_II = "PlayerII"


def solve(g: UegGraph) -> str:
    """Winner of the game from the root, Player I moving first."""

    @lru_cache(maxsize=None)
    def mover_wins(edges: frozenset, node: str) -> bool:
        for e in edges:
            if node in e:
                (other,) = e - {node}
                if not mover_wins(edges - {e}, other):
                    return True
        return False

    return PLAYER_I if mover_wins(g.edges, g.root) else PLAYER_II


def edge_skill(g: UegGraph, e: frozenset) -> str:
    x, y = g.ordered_edge(e)
    return f"s_{x}_{y}"


def node_prop(x: str) -> str:
    return f"p_{x}"


def agent(i: int) -> str:
    return f"ueg_a{i}"


def rounds(g: UegGraph) -> int:
    n = len(g.edges)
    n = max(n, 1)
    return n + (n % 2)


def induced_model(g: UegGraph, variant: str = "plus") -> WeightedModel:
    """Worlds are nodes, each edge carries its own skill, nothing else does.

    All agents start with no skills.  For the ``minus`` variant every agent
    starts with all edge skills instead.
    """
    edges = {}
    for i, x in enumerate(g.nodes):
        for y in g.nodes[i:]:
            e = frozenset((x, y))
            edges[x, y] = frozenset({edge_skill(g, e)}) if e in g.edges else frozenset()
    skills = [edge_skill(g, frozenset(p)) for p in g.sorted_edges()]
    start = frozenset(skills) if variant == "minus" else frozenset()
    caps = {agent(i): start for i in range(1, rounds(g) + 1)}
    val = {x: [node_prop(x)] for x in g.nodes}
    return WeightedModel.build(g.nodes, edges, caps, val, skills=skills)


def _psi(g: UegGraph, i: int) -> Formula:
    a = agent(i)
    return And(Not(K(a, BOT)), big_or(K(a, Atom(node_prop(x))) for x in g.nodes))


def _chi(g: UegGraph, i: int) -> Formula:
    terms = []
    for j in range(1, i):
        for y in g.nodes:
            for x in g.nodes:
                if x == y:
                    continue
                py = Atom(node_prop(y))
                terms.append(And(And(Atom(node_prop(x)), hat_k(agent(j), py)), K(agent(i), py)))
    return big_or(terms)


def induced_formula(g: UegGraph, variant: str = "plus") -> Formula:
    """The alternating formula that holds at the root iff Player I wins."""
    box = {"plus": BoxPlus, "any": BoxAny, "minus": BoxMinus}[variant]
    n = rounds(g)
    # innermost: box_{a_n}(~psi_n | chi_n), then wrap outwards two levels at a time
    body = box(agent(n), Or(Not(_psi(g, n)), _chi(g, n)))
    for i in range(n - 1, 0, -2):
        inner = And(And(_psi(g, i), Not(_chi(g, i))), K(agent(i), body))
        phi = diamond(box, agent(i), inner)
        if i == 1:
            return phi
        prev = i - 1
        body = box(agent(prev), Or(Or(Not(_psi(g, prev)), _chi(g, prev)), hat_k(agent(prev), phi)))
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class EquivalenceReport:
    winner: str
    verdict: bool
    agree: bool
    seconds: float

    def to_json(self) -> dict:
        return {"winner": self.winner, "model_check": self.verdict, "agree": self.agree}


def equivalence_check(g: UegGraph, variant: str = "plus") -> EquivalenceReport:
    if len(g.nodes) > MAX_NODES or len(g.edges) > MAX_EDGES:
        raise GraphError(f"graph exceeds the {MAX_NODES}-node / {MAX_EDGES}-edge limit "
                         "for exhaustive quantifier enumeration")
    t0 = time.perf_counter()
    winner = solve(g)
    M = induced_model(g, variant)
    verdict = g.root in Checker(M).truth_set(induced_formula(g, variant))
    return EquivalenceReport(winner, verdict, (winner == PLAYER_I) == verdict,
                             time.perf_counter() - t0)


def all_rooted_graphs(max_nodes: int):
    """Every graph on nodes d1..dk (k <= max_nodes), every edge subset, every root."""
    for k in range(1, max_nodes + 1):
        nodes = tuple(f"d{i}" for i in range(1, k + 1))
        possible = list(combinations(nodes, 2))
        for r in range(len(possible) + 1):
            for chosen in combinations(possible, r):
                for root in nodes:
                    yield UegGraph.make(nodes, chosen, root)
