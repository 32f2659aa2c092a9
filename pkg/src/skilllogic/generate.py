"""Seeded random models and formulas for self-tests and property checks."""

from __future__ import annotations

import random
from itertools import combinations

from .kripke import KripkeModel
from .model import WeightedModel
from .syntax import (BOT, TOP, And, Atom, BoxAny, BoxMinus, BoxPlus, C, D, Down, E, F, Iff,
                     Implies, K, Learn, Not, Or, SetTo, Univ, Up)

ALL_OPS = ("K", "C", "D", "E", "F", "Up", "Down", "SetTo", "Learn", "BoxPlus", "BoxMinus",
           "BoxAny", "Univ")


def random_subset(rng: random.Random, pool, k_max: int | None = None) -> frozenset:
    pool = list(pool)
    k = rng.randint(0, len(pool) if k_max is None else min(k_max, len(pool)))
    return frozenset(rng.sample(pool, k))


def random_group(rng: random.Random, agents) -> tuple[str, ...]:
    return tuple(sorted(rng.sample(list(agents), rng.randint(1, len(agents)))))


def random_model(rng: random.Random, n_worlds: int = 4, skills=("s1", "s2", "s3"),
                 agents=("a", "b"), props=("p", "q")) -> WeightedModel:
    worlds = [f"w{i}" for i in range(1, n_worlds + 1)]
    edges = {}
    for x, y in combinations(worlds, 2):
        edges[x, y] = random_subset(rng, skills)
    caps = {a: random_subset(rng, skills) for a in agents}
    val = {w: random_subset(rng, props) for w in worlds}
    return WeightedModel.build(worlds, edges, caps, val, skills=list(skills))


def random_kripke(rng: random.Random, n_worlds: int = 3, agents=("a", "b"), props=("p", "q"),
                  kind: str = "any") -> KripkeModel:
    """``kind``: any, symmetric, or equivalence (an S5 relation from a random partition)."""
    worlds = [f"w{i}" for i in range(1, n_worlds + 1)]
    rels = {}
    for a in agents:
        if kind == "equivalence":
            block = {w: rng.randint(0, n_worlds - 1) for w in worlds}
            rels[a] = [(x, y) for x in worlds for y in worlds if block[x] == block[y]]
        else:
            pairs = [(x, y) for x in worlds for y in worlds if rng.random() < 0.4]
            if kind == "symmetric":
                pairs += [(y, x) for x, y in pairs]
            rels[a] = pairs
    val = {w: random_subset(rng, props) for w in worlds}
    return KripkeModel.build(worlds, rels, val)


def random_formula(rng: random.Random, depth: int, agents=("a", "b"), props=("p", "q"),
                   skills=("s1", "s2", "s3"), ops=ALL_OPS, constants: bool = True):
    """Random formula of modal depth at most ``depth``."""
    leaf_choices = [Atom(p) for p in props]
    if constants:
        leaf_choices += [TOP, BOT]
    if depth <= 0 or rng.random() < 0.2:
        return rng.choice(leaf_choices)
    r = rng.random()
    if r < 0.35:
        kind = rng.choice(("not", "imp", "and", "or", "iff"))
        if kind == "not":
            return Not(random_formula(rng, depth, agents, props, skills, ops, constants))
        left = random_formula(rng, depth - 1, agents, props, skills, ops, constants)
        right = random_formula(rng, depth - 1, agents, props, skills, ops, constants)
        return {"imp": Implies, "and": And, "or": Or, "iff": Iff}[kind](left, right)
    op = rng.choice(ops)
    sub = random_formula(rng, depth - 1, agents, props, skills, ops, constants)
    a = rng.choice(agents)
    if op == "K":
        return K(a, sub)
    if op in ("C", "D", "E", "F"):
        return {"C": C, "D": D, "E": E, "F": F}[op](random_group(rng, agents), sub)
    if op in ("Up", "Down", "SetTo"):
        return {"Up": Up, "Down": Down, "SetTo": SetTo}[op](a, random_subset(rng, skills, 2), sub)
    if op == "Learn":
        return Learn(a, rng.choice(agents), sub)
    if op in ("BoxPlus", "BoxMinus", "BoxAny"):
        return {"BoxPlus": BoxPlus, "BoxMinus": BoxMinus, "BoxAny": BoxAny}[op](a, sub)
    if op == "Univ":
        return Univ(sub)
    raise ValueError(op)


def corpus(seed: int = 2024, size: int = 200, max_worlds: int = 4, depth: int = 3):
    """The (model, formula) pairs used by the equivalence-law checks."""
    rng = random.Random(seed)
    out = []
    for _ in range(size):
        M = random_model(rng, rng.randint(1, max_worlds))
        phi = random_formula(rng, rng.randint(1, depth))
        out.append((M, phi))
    return out
