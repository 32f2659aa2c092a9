"""Deliberately naive evaluator used as a cross-check.

It follows the satisfaction clauses world by world, builds updated models
explicitly, finds common-knowledge reachability by searching paths, and
shares no code with :mod:`skilllogic.checker` beyond the skill operations.
No caching of any kind.
"""

from __future__ import annotations

from itertools import combinations

from . import skills as sk
from .model import CapabilityUpdate, WeightedModel, apply_update
from .syntax import (And, Atom, Bot, BoxAny, BoxMinus, BoxPlus, C, D, Down, E, F, Formula,
                     Iff, Implies, K, Learn, Not, Or, SetTo, Top, Univ, Up, iter_subformulas)


def _sees(M: WeightedModel, cap, w, u) -> bool:
    return sk.leq(cap, M.edge(w, u))


def _pool(M: WeightedModel, phi: Formula) -> list:
    names = set()
    for (key, v) in M.frame.edges.items():
        if v is not sk.FULL:
            names.update(v)
    for node in iter_subformulas(phi):
        for attr in ("agent", "learner", "source"):
            a = getattr(node, attr, None)
            if isinstance(a, str):
                names.update(sk.skill_names(M.capability(a)))
        for g in (getattr(node, "group", None) or ()):
            names.update(sk.skill_names(M.capability(g)))
        if isinstance(node, (Up, Down, SetTo)):
            names.update(node.skills)
    fresh = "fresh"
    while fresh in names:
        fresh += "_"
    names.add(fresh)
    return sorted(names)


def holds(M: WeightedModel, w: str, phi: Formula) -> bool:
    t = type(phi)
    if t is Atom:
        return phi.name in M.props_at(w)
    if t is Top:
        return True
    if t is Bot:
        return False
    if t is Not:
        return not holds(M, w, phi.sub)
    if t is And:
        return holds(M, w, phi.left) and holds(M, w, phi.right)
    if t is Or:
        return holds(M, w, phi.left) or holds(M, w, phi.right)
    if t is Implies:
        return (not holds(M, w, phi.left)) or holds(M, w, phi.right)
    if t is Iff:
        return holds(M, w, phi.left) == holds(M, w, phi.right)
    if t is K:
        cap = M.capability(phi.agent)
        return all(holds(M, u, phi.sub) for u in M.worlds if _sees(M, cap, w, u))
    if t is E:
        return all(holds(M, w, K(a, phi.sub)) for a in phi.group)
    if t is D:
        cap = M.frame.bottom
        for a in phi.group:
            cap = sk.join(cap, M.capability(a))
        return all(holds(M, u, phi.sub) for u in M.worlds if _sees(M, cap, w, u))
    if t is F:
        caps = [M.capability(a) for a in phi.group]
        cap = caps[0]
        for c in caps[1:]:
            cap = sk.meet(cap, c)
        return all(holds(M, u, phi.sub) for u in M.worlds if _sees(M, cap, w, u))
    if t is C:
        # depth-first search over G-paths of length at least one
        visited = set()
        todo = [w]
        while todo:
            x = todo.pop()
            for u in M.worlds:
                if u in visited:
                    continue
                if any(_sees(M, M.capability(a), x, u) for a in phi.group):
                    visited.add(u)
                    todo.append(u)
        return all(holds(M, u, phi.sub) for u in visited)
    if t is Univ:
        return all(holds(M, u, phi.sub) for u in M.worlds)
    if t is Learn:
        return holds(apply_update(M, CapabilityUpdate("learn", phi.learner, phi.source)), w, phi.sub)
    if t in (Up, Down, SetTo):
        kind = {Up: "union", Down: "minus", SetTo: "assign"}[t]
        S = M.skill_value(phi.skills)
        return holds(apply_update(M, CapabilityUpdate(kind, phi.agent, S)), w, phi.sub)
    if t in (BoxPlus, BoxMinus, BoxAny):
        if M.family != "classical":
            raise sk.UnsupportedOperation("quantifiers need classical skills")
        kind = {BoxPlus: "union", BoxMinus: "minus", BoxAny: "assign"}[t]
        pool = _pool(M, phi)
        for r in range(len(pool) + 1):
            for S in combinations(pool, r):
                M2 = apply_update(M, CapabilityUpdate(kind, phi.agent, frozenset(S)))
                if not holds(M2, w, phi.sub):
                    return False
        return True
    raise TypeError(f"cannot evaluate {phi!r}")


def naive_truth_set(M: WeightedModel, phi: Formula) -> frozenset:
    return frozenset(w for w in M.worlds if holds(M, w, phi))
