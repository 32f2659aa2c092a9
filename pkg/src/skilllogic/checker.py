"""Model checking by truth sets.

The evaluator works bottom-up on whole truth sets.  Updates and quantifiers
never copy the frame: they evaluate the body under a new capability map, and
results are memoised per (subformula, relevant capabilities).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

from . import skills as sk
from .model import ModelError, WeightedModel, validate
from .syntax import (BOT, TOP, And, Atom, Bot, BoxAny, BoxMinus, BoxPlus, C, D, Down, E,
                     F, Formula, Iff, Implies, K, Learn, Not, Or, SetTo, Top, Univ, Up,
                     agents_of, iter_subformulas, vocabulary)

FRESH_PREFIX = "_new"


class InvalidModel(ModelError):
    pass


def _agent_profile(phi: Formula, memo: dict | None = None) -> tuple[frozenset, frozenset]:
    """Split the agents of phi into those used only for plain accessibility
    (K, E, C) and the rest.

    For the first kind only the accessibility relation induced by the
    capability matters, not the capability itself.
    """
    # raw[node] = (agents under K/E/C somewhere, agents used any other way)
    raw = {} if memo is None else memo
    stack = [(phi, False)]
    while stack:
        node, done = stack.pop()
        if node in raw:
            continue
        if not done:
            stack.append((node, True))
            stack.extend((ch, False) for ch in node.children() if ch not in raw)
            continue
        plain, other = set(), set()
        for ch in node.children():
            plain |= raw[ch][0]
            other |= raw[ch][1]
        (plain if isinstance(node, (K, E, C)) else other).update(agents_of(node))
        raw[node] = (frozenset(plain), frozenset(other))
    plain, other = raw[phi]
    return plain - other, other


def quantifier_universe(M: WeightedModel, phi: Formula, caps: Mapping | None = None,
                        extra_fresh: int = 0) -> tuple[frozenset, frozenset]:
    """The finite skill pools (S1, S2) a quantifier in ``phi`` ranges over.

    S1 gathers every finite edge label, the capabilities of the agents of
    phi, and the skills written in phi's updates.  S2 adds one skill new to
    S1 (more with ``extra_fresh``, which must not change any verdict).
    """
    if M.family != "classical":
        raise sk.UnsupportedOperation("quantifiers are only defined for classical skills")
    caps = M.capabilities if caps is None else caps
    s1 = set()
    for v in M.frame.edges.values():
        if v is not sk.FULL:
            s1 |= v
    voc = vocabulary(phi)
    for a in voc.agents:
        v = caps.get(a, frozenset())
        if v is not sk.FULL:
            s1 |= v
    s1 |= voc.skills
    s2 = set(s1)
    i = 0
    need = 1 + extra_fresh
    while need:
        name = f"{FRESH_PREFIX}{i}"
        if name not in s1:
            s2.add(name)
            need -= 1
        i += 1
    return frozenset(s1), frozenset(s2)


def subsets_in_order(pool: Iterable[str]):
    items = sorted(pool)
    for r in range(len(items) + 1):
        for combo in combinations(items, r):
            yield frozenset(combo)


@dataclass(frozen=True)
class GroupClosure:
    e_phi: dict
    e_phi_plus: dict


class Checker:
    def __init__(self, M: WeightedModel, extra_fresh: int = 0, check_model: bool = True):
        if check_model:
            problems = validate(M)
            if problems:
                raise InvalidModel("; ".join(map(str, problems)))
        self.M = M
        self.frame = M.frame
        self.W = frozenset(M.worlds)
        self.extra_fresh = extra_fresh
        self._memo: dict = {}
        self._profiles: dict = {}
        self._raw_profiles: dict = {}
        self._sigs: dict = {}
        self._closures: dict = {}
        self._atoms: dict = {}

    # -- helpers

    def _cap(self, caps, a):
        return caps.get(a, self.frame.bottom)

    def _signature(self, cap):
        sig = self._sigs.get(cap)
        if sig is None:
            succ = self.frame.successors(cap)
            sig = tuple(succ[w] for w in self.frame.worlds)
            self._sigs[cap] = sig
        return sig

    def _profile(self, phi):
        prof = self._profiles.get(phi)
        if prof is None:
            prof = _agent_profile(phi, self._raw_profiles)
            self._profiles[phi] = prof
        return prof

    def _key(self, phi, caps):
        plain, other = self._profile(phi)
        if not plain and not other:
            return phi
        parts = []
        for a in sorted(plain):
            parts.append((a, self._signature(self._cap(caps, a))))
        for a in sorted(other):
            parts.append((a, self._cap(caps, a)))
        return (phi, tuple(parts))

    def _box(self, cap, val):
        succ = self.frame.successors(cap)
        return frozenset(x for x in self.frame.worlds if succ[x] <= val)

    def _reach1(self, caps, group):
        succs = [self.frame.successors(self._cap(caps, a)) for a in group]
        return {x: frozenset().union(*(s[x] for s in succs)) for x in self.frame.worlds}

    def _reach_plus(self, caps, group):
        key = (group, tuple(self._signature(self._cap(caps, a)) for a in group))
        hit = self._closures.get(key)
        if hit is not None:
            return hit
        rel = {x: set(ys) for x, ys in self._reach1(caps, group).items()}
        # add (x, z) whenever (x, y) and (y, z) are present, until stable
        changed = True
        while changed:
            changed = False
            for x in self.frame.worlds:
                extra = set()
                for y in rel[x]:
                    extra |= rel[y]
                if not extra <= rel[x]:
                    rel[x] |= extra
                    changed = True
        out = {x: frozenset(ys) for x, ys in rel.items()}
        self._closures[key] = out
        return out

    # -- evaluation

    def truth_set(self, phi: Formula, caps: Mapping | None = None) -> frozenset:
        caps = dict(self.M.capabilities if caps is None else caps)
        limit = sys.getrecursionlimit()
        if limit < 20000:
            sys.setrecursionlimit(20000)
        try:
            return self._eval(phi, caps)
        finally:
            sys.setrecursionlimit(limit)

    def _eval(self, phi: Formula, caps: dict) -> frozenset:
        key = self._key(phi, caps)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        out = self._compute(phi, caps)
        self._memo[key] = out
        return out

    def _compute(self, phi, caps) -> frozenset:
        t = type(phi)
        W = self.W
        if t is Atom:
            return frozenset(w for w in self.frame.worlds if phi.name in self.M.props_at(w))
        if t is Top:
            return W
        if t is Bot:
            return frozenset()
        if t is Not:
            return W - self._eval(phi.sub, caps)
        if t is And:
            left = self._eval(phi.left, caps)
            if not left:
                return left
            return left & self._eval(phi.right, caps)
        if t is Or:
            left = self._eval(phi.left, caps)
            if left == W:
                return left
            return left | self._eval(phi.right, caps)
        if t is Implies:
            left = self._eval(phi.left, caps)
            if not left:
                return W
            return (W - left) | self._eval(phi.right, caps)
        if t is Iff:
            left = self._eval(phi.left, caps)
            right = self._eval(phi.right, caps)
            return (left & right) | (W - left - right)
        if t is K:
            return self._box(self._cap(caps, phi.agent), self._eval(phi.sub, caps))
        if t is D:
            cap = sk.join_all((self._cap(caps, a) for a in phi.group),
                              self.frame.family, self.frame.lattice)
            return self._box(cap, self._eval(phi.sub, caps))
        if t is F:
            cap = sk.meet_all(self._cap(caps, a) for a in phi.group)
            return self._box(cap, self._eval(phi.sub, caps))
        if t is E:
            val = self._eval(phi.sub, caps)
            rel = self._reach1(caps, phi.group)
            return frozenset(x for x in self.frame.worlds if rel[x] <= val)
        if t is C:
            val = self._eval(phi.sub, caps)
            rel = self._reach_plus(caps, phi.group)
            return frozenset(x for x in self.frame.worlds if rel[x] <= val)
        if t is Univ:
            return W if self._eval(phi.sub, caps) == W else frozenset()
        if t in (Up, Down, SetTo, Learn):
            return self._eval(phi.sub, self._updated(phi, caps))
        if t in (BoxPlus, BoxMinus, BoxAny):
            return self._quantify(phi, caps)
        raise TypeError(f"cannot evaluate {phi!r}")

    def _updated(self, phi, caps) -> dict:
        new = dict(caps)
        t = type(phi)
        if t is Learn:
            new[phi.learner] = self._cap(caps, phi.source)
            return new
        S = self.M.skill_value(phi.skills)
        cur = self._cap(caps, phi.agent)
        if t is Up:
            new[phi.agent] = sk.join(cur, S)
        elif t is Down:
            if self.frame.family == "lattice":
                new[phi.agent] = sk.meet(cur, S)
            else:
                new[phi.agent] = sk.difference(cur, S)
        else:
            new[phi.agent] = S
        return new

    def _quantify(self, phi, caps) -> frozenset:
        _, s2 = quantifier_universe(self.M, phi, caps, self.extra_fresh)
        a, body = phi.agent, phi.sub
        cur = self._cap(caps, a)
        plain, _ = self._profile(body)
        t = type(phi)
        acc = self.W
        seen = set()
        for S in subsets_in_order(s2):
            if t is BoxPlus:
                cap = sk.join(cur, S)
            elif t is BoxMinus:
                cap = sk.difference(cur, S)
            else:
                cap = S
            # only the induced accessibility matters when a is used plainly
            tag = self._signature(cap) if a in plain else cap
            if tag in seen:
                continue
            seen.add(tag)
            new = dict(caps)
            new[a] = cap
            acc = acc & self._eval(body, new)
            if not acc:
                break
        return acc


def truth_set(M: WeightedModel, phi: Formula) -> frozenset:
    return Checker(M).truth_set(phi)


def check(M: WeightedModel, w: str, phi: Formula) -> bool:
    if not M.frame.has_world(w):
        raise ModelError(f"unknown world {w!r}")
    return w in truth_set(M, phi)


def sorted_worlds(M: WeightedModel, worlds: Iterable[str]) -> list[str]:
    ws = set(worlds)
    return [w for w in M.worlds if w in ws]


def group_closure(M: WeightedModel, phi: Formula) -> GroupClosure:
    """Group labels of every world pair for the groups under E or C in phi.

    ``e_phi[(x, y)]`` holds the groups one of whose members can step from x
    to y; ``e_phi_plus`` is its per-group transitive closure.
    """
    groups = sorted({node.group for node in iter_subformulas(phi) if isinstance(node, (E, C))})
    chk = Checker(M)
    caps = dict(M.capabilities)
    e_phi = {(x, y): set() for x in M.worlds for y in M.worlds}
    e_plus = {(x, y): set() for x in M.worlds for y in M.worlds}
    for g in groups:
        one = chk._reach1(caps, g)
        plus = chk._reach_plus(caps, g)
        for x in M.worlds:
            for y in one[x]:
                e_phi[x, y].add(g)
            for y in plus[x]:
                e_plus[x, y].add(g)
    freeze = lambda d: {k: frozenset(v) for k, v in d.items()}
    return GroupClosure(freeze(e_phi), freeze(e_plus))


__all__ = ["Checker", "GroupClosure", "InvalidModel", "check", "group_closure",
           "quantifier_universe", "sorted_worlds", "subsets_in_order", "truth_set",
           "TOP", "BOT"]
