"""Relational (Kripke) semantics, including PDL-style programs.

Used as the target side of the rewritings: classical K/D/E/C/U evaluation
with per-agent relations, S5 checks, and CPDL boxes over programs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .syntax import (And, Atom, Bot, C, D, E, Formula, Iff, Implies, K, Not, Or, Top, Univ,
                     iter_subformulas)


class KripkeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class KripkeModel:
    worlds: tuple[str, ...]
    relations: Mapping[str, frozenset] = field(default_factory=dict)
    valuation: Mapping[str, frozenset] = field(default_factory=dict)

    @classmethod
    def build(cls, worlds, relations: Mapping[str, Iterable] | None = None, valuation=None):
        worlds = tuple(dict.fromkeys(worlds))
        if not worlds:
            raise KripkeError("a model needs at least one world")
        known = set(worlds)
        rels = {}
        for a, pairs in (relations or {}).items():
            rel = frozenset((str(x), str(y)) for x, y in pairs)
            for x, y in rel:
                if x not in known or y not in known:
                    raise KripkeError(f"relation of {a} mentions an unknown world")
            rels[str(a)] = rel
        val = {w: frozenset(ps) for w, ps in (valuation or {}).items()}
        return cls(worlds, rels, val)

    def relation(self, a: str) -> frozenset:
        return self.relations.get(a, frozenset())

    def props_at(self, w: str) -> frozenset:
        return self.valuation.get(w, frozenset())

    def to_json(self) -> dict:
        index = {w: i for i, w in enumerate(self.worlds)}
        return {
            "worlds": list(self.worlds),
            "relations": {a: sorted([list(p) for p in rel], key=lambda p: (index[p[0]], index[p[1]]))
                          for a, rel in sorted(self.relations.items())},
            "valuation": {w: sorted(self.props_at(w)) for w in self.worlds},
        }

    @classmethod
    def from_json(cls, data) -> "KripkeModel":
        return cls.build(data["worlds"], data.get("relations", {}), data.get("valuation", {}))

    @classmethod
    def load(cls, path: str) -> "KripkeModel":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def is_equivalence(worlds: Iterable[str], rel: frozenset) -> bool:
    worlds = tuple(worlds)
    if any((w, w) not in rel for w in worlds):
        return False
    if any((y, x) not in rel for x, y in rel):
        return False
    succ = _succ(worlds, rel)
    return all(succ[y] <= succ[x] for x, y in rel)


def reflexive_transitive_closure(worlds: Iterable[str], rel: frozenset) -> frozenset:
    worlds = tuple(worlds)
    succ = {w: {w} | set(s) for w, s in _succ(worlds, rel).items()}
    for k in worlds:  # Warshall
        for i in worlds:
            if k in succ[i]:
                succ[i] |= succ[k]
    return frozenset((x, y) for x in worlds for y in succ[x])


def _succ(worlds, rel) -> dict[str, frozenset]:
    out: dict[str, set] = {w: set() for w in worlds}
    for x, y in rel:
        out[x].add(y)
    return {w: frozenset(s) for w, s in out.items()}


# ---------------------------------------------------------------- programs

class Program:
    __slots__ = ()


@dataclass(frozen=True)
class Atomic(Program):
    agent: str

    def __str__(self):
        return self.agent


@dataclass(frozen=True)
class Seq(Program):
    first: Program
    second: Program

    def __str__(self):
        return f"({self.first};{self.second})"


@dataclass(frozen=True)
class Union(Program):
    left: Program
    right: Program

    def __str__(self):
        return f"({self.left}+{self.right})"


@dataclass(frozen=True)
class Star(Program):
    body: Program

    def __str__(self):
        return f"{self.body}*"


@dataclass(frozen=True)
class Test(Program):
    formula: Formula

    def __str__(self):
        return f"?{self.formula}"


@dataclass(frozen=True)
class Universe(Program):
    def __str__(self):
        return "univ"


def program_length(pi: Program, formula_length=None) -> int:
    if isinstance(pi, (Atomic, Universe)):
        return 1
    if isinstance(pi, (Seq, Union)):
        a = pi.first if isinstance(pi, Seq) else pi.left
        b = pi.second if isinstance(pi, Seq) else pi.right
        return program_length(a, formula_length) + program_length(b, formula_length) + 3
    if isinstance(pi, Star):
        return program_length(pi.body, formula_length) + 1
    if isinstance(pi, Test):
        from .syntax import length
        return (formula_length or length)(pi.formula) + 1
    raise TypeError(pi)


def union_of(agents: Iterable[str]) -> Program:
    progs = [Atomic(a) for a in agents]
    if not progs:
        raise KripkeError("union of no programs")
    out = progs[0]
    for p in progs[1:]:
        out = Union(out, p)
    return out


class Box(Formula):
    """``[pi] phi``."""

    __slots__ = ()
    _fields = ("program", "sub")

    @classmethod
    def _normalize(cls, program, sub):
        if not isinstance(program, Program) or not isinstance(sub, Formula):
            raise TypeError("Box takes a program and a formula")
        return (program, sub)

    def children(self):
        tests = [p.formula for p in _walk(self.program) if isinstance(p, Test)]
        return tuple(tests) + (self.sub,)

    @property
    def named_agents(self):
        return tuple(sorted({p.agent for p in _walk(self.program) if isinstance(p, Atomic)}))

    def emit(self, out, emit):
        out.append(f"[{self.program}]")
        emit(self.sub, out)

    def local_length(self, memo):
        from .syntax import length
        return program_length(self.program, length) + memo[self.sub] + 2


def _walk(pi: Program):
    yield pi
    for attr in ("first", "second", "left", "right", "body"):
        child = getattr(pi, attr, None)
        if isinstance(child, Program):
            yield from _walk(child)


# ---------------------------------------------------------------- evaluation

SEMANTICS = ("K", "KB1", "KDn", "S5C2", "KU2", "CPDL")


class _Evaluator:
    def __init__(self, N: KripkeModel):
        self.N = N
        self.W = frozenset(N.worlds)
        self.memo: dict = {}
        self.prog_memo: dict = {}

    def succ(self, rel) -> dict:
        return _succ(self.N.worlds, rel)

    def box(self, rel, val):
        s = self.succ(rel)
        return frozenset(x for x in self.N.worlds if s[x] <= val)

    def program(self, pi: Program) -> frozenset:
        hit = self.prog_memo.get(pi)
        if hit is not None:
            return hit
        ws = self.N.worlds
        if isinstance(pi, Atomic):
            out = self.N.relation(pi.agent)
        elif isinstance(pi, Universe):
            out = frozenset((x, y) for x in ws for y in ws)
        elif isinstance(pi, Union):
            out = self.program(pi.left) | self.program(pi.right)
        elif isinstance(pi, Seq):
            second = self.succ(self.program(pi.second))
            out = frozenset((x, z) for x, y in self.program(pi.first) for z in second[y])
        elif isinstance(pi, Star):
            out = reflexive_transitive_closure(ws, self.program(pi.body))
        elif isinstance(pi, Test):
            val = self.eval(pi.formula)
            out = frozenset((x, x) for x in val)
        else:
            raise TypeError(pi)
        self.prog_memo[pi] = out
        return out

    def eval(self, phi: Formula) -> frozenset:
        hit = self.memo.get(phi)
        if hit is not None:
            return hit
        out = self._compute(phi)
        self.memo[phi] = out
        return out

    def _compute(self, phi) -> frozenset:
        t = type(phi)
        W = self.W
        N = self.N
        if t is Atom:
            return frozenset(w for w in N.worlds if phi.name in N.props_at(w))
        if t is Top:
            return W
        if t is Bot:
            return frozenset()
        if t is Not:
            return W - self.eval(phi.sub)
        if t is And:
            return self.eval(phi.left) & self.eval(phi.right)
        if t is Or:
            return self.eval(phi.left) | self.eval(phi.right)
        if t is Implies:
            return (W - self.eval(phi.left)) | self.eval(phi.right)
        if t is Iff:
            a, b = self.eval(phi.left), self.eval(phi.right)
            return (a & b) | (W - a - b)
        if t is K:
            return self.box(N.relation(phi.agent), self.eval(phi.sub))
        if t is D:
            rel = None
            for a in phi.group:
                rel = N.relation(a) if rel is None else rel & N.relation(a)
            return self.box(rel, self.eval(phi.sub))
        if t is E:
            rel = frozenset().union(*(N.relation(a) for a in phi.group))
            return self.box(rel, self.eval(phi.sub))
        if t is C:
            one = frozenset().union(*(N.relation(a) for a in phi.group))
            plus = _transitive_closure(N.worlds, one)
            return self.box(plus, self.eval(phi.sub))
        if t is Univ:
            return W if self.eval(phi.sub) == W else frozenset()
        if t is Box:
            return self.box(self.program(phi.program), self.eval(phi.sub))
        raise KripkeError(f"{t.__name__} has no relational semantics here")


def _transitive_closure(worlds, rel) -> frozenset:
    succ = {w: set(s) for w, s in _succ(worlds, rel).items()}
    for k in worlds:
        for i in worlds:
            if k in succ[i]:
                succ[i] |= succ[k]
    return frozenset((x, y) for x in worlds for y in succ[x])


def _check_frame(N: KripkeModel, phi: Formula, semantics: str) -> None:
    if semantics not in SEMANTICS:
        raise KripkeError(f"unknown semantics {semantics!r}")
    if semantics in ("S5C2", "KB1"):
        agents = set(N.relations)
        for node in iter_subformulas(phi):
            agents.update(getattr(node, "group", None) or ())
            if isinstance(node, K):
                agents.add(node.agent)
        for a in sorted(agents):
            rel = N.relation(a)
            if semantics == "S5C2" and not is_equivalence(N.worlds, rel):
                raise KripkeError(f"relation of {a} is not an equivalence relation")
            if semantics == "KB1" and any((y, x) not in rel for x, y in rel):
                raise KripkeError(f"relation of {a} is not symmetric")


def kripke_truth_set(N: KripkeModel, phi: Formula, semantics: str = "K") -> frozenset:
    _check_frame(N, phi, semantics)
    return _Evaluator(N).eval(phi)


def kripke_check(N: KripkeModel, w: str, phi: Formula, semantics: str = "K") -> bool:
    if w not in N.worlds:
        raise KripkeError(f"unknown world {w!r}")
    return w in kripke_truth_set(N, phi, semantics)


def cpdl_check(N: KripkeModel, w: str, phi: Formula) -> bool:
    return kripke_check(N, w, phi, "CPDL")
