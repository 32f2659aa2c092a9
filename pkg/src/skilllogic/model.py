"""Weighted models: worlds, skill-labelled edges, capabilities and a valuation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from . import skills as sk
from .skills import FULL, FiniteLattice, SkillValue


class ModelError(ValueError):
    pass


def pair(w: str, u: str) -> frozenset:
    return frozenset((w, u))


class Frame:
    """Worlds and the symmetric edge function.

    Accessibility sets are cached per capability value, so models that share
    a frame (all capability overlays of one model) share that work.
    """

    def __init__(self, worlds: Iterable[str], edges: Mapping[frozenset, SkillValue],
                 family: str = "classical", lattice: FiniteLattice | None = None,
                 skills: Iterable[str] | None = None):
        self.worlds = tuple(dict.fromkeys(worlds))
        if not self.worlds:
            raise ModelError("a model needs at least one world")
        self.family = family
        self.lattice = lattice
        if family == "lattice" and lattice is None:
            raise ModelError("lattice family needs a lattice")
        self.edges = dict(edges)
        if skills is None:
            names = set()
            for v in self.edges.values():
                names |= sk.skill_names(v)
            skills = sorted(names)
        self.skills = tuple(dict.fromkeys(skills))
        self.bottom = sk.bottom(family, lattice)
        self._index = {w: i for i, w in enumerate(self.worlds)}
        self._succ: dict = {}
        self.valid: bool | None = None

    def has_world(self, w: str) -> bool:
        return w in self._index

    def edge(self, w: str, u: str) -> SkillValue:
        value = self.edges.get(pair(w, u))
        if value is None:
            return FULL if w == u else self.bottom
        return value

    def successors(self, cap: SkillValue) -> dict[str, frozenset]:
        succ = self._succ.get(cap)
        if succ is None:
            succ = {w: frozenset(u for u in self.worlds if sk.leq(cap, self.edge(w, u)))
                    for w in self.worlds}
            self._succ[cap] = succ
        return succ


@dataclass(frozen=True, eq=False)
class WeightedModel:
    frame: Frame
    capabilities: Mapping[str, SkillValue] = field(default_factory=dict)
    valuation: Mapping[str, frozenset] = field(default_factory=dict)

    @classmethod
    def build(cls, worlds, edges: Mapping[tuple, SkillValue] | Iterable, capabilities=None,
              valuation=None, family="classical", lattice=None, skills=None):
        """Convenience constructor taking edges keyed by (w, u) tuples.

        Both orientations may be given but must agree.
        """
        if isinstance(edges, Mapping):
            edges = edges.items()
        table: dict[frozenset, SkillValue] = {}
        for (w, u), v in edges:
            key = pair(w, u)
            if key in table and table[key] != v:
                raise ModelError(f"asymmetric edge between {w} and {u}")
            table[key] = v
        frame = Frame(worlds, table, family, lattice, skills)
        val = {w: frozenset(ps) for w, ps in (valuation or {}).items()}
        return cls(frame, dict(capabilities or {}), val)

    @property
    def worlds(self) -> tuple[str, ...]:
        return self.frame.worlds

    @property
    def family(self) -> str:
        return self.frame.family

    def edge(self, w: str, u: str) -> SkillValue:
        return self.frame.edge(w, u)

    def capability(self, agent: str) -> SkillValue:
        return self.capabilities.get(agent, self.frame.bottom)

    def props_at(self, w: str) -> frozenset:
        return self.valuation.get(w, frozenset())

    def with_capabilities(self, caps: Mapping[str, SkillValue]) -> "WeightedModel":
        return WeightedModel(self.frame, dict(caps), self.valuation)

    def skill_value(self, names: Iterable[str]) -> SkillValue:
        """The value a finite skill list from a formula denotes in this family.

        Classical: the set itself.  Fuzzy: the crisp set.  Lattice: exactly
        one element name, or the bottom for an empty list.
        """
        names = tuple(names)
        if self.family == "classical":
            return frozenset(names)
        if self.family == "fuzzy":
            return sk.FuzzySet.crisp(names)
        if not names:
            return self.frame.bottom
        if len(names) != 1:
            raise sk.SkillError("a lattice update names exactly one element")
        return self.frame.lattice.element(names[0])


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


def validate(M: WeightedModel) -> list[Violation]:
    out: list[Violation] = []
    fr = M.frame
    declared = set(fr.skills)
    lattice_top = fr.lattice.top if fr.family == "lattice" else None

    def check_value(where: str, v: SkillValue):
        fam = sk.family_of(v)
        if fam is not None and fam != fr.family:
            out.append(Violation("family", f"{where} is {fam}, model is {fr.family}"))
            return
        if fam == "lattice" and v.lattice is not fr.lattice:
            out.append(Violation("family", f"{where} belongs to another lattice"))
            return
        extra = sk.skill_names(v) - declared
        if extra:
            out.append(Violation("domain", f"{where} uses undeclared skills {sorted(extra)}"))

    for key, v in sorted(fr.edges.items(), key=lambda kv: sorted(kv[0])):
        ends = sorted(key)
        w, u = ends[0], ends[-1]
        for x in ends:
            if not fr.has_world(x):
                out.append(Violation("domain", f"edge mentions unknown world {x!r}"))
        check_value(f"E({w},{u})", v)
        if w != u:
            top = v is FULL or (lattice_top is not None and isinstance(v, sk.LatticeElement)
                                and v.name == lattice_top)
            if top:
                out.append(Violation("positivity", f"E({w},{u}) is the full skill set"))
    for a, v in sorted(M.capabilities.items()):
        if v is FULL:
            out.append(Violation("domain", f"capability of {a} is FULL"))
        else:
            check_value(f"C({a})", v)
    for w in sorted(M.valuation):
        if not fr.has_world(w):
            out.append(Violation("domain", f"valuation mentions unknown world {w!r}"))
    return out


@dataclass(frozen=True)
class CapabilityUpdate:
    kind: str  # union | minus | assign | learn
    agent: str
    operand: object  # SkillValue, or the source agent for learn


def apply_update(M: WeightedModel, u: CapabilityUpdate) -> WeightedModel:
    caps = dict(M.capabilities)
    cur = M.capability(u.agent)
    if u.kind == "learn":
        caps[u.agent] = M.capability(u.operand)
    elif u.kind == "union":
        caps[u.agent] = sk.join(cur, u.operand)
    elif u.kind == "minus":
        if M.family == "lattice":
            caps[u.agent] = sk.meet(cur, u.operand)
        else:
            caps[u.agent] = sk.difference(cur, u.operand)
    elif u.kind == "assign":
        caps[u.agent] = u.operand
    else:
        raise ValueError(f"unknown update kind {u.kind!r}")
    return M.with_capabilities(caps)


def _known(M: WeightedModel, w: str) -> None:
    if not M.frame.has_world(w):
        raise ModelError(f"unknown world {w!r}")


def accessible(M: WeightedModel, a: str, w: str) -> frozenset:
    _known(M, w)
    return M.frame.successors(M.capability(a))[w]


def group_reachable(M: WeightedModel, G: Iterable[str], w: str) -> frozenset:
    """Worlds reachable from w by a G-path of one or more steps."""
    G = tuple(G)
    if not G:
        raise ModelError("empty group")
    _known(M, w)
    succs = [M.frame.successors(M.capability(a)) for a in G]
    seen: set[str] = set()
    frontier = [w]
    while frontier:
        x = frontier.pop()
        for s in succs:
            for y in s[x]:
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
    return frozenset(seen)


# ---------------------------------------------------------------- JSON

def _value_from_json(raw, family: str, lattice):
    if family == "fuzzy" and isinstance(raw, list):
        entries = {}
        for item in raw:
            if isinstance(item, dict):
                entries[item["skill"]] = item["mu"]
            else:
                entries[item] = "1"
        return sk.FuzzySet.from_mapping(entries)
    return sk.from_json(raw, family, lattice)


def _value_to_json(v: SkillValue, family: str):
    if family == "fuzzy" and isinstance(v, sk.FuzzySet):
        return [{"skill": k, "mu": str(mu)} for k, mu in v.items]
    return sk.to_json(v)


def load_model(data: Mapping, base_dir: str | None = None) -> WeightedModel:
    fam_raw = data.get("family", "classical")
    lattice = None
    if isinstance(fam_raw, dict):
        lat = fam_raw.get("lattice")
        if isinstance(lat, str):
            import os
            path = lat if base_dir is None else os.path.join(base_dir, lat)
            with open(path) as fh:
                lat = json.load(fh)
        lattice = FiniteLattice.from_json(lat)
        family = "lattice"
    else:
        family = fam_raw
    if family not in ("classical", "fuzzy", "lattice"):
        raise ModelError(f"unknown family {family!r}")
    worlds = [str(w) for w in data["worlds"]]
    edges = []
    for entry in data.get("edges", []):
        w, u = entry["between"]
        if entry.get("full"):
            value = FULL
        elif "skills" in entry:
            value = _value_from_json(entry["skills"], family, lattice)
        else:
            value = _value_from_json(entry.get("value"), family, lattice)
        edges.append(((str(w), str(u)), value))
    caps = {a: _value_from_json(v, family, lattice)
            for a, v in data.get("capabilities", {}).items()}
    if "skills" in data:
        declared = [str(s) for s in data["skills"]]
    else:
        declared = None
    return WeightedModel.build(worlds, edges, caps, data.get("valuation", {}),
                               family, lattice, declared)


def load_model_file(path: str) -> WeightedModel:
    import os
    with open(path) as fh:
        data = json.load(fh)
    return load_model(data, os.path.dirname(os.path.abspath(path)))


def model_to_json(M: WeightedModel) -> dict:
    fr = M.frame
    index = {w: i for i, w in enumerate(fr.worlds)}
    edges = []
    for key, v in fr.edges.items():
        w, u = sorted(key, key=index.get) if len(key) == 2 else (next(iter(key)),) * 2
        entry: dict = {"between": [w, u]}
        if v is FULL:
            entry["full"] = True
        else:
            entry["skills"] = _value_to_json(v, fr.family)
        edges.append((index[w], index[u], entry))
    edges.sort(key=lambda t: (t[0], t[1]))
    family = fr.family if fr.family != "lattice" else {"lattice": fr.lattice.to_json()}
    return {
        "skills": list(fr.skills),
        "worlds": list(fr.worlds),
        "family": family,
        "edges": [e for _, _, e in edges],
        "capabilities": {a: _value_to_json(v, fr.family) for a, v in sorted(M.capabilities.items())},
        "valuation": {w: sorted(M.props_at(w)) for w in fr.worlds},
    }


def dumps_model(M: WeightedModel) -> str:
    """Model JSON with one line per edge, capability and world."""
    data = model_to_json(M)
    lines = ["{"]
    for i, (key, value) in enumerate(data.items()):
        comma = "," if i < len(data) - 1 else ""
        if isinstance(value, list) and value and isinstance(value[0], dict):
            inner = ",\n".join("    " + json.dumps(v) for v in value)
            lines.append(f'  "{key}": [\n{inner}\n  ]{comma}')
        elif isinstance(value, dict) and value and key != "family":
            inner = ",\n".join(f"    {json.dumps(k)}: {json.dumps(v)}" for k, v in value.items())
            lines.append(f'  "{key}": {{\n{inner}\n  }}{comma}')
        else:
            lines.append(f'  "{key}": {json.dumps(value)}{comma}')
    lines.append("}")
    return "\n".join(lines) + "\n"
