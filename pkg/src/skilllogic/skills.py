"""Skill values and the operations the semantics needs on them.

Three families are supported:

* classical: a frozenset of skill names,
* fuzzy: a :class:`FuzzySet` with exact rational memberships,
* lattice: a :class:`LatticeElement` of a user supplied :class:`FiniteLattice`.

``FULL`` is the distinguished "every skill" value.  It is only meant to be
used as an edge label (typically on the diagonal) and behaves as the top
element of whichever family it is combined with.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union


class SkillError(ValueError):
    """Raised on ill-formed skill values or mixed families."""


class UnsupportedOperation(SkillError):
    pass


class _Full:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "FULL"

    def __reduce__(self):
        return (_Full, ())


FULL = _Full()


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # go through repr so that 0.1 means one tenth, not the binary float
        return Fraction(repr(x))
    return Fraction(str(x))


@dataclass(frozen=True)
class FuzzySet:
    """Finite-support fuzzy set.  Only nonzero memberships are stored."""

    items: tuple[tuple[str, Fraction], ...] = ()

    @classmethod
    def from_mapping(cls, memberships: Mapping[str, object]) -> "FuzzySet":
        out = {}
        for skill, raw in memberships.items():
            mu = _as_fraction(raw)
            if mu < 0 or mu > 1:
                raise SkillError(f"membership of {skill!r} outside [0, 1]: {raw}")
            if mu:
                out[str(skill)] = mu
        return cls(tuple(sorted(out.items())))

    @classmethod
    def crisp(cls, skills: Iterable[str]) -> "FuzzySet":
        return cls(tuple(sorted((s, Fraction(1)) for s in set(skills))))

    def mu(self, skill: str) -> Fraction:
        for name, value in self.items:
            if name == skill:
                return value
        return Fraction(0)

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.items)

    def support(self) -> frozenset[str]:
        return frozenset(name for name, _ in self.items)

    def __repr__(self):
        inner = ", ".join(f"{k}: {v}" for k, v in self.items)
        return "FuzzySet({" + inner + "})"


class FiniteLattice:
    """A finite lattice given extensionally.

    ``order`` is the set of pairs (x, y) with x <= y.  Join and meet tables
    may be given; if absent they are derived from the order.  Construction
    validates everything and raises :class:`SkillError` on failure.
    """

    def __init__(self, elements: Iterable[str], order: Iterable[tuple[str, str]],
                 join: Mapping[tuple[str, str], str] | None = None,
                 meet: Mapping[tuple[str, str], str] | None = None):
        self.elements = tuple(dict.fromkeys(str(e) for e in elements))
        if not self.elements:
            raise SkillError("lattice needs at least one element")
        elems = set(self.elements)
        le = {(str(x), str(y)) for x, y in order}
        for x, y in le:
            if x not in elems or y not in elems:
                raise SkillError(f"order mentions unknown element in ({x}, {y})")
        le |= {(x, x) for x in elems}
        for x, y in le:
            if x != y and (y, x) in le:
                raise SkillError(f"order is not antisymmetric on {x}, {y}")
        # transitivity: reject instead of silently closing
        for x, y in le:
            for y2, z in le:
                if y == y2 and (x, z) not in le:
                    raise SkillError(f"order is not transitive: {x} <= {y} <= {z}")
        self._le = frozenset(le)

        self._join = self._table(join, upper=True)
        self._meet = self._table(meet, upper=False)
        tops = [x for x in self.elements if all((y, x) in le for y in elems)]
        bots = [x for x in self.elements if all((x, y) in le for y in elems)]
        self.top, self.bottom = tops[0], bots[0]

    def _bound(self, x: str, y: str, upper: bool) -> str:
        le = self._le
        if upper:
            cands = [z for z in self.elements if (x, z) in le and (y, z) in le]
            best = [z for z in cands if all((z, w) in le for w in cands)]
            kind = "join"
        else:
            cands = [z for z in self.elements if (z, x) in le and (z, y) in le]
            best = [z for z in cands if all((w, z) in le for w in cands)]
            kind = "meet"
        if len(best) != 1:
            raise SkillError(f"no {kind} for {x}, {y}: not a lattice")
        return best[0]

    def _table(self, given, upper: bool) -> dict[tuple[str, str], str]:
        table = {}
        for x in self.elements:
            for y in self.elements:
                table[x, y] = self._bound(x, y, upper)
        if given is not None:
            for (x, y), z in given.items():
                if table.get((str(x), str(y))) != str(z):
                    kind = "join" if upper else "meet"
                    raise SkillError(f"{kind} table disagrees with order at ({x}, {y})")
        return table

    @classmethod
    def from_json(cls, data: Mapping) -> "FiniteLattice":
        elements = data["elements"]
        pairs = data.get("leq_pairs", data.get("order", []))
        order = [tuple(p) for p in pairs]

        def tab(key):
            raw = data.get(key)
            if raw is None:
                return None
            return {(a, b): z for a, b, z in raw}

        lat = cls(elements, order, tab("join"), tab("meet"))
        for key in ("top", "bottom"):
            if key in data and data[key] != getattr(lat, key):
                raise SkillError(f"declared {key} {data[key]!r} is not the {key} of the order")
        return lat

    def leq(self, x: str, y: str) -> bool:
        return (x, y) in self._le

    def join(self, x: str, y: str) -> str:
        return self._join[x, y]

    def meet(self, x: str, y: str) -> str:
        return self._meet[x, y]

    def element(self, name: str) -> "LatticeElement":
        if name not in self._join and name not in self.elements:
            raise SkillError(f"{name!r} is not an element of the lattice")
        return LatticeElement(self, name)

    def to_json(self) -> dict:
        order = sorted((x, y) for x, y in self._le if x != y)
        return {"elements": list(self.elements), "leq_pairs": [list(p) for p in order],
                "top": self.top, "bottom": self.bottom}


@dataclass(frozen=True)
class LatticeElement:
    lattice: FiniteLattice
    name: str

    def __repr__(self):
        return f"LatticeElement({self.name})"


SkillValue = Union[frozenset, FuzzySet, LatticeElement, _Full]


def family_of(value: SkillValue) -> str | None:
    """Family name of a value; ``None`` for FULL, which fits every family."""
    if value is FULL:
        return None
    if isinstance(value, frozenset):
        return "classical"
    if isinstance(value, FuzzySet):
        return "fuzzy"
    if isinstance(value, LatticeElement):
        return "lattice"
    raise SkillError(f"not a skill value: {value!r}")


def bottom(family: str, lattice: FiniteLattice | None = None) -> SkillValue:
    if family == "classical":
        return frozenset()
    if family == "fuzzy":
        return FuzzySet()
    if family == "lattice":
        if lattice is None:
            raise SkillError("lattice family needs a lattice")
        return LatticeElement(lattice, lattice.bottom)
    raise SkillError(f"unknown family {family!r}")


def _check_pair(s: SkillValue, t: SkillValue) -> str | None:
    fs, ft = family_of(s), family_of(t)
    if fs and ft and fs != ft:
        raise SkillError(f"mixed skill families: {fs} and {ft}")
    if fs == ft == "lattice" and s.lattice is not t.lattice:
        raise SkillError("elements of different lattices")
    return fs or ft


def leq(s: SkillValue, t: SkillValue) -> bool:
    fam = _check_pair(s, t)
    if t is FULL:
        return True
    if s is FULL:
        if fam == "lattice":
            return t.name == t.lattice.top
        return False
    if fam == "classical":
        return s <= t
    if fam == "fuzzy":
        return all(mu <= t.mu(k) for k, mu in s.items)
    return s.lattice.leq(s.name, t.name)


def join(s: SkillValue, t: SkillValue) -> SkillValue:
    fam = _check_pair(s, t)
    if s is FULL or t is FULL:
        return FULL
    if fam == "classical":
        return s | t
    if fam == "fuzzy":
        out = s.as_dict()
        for k, mu in t.items:
            out[k] = max(out.get(k, Fraction(0)), mu)
        return FuzzySet(tuple(sorted(out.items())))
    return LatticeElement(s.lattice, s.lattice.join(s.name, t.name))


def meet(s: SkillValue, t: SkillValue) -> SkillValue:
    fam = _check_pair(s, t)
    if s is FULL:
        return t
    if t is FULL:
        return s
    if fam == "classical":
        return s & t
    if fam == "fuzzy":
        return FuzzySet.from_mapping({k: min(mu, t.mu(k)) for k, mu in s.items})
    return LatticeElement(s.lattice, s.lattice.meet(s.name, t.name))


def difference(s: SkillValue, t: SkillValue) -> SkillValue:
    """s minus t.  Undefined on lattices, which have no complement."""
    fam = _check_pair(s, t)
    if fam == "lattice":
        raise UnsupportedOperation("difference is not defined on a lattice; use meet")
    if s is FULL:
        raise UnsupportedOperation("cannot subtract from FULL: result is not finite")
    if t is FULL:
        return frozenset() if fam == "classical" else FuzzySet()
    if fam == "classical":
        return s - t
    return FuzzySet.from_mapping({k: min(mu, 1 - t.mu(k)) for k, mu in s.items})


def join_all(values: Iterable[SkillValue], family: str,
             lattice: FiniteLattice | None = None) -> SkillValue:
    acc = bottom(family, lattice)
    for v in values:
        acc = join(acc, v)
    return acc


def meet_all(values: Iterable[SkillValue]) -> SkillValue:
    """Meet of a nonempty collection."""
    it = iter(values)
    try:
        acc = next(it)
    except StopIteration:
        raise SkillError("meet of an empty collection") from None
    for v in it:
        acc = meet(acc, v)
    return acc


def skill_names(value: SkillValue) -> frozenset[str]:
    """Skill names mentioned by a value (support for fuzzy sets)."""
    if value is FULL or isinstance(value, LatticeElement):
        return frozenset()
    if isinstance(value, FuzzySet):
        return value.support()
    return value


def to_json(value: SkillValue):
    if value is FULL:
        return "full"
    if isinstance(value, frozenset):
        return sorted(value)
    if isinstance(value, FuzzySet):
        return {k: str(v) for k, v in value.items}
    return value.name


def from_json(raw, family: str, lattice: FiniteLattice | None = None) -> SkillValue:
    """Parse a JSON skill value.  The string ``"full"`` denotes FULL."""
    if raw == "full":
        return FULL
    if family == "classical":
        if not isinstance(raw, list):
            raise SkillError(f"classical skill set must be a list, got {raw!r}")
        return frozenset(str(s) for s in raw)
    if family == "fuzzy":
        if not isinstance(raw, dict):
            raise SkillError(f"fuzzy skill set must be an object, got {raw!r}")
        return FuzzySet.from_mapping(raw)
    if family == "lattice":
        if lattice is None:
            raise SkillError("lattice family needs a lattice")
        if not isinstance(raw, str):
            raise SkillError(f"lattice value must be an element name, got {raw!r}")
        return lattice.element(raw)
    raise SkillError(f"unknown family {family!r}")
