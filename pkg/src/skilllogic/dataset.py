"""Build weighted models from categorical attribute tables.

Two objects are linked by the attributes on which they agree, so an agent
whose capability lists some attributes cannot tell apart objects that agree
on all of them.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Mapping

from .model import ModelError, WeightedModel, validate
from .skills import FULL


@dataclass(frozen=True)
class AttributeTable:
    objects: tuple[str, ...]
    attributes: tuple[str, ...]
    cells: Mapping[tuple[str, str], str]

    def cell(self, obj: str, attr: str) -> str:
        return self.cells[obj, attr]


def read_csv(source) -> AttributeTable:
    """First column holds object ids, the header row names the attributes.

    ``source`` is a path or an open text stream.  Cells stay strings.
    """
    if isinstance(source, str):
        with open(source, newline="") as fh:
            return read_csv(io.StringIO(fh.read()))
    rows = [r for r in csv.reader(source) if r and any(c.strip() for c in r)]
    if len(rows) < 2:
        raise ModelError("table needs a header and at least one row")
    header = [h.strip() for h in rows[0]]
    attributes = tuple(header[1:])
    if not attributes:
        raise ModelError("table has no attribute columns")
    if len(set(attributes)) != len(attributes):
        raise ModelError("duplicate attribute names")
    objects, cells = [], {}
    for line, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ModelError(f"row {line} has {len(row)} cells, expected {len(header)}")
        obj = row[0].strip()
        if obj in objects:
            raise ModelError(f"duplicate object id {obj!r}")
        objects.append(obj)
        for attr, value in zip(attributes, row[1:]):
            cells[obj, attr] = value.strip()
    return AttributeTable(tuple(objects), attributes, cells)


def abstract_frame(t: AttributeTable, diagonal: str = "full") -> WeightedModel:
    """Edge between two objects = the attributes on which they agree.

    The diagonal is FULL by default; ``diagonal="attributes"`` labels it with
    the whole (finite) attribute set instead, as in a printed table.
    """
    if len(set(t.objects)) != len(t.objects):
        raise ModelError("duplicate object ids")
    edges = {}
    for i, x in enumerate(t.objects):
        for y in t.objects[i:]:
            if x == y:
                edges[x, y] = FULL if diagonal == "full" else frozenset(t.attributes)
            else:
                edges[x, y] = frozenset(a for a in t.attributes if t.cell(x, a) == t.cell(y, a))
    return WeightedModel.build(t.objects, edges, skills=t.attributes)


def overlay(frame: WeightedModel, capabilities: Mapping | None = None,
            valuation: Mapping | None = None) -> WeightedModel:
    attrs = set(frame.frame.skills)
    caps = {}
    for a, skills in (capabilities or {}).items():
        unknown = set(skills) - attrs
        if unknown:
            raise ModelError(f"capability of {a} uses unknown attributes {sorted(unknown)}")
        caps[a] = frozenset(skills)
    val = {}
    for w, props in (valuation or {}).items():
        if not frame.frame.has_world(w):
            raise ModelError(f"valuation mentions unknown object {w!r}")
        val[w] = frozenset(props)
    M = WeightedModel(frame.frame, caps, val)
    problems = validate(M)
    if problems:
        raise ModelError("; ".join(map(str, problems)))
    return M


def load_overlay(data: Mapping) -> tuple[dict, dict]:
    """Capability and valuation maps from a model-JSON fragment."""
    caps = data.get("capabilities", {})
    val = data.get("valuation", {})
    for a, v in caps.items():
        if not isinstance(v, list):
            raise ModelError(f"capability of {a} must be a list of attributes")
    return caps, val
