"""Canonical JSON instance files.

Rationals travel as "p/q" strings in lowest terms (JSON numbers are floats,
which would destroy exactness), keys are sorted, and loading then saving a
canonical file is the identity byte for byte.  The optional ``structure``
member carries an initial coalition structure, and ``meta`` is free-form
data such as the generating family and its parameters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .dynamics import Coalition, CoalitionStructure, validate_structure
from .space import (
    Agent,
    DeliberationSpace,
    Kind,
    Point,
    SpaceError,
    euclidean_point,
    grid_point,
    hypercube_point,
)

FORMAT_VERSION = 1

_KIND_TAGS = {
    "hypercube": (Kind.HYPERCUBE, False),
    "euclidean": (Kind.EUCLIDEAN, False),
    "grid": (Kind.GRID, False),
    "grid_nonneg": (Kind.GRID, True),
}


class InstanceFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Instance:
    space: DeliberationSpace
    structure: CoalitionStructure | None = None
    meta: dict | None = None


def _kind_tag(space: DeliberationSpace) -> str:
    if space.kind is Kind.GRID and space.grid_nonneg:
        return "grid_nonneg"
    return space.kind.value


def coords_document(p: Point):
    """JSON-ready coordinate list in the file schema's conventions."""
    if p.kind is Kind.HYPERCUBE:
        return list(p.coords())
    if p.kind is Kind.EUCLIDEAN:
        return [str(c) for c in p.data]
    return list(p.data)


def _point_in(kind: Kind, coords, dim: int) -> Point:
    try:
        if kind is Kind.HYPERCUBE:
            return hypercube_point([int(c) for c in coords])
        if kind is Kind.EUCLIDEAN:
            return euclidean_point([Fraction(c) for c in coords])
        return grid_point(int(coords[0]), int(coords[1]))
    except (ValueError, TypeError, IndexError, ZeroDivisionError, SpaceError) as exc:
        raise InstanceFormatError(f"bad coordinates {coords!r}: {exc}") from exc


def to_document(inst: Instance) -> dict:
    space = inst.space
    doc = {
        "version": FORMAT_VERSION,
        "kind": _kind_tag(space),
        "d": space.dim,
        "agents": [
            {"coords": coords_document(a.position), "weight": str(a.weight)} for a in space.agents
        ],
    }
    if inst.structure is not None:
        doc["structure"] = [
            {"proposal": coords_document(c.proposal), "members": sorted(c.members)}
            for c in inst.structure.coalitions
        ]
    if inst.meta:
        doc["meta"] = inst.meta
    return doc


def from_document(doc: dict) -> Instance:
    try:
        kind_tag = doc["kind"]
        dim = int(doc["d"])
        agents_doc = doc["agents"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceFormatError(f"missing or malformed field: {exc}") from exc
    if doc.get("version") != FORMAT_VERSION:
        raise InstanceFormatError(f"unsupported format version {doc.get('version')!r}")
    if kind_tag not in _KIND_TAGS:
        raise InstanceFormatError(f"unknown kind {kind_tag!r}")
    kind, nonneg = _KIND_TAGS[kind_tag]
    agents = []
    for a in agents_doc:
        try:
            weight = Fraction(a.get("weight", "1"))
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceFormatError(f"bad weight {a.get('weight')!r}") from exc
        pos = _point_in(kind, a["coords"], dim)
        if pos.dim != dim:
            raise InstanceFormatError("agent dimension disagrees with the header")
        try:
            agents.append(Agent(pos, weight))
        except SpaceError as exc:
            raise InstanceFormatError(str(exc)) from exc
    try:
        space = DeliberationSpace(kind, dim, tuple(agents), grid_nonneg=nonneg)
    except SpaceError as exc:
        raise InstanceFormatError(str(exc)) from exc
    structure = None
    if "structure" in doc:
        coalitions = []
        for c in doc["structure"]:
            proposal = _point_in(kind, c["proposal"], dim)
            coalitions.append(Coalition(frozenset(int(i) for i in c["members"]), proposal))
        structure = CoalitionStructure(tuple(coalitions))
        try:
            validate_structure(space, structure)
        except Exception as exc:
            raise InstanceFormatError(f"invalid stored structure: {exc}") from exc
    return Instance(space, structure, doc.get("meta"))


def dumps(inst: Instance) -> str:
    return json.dumps(to_document(inst), sort_keys=True, indent=2) + "\n"


def loads(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InstanceFormatError("instance file must hold a JSON object")
    return from_document(doc)


def save(inst: Instance, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(inst))


def load(path: str) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())
