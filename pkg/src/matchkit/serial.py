"""JSON encodings for groups, towers, subspaces and reports."""

from __future__ import annotations

import json
from typing import Any

from .abelian import GroupSpec, GroupSubset
from .errors import StructuralError
from .gfq import FieldTower
from .subspace import Subspace, VectorSpace

SCHEMA_VERSION = "matchkit.report/1"


def loads_maybe(value):
    """Accept native JSON values or their string encodings."""
    if isinstance(value, str):
        value = value.strip()
        if value.startswith("[") or value.startswith("{"):
            return json.loads(value)
    return value


def group_from_json(data) -> GroupSpec:
    data = loads_maybe(data)
    if isinstance(data, dict):
        data = data.get("factors")
    if isinstance(data, int):
        data = [data]
    if isinstance(data, str):
        data = [int(x) for x in data.replace("x", ",").split(",") if x.strip()]
    if not isinstance(data, list):
        raise StructuralError("group must be {'factors': [d1, ...]}")
    return GroupSpec(tuple(data))


def subset_from_json(group: GroupSpec, data) -> GroupSubset:
    data = loads_maybe(data)
    if isinstance(data, str):
        items = [x for x in data.split(",") if x.strip()]
        data = [[int(c) for c in x.split(":")] for x in items]
    if not isinstance(data, list):
        raise StructuralError("subset must be a list of elements")
    return GroupSubset.of(group, data)


def tower_from_json(data) -> FieldTower:
    data = loads_maybe(data)
    if "q" in data and "p" not in data:
        t = FieldTower.from_q(int(data["q"]), int(data["n"]))
    else:
        t = FieldTower(int(data["p"]), int(data.get("r", 1)), int(data["n"]))
    for key, ours in (("base_modulus", t.base_modulus), ("top_modulus", t.top_modulus)):
        if key in data and tuple(data[key]) != tuple(ours):
            raise StructuralError(f"{key} {data[key]} differs from the canonical {list(ours)}")
    return t


def space_to_json(space) -> dict:
    if isinstance(space, FieldTower):
        return space.to_dict()
    return {"q": space.q, "n": space.n}


def vector_from_json(space, data) -> tuple:
    if isinstance(space, FieldTower):
        return space.element_from_json(data)
    if isinstance(data, int):
        if not 0 <= data < space.q**space.n:
            raise StructuralError(f"vector code {data} out of range")
        return space.from_code(data)
    if len(data) != space.n or any(not 0 <= int(c) < space.q for c in data):
        raise StructuralError(f"{data} is not a vector of F_{space.q}^{space.n}")
    return tuple(int(c) for c in data)


def vector_to_json(space, v) -> list:
    if isinstance(space, FieldTower):
        return space.element_to_json(v)
    return [int(c) for c in v]


def span_from_json(space, data) -> Subspace:
    """A subspace from any spanning list of vectors."""
    data = loads_maybe(data)
    if isinstance(data, dict):
        data = data["basis"]
    return Subspace.from_rows(space, [vector_from_json(space, v) for v in data])


def subspace_from_json(space, data) -> Subspace:
    """Strict form: {"basis": rows} must already be in RREF."""
    data = loads_maybe(data)
    rows = [vector_from_json(space, v) for v in data["basis"]]
    s = Subspace.from_rows(space, rows)
    if not s.is_rref(rows):
        raise StructuralError(
            "basis is not in reduced row echelon form",
            suggestion={"basis": [vector_to_json(space, r) for r in s.basis]},
        )
    return s


def subspace_to_json(s: Subspace) -> dict:
    return {"basis": [vector_to_json(s.space, r) for r in s.basis]}


def dumps(obj: Any) -> str:
    """Stable JSON text: fixed key order from construction, newline-terminated."""
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"
