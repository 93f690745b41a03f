"""JSON shift specifications: parsing, validation and serialisation.

Two kinds are accepted::

    {"kind": "finite", "root": "a", "edges": [["a", "b"]], "weights": {"b": [0.5, 0.5]}}

    {"kind": "profile",
     "core": {"root": "0", "edges": [["0", "omega"]]},
     "stem": {"prefix": [], "tail_modulus": 1.0},
     "rays": [{"name": "", "attach": "0", "prefix": [], "tail_modulus": 1.0}],
     "weights": {"0": 1.0, "omega": 0}}

A weight is either ``[re, im]`` or a bare nonnegative number (a modulus).
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from .errors import DomainError, SpecError
from .shift import Tail, WeightedShift, WeightFamily
from .tree import FiniteTree, TreeProfile, VertexId

_WEIGHT = {
    "oneOf": [
        {"type": "number", "minimum": 0},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_TAIL = {
    "type": "object",
    "properties": {
        "prefix": {"type": "array", "items": _WEIGHT},
        "tail_modulus": {"type": "number", "minimum": 0},
    },
    "required": ["tail_modulus"],
    "additionalProperties": False,
}
_EDGES = {"type": "array", "items": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2}}
_TREE = {
    "type": "object",
    "properties": {
        "root": {"type": "string", "minLength": 1},
        "vertices": {"type": "array", "items": {"type": "string", "minLength": 1}},
        "edges": _EDGES,
    },
    "required": ["root"],
}
_META = {"name": {"type": "string"}, "description": {"type": "string"}}

SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "kind": {"const": "finite"},
                **_TREE["properties"],
                "weights": {"type": "object", "additionalProperties": _WEIGHT},
                **_META,
            },
            "required": ["kind", "root", "weights"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "profile"},
                "core": {**_TREE, "additionalProperties": False},
                "stem": {"oneOf": [{"type": "null"}, _TAIL]},
                "rays": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "name": {"type": "string"},
                            "attach": {"type": "string"},
                            **_TAIL["properties"],
                        },
                        "required": ["name", "attach", "tail_modulus"],
                        "additionalProperties": False,
                    },
                },
                "weights": {"type": "object", "additionalProperties": _WEIGHT},
                **_META,
            },
            "required": ["kind", "core", "weights"],
            "additionalProperties": False,
        },
    ]
}


def _weight(x) -> complex:
    if isinstance(x, list):
        return complex(x[0], x[1])
    return complex(x)


def _finite_tree(doc: dict) -> FiniteTree:
    edges = doc.get("edges", [])
    verts = set(doc.get("vertices", [])) | {doc["root"]} | {a for a, _ in edges} | {b for _, b in edges}
    pmap = {}
    for a, b in edges:
        if b in pmap:
            raise SpecError(f"edges: vertex {b!r} has two parents")
        pmap[b] = a
    try:
        return FiniteTree(verts, pmap, doc["root"])
    except DomainError as exc:
        raise SpecError(f"tree: {exc}") from exc


def _explicit_weights(doc: dict, tree, root_name: str | None) -> dict[VertexId, complex]:
    out = {}
    for name, x in doc["weights"].items():
        if name == root_name:
            raise SpecError(f"weights.{name}: the root carries no weight")
        v = VertexId.core(name)
        if not tree.contains(v):
            raise SpecError(f"weights.{name}: unknown vertex")
        out[v] = _weight(x)
    return out


def _tail(doc: dict) -> Tail:
    return Tail(tuple(_weight(x) for x in doc.get("prefix", [])), doc["tail_modulus"])


def load_spec(doc: dict) -> WeightedShift:
    """Build a shift from an already decoded specification document."""
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = ".".join(str(p) for p in exc.absolute_path) or "<document>"
        raise SpecError(f"schema violation at {where}: {exc.message}") from None
    try:
        if doc["kind"] == "finite":
            tree = _finite_tree(doc)
            return WeightedShift(tree, _explicit_weights(doc, tree, str(tree.root)))
        core = _finite_tree(doc["core"])
        stem = doc.get("stem")
        profile = TreeProfile(core, stem=stem is not None, rays=[(r["attach"], r["name"]) for r in doc.get("rays", [])])
        root_name = None if stem is not None else str(core.root)
        explicit = _explicit_weights(doc, core, root_name)
        family = WeightFamily(
            explicit,
            _tail(stem) if stem is not None else None,
            {r["name"]: _tail(r) for r in doc.get("rays", [])},
        )
        return WeightedShift(profile, family)
    except DomainError as exc:
        raise SpecError(str(exc)) from exc


def parse_spec(path) -> WeightedShift:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecError(f"{path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        return load_spec(doc)
    except SpecError as exc:
        raise SpecError(f"{path}: {exc}") from exc


def _dump_weight(x: complex):
    if x.imag == 0 and x.real >= 0:
        return x.real
    return [x.real, x.imag]


def _dump_tail(t: Tail) -> dict:
    return {"prefix": [_dump_weight(x) for x in t.prefix], "tail_modulus": t.tail_modulus}


def _dump_tree(tree: FiniteTree) -> dict:
    return {
        "root": str(tree.root),
        "vertices": [str(v) for v in tree.vertices],
        "edges": [[str(a), str(b)] for a, b in tree.edges()],
    }


def serialize(shift: WeightedShift) -> dict:
    weights = {str(v): _dump_weight(x) for v, x in sorted(shift.weights.explicit.items())}
    if isinstance(shift.tree, FiniteTree):
        return {"kind": "finite", **_dump_tree(shift.tree), "weights": weights}
    tree = shift.tree
    return {
        "kind": "profile",
        "core": _dump_tree(tree.core),
        "stem": _dump_tail(shift.weights.stem) if tree.stem else None,
        "rays": [
            {"name": name, "attach": str(attach), **_dump_tail(shift.weights.rays[name])}
            for attach, name in sorted(tree.rays, key=lambda r: r[1])
        ],
        "weights": weights,
    }


def bundled_specs() -> list[Path]:
    """The example corpus shipped with the package."""
    return sorted((Path(__file__).parent / "data").glob("*.json"))
