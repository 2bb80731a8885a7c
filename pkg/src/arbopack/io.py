"""JSON instance and packing documents.

Instance::

    {"vertices": ["a", "b"], "edges": [["a", "b"]], "arcs": [["a", "b"]],
     "k": 2, "f": {"a": 2}, "g": {"a": 2, "b": 0}}

Repeated pairs are parallel copies; their position is their index.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

from .core import MixedGraph, RootBounds
from .errors import InputError
from .pack import Packing


def read_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None


def dumps(doc: Any) -> str:
    """Canonical serialization: sorted keys, fixed indentation."""
    return json.dumps(doc, sort_keys=True, indent=2)


def _pairs(doc: Mapping, key: str) -> list[tuple[str, str]]:
    raw = doc.get(key, [])
    if not isinstance(raw, list):
        raise InputError(f"{key!r} must be a list of pairs")
    out = []
    for i, p in enumerate(raw):
        if not isinstance(p, (list, tuple)) or len(p) != 2:
            raise InputError(f"{key}[{i}] must be a two-element list")
        out.append((str(p[0]), str(p[1])))
    return out


def _vertex_map(doc: Mapping, key: str) -> dict[str, int]:
    raw = doc.get(key) or {}
    if not isinstance(raw, Mapping):
        raise InputError(f"{key!r} must be an object mapping vertices to integers")
    out = {}
    for v, c in raw.items():
        if isinstance(c, bool) or not isinstance(c, int):
            raise InputError(f"{key}[{v!r}] must be an integer")
        out[str(v)] = c
    return out


def instance_from_dict(doc: Any) -> tuple[MixedGraph, RootBounds]:
    if not isinstance(doc, Mapping):
        raise InputError("instance document must be a JSON object")
    vertices = doc.get("vertices")
    if not isinstance(vertices, list) or not all(isinstance(v, (str, int)) for v in vertices):
        raise InputError("'vertices' must be a list of identifiers")
    k = doc.get("k")
    if isinstance(k, bool) or not isinstance(k, int):
        raise InputError("'k' must be an integer")
    graph = MixedGraph(tuple(str(v) for v in vertices), tuple(_pairs(doc, "edges")), tuple(_pairs(doc, "arcs")))
    bounds = RootBounds(k, _vertex_map(doc, "f"), _vertex_map(doc, "g"))
    bounds.check_against(graph)
    return graph, bounds


def instance_to_dict(graph: MixedGraph, bounds: RootBounds) -> dict:
    return {
        "vertices": list(graph.vertices),
        "edges": [list(e) for e in graph.edges],
        "arcs": [list(a) for a in graph.arcs],
        "k": bounds.k,
        "f": dict(bounds.f),
        "g": dict(bounds.g),
    }


def load_instance(path: str | Path) -> tuple[MixedGraph, RootBounds]:
    return instance_from_dict(read_json(path))


def load_packing(path: str | Path) -> Packing:
    doc = read_json(path)
    if isinstance(doc, Mapping) and "packing" in doc:
        doc = doc["packing"]
    if not isinstance(doc, Mapping):
        raise InputError("packing document must be a JSON object")
    return Packing.from_dict(doc)
