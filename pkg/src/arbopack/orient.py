"""Reduce a feasible mixed instance to a digraph, one edge at a time.

A subpartition is tight when it meets the f-condition ("e1") or the
g-condition ("e2") with equality. An edge with exactly one endpoint inside the
union of some tight family is oriented into that union; tight families never
pull an edge both ways on a feasible instance, and orienting this way keeps
both conditions intact. Edges not separated by any tight family go from the
lower-index endpoint to the higher one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .conditions import check_feasible
from .core import (
    MixedGraph,
    RootBounds,
    Subpartition,
    block_counts,
    check_capacity,
    covered,
    family_values,
    row_to_subpartition,
    subpartition_labels,
    union_masks,
)
from .errors import InternalConsistencyError, PreconditionError

PARANOID_MAX_N = 8


@dataclass
class TightFamilies:
    graph: MixedGraph
    e1: list[Subpartition]
    e2: list[Subpartition]
    e1_masks: np.ndarray
    e2_masks: np.ndarray
    e1_rows: np.ndarray = field(repr=False, default=None)
    e2_rows: np.ndarray = field(repr=False, default=None)

    @property
    def unions(self) -> dict[str, list[frozenset]]:
        return {"e1": [P.union for P in self.e1], "e2": [P.union for P in self.e2]}

    def all_families(self) -> list[Subpartition]:
        return self.e1 + self.e2


def _condition_arrays(graph: MixedGraph, bounds: RootBounds, ew=None, aw=None):
    labels = subpartition_labels(graph.n)
    lhs = family_values(graph, labels, arc_weights=aw, edge_weights=ew)
    t = block_counts(graph.n)
    inside = covered(graph.n)
    rhs_f = bounds.k * (t - 1) + (~inside) @ bounds.f_vector(graph)
    rhs_g = bounds.k * t - inside @ bounds.g_vector(graph)
    return lhs, rhs_f, rhs_g


def _tight(graph, lhs, rhs_f, rhs_g) -> TightFamilies:
    labels = subpartition_labels(graph.n)
    masks = union_masks(graph.n)
    r1 = np.flatnonzero(lhs == rhs_f)
    r2 = np.flatnonzero(lhs == rhs_g)
    return TightFamilies(
        graph,
        [row_to_subpartition(graph, labels[r]) for r in r1],
        [row_to_subpartition(graph, labels[r]) for r in r2],
        masks[r1], masks[r2], r1, r2,
    )


def tight_families(graph: MixedGraph, bounds: RootBounds, max_n=None) -> TightFamilies:
    """All subpartitions meeting the f- or g-condition with equality."""
    check_capacity(graph.n, max_n)
    lhs, rhs_f, rhs_g = _condition_arrays(graph, bounds)
    if (lhs < rhs_f).any() or (lhs < rhs_g).any():
        report = check_feasible(graph, bounds, max_n)
        raise PreconditionError("subpartition conditions are violated", witness=report)
    return _tight(graph, lhs, rhs_f, rhs_g)


def separating_family(T: TightFamilies, edge: tuple[str, str]):
    """(direction, family, kind) for an edge, or (None, None, None) when it is free.

    ``direction`` is ``(tail, head)`` with the head inside the union of the
    first tight family (e1 before e2, enumeration order) that splits the edge.
    """
    graph = T.graph
    u, v = edge
    bu, bv = 1 << graph.index[u], 1 << graph.index[v]
    masks = np.concatenate([T.e1_masks, T.e2_masks])
    into_v = np.flatnonzero(((masks & bv) != 0) & ((masks & bu) == 0))
    into_u = np.flatnonzero(((masks & bu) != 0) & ((masks & bv) == 0))
    if len(into_v) and len(into_u):
        fams = T.all_families()
        raise InternalConsistencyError(
            f"tight families demand both orientations of edge {u}-{v}: "
            f"{fams[into_v[0]].as_lists(graph)} vs {fams[into_u[0]].as_lists(graph)}")
    if not len(into_v) and not len(into_u):
        return None, None, None
    pos, direction = (into_v[0], (u, v)) if len(into_v) else (into_u[0], (v, u))
    kind = "e1" if pos < len(T.e1) else "e2"
    return direction, T.all_families()[pos], kind


def separating_direction(T: TightFamilies, edge: tuple[str, str]) -> tuple[str, str] | None:
    """Forced orientation ``(tail, head)`` of ``edge``, or None if it is free."""
    return separating_family(T, edge)[0]


@dataclass(frozen=True)
class OrientationStep:
    edge_index: int
    edge: tuple[str, str]
    direction: tuple[str, str]
    family: Subpartition | None
    family_kind: str | None
    checked: bool

    def to_dict(self, graph: MixedGraph) -> dict:
        return {
            "edge_index": self.edge_index,
            "edge": list(self.edge),
            "direction": list(self.direction),
            "family": self.family.as_lists(graph) if self.family is not None else None,
            "family_kind": self.family_kind,
            "checked": self.checked,
        }


@dataclass
class OrientationResult:
    digraph: MixedGraph
    orientation_map: dict[int, tuple[str, str]]
    step_log: list[OrientationStep]

    def arc_of_edge(self, edge_index: int, original: MixedGraph) -> int:
        """Index in ``digraph.arcs`` of the oriented copy of an original edge."""
        return len(original.arcs) + edge_index


def orient_all(graph: MixedGraph, bounds: RootBounds, paranoid: bool | None = None,
               max_n=None) -> OrientationResult:
    """Orient every edge, lowest index first, keeping both conditions valid.

    The oriented copy of edge ``i`` becomes arc ``len(graph.arcs) + i`` of the
    result. In paranoid mode (default for up to 8 vertices) every step
    re-checks both conditions on all subpartitions and confirms that the value
    of each previously tight family did not change.
    """
    check_capacity(graph.n, max_n)
    report = check_feasible(graph, bounds, max_n)
    if not report.feasible:
        raise PreconditionError("instance is infeasible", witness=report)
    if paranoid is None:
        paranoid = graph.n <= PARANOID_MAX_N
    ew = graph.edge_weights.copy()
    aw = graph.arc_weights.copy()
    lhs, rhs_f, rhs_g = _condition_arrays(graph, bounds, ew, aw)
    oriented: dict[int, tuple[str, str]] = {}
    log: list[OrientationStep] = []
    for i, (u, v) in enumerate(graph.edges):
        T = _tight(graph, lhs, rhs_f, rhs_g)
        try:
            direction, family, kind = separating_family(T, (u, v))
        except InternalConsistencyError as exc:
            raise InternalConsistencyError(str(exc), step_log=log) from None
        if direction is None:
            direction = (u, v) if graph.index[u] < graph.index[v] else (v, u)
        a, b = graph.index[u], graph.index[v]
        ew[min(a, b), max(a, b)] -= 1
        aw[graph.index[direction[0]], graph.index[direction[1]]] += 1
        oriented[i] = direction
        log.append(OrientationStep(i, (u, v), direction, family, kind, paranoid))
        new_lhs = family_values(graph, subpartition_labels(graph.n), arc_weights=aw, edge_weights=ew)
        if paranoid:
            _check_step(new_lhs, lhs, rhs_f, rhs_g, T, log)
        lhs = new_lhs
    digraph = MixedGraph(graph.vertices, (), graph.arcs + tuple(oriented[i] for i in range(len(graph.edges))))
    return OrientationResult(digraph, oriented, log)


def _check_step(new_lhs, old_lhs, rhs_f, rhs_g, T: TightFamilies, log) -> None:
    step = log[-1]
    if (new_lhs < rhs_f).any() or (new_lhs < rhs_g).any():
        raise InternalConsistencyError(
            f"orienting edge #{step.edge_index} as {step.direction} broke a subpartition condition",
            step_log=log)
    rows = np.concatenate([T.e1_rows, T.e2_rows])
    if (new_lhs[rows] != old_lhs[rows]).any():
        raise InternalConsistencyError(
            f"orienting edge #{step.edge_index} changed the value of a tight family", step_log=log)

