"""Exact feasibility checkers with machine-checkable witnesses.

Every subpartition condition compares the same left-hand side,
``e_E(P) + sum_j d^-(X_j)``, against a right-hand side built from k and the
root bounds:

* ``"ii"``:  k(t - 1) + f~(V minus the union of P)
* ``"iii"``: k t - g~(union of P)

Quantifiers are checked by exhaustive enumeration. Witnesses are chosen
deterministically: largest deficit, then fewest blocks (or vertices), then
enumeration order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import networkx as nx
import numpy as np

from .core import (
    MixedGraph,
    RootBounds,
    Subpartition,
    block_counts,
    check_capacity,
    covered,
    family_values,
    in_degrees_all,
    row_to_subpartition,
    subpartition_labels,
    subset_membership,
)
from .errors import InputError, InternalConsistencyError

ROOT_BUDGET = "root-budget"
COND_F = "ii"
COND_G = "iii"
EDMONDS = "edmonds"
NONE = "none"


@dataclass(frozen=True)
class Violation:
    """A failed inequality ``lhs >= rhs`` together with the object that fails it."""

    condition: str
    witness: Subpartition | frozenset | None
    lhs: int
    rhs: int

    @property
    def deficit(self) -> int:
        return self.rhs - self.lhs


@dataclass
class FeasibilityReport:
    feasible: bool
    violated_condition: str = NONE
    witness: Subpartition | frozenset | None = None
    slack_summary: dict[str, int] = field(default_factory=dict)
    lhs: int | None = None
    rhs: int | None = None

    @classmethod
    def from_checks(cls, slack: dict[str, int], violations: Iterable[Violation | None]) -> FeasibilityReport:
        for v in violations:
            if v is not None:
                return cls(False, v.condition, v.witness, slack, v.lhs, v.rhs)
        return cls(True, NONE, None, slack)

    def to_dict(self, graph: MixedGraph) -> dict:
        return {
            "feasible": self.feasible,
            "violated_condition": self.violated_condition,
            "witness": witness_to_json(graph, self.witness),
            "slack_summary": dict(sorted(self.slack_summary.items())),
            "lhs": self.lhs,
            "rhs": self.rhs,
        }


def witness_to_json(graph: MixedGraph, witness):
    if witness is None:
        return None
    if isinstance(witness, Subpartition):
        return witness.as_lists(graph)
    return graph.ordered(witness)


def _pick_row(slack: np.ndarray, sizes: np.ndarray) -> int:
    """Row with the most negative slack, then smallest size, then lowest index."""
    worst = slack.min()
    rows = np.flatnonzero(slack == worst)
    return int(rows[np.argmin(sizes[rows])])


# -- subpartition scans -----------------------------------------------------


def scan_condition_f(graph: MixedGraph, bounds: RootBounds, max_n=None):
    """(lhs, rhs) arrays over all subpartitions for the f-condition."""
    check_capacity(graph.n, max_n)
    labels = subpartition_labels(graph.n)
    lhs = family_values(graph, labels)
    outside = ~covered(graph.n)
    rhs = bounds.k * (block_counts(graph.n) - 1) + outside @ bounds.f_vector(graph)
    return lhs, rhs


def scan_condition_g(graph: MixedGraph, bounds: RootBounds, max_n=None, lhs=None):
    check_capacity(graph.n, max_n)
    if lhs is None:
        lhs = family_values(graph, subpartition_labels(graph.n))
    rhs = bounds.k * block_counts(graph.n) - covered(graph.n) @ bounds.g_vector(graph)
    return lhs, rhs


def _subpartition_violation(graph, name, lhs, rhs) -> Violation | None:
    slack = lhs - rhs
    if slack.min() >= 0:
        return None
    row = _pick_row(slack, block_counts(graph.n))
    witness = row_to_subpartition(graph, subpartition_labels(graph.n)[row])
    return Violation(name, witness, int(lhs[row]), int(rhs[row]))


def check_root_budget(bounds: RootBounds, V: Iterable[str]) -> Violation | None:
    V = frozenset(V)
    total = sum(bounds.lower(v) for v in V)
    if total <= bounds.k:
        return None
    return Violation(ROOT_BUDGET, V, bounds.k, total)


def check_condition_f(graph: MixedGraph, bounds: RootBounds, max_n=None) -> Violation | None:
    """Subpartition condition with f: None if it holds, else a worst violator."""
    return _subpartition_violation(graph, COND_F, *scan_condition_f(graph, bounds, max_n))


def check_condition_g(graph: MixedGraph, bounds: RootBounds, max_n=None) -> Violation | None:
    return _subpartition_violation(graph, COND_G, *scan_condition_g(graph, bounds, max_n))


def check_feasible(graph: MixedGraph, bounds: RootBounds, max_n=None) -> FeasibilityReport:
    """Decide whether k edge- and arc-disjoint spanning mixed arborescences with
    root counts in [f, g] exist."""
    bounds.check_against(graph)
    lhs, rhs_f = scan_condition_f(graph, bounds, max_n)
    _, rhs_g = scan_condition_g(graph, bounds, max_n, lhs=lhs)
    budget = check_root_budget(bounds, graph.vertices)
    slack = {
        ROOT_BUDGET: bounds.k - sum(bounds.lower(v) for v in graph.vertices),
        COND_F: int((lhs - rhs_f).min()),
        COND_G: int((lhs - rhs_g).min()),
    }
    return FeasibilityReport.from_checks(slack, [
        budget,
        _subpartition_violation(graph, COND_F, lhs, rhs_f),
        _subpartition_violation(graph, COND_G, lhs, rhs_g),
    ])


# -- per-set scans on digraphs ------------------------------------------------


def _set_order(mask: int) -> tuple[int, tuple[int, ...]]:
    bits = tuple(i for i in range(mask.bit_length()) if mask >> i & 1)
    return len(bits), bits


def _worst_subset(graph: MixedGraph, name: str, lhs: np.ndarray, rhs: np.ndarray) -> Violation | None:
    """Worst violator over nonempty subsets; row 0 (the empty set) is ignored."""
    slack = (lhs - rhs)[1:]
    if len(slack) == 0 or slack.min() >= 0:
        return None
    rows = np.flatnonzero(slack == slack.min()) + 1
    m = min((int(r) for r in rows), key=_set_order)
    return Violation(name, graph.members(m), int(lhs[m]), int(rhs[m]))


def root_vector(graph: MixedGraph, roots) -> np.ndarray:
    """Root multiset as a count vector; accepts a mapping or a sequence of vertices."""
    counts = np.zeros(graph.n, dtype=np.int64)
    items = roots.items() if isinstance(roots, Mapping) else ((r, 1) for r in roots)
    for v, c in items:
        if v not in graph.index:
            raise InputError(f"root {v!r} is not a vertex")
        if c < 0:
            raise InputError(f"negative root count for {v!r}")
        counts[graph.index[v]] += c
    return counts


def edmonds_deficits(n: int, arc_weights: np.ndarray, root_counts: np.ndarray):
    """(d^-(X), roots outside X) for every vertex subset X, indexed by bitmask."""
    members = subset_membership(n)
    return in_degrees_all(arc_weights, members), (~members) @ root_counts


def _edmonds_enum(graph: MixedGraph, roots: np.ndarray) -> Violation | None:
    lhs, rhs = edmonds_deficits(graph.n, graph.arc_weights, roots)
    return _worst_subset(graph, EDMONDS, lhs, rhs)


def _flow_network(n: int, arc_weights: np.ndarray) -> nx.DiGraph:
    net = nx.DiGraph()
    net.add_nodes_from(range(n + 1))
    for u, v in zip(*np.nonzero(arc_weights)):
        net.add_edge(int(u), int(v), capacity=int(arc_weights[u, v]))
    return net


def min_cut_deficit(net: nx.DiGraph, source, n: int, demand: int):
    """First vertex whose min source-cut is below ``demand``, as (sink-side vertex mask, cut value).

    Returns None when every vertex can receive ``demand`` units of flow.
    """
    for v in range(n):
        value, (_, sink_side) = nx.minimum_cut(net, source, v)
        if value < demand:
            return sum(1 << u for u in sink_side if isinstance(u, int) and u < n), value
    return None


def _edmonds_flow(graph: MixedGraph, roots: np.ndarray) -> Violation | None:
    n = graph.n
    net = _flow_network(n, graph.arc_weights)
    for r in np.flatnonzero(roots):
        net.add_edge(n, int(r), capacity=int(roots[r]))
    found = min_cut_deficit(net, n, n, int(roots.sum()))
    if found is None:
        return None
    mask = found[0]
    X = graph.members(mask)
    outside = int(sum(roots[i] for i in range(n) if not mask >> i & 1))
    lhs = int(sum(graph.arc_weights[u, v] for u in range(n) for v in range(n)
                  if mask >> v & 1 and not mask >> u & 1))
    return Violation(EDMONDS, X, lhs, outside)


def check_edmonds(digraph: MixedGraph, roots, backend: str = "enum", max_n=None) -> Violation | None:
    """Cut condition for arc-disjoint spanning arborescences rooted at ``roots``.

    ``backend`` is ``"enum"`` (all subsets), ``"flow"`` (one max-flow per
    vertex from a super-source) or ``"both"``, which runs the two and insists
    they agree.
    """
    digraph.require_directed()
    counts = root_vector(digraph, roots)
    if backend == "flow":
        return _edmonds_flow(digraph, counts)
    check_capacity(digraph.n, max_n)
    enum = _edmonds_enum(digraph, counts)
    if backend == "both":
        flow = _edmonds_flow(digraph, counts)
        if (enum is None) != (flow is None):
            raise InternalConsistencyError(
                f"Edmonds backends disagree: enumeration={enum}, flow={flow}")
    elif backend != "enum":
        raise InputError(f"unknown backend {backend!r}")
    return enum


def check_cai_frank(digraph: MixedGraph, bounds: RootBounds, max_n=None) -> FeasibilityReport:
    """Digraph version: budget, the f-condition over subpartitions, and
    ``d^-(X) >= k - g~(X)`` over nonempty single sets."""
    digraph.require_directed()
    bounds.check_against(digraph)
    lhs, rhs_f = scan_condition_f(digraph, bounds, max_n)
    members = subset_membership(digraph.n)
    lhs_g = in_degrees_all(digraph.arc_weights, members)
    rhs_g = bounds.k - members @ bounds.g_vector(digraph)
    slack = {
        ROOT_BUDGET: bounds.k - sum(bounds.lower(v) for v in digraph.vertices),
        COND_F: int((lhs - rhs_f).min()),
        COND_G: int((lhs_g - rhs_g)[1:].min()) if digraph.n else 0,
    }
    return FeasibilityReport.from_checks(slack, [
        check_root_budget(bounds, digraph.vertices),
        _subpartition_violation(digraph, COND_F, lhs, rhs_f),
        _worst_subset(digraph, COND_G, lhs_g, rhs_g),
    ])


def check_nash_williams(graph: MixedGraph, k: int, max_n=None) -> FeasibilityReport:
    """k edge-disjoint spanning trees in an undirected graph.

    Runs the mixed check with free roots (f = 0, g = k). A failing witness is
    returned as a full partition: the complement of the subpartition's union
    is appended as an extra block when nonempty. The partition's ``t`` is its
    block count minus one.
    """
    graph.require_undirected()
    report = check_feasible(graph, RootBounds(k), max_n)
    if isinstance(report.witness, Subpartition):
        rest = frozenset(graph.vertices) - report.witness.union
        blocks = report.witness.blocks + ((rest,) if rest else ())
        report.witness = Subpartition(blocks).canonical(graph)
        report.rhs = k * (len(blocks) - 1)
    return report
