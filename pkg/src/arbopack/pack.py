"""Directed packing and the full mixed pipeline.

On a digraph, a root multiset is picked inside the [f, g] box and then the
arborescences are grown one at a time. An arc from the current tree S to a new
vertex v is *safe* when, after removing it from the digraph,

    d^-(X) >= |remaining roots outside X| + [X misses S + v]   for all X != {}

so the rest of the packing can still be completed. Such an arc always exists
while the cut condition holds.

A mixed instance is first oriented (see ``orient``), packed as a digraph, and
each oriented copy used by a tree is turned back into its undirected edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import networkx as nx
import numpy as np

from .conditions import (
    FeasibilityReport,
    _flow_network,
    check_cai_frank,
    check_edmonds,
    check_feasible,
    edmonds_deficits,
    min_cut_deficit,
    root_vector,
)
from .core import MixedGraph, RootBounds, check_capacity, in_degrees_all, subset_membership
from .errors import InputError, InternalConsistencyError, PreconditionError
from .orient import PARANOID_MAX_N, OrientationResult, orient_all


@dataclass(frozen=True)
class Tree:
    root: str
    arcs: tuple[int, ...] = ()
    edges: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {"root": self.root, "arcs": list(self.arcs), "edges": list(self.edges)}


@dataclass(frozen=True)
class Packing:
    trees: tuple[Tree, ...]

    @property
    def k(self) -> int:
        return len(self.trees)

    def root_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for tr in self.trees:
            counts[tr.root] = counts.get(tr.root, 0) + 1
        return counts

    def to_dict(self) -> dict:
        return {"k": self.k, "trees": [tr.to_dict() for tr in self.trees]}

    @classmethod
    def from_dict(cls, doc: Mapping) -> Packing:
        try:
            trees = tuple(
                Tree(str(t["root"]), tuple(int(a) for a in t.get("arcs", ())),
                     tuple(int(e) for e in t.get("edges", ())))
                for t in doc["trees"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed packing document: {exc}") from None
        return cls(trees)


@dataclass
class SolveOutcome:
    """Everything one pipeline run produced."""

    packing: Packing | None
    report: FeasibilityReport
    orientation: OrientationResult | None = None
    roots: dict[str, int] = field(default_factory=dict)
    directed_packing: Packing | None = None


# -- root selection ----------------------------------------------------------


def _box_vectors(lo: list[int], hi: list[int], total: int) -> Iterator[tuple[int, ...]]:
    """Vectors with lo <= c <= hi and sum ``total``, lexicographically descending."""
    n = len(lo)
    lo_tail = [sum(lo[i:]) for i in range(n + 1)]
    hi_tail = [sum(hi[i:]) for i in range(n + 1)]

    def rec(i, left, prefix):
        if i == n:
            if left == 0:
                yield tuple(prefix)
            return
        top = min(hi[i], left - lo_tail[i + 1])
        bottom = max(lo[i], left - hi_tail[i + 1])
        for c in range(top, bottom - 1, -1):
            prefix.append(c)
            yield from rec(i + 1, left - c, prefix)
            prefix.pop()

    yield from rec(0, total, [])


def select_roots(digraph: MixedGraph, bounds: RootBounds, max_n=None) -> dict[str, int]:
    """First root-count vector in the [f, g] box (largest counts on early
    vertices first) that satisfies the Edmonds cut condition."""
    digraph.require_directed()
    check_capacity(digraph.n, max_n)
    report = check_cai_frank(digraph, bounds, max_n)
    if not report.feasible:
        raise PreconditionError("digraph fails the root-bounded packing conditions", witness=report)
    members = subset_membership(digraph.n)
    indeg = in_degrees_all(digraph.arc_weights, members)[1:]
    outside = ~members[1:]
    lo = [bounds.lower(v) for v in digraph.vertices]
    hi = [min(bounds.upper(v), bounds.k) for v in digraph.vertices]
    for vec in _box_vectors(lo, hi, bounds.k):
        if (indeg >= outside @ np.array(vec, dtype=np.int64)).all():
            return {v: c for v, c in zip(digraph.vertices, vec) if c}
    raise InternalConsistencyError("no root vector in the [f, g] box passes the cut condition")


# -- safe arcs ---------------------------------------------------------------


def residual_deficit(n: int, arc_weights: np.ndarray, remaining: np.ndarray, tree_mask: int) -> int:
    """min over nonempty X of d^-(X) - |remaining roots outside X| - [X misses the tree]."""
    indeg, outside = edmonds_deficits(n, arc_weights, remaining)
    masks = np.arange(1 << n, dtype=np.int64)
    misses = (masks & tree_mask) == 0
    slack = indeg - outside - misses
    return int(slack[1:].min()) if n else 0


def residual_ok_flow(n: int, arc_weights: np.ndarray, remaining: np.ndarray, tree_mask: int) -> bool:
    """Max-flow form of the same residual condition.

    A super-source feeds each remaining root with its multiplicity and feeds
    the tree through a unit-capacity hub with uncapacitated links to every tree
    vertex; every vertex must then receive |remaining| + 1 units.
    """
    net = _flow_network(n, arc_weights)
    source, hub = n, n + 1
    for r in np.flatnonzero(remaining):
        net.add_edge(source, int(r), capacity=int(remaining[r]))
    net.add_edge(source, hub, capacity=1)
    for v in range(n):
        if tree_mask >> v & 1:
            net.add_edge(hub, v)
    return min_cut_deficit(net, source, n, int(remaining.sum()) + 1) is None


def _arc_is_safe(n, arc_weights, remaining, tree_mask, u, v, backend="enum") -> bool:
    w = arc_weights.copy()
    w[u, v] -= 1
    grown = tree_mask | 1 << v
    if backend == "flow":
        return residual_ok_flow(n, w, remaining, grown)
    ok = residual_deficit(n, w, remaining, grown) >= 0
    if backend == "both" and ok != residual_ok_flow(n, w, remaining, grown):
        raise InternalConsistencyError(f"safe-arc backends disagree on arc {u}->{v}")
    return ok


def safe_arc(digraph: MixedGraph, tree: Iterable[str], remaining_roots, arc: int,
             backend: str = "enum") -> bool:
    """Whether adding arc ``arc`` (tail in ``tree``, head outside) to the tree
    being grown keeps the remaining packing completable in ``digraph``."""
    digraph.require_directed()
    if not 0 <= arc < len(digraph.arcs):
        raise InputError(f"arc index {arc} out of range")
    tree_mask = digraph.mask(tree)
    u, v = digraph.arc_index_pairs[arc]
    if not tree_mask >> u & 1 or tree_mask >> v & 1:
        raise InputError(f"arc #{arc} does not leave the tree vertex set")
    if backend not in ("enum", "flow", "both"):
        raise InputError(f"unknown backend {backend!r}")
    remaining = root_vector(digraph, remaining_roots)
    return _arc_is_safe(digraph.n, digraph.arc_weights, remaining, tree_mask, u, v, backend)


# -- packing -------------------------------------------------------------------


def _expand_roots(digraph: MixedGraph, roots) -> list[int]:
    counts = root_vector(digraph, roots)
    return [i for i in range(digraph.n) for _ in range(int(counts[i]))]


def pack_arborescences(digraph: MixedGraph, roots, paranoid: bool | None = None,
                       backend: str = "enum", max_n=None) -> Packing:
    """Arc-disjoint spanning arborescences, one per root occurrence.

    Roots are served in vertex order. Each tree is finished before the next
    starts, always taking the lowest-index safe arc out of the tree.
    """
    digraph.require_directed()
    check_capacity(digraph.n, max_n)
    if check_edmonds(digraph, roots, max_n=max_n) is not None:
        raise PreconditionError("root multiset fails the cut condition",
                                witness=check_edmonds(digraph, roots, max_n=max_n))
    if paranoid is None:
        paranoid = digraph.n <= PARANOID_MAX_N
    n = digraph.n
    order = _expand_roots(digraph, roots)
    weights = digraph.arc_weights.copy()
    pairs = digraph.arc_index_pairs
    used = [False] * len(pairs)
    full = digraph.full_mask
    trees = []
    for pos, r in enumerate(order):
        remaining = np.bincount(np.array(order[pos + 1:], dtype=np.int64), minlength=n).astype(np.int64)
        tree_mask = 1 << r
        taken = []
        while tree_mask != full:
            if paranoid and residual_deficit(n, weights, remaining, tree_mask) < 0:
                raise InternalConsistencyError(
                    f"residual cut condition fails while growing tree {pos} rooted at {digraph.vertices[r]}")
            for a, (u, v) in enumerate(pairs):
                if used[a] or not tree_mask >> u & 1 or tree_mask >> v & 1:
                    continue
                if _arc_is_safe(n, weights, remaining, tree_mask, u, v, backend):
                    break
            else:
                raise InternalConsistencyError(
                    f"no safe arc leaves tree {pos} rooted at {digraph.vertices[r]}")
            used[a] = True
            weights[u, v] -= 1
            tree_mask |= 1 << v
            taken.append(a)
        trees.append(Tree(digraph.vertices[r], tuple(sorted(taken))))
    return Packing(tuple(trees))


def solve(graph: MixedGraph, bounds: RootBounds, paranoid: bool | None = None, max_n=None) -> SolveOutcome:
    """Check feasibility, then orient, pick roots, pack and map edges back."""
    bounds.check_against(graph)
    report = check_feasible(graph, bounds, max_n)
    if not report.feasible:
        return SolveOutcome(None, report)
    orientation = orient_all(graph, bounds, paranoid=paranoid, max_n=max_n)
    try:
        roots = select_roots(orientation.digraph, bounds, max_n)
        directed = pack_arborescences(orientation.digraph, roots, paranoid=paranoid, max_n=max_n)
    except (InternalConsistencyError, PreconditionError) as exc:
        raise InternalConsistencyError(f"directed stage failed after orientation: {exc}",
                                       step_log=orientation.step_log) from exc
    n_arcs = len(graph.arcs)
    trees = tuple(
        Tree(tr.root,
             tuple(a for a in tr.arcs if a < n_arcs),
             tuple(a - n_arcs for a in tr.arcs if a >= n_arcs))
        for tr in directed.trees
    )
    return SolveOutcome(Packing(trees), report, orientation, roots, directed)


def pack_mixed(graph: MixedGraph, bounds: RootBounds, paranoid: bool | None = None,
               max_n=None) -> Packing | FeasibilityReport:
    """A packing when one exists, otherwise the failing feasibility report."""
    outcome = solve(graph, bounds, paranoid=paranoid, max_n=max_n)
    return outcome.packing if outcome.packing is not None else outcome.report
