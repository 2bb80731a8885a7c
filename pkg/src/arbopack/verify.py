"""Packing verification and an exhaustive, theorem-free packing oracle."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable

from .core import MixedGraph, RootBounds
from .errors import CapacityError, InputError
from .pack import Packing, Tree

ORACLE_MAX_N = 5
ORACLE_MAX_ELEMENTS = 9


def _reaches_all(n: int, root: int, edges: Iterable[tuple[int, int]], arcs: Iterable[tuple[int, int]]) -> bool:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    for u, v in arcs:
        adj[u].append(v)
    seen = {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == n


def is_mixed_arborescence(graph: MixedGraph, root: str, edges: Iterable[int] = (),
                          arcs: Iterable[int] = ()) -> bool:
    """Whether the selected edges and arcs form a spanning ``root``-mixed arborescence.

    That is, the selection has |V| - 1 elements and every vertex is reachable
    from ``root`` along selected arcs (forwards) and edges (either way).
    """
    edges, arcs = list(edges), list(arcs)
    if root not in graph.index:
        raise InputError(f"unknown root {root!r}")
    for kind, idx, pool in (("edge", edges, graph.edges), ("arc", arcs, graph.arcs)):
        bad = [i for i in idx if not 0 <= i < len(pool)]
        if bad:
            raise InputError(f"invalid {kind} indices {bad}")
    if len(set(edges)) != len(edges) or len(set(arcs)) != len(arcs):
        return False
    if len(edges) + len(arcs) != graph.n - 1:
        return False
    return _reaches_all(graph.n, graph.index[root],
                        (graph.edge_index_pairs[i] for i in edges),
                        (graph.arc_index_pairs[i] for i in arcs))


@dataclass(frozen=True)
class Failure:
    tree: int | str
    reason: str
    elements: tuple = ()

    def to_dict(self) -> dict:
        return {"tree": self.tree, "reason": self.reason, "elements": [list(e) if isinstance(e, tuple) else e
                                                                      for e in self.elements]}


@dataclass
class VerificationReport:
    failures: list[Failure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def reasons(self) -> set[str]:
        return {f.reason for f in self.failures}

    def to_dict(self) -> dict:
        return {"ok": self.ok, "failures": [f.to_dict() for f in self.failures]}


def verify_packing(graph: MixedGraph, bounds: RootBounds, packing: Packing) -> VerificationReport:
    """Check tree count, element disjointness, each tree's structure and the root bounds.

    Every violated check is reported; nothing raises.
    """
    report = VerificationReport()
    fail = report.failures.append
    if packing.k != bounds.k:
        fail(Failure("global", "tree count", (packing.k, bounds.k)))
    owner: dict[tuple[str, int], int] = {}
    shared: set[tuple[str, int]] = set()
    for t, tree in enumerate(packing.trees):
        bad = tuple([("edge", i) for i in tree.edges if not 0 <= i < len(graph.edges)]
                    + [("arc", i) for i in tree.arcs if not 0 <= i < len(graph.arcs)])
        if bad:
            fail(Failure(t, "invalid index", bad))
        if tree.root not in graph.index:
            fail(Failure(t, "unknown root", (tree.root,)))
        for elem in [("edge", i) for i in tree.edges] + [("arc", i) for i in tree.arcs]:
            if elem in owner and owner[elem] != t:
                shared.add(elem)
            owner.setdefault(elem, t)
        if bad or tree.root not in graph.index:
            continue
        if len(tree.edges) + len(tree.arcs) != graph.n - 1:
            fail(Failure(t, "size", (len(tree.edges) + len(tree.arcs), graph.n - 1)))
        elif not is_mixed_arborescence(graph, tree.root, tree.edges, tree.arcs):
            fail(Failure(t, "not a spanning mixed arborescence"))
    if shared:
        fail(Failure("global", "disjointness", tuple(sorted(shared))))
    counts = packing.root_counts()
    out = tuple(v for v in graph.vertices
                if not bounds.lower(v) <= counts.get(v, 0) <= bounds.upper(v))
    if out:
        fail(Failure("global", "root bounds", out))
    return report


# -- oracle ------------------------------------------------------------------


@lru_cache(maxsize=512)
def _candidate_trees(graph: MixedGraph) -> list[list[tuple[int, int]]]:
    """Per root index: every spanning mixed arborescence as (element bitmask, combo id).

    Elements are numbered edges first, then arcs.
    """
    n = graph.n
    elements = ([("edge", i) for i in range(len(graph.edges))]
                + [("arc", i) for i in range(len(graph.arcs))])
    out: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for cid, combo in enumerate(combinations(range(len(elements)), n - 1)):
        edges = [elements[c][1] for c in combo if elements[c][0] == "edge"]
        arcs = [elements[c][1] for c in combo if elements[c][0] == "arc"]
        mask = sum(1 << c for c in combo)
        for r in range(n):
            if _reaches_all(n, r, (graph.edge_index_pairs[i] for i in edges),
                            (graph.arc_index_pairs[i] for i in arcs)):
                out[r].append((mask, cid))
    return out


def oracle_pack_exists(graph: MixedGraph, bounds: RootBounds, prune: bool = True) -> tuple[bool, Packing | None]:
    """Decide the packing question by exhaustive search.

    Trees are chosen one after another as (root, element subset) pairs with
    nondecreasing roots, so each unordered packing is met at least once. With
    ``prune`` the search abandons branches that can no longer meet the lower
    bounds f or already exceed an upper bound g; this only skips dead branches.
    """
    if graph.n > ORACLE_MAX_N or len(graph.edges) + len(graph.arcs) > ORACLE_MAX_ELEMENTS:
        raise CapacityError(
            f"oracle is capped at {ORACLE_MAX_N} vertices and {ORACLE_MAX_ELEMENTS} elements",
            limit=(ORACLE_MAX_N, ORACLE_MAX_ELEMENTS))
    bounds.check_against(graph)
    n, k = graph.n, bounds.k
    if k * (n - 1) > len(graph.edges) + len(graph.arcs):
        return False, None
    cands = _candidate_trees(graph)
    lo = [bounds.lower(v) for v in graph.vertices]
    hi = [bounds.upper(v) for v in graph.vertices]
    counts = [0] * n
    chosen: list[tuple[int, int]] = []

    def unmet() -> int:
        return sum(max(0, lo[v] - counts[v]) for v in range(n))

    def search(i: int, used: int, min_root: int, min_cid: int) -> bool:
        if i == k:
            return all(lo[v] <= counts[v] <= hi[v] for v in range(n))
        if prune and unmet() > k - i:
            return False
        for r in range(min_root, n):
            if prune and counts[r] >= hi[r]:
                continue
            for mask, cid in cands[r]:
                if mask & used or (r == min_root and cid < min_cid):
                    continue
                counts[r] += 1
                chosen.append((r, mask))
                if search(i + 1, used | mask, r, cid):
                    return True
                chosen.pop()
                counts[r] -= 1
        return False

    if not search(0, 0, 0, 0):
        return False, None
    n_edges = len(graph.edges)
    trees = []
    for r, mask in chosen:
        bits = [b for b in range(mask.bit_length()) if mask >> b & 1]
        trees.append(Tree(graph.vertices[r],
                          tuple(b - n_edges for b in bits if b >= n_edges),
                          tuple(b for b in bits if b < n_edges)))
    return True, Packing(tuple(trees))
