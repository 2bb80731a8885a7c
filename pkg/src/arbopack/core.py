"""Mixed graphs, subpartitions, root bounds and the elementary set quantities.

Vertices are opaque strings. Each graph assigns them a dense index in input
order, so vertex sets can be handled as bitmasks and whole families of
subpartitions as integer label tables (label 0 = outside every block,
label j >= 1 = block j, blocks numbered by their smallest vertex).
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import CapacityError, InputError

DEFAULT_MAX_N = 10
MAX_N_ENV = "ARBOPACK_MAX_N"


def resolve_max_n(max_n: int | None = None) -> int:
    """Enumeration limit: explicit argument, then ``$ARBOPACK_MAX_N``, then 10."""
    if max_n is not None:
        return int(max_n)
    env = os.environ.get(MAX_N_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"{MAX_N_ENV} must be an integer, got {env!r}") from None
    return DEFAULT_MAX_N


def check_capacity(n: int, max_n: int | None = None) -> None:
    limit = resolve_max_n(max_n)
    if n > limit:
        raise CapacityError(
            f"{n} vertices exceeds the enumeration limit max_n={limit} "
            f"(raise it with --max-n or {MAX_N_ENV})",
            limit=limit,
        )


@dataclass(frozen=True)
class MixedGraph:
    """A loopless mixed multigraph.

    ``edges`` are undirected pairs and ``arcs`` are ``(tail, head)`` pairs.
    Parallel copies are distinct elements identified by their position.
    """

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...] = ()
    arcs: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(str(v) for v in self.vertices))
        object.__setattr__(self, "edges", tuple((str(u), str(v)) for u, v in self.edges))
        object.__setattr__(self, "arcs", tuple((str(u), str(v)) for u, v in self.arcs))
        if len(set(self.vertices)) != len(self.vertices):
            raise InputError("duplicate vertex identifiers")
        known = set(self.vertices)
        for kind, pairs in (("edge", self.edges), ("arc", self.arcs)):
            for i, (u, v) in enumerate(pairs):
                if u not in known or v not in known:
                    raise InputError(f"{kind} #{i} ({u}, {v}) has an unknown endpoint")
                if u == v:
                    raise InputError(f"{kind} #{i} is a loop at {u}")

    @property
    def n(self) -> int:
        return len(self.vertices)

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def mask(self, vertices: Iterable[str]) -> int:
        m = 0
        for v in vertices:
            try:
                m |= 1 << self.index[v]
            except KeyError:
                raise InputError(f"unknown vertex {v!r}") from None
        return m

    def members(self, mask: int) -> frozenset[str]:
        return frozenset(v for i, v in enumerate(self.vertices) if mask >> i & 1)

    def ordered(self, vertices: Iterable[str]) -> list[str]:
        """Vertices sorted by their index in this graph."""
        return sorted(vertices, key=self.index.__getitem__)

    @cached_property
    def edge_index_pairs(self) -> list[tuple[int, int]]:
        return [(self.index[u], self.index[v]) for u, v in self.edges]

    @cached_property
    def arc_index_pairs(self) -> list[tuple[int, int]]:
        return [(self.index[u], self.index[v]) for u, v in self.arcs]

    @cached_property
    def edge_weights(self) -> np.ndarray:
        """Edge multiplicities, stored at ``[min(u, v), max(u, v)]``."""
        w = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v in self.edge_index_pairs:
            w[min(u, v), max(u, v)] += 1
        return w

    @cached_property
    def arc_weights(self) -> np.ndarray:
        """Arc multiplicities, stored at ``[tail, head]``."""
        w = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v in self.arc_index_pairs:
            w[u, v] += 1
        return w

    def require_directed(self) -> None:
        if self.edges:
            raise InputError("operation requires a digraph (no undirected edges)")

    def require_undirected(self) -> None:
        if self.arcs:
            raise InputError("operation requires an undirected graph (no arcs)")


@dataclass(frozen=True)
class Subpartition:
    """Pairwise-disjoint nonempty vertex sets. The empty family is allowed."""

    blocks: tuple[frozenset[str], ...] = ()

    def __post_init__(self):
        blocks = tuple(frozenset(str(v) for v in b) for b in self.blocks)
        seen: set[str] = set()
        for b in blocks:
            if not b:
                raise InputError("subpartition blocks must be nonempty")
            if seen & b:
                raise InputError(f"subpartition blocks overlap on {sorted(seen & b)}")
            seen |= b
        object.__setattr__(self, "blocks", blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    @property
    def t(self) -> int:
        return len(self.blocks)

    @property
    def union(self) -> frozenset[str]:
        return frozenset().union(*self.blocks)

    def canonical(self, graph: MixedGraph) -> Subpartition:
        """Blocks ordered by their smallest vertex index in ``graph``."""
        return Subpartition(tuple(sorted(self.blocks, key=lambda b: min(graph.index[v] for v in b))))

    def as_lists(self, graph: MixedGraph) -> list[list[str]]:
        return [graph.ordered(b) for b in self.canonical(graph).blocks]

    def same_as(self, other: Subpartition) -> bool:
        return set(self.blocks) == set(other.blocks) and len(self) == len(other)


def as_subpartition(P) -> Subpartition:
    return P if isinstance(P, Subpartition) else Subpartition(tuple(P))


@dataclass(frozen=True)
class RootBounds:
    """Number of arborescences ``k`` with per-vertex root-count bounds f <= g.

    Missing ``f`` entries read as 0 and missing ``g`` entries as ``k``.
    """

    k: int
    f: Mapping[str, int] = field(default_factory=dict)
    g: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.k, bool) or not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise InputError(f"k must be a positive integer, got {self.k!r}")
        f = {str(v): int(c) for v, c in dict(self.f).items()}
        g = {str(v): int(c) for v, c in dict(self.g).items()}
        for name, h in (("f", f), ("g", g)):
            for v, c in h.items():
                if c < 0:
                    raise InputError(f"{name}({v}) = {c} is negative")
        for v in set(f) | set(g):
            if f.get(v, 0) > g.get(v, self.k):
                raise InputError(f"f({v}) = {f.get(v, 0)} exceeds g({v}) = {g.get(v, self.k)}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "g", g)

    def lower(self, v: str) -> int:
        return self.f.get(v, 0)

    def upper(self, v: str) -> int:
        return self.g.get(v, self.k)

    def check_against(self, graph: MixedGraph) -> None:
        extra = (set(self.f) | set(self.g)) - set(graph.vertices)
        if extra:
            raise InputError(f"root bounds name unknown vertices {sorted(extra)}")

    def f_vector(self, graph: MixedGraph) -> np.ndarray:
        return np.array([self.lower(v) for v in graph.vertices], dtype=np.int64)

    def g_vector(self, graph: MixedGraph) -> np.ndarray:
        return np.array([self.upper(v) for v in graph.vertices], dtype=np.int64)


# -- elementary quantities ---------------------------------------------------


def in_degree_arcs(graph: MixedGraph, X: Iterable[str]) -> int:
    """Number of arcs with head in ``X`` and tail outside, with multiplicity."""
    m = graph.mask(X)
    return sum(1 for u, v in graph.arc_index_pairs if m >> v & 1 and not m >> u & 1)


def crossing_edges(graph: MixedGraph, P) -> int:
    """Undirected edges leaving a block of ``P`` (to another block or outside all)."""
    P = as_subpartition(P)
    label = {}
    for j, block in enumerate(P.blocks, start=1):
        for v in block:
            if v not in graph.index:
                raise InputError(f"unknown vertex {v!r}")
            label[v] = j
    return sum(1 for u, v in graph.edges if label.get(u, 0) != label.get(v, 0))


def tilde_sum(h: Mapping[str, int], X: Iterable[str], default: int = 0) -> int:
    """Additive extension of a vertex function: sum of ``h`` over ``X``."""
    return sum(h.get(x, default) for x in X)


def family_value(graph: MixedGraph, P) -> int:
    """Left-hand side shared by all subpartition conditions: e_E(P) + sum of d^-(X_j)."""
    P = as_subpartition(P)
    return crossing_edges(graph, P) + sum(in_degree_arcs(graph, X) for X in P.blocks)


def mixed_reachable(graph: MixedGraph, sources: Iterable[str]) -> frozenset[str]:
    """Vertices reachable from ``sources`` along arcs (forward) and edges (both ways)."""
    adj: list[list[int]] = [[] for _ in range(graph.n)]
    for u, v in graph.edge_index_pairs:
        adj[u].append(v)
        adj[v].append(u)
    for u, v in graph.arc_index_pairs:
        adj[u].append(v)
    start = graph.mask(sources)
    seen = start
    queue = deque(i for i in range(graph.n) if start >> i & 1)
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if not seen >> w & 1:
                seen |= 1 << w
                queue.append(w)
    return graph.members(seen)


# -- subpartition enumeration -------------------------------------------------


@lru_cache(maxsize=None)
def subpartition_labels(n: int) -> np.ndarray:
    """All subpartitions of ``range(n)`` as a read-only ``(Bell(n+1), n)`` label table.

    Rows are restricted growth strings of an extra leading element whose block
    is "outside"; row order is lexicographic, so row 0 is the empty subpartition.
    """
    labels = np.zeros((1, 0), dtype=np.int8)
    top = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        reps = top + 2
        parent = np.repeat(np.arange(len(top)), reps)
        starts = np.repeat(np.cumsum(reps) - reps, reps)
        choice = np.arange(len(parent)) - starts
        labels = np.hstack([labels[parent], choice[:, None].astype(np.int8)])
        top = np.maximum(top[parent], choice)
    labels.setflags(write=False)
    return labels


@lru_cache(maxsize=None)
def _table_summaries(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    labels = subpartition_labels(n)
    t = labels.max(axis=1).astype(np.int64) if n else np.zeros(1, dtype=np.int64)
    inside = labels != 0
    unions = (inside.astype(np.int64) << np.arange(n, dtype=np.int64)).sum(axis=1)
    for a in (t, inside, unions):
        a.setflags(write=False)
    return t, inside, unions


def block_counts(n: int) -> np.ndarray:
    return _table_summaries(n)[0]


def covered(n: int) -> np.ndarray:
    """Boolean ``(rows, n)`` table: vertex lies in some block."""
    return _table_summaries(n)[1]


def union_masks(n: int) -> np.ndarray:
    return _table_summaries(n)[2]


def row_to_subpartition(graph: MixedGraph, row: np.ndarray) -> Subpartition:
    t = int(row.max()) if len(row) else 0
    blocks = [[] for _ in range(t)]
    for i, lab in enumerate(row):
        if lab:
            blocks[lab - 1].append(graph.vertices[i])
    return Subpartition(tuple(frozenset(b) for b in blocks))


def enumerate_subpartitions(V: Sequence[str] | Iterable[str], max_n: int | None = None) -> Iterator[Subpartition]:
    """Yield every subpartition of ``V`` once, the empty one first.

    There are Bell(|V|+1) of them. Raises CapacityError above the limit.
    """
    verts = list(V) if isinstance(V, Sequence) else sorted(V)
    check_capacity(len(verts), max_n)
    for row in subpartition_labels(len(verts)):
        t = int(row.max()) if len(row) else 0
        blocks = [[] for _ in range(t)]
        for i, lab in enumerate(row):
            if lab:
                blocks[lab - 1].append(verts[i])
        yield Subpartition(tuple(frozenset(b) for b in blocks))


def family_values(graph: MixedGraph, labels: np.ndarray, arc_weights: np.ndarray | None = None,
                  edge_weights: np.ndarray | None = None) -> np.ndarray:
    """Vectorized ``e_E(P) + sum d^-(X_j)`` for every row of a label table."""
    ew = graph.edge_weights if edge_weights is None else edge_weights
    aw = graph.arc_weights if arc_weights is None else arc_weights
    out = np.zeros(len(labels), dtype=np.int64)
    for u, v in zip(*np.nonzero(ew)):
        out += ew[u, v] * (labels[:, u] != labels[:, v])
    for u, v in zip(*np.nonzero(aw)):
        out += aw[u, v] * ((labels[:, v] != 0) & (labels[:, u] != labels[:, v]))
    return out


@lru_cache(maxsize=None)
def subset_membership(n: int) -> np.ndarray:
    """``(2**n, n)`` boolean table; row ``m`` is the bitmask ``m``."""
    m = np.arange(1 << n, dtype=np.int64)[:, None]
    table = (m >> np.arange(n, dtype=np.int64)) & 1 == 1
    table.setflags(write=False)
    return table


def in_degrees_all(arc_weights: np.ndarray, members: np.ndarray) -> np.ndarray:
    """``d^-(X)`` for every row of a membership table."""
    out = np.zeros(len(members), dtype=np.int64)
    for u, v in zip(*np.nonzero(arc_weights)):
        out += arc_weights[u, v] * (members[:, v] & ~members[:, u])
    return out
