"""Instance builders and generators shared by the test modules."""

import itertools
import random

from arbopack.core import MixedGraph, RootBounds

VERTS = "abcdefgh"


def triangle():
    return MixedGraph("abc", [("a", "b"), ("b", "c"), ("a", "c")])


def k4():
    return MixedGraph("abcd", list(itertools.combinations("abcd", 2)))


def cycle3():
    return MixedGraph("abc", arcs=[("a", "b"), ("b", "c"), ("c", "a")])


def g3():
    """One edge and one arc between a and b; both roots must sit at a."""
    return MixedGraph("ab", [("a", "b")], [("a", "b")]), RootBounds(2, {"a": 2}, {"a": 2, "b": 0})


def element_types(verts):
    return ([("e", u, v) for u, v in itertools.combinations(verts, 2)]
            + [("a", u, v) for u in verts for v in verts if u != v])


def small_graphs(max_n=3, max_elements=4, max_mult=2):
    """Every mixed multigraph on up to ``max_n`` vertices within the limits."""
    for n in range(1, max_n + 1):
        verts = VERTS[:n]
        types = element_types(verts)
        for mult in itertools.product(range(max_mult + 1), repeat=len(types)):
            if sum(mult) > max_elements:
                continue
            edges, arcs = [], []
            for (kind, u, v), m in zip(types, mult):
                (edges if kind == "e" else arcs).extend([(u, v)] * m)
            yield MixedGraph(verts, edges, arcs)


FG_PAIRS = [(f, g) for g in range(3) for f in range(g + 1)]


def small_instances(ks=(1, 2)):
    """The exhaustive family: all small graphs, k in ``ks``, f <= g <= 2 entrywise."""
    for graph in small_graphs():
        for k in ks:
            for combo in itertools.product(FG_PAIRS, repeat=graph.n):
                f = {v: c[0] for v, c in zip(graph.vertices, combo)}
                g = {v: c[1] for v, c in zip(graph.vertices, combo)}
                yield graph, RootBounds(k, f, g)


def random_graph(rng, n, max_elements, edge_share=0.5):
    verts = VERTS[:n]
    m = rng.randint(0, max_elements) if n > 1 else 0
    edges, arcs = [], []
    for _ in range(m):
        u, v = rng.sample(verts, 2)
        (edges if rng.random() < edge_share else arcs).append((u, v))
    return MixedGraph(verts, edges, arcs)


def random_bounds(rng, graph, k):
    f, g = {}, {}
    for v in graph.vertices:
        hi = rng.randint(0, k)
        lo = rng.randint(0, hi) if rng.random() < 0.4 else 0
        f[v], g[v] = lo, hi
    return RootBounds(k, f, g)


def random_instance(rng, ns, max_elements, max_k):
    graph = random_graph(rng, rng.choice(ns), max_elements)
    return graph, random_bounds(rng, graph, rng.randint(1, max_k))


def random_feasible_instances(count, seed, ns=(4, 5, 6, 7), max_k=3):
    """Random instances that pass the conditions, built from unions of random
    spanning mixed arborescences so feasibility is common."""
    from arbopack.conditions import check_feasible

    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.choice(ns)
        k = rng.randint(1, max_k)
        verts = list(VERTS[:n])
        edges, arcs, roots = [], [], []
        for _ in range(k):
            order = verts[:]
            rng.shuffle(order)
            roots.append(order[0])
            for i in range(1, n):
                parent = order[rng.randrange(i)]
                if rng.random() < 0.5:
                    edges.append((parent, order[i]) if rng.random() < 0.5 else (order[i], parent))
                else:
                    arcs.append((parent, order[i]))
        for _ in range(rng.randint(0, 2)):
            u, v = rng.sample(verts, 2)
            (edges if rng.random() < 0.5 else arcs).append((u, v))
        graph = MixedGraph(verts, edges, arcs)
        f, g = {}, {}
        for v in verts:
            c = roots.count(v)
            f[v] = rng.randint(0, c)
            g[v] = rng.randint(c, k)
        bounds = RootBounds(k, f, g)
        if check_feasible(graph, bounds).feasible:
            out.append((graph, bounds))
    return out
