"""Acceptance criteria 1-9.

Each test records one PASS/FAIL line (shown in the terminal summary and on
stdout with ``-s``). Criteria 1, 3, 4 and 5 share one sweep over the
exhaustive small family so the oracle and the solver each run once per
instance.
"""

import contextlib
import io
import json
import random
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from arbopack.cli import main
from arbopack.conditions import check_edmonds, check_feasible
from arbopack.core import MixedGraph
from arbopack.errors import InternalConsistencyError
from arbopack.io import load_instance
from arbopack.orient import tight_families
from arbopack.pack import safe_arc, solve
from arbopack.pieo import laminarize_type1
from arbopack.verify import oracle_pack_exists, verify_packing

from conftest import record
from helpers import random_feasible_instances, random_graph, random_instance, small_instances
from test_pieo import assert_guarantees, random_pair

pytestmark = pytest.mark.acceptance

DATA = Path(__file__).parent / "data"
INSTANCES = sorted((DATA / "instances").glob("*.json"))


def crossing_edge_pairs(graph: MixedGraph, masks: np.ndarray) -> int:
    """Edges uv for which one tight union holds u but not v and another holds v but not u."""
    bad = 0
    for u, v in graph.edge_index_pairs:
        has_u = (masks >> u) & 1
        has_v = (masks >> v) & 1
        if (has_u & ~has_v & 1).any() and (has_v & ~has_u & 1).any():
            bad += 1
    return bad


class SolverAudit:
    """Solver soundness plus paranoid-mode violations over a stream of instances."""

    def __init__(self):
        self.runs = 0
        self.unsound = []
        self.paranoid_failures = []
        self.missing = []

    def run(self, graph, bounds):
        self.runs += 1
        try:
            out = solve(graph, bounds, paranoid=True)
        except InternalConsistencyError as exc:
            self.paranoid_failures.append((graph, bounds, str(exc)))
            return
        if out.packing is None:
            self.missing.append((graph, bounds))
        elif not verify_packing(graph, bounds, out.packing).ok:
            self.unsound.append((graph, bounds))


@pytest.fixture(scope="module")
def exhaustive():
    t0 = time.perf_counter()
    total, disagreements, feasible = 0, [], []
    for graph, bounds in small_instances():
        total += 1
        claimed = check_feasible(graph, bounds).feasible
        exists, witness = oracle_pack_exists(graph, bounds)
        if claimed != exists:
            disagreements.append((graph, bounds))
        if exists and not verify_packing(graph, bounds, witness).ok:
            disagreements.append((graph, bounds))
        if claimed:
            feasible.append((graph, bounds))
    return {"total": total, "disagreements": disagreements, "feasible": feasible,
            "seconds": time.perf_counter() - t0}


@pytest.fixture(scope="module")
def randomized():
    t0 = time.perf_counter()
    rng = random.Random(20240601)
    disagreements, feasible = [], []
    for _ in range(1000):
        graph, bounds = random_instance(rng, (4, 5), 8, 3)
        claimed = check_feasible(graph, bounds).feasible
        if claimed != oracle_pack_exists(graph, bounds)[0]:
            disagreements.append((graph, bounds))
        if claimed:
            feasible.append((graph, bounds))
    return {"disagreements": disagreements, "feasible": feasible, "seconds": time.perf_counter() - t0}


@pytest.fixture(scope="module")
def audit(exhaustive, randomized):
    a = SolverAudit()
    for graph, bounds in exhaustive["feasible"] + randomized["feasible"]:
        a.run(graph, bounds)
    for graph, bounds in random_feasible_instances(500, seed=7, ns=(4, 5, 6, 7)):
        a.run(graph, bounds)
    return a


def test_criterion_1_exhaustive_equivalence(exhaustive):
    ok = not exhaustive["disagreements"] and exhaustive["total"] >= 10_000 and exhaustive["seconds"] < 300
    record(1, ok, f"{exhaustive['total']} instances, {len(exhaustive['disagreements'])} disagreements, "
                  f"{exhaustive['seconds']:.1f}s")
    assert ok


def test_criterion_2_randomized_equivalence(randomized):
    ok = not randomized["disagreements"] and randomized["seconds"] < 600
    record(2, ok, f"1000 instances, {len(randomized['disagreements'])} disagreements, "
                  f"{randomized['seconds']:.1f}s")
    assert ok


def test_criterion_3_solver_soundness(audit):
    ok = not audit.unsound and not audit.missing and not audit.paranoid_failures
    record(3, ok, f"{audit.runs} feasible instances solved, {len(audit.unsound)} invalid packings, "
                  f"{len(audit.missing)} missing")
    assert ok


def test_criterion_4_paranoid_invariants(audit):
    ok = not audit.paranoid_failures
    record(4, ok, f"{audit.runs} paranoid solver runs, {len(audit.paranoid_failures)} violations")
    assert ok, audit.paranoid_failures[:3]


def test_criterion_5_tight_families_do_not_cross(exhaustive):
    violations = 0
    for graph, bounds in exhaustive["feasible"]:
        if not graph.edges:
            continue
        T = tight_families(graph, bounds)
        violations += crossing_edge_pairs(graph, np.concatenate([T.e1_masks, T.e2_masks]).astype(np.int64))
    ok = violations == 0
    record(5, ok, f"{len(exhaustive['feasible'])} feasible instances, {violations} crossing edges")
    assert ok


def test_criterion_6_pieo_suite():
    t0 = time.perf_counter()
    rng = random.Random(99)
    failures = 0
    for _ in range(1000):
        F1, F2 = random_pair(rng)
        for order in (None, random.Random(rng.random())):
            try:
                assert_guarantees(F1, F2, laminarize_type1(F1, F2, rng=order, check=True))
            except AssertionError:
                failures += 1
    seconds = time.perf_counter() - t0
    ok = failures == 0 and seconds < 60
    record(6, ok, f"1000 pairs x 2 orders, {failures} violations, {seconds:.1f}s")
    assert ok


def cli(*argv):
    out = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(io.StringIO()):
        code = main([str(a) for a in argv])
    return code, out.getvalue()


def test_criterion_7_classical_cases():
    problems = []
    inst = DATA / "instances"

    code, out = cli("solve", "--input", inst / "k4_k2.json")
    trees = json.loads(out)["trees"] if code == 0 else []
    if not (len(trees) == 2 and all(len(t["edges"]) == 3 and not t["arcs"] for t in trees)
            and not set(trees[0]["edges"]) & set(trees[1]["edges"])):
        problems.append("K4 k=2")

    code, out = cli("check", "--json", "--input", inst / "triangle_k2.json")
    doc = json.loads(out)
    if code != 1 or doc["witness"] != [["a"], ["b"], ["c"]] or (doc["lhs"], doc["rhs"]) != (3, 4):
        problems.append("triangle k=2")

    for r in "abc":
        code, out = cli("solve", "--input", inst / f"cycle3_root_{r}.json")
        if code != 0 or [t["root"] for t in json.loads(out)["trees"]] != [r]:
            problems.append(f"3-cycle rooted at {r}")
    graph, _ = load_instance(inst / "cycle3_k2.json")
    v = check_edmonds(graph, {"a": 2})
    if cli("solve", "--input", inst / "cycle3_k2.json")[0] != 1 or v is None or v.witness != {"b"}:
        problems.append("3-cycle k=2")

    for path in INSTANCES:
        golden = json.loads((DATA / "golden" / path.name).read_text())
        code, out = cli("solve", "--input", path)
        if code != golden["solve_exit"] or out != (DATA / "golden" / f"{path.stem}.solve.txt").read_text():
            problems.append(f"golden solve {path.stem}")
        if golden["oracle"] is not None:
            graph, bounds = load_instance(path)
            if oracle_pack_exists(graph, bounds)[0] != golden["oracle"]["exists"]:
                problems.append(f"golden oracle {path.stem}")
            if golden["oracle"]["exists"] != (code == 0):
                problems.append(f"oracle vs solver {path.stem}")

    ok = not problems
    record(7, ok, f"{len(INSTANCES)} golden instances, problems: {problems or 'none'}")
    assert ok


def test_criterion_8_backend_agreement():
    rng = random.Random(8)
    edmonds_bad = arc_bad = arcs_checked = 0
    for _ in range(1000):
        D = random_graph(rng, rng.randint(1, 8), 20, edge_share=0.0)
        roots = {v: rng.randint(0, 2) for v in D.vertices}
        enum = check_edmonds(D, roots, backend="enum")
        flow = check_edmonds(D, roots, backend="flow")
        if (enum is None) != (flow is None) or (flow is not None and flow.lhs >= flow.rhs):
            edmonds_bad += 1
        tree = {D.vertices[0]} | {v for v in D.vertices[1:] if rng.random() < 0.4}
        remaining = {v: rng.randint(0, 1) for v in D.vertices}
        for a, (u, v) in enumerate(D.arcs):
            if u in tree and v not in tree:
                arcs_checked += 1
                if safe_arc(D, tree, remaining, a, "enum") != safe_arc(D, tree, remaining, a, "flow"):
                    arc_bad += 1
    ok = edmonds_bad == 0 and arc_bad == 0
    record(8, ok, f"1000 digraphs, {edmonds_bad} cut-condition and {arc_bad}/{arcs_checked} "
                  f"safe-arc disagreements")
    assert ok


def test_criterion_9_determinism():
    mismatched = []
    for path in INSTANCES:
        args = [sys.executable, "-m", "arbopack", "solve", "--input", str(path)]
        runs = {subprocess.run(args, capture_output=True).stdout for _ in range(2)}
        runs.add(cli("solve", "--input", path)[1].encode())
        runs.add((DATA / "golden" / f"{path.stem}.solve.txt").read_bytes())
        if len(runs) != 1:
            mismatched.append(path.stem)
    ok = not mismatched
    record(9, ok, f"{len(INSTANCES)} instances, byte-identical: {'yes' if ok else mismatched}")
    assert ok
