"""The ten acceptance criteria, each at its stated size and tolerance.

Every test records a one-line verdict that conftest.py prints in the
terminal summary. A test records its verdict before asserting, so a
failing criterion still gets its line.
"""
import math
import random
import statistics
import time

import pytest

import oracles
from traprix import harness
from traprix.arrdepth import (
    OpenRect,
    brute_force_depth,
    dag_order,
    max_rectangle_depth,
    reduce_trapezoids,
)
from traprix.pathlen import max_search_path_length
from traprix.scenarios import gen_random_segments, gen_recursive_blocks, gen_sqrt_blocks
from traprix.trapmap import FACE, BuildConfig, build, derive_seed

pytestmark = pytest.mark.acceptance

# mean feasible_path_count / (n log2 n) over the 30 scenes below measured
# 0.661 (per-scene 0.58 to 0.73); frozen with headroom as a regression bound
PATH_COUNT_C = 0.75


def record(cid, ok, detail, elapsed, budget):
    ok = bool(ok) and elapsed < budget
    oracles.ACCEPTANCE_RESULTS[cid] = (ok, f"{detail} [{elapsed:.1f}s / {budget}s]")
    assert ok, oracles.ACCEPTANCE_RESULTS[cid][1]


def shuffled_map(scene, seed):
    return oracles.build_map(scene.segments, scene.bbox, order_seed=seed)


def test_criterion_01_oracle_point_location():
    start = time.perf_counter()
    mismatches = queries = 0
    for i in range(100):
        rng = random.Random(derive_seed(101, i))
        scene = gen_random_segments(rng.randint(1, 50), rng.getrandbits(64))
        m = shuffled_map(scene, rng.getrandbits(64))
        scan, live = oracles.live_scan(m)
        for _ in range(1000):
            p = oracles.random_query(rng, -2, 2)
            res = m.locate(p)
            hits = scan.containing(p)
            queries += 1
            if res.kind == FACE:
                good = len(hits) == 1 and live[hits[0]] is res.trapezoid
            else:
                good = not hits and oracles.on_some_segment(scene.segments, p)
            mismatches += not good
    record(1, mismatches == 0, f"{queries} queries, {mismatches} disagreements",
           time.perf_counter() - start, 60)


def test_criterion_02_reduction_preserves_depth():
    start = time.perf_counter()
    bad = 0
    for i in range(200):
        rng = random.Random(derive_seed(202, i))
        scene = gen_random_segments(rng.randint(1, 20), rng.getrandbits(64))
        m = shuffled_map(scene, rng.getrandbits(64))
        rects = reduce_trapezoids(m.trapezoid_log, dag_order(m))
        bad += max_rectangle_depth(rects) != oracles.sheared_max_cover(m)
    record(2, bad == 0, f"200 scenes, {bad} mismatches", time.perf_counter() - start, 60)


def _rect_instance(rng):
    size = rng.randint(1, 200)
    span = rng.randint(1, 40)
    rects = []
    for _ in range(size):
        if rects and rng.random() < 0.2:
            # reuse a boundary of an earlier rectangle
            base = rng.choice(rects)
            x0 = base.x_hi if rng.random() < 0.5 else base.x_lo
            y0 = base.y_hi if rng.random() < 0.5 else base.y_lo
        else:
            x0, y0 = rng.randint(0, span), rng.randint(0, span)
        x1, y1 = x0 + rng.randint(0, span // 2 + 1), y0 + rng.randint(0, span // 2 + 1)
        flags = [rng.random() < 0.5 for _ in range(4)]
        rects.append(OpenRect(x0, x1, y0, y1, *flags))
    return rects


def test_criterion_03_sweep_matches_brute_force():
    start = time.perf_counter()
    bad = 0
    for i in range(1000):
        rects = _rect_instance(random.Random(derive_seed(303, i)))
        live = [r for r in rects if not r.is_empty()]
        bad += max_rectangle_depth(rects) != brute_force_depth(live)
    record(3, bad == 0, f"1000 instances, {bad} mismatches", time.perf_counter() - start, 120)


def test_criterion_04_path_at_most_three_times_depth():
    start = time.perf_counter()
    violations = 0
    worst = 0.0
    for i in range(50):
        rng = random.Random(derive_seed(404, i))
        scene = gen_random_segments(rng.randint(1, 200), rng.getrandbits(64))
        m = shuffled_map(scene, rng.getrandbits(64))
        log = oracles.TrapezoidScan([tuple(r) for r in m.trapezoid_log])
        for _ in range(1000):
            p = oracles.random_query(rng, -2, 2)
            depth = len(log.containing(p))
            length = m.locate(p).path_len
            violations += length > 3 * depth
            worst = max(worst, length / depth)
    record(4, violations == 0,
           f"50000 queries, {violations} violations, max path/depth {worst:.2f}",
           time.perf_counter() - start, 120)


def test_criterion_05_ratio_experiment():
    start = time.perf_counter()
    rows, summaries = harness.ratio_experiment("random", [250, 500, 1000, 2000], 20, seed=0)
    means = [s.ratio_mean for s in summaries]
    peak = max(s.ratio_max for s in summaries)
    detail = "mean D/L " + ", ".join(f"n={s.n}: {s.ratio_mean:.3f}" for s in summaries)
    record(5, max(means) <= 1.2 and peak <= 1.4, f"{detail}; max {peak:.3f}",
           time.perf_counter() - start, 300)


def _top_to_bottom(scene):
    return build(scene.segments, BuildConfig(verifier="none", order="suggested"), bbox=scene.bbox)


def test_criterion_06_sqrt_block_separation():
    start = time.perf_counter()
    stats = []
    for k in (8, 16, 32):
        dag = _top_to_bottom(gen_sqrt_blocks(k)).dag
        L, _ = max_search_path_length(dag)
        stats.append((k, dag.D, L))
    ratios = [D / L for _, D, L in stats]
    ok = (all(a < b for a, b in zip(ratios, ratios[1:]))
          and all(D >= k * k / 2 and L <= 10 * k for k, D, L in stats))
    detail = ", ".join(f"k={k}: D={D} L={L}" for k, D, L in stats)
    record(6, ok, detail, time.perf_counter() - start, 60)


def test_criterion_07_recursive_block_separation():
    start = time.perf_counter()
    stats = []
    for n in (256, 1024):
        dag = _top_to_bottom(gen_recursive_blocks(n)).dag
        L, _ = max_search_path_length(dag)
        stats.append((n, dag.D, L))
    ok = all(L <= 8 * math.log2(n) and D >= n / 4 for n, D, L in stats)
    detail = ", ".join(f"n={n}: D={D} L={L}" for n, D, L in stats)
    record(7, ok, detail, time.perf_counter() - start, 60)


def test_criterion_08_path_bound_on_every_dag():
    # conftest.py checks L <= D on every map any test builds; here the
    # bound is also checked on the adversarial constructions directly
    start = time.perf_counter()
    checked = bad = 0
    for scene in (gen_sqrt_blocks(12), gen_recursive_blocks(300), gen_random_segments(300, 8)):
        for seed in range(3):
            config = BuildConfig(verifier="none", order="suggested" if seed == 0 else "shuffled")
            dag = build(scene.segments, config, seed=seed, bbox=scene.bbox).dag
            checked += 1
            bad += max_search_path_length(dag).L > dag.D
    record(8, bad == 0, f"{checked} direct checks, {bad} violations; global hook active",
           time.perf_counter() - start, 60)


def test_criterion_09_path_count_bound():
    start = time.perf_counter()
    n = 500
    values = []
    for i in range(30):
        scene = gen_random_segments(n, derive_seed(2024, i))
        result = build(scene.segments, BuildConfig(verifier="none"), seed=derive_seed(7, i),
                       bbox=scene.bbox)
        _, paths = max_search_path_length(result.dag)
        values.append(paths / (n * math.log2(n)))
    mean = statistics.fmean(values)
    record(9, mean <= PATH_COUNT_C, f"mean paths/(n log2 n) = {mean:.3f} <= C = {PATH_COUNT_C}",
           time.perf_counter() - start, 120)


def test_criterion_10_determinism():
    start = time.perf_counter()
    runs = [harness.cmd_ratio("random", [64, 128], 5, seed=42, with_arrdepth=True)
            for _ in range(2)]
    runs += [harness.cmd_ratio("sqrt", [6], 3, seed=42,
                               config=BuildConfig(verifier="lqpl", order="suggested"))
             for _ in range(2)]
    ok = runs[0] == runs[1] and runs[2] == runs[3]
    record(10, ok, "repeated cmd_ratio output byte-identical" if ok else "outputs differ",
           time.perf_counter() - start, 60)
