"""Operations behind the command line and the HTTP service.

Every command is a function that takes plain arguments and returns the text
the command prints, so the CLI, the service and the tests share one code
path. CSV output is deterministic unless timing is requested.
"""
from __future__ import annotations

import csv
import io
import math
import statistics
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .arrdepth import verify_arrangement_depth
from .errors import OutOfBox, ParseError
from .geometry import Point
from .pathlen import max_search_path_length
from .scenarios import (
    Scene,
    format_scene,
    gen_random_segments,
    gen_recursive_blocks,
    gen_sqrt_blocks,
    parse_rational,
    parse_scene,
)
from .trapmap import BuildConfig, BuildResult, build, derive_seed

CSV_HEADER = "scenario,n,seed,D,L,ratio,nodes,paths,arrdepth,rebuilds,ms"
SCENARIOS = ("random", "sqrt", "recursive")


@dataclass
class ExperimentRow:
    scenario: str
    n: int
    seed: int
    D: int
    L: int
    ratio: float
    nodes: int
    paths: int
    arrdepth: Optional[int]
    rebuilds: int
    ms: Optional[float]

    def check(self):
        """Row-level invariants; raises AssertionError on violation."""
        if self.L > self.D:
            raise AssertionError(f"L={self.L} exceeds D={self.D}")
        if self.ratio < 1:
            raise AssertionError(f"ratio {self.ratio} below 1")
        if self.arrdepth is not None and self.L > 3 * self.arrdepth:
            raise AssertionError(f"L={self.L} exceeds 3 * arrdepth={self.arrdepth}")

    def csv_fields(self) -> list[str]:
        return [
            self.scenario, str(self.n), str(self.seed), str(self.D), str(self.L),
            f"{self.ratio:.6f}", str(self.nodes), str(self.paths),
            "" if self.arrdepth is None else str(self.arrdepth),
            str(self.rebuilds),
            "" if self.ms is None else f"{self.ms:.1f}",
        ]


def depth_ratio(D: int, L: int) -> float:
    """D / L, with an empty search path counted as length 1."""
    return D / max(L, 1)


def csv_line(values: Sequence[str]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(values)
    return buf.getvalue()


def parse_rows(text: str) -> list[dict]:
    """Data rows of a CSV produced by this module; comment lines are skipped."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return list(csv.DictReader(lines))


def measure(result: BuildResult, scenario: str, seed: int, with_arrdepth: bool,
            elapsed_ms: Optional[float]) -> ExperimentRow:
    dag = result.dag
    if result.L is None:
        result.L, result.feasible_paths = max_search_path_length(dag)
    if with_arrdepth and result.arrangement_depth is None:
        result.arrangement_depth, _ = verify_arrangement_depth(dag, math.inf)
    row = ExperimentRow(
        scenario=scenario, n=len(dag.segments), seed=seed, D=dag.D, L=result.L,
        ratio=depth_ratio(dag.D, result.L), nodes=dag.node_count,
        paths=result.feasible_paths, arrdepth=result.arrangement_depth,
        rebuilds=result.rebuilds, ms=elapsed_ms,
    )
    row.check()
    return row


def build_scene(scene: Scene, config: BuildConfig, seed: int) -> tuple[BuildResult, float]:
    start = time.perf_counter()
    result = build(scene.segments, config, seed=seed, bbox=scene.bbox)
    return result, 1000 * (time.perf_counter() - start)


# -- gen -------------------------------------------------------------------

def make_scene(kind: str, size: int, seed: int = 0, method: str = "arrangement") -> Scene:
    """Scene of a named kind. ``size`` is n for random/recursive and k for sqrt."""
    if kind == "random":
        return gen_random_segments(size, seed, method=method)
    if kind == "sqrt":
        return gen_sqrt_blocks(size)
    if kind == "recursive":
        return gen_recursive_blocks(size)
    raise ValueError(f"unknown scenario {kind!r}; expected one of {SCENARIOS}")


def cmd_gen(kind: str, size: int, seed: int = 0, method: str = "arrangement") -> str:
    return format_scene(make_scene(kind, size, seed, method))


# -- build -----------------------------------------------------------------

def cmd_build(scene_text: str, config: BuildConfig, seed: int, scenario: str = "file",
              timing: bool = False) -> str:
    scene = parse_scene(scene_text)
    result, ms = build_scene(scene, config, seed)
    row = measure(result, scenario, seed, with_arrdepth=True, elapsed_ms=ms if timing else None)
    return CSV_HEADER + "\n" + csv_line(row.csv_fields())


# -- query -----------------------------------------------------------------

def parse_queries(text: str) -> list[Point]:
    points = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise ParseError(f"expected 2 rationals, got {len(tokens)} fields", lineno)
        points.append(Point(*(parse_rational(t, lineno) for t in tokens)))
    return points


def locate_lines(dag, points: Iterable[Point]) -> list[str]:
    out = []
    for p in points:
        try:
            res = dag.locate(p)
        except OutOfBox:
            out.append("OUTSIDE -")
            continue
        out.append(f"{res.kind} {res.path_len}")
    return out


def cmd_query(scene_text: str, queries_text: str, config: BuildConfig, seed: int) -> str:
    scene = parse_scene(scene_text)
    points = parse_queries(queries_text)
    result = build(scene.segments, config, seed=seed, bbox=scene.bbox)
    lines = locate_lines(result.dag, points)
    return "".join(line + "\n" for line in lines)


# -- ratio -----------------------------------------------------------------

@dataclass
class RatioSummary:
    scenario: str
    n: int
    runs: int
    ratio_mean: float
    ratio_min: float
    ratio_max: float

    def line(self) -> str:
        return (f"# summary scenario={self.scenario} n={self.n} runs={self.runs} "
                f"ratio_mean={self.ratio_mean:.6f} ratio_min={self.ratio_min:.6f} "
                f"ratio_max={self.ratio_max:.6f}\n")


def ratio_experiment(scenario: str, sizes: Sequence[int], repeats: int, seed: int,
                     config: Optional[BuildConfig] = None, with_arrdepth: bool = False,
                     timing: bool = False) -> tuple[list[ExperimentRow], list[RatioSummary]]:
    """Build each scene ``repeats`` times under different insertion orders.

    One scene is generated per size (random scenes use a seed derived from
    ``seed`` and the size); repeat ``r`` builds it with seed
    ``derive_seed(scene_seed, r)``.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    config = config or BuildConfig(verifier="none")
    rows, summaries = [], []
    for size in sizes:
        scene_seed = derive_seed(seed, size)
        scene = make_scene(scenario, size, scene_seed)
        batch = []
        for r in range(repeats):
            build_seed = derive_seed(scene_seed, r)
            result, ms = build_scene(scene, config, build_seed)
            batch.append(measure(result, scenario, build_seed, with_arrdepth,
                                 ms if timing else None))
        ratios = [row.ratio for row in batch]
        summaries.append(RatioSummary(scenario, len(scene), repeats, statistics.fmean(ratios),
                                      min(ratios), max(ratios)))
        rows.extend(batch)
    return rows, summaries


def cmd_ratio(scenario: str, sizes: Sequence[int], repeats: int, seed: int,
              config: Optional[BuildConfig] = None, with_arrdepth: bool = False,
              timing: bool = False) -> str:
    rows, summaries = ratio_experiment(scenario, sizes, repeats, seed, config,
                                       with_arrdepth, timing)
    out = [CSV_HEADER + "\n"]
    out.extend(csv_line(row.csv_fields()) for row in rows)
    out.extend(s.line() for s in summaries)
    return "".join(out)


def read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")
