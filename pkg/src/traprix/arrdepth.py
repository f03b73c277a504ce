"""Maximum depth of the arrangement of every trapezoid created by the build.

Pipeline: order the curves bottom to top, reduce each logged trapezoid to
an all-open rectangle whose y-extent is the pair of curve ranks, and run a
top-to-bottom coverage sweep over those rectangles.

The sweep handles every combination of open and closed sides. Its x-axis
is split into the leaves ``[k0,k0], (k0,k1), [k1,k1], ..., [km,km]`` over the
sorted distinct keys, and each internal tree node carries four additive
counters ``l, r, lm, rm`` describing pending updates for its two children.
A leaf carries ``c`` (current coverage since its last visit) and ``cm`` (the
best coverage it has seen).
"""
from __future__ import annotations

import heapq
import random
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import CycleDetected, UnknownCurve
from .geometry import Segment
from .trapmap import TrapezoidalMap, TrapezoidRecord


@dataclass(frozen=True)
class OpenRect:
    """Axis-parallel rectangle with an independent open/closed flag per side.

    ``x_lo``/``x_hi`` are any mutually comparable keys (lexicographic points
    in the reduction); ``y_lo``/``y_hi`` are integer ranks or numbers.
    """

    x_lo: Any
    x_hi: Any
    y_lo: Any
    y_hi: Any
    left_closed: bool = False
    right_closed: bool = False
    bottom_closed: bool = False
    top_closed: bool = False

    def is_empty(self) -> bool:
        if self.x_hi < self.x_lo or self.y_hi < self.y_lo:
            return True
        if self.x_lo == self.x_hi and not (self.left_closed and self.right_closed):
            return True
        if self.y_lo == self.y_hi and not (self.bottom_closed and self.top_closed):
            return True
        return False


# -- curve order -----------------------------------------------------------

def compute_order(curves: Sequence[Segment], trapezoids: Iterable) -> dict[Segment, int]:
    """Rank curves 1..n so that a curve lying below another gets the smaller rank.

    Each live trapezoid contributes the edge bottom -> top. Curves that
    the edges leave unordered are released in lexicographic order of their
    endpoints, which makes the result deterministic.
    """
    succ: dict[Segment, set[Segment]] = {c: set() for c in curves}
    indeg = {c: 0 for c in curves}
    for t in trapezoids:
        if t.top not in succ or t.bottom not in succ:
            raise UnknownCurve(f"trapezoid bounded by an unknown curve: {t}")
        if t.top not in succ[t.bottom]:
            succ[t.bottom].add(t.top)
            indeg[t.top] += 1
    heap = [(c.left, c.right, c) for c in curves if indeg[c] == 0]
    heapq.heapify(heap)
    rank = {}
    while heap:
        _, _, c = heapq.heappop(heap)
        rank[c] = len(rank) + 1
        for nxt in succ[c]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                heapq.heappush(heap, (nxt.left, nxt.right, nxt))
    if len(rank) != len(succ):
        raise CycleDetected("the below/above relation among curves has a cycle")
    return rank


def dag_order(dag: TrapezoidalMap) -> dict[Segment, int]:
    return compute_order(dag.curves(), dag.live_trapezoids())


def reduce_trapezoids(log: Iterable[TrapezoidRecord], order: dict[Segment, int]) -> list[OpenRect]:
    """One all-open rectangle per record: same x-keys, y-extent = curve ranks."""
    rects = []
    for rec in log:
        try:
            lo, hi = order[rec.bottom], order[rec.top]
        except KeyError as exc:
            raise UnknownCurve(f"no rank for curve {exc.args[0]}") from None
        rects.append(OpenRect(rec.left, rec.right, lo, hi))
    return rects


# -- coverage sweep --------------------------------------------------------

CLOSE_OPEN_BOTTOM, OPEN_CLOSED_TOP, CLOSE_CLOSED_BOTTOM, OPEN_OPEN_TOP = 1, 2, 3, 4
GROUP_ORDER = (CLOSE_OPEN_BOTTOM, OPEN_CLOSED_TOP, CLOSE_CLOSED_BOTTOM, OPEN_OPEN_TOP)


class CoverageTree:
    """Balanced tree over ``n_leaves`` leaf intervals with two-path updates."""

    def __init__(self, n_leaves: int):
        self.n = n_leaves
        size = 4 * max(1, n_leaves)
        self.l = [0] * size
        self.r = [0] * size
        self.lm = [0] * size
        self.rm = [0] * size
        self.c = [0] * size
        self.cm = [0] * size

    # pending updates (a, am) arriving at node v from its parent are newer
    # than anything already stored at v
    def _apply(self, v: int, lo: int, hi: int, a: int, am: int):
        if lo == hi:
            c = self.c[v]
            if c + am > self.cm[v]:
                self.cm[v] = c + am
            self.c[v] = c + a
        else:
            if self.l[v] + am > self.lm[v]:
                self.lm[v] = self.l[v] + am
            self.l[v] += a
            if self.r[v] + am > self.rm[v]:
                self.rm[v] = self.r[v] + am
            self.r[v] += a

    def add(self, a: int, b: int, d: int):
        """Add ``d`` to the coverage of leaves ``a..b`` inclusive."""
        if a > b:
            return
        if self.n == 1:
            self._apply(1, 0, 0, d, max(d, 0))
            return
        self._update(1, 0, self.n - 1, a, b, d)

    def _update(self, v: int, lo: int, hi: int, a: int, b: int, d: int):
        # v is internal and [lo, hi] is only partly covered, or v is the root
        mid = (lo + hi) // 2
        if a <= mid:
            if a <= lo and mid <= b:
                self.l[v] += d
                if self.l[v] > self.lm[v]:
                    self.lm[v] = self.l[v]
            else:
                self._apply(2 * v, lo, mid, self.l[v], self.lm[v])
                self.l[v] = self.lm[v] = 0
                self._update(2 * v, lo, mid, a, b, d)
        if b > mid:
            if a <= mid + 1 and hi <= b:
                self.r[v] += d
                if self.r[v] > self.rm[v]:
                    self.rm[v] = self.r[v]
            else:
                self._apply(2 * v + 1, mid + 1, hi, self.r[v], self.rm[v])
                self.r[v] = self.rm[v] = 0
                self._update(2 * v + 1, mid + 1, hi, a, b, d)

    def leaf_view(self) -> list[tuple[int, int]]:
        """``(current, best)`` per leaf from the invariants, without mutating."""
        out = []

        def walk(v, lo, hi, t, tm):
            if lo == hi:
                out.append((self.c[v] + t, max(self.cm[v], self.c[v] + tm)))
                return
            mid = (lo + hi) // 2
            walk(2 * v, lo, mid, self.l[v] + t, max(self.lm[v], self.l[v] + tm))
            walk(2 * v + 1, mid + 1, hi, self.r[v] + t, max(self.rm[v], self.r[v] + tm))

        walk(1, 0, self.n - 1, 0, 0)
        return out

    def push_all(self) -> int:
        """Propagate every pending counter to the leaves; return max ``cm``."""
        best = 0
        stack = [(1, 0, self.n - 1)]
        while stack:
            v, lo, hi = stack.pop()
            if lo == hi:
                if self.cm[v] > best:
                    best = self.cm[v]
                continue
            mid = (lo + hi) // 2
            self._apply(2 * v, lo, mid, self.l[v], self.lm[v])
            self._apply(2 * v + 1, mid + 1, hi, self.r[v], self.rm[v])
            self.l[v] = self.lm[v] = self.r[v] = self.rm[v] = 0
            stack.append((2 * v, lo, mid))
            stack.append((2 * v + 1, mid + 1, hi))
        return best


def leaf_range(rect: OpenRect, key_index: dict) -> tuple[int, int]:
    """Leaves covered by the x-extent of ``rect``.

    Key ``k_i`` owns leaf ``2i``; the open gap after it is leaf ``2i+1``.
    """
    a = key_index[rect.x_lo]
    b = key_index[rect.x_hi]
    lo = 2 * a if rect.left_closed else 2 * a + 1
    hi = 2 * b if rect.right_closed else 2 * b - 1
    return lo, hi


def max_rectangle_depth(rects: Sequence[OpenRect], group_order: Sequence[int] = GROUP_ORDER,
                        shuffle_seed: Optional[int] = None,
                        audit: Optional[Callable[[CoverageTree, list], None]] = None) -> int:
    """Maximum number of rectangles covering a common point.

    ``group_order`` and ``shuffle_seed`` exist for testing: the first
    reorders the four event groups at equal y, the second permutes events
    inside each group. ``audit(tree, leaf_ranges)`` is called after every
    event.
    """
    rects = [r for r in rects if not r.is_empty()]
    if not rects:
        return 0
    keys = sorted({r.x_lo for r in rects} | {r.x_hi for r in rects})
    key_index = {k: i for i, k in enumerate(keys)}
    tree = CoverageTree(2 * len(keys) - 1)
    position = {g: i for i, g in enumerate(group_order)}
    events = []
    for idx, r in enumerate(rects):
        lo, hi = leaf_range(r, key_index)
        opening = OPEN_CLOSED_TOP if r.top_closed else OPEN_OPEN_TOP
        closing = CLOSE_CLOSED_BOTTOM if r.bottom_closed else CLOSE_OPEN_BOTTOM
        # sweeping downward: higher y first
        events.append((-r.y_hi, position[opening], idx, lo, hi, 1))
        events.append((-r.y_lo, position[closing], idx, lo, hi, -1))
    if shuffle_seed is None:
        events.sort()
    else:
        rng = random.Random(shuffle_seed)
        tagged = [(e[0], e[1], rng.random(), e) for e in events]
        tagged.sort()
        events = [t[3] for t in tagged]
    applied = []
    for _, _, idx, lo, hi, d in events:
        tree.add(lo, hi, d)
        if audit is not None:
            applied.append((lo, hi, d))
            audit(tree, applied)
    return tree.push_all()


def brute_force_depth(rects: Sequence[OpenRect]) -> int:
    """Max cover over a sample grid of every key, rank and midpoint between them."""
    rects = list(rects)
    if not rects:
        return 0
    xs = sorted({r.x_lo for r in rects} | {r.x_hi for r in rects})
    ys = sorted({r.y_lo for r in rects} | {r.y_hi for r in rects})
    xi = {k: 2 * i for i, k in enumerate(xs)}
    yi = {k: 2 * i for i, k in enumerate(ys)}
    # sample positions: even = a key itself, odd = strictly between two keys
    px = np.arange(2 * len(xs) - 1)
    py = np.arange(2 * len(ys) - 1)
    grid = np.zeros((len(px), len(py)), dtype=np.int64)
    for r in rects:
        a, b = xi[r.x_lo], xi[r.x_hi]
        c, d = yi[r.y_lo], yi[r.y_hi]
        mx = ((px > a) | (r.left_closed & (px == a))) & ((px < b) | (r.right_closed & (px == b)))
        my = ((py > c) | (r.bottom_closed & (py == c))) & ((py < d) | (r.top_closed & (py == d)))
        grid += np.outer(mx, my)
    return int(grid.max())


def verify_arrangement_depth(dag: TrapezoidalMap, bound: float) -> tuple[int, bool]:
    """Max depth of the created-trapezoid arrangement and whether it is within ``bound``."""
    rects = reduce_trapezoids(dag.trapezoid_log, dag_order(dag))
    depth = max_rectangle_depth(rects)
    return depth, depth <= bound
