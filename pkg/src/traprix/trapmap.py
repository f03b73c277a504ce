"""Trapezoidal map and search DAG built by randomized incremental construction.

Degeneracies are handled symbolically: every x-comparison is a
lexicographic comparison of points, so two covertical endpoints bound a
zero-width trapezoid instead of colliding. Leaves store their depth (node
count on the longest root-to-leaf path, leaf included) and the map keeps the
maximum, so ``D`` is available in O(1) at any time.
"""
from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

from .errors import (
    DegenerateBox,
    DuplicateSegment,
    IntersectsExisting,
    OutOfBox,
    RebuildLimitExceeded,
    ValidationFailed,
)
from .geometry import Number, Point, Segment, point, rational, segments_interior_disjoint

XNODE, YNODE, LEAF = 0, 1, 2


class BBox(NamedTuple):
    x0: Fraction
    y0: Fraction
    x1: Fraction
    y1: Fraction

    @classmethod
    def of(cls, x0: Number, y0: Number, x1: Number, y1: Number) -> "BBox":
        return cls(rational(x0), rational(y0), rational(x1), rational(y1))

    def strictly_contains(self, p: Point) -> bool:
        return self.x0 < p.x < self.x1 and self.y0 < p.y < self.y1


def bbox_around(segments: Iterable[Segment], pad: Number = 1) -> BBox:
    """Axis-parallel frame strictly enclosing ``segments`` with margin ``pad``."""
    pad = rational(pad)
    xs, ys = [], []
    for s in segments:
        xs += (s.left.x, s.right.x)
        ys += (s.left.y, s.right.y)
    if not xs:
        return BBox.of(-1, -1, 1, 1)
    return BBox(min(xs) - pad, min(ys) - pad, max(xs) + pad, max(ys) + pad)


class Trapezoid:
    __slots__ = ("top", "bottom", "leftp", "rightp", "ul", "ll", "ur", "lr", "node", "alive")

    def __init__(self, top: Segment, bottom: Segment, leftp: Point, rightp: Optional[Point]):
        self.top = top
        self.bottom = bottom
        self.leftp = leftp
        self.rightp = rightp
        self.ul = self.ll = self.ur = self.lr = None
        self.node = None
        self.alive = True

    def neighbors(self):
        return (self.ul, self.ll, self.ur, self.lr)

    def contains(self, p: Point) -> bool:
        """Open-interior test under the lexicographic convention."""
        return (self.leftp < p < self.rightp
                and self.bottom.side(p) > 0 and self.top.side(p) < 0)

    def __repr__(self):
        return f"Trapezoid({self.leftp}..{self.rightp}, top={self.top}, bottom={self.bottom})"


class TrapezoidRecord(NamedTuple):
    left: Point
    right: Point
    top: Segment
    bottom: Segment


class Node:
    """DAG node. ``kind`` selects which fields are meaningful.

    XNODE: ``point``, ``left``, ``right``; YNODE: ``segment``, ``above``,
    ``below`` and ``span``, the lexicographic x-range of the region the node
    splits; LEAF: ``trap``.
    """

    __slots__ = ("kind", "point", "segment", "left", "right", "above", "below", "trap", "depth",
                 "span")

    def __init__(self):
        self.kind = LEAF
        self.point = self.segment = None
        self.left = self.right = self.above = self.below = None
        self.trap = None
        self.depth = 0
        self.span = None

    def children(self):
        if self.kind == XNODE:
            return (self.left, self.right)
        if self.kind == YNODE:
            return (self.above, self.below)
        return ()

    def __repr__(self):
        if self.kind == XNODE:
            return f"XNode({self.point}, depth={self.depth})"
        if self.kind == YNODE:
            return f"YNode({self.segment}, depth={self.depth})"
        return f"Leaf(depth={self.depth})"


FACE, EDGE, VERTEX = "FACE", "EDGE", "VERTEX"


class LocateResult(NamedTuple):
    kind: str
    path_len: int
    trapezoid: Optional[Trapezoid] = None
    segment: Optional[Segment] = None
    point: Optional[Point] = None


class InsertStats(NamedTuple):
    trapezoids_killed: int
    trapezoids_created: int
    merges: int
    new_D: int


class DagStats(NamedTuple):
    n_segments: int
    node_count: int
    leaf_count: int
    D: int


class TrapezoidalMap:
    """The trapezoidal map of a set of segments inside a bounding frame."""

    def __init__(self, bbox: BBox, seed: int = 0):
        bbox = BBox(*(rational(v) for v in bbox))
        if not (bbox.x0 < bbox.x1 and bbox.y0 < bbox.y1):
            raise DegenerateBox(f"bounding box {bbox} has no interior")
        self.bbox = bbox
        self.rng_seed = seed
        self.frame_bottom = Segment(Point(bbox.x0, bbox.y0), Point(bbox.x1, bbox.y0))
        self.frame_top = Segment(Point(bbox.x0, bbox.y1), Point(bbox.x1, bbox.y1))
        frame = Trapezoid(self.frame_top, self.frame_bottom,
                          Point(bbox.x0, bbox.y0), Point(bbox.x1, bbox.y1))
        root = Node()
        root.trap = frame
        root.depth = 1
        frame.node = root
        self.root = root
        self.D = 1
        self.node_count = 1
        self.leaf_count = 1
        self.segments: list[Segment] = []
        self._segment_set: set[Segment] = set()
        self.trapezoid_log: list[TrapezoidRecord] = []
        self._log(frame)

    # -- bookkeeping -----------------------------------------------------

    def _log(self, t: Trapezoid):
        self.trapezoid_log.append(TrapezoidRecord(t.leftp, t.rightp, t.top, t.bottom))

    def stats(self) -> DagStats:
        return DagStats(len(self.segments), self.node_count, self.leaf_count, self.D)

    def curves(self) -> list[Segment]:
        """Inserted segments plus the two frame walls."""
        return [self.frame_bottom, *self.segments, self.frame_top]

    def live_trapezoids(self) -> list[Trapezoid]:
        out = []
        seen = set()
        stack = [self.root]
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            if node.kind == LEAF:
                out.append(node.trap)
            else:
                stack.extend(node.children())
        return out

    def nodes(self) -> list[Node]:
        out = []
        seen = set()
        stack = [self.root]
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            out.append(node)
            stack.extend(node.children())
        return out

    # -- queries ---------------------------------------------------------

    def locate(self, p: Point) -> LocateResult:
        if not isinstance(p, Point):
            p = point(*p)
        if not self.bbox.strictly_contains(p):
            raise OutOfBox(f"query {p} is not strictly inside {self.bbox}")
        node = self.root
        steps = 0
        while node.kind != LEAF:
            steps += 1
            if node.kind == XNODE:
                q = node.point
                if p < q:
                    node = node.left
                elif p == q:
                    return LocateResult(VERTEX, steps, point=q)
                else:
                    node = node.right
            else:
                seg = node.segment
                side = seg.side(p)
                if side > 0:
                    node = node.above
                elif side < 0:
                    node = node.below
                elif seg.has_endpoint(p):
                    return LocateResult(VERTEX, steps, point=p, segment=seg)
                else:
                    return LocateResult(EDGE, steps, segment=seg)
        return LocateResult(FACE, steps, trapezoid=node.trap)

    def locate_segment_start(self, s: Segment) -> Trapezoid:
        """Live trapezoid that ``s`` enters immediately to the right of ``s.left``.

        Ties at an existing endpoint are broken with the segment itself, so
        the result is the trapezoid containing a point of ``s`` just past
        its left endpoint.
        """
        self._check_in_box(s)
        p = s.left
        node = self.root
        while node.kind != LEAF:
            if node.kind == XNODE:
                node = node.left if p < node.point else node.right
            else:
                seg = node.segment
                side = seg.side(p)
                if side == 0:
                    if p != seg.left:
                        raise IntersectsExisting(s, seg)
                    side = seg.side(s.right)
                    if side == 0:
                        if seg == s:
                            raise DuplicateSegment(f"{s} already inserted")
                        raise IntersectsExisting(s, seg)
                node = node.above if side > 0 else node.below
        return node.trap

    def _check_in_box(self, s: Segment):
        if not (self.bbox.strictly_contains(s.left) and self.bbox.strictly_contains(s.right)):
            raise OutOfBox(f"{s} is not strictly inside {self.bbox}")

    # -- insertion -------------------------------------------------------

    def _follow_segment(self, s: Segment) -> list[Trapezoid]:
        """Trapezoids crossed by ``s``, left to right, validating as it goes."""
        first = self.locate_segment_start(s)
        crossed = [first]
        checked: set[Segment] = set()
        t = first
        while True:
            for b in (t.top, t.bottom):
                if b not in checked:
                    checked.add(b)
                    if not segments_interior_disjoint(s, b):
                        raise IntersectsExisting(s, b)
            w = t.rightp
            if not (w < s.right):
                break
            side = s.side(w)
            if side == 0:
                # an existing endpoint lies in the interior of s
                raise IntersectsExisting(s, self._segment_with_endpoint(w))
            t = t.lr if side > 0 else t.ur
            if t is None:  # pragma: no cover - would mean corrupted links
                raise RuntimeError("broken neighbor links while following segment")
            crossed.append(t)
        if not (s.right < t.rightp or s.right == t.rightp):  # pragma: no cover
            raise RuntimeError("segment walk overshot")
        return crossed

    def _segment_with_endpoint(self, w: Point) -> Optional[Segment]:
        for seg in self.segments:
            if seg.has_endpoint(w):
                return seg
        return None

    def insert_segment(self, s: Segment) -> InsertStats:
        if s in self._segment_set:
            raise DuplicateSegment(f"{s} already inserted")
        crossed = self._follow_segment(s)
        p, q = s.left, s.right
        first, last = crossed[0], crossed[-1]

        left_piece = Trapezoid(first.top, first.bottom, first.leftp, p) if first.leftp < p else None
        right_piece = Trapezoid(last.top, last.bottom, q, last.rightp) if q < last.rightp else None

        above_of: list[Trapezoid] = []
        below_of: list[Trapezoid] = []
        pieces: list[Trapezoid] = []
        cur_above = Trapezoid(first.top, s, p, None)
        cur_below = Trapezoid(s, first.bottom, p, None)
        pieces += (cur_above, cur_below)
        for j, t in enumerate(crossed):
            above_of.append(cur_above)
            below_of.append(cur_below)
            if j == len(crossed) - 1:
                break
            w = t.rightp
            nxt = crossed[j + 1]
            if s.side(w) > 0:
                # the wall through w now stops at s: pieces below s merge
                cur_above.rightp = w
                cur_above = Trapezoid(nxt.top, s, w, None)
                pieces.append(cur_above)
            else:
                cur_below.rightp = w
                cur_below = Trapezoid(s, nxt.bottom, w, None)
                pieces.append(cur_below)
        cur_above.rightp = q
        cur_below.rightp = q
        if left_piece is not None:
            pieces.append(left_piece)
        if right_piece is not None:
            pieces.append(right_piece)

        for t in crossed:
            t.alive = False
        for t in pieces:
            leaf = Node()
            leaf.trap = t
            t.node = leaf
        self._relink(crossed, pieces)

        # rewrite the DAG: each crossed leaf becomes the root of its new subtree
        new_internal = 0
        new_parents = []
        for j, t in enumerate(crossed):
            node = t.node
            d0 = node.depth
            has_left = j == 0 and left_piece is not None
            has_right = j == len(crossed) - 1 and right_piece is not None
            if has_left:
                node.kind = XNODE
                node.point = p
                node.left = left_piece.node
                node.trap = None
                inner = Node()
                inner.depth = d0 + 1
                node.right = inner
                new_parents.append(node)
                new_internal += 1
                cur = inner
            else:
                cur = node
            if has_right:
                cur.kind = XNODE
                cur.point = q
                cur.right = right_piece.node
                cur.trap = None
                ynode = Node()
                ynode.depth = cur.depth + 1
                cur.left = ynode
                new_parents.append(cur)
                new_internal += 1
            else:
                ynode = cur
            ynode.kind = YNODE
            ynode.segment = s
            ynode.span = (max(t.leftp, p), min(t.rightp, q))
            ynode.trap = None
            ynode.above = above_of[j].node
            ynode.below = below_of[j].node
            new_parents.append(ynode)

        for parent in new_parents:
            for child in parent.children():
                if child.kind == LEAF and child.depth < parent.depth + 1:
                    child.depth = parent.depth + 1

        for t in pieces:
            self._log(t)
            if t.node.depth > self.D:
                self.D = t.node.depth
        self.node_count += new_internal + len(pieces)
        self.leaf_count += len(pieces) - len(crossed)
        self.segments.append(s)
        self._segment_set.add(s)
        return InsertStats(len(crossed), len(pieces), len(crossed) - 1, self.D)

    def _relink(self, crossed: list[Trapezoid], pieces: list[Trapezoid]):
        """Recompute neighbor links around the re-tiled region.

        The upper-left neighbor of t is the trapezoid whose right wall point
        is t.leftp and whose top is t.top; the other three links are
        analogous. Every link that must change points into ``pieces``.
        """
        outer = []
        for t in crossed:
            for nb in t.neighbors():
                if nb is not None and nb.alive:
                    outer.append(nb)
        by_right_top = {}
        by_right_bottom = {}
        by_left_top = {}
        by_left_bottom = {}
        for t in pieces:
            by_right_top[(t.rightp, t.top)] = t
            by_right_bottom[(t.rightp, t.bottom)] = t
            by_left_top[(t.leftp, t.top)] = t
            by_left_bottom[(t.leftp, t.bottom)] = t
        for t in outer:
            by_right_top.setdefault((t.rightp, t.top), t)
            by_right_bottom.setdefault((t.rightp, t.bottom), t)
            by_left_top.setdefault((t.leftp, t.top), t)
            by_left_bottom.setdefault((t.leftp, t.bottom), t)
        for t in pieces:
            t.ul = by_right_top.get((t.leftp, t.top))
            t.ll = by_right_bottom.get((t.leftp, t.bottom))
            t.ur = by_left_top.get((t.rightp, t.top))
            t.lr = by_left_bottom.get((t.rightp, t.bottom))
        for t in outer:
            if t.ul is not None and not t.ul.alive:
                t.ul = by_right_top.get((t.leftp, t.top))
            if t.ll is not None and not t.ll.alive:
                t.ll = by_right_bottom.get((t.leftp, t.bottom))
            if t.ur is not None and not t.ur.alive:
                t.ur = by_left_top.get((t.rightp, t.top))
            if t.lr is not None and not t.lr.alive:
                t.lr = by_left_bottom.get((t.rightp, t.bottom))

    # -- audits ----------------------------------------------------------

    def recompute_depth(self) -> int:
        """Longest root-to-leaf node count by full traversal (iterative)."""
        longest: dict[int, int] = {}
        stack = [(self.root, False)]
        while stack:
            node, done = stack.pop()
            key = id(node)
            if done:
                longest[key] = 1 + max((longest[id(c)] for c in node.children()), default=0)
                continue
            if key in longest:
                continue
            stack.append((node, True))
            for c in node.children():
                if id(c) not in longest:
                    stack.append((c, False))
        return longest[id(self.root)]


def new_map(bbox: BBox, seed: int = 0) -> TrapezoidalMap:
    return TrapezoidalMap(bbox, seed)


def derive_seed(seed: int, k: int) -> int:
    """Deterministic 64-bit child seed for rebuild ``k``."""
    digest = hashlib.blake2b(f"{seed}:{k}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


VERIFIERS = ("depth", "lqpl", "arrdepth", "none")


@dataclass
class BuildConfig:
    verifier: str = "depth"
    depth_c: float = 6.0
    size_c: float = 12.0
    max_rebuilds: int = 32
    # "suggested" inserts the given order on the first attempt only
    order: str = "shuffled"

    def __post_init__(self):
        if self.verifier not in VERIFIERS:
            raise ValueError(f"unknown verifier {self.verifier!r}; expected one of {VERIFIERS}")
        if self.order not in ("shuffled", "suggested"):
            raise ValueError(f"unknown order {self.order!r}")


@dataclass
class BuildAttempt:
    attempt: int
    seed: int
    D: int
    node_count: int
    measure: Optional[int]
    accepted: bool
    reason: str = ""


@dataclass
class BuildResult:
    dag: TrapezoidalMap
    rebuilds: int
    attempts: list[BuildAttempt] = field(default_factory=list)
    L: Optional[int] = None
    feasible_paths: Optional[int] = None
    arrangement_depth: Optional[int] = None


def _log2_bound(c: float, n: int) -> float:
    import math

    return c * math.log2(n + 1)


def build(segments: Sequence[Segment], config: Optional[BuildConfig] = None, seed: int = 0,
          bbox: Optional[BBox] = None,
          on_attempt: Optional[Callable[[BuildAttempt], None]] = None) -> BuildResult:
    """Randomized incremental construction with size/depth guarded rebuilds."""
    from .arrdepth import verify_arrangement_depth
    from .pathlen import max_search_path_length

    config = config or BuildConfig()
    segments = list(segments)
    n = len(segments)
    if bbox is None:
        bbox = bbox_around(segments)
    size_bound = config.size_c * n
    depth_bound = _log2_bound(config.depth_c, n)
    attempts = []
    for attempt in range(config.max_rebuilds + 1):
        attempt_seed = derive_seed(seed, attempt)
        order = list(segments)
        if not (attempt == 0 and config.order == "suggested"):
            random.Random(attempt_seed).shuffle(order)
        dag = TrapezoidalMap(bbox, attempt_seed)
        too_big = False
        for s in order:
            try:
                dag.insert_segment(s)
            except (IntersectsExisting, DuplicateSegment, OutOfBox) as exc:
                other = getattr(exc, "other", None)
                raise ValidationFailed(f"invalid input: {exc}", pair=(s, other)) from exc
            if n and dag.node_count > size_bound:
                too_big = True
                break
        result = BuildResult(dag, attempt)
        if too_big:
            rec = BuildAttempt(attempt, attempt_seed, dag.D, dag.node_count, None, False, "size")
        elif n == 0 or config.verifier == "none":
            rec = BuildAttempt(attempt, attempt_seed, dag.D, dag.node_count, None, True)
        elif config.verifier == "depth":
            ok = dag.D <= depth_bound
            rec = BuildAttempt(attempt, attempt_seed, dag.D, dag.node_count, dag.D, ok,
                               "" if ok else "depth")
        elif config.verifier == "lqpl":
            L, paths = max_search_path_length(dag)
            result.L, result.feasible_paths = L, paths
            ok = L <= depth_bound
            rec = BuildAttempt(attempt, attempt_seed, dag.D, dag.node_count, L, ok,
                               "" if ok else "lqpl")
        else:
            depth, ok = verify_arrangement_depth(dag, depth_bound)
            result.arrangement_depth = depth
            rec = BuildAttempt(attempt, attempt_seed, dag.D, dag.node_count, depth, ok,
                               "" if ok else "arrdepth")
        attempts.append(rec)
        if on_attempt is not None:
            on_attempt(rec)
        if rec.accepted:
            result.attempts = attempts
            return result
    raise RebuildLimitExceeded(
        f"no acceptable DAG after {config.max_rebuilds} rebuilds "
        f"(last: {attempts[-1].reason}, D={attempts[-1].D}, nodes={attempts[-1].node_count})")
