"""Scene generators and the plain-text scene format.

Generators are deterministic functions of their arguments. The two
lower-bound constructions place horizontal segments on an integer grid with
every endpoint at a distinct x-coordinate, so no zero-width trapezoids arise
and the symbolic tie-breaking never influences the measured depths.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Union

from .errors import GenerationStalled, ParseError, ValidationFailed
from .geometry import Point, Segment, orientation, segments_interior_disjoint
from .trapmap import BBox, bbox_around

# dyadic grid for random coordinates in [-1, 1]
GRID_BITS = 24
GRID = 1 << GRID_BITS
RANDOM_BBOX = BBox.of(-2, -2, 2, 2)


@dataclass
class Scene:
    segments: list[Segment]
    bbox: BBox
    # True when ``segments`` is listed in the intended insertion order
    ordered: bool = False

    @property
    def suggested_order(self) -> Optional[list[Segment]]:
        return list(self.segments) if self.ordered else None

    def __len__(self):
        return len(self.segments)


def _random_coord(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-GRID, GRID), GRID)


def _random_segment(rng: random.Random) -> Optional[Segment]:
    p = Point(_random_coord(rng), _random_coord(rng))
    q = Point(_random_coord(rng), _random_coord(rng))
    if p.x == q.x:
        return None
    return Segment(p, q)


def _crossing_point(a: Segment, b: Segment) -> Optional[Point]:
    """Intersection point of two segments that cross properly, else None."""
    o1 = orientation(a.left, a.right, b.left)
    o2 = orientation(a.left, a.right, b.right)
    o3 = orientation(b.left, b.right, a.left)
    o4 = orientation(b.left, b.right, a.right)
    if o1 * o2 >= 0 or o3 * o4 >= 0:
        return None
    p, r = a.left, (a.right.x - a.left.x, a.right.y - a.left.y)
    q, s = b.left, (b.right.x - b.left.x, b.right.y - b.left.y)
    denom = r[0] * s[1] - r[1] * s[0]
    t = ((q.x - p.x) * s[1] - (q.y - p.y) * s[0]) / denom
    return Point(p.x + t * r[0], p.y + t * r[1])


def _touches(a: Segment, b: Segment) -> bool:
    """Non-crossing contact: shared endpoint, T-junction or collinear overlap."""
    if a.right.x < b.left.x or b.right.x < a.left.x:
        return False
    if {a.left, a.right} & {b.left, b.right}:
        return True
    for p, s in ((b.left, a), (b.right, a), (a.left, b), (a.right, b)):
        if s.left.x <= p.x <= s.right.x and s.side(p) == 0:
            return True
    return False


def _random_by_rejection(n: int, rng: random.Random, max_rejects: int) -> list[Segment]:
    accepted: list[Segment] = []
    rejects = 0
    while len(accepted) < n:
        s = _random_segment(rng)
        if s is not None and all(segments_interior_disjoint(s, t) and not _touches(s, t)
                                 for t in accepted):
            accepted.append(s)
            rejects = 0
            continue
        rejects += 1
        if rejects >= max_rejects:
            raise GenerationStalled(
                f"{max_rejects} consecutive rejections after {len(accepted)} of {n} segments")
    return accepted


def _random_by_arrangement(n: int, rng: random.Random) -> list[Segment]:
    """Edges of the arrangement of random segments, trimmed to exactly ``n``."""
    lines: list[Segment] = []
    cuts: list[list[Point]] = []
    n_edges = 0
    while n_edges < n:
        s = _random_segment(rng)
        if s is None or any(_touches(s, t) for t in lines):
            continue
        mine = []
        for i, t in enumerate(lines):
            x = _crossing_point(s, t)
            if x is not None:
                mine.append(x)
                cuts[i].append(x)
        lines.append(s)
        cuts.append(mine)
        n_edges += 1 + 2 * len(mine)
    edges = []
    for s, pts in zip(lines, cuts):
        chain = [s.left, *sorted(pts), s.right]
        edges.extend(Segment(a, b) for a, b in zip(chain, chain[1:]))
    if len(edges) > n:
        keep = sorted(rng.sample(range(len(edges)), n))
        edges = [edges[i] for i in keep]
    return edges


def gen_random_segments(n: int, seed: int, method: str = "arrangement",
                        max_rejects: int = 10_000) -> Scene:
    """``n`` pairwise interior-disjoint segments with endpoints in [-1, 1]^2.

    ``arrangement`` (default) splits random segments at their crossings and
    keeps a seeded subset of ``n`` edges. ``rejection`` draws whole random
    segments and discards any that touch an accepted one; it only scales to
    small ``n`` and raises :class:`GenerationStalled` when stuck.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = random.Random(seed)
    if method == "arrangement":
        segs = _random_by_arrangement(n, rng)
    elif method == "rejection":
        segs = _random_by_rejection(n, rng, max_rejects)
    else:
        raise ValueError(f"unknown method {method!r}")
    return Scene(segs, RANDOM_BBOX)


def _horizontal(x0, x1, y) -> Segment:
    return Segment(Point(Fraction(x0), Fraction(y)), Point(Fraction(x1), Fraction(y)))


def gen_sqrt_blocks(k: int) -> Scene:
    """``k`` blocks of ``k`` nested horizontal segments, listed top to bottom.

    Block ``b`` occupies x in [A_b, A_b + 2k] with A_b = -b(2k + 2). Its cover
    segment (j = 0) runs from A_b to the middle of the previous block's
    innermost segment, so inserting it merges the deep trapezoid under that
    block into the one below the cover. Segment j > 0 spans
    [A_b + j, A_b + 2k - j]. Heights strictly decrease in listing order.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    width = 2 * k + 2
    segs = []
    for b in range(k):
        a = -b * width
        cover_end = a + 2 * k if b == 0 else a + width + k
        for j in range(k):
            y = -(b * k + j)
            if j == 0:
                segs.append(_horizontal(a, cover_end, y))
            else:
                segs.append(_horizontal(a + j, a + 2 * k - j, y))
    return Scene(segs, bbox_around(segs), ordered=True)


def block_sizes(m: int) -> list[int]:
    """Sizes max(1, floor(m / 2^i)) for i = 1, 2, ... until ``m`` is used up."""
    if m <= 1:
        return [m] if m == 1 else []
    sizes = []
    rest = m
    i = 1
    while rest > 0:
        s = min(max(1, m >> i), rest)
        sizes.append(s)
        rest -= s
        i += 1
    return sizes


def _unit_layout(m: int, x_right: int, out: list):
    """Append ``[x0, x1]`` intervals for a unit of ``m`` segments ending at ``x_right``.

    A unit is a cover segment over a row of smaller units. Returns
    ``(x_left, last)`` where ``last`` indexes the unit's final (lowest)
    segment, below which its deepest trapezoid lies.
    """
    cover = len(out)
    out.append([None, Fraction(x_right)])
    if m == 1:
        out[cover][0] = Fraction(x_right - 1)
        return x_right - 1, cover
    left, last = _row_layout(m - 1, x_right - 1, out)
    out[cover][0] = Fraction(left - 1)
    return left - 1, last


def _row_layout(m: int, x_right: int, out: list):
    """Units of sizes :func:`block_sizes` placed right to left, each lower than the last."""
    right = x_right
    prev_last = None
    left = right
    for size in block_sizes(m):
        first = len(out)
        left, last = _unit_layout(size, right, out)
        if prev_last is not None:
            # the unit's cover reaches under the previous unit's lowest segment
            out[first][1] = out[prev_last][0] + Fraction(1, 2)
        prev_last = last
        right = left - 1
    return left, prev_last


def gen_recursive_blocks(n: int) -> Scene:
    """Recursive block construction with ``n`` segments, listed top to bottom.

    The scene is a row of units with sizes from :func:`block_sizes`, placed
    right to left. A unit of m segments is a cover segment spanning the unit
    with a row of units totalling m - 1 segments beneath it. Every unit after
    the first in a row stretches its cover rightwards to end under the
    lowest segment of its predecessor. Heights strictly decrease in listing
    order.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    intervals: list = []
    _row_layout(n, 0, intervals)
    # scale by 2 so the half-integer extension points become integers
    segs = [_horizontal(2 * x0, 2 * x1, -i) for i, (x0, x1) in enumerate(intervals)]
    return Scene(segs, bbox_around(segs), ordered=True)


# -- file format -----------------------------------------------------------

ORDER_PRAGMA = "# order: suggested"


def _fmt(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def parse_rational(token: str, lineno: int) -> Fraction:
    num, slash, den = token.partition("/")
    try:
        if slash:
            if not den or den.startswith(("+", "-")):
                raise ValueError(token)
            value = Fraction(int(num), int(den))
        else:
            value = Fraction(int(num))
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"malformed rational {token!r}", lineno) from None
    return value


def format_scene(scene: Scene) -> str:
    lines = []
    if scene.ordered:
        lines.append(ORDER_PRAGMA)
    lines.append("bbox " + " ".join(_fmt(v) for v in scene.bbox))
    for s in scene.segments:
        lines.append(" ".join(_fmt(v) for v in (s.left.x, s.left.y, s.right.x, s.right.y)))
    return "\n".join(lines) + "\n"


def write_scene(scene: Scene, path: Union[str, Path]):
    Path(path).write_text(format_scene(scene), encoding="utf-8")


def first_crossing(segments: Sequence[Segment]) -> Optional[tuple[Segment, Segment]]:
    """First pair (in input order of the later segment) that is not interior-disjoint.

    Sweeps segments by left endpoint so only x-overlapping pairs are tested.
    """
    order = sorted(range(len(segments)), key=lambda i: segments[i].left)
    active: list[int] = []
    worst = None
    for i in order:
        s = segments[i]
        active = [j for j in active if segments[j].right.x >= s.left.x]
        for j in active:
            if not segments_interior_disjoint(s, segments[j]):
                pair = (min(i, j), max(i, j))
                if worst is None or pair[::-1] < worst[::-1]:
                    worst = pair
        active.append(i)
    if worst is None:
        return None
    return segments[worst[0]], segments[worst[1]]


def parse_scene(text: str, validate: bool = True) -> Scene:
    bbox = None
    ordered = False
    segs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.strip() == ORDER_PRAGMA:
            ordered = True
            continue
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if bbox is None:
            if tokens[0] != "bbox" or len(tokens) != 5:
                raise ParseError("expected 'bbox x0 y0 x1 y1' before any segment", lineno)
            bbox = BBox(*(parse_rational(t, lineno) for t in tokens[1:]))
            if not (bbox.x0 < bbox.x1 and bbox.y0 < bbox.y1):
                raise ParseError("bounding box has no interior", lineno)
            continue
        if len(tokens) != 4:
            raise ParseError(f"expected 4 rationals, got {len(tokens)} fields", lineno)
        x1, y1, x2, y2 = (parse_rational(t, lineno) for t in tokens)
        try:
            s = Segment.of(x1, y1, x2, y2)
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        for p in (s.left, s.right):
            if not (bbox.x0 < p.x < bbox.x1 and bbox.y0 < p.y < bbox.y1):
                raise ParseError(f"endpoint {p} not strictly inside the bounding box", lineno)
        segs.append(s)
    if bbox is None:
        raise ParseError("missing bbox line")
    if validate:
        pair = first_crossing(segs)
        if pair is not None:
            raise ValidationFailed(f"segments {pair[0]} and {pair[1]} intersect", pair=pair)
    return Scene(segs, bbox, ordered)


def read_scene(path: Union[str, Path], validate: bool = True) -> Scene:
    return parse_scene(Path(path).read_text(encoding="utf-8"), validate)
