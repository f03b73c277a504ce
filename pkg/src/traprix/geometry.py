"""Exact rational geometry kernel.

Coordinates are :class:`fractions.Fraction` values. Points are plain named
tuples, so the built-in tuple ordering *is* the lexicographic (x, then y)
order that the trapezoidal map uses for every x-comparison.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Union

from .errors import DegenerateSegment, XRangeViolation

Number = Union[int, Fraction, str]

LESS, EQUAL, GREATER = -1, 0, 1
CW, COLLINEAR, CCW = -1, 0, 1
BELOW, ON, ABOVE = -1, 0, 1


def rational(value: Number) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass an int, Fraction or 'p/q' string")
    return Fraction(value)


class Point(NamedTuple):
    x: Fraction
    y: Fraction

    def __repr__(self):
        return f"({self.x}, {self.y})"


def point(x: Number, y: Number) -> Point:
    return Point(rational(x), rational(y))


def cmp_lex(p: Point, q: Point) -> int:
    """Compare by x, then by y. Returns LESS, EQUAL or GREATER."""
    if p == q:
        return EQUAL
    return LESS if p < q else GREATER


def orientation(p: Point, q: Point, r: Point) -> int:
    """Sign of the determinant of (q - p, r - p)."""
    det = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)
    return (det > 0) - (det < 0)


class Segment:
    """Non-vertical segment stored with ``left < right`` lexicographically.

    The supporting line is kept as integer coefficients so the hot
    above/below test runs on machine-free integer arithmetic instead of
    Fraction objects.
    """

    __slots__ = ("left", "right", "_a", "_b", "_c", "_hash")

    def __init__(self, p: Point, q: Point):
        p = p if isinstance(p, Point) else point(*p)
        q = q if isinstance(q, Point) else point(*q)
        if p == q:
            raise DegenerateSegment(f"zero-length segment at {p}")
        if p.x == q.x:
            raise DegenerateSegment(f"vertical segment {p}-{q}")
        if q < p:
            p, q = q, p
        self.left = p
        self.right = q
        dx = q.x - p.x
        dy = q.y - p.y
        cst = dy * p.x - dx * p.y
        den = math.lcm(dx.denominator, dy.denominator, cst.denominator)
        # side(r) = a*r.x + b*r.y + c, positive iff r lies above the line
        self._a = -dy.numerator * (den // dy.denominator)
        self._b = dx.numerator * (den // dx.denominator)
        self._c = cst.numerator * (den // cst.denominator)
        self._hash = hash((p, q))

    @classmethod
    def of(cls, x1: Number, y1: Number, x2: Number, y2: Number) -> "Segment":
        return cls(point(x1, y1), point(x2, y2))

    def side(self, r: Point) -> int:
        """Sign of orientation(left, right, r) without the x-range check."""
        xn, xd = r.x.numerator, r.x.denominator
        yn, yd = r.y.numerator, r.y.denominator
        v = self._a * xn * yd + self._b * yn * xd + self._c * xd * yd
        return (v > 0) - (v < 0)

    def y_at(self, x: Fraction) -> Fraction:
        p, q = self.left, self.right
        return p.y + (x - p.x) * (q.y - p.y) / (q.x - p.x)

    def has_endpoint(self, r: Point) -> bool:
        return r == self.left or r == self.right

    def __eq__(self, other):
        if not isinstance(other, Segment):
            return NotImplemented
        return self.left == other.left and self.right == other.right

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "Segment"):
        return (self.left, self.right) < (other.left, other.right)

    def __repr__(self):
        return f"Segment({self.left}, {self.right})"


def point_vs_segment(p: Point, s: Segment) -> int:
    """ABOVE, ON or BELOW: exact vertical comparison of ``p`` with ``s``."""
    if not (s.left.x <= p.x <= s.right.x):
        raise XRangeViolation(f"{p} outside x-range of {s}")
    return s.side(p)


def _on_closed_segment(p: Point, q: Point, r: Point) -> bool:
    """For collinear p, q, r: does r lie on the closed segment pq?"""
    return min(p, q) <= r <= max(p, q)


def segments_interior_disjoint(a: Segment, b: Segment) -> bool:
    """True iff ``a`` and ``b`` meet at most in endpoints common to both.

    A T-junction (an endpoint of one lying in the interior of the other)
    counts as an intersection.
    """
    if a == b:
        return False
    # cheap x-range rejection
    if a.right.x < b.left.x or b.right.x < a.left.x:
        return True
    o1 = a.side(b.left)
    o2 = a.side(b.right)
    o3 = b.side(a.left)
    o4 = b.side(a.right)
    if o1 == o2 == 0:
        # collinear: disjoint unless the closed ranges share more than one point
        lo = max(a.left, b.left)
        hi = min(a.right, b.right)
        return hi <= lo
    if o1 * o2 < 0 and o3 * o4 < 0:
        return False
    shared = {a.left, a.right} & {b.left, b.right}
    for p, (u, v), o in ((b.left, (a.left, a.right), o1), (b.right, (a.left, a.right), o2),
                         (a.left, (b.left, b.right), o3), (a.right, (b.left, b.right), o4)):
        if o == 0 and p not in shared and _on_closed_segment(u, v, p):
            return False
    return True
