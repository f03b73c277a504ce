"""Longest feasible search path in the DAG and the number of feasible paths.

The DAG is unrolled into its search tree on the fly: a depth-first descent
carries the open interval of lexicographic x-keys still consistent with the
decisions taken so far. Only an x-node whose key falls strictly inside that
interval splits the descent; y-nodes always branch both ways.

Two pruning rules are available. ``exact`` (the default) also clips the
interval to the x-range of the region a y-node splits. Without the clip
(``interval``) a merged trapezoid can reopen x-ranges that the path already
left, so some descents that no query can follow are counted and ``L`` may
be overestimated.
"""
from __future__ import annotations

from typing import NamedTuple

from .trapmap import LEAF, XNODE, TrapezoidalMap

PRUNING_MODES = ("exact", "interval")


class PathStats(NamedTuple):
    L: int
    feasible_paths: int


def _flatten(dag: TrapezoidalMap):
    """Array form of the DAG: kinds, key ranks and child indices."""
    order = dag.nodes()
    index = {id(node): i for i, node in enumerate(order)}
    keyset = set()
    for node in order:
        if node.kind == XNODE:
            keyset.add(node.point)
        elif node.kind != LEAF:
            keyset.update(node.span)
    rank = {p: i for i, p in enumerate(sorted(keyset))}
    n = len(order)
    kind = [node.kind for node in order]
    key = [-1] * n
    span_lo = [-1] * n
    span_hi = [-1] * n
    first = [-1] * n
    second = [-1] * n
    for i, node in enumerate(order):
        if node.kind == LEAF:
            continue
        if node.kind == XNODE:
            key[i] = rank[node.point]
        else:
            span_lo[i] = rank[node.span[0]]
            span_hi[i] = rank[node.span[1]]
        # XNODE: (left, right); YNODE: (above, below)
        a, b = node.children()
        first[i] = index[id(a)]
        second[i] = index[id(b)]
    return index[id(dag.root)], kind, key, span_lo, span_hi, first, second, len(rank)


def max_search_path_length(dag: TrapezoidalMap, pruning: str = "exact") -> PathStats:
    """Return ``(L, feasible_paths)``.

    ``L`` counts internal nodes on the longest realizable descent,
    including descents that stop at an x-node because the query equals its
    key. ``feasible_paths`` counts realizable descents that reach a leaf.
    """
    if pruning not in PRUNING_MODES:
        raise ValueError(f"unknown pruning mode {pruning!r}")
    clip = pruning == "exact"
    root, kind, key, span_lo, span_hi, first, second, m = _flatten(dag)
    best = 0
    paths = 0
    # interval (lo, hi) of key ranks, exclusive; -1 and m stand for infinity
    stack = [(root, -1, m, 0)]
    pop, push = stack.pop, stack.append
    while stack:
        v, lo, hi, k = pop()
        while True:
            t = kind[v]
            if t == LEAF:
                paths += 1
                if k > best:
                    best = k
                break
            k += 1
            if t == XNODE:
                r = key[v]
                if r <= lo:
                    v = second[v]
                elif r >= hi:
                    v = first[v]
                else:
                    # the query equal to this key ends here after k nodes
                    if k > best:
                        best = k
                    push((second[v], r, hi, k))
                    v = first[v]
                    hi = r
            else:
                if clip:
                    if span_lo[v] > lo:
                        lo = span_lo[v]
                    if span_hi[v] < hi:
                        hi = span_hi[v]
                push((second[v], lo, hi, k))
                v = first[v]
    return PathStats(best, paths)
