"""Tour construction over cluster centroids and stroke ordering.

Small instances (up to exact_max clusters) are solved exactly with the
Held-Karp dynamic program over subsets. Larger ones get a nearest-neighbor
tour polished by first-improvement 2-opt. Both are deterministic: ties fall
to the smallest index, and the scan order of 2-opt is fixed.

Tour lengths are computed with math.fsum over the cycle's edge lengths, so
the reported length does not depend on where the cycle starts or which way
it runs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .clustering import ClusterPartition
from .model import Point, Stream, StrokeSet


@dataclass(frozen=True)
class Tour:
    """A closed visiting order over cluster indices; length includes the
    edge back from the last cluster to the first."""

    order: tuple[int, ...]
    length: float

    def __post_init__(self) -> None:
        if sorted(self.order) != list(range(len(self.order))):
            raise ValueError("tour must be a permutation of 0..M-1")


class SeqEntry(NamedTuple):
    stroke_id: int
    cluster: int
    rank: int


@dataclass(frozen=True)
class StrokeSequence:
    entries: tuple[SeqEntry, ...]
    stream: Stream

    def __post_init__(self) -> None:
        ranks = [e.rank for e in self.entries]
        if ranks != list(range(len(ranks))):
            raise ValueError("ranks must be 0..N-1 in order")
        ids = [e.stroke_id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate stroke id in sequence")

    def __len__(self) -> int:
        return len(self.entries)

    def iter_ranked(self) -> Iterator[tuple[int, int]]:
        for e in self.entries:
            yield e.stroke_id, e.rank


@dataclass(frozen=True)
class GlobalSequence:
    """The full drawing order: every sketch stroke, then every paint stroke."""

    sketch: StrokeSequence
    paint: StrokeSequence | None
    strokes: StrokeSet
    dist_prox: float

    def __post_init__(self) -> None:
        ids = [e.stroke_id for e in self.sketch.entries]
        if self.paint is not None:
            ids += [e.stroke_id for e in self.paint.entries]
        if sorted(ids) != sorted(s.id for s in self.strokes):
            raise ValueError("sequence does not cover the stroke set exactly")

    def __len__(self) -> int:
        return len(self.sketch) + (len(self.paint) if self.paint else 0)

    def combined(self) -> list[tuple[int, int, int, Stream]]:
        """(stroke_id, cluster, global_rank, stream) in drawing order."""
        out = [
            (e.stroke_id, e.cluster, e.rank, Stream.SKETCH) for e in self.sketch.entries
        ]
        base = len(out)
        if self.paint is not None:
            out += [
                (e.stroke_id, e.cluster, base + e.rank, Stream.PAINT)
                for e in self.paint.entries
            ]
        return out

    def iter_ranked(self) -> Iterator[tuple[int, int]]:
        for sid, _, rank, _ in self.combined():
            yield sid, rank


# ---------------------------------------------------------------------------
# tour search


def _distance_matrix(centroids: Sequence[Point]) -> np.ndarray:
    xs = np.array([c.x for c in centroids])
    ys = np.array([c.y for c in centroids])
    return np.hypot(xs[:, None] - xs[None, :], ys[:, None] - ys[None, :])


def tour_length(order: Sequence[int], dist: np.ndarray) -> float:
    """Cycle length, rotation and direction independent (fsum of edges)."""
    m = len(order)
    if m < 2:
        return 0.0
    return math.fsum(
        float(dist[order[i], order[(i + 1) % m]]) for i in range(m)
    )


def _held_karp(dist: np.ndarray) -> list[int]:
    m = len(dist)
    if m == 1:
        return [0]
    if m == 2:
        return [0, 1]
    full = 1 << m
    dp = np.full((full, m), np.inf)
    parent = np.zeros((full, m), dtype=np.int8)
    dp[1][0] = 0.0
    bits = 1 << np.arange(m)
    for mask in range(1, full, 2):  # only masks containing city 0
        row = dp[mask]
        if not np.isfinite(row).any():
            continue
        cand = row[:, None] + dist
        costs = cand.min(axis=0)
        args = cand.argmin(axis=0)
        ks = np.flatnonzero(~(mask & bits).astype(bool))
        if len(ks) == 0:
            continue
        nms = mask | bits[ks]
        dp[nms, ks] = costs[ks]
        parent[nms, ks] = args[ks]

    last = full - 1
    totals = dp[last] + dist[:, 0]
    totals[0] = np.inf
    j = int(np.argmin(totals))
    path = []
    mask = last
    while j != 0:
        path.append(j)
        pj = int(parent[mask, j])
        mask ^= 1 << j
        j = pj
    path.append(0)
    path.reverse()
    return path


def _nearest_neighbor(dist: np.ndarray) -> list[int]:
    m = len(dist)
    order = [0]
    remaining = np.ones(m, dtype=bool)
    remaining[0] = False
    cur = 0
    for _ in range(m - 1):
        row = np.where(remaining, dist[cur], np.inf)
        cur = int(np.argmin(row))  # first minimum, so ties pick the smallest index
        order.append(cur)
        remaining[cur] = False
    return order


def _two_opt(order: list[int], dist: np.ndarray) -> list[int]:
    """First-improvement 2-opt, scanning (i, j) in fixed ascending order."""
    m = len(order)
    if m < 4:
        return order
    t = np.array(order, dtype=np.int64)
    improved = True
    while improved:
        improved = False
        for i in range(1, m - 1):
            prev, ti = t[i - 1], t[i]
            tj = t[i + 1 :]
            tn = np.concatenate((t[i + 2 :], t[:1]))
            delta = dist[prev, tj] + dist[ti, tn] - dist[prev, ti] - dist[tj, tn]
            hits = np.flatnonzero(delta < -1e-9)
            if len(hits):
                j = i + 1 + int(hits[0])
                t[i : j + 1] = t[i : j + 1][::-1]
                improved = True
    return [int(v) for v in t]


def solve_tsp(centroids: Sequence[Point], exact_max: int = 15) -> Tour:
    """Shortest (or heuristically short) closed tour over the centroids.

    Exact dynamic programming when there are at most exact_max centroids,
    nearest neighbor plus 2-opt beyond that.
    """
    m = len(centroids)
    if m == 0:
        raise ValueError("no centroids to tour")
    if exact_max < 1:
        raise ValueError("exact_max must be >= 1")
    if m == 1:
        return Tour((0,), 0.0)
    dist = _distance_matrix(centroids)
    if m <= exact_max:
        order = _held_karp(dist)
    else:
        order = _two_opt(_nearest_neighbor(dist), dist)
    return Tour(tuple(order), tour_length(order, dist))


def two_opt_seed_and_tour(centroids: Sequence[Point]) -> tuple[float, Tour]:
    """The nearest-neighbor seed length next to the polished tour.

    Exposed mainly so that callers can check how much 2-opt helped.
    """
    dist = _distance_matrix(centroids)
    seed = _nearest_neighbor(dist)
    seed_len = tour_length(seed, dist)
    order = _two_opt(seed, dist)
    return seed_len, Tour(tuple(order), tour_length(order, dist))


# ---------------------------------------------------------------------------
# linearization and assembly


def linearize(tour: Tour, centroids: Sequence[Point]) -> list[int]:
    """Open the cycle into a drawing order.

    Starts at the cluster whose centroid is closest to the canvas origin
    (ties to the smaller cluster index) and walks whichever direction
    reaches a nearer second centroid (ties to the smaller cluster index).
    The closing edge is dropped.
    """
    order = list(tour.order)
    m = len(order)
    if m == 1:
        return order
    start = min(order, key=lambda c: (math.hypot(centroids[c].x, centroids[c].y), c))
    p = order.index(start)
    rotated = order[p:] + order[:p]
    if m == 2:
        return rotated
    nxt, prv = rotated[1], rotated[-1]
    c0 = centroids[start]
    dn = math.hypot(centroids[nxt].x - c0.x, centroids[nxt].y - c0.y)
    dp = math.hypot(centroids[prv].x - c0.x, centroids[prv].y - c0.y)
    if dp < dn or (dp == dn and prv < nxt):
        rotated = [start] + rotated[1:][::-1]
    return rotated


def assemble(
    cluster_order: Iterable[int], partition: ClusterPartition, stream: Stream
) -> StrokeSequence:
    """Concatenate the clusters' intra orders into one ranked sequence."""
    if partition.intra_order is None:
        raise ValueError("partition has no intra_order; call intra_order() first")
    entries: list[SeqEntry] = []
    rank = 0
    for ci in cluster_order:
        for sid in partition.intra_order[ci]:
            entries.append(SeqEntry(sid, ci, rank))
            rank += 1
    return StrokeSequence(tuple(entries), stream)


def tour_csv(tour: Tour, centroids: Sequence[Point]) -> str:
    """Debug dump: cluster index and cumulative length at each step."""
    dist = _distance_matrix(centroids)
    lines = ["step,cluster,cumulative_length"]
    acc = 0.0
    for i, c in enumerate(tour.order):
        if i > 0:
            acc += float(dist[tour.order[i - 1], c])
        lines.append(f"{i},{c},{acc!r}")
    return "\n".join(lines) + "\n"
