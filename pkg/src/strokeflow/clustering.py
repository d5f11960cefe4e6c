"""Agglomerative clustering of stroke anchors with Ward linkage.

Strokes are represented by their anchor point. Merging always picks the
pair of clusters whose union has the smallest increase in within-cluster
sum of squares; with centroids c and sizes n that increase has the closed
form

    d(A, B)^2 = 2 |A| |B| / (|A| + |B|) * ||cA - cB||^2

and the recorded merge height is d(A, B) itself, so two singletons merge
at exactly their Euclidean distance. Equal costs are broken by the pair of
minimum stroke ids (smaller first), which makes the whole dendrogram a
pure function of the anchor multiset.

Node numbering: leaves are 0..N-1 ordered by ascending stroke id, the k-th
merge creates node N+k. The left child is the one holding the smaller
minimum stroke id.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .errors import EmptySet, NegativeDistance
from .model import Point, StrokeSet


class Merge(NamedTuple):
    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    merges: tuple[Merge, ...]
    leaf_ids: tuple[int, ...]
    leaf_anchors: tuple[Point, ...]

    @property
    def n_leaves(self) -> int:
        return len(self.leaf_ids)

    def leaf_order(self) -> list[int]:
        """Leaf slots in depth-first order of the full tree, left first."""
        n = self.n_leaves
        if not self.merges:
            return list(range(n))
        order: list[int] = []
        stack = [n + len(self.merges) - 1]
        while stack:
            node = stack.pop()
            if node < n:
                order.append(node)
            else:
                m = self.merges[node - n]
                stack.append(m.right)
                stack.append(m.left)
        return order


@dataclass(frozen=True)
class ClusterPartition:
    """Clusters as tuples of stroke ids (ascending), indexed by min id.

    ``intra_order`` is filled by intra_order(); until then it is None.
    """

    clusters: tuple[tuple[int, ...], ...]
    centroids: tuple[Point, ...]
    intra_order: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self) -> None:
        if len(self.clusters) != len(self.centroids):
            raise ValueError("one centroid per cluster required")
        seen: set[int] = set()
        for members in self.clusters:
            if not members:
                raise ValueError("empty cluster")
            for sid in members:
                if sid in seen:
                    raise ValueError(f"stroke {sid} in more than one cluster")
                seen.add(sid)
        if self.intra_order is not None:
            if len(self.intra_order) != len(self.clusters):
                raise ValueError("intra_order shape mismatch")
            for members, ordered in zip(self.clusters, self.intra_order):
                if sorted(ordered) != list(members):
                    raise ValueError("intra_order must permute its cluster")

    @property
    def assignments(self) -> dict[int, int]:
        return {sid: ci for ci, members in enumerate(self.clusters) for sid in members}


def _ward_distances(
    cx: np.ndarray, cy: np.ndarray, sz: np.ndarray, i: int, js: np.ndarray
) -> np.ndarray:
    w = np.sqrt(2.0 * sz[i] * sz[js] / (sz[i] + sz[js]))
    return w * np.hypot(cx[i] - cx[js], cy[i] - cy[js])


def build_dendrogram(stroke_set: StrokeSet) -> Dendrogram:
    """Full Ward merge tree over the stroke anchors."""
    strokes = stroke_set.sorted_by_id()
    n = len(strokes)
    if n == 0:
        raise EmptySet("cannot cluster an empty stroke set")
    leaf_ids = tuple(s.id for s in strokes)
    anchors = tuple(s.anchor for s in strokes)
    if n == 1:
        return Dendrogram((), leaf_ids, anchors)

    total = 2 * n - 1
    cx = np.zeros(total)
    cy = np.zeros(total)
    sz = np.zeros(total)
    mid = np.zeros(total, dtype=np.int64)  # min stroke id in each node
    cx[:n] = [p.x for p in anchors]
    cy[:n] = [p.y for p in anchors]
    sz[:n] = 1.0
    mid[:n] = leaf_ids

    nn_idx = np.zeros(total, dtype=np.int64)
    nn_dist = np.full(total, np.inf)

    # initial nearest neighbors: plain Euclidean between singletons; the
    # first argmin is the smallest slot, which matches the id tie-break
    block = max(1, min(n, 8 * 1024 * 1024 // max(n, 1)))
    for lo in range(0, n, block):
        hi = min(n, lo + block)
        d = np.hypot(cx[lo:hi, None] - cx[None, :n], cy[lo:hi, None] - cy[None, :n])
        d[np.arange(hi - lo), np.arange(lo, hi)] = np.inf
        nn_idx[lo:hi] = np.argmin(d, axis=1)
        nn_dist[lo:hi] = d[np.arange(hi - lo), nn_idx[lo:hi]]

    def rescan(i: int, cands: np.ndarray) -> None:
        d = _ward_distances(cx, cy, sz, i, cands)
        dmin = float(d.min())
        tied = cands[d == dmin]
        j = int(tied[np.argmin(mid[tied])]) if len(tied) > 1 else int(tied[0])
        nn_idx[i] = j
        nn_dist[i] = dmin

    merges: list[Merge] = []
    alive_list = np.arange(n)
    for step in range(n - 1):
        dvals = nn_dist[alive_list]
        dmin = dvals.min()
        tied = alive_list[dvals == dmin]
        if len(tied) > 1:
            partners = nn_idx[tied]
            k1 = np.minimum(mid[tied], mid[partners])
            k2 = np.maximum(mid[tied], mid[partners])
            a = int(tied[np.lexsort((k2, k1))[0]])
        else:
            a = int(tied[0])
        b = int(nn_idx[a])
        height = float(nn_dist[a])

        m = n + step
        szm = sz[a] + sz[b]
        cx[m] = (sz[a] * cx[a] + sz[b] * cx[b]) / szm
        cy[m] = (sz[a] * cy[a] + sz[b] * cy[b]) / szm
        sz[m] = szm
        mid[m] = min(mid[a], mid[b])
        left, right = (a, b) if mid[a] < mid[b] else (b, a)
        merges.append(Merge(left, right, height, int(szm)))

        others = alive_list[(alive_list != a) & (alive_list != b)]
        alive_list = np.append(others, m)
        if len(others) == 0:
            break

        d_new = _ward_distances(cx, cy, sz, m, others)

        dmin_m = float(d_new.min())
        tied_m = others[d_new == dmin_m]
        jm = int(tied_m[np.argmin(mid[tied_m])]) if len(tied_m) > 1 else int(tied_m[0])
        nn_idx[m] = jm
        nn_dist[m] = dmin_m

        old = nn_dist[others]
        stale = np.isin(nn_idx[others], (a, b))
        better = d_new < old
        equal = d_new == old

        take = others[better]
        nn_idx[take] = m
        nn_dist[take] = d_new[better]

        # equal cost against a live partner: prefer the smaller id pair
        for idx in np.flatnonzero(equal & ~stale & ~better):
            k = int(others[idx])
            cur = int(nn_idx[k])
            new_key = (min(mid[k], mid[m]), max(mid[k], mid[m]))
            cur_key = (min(mid[k], mid[cur]), max(mid[k], mid[cur]))
            if new_key < cur_key:
                nn_idx[k] = m

        for idx in np.flatnonzero(stale & ~better):
            k = int(others[idx])
            cands = alive_list[alive_list != k]
            rescan(k, cands)

    return Dendrogram(tuple(merges), leaf_ids, anchors)


def cut(dendrogram: Dendrogram, dist_prox: float) -> ClusterPartition:
    """Clusters formed by all merges with height <= dist_prox.

    dist_prox 0 is special: no merges at all, every stroke is its own
    cluster (even coincident anchors, which merge at height 0). Clusters
    are indexed by ascending minimum stroke id.
    """
    if math.isnan(dist_prox):
        raise ValueError("dist_prox is NaN")
    if dist_prox < 0:
        raise NegativeDistance(f"dist_prox must be >= 0, got {dist_prox}")
    n = dendrogram.n_leaves
    k = 0
    if dist_prox > 0:
        while k < len(dendrogram.merges) and dendrogram.merges[k].height <= dist_prox:
            k += 1

    parent: dict[int, int] = {}
    for i in range(k):
        m = dendrogram.merges[i]
        parent[m.left] = n + i
        parent[m.right] = n + i
    roots = [node for node in range(n) if node not in parent]
    roots += [n + i for i in range(k) if (n + i) not in parent]

    clusters: list[tuple[int, ...]] = []
    centroids: list[Point] = []
    for root in roots:
        slots: list[int] = []
        stack = [root]
        while stack:
            node = stack.pop()
            if node < n:
                slots.append(node)
            else:
                m = dendrogram.merges[node - n]
                stack.append(m.left)
                stack.append(m.right)
        ids = sorted(dendrogram.leaf_ids[s] for s in slots)
        sx = math.fsum(dendrogram.leaf_anchors[s].x for s in slots)
        sy = math.fsum(dendrogram.leaf_anchors[s].y for s in slots)
        clusters.append(tuple(ids))
        centroids.append(Point(sx / len(slots), sy / len(slots)))

    pairs = sorted(zip(clusters, centroids), key=lambda p: p[0][0])
    return ClusterPartition(
        tuple(p[0] for p in pairs), tuple(p[1] for p in pairs), None
    )


def intra_order(dendrogram: Dendrogram, partition: ClusterPartition) -> ClusterPartition:
    """Order each cluster's strokes by the dendrogram's leaf order.

    Each cluster from cut() is a subtree, so its members form one
    contiguous block of the depth-first leaf order; sorting members by
    their leaf position recovers exactly that block's order.
    """
    pos = {
        dendrogram.leaf_ids[slot]: i for i, slot in enumerate(dendrogram.leaf_order())
    }
    ordered = tuple(
        tuple(sorted(members, key=pos.__getitem__)) for members in partition.clusters
    )
    return replace(partition, intra_order=ordered)


def linkage_csv(dendrogram: Dendrogram) -> str:
    """Debug dump of the merge table."""
    lines = ["left,right,height,size"]
    for m in dendrogram.merges:
        lines.append(f"{m.left},{m.right},{m.height!r},{m.size}")
    return "\n".join(lines) + "\n"
