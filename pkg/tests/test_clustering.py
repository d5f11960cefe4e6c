"""Ward dendrogram construction, cutting, and within-cluster ordering."""
import math
import random

import numpy as np
import pytest
import scipy.cluster.hierarchy as sch

from oracles import ward_merges
from strokeflow import (
    Color,
    EmptySet,
    NegativeDistance,
    Point,
    Stroke,
    StrokeKind,
    StrokeSet,
    build_dendrogram,
    cut,
    intra_order,
    linkage_csv,
)

BLACK = Color(0, 0, 0)


def stroke_at(sid, x, y):
    return Stroke(
        sid, StrokeKind.LINE, (Point(x, y), Point(x + 0.25, y)), BLACK, 1.0
    )


def set_of(anchors, ids=None, canvas=4000.0):
    ids = ids if ids is not None else range(len(anchors))
    strokes = tuple(stroke_at(i, x, y) for i, (x, y) in zip(ids, anchors))
    return StrokeSet(strokes, canvas, canvas)


def random_anchors(rng, n, span=100.0):
    return [(rng.uniform(0, span), rng.uniform(0, span)) for _ in range(n)]


# ------------------------------------------------------------------ dendrogram


def test_two_anchor_height_is_distance():
    d = build_dendrogram(set_of([(0, 0), (3, 4)]))
    assert len(d.merges) == 1
    assert d.merges[0].height == pytest.approx(5.0, rel=1e-12)
    assert d.merges[0].size == 2


def test_three_anchor_example():
    d = build_dendrogram(set_of([(0, 0), (1, 0), (10, 0)]))
    first, second = d.merges
    assert (first.left, first.right) == (0, 1)
    assert first.height == pytest.approx(1.0, rel=1e-12)
    # merging {0,1} (centroid 0.5) with {2}: sqrt(2*2*1/3) * 9.5
    expect = math.sqrt(4.0 / 3.0) * 9.5
    assert second.height == pytest.approx(expect, rel=1e-12)
    assert (second.left, second.right) == (3, 2)
    assert second.size == 3


def test_identical_anchors_zero_heights_and_id_order():
    n = 6
    d = build_dendrogram(set_of([(2.0, 2.0)] * n))
    assert all(m.height == 0.0 for m in d.merges)
    assert d.leaf_order() == list(range(n))
    # deterministic left comb: every merge attaches the next leaf
    for k, m in enumerate(d.merges):
        assert m.size == k + 2


def test_matches_brute_force_ess_oracle():
    rng = random.Random(1404)
    for _ in range(15):
        n = rng.randrange(2, 7)
        anchors = random_anchors(rng, n)
        d = build_dendrogram(set_of(anchors))
        expect = ward_merges(anchors)
        assert len(d.merges) == len(expect)
        for got, (left, right, height, size) in zip(d.merges, expect):
            assert (got.left, got.right, got.size) == (left, right, size)
            assert got.height == pytest.approx(height, rel=1e-9)


def test_input_order_does_not_matter():
    rng = random.Random(77)
    anchors = random_anchors(rng, 24)
    strokes = [stroke_at(i, x, y) for i, (x, y) in enumerate(anchors)]
    base = build_dendrogram(StrokeSet(tuple(strokes), 4000, 4000))
    shuffled = strokes[:]
    rng.shuffle(shuffled)
    again = build_dendrogram(StrokeSet(tuple(shuffled), 4000, 4000))
    assert base.merges == again.merges
    assert base.leaf_ids == again.leaf_ids


def test_heights_are_nondecreasing():
    rng = random.Random(9)
    for _ in range(10):
        anchors = random_anchors(rng, rng.randrange(5, 40))
        d = build_dendrogram(set_of(anchors))
        hs = [m.height for m in d.merges]
        assert all(a <= b + 1e-12 for a, b in zip(hs, hs[1:]))


def test_against_scipy_at_scale():
    """Cross-check heights and cut partitions against scipy's ward linkage."""
    rng = np.random.default_rng(321)
    pts = rng.uniform(0, 500, size=(300, 2))
    d = build_dendrogram(set_of([tuple(p) for p in pts], canvas=4000.0))
    z = sch.linkage(pts, method="ward")
    ours = np.array([m.height for m in d.merges])
    assert np.allclose(ours, z[:, 2], rtol=1e-9, atol=1e-12)

    for thr in (10.0, 40.0, 120.0):
        part = cut(d, thr)
        mine = {frozenset(c) for c in part.clusters}
        labels = sch.fcluster(z, t=thr, criterion="distance")
        theirs = {}
        for i, lab in enumerate(labels):
            theirs.setdefault(lab, set()).add(i)
        assert mine == {frozenset(v) for v in theirs.values()}


def test_empty_set_rejected():
    with pytest.raises(EmptySet):
        build_dendrogram(StrokeSet((), 10, 10))


def test_single_stroke_dendrogram():
    d = build_dendrogram(StrokeSet((stroke_at(5, 3, 3),), 10, 10))
    assert d.merges == ()
    assert d.leaf_ids == (5,)
    part = cut(d, 1.0)
    assert part.clusters == ((5,),)


# ------------------------------------------------------------------------- cut


def test_cut_two_far_pairs():
    d = build_dendrogram(set_of([(0, 0), (1, 0), (100, 0), (101, 0)]))
    part = cut(d, 10.0)
    assert part.clusters == ((0, 1), (2, 3))
    assert part.centroids[0] == Point(0.5, 0.0)
    assert part.centroids[1] == Point(100.5, 0.0)


def test_cut_zero_gives_singletons():
    anchors = [(0, 0), (1, 0), (1, 0), (5, 5)]  # duplicates included
    d = build_dendrogram(set_of(anchors))
    part = cut(d, 0.0)
    assert part.clusters == ((0,), (1,), (2,), (3,))


def test_cut_huge_gives_one_cluster():
    rng = random.Random(2)
    anchors = random_anchors(rng, 30)
    d = build_dendrogram(set_of(anchors))
    part = cut(d, 1e18)
    assert len(part.clusters) == 1
    assert sorted(part.clusters[0]) == list(range(30))


def test_cut_is_inclusive_at_merge_height():
    d = build_dendrogram(set_of([(0, 0), (3, 4)]))
    assert len(cut(d, 5.0).clusters) == 1
    assert len(cut(d, 5.0 - 1e-9).clusters) == 2


def test_cut_validates_dist_prox():
    d = build_dendrogram(set_of([(0, 0), (1, 1)]))
    with pytest.raises(NegativeDistance):
        cut(d, -0.5)
    with pytest.raises(ValueError):
        cut(d, float("nan"))


def test_cut_clusters_ordered_by_min_id():
    rng = random.Random(6)
    anchors = random_anchors(rng, 40, span=300.0)
    d = build_dendrogram(set_of(anchors))
    part = cut(d, 30.0)
    mins = [min(c) for c in part.clusters]
    assert mins == sorted(mins)
    assert sorted(i for c in part.clusters for i in c) == list(range(40))


def test_cut_centroids_are_cluster_means():
    rng = random.Random(3)
    anchors = random_anchors(rng, 25)
    d = build_dendrogram(set_of(anchors))
    part = cut(d, 25.0)
    for members, centroid in zip(part.clusters, part.centroids):
        xs = [anchors[i][0] for i in members]
        ys = [anchors[i][1] for i in members]
        assert centroid.x == pytest.approx(sum(xs) / len(xs), rel=1e-12)
        assert centroid.y == pytest.approx(sum(ys) / len(ys), rel=1e-12)


# ----------------------------------------------------------------- intra order


def test_intra_order_singleton():
    d = build_dendrogram(set_of([(0, 0)], ids=[9]))
    part = intra_order(d, cut(d, 0.0))
    assert part.intra_order == ((9,),)


def test_intra_order_follows_merge_tree():
    d = build_dendrogram(set_of([(0, 0), (1, 0), (5, 0)]))
    part = intra_order(d, cut(d, 1e18))
    assert part.intra_order == ((0, 1, 2),)


def test_intra_order_identical_anchors_sorted_by_id():
    d = build_dendrogram(set_of([(4, 4)] * 5, ids=[11, 3, 7, 2, 9]))
    part = intra_order(d, cut(d, 1e18))
    assert part.intra_order == ((2, 3, 7, 9, 11),)


def test_intra_order_is_consistent_with_leaf_order():
    """Within each cluster, strokes appear in full-dendrogram leaf order."""
    rng = random.Random(55)
    anchors = random_anchors(rng, 60, span=400.0)
    d = build_dendrogram(set_of(anchors))
    order = d.leaf_order()
    pos = {d.leaf_ids[leaf]: i for i, leaf in enumerate(order)}
    part = intra_order(d, cut(d, 50.0))
    for members, ordered in zip(part.clusters, part.intra_order):
        assert sorted(ordered) == sorted(members)
        positions = [pos[sid] for sid in ordered]
        assert positions == sorted(positions)


def test_linkage_csv_shape():
    d = build_dendrogram(set_of([(0, 0), (1, 0), (10, 0)]))
    lines = linkage_csv(d).strip().splitlines()
    assert lines[0] == "left,right,height,size"
    assert len(lines) == 3
    cells = lines[1].split(",")
    assert len(cells) == 4
    assert int(cells[0]) == 0 and int(cells[1]) == 1
