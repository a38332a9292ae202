import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.cluster import DBSCAN as SkDBSCAN

from legendgen.cluster import dbscan, fuzzy_min_points, minmax_normalize


def partition(labels):
    clusters = {}
    noise = set()
    for i, lab in enumerate(labels):
        if lab == -1:
            noise.add(i)
        else:
            clusters.setdefault(lab, set()).add(i)
    return frozenset(frozenset(c) for c in clusters.values()), frozenset(noise)


def test_three_blobs():
    rng = np.random.default_rng(0)
    pts = np.vstack([
        rng.normal((0, 0), 0.05, (10, 2)),
        rng.normal((5, 5), 0.05, (10, 2)),
        rng.normal((10, 0), 0.05, (10, 2)),
    ])
    labels = dbscan(pts, eps=0.5, min_points=3)
    ours = partition(labels)
    ref = partition(SkDBSCAN(eps=0.5, min_samples=3).fit_predict(pts))
    assert ours == ref
    assert len(ours[0]) == 3


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_matches_sklearn_on_random_inputs(seed):
    rng = np.random.default_rng(seed)
    n = rng.integers(5, 60)
    pts = rng.uniform(0, 1, (n, 2))
    eps = float(rng.uniform(0.05, 0.3))
    mp = int(rng.integers(2, 6))
    ours = partition(dbscan(pts, eps, mp))
    ref = partition(SkDBSCAN(eps=eps, min_samples=mp).fit_predict(pts))
    assert ours == ref


def test_min_points_rule_paper_values():
    assert fuzzy_min_points(10) == 3
    assert fuzzy_min_points(100) == 5
    assert fuzzy_min_points(1000) == 20


def test_minmax_normalize():
    pts = np.array([[0.0, 10.0], [5.0, 10.0], [10.0, 10.0]])
    out = minmax_normalize(pts)
    assert np.allclose(out[:, 0], [0, 0.5, 1])
    assert np.allclose(out[:, 1], 0.0)  # constant axis collapses


def test_all_identical_points_single_cluster():
    pts = np.zeros((8, 2))
    labels = dbscan(pts, eps=0.1, min_points=3)
    assert set(labels) == {0}


def test_outliers_marked_noise():
    pts = np.vstack([np.zeros((30, 2)) + np.linspace(0, 0.001, 30)[:, None], [[100, 100]], [[-50, 7]]])
    labels = dbscan(pts, eps=0.07, min_points=3)
    assert (labels[:30] == 0).all()
    assert labels[30] == -1 and labels[31] == -1
