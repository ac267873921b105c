import itertools
import os
from pathlib import Path

import numpy as np
import pytest

import cproc

DATA = Path(os.environ.get("CPROC_TEST_DATA", Path(__file__).resolve().parents[2] / "tests" / "data"))


def test_parse_and_round_trip(tmp_path):
    ds = cproc.parse_tu_dataset(str(DATA / "TINY"), "TINY")
    assert len(ds) == 2
    assert ds.num_classes == 2
    assert ds.graphs[0].edges == [(0, 1), (0, 2), (1, 2), (2, 3)]
    cproc.write_tu_dataset(ds, str(tmp_path))
    for f in (DATA / "TINY").iterdir():
        assert (tmp_path / f.name).read_bytes() == f.read_bytes()


def test_missing_dataset_raises():
    with pytest.raises(cproc.ParseError):
        cproc.parse_tu_dataset(str(DATA / "NOPE"), "NOPE")


def test_filtration_values_per_vertex():
    g = cproc.Graph(4, [(0, 1), (1, 2)])
    np.testing.assert_array_equal(cproc.compute_filtration(g, "degree"), [1, 2, 1, 0])
    np.testing.assert_allclose(cproc.compute_filtration(g, "closeness"), [1.5, 2, 1.5, 0])


def test_persistence_of_a_square():
    g = cproc.Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    values = cproc.compute_filtration(g, "degree")
    np.testing.assert_array_equal(values, [2, 2, 2, 2])
    d = cproc.sublevel_persistence(g, values)
    assert d.dim0.shape == (4, 2)
    assert d.dim1.tolist() == [[2.0, np.inf]]
    capped = cproc.cap_diagram(d, 3.0)
    assert capped.dim1.tolist() == [[2.0, 3.0]]
    img = cproc.persistence_image(capped, resolution=10, cap=3.0)
    assert img.shape == (10, 10)
    assert img.sum() > 0


def brute_wasserstein(a, b):
    # Augment each side with the other's diagonal projections and try every matching.
    def proj(p):
        m = (p[0] + p[1]) / 2
        return (m, m)

    left = [tuple(p) for p in a] + [proj(q) for q in b]
    right = [tuple(q) for q in b] + [proj(p) for p in a]
    na = len(a)
    best = np.inf
    for perm in itertools.permutations(range(len(right))):
        cost = 0.0
        for i, j in enumerate(perm):
            if i >= na and j >= len(b):
                continue
            cost += max(abs(left[i][0] - right[j][0]), abs(left[i][1] - right[j][1]))
        best = min(best, cost)
    return best


def test_wasserstein_matches_brute_force():
    rng = np.random.default_rng(3)
    for _ in range(30):
        a = rng.uniform(0, 1, (rng.integers(0, 3), 2))
        b = rng.uniform(0, 1, (rng.integers(0, 3), 2))
        a[:, 1] += a[:, 0]
        b[:, 1] += b[:, 0]
        got = cproc.wasserstein_distance(a.reshape(-1, 2), b.reshape(-1, 2), 1.0)
        assert got == pytest.approx(brute_wasserstein(a, b), abs=1e-9)


def test_similarity_matrix_is_symmetric():
    graphs = [cproc.Graph(3, [(0, 1), (1, 2), (0, 2)]), cproc.Graph(3, [(0, 1), (1, 2)])]
    diagrams = [cproc.cap_diagram(cproc.sublevel_persistence(g, cproc.compute_filtration(g, "degree")), 2.0)
                for g in graphs]
    m = cproc.similarity_matrix(diagrams)
    assert m.shape == (2, 2)
    assert m[0, 1] == m[1, 0] > 0
    assert m[0, 0] == 0


def test_quantile_order_statistic():
    assert cproc.quantile([5.0, 1.0, 3.0, 2.0, 4.0], 0.5) == 2.0
    assert cproc.quantile([5.0, 1.0, 3.0], 0.01) == 1.0


def test_band_pipeline_sandwiches_roc():
    rng = np.random.default_rng(0)
    n = 240
    x = rng.normal(size=n)
    labels = (rng.uniform(size=n) < 1 / (1 + np.exp(-2 * x))).astype(np.int32)
    scores = 1 / (1 + np.exp(-1.5 * x))
    dist = np.abs(x[:, None] - x[None, :])
    ids = np.arange(n)
    train, calib, test = ids[:120], ids[120:180], ids[180:]
    res = cproc.band_pipeline(dist, scores, labels, train, calib, test, mode="exch", k=20)
    assert np.all(res["sen_lo"] <= res["sen_up"])
    assert np.all(res["spe_lo"] <= res["spe_up"])
    assert res["auc_lo"] <= res["auc_up"]
    assert 0 <= res["roc"]["auc"] <= 1
    cond = cproc.band_pipeline(dist, scores, labels, train, calib, test, mode="cond", k=60, k_train=20)
    np.testing.assert_array_equal(cond["sen_lo"], res["sen_lo"])
    with pytest.raises(cproc.StratumError):
        cproc.band_pipeline(dist, scores, labels, train, calib, test, mode="cond", k=3)


def test_bootstrap_and_coverage():
    rng = np.random.default_rng(1)
    labels = np.array([0, 1] * 50, dtype=np.int32)
    scores = np.clip(rng.uniform(size=100) * 0.7 + 0.3 * labels, 0, 1)
    b = cproc.bootstrap_bands(scores, labels, resamples=100, seed=2, grid_points=32)
    assert np.all(b["tpr_lo"] <= b["tpr_up"])
    r = cproc.coverage_experiment(n_train=200, n_calib=100, n_test=60, reps=2, k=30, mode="exch")
    assert r["replicates"] == 2
    assert 0 <= r["coverage_tpr"] <= 1
