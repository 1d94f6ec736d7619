from collections import namedtuple

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from confscout.cluster import ClusterModel, fit_clusters, predict_cluster, signature
from confscout.perfdb import PerfMatrix

Inst = namedtuple("Inst", "id n_vars n_cons")


def fixture12(seed=0):
    """12 instances over three size signatures (5, 4 and 3 members)."""
    rng = np.random.default_rng(seed)
    sigs = [(10, 5)] * 5 + [(20, 8)] * 4 + [(7, 7)] * 3
    insts = [Inst(f"x{k:02d}", nv, nc) for k, (nv, nc) in enumerate(sigs)]
    values = rng.integers(1, 100, size=(12, 6)).astype(float)
    ids = [2, 3, 5, 7, 11, 13]
    return insts, PerfMatrix([i.id for i in insts], ids, values)


def scan_best(matrix, rows):
    """Exhaustive per-column scan of mean gamma; smallest id on ties."""
    best = None
    for j, cid in enumerate(matrix.config_ids):
        m = sum(matrix.values[r, j] for r in rows) / len(rows)
        if best is None or m < best[0] or (m == best[0] and cid < best[1]):
            best = (m, cid)
    return best[1]


def test_single_signature_is_one_cluster():
    insts = [Inst(f"a{k}", 3, 2) for k in range(4)]
    m = PerfMatrix([i.id for i in insts], [0, 1, 2], [[3, 1, 2], [3, 2, 1], [1, 3, 3], [3, 1, 3]])
    model = fit_clusters(insts, m)
    assert model.clusters == {(3, 2): 1}
    assert model.residual == int(m.config_ids[np.argmin(m.values.mean(axis=0))])


def test_threshold_rule_puts_singletons_in_residual():
    insts = [Inst("a", 3, 2), Inst("b", 3, 2), Inst("c", 3, 2), Inst("d", 9, 9)]
    m = PerfMatrix(["a", "b", "c", "d"], [0, 1], [[1, 2], [1, 2], [1, 2], [5, 4]])
    model = fit_clusters(insts, m, min_cluster_size=2)
    assert model.clusters == {(3, 2): 0}
    assert model.residual == 1
    assert predict_cluster(model, Inst("new", 3, 2)) == 0
    assert predict_cluster(model, Inst("new", 9, 9)) == 1
    assert predict_cluster(model, Inst("new", 1, 1)) == 1


def test_fixture_matches_exhaustive_scan():
    insts, m = fixture12()
    model = fit_clusters(insts, m, min_cluster_size=2)
    assert len(model.clusters) == 3
    for sig in {signature(i) for i in insts}:
        rows = [k for k, i in enumerate(insts) if signature(i) == sig]
        assert model.clusters[sig] == scan_best(m, rows)
    # residual is empty: falls back to the global column means
    assert model.residual == scan_best(m, range(12))
    for k, inst in enumerate(insts):
        assert predict_cluster(model, inst) == model.clusters[signature(inst)]


def test_missing_instance_rejected():
    insts, m = fixture12()
    with pytest.raises(KeyError):
        fit_clusters(insts + [Inst("ghost", 1, 1)], m)


def test_text_round_trip():
    insts, m = fixture12(3)
    model = fit_clusters(insts, m, min_cluster_size=4)
    again = ClusterModel.from_text(model.to_text())
    assert again == model
    with pytest.raises(ValueError):
        ClusterModel.from_text("n_vars\tn_cons\tconfig_id\n1\t1\t0\n")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5), st.randoms(use_true_random=False))
def test_fit_invariants(seed, min_size, rnd):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 15))
    insts = [Inst(f"i{k}", int(rng.integers(1, 4)), int(rng.integers(1, 3))) for k in range(n)]
    m = PerfMatrix([i.id for i in insts], list(range(4)), rng.uniform(0, 10, size=(n, 4)))
    model = fit_clusters(insts, m, min_size)
    shuffled = insts[:]
    rnd.shuffle(shuffled)
    assert fit_clusters(shuffled, m, min_size) == model
    for sig, cfg in model.clusters.items():
        rows = [k for k, i in enumerate(insts) if signature(i) == sig]
        assert len(rows) >= min_size
        means = m.values[rows].mean(axis=0)
        assert means[m.config_ids.index(cfg)] <= means.min()
    assert model.residual in m.config_ids
