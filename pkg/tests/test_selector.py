import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from confscout.perfdb import PerfMatrix
from confscout.selector import (
    SelectionError,
    SubsetChain,
    brute_force_best_subset,
    choose_size,
    gain,
    greedy_chain,
    quality,
)


def mat(values, ids=None):
    values = np.asarray(values, dtype=float)
    ids = list(range(values.shape[1])) if ids is None else ids
    return PerfMatrix([f"i{k}" for k in range(values.shape[0])], ids, values)


def test_quality_example():
    m = mat([[4, 2], [6, 8]])
    assert quality(m, [0, 1]) == -4.0
    assert quality(m, [1]) == -5.0
    with pytest.raises(SelectionError):
        quality(m, [])


def test_single_row_greedy():
    chain = greedy_chain(mat([[5, 1, 3]], ids=[10, 11, 12]), k_max=1)
    assert chain.added == [11] and chain.qualities == [-1.0]


def test_dominant_column_first():
    rng = np.random.default_rng(1)
    v = rng.uniform(1, 10, size=(6, 5))
    v[:, 3] = v.min(axis=1) - 0.5
    m = mat(v)
    chain = greedy_chain(m)
    assert chain.added[0] == 3
    assert chain.qualities[0] == chain.q_full


def test_ties_go_to_smallest_id():
    chain = greedy_chain(mat([[1, 1, 1]], ids=[7, 3, 5]))
    assert chain.added == [3, 5, 7]


def test_k_max_out_of_range():
    with pytest.raises(SelectionError):
        greedy_chain(mat([[1, 2]]), k_max=3)
    with pytest.raises(SelectionError):
        greedy_chain(mat([[1, 2]]), k_max=0)


def reference_greedy(values, ids):
    """Exhaustive re-evaluation of every extension at every step, pure Python."""
    rows = [list(r) for r in values]
    chosen, qs = [], []
    for _ in range(len(ids)):
        best = None
        for j, c in sorted(enumerate(ids), key=lambda jc: jc[1]):
            if c in chosen:
                continue
            sub = [ids.index(x) for x in chosen] + [j]
            q = -math.fsum(min(r[s] for s in sub) for r in rows) / len(rows)
            if best is None or q > best[0]:
                best = (q, c)
        chosen.append(best[1])
        qs.append(best[0])
    return chosen, qs


@pytest.mark.parametrize("seed", range(20))
def test_greedy_matches_reference(seed):
    rng = np.random.default_rng(seed)
    v = rng.integers(1, 50, size=(6, 5)).astype(float)  # integers keep fsum and mean bit-equal
    ids = [int(x) for x in rng.permutation(20)[:5]]
    chain = greedy_chain(mat(v, ids))
    added, qs = reference_greedy(v.tolist(), ids)
    assert chain.added == added
    assert chain.qualities == qs


def test_choose_size_examples():
    chain = SubsetChain([4, 2, 9, 1], [-10.0, -6.0, -5.0, -5.0], -5.0)
    assert choose_size(chain, 0.0) == 3
    assert choose_size(chain, 1.0) == 1
    assert choose_size(chain, 0.2) == 2  # bound 1.0, gap at k=2 is 1.0
    assert choose_size(chain, 0.19) == 3
    with pytest.raises(SelectionError):
        choose_size(chain, -0.1)


def test_choose_size_returns_k_max_when_unsatisfied():
    chain = SubsetChain([0, 1], [-10.0, -8.0], -5.0)
    assert choose_size(chain, 0.0) == 2


@pytest.mark.parametrize("seed", range(20))
def test_choose_size_is_tight(seed):
    rng = np.random.default_rng(100 + seed)
    m = mat(rng.uniform(0, 10, size=(8, 7)))
    chain = greedy_chain(m)
    eps = float(rng.uniform(0, 0.5))
    k = choose_size(chain, eps)
    bound = eps * (chain.q_full - chain.qualities[0])
    assert chain.q_full - chain.qualities[k - 1] <= bound
    if k > 1:
        assert chain.q_full - chain.qualities[k - 2] > bound


def test_chain_text_round_trip():
    chain = greedy_chain(mat(np.random.default_rng(0).uniform(size=(4, 4))))
    again = SubsetChain.from_text(chain.to_text())
    assert again == chain
    assert chain.to_text().splitlines()[0] == "k\tadded_config_id\tq_of_prefix\tq_full"


def second_enumerator(values, ids, k):
    """Bitmask enumeration; ties resolved by lexicographic order of sorted ids."""
    n = len(ids)
    best = None
    for mask in range(1 << n):
        if bin(mask).count("1") != k:
            continue
        sub = sorted(ids[j] for j in range(n) if mask >> j & 1)
        cols = [ids.index(c) for c in sub]
        q = -math.fsum(min(r[c] for c in cols) for r in values) / len(values)
        if best is None or q > best[0] or (q == best[0] and sub < best[1]):
            best = (q, sub)
    return best[1], best[0]


@pytest.mark.parametrize("seed", range(10))
def test_brute_force_matches_second_enumerator(seed):
    rng = np.random.default_rng(seed)
    v = rng.integers(1, 30, size=(8, 6)).astype(float)
    ids = [int(x) for x in rng.permutation(40)[:6]]
    sub, q = brute_force_best_subset(mat(v, ids), 3)
    ref_sub, ref_q = second_enumerator(v.tolist(), ids, 3)
    assert sub == ref_sub and q == ref_q


def test_brute_force_edges():
    m = mat([[3, 1, 2], [1, 3, 2]])
    assert brute_force_best_subset(m, 3) == ([0, 1, 2], quality(m, [0, 1, 2]))
    # all column means tie at 2: lexicographic tie-break
    assert brute_force_best_subset(m, 1) == ([0], -2.0)
    assert brute_force_best_subset(mat([[3, 1, 2], [1, 3, 1]]), 1) == ([2], -1.5)
    big = mat(np.ones((1, 40)))
    with pytest.raises(SelectionError, match="limit"):
        brute_force_best_subset(big, 20)


def test_gain_example():
    m = mat([[4, 2], [6, 8]])
    # row maxima 4 and 8; mins over both configs 2 and 6
    assert gain(m, [0, 1]) == 2.0
    assert gain(m, []) == 0.0


matrices = st.integers(1, 6).flatmap(
    lambda n: st.integers(1, 6).flatmap(
        lambda c: st.lists(st.lists(st.integers(0, 100), min_size=c, max_size=c), min_size=n, max_size=n)
    )
)


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_chain_invariants(values):
    m = mat(values)
    chain = greedy_chain(m)
    assert sorted(chain.added) == m.config_ids
    assert all(a <= b for a, b in zip(chain.qualities, chain.qualities[1:]))
    assert chain.qualities[-1] == chain.q_full
    for k in range(1, len(chain.added) + 1):
        assert quality(m, chain.prefix(k)) == chain.qualities[k - 1]
        # the gain form differs from quality by a constant, so greedy rankings agree
        assert math.isclose(gain(m, chain.prefix(k)) - quality(m, chain.prefix(k)),
                            float(np.mean(m.values.max(axis=1))), abs_tol=1e-9)


@settings(max_examples=60, deadline=None)
@given(matrices, st.integers(1, 20), st.integers(-50, 50))
def test_greedy_pick_sequence_affine_equivariant(values, a, b):
    m = mat(values)
    scaled = mat(a * np.asarray(values, dtype=float) + b)
    assert greedy_chain(scaled).added == greedy_chain(m).added


@settings(max_examples=60, deadline=None)
@given(matrices, st.data())
def test_quality_monotone_and_gain_submodular(values, data):
    m = mat(values)
    ids = m.config_ids
    small = data.draw(st.lists(st.sampled_from(ids), unique=True))
    extra = data.draw(st.lists(st.sampled_from(ids), unique=True))
    big = sorted(set(small) | set(extra))
    if small:
        assert quality(m, small) <= quality(m, big)
    for c in ids:
        if c in big:
            continue
        d_small = gain(m, small + [c]) - gain(m, small)
        d_big = gain(m, big + [c]) - gain(m, big)
        assert d_small >= d_big - 1e-9


@pytest.mark.parametrize("seed", range(10))
def test_greedy_within_submodular_bound(seed):
    rng = np.random.default_rng(500 + seed)
    m = mat(rng.uniform(0, 10, size=(10, 8)))
    chain = greedy_chain(m)
    for k in range(1, 6):
        opt, _ = brute_force_best_subset(m, k)
        assert gain(m, chain.prefix(k)) >= (1 - 1 / math.e) * gain(m, opt) - 1e-12
    for a, b in itertools.pairwise(range(1, 6)):
        assert set(chain.prefix(a)) < set(chain.prefix(b))
