"""Greedy portfolio construction over a performance matrix.

The quality of a configuration subset S is the negated mean, over instances,
of the best gamma reachable inside S.  Growing S greedily by the largest
quality gain gives a nested chain S_1 ⊆ S_2 ⊆ ...; ``choose_size`` picks the
shortest prefix whose quality is within a relative gap of the full set.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .perfdb import PerfMatrix

BRUTE_FORCE_LIMIT = 10**6


class SelectionError(ValueError):
    pass


def quality(matrix: PerfMatrix, subset) -> float:
    subset = list(subset)
    if not subset:
        raise SelectionError("quality of an empty subset is undefined")
    cols = matrix.columns(subset)
    return -float(np.mean(matrix.values[:, cols].min(axis=1)))


def gain(matrix: PerfMatrix, subset) -> float:
    """Submodular form of quality: mean drop of each row's min below its row max."""
    subset = list(subset)
    worst = matrix.values.max(axis=1)
    if not subset:
        return 0.0
    cols = matrix.columns(subset)
    return float(np.mean(worst - matrix.values[:, cols].min(axis=1)))


@dataclass
class SubsetChain:
    added: list[int]  # c^1, c^2, ...
    qualities: list[float]  # q(S_1), q(S_2), ...
    q_full: float

    def prefix(self, k: int) -> list[int]:
        return self.added[:k]

    def to_text(self) -> str:
        lines = ["k\tadded_config_id\tq_of_prefix\tq_full\n"]
        for k, (c, q) in enumerate(zip(self.added, self.qualities), start=1):
            lines.append(f"{k}\t{c}\t{q!r}\t{self.q_full!r}\n")
        return "".join(lines)

    @classmethod
    def from_text(cls, text: str) -> "SubsetChain":
        added, qs, q_full = [], [], math.nan
        for line in text.splitlines()[1:]:
            if not line.strip():
                continue
            _, c, q, qf = line.split("\t")
            added.append(int(c))
            qs.append(float(q))
            q_full = float(qf)
        return cls(added, qs, q_full)


def greedy_chain(matrix: PerfMatrix, k_max: int | None = None) -> SubsetChain:
    n_cols = len(matrix.config_ids)
    if k_max is None:
        k_max = n_cols
    if not 1 <= k_max <= n_cols:
        raise SelectionError(f"k_max must be in [1, {n_cols}], got {k_max}")
    columns = np.ascontiguousarray(matrix.values.T)
    ids = np.asarray(matrix.config_ids)
    current = np.full(columns.shape[1], np.inf)
    available = np.ones(n_cols, dtype=bool)
    added, qualities = [], []
    for _ in range(k_max):
        # 1-d means per column give the same bits as quality(), so ties agree
        cand = np.full(n_cols, -np.inf)
        for c in np.flatnonzero(available):
            cand[c] = -np.mean(np.minimum(current, columns[c]))
        best = cand.max()
        tied = np.flatnonzero(cand == best)
        pick = tied[np.argmin(ids[tied])]
        available[pick] = False
        current = np.minimum(current, columns[pick])
        added.append(int(ids[pick]))
        qualities.append(quality(matrix, added))
    return SubsetChain(added, qualities, quality(matrix, matrix.config_ids))


def choose_size(chain: SubsetChain, epsilon: float = 0.01) -> int:
    """Smallest k with q_full - q(S_k) <= epsilon * (q_full - q(S_1))."""
    if epsilon < 0:
        raise SelectionError("epsilon must be non-negative")
    bound = epsilon * (chain.q_full - chain.qualities[0])
    for k, q in enumerate(chain.qualities, start=1):
        if chain.q_full - q <= bound:
            return k
    return len(chain.qualities)


def brute_force_best_subset(matrix: PerfMatrix, k: int) -> tuple[list[int], float]:
    ids = sorted(matrix.config_ids)
    if not 1 <= k <= len(ids):
        raise SelectionError(f"k must be in [1, {len(ids)}], got {k}")
    if math.comb(len(ids), k) > BRUTE_FORCE_LIMIT:
        raise SelectionError(f"C({len(ids)}, {k}) subsets exceeds the brute-force limit")
    best, best_q = None, -math.inf
    for combo in itertools.combinations(ids, k):
        q = quality(matrix, combo)
        if q > best_q:
            best, best_q = list(combo), q
    return best, best_q
