"""Synthetic end-to-end experiment: how much per-instance regret does the ensemble recover?"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np

from .gnn import TrainConfig, ensemble_predict_batch, train_ensemble
from .graph import to_bipartite
from .harness import collect_synthetic
from .perfdb import aggregate, standardize
from .synthetic import FAMILIES, N_SYNTHETIC_CONFIGS, generate_synthetic_instances

log = logging.getLogger(__name__)


@dataclass
class GapClosure:
    gamma_single_best: float
    gamma_model: float
    gamma_oracle: float
    single_best_config: int
    accuracy: float  # share of test instances where the pick equals the oracle pick
    seconds: float

    @property
    def closure(self) -> float:
        gap = self.gamma_single_best - self.gamma_oracle
        return (self.gamma_single_best - self.gamma_model) / gap if gap > 0 else 1.0


def _split(n_per_family: int, seed: int):
    out = []
    for fam in FAMILIES:
        out.extend(generate_synthetic_instances(fam, n_per_family, seed))
    return out


def gap_closure_experiment(n_train=600, n_val=150, n_test=150, noise=0.05, seeds=1, n_members=3,
                           config: TrainConfig | None = None, seed=0) -> GapClosure:
    start = time.perf_counter()
    config = config or TrainConfig(seed=seed)
    k = len(FAMILIES)
    train_set = _split(n_train // k, 3 * seed)
    val_set = _split(n_val // k, 3 * seed + 1)
    test_set = _split(n_test // k, 3 * seed + 2)
    configs = list(range(N_SYNTHETIC_CONFIGS))

    def matrix(instances):
        records = collect_synthetic(instances, configs, seeds, noise)
        return aggregate(records, configs, [i.id for i in instances])

    m_train, m_val, m_test = matrix(train_set), matrix(val_set), matrix(test_set)
    t_train, t_val = standardize(m_train).values, standardize(m_val).values
    train_data = [(to_bipartite(i), t) for i, t in zip(train_set, t_train)]
    val_data = [(to_bipartite(i), t) for i, t in zip(val_set, t_val)]
    members, logs = train_ensemble(train_data, config, n_members, val_dataset=val_data, config_ids=configs)
    for k_, h in enumerate(logs):
        log.info("member %d: %d epochs, best val %.4f", k_, len(h), min(e.val_mse for e in h))

    preds = ensemble_predict_batch(members, [to_bipartite(i) for i in test_set])
    picks = preds.argmin(axis=1)
    rows = np.arange(len(test_set))
    single_best = int(np.argmin(m_train.values.mean(axis=0)))
    oracle = m_test.values.argmin(axis=1)
    return GapClosure(
        gamma_single_best=float(m_test.values[:, single_best].sum()),
        gamma_model=float(m_test.values[rows, picks].sum()),
        gamma_oracle=float(m_test.values[rows, oracle].sum()),
        single_best_config=configs[single_best],
        accuracy=float(np.mean(picks == oracle)),
        seconds=time.perf_counter() - start,
    )
