from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .model import GnnModel, forward_batch, init_model, loss_and_grads, loss_mse, make_batch

log = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 16
    max_epochs: int = 100
    patience: int = 10
    seed: int = 0
    val_fraction: float = 0.2
    hidden: int = 64

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError("learning rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch size must be at least 1")


class Adam:
    def __init__(self, params: dict[str, np.ndarray], cfg: TrainConfig):
        self.cfg = cfg
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params, grads):
        c = self.cfg
        self.t += 1
        bc1 = 1 - c.beta1**self.t
        bc2 = 1 - c.beta2**self.t
        for k, g in grads.items():
            self.m[k] = c.beta1 * self.m[k] + (1 - c.beta1) * g
            self.v[k] = c.beta2 * self.v[k] + (1 - c.beta2) * g * g
            params[k] -= c.lr * (self.m[k] / bc1) / (np.sqrt(self.v[k] / bc2) + c.eps)


@dataclass
class EpochLog:
    epoch: int
    train_mse: float
    val_mse: float


def format_log(entries: list[EpochLog]) -> str:
    return "".join(f"{e.epoch}\t{e.train_mse!r}\t{e.val_mse!r}\n" for e in entries)


def evaluate_mse(model: GnnModel, graphs, targets, batch_size: int = 64) -> float:
    total, count = 0.0, 0
    for lo in range(0, len(graphs), batch_size):
        batch = make_batch(graphs[lo : lo + batch_size], model.schema_version)
        out, _ = forward_batch(model, batch, "eval")
        total += loss_mse(out, targets[lo : lo + batch_size]) * out.size
        count += out.size
    return total / count


def train(dataset, config: TrainConfig = TrainConfig(), val_dataset=None, config_ids=None):
    """Fit one model on ``[(graph, standardized target row), ...]``.

    Without ``val_dataset`` a ``val_fraction`` share of ``dataset`` is held
    out (if that leaves nothing, the training set doubles as validation).
    Returns the parameters of the best validation epoch and the epoch log.
    """
    if not dataset:
        raise ValueError("training dataset is empty")
    widths = {len(t) for _, t in dataset} | {len(t) for _, t in (val_dataset or [])}
    if len(widths) != 1:
        raise ValueError(f"inconsistent target widths: {sorted(widths)}")
    n_out = widths.pop()
    rng = np.random.default_rng(config.seed)
    model = init_model(n_out, config.hidden, seed=config.seed, config_ids=config_ids)

    items = list(dataset)
    if val_dataset is None:
        order = rng.permutation(len(items))
        n_val = int(round(config.val_fraction * len(items)))
        if 0 < n_val < len(items):
            val_items = [items[k] for k in order[:n_val]]
            items = [items[k] for k in order[n_val:]]
        else:
            val_items = items
    else:
        val_items = list(val_dataset)

    graphs = [g for g, _ in items]
    targets = np.array([t for _, t in items], dtype=np.float64)
    val_graphs = [g for g, _ in val_items]
    val_targets = np.array([t for _, t in val_items], dtype=np.float64)

    opt = Adam(model.params, config)
    history: list[EpochLog] = []
    best_val, best_state, since_best = np.inf, None, 0
    for epoch in range(1, config.max_epochs + 1):
        perm = rng.permutation(len(graphs))
        total, count = 0.0, 0
        for lo in range(0, len(perm), config.batch_size):
            idx = perm[lo : lo + config.batch_size]
            batch = make_batch([graphs[k] for k in idx], model.schema_version)
            loss, grads = loss_and_grads(model, batch, targets[idx])
            opt.step(model.params, grads)
            total += loss * len(idx)
            count += len(idx)
        val = evaluate_mse(model, val_graphs, val_targets)
        history.append(EpochLog(epoch, total / count, val))
        log.debug("epoch %d train %.5f val %.5f", epoch, total / count, val)
        if val < best_val:
            best_val, best_state, since_best = val, model.copy(), 0
        else:
            since_best += 1
            if since_best >= config.patience:
                break
    return best_state, history


def train_ensemble(dataset, config: TrainConfig = TrainConfig(), n_members: int = 3, val_dataset=None,
                   config_ids=None):
    members, logs = [], []
    for k in range(n_members):
        cfg = TrainConfig(**{**config.__dict__, "seed": config.seed + k})
        model, history = train(dataset, cfg, val_dataset, config_ids)
        members.append(model)
        logs.append(history)
    return members, logs
