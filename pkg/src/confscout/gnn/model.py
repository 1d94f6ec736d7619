"""Bipartite graph network predicting one score per portfolio configuration.

Layout: node embeddings (linear + ReLU), four rounds of
cons<-var then var<-cons half-convolutions, each

    h'_t = ReLU(BN(W1 h_t + mean_{s in N(t)} (W2 h_s + w_e e_st) + b)),

then per side global max and softmax-attention pooling (4H latent) and a
one-hidden-layer dense head.  All arithmetic is float64.  ``forward``
returns a cache that ``backward`` consumes to produce exact gradients of
the mean-squared error.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..graph import N_CONS_FEATURES, N_VAR_FEATURES, BipartiteGraph

N_LAYERS = 4
HALVES = ("cv", "vc")  # cons<-var, then var<-cons


class GraphShapeError(ValueError):
    pass


@dataclass
class GnnModel:
    hidden: int
    n_out: int
    params: dict[str, np.ndarray]
    buffers: dict[str, np.ndarray]
    bn_eps: float = 1e-5
    bn_momentum: float = 0.1
    schema_version: int = 1
    n_layers: int = N_LAYERS
    config_ids: list[int] = field(default_factory=list)

    def copy(self) -> "GnnModel":
        return copy.deepcopy(self)

    def n_parameters(self) -> int:
        return sum(p.size for p in self.params.values())


def _glorot(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def init_model(n_out: int, hidden: int = 64, seed: int = 0, n_layers: int = N_LAYERS,
               config_ids=None) -> GnnModel:
    rng = np.random.default_rng(seed)
    H = hidden
    p: dict[str, np.ndarray] = {}
    b: dict[str, np.ndarray] = {}
    p["emb_v.W"] = _glorot(rng, N_VAR_FEATURES, H)
    p["emb_v.b"] = np.zeros(H)
    p["emb_c.W"] = _glorot(rng, N_CONS_FEATURES, H)
    p["emb_c.b"] = np.zeros(H)
    for layer in range(n_layers):
        for half in HALVES:
            k = f"conv{layer}.{half}."
            p[k + "W1"] = _glorot(rng, H, H)
            p[k + "W2"] = _glorot(rng, H, H)
            p[k + "we"] = rng.uniform(-1.0, 1.0, size=H)
            p[k + "b"] = np.zeros(H)
            p[k + "bn_g"] = np.ones(H)
            p[k + "bn_b"] = np.zeros(H)
            b[k + "bn_mean"] = np.zeros(H)
            b[k + "bn_var"] = np.ones(H)
    p["pool_v.a"] = rng.normal(0.0, 1.0 / np.sqrt(H), size=H)
    p["pool_c.a"] = rng.normal(0.0, 1.0 / np.sqrt(H), size=H)
    p["head.W1"] = _glorot(rng, 4 * H, 4 * H)
    p["head.b1"] = np.zeros(4 * H)
    p["head.W2"] = _glorot(rng, 4 * H, n_out)
    p["head.b2"] = np.zeros(n_out)
    ids = list(config_ids) if config_ids is not None else list(range(n_out))
    return GnnModel(H, n_out, p, b, n_layers=n_layers, config_ids=ids)


@dataclass
class GraphBatch:
    """Several graphs stacked into one disconnected graph."""

    xv: np.ndarray
    xc: np.ndarray
    var_offsets: np.ndarray  # (B+1,)
    cons_offsets: np.ndarray  # (B+1,)
    agg_cv: sp.csr_matrix  # (C, V) mean over a constraint's variables
    agg_vc: sp.csr_matrix  # (V, C) mean over a variable's constraints
    q_c: np.ndarray  # mean incident edge feature per constraint
    q_v: np.ndarray

    @property
    def n_graphs(self) -> int:
        return len(self.var_offsets) - 1


def _mean_operator(tgt, src, feat, n_tgt, n_src):
    deg = np.bincount(tgt, minlength=n_tgt).astype(np.float64)
    inv = np.divide(1.0, deg, out=np.zeros_like(deg), where=deg > 0)
    op = sp.csr_matrix((inv[tgt], (tgt, src)), shape=(n_tgt, n_src))
    q = np.bincount(tgt, weights=feat, minlength=n_tgt) * inv
    return op, q


def make_batch(graphs: list[BipartiteGraph], schema_version: int | None = None) -> GraphBatch:
    for g in graphs:
        if g.n_vars == 0:
            raise GraphShapeError(f"graph {g.instance_id!r} has no variable nodes")
        if g.var_features.shape[1] != N_VAR_FEATURES or g.cons_features.shape[1] != N_CONS_FEATURES:
            raise GraphShapeError(f"graph {g.instance_id!r}: feature dimension mismatch")
        if schema_version is not None and g.schema_version != schema_version:
            raise GraphShapeError(
                f"graph {g.instance_id!r}: schema version {g.schema_version}, model expects {schema_version}"
            )
    var_offsets = np.concatenate([[0], np.cumsum([g.n_vars for g in graphs])]).astype(np.int64)
    cons_offsets = np.concatenate([[0], np.cumsum([g.n_cons for g in graphs])]).astype(np.int64)
    xv = np.concatenate([g.var_features for g in graphs]).astype(np.float64)
    xc = np.concatenate([g.cons_features for g in graphs]).reshape(-1, N_CONS_FEATURES).astype(np.float64)
    ec = np.concatenate([g.edge_cons + o for g, o in zip(graphs, cons_offsets)]).astype(np.int64)
    ev = np.concatenate([g.edge_var + o for g, o in zip(graphs, var_offsets)]).astype(np.int64)
    ef = np.concatenate([g.edge_features for g in graphs]).astype(np.float64)
    V, C = len(xv), len(xc)
    agg_cv, q_c = _mean_operator(ec, ev, ef, C, V)
    agg_vc, q_v = _mean_operator(ev, ec, ef, V, C)
    return GraphBatch(xv, xc, var_offsets, cons_offsets, agg_cv, agg_vc, q_c, q_v)


# -- layers -----------------------------------------------------------------


def _relu(x):
    return np.maximum(x, 0.0)


def _bn_forward(z, gamma, beta, model, key, mode, update_stats):
    if mode == "train":
        if z.shape[0] == 0:
            return z.copy(), None
        mu = z.mean(axis=0)
        var = z.var(axis=0)
        if update_stats:
            m = model.bn_momentum
            model.buffers[key + "bn_mean"] = (1 - m) * model.buffers[key + "bn_mean"] + m * mu
            model.buffers[key + "bn_var"] = (1 - m) * model.buffers[key + "bn_var"] + m * var
    else:
        mu = model.buffers[key + "bn_mean"]
        var = model.buffers[key + "bn_var"]
    inv_std = 1.0 / np.sqrt(var + model.bn_eps)
    zhat = (z - mu) * inv_std
    return gamma * zhat + beta, (zhat, inv_std, mode)


def _bn_backward(dy, gamma, cache):
    if cache is None:
        return dy.copy(), np.zeros_like(gamma), np.zeros_like(gamma)
    zhat, inv_std, mode = cache
    dgamma = (dy * zhat).sum(axis=0)
    dbeta = dy.sum(axis=0)
    dzhat = dy * gamma
    if mode != "train":
        return dzhat * inv_std, dgamma, dbeta
    n = dy.shape[0]
    dz = inv_std / n * (n * dzhat - dzhat.sum(axis=0) - zhat * (dzhat * zhat).sum(axis=0))
    return dz, dgamma, dbeta


def _half_forward(model, key, h_t, h_s, op, q, mode, update_stats):
    p = model.params
    u = op @ h_s
    z = h_t @ p[key + "W1"] + u @ p[key + "W2"] + q[:, None] * p[key + "we"] + p[key + "b"]
    y, bn_cache = _bn_forward(z, p[key + "bn_g"], p[key + "bn_b"], model, key, mode, update_stats)
    out = _relu(y)
    return out, (h_t, u, y, bn_cache)


def _half_backward(model, key, dout, cache, op, q, grads):
    p = model.params
    h_t, u, y, bn_cache = cache
    dy = dout * (y > 0)
    dz, grads[key + "bn_g"], grads[key + "bn_b"] = _bn_backward(dy, p[key + "bn_g"], bn_cache)
    grads[key + "W1"] = h_t.T @ dz
    grads[key + "W2"] = u.T @ dz
    grads[key + "we"] = q @ dz
    grads[key + "b"] = dz.sum(axis=0)
    dh_t = dz @ p[key + "W1"].T
    dh_s = op.T @ (dz @ p[key + "W2"].T)
    return dh_t, np.asarray(dh_s)


def _pool_forward(h, offsets, a):
    B, H = len(offsets) - 1, h.shape[1]
    mx = np.zeros((B, H))
    att = np.zeros((B, H))
    argmax, alphas = [], []
    for g in range(B):
        seg = h[offsets[g] : offsets[g + 1]]
        if len(seg) == 0:
            argmax.append(None)
            alphas.append(None)
            continue
        idx = seg.argmax(axis=0)
        mx[g] = seg[idx, np.arange(H)]
        s = seg @ a
        s = np.exp(s - s.max())
        alpha = s / s.sum()
        att[g] = alpha @ seg
        argmax.append(idx)
        alphas.append(alpha)
    return mx, att, (argmax, alphas)


def _pool_backward(h, offsets, a, dmx, datt, cache):
    argmax, alphas = cache
    H = h.shape[1]
    dh = np.zeros_like(h)
    da = np.zeros_like(a)
    for g, (idx, alpha) in enumerate(zip(argmax, alphas)):
        if idx is None:
            continue
        lo = offsets[g]
        seg = h[lo : offsets[g + 1]]
        dseg = dh[lo : offsets[g + 1]]
        dseg[idx, np.arange(H)] += dmx[g]
        dseg += alpha[:, None] * datt[g][None, :]
        dalpha = seg @ datt[g]
        ds = alpha * (dalpha - alpha @ dalpha)
        dseg += ds[:, None] * a[None, :]
        da += seg.T @ ds
    return dh, da


# -- network ----------------------------------------------------------------


def forward_batch(model: GnnModel, batch: GraphBatch, mode: str = "eval", update_stats: bool = True):
    """Predictions of shape (n_graphs, n_out) plus the cache for ``backward``."""
    if mode not in ("train", "eval"):
        raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")
    p = model.params
    cache = {}
    zv = batch.xv @ p["emb_v.W"] + p["emb_v.b"]
    zc = batch.xc @ p["emb_c.W"] + p["emb_c.b"]
    hv, hc = _relu(zv), _relu(zc)
    cache["emb"] = (zv, zc)
    for layer in range(model.n_layers):
        k = f"conv{layer}."
        hc, cache[k + "cv"] = _half_forward(model, k + "cv.", hc, hv, batch.agg_cv, batch.q_c, mode, update_stats)
        hv, cache[k + "vc"] = _half_forward(model, k + "vc.", hv, hc, batch.agg_vc, batch.q_v, mode, update_stats)
    mv, av, cache["pool_v"] = _pool_forward(hv, batch.var_offsets, p["pool_v.a"])
    mc, ac, cache["pool_c"] = _pool_forward(hc, batch.cons_offsets, p["pool_c.a"])
    latent = np.concatenate([mv, av, mc, ac], axis=1)
    z1 = latent @ p["head.W1"] + p["head.b1"]
    r = _relu(z1)
    out = r @ p["head.W2"] + p["head.b2"]
    cache.update(hv=hv, hc=hc, latent=latent, z1=z1, r=r, batch=batch)
    return out, cache


def forward(model: GnnModel, graph: BipartiteGraph, mode: str = "eval") -> np.ndarray:
    batch = make_batch([graph], model.schema_version)
    out, _ = forward_batch(model, batch, mode)
    return out[0]


def predict_batch(model: GnnModel, graphs: list[BipartiteGraph], batch_size: int = 64) -> np.ndarray:
    outs = []
    for lo in range(0, len(graphs), batch_size):
        batch = make_batch(graphs[lo : lo + batch_size], model.schema_version)
        outs.append(forward_batch(model, batch, "eval")[0])
    return np.concatenate(outs) if outs else np.zeros((0, model.n_out))


def loss_mse(pred, targets) -> float:
    pred, targets = np.asarray(pred, dtype=np.float64), np.asarray(targets, dtype=np.float64)
    if pred.shape != targets.shape:
        raise ValueError(f"prediction shape {pred.shape} != target shape {targets.shape}")
    return float(np.mean((pred - targets) ** 2))


def backward(model: GnnModel, out: np.ndarray, targets: np.ndarray, cache) -> dict[str, np.ndarray]:
    """Gradients of ``loss_mse(out, targets)`` for every parameter."""
    p = model.params
    batch = cache["batch"]
    grads: dict[str, np.ndarray] = {}
    dout = 2.0 * (out - targets) / out.size
    grads["head.W2"] = cache["r"].T @ dout
    grads["head.b2"] = dout.sum(axis=0)
    dz1 = (dout @ p["head.W2"].T) * (cache["z1"] > 0)
    grads["head.W1"] = cache["latent"].T @ dz1
    grads["head.b1"] = dz1.sum(axis=0)
    dlat = dz1 @ p["head.W1"].T
    H = model.hidden
    dmv, dav, dmc, dac = (dlat[:, k * H : (k + 1) * H] for k in range(4))
    dhv, grads["pool_v.a"] = _pool_backward(cache["hv"], batch.var_offsets, p["pool_v.a"], dmv, dav, cache["pool_v"])
    dhc, grads["pool_c.a"] = _pool_backward(cache["hc"], batch.cons_offsets, p["pool_c.a"], dmc, dac, cache["pool_c"])
    for layer in reversed(range(model.n_layers)):
        k = f"conv{layer}."
        # var<-cons: target var, source cons
        dhv_t, dhc_s = _half_backward(model, k + "vc.", dhv, cache[k + "vc"], batch.agg_vc, batch.q_v, grads)
        dhv, dhc = dhv_t, dhc + dhc_s
        # cons<-var
        dhc_t, dhv_s = _half_backward(model, k + "cv.", dhc, cache[k + "cv"], batch.agg_cv, batch.q_c, grads)
        dhc, dhv = dhc_t, dhv + dhv_s
    zv, zc = cache["emb"]
    dzv = dhv * (zv > 0)
    dzc = dhc * (zc > 0)
    grads["emb_v.W"] = batch.xv.T @ dzv
    grads["emb_v.b"] = dzv.sum(axis=0)
    grads["emb_c.W"] = batch.xc.T @ dzc
    grads["emb_c.b"] = dzc.sum(axis=0)
    return grads


def loss_and_grads(model: GnnModel, batch: GraphBatch, targets: np.ndarray, update_stats: bool = True):
    out, cache = forward_batch(model, batch, "train", update_stats)
    return loss_mse(out, targets), backward(model, out, targets, cache)


# -- ensembles --------------------------------------------------------------


def ensemble_predict(models, graph: BipartiteGraph) -> np.ndarray:
    models = models if isinstance(models, (list, tuple)) else [models]
    widths = {m.n_out for m in models}
    if len(widths) != 1:
        raise ValueError(f"ensemble members disagree on output width: {sorted(widths)}")
    preds = [forward(m, graph, "eval") for m in models]
    return np.mean(preds, axis=0)


def ensemble_predict_batch(models, graphs: list[BipartiteGraph]) -> np.ndarray:
    models = models if isinstance(models, (list, tuple)) else [models]
    if len({m.n_out for m in models}) != 1:
        raise ValueError("ensemble members disagree on output width")
    return np.mean([predict_batch(m, graphs) for m in models], axis=0)


def predict_config(models, graph: BipartiteGraph) -> int:
    """Index (into the portfolio) of the lowest predicted score; first index on ties."""
    return int(np.argmin(ensemble_predict(models, graph)))
