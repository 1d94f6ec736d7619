"""Random graphs and models shared by the network tests."""

import numpy as np

from confscout.gnn import init_model
from confscout.graph import BipartiteGraph


def random_graph(rng, n_vars=5, n_cons=4, density=0.5, name="g"):
    mask = rng.random((n_cons, n_vars)) < density
    ec, ev = np.nonzero(mask)
    return BipartiteGraph(
        name,
        rng.normal(size=(n_vars, 6)),
        rng.normal(size=(n_cons, 4)),
        ec.astype(np.int64),
        ev.astype(np.int64),
        rng.normal(size=len(ec)),
    )


def random_model(rng, n_out=4, hidden=8, n_layers=4, jitter=0.1):
    """A model with perturbed parameters and non-trivial running statistics."""
    m = init_model(n_out, hidden=hidden, seed=int(rng.integers(1 << 31)), n_layers=n_layers)
    for k in m.params:
        m.params[k] = m.params[k] + rng.normal(0, jitter, size=m.params[k].shape)
    for k in m.buffers:
        if k.endswith("bn_mean"):
            m.buffers[k] = rng.normal(0, 0.3, size=m.buffers[k].shape)
        else:
            m.buffers[k] = rng.uniform(0.5, 2.0, size=m.buffers[k].shape)
    return m


def permute_graph(graph, var_perm, cons_perm):
    """Node j moves to position perm[j]; edges are re-indexed and shuffled too."""
    var_perm, cons_perm = np.asarray(var_perm), np.asarray(cons_perm)
    xv = np.empty_like(graph.var_features)
    xv[var_perm] = graph.var_features
    xc = np.empty_like(graph.cons_features)
    xc[cons_perm] = graph.cons_features
    order = np.random.default_rng(0).permutation(graph.n_edges)
    return BipartiteGraph(
        graph.instance_id,
        xv,
        xc,
        cons_perm[graph.edge_cons][order],
        var_perm[graph.edge_var][order],
        graph.edge_features[order],
    )


def numeric_grads(model, loss_fn, h=1e-5):
    out = {}
    for k, p in model.params.items():
        num = np.zeros_like(p)
        for i in np.ndindex(p.shape):
            old = p[i]
            p[i] = old + h
            lp = loss_fn()
            p[i] = old - h
            lm = loss_fn()
            p[i] = old
            num[i] = (lp - lm) / (2 * h)
        out[k] = num
    return out


def rel_error(a, b):
    den = max(np.linalg.norm(a), np.linalg.norm(b))
    return float(np.linalg.norm(a - b) / den) if den > 0 else 0.0
