"""Bipartite variable/constraint graph extracted from a MILP instance."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .milp import MilpInstance

N_VAR_FEATURES = 6
N_CONS_FEATURES = 4
CONS_SENSE_ORDER = ("<=", ">=", "=")


@dataclass(frozen=True)
class FeatureSchema:
    """Feature layout version; models refuse graphs built with another version."""

    version: int = 1
    n_var_features: int = N_VAR_FEATURES
    n_cons_features: int = N_CONS_FEATURES


@dataclass(frozen=True)
class Normalization:
    """Per-instance constants the features were divided by."""

    obj_scale: float  # max |w_j|; 1.0 stands in for an all-zero objective
    row_norms: np.ndarray  # ||A_i||_2; 0 for rows without nonzeros


@dataclass
class BipartiteGraph:
    instance_id: str
    var_features: np.ndarray  # (n_vars, 6)
    cons_features: np.ndarray  # (n_cons, 4)
    edge_cons: np.ndarray  # (n_edges,) int
    edge_var: np.ndarray  # (n_edges,) int
    edge_features: np.ndarray  # (n_edges,)
    schema_version: int = 1
    norms: Normalization | None = None

    @property
    def n_vars(self) -> int:
        return self.var_features.shape[0]

    @property
    def n_cons(self) -> int:
        return self.cons_features.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edge_features.shape[0]

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return list(zip(self.edge_cons.tolist(), self.edge_var.tolist(), self.edge_features.tolist()))


def _squash(b):
    return b / (1.0 + abs(b))


def to_bipartite(instance: MilpInstance, schema: FeatureSchema = FeatureSchema()) -> BipartiteGraph:
    n, m = instance.n_vars, instance.n_cons
    w = np.asarray(instance.objective, dtype=np.float64)
    if instance.sense == "minimize":
        w = -w
    obj_scale = float(np.max(np.abs(w))) if n else 0.0

    var_x = np.zeros((n, N_VAR_FEATURES))
    if obj_scale > 0:
        var_x[:, 0] = w / obj_scale
    for j in range(n):
        lb, ub = instance.var_lb[j], instance.var_ub[j]
        var_x[j, 1] = instance.var_types[j] != "continuous"
        if lb is not None and np.isfinite(lb):
            var_x[j, 2] = 1.0
            var_x[j, 4] = _squash(lb)
        if ub is not None and np.isfinite(ub):
            var_x[j, 3] = 1.0
            var_x[j, 5] = _squash(ub)

    cons_x = np.zeros((m, N_CONS_FEATURES))
    row_norms = np.zeros(m)
    e_cons, e_var, e_val = [], [], []
    for i, row in enumerate(instance.constraints):
        nz = [(c, v) for c, v in row.coeffs if v != 0.0]
        norm = math.hypot(*(v for _, v in nz))  # scaled, no underflow on tiny entries
        row_norms[i] = norm
        if norm > 0:
            cons_x[i, 0] = row.rhs / norm
            for c, v in nz:
                e_cons.append(i)
                e_var.append(c)
                e_val.append(v / norm)
        else:
            cons_x[i, 0] = np.sign(row.rhs)
        cons_x[i, 1 + CONS_SENSE_ORDER.index(row.sense)] = 1.0

    return BipartiteGraph(
        instance_id=instance.id,
        var_features=var_x,
        cons_features=cons_x,
        edge_cons=np.asarray(e_cons, dtype=np.int64),
        edge_var=np.asarray(e_var, dtype=np.int64),
        edge_features=np.asarray(e_val, dtype=np.float64),
        schema_version=schema.version,
        norms=Normalization(obj_scale if obj_scale > 0 else 1.0, row_norms),
    )


def graph_stats(graph: BipartiteGraph) -> tuple[int, int, int]:
    return graph.n_vars, graph.n_cons, graph.n_edges
