"""Size-signature clusters for small, heterogeneous instance sets.

Instances sharing an exact (n_vars, n_cons) signature with at least
``min_cluster_size`` members form a cluster; everything else is pooled
into a residual cluster.  Each cluster is assigned the configuration with
the lowest mean gamma over its members.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .perfdb import PerfMatrix


def signature(instance) -> tuple[int, int]:
    return instance.n_vars, instance.n_cons


def _instance_id(instance) -> str:
    return getattr(instance, "id", None) or instance.instance_id


@dataclass
class ClusterModel:
    clusters: dict[tuple[int, int], int]
    residual: int
    min_cluster_size: int = 2

    def to_text(self) -> str:
        lines = ["n_vars\tn_cons\tconfig_id\n"]
        for (nv, nc), cfg in sorted(self.clusters.items()):
            lines.append(f"{nv}\t{nc}\t{cfg}\n")
        lines.append(f"residual\t{self.residual}\n")
        lines.append(f"min_cluster_size\t{self.min_cluster_size}\n")
        return "".join(lines)

    @classmethod
    def from_text(cls, text: str) -> "ClusterModel":
        clusters, residual, min_size = {}, None, 2
        for line in text.splitlines()[1:]:
            if not line.strip():
                continue
            fields = line.split("\t")
            if fields[0] == "residual":
                residual = int(fields[1])
            elif fields[0] == "min_cluster_size":
                min_size = int(fields[1])
            else:
                clusters[(int(fields[0]), int(fields[1]))] = int(fields[2])
        if residual is None:
            raise ValueError("cluster model has no residual line")
        return cls(clusters, residual, min_size)


def _best_mean_config(matrix: PerfMatrix, rows) -> int:
    means = matrix.values[rows].mean(axis=0)
    best = means.min()
    return min(c for c, m in zip(matrix.config_ids, means) if m == best)


def fit_clusters(instances, matrix: PerfMatrix, min_cluster_size: int = 2) -> ClusterModel:
    pos = {iid: k for k, iid in enumerate(matrix.instance_ids)}
    groups: dict[tuple[int, int], list[int]] = {}
    for inst in instances:
        iid = _instance_id(inst)
        if iid not in pos:
            raise KeyError(f"instance {iid!r} missing from the performance matrix")
        groups.setdefault(signature(inst), []).append(pos[iid])
    clusters, residual_rows = {}, []
    for sig, rows in groups.items():
        if len(rows) >= min_cluster_size:
            # sorted rows make the column means independent of instance order
            clusters[sig] = _best_mean_config(matrix, sorted(rows))
        else:
            residual_rows.extend(rows)
    if residual_rows:
        residual = _best_mean_config(matrix, sorted(residual_rows))
    else:
        residual = _best_mean_config(matrix, sorted(r for rows in groups.values() for r in rows))
    return ClusterModel(clusters, residual, min_cluster_size)


def predict_cluster(model: ClusterModel, instance) -> int:
    return model.clusters.get(signature(instance), model.residual)
