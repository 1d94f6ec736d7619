"""Performance records, the instance x configuration matrix, and per-instance standardization.

Record store format: one tab-separated line per record,
``instance_id  config_id  seed  gamma  status``, gamma written with ``repr``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

STATUSES = ("ok", "error", "timeout_of_harness")


class RecordError(ValueError):
    pass


class MissingCellError(RecordError):
    pass


@dataclass(frozen=True)
class PerfRecord:
    instance_id: str
    config_id: int
    seed: int
    gamma: float
    status: str = "ok"

    @property
    def key(self) -> tuple[str, int, int]:
        return self.instance_id, self.config_id, self.seed


def format_record(r: PerfRecord) -> str:
    if "\t" in r.instance_id or "\n" in r.instance_id:
        raise RecordError(f"instance id {r.instance_id!r} contains a tab or newline")
    if not math.isfinite(r.gamma):
        raise RecordError(f"non-finite gamma for {r.key}")
    if r.status not in STATUSES:
        raise RecordError(f"unknown status {r.status!r}")
    return f"{r.instance_id}\t{r.config_id}\t{r.seed}\t{r.gamma!r}\t{r.status}\n"


def parse_record(line: str, lineno: int = 0) -> PerfRecord:
    fields = line.rstrip("\n").split("\t")
    if len(fields) != 5:
        raise RecordError(f"line {lineno}: expected 5 fields, got {len(fields)}")
    inst, cfg, seed, gamma, status = fields
    try:
        rec = PerfRecord(inst, int(cfg), int(seed), float(gamma), status)
    except ValueError as exc:
        raise RecordError(f"line {lineno}: {exc}") from None
    if not math.isfinite(rec.gamma):
        raise RecordError(f"line {lineno}: non-finite gamma")
    if status not in STATUSES:
        raise RecordError(f"line {lineno}: unknown status {status!r}")
    if status == "ok" and rec.gamma < 0:
        raise RecordError(f"line {lineno}: negative gamma")
    return rec


def append_records(path, records) -> None:
    lines = [format_record(r) for r in records]
    with open(path, "a", encoding="utf-8") as f:
        for line in lines:
            # one write per line keeps a crash from interleaving partial records
            f.write(line)
            f.flush()


def write_records(path, records) -> None:
    """Replace the store atomically with ``records``."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        f.writelines(format_record(r) for r in records)
    os.replace(tmp, path)


def load_records(path) -> list[PerfRecord]:
    if not os.path.exists(path):
        return []
    with open(path, encoding="utf-8") as f:
        return [parse_record(line, k) for k, line in enumerate(f, start=1) if line.strip()]


@dataclass
class PerfMatrix:
    instance_ids: list[str]
    config_ids: list[int]
    values: np.ndarray  # (n_instances, n_configs), mean gamma over seeds
    seed_counts: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (len(self.instance_ids), len(self.config_ids)):
            raise ValueError("matrix shape does not match row/column ids")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("matrix contains non-finite values")
        if self.seed_counts is None:
            self.seed_counts = np.ones(self.values.shape, dtype=np.int64)

    def row(self, instance_id: str) -> np.ndarray:
        try:
            return self.values[self.instance_ids.index(instance_id)]
        except ValueError:
            raise KeyError(f"unknown instance {instance_id!r}") from None

    def columns(self, config_ids) -> np.ndarray:
        pos = {c: k for k, c in enumerate(self.config_ids)}
        try:
            return np.array([pos[c] for c in config_ids], dtype=np.int64)
        except KeyError as exc:
            raise KeyError(f"config {exc.args[0]} not in matrix") from None

    def select_configs(self, config_ids) -> "PerfMatrix":
        idx = self.columns(config_ids)
        return PerfMatrix(self.instance_ids, list(config_ids), self.values[:, idx], self.seed_counts[:, idx])

    def select_instances(self, instance_ids) -> "PerfMatrix":
        pos = {i: k for k, i in enumerate(self.instance_ids)}
        idx = [pos[i] for i in instance_ids]
        return PerfMatrix(list(instance_ids), self.config_ids, self.values[idx], self.seed_counts[idx])


def aggregate(records, expected_configs=None, instance_ids=None) -> PerfMatrix:
    """Mean ok-gamma over seeds for every (instance, config) cell.

    Rows are ``instance_ids`` (default: sorted ids seen), columns are
    ``expected_configs`` (default: sorted ids seen), so the result does not
    depend on record order.
    """
    seen = set()
    sums: dict[tuple[str, int], list[float]] = {}
    rows_seen: set[str] = set()
    for r in records:
        if r.key in seen:
            raise RecordError(f"duplicate record for instance {r.instance_id!r}, config {r.config_id}, seed {r.seed}")
        seen.add(r.key)
        rows_seen.add(r.instance_id)
        if r.status == "ok":
            sums.setdefault((r.instance_id, r.config_id), []).append(r.gamma)
    rows = list(instance_ids) if instance_ids is not None else sorted(rows_seen)
    cols = list(expected_configs) if expected_configs is not None else sorted({c for _, c in sums})
    values = np.empty((len(rows), len(cols)))
    counts = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for a, inst in enumerate(rows):
        for b, cfg in enumerate(cols):
            cell = sums.get((inst, cfg))
            if not cell:
                raise MissingCellError(f"missing cell (instance {inst!r}, config {cfg})")
            # fsum keeps the mean independent of record order
            values[a, b] = math.fsum(cell) / len(cell)
            counts[a, b] = len(cell)
    return PerfMatrix(rows, cols, values, counts)


@dataclass
class StandardizedTargets:
    values: np.ndarray
    mean: np.ndarray
    std: np.ndarray


def standardize_rows(values: np.ndarray) -> StandardizedTargets:
    values = np.atleast_2d(np.asarray(values, dtype=np.float64))
    mu = values.mean(axis=1)
    centered = values - mu[:, None]
    sigma = np.sqrt((centered**2).mean(axis=1))
    out = np.zeros_like(values)
    # exact-constant rows can still leave rounding residue in sigma
    nz = (sigma > 0) & (values.max(axis=1) > values.min(axis=1))
    sigma = np.where(nz, sigma, 0.0)
    out[nz] = centered[nz] / sigma[nz, None]
    return StandardizedTargets(out, mu, sigma)


def standardize(matrix: PerfMatrix) -> StandardizedTargets:
    return standardize_rows(matrix.values)


def best_config(matrix: PerfMatrix, instance_id: str) -> int:
    row = matrix.row(instance_id)
    best = row.min()
    return min(c for c, v in zip(matrix.config_ids, row) if v == best)
