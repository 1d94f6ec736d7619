"""Closed-form stand-in solver and packing-MILP generator for desk-scale runs.

gamma(i, c, seed) = base(i) * PENALTY[latent(i)][c] * (1 + noise * u)

    base(i)   = 100 * (1 + n_edges / (n_vars * max(n_cons, 1)))
    latent(i) = density bucket of nnz / (n_vars * n_cons): <1/3, <2/3, else
    u         = uniform in [-1, 1] derived from sha256(instance_id, config, seed)

Each bucket has a different best column and column 1 is the best single
configuration on average, so per-instance selection has something to win.
Kept free of numpy so adapter subprocesses start fast.
"""

from __future__ import annotations

import hashlib
import random
import struct

from .milp import Constraint, MilpInstance

PENALTY = (
    (1.00, 1.15, 1.45, 1.60, 1.35, 1.70, 1.80, 1.50),
    (1.55, 1.15, 1.40, 1.00, 1.30, 1.50, 1.65, 1.75),
    (1.70, 1.15, 1.50, 1.60, 1.35, 1.45, 1.00, 1.25),
)
N_SYNTHETIC_CONFIGS = len(PENALTY[0])
DEFAULT_NOISE = 0.05

FAMILIES = ("sparse", "medium", "dense")
FAMILY_DENSITY = {"sparse": (0.10, 0.26), "medium": (0.42, 0.58), "dense": (0.75, 0.95)}


def density(n_vars: int, n_cons: int, nnz: int) -> float:
    if n_vars == 0 or n_cons == 0:
        return 0.0
    return nnz / (n_vars * n_cons)


def latent_bucket(n_vars: int, n_cons: int, nnz: int) -> int:
    # integer comparisons avoid float rounding at the 1/3 and 2/3 edges
    cells = n_vars * n_cons
    if cells == 0 or 3 * nnz < cells:
        return 0
    if 3 * nnz < 2 * cells:
        return 1
    return 2


def base_gamma(n_vars: int, n_cons: int, nnz: int) -> float:
    return 100.0 * (1.0 + nnz / (n_vars * max(n_cons, 1)))


def hash_uniform(instance_id: str, config_id: int, seed: int) -> float:
    digest = hashlib.sha256(f"{instance_id}\x1f{config_id}\x1f{seed}".encode("utf-8")).digest()
    (k,) = struct.unpack("<Q", digest[:8])
    return 2.0 * (k / 2.0**64) - 1.0


def synthetic_gamma(instance: MilpInstance, config_id: int, seed: int, noise: float = DEFAULT_NOISE,
                    uniform=hash_uniform) -> float:
    return synthetic_gamma_from_stats(instance.id, instance.n_vars, instance.n_cons, instance.nnz,
                                      config_id, seed, noise, uniform)


def synthetic_gamma_from_stats(instance_id, n_vars, n_cons, nnz, config_id, seed,
                               noise=DEFAULT_NOISE, uniform=hash_uniform) -> float:
    if not 0 <= config_id < N_SYNTHETIC_CONFIGS:
        raise ValueError(f"config {config_id} outside the synthetic penalty table (0..{N_SYNTHETIC_CONFIGS - 1})")
    if not 0 <= noise < 1:
        raise ValueError("noise amplitude must be in [0, 1)")
    penalty = PENALTY[latent_bucket(n_vars, n_cons, nnz)][config_id]
    return base_gamma(n_vars, n_cons, nnz) * penalty * (1.0 + noise * uniform(instance_id, config_id, seed))


def oracle_config(n_vars: int, n_cons: int, nnz: int) -> int:
    row = PENALTY[latent_bucket(n_vars, n_cons, nnz)]
    return row.index(min(row))


def generate_synthetic_instances(family: str, n: int, seed: int, n_vars=(14, 16), n_cons=(9, 11)) -> list[MilpInstance]:
    """Random packing MILPs whose A-density falls inside ``family``'s bucket."""
    if family not in FAMILY_DENSITY:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = random.Random(f"{family}:{seed}")
    lo, hi = FAMILY_DENSITY[family]
    out = []
    for k in range(n):
        nv = rng.randint(*n_vars)
        nc = rng.randint(*n_cons)
        cells = nv * nc
        target = rng.uniform(lo, hi)
        nnz = min(max(round(target * cells), nc), cells)
        # every row gets one nonzero, the rest are spread uniformly
        chosen = {(i, rng.randrange(nv)) for i in range(nc)}
        rest = [(i, j) for i in range(nc) for j in range(nv) if (i, j) not in chosen]
        chosen |= set(rng.sample(rest, nnz - len(chosen)))
        rows: list[list[tuple[int, float]]] = [[] for _ in range(nc)]
        for i, j in sorted(chosen):
            rows[i].append((j, float(rng.randint(1, 9))))
        constraints = [
            Constraint(tuple(r), "<=", float(sum(v for _, v in r) // 2 + 1)) for r in rows
        ]
        inst = MilpInstance(
            id=f"{family}-{seed}-{k:04d}",
            objective=[float(rng.randint(1, 20)) for _ in range(nv)],
            constraints=constraints,
            sense="maximize",
            var_types=["integer"] * nv,
            var_lb=[0.0] * nv,
            var_ub=[None] * nv,
        )
        out.append(inst.validate())
    return out
