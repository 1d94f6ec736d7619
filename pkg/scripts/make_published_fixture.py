"""Build per-run result files consistent with published per-benchmark aggregates.

Only aggregates were published (Gamma totals, win counts, best/worst and
mean/median per-run improvement), so the per-run values here are
constructed, not measured: a monotone improvement profile is shaped to hit
the reported mean and median, and baseline gammas are exponentially tilted
so the totals come out right.  Output: <out>/<benchmark>.{candidate,baseline}.tsv

    python scripts/make_published_fixture.py tests/fixtures/published
"""

import sys
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from confscout.evaluation import RunResult, format_results

BENCHMARKS = {
    # name: (instances, seeds, wins, gamma_baseline, gamma_candidate, mean, median, best, worst)
    "item_placement": (100, 1, 66, 1.54e6, 1.36e6, -0.08, -0.12, -0.57, 0.89),
    "load_balancing": (100, 1, 95, 2.08e6, 1.33e6, -0.32, -0.34, -0.66, 0.31),
    "anonymous": (20, 5, 38, 2.96e10, 2.73e10, 0.37, 0.10, -0.60, 4.34),
}
EDGE = 0.005  # smallest |improvement| next to the win/loss boundary


def improvement_profile(n, wins, mean, median, best, worst):
    """Sorted improvements with fixed anchors; a shared curvature exponent sets the mean."""
    mid = n // 2  # positions mid-1 and mid (0-based) carry the median
    anchors = {0: best, n - 1: worst, mid - 1: median, mid: median, wins - 1: -EDGE, wins: EDGE}
    pos = sorted(anchors)

    def build(p):
        v = np.empty(n)
        for a, b in zip(pos, pos[1:]):
            s = np.linspace(0.0, 1.0, b - a + 1)
            v[a : b + 1] = anchors[a] + (anchors[b] - anchors[a]) * s**p
        return v

    p = np.exp(brentq(lambda lp: build(np.exp(lp)).mean() - mean, -6.0, 6.0))
    return build(p)


def baseline_weights(r, target):
    """Positive weights w with sum(w * r) / sum(w) == target."""
    def tilted(t):
        w = np.exp(-t * (r - r.min()))
        return w @ r / w.sum() - target

    t = brentq(tilted, -50.0, 50.0)
    return np.exp(-t * (r - r.min()))


def build(name, rng):
    n_inst, n_seeds, wins, g_base, g_cand, mean, median, best, worst = BENCHMARKS[name]
    n = n_inst * n_seeds
    r = improvement_profile(n, wins, mean, median, best, worst)
    w = baseline_weights(r, g_cand / g_base - 1.0)
    base = w * g_base / w.sum()
    cand = base * (1.0 + r)
    order = rng.permutation(n)
    runs = [(f"{name}-{k // n_seeds:03d}", k % n_seeds) for k in range(n)]
    cand_rows, base_rows = [], []
    for (iid, seed), k in zip(runs, order):
        base_rows.append(RunResult(iid, seed, 0, float(base[k])))
        cand_rows.append(RunResult(iid, seed, 1, float(cand[k])))
    return cand_rows, base_rows


def main(out="tests/fixtures/published"):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(2021)
    for name in BENCHMARKS:
        cand, base = build(name, rng)
        (out / f"{name}.candidate.tsv").write_text(format_results(cand), encoding="utf-8")
        (out / f"{name}.baseline.tsv").write_text(format_results(base), encoding="utf-8")
        print(f"{name}: {len(cand)} runs -> {out}")


if __name__ == "__main__":
    main(*sys.argv[1:])
