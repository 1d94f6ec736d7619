"""Primal-dual integrals and candidate-vs-baseline comparison statistics."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field

DEFAULT_BINS = tuple(round(-1.0 + 0.1 * k, 10) for k in range(21))  # -100% .. +100%


class TraceError(ValueError):
    pass


@dataclass
class BoundTrace:
    """Step-wise (t, primal, dual) events of a minimization run; primal may be +inf."""

    events: list[tuple[float, float, float]]
    horizon: float

    def __post_init__(self):
        if not self.events:
            raise TraceError("trace has no events")
        if self.events[0][0] != 0:
            raise TraceError("first event must be at t = 0")
        prev = 0.0
        for t, _, _ in self.events:
            if t < prev:
                raise TraceError("event times must be non-decreasing")
            prev = t
        if self.horizon < prev:
            raise TraceError("horizon precedes the last event")


def primal_dual_integral(trace: BoundTrace, gap_cap: float) -> float:
    """Integral over [0, horizon] of min(primal - dual, gap_cap), step-interpolated."""
    if gap_cap <= 0:
        raise TraceError("gap_cap must be positive")
    pieces = []
    ev = trace.events
    for k, (t, primal, dual) in enumerate(ev):
        end = ev[k + 1][0] if k + 1 < len(ev) else trace.horizon
        if math.isinf(primal) or math.isinf(dual):
            gap = gap_cap
        else:
            gap = primal - dual
            if gap < 0:
                raise TraceError(f"negative gap {gap} at t = {t}")
            gap = min(gap, gap_cap)
        pieces.append(gap * (end - t))
    return math.fsum(pieces)


def total_integral(gammas) -> float:
    return math.fsum(gammas)


def improvement(candidate: float, baseline: float) -> float:
    """Relative change (candidate - baseline) / baseline; negative means better."""
    if baseline == 0:
        raise ZeroDivisionError("baseline gamma is zero")
    return (candidate - baseline) / baseline


def median(values) -> float:
    return float(statistics.median(values))


def histogram(values, edges=DEFAULT_BINS) -> list[int]:
    """Counts per [edges[k], edges[k+1]) bin; values outside land in the end bins."""
    n_bins = len(edges) - 1
    counts = [0] * n_bins
    for v in values:
        k = 0
        while k < n_bins - 1 and v >= edges[k + 1]:
            k += 1
        counts[k] += 1
    return counts


@dataclass
class EvalReport:
    candidate: list[float]
    baseline: list[float]
    total_candidate: float
    total_baseline: float
    wins_candidate: int
    wins_baseline: int
    ties: int
    improvements: list[float]
    mean_improvement: float
    median_improvement: float
    bin_edges: list[float] = field(default_factory=list)
    bin_counts: list[int] = field(default_factory=list)

    @property
    def total_improvement(self) -> float:
        return improvement(self.total_candidate, self.total_baseline)

    def summary_text(self) -> str:
        rows = [
            ("runs", len(self.candidate)),
            ("gamma_total_candidate", f"{self.total_candidate:.6g}"),
            ("gamma_total_baseline", f"{self.total_baseline:.6g}"),
            ("total_improvement", f"{self.total_improvement:.6f}"),
            ("wins_candidate", self.wins_candidate),
            ("wins_baseline", self.wins_baseline),
            ("ties", self.ties),
            ("mean_improvement", f"{self.mean_improvement:.6f}"),
            ("median_improvement", f"{self.median_improvement:.6f}"),
            ("best_improvement", f"{min(self.improvements):.6f}"),
            ("worst_improvement", f"{max(self.improvements):.6f}"),
        ]
        return "".join(f"{k}\t{v}\n" for k, v in rows)

    def histogram_text(self) -> str:
        lines = ["bin_lo\tbin_hi\tcount\n"]
        for k, c in enumerate(self.bin_counts):
            lines.append(f"{self.bin_edges[k]!r}\t{self.bin_edges[k + 1]!r}\t{c}\n")
        return "".join(lines)


def compare(candidate, baseline, bins=DEFAULT_BINS) -> EvalReport:
    candidate, baseline = list(candidate), list(baseline)
    if len(candidate) != len(baseline):
        raise ValueError(f"{len(candidate)} candidate runs vs {len(baseline)} baseline runs")
    if not candidate:
        raise ValueError("nothing to compare")
    wins_c = sum(c < b for c, b in zip(candidate, baseline))
    wins_b = sum(b < c for c, b in zip(candidate, baseline))
    imps = [improvement(c, b) for c, b in zip(candidate, baseline)]
    return EvalReport(
        candidate=candidate,
        baseline=baseline,
        total_candidate=total_integral(candidate),
        total_baseline=total_integral(baseline),
        wins_candidate=wins_c,
        wins_baseline=wins_b,
        ties=len(candidate) - wins_c - wins_b,
        improvements=imps,
        mean_improvement=math.fsum(imps) / len(imps),
        median_improvement=median(imps),
        bin_edges=list(bins),
        bin_counts=histogram(imps, bins),
    )


# -- per-run results files: instance_id, seed, config_id, gamma ---------------


@dataclass(frozen=True)
class RunResult:
    instance_id: str
    seed: int
    config_id: int
    gamma: float


def format_results(results) -> str:
    return "".join(f"{r.instance_id}\t{r.seed}\t{r.config_id}\t{r.gamma!r}\n" for r in results)


def parse_results(text: str) -> list[RunResult]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise ValueError(f"results line {lineno}: expected 4 fields, got {len(fields)}")
        try:
            r = RunResult(fields[0], int(fields[1]), int(fields[2]), float(fields[3]))
        except ValueError as exc:
            raise ValueError(f"results line {lineno}: {exc}") from None
        if not math.isfinite(r.gamma) or r.gamma < 0:
            raise ValueError(f"results line {lineno}: gamma must be finite and non-negative")
        out.append(r)
    return out


def pair_results(candidate: list[RunResult], baseline: list[RunResult]) -> tuple[list[float], list[float], list[tuple[str, int]]]:
    """Match runs by (instance_id, seed); both files must cover the same runs."""
    base = {(r.instance_id, r.seed): r.gamma for r in baseline}
    cand = {(r.instance_id, r.seed): r.gamma for r in candidate}
    if len(base) != len(baseline) or len(cand) != len(candidate):
        raise ValueError("duplicate (instance_id, seed) run in results")
    if base.keys() != cand.keys():
        missing = sorted(base.keys() ^ cand.keys())[:3]
        raise ValueError(f"candidate and baseline cover different runs, e.g. {missing}")
    keys = sorted(cand)
    return [cand[k] for k in keys], [base[k] for k in keys], keys


def histogram_svg(report: EvalReport, title: str = "") -> str:
    """Bar chart of per-run improvement counts as a standalone SVG document."""
    width, height, pad = 640, 360, 48
    counts, edges = report.bin_counts, report.bin_edges
    top = max(counts) if counts and max(counts) > 0 else 1
    bar_w = (width - 2 * pad) / max(len(counts), 1)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        parts.append(f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="14">{_xml(title)}</text>')
    base_y = height - pad
    for k, c in enumerate(counts):
        h = (height - 2 * pad) * c / top
        x = pad + k * bar_w
        fill = "#4878a8" if edges[k + 1] <= 0 else "#c8643c"
        parts.append(
            f'<rect x="{x:.2f}" y="{base_y - h:.2f}" width="{bar_w - 1:.2f}" height="{h:.2f}" fill="{fill}"/>'
        )
    parts.append(f'<line x1="{pad}" y1="{base_y}" x2="{width - pad}" y2="{base_y}" stroke="black"/>')
    for k in range(0, len(edges), max(1, len(edges) // 5)):
        x = pad + k * bar_w
        parts.append(f'<text x="{x:.2f}" y="{base_y + 16}" text-anchor="middle">{edges[k] * 100:.0f}%</text>')
    parts.append(
        f'<text x="{width / 2}" y="{height - 10}" text-anchor="middle">'
        f"reduced primal-dual integral (mean {report.mean_improvement * 100:.1f}%, "
        f"median {report.median_improvement * 100:.1f}%)</text>"
    )
    parts.append(f'<text x="{pad - 6}" y="{pad}" text-anchor="end">{top}</text>')
    parts.append("</svg>\n")
    return "\n".join(parts)


def _xml(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
