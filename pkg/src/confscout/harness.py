"""Data collection over (instance x configuration x seed) through solver adapters.

An adapter receives an instance file, a settings file, a seed and a time
limit and writes one JSON result document ``{"status", "gamma", "trace"?}``.
``ProcessAdapter`` runs an external command per task; ``SyntheticAdapter``
evaluates the closed-form synthetic solver in-process.  Every finished task
is appended to a journal (the record-store format) so an interrupted run
resumes where it stopped; on completion the journal is rewritten in
canonical (instance, config, seed) order.
"""

from __future__ import annotations

import json
import logging
import math
import os
import re
import shutil
import subprocess
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .evaluation import BoundTrace, primal_dual_integral
from .milp import load_instance
from .perfdb import PerfRecord, RecordError, append_records, parse_record, write_records
from .synthetic import DEFAULT_NOISE, synthetic_gamma

log = logging.getLogger(__name__)


class AdapterError(RuntimeError):
    pass


class JournalError(RuntimeError):
    pass


@dataclass
class CollectionPlan:
    instances: list[tuple[str, Path]]  # (instance id, instance file)
    configs: dict[int, str]  # config id -> settings text
    seeds: int = 1
    time_limit: float = 900.0
    parallelism: int = 1

    def __post_init__(self):
        if self.seeds < 1:
            raise ValueError("need at least one seed per pair")
        if self.time_limit <= 0:
            raise ValueError("time limit must be positive")
        if self.parallelism < 1:
            raise ValueError("parallelism must be at least 1")

    def triples(self):
        for iid, _ in self.instances:
            for cid in self.configs:
                for seed in range(self.seeds):
                    yield iid, cid, seed


@dataclass(frozen=True)
class Task:
    instance_id: str
    instance_path: Path
    config_id: int
    settings_path: Path
    seed: int
    time_limit: float
    output_path: Path


def result_to_record(task: Task, doc, gap_cap: float | None = None) -> PerfRecord:
    """Turn an adapter result document into a record; anything malformed is an error record."""
    def error(reason):
        log.warning("run %s/%s/%s failed: %s", task.instance_id, task.config_id, task.seed, reason)
        return PerfRecord(task.instance_id, task.config_id, task.seed, 0.0, "error")

    if not isinstance(doc, dict):
        return error("result is not an object")
    status = doc.get("status")
    if status != "ok":
        return error(f"status {status!r}")
    gamma = doc.get("gamma")
    if gamma is None and doc.get("trace"):
        if gap_cap is None:
            return error("trace without gamma and no gap cap configured")
        try:
            trace = BoundTrace([tuple(map(float, ev)) for ev in doc["trace"]], task.time_limit)
            gamma = primal_dual_integral(trace, gap_cap)
        except (ValueError, TypeError) as exc:
            return error(f"bad trace: {exc}")
    if isinstance(gamma, bool) or not isinstance(gamma, (int, float)) or not math.isfinite(gamma) or gamma < 0:
        return error(f"bad gamma {gamma!r}")
    return PerfRecord(task.instance_id, task.config_id, task.seed, float(gamma), "ok")


class ProcessAdapter:
    """Runs ``argv`` per task after substituting {instance}, {settings}, {seed},
    {time_limit}, {output} and {config_id}."""

    def __init__(self, argv: list[str], timeout_slack: float = 60.0, gap_cap: float | None = None):
        if not argv:
            raise AdapterError("empty adapter command")
        self.argv = list(argv)
        self.timeout_slack = timeout_slack
        self.gap_cap = gap_cap

    def check(self):
        exe = self.argv[0]
        if shutil.which(exe) is None and not os.access(exe, os.X_OK):
            raise AdapterError(f"adapter executable not found: {exe}")

    def __call__(self, task: Task) -> PerfRecord:
        subs = {
            "instance": str(task.instance_path),
            "settings": str(task.settings_path),
            "seed": str(task.seed),
            "time_limit": repr(task.time_limit),
            "output": str(task.output_path),
            "config_id": str(task.config_id),
        }
        argv = [a.format(**subs) for a in self.argv]
        try:
            proc = subprocess.run(argv, capture_output=True, timeout=task.time_limit + self.timeout_slack)
        except subprocess.TimeoutExpired:
            return PerfRecord(task.instance_id, task.config_id, task.seed, 0.0, "timeout_of_harness")
        except OSError as exc:
            raise AdapterError(f"cannot start adapter: {exc}") from None
        if proc.returncode != 0:
            return result_to_record(task, {"status": f"exit {proc.returncode}"})
        try:
            with open(task.output_path, encoding="utf-8") as f:
                doc = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            doc = {"status": f"unreadable output ({exc})"}
        return result_to_record(task, doc, self.gap_cap)


def synthetic_adapter_command(noise: float = DEFAULT_NOISE) -> list[str]:
    return [
        sys.executable, "-m", "confscout.synthetic_adapter",
        "--instance", "{instance}", "--settings", "{settings}", "--seed", "{seed}",
        "--time-limit", "{time_limit}", "--output", "{output}", "--config-id", "{config_id}",
        "--noise", repr(noise),
    ]


@lru_cache(maxsize=4096)
def _instance_stats(path: str):
    inst = load_instance(path)
    return inst.id, inst.n_vars, inst.n_cons, inst.nnz


class SyntheticAdapter:
    """In-process synthetic solver; same results as the process adapter, no fork per run."""

    def __init__(self, noise: float = DEFAULT_NOISE):
        self.noise = noise

    def check(self):
        pass

    def __call__(self, task: Task) -> PerfRecord:
        from .synthetic import synthetic_gamma_from_stats

        iid, nv, nc, nnz = _instance_stats(str(task.instance_path))
        gamma = synthetic_gamma_from_stats(iid, nv, nc, nnz, task.config_id, task.seed, self.noise)
        return result_to_record(task, {"status": "ok", "gamma": gamma})


def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", name)


@dataclass
class CollectionResult:
    records: list[PerfRecord]
    invoked: int
    skipped: int = 0
    failures: list[PerfRecord] = field(default_factory=list)


def _load_journal(journal) -> list[PerfRecord]:
    """Journal records; a torn final line (crash mid-append) is dropped, anything else corrupt is fatal."""
    if not os.path.exists(journal):
        return []
    with open(journal, encoding="utf-8") as f:
        text = f.read()
    lines = text.split("\n")
    tail = lines.pop()  # text after the last newline, empty for a clean file
    out = []
    try:
        for k, line in enumerate(lines, start=1):
            if line.strip():
                out.append(parse_record(line, k))
    except RecordError as exc:
        raise JournalError(f"journal {journal} is corrupt: {exc}") from None
    if tail:
        log.warning("journal %s ends in a partial record; it will be re-run", journal)
        write_records(journal, out)  # later appends must start on a fresh line
    return out


def run_collection(plan: CollectionPlan, adapter, journal=None, workdir=None) -> CollectionResult:
    """Run every missing (instance, config, seed) triple of ``plan``.

    Records come back in canonical plan order whatever the completion order.
    Triples already in ``journal`` are not re-run.
    """
    adapter.check()
    previous = _load_journal(journal) if journal is not None else []
    done = {}
    for r in previous:
        if r.key in done:
            raise JournalError(f"journal {journal} has a duplicate entry for {r.key}")
        done[r.key] = r

    paths = dict(plan.instances)
    with tempfile.TemporaryDirectory(prefix="confscout-", dir=workdir) as tmp:
        tmp = Path(tmp)
        (tmp / "settings").mkdir()
        (tmp / "out").mkdir()
        settings_paths = {}
        for cid, text in plan.configs.items():
            settings_paths[cid] = tmp / "settings" / f"config_{cid}.set"
            settings_paths[cid].write_text(text, encoding="utf-8")
        tasks = [
            Task(iid, Path(paths[iid]), cid, settings_paths[cid], seed, plan.time_limit,
                 tmp / "out" / f"{_safe(iid)}__{cid}__{seed}.json")
            for iid, cid, seed in plan.triples()
            if (iid, cid, seed) not in done
        ]
        fresh = {}
        with ThreadPoolExecutor(max_workers=plan.parallelism) as pool:
            futures = [pool.submit(adapter, t) for t in tasks]
            for fut in as_completed(futures):
                rec = fut.result()
                fresh[rec.key] = rec
                if journal is not None:
                    append_records(journal, [rec])

    wanted = list(plan.triples())
    wanted_keys = set(wanted)
    records = [fresh.get(k) or done[k] for k in wanted]
    if journal is not None:
        extras = [r for r in previous if r.key not in wanted_keys]
        write_records(journal, records + extras)
    failures = [r for r in records if r.status != "ok"]
    return CollectionResult(records, invoked=len(tasks), skipped=len(wanted) - len(tasks), failures=failures)


def plan_for_files(instance_files, configs: dict[int, str], **kwargs) -> CollectionPlan:
    instances = []
    for path in instance_files:
        inst = load_instance(path)
        instances.append((inst.id, Path(path)))
    return CollectionPlan(instances, configs, **kwargs)


def collect_synthetic(instances, config_ids, seeds: int = 1, noise: float = DEFAULT_NOISE) -> list[PerfRecord]:
    """Direct synthetic records for in-memory instances, same values as the adapters produce."""
    return [
        PerfRecord(inst.id, cid, seed, synthetic_gamma(inst, cid, seed, noise))
        for inst in instances
        for cid in config_ids
        for seed in range(seeds)
    ]
