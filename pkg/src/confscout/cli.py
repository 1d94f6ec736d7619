"""confscout command line.

Exit codes: 0 success, 1 usage error, 2 data error, 3 adapter failure.
Machine-readable output goes to files (or stdout); human summaries go to
stderr.  Log verbosity comes from the CONFSCOUT_LOG environment variable.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import shlex
import sys
from pathlib import Path

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_ADAPTER = 0, 1, 2, 3

log = logging.getLogger("confscout")


class UsageError(Exception):
    pass


class StageError(Exception):
    def __init__(self, stage: str, exc: Exception):
        super().__init__(f"stage {stage!r} failed: {exc}")
        self.stage, self.exc = stage, exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"input path does not exist: {path}")
    return p


def _instance_files(path: str) -> list[Path]:
    p = _existing(path)
    if p.is_file():
        return [p]
    files = sorted(f for f in p.iterdir() if f.suffix.lower() in (".json", ".mps"))
    if not files:
        raise UsageError(f"no .json or .mps instance files in {path}")
    return files


def _load_instances(path: str):
    from .milp import load_instance

    return [load_instance(f) for f in _instance_files(path)]


def _write_text(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text, encoding="utf-8")


def _write_json(path, doc) -> None:
    _write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _read_json(path):
    with open(_existing(path), encoding="utf-8") as f:
        return json.load(f)


def _parse_ids(text: str) -> list[int]:
    ids = []
    for part in text.split(","):
        if "-" in part.strip()[1:]:
            lo, hi = part.split("-", 1)
            ids.extend(range(int(lo), int(hi) + 1))
        elif part.strip():
            ids.append(int(part))
    return ids


def _load_portfolio(path) -> list[int]:
    doc = _read_json(path)
    ids = doc["config_ids"] if isinstance(doc, dict) else doc
    return [int(c) for c in ids]


# -- configs ----------------------------------------------------------------


def cmd_configs(args) -> int:
    from .configspace import (
        ExpansionTable, dedup, emit_settings, emphasis_params, enumerate_cartesian, params_from_dict,
    )

    defs = params_from_dict(_read_json(args.params)) if args.params else emphasis_params()
    table = ExpansionTable.from_dict(_read_json(args.table)) if args.table else ExpansionTable.identity(defs)
    configs = enumerate_cartesian(defs)
    space = dedup(configs, table)
    doc = space.to_dict()
    doc["table"] = table.to_dict()
    _write_json(args.out, doc)
    if args.settings_dir:
        out = Path(args.settings_dir)
        out.mkdir(parents=True, exist_ok=True)
        for c in space.survivors:
            (out / f"config_{c.id}.set").write_text(emit_settings(c, table), encoding="utf-8")
    _say(f"|C| = {len(configs)}, |C'| = {len(space.survivors)} after dedup")
    if args.expect_size is not None and len(space.survivors) != args.expect_size:
        _say(f"expected {args.expect_size} configurations after dedup, got {len(space.survivors)}")
        return EXIT_DATA
    return EXIT_OK


# -- generate ---------------------------------------------------------------


def cmd_generate(args) -> int:
    from .milp import emit_milp_json
    from .synthetic import FAMILIES, generate_synthetic_instances

    families = FAMILIES if args.family == "mixed" else (args.family,)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    count = 0
    for k, fam in enumerate(families):
        n = args.n // len(families) + (1 if k < args.n % len(families) else 0)
        if n == 0:
            continue
        for inst in generate_synthetic_instances(fam, n, args.seed):
            (out / f"{inst.id}.json").write_bytes(emit_milp_json(inst))
            count += 1
    _say(f"wrote {count} instances to {out}")
    return EXIT_OK


# -- collect ----------------------------------------------------------------


def _config_settings(args) -> dict[int, str]:
    if args.space:
        from .configspace import ConfigPoint, ExpansionTable, emit_settings

        doc = _read_json(args.space)
        table = ExpansionTable.from_dict(_read_json(args.table)) if args.table else ExpansionTable.from_dict(doc["table"])
        names = [p["name"] for p in doc["params"]]
        levels = [p["levels"] for p in doc["params"]]
        settings = {}
        for s in doc["survivors"]:
            labels = tuple((n, lv[i]) for n, lv, i in zip(names, levels, s["assignment"]))
            settings[s["id"]] = emit_settings(ConfigPoint(s["id"], tuple(s["assignment"]), labels), table)
        if args.portfolio:
            keep = _load_portfolio(args.portfolio)
            settings = {c: settings[c] for c in keep}
        return settings
    if args.portfolio:
        return {c: "" for c in _load_portfolio(args.portfolio)}
    if args.config_ids:
        return {c: "" for c in _parse_ids(args.config_ids)}
    raise UsageError("collect needs --space, --portfolio or --config-ids")


def _adapter(args):
    from .harness import ProcessAdapter, SyntheticAdapter, synthetic_adapter_command

    if args.adapter_cmd:
        return ProcessAdapter(shlex.split(args.adapter_cmd), gap_cap=args.gap_cap)
    if args.adapter == "synthetic-process":
        return ProcessAdapter(synthetic_adapter_command(args.noise))
    return SyntheticAdapter(args.noise)


def cmd_collect(args) -> int:
    from .harness import plan_for_files, run_collection

    plan = plan_for_files(
        _instance_files(args.instances), _config_settings(args), seeds=args.seeds,
        time_limit=args.time_limit, parallelism=args.parallelism,
    )
    result = run_collection(plan, _adapter(args), journal=args.records)
    _say(f"{len(result.records)} records ({result.invoked} runs, {result.skipped} from journal, "
         f"{len(result.failures)} failed) -> {args.records}")
    return EXIT_OK


# -- select -----------------------------------------------------------------


def cmd_select(args) -> int:
    from .perfdb import aggregate, load_records
    from .selector import choose_size, greedy_chain

    records = load_records(_existing(args.records))
    matrix = aggregate(records)
    if args.first_n_instances:
        matrix = matrix.select_instances(matrix.instance_ids[: args.first_n_instances])
    k_max = args.k_max or len(matrix.config_ids)
    chain = greedy_chain(matrix, min(k_max, len(matrix.config_ids)))
    k = choose_size(chain, args.epsilon)
    portfolio = chain.prefix(k)
    _write_text(args.chain_out, chain.to_text())
    _write_json(args.portfolio_out, {"config_ids": portfolio, "k": k, "epsilon": args.epsilon,
                                     "q_subset": chain.qualities[k - 1], "q_full": chain.q_full})
    _say(f"portfolio of {k} configs: {portfolio} (q = {chain.qualities[k - 1]:.6g}, q(all) = {chain.q_full:.6g})")
    return EXIT_OK


# -- train / predict --------------------------------------------------------


def _training_set(instances, records, portfolio):
    from .graph import to_bipartite
    from .perfdb import aggregate, standardize

    matrix = aggregate(records, portfolio, [i.id for i in instances])
    targets = standardize(matrix).values
    return [(to_bipartite(inst), targets[k]) for k, inst in enumerate(instances)]


def cmd_train(args) -> int:
    from .gnn import TrainConfig, format_log, save_model, train_ensemble
    from .perfdb import load_records

    instances = _load_instances(args.instances)
    records = load_records(_existing(args.records))
    portfolio = _load_portfolio(args.portfolio)
    dataset = _training_set(instances, records, portfolio)
    cfg = TrainConfig(lr=args.lr, batch_size=args.batch_size, max_epochs=args.epochs, patience=args.patience,
                      seed=args.seed, val_fraction=args.val_fraction, hidden=args.hidden)
    members, logs = train_ensemble(dataset, cfg, args.ensemble, config_ids=portfolio)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for k, (model, history) in enumerate(zip(members, logs)):
        (out / f"member_{k}.model").write_bytes(save_model(model))
        (out / f"member_{k}.log.tsv").write_text(format_log(history), encoding="utf-8")
        best = min(h.val_mse for h in history)
        _say(f"member {k}: {len(history)} epochs, best validation MSE {best:.4f}")
    return EXIT_OK


def _load_models(path):
    from .gnn import load_model

    files = sorted(_existing(path).glob("member_*.model")) if Path(path).is_dir() else [Path(path)]
    if not files:
        raise UsageError(f"no member_*.model files in {path}")
    return [load_model(f.read_bytes()) for f in files]


def _format_predictions(pairs) -> str:
    return "".join(f"{iid}\t{cid}\n" for iid, cid in pairs)


def _parse_predictions(path) -> dict[str, int]:
    out = {}
    for line in Path(_existing(path)).read_text(encoding="utf-8").splitlines():
        if line.strip():
            iid, cid = line.split("\t")
            out[iid] = int(cid)
    return out


def cmd_predict(args) -> int:
    import numpy as np

    from .gnn import ensemble_predict_batch
    from .graph import to_bipartite

    models = _load_models(args.models)
    instances = _load_instances(args.instances)
    preds = ensemble_predict_batch(models, [to_bipartite(i) for i in instances])
    ids = models[0].config_ids
    pairs = [(inst.id, ids[int(np.argmin(row))]) for inst, row in zip(instances, preds)]
    _write_text(args.out, _format_predictions(pairs))
    _say(f"predicted configurations for {len(pairs)} instances")
    return EXIT_OK


# -- results / evaluate / report --------------------------------------------


def _results_from_records(records, choice) -> list:
    """Per-run results for the config ``choice(instance_id)`` picks, one per recorded seed."""
    from .evaluation import RunResult

    out = []
    for r in records:
        if r.status == "ok" and choice(r.instance_id) == r.config_id:
            out.append(RunResult(r.instance_id, r.seed, r.config_id, r.gamma))
    return out


def cmd_results(args) -> int:
    from .evaluation import format_results
    from .perfdb import load_records

    records = load_records(_existing(args.records))
    if args.predictions:
        preds = _parse_predictions(args.predictions)
        results = _results_from_records([r for r in records if r.instance_id in preds], preds.get)
    elif args.config_id is not None:
        results = _results_from_records(records, lambda _: args.config_id)
    else:
        raise UsageError("results needs --predictions or --config-id")
    _write_text(args.out, format_results(results))
    return EXIT_OK


def _compare_files(candidate, baseline):
    from .evaluation import compare, pair_results, parse_results

    cand = parse_results(Path(_existing(candidate)).read_text(encoding="utf-8"))
    base = parse_results(Path(_existing(baseline)).read_text(encoding="utf-8"))
    c, b, _ = pair_results(cand, base)
    return compare(c, b)


def cmd_evaluate(args) -> int:
    report = _compare_files(args.candidate, args.baseline)
    _write_text(args.out, report.summary_text())
    _say(f"Gamma candidate {report.total_candidate:.3g} vs baseline {report.total_baseline:.3g} "
         f"({report.total_improvement:+.1%}); wins {report.wins_candidate}/{report.wins_baseline} "
         f"(ties {report.ties})")
    return EXIT_OK


def cmd_report(args) -> int:
    from .evaluation import histogram_svg

    report = _compare_files(args.candidate, args.baseline)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.tsv").write_text(report.summary_text(), encoding="utf-8")
    (out / "histogram.tsv").write_text(report.histogram_text(), encoding="utf-8")
    (out / "histogram.svg").write_text(histogram_svg(report, args.title), encoding="utf-8")
    _say(f"mean improvement {report.mean_improvement:+.1%}, median {report.median_improvement:+.1%}; "
         f"report written to {out}")
    return EXIT_OK


# -- clusters ---------------------------------------------------------------


def cmd_cluster_fit(args) -> int:
    from .cluster import fit_clusters
    from .perfdb import aggregate, load_records

    instances = _load_instances(args.instances)
    records = load_records(_existing(args.records))
    portfolio = _load_portfolio(args.portfolio) if args.portfolio else None
    matrix = aggregate(records, portfolio, [i.id for i in instances])
    model = fit_clusters(instances, matrix, args.min_cluster_size)
    _write_text(args.out, model.to_text())
    _say(f"{len(model.clusters)} clusters, residual config {model.residual}")
    return EXIT_OK


def cmd_cluster_predict(args) -> int:
    from .cluster import ClusterModel, predict_cluster

    model = ClusterModel.from_text(Path(_existing(args.model)).read_text(encoding="utf-8"))
    instances = _load_instances(args.instances)
    _write_text(args.out, _format_predictions((i.id, predict_cluster(model, i)) for i in instances))
    return EXIT_OK


# -- pipeline ---------------------------------------------------------------


def cmd_pipeline(args) -> int:
    from .synthetic import N_SYNTHETIC_CONFIGS

    out = Path(args.out_dir)
    n_configs = min(args.n_configs, N_SYNTHETIC_CONFIGS)
    inst_dir = out / "instances"
    records = out / "records.tsv"

    def stage(name, fn, ns):
        log.info("stage %s", name)
        try:
            code = fn(ns)
        except (UsageError, KeyboardInterrupt):
            raise
        except Exception as exc:
            raise StageError(name, exc) from exc
        if code != EXIT_OK:
            raise StageError(name, RuntimeError(f"exit code {code}"))

    ns = argparse.Namespace
    stage("generate", cmd_generate, ns(family="mixed", n=args.n_instances, seed=args.seed, out_dir=inst_dir))
    files = sorted(inst_dir.glob("*.json"))
    # deterministic split: every fourth instance is held out for testing
    train_dir, test_dir = out / "split" / "train", out / "split" / "test"
    for d in (train_dir, test_dir):
        d.mkdir(parents=True, exist_ok=True)
        for f in d.glob("*.json"):
            f.unlink()
    for k, f in enumerate(files):
        ((test_dir if k % 4 == 3 else train_dir) / f.name).write_bytes(f.read_bytes())
    if records.exists():
        records.unlink()
    stage("collect", cmd_collect, ns(
        instances=str(inst_dir), space=None, table=None, portfolio=None,
        config_ids=f"0-{n_configs - 1}", seeds=args.seeds, time_limit=args.time_limit,
        parallelism=args.parallelism, records=str(records), adapter="synthetic", adapter_cmd=None,
        noise=args.noise, gap_cap=None,
    ))
    from .perfdb import load_records, write_records

    train_ids = {f.stem for f in train_dir.glob("*.json")}
    train_records = out / "records.train.tsv"
    write_records(train_records, [r for r in load_records(records) if r.instance_id in train_ids])
    stage("select", cmd_select, ns(
        records=str(train_records), k_max=None, epsilon=args.epsilon, first_n_instances=None,
        chain_out=str(out / "chain.tsv"), portfolio_out=str(out / "portfolio.json"),
    ))
    stage("train", cmd_train, ns(
        instances=str(train_dir), records=str(train_records), portfolio=str(out / "portfolio.json"),
        out_dir=str(out / "models"), ensemble=args.ensemble, seed=args.seed, epochs=args.epochs,
        hidden=args.hidden, batch_size=16, lr=1e-3, patience=10, val_fraction=0.2,
    ))
    stage("predict", cmd_predict, ns(models=str(out / "models"), instances=str(test_dir),
                                     out=str(out / "predictions.tsv")))
    stage("results", cmd_results, ns(records=str(records), predictions=str(out / "predictions.tsv"),
                                     config_id=None, out=str(out / "candidate.tsv")))
    test_ids = {f.stem for f in test_dir.glob("*.json")}
    base_preds = out / "baseline_predictions.tsv"
    base_preds.write_text(_format_predictions((i, args.baseline_config) for i in sorted(test_ids)), encoding="utf-8")
    stage("results", cmd_results, ns(records=str(records), predictions=str(base_preds),
                                     config_id=None, out=str(out / "baseline.tsv")))
    stage("evaluate", cmd_evaluate, ns(candidate=str(out / "candidate.tsv"), baseline=str(out / "baseline.tsv"),
                                       out=str(out / "summary.tsv")))
    stage("report", cmd_report, ns(candidate=str(out / "candidate.tsv"), baseline=str(out / "baseline.tsv"),
                                   out_dir=str(out / "report"), title="synthetic pipeline"))
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="confscout", description="Instance-wise MILP solver configuration toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("configs", help="enumerate and deduplicate the configuration space")
    s.add_argument("--params", help="parameter definitions JSON (default: the four emphasis parameters)")
    s.add_argument("--table", help="expansion table JSON (default: identity table, nothing collapses)")
    s.add_argument("--out", default="-", help="configuration space export (default: stdout)")
    s.add_argument("--settings-dir", help="also write one settings file per surviving configuration here")
    s.add_argument("--expect-size", type=int, help="exit 2 unless exactly this many configurations survive")
    s.set_defaults(func=cmd_configs)

    s = sub.add_parser("generate", help="write synthetic packing instances")
    s.add_argument("--family", choices=("sparse", "medium", "dense", "mixed"), default="mixed",
                   help="density family; mixed splits N across all three")
    s.add_argument("--n", type=int, required=True, help="number of instances")
    s.add_argument("--seed", type=int, default=0, help="generator seed")
    s.add_argument("--out-dir", required=True, help="output directory for instance JSON files")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("collect", help="run (instance x config x seed) through a solver adapter")
    s.add_argument("--instances", required=True, help="instance file or directory")
    s.add_argument("--space", help="configuration space export from 'configs'")
    s.add_argument("--table", help="expansion table overriding the one stored in --space")
    s.add_argument("--portfolio", help="restrict to the config ids of this portfolio file")
    s.add_argument("--config-ids", help="explicit config ids, e.g. 0-7 or 0,3,5 (empty settings)")
    s.add_argument("--seeds", type=int, default=1, help="seeds per (instance, config) pair")
    s.add_argument("--time-limit", type=float, default=900.0, help="per-run time limit in seconds")
    s.add_argument("--parallelism", type=int, default=1, help="concurrent adapter runs")
    s.add_argument("--records", required=True, help="record store / resumable journal")
    s.add_argument("--adapter", choices=("synthetic", "synthetic-process"), default="synthetic",
                   help="built-in adapter when --adapter-cmd is not given")
    s.add_argument("--adapter-cmd", help="external adapter command template with {instance} {settings} "
                                         "{seed} {time_limit} {output} {config_id} placeholders")
    s.add_argument("--gap-cap", type=float, help="gap cap for adapters that return only a bound trace")
    s.add_argument("--noise", type=float, default=0.05, help="synthetic solver noise amplitude")
    s.set_defaults(func=cmd_collect)

    s = sub.add_parser("select", help="greedy portfolio selection from collected records")
    s.add_argument("--records", required=True, help="record store")
    s.add_argument("--k-max", type=int, help="length of the greedy chain (default: all configs)")
    s.add_argument("--epsilon", type=float, default=0.01, help="relative quality gap for the size choice")
    s.add_argument("--first-n-instances", type=int, help="score on the first N instances only")
    s.add_argument("--chain-out", default="chain.tsv", help="chain table output")
    s.add_argument("--portfolio-out", default="portfolio.json", help="chosen portfolio output")
    s.set_defaults(func=cmd_select)

    s = sub.add_parser("train", help="train a GNN ensemble on standardized targets")
    s.add_argument("--instances", required=True, help="training instance file or directory")
    s.add_argument("--records", required=True, help="record store covering the portfolio")
    s.add_argument("--portfolio", required=True, help="portfolio file from 'select'")
    s.add_argument("--out-dir", required=True, help="directory for member_K.model and logs")
    s.add_argument("--ensemble", type=int, default=3, help="number of ensemble members")
    s.add_argument("--seed", type=int, default=0, help="seed of the first member")
    s.add_argument("--epochs", type=int, default=100, help="maximum epochs")
    s.add_argument("--hidden", type=int, default=64, help="hidden width H (latent is 4H)")
    s.add_argument("--batch-size", type=int, default=16, help="graphs per mini-batch")
    s.add_argument("--lr", type=float, default=1e-3, help="Adam learning rate")
    s.add_argument("--patience", type=int, default=10, help="early-stopping patience in epochs")
    s.add_argument("--val-fraction", type=float, default=0.2, help="held-out validation share")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("predict", help="pick a configuration per instance with a trained ensemble")
    s.add_argument("--models", required=True, help="model directory or single model file")
    s.add_argument("--instances", required=True, help="instance file or directory")
    s.add_argument("--out", default="-", help="predictions (instance_id, config_id)")
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("results", help="per-run results file for predicted or fixed configs")
    s.add_argument("--records", required=True, help="record store")
    s.add_argument("--predictions", help="predictions file (instance_id, config_id)")
    s.add_argument("--config-id", type=int, help="use this config for every instance")
    s.add_argument("--out", default="-", help="results output")
    s.set_defaults(func=cmd_results)

    s = sub.add_parser("evaluate", help="Gamma totals and wins of candidate vs baseline runs")
    s.add_argument("--candidate", required=True, help="candidate per-run results")
    s.add_argument("--baseline", required=True, help="baseline per-run results")
    s.add_argument("--out", default="-", help="summary table output")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("cluster-fit", help="fit the size-signature cluster predictor")
    s.add_argument("--instances", required=True, help="instance file or directory")
    s.add_argument("--records", required=True, help="record store")
    s.add_argument("--portfolio", help="restrict to this portfolio")
    s.add_argument("--min-cluster-size", type=int, default=2, help="members needed to form a cluster")
    s.add_argument("--out", default="-", help="cluster model output")
    s.set_defaults(func=cmd_cluster_fit)

    s = sub.add_parser("cluster-predict", help="predict configurations with a cluster model")
    s.add_argument("--model", required=True, help="cluster model from 'cluster-fit'")
    s.add_argument("--instances", required=True, help="instance file or directory")
    s.add_argument("--out", default="-", help="predictions output")
    s.set_defaults(func=cmd_cluster_predict)

    s = sub.add_parser("report", help="summary table, histogram bins and SVG histogram")
    s.add_argument("--candidate", required=True, help="candidate per-run results")
    s.add_argument("--baseline", required=True, help="baseline per-run results")
    s.add_argument("--out-dir", required=True, help="report directory")
    s.add_argument("--title", default="", help="histogram title")
    s.set_defaults(func=cmd_report)

    s = sub.add_parser("pipeline", help="synthetic end-to-end run: generate, collect, select, train, evaluate")
    s.add_argument("--out-dir", required=True, help="directory for all stage artifacts")
    s.add_argument("--n-instances", type=int, default=20, help="synthetic instances to generate")
    s.add_argument("--n-configs", type=int, default=8, help="configurations to collect (max 8)")
    s.add_argument("--seed", type=int, default=0, help="seed for generation and training")
    s.add_argument("--seeds", type=int, default=1, help="solver seeds per pair")
    s.add_argument("--parallelism", type=int, default=1, help="concurrent adapter runs")
    s.add_argument("--epsilon", type=float, default=0.01, help="portfolio size threshold")
    s.add_argument("--time-limit", type=float, default=900.0, help="per-run time limit in seconds")
    s.add_argument("--noise", type=float, default=0.05, help="synthetic solver noise amplitude")
    s.add_argument("--ensemble", type=int, default=3, help="ensemble members")
    s.add_argument("--epochs", type=int, default=100, help="maximum training epochs")
    s.add_argument("--hidden", type=int, default=64, help="hidden width")
    s.add_argument("--baseline-config", type=int, default=0, help="config id standing in for the default")
    s.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("CONFSCOUT_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    from .harness import AdapterError

    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        _say(f"confscout: error: {exc}")
        return EXIT_USAGE
    except StageError as exc:
        _say(f"confscout: {exc}")
        if isinstance(exc.exc, UsageError):
            return EXIT_USAGE
        return EXIT_ADAPTER if isinstance(exc.exc, AdapterError) else EXIT_DATA
    except AdapterError as exc:
        _say(f"confscout: adapter failure: {exc}")
        return EXIT_ADAPTER
    except (ValueError, KeyError, RuntimeError, OSError) as exc:
        _say(f"confscout: data error: {exc}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
