"""Command line entry point: ``nema <command> [options]``.

Options may also come from a JSON file given with ``--config``; keys are the
long option names with dashes replaced by underscores. Flags given on the
command line win over the file, which wins over built-in defaults.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import platform
import sys
from dataclasses import asdict, dataclass, field, replace
from importlib import metadata
from pathlib import Path
from typing import Any, Optional, Sequence

from . import __version__
from .atomic import atomic_writer
from .base import FieldKind, FieldPair, ScoredPair
from .baselines import BudgetExceeded
from .evalkit import (
    EvalReport,
    accuracy,
    interactive_review,
    read_ground_truth,
    read_pairs,
    sample_record_pairs,
    top_k,
    write_ground_truth,
    write_pairs,
)
from .graphout import build_graph, export_graph
from .ingest import Catalog, TableData, detect_primary_keys, load_manifest, preprocess_numeric
from .learn import (
    NUMERIC_FEATURES,
    TEXT_FEATURES,
    SamplerConfig,
    TrainConfig,
    synthesize_training_data,
    train_classifier,
    write_training_data,
)
from .lsh import LshConfig
from .numeric import NumericMatchConfig
from .parallel import default_jobs
from .results import read_results, write_results
from .runner import DEFAULT_MATCHER, MATCHER_MODE, MATCHERS, MODES, MatchSettings, candidate_pairs, prepare, run_matcher
from .synth import SynthSpec, generate_synthetic
from .textmatch import TextMatchConfig

log = logging.getLogger("nema")

DEFAULTS: dict[str, Any] = {
    "seed": 0,
    "jobs": None,
    "mode": None,
    "matcher": None,
    "pairs": None,
    "no_pk": False,
    "t_r": 0.1,
    "t_b": 0.1,
    "buckets": 50_000,
    "top_k": 20,
    "t_rn": 0.4,
    "window": 16,
    "exact": False,
    "t_mr": 0.1,
    "lsh_n": None,
    "lsh_band_size": 2,
    "lsh_bands": 128,
    "lsh_seed": None,
    "shingle_k": 3,
    "threshold": 0.1,
    "budget": None,
    "rate": 0.5,
    "copies": 100,
    "k": 20,
    "accept_all": False,
    "accept_file": None,
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    manifest: Optional[str]
    mode: Optional[str]
    out: Optional[str]
    seed: int
    numeric: NumericMatchConfig = NumericMatchConfig()
    text: TextMatchConfig = TextMatchConfig()
    lsh: LshConfig = LshConfig()
    sampler: SamplerConfig = SamplerConfig()
    options: dict[str, Any] = field(default_factory=dict)

    def settings(self) -> MatchSettings:
        return MatchSettings(
            self.numeric, self.text, self.lsh, self.options["threshold"], self.options["budget"], self.options["jobs"]
        )

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["options"] = dict(sorted(self.options.items()))
        return d


# -- argument handling ------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file of option defaults")
    p.add_argument("--seed", type=int, default=None, help="top-level seed (default 0)")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default $NEMA_JOBS or 1)")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_matching(p: argparse.ArgumentParser) -> None:
    p.add_argument("--manifest", help="table manifest JSON")
    p.add_argument("--mode", choices=MODES, default=None)
    p.add_argument("--matcher", choices=MATCHERS, default=None)
    p.add_argument("--pairs", help="CSV of field pairs to score instead of all candidates")
    p.add_argument("--no-pk", action="store_const", const=True, default=None, help="drop the primary-key constraint")
    g = p.add_argument_group("numerical")
    g.add_argument("--t-r", type=float, default=None, help="range-difference filter threshold")
    g.add_argument("--t-b", type=float, default=None, help="bucket dot product accept threshold")
    g.add_argument("--buckets", type=int, default=None, help="bucket count")
    g.add_argument("--top-k", type=int, default=None)
    g = p.add_argument_group("text")
    g.add_argument("--t-rn", type=float, default=None, help="record match threshold")
    g.add_argument("--window", type=int, default=None, help="comparison window")
    g.add_argument("--exact", action="store_const", const=True, default=None, help="compare all record pairs")
    g.add_argument("--t-mr", type=float, default=None, help="field accept threshold")
    g = p.add_argument_group("minhash")
    g.add_argument("--lsh-n", type=int, default=None, help="signature length (band size x bands)")
    g.add_argument("--lsh-band-size", type=int, default=None)
    g.add_argument("--lsh-bands", type=int, default=None)
    g.add_argument("--lsh-seed", type=int, default=None)
    g.add_argument("--shingle-k", type=int, default=None)
    g = p.add_argument_group("baselines")
    g.add_argument("--threshold", type=float, default=None, help="accept threshold")
    g.add_argument("--budget", type=float, default=None, help="stop after this many seconds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nema", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"nema {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("ingest", help="load and classify tables, list candidate pairs")
    _add_common(p)
    p.add_argument("--manifest", help="table manifest JSON")
    p.add_argument("--no-pk", action="store_const", const=True, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("match", help="score candidate field pairs")
    _add_common(p)
    _add_matching(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="fit a pair classifier from labeled pairs")
    _add_common(p)
    _add_matching(p)
    p.add_argument("--gt", required=True)
    p.add_argument("--rate", type=float, default=None, help="sampling rate")
    p.add_argument("--copies", type=int, default=None, help="samples per labeled pair")
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="accuracy of a matcher or a results file against ground truth")
    _add_common(p)
    _add_matching(p)
    p.add_argument("--gt", required=True)
    p.add_argument("--results", help="results CSV to evaluate instead of running a matcher")
    p.add_argument("--out")

    p = sub.add_parser("bench", help="synthetic end-to-end benchmark")
    _add_common(p)
    p.add_argument("--spec", help="benchmark spec JSON")
    p.add_argument("--out", required=True)

    p = sub.add_parser("review", help="accept or reject top-k pairs")
    _add_common(p)
    p.add_argument("--in", dest="input", required=True, help="results CSV")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--manifest", help="tables, to show sample record pairs")
    p.add_argument("--accept-all", action="store_const", const=True, default=None)
    p.add_argument("--accept-file", default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("export-graph", help="build the property graph from accepted pairs")
    _add_common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--accepted", required=True, help="CSV of accepted field pairs")
    p.add_argument("--t-rn", type=float, default=None)
    p.add_argument("--out", required=True)
    return parser


def _merge_options(args: argparse.Namespace) -> dict[str, Any]:
    from_file: dict[str, Any] = {}
    if getattr(args, "config", None):
        try:
            from_file = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(from_file, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(from_file) - set(DEFAULTS) - {"manifest", "out", "gt", "spec"}
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    opts = {}
    for key, default in DEFAULTS.items():
        value = getattr(args, key, None)
        opts[key] = value if value is not None else from_file.get(key, default)
    for key in ("manifest", "out", "gt", "spec"):
        value = getattr(args, key, None)
        opts[key] = value if value is not None else from_file.get(key)
    if opts["jobs"] is None:
        opts["jobs"] = default_jobs()
    return opts


def make_run_config(command: str, opts: dict[str, Any]) -> RunConfig:
    try:
        numeric = NumericMatchConfig(opts["t_r"], opts["t_b"], opts["buckets"], opts["top_k"])
        window = None if opts["exact"] else opts["window"]
        text = TextMatchConfig(opts["t_rn"], window, opts["top_k"], opts["t_mr"])
        band_size, bands = opts["lsh_band_size"], opts["lsh_bands"]
        if opts["lsh_n"] is not None and opts["lsh_n"] != band_size * bands:
            if opts["lsh_n"] % band_size:
                raise ValueError(f"--lsh-n {opts['lsh_n']} is not a multiple of the band size {band_size}")
            bands = opts["lsh_n"] // band_size
        lsh_seed = opts["lsh_seed"] if opts["lsh_seed"] is not None else opts["seed"] + 1
        lsh = LshConfig(band_size, bands, lsh_seed, opts["shingle_k"])
        sampler = SamplerConfig(opts["rate"], opts["copies"], opts["seed"])
        if not 0.0 <= opts["threshold"] <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        if opts["jobs"] < 1:
            raise ValueError("jobs must be >= 1")
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    for key in ("manifest", "gt", "spec", "pairs", "accept_file", "input", "results", "accepted"):
        if opts.get(key) and not Path(opts[key]).exists():
            raise UsageError(f"{key.replace('_', '-')} file not found: {opts[key]}")
    mode = opts["mode"]
    if opts["matcher"] and not mode:
        mode = MATCHER_MODE.get(opts["matcher"])
    return RunConfig(command, opts.get("manifest"), mode, opts.get("out"), opts["seed"], numeric, text, lsh, sampler, opts)


# -- run manifests -------------------------------------------------------------------------


def _versions() -> dict[str, str]:
    out = {"nema": __version__, "python": platform.python_version()}
    for dist in ("numpy", "scipy", "nltk", "rapidfuzz"):
        try:
            out[dist] = metadata.version(dist)
        except metadata.PackageNotFoundError:
            out[dist] = "missing"
    return out


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_run_manifest(out_dir: Path, cfg: RunConfig, inputs: Sequence[str | Path], outputs: Sequence[Path], extra=None) -> Path:
    record = {
        "command": cfg.command,
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "versions": _versions(),
        "inputs": {str(p): _sha256(Path(p)) for p in inputs if p and Path(p).is_file()},
        "outputs": sorted(str(p.relative_to(out_dir)) if p.is_relative_to(out_dir) else str(p) for p in outputs),
    }
    if extra:
        record.update(extra)
    path = out_dir / "run.json"
    with atomic_writer(path) as fh:
        json.dump(record, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return path


def _load_catalog(manifest: Optional[str]) -> Catalog:
    if not manifest:
        raise UsageError("--manifest is required")
    return Catalog(load_manifest(manifest))


def _resolve_matcher(cfg: RunConfig) -> tuple[str, str]:
    matcher, mode = cfg.options["matcher"], cfg.mode
    if matcher is None:
        if mode is None:
            raise UsageError("give --mode or --matcher")
        matcher = DEFAULT_MATCHER[mode]
    if mode is None:
        raise UsageError(f"matcher {matcher} needs --mode")
    if MATCHER_MODE.get(matcher, mode) != mode:
        raise UsageError(f"matcher {matcher} does not work with --mode {mode}")
    return matcher, mode


def _pairs_for(cfg: RunConfig, catalog: Catalog, mode: str) -> list[FieldPair]:
    if cfg.options["pairs"]:
        pairs = read_pairs(cfg.options["pairs"])
        missing = sorted({str(f) for p in pairs for f in (p.a, p.b)} - {str(f) for f in catalog.columns})
        if missing:
            raise UsageError(f"pairs reference unknown fields: {', '.join(missing)}")
        return pairs
    return candidate_pairs(catalog, mode, not cfg.options["no_pk"])


# -- commands -----------------------------------------------------------------------------


def cmd_ingest(cfg: RunConfig) -> int:
    catalog = _load_catalog(cfg.manifest)
    out = Path(cfg.out)
    fields_path = out / "fields.csv"
    with atomic_writer(fields_path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["table", "field", "kind", "primary_key", "records", "non_null", "distinct", "dropped"])
        for t in catalog.tables:
            pks = set(detect_primary_keys(t))
            for c in t.columns:
                non_null = c.non_null()
                dropped = preprocess_numeric(c).dropped if c.kind == FieldKind.NUMERICAL else ""
                w.writerow([t.name, c.field, c.kind.value, int(c.id in pks), len(c.raw_records), len(non_null), len(set(non_null)), dropped])
    outputs = [fields_path]
    for mode in MODES:
        path = out / f"candidates_{mode}.csv"
        write_pairs(candidate_pairs(catalog, mode, not cfg.options["no_pk"]), path)
        outputs.append(path)
    write_run_manifest(out, cfg, [cfg.manifest], outputs)
    print(f"{len(catalog.tables)} tables, {len(catalog.columns)} fields -> {out}")
    return 0


def cmd_match(cfg: RunConfig) -> int:
    catalog = _load_catalog(cfg.manifest)
    matcher, mode = _resolve_matcher(cfg)
    pairs = _pairs_for(cfg, catalog, mode)
    outcome = run_matcher(matcher, catalog, pairs, cfg.settings(), mode)
    out = Path(cfg.out)
    path = write_results(outcome.scored, out / "results.csv", matcher)
    write_run_manifest(out, cfg, [cfg.manifest, cfg.options["pairs"]], [path], {"matcher": matcher, "mode": mode})
    matched = sum(sp.matched for sp in outcome.scored)
    print(f"{matcher}: {len(pairs)} pairs scored, {matched} matched -> {path}")
    return 0


def cmd_train(cfg: RunConfig) -> int:
    catalog = _load_catalog(cfg.manifest)
    mode = cfg.mode or "num"
    gt = read_ground_truth(cfg.options["gt"])
    fields = sorted({f for e in gt for f in (e.pair.a, e.pair.b)})
    missing = [str(f) for f in fields if f not in catalog.columns]
    if missing:
        raise UsageError(f"ground truth references unknown fields: {', '.join(missing)}")
    sources = prepare("nema-num" if mode == "num" else "nema-tpm", mode, catalog, fields)
    empty = [str(f) for f in fields if not len(sources.get(f, ()))]
    if empty:
        raise UsageError(f"ground-truth fields without usable records: {', '.join(empty)}")
    data = synthesize_training_data([(e.pair, e.label) for e in gt], sources, cfg.sampler, cfg.text.window, cfg.lsh)
    names = NUMERIC_FEATURES if mode == "num" else TEXT_FEATURES
    report = train_classifier(data, cfg=TrainConfig(seed=cfg.seed), names=names)
    out = Path(cfg.out)
    train_path, model_path = out / "training.csv", out / "model.txt"
    write_training_data(data, train_path, names)
    report.model.save(model_path)
    summary = {
        "mode": mode,
        "samples": len(data),
        "cv_accuracy": report.cv_accuracy,
        "fold_accuracies": report.fold_accuracies,
        "test_accuracy": report.test_accuracy,
    }
    write_run_manifest(out, cfg, [cfg.manifest, cfg.options["gt"]], [train_path, model_path], {"training": summary})
    print(f"{len(data)} samples; cv accuracy {report.cv_accuracy:.4f}, test accuracy {report.test_accuracy:.4f}")
    return 0


def _report_dict(matcher: str, report: EvalReport, threshold: float) -> dict[str, Any]:
    return {"matcher": matcher, "threshold": threshold, "tp": report.tp, "tn": report.tn,
            "fp": report.fp, "fn": report.fn, "accuracy": report.accuracy}


def cmd_eval(cfg: RunConfig) -> int:
    gt = read_ground_truth(cfg.options["gt"])
    threshold = cfg.options["threshold"]
    if cfg.options.get("results"):
        matcher, scored = read_results(cfg.options["results"])
        report = accuracy(scored, gt, threshold)
    else:
        catalog = _load_catalog(cfg.manifest)
        matcher, mode = _resolve_matcher(cfg)
        outcome = run_matcher(matcher, catalog, [e.pair for e in gt], cfg.settings(), mode)
        report = accuracy(outcome.scored, gt, threshold)
        report.wall_time[matcher] = outcome.seconds
    summary = _report_dict(matcher, report, threshold)
    print(json.dumps(summary, sort_keys=True))
    if cfg.out:
        out = Path(cfg.out)
        path = out / "eval.json"
        with atomic_writer(path) as fh:
            json.dump({**summary, "wall_time": report.wall_time}, fh, indent=2, sort_keys=True)
            fh.write("\n")
        write_run_manifest(out, cfg, [cfg.options["gt"], cfg.options.get("results"), cfg.manifest], [path])
    return 0


def cmd_review(cfg: RunConfig) -> int:
    matcher, scored = read_results(cfg.options["input"])
    picked = top_k(scored, cfg.options["k"])
    samples = None
    if cfg.manifest:
        catalog = _load_catalog(cfg.manifest)
        samples = lambda p: sample_record_pairs(p, catalog, 5, cfg.text.t_rn)  # noqa: E731
    try:
        accepted = interactive_review(
            picked, samples, accept_all=cfg.options["accept_all"], accept_file=cfg.options["accept_file"]
        )
    except RuntimeError as exc:
        raise UsageError(str(exc)) from exc
    out = Path(cfg.out)
    write_pairs([sp.pair for sp in accepted], out)
    print(f"{len(accepted)} of {len(picked)} pairs accepted -> {out}")
    return 0


def cmd_export_graph(cfg: RunConfig) -> int:
    catalog = _load_catalog(cfg.manifest)
    accepted = read_pairs(cfg.options["accepted"])
    g = build_graph(catalog, accepted, cfg.text.t_rn)
    nodes, edges = export_graph(g, cfg.out)
    for note in g.skipped:
        log.warning("skipped %s", note)
    write_run_manifest(Path(cfg.out), cfg, [cfg.manifest, cfg.options["accepted"]], [nodes, edges])
    print(f"{len(g.nodes)} nodes, {len(g.edges)} edges -> {cfg.out}")
    return 0


# -- bench ---------------------------------------------------------------------------------

BENCH_DEFAULTS: dict[str, Any] = {
    "numeric": {},
    "text": {"n_matched": 20, "n_nonmatched": 20, "records_per_field": 2000},
    "matchers": {"num": ["nema-num", "jaccard"], "text": ["nema-tpm", "nema-lsh", "jaccard", "agg-ed", "agg-trigram"]},
    "threshold": 0.1,
    "graph_top_k": 3,
}


def load_bench_spec(path: Optional[str], seed: int) -> dict[str, Any]:
    spec = json.loads(json.dumps(BENCH_DEFAULTS))
    if path:
        user = json.loads(Path(path).read_text(encoding="utf-8"))
        unknown = set(user) - set(spec) - {"seed"}
        if unknown:
            raise UsageError(f"unknown bench spec keys: {', '.join(sorted(unknown))}")
        spec.update(user)
    spec.setdefault("seed", seed)
    for mode in MODES:
        for m in spec["matchers"].get(mode, []):
            if m not in MATCHERS or MATCHER_MODE.get(m, mode) != mode:
                raise UsageError(f"matcher {m} cannot run in mode {mode}")
    return spec


def _write_tables(tables: Sequence[TableData], data_dir: Path) -> Path:
    entries = {}
    for t in tables:
        path = data_dir / f"{t.name}.csv"
        with atomic_writer(path) as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([c.field for c in t.columns])
            for i in range(t.row_count):
                w.writerow(["" if c.raw_records[i] is None else c.raw_records[i] for c in t.columns])
        entries[t.name] = path.name
    manifest = data_dir / "manifest.json"
    with atomic_writer(manifest) as fh:
        json.dump({"tables": entries}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def cmd_bench(cfg: RunConfig) -> int:
    spec = load_bench_spec(cfg.options.get("spec"), cfg.seed)
    out = Path(cfg.out)
    outputs: list[Path] = []
    timings: dict[str, dict[str, float]] = {}
    evaluation = []
    accepted: list[ScoredPair] = []
    all_tables: list[TableData] = []
    settings = replace(cfg.settings(), threshold=spec["threshold"])
    for mode, key, kind in (("num", "numeric", "numeric"), ("text", "text", "text")):
        matchers = spec["matchers"].get(mode, [])
        if not matchers:
            continue
        synth = SynthSpec(**{"seed": spec["seed"], **spec[key], "kind": kind})
        tables, gt = generate_synthetic(synth)
        all_tables.extend(tables)
        data_dir = out / "data" / mode
        outputs.append(_write_tables(tables, data_dir))
        gt_path = data_dir / "gt.csv"
        write_ground_truth(gt, gt_path)
        outputs.append(gt_path)
        catalog = Catalog(tables)
        pairs = [e.pair for e in sorted(gt, key=lambda e: e.pair)]
        timings[mode] = {}
        for matcher in matchers:
            try:
                outcome = run_matcher(matcher, catalog, pairs, settings, mode)
            except BudgetExceeded as exc:
                log.warning("%s/%s: %s", mode, matcher, exc)
                timings[mode][matcher] = exc.elapsed
                evaluation.append({"mode": mode, "matcher": matcher, "status": "budget-exceeded"})
                continue
            timings[mode][matcher] = outcome.seconds
            path = out / "results" / f"{mode}_{matcher}.csv"
            write_results(outcome.scored, path, matcher)
            outputs.append(path)
            report = accuracy(outcome.scored, gt, spec["threshold"])
            evaluation.append({"mode": mode, "status": "ok", **_report_dict(matcher, report, spec["threshold"])})
            if matcher == DEFAULT_MATCHER[mode]:
                accepted.extend([sp for sp in top_k(outcome.scored, spec["graph_top_k"]) if sp.matched])
    eval_path = out / "eval.csv"
    with atomic_writer(eval_path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        cols = ["mode", "matcher", "status", "threshold", "tp", "tn", "fp", "fn", "accuracy"]
        w.writerow(cols)
        for row in evaluation:
            w.writerow([repr(row[c]) if isinstance(row.get(c), float) else row.get(c, "") for c in cols])
    outputs.append(eval_path)
    graph = build_graph(Catalog(all_tables), accepted, cfg.text.t_rn)
    outputs.extend(export_graph(graph, out / "graph"))
    timings_path = out / "timings.json"
    with atomic_writer(timings_path) as fh:
        json.dump(timings, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_run_manifest(out, cfg, [cfg.options.get("spec")], outputs + [timings_path], {"bench_spec": spec})
    for row in evaluation:
        acc = f"{row['accuracy']:.3f}" if "accuracy" in row else row["status"]
        print(f"{row['mode']:>4} {row['matcher']:<12} acc={acc}  time={timings[row['mode']][row['matcher']]:.2f}s")
    return 0


COMMANDS = {
    "ingest": cmd_ingest,
    "match": cmd_match,
    "train": cmd_train,
    "eval": cmd_eval,
    "bench": cmd_bench,
    "review": cmd_review,
    "export-graph": cmd_export_graph,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        opts = _merge_options(args)
        for key in ("input", "results", "accepted"):
            if getattr(args, key, None):
                opts[key] = getattr(args, key)
        cfg = make_run_config(args.command, opts)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"nema {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError) as exc:
        print(f"nema {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
