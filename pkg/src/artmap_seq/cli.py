"""Command-line entry point: ``artmap-seq <command> [flags]``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .bundle import load_ensemble, save_ensemble
from .config import load_config, render_config
from .ensemble import EvaluationTable, build_ensemble, increment_ensemble
from .errors import ArtmapSeqError, ConfigError, FastaParseError
from .features import (
    DEFAULT_HYDROPATHY,
    HydropathyTable,
    features_csv,
    fit_normalizer,
    normalize,
    vectorize_many,
)
from .sequence_io import (
    TEST,
    VALIDATION,
    histogram_report,
    length_histogram,
    read_fasta,
    rejection_report,
    remove_outliers,
    split_datasets,
    table2_counts,
    write_fasta,
)

log = logging.getLogger("artmap_seq")


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    log.info("wrote %s", path)
    return path


def _read_clean(path):
    seqs = read_fasta(path)
    kept, rejected = remove_outliers(seqs)
    if rejected:
        log.warning("%s: %d sequence(s) rejected by the alphabet filter", path, len(rejected))
    return kept, rejected


def _rel(path: Path, start: Path) -> str:
    return Path(os.path.relpath(path, start)).as_posix()


# -- vectorize / stats -------------------------------------------------------

def cmd_vectorize(args) -> int:
    table = HydropathyTable.load(args.hydropathy) if args.hydropathy else DEFAULT_HYDROPATHY
    kept, rejected = _read_clean(args.fasta)
    if not kept and not rejected:
        log.warning("%s contains no sequences", args.fasta)
    X = vectorize_many(kept, table)
    if args.normalize and len(X):
        X = normalize(X, fit_normalizer(X))
    out = Path(args.out)
    _write(out, features_csv(kept, X))
    _write(out.with_name(out.name + ".rejected.tsv"), rejection_report(rejected))
    return 0


def cmd_stats(args) -> int:
    kept, rejected = _read_clean(args.fasta)
    hist = length_histogram(kept, args.bin_width)
    report = histogram_report(hist, args.bin_width)
    if kept:
        lengths = sorted(len(s) for s in kept)
        families = {}
        for s in kept:
            families[s.family or "-"] = families.get(s.family or "-", 0) + 1
        summary = [f"# sequences: {len(kept)} kept, {len(rejected)} rejected",
                   f"# length: min {lengths[0]}, median {lengths[len(lengths) // 2]}, max {lengths[-1]}"]
        summary += [f"# family {name}: {n}" for name, n in families.items()]
        head, rest = report.split("\n", 1)
        report = head + "\n" + "\n".join(summary) + "\n" + rest
    if args.out:
        _write(Path(args.out), report)
    else:
        sys.stdout.write(report)
    if args.plot:
        from .plotting import plot_length_histogram
        plot_length_histogram(hist, args.bin_width, Path(args.plot))
    return 0


# -- train / increment / experiment -----------------------------------------

def _prepare(cfg):
    seqs, rejected = [], []
    for path in cfg.fasta:
        kept, rej = _read_clean(path)
        seqs += kept
        rejected += rej
    partition = split_datasets(seqs, cfg.split, cfg.pipeline.seed)
    return partition, rejected


def _write_partition(partition, out_dir: Path) -> dict[str, Path]:
    paths = {}
    for name, seqs in partition.databases().items():
        paths[name] = out_dir / "partition" / f"{name}.fasta"
        paths[name].parent.mkdir(parents=True, exist_ok=True)
        write_fasta(paths[name], seqs)
    return paths


def _train(cfg, out_dir: Path):
    partition, rejected = _prepare(cfg)
    paths = _write_partition(partition, out_dir)
    _write(out_dir / "rejected.tsv", rejection_report(rejected))
    first = partition.names[0]
    result = build_ensemble(partition.train_databases[0], partition.validation, cfg.pipeline,
                            cfg.hydropathy, name=first, source=_rel(paths[first], out_dir))
    save_ensemble(result.ensemble, out_dir / "model.json")
    _write(out_dir / "ranking.tsv", result.ranking_tsv())
    _write(out_dir / "ga_log.tsv", result.ga.log_tsv())
    if cfg.figures:
        from .plotting import plot_ga_history
        plot_ga_history(result.ga.history, out_dir / "figures" / "ga_fitness.png")
    return partition, paths, result


def cmd_train(args) -> int:
    cfg = load_config(args.config, args.seed, args.set)
    out_dir = Path(args.out) if args.out else cfg.out_dir
    _train(cfg, out_dir)
    return 0


def _retention(e, model_dir: Path, exclude: str) -> str:
    lines = ["# retention: error (%) on previously trained databases", "database\tsource\terror_pct"]
    for h in e.history:
        if h["name"] == exclude:
            continue
        src = h.get("source")
        if src is None or not (model_dir / src).exists():
            lines.append(f"{h['name']}\t{src or '-'}\tunavailable")
            continue
        kept, _ = remove_outliers(read_fasta(model_dir / src))
        err = e.error_rate(kept)
        lines.append(f"{h['name']}\t{src}\t{'-' if err is None else f'{err:.2f}'}")
    return "\n".join(lines) + "\n"


def cmd_increment(args) -> int:
    model_path = Path(args.model)
    e = load_ensemble(model_path)
    kept, rejected = _read_clean(args.fasta)
    name = args.name or Path(args.fasta).stem
    if name in e.trained_databases:
        log.warning("database %s was already absorbed; training on it again", name)
    out = Path(args.out) if args.out else model_path.with_name(f"model_{name}.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    for h in e.history:
        if "source" in h:
            h["source"] = _rel(model_path.parent / h["source"], out.parent)
    report = increment_ensemble(e, kept, seed=args.seed, max_epochs=args.epochs, name=name,
                                source=_rel(Path(args.fasta), out.parent))
    save_ensemble(e, out)
    text = report.to_tsv()
    if rejected:
        text += f"# rejected by alphabet filter: {len(rejected)}\n"
    text += _retention(e, out.parent, exclude=name)
    _write(Path(args.report) if args.report else out.with_suffix(".increment.tsv"), text)
    return 0


def _evaluate_partition(paths: dict[str, Path]):
    return {name: remove_outliers(read_fasta(p))[0] for name, p in paths.items()}


def cmd_experiment(args) -> int:
    cfg = load_config(args.config, args.seed, args.set)
    out_dir = Path(args.out) if args.out else cfg.out_dir
    partition, paths, result = _train(cfg, out_dir)
    e = result.ensemble
    dbs = partition.databases()
    table = EvaluationTable(partition.names + [VALIDATION, TEST])
    table.add_stage("Train 1", e, dbs)
    for k, name in enumerate(partition.names[1:], start=2):
        report = increment_ensemble(e, dbs[name], seed=args.seed + 1000 * k,
                                    max_epochs=cfg.increment_epochs, name=name,
                                    source=_rel(paths[name], out_dir))
        save_ensemble(e, out_dir / f"model_{name}.json")
        _write(out_dir / f"model_{name}.increment.tsv", report.to_tsv())
        table.add_stage(f"Train {k}", e, dbs)
    _write(out_dir / "evaluation.tsv", table.to_tsv())
    if cfg.figures:
        from .plotting import plot_evaluation
        series = {r: [table.cells[(r, s)] for s in table.stages] for r in (VALIDATION, TEST)}
        plot_evaluation(table.stages, series, out_dir / "figures" / "evaluation.png")
    return 0


# -- classify / evaluate -----------------------------------------------------

def cmd_classify(args) -> int:
    e = load_ensemble(args.model)
    kept, rejected = remove_outliers(read_fasta(args.fasta))
    votes = e.classify(kept)
    lines = ["# artmap-seq predictions v1",
             "id\tpredicted\t" + "\t".join(f"vote_{r}" for r in ["elite", "m1", "m2", "m3", "m4"])]
    for s, v in zip(kept, votes):
        lines.append(f"{s.id}\t{v.label}\t" + "\t".join(v.votes))
    for r in rejected:
        lines.append(f"# rejected\t{r.sequence.id}\t{r.reason}")
    text = "\n".join(lines) + "\n"
    if args.out:
        _write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return 0


def _partition_paths(args) -> dict[str, Path]:
    paths: dict[str, Path] = {}
    if args.partition:
        d = Path(args.partition)
        if not d.is_dir():
            raise ConfigError(f"partition directory not found: {d}")
        found = {p.stem: p for p in d.glob("*.fasta")}
        train = sorted((n for n in found if n not in (VALIDATION, TEST)),
                       key=lambda n: (len(n), n))
        for n in train + [n for n in (VALIDATION, TEST) if n in found]:
            paths[n] = found[n]
    for item in args.db or []:
        name, sep, p = item.partition("=")
        if not sep:
            raise ConfigError(f"--db expects NAME=PATH, got {item!r}")
        paths[name] = Path(p)
    for name, p in paths.items():
        if not p.exists():
            raise ConfigError(f"database {name}: file not found: {p}")
    if not paths:
        raise ConfigError("nothing to evaluate: give --partition or --db")
    return paths


def cmd_evaluate(args) -> int:
    paths = _partition_paths(args)
    dbs = _evaluate_partition(paths)
    rows = [n for n in paths if n not in (VALIDATION, TEST)] + [n for n in (VALIDATION, TEST) if n in paths]
    table = EvaluationTable(rows)
    for k, model in enumerate(args.model, start=1):
        table.add_stage(f"Train {k}", load_ensemble(model), dbs)
    text = table.to_tsv()
    if args.out:
        _write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    if args.plot:
        from .plotting import plot_evaluation
        series = {r: [table.cells[(r, s)] for s in table.stages]
                  for r in rows if r in (VALIDATION, TEST)}
        plot_evaluation(table.stages, series, Path(args.plot))
    return 0


# -- synthetic data ----------------------------------------------------------

def cmd_synth(args) -> int:
    from .synthetic import generate_families
    split = table2_counts(args.scale)
    totals = {f: sum(c.values()) + args.extra for f, c in split.items()}
    seqs = generate_families(totals, seed=args.seed, separation=args.separation,
                             subfamilies=args.subfamilies, divergence=args.divergence)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_fasta(out_dir / "corpus.fasta", seqs)
    _write(out_dir / "experiment.ini", render_config("corpus.fasta", split))
    return 0


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="artmap-seq", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("vectorize", help="write raw 438-feature vectors as CSV")
    s.add_argument("fasta")
    s.add_argument("--out", required=True)
    s.add_argument("--hydropathy", help="residue -> class table (default: built-in)")
    s.add_argument("--normalize", action="store_true", help="min-max scale over this file")
    s.set_defaults(func=cmd_vectorize)

    def experiment_flags(s):
        s.add_argument("config")
        s.add_argument("--seed", type=int, required=True)
        s.add_argument("--out", help="output directory (overrides [output] dir)")
        s.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE")

    s = sub.add_parser("train", help="split data, build the ensemble on the first database")
    experiment_flags(s)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("experiment", help="train, then increment through every database")
    experiment_flags(s)
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("increment", help="absorb a new labelled FASTA into a bundle")
    s.add_argument("model")
    s.add_argument("fasta")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--epochs", type=int, default=50)
    s.add_argument("--name", help="database name (default: file stem)")
    s.add_argument("--out", help="new bundle path (default: model_<name>.json beside the input)")
    s.add_argument("--report")
    s.set_defaults(func=cmd_increment)

    s = sub.add_parser("classify", help="predict families with vote breakdowns")
    s.add_argument("model")
    s.add_argument("fasta")
    s.add_argument("--out")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("evaluate", help="error matrix per database and training stage")
    s.add_argument("model", nargs="+", help="one bundle per stage, in order")
    s.add_argument("--partition", help="directory of <name>.fasta files")
    s.add_argument("--db", action="append", metavar="NAME=PATH")
    s.add_argument("--out")
    s.add_argument("--plot")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("stats", help="sequence length histogram")
    s.add_argument("fasta")
    s.add_argument("--bin-width", type=int, default=50)
    s.add_argument("--out")
    s.add_argument("--plot")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("synth", help="generate a synthetic 8-family corpus and config")
    s.add_argument("out_dir")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--scale", type=float, default=1.0, help="scale of the GPCR split counts")
    s.add_argument("--extra", type=int, default=0, help="spare sequences per family")
    s.add_argument("--separation", type=float, default=0.2)
    s.add_argument("--subfamilies", type=int, default=8)
    s.add_argument("--divergence", type=float, default=0.4)
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (ArtmapSeqError, FastaParseError) as exc:
        print(f"artmap-seq: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"artmap-seq: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
