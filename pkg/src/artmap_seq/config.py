"""Experiment configuration files.

INI-style key/value text with section headers::

    [data]
    fasta = corpus.fasta            ; one or more paths, whitespace separated
    hydropathy = table.txt          ; optional residue -> class table

    [split]
    databases = D1 Dv D2 D3 D4 D5 D6 Dt
    Type 1 = 32 10 43 43 43 43 43 43    ; one line per family, counts in 'databases' order

    [pipeline]
    rho = 0.75
    population_size = 30
    candidate_pool = 15
    max_epochs = 50
    increment_epochs = 50

    [ga]
    population = 30
    generations = 50
    crossover_rate = 0.8
    mutation_rate = 0.4
    lambda = 1.0

    [output]
    dir = out
    figures = yes

Relative paths resolve against the config file's directory. Every key has
a default except ``data.fasta``; the seed always comes from the command line.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .features import DEFAULT_HYDROPATHY, HydropathyTable
from .ga_selection import GaConfig
from .ensemble import PipelineConfig
from .sequence_io import TABLE2_DATABASES, table2_counts

_PIPELINE_KEYS = {"rho": float, "alpha": float, "eps_mt": float, "population_size": int,
                  "candidate_pool": int, "max_epochs": int}
_GA_KEYS = {"population": int, "generations": int, "crossover_rate": float,
            "mutation_rate": float, "lambda": float}


@dataclass
class ExperimentConfig:
    fasta: list[Path]
    split: dict[str, dict[str, int]]
    pipeline: PipelineConfig
    hydropathy: HydropathyTable = DEFAULT_HYDROPATHY
    hydropathy_path: Path | None = None
    increment_epochs: int = 50
    out_dir: Path = Path("out")
    figures: bool = True
    databases: list[str] = field(default_factory=lambda: list(TABLE2_DATABASES))


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";",), interpolation=None)
    cp.optionxform = str  # family names are case-sensitive
    return cp


def load_config(path: str | Path, seed: int, overrides: list[str] = ()) -> ExperimentConfig:
    """Read a config file; ``overrides`` are ``section.key=value`` strings applied on top."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    cp = _parser()
    try:
        cp.read_string(path.read_text(encoding="utf-8"), source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    for item in overrides:
        key, sep, value = item.partition("=")
        section, dot, option = key.strip().partition(".")
        if not sep or not dot:
            raise ConfigError(f"override {item!r} must look like section.key=value")
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, option, value.strip())
    return _build(cp, path.parent, seed)


def _get(cp, section, key, conv, default):
    if not cp.has_option(section, key):
        return default
    raw = cp.get(section, key)
    try:
        if conv is bool:
            return cp.getboolean(section, key)
        return conv(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r} as {conv.__name__}") from None


def _build(cp, base: Path, seed: int) -> ExperimentConfig:
    if not cp.has_option("data", "fasta"):
        raise ConfigError("[data] fasta is required")
    fasta = [base / p for p in cp.get("data", "fasta").split()]
    for p in fasta:
        if not p.exists():
            raise ConfigError(f"[data] fasta: file not found: {p}")
    hydro, hydro_path = DEFAULT_HYDROPATHY, None
    if cp.has_option("data", "hydropathy"):
        hydro_path = base / cp.get("data", "hydropathy")
        if not hydro_path.exists():
            raise ConfigError(f"[data] hydropathy: file not found: {hydro_path}")
        hydro = HydropathyTable.load(hydro_path)

    if cp.has_section("split"):
        dbs = cp.get("split", "databases", fallback=" ".join(TABLE2_DATABASES)).split()
        if "Dv" not in dbs or "Dt" not in dbs:
            raise ConfigError("[split] databases must include Dv and Dt")
        split = {}
        for family, value in cp.items("split"):
            if family == "databases":
                continue
            try:
                counts = [int(x) for x in value.split()]
            except ValueError:
                raise ConfigError(f"[split] {family}: counts must be integers") from None
            if len(counts) != len(dbs):
                raise ConfigError(f"[split] {family}: expected {len(dbs)} counts, got {len(counts)}")
            split[family] = dict(zip(dbs, counts))
        if not split:
            raise ConfigError("[split] lists no families")
    else:
        dbs, split = list(TABLE2_DATABASES), table2_counts()

    ga = GaConfig(
        population=_get(cp, "ga", "population", int, 30),
        generations=_get(cp, "ga", "generations", int, 50),
        crossover_rate=_get(cp, "ga", "crossover_rate", float, 0.8),
        mutation_rate=_get(cp, "ga", "mutation_rate", float, 0.4),
        lam=_get(cp, "ga", "lambda", float, 1.0),
        seed=seed,
    )
    unknown = [k for k in cp.options("pipeline") if k not in _PIPELINE_KEYS and k != "increment_epochs"] \
        if cp.has_section("pipeline") else []
    unknown += [k for k in cp.options("ga") if k not in _GA_KEYS] if cp.has_section("ga") else []
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    kwargs = {k: _get(cp, "pipeline", k, conv, None) for k, conv in _PIPELINE_KEYS.items()}
    try:
        pipeline = PipelineConfig(ga=ga, seed=seed, **{k: v for k, v in kwargs.items() if v is not None})
    except ValueError as exc:
        raise ConfigError(f"[pipeline] {exc}") from exc
    return ExperimentConfig(
        fasta=fasta,
        split=split,
        pipeline=pipeline,
        hydropathy=hydro,
        hydropathy_path=hydro_path,
        increment_epochs=_get(cp, "pipeline", "increment_epochs", int, 50),
        out_dir=base / cp.get("output", "dir", fallback="out"),
        figures=_get(cp, "output", "figures", bool, True),
        databases=dbs,
    )


def render_config(fasta: str, split: dict[str, dict[str, int]], databases=TABLE2_DATABASES,
                  out_dir: str = "out") -> str:
    """Config text for a corpus, used by the synthetic-data command."""
    width = max(len(f) for f in split)
    lines = ["[data]", f"fasta = {fasta}", "", "[split]", f"databases = {' '.join(databases)}"]
    for family, counts in split.items():
        lines.append(f"{family.ljust(width)} = " + " ".join(str(counts[d]) for d in databases))
    lines += ["", "[pipeline]", "rho = 0.75", "population_size = 30", "candidate_pool = 15",
              "max_epochs = 50", "increment_epochs = 50", "",
              "[ga]", "population = 30", "generations = 50", "crossover_rate = 0.8",
              "mutation_rate = 0.4", "lambda = 1.0", "",
              "[output]", f"dir = {out_dir}", "figures = yes", ""]
    return "\n".join(lines)
