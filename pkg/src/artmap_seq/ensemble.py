"""Population training, elite/GA member selection, voting and incremental updates."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .agreement import build_error_matrix, kappa
from .errors import ModelError
from .features import (
    DEFAULT_HYDROPATHY,
    HydropathyTable,
    NormalizationParams,
    fit_normalizer,
    normalize,
    vectorize_many,
)
from .fuzzy_artmap import FuzzyArtmap, TrainResult
from .ga_selection import Candidate, GaConfig, GaResult, evolve
from .sequence_io import TEST, VALIDATION, DatasetPartition, ProteinSequence

log = logging.getLogger(__name__)

ENSEMBLE_SIZE = 5


@dataclass(frozen=True)
class PipelineConfig:
    population_size: int = 30
    candidate_pool: int = 15
    members_selected: int = 4
    elite_count: int = 1
    rho: float = 0.75
    alpha: float = 0.001
    eps_mt: float = 0.001
    max_epochs: int = 50
    ga: GaConfig = GaConfig()
    seed: int = 0

    def __post_init__(self):
        if self.members_selected != 4 or self.elite_count != 1:
            raise ValueError("the ensemble is fixed at 1 elite + 4 selected members")
        if self.candidate_pool > self.population_size:
            raise ValueError("candidate_pool cannot exceed population_size")
        if self.members_selected >= self.candidate_pool:
            raise ValueError("candidate_pool must exceed members_selected")

    def new_model(self, labels: list[str]) -> FuzzyArtmap:
        return FuzzyArtmap(self.rho, self.alpha, self.eps_mt, labels=labels)


@dataclass
class Vote:
    label: str
    votes: tuple[str, ...]  # elite first

    @property
    def counts(self) -> Counter:
        return Counter(self.votes)


@dataclass
class EnsembleModel:
    elite: FuzzyArtmap
    members: list[FuzzyArtmap]
    normalizer: NormalizationParams
    labels: list[str]
    hydropathy: HydropathyTable = DEFAULT_HYDROPATHY
    provenance: dict = field(default_factory=dict)
    history: list[dict] = field(default_factory=list)

    def __post_init__(self):
        if len(self.members) != ENSEMBLE_SIZE - 1:
            raise ModelError(f"ensemble needs exactly {ENSEMBLE_SIZE - 1} selected members")
        for m in self.voters:
            if m.labels is not self.labels:
                raise ModelError("all voters must share the ensemble label dictionary")

    @property
    def voters(self) -> list[FuzzyArtmap]:
        return [self.elite, *self.members]

    def vectorize(self, seqs: Sequence[ProteinSequence]) -> np.ndarray:
        return normalize(vectorize_many(seqs, self.hydropathy), self.normalizer)

    def predict(self, X: np.ndarray) -> list[Vote]:
        X = np.atleast_2d(X)
        if len(X) == 0:
            return []
        ballots = [m.predict_many(X) for m in self.voters]
        return [fuse_votes(tuple(b[i] for b in ballots), self.labels) for i in range(len(X))]

    def classify(self, seqs: Sequence[ProteinSequence]) -> list[Vote]:
        if not seqs:
            return []
        return self.predict(self.vectorize(seqs))

    def error_rate(self, seqs: Sequence[ProteinSequence]) -> float | None:
        """Percentage of misclassified sequences; None for an empty set."""
        if not seqs:
            return None
        votes = self.classify(seqs)
        wrong = sum(v.label != s.family for v, s in zip(votes, seqs))
        return 100.0 * wrong / len(seqs)

    @property
    def trained_databases(self) -> list[str]:
        return [h["name"] for h in self.history]


def fuse_votes(votes: Sequence[str], labels: Sequence[str]) -> Vote:
    """Plurality vote; ties go to the elite's label (``votes[0]``) if it is tied,
    otherwise to the tied label with the lowest dictionary index."""
    counts = Counter(votes)
    top = max(counts.values())
    tied = [lab for lab, c in counts.items() if c == top]
    if len(tied) == 1:
        winner = tied[0]
    elif votes[0] in tied:
        winner = votes[0]
    else:
        winner = min(tied, key=list(labels).index)
    return Vote(winner, tuple(votes))


def predict_ensemble(e: EnsembleModel, v: np.ndarray) -> Vote:
    return e.predict(np.atleast_2d(v))[0]


# -- training phase ----------------------------------------------------------

@dataclass
class PopulationMember:
    index: int  # position in the population (0-based)
    seed: int
    permutation: np.ndarray
    model: FuzzyArtmap
    result: TrainResult


def train_population(X: np.ndarray, y: Sequence[str], cfg: PipelineConfig,
                     labels: list[str] | None = None) -> list[PopulationMember]:
    """Train ``cfg.population_size`` models, model k on a permutation seeded by ``cfg.seed + k``."""
    if len(X) == 0:
        raise ValueError("training set is empty")
    if labels is None:
        labels = list(dict.fromkeys(y))
    y = list(y)
    out = []
    for k in range(cfg.population_size):
        seed = cfg.seed + k
        perm = np.random.default_rng(seed).permutation(len(X))
        model = cfg.new_model(labels)
        result = model.train_epochs(X[perm], [y[i] for i in perm], cfg.max_epochs)
        out.append(PopulationMember(k, seed, perm, model, result))
    return out


@dataclass
class Ranked:
    rank: int  # 1 = elite
    member: PopulationMember
    error: float  # validation error fraction
    predictions: list[str]


def rank_by_validation(population: Sequence[PopulationMember], Xv: np.ndarray,
                       yv: Sequence[str]) -> list[Ranked]:
    """Sort by validation error, ties by population index."""
    if len(Xv) == 0:
        raise ValueError("validation set is empty")
    scored = []
    for m in population:
        preds = m.model.predict_many(Xv)
        err = sum(p != t for p, t in zip(preds, yv)) / len(yv)
        scored.append((err, m.index, m, preds))
    scored.sort(key=lambda t: (t[0], t[1]))
    return [Ranked(r, m, err, preds) for r, (err, _, m, preds) in enumerate(scored, start=1)]


def analyze_agreement(ranked: Sequence[Ranked], labels: Sequence[str],
                      pool_size: int = 15) -> list[Candidate]:
    """Kappa of ranks 2..pool_size against the elite's validation predictions."""
    if len(ranked) < ENSEMBLE_SIZE:
        raise ValueError(f"need at least {ENSEMBLE_SIZE} ranked models, got {len(ranked)}")
    if len(ranked) < pool_size:
        log.warning("only %d models available; candidate pool shrinks to %d",
                    len(ranked), len(ranked) - 1)
        pool_size = len(ranked)
    elite = ranked[0].predictions
    return [
        Candidate(r.rank, r.error, kappa(build_error_matrix(elite, r.predictions, labels)))
        for r in ranked[1:pool_size]
    ]


def select_members(pool: Sequence[Candidate], ga: GaConfig) -> GaResult:
    return evolve(pool, ga)


@dataclass
class BuildResult:
    ensemble: EnsembleModel
    population: list[PopulationMember]
    ranking: list[Ranked]
    pool: list[Candidate]
    ga: GaResult

    def ranking_tsv(self) -> str:
        """Table-4 style report: validation error and kappa for the ranked pool."""
        kap = {c.index: c.kap for c in self.pool}
        chosen = set(self.ga.genes)
        lines = ["# artmap-seq ranking v1",
                 "rank\tpopulation_index\tval_error_pct\tkappa\tcategories\tepochs\tselected"]
        for r in self.ranking[:len(self.pool) + 1]:
            k = "Elite" if r.rank == 1 else f"{kap[r.rank]:.4f}"
            sel = "elite" if r.rank == 1 else ("yes" if r.rank in chosen else "no")
            lines.append(f"{r.rank}\t{r.member.index}\t{100 * r.error:.4f}\t{k}\t"
                         f"{r.member.model.n_categories}\t{r.member.result.epochs}\t{sel}")
        return "\n".join(lines) + "\n"


def build_ensemble_from_vectors(X, y, Xv, yv, normalizer: NormalizationParams,
                                cfg: PipelineConfig,
                                hydropathy: HydropathyTable = DEFAULT_HYDROPATHY) -> BuildResult:
    labels = list(dict.fromkeys(list(y)))
    population = train_population(X, y, cfg, labels)
    ranked = rank_by_validation(population, Xv, yv)
    pool = analyze_agreement(ranked, labels, cfg.candidate_pool)
    ga = select_members(pool, replace(cfg.ga, seed=cfg.seed))
    by_rank = {r.rank: r for r in ranked}
    chosen = [by_rank[g] for g in ga.genes]
    elite = ranked[0]
    provenance = {
        "seed": cfg.seed,
        "config": {
            "population_size": cfg.population_size, "candidate_pool": cfg.candidate_pool,
            "rho": cfg.rho, "alpha": cfg.alpha, "eps_mt": cfg.eps_mt, "max_epochs": cfg.max_epochs,
            "ga": {"population": cfg.ga.population, "generations": cfg.ga.generations,
                   "crossover_rate": cfg.ga.crossover_rate, "mutation_rate": cfg.ga.mutation_rate,
                   "lambda": cfg.ga.lam},
        },
        "population_seeds": [m.seed for m in population],
        "voters": [
            {"rank": r.rank, "population_index": r.member.index, "seed": r.member.seed,
             "val_error": r.error, "permutation": r.member.permutation.tolist()}
            for r in [elite, *chosen]
        ],
        "ga_fitness": ga.fitness,
    }
    ensemble = EnsembleModel(
        elite=elite.member.model,
        members=[r.member.model for r in chosen],
        normalizer=normalizer,
        labels=labels,
        hydropathy=hydropathy,
        provenance=provenance,
    )
    return BuildResult(ensemble, population, ranked, pool, ga)


def build_ensemble(train: Sequence[ProteinSequence], val: Sequence[ProteinSequence],
                   cfg: PipelineConfig = PipelineConfig(),
                   hydropathy: HydropathyTable = DEFAULT_HYDROPATHY,
                   name: str = "D1", source: str | None = None) -> BuildResult:
    """Vectorize, fit the normalizer on ``train``, and run the full training phase."""
    _require_labels(train)
    _require_labels(val)
    raw = vectorize_many(train, hydropathy)
    normalizer = fit_normalizer(raw)
    X = normalize(raw, normalizer)
    Xv = normalize(vectorize_many(val, hydropathy), normalizer)
    result = build_ensemble_from_vectors(
        X, [s.family for s in train], Xv, [s.family for s in val], normalizer, cfg, hydropathy)
    result.ensemble.history.append(_history_entry(name, train, source))
    return result


def _require_labels(seqs):
    missing = [s.id for s in seqs if s.family is None]
    if missing:
        raise ValueError(f"{len(missing)} sequence(s) lack a family label, e.g. {missing[0]!r}")


def _history_entry(name, seqs, source):
    entry = {"name": name, "n": len(seqs)}
    if source is not None:
        entry["source"] = source
    return entry


# -- operation phase ---------------------------------------------------------

@dataclass
class IncrementReport:
    name: str
    n_patterns: int
    new_labels: list[str]
    members: list[dict]  # per voter: role, categories before/after, epochs, converged

    def to_tsv(self) -> str:
        lines = ["# artmap-seq increment v1",
                 f"# database {self.name}: {self.n_patterns} patterns",
                 f"# new labels: {','.join(self.new_labels) or '-'}",
                 "voter\tcategories_before\tcategories_after\tnew_categories\tepochs\tconverged"]
        for m in self.members:
            lines.append(f"{m['role']}\t{m['before']}\t{m['after']}\t{m['after'] - m['before']}\t"
                         f"{m['epochs']}\t{'yes' if m['converged'] else 'no'}")
        return "\n".join(lines) + "\n"


def increment_vectors(e: EnsembleModel, X: np.ndarray, y: Sequence[str], seed: int,
                      max_epochs: int = 50, name: str = "increment") -> IncrementReport:
    """Train every voter on its own seeded permutation of already-normalized data."""
    y = list(y)
    new_labels = [lab for lab in dict.fromkeys(y) if lab not in e.labels]
    e.labels.extend(new_labels)
    rows = []
    for k, (role, model) in enumerate(zip(_roles(), e.voters)):
        before = model.n_categories
        perm = np.random.default_rng([seed, k]).permutation(len(X))
        if len(X):
            res = model.incremental_train(X[perm], [y[i] for i in perm], max_epochs)
        else:
            res = TrainResult(0, True, 0, 0)
        rows.append({"role": role, "before": before, "after": model.n_categories,
                     "epochs": res.epochs, "converged": res.converged})
    return IncrementReport(name, len(X), new_labels, rows)


def increment_ensemble(e: EnsembleModel, new_data: Sequence[ProteinSequence], seed: int,
                       max_epochs: int = 50, name: str | None = None,
                       source: str | None = None) -> IncrementReport:
    """Absorb a new labelled database in place; no voter is retrained from scratch.

    New vectors are scaled with the original normalizer (clamped), and unseen
    families are added to the shared label dictionary.
    """
    _require_labels(new_data)
    name = name or f"increment{len(e.history) + 1}"
    X = e.vectorize(new_data) if new_data else np.empty((0, len(e.normalizer.minimum)))
    report = increment_vectors(e, X, [s.family for s in new_data], seed, max_epochs, name)
    e.history.append(_history_entry(name, new_data, source))
    return report


def _roles():
    return ["elite"] + [f"member{k}" for k in range(1, ENSEMBLE_SIZE)]


def evaluate(e: EnsembleModel, databases: DatasetPartition | Mapping[str, Sequence[ProteinSequence]]
             ) -> dict[str, float | None]:
    """Ensemble error percentage on each named set (None when the set is empty)."""
    if isinstance(databases, DatasetPartition):
        databases = databases.databases()
    return {name: e.error_rate(seqs) for name, seqs in databases.items()}


class EvaluationTable:
    """Errors per database (rows) after each training stage (columns).

    Training databases not yet absorbed at a stage are left blank and printed
    as a dash; Dv and Dt are always evaluated.
    """

    def __init__(self, rows: Sequence[str]):
        self.rows = list(rows)
        self.stages: list[str] = []
        self.cells: dict[tuple[str, str], float | None] = {}

    def add_stage(self, stage: str, e: EnsembleModel,
                  databases: Mapping[str, Sequence[ProteinSequence]]) -> dict[str, float | None]:
        trained = set(e.trained_databases)
        done = {}
        for name in self.rows:
            if name in (VALIDATION, TEST) or name in trained:
                done[name] = e.error_rate(databases.get(name, []))
            else:
                done[name] = None
        self.stages.append(stage)
        for name, val in done.items():
            self.cells[(name, stage)] = val
        return done

    def column(self, stage: str) -> dict[str, float | None]:
        return {r: self.cells.get((r, stage)) for r in self.rows}

    def to_tsv(self) -> str:
        lines = ["# artmap-seq evaluation v1", "set\t" + "\t".join(self.stages)]
        for r in self.rows:
            vals = [self.cells.get((r, s)) for s in self.stages]
            lines.append(r + "\t" + "\t".join("-" if v is None else f"{v:.2f}" for v in vals))
        return "\n".join(lines) + "\n"


@dataclass
class ExperimentResult:
    build: BuildResult
    increments: list[IncrementReport]
    table: EvaluationTable


def run_experiment(partition: DatasetPartition, cfg: PipelineConfig = PipelineConfig(),
                   hydropathy: HydropathyTable = DEFAULT_HYDROPATHY,
                   max_increment_epochs: int = 50) -> ExperimentResult:
    """Train on the first database, then increment through the rest, evaluating after each stage."""
    dbs = partition.databases()
    table = EvaluationTable(partition.names + [VALIDATION, TEST])
    build = build_ensemble(partition.train_databases[0], partition.validation, cfg,
                           hydropathy, name=partition.names[0])
    e = build.ensemble
    table.add_stage("Train 1", e, dbs)
    reports = []
    for k, (name, seqs) in enumerate(zip(partition.names[1:], partition.train_databases[1:]), start=2):
        reports.append(increment_ensemble(e, seqs, seed=cfg.seed + 1000 * k,
                                          max_epochs=max_increment_epochs, name=name))
        table.add_stage(f"Train {k}", e, dbs)
    return ExperimentResult(build, reports, table)
