"""Genetic-algorithm choice of ensemble members trading error against agreement.

Fitness of a 4-member selection is ``lambda * sum(kappa) + sum(eps)``
(lower is better): accurate members that disagree with the elite win.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

N_GENES = 4


@dataclass(frozen=True)
class Candidate:
    index: int  # rank in the validation-sorted population (elite = 1)
    eps: float  # validation error fraction
    kap: float  # kappa against the elite

    def __post_init__(self):
        if not 0.0 <= self.eps <= 1.0:
            raise ValueError(f"candidate {self.index}: eps {self.eps} outside [0, 1]")


@dataclass(frozen=True)
class GaConfig:
    population: int = 30
    generations: int = 50
    crossover_rate: float = 0.8
    mutation_rate: float = 0.4
    lam: float = 1.0
    seed: int = 0

    def __post_init__(self):
        for name in ("crossover_rate", "mutation_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.population < 2:
            raise ValueError("GA population must be >= 2")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")


@dataclass
class GaResult:
    genes: tuple[int, ...]  # candidate indices, ascending
    fitness: float
    history: list[float]  # best-so-far fitness, one entry per generation (0 = initial)
    trace: list[tuple[int, float, tuple[int, ...]]] = field(default_factory=list)

    def log_tsv(self) -> str:
        lines = ["# artmap-seq ga-log v1", "generation\tbest_fitness\tgenes"]
        for gen, fit, genes in self.trace:
            lines.append(f"{gen}\t{fit:.6f}\t{','.join(map(str, genes))}")
        return "\n".join(lines) + "\n"


def fitness(genes: Sequence[int], pool: Sequence[Candidate], lam: float = 1.0) -> float:
    if len(set(genes)) != len(genes):
        raise ValueError(f"duplicate genes in {tuple(genes)}")
    by_index = {c.index: c for c in pool}
    try:
        chosen = [by_index[g] for g in genes]
    except KeyError as exc:
        raise ValueError(f"gene {exc.args[0]} not in pool") from None
    return lam * sum(c.kap for c in chosen) + sum(c.eps for c in chosen)


def _repair(genes: list[int], n: int, rng: np.random.Generator) -> list[int]:
    seen: set[int] = set()
    dup_slots = []
    for k, g in enumerate(genes):
        if g in seen:
            dup_slots.append(k)
        seen.add(g)
    for k in dup_slots:
        unused = [i for i in range(n) if i not in seen]
        genes[k] = unused[rng.integers(len(unused))]
        seen.add(genes[k])
    return genes


def _mutate(genes: list[int], n: int, rate: float, rng: np.random.Generator) -> list[int]:
    for k in range(len(genes)):
        if rng.random() < rate:
            unused = [i for i in range(n) if i not in genes]
            if unused:
                genes[k] = unused[rng.integers(len(unused))]
    return genes


def evolve(pool: Sequence[Candidate], cfg: GaConfig = GaConfig()) -> GaResult:
    """Minimize the selection fitness with an elitist GA.

    Binary tournament selection, single-point crossover followed by repair of
    duplicated genes, per-gene mutation to an unused candidate. The best
    individual is carried over unchanged each generation.
    """
    n = len(pool)
    if n < N_GENES:
        raise ValueError(f"need at least {N_GENES} candidates, got {n}")
    eps = np.array([c.eps for c in pool])
    kap = np.array([c.kap for c in pool])
    idx = [c.index for c in pool]

    def score(g):
        g = list(g)
        return float(cfg.lam * kap[g].sum() + eps[g].sum())

    def as_genes(g):
        return tuple(sorted(idx[i] for i in g))

    rng = np.random.default_rng(cfg.seed)
    pop = [list(rng.choice(n, N_GENES, replace=False)) for _ in range(cfg.population)]
    fit = [score(g) for g in pop]
    b = int(np.argmin(fit))
    best, best_fit = list(pop[b]), fit[b]
    history = [best_fit]
    trace = [(0, best_fit, as_genes(best))]
    if n == N_GENES:
        return GaResult(as_genes(best), best_fit, history, trace)

    def tournament():
        i, j = rng.integers(len(pop), size=2)
        return pop[i] if fit[i] <= fit[j] else pop[j]

    for gen in range(1, cfg.generations + 1):
        nxt = [list(best)]
        while len(nxt) < cfg.population:
            a, c = list(tournament()), list(tournament())
            if rng.random() < cfg.crossover_rate:
                cut = int(rng.integers(1, N_GENES))
                a, c = a[:cut] + c[cut:], c[:cut] + a[cut:]
                a, c = _repair(a, n, rng), _repair(c, n, rng)
            nxt.append(_mutate(a, n, cfg.mutation_rate, rng))
            if len(nxt) < cfg.population:
                nxt.append(_mutate(c, n, cfg.mutation_rate, rng))
        pop = nxt
        fit = [score(g) for g in pop]
        b = int(np.argmin(fit))
        if fit[b] < best_fit:
            best, best_fit = list(pop[b]), fit[b]
        history.append(best_fit)
        trace.append((gen, best_fit, as_genes(best)))
    return GaResult(as_genes(best), best_fit, history, trace)


@dataclass
class ExhaustiveResult:
    genes: tuple[int, ...]
    fitness: float
    ties: list[tuple[int, ...]]  # every selection within tolerance of the optimum
    evaluated: int

    def report_tsv(self, claimed: Sequence[int] | None = None, lam: float = 1.0,
                   pool: Sequence[Candidate] | None = None) -> str:
        lines = ["# artmap-seq exhaustive-selection v1",
                 f"# combinations evaluated: {self.evaluated}",
                 f"# optimum fitness: {self.fitness:.6f}",
                 f"# tied optima: {len(self.ties)}"]
        if claimed is not None and pool is not None:
            f = fitness(claimed, pool, lam)
            tag = "tied-optimal" if tuple(sorted(claimed)) in self.ties else "not optimal"
            lines.append(f"# selection {','.join(map(str, sorted(claimed)))}: fitness {f:.6f} ({tag})")
        lines.append("rank\tgenes\tfitness")
        for k, g in enumerate(self.ties, start=1):
            lines.append(f"{k}\t{','.join(map(str, g))}\t{self.fitness:.6f}")
        return "\n".join(lines) + "\n"


def exhaustive_best(pool: Sequence[Candidate], lam: float = 1.0, tol: float = 1e-9,
                    limit: int = 10**6) -> ExhaustiveResult:
    """Minimize the fitness by enumerating every 4-subset.

    Ties (within ``tol``) go to the lexicographically smallest gene set; all
    tied selections are reported.
    """
    pool = sorted(pool, key=lambda c: c.index)
    n = len(pool)
    if n < N_GENES:
        raise ValueError(f"need at least {N_GENES} candidates, got {n}")
    total = math.comb(n, N_GENES)
    if total > limit:
        raise ValueError(f"{total} combinations exceed the enumeration limit; use evolve()")
    scores = np.array([lam * c.kap + c.eps for c in pool])
    combos = list(itertools.combinations(range(n), N_GENES))
    values = np.array([scores[list(g)].sum() for g in combos])
    best = float(values.min())
    ties = [tuple(pool[i].index for i in g) for g, v in zip(combos, values) if v <= best + tol]
    return ExhaustiveResult(ties[0], best, ties, total)


# Validation error (%) and kappa vs. the elite for the 15 top-ranked classifiers
# of the GPCR experiment; rank 1 is the elite.
TABLE4 = [
    (1, 27.0833, None),
    (2, 29.1667, 0.8940),
    (3, 29.1667, 0.9730),
    (4, 29.1667, 0.8438),
    (5, 31.2500, 0.8929),
    (6, 31.2500, 0.8929),
    (7, 31.2500, 0.8929),
    (8, 31.2500, 0.8455),
    (9, 31.2500, 0.8683),
    (10, 31.2500, 0.8929),
    (11, 31.2500, 0.8929),
    (12, 31.2500, 0.8929),
    (13, 31.2500, 0.8929),
    (14, 31.2500, 0.8430),
    (15, 33.3333, 0.8430),
]
TABLE4_SELECTION = (2, 3, 4, 12)


def table4_pool() -> list[Candidate]:
    return [Candidate(i, err / 100.0, k) for i, err, k in TABLE4 if k is not None]
