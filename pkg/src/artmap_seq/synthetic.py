"""Synthetic protein families for desk-scale experiments.

Each family is a first-order Markov chain over the 20 residues whose
transition matrix mixes a shared background with a family-specific one.
``separation`` is the weight of the family-specific part: 0 makes all
families identical, 1 makes them as distinct as their random profiles.

Members are not drawn independently: every family has a few ancestral
sequences (subfamilies) sampled from its chain, and each member is an
ancestor with point substitutions (rate ``divergence``, replacement residues
from the shared background) and a random trim at both ends. This mimics
the homology structure of real families, where extra training data covers
more of the family's variants.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from .sequence_io import ALPHABET, TABLE2_COUNTS, ProteinSequence

_LETTERS = np.array(list(ALPHABET))


def _random_chain(rng: np.random.Generator, concentration: float) -> np.ndarray:
    return rng.dirichlet(np.full(20, concentration), size=20)


def generate_families(
    counts: Mapping[str, int] | None = None,
    seed: int = 0,
    separation: float = 0.2,
    subfamilies: int = 8,
    divergence: float = 0.4,
    mean_length: int = 300,
    length_sd: int = 60,
    min_length: int = 40,
    max_length: int = 600,
) -> list[ProteinSequence]:
    """Generate ``counts[family]`` sequences per family, grouped by family.

    Defaults to the per-family totals of the GPCR split. Ids are
    ``<family-slug>_<n>``, so corpora from different seeds share ids.
    """
    if counts is None:
        counts = {fam: sum(row) for fam, row in TABLE2_COUNTS.items()}
    if not 0.0 <= separation <= 1.0:
        raise ValueError("separation must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    background = _random_chain(rng, 5.0)
    bg_freq = background.mean(axis=0)
    out = []
    for family, n in counts.items():
        chain = (1 - separation) * background + separation * _random_chain(rng, 0.5)
        cum = np.cumsum(chain, axis=1)
        cum[:, -1] = 1.0
        start = rng.dirichlet(np.ones(20))
        ancestors = []
        for _ in range(subfamilies):
            length = int(np.clip(round(rng.normal(mean_length, length_sd)), min_length, max_length))
            ancestors.append(_walk(cum, start, length, rng))
        slug = family.replace(" ", "").replace("/", "")
        for i in range(n):
            codes = ancestors[rng.integers(subfamilies)].copy()
            hit = rng.random(len(codes)) < divergence
            codes[hit] = rng.choice(20, size=int(hit.sum()), p=bg_freq)
            trim = len(codes) // 20
            lo, hi = rng.integers(0, trim + 1, size=2)
            codes = codes[lo:len(codes) - hi]
            out.append(ProteinSequence(f"{slug}_{i + 1}", "".join(_LETTERS[codes]), family))
    return out


def _walk(cum: np.ndarray, start: np.ndarray, length: int, rng: np.random.Generator) -> np.ndarray:
    draws = rng.random(length)
    codes = np.empty(length, dtype=np.int64)
    codes[0] = rng.choice(20, p=start)
    for t in range(1, length):
        codes[t] = np.searchsorted(cum[codes[t - 1]], draws[t], side="right")
    return codes
