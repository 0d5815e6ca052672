"""Global (composition, hydropathy C/T/D) and digram features, plus min-max scaling.

Layout of the 438-long raw vector::

    [0, 20)     residue composition, alphabetical (A, C, D, ..., Y)
    [20, 23)    hydropathy composition (hydrophobic, neutral, polar)
    [23, 26)    hydropathy transitions (polar-neutral, neutral-hydrophobic, polar-hydrophobic)
    [26, 38)    hydropathy distribution at 25/50/75/100% prefixes, prefix-major
    [38, 438)   digram frequencies, lexicographic (AA, AC, ..., YY)
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import FeatureError
from .sequence_io import ALPHABET, ProteinSequence

HYDROPATHY_CLASSES = ("hydrophobic", "neutral", "polar")
TRANSITION_PAIRS = (("polar", "neutral"), ("neutral", "hydrophobic"), ("polar", "hydrophobic"))
CHECKPOINTS = (0.25, 0.5, 0.75, 1.0)

N_COMPOSITION = 20
N_DIGRAMS = 400
N_FEATURES = N_COMPOSITION + 3 + 3 + 12 + N_DIGRAMS

COMPOSITION = slice(0, 20)
HYDRO_C = slice(20, 23)
HYDRO_T = slice(23, 26)
HYDRO_D = slice(26, 38)
DIGRAMS = slice(38, 438)

_CODE = np.full(256, -1, dtype=np.int64)
for _i, _aa in enumerate(ALPHABET):
    _CODE[ord(_aa)] = _i


@dataclass(frozen=True)
class HydropathyTable:
    """Residue -> hydropathy class; must cover all 20 residues."""

    mapping: Mapping[str, str]

    def __post_init__(self):
        missing = [aa for aa in ALPHABET if aa not in self.mapping]
        if missing:
            raise FeatureError(f"hydropathy table missing residues: {''.join(missing)}")
        extra = set(self.mapping) - set(ALPHABET)
        if extra:
            raise FeatureError(f"hydropathy table has unknown residues: {''.join(sorted(extra))}")
        bad = {c for c in self.mapping.values() if c not in HYDROPATHY_CLASSES}
        if bad:
            raise FeatureError(f"unknown hydropathy classes: {sorted(bad)}")

    @property
    def class_codes(self) -> np.ndarray:
        """Class index (into HYDROPATHY_CLASSES) for each residue in alphabet order."""
        return np.array([HYDROPATHY_CLASSES.index(self.mapping[aa]) for aa in ALPHABET])

    @classmethod
    def parse(cls, text: str) -> "HydropathyTable":
        mapping = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise FeatureError(f"hydropathy table line {lineno}: expected '<residue> <class>'")
            residue, klass = parts[0].upper(), parts[1].lower()
            if residue in mapping:
                raise FeatureError(f"hydropathy table line {lineno}: duplicate residue {residue}")
            mapping[residue] = klass
        return cls(mapping)

    @classmethod
    def load(cls, path: str | Path) -> "HydropathyTable":
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def default(cls) -> "HydropathyTable":
        text = resources.files("artmap_seq").joinpath("data/hydropathy.txt").read_text(encoding="utf-8")
        return cls.parse(text)

    def to_text(self) -> str:
        return "".join(f"{aa} {self.mapping[aa]}\n" for aa in ALPHABET)


DEFAULT_HYDROPATHY = HydropathyTable.default()


def encode(seq: ProteinSequence | str) -> np.ndarray:
    """Residue indices (alphabet order). Rejects empty or non-standard input."""
    residues = seq.residues if isinstance(seq, ProteinSequence) else seq
    if not residues:
        raise FeatureError("empty sequence")
    raw = np.frombuffer(residues.encode("ascii", errors="replace"), dtype=np.uint8)
    codes = _CODE[raw]
    if (codes < 0).any():
        bad = residues[int(np.argmax(codes < 0))]
        raise FeatureError(f"non-standard residue {bad!r}")
    return codes


def composition(seq) -> np.ndarray:
    codes = encode(seq)
    return np.bincount(codes, minlength=20) / len(codes)


def _classes(seq, table: HydropathyTable) -> np.ndarray:
    return table.class_codes[encode(seq)]


def hydropathy_composition(seq, table: HydropathyTable = DEFAULT_HYDROPATHY) -> np.ndarray:
    cls = _classes(seq, table)
    return np.bincount(cls, minlength=3) / len(cls)


def hydropathy_transmission(seq, table: HydropathyTable = DEFAULT_HYDROPATHY) -> np.ndarray:
    """Frequencies of class changes between neighbours, in either direction.

    Each count is divided by the number of adjacent pairs (L - 1); a single
    residue gives all zeros.
    """
    cls = _classes(seq, table)
    out = np.zeros(3)
    if len(cls) < 2:
        return out
    a, b = cls[:-1], cls[1:]
    for k, (x, y) in enumerate(TRANSITION_PAIRS):
        xi, yi = HYDROPATHY_CLASSES.index(x), HYDROPATHY_CLASSES.index(y)
        out[k] = np.count_nonzero(((a == xi) & (b == yi)) | ((a == yi) & (b == xi)))
    return out / (len(cls) - 1)


def hydropathy_distribution(seq, table: HydropathyTable = DEFAULT_HYDROPATHY) -> np.ndarray:
    """Class fractions within the leading 25/50/75/100% of the sequence (ceil rounding)."""
    cls = _classes(seq, table)
    n = len(cls)
    out = np.empty(12)
    for k, frac in enumerate(CHECKPOINTS):
        prefix = cls[:math.ceil(frac * n)]
        out[3 * k:3 * k + 3] = np.bincount(prefix, minlength=3) / len(prefix)
    return out


def digrams(seq) -> list[str]:
    residues = seq.residues if isinstance(seq, ProteinSequence) else seq
    return [residues[i:i + 2] for i in range(len(residues) - 1)]


def digram_counts(seq) -> np.ndarray:
    codes = encode(seq)
    out = np.bincount(codes[:-1] * 20 + codes[1:], minlength=400).astype(float)
    return out / max(len(codes) - 1, 1)


def vectorize(seq, table: HydropathyTable = DEFAULT_HYDROPATHY) -> np.ndarray:
    return np.concatenate([
        composition(seq),
        hydropathy_composition(seq, table),
        hydropathy_transmission(seq, table),
        hydropathy_distribution(seq, table),
        digram_counts(seq),
    ])


def vectorize_many(seqs: Iterable, table: HydropathyTable = DEFAULT_HYDROPATHY) -> np.ndarray:
    rows = [vectorize(s, table) for s in seqs]
    if not rows:
        return np.empty((0, N_FEATURES))
    return np.vstack(rows)


def feature_names() -> list[str]:
    names = [f"comp_{aa}" for aa in ALPHABET]
    names += [f"C_{c}" for c in HYDROPATHY_CLASSES]
    names += [f"T_{a}_{b}" for a, b in TRANSITION_PAIRS]
    names += [f"D{int(p * 100)}_{c}" for p in CHECKPOINTS for c in HYDROPATHY_CLASSES]
    names += [f"dg_{a}{b}" for a in ALPHABET for b in ALPHABET]
    return names


@dataclass(frozen=True)
class NormalizationParams:
    minimum: np.ndarray
    maximum: np.ndarray

    def __post_init__(self):
        if self.minimum.shape != self.maximum.shape:
            raise FeatureError("min/max shape mismatch")
        if np.any(self.minimum > self.maximum):
            raise FeatureError("normalizer has min > max")

    def to_dict(self) -> dict:
        return {"min": self.minimum.tolist(), "max": self.maximum.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "NormalizationParams":
        return cls(np.asarray(d["min"], dtype=float), np.asarray(d["max"], dtype=float))


def fit_normalizer(vectors: Sequence[np.ndarray] | np.ndarray) -> NormalizationParams:
    X = np.asarray(vectors, dtype=float)
    if X.ndim != 2 or len(X) == 0:
        raise FeatureError("fit_normalizer needs at least one vector")
    return NormalizationParams(X.min(axis=0), X.max(axis=0))


def normalize(v: np.ndarray, params: NormalizationParams) -> np.ndarray:
    """Min-max scale into [0, 1]; out-of-range values clamp, constant features map to 0.

    Works on a single vector or a 2-D batch.
    """
    v = np.asarray(v, dtype=float)
    span = params.maximum - params.minimum
    degenerate = span == 0
    scaled = (v - params.minimum) / np.where(degenerate, 1.0, span)
    scaled = np.where(degenerate, 0.0, scaled)
    return np.clip(scaled, 0.0, 1.0)


def features_csv(seqs: Sequence[ProteinSequence], X: np.ndarray) -> str:
    buf = io.StringIO()
    buf.write("# artmap-seq features v1\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "family"] + feature_names())
    for s, row in zip(seqs, X):
        w.writerow([s.id, s.family or ""] + [repr(float(x)) for x in row])
    return buf.getvalue()
