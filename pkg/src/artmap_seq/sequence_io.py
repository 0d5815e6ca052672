"""Reading, filtering and partitioning protein sequences."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import FastaParseError, InsufficientSequencesError

log = logging.getLogger(__name__)

ALPHABET = "ACDEFGHIKLMNPQRSTVWY"
_ALPHABET_SET = frozenset(ALPHABET)
_FAMILY_TOKEN = re.compile(r"^family=(.+)$")

VALIDATION = "Dv"
TEST = "Dt"

# Per-family counts of the GPCR experiment: D1, Dv, D2..D6, Dt.
TABLE2_DATABASES = ("D1", "Dv", "D2", "D3", "D4", "D5", "D6", "Dt")
TABLE2_COUNTS = {
    "Type 1": (32, 10, 43, 43, 43, 43, 43, 43),
    "Type 2": (23, 8, 30, 30, 30, 30, 30, 30),
    "Type 3": (16, 6, 22, 22, 22, 22, 22, 22),
    "Type 4": (6, 2, 9, 9, 8, 8, 8, 8),
    "Fz/Smo": (12, 4, 16, 15, 16, 16, 16, 16),
    "MLO": (3, 1, 4, 5, 5, 5, 5, 4),
    "Class H": (32, 11, 43, 43, 43, 43, 43, 43),
    "Pheromone 2": (20, 6, 26, 26, 26, 26, 27, 27),
}


@dataclass(frozen=True)
class ProteinSequence:
    id: str
    residues: str
    family: str | None = None

    def __len__(self):
        return len(self.residues)


@dataclass(frozen=True)
class Rejection:
    sequence: ProteinSequence
    reason: str  # first offending character, or "empty"


@dataclass
class DatasetPartition:
    """Training databases D1..Dk plus the validation and test sets.

    ``names`` holds the database labels in training order (``D1``, ``D2``...).
    """

    train_databases: list[list[ProteinSequence]]
    validation: list[ProteinSequence]
    test: list[ProteinSequence]
    names: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.names:
            self.names = [f"D{k + 1}" for k in range(len(self.train_databases))]
        if len(self.names) != len(self.train_databases):
            raise ValueError("one name per training database is required")

    def databases(self) -> dict[str, list[ProteinSequence]]:
        """All sets keyed by name, training databases first, then Dv and Dt."""
        out = dict(zip(self.names, self.train_databases))
        out[VALIDATION] = self.validation
        out[TEST] = self.test
        return out


def parse_fasta(data: bytes | str, source: str | None = None) -> list[ProteinSequence]:
    """Parse FASTA text into sequences.

    The first whitespace-delimited header token is the id; a ``family=<name>``
    token anywhere in the header sets the family. Body lines are concatenated,
    stripped of whitespace and upper-cased.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    records: list[ProteinSequence] = []
    header: str | None = None
    chunks: list[str] = []
    folded = 0

    def flush():
        nonlocal folded
        if header is None:
            return
        tokens = header.split()
        if not tokens:
            raise FastaParseError("empty header", line=header_line, source=source)
        family = None
        for tok in tokens[1:]:
            m = _FAMILY_TOKEN.match(tok)
            if m:
                family = m.group(1).replace("_", " ")
        body = "".join(chunks)
        upper = body.upper()
        if upper != body:
            folded += 1
        records.append(ProteinSequence(id=tokens[0], residues=upper, family=family))

    header_line = 0
    for lineno, line in enumerate(data.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith(">"):
            flush()
            header, header_line, chunks = stripped[1:], lineno, []
        elif not stripped or stripped.startswith(";"):
            continue
        elif header is None:
            raise FastaParseError("sequence data before any '>' header", line=lineno, source=source)
        else:
            chunks.append("".join(stripped.split()))
    flush()
    if folded:
        log.info("upper-cased residues of %d sequence(s)", folded)
    return records


def read_fasta(path: str | Path) -> list[ProteinSequence]:
    path = Path(path)
    return parse_fasta(path.read_bytes(), source=str(path))


def format_fasta(seqs: Iterable[ProteinSequence], width: int = 60) -> str:
    lines = []
    for s in seqs:
        header = ">" + s.id
        if s.family is not None:
            header += " family=" + s.family.replace(" ", "_")
        lines.append(header)
        for i in range(0, len(s.residues), width):
            lines.append(s.residues[i:i + width])
    return "\n".join(lines) + ("\n" if lines else "")


def write_fasta(path: str | Path, seqs: Iterable[ProteinSequence]) -> None:
    Path(path).write_text(format_fasta(seqs), encoding="utf-8")


def embl_to_fasta(text: str) -> str:
    """Minimal EMBL/UniProt flat-file conversion: only ID and sequence blocks are read."""
    out = []
    ident, block, in_seq = None, [], False
    for line in text.splitlines():
        if line.startswith("ID"):
            ident = line[2:].split()[0].rstrip(";")
        elif line.startswith("SQ"):
            in_seq = True
        elif line.startswith("//"):
            if ident is not None:
                out.append(ProteinSequence(ident, "".join(block).upper()))
            ident, block, in_seq = None, [], False
        elif in_seq and line.startswith("  "):
            block.append("".join(ch for ch in line if ch.isalpha()))
    return format_fasta(out)


def remove_outliers(seqs: Iterable[ProteinSequence]) -> tuple[list[ProteinSequence], list[Rejection]]:
    """Keep sequences made only of the 20 standard residues.

    Any other character (B, Z, X, U, digits, '*') rejects the sequence; the
    rejection records the first offending character.
    """
    kept, rejected = [], []
    for s in seqs:
        if not s.residues:
            rejected.append(Rejection(s, "empty"))
            continue
        bad = next((ch for ch in s.residues if ch not in _ALPHABET_SET), None)
        if bad is None:
            kept.append(s)
        else:
            rejected.append(Rejection(s, bad))
    return kept, rejected


def rejection_report(rejected: Sequence[Rejection]) -> str:
    lines = ["# artmap-seq rejections v1", "id\tfamily\treason"]
    for r in rejected:
        lines.append(f"{r.sequence.id}\t{r.sequence.family or ''}\t{r.reason}")
    return "\n".join(lines) + "\n"


def split_datasets(
    seqs: Sequence[ProteinSequence],
    counts: Mapping[str, Mapping[str, int]],
    seed: int,
) -> DatasetPartition:
    """Stratified, seeded split into training databases, Dv and Dt.

    ``counts`` maps family -> {database name -> count}. Database names other
    than ``Dv`` and ``Dt`` are training databases, ordered by their first
    appearance (so ``D1, Dv, D2, ..., Dt`` yields D1..D6 in order). Within a
    family, sequences are shuffled with a seed-derived generator and sliced
    in the order: training databases, then Dv, then Dt.
    """
    train_names: list[str] = []
    for per_db in counts.values():
        for name in per_db:
            if name not in (VALIDATION, TEST) and name not in train_names:
                train_names.append(name)
    order = train_names + [VALIDATION, TEST]

    by_family: dict[str, list[ProteinSequence]] = {}
    for s in seqs:
        by_family.setdefault(s.family, []).append(s)

    buckets: dict[str, list[ProteinSequence]] = {name: [] for name in order}
    for fam_idx, (family, per_db) in enumerate(counts.items()):
        pool = by_family.get(family, [])
        need = sum(per_db.values())
        if need > len(pool):
            raise InsufficientSequencesError(family, need - len(pool))
        rng = np.random.default_rng([seed, fam_idx])
        shuffled = [pool[i] for i in rng.permutation(len(pool))]
        pos = 0
        for name in order:
            n = per_db.get(name, 0)
            buckets[name].extend(shuffled[pos:pos + n])
            pos += n

    return DatasetPartition(
        train_databases=[buckets[n] for n in train_names],
        validation=buckets[VALIDATION],
        test=buckets[TEST],
        names=train_names,
    )


def table2_counts(scale: float = 1.0) -> dict[str, dict[str, int]]:
    """Table-2 split counts, optionally scaled (each count rounded, floor 1)."""
    out = {}
    for family, row in TABLE2_COUNTS.items():
        out[family] = {
            name: max(1, int(round(n * scale))) for name, n in zip(TABLE2_DATABASES, row)
        }
    return out


def length_histogram(seqs: Sequence[ProteinSequence], bin_width: int) -> list[tuple[int, int]]:
    """Counts of sequence lengths in bins of ``bin_width`` starting at the shortest length.

    Bins run contiguously up to the one holding the longest sequence; interior
    empty bins are kept with count 0. Each entry is ``(bin lower bound, count)``.
    """
    if bin_width < 1:
        raise ValueError("bin_width must be >= 1")
    if not seqs:
        return []
    lengths = np.array([len(s) for s in seqs])
    lo = lengths.min()
    n_bins = (lengths.max() - lo) // bin_width + 1
    edges = lo + bin_width * np.arange(n_bins)
    counts = np.bincount((lengths - lo) // bin_width, minlength=n_bins)
    return [(int(e), int(c)) for e, c in zip(edges, counts)]


def histogram_report(hist: Sequence[tuple[int, int]], bin_width: int) -> str:
    lines = ["# artmap-seq length-histogram v1", "bin_start\tbin_end\tcount"]
    for start, count in hist:
        lines.append(f"{start}\t{start + bin_width - 1}\t{count}")
    return "\n".join(lines) + "\n"
