"""Error matrices between two classifiers and the kappa agreement statistic."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class ErrorMatrix:
    """``counts[i, j]``: patterns classifier A put in class i and classifier B in class j."""

    counts: np.ndarray
    classes: tuple

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def row_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_totals(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    def to_tsv(self, name_a="Classifier 1", name_b="Classifier 2") -> str:
        lines = ["# artmap-seq error-matrix v1", f"{name_a} \\ {name_b}\t" + "\t".join(map(str, self.classes)) + "\tTotals"]
        for c, row, tot in zip(self.classes, self.counts, self.row_totals):
            lines.append(f"{c}\t" + "\t".join(str(int(x)) for x in row) + f"\t{int(tot)}")
        lines.append("Totals\t" + "\t".join(str(int(x)) for x in self.col_totals) + f"\t{self.n}")
        return "\n".join(lines) + "\n"


def build_error_matrix(preds_a: Sequence, preds_b: Sequence, classes: Sequence) -> ErrorMatrix:
    if len(preds_a) != len(preds_b):
        raise ValueError(f"prediction lists differ in length ({len(preds_a)} vs {len(preds_b)})")
    index = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for a, b in zip(preds_a, preds_b):
        try:
            counts[index[a], index[b]] += 1
        except KeyError as exc:
            raise ValueError(f"label {exc.args[0]!r} not in class list") from None
    return ErrorMatrix(counts, tuple(classes))


def kappa(m: ErrorMatrix) -> float:
    """Chance-corrected agreement ``(N*theta1 - theta2) / (N**2 - theta2)``.

    ``theta1`` is the trace and ``theta2`` the sum of row-total x column-total
    products. When both classifiers output one constant class the denominator
    vanishes; that case returns 1.0 if they agree on every pattern, else 0.0.
    """
    n = m.n
    if n == 0:
        raise ValueError("kappa of an empty error matrix is undefined")
    theta1 = int(np.trace(m.counts))
    theta2 = int(m.row_totals @ m.col_totals)
    denom = n * n - theta2
    if denom == 0:
        return 1.0 if theta1 == n else 0.0
    return (n * theta1 - theta2) / denom


def kappa_between(preds_a: Sequence, preds_b: Sequence, classes: Sequence) -> float:
    return kappa(build_error_matrix(preds_a, preds_b, classes))
