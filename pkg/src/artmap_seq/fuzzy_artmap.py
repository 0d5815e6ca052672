"""Fuzzy ARTMAP classifier with fast learning and match tracking.

The simplified classification variant: each committed ARTa category maps to
exactly one class label, so the map field reduces to a category -> label
table. Categories are hyperboxes stored as complement-coded weights.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ModelError

log = logging.getLogger(__name__)

FORMAT_VERSION = 1


def complement_code(a: np.ndarray) -> np.ndarray:
    """Return ``(a, 1 - a)``; works row-wise on 2-D input."""
    a = np.asarray(a, dtype=float)
    if np.any(a < 0.0) or np.any(a > 1.0) or np.any(np.isnan(a)):
        raise ModelError("complement coding needs inputs in [0, 1]; normalize first")
    return np.concatenate([a, 1.0 - a], axis=-1)


def choice(I: np.ndarray, w: np.ndarray, alpha: float) -> float:
    return float(np.minimum(I, w).sum() / (alpha + w.sum()))


def match(I: np.ndarray, w: np.ndarray, M: int) -> float:
    return float(np.minimum(I, w).sum() / M)


@dataclass
class TrainEvent:
    """What one pattern presentation did to the model."""

    action: str  # "created" or "updated"
    category: int
    resets: int  # categories skipped for failing vigilance
    match_tracks: int  # label conflicts that raised vigilance


@dataclass
class TrainResult:
    epochs: int
    converged: bool
    new_categories: int
    training_errors: int


class FuzzyArtmap:
    """Fuzzy ARTMAP with beta = 1.

    Parameters
    ----------
    rho : float
        Baseline vigilance in [0, 1]. Higher values give more, smaller categories.
    alpha : float
        Choice parameter (small, positive).
    eps_mt : float
        Amount by which match tracking raises vigilance above the failed match.
    labels : list of str, optional
        Label dictionary (class id = list position). Pass the same list object
        to several models to make them share one dictionary.
    """

    beta = 1.0

    def __init__(self, rho=0.75, alpha=0.001, eps_mt=0.001, labels=None, n_features=None):
        if not 0.0 <= rho <= 1.0:
            raise ModelError("rho must lie in [0, 1]")
        if alpha <= 0 or eps_mt <= 0:
            raise ModelError("alpha and eps_mt must be positive")
        self.rho = float(rho)
        self.alpha = float(alpha)
        self.eps_mt = float(eps_mt)
        self.labels: list[str] = labels if labels is not None else []
        self.n_features = n_features
        self._w = np.empty((0, 0))
        self._w_norm = np.empty(0)
        self._cat_label = np.empty(0, dtype=np.int64)
        self._n = 0

    # -- state ---------------------------------------------------------------

    @property
    def n_categories(self) -> int:
        return self._n

    @property
    def weights(self) -> np.ndarray:
        return self._w[:self._n]

    @property
    def category_labels(self) -> np.ndarray:
        return self._cat_label[:self._n]

    def label_id(self, label: str, register: bool = True) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            if not register:
                raise ModelError(f"unknown label {label!r}") from None
            self.labels.append(label)
            return len(self.labels) - 1

    def _check_input(self, I: np.ndarray) -> int:
        if I.ndim != 1 or I.size % 2:
            raise ModelError("expected a 1-D complement-coded vector")
        M = I.size // 2
        if self.n_features is None:
            self.n_features = M
        elif M != self.n_features:
            raise ModelError(f"expected {2 * self.n_features} inputs, got {I.size}")
        return M

    def _commit(self, I: np.ndarray, label_id: int) -> int:
        if self._n == len(self._w):
            grow = max(16, len(self._w))
            self._w = np.vstack([self._w.reshape(len(self._w), I.size), np.ones((grow, I.size))])
            self._w_norm = np.concatenate([self._w_norm, np.zeros(grow)])
            self._cat_label = np.concatenate([self._cat_label, np.zeros(grow, dtype=np.int64)])
        j = self._n
        self._w[j] = I
        self._w_norm[j] = I.sum()
        self._cat_label[j] = label_id
        self._n += 1
        return j

    # -- learning ------------------------------------------------------------

    def train_pattern(self, I: np.ndarray, label: str) -> TrainEvent:
        """Present one complement-coded pattern with its label.

        Categories are visited in decreasing choice order (ties: lowest index).
        A category failing vigilance is skipped. A passing category with the
        wrong label triggers match tracking: vigilance rises to its match plus
        ``eps_mt`` and the search continues. If nothing resonates, a new
        category ``w = I`` is committed.
        """
        I = np.asarray(I, dtype=float)
        M = self._check_input(I)
        target = self.label_id(label)
        rho = self.rho
        resets = tracks = 0
        if self._n:
            W = self._w[:self._n]
            S = np.minimum(I, W).sum(axis=1)
            T = S / (self.alpha + self._w_norm[:self._n])
            for j in np.argsort(-T, kind="stable"):
                m = S[j] / M
                if m < rho:
                    resets += 1
                    continue
                if self._cat_label[j] == target:
                    np.minimum(W[j], I, out=W[j])
                    self._w_norm[j] = W[j].sum()
                    return TrainEvent("updated", int(j), resets, tracks)
                tracks += 1
                rho = m + self.eps_mt
        j = self._commit(I, target)
        return TrainEvent("created", j, resets, tracks)

    def train_epochs(self, X: np.ndarray, y: Sequence[str], max_epochs: int = 50) -> TrainResult:
        """Repeat full passes over ``(X, y)`` until the training set is recalled perfectly.

        ``X`` holds normalized (not complement-coded) vectors. Existing
        categories are kept, so this is also the incremental training entry point.
        """
        X = np.asarray(X, dtype=float)
        if len(X) != len(y):
            raise ModelError("X and y differ in length")
        start = self._n
        if len(X) == 0:
            return TrainResult(0, True, 0, 0)
        coded = complement_code(X)
        errors = len(X)
        epoch = 0
        for epoch in range(1, max_epochs + 1):
            for I, label in zip(coded, y):
                self.train_pattern(I, label)
            errors = sum(p != t for p, t in zip(self._predict_coded(coded), y))
            if errors == 0:
                break
        converged = errors == 0
        if not converged:
            log.warning("training error %d/%d after %d epochs", errors, len(X), epoch)
        return TrainResult(epoch, converged, self._n - start, errors)

    incremental_train = train_epochs

    # -- recall --------------------------------------------------------------

    def _winners(self, coded: np.ndarray) -> np.ndarray:
        if self._n == 0:
            raise ModelError("model has no categories")
        W = self._w[:self._n]
        denom = self.alpha + self._w_norm[:self._n]
        out = np.empty(len(coded), dtype=np.int64)
        for i, I in enumerate(coded):
            out[i] = np.argmax(np.minimum(I, W).sum(axis=1) / denom)
        return out

    def _predict_coded(self, coded: np.ndarray) -> list[str]:
        ids = self._cat_label[self._winners(coded)]
        return [self.labels[k] for k in ids]

    def predict(self, v: np.ndarray) -> str:
        """Label of the highest-choice category; no vigilance gate."""
        return self.predict_many(np.atleast_2d(v))[0]

    def predict_many(self, X: np.ndarray) -> list[str]:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return self._predict_coded(complement_code(X))

    # -- serialization -------------------------------------------------------

    def to_dict(self, include_labels: bool = True) -> dict:
        d = {
            "format_version": FORMAT_VERSION,
            "rho": self.rho,
            "alpha": self.alpha,
            "beta": self.beta,
            "eps_mt": self.eps_mt,
            "n_features": self.n_features,
            "categories": [
                {"label": int(k), "weight": w.tolist()}
                for w, k in zip(self.weights, self.category_labels)
            ],
        }
        if include_labels:
            d["labels"] = list(self.labels)
        return d

    @classmethod
    def from_dict(cls, d: dict, labels: list[str] | None = None) -> "FuzzyArtmap":
        if d.get("format_version") != FORMAT_VERSION:
            raise ModelError(f"unsupported model format_version {d.get('format_version')!r}")
        if d.get("beta") != 1.0:
            raise ModelError("beta must be 1 (fast learning)")
        if labels is None:
            labels = list(d["labels"])
        model = cls(d["rho"], d["alpha"], d["eps_mt"], labels=labels, n_features=d["n_features"])
        for k, cat in enumerate(d["categories"]):
            w = np.asarray(cat["weight"], dtype=float)
            if model.n_features is None or w.shape != (2 * model.n_features,):
                raise ModelError(f"category {k}: weight length must be 2M")
            if np.any(w < 0) or np.any(w > 1):
                raise ModelError(f"category {k}: weight outside [0, 1]")
            if not 0 <= cat["label"] < len(labels):
                raise ModelError(f"category {k}: label id {cat['label']} not in label dictionary")
            model._commit(w, int(cat["label"]))
        return model
