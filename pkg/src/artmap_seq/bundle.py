"""Versioned JSON bundles for single models and whole ensembles.

An ensemble bundle is written one top-level key per line, so the first line
always carries the format name and version.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .ensemble import ENSEMBLE_SIZE, EnsembleModel
from .errors import BundleError, FeatureError, ModelError
from .features import HydropathyTable, NormalizationParams
from .fuzzy_artmap import FuzzyArtmap

ENSEMBLE_FORMAT = "artmap-seq/ensemble"
MODEL_FORMAT = "artmap-seq/model"
BUNDLE_VERSION = 1


def _lines(header: dict, body: dict) -> str:
    head = json.dumps(header)[:-1]
    rows = [f"{json.dumps(k)}: {json.dumps(v)}" for k, v in body.items()]
    return head + ",\n" + ",\n".join(rows) + "}\n"


def dumps_model(model: FuzzyArtmap) -> str:
    d = model.to_dict()
    return _lines({"format": MODEL_FORMAT, "bundle_version": BUNDLE_VERSION}, d)


def loads_model(text: str) -> FuzzyArtmap:
    d = _load_json(text, MODEL_FORMAT)
    try:
        return FuzzyArtmap.from_dict(d)
    except (KeyError, TypeError, ModelError) as exc:
        raise BundleError(f"invalid model: {exc}") from exc


def dumps_ensemble(e: EnsembleModel) -> str:
    body = {
        "labels": e.labels,
        "hydropathy": dict(e.hydropathy.mapping),
        "normalizer": e.normalizer.to_dict(),
        "provenance": e.provenance,
        "history": e.history,
    }
    for role, m in zip(["elite"] + [f"member{k}" for k in range(1, ENSEMBLE_SIZE)], e.voters):
        body[role] = m.to_dict(include_labels=False)
    return _lines({"format": ENSEMBLE_FORMAT, "bundle_version": BUNDLE_VERSION}, body)


def loads_ensemble(text: str) -> EnsembleModel:
    d = _load_json(text, ENSEMBLE_FORMAT)
    try:
        labels = list(d["labels"])
        if len(set(labels)) != len(labels):
            raise BundleError("label dictionary has duplicates")
        hydropathy = HydropathyTable(d["hydropathy"])
        normalizer = NormalizationParams.from_dict(d["normalizer"])
        roles = ["elite"] + [f"member{k}" for k in range(1, ENSEMBLE_SIZE)]
        missing = [r for r in roles if r not in d]
        if missing:
            raise BundleError(f"ensemble must have {ENSEMBLE_SIZE} voters; missing {', '.join(missing)}")
        voters = []
        for role in roles:
            try:
                m = FuzzyArtmap.from_dict(d[role], labels=labels)
            except ModelError as exc:
                raise BundleError(f"{role}: {exc}") from exc
            if m.n_features != len(normalizer.minimum):
                raise BundleError(f"{role}: feature count {m.n_features} does not match the normalizer")
            voters.append(m)
        return EnsembleModel(voters[0], voters[1:], normalizer, labels, hydropathy,
                             d.get("provenance", {}), list(d.get("history", [])))
    except (KeyError, TypeError) as exc:
        raise BundleError(f"malformed ensemble bundle: missing or bad field {exc}") from exc
    except (FeatureError, ModelError) as exc:
        raise BundleError(str(exc)) from exc


def _load_json(text: str, expected: str) -> dict:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BundleError(f"not valid JSON: {exc}") from exc
    if not isinstance(d, dict) or d.get("format") != expected:
        raise BundleError(f"expected a {expected} bundle")
    if d.get("bundle_version") != BUNDLE_VERSION:
        raise BundleError(
            f"bundle version {d.get('bundle_version')!r} is not supported (expected {BUNDLE_VERSION})")
    return d


def save_ensemble(e: EnsembleModel, path: str | Path) -> None:
    Path(path).write_text(dumps_ensemble(e), encoding="utf-8")


def load_ensemble(path: str | Path) -> EnsembleModel:
    path = Path(path)
    if not path.exists():
        raise BundleError(f"no such bundle: {path}")
    return loads_ensemble(path.read_text(encoding="utf-8"))


def weights_equal(a: FuzzyArtmap, b: FuzzyArtmap) -> bool:
    return (a.n_categories == b.n_categories
            and np.array_equal(a.weights, b.weights)
            and np.array_equal(a.category_labels, b.category_labels))
