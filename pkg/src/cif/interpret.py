"""Temporal importance curves: split gain accumulated over the time points each split's interval covers."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from cif.features import FEATURE_NAMES, N_FEATURES, FeatureId

MEAN_ROW = "mean_curve"


@dataclass(frozen=True)
class TemporalImportanceCurves:
    curves: np.ndarray  # (d, 25, m), bits
    feature_names: tuple[str, ...] = FEATURE_NAMES

    @property
    def n_dims(self) -> int:
        return self.curves.shape[0]

    @property
    def length(self) -> int:
        return self.curves.shape[2]

    @property
    def mean_curve(self) -> np.ndarray:
        """(d, m): mean over the 25 feature curves of each dimension."""
        return self.curves.mean(axis=1)

    def curve(self, feature, dimension: int = 0) -> np.ndarray:
        idx = feature.index if isinstance(feature, FeatureId) else FeatureId(int(feature)).index
        return self.curves[dimension, idx]

    def dimension_mass(self) -> np.ndarray:
        return self.curves.sum(axis=(1, 2))


def temporal_importance(model) -> TemporalImportanceCurves:
    curves = np.zeros((model.n_dims, N_FEATURES, model.length))
    for ft in model.trees:
        a = ft.features.size
        for node in ft.tree.internal:
            att = ft.tree.attribute[node]
            dim, start, length = ft.intervals[att // a]
            curves[dim, ft.features[att % a], start : start + length] += ft.tree.gain[node]
    return TemporalImportanceCurves(curves)


def top_features(curves: TemporalImportanceCurves, v: int = 3, dimension: int | None = None) -> list[FeatureId]:
    """The v features with the largest peak gain, descending; ties go to the lower id.

    Peaks are taken over time and, unless `dimension` is given, over all dimensions.
    """
    if v < 1:
        raise ValueError("v must be at least 1")
    v = min(v, N_FEATURES)
    c = curves.curves if dimension is None else curves.curves[dimension : dimension + 1]
    peak = c.max(axis=(0, 2))
    order = sorted(range(N_FEATURES), key=lambda f: (-peak[f], f))
    return [FeatureId(f) for f in order[:v]]


def write_tic_csv(curves: TemporalImportanceCurves, path, top: int | None = None) -> None:
    """One row per (dimension, feature) plus a `mean_curve` row per dimension.

    The aggregate row is not called `mean` because feature 22 already is.
    With `top`, only the top features (by peak gain over all dimensions) get
    rows; the mean rows always average all 25 curves.
    """
    selected = range(N_FEATURES) if top is None else sorted(f.index for f in top_features(curves, top))
    mean = curves.mean_curve
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["dimension", "feature", *range(curves.length)])
        for d in range(curves.n_dims):
            for f in selected:
                w.writerow([d, curves.feature_names[f], *map(repr, curves.curves[d, f].tolist())])
            w.writerow([d, MEAN_ROW, *map(repr, mean[d].tolist())])


def read_tic_csv(path) -> dict[tuple[int, str], np.ndarray]:
    with open(Path(path), newline="") as fh:
        rows = list(csv.reader(fh))
    return {(int(r[0]), r[1]): np.array([float(x) for x in r[2:]]) for r in rows[1:]}
