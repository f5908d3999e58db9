"""Synthetic labelled problems with known discriminatory structure."""

from __future__ import annotations

import numpy as np

from cif.tsdata import TimeSeriesDataset


def planted_window(
    n: int = 60,
    m: int = 100,
    window: tuple[int, int] = (40, 60),
    shift: float = 2.0,
    n_dims: int = 1,
    informative_dim: int = 0,
    noise: float = 1.0,
    seed: int = 0,
) -> TimeSeriesDataset:
    """Two balanced classes of Gaussian noise; class 1 is raised by `shift` inside [start, end)
    of one dimension and class 0 lowered by the same amount. Nothing else differs."""
    rng = np.random.default_rng(seed)
    y = np.arange(n) % 2
    rng.shuffle(y)
    X = rng.normal(scale=noise, size=(n, n_dims, m))
    start, end = window
    X[:, informative_dim, start:end] += np.where(y == 1, shift, -shift)[:, None]
    return TimeSeriesDataset.from_arrays(X, y, ("neg", "pos"), name="PlantedWindow")


def nearest_centroid_accuracy(data: TimeSeriesDataset) -> float:
    """Leave-one-out nearest-centroid accuracy on the flattened series."""
    X = data.X().reshape(len(data), -1)
    y = data.y()
    hits = 0
    for i in range(len(data)):
        mask = np.arange(len(data)) != i
        centroids = [X[mask & (y == c)].mean(axis=0) for c in range(data.n_classes)]
        hits += int(np.argmin([np.sum((X[i] - c) ** 2) for c in centroids]) == y[i])
    return hits / len(data)


def random_walks(n: int, m: int, n_classes: int = 2, n_dims: int = 1, seed: int = 0) -> TimeSeriesDataset:
    """Unstructured random walks with random labels (used for timing, not accuracy)."""
    rng = np.random.default_rng(seed)
    X = np.cumsum(rng.normal(size=(n, n_dims, m)), axis=2)
    y = rng.integers(0, n_classes, size=n)
    y[:n_classes] = np.arange(n_classes)
    return TimeSeriesDataset.from_arrays(X, y, tuple(f"c{i}" for i in range(n_classes)), name="RandomWalks")
