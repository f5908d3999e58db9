"""Interval forests over the 25-feature space: CIF, CIF-Fast, TSF and the catch22-only hybrid."""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from cif.features import CATCH22_IDS, N_FEATURES, TSF_IDS, extract_attributes, extract_columns
from cif.forest._tree import TimeSeriesTree, TreeNode, build_time_series_tree
from cif.tsdata import TimeSeriesDataset, TimeSeriesInstance

__all__ = [
    "Interval",
    "CIFConfig",
    "CIFModel",
    "FittedTree",
    "TimeSeriesTree",
    "TreeNode",
    "build_time_series_tree",
    "default_intervals",
    "fast_intervals",
    "sample_intervals_and_features",
    "fit",
    "predict_proba",
    "predict",
    "oob_estimate",
    "save_model",
    "load_model",
]

MODEL_FORMAT = "cif-model"
MODEL_VERSION = 1
MODES = ("cif", "cif-fast", "tsf", "hybrid")


@dataclass(frozen=True)
class Interval:
    dimension: int
    start: int
    length: int

    def __post_init__(self):
        if self.dimension < 0 or self.start < 0 or self.length < 3:
            raise ValueError(f"invalid interval {self}")

    @property
    def end(self) -> int:
        return self.start + self.length


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def default_intervals(d: int, m: int) -> int:
    return max(1, _round_half_up(math.sqrt(d) * math.sqrt(m)))


def fast_intervals(m: int) -> int:
    return max(1, _round_half_up(math.sqrt(m) ** 0.85))


@dataclass(frozen=True)
class CIFConfig:
    """Forest hyper-parameters. ``None`` means the mode's default.

    cif       r=500, k=round(sqrt(d)*sqrt(m)), a=8 drawn from the 25 features
    cif-fast  r=250, k=round(sqrt(m)**0.85)
    tsf       mean, stdev and slope on every interval
    hybrid    all 22 catch22 features on every interval
    """

    num_trees: int | None = None
    intervals_per_tree: int | None = None
    atts_per_tree: int = 8
    contract_minutes: float | None = None
    bagging: bool = False
    seed: int = 0
    mode: str = "cif"
    catch22_only: bool = False

    def __post_init__(self):
        mode = self.mode.lower().replace("_", "-")
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        object.__setattr__(self, "mode", mode)
        if self.num_trees is not None and self.num_trees < 1:
            raise ValueError("num_trees must be >= 1")
        if self.intervals_per_tree is not None and self.intervals_per_tree < 1:
            raise ValueError("intervals_per_tree must be >= 1")
        if not 1 <= self.atts_per_tree <= N_FEATURES:
            raise ValueError(f"atts_per_tree must lie in [1, {N_FEATURES}]")
        if self.contract_minutes is not None and not self.contract_minutes > 0:
            raise ValueError("contract_minutes must be positive")

    def trees(self) -> int:
        if self.num_trees is not None:
            return self.num_trees
        return 250 if self.mode == "cif-fast" else 500

    def intervals(self, d: int, m: int) -> int:
        if self.intervals_per_tree is not None:
            return self.intervals_per_tree
        return fast_intervals(m) if self.mode == "cif-fast" else default_intervals(d, m)

    def feature_pool(self) -> tuple[int, ...]:
        if self.mode == "tsf":
            return TSF_IDS
        if self.mode == "hybrid" or self.catch22_only:
            return CATCH22_IDS
        return tuple(range(N_FEATURES))

    def features_per_tree(self) -> int:
        pool = self.feature_pool()
        if self.mode in ("tsf", "hybrid"):
            return len(pool)
        return min(self.atts_per_tree, len(pool))


def sample_intervals_and_features(m: int, d: int, k: int, a: int, rng, pool=None):
    """k random intervals and a distinct features (the whole pool, in order, when a covers it)."""
    if m < 5:
        raise ValueError("series length must be at least 5")
    pool = tuple(range(N_FEATURES)) if pool is None else tuple(pool)
    if not 1 <= a <= len(pool) or k < 1:
        raise ValueError("need k >= 1 and 1 <= a <= pool size")
    dims = rng.integers(0, d, size=k)
    starts = rng.integers(0, m - 3 + 1, size=k)
    lengths = rng.integers(3, m - starts + 1)
    intervals = np.column_stack([dims, starts, lengths]).astype(np.int64)
    if a == len(pool):
        features = np.array(pool, dtype=np.int64)
    else:
        features = rng.choice(np.array(pool, dtype=np.int64), size=a, replace=False)
    return intervals, features


def tree_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, index]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class FittedTree:
    tree: TimeSeriesTree
    intervals: np.ndarray  # k x 3: dimension, start, length
    features: np.ndarray
    tree_seed: int
    bootstrap: np.ndarray | None = None
    build_time_s: float = 0.0

    @property
    def interval_list(self) -> list[Interval]:
        return [Interval(*map(int, row)) for row in self.intervals]

    def decode(self, attribute: int) -> tuple[Interval, int]:
        """Attribute column -> (interval, feature id)."""
        a = self.features.size
        return Interval(*map(int, self.intervals[attribute // a])), int(self.features[attribute % a])

    @property
    def root(self) -> TreeNode:
        return self.tree.root

    def votes(self, X: np.ndarray) -> np.ndarray:
        """Voted class for each instance of an (n, d, m) array, computing only the columns the tree uses."""
        used = self.tree.used_attributes()
        if used.size == 0:
            return np.full(X.shape[0], self.tree.leaf_class[0], dtype=np.int64)
        local = np.full(self.intervals.shape[0] * self.features.size, -1, dtype=np.int64)
        local[used] = np.arange(used.size)
        cols = extract_columns(X, self.intervals, self.features, used)
        remapped = np.where(self.tree.attribute >= 0, local[np.maximum(self.tree.attribute, 0)], -1)
        return TimeSeriesTree(
            remapped, self.tree.threshold, self.tree.gain, self.tree.left, self.tree.right, self.tree.distribution
        ).votes(cols)


@dataclass
class CIFModel:
    config: CIFConfig
    class_labels: tuple[str, ...]
    n_dims: int
    length: int
    trees: list[FittedTree] = field(default_factory=list)
    train_time_s: float = 0.0
    oob_accuracy: float | None = None

    @property
    def n_classes(self) -> int:
        return len(self.class_labels)

    def predict_proba(self, data, n_jobs: int = 1) -> np.ndarray:
        return predict_proba(self, data, n_jobs=n_jobs)

    def predict(self, data, n_jobs: int = 1) -> np.ndarray:
        return predict(self, data, n_jobs=n_jobs)


def _as_array(data, n_dims=None, length=None) -> np.ndarray:
    if isinstance(data, TimeSeriesDataset):
        X = data.X()
    elif isinstance(data, TimeSeriesInstance):
        X = data.values[None]
    else:
        X = np.asarray(data, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, None, :]
        elif X.ndim == 2:
            X = X[:, None, :]
    X = np.ascontiguousarray(X, dtype=np.float64)
    if n_dims is not None and X.shape[1:] != (n_dims, length):
        raise ValueError(f"data has shape (d={X.shape[1]}, m={X.shape[2]}), model expects (d={n_dims}, m={length})")
    return X


def _grow(X, y, n_classes, config: CIFConfig, index: int, k: int, a: int) -> tuple[FittedTree, np.ndarray | None]:
    t0 = time.perf_counter()
    seed = tree_seed(config.seed, index)
    rng = np.random.default_rng(seed)
    n, d, m = X.shape
    intervals, features = sample_intervals_and_features(m, d, k, a, rng, config.feature_pool())
    boot = rng.integers(0, n, size=n) if config.bagging else None
    A = extract_attributes(X, intervals, features)
    rows = boot if boot is not None else slice(None)
    tree = build_time_series_tree(A[rows], y[rows], n_classes)
    oob_votes = None
    if boot is not None:
        oob = np.setdiff1d(np.arange(n), boot)
        oob_votes = (oob, tree.votes(A[oob]))
    return FittedTree(tree, intervals, features, seed, boot, time.perf_counter() - t0), oob_votes


def _fit_forest(train: TimeSeriesDataset, config: CIFConfig, n_jobs: int = 1):
    if len(train) < 1:
        raise ValueError("empty training set")
    X = _as_array(train)
    y = train.y()
    n, d, m = X.shape
    if m < 5:
        raise ValueError("series length must be at least 5")
    r = config.trees()
    k = config.intervals(d, m)
    a = config.features_per_tree()
    c = train.n_classes
    budget = None if config.contract_minutes is None else config.contract_minutes * 60.0

    start = time.perf_counter()
    results = []
    n_jobs = max(1, int(n_jobs))
    pool = ThreadPoolExecutor(n_jobs) if n_jobs > 1 else None
    try:
        i = 0
        while i < r:
            batch = range(i, min(r, i + n_jobs))
            if pool is None:
                results.extend(_grow(X, y, c, config, j, k, a) for j in batch)
            else:
                results.extend(pool.map(lambda j: _grow(X, y, c, config, j, k, a), batch))
            i = batch.stop
            if budget is not None and time.perf_counter() - start >= budget:
                break
    finally:
        if pool is not None:
            pool.shutdown()
    model = CIFModel(config, train.class_labels, d, m, [t for t, _ in results], time.perf_counter() - start)
    return model, [o for _, o in results], y


def fit(train: TimeSeriesDataset, config: CIFConfig | None = None, n_jobs: int = 1) -> CIFModel:
    """Train a forest. With a contract, trees are added until the budget is spent (at least one)."""
    model, _, _ = _fit_forest(train, config or CIFConfig(), n_jobs)
    return model


def _vote_counts(model: CIFModel, X: np.ndarray, n_jobs: int) -> np.ndarray:
    counts = np.zeros((X.shape[0], model.n_classes), dtype=np.int64)
    rows = np.arange(X.shape[0])
    if n_jobs > 1:
        with ThreadPoolExecutor(n_jobs) as ex:
            all_votes = list(ex.map(lambda t: t.votes(X), model.trees))
    else:
        all_votes = (t.votes(X) for t in model.trees)
    for v in all_votes:
        np.add.at(counts, (rows, v), 1)
    return counts


def predict_proba(model: CIFModel, data, n_jobs: int = 1) -> np.ndarray:
    """Fraction of trees voting for each class; one row per instance."""
    single = isinstance(data, TimeSeriesInstance)
    X = _as_array(data, model.n_dims, model.length)
    proba = _vote_counts(model, X, max(1, int(n_jobs))) / len(model.trees)
    return proba[0] if single else proba


def predict(model: CIFModel, data, n_jobs: int = 1) -> np.ndarray:
    """Class index with most votes (lowest index on ties)."""
    proba = predict_proba(model, data, n_jobs)
    return np.argmax(proba, axis=-1)


def oob_estimate(train: TimeSeriesDataset, config: CIFConfig | None = None, n_jobs: int = 1) -> tuple[float, CIFModel]:
    """Out-of-bag accuracy of a bagged forest, plus the full-data model built with the same seed."""
    config = config or CIFConfig()
    if len(train) < 2:
        raise ValueError("out-of-bag estimation needs at least two cases")
    bagged, oob, y = _fit_forest(train, replace(config, bagging=True), n_jobs)
    counts = np.zeros((len(train), train.n_classes), dtype=np.int64)
    for rows, votes in oob:
        np.add.at(counts, (rows, votes), 1)
    covered = counts.sum(axis=1) > 0
    estimate = float(np.mean(np.argmax(counts[covered], axis=1) == y[covered])) if covered.any() else 0.0
    full = fit(train, replace(config, bagging=False), n_jobs)
    full.oob_accuracy = estimate
    return estimate, full


# ----------------------------------------------------------------------------
# persistence
# ----------------------------------------------------------------------------


def model_to_dict(model: CIFModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "config": asdict(model.config),
        "class_labels": list(model.class_labels),
        "n_dims": model.n_dims,
        "length": model.length,
        "train_time_s": model.train_time_s,
        "oob_accuracy": model.oob_accuracy,
        "trees": [
            {
                "tree_seed": t.tree_seed,
                "intervals": t.intervals.tolist(),
                "features": t.features.tolist(),
                "bootstrap": None if t.bootstrap is None else t.bootstrap.tolist(),
                "build_time_s": t.build_time_s,
                "nodes": t.tree.to_dict(),
            }
            for t in model.trees
        ],
    }


def model_from_dict(d: dict) -> CIFModel:
    if d.get("format") != MODEL_FORMAT:
        raise ValueError("not a CIF model document")
    if d.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {d.get('version')}")
    trees = [
        FittedTree(
            TimeSeriesTree.from_dict(t["nodes"]),
            np.asarray(t["intervals"], dtype=np.int64).reshape(-1, 3),
            np.asarray(t["features"], dtype=np.int64),
            int(t["tree_seed"]),
            None if t["bootstrap"] is None else np.asarray(t["bootstrap"], dtype=np.int64),
            float(t.get("build_time_s", 0.0)),
        )
        for t in d["trees"]
    ]
    return CIFModel(
        CIFConfig(**d["config"]),
        tuple(d["class_labels"]),
        int(d["n_dims"]),
        int(d["length"]),
        trees,
        float(d.get("train_time_s", 0.0)),
        d.get("oob_accuracy"),
    )


def save_model(model: CIFModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model)), encoding="utf-8")


def load_model(path) -> CIFModel:
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
