"""Seeded resampling experiments, classification metrics and pairwise significance tests."""

from __future__ import annotations

import csv
import itertools
import math
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.stats import rankdata

from cif.forest import CIFConfig, fit, oob_estimate, predict_proba
from cif.tsdata import ResamplePlan, TimeSeriesDataset, parse_ts_file, relabel, stratified_resample

RESULT_COLUMNS = (
    "dataset", "fold", "classifier", "accuracy", "balanced_accuracy", "auroc", "f1",
    "train_time_s", "test_time_s", "train_estimate",
)


# ----------------------------------------------------------------------------
# metrics
# ----------------------------------------------------------------------------


def _pair(pred, truth):
    p = np.asarray(pred).ravel()
    t = np.asarray(truth).ravel()
    if p.size != t.size:
        raise ValueError(f"length mismatch: {p.size} predictions, {t.size} labels")
    if p.size == 0:
        raise ValueError("need at least one prediction")
    return p, t


def accuracy(pred, truth) -> float:
    p, t = _pair(pred, truth)
    return float(np.mean(p == t))


def balanced_accuracy(pred, truth) -> float:
    """Mean per-class recall over the classes present in truth."""
    p, t = _pair(pred, truth)
    return float(np.mean([np.mean(p[t == c] == c) for c in np.unique(t)]))


def f1_macro(pred, truth) -> float:
    """Unweighted mean of per-class F1 over classes seen in truth or predictions; 0/0 counts as 0."""
    p, t = _pair(pred, truth)
    scores = []
    for c in np.union1d(p, t):
        tp = np.sum((p == c) & (t == c))
        denom = np.sum(p == c) + np.sum(t == c)
        scores.append(2.0 * tp / denom if denom else 0.0)
    return float(np.mean(scores))


def _binary_auc(scores, positive) -> float:
    ranks = rankdata(scores)  # midranks for ties
    n_pos = int(positive.sum())
    n_neg = positive.size - n_pos
    u = ranks[positive].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def auroc(proba, truth) -> float:
    """One-vs-rest AUROC averaged with class-frequency weights.

    A class absent from truth (or covering every case) has no defined curve
    and gets weight zero; if no class qualifies the result is 0.5.
    """
    P = np.asarray(proba, dtype=np.float64)
    t = np.asarray(truth).ravel()
    if P.ndim != 2 or P.shape[0] != t.size:
        raise ValueError("probabilities must be n x c with one row per label")
    total = 0.0
    weight = 0.0
    for c in range(P.shape[1]):
        pos = t == c
        k = int(pos.sum())
        if k == 0 or k == t.size:
            continue
        total += k * _binary_auc(P[:, c], pos)
        weight += k
    return total / weight if weight else 0.5


# ----------------------------------------------------------------------------
# significance
# ----------------------------------------------------------------------------

EXACT_MAX_N = 20


def wilcoxon_signed_rank(a, b) -> float:
    """Two-sided p-value of the signed-rank test on paired scores.

    Zero differences are dropped and tied magnitudes share midranks. Up to 20
    non-zero differences the null distribution is enumerated exactly (over the
    actual midranks); beyond that a tie-corrected normal approximation is used.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("paired samples must have equal length")
    d = a - b
    d = d[d != 0]
    n = d.size
    if n == 0:
        return 1.0
    ranks = rankdata(np.abs(d))
    w_plus = ranks[d > 0].sum()

    if n <= EXACT_MAX_N:
        # midranks are multiples of 1/2, so doubled ranks are integers
        r2 = np.rint(2 * ranks).astype(np.int64)
        total = int(r2.sum())
        ways = np.zeros(total + 1, dtype=np.int64)
        ways[0] = 1
        for r in r2:
            ways[r:] = ways[r:] + ways[: total + 1 - r].copy()
        obs = int(round(2 * w_plus))
        tail = min(ways[: obs + 1].sum(), ways[obs:].sum())
        return float(min(1.0, 2.0 * tail / 2.0**n))

    _, counts = np.unique(ranks, return_counts=True)
    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0 - np.sum(counts**3 - counts) / 48.0
    if var <= 0:
        return 1.0
    z = (w_plus - mean) / math.sqrt(var)
    return float(min(1.0, math.erfc(abs(z) / math.sqrt(2.0))))


def holm(pvalues, alpha: float = 0.05) -> tuple[np.ndarray, np.ndarray]:
    """Holm step-down adjusted p-values and rejection flags, in input order."""
    p = np.asarray(pvalues, dtype=np.float64)
    m = p.size
    order = np.argsort(p, kind="stable")
    adjusted = np.empty(m)
    running = 0.0
    for i, j in enumerate(order):
        running = max(running, min(1.0, (m - i) * p[j]))
        adjusted[j] = running
    return adjusted, adjusted <= alpha


@dataclass(frozen=True)
class PairwiseResult:
    a: str
    b: str
    p_value: float
    p_holm: float
    significant: bool
    mean_a: float
    mean_b: float


def pairwise_significance(scores: dict[str, np.ndarray], alpha: float = 0.05) -> list[PairwiseResult]:
    """Signed-rank test on every classifier pair; `scores[name]` holds one value per dataset."""
    names = list(scores)
    pairs = list(itertools.combinations(names, 2))
    raw = [wilcoxon_signed_rank(scores[x], scores[y]) for x, y in pairs]
    adj, sig = holm(raw, alpha) if pairs else (np.array([]), np.array([], dtype=bool))
    return [
        PairwiseResult(x, y, p, float(q), bool(s), float(np.mean(scores[x])), float(np.mean(scores[y])))
        for (x, y), p, q, s in zip(pairs, raw, adj, sig)
    ]


def write_pairwise_csv(results: list[PairwiseResult], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["classifier_a", "classifier_b", "mean_a", "mean_b", "p_value", "p_holm", "significant"])
        for r in results:
            w.writerow([r.a, r.b, repr(r.mean_a), repr(r.mean_b), repr(r.p_value), repr(r.p_holm), int(r.significant)])


# ----------------------------------------------------------------------------
# baseline
# ----------------------------------------------------------------------------


class OneNearestNeighbour:
    """1-NN with Euclidean distance over the flattened d x m values."""

    def fit(self, train: TimeSeriesDataset) -> "OneNearestNeighbour":
        self.X = train.X().reshape(len(train), -1)
        self.y = train.y()
        self.n_classes = train.n_classes
        return self

    def predict(self, data: TimeSeriesDataset) -> np.ndarray:
        Q = data.X().reshape(len(data), -1)
        d2 = np.array([((self.X - q) ** 2).sum(axis=1) for q in Q])
        return self.y[np.argmin(d2, axis=1)]

    def predict_proba(self, data: TimeSeriesDataset) -> np.ndarray:
        out = np.zeros((len(data), self.n_classes))
        out[np.arange(len(data)), self.predict(data)] = 1.0
        return out


# ----------------------------------------------------------------------------
# experiments
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class FoldResult:
    dataset: str
    fold: int
    classifier: str
    accuracy: float
    balanced_accuracy: float
    auroc: float
    f1: float
    train_time_s: float
    test_time_s: float
    train_estimate: float | None = None

    def __post_init__(self):
        if self.fold < 0:
            raise ValueError("fold must be non-negative")
        for name in ("accuracy", "balanced_accuracy", "auroc", "f1", "train_estimate"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")

    def row(self) -> list:
        est = "" if self.train_estimate is None else repr(self.train_estimate)
        return [
            self.dataset, self.fold, self.classifier, repr(self.accuracy), repr(self.balanced_accuracy),
            repr(self.auroc), repr(self.f1), f"{self.train_time_s:.6f}", f"{self.test_time_s:.6f}", est,
        ]


def classifier_name(config: CIFConfig | str) -> str:
    return config if isinstance(config, str) else config.mode.upper()


def evaluate_fold(train, test, config: CIFConfig | str, fold: int, dataset: str = "", n_jobs: int = 1, name=None):
    """Fit on train with seed = fold and score on test."""
    if not isinstance(config, str):
        config = replace(config, seed=fold)
    estimate = None
    t0 = time.perf_counter()
    if config == "1nn":
        model = OneNearestNeighbour().fit(train)
    elif isinstance(config, str):
        raise ValueError(f"unknown classifier {config!r}")
    elif config.bagging:
        estimate, model = oob_estimate(train, config, n_jobs)
    else:
        model = fit(train, config, n_jobs)
    t1 = time.perf_counter()
    proba = model.predict_proba(test) if config == "1nn" else predict_proba(model, test, n_jobs)
    pred = np.argmax(proba, axis=1)
    t2 = time.perf_counter()
    truth = test.y()
    return FoldResult(
        dataset or train.name, fold, name or classifier_name(config),
        accuracy(pred, truth), balanced_accuracy(pred, truth), auroc(proba, truth), f1_macro(pred, truth),
        t1 - t0, t2 - t1, estimate,
    )


def write_results(results: list[FoldResult], path) -> None:
    """Merge rows into the CSV at `path`, keeping one row per (dataset, classifier, fold), sorted."""
    path = Path(path)
    rows = {}
    if path.exists() and path.stat().st_size:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if tuple(header) != RESULT_COLUMNS:
                raise ValueError(f"{path} has an unexpected header")
            for r in reader:
                rows[(r[0], r[2], int(r[1]))] = r
    for res in results:
        rows[(res.dataset, res.classifier, res.fold)] = [str(x) for x in res.row()]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RESULT_COLUMNS)
        for key in sorted(rows, key=lambda k: (k[0], k[2], k[1])):
            w.writerow(rows[key])


def read_results(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def run_experiment(
    train_path,
    test_path,
    config: CIFConfig | str = CIFConfig(),
    folds: int = 30,
    out_csv=None,
    n_jobs: int = 1,
    pad_zeros: bool = False,
    name: str | None = None,
) -> list[FoldResult]:
    """Resample folds 0..folds-1 (fold 0 is the given split) and evaluate each with seed = fold."""
    if folds < 1:
        raise ValueError("folds must be at least 1")
    train = parse_ts_file(train_path, pad_zeros=pad_zeros)
    test = parse_ts_file(test_path, pad_zeros=pad_zeros)
    if train.class_labels != test.class_labels:
        test = relabel(test, train.class_labels)
    dataset = train.name
    results = []
    for fold in range(folds):
        try:
            tr, te = stratified_resample(train, test, ResamplePlan(fold))
            results.append(evaluate_fold(tr, te, config, fold, dataset, n_jobs, name))
        except Exception as exc:
            raise RuntimeError(f"{dataset} fold {fold}: {exc}") from exc
    if out_csv is not None:
        write_results(results, out_csv)
    return results

