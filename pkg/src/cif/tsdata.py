"""Labelled (possibly multivariate) time series, `.ts` archive files, normalisation, resampling."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

ZNORM_TOL = 1e-8


class TsParseError(ValueError):
    pass


@dataclass(frozen=True)
class TimeSeriesInstance:
    """d x m values plus an optional label index into the owning dataset's class_labels."""

    values: np.ndarray
    label: int | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim == 1:
            v = v[None, :]
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 3:
            raise ValueError(f"instance must be d x m with d >= 1 and m >= 3, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("instance values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_dims(self) -> int:
        return self.values.shape[0]

    @property
    def length(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class TimeSeriesDataset:
    instances: tuple[TimeSeriesInstance, ...]
    class_labels: tuple[str, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))
        object.__setattr__(self, "class_labels", tuple(str(c) for c in self.class_labels))
        if not self.instances:
            raise ValueError("dataset needs at least one instance")
        shapes = {inst.values.shape for inst in self.instances}
        if len(shapes) != 1:
            raise ValueError(f"instances have differing shapes: {sorted(shapes)}")
        if len(set(self.class_labels)) != len(self.class_labels):
            raise ValueError("class labels must be distinct")
        c = len(self.class_labels)
        for inst in self.instances:
            if inst.label is not None and not 0 <= inst.label < c:
                raise ValueError(f"label index {inst.label} outside class_labels")

    @classmethod
    def from_arrays(cls, X, y=None, class_labels: Sequence | None = None, name: str = "") -> "TimeSeriesDataset":
        """X is (n, m) or (n, d, m); y holds label indices (or None)."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 2:
            X = X[:, None, :]
        if y is None:
            labels = [None] * len(X)
        else:
            labels = [int(v) for v in y]
        if class_labels is None:
            class_labels = [str(i) for i in range(max((l for l in labels if l is not None), default=-1) + 1)]
        return cls(tuple(TimeSeriesInstance(x, l) for x, l in zip(X, labels)), tuple(class_labels), name)

    def __len__(self) -> int:
        return len(self.instances)

    @property
    def n_dims(self) -> int:
        return self.instances[0].n_dims

    @property
    def length(self) -> int:
        return self.instances[0].length

    @property
    def n_classes(self) -> int:
        return len(self.class_labels)

    def X(self) -> np.ndarray:
        """Values stacked into an (n, d, m) array."""
        return np.stack([inst.values for inst in self.instances])

    def y(self) -> np.ndarray:
        if any(inst.label is None for inst in self.instances):
            raise ValueError("dataset contains unlabelled instances")
        return np.array([inst.label for inst in self.instances], dtype=np.int64)

    def subset(self, indices) -> "TimeSeriesDataset":
        return TimeSeriesDataset(tuple(self.instances[i] for i in indices), self.class_labels, self.name)


@dataclass(frozen=True)
class ResamplePlan:
    fold_index: int
    train_fraction: float | None = None

    def __post_init__(self):
        if self.fold_index < 0:
            raise ValueError("fold_index must be non-negative")
        if self.train_fraction is not None and not 0 < self.train_fraction < 1:
            raise ValueError("train_fraction must lie in (0, 1)")


def relabel(data: TimeSeriesDataset, labels: Sequence[str]) -> TimeSeriesDataset:
    """Re-express label indices against another ordering of (a superset of) the class labels."""
    labels = tuple(str(c) for c in labels)
    missing = set(data.class_labels) - set(labels)
    if missing:
        raise ValueError(f"labels {sorted(missing)} are not among {list(labels)}")
    remap = [labels.index(c) for c in data.class_labels]
    instances = tuple(
        TimeSeriesInstance(i.values, None if i.label is None else remap[i.label]) for i in data.instances
    )
    return TimeSeriesDataset(instances, labels, data.name)


# ----------------------------------------------------------------------------
# .ts files
# ----------------------------------------------------------------------------

_IGNORED_DIRECTIVES = {"@timestamps", "@missing", "@equallength", "@serieslength", "@dimensions", "@dimension", "@targetlabel"}


def _parse_bool(token: str, lineno: int) -> bool:
    t = token.lower()
    if t not in ("true", "false"):
        raise TsParseError(f"line {lineno}: expected true/false, got {token!r}")
    return t == "true"


def parse_ts_file(path, pad_zeros: bool = False) -> TimeSeriesDataset:
    """Read a `.ts` archive file.

    With ``pad_zeros`` unequal-length series are right-padded with 0.0 to the
    longest length; otherwise they are rejected.
    """
    path = Path(path)
    name = path.stem
    class_labels: list[str] | None = None
    has_labels = True
    in_data = False
    rows: list[tuple[list[np.ndarray], int | None, int]] = []

    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if not in_data:
                if not line.startswith("@"):
                    raise TsParseError(f"line {lineno}: expected a header directive before @data")
                parts = line.split()
                key = parts[0].lower()
                if key == "@problemname":
                    name = " ".join(parts[1:]) or name
                elif key == "@univariate":
                    if len(parts) != 2:
                        raise TsParseError(f"line {lineno}: malformed @univariate")
                    _parse_bool(parts[1], lineno)
                elif key == "@classlabel":
                    if len(parts) < 2:
                        raise TsParseError(f"line {lineno}: malformed @classLabel")
                    has_labels = _parse_bool(parts[1], lineno)
                    class_labels = parts[2:] if has_labels else []
                    if has_labels and not class_labels:
                        raise TsParseError(f"line {lineno}: @classLabel true needs label tokens")
                    if len(set(class_labels)) != len(class_labels):
                        raise TsParseError(f"line {lineno}: duplicate class labels")
                elif key == "@data":
                    in_data = True
                elif key in _IGNORED_DIRECTIVES:
                    if key == "@timestamps" and len(parts) > 1 and _parse_bool(parts[1], lineno):
                        raise TsParseError(f"line {lineno}: timestamped series are not supported")
                else:
                    raise TsParseError(f"line {lineno}: unknown header directive {parts[0]!r}")
                continue

            if class_labels is None:
                raise TsParseError(f"line {lineno}: @data reached without a @classLabel header")
            fields = line.split(":")
            label = None
            if has_labels:
                if len(fields) < 2:
                    raise TsParseError(f"line {lineno}: missing class label")
                token = fields.pop().strip()
                if token not in class_labels:
                    raise TsParseError(f"line {lineno}: unknown class token {token!r}")
                label = class_labels.index(token)
            dims = []
            for f in fields:
                tokens = [t.strip() for t in f.split(",")]
                if "?" in tokens:
                    raise TsParseError(f"line {lineno}: missing values ('?') are not supported")
                try:
                    vals = np.array([float(t) for t in tokens], dtype=np.float64)
                except ValueError as exc:
                    raise TsParseError(f"line {lineno}: non-numeric value ({exc})") from None
                if not np.all(np.isfinite(vals)):
                    raise TsParseError(f"line {lineno}: non-finite value")
                dims.append(vals)
            if not pad_zeros and len({d.size for d in dims}) != 1:
                raise TsParseError(f"line {lineno}: dimensions have unequal lengths")
            rows.append((dims, label, lineno))

    if not in_data:
        raise TsParseError(f"{path}: no @data section")
    if not rows:
        raise TsParseError(f"{path}: no instances")

    n_dims = {len(d) for d, _, _ in rows}
    if len(n_dims) != 1:
        bad = next(ln for d, _, ln in rows if len(d) != len(rows[0][0]))
        raise TsParseError(f"line {bad}: dimension count differs from earlier instances")
    m = max(v.size for d, _, _ in rows for v in d)
    instances = []
    for dims, label, lineno in rows:
        if any(v.size != m for v in dims):
            if not pad_zeros:
                raise TsParseError(f"line {lineno}: series length differs from other instances (use pad_zeros)")
            dims = [np.pad(v, (0, m - v.size)) for v in dims]
        try:
            instances.append(TimeSeriesInstance(np.vstack(dims), label))
        except ValueError as exc:
            raise TsParseError(f"line {lineno}: {exc}") from None
    return TimeSeriesDataset(tuple(instances), tuple(class_labels), name)


def write_ts_file(dataset: TimeSeriesDataset, path) -> None:
    labelled = all(inst.label is not None for inst in dataset.instances)
    lines = [
        f"@problemName {dataset.name or 'dataset'}",
        f"@univariate {'true' if dataset.n_dims == 1 else 'false'}",
    ]
    if dataset.n_dims > 1:
        lines.append(f"@dimensions {dataset.n_dims}")
    lines.append(f"@equalLength true")
    lines.append(f"@seriesLength {dataset.length}")
    if labelled:
        lines.append("@classLabel true " + " ".join(dataset.class_labels))
    else:
        lines.append("@classLabel false")
    lines.append("@data")
    for inst in dataset.instances:
        fields = [",".join(repr(float(v)) for v in row) for row in inst.values]
        if labelled:
            fields.append(dataset.class_labels[inst.label])
        lines.append(":".join(fields))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ----------------------------------------------------------------------------
# normalisation and resampling
# ----------------------------------------------------------------------------


def znormalize(series) -> np.ndarray:
    """Zero mean, unit population standard deviation; degenerate input maps to zeros."""
    x = np.asarray(series, dtype=np.float64)
    if x.size == 0:
        raise ValueError("znormalize needs at least one value")
    sd = x.std()
    if sd <= ZNORM_TOL:
        return np.zeros_like(x)
    return (x - x.mean()) / sd


def stratified_resample(
    train: TimeSeriesDataset, test: TimeSeriesDataset, plan: ResamplePlan
) -> tuple[TimeSeriesDataset, TimeSeriesDataset]:
    """Redraw train/test keeping per-class split counts; fold 0 is the given split."""
    if train.class_labels != test.class_labels:
        raise ValueError("train and test class labels differ")
    if (train.n_dims, train.length) != (test.n_dims, test.length):
        raise ValueError("train and test shapes differ")
    if plan.fold_index == 0:
        return train, test

    pool = train.instances + test.instances
    y = np.array([inst.label for inst in pool])
    train_counts = Counter(inst.label for inst in train.instances)
    if plan.train_fraction is not None:
        totals = Counter(y.tolist())
        train_counts = Counter({c: int(np.floor(plan.train_fraction * totals[c] + 0.5)) for c in totals})

    rng = np.random.default_rng(plan.fold_index)
    train_idx, test_idx = [], []
    for c in range(train.n_classes):
        members = np.flatnonzero(y == c)
        need = train_counts.get(c, 0)
        if need > members.size:
            raise ValueError(f"class {train.class_labels[c]!r} has {members.size} instances, {need} needed")
        perm = rng.permutation(members)
        train_idx.extend(perm[:need].tolist())
        test_idx.extend(perm[need:].tolist())
    train_idx.sort()
    test_idx.sort()
    make = lambda idx: TimeSeriesDataset(tuple(pool[i] for i in idx), train.class_labels, train.name)
    return make(train_idx), make(test_idx)
