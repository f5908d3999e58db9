"""Time-series tree: exhaustive midpoint splits on information gain, stored as flat arrays."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True, error_model="numpy")
GAIN_EPS = 1e-12


@njit(**_JIT)
def _entropy(counts, total):
    h = 0.0
    for c in counts:
        if c > 0:
            p = c / total
            h -= p * np.log2(p)
    return h


@njit(**_JIT)
def _best_split(A, y, rows, lo, hi, counts, n_classes, vals, left):
    """Best (attribute, threshold, gain) over rows[lo:hi]; attribute -1 if none has positive gain."""
    size = hi - lo
    parent = _entropy(counts, size)
    best_att = -1
    best_thr = 0.0
    best_gain = 0.0
    best_margin = -1.0
    right = np.empty(n_classes, dtype=np.int64)
    for att in range(A.shape[1]):
        for t in range(size):
            vals[t] = A[rows[lo + t], att]
        order = np.argsort(vals[:size])
        left[:] = 0
        for t in range(size - 1):
            left[y[rows[lo + order[t]]]] += 1
            v0 = vals[order[t]]
            v1 = vals[order[t + 1]]
            if not v1 > v0:
                continue
            nl = t + 1
            nr = size - nl
            for c in range(n_classes):
                right[c] = counts[c] - left[c]
            g = parent - (nl / size) * _entropy(left, nl) - (nr / size) * _entropy(right, nr)
            if g <= GAIN_EPS:
                continue
            margin = 0.5 * (v1 - v0)
            if g > best_gain + GAIN_EPS or (g >= best_gain - GAIN_EPS and margin > best_margin):
                thr = v0 + margin
                if not thr < v1:
                    thr = v0
                best_att = att
                best_thr = thr
                best_gain = g
                best_margin = margin
    return best_att, best_thr, best_gain


@njit(**_JIT)
def build_arrays(A, y, n_classes):
    n = A.shape[0]
    cap = 2 * n - 1
    attribute = np.full(cap, -1, dtype=np.int64)
    threshold = np.zeros(cap)
    gain = np.zeros(cap)
    left_child = np.full(cap, -1, dtype=np.int64)
    right_child = np.full(cap, -1, dtype=np.int64)
    dist = np.zeros((cap, n_classes))

    rows = np.arange(n)
    scratch = np.empty(n, dtype=np.int64)
    vals = np.empty(n)
    lcounts = np.zeros(n_classes, dtype=np.int64)
    counts = np.zeros(n_classes, dtype=np.int64)

    stack = np.empty((cap, 3), dtype=np.int64)
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = n
    top = 1
    n_nodes = 1
    while top > 0:
        top -= 1
        node = stack[top, 0]
        lo = stack[top, 1]
        hi = stack[top, 2]
        size = hi - lo
        counts[:] = 0
        for t in range(lo, hi):
            counts[y[rows[t]]] += 1
        for c in range(n_classes):
            dist[node, c] = counts[c] / size
        if counts.max() == size:
            continue
        att, thr, g = _best_split(A, y, rows, lo, hi, counts, n_classes, vals, lcounts)
        if att < 0:
            continue
        # stable partition of rows[lo:hi]
        nl = 0
        nr = 0
        for t in range(lo, hi):
            r = rows[t]
            if A[r, att] <= thr:
                rows[lo + nl] = r
                nl += 1
            else:
                scratch[nr] = r
                nr += 1
        for t in range(nr):
            rows[lo + nl + t] = scratch[t]
        attribute[node] = att
        threshold[node] = thr
        gain[node] = g
        left_child[node] = n_nodes
        right_child[node] = n_nodes + 1
        stack[top, 0] = n_nodes + 1
        stack[top, 1] = lo + nl
        stack[top, 2] = hi
        stack[top + 1, 0] = n_nodes
        stack[top + 1, 1] = lo
        stack[top + 1, 2] = lo + nl
        top += 2
        n_nodes += 2
    return (
        attribute[:n_nodes].copy(),
        threshold[:n_nodes].copy(),
        gain[:n_nodes].copy(),
        left_child[:n_nodes].copy(),
        right_child[:n_nodes].copy(),
        dist[:n_nodes].copy(),
    )


@njit(**_JIT)
def leaf_votes(A, attribute, threshold, left_child, right_child, leaf_class):
    """Class voted by the tree for every row of A (columns indexed by `attribute`)."""
    out = np.empty(A.shape[0], dtype=np.int64)
    for i in range(A.shape[0]):
        node = 0
        while attribute[node] >= 0:
            if A[i, attribute[node]] <= threshold[node]:
                node = left_child[node]
            else:
                node = right_child[node]
        out[i] = leaf_class[node]
    return out


@dataclass(frozen=True)
class TreeNode:
    """Recursive view of one node. Leaves carry `distribution`, internal nodes a split."""

    attribute_index: int = -1
    threshold: float = 0.0
    gain: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    distribution: np.ndarray | None = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None


@dataclass(frozen=True)
class TimeSeriesTree:
    attribute: np.ndarray
    threshold: np.ndarray
    gain: np.ndarray
    left: np.ndarray
    right: np.ndarray
    distribution: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.attribute.size

    @property
    def internal(self) -> np.ndarray:
        return np.flatnonzero(self.attribute >= 0)

    @property
    def leaf_class(self) -> np.ndarray:
        # argmax takes the first maximum: ties go to the lowest class index
        return np.argmax(self.distribution, axis=1).astype(np.int64)

    def used_attributes(self) -> np.ndarray:
        return np.unique(self.attribute[self.attribute >= 0])

    def votes(self, A: np.ndarray) -> np.ndarray:
        """Voted class per row of a full attribute matrix."""
        A = np.ascontiguousarray(A, dtype=np.float64)
        return leaf_votes(A, self.attribute, self.threshold, self.left, self.right, self.leaf_class)

    def predict_proba(self, A: np.ndarray) -> np.ndarray:
        """Leaf distribution reached by every row."""
        A = np.asarray(A, dtype=np.float64)
        out = np.empty((A.shape[0], self.distribution.shape[1]))
        for i, row in enumerate(A):
            node = 0
            while self.attribute[node] >= 0:
                node = self.left[node] if row[self.attribute[node]] <= self.threshold[node] else self.right[node]
            out[i] = self.distribution[node]
        return out

    @property
    def root(self) -> TreeNode:
        def make(i):
            if self.attribute[i] < 0:
                return TreeNode(distribution=self.distribution[i].copy())
            return TreeNode(
                int(self.attribute[i]), float(self.threshold[i]), float(self.gain[i]),
                make(self.left[i]), make(self.right[i]),
            )

        return make(0)

    def to_dict(self) -> dict:
        return {
            "attribute": self.attribute.tolist(),
            "threshold": self.threshold.tolist(),
            "gain": self.gain.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "distribution": self.distribution.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TimeSeriesTree":
        return cls(
            np.asarray(d["attribute"], dtype=np.int64),
            np.asarray(d["threshold"], dtype=np.float64),
            np.asarray(d["gain"], dtype=np.float64),
            np.asarray(d["left"], dtype=np.int64),
            np.asarray(d["right"], dtype=np.int64),
            np.asarray(d["distribution"], dtype=np.float64).reshape(len(d["attribute"]), -1),
        )


def build_time_series_tree(attributes, labels, n_classes: int | None = None) -> TimeSeriesTree:
    """Grow a time-series tree on an n x p attribute matrix and integer class labels."""
    A = np.ascontiguousarray(attributes, dtype=np.float64)
    y = np.ascontiguousarray(labels, dtype=np.int64)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[0] != y.size:
        raise ValueError("attributes must be n x p with one label per row, n >= 1")
    if not np.all(np.isfinite(A)):
        raise ValueError("attributes must be finite")
    if y.min() < 0:
        raise ValueError("labels must be non-negative class indices")
    c = int(y.max()) + 1 if n_classes is None else int(n_classes)
    if y.max() >= c:
        raise ValueError("label outside n_classes")
    return TimeSeriesTree(*build_arrays(A, y, c))
