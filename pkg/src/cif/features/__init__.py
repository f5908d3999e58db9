"""The 25-feature interval space: 22 canonical characteristics plus mean, stdev, slope.

Features are identified by integer index. Indices 0-21 are the catch22 set in
its canonical order, 22-24 are the three summaries used by time series forest.
The two outlier-inclusion features z-normalise the window before evaluation;
every other feature sees the raw window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from cif.features import _catch22 as k

CATCH22_NAMES = (
    "DN_HistogramMode_5",
    "DN_HistogramMode_10",
    "CO_f1ecac",
    "CO_FirstMin_ac",
    "CO_HistogramAMI_even_2_5",
    "CO_trev_1_num",
    "MD_hrv_classic_pnn40",
    "SB_BinaryStats_mean_longstretch1",
    "SB_TransitionMatrix_3ac_sumdiagcov",
    "PD_PeriodicityWang_th0_01",
    "CO_Embed2_Dist_tau_d_expfit_meandiff",
    "IN_AutoMutualInfoStats_40_gaussian_fmmi",
    "FC_LocalSimple_mean1_tauresrat",
    "DN_OutlierInclude_p_001_mdrmd",
    "DN_OutlierInclude_n_001_mdrmd",
    "SP_Summaries_welch_rect_area_5_1",
    "SB_BinaryStats_diff_longstretch0",
    "SB_MotifThree_quantile_hh",
    "SC_FluctAnal_2_rsrangefit_50_1_logi_prop_r1",
    "SC_FluctAnal_2_dfa_50_1_2_logi_prop_r1",
    "SP_Summaries_welch_rect_centroid",
    "FC_LocalSimple_mean3_stderr",
)
TSF_NAMES = ("mean", "stdev", "slope")
FEATURE_NAMES = CATCH22_NAMES + TSF_NAMES
N_FEATURES = len(FEATURE_NAMES)

MEAN, STDEV, SLOPE = 22, 23, 24
OUTLIER_POS, OUTLIER_NEG = 13, 14
NORMALISED_INPUT = frozenset({OUTLIER_POS, OUTLIER_NEG})

CATCH22_IDS = tuple(range(22))
TSF_IDS = (MEAN, STDEV, SLOPE)
ALL_IDS = tuple(range(N_FEATURES))

_ZNORM_TOL = 1e-8


@dataclass(frozen=True)
class FeatureId:
    index: int

    def __post_init__(self):
        if not 0 <= self.index < N_FEATURES:
            raise ValueError(f"feature index {self.index} outside [0, {N_FEATURES})")

    @property
    def name(self) -> str:
        return FEATURE_NAMES[self.index]

    @property
    def requires_normalised_input(self) -> bool:
        return self.index in NORMALISED_INPUT

    @classmethod
    def from_name(cls, name: str) -> "FeatureId":
        return cls(FEATURE_NAMES.index(name))


def feature_index(f) -> int:
    """Accept a FeatureId, an int or a canonical name."""
    if isinstance(f, FeatureId):
        return f.index
    if isinstance(f, str):
        return FEATURE_NAMES.index(f)
    idx = int(f)
    if not 0 <= idx < N_FEATURES:
        raise ValueError(f"feature index {idx} outside [0, {N_FEATURES})")
    return idx


# --------------------------------------------------------------------------
# jitted dispatch
# --------------------------------------------------------------------------


@njit(cache=True, nogil=True, error_model="numpy")
def _slope(x):
    n = x.size
    xm = (n - 1) / 2.0
    ym = 0.0
    for i in range(n):
        ym += x[i]
    ym /= n
    num = 0.0
    den = 0.0
    for i in range(n):
        num += (i - xm) * (x[i] - ym)
        den += (i - xm) ** 2
    if den == 0:
        return 0.0
    return num / den


@njit(cache=True, nogil=True, error_model="numpy")
def _pop_std(x):
    m = 0.0
    for i in range(x.size):
        m += x[i]
    m /= x.size
    s = 0.0
    for i in range(x.size):
        s += (x[i] - m) ** 2
    return np.sqrt(s / x.size)


@njit(cache=True, nogil=True, error_model="numpy")
def _znorm(x):
    m = 0.0
    for i in range(x.size):
        m += x[i]
    m /= x.size
    sd = _pop_std(x)
    out = np.empty(x.size)
    if sd <= 1e-8:
        out[:] = 0.0
        return out
    for i in range(x.size):
        out[i] = (x[i] - m) / sd
    return out


@njit(cache=True, nogil=True, error_model="numpy")
def _raw_feature(fid, x):
    """Evaluate one feature kernel on x without any preprocessing."""
    if fid == 0:
        return k.histogram_mode(x, 5)
    elif fid == 1:
        return k.histogram_mode(x, 10)
    elif fid == 2:
        return k.f1ecac(x)
    elif fid == 3:
        return k.first_min_ac(x)
    elif fid == 4:
        return k.histogram_ami_even_2_5(x)
    elif fid == 5:
        return k.trev_1_num(x)
    elif fid == 6:
        return k.hrv_pnn40(x)
    elif fid == 7:
        return k.binary_mean_longstretch1(x)
    elif fid == 8:
        return k.transition_matrix_3ac_sumdiagcov(x)
    elif fid == 9:
        return k.periodicity_wang_th0_01(x)
    elif fid == 10:
        return k.embed2_dist_expfit_meandiff(x)
    elif fid == 11:
        return k.ami_gaussian_fmmi(x)
    elif fid == 12:
        return k.local_simple_mean1_tauresrat(x)
    elif fid == 13:
        return k.outlier_include(x, 1.0)
    elif fid == 14:
        return k.outlier_include(x, -1.0)
    elif fid == 15:
        return k.welch_rect_area_5_1(x)
    elif fid == 16:
        return k.binary_diff_longstretch0(x)
    elif fid == 17:
        return k.motif_three_quantile_hh(x)
    elif fid == 18:
        return k.fluct_anal_prop_r1(x, 1, False)
    elif fid == 19:
        return k.fluct_anal_prop_r1(x, 2, True)
    elif fid == 20:
        return k.welch_rect_centroid(x)
    elif fid == 21:
        return k.local_simple_mean3_stderr(x)
    elif fid == 22:
        return x.sum() / x.size
    elif fid == 23:
        return _pop_std(x)
    elif fid == 24:
        return _slope(x)
    return np.nan


@njit(cache=True, nogil=True, error_model="numpy")
def _feature(fid, x):
    if fid == 13 or fid == 14:
        v = _raw_feature(fid, _znorm(x))
    else:
        v = _raw_feature(fid, x)
    if not np.isfinite(v):
        return 0.0
    return v


@njit(cache=True, nogil=True, error_model="numpy")
def _extract(X, rows, intervals, features):
    """Attribute matrix for the given rows: column j*a + c is feature c on interval j."""
    a = features.size
    out = np.empty((rows.size, intervals.shape[0] * a))
    for r in range(rows.size):
        i = rows[r]
        for j in range(intervals.shape[0]):
            dim = intervals[j, 0]
            start = intervals[j, 1]
            w = np.ascontiguousarray(X[i, dim, start : start + intervals[j, 2]])
            for c in range(a):
                out[r, j * a + c] = _feature(features[c], w)
    return out


@njit(cache=True, nogil=True, error_model="numpy")
def _extract_columns(X, intervals, features, columns):
    """Selected attribute columns for all instances (prediction path)."""
    a = features.size
    out = np.empty((X.shape[0], columns.size))
    for r in range(X.shape[0]):
        for q in range(columns.size):
            j = columns[q] // a
            dim = intervals[j, 0]
            start = intervals[j, 1]
            w = np.ascontiguousarray(X[r, dim, start : start + intervals[j, 2]])
            out[r, q] = _feature(features[columns[q] % a], w)
    return out


# --------------------------------------------------------------------------
# public API
# --------------------------------------------------------------------------


def compute_feature(feature, window) -> float:
    """Value of one feature on a raw interval window (length >= 3).

    Non-finite results are reported as 0.0.
    """
    w = np.ascontiguousarray(window, dtype=np.float64)
    if w.ndim != 1 or w.size < 3:
        raise ValueError("window must be one-dimensional with at least 3 points")
    return float(_feature(feature_index(feature), w))


def raw_kernel(feature, window) -> float:
    """Unsanitised kernel value with no internal normalisation (for oracle checks)."""
    w = np.ascontiguousarray(window, dtype=np.float64)
    return float(_raw_feature(feature_index(feature), w))


def slope(window) -> float:
    """Least-squares slope of the values against time indices 0..n-1."""
    w = np.ascontiguousarray(window, dtype=np.float64)
    if w.size < 2:
        raise ValueError("slope needs at least 2 points")
    return float(_slope(w))


def feature_vector(instance, interval, features) -> np.ndarray:
    """One value per requested feature for a single interval of an instance."""
    values = np.asarray(getattr(instance, "values", instance), dtype=np.float64)
    if values.ndim == 1:
        values = values[None, :]
    dim, start, length = interval.dimension, interval.start, interval.length
    if not (0 <= dim < values.shape[0]) or start < 0 or length < 3 or start + length > values.shape[1]:
        raise ValueError(f"interval {interval} out of bounds for series of shape {values.shape}")
    w = np.ascontiguousarray(values[dim, start : start + length])
    return np.array([_feature(feature_index(f), w) for f in features], dtype=np.float64)


def extract_attributes(X, intervals, features, rows=None) -> np.ndarray:
    """Attribute matrix over a 3-d array X of shape (n, d, m)."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if rows is None:
        rows = np.arange(X.shape[0])
    return _extract(
        X,
        np.asarray(rows, dtype=np.int64),
        np.asarray(intervals, dtype=np.int64).reshape(-1, 3),
        np.asarray(features, dtype=np.int64),
    )


def extract_columns(X, intervals, features, columns) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    return _extract_columns(
        X,
        np.asarray(intervals, dtype=np.int64).reshape(-1, 3),
        np.asarray(features, dtype=np.int64),
        np.asarray(columns, dtype=np.int64),
    )
