"""Canonical interval forest: interval-based time series classification over catch22 and summary features."""

from cif.features import FEATURE_NAMES, FeatureId, compute_feature
from cif.forest import CIFConfig, CIFModel, Interval, fit, load_model, oob_estimate, predict, predict_proba, save_model
from cif.interpret import temporal_importance, top_features
from cif.tsdata import TimeSeriesDataset, TimeSeriesInstance, parse_ts_file

__version__ = "0.1.0"
