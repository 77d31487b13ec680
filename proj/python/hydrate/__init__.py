"""Hydrate detection on 3W-style oil-well time series.

Class codes: 0 NormalCondition, 1 RapidProductivityLoss, 2 Hydrate.
"""

import json

from . import _core
from ._core import Classifier, HydrateError, UsageError, class_name, ks_two_sample, mwu_two_sample

__all__ = [
    "Classifier",
    "HydrateError",
    "UsageError",
    "class_name",
    "compare_models",
    "default_config",
    "evaluate_labels",
    "fit",
    "ks_two_sample",
    "load_model",
    "mwu_two_sample",
    "run_pipeline",
    "run_qc",
]


def _config_text(config):
    if config is None:
        return ""
    return config if isinstance(config, str) else json.dumps(config)


def fit(kind, X, y, config=None):
    """Fit a "dt", "knn" or "nb" classifier on rows X and class codes y."""
    return _core.fit(kind, X, y, _config_text(config))


def load_model(model):
    """Rebuild a classifier from its JSON (string or dict)."""
    return _core.load_model(model if isinstance(model, str) else json.dumps(model))


def evaluate_labels(truth, predicted, model="model"):
    """Confusion matrix, accuracy and per-class F1 as a dict."""
    return json.loads(_core.evaluate_labels(truth, predicted, model))


def compare_models(scores, alpha=0.05, method="auto"):
    """Pairwise KS and Mann-Whitney tests between per-class score vectors.

    `scores` maps model name to its score vector; pairs follow insertion order.
    """
    return json.loads(_core.compare_models(list(scores.items()), alpha, method))


def default_config():
    return json.loads(_core.default_config())


def run_qc(config=None, out="out"):
    return json.loads(_core.run_qc(_config_text(config), str(out)))


def run_pipeline(config=None, out="out"):
    """Run ingest, QC, preprocessing, training, evaluation and comparison."""
    return json.loads(_core.run_pipeline(_config_text(config), str(out)))
