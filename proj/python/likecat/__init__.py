"""Big Five trait prediction from like-category features.

Thin layer over the compiled ``_likecat`` module: dict arguments are passed
through as JSON, everything else maps one to one.
"""

import importlib.util
import json as _json
import os
import sys

_override = os.environ.get("LIKECAT_EXTENSION_DIR")
if _override:
    # Development builds: load the extension straight out of a CMake build tree.
    _found = [f for f in os.listdir(_override) if f.startswith("_likecat") and f.endswith((".so", ".pyd"))]
    if not _found:
        raise ImportError(f"no _likecat extension in {_override}")
    _spec = importlib.util.spec_from_file_location("likecat._likecat", os.path.join(_override, _found[0]))
    _likecat = importlib.util.module_from_spec(_spec)
    sys.modules["likecat._likecat"] = _likecat
    _spec.loader.exec_module(_likecat)
else:
    from . import _likecat

from ._likecat import (  # noqa: E402
    RNG_IDENTIFIER,
    TRAITS,
    Dataset,
    FeatureMatrix,
    LikecatError,
    Model,
    build_matrix,
    clamp_score,
    compute_regression_metrics,
    knn_distance,
    load_dataset_dir,
    load_model,
    normalize_counts,
    validate_scores,
)

__all__ = [
    "RNG_IDENTIFIER",
    "TRAITS",
    "Dataset",
    "FeatureMatrix",
    "LikecatError",
    "Model",
    "build_matrix",
    "clamp_score",
    "cli",
    "compute_classification_metrics",
    "compute_regression_metrics",
    "config_hash",
    "fit",
    "generate_synthetic",
    "knn_distance",
    "load_dataset_dir",
    "load_model",
    "model_from_json",
    "normalize_counts",
    "run_experiment",
    "validate_scores",
]


def generate_synthetic(spec, out_dir=None):
    """Returns (Dataset, ground_truth dict); also writes the tables when out_dir is given."""
    dataset, truth = _likecat.generate_synthetic(_json.dumps(spec), out_dir)
    return dataset, _json.loads(truth)


def fit(train, trait, algorithm="linear", **hyperparameters):
    """Fits one model on a FeatureMatrix for one trait ("ope", "con", ...)."""
    return _likecat.fit(train, trait, _json.dumps({"name": algorithm, **hyperparameters}))


def model_from_json(doc):
    return _likecat.model_from_json(doc if isinstance(doc, str) else _json.dumps(doc))


def compute_classification_metrics(predicted, actual, n_classes):
    return _json.loads(_likecat.compute_classification_metrics(predicted, actual, n_classes))


def run_experiment(config, out_dir, relative_to="."):
    """Runs a comparison or sweep config (dict) and returns the written file paths."""
    return _likecat.run_experiment(_json.dumps(config), str(out_dir), str(relative_to))


def config_hash(config):
    return _likecat.config_hash(_json.dumps(config))


def cli(*args):
    """Runs the command-line front end in-process; returns (exit_code, stdout, stderr)."""
    return _likecat.run_cli([str(a) for a in args])
