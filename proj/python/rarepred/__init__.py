"""Python bindings for the rarepred C++ core.

JSON-shaped results (evaluation reports, sweep tables) are returned as dicts.
"""

import json as _json
import os as _os

from . import _core
from ._core import (
    Panel,
    RarepredError,
    auc,
    config_hash,
    fit_logistic,
    normalize_spec,
    peirce,
    resample,
    roc,
)

__version__ = _core.__version__


def synth_panel(**config):
    """Synthetic panel; keyword arguments override the generator defaults."""
    return _core.synth_panel(_json.dumps(config))


def evaluate(panel, protocol="longitudinal", spec="id", K=1, seed=0, boundary=None,
             individual_effects=True, standardize=False, jobs=1):
    """Runs one validation protocol and returns the report as a dict."""
    text = _core.evaluate(panel, protocol, spec, K, seed, boundary, individual_effects, standardize, jobs)
    return _json.loads(text)


def rate_sweep(panel, specs, repeats=15, K=1, seed=0, jobs=1):
    """Longitudinal sweep over sampler specs; returns the table as a dict."""
    return _json.loads(_core.rate_sweep(panel, list(specs), repeats, K, seed, jobs))


def run_experiment(config, outputs=None):
    """Runs an experiment config (dict, JSON text or file path); returns manifest path, artifacts and exit status."""
    if isinstance(config, _os.PathLike) or (isinstance(config, str) and not config.lstrip().startswith("{")):
        with open(config, encoding="utf-8") as f:
            text = f.read()
    else:
        text = config if isinstance(config, str) else _json.dumps(config)
    return _core.run_experiment(text, outputs)


__all__ = [
    "Panel",
    "RarepredError",
    "auc",
    "config_hash",
    "evaluate",
    "fit_logistic",
    "normalize_spec",
    "peirce",
    "rate_sweep",
    "resample",
    "roc",
    "run_experiment",
    "synth_panel",
]
