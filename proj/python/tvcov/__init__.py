# Copyright 2026 The tvcov Authors
# License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
"""Multichannel dereverberation with a time-varying covariance model.

Waveforms are float64 arrays shaped (channels, samples). Configuration
dictionaries use the same sections and keys as the command-line tool's
JSON config (model, stft, scenario, ...).
"""

import json

from ._tvcov import (
    ConfigError,
    InvalidArgument,
    MissingFileError,
    NumericalError,
    _dereverberate,
    _simulate,
    analyze,
    evaluate,
    geometric_mean,
    synthesize,
    version,
)

__version__ = version()


def simulate(**scenario):
    """Mixture for the given scenario keys, e.g. simulate(seed=3, atf="tv")."""
    return _simulate(json.dumps({"scenario": scenario}))


def dereverberate(x, sample_rate=16000.0, method="proposed2", model=None, stft=None,
                  threads=1):
    """Returns {"output": array, "cost": total cost per iteration}."""
    cfg = {"method": method, "threads": threads}
    if model:
        cfg["model"] = model
    if stft:
        cfg["stft"] = stft
    return _dereverberate(x, sample_rate, json.dumps(cfg))


__all__ = [
    "ConfigError",
    "InvalidArgument",
    "MissingFileError",
    "NumericalError",
    "analyze",
    "dereverberate",
    "evaluate",
    "geometric_mean",
    "simulate",
    "synthesize",
    "version",
]
