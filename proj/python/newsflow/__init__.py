"""Python access to the newsflow simulator and clustering core."""

import json

from . import _core
from ._core import (
    ConfigError,
    DataError,
    cluster_log,
    entropy,
    jaccard,
    nmi,
    planted_log,
    run_cli,
    simpson,
)

__version__ = _core.__version__


def default_config():
    return json.loads(_core.default_config_json())


def simulate(config=None, workers=1):
    """Run one scenario batch and return its summary as a dict."""
    text = json.dumps(config) if config else ""
    return json.loads(_core.simulate_summary(text, workers))


__all__ = [
    "ConfigError",
    "DataError",
    "cluster_log",
    "default_config",
    "entropy",
    "jaccard",
    "nmi",
    "planted_log",
    "run_cli",
    "simpson",
    "simulate",
]
