"""R-TWT delay model, simulator and (T, N) parameter search.

Configs are plain dicts in the same layout as the CLI's JSON config files.
"""

import json

from . import _core
from ._core import ModelError, SimulationError, batch_distribution, capacity, slotify

__all__ = [
    "ModelError",
    "SimulationError",
    "batch_distribution",
    "capacity",
    "default_config",
    "evaluate",
    "normalize_config",
    "optimize",
    "simulate",
    "slotify",
]


def default_config():
    return json.loads(_core.default_config())


def normalize_config(config):
    """Validate a config dict and return it with every default filled in."""
    return json.loads(_core.normalize_config(json.dumps(config)))


def evaluate(config=None, with_pmf=False):
    """Analytical delay/loss metrics. With ``with_pmf`` the result also has
    ``pmf`` (probability per delay in slots) and ``slot_s``."""
    config = default_config() if config is None else config
    return json.loads(_core.evaluate(json.dumps(config), with_pmf))


def simulate(config=None):
    config = default_config() if config is None else config
    return json.loads(_core.simulate(json.dumps(config)))


def optimize(config=None):
    config = default_config() if config is None else config
    return json.loads(_core.optimize(json.dumps(config)))
