"""Trainer/agent model of stochastic training programs."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import __version__, _run_config_json, _run_scenario_json


def run_scenario(name, overrides=()):
    """Run a named scenario and return the report as a dict."""
    return _json.loads(_run_scenario_json(name, list(overrides)))


def run_config(config, mode="analyze"):
    """Run a config (dict or JSON text) in analyze, simulate or search mode."""
    text = config if isinstance(config, str) else _json.dumps(config)
    return _json.loads(_run_config_json(text, mode))
