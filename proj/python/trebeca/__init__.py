"""Timed Rebeca models from Python: load, simulate, explore, monitor, emit Erlang."""

import json
from pathlib import Path

from ._trebeca import (
    Graph,
    Model,
    ModelError,
    Monitor,
    MonitorSyntaxError,
    RuntimeFault,
    Trace,
    UnsupportedFeature,
    explore,
    run,
)

__all__ = [
    "Graph",
    "Model",
    "ModelError",
    "Monitor",
    "MonitorSyntaxError",
    "RuntimeFault",
    "Trace",
    "UnsupportedFeature",
    "events",
    "explore",
    "load",
    "load_monitor",
    "run",
]


def load(path):
    """Loads a .rebeca file. Raises ModelError with file:line:col diagnostics."""
    p = Path(path)
    return Model.load(p.read_text(), p.name)


def load_monitor(path):
    return Monitor(Path(path).read_text())


def events(trace):
    """The trace's events as dicts, in the JSON Lines field order."""
    return [json.loads(line) for line in trace.jsonl().splitlines() if line]
