"""Trajectory and summary serialization.

Numbers are written as their shortest round-trip decimal (Python ``repr``),
complex channels split into ``name_re`` / ``name_im`` columns, lines
LF-terminated. Identical inputs produce byte-identical text.
"""

import json

import numpy as np

from .model import Trajectory

__all__ = ["format_number", "write_csv", "trajectory_json", "summary_json"]


def format_number(x) -> str:
    """Shortest decimal that parses back to exactly the same float."""
    return repr(float(x))


def _columns(trajectory: Trajectory, channels):
    cols = [("t", trajectory.times)]
    for name in channels:
        if name not in trajectory.channels:
            raise ValueError(f"trajectory has no channel {name!r}")
        values = np.asarray(trajectory.channels[name])
        if np.iscomplexobj(values):
            cols.append((f"{name}_re", values.real))
            cols.append((f"{name}_im", values.imag))
        else:
            cols.append((name, values))
    return cols


def write_csv(trajectory: Trajectory, channels) -> str:
    """Render the requested channels as CSV text (header + one row per
    sample)."""
    cols = _columns(trajectory, channels)
    lines = [",".join(name for name, _ in cols)]
    n = len(trajectory.times)
    for i in range(n):
        lines.append(",".join(format_number(values[i]) for _, values in cols))
    return "\n".join(lines) + "\n"


def trajectory_json(trajectory: Trajectory, channels) -> str:
    """Same flattened column set as the CSV, as a JSON document."""
    cols = _columns(trajectory, channels)
    doc = {name: [float(v) for v in values] for name, values in cols}
    return json.dumps(doc, separators=(",", ":")) + "\n"


def summary_json(summary: dict) -> str:
    """Deterministic rendering of a summary mapping (sorted keys)."""
    return json.dumps(summary, indent=2, sort_keys=True) + "\n"
