"""Strict JSON run configuration.

The schema is documented in the README; unknown keys are rejected anywhere
in the tree so typos fail loudly, and every applied default is echoed back
by :func:`resolved_config` for reproducibility. No comments, no implicit
units.
"""

import json
import math
from dataclasses import dataclass, replace

from .errors import ConfigError
from .meanfield import default_initial_state
from .model import ModelParams, make_params

__all__ = [
    "InitialSpec",
    "OutputSpec",
    "RunSpec",
    "SweepSpec",
    "parse_config",
    "parse_sweep_config",
    "resolved_config",
    "seed_config_text",
    "MODELS",
    "MEANFIELD_CHANNELS",
    "FOCK_CHANNELS",
]

MODELS = ("meanfield", "fock", "oracle", "rwa")

MEANFIELD_CHANNELS = ("alpha", "beta", "alpha_abs", "beta_abs", "s", "b_abs",
                      "c_abs", "beta_phase", "constraint_defect")
FOCK_CHANNELS = ("pe", "nbar", "norm2", "energy", "alpha", "tail_mass")

DEFAULT_T_END = 50.0
DEFAULT_TAIL_TOL = 1e-12


@dataclass(frozen=True)
class InitialSpec:
    """Tagged initial-state description.

    kind 'basis'     : photon number ``n`` with a definite atomic level
    kind 'coherent'  : coherent amplitude ``alpha_c`` on one atomic channel
    kind 'meanfield' : explicit reduced triple (alpha, beta, s)
    """

    kind: str
    n: int = 0
    atom_excited: bool = True
    alpha_c: complex = 0j
    alpha: complex = 0j
    beta: complex = 0j
    s: float = 0.0


@dataclass(frozen=True)
class OutputSpec:
    csv: bool = True
    json: bool = True
    svg: bool = False
    dir: str = "out"


@dataclass(frozen=True)
class RunSpec:
    """Fully parsed run description; ``None`` fields resolve at run time."""

    model: str
    params: ModelParams
    initial: InitialSpec
    t_end: float
    mode: str                  # "fixed" | "adaptive"
    dt: float | None           # None: derived from the fastest timescale
    rtol: float | None
    atol: float | None
    sample_interval: float | None
    n_max: int | None          # None: meanfield or "auto"
    auto_n_max: bool
    tail_tol: float
    output: OutputSpec
    channels: tuple


def _require_mapping(node, name):
    if not isinstance(node, dict):
        raise ConfigError(f"{name} must be a JSON object")
    return node


def _reject_unknown(node, allowed, name):
    unknown = sorted(set(node) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r} in {name}")


def _get_number(node, key, name, default=None, required=False):
    if key not in node:
        if required:
            raise ConfigError(f"missing required key {key!r} in {name}")
        return default
    value = node[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name}.{key} must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{name}.{key} must be finite")
    return value


def _get_bool(node, key, name, default):
    if key not in node:
        return default
    value = node[key]
    if not isinstance(value, bool):
        raise ConfigError(f"{name}.{key} must be true or false")
    return value


def _parse_atom(node, name):
    atom = node.get("atom", "excited")
    if atom not in ("excited", "ground"):
        raise ConfigError(f"{name}.atom must be 'excited' or 'ground'")
    return atom == "excited"


def _parse_initial(node, model):
    name = "initial"
    node = _require_mapping(node, name)
    kind = node.get("kind")
    if kind == "basis":
        _reject_unknown(node, ("kind", "n", "atom"), name)
        n = node.get("n", 0)
        if isinstance(n, bool) or not isinstance(n, int) or n < 0:
            raise ConfigError("initial.n must be a non-negative integer")
        return InitialSpec(kind="basis", n=n, atom_excited=_parse_atom(node, name))
    if kind == "coherent":
        _reject_unknown(node, ("kind", "alpha_re", "alpha_im", "atom"), name)
        alpha_c = complex(_get_number(node, "alpha_re", name, required=True),
                          _get_number(node, "alpha_im", name, default=0.0))
        return InitialSpec(kind="coherent", alpha_c=alpha_c,
                           atom_excited=_parse_atom(node, name))
    if kind == "meanfield":
        if model != "meanfield":
            raise ConfigError(
                "initial.kind 'meanfield' is only valid for the meanfield model")
        _reject_unknown(node, ("kind", "alpha_re", "alpha_im", "beta_re",
                               "beta_im", "s"), name)
        alpha = complex(_get_number(node, "alpha_re", name, required=True),
                        _get_number(node, "alpha_im", name, default=0.0))
        beta = complex(_get_number(node, "beta_re", name, required=True),
                       _get_number(node, "beta_im", name, default=0.0))
        s = _get_number(node, "s", name, required=True)
        defect = abs(s * s + 4.0 * abs(beta) ** 2 - 1.0)
        if defect > 1e-10:
            raise ConfigError(
                f"initial meanfield triple violates s^2 + 4|beta|^2 = 1 "
                f"by {defect:.3e}")
        return InitialSpec(kind="meanfield", alpha=alpha, beta=beta, s=s)
    raise ConfigError(
        "initial.kind must be one of 'basis', 'coherent', 'meanfield'")


def _default_initial(model):
    if model == "meanfield":
        st = default_initial_state()
        return InitialSpec(kind="meanfield", alpha=st.alpha, beta=st.beta,
                           s=st.s)
    return InitialSpec(kind="basis", n=0, atom_excited=True)


def _parse_time(node):
    name = "time"
    node = _require_mapping(node, name)
    _reject_unknown(node, ("t_end", "dt", "rtol", "atol", "sample_interval"),
                    name)
    t_end = _get_number(node, "t_end", name, default=DEFAULT_T_END)
    if t_end < 0:
        raise ConfigError("time.t_end must be >= 0")
    dt = _get_number(node, "dt", name)
    rtol = _get_number(node, "rtol", name)
    atol = _get_number(node, "atol", name)
    if dt is not None and (rtol is not None or atol is not None):
        raise ConfigError("time accepts either dt or rtol/atol, not both")
    if (rtol is None) != (atol is None):
        raise ConfigError("time.rtol and time.atol must be given together")
    if dt is not None and dt <= 0:
        raise ConfigError("time.dt must be > 0")
    if rtol is not None and (rtol <= 0 or atol <= 0):
        raise ConfigError("time.rtol and time.atol must be > 0")
    sample_interval = _get_number(node, "sample_interval", name)
    if sample_interval is not None and sample_interval <= 0:
        raise ConfigError("time.sample_interval must be > 0")
    mode = "adaptive" if rtol is not None else "fixed"
    return t_end, mode, dt, rtol, atol, sample_interval


def _parse_truncation(node, model):
    name = "truncation"
    node = _require_mapping(node, name)
    if model == "meanfield":
        raise ConfigError("truncation does not apply to the meanfield model")
    _reject_unknown(node, ("n_max", "tail_tol"), name)
    tail_tol = _get_number(node, "tail_tol", name, default=DEFAULT_TAIL_TOL)
    if tail_tol <= 0:
        raise ConfigError("truncation.tail_tol must be > 0")
    n_max = node.get("n_max")
    if n_max is None:
        return None, False, tail_tol
    if n_max == "auto":
        return None, True, tail_tol
    if isinstance(n_max, bool) or not isinstance(n_max, int) or n_max < 0:
        raise ConfigError("truncation.n_max must be 'auto' or an integer >= 0")
    return n_max, False, tail_tol


def _parse_output(node):
    name = "output"
    node = _require_mapping(node, name)
    _reject_unknown(node, ("csv", "json", "svg", "dir"), name)
    out_dir = node.get("dir", "out")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("output.dir must be a non-empty string")
    return OutputSpec(csv=_get_bool(node, "csv", name, True),
                      json=_get_bool(node, "json", name, True),
                      svg=_get_bool(node, "svg", name, False),
                      dir=out_dir)


def _parse_channels(node, model):
    allowed = MEANFIELD_CHANNELS if model == "meanfield" else FOCK_CHANNELS
    if node is None:
        return tuple(allowed)
    if not isinstance(node, list) or not all(isinstance(c, str) for c in node):
        raise ConfigError("channels must be a list of channel names")
    if not node:
        raise ConfigError("channels must not be empty")
    for c in node:
        if c not in allowed:
            raise ConfigError(
                f"unknown channel {c!r} for model {model!r} "
                f"(available: {', '.join(allowed)})")
    return tuple(node)


def parse_config(text, model=None) -> RunSpec:
    """Parse a strict-JSON run configuration.

    Parameters
    ----------
    text : str
        UTF-8 JSON document.
    model : str, optional
        Model selected on the command line; the config's ``model`` key may
        be omitted when this is given, and must agree when both exist.

    Raises
    ------
    ConfigError
        On malformed JSON (with line/column) or any semantic problem,
        naming the offending field.
    """
    try:
        root = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config is not valid JSON: {exc.msg} "
            f"(line {exc.lineno}, column {exc.colno})") from exc
    root = _require_mapping(root, "config")
    _reject_unknown(root, ("model", "params", "initial", "time", "truncation",
                           "output", "channels"), "config")

    cfg_model = root.get("model")
    if cfg_model is not None and cfg_model not in MODELS:
        raise ConfigError(f"model must be one of {', '.join(MODELS)}")
    if model is not None and cfg_model is not None and model != cfg_model:
        raise ConfigError(
            f"config model {cfg_model!r} conflicts with requested {model!r}")
    model = model or cfg_model
    if model is None:
        raise ConfigError("missing required key 'model'")

    if "params" not in root:
        raise ConfigError("missing required key 'params'")
    pnode = _require_mapping(root["params"], "params")
    _reject_unknown(pnode, ("omega0", "omega_lambda", "g_re", "g_im"), "params")
    try:
        params = make_params(
            _get_number(pnode, "omega0", "params", required=True),
            _get_number(pnode, "omega_lambda", "params", required=True),
            complex(_get_number(pnode, "g_re", "params", required=True),
                    _get_number(pnode, "g_im", "params", default=0.0)))
    except ValueError as exc:
        raise ConfigError(f"params: {exc}") from exc

    initial = (_parse_initial(root["initial"], model) if "initial" in root
               else _default_initial(model))
    t_end, mode, dt, rtol, atol, sample_interval = _parse_time(
        root.get("time", {}))
    if model in ("oracle", "rwa") and (dt is not None or rtol is not None):
        raise ConfigError(
            f"time.dt / rtol / atol do not apply to the {model} model")

    if "truncation" in root:
        n_max, auto_n_max, tail_tol = _parse_truncation(root["truncation"],
                                                        model)
    else:
        n_max, auto_n_max, tail_tol = None, False, DEFAULT_TAIL_TOL

    output = _parse_output(root.get("output", {}))
    channels = _parse_channels(root.get("channels"), model)
    return RunSpec(model=model, params=params, initial=initial, t_end=t_end,
                   mode=mode, dt=dt, rtol=rtol, atol=atol,
                   sample_interval=sample_interval, n_max=n_max,
                   auto_n_max=auto_n_max, tail_tol=tail_tol, output=output,
                   channels=channels)


def _initial_dict(initial: InitialSpec) -> dict:
    if initial.kind == "basis":
        return {"kind": "basis", "n": initial.n,
                "atom": "excited" if initial.atom_excited else "ground"}
    if initial.kind == "coherent":
        return {"kind": "coherent", "alpha_re": initial.alpha_c.real,
                "alpha_im": initial.alpha_c.imag,
                "atom": "excited" if initial.atom_excited else "ground"}
    return {"kind": "meanfield", "alpha_re": initial.alpha.real,
            "alpha_im": initial.alpha.imag, "beta_re": initial.beta.real,
            "beta_im": initial.beta.imag, "s": initial.s}


def resolved_config(spec: RunSpec) -> dict:
    """Echo a spec as a config dict with every default made explicit.

    Re-parsing the echo yields an equal RunSpec; fields still deferred to
    run time (derived dt, automatic n_max) appear as null / "auto".
    """
    time_node = {"t_end": spec.t_end}
    if spec.mode == "adaptive":
        time_node["rtol"] = spec.rtol
        time_node["atol"] = spec.atol
    elif spec.dt is not None:
        time_node["dt"] = spec.dt
    if spec.sample_interval is not None:
        time_node["sample_interval"] = spec.sample_interval
    out = {
        "model": spec.model,
        "params": {"omega0": spec.params.omega0,
                   "omega_lambda": spec.params.omega_lambda,
                   "g_re": spec.params.g.real, "g_im": spec.params.g.imag},
        "initial": _initial_dict(spec.initial),
        "time": time_node,
        "output": {"csv": spec.output.csv, "json": spec.output.json,
                   "svg": spec.output.svg, "dir": spec.output.dir},
        "channels": list(spec.channels),
    }
    if spec.model != "meanfield":
        out["truncation"] = {
            "n_max": "auto" if spec.auto_n_max else spec.n_max,
            "tail_tol": spec.tail_tol,
        }
        if out["truncation"]["n_max"] is None:
            del out["truncation"]["n_max"]
    return out


@dataclass(frozen=True)
class SweepSpec:
    """Cartesian grid over (omega0, omega_lambda, |g|) around a template."""

    omega0_values: tuple
    omega_lambda_values: tuple
    g_abs_values: tuple
    template: RunSpec


def _parse_axis(node, key, fallback):
    if key not in node:
        return (fallback,)
    values = node[key]
    if (not isinstance(values, list) or not values
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                       for v in values)):
        raise ConfigError(f"grid.{key} must be a non-empty list of numbers")
    return tuple(float(v) for v in values)


def parse_sweep_config(text) -> SweepSpec:
    """Parse a sweep configuration: {"grid": {...}, "template": {run config}}.

    Grid axes are ``omega0``, ``omega_lambda`` and ``g_abs`` (coupling
    magnitudes; the template's coupling phase is kept). A missing axis
    pins that parameter to the template value.
    """
    try:
        root = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config is not valid JSON: {exc.msg} "
            f"(line {exc.lineno}, column {exc.colno})") from exc
    root = _require_mapping(root, "sweep config")
    _reject_unknown(root, ("grid", "template"), "sweep config")
    if "template" not in root:
        raise ConfigError("missing required key 'template'")
    template = parse_config(json.dumps(root["template"]))
    grid = _require_mapping(root.get("grid", {}), "grid")
    _reject_unknown(grid, ("omega0", "omega_lambda", "g_abs"), "grid")
    return SweepSpec(
        omega0_values=_parse_axis(grid, "omega0", template.params.omega0),
        omega_lambda_values=_parse_axis(grid, "omega_lambda",
                                        template.params.omega_lambda),
        g_abs_values=_parse_axis(grid, "g_abs", abs(template.params.g)),
        template=template)


def with_params(spec: RunSpec, params: ModelParams) -> RunSpec:
    return replace(spec, params=params)


def seed_config_text() -> str:
    """A complete starter configuration (weak-coupling resonant run)."""
    template = {
        "model": "fock",
        "params": {"omega0": 100.0, "omega_lambda": 100.0,
                   "g_re": 1.0, "g_im": 0.0},
        "initial": {"kind": "basis", "n": 0, "atom": "excited"},
        "time": {"t_end": 9.42477796076938, "sample_interval": 0.01},
        "truncation": {"n_max": 20, "tail_tol": 1e-12},
        "output": {"csv": True, "json": True, "svg": False, "dir": "out"},
        "channels": ["pe", "nbar", "norm2", "energy", "alpha", "tail_mass"],
    }
    return json.dumps(template, indent=2, sort_keys=False) + "\n"
