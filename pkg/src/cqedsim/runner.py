"""Run orchestration: resolve a spec, simulate, and write artifacts.

Artifact set for a single run: ``resolved_config.json`` (all defaults made
concrete), ``trajectory.csv`` / ``trajectory.json``, ``summary.json`` and
optional ``fig_*.svg``. The ``compare`` pipeline runs the stencil, spectral
and rotating-wave backends from one spec and reports cross-backend deltas.
Exit status convention: 0 ok, 1 I/O failure, 2 invalid configuration,
3 numerical failure.
"""

import concurrent.futures
import itertools
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import fock as fock_mod
from . import meanfield as mf_mod
from .config import RunSpec, SweepSpec, resolved_config
from .errors import ConfigError, NumericalError
from .integrate import StepControl
from .model import MeanFieldState, coherent_amplitudes, fock_basis_state
from .observables import sinusoid_deviation
from .output import summary_json, trajectory_json, write_csv
from .rwa import simulate_rwa
from .spectral import simulate_oracle

__all__ = ["RunResult", "run", "compare_run", "sweep_run",
           "EXIT_OK", "EXIT_IO", "EXIT_CONFIG", "EXIT_NUMERICAL"]

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

AUTO_TRUNCATE_TOL = 1e-8


@dataclass
class RunResult:
    status: int
    message: str = ""
    artifacts: list = field(default_factory=list)
    summary: dict = None


def _fock_initial_factory(spec: RunSpec):
    init = spec.initial
    if init.kind == "basis":
        return lambda n_max, strict=True: fock_basis_state(
            init.n, n_max, init.atom_excited)
    if init.kind == "coherent":
        return lambda n_max, strict=True: coherent_amplitudes(
            init.alpha_c, n_max, init.atom_excited, tail_tol=spec.tail_tol,
            strict=strict)
    raise ConfigError(f"initial kind {init.kind!r} not usable for Fock-state models")


def _meanfield_initial(spec: RunSpec) -> MeanFieldState:
    init = spec.initial
    if init.kind == "meanfield":
        return MeanFieldState(alpha=init.alpha, beta=init.beta, s=init.s)
    # basis / coherent starts map onto the reduced variables: a definite
    # atomic level (beta = 0, s = +-1) and the field expectation as alpha
    s = 1.0 if init.atom_excited else -1.0
    alpha = init.alpha_c if init.kind == "coherent" else 0.0j
    return MeanFieldState(alpha=alpha, beta=0.0j, s=s)


def _resolve_n_max(spec: RunSpec) -> int:
    if spec.n_max is not None:
        if spec.initial.kind == "basis" and spec.initial.n > spec.n_max:
            raise ConfigError(
                f"initial.n = {spec.initial.n} exceeds n_max = {spec.n_max}")
        return spec.n_max
    factory = _fock_initial_factory(spec)
    if spec.auto_n_max:
        start = 2
        if spec.initial.kind == "basis":
            start = max(2, spec.initial.n)
        elif spec.initial.kind == "coherent":
            start = max(2, math.ceil(abs(spec.initial.alpha_c) ** 2))
        t_end = spec.t_end if spec.t_end > 0 else 1.0
        return fock_mod.auto_truncate(
            lambda n_max: factory(n_max, strict=False), spec.params, t_end,
            AUTO_TRUNCATE_TOL, start=start)
    if spec.initial.kind == "coherent":
        return fock_mod.default_n_max_coherent(spec.initial.alpha_c)
    return fock_mod.default_n_max_basis(spec.initial.n)


def simulate_spec(spec: RunSpec):
    """Resolve defaults and run the selected backend.

    Returns (trajectory, resolved spec) where the resolved spec carries the
    concrete dt, sample interval and cutoff that were actually used.
    """
    if spec.t_end is None or spec.t_end < 0:
        raise ConfigError("t_end must be >= 0")
    sample_interval = spec.sample_interval
    if sample_interval is None and spec.t_end > 0:
        sample_interval = spec.t_end / 1000.0

    if spec.model == "meanfield":
        initial = _meanfield_initial(spec)
        if spec.mode == "adaptive":
            control = StepControl(mode="adaptive",
                                  dt=mf_mod.default_step_control(
                                      spec.params, spec.t_end, initial).dt,
                                  rtol=spec.rtol, atol=spec.atol,
                                  sample_interval=sample_interval or 0.0)
        else:
            control = mf_mod.default_step_control(
                spec.params, spec.t_end, initial,
                sample_interval=sample_interval or 0.0)
            if spec.dt is not None:
                control = replace(control, dt=spec.dt)
        traj = mf_mod.simulate_meanfield(initial, spec.params, spec.t_end,
                                         control=control)
        resolved = replace(spec, dt=None if spec.mode == "adaptive"
                           else control.dt,
                           sample_interval=control.sample_interval or None)
        return traj, resolved

    n_max = _resolve_n_max(spec)
    initial = _fock_initial_factory(spec)(n_max)
    resolved = replace(spec, n_max=n_max, auto_n_max=False,
                       sample_interval=sample_interval)

    if spec.model in ("oracle", "rwa"):
        simulate = simulate_oracle if spec.model == "oracle" else simulate_rwa
        traj = simulate(initial, spec.params, spec.t_end,
                        sample_interval=sample_interval)
        return traj, resolved

    default = fock_mod.default_step_control(spec.params, n_max, spec.t_end,
                                            initial,
                                            sample_interval=sample_interval or 0.0)
    if spec.mode == "adaptive":
        control = StepControl(mode="adaptive", dt=default.dt, rtol=spec.rtol,
                              atol=spec.atol,
                              sample_interval=sample_interval or 0.0)
    elif spec.dt is not None:
        control = replace(default, dt=spec.dt)
    else:
        control = default
    traj = fock_mod.simulate_fock(initial, spec.params, spec.t_end,
                                  control=control, tail_tol=spec.tail_tol)
    if spec.mode == "fixed":
        resolved = replace(resolved, dt=control.dt)
    return traj, resolved


def _deviation_fit(spec: RunSpec, traj):
    channel = "alpha" if spec.model == "meanfield" else "pe"
    if len(traj.times) < 16:
        return None
    signal = traj.channels[channel]
    if np.iscomplexobj(signal):
        signal = signal.real
    # the exact-t_end sample may sit off the uniform cadence; drop it then
    for stop in (len(traj.times), len(traj.times) - 1):
        try:
            return sinusoid_deviation(traj.times[:stop], signal[:stop])
        except ValueError:
            continue
    return None


def summarize(spec: RunSpec, traj, resolved: RunSpec, wall_seconds) -> dict:
    """The documented summary keys for one finished run."""
    fit = _deviation_fit(spec, traj)
    if spec.model == "meanfield":
        norm_defect = float(np.max(traj.channels["constraint_defect"]))
        energy_drift = None
        tail = None
        n_max_used = None
    else:
        norm_defect = float(np.max(np.abs(traj.channels["norm2"] - 1.0)))
        energy = traj.channels["energy"]
        scale = max(abs(float(energy[0])), 1e-300)
        energy_drift = float(np.max(np.abs(energy - energy[0])) / scale)
        tail = float(np.max(traj.channels["tail_mass"]))
        n_max_used = resolved.n_max
    return {
        "norm_defect_max": norm_defect,
        "energy_drift_rel": energy_drift,
        "deviation_score": None if fit is None else fit.score,
        "dominant_omega": None if fit is None else fit.omega,
        "tail_mass_max": tail,
        "n_max_used": n_max_used,
        "wall_seconds": round(wall_seconds, 6),
    }


def _classify(exc) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, NumericalError):
        return EXIT_NUMERICAL
    if isinstance(exc, (ValueError, IndexError)):
        return EXIT_CONFIG
    if isinstance(exc, OSError):
        return EXIT_IO
    raise exc


def _write(path: Path, text: str, artifacts: list):
    path.write_text(text, encoding="utf-8")
    artifacts.append(str(path))


def run(spec: RunSpec, out_dir=None, svg=None) -> RunResult:
    """Execute one run and write its artifacts.

    ``out_dir`` / ``svg`` override the spec's output section (command-line
    flags). Never raises for expected failure classes; the status encodes
    them.
    """
    artifacts = []
    try:
        t0 = time.perf_counter()
        traj, resolved = simulate_spec(spec)
        wall = time.perf_counter() - t0
        summary = summarize(spec, traj, resolved, wall)

        out = Path(out_dir if out_dir is not None else spec.output.dir)
        out.mkdir(parents=True, exist_ok=True)
        want_svg = spec.output.svg if svg is None else svg
        _write(out / "resolved_config.json",
               summary_json(resolved_config(resolved)), artifacts)
        if spec.output.csv:
            _write(out / "trajectory.csv", write_csv(traj, spec.channels),
                   artifacts)
        if spec.output.json:
            _write(out / "trajectory.json",
                   trajectory_json(traj, spec.channels), artifacts)
        _write(out / "summary.json", summary_json(summary), artifacts)
        if want_svg:
            from .plotting import figures_for_run
            for name, svg_text in figures_for_run(spec.model, traj).items():
                _write(out / name, svg_text, artifacts)
        return RunResult(status=EXIT_OK, artifacts=artifacts, summary=summary)
    except Exception as exc:  # noqa: BLE001 - classified, unexpected re-raised
        return RunResult(status=_classify(exc), message=str(exc),
                         artifacts=artifacts)


def compare_run(spec: RunSpec, out_dir=None, svg=None) -> RunResult:
    """Run stencil + spectral + rotating-wave backends on one spec.

    Writes one trajectory per backend, a ``compare.json`` with per-backend
    summaries and cross-backend deltas, and an overlay figure.
    """
    if spec.model == "meanfield":
        return RunResult(status=EXIT_CONFIG,
                         message="compare applies to Fock-state models")
    artifacts = []
    try:
        t0 = time.perf_counter()
        fock_spec = replace(spec, model="fock")
        fock_traj, resolved = simulate_spec(fock_spec)
        initial = _fock_initial_factory(resolved)(resolved.n_max)
        times = fock_traj.times
        oracle_traj = simulate_oracle(initial, spec.params, spec.t_end,
                                      times=times)
        rwa_traj = simulate_rwa(initial, spec.params, spec.t_end, times=times)
        wall = time.perf_counter() - t0

        amp_diff = max(
            float(np.max(np.abs(a.to_vector() - b.to_vector())))
            for a, b in zip(fock_traj.states, oracle_traj.states))
        deltas = {
            "fock_vs_oracle_amp_max": amp_diff,
            "fock_vs_oracle_pe_max": float(np.max(np.abs(
                fock_traj.channels["pe"] - oracle_traj.channels["pe"]))),
            "fock_vs_rwa_pe_max": float(np.max(np.abs(
                fock_traj.channels["pe"] - rwa_traj.channels["pe"]))),
            "oracle_vs_rwa_pe_max": float(np.max(np.abs(
                oracle_traj.channels["pe"] - rwa_traj.channels["pe"]))),
        }
        summaries = {
            "fock": summarize(fock_spec, fock_traj, resolved, wall),
            "oracle": summarize(replace(spec, model="oracle"), oracle_traj,
                                resolved, 0.0),
            "rwa": summarize(replace(spec, model="rwa"), rwa_traj,
                             resolved, 0.0),
        }
        compare_doc = {"deltas": deltas, "summaries": summaries}

        out = Path(out_dir if out_dir is not None else spec.output.dir)
        out.mkdir(parents=True, exist_ok=True)
        want_svg = spec.output.svg if svg is None else svg
        _write(out / "resolved_config.json",
               summary_json(resolved_config(resolved)), artifacts)
        for name, traj in (("fock", fock_traj), ("oracle", oracle_traj),
                           ("rwa", rwa_traj)):
            if spec.output.csv:
                _write(out / f"{name}.csv", write_csv(traj, spec.channels),
                       artifacts)
            if spec.output.json:
                _write(out / f"{name}.json",
                       trajectory_json(traj, spec.channels), artifacts)
        _write(out / "compare.json", summary_json(compare_doc), artifacts)
        if want_svg and len(times) >= 2:
            from .plotting import compare_figure
            _write(out / "fig_compare_pe.svg",
                   compare_figure(times, {
                       "fock": fock_traj.channels["pe"],
                       "oracle": oracle_traj.channels["pe"],
                       "rwa": rwa_traj.channels["pe"],
                   }), artifacts)
        return RunResult(status=EXIT_OK, artifacts=artifacts,
                         summary=compare_doc)
    except Exception as exc:  # noqa: BLE001
        return RunResult(status=_classify(exc), message=str(exc),
                         artifacts=artifacts)


def _sweep_point(sweep: SweepSpec, omega0, omega_lambda, g_abs):
    template = sweep.template
    g0 = template.params.g
    phase = g0 / abs(g0) if abs(g0) > 0 else 1.0 + 0.0j
    row = {"omega0": omega0, "omega_lambda": omega_lambda, "g_abs": g_abs,
           "status": "ok", "deviation_score": None, "norm_defect_max": None,
           "dominant_omega": None}
    try:
        from .model import make_params
        spec = replace(template, params=make_params(omega0, omega_lambda,
                                                    g_abs * phase))
        t0 = time.perf_counter()
        traj, resolved = simulate_spec(spec)
        summary = summarize(spec, traj, resolved, time.perf_counter() - t0)
        row["deviation_score"] = summary["deviation_score"]
        row["norm_defect_max"] = summary["norm_defect_max"]
        row["dominant_omega"] = summary["dominant_omega"]
    except (NumericalError, ValueError, IndexError) as exc:
        row["status"] = f"failed:{type(exc).__name__}"
    return row


_SWEEP_FIELDS = ("omega0", "omega_lambda", "g_abs", "status",
                 "deviation_score", "norm_defect_max", "dominant_omega")


def sweep_run(sweep: SweepSpec, out_dir=None, jobs=1) -> RunResult:
    """Run every grid point and emit one summary row per point.

    Rows appear in deterministic grid order (omega0 major, then
    omega_lambda, then |g|) regardless of the worker count; a failing point
    is recorded in its row and does not abort the sweep.
    """
    artifacts = []
    try:
        points = list(itertools.product(sweep.omega0_values,
                                        sweep.omega_lambda_values,
                                        sweep.g_abs_values))
        jobs = max(1, int(jobs))
        if jobs == 1:
            rows = [_sweep_point(sweep, *point) for point in points]
        else:
            with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
                rows = list(pool.map(lambda p: _sweep_point(sweep, *p), points))

        out = Path(out_dir if out_dir is not None else sweep.template.output.dir)
        out.mkdir(parents=True, exist_ok=True)
        lines = [",".join(_SWEEP_FIELDS)]
        for row in rows:
            rendered = []
            for key in _SWEEP_FIELDS:
                value = row[key]
                if value is None:
                    rendered.append("")
                elif isinstance(value, str):
                    rendered.append(value)
                else:
                    rendered.append(repr(float(value)))
            lines.append(",".join(rendered))
        _write(out / "sweep.csv", "\n".join(lines) + "\n", artifacts)
        _write(out / "sweep.json", summary_json({"rows": rows}), artifacts)
        return RunResult(status=EXIT_OK, artifacts=artifacts,
                         summary={"rows": rows})
    except Exception as exc:  # noqa: BLE001
        return RunResult(status=_classify(exc), message=str(exc),
                         artifacts=artifacts)
