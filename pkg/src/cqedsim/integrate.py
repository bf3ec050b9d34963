"""Explicit Runge-Kutta integration over flat real state vectors.

State is always a 1-D float64 array; dynamics modules own the encoding of
complex components (interleaved re/im pairs via ``ndarray.view``). Two
drivers are provided: classical fixed-step RK4 and an embedded
Runge-Kutta-Fehlberg 4(5) pair with error control (the 4th-order solution
is propagated, the 5th provides the error estimate).

Sampling emits the state at the accepted step nearest each requested sample
time; there is no dense output, so ``sample_interval`` should not be smaller
than the typical step. All stepping is deterministic: identical inputs
produce bitwise-identical trajectories.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteError, StepUnderflowError
from .model import Trajectory

__all__ = ["StepControl", "rk4_step", "integrate_fixed", "integrate_adaptive",
           "snap_dt_to_interval"]

_TIME_EPS = 1e-12


def snap_dt_to_interval(dt, sample_interval):
    """Shrink ``dt`` minimally so ``sample_interval`` is an exact multiple.

    Used by the default step-control builders so that sample times coincide
    with step times (exactly uniform sample grids, no sampling jitter).
    """
    if sample_interval <= 0.0 or dt <= 0.0 or sample_interval <= dt:
        return dt
    return sample_interval / math.ceil(sample_interval / dt - 1e-9)


@dataclass(frozen=True)
class StepControl:
    """Step-size and sampling policy for one integration.

    ``dt`` is the fixed step in fixed mode and the initial step in adaptive
    mode. Adaptive steps stay inside [dt_min, dt_max]; the error norm is the
    RMS of component errors scaled by atol + rtol*|y|.
    """

    mode: str = "fixed"
    dt: float = 1e-3
    rtol: float = 1e-9
    atol: float = 1e-12
    dt_min: float = 1e-12
    dt_max: float = math.inf
    sample_interval: float = 0.0

    def __post_init__(self):
        if self.mode not in ("fixed", "adaptive"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not self.dt > 0.0:
            raise ValueError("dt must be > 0")
        if not (self.rtol > 0.0 and self.atol > 0.0):
            raise ValueError("rtol and atol must be > 0")
        if not self.dt_min <= self.dt_max:
            raise ValueError("dt_min must be <= dt_max")
        if self.sample_interval < 0.0:
            raise ValueError("sample_interval must be >= 0")


def _check_finite(k, t):
    if not np.all(np.isfinite(k)):
        raise NonFiniteError(f"non-finite derivative at t = {t!r}", t=t)


def rk4_step(rhs, y, t, dt):
    """One classical 4-stage Runge-Kutta step; local error O(dt^5).

    Raises :class:`NonFiniteError` if any stage evaluates to NaN/Inf.
    """
    if not dt > 0.0:
        raise ValueError("dt must be > 0")
    k1 = rhs(y, t)
    _check_finite(k1, t)
    k2 = rhs(y + (0.5 * dt) * k1, t + 0.5 * dt)
    _check_finite(k2, t)
    k3 = rhs(y + (0.5 * dt) * k2, t + 0.5 * dt)
    _check_finite(k3, t)
    k4 = rhs(y + dt * k3, t + dt)
    _check_finite(k4, t)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class _Sampler:
    """Collects (t, y) pairs at accepted steps nearest the sample cadence.

    Keeps a reference (not a copy) to the previous accepted state; both
    drivers rebind rather than mutate their state array, so this is safe.
    """

    def __init__(self, t0, t1, y0, interval):
        self.t1 = t1
        self.interval = interval
        self.times = [t0]
        self.states = [np.array(y0, dtype=float)]
        self.next_target = t0 + interval if interval > 0.0 else t1
        self.prev_t = t0
        self.prev_y = y0

    def offer(self, t, y):
        scale = max(1.0, abs(t))
        if self.interval > 0.0:
            while t >= self.next_target - _TIME_EPS * scale:
                prev_closer = (self.next_target - self.prev_t
                               <= t - self.next_target)
                if prev_closer and self.prev_t > self.times[-1] + _TIME_EPS * scale:
                    self._emit(self.prev_t, self.prev_y)
                else:
                    self._emit(t, y)
                self.next_target += self.interval
                if self.next_target > self.t1 + _TIME_EPS * scale:
                    break
        self.prev_t = t
        self.prev_y = y

    def finish(self, t, y):
        self._emit(t, y)

    def _emit(self, t, y):
        if t > self.times[-1] + _TIME_EPS * max(1.0, abs(t)):
            self.times.append(t)
            self.states.append(np.array(y, dtype=float))


def integrate_fixed(rhs, y0, t0, t1, control: StepControl,
                    postprocess=None) -> Trajectory:
    """Integrate with uniform RK4 steps of ``control.dt``.

    The final step is shortened exactly to land on ``t1``. ``postprocess``,
    when given, maps the state after every accepted step (manifold
    projections and similar repairs). Returns a trajectory of flat state
    vectors; ``meta['n_steps']`` records the step count.
    """
    if control.mode != "fixed":
        raise ValueError("control.mode must be 'fixed'")
    if t1 < t0:
        raise ValueError("t1 must be >= t0")
    y = np.array(y0, dtype=float)
    span = t1 - t0
    sampler = _Sampler(t0, t1, y, control.sample_interval)
    if span == 0.0:
        return Trajectory(times=np.array([t0]), states=sampler.states,
                          meta={"n_steps": 0})
    dt = control.dt
    n_steps = max(1, math.ceil(span / dt - 1e-9))
    for i in range(n_steps):
        t = t0 + i * dt
        step = dt if i < n_steps - 1 else t1 - t
        y = rk4_step(rhs, y, t, step)
        if postprocess is not None:
            y = postprocess(y)
        t_new = t0 + (i + 1) * dt if i < n_steps - 1 else t1
        sampler.offer(t_new, y)
    sampler.finish(t1, y)
    return Trajectory(times=np.array(sampler.times), states=sampler.states,
                      meta={"n_steps": n_steps})


# Fehlberg 4(5) tableau.
_A = (
    (),
    (1.0 / 4.0,),
    (3.0 / 32.0, 9.0 / 32.0),
    (1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0),
    (439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0),
    (-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0),
)
_C = (0.0, 1.0 / 4.0, 3.0 / 8.0, 12.0 / 13.0, 1.0, 0.5)
_B4 = (25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0)
_B5 = (16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0,
       2.0 / 55.0)

_SAFETY = 0.9
_SHRINK_MIN = 0.2
_GROW_MAX = 5.0


def _rkf45_step(rhs, y, t, dt):
    """One embedded step: returns (y4, scaled-free error vector)."""
    ks = []
    for i in range(6):
        yi = y
        for aij, k in zip(_A[i], ks):
            yi = yi + (dt * aij) * k
        k = rhs(yi, t + _C[i] * dt)
        _check_finite(k, t)
        ks.append(k)
    y4 = y
    y5 = y
    for b4, b5, k in zip(_B4, _B5, ks):
        if b4 != 0.0:
            y4 = y4 + (dt * b4) * k
        if b5 != 0.0:
            y5 = y5 + (dt * b5) * k
    return y4, y5 - y4


def integrate_adaptive(rhs, y0, t0, t1, control: StepControl,
                       postprocess=None) -> Trajectory:
    """Integrate with the embedded 4(5) pair and standard step control.

    Accepted when the scaled RMS error is <= 1; the step update is
    dt * clamp(0.9 * err^(-1/5), 0.2, 5.0), clamped into
    [dt_min, dt_max]. A rejected step at dt_min raises
    :class:`StepUnderflowError` unless dt_min == dt_max, which degenerates
    to fixed-step behavior. ``postprocess``, when given, maps the state
    after every accepted step.

    ``meta`` records accepted/rejected step counts and the sum of absolute
    (unscaled RMS) error estimates over accepted steps.
    """
    if control.mode != "adaptive":
        raise ValueError("control.mode must be 'adaptive'")
    if t1 < t0:
        raise ValueError("t1 must be >= t0")
    y = np.array(y0, dtype=float)
    sampler = _Sampler(t0, t1, y, control.sample_interval)
    if t1 == t0:
        return Trajectory(times=np.array([t0]), states=sampler.states,
                          meta={"n_accepted": 0, "n_rejected": 0,
                                "err_estimate_sum": 0.0})
    dt = min(max(control.dt, control.dt_min), control.dt_max, t1 - t0)
    t = t0
    n_acc = n_rej = 0
    err_sum = 0.0
    degenerate = control.dt_min == control.dt_max
    while t < t1 - _TIME_EPS * max(1.0, abs(t1)):
        step = min(dt, t1 - t)
        y_new, diff = _rkf45_step(rhs, y, t, step)
        scale = control.atol + control.rtol * np.abs(y)
        err = float(np.sqrt(np.mean((diff / scale) ** 2)))
        if err <= 1.0 or (degenerate and step <= control.dt_min):
            t = t1 if t1 - t <= step * (1.0 + _TIME_EPS) else t + step
            y = y_new if postprocess is None else postprocess(y_new)
            n_acc += 1
            err_sum += float(np.sqrt(np.mean(diff ** 2)))
            sampler.offer(t, y)
        else:
            n_rej += 1
            if step <= control.dt_min * (1.0 + _TIME_EPS):
                raise StepUnderflowError(
                    f"tolerance unreachable at t = {t!r} with dt_min = "
                    f"{control.dt_min!r} (scaled error {err:.3g})"
                )
        factor = _GROW_MAX if err == 0.0 else min(
            _GROW_MAX, max(_SHRINK_MIN, _SAFETY * err ** -0.2))
        dt = min(max(step * factor, control.dt_min), control.dt_max)
    sampler.finish(t1, y)
    return Trajectory(times=np.array(sampler.times), states=sampler.states,
                      meta={"n_accepted": n_acc, "n_rejected": n_rej,
                            "err_estimate_sum": err_sum})
