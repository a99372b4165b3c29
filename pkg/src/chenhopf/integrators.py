"""Time integration for the perturbed system and its variational equations.

A hand-rolled Dormand-Prince 5(4) pair with PI step-size control and the
standard quartic dense-output interpolant, plus a fixed-step classical RK4
for order checks. The shooting layer needs ~1e-12 endpoint accuracy over one
period, which the embedded pair reaches cheaply; RK4 would need wastefully
small steps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

#: state blow-up guard; the full system can diverge from bad seeds
BLOWUP_NORM = 1e12

_SAFETY = 0.9
_FAC_MIN, _FAC_MAX = 0.2, 5.0
# PI controller exponents for a 5th-order propagator
_ALPHA, _BETA = 0.7 / 5.0, 0.4 / 5.0

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# difference between the 5th- and embedded 4th-order weights
_ERR = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920,
                 -17253 / 339200, 22 / 525, -1 / 40])
# quartic dense-output coefficients: y(t+theta*h) = y + h*(K^T P) @ [theta..theta^4]
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])


class IntegrationError(RuntimeError):
    """Integration aborted; carries the last good time and state."""

    def __init__(self, message: str, last_time: float, last_state: np.ndarray):
        super().__init__(message)
        self.last_time = last_time
        self.last_state = np.array(last_state)


@dataclass(frozen=True)
class IntegratorConfig:
    """Method selection and accuracy knobs."""

    method: str = "adaptive_rk45"
    step: float = 1e-3            # fixed_rk4 only
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_steps: int = 10_000_000

    def __post_init__(self):
        if self.method not in ("adaptive_rk45", "fixed_rk4"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.step <= 0 or self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("step and tolerances must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution: strictly increasing times starting at 0."""

    times: np.ndarray
    states: np.ndarray


def _guard(t: float, y: np.ndarray, t_last: float, y_last: np.ndarray) -> None:
    if not np.all(np.isfinite(y)):
        raise IntegrationError(
            f"state became non-finite near t = {t:.6g}", t_last, y_last
        )
    if np.max(np.abs(y)) > BLOWUP_NORM:
        raise IntegrationError(
            f"state norm exceeded {BLOWUP_NORM:.0e} near t = {t:.6g} (blow-up)",
            t_last, y_last,
        )


def _adaptive_rk45(
    field: Callable[[np.ndarray], np.ndarray],
    u0: np.ndarray,
    t_end: float,
    config: IntegratorConfig,
    sample_times: np.ndarray | None,
):
    """Core stepper; returns (final_state, samples or None)."""
    y = np.array(u0, dtype=float)
    t = 0.0
    f0 = np.asarray(field(y), dtype=float)
    _guard(0.0, f0, 0.0, y)
    h = min(t_end, 0.01 * (1.0 + float(np.max(np.abs(y)))) / (1.0 + float(np.max(np.abs(f0)))))

    samples = None
    next_sample = 0
    if sample_times is not None:
        samples = np.empty((len(sample_times), y.size))
        while next_sample < len(sample_times) and sample_times[next_sample] <= 0.0:
            samples[next_sample] = y
            next_sample += 1

    k = np.empty((7, y.size))
    k[0] = f0
    err_prev = 1.0
    for _ in range(config.max_steps):
        if t >= t_end:
            break
        h = min(h, t_end - t)
        if h < 1e3 * np.finfo(float).tiny:
            raise IntegrationError(f"step size underflow at t = {t:.6g}", t, y)
        for i in range(1, 7):
            k[i] = field(y + h * (_A[i] @ k[:i]))
        y_new = y + h * (_B5 @ k)
        err_vec = h * (_ERR @ k)
        if not (np.all(np.isfinite(y_new)) and np.all(np.isfinite(err_vec))):
            _guard(t + h, y_new, t, y)
        scale = config.abs_tol + config.rel_tol * max(
            float(np.max(np.abs(y))), float(np.max(np.abs(y_new)))
        )
        err = float(np.max(np.abs(err_vec))) / scale
        if err <= 1.0:
            if samples is not None and next_sample < len(sample_times):
                # dense output over (t, t+h]
                q = (k.T @ _P) * h
                while next_sample < len(sample_times) and sample_times[next_sample] <= t + h + 1e-15:
                    theta = min(1.0, (sample_times[next_sample] - t) / h)
                    powers = np.array([theta, theta**2, theta**3, theta**4])
                    samples[next_sample] = y + q @ powers
                    next_sample += 1
            t += h
            y = y_new
            _guard(t, y, t - h, y)
            k[0] = field(y)
            fac = _SAFETY * (err + 1e-20) ** (-_ALPHA) * err_prev ** _BETA
            err_prev = max(err, 1e-4)
            h *= min(_FAC_MAX, max(_FAC_MIN, fac))
        else:
            h *= max(_FAC_MIN, min(1.0, _SAFETY * err ** (-0.2)))
    else:
        raise IntegrationError(
            f"exceeded max_steps = {config.max_steps} before t_end", t, y
        )
    if samples is not None:
        while next_sample < len(sample_times):
            samples[next_sample] = y
            next_sample += 1
    return y, samples


def _fixed_rk4(
    field: Callable[[np.ndarray], np.ndarray],
    u0: np.ndarray,
    t_end: float,
    config: IntegratorConfig,
    sample_times: np.ndarray | None,
):
    n_steps = max(1, math.ceil(t_end / config.step))
    if sample_times is not None and len(sample_times) > 1:
        # land exactly on the (equispaced) sample times
        blocks = len(sample_times) - 1
        n_steps = blocks * max(1, math.ceil(n_steps / blocks))
    h = t_end / n_steps
    if n_steps > config.max_steps:
        raise IntegrationError(
            f"fixed grid needs {n_steps} steps > max_steps", 0.0, np.asarray(u0)
        )
    y = np.array(u0, dtype=float)
    samples = None
    next_sample = 0
    if sample_times is not None:
        samples = np.empty((len(sample_times), y.size))
        while next_sample < len(sample_times) and sample_times[next_sample] <= 0.0:
            samples[next_sample] = y
            next_sample += 1
    t = 0.0
    for i in range(n_steps):
        k1 = field(y)
        k2 = field(y + 0.5 * h * k1)
        k3 = field(y + 0.5 * h * k2)
        k4 = field(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = (i + 1) * h
        _guard(t, y, t - h, y)
        if samples is not None:
            while next_sample < len(sample_times) and sample_times[next_sample] <= t + 1e-12 * t_end:
                samples[next_sample] = y
                next_sample += 1
    if samples is not None:
        while next_sample < len(sample_times):
            samples[next_sample] = y
            next_sample += 1
    return y, samples


def _run(field, u0, t_end, config, sample_times):
    if config.method == "adaptive_rk45":
        return _adaptive_rk45(field, u0, t_end, config, sample_times)
    return _fixed_rk4(field, u0, t_end, config, sample_times)


def integrate(
    field: Callable[[np.ndarray], np.ndarray],
    u0,
    t_end: float,
    config: IntegratorConfig | None = None,
    sample_count: int = 2,
) -> Trajectory:
    """Integrate an autonomous field, sampling sample_count equispaced times.

    Samples span [0, t_end] inclusive; the first is the initial state and the
    last is set to the computed endpoint.
    """
    if t_end <= 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    if sample_count < 2:
        raise ValueError(f"sample_count must be >= 2, got {sample_count}")
    config = config or IntegratorConfig()
    u0 = np.asarray(u0, dtype=float)
    if not np.all(np.isfinite(u0)):
        raise ValueError("initial state must be finite")
    sample_times = np.linspace(0.0, t_end, sample_count)
    final, samples = _run(field, u0, t_end, config, sample_times)
    samples[-1] = final
    return Trajectory(times=sample_times, states=samples)


def integrate_with_variational(
    field: Callable[[np.ndarray], np.ndarray],
    field_jacobian: Callable[[np.ndarray], np.ndarray],
    u0,
    t_end: float,
    config: IntegratorConfig | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Flow endpoint and the derivative of the flow map w.r.t. u0.

    Integrates the state together with the 4x4 variational matrix (identity
    at t = 0) as one 20-dimensional system; the returned matrix is the
    monodromy matrix when t_end is the orbit period.
    """
    if t_end <= 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    config = config or IntegratorConfig()
    u0 = np.asarray(u0, dtype=float)
    n = u0.size

    def augmented(y: np.ndarray) -> np.ndarray:
        state, mat = y[:n], y[n:].reshape(n, n)
        return np.concatenate([field(state), (field_jacobian(state) @ mat).ravel()])

    y0 = np.concatenate([u0, np.eye(n).ravel()])
    final, _ = _run(augmented, y0, t_end, config, None)
    return final[:n], final[n:].reshape(n, n)
