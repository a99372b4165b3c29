"""Locate the bifurcating periodic orbits by Newton shooting.

An orbit is a root of the 5-dimensional system

    phi_T(u) - u = 0            (return map, 4 equations)
    <u - u_seed, F(u_seed)> = 0 (phase anchor through the seed)

solved jointly in (u, T): the perturbed period drifts by O(epsilon) from the
unperturbed one, so fixed-period shooting would stall at epsilon-sized
residuals. The Jacobian comes from variational integration (monodromy block,
plus the field at the endpoint as the period column).

The return-map system also has a spurious solution manifold as T -> 0, where
phi_T(u) - u vanishes for every u; a period trust region around the seed
keeps the damped Newton iteration away from it (the genuine root is only
O(epsilon) away in period).
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .averaging import averaged_zeros
from .chen import (
    RegimeConfig,
    RegimeError,
    check_zero_hopf_conditions,
    standard_form_field,
    standard_form_jacobian,
)
from .integrators import IntegrationError, IntegratorConfig, Trajectory, integrate, integrate_with_variational
from .linear_flow import period
from .numerics import QuarticSpectrum, SingularMatrixError, eig4, newton_solve

#: accepted orbits must close up to this return-map residual
RESIDUAL_GATE = 1e-9
#: accepted orbits (epsilon > 0) must carry a Floquet multiplier this close to 1
TRIVIAL_MULTIPLIER_TOL = 1e-5
#: the two branches must be at least this far apart
DISTINCTNESS_TOL = 1e-6

_PERIOD_TRUST = (0.25, 4.0)     # allowed T range, relative to the seed period
_PENALTY = 1e6


class ShootingError(RuntimeError):
    """Shooting did not certify an orbit; carries whatever diagnostics exist."""

    def __init__(self, message: str, report=None, partial=None):
        super().__init__(message)
        self.report = report
        self.partial = partial


@dataclass(frozen=True)
class PeriodicOrbit:
    """A numerically certified periodic solution."""

    epsilon: float
    initial_state: np.ndarray
    period: float
    residual: float
    multipliers: QuarticSpectrum
    frame: str                    # "scaled" or "original"
    branch: int                   # 1 or 2; 0 for direct unlabelled shots

    def trivial_multiplier_defect(self) -> float:
        return min(abs(m - 1.0) for m in self.multipliers.values)


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    branch: int
    distance_to_p: float | None
    period_error: float | None
    residual: float | None
    max_multiplier_modulus: float | None
    converged: bool


@dataclass(frozen=True)
class SweepResult:
    rows: list[SweepRow]
    slope_by_branch: dict[int, float | None]


def shoot(
    config: RegimeConfig,
    seed_state,
    seed_period: float,
    branch: int = 0,
    integrator: IntegratorConfig | None = None,
    newton_tol: float = 3e-10,
    max_iter: int = 20,
) -> PeriodicOrbit:
    """Newton-shoot a periodic orbit of the standard-form system.

    newton_tol must sit above the one-period integration error so that an
    exactly periodic seed (the epsilon = 0 case, whose shooting Jacobian is
    singular) converges before any Newton step is attempted.

    Raises ShootingError when Newton does not converge or the certificate
    gates fail; integration blow-up propagates as IntegrationError.
    """
    if seed_period <= 0:
        raise ValueError(f"seed_period must be positive, got {seed_period}")
    integrator = integrator or IntegratorConfig()
    seed = np.asarray(seed_state, dtype=float)
    anchor = standard_form_field(config, seed)
    field = lambda s: standard_form_field(config, s)
    jac = lambda s: standard_form_jacobian(config, s)
    t_lo, t_hi = _PERIOD_TRUST[0] * seed_period, _PERIOD_TRUST[1] * seed_period

    def residual(v: np.ndarray) -> np.ndarray:
        u, T = v[:4], v[4]
        if not (t_lo <= T <= t_hi):
            return np.full(5, _PENALTY * (1.0 + abs(T)))
        end = integrate(field, u, T, integrator).states[-1]
        return np.append(end - u, (u - seed) @ anchor)

    def jacobian(v: np.ndarray) -> np.ndarray:
        u, T = v[:4], v[4]
        end, mono = integrate_with_variational(field, jac, u, T, integrator)
        out = np.zeros((5, 5))
        out[:4, :4] = mono - np.eye(4)
        out[:4, 4] = field(end)
        out[4, :4] = anchor
        return out

    try:
        report = newton_solve(
            residual, np.append(seed, seed_period),
            jacobian=jacobian, tol=newton_tol, max_iter=max_iter,
        )
    except SingularMatrixError as exc:
        raise ShootingError(f"singular shooting Jacobian: {exc}") from exc
    if not report.converged:
        raise ShootingError(
            f"shooting Newton did not converge (best residual {report.residual_norm:.3e})",
            report=report,
        )
    u_star, t_star = report.root[:4], float(report.root[4])
    if report.residual_norm > RESIDUAL_GATE:
        raise ShootingError(
            f"residual {report.residual_norm:.3e} above acceptance gate {RESIDUAL_GATE:.0e}",
            report=report,
        )
    _, mono = integrate_with_variational(field, jac, u_star, t_star, integrator)
    multipliers = eig4(mono)
    orbit = PeriodicOrbit(
        epsilon=config.epsilon,
        initial_state=u_star,
        period=t_star,
        residual=report.residual_norm,
        multipliers=multipliers,
        frame="scaled",
        branch=branch,
    )
    # autonomous orbits carry the multiplier 1 exactly; at epsilon = 0 the
    # monodromy is the identity and the quadruple eigenvalue cannot be
    # resolved to this tolerance, so the gate applies to epsilon > 0 only
    if config.epsilon > 0 and orbit.trivial_multiplier_defect() > TRIVIAL_MULTIPLIER_TOL:
        raise ShootingError(
            f"no Floquet multiplier within {TRIVIAL_MULTIPLIER_TOL:.0e} of 1 "
            f"(closest defect {orbit.trivial_multiplier_defect():.3e})",
            report=report,
        )
    return orbit


def _require_admissible(config: RegimeConfig) -> None:
    report = check_zero_hopf_conditions(config.params)
    if not report.overall:
        raise RegimeError(
            "zero-Hopf hypotheses violated: " + "; ".join(report.failed())
        )


def find_bifurcating_orbits(
    config: RegimeConfig, integrator: IntegratorConfig | None = None
) -> tuple[PeriodicOrbit, PeriodicOrbit]:
    """Shoot both orbits seeded at the averaged zeros.

    At epsilon = 0 the seeds are already periodic points of the isochronous
    system and come back unchanged.
    """
    _require_admissible(config)
    zeros = averaged_zeros(config)
    t0 = period(config).period
    orbits = []
    for branch, zero in enumerate(zeros, start=1):
        try:
            orbits.append(shoot(config, zero.point, t0, branch=branch, integrator=integrator))
        except (ShootingError, IntegrationError) as exc:
            raise ShootingError(
                f"branch {branch} failed: {exc}",
                partial=tuple(orbits),
            ) from exc
    sep = float(np.linalg.norm(orbits[0].initial_state - orbits[1].initial_state))
    if sep <= DISTINCTNESS_TOL:
        raise ShootingError(
            f"branches collapsed: |u1 - u2| = {sep:.3e} <= {DISTINCTNESS_TOL:.0e}",
            partial=tuple(orbits),
        )
    return orbits[0], orbits[1]


def continuation_sweep(
    config: RegimeConfig,
    epsilons,
    integrator: IntegratorConfig | None = None,
) -> SweepResult:
    """Shoot both branches over an ascending epsilon grid.

    Each epsilon re-seeds from the previous converged orbit of its branch
    (the first from the averaged zero), so Newton stays inside its basin as
    the orbits move away from the averaged prediction. Failures are recorded
    in-row and the sweep continues.
    """
    eps_list = [float(e) for e in epsilons]
    if not eps_list:
        raise ValueError("need at least one epsilon")
    if any(e <= 0 for e in eps_list):
        raise ValueError(f"epsilons must be strictly positive, got {eps_list}")
    if any(b <= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError(f"epsilons must be strictly ascending, got {eps_list}")
    _require_admissible(config)
    zeros = averaged_zeros(config)
    t0 = period(config).period

    rows: list[SweepRow] = []
    slopes: dict[int, float | None] = {}
    for branch, zero in enumerate(zeros, start=1):
        seed_u, seed_t = zero.point, t0
        eps_ok, dist_ok = [], []
        branch_rows = []
        for eps in eps_list:
            cfg = config.with_epsilon(eps)
            try:
                orbit = shoot(cfg, seed_u, seed_t, branch=branch, integrator=integrator)
            except (ShootingError, IntegrationError):
                branch_rows.append(SweepRow(
                    epsilon=eps, branch=branch, distance_to_p=None,
                    period_error=None, residual=None,
                    max_multiplier_modulus=None, converged=False,
                ))
                continue
            dist = float(np.linalg.norm(orbit.initial_state - zero.point))
            branch_rows.append(SweepRow(
                epsilon=eps,
                branch=branch,
                distance_to_p=dist,
                period_error=abs(orbit.period - t0),
                residual=orbit.residual,
                max_multiplier_modulus=max(abs(m) for m in orbit.multipliers.values),
                converged=True,
            ))
            eps_ok.append(eps)
            dist_ok.append(dist)
            seed_u, seed_t = orbit.initial_state, orbit.period
        if len(eps_ok) >= 2 and all(v > 0 for v in dist_ok):
            slopes[branch] = float(np.polyfit(np.log(eps_ok), np.log(dist_ok), 1)[0])
        else:
            slopes[branch] = None
        rows.extend(branch_rows)
    return SweepResult(rows=rows, slope_by_branch=slopes)


def unscale_orbit(orbit: PeriodicOrbit) -> PeriodicOrbit:
    """Map a scaled-frame orbit back to the original coordinates.

    The standard form was reached by shrinking all coordinates by epsilon, so
    the original-frame orbit starts at epsilon * u and runs under the full
    field with (b, r) replaced by (eps*b, eps*r); the closure defect scales
    by exactly epsilon and the monodromy is similarity-invariant.
    """
    if orbit.frame != "scaled":
        raise ValueError(f"orbit already in frame {orbit.frame!r}; unscale applies once")
    return replace(
        orbit,
        initial_state=orbit.epsilon * orbit.initial_state,
        residual=orbit.epsilon * orbit.residual,
        frame="original",
    )


def orbit_trajectory(
    config: RegimeConfig,
    orbit: PeriodicOrbit,
    samples: int,
    integrator: IntegratorConfig | None = None,
) -> Trajectory:
    """Sample one full period of an orbit, respecting its frame."""
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")
    if orbit.frame == "original":
        if orbit.epsilon == 0:
            # the original-frame image of an unperturbed orbit is the origin
            times = np.linspace(0.0, orbit.period, samples)
            return Trajectory(times=times, states=np.zeros((samples, 4)))
        scaled_start = orbit.initial_state / orbit.epsilon
    else:
        scaled_start = orbit.initial_state
    traj = integrate(
        lambda s: standard_form_field(config, s),
        scaled_start, orbit.period, integrator or IntegratorConfig(),
        sample_count=samples,
    )
    if orbit.frame == "original":
        return Trajectory(times=traj.times, states=orbit.epsilon * traj.states)
    return traj


def recurrence_defect(
    config: RegimeConfig,
    orbit: PeriodicOrbit,
    periods: int = 1,
    integrator: IntegratorConfig | None = None,
) -> float:
    """Fresh-integration closure check over a number of periods.

    Original-frame orbits are integrated under the full field with the
    dissipation coefficients shrunk by epsilon, exactly as the frame mapping
    promises.
    """
    from .chen import ChenParams, vector_field_full

    if orbit.frame == "original":
        p = config.params
        full = ChenParams(a=p.a, b=config.epsilon * p.b, c=p.a, d=p.d,
                          r=config.epsilon * p.r)
        field = lambda s: vector_field_full(full, s)
    else:
        field = lambda s: standard_form_field(config, s)
    end = integrate(
        field, orbit.initial_state, periods * orbit.period,
        integrator or IntegratorConfig(),
    ).states[-1]
    return float(np.max(np.abs(end - orbit.initial_state)))
