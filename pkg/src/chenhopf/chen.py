"""The hyperchaotic Chen vector field and its small-parameter regime.

Three parameterizations of the same model appear here:

* the full five-coefficient field (general ``c``),
* the small-dissipation field where ``b`` and ``r`` enter multiplied by
  ``epsilon`` (obtained by ``c = a`` and the substitution
  ``(b, r) -> (eps*b, eps*r)``),
* the averaging standard form ``u' = L(u) + eps * N(u)`` reached from the
  previous one by shrinking all four coordinates by ``eps``; the linear part
  ``L`` keeps only the (x, y) rotation block and the nonlinear part ``N``
  carries every remaining term.

The origin is an equilibrium for every parameter choice; it is a zero-Hopf
equilibrium (two zero eigenvalues plus a purely imaginary pair) exactly in
the regime the admissibility report checks.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .numerics import QuarticSpectrum


class RegimeError(ValueError):
    """Parameters outside the regime an operation is defined on."""


@dataclass(frozen=True)
class ChenParams:
    """The five model coefficients."""

    a: float
    b: float
    c: float
    d: float
    r: float

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "r"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"coefficient {name} must be finite")


@dataclass(frozen=True)
class RegimeConfig:
    """Parameters pinned to the bifurcation regime plus the small parameter.

    Requires ``c == a`` exactly, ``epsilon >= 0`` and ``d != 0`` (the averaged
    zeros divide by ``d``).
    """

    params: ChenParams
    epsilon: float = 0.0

    def __post_init__(self):
        if self.params.c != self.params.a:
            raise RegimeError(
                f"regime requires c == a, got c={self.params.c}, a={self.params.a}"
            )
        if not (math.isfinite(self.epsilon) and self.epsilon >= 0):
            raise ValueError(f"epsilon must be finite and >= 0, got {self.epsilon}")
        if self.params.d == 0:
            raise RegimeError("regime requires d != 0")

    @classmethod
    def make(cls, a: float, b: float, d: float, r: float, epsilon: float = 0.0) -> "RegimeConfig":
        return cls(ChenParams(a=a, b=b, c=a, d=d, r=r), epsilon)

    def with_epsilon(self, epsilon: float) -> "RegimeConfig":
        return RegimeConfig(self.params, epsilon)


@dataclass(frozen=True)
class ConditionReport:
    """Which zero-Hopf hypotheses hold, with the signed quantities behind them."""

    c_equals_a: bool
    a_times_a_plus_d: float
    a_condition_holds: bool        # a*(a+d) < 0
    b_times_a_plus_d_times_r: float
    b_condition_holds: bool        # b*(a+d)*r < 0
    d_nonzero: bool
    overall: bool

    def failed(self) -> list[str]:
        out = []
        if not self.c_equals_a:
            out.append("c == a")
        if not self.a_condition_holds:
            out.append("a*(a+d) < 0")
        if not self.b_condition_holds:
            out.append("b*(a+d)*r < 0")
        if not self.d_nonzero:
            out.append("d != 0")
        return out


def canonical_config(epsilon: float = 0.0) -> RegimeConfig:
    """The reference admissible parameter set used throughout tests and docs."""
    return RegimeConfig.make(a=-1.0, b=-1.0, d=2.0, r=1.0, epsilon=epsilon)


def _state(state) -> np.ndarray:
    s = np.asarray(state, dtype=float)
    if s.shape != (4,):
        raise ValueError(f"state must have 4 components, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise ValueError(f"state contains non-finite entries: {s!r}")
    return s


def vector_field_full(params: ChenParams, state) -> np.ndarray:
    """Right-hand side of the full model."""
    x, y, z, w = _state(state)
    a, b, c, d, r = params.a, params.b, params.c, params.d, params.r
    return np.array([
        a * (y - x) + w,
        d * x + c * y - x * z,
        x * y - b * z,
        y * z + r * w,
    ])


def jacobian_full(params: ChenParams, state) -> np.ndarray:
    """State Jacobian of the full model."""
    x, y, z, w = _state(state)
    a, b, c, d, r = params.a, params.b, params.c, params.d, params.r
    return np.array([
        [-a, a, 0.0, 1.0],
        [d - z, c, -x, 0.0],
        [y, x, -b, 0.0],
        [0.0, z, y, r],
    ])


def origin_char_poly(params: ChenParams) -> np.ndarray:
    """Characteristic polynomial at the origin, monic in descending powers.

    Expanded from the factored form
    ``(r - l)(b + l)(a(c + d - l) + (c - l) l)``.
    """
    a, b, c, d, r = params.a, params.b, params.c, params.d, params.r
    lin1 = np.array([-1.0, r])                       # r - l
    lin2 = np.array([1.0, b])                        # b + l
    quad = np.array([-1.0, c - a, a * (c + d)])      # -l^2 + (c-a) l + a(c+d)
    return np.polymul(np.polymul(lin1, lin2), quad)


def origin_eigenvalues(params: ChenParams) -> QuarticSpectrum:
    """Eigenvalues of the linearization at the origin, in closed form.

    {r, -b, ((c - a) +/- sqrt((a + c)^2 + 4 a d)) / 2}; the square root goes
    complex when the radicand is negative.
    """
    a, b, c, d, r = params.a, params.b, params.c, params.d, params.r
    disc = cmath.sqrt((a + c) ** 2 + 4 * a * d)
    return QuarticSpectrum.from_iterable([
        complex(r), complex(-b), ((c - a) + disc) / 2, ((c - a) - disc) / 2,
    ])


def check_zero_hopf_conditions(params: ChenParams) -> ConditionReport:
    """Report (never reject) the zero-Hopf bifurcation hypotheses.

    The hypotheses are ``c == a`` exactly, ``a(a+d) < 0`` (so the origin
    carries a purely imaginary pair at epsilon = 0), ``b(a+d)r < 0`` (so the
    averaged map has a real pair of zeros), and ``d != 0``.
    """
    a, b, c, d, r = params.a, params.b, params.c, params.d, params.r
    a_val = a * (a + d)
    b_val = b * (a + d) * r
    c_ok = c == a
    a_ok = a_val < 0
    b_ok = b_val < 0
    d_ok = d != 0
    return ConditionReport(
        c_equals_a=c_ok,
        a_times_a_plus_d=a_val,
        a_condition_holds=a_ok,
        b_times_a_plus_d_times_r=b_val,
        b_condition_holds=b_ok,
        d_nonzero=d_ok,
        overall=c_ok and a_ok and b_ok and d_ok,
    )


def omega(params: ChenParams) -> float:
    """Angular frequency sqrt(-a(a+d)) of the unperturbed rotation."""
    rad = -params.a * (params.a + params.d)
    if rad <= 0:
        raise RegimeError(
            f"elliptic case required: a*(a+d) = {-rad} must be negative"
        )
    return math.sqrt(rad)


def vector_field_scaled(config: RegimeConfig, state) -> np.ndarray:
    """Field with the dissipation coefficients shrunk by epsilon.

    Identical to the full field with parameters (a, eps*b, a, d, eps*r).
    """
    x, y, z, w = _state(state)
    a, b, d, r = config.params.a, config.params.b, config.params.d, config.params.r
    eps = config.epsilon
    return np.array([
        a * (y - x) + w,
        d * x + a * y - x * z,
        x * y - b * eps * z,
        y * z + r * eps * w,
    ])


def split_standard_form(config: RegimeConfig, state) -> tuple[np.ndarray, np.ndarray]:
    """Linear part and perturbation of the averaging standard form.

    The standard form is reached from the scaled field by shrinking all four
    coordinates by epsilon; its right-hand side at a state s is
    ``linear + epsilon * perturbation`` for the two arrays returned here.
    The linear part is independent of b, r and epsilon.
    """
    x, y, z, w = _state(state)
    a, b, d, r = config.params.a, config.params.b, config.params.d, config.params.r
    linear = np.array([a * (y - x) + w, d * x + a * y, 0.0, 0.0])
    perturbation = np.array([0.0, -x * z, x * y - b * z, y * z + r * w])
    return linear, perturbation


def standard_form_field(config: RegimeConfig, state) -> np.ndarray:
    """Full right-hand side of the averaging standard form."""
    linear, perturbation = split_standard_form(config, state)
    return linear + config.epsilon * perturbation


def standard_form_jacobian(config: RegimeConfig, state) -> np.ndarray:
    """State Jacobian of the averaging standard form (for variational flows)."""
    x, y, z, w = _state(state)
    a, b, d, r = config.params.a, config.params.b, config.params.d, config.params.r
    eps = config.epsilon
    return np.array([
        [-a, a, 0.0, 1.0],
        [d - eps * z, a, -eps * x, 0.0],
        [eps * y, eps * x, -eps * b, 0.0],
        [0.0, eps * z, eps * y, eps * r],
    ])


def linear_part_matrix(config: RegimeConfig) -> np.ndarray:
    """Constant matrix of the standard form's linear part."""
    a, d = config.params.a, config.params.d
    return np.array([
        [-a, a, 0.0, 1.0],
        [d, a, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ])


def random_admissible_config(
    rng: np.random.Generator, epsilon: float = 0.0,
    low: float = 0.5, high: float = 1.6,
) -> RegimeConfig:
    """Draw parameters satisfying every zero-Hopf hypothesis.

    Magnitudes stay in [low, high], which keeps the draws bounded away from
    the hypothesis boundaries (|a(a+d)| >= low^2, |b(a+d)r| >= low^3).
    """
    a = rng.uniform(low, high) * rng.choice([-1.0, 1.0])
    s = -math.copysign(rng.uniform(low, high), a)   # s = a + d, opposite sign to a
    d = s - a
    b = rng.uniform(low, high) * rng.choice([-1.0, 1.0])
    r = -math.copysign(rng.uniform(low, high), b * s)  # force b*(a+d)*r < 0
    return RegimeConfig.make(a=a, b=b, d=d, r=r, epsilon=epsilon)
