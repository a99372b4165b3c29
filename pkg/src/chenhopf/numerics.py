"""Small fixed-dimension numerical kernels.

Everything in here is deliberately dimension-4 (or 5 for the extended
shooting system) and self-contained: dense linear solves with partial
pivoting, periodic quadrature, damped Newton iteration, central-difference
Jacobians, and a quartic eigensolver built from the Faddeev-LeVerrier
characteristic polynomial and Durand-Kerner root iteration.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Callable, Sequence

import numpy as np

#: default relative step for central differences
DEFAULT_FD_STEP = float(np.sqrt(np.finfo(float).eps))

#: pivot threshold, relative to the matrix infinity norm
PIVOT_RTOL = 1e-14


class SingularMatrixError(RuntimeError):
    """Linear solve hit a pivot below the singularity threshold."""


class EigenSolveError(RuntimeError):
    """Durand-Kerner iteration did not produce certified roots."""

    def __init__(self, message: str, estimates: Sequence[complex]):
        super().__init__(message)
        self.estimates = tuple(complex(v) for v in estimates)


def _require_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite entries: {arr!r}")


@dataclass(frozen=True)
class QuarticSpectrum:
    """Four eigenvalues in canonical order.

    Canonical order is descending real part, ties broken by descending
    imaginary part, so conjugate pairs sit next to each other and the
    ordering is reproducible across independent computations.
    """

    values: tuple[complex, complex, complex, complex]

    @classmethod
    def from_iterable(cls, vals) -> "QuarticSpectrum":
        vs = [complex(v) for v in vals]
        if len(vs) != 4:
            raise ValueError(f"spectrum needs exactly 4 values, got {len(vs)}")
        vs.sort(key=lambda z: (-z.real, -z.imag))
        return cls(tuple(vs))

    def match_distance(self, other: "QuarticSpectrum") -> float:
        """Smallest max-modulus mismatch over all pairings of the two sets."""
        best = np.inf
        for perm in permutations(other.values):
            worst = max(abs(a - b) for a, b in zip(self.values, perm))
            best = min(best, worst)
        return float(best)

    def conjugation_defect(self) -> float:
        """How far the set is from being closed under conjugation."""
        return self.match_distance(
            QuarticSpectrum.from_iterable([v.conjugate() for v in self.values])
        )

    def real_parts(self) -> tuple[float, float, float, float]:
        return tuple(v.real for v in self.values)


@dataclass(frozen=True)
class NewtonReport:
    """Outcome of a damped Newton solve."""

    root: np.ndarray
    iterations: int
    residual_norm: float
    converged: bool


def solve_linear(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve a small dense system by Gaussian elimination with partial pivoting.

    Raises SingularMatrixError when the best available pivot falls below
    PIVOT_RTOL times the matrix infinity norm.
    """
    a = np.array(matrix, dtype=np.result_type(matrix, rhs, float))
    b = np.array(rhs, dtype=a.dtype)
    n = a.shape[0]
    if a.shape != (n, n) or b.shape != (n,):
        raise ValueError(f"shape mismatch: matrix {a.shape}, rhs {b.shape}")
    scale = max(float(np.max(np.sum(np.abs(a), axis=1))), 1e-300)
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[piv, k]) < PIVOT_RTOL * scale:
            raise SingularMatrixError(
                f"pivot {abs(a[piv, k]):.3e} below {PIVOT_RTOL:.0e} * |A|_inf = "
                f"{PIVOT_RTOL * scale:.3e} at column {k}"
            )
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            b[[k, piv]] = b[[piv, k]]
        for i in range(k + 1, n):
            m = a[i, k] / a[k, k]
            a[i, k:] -= m * a[k, k:]
            b[i] -= m * b[k]
    x = np.zeros_like(b)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - a[i, i + 1:] @ x[i + 1:]) / a[i, i]
    return x


def determinant(matrix: np.ndarray) -> complex | float:
    """Determinant via the same elimination; returns 0 for singular input."""
    a = np.array(matrix, dtype=np.result_type(matrix, float))
    n = a.shape[0]
    sign = 1.0
    det = 1.0
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if a[piv, k] == 0:
            return 0.0
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            sign = -sign
        det *= a[k, k]
        for i in range(k + 1, n):
            a[i, k:] -= (a[i, k] / a[k, k]) * a[k, k:]
    out = sign * det
    return complex(out) if np.iscomplexobj(a) else float(out)


def periodic_trapezoid(
    integrand: Callable[[float], np.ndarray], period: float, nodes: int
) -> np.ndarray:
    """Mean value of a periodic vector integrand over one period.

    Equispaced sampling on [0, period); for a periodic integrand this is the
    trapezoid rule, and it is exact (to roundoff) whenever the integrand is a
    trigonometric polynomial with fewer than `nodes` harmonics.
    """
    if period <= 0:
        raise ValueError(f"period must be positive, got {period}")
    if nodes < 4:
        raise ValueError(f"need at least 4 nodes, got {nodes}")
    acc = None
    for k in range(nodes):
        t = period * k / nodes
        sample = np.asarray(integrand(t), dtype=float)
        if not np.all(np.isfinite(sample)):
            raise ValueError(
                f"integrand returned non-finite value {sample!r} at node {k} (t={t!r})"
            )
        acc = sample if acc is None else acc + sample
    return acc / nodes


def finite_difference_jacobian(
    residual: Callable[[np.ndarray], np.ndarray],
    point: np.ndarray,
    step: float = DEFAULT_FD_STEP,
) -> np.ndarray:
    """Central-difference Jacobian, column j stepped by step*max(1, |x_j|)."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    x = np.asarray(point, dtype=float)
    _require_finite(x, "point")
    n = x.size
    cols = []
    for j in range(n):
        h = step * max(1.0, abs(x[j]))
        e = np.zeros(n)
        e[j] = h
        cols.append((np.asarray(residual(x + e)) - np.asarray(residual(x - e))) / (2 * h))
    jac = np.column_stack(cols)
    _require_finite(jac, "finite-difference Jacobian")
    return jac


def newton_solve(
    residual: Callable[[np.ndarray], np.ndarray],
    seed: np.ndarray,
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None,
    tol: float = 1e-12,
    max_iter: int = 25,
) -> NewtonReport:
    """Damped Newton iteration on a square nonlinear system.

    The step is damped by halving (up to 30 times) whenever the residual
    infinity norm fails to decrease. Convergence is checked before the first
    step, so a seed that already satisfies the tolerance reports zero
    iterations. Running out of iterations yields a non-converged report
    rather than an exception; a singular Jacobian raises.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    jac = jacobian if jacobian is not None else (
        lambda v: finite_difference_jacobian(residual, v)
    )
    x = np.array(seed, dtype=float)
    fx = np.asarray(residual(x), dtype=float)
    norm = float(np.max(np.abs(fx)))
    for it in range(max_iter):
        if norm <= tol:
            return NewtonReport(root=x, iterations=it, residual_norm=norm, converged=True)
        step = solve_linear(np.asarray(jac(x), dtype=float), -fx)
        lam = 1.0
        for _ in range(30):
            x_try = x + lam * step
            f_try = np.asarray(residual(x_try), dtype=float)
            n_try = float(np.max(np.abs(f_try)))
            if n_try < norm:
                break
            lam *= 0.5
        x, fx, norm = x_try, f_try, n_try
    converged = norm <= tol
    return NewtonReport(root=x, iterations=max_iter, residual_norm=norm, converged=converged)


def characteristic_polynomial(matrix: np.ndarray) -> np.ndarray:
    """Monic coefficients of det(lambda*I - M) by the Faddeev-LeVerrier recurrence.

    Returned in descending powers: [1, c3, c2, c1, c0] for a 4x4 input.
    """
    m = np.asarray(matrix, dtype=float)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError(f"square matrix required, got {m.shape}")
    _require_finite(m, "matrix")
    coeffs = [1.0]
    aux = np.eye(n)
    for k in range(1, n + 1):
        aux = m @ aux
        c = -np.trace(aux) / k
        coeffs.append(float(c))
        aux = aux + c * np.eye(n)
    return np.array(coeffs)


def quartic_roots(coeffs: np.ndarray, tol: float = 1e-13, max_sweeps: int = 500) -> np.ndarray:
    """All roots of a monic quartic by simultaneous Durand-Kerner iteration.

    Initial guesses sit on a circle of radius 1 + max|coefficient|, rotated
    off the real axis so real-coefficient symmetry cannot stall the sweep.
    Stops when the largest update drops below tol (relative to the root
    magnitude) or after max_sweeps sweeps; certification against the source
    matrix happens in eig4.
    """
    c = np.asarray(coeffs, dtype=complex)
    if c.shape != (5,) or c[0] != 1.0:
        raise ValueError("monic quartic coefficients [1, c3, c2, c1, c0] required")
    radius = 1.0 + float(np.max(np.abs(c)))
    angles = 2 * np.pi * np.arange(4) / 4 + 0.4
    z = radius * np.exp(1j * angles)
    for _ in range(max_sweeps):
        pz = ((((z + c[1]) * z + c[2]) * z + c[3]) * z) + c[4]
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        denom = np.prod(diff, axis=1)
        delta = pz / denom
        z = z - delta
        if np.max(np.abs(delta)) <= tol * max(1.0, float(np.max(np.abs(z)))):
            break
    return z


def eig4(matrix: np.ndarray) -> QuarticSpectrum:
    """Eigenvalues of a real 4x4 matrix, certified by determinant residuals.

    Each root must satisfy |det(M - lambda*I)| <= 1e-8 * (1 + |M|_inf)^4;
    otherwise EigenSolveError carries the final estimates.
    """
    m = np.asarray(matrix, dtype=float)
    if m.shape != (4, 4):
        raise ValueError(f"4x4 matrix required, got {m.shape}")
    _require_finite(m, "matrix")
    roots = quartic_roots(characteristic_polynomial(m))
    norm = float(np.max(np.sum(np.abs(m), axis=1)))
    bound = 1e-8 * (1.0 + norm) ** 4
    for lam in roots:
        res = abs(determinant(m.astype(complex) - lam * np.eye(4)))
        if not res <= bound:
            raise EigenSolveError(
                f"root {lam!r} has determinant residual {res:.3e} > {bound:.3e}",
                estimates=roots,
            )
    return QuarticSpectrum.from_iterable(roots)
