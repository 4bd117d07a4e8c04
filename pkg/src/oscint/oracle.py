"""Independent checks that share no code with the determinant evaluators.

The sliced integral is rebuilt one variable at a time from Gaussian
kernels ``p * exp(i (a x^2 + 2 b x y + c y^2))``, where ``x`` is the later
point and ``y`` the earlier one. Each integration uses

    int exp(i alpha u^2 + i beta u) du = sqrt(i pi/alpha) exp(-i beta^2/(4 alpha))

on the principal branch, so no oscillatory quadrature is ever performed.
Dense numpy linear algebra backs the small-n matrix claims.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from ._accel import dense_threshold
from .errors import DegenerateComposition, DenseLimitExceeded, OutOfWindow, SingularMatrix
from .model import OscillatorParams

ORACLE_MAX_N = 64
SAMPLINGS = ("later", "earlier", "symmetric")


@dataclass(frozen=True)
class QuadraticKernel:
    a: complex
    b: complex
    c: complex
    prefactor: complex

    def __call__(self, x, y) -> complex:
        return self.prefactor * cmath.exp(1j * (self.a * x * x + 2.0 * self.b * x * y + self.c * y * y))


def one_step_kernel(params: OscillatorParams, eps, sampling: str = "later") -> QuadraticKernel:
    """Single slice ``(m/(2 pi i hbar eps))^(1/2) exp(i m/(2 hbar eps) [(x-y)^2 - (lam eps)^2 v])``.

    ``v`` is ``x^2`` for ``sampling="later"`` (the primary convention),
    ``y^2`` for ``"earlier"`` and ``(x^2 + y^2)/2`` for ``"symmetric"``.
    ``eps`` may be complex, as in the regularized limit.
    """
    if sampling not in SAMPLINGS:
        raise ValueError(f"unknown sampling {sampling!r}")
    kappa = params.mass / (2.0 * params.hbar * eps)
    e = (params.lam * eps) ** 2
    wx = {"later": 1.0, "earlier": 0.0, "symmetric": 0.5}[sampling]
    pref = cmath.sqrt(params.mass / (2j * math.pi * params.hbar * eps))
    return QuadraticKernel(a=kappa * (1.0 - wx * e), b=-kappa, c=kappa * (1.0 - (1.0 - wx) * e),
                           prefactor=pref)


def compose(k1: QuadraticKernel, k2: QuadraticKernel) -> QuadraticKernel:
    """``int k1(x, u) k2(u, y) du`` (k2 acts first)."""
    alpha = k1.c + k2.a
    if alpha == 0:
        raise DegenerateComposition("quadratic coefficient of the integration variable vanishes")
    return QuadraticKernel(a=k1.a - k1.b * k1.b / alpha,
                           b=-k1.b * k2.b / alpha,
                           c=k2.c - k2.b * k2.b / alpha,
                           prefactor=k1.prefactor * k2.prefactor * cmath.sqrt(1j * math.pi / alpha))


def fresnel_compose(params: OscillatorParams, n: int, sampling: str = "later",
                    regularize: float = 0.0) -> complex:
    """Sliced amplitude with n interior points by n successive Gaussian integrals.

    ``eps = t/n`` as for the determinant route; ``n = 0`` is read as one
    slice of length t. ``regularize = delta`` replaces eps by
    ``eps (1 - i delta)``, turning every integral absolutely convergent.
    """
    if not 0 <= n <= ORACLE_MAX_N:
        raise ValueError(f"oracle limited to 0 <= n <= {ORACLE_MAX_N}, got {n}")
    if params.d != 1:
        raise ValueError("fresnel_compose is 1-d")
    eps = params.t / n if n else params.t
    if regularize:
        eps = eps * complex(1.0, -regularize)
    step = one_step_kernel(params, eps, sampling)
    k = step
    for _ in range(n):
        k = compose(step, k)
    return k(params.q[0], params.q0[0])


def exact_kernel(params: OscillatorParams) -> QuadraticKernel:
    """Closed-form kernel as a QuadraticKernel (for semigroup checks)."""
    m, hb, lam, t = params.mass, params.hbar, params.lam, params.t
    if lam * t >= math.pi:
        raise OutOfWindow("exact kernel needs lam*t < pi")
    x = math.sin(lam * t) / lam if lam else t
    k = m / (2.0 * hb * x)
    return QuadraticKernel(a=k * math.cos(lam * t), b=-k, c=k * math.cos(lam * t),
                           prefactor=cmath.sqrt(m / (2j * math.pi * hb * x)))


def schrodinger_residual(params: OscillatorParams, h: float, tau: float,
                         faithful: bool = False, points: int = 5, half_width: float = 0.5) -> float:
    """Finite-difference residual of the closed-form kernel in (q, t).

    Max over ``points`` values of q around ``params.q`` of
    ``|i hbar dK/dt + hbar^2/(2m) d2K/dq2 - V(q) K|`` with central
    differences of steps ``tau`` and ``h``.
    """
    from .propagator import exact_propagator

    if not params.in_window:
        raise OutOfWindow("residual needs lam*t < pi")
    m, hb, lam, t = params.mass, params.hbar, params.lam, params.t
    if not (tau < t and params.with_(t=t + tau).in_window):
        raise OutOfWindow("time stencil leaves the window")
    qc = params.q[0]

    def K(q, tt):
        return exact_propagator(params.with_(q=q, t=tt), faithful=faithful).amplitude

    worst = 0.0
    for q in np.linspace(qc - half_width, qc + half_width, points):
        k0 = K(q, t)
        dt = (K(q, t + tau) - K(q, t - tau)) / (2.0 * tau)
        dqq = (K(q + h, t) - 2.0 * k0 + K(q - h, t)) / (h * h)
        r = 1j * hb * dt + hb * hb / (2.0 * m) * dqq - 0.5 * m * lam * lam * q * q * k0
        worst = max(worst, abs(r))
    return worst


def riemann_cos_sum(lam: float, t: float, n: int) -> float:
    """Compensated right-endpoint sum ``sum_{m=1}^n (t/n) cos(m lam t/n)``."""
    return float(kernels.cos_riemann(float(lam), float(t), int(n)))


def dense_S(n: int, e: float) -> np.ndarray:
    if n > dense_threshold():
        raise DenseLimitExceeded(f"n = {n} exceeds dense threshold {dense_threshold()}")
    return (2.0 - e) * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)


def dense_T(n: int, e: float) -> np.ndarray:
    """(n+2)x(n+2) matrix of the full quadratic form, boundary rows included."""
    T = np.zeros((n + 2, n + 2))
    T[1:-1, 1:-1] = dense_S(n, e)
    T[0, 0] = 1.0
    T[0, 1] = T[1, 0] = -1.0
    T[-1, -1] = 1.0 - e
    T[-1, -2] = T[-2, -1] = -1.0
    return T


@dataclass(frozen=True)
class DenseReference:
    matrix: np.ndarray
    determinant: float
    inverse: np.ndarray

    @property
    def corners(self) -> tuple[float, float, float, float]:
        inv = self.inverse
        return inv[0, 0], inv[0, -1], inv[-1, 0], inv[-1, -1]

    def solve(self, rhs) -> np.ndarray:
        return np.linalg.solve(self.matrix, np.asarray(rhs, dtype=float))


def dense_reference(n: int, e: float) -> DenseReference:
    """LU determinant and full inverse of S_n."""
    S = dense_S(n, e)
    sign, logdet = np.linalg.slogdet(S)
    if sign == 0:
        raise SingularMatrix(f"dense S_n singular (n = {n}, e = {e!r})")
    try:
        inv = np.linalg.inv(S)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from exc
    return DenseReference(S, float(sign * math.exp(logdet)), inv)
