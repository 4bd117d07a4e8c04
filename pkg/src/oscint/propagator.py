"""Sliced and closed-form propagators of the harmonic oscillator.

The sliced amplitude with n interior points is

    K_n = (m/(2 pi i hbar eps))^(1/2) (det S_n)^(-1/2) exp(i m Q_n/(2 hbar))

and tends to the Mehler kernel

    K = (m lam/(2 pi i hbar sin lam t))^(1/2)
        exp(i m lam/(2 hbar sin lam t) [(q0^2 + q^2) cos lam t - 2 q q0]).

``faithful=True`` drops the 1/2 in both exponents, reproducing the
variant in which the kernel no longer solves the Schrodinger equation.
"""
from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonNormalizableState, OutOfWindow, SingularMatrix
from .model import BRANCH_TAG, OscillatorParams, SliceGrid, sqrt_reciprocal_i_branch, validate
from .pathdecomp import ReferencePath, classical_exponent
from .tridiag import SlicedActionMatrix, det_sequences, eigenvalues


@dataclass(frozen=True)
class PropagatorValue:
    amplitude: complex
    n: int | str
    params: OscillatorParams
    faithful: bool = False
    scaled_det: float | None = None
    exponent: float | None = None
    morse_index: int = 0
    branch_tag: str = BRANCH_TAG


def _sin_over_lam(lam: float, t: float) -> float:
    return t if lam == 0 else math.sin(lam * t) / lam


def _exponent_factor(mass: float, hbar: float, faithful: bool) -> float:
    return mass / hbar if faithful else mass / (2.0 * hbar)


def _negative_modes(n: int, e: float) -> int:
    if SlicedActionMatrix(n, e).min_eigenvalue() > 0:
        return 0
    return int(np.count_nonzero(eigenvalues(n, e) < 0))


def finite_n_propagator(params: OscillatorParams, grid: SliceGrid,
                        path: ReferencePath | None = None, route: str = "reduced",
                        faithful: bool = False) -> PropagatorValue:
    """Sliced amplitude ``K_n`` for a 1-d problem.

    When S_n has negative eigenvalues (possible on coarse grids with
    lam*t below pi) each one contributes a factor ``-i``, matching the
    principal-branch Fresnel integral of that mode.
    """
    if not params.in_window:
        raise OutOfWindow(f"lam*t = {params.lam * params.t!r} >= pi")
    e = grid.e(params.lam)
    seq = det_sequences(grid.n, e, epsilon=grid.epsilon)
    if seq.S_n == 0.0:
        raise SingularMatrix(f"det S_n = 0 at n = {grid.n}")
    q_n = classical_exponent(params, grid, path=path, route=route)
    nu = _negative_modes(grid.n, e)
    pref = math.sqrt(params.mass / (2.0 * math.pi * params.hbar * abs(seq.scaled_det)))
    phase = sqrt_reciprocal_i_branch() * (-1j) ** nu
    amp = pref * phase * cmath.exp(1j * _exponent_factor(params.mass, params.hbar, faithful) * q_n)
    return PropagatorValue(amplitude=amp, n=grid.n, params=params, faithful=faithful,
                           scaled_det=seq.scaled_det, exponent=q_n, morse_index=nu)


def classical_phase(lam: float, t: float, q0: float, q: float) -> float:
    """``lam/sin(lam t) [(q0^2 + q^2) cos(lam t) - 2 q q0]`` (free limit at lam = 0)."""
    return ((q0 * q0 + q * q) * math.cos(lam * t) - 2.0 * q * q0) / _sin_over_lam(lam, t)


def _exact_1d(params: OscillatorParams, q0: float, q: float, faithful: bool) -> complex:
    x = _sin_over_lam(params.lam, params.t)
    pref = math.sqrt(params.mass / (2.0 * math.pi * params.hbar * x))
    phi = _exponent_factor(params.mass, params.hbar, faithful) * classical_phase(params.lam, params.t, q0, q)
    return pref * sqrt_reciprocal_i_branch() * cmath.exp(1j * phi)


def exact_propagator(params: OscillatorParams, faithful: bool = False) -> PropagatorValue:
    if not params.in_window:
        raise OutOfWindow(f"lam*t = {params.lam * params.t!r} >= pi")
    q0, q = params.endpoints_1d
    return PropagatorValue(amplitude=_exact_1d(params, q0, q, faithful), n="exact",
                           params=params, faithful=faithful)


def d_dim_propagator(params: OscillatorParams, n: int | None = None,
                     faithful: bool = False) -> PropagatorValue:
    """Product over coordinates of 1-d values (exact, or sliced when ``n`` is given)."""
    if not params.in_window:
        raise OutOfWindow(f"lam*t = {params.lam * params.t!r} >= pi")
    if len(params.q0) != params.d or len(params.q) != params.d:
        raise DimensionMismatch("endpoint length differs from d")
    amp = complex(1.0)
    for a, b in zip(params.q0, params.q):
        p1 = params.with_(q0=a, q=b, d=1)
        if n is None:
            amp *= _exact_1d(p1, a, b, faithful)
        else:
            amp *= finite_n_propagator(p1, validate(p1, n), faithful=faithful).amplitude
    return PropagatorValue(amplitude=amp, n="exact" if n is None else n, params=params,
                           faithful=faithful)


def assembled_d_dim_propagator(params: OscillatorParams, faithful: bool = False) -> complex:
    """Closed form with ``|q0|^2, |q|^2, q.q0`` in one exponent and the prefactor to the d-th power."""
    if not params.in_window:
        raise OutOfWindow(f"lam*t = {params.lam * params.t!r} >= pi")
    q0, q = np.array(params.q0), np.array(params.q)
    lam, t, d = params.lam, params.t, params.d
    x = _sin_over_lam(lam, t)
    pref = (params.mass / (2.0 * math.pi * params.hbar * x)) ** (d / 2.0)
    phase = cmath.exp(-0.25j * math.pi * d)
    arg = ((q0 @ q0 + q @ q) * math.cos(lam * t) - 2.0 * (q @ q0)) / x
    return pref * phase * cmath.exp(1j * _exponent_factor(params.mass, params.hbar, faithful) * arg)


@dataclass(frozen=True)
class SweepRow:
    n: int
    abs_err: float
    eps_det: float
    Q_n: float
    slope_running: float | None


@dataclass(frozen=True)
class SweepResult:
    rows: list
    slope: float | None


def loglog_slope(ns, errs) -> float | None:
    """Least-squares slope of log(err) against log(n)."""
    ns = np.asarray(ns, dtype=float)
    errs = np.asarray(errs, dtype=float)
    ok = errs > 0
    if ok.sum() < 2:
        return None
    return float(np.polyfit(np.log(ns[ok]), np.log(errs[ok]), 1)[0])


def convergence_sweep(params: OscillatorParams, n_list, reference: str = "exact",
                      faithful: bool = False, jobs: int = 1) -> SweepResult:
    """Errors ``|K_n - K|`` over ``n_list`` plus the fitted log-log slope.

    ``reference="sliced"`` compares against the closed form at the total
    sliced time ``(n + 1) eps`` instead of ``t``; at lam = 0 the sliced
    amplitude equals it exactly.
    """
    n_list = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly ascending")
    if reference not in ("exact", "sliced"):
        raise ValueError(f"unknown reference {reference!r}")

    def one(n):
        grid = validate(params, n)
        kn = finite_n_propagator(params, grid, faithful=faithful)
        ref_params = params if reference == "exact" else params.with_(t=grid.epsilon * (n + 1))
        if not ref_params.in_window:
            raise OutOfWindow(f"sliced time {ref_params.t!r} is past the caustic")
        kx = exact_propagator(ref_params, faithful=faithful).amplitude
        return abs(kn.amplitude - kx), kn.scaled_det, kn.exponent

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, n_list))
    else:
        results = [one(n) for n in n_list]
    rows = []
    for i, (n, (err, sd, qn)) in enumerate(zip(n_list, results)):
        running = loglog_slope(n_list[i - 1:i + 1], [results[i - 1][0], err]) if i else None
        rows.append(SweepRow(n, err, sd, qn, running))
    return SweepResult(rows, loglog_slope(n_list, [r[0] for r in results]))


@dataclass(frozen=True)
class GaussianState:
    """``psi(x) = amplitude * exp(-width (x - center)^2 + i momentum (x - center)/hbar)``.

    ``width`` is complex with positive real part.
    """

    center: float
    momentum: float
    width: complex
    amplitude: complex = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not complex(self.width).real > 0:
            raise NonNormalizableState(f"Re(width) must be > 0, got {self.width!r}")

    @classmethod
    def from_sigma(cls, center: float, momentum: float, sigma: float,
                   hbar: float = 1.0) -> "GaussianState":
        """Normalized packet whose probability density has standard deviation ``sigma``."""
        a = 1.0 / (4.0 * sigma * sigma)
        return cls(center, momentum, complex(a), complex((2.0 * a / math.pi) ** 0.25), hbar)

    @classmethod
    def ground_state(cls, params: OscillatorParams, center: float = 0.0,
                     momentum: float = 0.0) -> "GaussianState":
        return cls.from_sigma(center, momentum, math.sqrt(params.hbar / (2.0 * params.mass * params.lam)),
                              params.hbar)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        dx = x - self.center
        return self.amplitude * np.exp(-self.width * dx * dx + 1j * self.momentum * dx / self.hbar)

    def quadratic(self) -> tuple[complex, complex, complex]:
        """Coefficients of ``log psi = -alpha x^2 + beta x + gamma``."""
        a, x0, p = complex(self.width), self.center, self.momentum / self.hbar
        return a, 2.0 * a * x0 + 1j * p, cmath.log(self.amplitude) - a * x0 * x0 - 1j * p * x0

    @classmethod
    def from_quadratic(cls, alpha: complex, beta: complex, gamma: complex,
                       hbar: float = 1.0) -> "GaussianState":
        if not alpha.real > 0:
            raise NonNormalizableState(f"Re(alpha) = {alpha.real!r} <= 0")
        x0 = beta.real / (2.0 * alpha.real)
        p = beta.imag - 2.0 * alpha.imag * x0
        amp = cmath.exp(-alpha * x0 * x0 + beta * x0 + gamma)
        return cls(x0, hbar * p, alpha, amp, hbar)


def evolve_gaussian(params: OscillatorParams, state: GaussianState,
                    faithful: bool = False) -> GaussianState:
    """Integrate the closed-form kernel against a Gaussian state."""
    if not params.in_window:
        raise OutOfWindow(f"lam*t = {params.lam * params.t!r} >= pi")
    m, hb, lam, t = params.mass, params.hbar, params.lam, params.t
    x = _sin_over_lam(lam, t)
    k = _exponent_factor(m, hb, faithful) / x
    # kernel: P exp(i (A x^2 + 2 B x y + C y^2))
    A = C = k * math.cos(lam * t)
    B = -k
    P = math.sqrt(m / (2.0 * math.pi * hb * x)) * sqrt_reciprocal_i_branch()
    alpha, beta, gamma = state.quadratic()
    a_y = alpha - 1j * C
    alpha_new = -1j * A + B * B / a_y
    beta_new = 1j * B * beta / a_y
    gamma_new = gamma + beta * beta / (4.0 * a_y) + cmath.log(P * cmath.sqrt(math.pi / a_y))
    return GaussianState.from_quadratic(alpha_new, beta_new, gamma_new, hb)


def classical_center(params: OscillatorParams, center: float, momentum: float) -> float:
    lam, t = params.lam, params.t
    return center * math.cos(lam * t) + momentum / params.mass * _sin_over_lam(lam, t)
