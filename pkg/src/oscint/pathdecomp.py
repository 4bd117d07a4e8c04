"""Shift of the sliced integral around a pinned reference path.

With ``x = w + y`` the quadratic form splits as
``x^T T x = w^T T w + y^T S y + 2 rho^T y`` where ``rho = S w_int - w_bdy``.
Completing the square leaves the exponent ``w^T T w - rho^T S^{-1} rho``,
which depends on the endpoints only; :func:`classical_exponent` evaluates it
both through an explicit solve and through determinant data alone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CausticSingularity, DimensionMismatch, EndpointMismatch, SingularMatrix
from .model import OscillatorParams, SliceGrid
from .tridiag import SlicedActionMatrix, det_sequences, solve

ENDPOINT_TOL = 1e-12
SOURCES = ("linear", "classical", "sine", "table", "callable")


@dataclass(frozen=True)
class ReferencePath:
    samples: np.ndarray
    source: str

    def __post_init__(self):
        w = np.array(self.samples, dtype=float)
        if w.ndim != 1 or w.size < 3:
            raise DimensionMismatch(f"path needs n + 2 >= 3 samples, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValueError("path samples must be finite")
        w.setflags(write=False)
        object.__setattr__(self, "samples", w)

    @property
    def n(self) -> int:
        return self.samples.size - 2

    @property
    def interior(self) -> np.ndarray:
        return self.samples[1:-1]


def load_path_table(path) -> np.ndarray:
    """Read a single-column numeric text file, one sample per line."""
    vals = np.loadtxt(path, dtype=float, ndmin=1)
    if vals.ndim != 1:
        raise DimensionMismatch(f"{path}: expected a single column, got shape {vals.shape}")
    return vals


def _pinned(values: np.ndarray, q0: float, q: float, source: str) -> ReferencePath:
    if abs(values[0] - q0) > ENDPOINT_TOL or abs(values[-1] - q) > ENDPOINT_TOL:
        raise EndpointMismatch(
            f"{source} path runs {values[0]!r} -> {values[-1]!r}, expected {q0!r} -> {q!r}")
    values = values.copy()
    values[0], values[-1] = q0, q
    return ReferencePath(values, source)


def sine_coefficients(seed: int, modes: int = 5) -> np.ndarray:
    return np.random.default_rng(seed).uniform(-1.0, 1.0, size=modes)


def build_path(params: OscillatorParams, grid: SliceGrid, source="linear", *,
               seed: int = 0, table=None) -> ReferencePath:
    """Sample a reference path at the grid nodes ``j t/(n+1)``.

    ``source`` is one of ``"linear"``, ``"classical"``, ``"sine"`` (linear
    plus five seeded sine modes), ``"table"`` (``table`` holds n + 2 values
    or a file name), or any callable ``f(s)``.
    """
    q0, q = params.endpoints_1d
    s, t, lam = grid.nodes, grid.t, params.lam
    if callable(source):
        vals = np.asarray(np.vectorize(source, otypes=[float])(s), dtype=float)
        return _pinned(vals, q0, q, "callable")
    if source == "table":
        vals = table if isinstance(table, np.ndarray) else load_path_table(table)
        vals = np.asarray(vals, dtype=float)
        if vals.size != grid.n + 2:
            raise DimensionMismatch(f"path table has {vals.size} samples, need n + 2 = {grid.n + 2}")
        return _pinned(vals, q0, q, "table")
    linear = q0 + (q - q0) * (s / t)
    if source == "linear":
        w = linear
    elif source == "sine":
        c = sine_coefficients(seed)
        k = np.arange(1, c.size + 1)
        w = linear + np.sin(np.outer(s / t, k) * np.pi) @ c
    elif source == "classical":
        if lam == 0:
            w = linear
        else:
            sin_t = math.sin(lam * t)
            if abs(sin_t) < 1e-12:
                raise CausticSingularity(f"sin(lam t) = {sin_t!r}: no classical path")
            w = (q * np.sin(lam * s) + q0 * np.sin(lam * (t - s))) / sin_t
    else:
        raise ValueError(f"unknown path source {source!r}; expected one of {SOURCES}")
    w = np.array(w, dtype=float)
    w[0], w[-1] = q0, q
    return ReferencePath(w, source)


def build_rho(path: ReferencePath, e: float) -> np.ndarray:
    """Offset vector ``rho_j = -w_{j-1} + 2 w_j - w_{j+1} - e w_j``."""
    w = path.samples
    return (2.0 * w[1:-1] - w[:-2] - w[2:]) - e * w[1:-1]


def quad_form_T(path: ReferencePath, e: float) -> float:
    """``w^T T_n w = sum_{j=1}^{n+1} (w_j - w_{j-1})^2 - e sum_{j=1}^{n+1} w_j^2``."""
    w = path.samples
    kin = kernels.compensated_sum(np.diff(w) ** 2)
    pot = kernels.compensated_sum(w[1:] ** 2)
    return kin - e * pot


def _dot(a: np.ndarray, b: np.ndarray) -> float:
    return kernels.compensated_sum(a * b)


def classical_exponent_direct(params: OscillatorParams, grid: SliceGrid,
                              path: ReferencePath) -> float:
    """``(w^T T w - rho^T S^{-1} rho)/eps`` via one tridiagonal solve."""
    e = grid.e(params.lam)
    if path.n != grid.n:
        raise DimensionMismatch(f"path has n = {path.n}, grid has n = {grid.n}")
    rho = build_rho(path, e)
    x = solve(SlicedActionMatrix(grid.n, e), rho)
    return (quad_form_T(path, e) - _dot(rho, x)) / grid.epsilon


def classical_exponent_reduced(params: OscillatorParams, grid: SliceGrid) -> float:
    """Endpoint-only form of the exponent from determinant data.

    ``[(q0^2 + q^2)(S_n - S_{n-1}) - 2 q q0]/(eps S_n) - eps lam^2 q^2``.
    """
    q0, q = params.endpoints_1d
    eps, lam = grid.epsilon, params.lam
    seq = det_sequences(grid.n, grid.e(lam), epsilon=eps)
    if seq.S_n == 0.0:
        raise SingularMatrix("det S_n = 0")
    return ((q0 * q0 + q * q) * seq.S_step - 2.0 * q * q0) / seq.scaled_det - eps * lam * lam * q * q


def classical_exponent(params: OscillatorParams, grid: SliceGrid,
                       path: ReferencePath | None = None, route: str = "reduced") -> float:
    """Exponent ``Q_n`` of the sliced amplitude, ``exp(i m Q_n/(2 hbar))``.

    ``route="direct"`` needs a path (defaults to the linear one).
    """
    if route == "reduced":
        return classical_exponent_reduced(params, grid)
    if route == "direct":
        if path is None:
            path = build_path(params, grid, "linear")
        return classical_exponent_direct(params, grid, path)
    raise ValueError(f"unknown route {route!r}")


def completed_square_residual(path: ReferencePath, e: float, probe) -> float:
    """Absolute gap between ``y^T S y + 2 rho^T y`` and its completed square."""
    y = np.asarray(probe, dtype=float)
    S = SlicedActionMatrix(path.n, e)
    rho = build_rho(path, e)
    u = solve(S, rho)
    lhs = _dot(y, S.matvec(y)) + 2.0 * _dot(rho, y)
    z = y + u
    rhs = _dot(z, S.matvec(z)) - _dot(rho, u)
    return abs(lhs - rhs)


def random_paths(params: OscillatorParams, grid: SliceGrid, count: int, seed: int):
    """``count`` reproducible sine-perturbed paths; path i uses seed ``seed + i``."""
    return [build_path(params, grid, "sine", seed=seed + i) for i in range(count)]

