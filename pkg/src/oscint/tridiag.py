"""Structured linear algebra of the sliced action matrix.

``S_n = tridiag(-1, 2 - e, -1)`` of order n with ``e = (lam*eps)**2``.
Determinants of its leading blocks (``S_j``) and of the companion blocks
whose last diagonal entry is 1 (``D_j``) come from one O(n) scan in
:mod:`oscint.kernels`; nothing here materializes a dense matrix unless the
caller asks for one below :func:`dense_threshold`.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from ._accel import dense_threshold
from .errors import (DenseLimitExceeded, IndexOutOfRange, NonPositiveParameter,
                     OutOfRootRange, SingularMatrix)

# (-1)**(n+1) * (-1)**(n-1): cofactor sign times the determinant of the
# triangular minor with -1 on its diagonal. Equal to +1 for every n.
CORNER_SIGN = 1


def _check_e(e: float) -> None:
    if not e >= 0:
        raise NonPositiveParameter(f"e must be >= 0, got {e!r}")
    if e >= 4:
        raise OutOfRootRange(f"e = {e!r} >= 4: roots of a^2 - (2-e)a + 1 are not unimodular")


def _check_n(n) -> int:
    if int(n) != n or n < 1:
        raise NonPositiveParameter(f"n must be an integer >= 1, got {n!r}")
    return int(n)


@dataclass(frozen=True)
class SlicedActionMatrix:
    n: int
    e: float

    offdiag = -1.0

    @classmethod
    def from_physical(cls, n: int, lam: float, eps: float) -> "SlicedActionMatrix":
        return cls(n, (lam * eps) ** 2)

    @property
    def diag_value(self) -> float:
        return 2.0 - self.e

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = 2.0 * x
        y[1:] -= x[:-1]
        y[:-1] -= x[1:]
        return y - self.e * x

    def to_dense(self) -> np.ndarray:
        if self.n > dense_threshold():
            raise DenseLimitExceeded(f"n = {self.n} exceeds dense threshold {dense_threshold()}")
        return (np.diag(np.full(self.n, self.diag_value))
                - np.diag(np.ones(self.n - 1), 1) - np.diag(np.ones(self.n - 1), -1))

    def min_eigenvalue(self) -> float:
        return 4.0 * math.sin(math.pi / (2 * (self.n + 1))) ** 2 - self.e

    @property
    def is_positive_definite(self) -> bool:
        return self.min_eigenvalue() > 0


def eigenvalues(n: int, e: float) -> np.ndarray:
    """Eigenvalues ``2 - 2 cos(k pi/(n+1)) - e`` for k = 1..n, increasing in k.

    Evaluated as ``4 sin^2(k pi/(2(n+1))) - e`` so the smallest ones keep
    full relative precision at large n.
    """
    n = _check_n(n)
    k = np.arange(1, n + 1, dtype=float)
    return 4.0 * np.sin(k * np.pi / (2 * (n + 1))) ** 2 - e


def eigenvector_residual(n: int, e: float, k: int) -> float:
    """Sup-norm residual of the sine eigenvector ``v_j = sin(j k pi/(n+1))``."""
    n = _check_n(n)
    if not 1 <= k <= n:
        raise IndexOutOfRange(f"k = {k} outside 1..{n}")
    if n > dense_threshold():
        raise DenseLimitExceeded(f"n = {n} exceeds dense threshold {dense_threshold()}")
    j = np.arange(1, n + 1, dtype=float)
    v = np.sin(j * k * np.pi / (n + 1))
    mu = 4.0 * math.sin(k * math.pi / (2 * (n + 1))) ** 2 - e
    r = SlicedActionMatrix(n, e).matvec(v) - mu * v
    return float(np.max(np.abs(r)))


def positivity_bound_t(n: int, lam: float) -> float:
    """Sufficient bound on t for S_n to be positive definite.

    ``t < sqrt(n^2 pi^2/(lam^2 (n+1)^2) * (1 - pi^2/(12 (n+1)^2)))``.
    """
    n = _check_n(n)
    if not lam > 0:
        raise NonPositiveParameter(f"lam must be > 0, got {lam!r}")
    m1 = n + 1
    return math.sqrt(n * n * math.pi ** 2 / (lam ** 2 * m1 ** 2) * (1.0 - math.pi ** 2 / (12.0 * m1 ** 2)))


def positivity_threshold_t(n: int, lam: float) -> float:
    """Exact t at which the smallest eigenvalue of S_n crosses zero."""
    n = _check_n(n)
    if not lam > 0:
        raise NonPositiveParameter(f"lam must be > 0, got {lam!r}")
    return 2.0 * n / lam * math.sin(math.pi / (2 * (n + 1)))


@dataclass(frozen=True)
class DetSequences:
    """Output of one determinant scan.

    ``S_step`` is ``S_n - S_{n-1}``, produced as ``D_n - e S_{n-1}`` without
    subtracting two large numbers. ``S_{0}`` is 1 (empty determinant).
    """

    n: int
    e: float
    D_n: float
    S_n: float
    S_prev: float
    S_step: float
    D: np.ndarray | None = None
    epsilon: float | None = None

    @property
    def scaled_det(self) -> float | None:
        return None if self.epsilon is None else self.epsilon * self.S_n


def det_sequences(n: int, e: float, store_D: bool = False,
                  epsilon: float | None = None) -> DetSequences:
    n = _check_n(n)
    _check_e(e)
    D_n, S_n, S_prev, step, D_arr = kernels.det_scan(n, float(e), bool(store_D))
    return DetSequences(n=n, e=e, D_n=D_n, S_n=S_n, S_prev=S_prev, S_step=step,
                        D=D_arr if store_D else None, epsilon=epsilon)


@dataclass(frozen=True)
class ClosedFormParams:
    """Roots and coefficients of the solved D-recursion for a given e."""

    e: float
    theta: float
    a_plus: complex
    a_minus: complex
    A_plus: complex
    A_minus: complex

    @classmethod
    def from_e(cls, e: float) -> "ClosedFormParams":
        if not 0 < e < 4:
            raise OutOfRootRange(f"closed form needs 0 < e < 4, got {e!r}")
        lam_eps = math.sqrt(e)
        # arccos(1 - e/2), written to stay accurate for e -> 0
        theta = 2.0 * math.asin(lam_eps / 2.0)
        beta = lam_eps / (2.0 * math.sqrt(4.0 - e))
        return cls(e=e, theta=theta, a_plus=cmath.exp(1j * theta), a_minus=cmath.exp(-1j * theta),
                   A_plus=complex(0.5, beta), A_minus=complex(0.5, -beta))

    @classmethod
    def from_physical(cls, lam: float, eps: float) -> "ClosedFormParams":
        return cls.from_e((lam * eps) ** 2)


def det_D_closed_complex(j: int, params: ClosedFormParams) -> complex:
    if j < 1:
        raise IndexOutOfRange(f"j must be >= 1, got {j}")
    phase = (j - 1) * params.theta
    return params.A_plus * cmath.exp(1j * phase) + params.A_minus * cmath.exp(-1j * phase)


def det_D_closed(j: int, params: ClosedFormParams) -> float:
    if j < 1:
        raise IndexOutOfRange(f"j must be >= 1, got {j}")
    phase = (j - 1) * params.theta
    return math.cos(phase) - math.sqrt(params.e / (4.0 - params.e)) * math.sin(phase)


def fluctuation_table(n: int, lam: float, t: float):
    """Arrays ``(k, D_k, cos(k lam eps))`` for k = 1..n with eps = t/n."""
    eps = t / n
    seq = det_sequences(n, (lam * eps) ** 2, store_D=True, epsilon=eps)
    k = np.arange(1, n + 1)
    return k, seq.D, np.cos(k * (lam * eps))


def fluctuation_cosine_error(n: int, lam: float, t: float) -> float:
    """``max_k |D_k - cos(k lam eps)|`` over k = 1..n."""
    _, D, c = fluctuation_table(_check_n(n), lam, t)
    return float(np.max(np.abs(D - c)))


def scaled_det(n: int, lam: float, t: float) -> float:
    """``eps * det S_n`` with eps = t/n; tends to sin(lam t)/lam."""
    n = _check_n(n)
    eps = t / n
    return det_sequences(n, (lam * eps) ** 2, epsilon=eps).scaled_det


def corner_inverse(n: int, e: float) -> tuple[float, float, float, float]:
    """Corner entries ``(c11, c1n, cn1, cnn)`` of ``S_n^{-1}`` by Cramer's rule."""
    seq = det_sequences(n, e)
    if seq.S_n == 0.0 or not math.isfinite(seq.S_n):
        raise SingularMatrix(f"det S_n = {seq.S_n!r} (n = {n}, e = {e!r})")
    diag = seq.S_prev / seq.S_n
    off = CORNER_SIGN / seq.S_n
    return diag, off, off, diag


def solve(matrix: SlicedActionMatrix, rhs) -> np.ndarray:
    """Solve ``S_n x = rhs`` by O(n) elimination."""
    rhs = np.ascontiguousarray(rhs, dtype=float)
    if rhs.shape != (matrix.n,):
        raise ValueError(f"rhs must have shape ({matrix.n},), got {rhs.shape}")
    x, ok = kernels.solve_sym_tridiag(float(matrix.e), rhs.copy())
    if not ok:
        raise SingularMatrix(f"zero pivot solving S_n x = b (n = {matrix.n}, e = {matrix.e!r})")
    return x


def partial_sum_bound_holds(n: int, e: float) -> bool:
    """Check ``|S_j| <= sum_{k=2..j} |D_k| + |S_1|`` for j = 2..n.

    Diagnostic only; it follows from ``S_j = D_j + (1 - e) S_{j-1}`` when
    ``|1 - e| <= 1``.
    """
    seq = det_sequences(n, e, store_D=True)
    S = 2.0 - e
    bound = abs(S)
    for j in range(2, n + 1):
        S = seq.D[j - 1] + (1.0 - e) * S
        bound += abs(seq.D[j - 1])
        if abs(S) > bound * (1 + 1e-12):
            return False
    return True
