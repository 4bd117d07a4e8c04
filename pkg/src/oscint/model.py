"""Shared parameter types, slicing grid and the square-root branch.

Units default to hbar = m = 1. The frequency ``lam`` may be zero, which is
the free particle; every other physical input must be strictly positive.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NonPositiveParameter, OutOfWindow

BRANCH_TAG = "principal: 1/sqrt(i) = exp(-i*pi/4)"


def sqrt_reciprocal_i_branch() -> complex:
    """Return the fixed value of ``1/sqrt(i)``, namely ``exp(-i pi/4)``.

    Every complex prefactor in the package is written as
    ``sqrt(positive real) * sqrt_reciprocal_i_branch()``.
    """
    c = math.sqrt(0.5)
    return complex(c, -c)


def _as_coords(v) -> tuple[float, ...]:
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.ndim != 1:
        raise DimensionMismatch(f"endpoint must be a scalar or 1-d vector, got shape {arr.shape}")
    return tuple(float(x) for x in arr)


@dataclass(frozen=True)
class OscillatorParams:
    """Physical inputs of one propagator evaluation.

    ``q0`` and ``q`` accept a scalar (d = 1) or a length-``d`` sequence and
    are stored as tuples.
    """

    lam: float
    t: float
    mass: float = 1.0
    hbar: float = 1.0
    q0: tuple[float, ...] | float = 0.0
    q: tuple[float, ...] | float = 0.0
    d: int = 1

    def __post_init__(self):
        for name in ("mass", "hbar", "t"):
            val = getattr(self, name)
            if not (val > 0 and math.isfinite(val)):
                raise NonPositiveParameter(f"{name} must be positive and finite, got {val!r}")
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise NonPositiveParameter(f"lam must be non-negative and finite, got {self.lam!r}")
        if int(self.d) != self.d or self.d < 1:
            raise NonPositiveParameter(f"dimension must be an integer >= 1, got {self.d!r}")
        q0, q = _as_coords(self.q0), _as_coords(self.q)
        if len(q0) != self.d or len(q) != self.d:
            raise DimensionMismatch(
                f"endpoints have lengths {len(q0)}, {len(q)} but d = {self.d}")
        object.__setattr__(self, "q0", q0)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "d", int(self.d))

    @property
    def in_window(self) -> bool:
        return self.lam * self.t < math.pi

    @property
    def endpoints_1d(self) -> tuple[float, float]:
        if self.d != 1:
            raise DimensionMismatch(f"1-d operation on a d = {self.d} problem")
        return self.q0[0], self.q[0]

    def with_(self, **changes) -> "OscillatorParams":
        data = dict(lam=self.lam, t=self.t, mass=self.mass, hbar=self.hbar,
                    q0=self.q0, q=self.q, d=self.d)
        data.update(changes)
        return OscillatorParams(**data)


@dataclass(frozen=True)
class SliceGrid:
    """Time slicing with ``n`` interior points.

    The action uses the step ``epsilon = t/n`` over ``n + 1`` slices while
    the reference path is sampled at ``s_j = j t/(n+1)``. Passing
    ``uniform_step=True`` to :func:`validate` uses ``t/(n+1)`` for both.
    """

    n: int
    t: float
    epsilon: float
    out_of_window: bool = False
    uniform_step: bool = False
    nodes: np.ndarray = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.nodes is None:
            j = np.arange(self.n + 2, dtype=float)
            nodes = j * (self.t / (self.n + 1))
            nodes[-1] = self.t
            nodes.setflags(write=False)
            object.__setattr__(self, "nodes", nodes)

    @property
    def node_spacing(self) -> float:
        return self.t / (self.n + 1)

    def e(self, lam: float) -> float:
        """Dimensionless shift ``(lam*eps)**2`` on the diagonal of S_n."""
        return (lam * self.epsilon) ** 2


def validate(params: OscillatorParams, n: int, mode: str = "propagator",
             uniform_step: bool = False) -> SliceGrid:
    """Check ``params`` and build the slicing grid for ``n`` interior points.

    ``mode="propagator"`` rejects ``lam*t >= pi``; ``mode="eigen"`` accepts
    it and sets ``out_of_window`` on the grid instead.
    """
    if int(n) != n or n < 1:
        raise NonPositiveParameter(f"n must be an integer >= 1, got {n!r}")
    n = int(n)
    if mode not in ("propagator", "eigen"):
        raise ValueError(f"unknown grid mode {mode!r}")
    outside = not params.in_window
    if outside and mode == "propagator":
        raise OutOfWindow(
            f"lam*t = {params.lam * params.t!r} >= pi; the propagator is singular at t = pi/lam")
    eps = params.t / (n + 1) if uniform_step else params.t / n
    return SliceGrid(n=n, t=params.t, epsilon=eps, out_of_window=outside,
                     uniform_step=uniform_step)
