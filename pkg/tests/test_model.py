import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oscint.errors import DimensionMismatch, NonPositiveParameter, OutOfWindow
from oscint.model import OscillatorParams, sqrt_reciprocal_i_branch, validate


def test_branch_squares_to_minus_i():
    z = sqrt_reciprocal_i_branch()
    assert z * z == pytest.approx(-1j, abs=4.5e-16)
    assert abs(z) == pytest.approx(1.0, abs=2e-16)
    assert z.real > 0


@pytest.mark.parametrize("field", ["mass", "hbar", "t"])
@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_rejects_nonpositive(field, bad):
    kwargs = dict(lam=1.0, t=1.0)
    kwargs[field] = bad
    with pytest.raises(NonPositiveParameter):
        OscillatorParams(**kwargs)


def test_lambda_zero_is_free_particle_not_error():
    assert OscillatorParams(lam=0.0, t=5.0).in_window
    with pytest.raises(NonPositiveParameter):
        OscillatorParams(lam=-0.1, t=1.0)


def test_endpoints_normalized_and_checked():
    p = OscillatorParams(lam=1.0, t=1.0, q0=[1, 2, 3], q=np.zeros(3), d=3)
    assert p.q0 == (1.0, 2.0, 3.0) and p.q == (0.0, 0.0, 0.0)
    with pytest.raises(DimensionMismatch):
        OscillatorParams(lam=1.0, t=1.0, q0=[1, 2], q=[1, 2], d=3)
    with pytest.raises(DimensionMismatch):
        _ = p.endpoints_1d


def test_window_guard():
    with pytest.raises(OutOfWindow):
        validate(OscillatorParams(lam=1.0, t=3.2), 10)
    with pytest.raises(OutOfWindow):
        validate(OscillatorParams(lam=1.0, t=math.pi), 10)
    g = validate(OscillatorParams(lam=1.0, t=3.2), 10, mode="eigen")
    assert g.out_of_window


@pytest.mark.parametrize("n", [0, -3, 2.5])
def test_bad_slice_count(n):
    with pytest.raises(NonPositiveParameter):
        validate(OscillatorParams(lam=1.0, t=1.0), n)


def test_uniform_step_variant():
    p = OscillatorParams(lam=1.0, t=1.0)
    assert validate(p, 9).epsilon == pytest.approx(1 / 9)
    assert validate(p, 9, uniform_step=True).epsilon == pytest.approx(1 / 10)


@given(n=st.integers(1, 5000), t=st.floats(1e-3, 3.1))
def test_grid_nodes(n, t):
    g = validate(OscillatorParams(lam=1.0, t=t), n)
    s = g.nodes
    assert s.size == n + 2 and s[0] == 0.0 and s[-1] == t
    assert np.all(np.diff(s) > 0)
    step = np.diff(s)
    assert np.max(np.abs(step - t / (n + 1))) <= 4 * np.spacing(t)
    assert g.epsilon == t / n
