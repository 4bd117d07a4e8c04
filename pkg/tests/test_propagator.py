import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscint import oracle
from oscint import propagator as prop
from oscint.errors import DimensionMismatch, NonNormalizableState, OutOfWindow
from oscint.model import OscillatorParams, validate


def _free(m, hbar, t, q0, q):
    return cmath.sqrt(m / (2j * math.pi * hbar * t)) * cmath.exp(1j * m * (q - q0) ** 2 / (2 * hbar * t))


@pytest.mark.parametrize("n", [1, 2, 7, 100, 10**5])
def test_free_sliced_kernel_is_exact(n):
    p = OscillatorParams(lam=0.0, t=1.3, mass=2.0, hbar=0.7, q0=0.4, q=-0.9)
    g = validate(p, n)
    got = prop.finite_n_propagator(p, g).amplitude
    ref = _free(2.0, 0.7, g.epsilon * (n + 1), 0.4, -0.9)
    assert abs(got - ref) <= 1e-12 * abs(ref)


@pytest.mark.parametrize("n", range(1, 9))
def test_matches_fresnel_oracle(n):
    p = OscillatorParams(lam=1.0, t=1.0, q0=0.0, q=1.0)
    a = prop.finite_n_propagator(p, validate(p, n)).amplitude
    b = oracle.fresnel_compose(p, n)
    assert abs(a - b) <= 1e-12 * abs(b)


def test_route_and_path_do_not_matter():
    p = OscillatorParams(lam=1.0, t=1.0, q0=1.0, q=2.0)
    g = validate(p, 500)
    from oscint.pathdecomp import build_path
    base = prop.finite_n_propagator(p, g).amplitude
    for src in ("linear", "classical", "sine"):
        v = prop.finite_n_propagator(p, g, path=build_path(p, g, src, seed=3), route="direct").amplitude
        assert abs(v - base) <= 1e-9 * abs(base)


def test_first_order_convergence():
    p = OscillatorParams(lam=1.0, t=1.0, q0=0.3, q=0.8)
    exact = prop.exact_propagator(p).amplitude
    errs = [abs(prop.finite_n_propagator(p, validate(p, n)).amplitude - exact) for n in (10**4, 10**5)]
    assert 9 < errs[0] / errs[1] < 11
    assert errs[1] < 1e-4


def test_exact_symmetry_and_modulus():
    rng = np.random.default_rng(5)
    lam, t, m, hb = 1.2, 0.8, 1.5, 0.9
    target = m * lam / (2 * math.pi * hb * math.sin(lam * t))
    for q0, q in rng.uniform(-3, 3, size=(20, 2)):
        a = prop.exact_propagator(OscillatorParams(lam=lam, t=t, mass=m, hbar=hb, q0=q0, q=q)).amplitude
        b = prop.exact_propagator(OscillatorParams(lam=lam, t=t, mass=m, hbar=hb, q0=q, q=q0)).amplitude
        assert a == pytest.approx(b, rel=1e-14)
        assert abs(a) ** 2 == pytest.approx(target, rel=1e-13)


def test_exact_free_limit():
    p = OscillatorParams(lam=1e-6, t=1.0, q0=0.2, q=0.5)
    ref = _free(1.0, 1.0, 1.0, 0.2, 0.5)
    assert abs(prop.exact_propagator(p).amplitude - ref) <= 1e-10
    assert prop.exact_propagator(p.with_(lam=0.0)).amplitude == pytest.approx(ref, rel=1e-15)


def test_exact_branch_phase():
    v = prop.exact_propagator(OscillatorParams(lam=1.0, t=1.0))
    assert cmath.phase(v.amplitude) == pytest.approx(-math.pi / 4, abs=1e-15)


def test_out_of_window():
    p = OscillatorParams(lam=1.0, t=3.2)
    with pytest.raises(OutOfWindow):
        prop.exact_propagator(p)
    with pytest.raises(OutOfWindow):
        prop.d_dim_propagator(p.with_(q0=(0, 0), q=(1, 1), d=2))


def test_morse_phase_beyond_positivity():
    # t inside the window but past the positivity threshold for small n
    p = OscillatorParams(lam=1.0, t=3.0, q0=0.1, q=0.2)
    v = prop.finite_n_propagator(p, validate(p, 2))
    assert v.morse_index >= 1
    assert abs(v.amplitude - oracle.fresnel_compose(p, 2)) <= 1e-12 * abs(v.amplitude)


def test_d_dim():
    p1 = OscillatorParams(lam=1.0, t=1.0, q0=0.3, q=-0.4)
    assert prop.d_dim_propagator(p1).amplitude == prop.exact_propagator(p1).amplitude
    p3 = OscillatorParams(lam=1.0, t=1.0, q0=(0, 0, 0), q=(0, 0, 0), d=3)
    pref = prop.exact_propagator(OscillatorParams(lam=1.0, t=1.0)).amplitude
    assert prop.d_dim_propagator(p3).amplitude == pytest.approx(pref ** 3, rel=1e-15)


@settings(max_examples=30, deadline=None)
@given(q0=st.lists(st.floats(-2, 2), min_size=2, max_size=2),
       q=st.lists(st.floats(-2, 2), min_size=2, max_size=2))
def test_d2_product_matches_assembled(q0, q):
    p = OscillatorParams(lam=0.7, t=1.1, q0=q0, q=q, d=2)
    a = prop.assembled_d_dim_propagator(p)
    b = prop.d_dim_propagator(p).amplitude
    # rounding of the phase argument grows with its size
    k = 0.7 / (2 * math.sin(0.77))
    phase = k * sum(x * x + y * y + 2 * abs(x * y) for x, y in zip(q0, q))
    assert abs(a - b) <= 4 * np.finfo(float).eps * (2 + phase) * abs(b)


def test_d_dim_sliced():
    p = OscillatorParams(lam=1.0, t=1.0, q0=(0.1, 0.2), q=(0.3, -0.1), d=2)
    v = prop.d_dim_propagator(p, n=1000).amplitude
    e = prop.d_dim_propagator(p).amplitude
    assert abs(v - e) <= 2e-3 * abs(e)


def test_one_d_only_entry_points():
    p = OscillatorParams(lam=1.0, t=1.0, q0=(0, 0), q=(1, 1), d=2)
    with pytest.raises(DimensionMismatch):
        prop.finite_n_propagator(p, validate(p, 10))


def test_faithful_mode_changes_exponent_only():
    p = OscillatorParams(lam=1.0, t=1.0, q0=0.5, q=1.0)
    a = prop.exact_propagator(p).amplitude
    b = prop.exact_propagator(p, faithful=True).amplitude
    assert abs(a) == pytest.approx(abs(b), rel=1e-15)
    assert cmath.phase(b / a) == pytest.approx(
        math.remainder(prop.classical_phase(1.0, 1.0, 0.5, 1.0) / 2, 2 * math.pi), abs=1e-12)


def test_convergence_sweep_table():
    p = OscillatorParams(lam=1.0, t=1.0, q0=1.0, q=2.0)
    res = prop.convergence_sweep(p, [1000, 10000, 100000], jobs=3)
    assert [r.n for r in res.rows] == [1000, 10000, 100000]
    assert res.rows[0].slope_running is None
    assert res.slope == pytest.approx(-1.0, abs=0.1)
    assert res.rows[-1].eps_det == pytest.approx(math.sin(1), abs=1e-4)
    serial = prop.convergence_sweep(p, [1000, 10000, 100000], jobs=1)
    assert serial == res


def test_near_caustic_same_slope():
    ns = [1000, 10000, 100000]
    mid = prop.convergence_sweep(OscillatorParams(lam=1.0, t=1.0, q0=0.3, q=0.5), ns)
    far = prop.convergence_sweep(OscillatorParams(lam=1.0, t=0.9 * math.pi, q0=0.3, q=0.5), ns)
    assert far.slope == pytest.approx(-1.0, abs=0.1)
    ratio = far.rows[-1].abs_err / mid.rows[-1].abs_err
    assert 1 < ratio < 1e3


def test_free_control_sweep():
    p = OscillatorParams(lam=0.0, t=1.0, q0=1.0, q=2.0)
    res = prop.convergence_sweep(p, [10, 1000, 10**5], reference="sliced")
    assert all(r.abs_err <= 1e-12 for r in res.rows)


def test_ground_state_stationary():
    p = OscillatorParams(lam=1.3, t=0.9, mass=0.8, hbar=1.1)
    g = prop.GaussianState.ground_state(p)
    out = prop.evolve_gaussian(p, g)
    x = np.linspace(-3, 3, 41)
    ratio = out(x) / g(x)
    assert np.allclose(ratio, cmath.exp(-0.5j * 1.3 * 0.9), rtol=0, atol=1e-12)


def test_short_time_identity():
    p = OscillatorParams(lam=1.0, t=1e-6)
    s = prop.GaussianState.from_sigma(0.7, 0.3, 0.5)
    out = prop.evolve_gaussian(p, s)
    assert out.center == pytest.approx(0.7, abs=1e-5)
    assert out.momentum == pytest.approx(0.3, abs=1e-5)
    assert abs(out.width - s.width) <= 1e-5
    assert abs(out.amplitude - s.amplitude) <= 1e-5


def test_center_follows_cosine():
    s = prop.GaussianState.from_sigma(1.0, 0.0, 0.3)
    out = prop.evolve_gaussian(OscillatorParams(lam=1.0, t=1.0), s)
    assert out.center == pytest.approx(math.cos(1.0), abs=1e-10)
    assert out.momentum == pytest.approx(-math.sin(1.0), abs=1e-10)


def test_norm_preserved():
    s = prop.GaussianState.from_sigma(0.5, -0.4, 0.6)
    out = prop.evolve_gaussian(OscillatorParams(lam=1.0, t=1.4), s)
    x = np.linspace(-12, 12, 8001)
    norm = np.trapezoid(np.abs(out(x)) ** 2, x)
    assert norm == pytest.approx(1.0, abs=1e-10)


def test_non_normalizable_state():
    with pytest.raises(NonNormalizableState):
        prop.GaussianState(0.0, 0.0, -1.0 + 0j)
