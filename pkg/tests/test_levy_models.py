import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levy_extremum.levy_models import (Brownian, BrownianParams, DomainError, Kobol, KobolParams, benchmark_kobol,
                                       calibrate_c, model_from_config, psi)


@pytest.mark.parametrize("nu", [0.3, 0.5, 0.8, 1.2, 1.7])
def test_psi_vanishes_at_zero_and_matches_second_moment(nu):
    m = benchmark_kobol(nu)
    assert abs(m.psi(0.0)) < 1e-14
    h = 1e-3
    d2 = (m.psi(h) - 2 * m.psi(0.0) + m.psi(-h)).real / h ** 2
    assert d2 == pytest.approx(0.1, rel=1e-5)


@pytest.mark.parametrize("nu", [0.5, 1.2])
def test_psi_real_on_imaginary_axis_inside_strip(nu):
    m = benchmark_kobol(nu)
    v = np.linspace(-1.9, 0.9, 29)
    assert np.max(np.abs(m.psi(1j * v).imag)) < 1e-12


@settings(max_examples=60, deadline=None)
@given(nu=st.sampled_from([0.3, 0.8, 1.2, 1.9]), xi=st.floats(-1e4, 1e4, allow_nan=False))
def test_characteristic_function_bounded_on_real_line(nu, xi):
    m = benchmark_kobol(nu)
    assert m.psi(xi).real >= -1e-12


@settings(max_examples=30, deadline=None)
@given(nu=st.sampled_from([0.5, 0.8, 1.2]), x=st.floats(-50, 50), y=st.floats(-1, 1))
def test_psi_hermitian_symmetry(nu, x, y):
    m = benchmark_kobol(nu)
    z = complex(x, y * 0.5)
    assert abs(m.psi(-np.conj(z)) - np.conj(m.psi(z))) < 1e-10 * max(1.0, abs(m.psi(z)))


@pytest.mark.parametrize("nu,phi", [(1.2, 0.3), (1.2, -0.7), (0.8, 0.5), (0.5, -0.2)])
def test_c_infinity_is_the_large_xi_limit(nu, phi):
    m = benchmark_kobol(nu)
    rho = 1e12  # the next term is O(rho^-nu) relative for nu < 1
    ratio = m.psi(rho * np.exp(1j * phi)) / rho ** nu
    assert abs(ratio - m.c_infinity(phi)) < 1e-4 * abs(m.c_infinity(phi))


def test_c_infinity_outside_cone_raises():
    with pytest.raises(DomainError):
        benchmark_kobol(1.2).c_infinity(2.0)


def test_branch_cut_is_rejected_with_check():
    m = benchmark_kobol(1.2)
    with pytest.raises(DomainError):
        psi(m, 1.5j)
    with pytest.raises(DomainError):
        psi(m, -2.5j)
    psi(m, 0.5j)


def test_brownian_closed_form():
    b = Brownian(BrownianParams(sigma=0.3, mu=0.1))
    xi = np.array([0.0, 1.0, -2.0 + 0.5j])
    assert np.allclose(b.psi(xi), 0.5 * 0.09 * xi ** 2 - 0.1j * xi)
    assert b.c_infinity(0.0) == pytest.approx(0.045)


def test_calibration_validates_input():
    with pytest.raises(ValueError):
        calibrate_c(1.2, 1.0, 2.0, 0.1)
    with pytest.raises(ValueError):
        calibrate_c(1.2, -2.0, 1.0, 0.0)


def test_model_from_config_variants():
    m = model_from_config({"type": "kobol", "nu": 1.2, "m2": 0.1})
    assert isinstance(m, Kobol) and m.params.c == pytest.approx(benchmark_kobol(1.2).params.c)
    m = model_from_config({"type": "kobol", "nu": 0.8, "c": 0.2, "mu": 0.0})
    assert m.params == KobolParams(nu=0.8, c=0.2, lambda_minus=-2.0, lambda_plus=1.0, mu=0.0)
    assert isinstance(model_from_config({"type": "bm"}), Brownian)
    with pytest.raises(ValueError, match="mutually exclusive"):
        model_from_config({"type": "kobol", "nu": 1.2, "m2": 0.1, "c": 1.0})
    with pytest.raises(ValueError, match="unknown model type"):
        model_from_config({"type": "vg"})


def test_kobol_nu_one_is_not_special_cased_silently():
    with pytest.raises((ValueError, ZeroDivisionError)):
        Kobol.from_m2(1.0, -2.0, 1.0, 0.1).psi(1.0)


def test_min_psi_on_segment_is_nonpositive_for_wide_segment():
    m = benchmark_kobol(1.2)
    assert m.min_psi_on_segment(-1.5, 0.5) <= 1e-14
    assert math.isfinite(m.min_psi_on_segment(-0.1, 0.1))
