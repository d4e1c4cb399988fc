import math

import numpy as np
import pytest
from scipy import integrate

from levy_extremum.joint_cpdf import TripleQuery
from levy_extremum.oracle import (McConfig, OracleError, arcsine_cdf, bm_joint_cdf, bm_triple_cpdf,
                                  bm_triple_density, mc_triple_cpdf, mc_with_skeleton_bias, step_cdf_table)

T, t = 0.25, 0.1


def test_density_support():
    assert bm_triple_density(0.1, -0.1, -0.2, T) == 0.0
    assert bm_triple_density(0.1, 0.1, 0.2, T) == 0.0
    assert bm_triple_density(0.3, 0.1, 0.0, T) == 0.0
    assert bm_triple_density(0.1, 0.1, 0.0, T) > 0.0


def test_density_marginal_in_time_matches_arcsine_density():
    s = 0.07
    inner, _ = integrate.dblquad(lambda b, m: bm_triple_density(s, m, b, T), 0.0, 4.0, lambda m: -6.0, lambda m: m,
                                 epsabs=1e-10)
    assert inner == pytest.approx(1.0 / (math.pi * math.sqrt(s * (T - s))), rel=1e-6)


@pytest.mark.slow
def test_cdf_against_direct_triple_integration():
    a1, a2 = 0.0, 0.1
    direct, _ = integrate.tplquad(lambda b, m, s: bm_triple_density(s, m, b, T), 0.0, t,
                                  0.0, a2, lambda s, m: -3.0, lambda s, m: min(a1, m), epsabs=1e-9)
    assert bm_triple_cpdf(a1, a2, T, t) == pytest.approx(direct, abs=1e-6)


@pytest.mark.parametrize("tt", [0.02, 0.1, 0.125, 0.2])
def test_arcsine_limit(tt):
    assert abs(bm_triple_cpdf(20.0, 20.0, T, tt) - arcsine_cdf(tt, T)) < 1e-9


@pytest.mark.parametrize("a1,a2", [(-0.1, 0.05), (0.0, 0.1), (0.3, 0.2)])
def test_full_time_window_is_the_reflection_law(a1, a2):
    assert abs(bm_triple_cpdf(a1, a2, T, T) - bm_joint_cdf(a1, a2, T)) < 1e-9


def test_monotone_in_time_and_levels():
    vals = [bm_triple_cpdf(0.0, 0.1, T, s) for s in (0.02, 0.05, 0.1, 0.2, 0.25)]
    assert np.all(np.diff(vals) > 0)
    assert bm_triple_cpdf(-0.1, 0.1, T, t) < bm_triple_cpdf(0.0, 0.1, T, t) < bm_triple_cpdf(0.0, 0.2, T, t)
    assert bm_triple_cpdf(0.0, -0.1, T, t) == 0.0


def test_sigma_scaling():
    assert bm_triple_cpdf(0.0, 0.2, T, t, sigma=2.0) == pytest.approx(bm_triple_cpdf(0.0, 0.1, T, t), abs=1e-10)


def test_argument_checks():
    with pytest.raises(ValueError):
        bm_triple_cpdf(0.0, 0.1, T, 0.0)
    with pytest.raises(ValueError):
        McConfig(n_steps=5)
    with pytest.raises(ValueError):
        McConfig(sampler="exact")


def test_mc_is_deterministic_and_close_to_exact(bm):
    cfg = McConfig(n_steps=500, n_paths=20000, chunk=1000)
    q = TripleQuery(0.0, 0.1, T, t)
    a = mc_triple_cpdf(bm, q, cfg)
    assert a == mc_triple_cpdf(bm, q, cfg)
    p, se, bias = mc_with_skeleton_bias(bm, q, cfg)
    assert p == a[0]
    assert abs(p - bm_triple_cpdf(0.0, 0.1, T, t)) < 3 * se + bias


def test_mc_gaussian_sampler_needs_brownian(kobol12):
    with pytest.raises(OracleError):
        mc_triple_cpdf(kobol12, TripleQuery(0.0, 0.1, T, t), McConfig(n_steps=10, n_paths=1000, sampler="gaussian"))


def test_thinning_must_divide(bm):
    with pytest.raises(ValueError):
        mc_with_skeleton_bias(bm, TripleQuery(0.0, 0.1, T, t), McConfig(n_steps=15, n_paths=1000), factor=10)


def test_step_cdf_table_is_monotone_and_has_unit_variance_scale(kobol12):
    dt = 1e-3
    x, F = step_cdf_table(kobol12, dt, 512)
    assert np.all(np.diff(F) > 0) and F[0] < 1e-4 and F[-1] > 1 - 1e-4
    # the table reproduces the variance m2 * dt
    mid = 0.5 * (x[1:] + x[:-1])
    var = np.sum(mid ** 2 * np.diff(F))
    assert var == pytest.approx(0.1 * dt, rel=0.05)


def test_mc_cdf_inversion_matches_gaussian_for_brownian(bm):
    q = TripleQuery(0.0, 0.1, T, t)
    g, se_g = mc_triple_cpdf(bm, q, McConfig(n_steps=200, n_paths=20000, sampler="gaussian"))
    c, se_c = mc_triple_cpdf(bm, q, McConfig(n_steps=200, n_paths=20000, sampler="cdf-inversion", seed=3))
    assert abs(g - c) < 4 * math.hypot(se_g, se_c)
