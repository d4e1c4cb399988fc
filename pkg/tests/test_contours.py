import numpy as np
import pytest

from levy_extremum.contours import (BROMWICH, DOWN, UP, AdmissibilityError, SchemeParams, SinhContour,
                                    admissibility_check, assert_admissible, build_scheme, fourier_length,
                                    nodes_and_weights, select_fourier_params, working_strip)


def test_contour_validation():
    with pytest.raises(ValueError):
        SinhContour(0.0, 1.0, -0.3, UP, 0.1, 5, 5)
    with pytest.raises(ValueError):
        SinhContour(0.0, 1.0, 0.3, DOWN, 0.1, 5, 5)
    with pytest.raises(ValueError):
        SinhContour(0.0, -1.0, 0.3, UP, 0.1, 5, 5)
    with pytest.raises(ValueError):
        SinhContour(0.0, 1.0, 0.3, "sideways", 0.1, 5, 5)


def test_derivative_matches_finite_difference():
    c = SinhContour(0.2, 1.5, 0.4, UP, 0.1, 10, 10)
    y = np.linspace(-2, 2, 9)
    h = 1e-6
    fd = (c.point(y + h) - c.point(y - h)) / (2 * h)
    assert np.allclose(fd, c.derivative(y), rtol=1e-7)
    cb = SinhContour(1.0, 4.0, 0.3, BROMWICH, 0.1, 0, 10)
    fd = (cb.point(y + h) - cb.point(y - h)) / (2 * h)
    assert np.allclose(fd, 1j * cb.derivative(y), rtol=1e-7)


def test_vertex_and_angle_pair():
    c = SinhContour(0.2, 1.5, 0.4, UP, 0.1, 10, 10, d=0.2)
    assert c.point(0.0).imag == pytest.approx(c.vertex)
    p = c.scaled_angle(0.9)
    assert p.vertex == pytest.approx(c.vertex)
    assert p.omega == pytest.approx(0.36)
    assert p.n_plus == c.n_plus


def test_family_vertex_range_contains_vertex():
    c = SinhContour(-0.1, 2.0, -0.5, DOWN, 0.1, 10, 10, d=0.3)
    lo, hi = c.vertex_range()
    assert lo <= c.vertex <= hi


def test_fourier_contours_stay_in_strip(kobol12):
    lo, hi = working_strip(kobol12)
    for direction in ("up", "down"):
        c = select_fourier_params(kobol12, direction, 8.0)
        vlo, vhi = c.vertex_range()
        assert lo <= vlo and vhi <= hi
        x, _ = nodes_and_weights(c)
        kobol12.check_domain(x)


def test_length_grows_with_accuracy_and_small_nu(kobol12, kobol08):
    assert fourier_length(kobol12, 10.0) > fourier_length(kobol12, 8.0)
    assert fourier_length(kobol08, 8.0) > fourier_length(kobol12, 8.0)


def test_scheme_is_admissible_and_round_trips(kobol12):
    s = build_scheme(kobol12, 0.25, 0.1, 8.0, 10.0)
    assert s.xi.kind == UP and s.eta.kind == DOWN and s.q.kind == BROMWICH
    assert s.q.n_minus == 0 and s.qp.n_minus == s.qp.n_plus
    assert_admissible([], nodes_and_weights(s.xi)[0], kobol12, eta_nodes=nodes_and_weights(s.eta)[0])
    back = SchemeParams.from_dict(s.to_dict())
    assert back == s


def test_scheme_without_ftd_horizon(kobol12):
    s = build_scheme(kobol12, 0.25, 0.0)
    assert s.qp is None
    assert SchemeParams.from_dict(s.to_dict()).qp is None


def test_admissibility_reports_offending_pair(kobol12):
    rep = admissibility_check([-1.0 + 0j], [0.0], kobol12)
    assert not rep.ok and rep.q == -1.0
    rep = admissibility_check([], [1.0 + 1j], kobol12, eta_nodes=[1.0 + 1j])
    assert not rep and "xi = eta" in rep.message
    with pytest.raises(AdmissibilityError):
        assert_admissible([-1.0 + 0j], [0.0], kobol12)
    assert admissibility_check([1.0 + 0j], [0.3, -0.3], kobol12)


def test_node_cap_warns(kobol12):
    with pytest.warns(UserWarning):
        c = select_fourier_params(kobol12, "up", 8.0, max_nodes=50)
    assert c.n_plus <= 50
