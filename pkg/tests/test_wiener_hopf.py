import numpy as np
import pytest

from levy_extremum.contours import build_scheme, nodes_and_weights
from levy_extremum.levy_models import Kobol, KobolParams, benchmark_kobol
from levy_extremum.wiener_hopf import atoms, dump_csv, phi_minus, phi_plus, whf_table


def identity_residual(model, q, xi, s):
    pp = phi_plus(model, q, xi, s.eta1)
    pm = phi_minus(model, q, xi, s.xi1)
    return np.max(np.abs(pp * pm * (q[:, None] + model.psi(xi)[None, :]) / q[:, None] - 1))


@pytest.mark.parametrize("nu", [0.5, 0.8, 1.2])
def test_factorization_identity_on_real_line(nu):
    m = benchmark_kobol(nu)
    s = build_scheme(m, 1.0, 1.0, 8.0, 12.0)
    q = np.array([0.5, 2.0, 10.0 + 5j, 40.0 - 20j])
    assert identity_residual(m, q, np.linspace(-30, 30, 41), s) < 1e-10


def test_factors_equal_one_at_origin(kobol12):
    s = build_scheme(kobol12, 1.0, 1.0, 8.0)
    q = np.array([1.0, 3.0 + 2j])
    assert np.allclose(phi_plus(kobol12, q, [0.0], s.eta1), 1.0, atol=1e-10)
    assert np.allclose(phi_minus(kobol12, q, [0.0], s.xi1), 1.0, atol=1e-10)


def test_brownian_factors_closed_form(bm):
    s = build_scheme(bm, 1.0, 1.0, 8.0, 12.0)
    q = np.array([0.7, 5.0])
    xi = np.array([-3.0, 0.5, 2.0 + 0.5j])
    beta = np.sqrt(2 * q)[:, None]
    assert np.allclose(phi_plus(bm, q, xi, s.eta1), beta / (beta - 1j * xi[None, :]), atol=1e-10)
    assert np.allclose(phi_minus(bm, q, xi, s.xi1), beta / (beta + 1j * xi[None, :]), atol=1e-10)


def test_inner_contour_kind_checked(kobol12):
    s = build_scheme(kobol12, 1.0, 1.0)
    with pytest.raises(ValueError):
        phi_plus(kobol12, [1.0], [0.0], s.xi1)
    with pytest.raises(ValueError):
        phi_minus(kobol12, [1.0], [0.0], s.eta1)


def test_atoms_only_in_finite_variation_with_drift(kobol12):
    s = build_scheme(kobol12, 1.0, 1.0)
    assert atoms(1.0, kobol12, s.xi1, s.eta1) == (0.0, 0.0)
    m = Kobol(KobolParams(nu=0.5, c=0.1, lambda_minus=-2.0, lambda_plus=1.0, mu=0.3))
    s = build_scheme(m, 1.0, 1.0)
    a_plus, a_minus = atoms(2.0, m, s.xi1, s.eta1)
    # positive drift: the infimum over an exponential window is 0 with positive probability
    assert a_plus == 0.0 and 0.0 < a_minus < 1.0


def test_table_and_dump(tmp_path, kobol12):
    s = build_scheme(kobol12, 1.0, 1.0)
    tab = whf_table(kobol12, [1.0, 2.0], s.xi, s.eta, s.xi1, s.eta1)
    assert tab.phi_plus.shape == (2, nodes_and_weights(s.xi)[0].size)
    # continuation of phi+ to L- agrees with the factorization identity there
    lhs = tab.phi_plus_cont * phi_minus(kobol12, tab.q, tab.xi_minus_nodes, s.xi1)
    rhs = tab.q[:, None] / (tab.q[:, None] + kobol12.psi(tab.xi_minus_nodes)[None, :])
    assert np.allclose(lhs, rhs, rtol=1e-9)
    out = tmp_path / "whf.csv"
    dump_csv(tab, out)
    lines = out.read_text().splitlines()
    assert len(lines) > 10 and lines[0].count(",") >= 3
