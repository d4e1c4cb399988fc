import os
import subprocess
import sys

import numpy as np
import pytest

from levy_extremum import kernels


def random_case(rng, n_plus=7, n_minus=5, m=6, P=3):
    c = lambda *s: rng.standard_normal(s) + 1j * rng.standard_normal(s)
    xi = c(n_plus) + 5j
    return xi, c(n_minus) - 2j, c(m) - 2j, c(n_minus, m, P)


def brute(xi, eta, nodes, coef):
    out = np.zeros((coef.shape[2], eta.size, xi.size), complex)
    for p in range(coef.shape[2]):
        for j in range(eta.size):
            for k in range(xi.size):
                out[p, j, k] = np.sum(coef[j, :, p] / (xi[k] - eta[j] - nodes))
    return out


def test_python_kernel_against_loops():
    args = random_case(np.random.default_rng(1))
    assert np.allclose(kernels.cauchy_tables_python(*args), brute(*args), rtol=1e-13)


@pytest.mark.skipif(kernels.cauchy_tables_compiled is None, reason="extension not built")
def test_compiled_kernel_agrees_with_fallback():
    rng = np.random.default_rng(2)
    args = random_case(rng, 40, 30, 35, 4)
    a = kernels.cauchy_tables_compiled(*args)
    b = kernels.cauchy_tables_python(*args)
    assert np.max(np.abs(a - b)) <= 1e-13 * np.max(np.abs(b))
    # broadcast coefficient views are accepted
    xi, eta, nodes, coef = args
    shared = np.broadcast_to(coef[0], coef.shape)
    assert np.allclose(kernels.cauchy_tables_compiled(xi, eta, nodes, shared),
                       kernels.cauchy_tables_python(xi, eta, nodes, shared), rtol=1e-13)


def test_fallback_selected_by_environment():
    env = dict(os.environ, LEVY_EXTREMUM_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from levy_extremum import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
