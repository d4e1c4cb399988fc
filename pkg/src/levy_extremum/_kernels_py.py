"""Pure numpy implementation of the Cauchy-sum tables (fallback for the compiled kernel)."""

from __future__ import annotations

import numpy as np


def cauchy_tables(xi, eta, nodes, coef):
    """out[p, j, k] = sum_m coef[j, m, p] / (xi[k] - eta[j] - nodes[m]).

    xi: (n+,), eta: (n-,), nodes: (m,), coef: (n-, m, P) complex (may be a
    broadcast view along axis 0).  Returns a complex array (P, n-, n+).
    """
    xi = np.asarray(xi, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    nodes = np.asarray(nodes, dtype=complex)
    coef = np.asarray(coef, dtype=complex)
    nm, m, P = coef.shape
    out = np.empty((P, eta.size, xi.size), dtype=complex)
    base = xi[None, :] - nodes[:, None]          # (m, n+)
    for j in range(eta.size):
        R = 1.0 / (base - eta[j])
        out[:, j, :] = coef[j].T @ R
    return out
