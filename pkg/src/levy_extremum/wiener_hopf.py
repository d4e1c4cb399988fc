"""Wiener-Hopf factors on sinh-deformed contours.

    q/(q + psi(xi)) = phi+_q(xi) phi-_q(xi)

phi+_q is evaluated with an integral over a contour L- lying below xi,
phi-_q with an integral over a contour L+ lying above xi.  Values on the
"wrong" side are obtained from the factorization identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .contours import DOWN, UP, AdmissibilityError, SinhContour, nodes_and_weights
from .levy_models import LevyModel, _log1p


def _log_term(model: LevyModel, q, eta, finite_variation: bool):
    """log(1 + psi(eta)/q) (or the finite-variation variant), shape (nq, m)."""
    q = np.atleast_1d(np.asarray(q, dtype=complex))[:, None]
    eta = np.asarray(eta, dtype=complex)[None, :]
    if finite_variation:
        ps = model.psi0(eta)
        z = ps / (q - 1j * model.mu * eta)
    else:
        z = model.psi(eta) / q
    w = 1.0 + z
    bad = (w.real <= 0) & (np.abs(w.imag) < 1e-12)
    if np.any(bad):
        iq, ie = np.unravel_index(np.argmax(bad), bad.shape)
        raise AdmissibilityError(f"1 + psi(eta)/q on the branch cut at q={q[iq, 0]}, eta={eta[0, ie]}")
    return _log1p(z)


def _factor_exponent(model, q, xi, inner: SinhContour, finite_variation=False):
    """(1/2 pi i) int_inner xi log(1+psi(eta)/q) / (eta (xi - eta)) d eta, shape (nq, nxi)."""
    eta, der = nodes_and_weights(inner)
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    L = _log_term(model, q, eta, finite_variation)
    K = xi[None, :] / (xi[None, :] - eta[:, None])          # (m, nxi)
    return (inner.zeta / (2j * math.pi)) * ((L * (der / eta)[None, :]) @ K)


def _finvar_regime(model: LevyModel) -> bool:
    return model.nu < 1.0 and model.mu != 0.0


def phi_plus(model: LevyModel, q, xi, inner: SinhContour) -> np.ndarray:
    """phi+_q(xi) for every q (rows) and xi (columns); inner must be an L- contour below xi."""
    if inner.kind != DOWN:
        raise ValueError("phi_plus needs an inner contour of kind fourier-down")
    q = np.atleast_1d(np.asarray(q, dtype=complex))
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    if _finvar_regime(model) and model.mu > 0:
        e = _factor_exponent(model, q, xi, inner, finite_variation=True)
        return q[:, None] / (q[:, None] - 1j * model.mu * xi[None, :]) * np.exp(e)
    return np.exp(_factor_exponent(model, q, xi, inner))


def phi_minus(model: LevyModel, q, xi, inner: SinhContour) -> np.ndarray:
    """phi-_q(xi); inner must be an L+ contour above xi."""
    if inner.kind != UP:
        raise ValueError("phi_minus needs an inner contour of kind fourier-up")
    q = np.atleast_1d(np.asarray(q, dtype=complex))
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    if _finvar_regime(model) and model.mu < 0:
        e = _factor_exponent(model, q, xi, inner, finite_variation=True)
        return q[:, None] / (q[:, None] - 1j * model.mu * xi[None, :]) * np.exp(-e)
    return np.exp(-_factor_exponent(model, q, xi, inner))


def atoms(q: float, model: LevyModel, up: SinhContour, down: SinhContour) -> tuple[float, float]:
    """Point masses at 0 of the supremum (a+) and infimum (a-) over an exponential window."""
    if not _finvar_regime(model):
        return 0.0, 0.0

    def integral(c: SinhContour):
        eta, der = nodes_and_weights(c)
        L = _log_term(model, q, eta, True)[0]
        return c.zeta / (2j * math.pi) * np.sum(L * der / eta)

    if model.mu > 0:
        return 0.0, float(np.real(np.exp(-integral(up))))
    return float(np.real(np.exp(integral(down)))), 0.0


def continuation_tables(q, psi_on_plus, psi_on_minus, phi_plus_vals, phi_minus_vals):
    """phi+ on the L- grid and phi- on the L+ grid from the factorization identity.

    phi_plus_vals: phi+ on the L+ grid; phi_minus_vals: phi- on the L- grid.
    """
    q = np.atleast_1d(np.asarray(q, dtype=complex))[:, None]
    a = 1.0 + np.asarray(psi_on_minus)[None, :] / q
    b = 1.0 + np.asarray(psi_on_plus)[None, :] / q
    if np.any(a == 0) or np.any(b == 0):
        raise AdmissibilityError("q + psi(xi) = 0 at a grid node")
    return 1.0 / (a * phi_minus_vals), 1.0 / (b * phi_plus_vals)


@dataclass
class WhfTable:
    q: np.ndarray
    xi_plus_nodes: np.ndarray
    xi_minus_nodes: np.ndarray
    phi_plus: np.ndarray          # on the L+ grid
    phi_minus: np.ndarray         # on the L- grid
    phi_plus_cont: np.ndarray     # phi+ on the L- grid
    phi_minus_cont: np.ndarray    # phi- on the L+ grid
    atom_plus: float = 0.0
    atom_minus: float = 0.0


def whf_table(model: LevyModel, q, plus: SinhContour, minus: SinhContour,
              plus1: SinhContour, minus1: SinhContour, chunk: int = 64) -> WhfTable:
    """Factors for all q on the main grids of plus (L+) and minus (L-), using plus1/minus1 as inner grids."""
    q = np.atleast_1d(np.asarray(q, dtype=complex))
    xp, _ = nodes_and_weights(plus)
    xm, _ = nodes_and_weights(minus)
    pp = np.empty((q.size, xp.size), complex)
    pm = np.empty((q.size, xm.size), complex)
    for s in range(0, q.size, chunk):
        qq = q[s:s + chunk]
        pp[s:s + chunk] = phi_plus(model, qq, xp, minus1)
        pm[s:s + chunk] = phi_minus(model, qq, xm, plus1)
    ppc, pmc = continuation_tables(q, model.psi(xp), model.psi(xm), pp, pm)
    return WhfTable(q=q, xi_plus_nodes=xp, xi_minus_nodes=xm, phi_plus=pp, phi_minus=pm,
                    phi_plus_cont=ppc, phi_minus_cont=pmc)


def dump_csv(table: WhfTable, path) -> None:
    """Debug dump: q, xi, Re phi, Im phi for both factors on their natural grids."""
    with open(path, "w") as fh:
        fh.write("factor,re_q,im_q,re_xi,im_xi,re_phi,im_phi\n")
        for name, nodes, vals in (("plus", table.xi_plus_nodes, table.phi_plus),
                                  ("minus", table.xi_minus_nodes, table.phi_minus)):
            for i, qv in enumerate(table.q):
                for x, v in zip(nodes, vals[i]):
                    fh.write(f"{name},{qv.real:.17g},{qv.imag:.17g},{x.real:.17g},{x.imag:.17g},"
                             f"{v.real:.17g},{v.imag:.17g}\n")
