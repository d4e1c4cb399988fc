"""Laplace inversion: Gaver-Stehfest, Gaver-Wynn-Rho and sinh-deformed Bromwich sums."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from math import comb, factorial
from typing import Callable, Sequence

import numpy as np

from .contours import BROMWICH, SinhContour

LN2 = math.log(2.0)


@dataclass(frozen=True)
class GwrConfig:
    M: int = 8                       # Gaver functionals; transform evaluated at 2M nodes
    shifts: Sequence[float] = (0.0, 0.5, 1.0)
    mode: str = "gwr"                # or "gaver-stehfest"
    sigma0: float = 0.0              # abscissa of convergence to respect

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if self.mode not in ("gwr", "gaver-stehfest"):
            raise ValueError("mode must be 'gwr' or 'gaver-stehfest'")


# ---------------------------------------------------------------------------
# Gaver-Stehfest
# ---------------------------------------------------------------------------

GS_MAX_M = 9


def gs_weights(M: int) -> np.ndarray:
    """Stehfest weights zeta_k, k = 1..2M (exact integer arithmetic, then float)."""
    if M < 1:
        raise ValueError("M must be >= 1")
    w = []
    for k in range(1, 2 * M + 1):
        s = 0
        for j in range((k + 1) // 2, min(k, M) + 1):
            s += j ** (M + 1) * comb(M, j) * comb(2 * j, j) * comb(j, k - j)
        w.append((-1) ** (M + k) * s / factorial(M))
    w = np.array(w, dtype=float)
    if M > GS_MAX_M:
        raise ValueError(f"M={M} too large for double precision (max |weight| = {np.max(np.abs(w)):.3e})")
    return w


def gs_invert(F: Callable, T: float, M: int = 7):
    q = LN2 / T * np.arange(1, 2 * M + 1)
    vals = np.asarray(F(q))
    w = gs_weights(M).reshape((-1,) + (1,) * (vals.ndim - 1))
    return LN2 / T * np.sum(w * vals, axis=0)


# ---------------------------------------------------------------------------
# Gaver functionals + Wynn rho
# ---------------------------------------------------------------------------

def gwr_nodes(T: float, M: int = 8, shift: float = 0.0) -> np.ndarray:
    return LN2 / T * np.arange(1, 2 * M + 1) + shift


def gaver_functionals(vals: np.ndarray, T: float, M: int) -> list:
    """f_n = (ln2/T) n C(2n,n) sum_k (-1)^k C(n,k) F((n+k) ln2/T), n = 1..M.

    vals[k-1] holds F(k ln2/T), k = 1..2M (any trailing shape).
    """
    tau = LN2 / T
    out = []
    for n in range(1, M + 1):
        s = 0.0
        for k in range(n + 1):
            s = s + (-1) ** k * comb(n, k) * vals[n + k - 1]
        out.append(tau * n * comb(2 * n, n) * s)
    return out


def wynn_rho(seq: list):
    """Wynn's rho algorithm; returns the last entry of the last even column."""
    N = len(seq)
    prev = [np.zeros_like(np.asarray(seq[0], dtype=float)) for _ in range(N + 1)]
    cur = [np.asarray(s, dtype=float) for s in seq]
    best = cur[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        for k in range(1, N):
            nxt = [prev[j + 1] + k / (cur[j + 1] - cur[j]) for j in range(len(cur) - 1)]
            prev, cur = cur, nxt
            if k % 2 == 0:
                cand = cur[-1]
                ok = np.isfinite(cand)
                if not np.all(ok):
                    warnings.warn("rho recursion hit a vanishing difference; keeping last stable diagonal")
                best = np.where(ok, cand, best)
    return best


def gwr_invert(V_tilde: Callable, T: float, cfg: GwrConfig = GwrConfig(), return_error: bool = False):
    """GWR inversion at time T.

    V_tilde accepts an array of real q (shape (2M,)) and returns values of
    shape (2M, ...).  The shift trick is applied for every a in cfg.shifts
    (raised if needed so that ln2/T + a exceeds cfg.sigma0); the first shift
    gives the value, the spread over shifts the error estimate.
    """
    if T <= 0:
        raise ValueError("time must be positive")
    base = max(0.0, cfg.sigma0 - LN2 / T + 1e-3) if cfg.sigma0 > 0 else 0.0
    results = []
    for a in cfg.shifts:
        a = a + base
        q = gwr_nodes(T, cfg.M, a)
        vals = np.asarray(V_tilde(q))
        if vals.shape[0] != q.size:
            raise ValueError("V_tilde must return one value per node along axis 0")
        if cfg.mode == "gaver-stehfest":
            w = gs_weights(cfg.M).reshape((-1,) + (1,) * (vals.ndim - 1))
            r = LN2 / T * np.sum(w * vals, axis=0)
        else:
            r = wynn_rho(gaver_functionals(vals, T, cfg.M))
        results.append(math.exp(a * T) * np.real(r))
    value = results[0]
    if not return_error:
        return value
    err = np.max(results, axis=0) - np.min(results, axis=0)
    return value, err


# ---------------------------------------------------------------------------
# sinh-deformed Bromwich integral
# ---------------------------------------------------------------------------

def bromwich_weights(contour: SinhContour, T: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes q_j and weights w_j with (1/2 pi i) int e^{qT} F(q) dq = Re sum_j w_j F(q_j).

    Full symmetric grids use zeta/(2 pi); one-sided grids (n_minus = 0) use
    zeta/pi with the first weight halved.
    """
    if contour.kind != BROMWICH:
        raise ValueError("Bromwich contour required")
    y = contour.y
    q = contour.point(y)
    der = contour.derivative(y)
    if contour.n_minus == 0:
        w = contour.zeta / math.pi * der * np.exp(q * T)
        w[0] *= 0.5
    else:
        w = contour.zeta / (2.0 * math.pi) * der * np.exp(q * T)
    return q, w


def sinh_bromwich(F: Callable, T: float, contour: SinhContour, tol: float = 1e-8, return_residue: bool = False):
    q, w = bromwich_weights(contour, T)
    vals = np.asarray(F(q), dtype=complex)
    s = np.tensordot(w, vals, axes=(0, 0))
    residue = np.max(np.abs(np.imag(s))) if contour.n_minus > 0 else 0.0
    if contour.n_minus > 0 and residue > tol * max(1.0, float(np.max(np.abs(s)))):
        warnings.warn(f"Bromwich sum has imaginary residue {residue:.2e}; check contour/branch choices")
    val = np.real(s)
    if return_residue:
        return val, residue
    return val
