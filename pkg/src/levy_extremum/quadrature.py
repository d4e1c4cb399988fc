"""Trapezoid rule on uniform grids, its error bound, summation by parts."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

RESONANCE_TOL = 1e-8


@dataclass(frozen=True)
class TrapezoidSpec:
    zeta: float
    n_minus: int
    n_plus: int
    offset: float = 0.0
    half_first: bool = False  # one-sided grids: halve the weight of j=0

    def __post_init__(self):
        if not self.zeta > 0.0:
            raise ValueError("trapezoid step zeta must be positive")
        if self.n_minus < 0 or self.n_plus < 0 or self.n_minus + self.n_plus < 1:
            raise ValueError("need n_minus, n_plus >= 0 with n_minus + n_plus >= 1")

    def indices(self) -> np.ndarray:
        return np.arange(-self.n_minus, self.n_plus + 1)

    def nodes(self) -> np.ndarray:
        return self.offset + self.zeta * self.indices()

    def weights(self) -> np.ndarray:
        w = np.full(self.n_minus + self.n_plus + 1, self.zeta)
        if self.half_first:
            w[self.n_minus] *= 0.5
        return w


def trapezoid_sum(g: Callable, spec: TrapezoidSpec) -> complex:
    """zeta * sum_j g(offset + j zeta), j = -n_minus..n_plus."""
    y = spec.nodes()
    vals = np.asarray(g(y), dtype=complex)
    if vals.shape == ():
        vals = np.full(y.shape, vals)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        j = int(spec.indices()[np.argmax(bad)])
        raise FloatingPointError(f"non-finite integrand value at node index j={j}")
    return complex(np.sum(spec.weights() * vals))


def discretization_error_bound(H: float, d: float, zeta: float) -> float:
    """H e^{-2 pi d/zeta} / (1 - e^{-2 pi d/zeta}) for an integrand analytic in |Im y| < d.

    When zeta >= 2 pi d / ln 2 the value is >= H, i.e. non-informative; it is
    still returned as is.
    """
    if H < 0 or d <= 0 or zeta <= 0:
        raise ValueError("need H >= 0, d > 0, zeta > 0")
    e = math.exp(-2.0 * math.pi * d / zeta)
    return H * e / (1.0 - e)


def bound_is_informative(d: float, zeta: float) -> bool:
    return zeta < 2.0 * math.pi * d / math.log(2.0)


def _resonance(a: float, zeta: float) -> complex:
    r = complex(math.cos(a * zeta) - 1.0, math.sin(a * zeta))
    if abs(r) < RESONANCE_TOL:
        raise ValueError(f"resonant grid: |exp(i a zeta) - 1| = {abs(r):.3e} < {RESONANCE_TOL}; perturb zeta")
    return r


def sum_by_parts(g_values, a: float, zeta: float, n: int = 0, j0: int = 0) -> complex:
    """zeta/(e^{ia zeta}-1)^n * sum_j e^{-i a j zeta} Delta^n g_j.

    g_values[k] is g at index j = j0 + k. Forward differences
    Delta g_j = g_{j+1} - g_j consume the last n entries of the window.
    """
    g = np.asarray(g_values, dtype=complex)
    if n < 0:
        raise ValueError("order n must be nonnegative")
    if g.size <= n:
        raise ValueError("sequence too short for the requested difference order")
    r = _resonance(a, zeta) if n > 0 else 1.0
    dg = np.diff(g, n) if n > 0 else g
    j = j0 + np.arange(dg.size)
    return complex(zeta / r ** n * np.sum(np.exp(-1j * a * zeta * j) * dg))


def truncation_bound(G_n_integral: float, zeta: float, a: float, n: int) -> float:
    """(zeta/|e^{ia zeta}-1|)^n times the tail integral of the envelope G_n."""
    if n == 0:
        return float(G_n_integral)
    r = _resonance(a, zeta)
    return (zeta / abs(r)) ** n * float(G_n_integral)
