"""Characteristic exponents of SINH-regular Levy processes.

Convention: E[exp(i xi X_t)] = exp(-t psi(xi)), psi(xi) = -i mu xi + psi0(xi).
Two families are provided: KoBoL (CGMY with equal orders on both sides)
and Brownian motion with drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma


class DomainError(ValueError):
    """Raised when an argument lies outside the analyticity domain of psi."""


# ---------------------------------------------------------------------------
# accurate small-argument helpers for complex powers
# ---------------------------------------------------------------------------

def _log1p(z):
    # log(1+z) = 2 atanh(z/(2+z)); numpy's complex atanh is accurate near 0
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 0.5
    zs = np.where(small, z, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        far = np.log(1.0 + z)
    return np.where(small, 2.0 * np.arctanh(zs / (2.0 + zs)), far)


def _expm1(w):
    w = np.asarray(w, dtype=complex)
    x, y = w.real, w.imag
    s = np.sin(0.5 * y)
    re = np.expm1(x) * np.cos(y) - 2.0 * s * s
    im = np.exp(x) * np.sin(y)
    return re + 1j * im


def _pow_shift_minus_one(lam: float, z, nu: float):
    """(lam + z)^nu - lam^nu for lam > 0, principal branch, without cancellation."""
    z = np.asarray(z, dtype=complex)
    u = z / lam
    small = np.abs(u) < 0.5
    us = np.where(small, u, 0.0)
    near = lam ** nu * _expm1(nu * _log1p(us))
    far = np.power(lam + z, nu) - lam ** nu
    return np.where(small, near, far)


# ---------------------------------------------------------------------------
# analyticity data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalyticityData:
    mu_minus: float
    mu_plus: float
    gamma_minus: float
    gamma_plus: float
    gamma_p_minus: float
    gamma_p_plus: float
    nu: float
    mu: float = 0.0
    nu_flag: str = ""  # "0+", "1+" for the logarithmic orders; unused here

    def __post_init__(self):
        if not (self.mu_minus < 0.0 < self.mu_plus):
            raise ValueError("strip must contain 0: need mu_minus < 0 < mu_plus")
        if not (self.gamma_minus <= self.gamma_p_minus < 0.0 < self.gamma_p_plus <= self.gamma_plus):
            raise ValueError("cone angles must satisfy g- <= g'- < 0 < g'+ <= g+")
        if not (0.0 < self.nu <= 2.0):
            raise ValueError("order nu must lie in (0, 2]")


# ---------------------------------------------------------------------------
# models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KobolParams:
    nu: float
    c: float
    lambda_minus: float
    lambda_plus: float
    mu: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.nu < 2.0):
            raise ValueError(f"KoBoL order nu={self.nu} must lie in (0,2)")
        if abs(self.nu - 1.0) < 1e-12:
            raise ValueError("KoBoL with nu=1 needs the logarithmic formula, which is not implemented")
        if self.c <= 0.0:
            raise ValueError("KoBoL intensity c must be positive")
        if not (self.lambda_minus < 0.0 < self.lambda_plus):
            raise ValueError("KoBoL needs lambda_minus < 0 < lambda_plus")


@dataclass(frozen=True)
class BrownianParams:
    sigma: float
    mu: float = 0.0
    strip_bound: float = 1e6

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise ValueError("Brownian volatility sigma must be positive")
        if self.strip_bound <= 0.0:
            raise ValueError("strip_bound must be positive")


def calibrate_c(nu: float, lambda_minus: float, lambda_plus: float, m2: float) -> float:
    """Intensity c such that psi''(0) = m2 for the symmetric-order KoBoL exponent."""
    if not (0.0 < nu < 2.0) or abs(nu - 1.0) < 1e-12:
        raise ValueError("nu must lie in (0,2) and differ from 1")
    if not (lambda_minus < 0.0 < lambda_plus):
        raise ValueError("need lambda_minus < 0 < lambda_plus")
    if m2 <= 0.0:
        raise ValueError("m2 must be positive")
    return m2 / (_gamma(2.0 - nu) * ((-lambda_minus) ** (nu - 2.0) + lambda_plus ** (nu - 2.0)))


class LevyModel:
    """Base class: psi, its analyticity data and the asymptotic coefficient."""

    params: object
    data: AnalyticityData

    @property
    def nu(self) -> float:
        return self.data.nu

    @property
    def mu(self) -> float:
        return self.data.mu

    def psi0(self, xi):
        raise NotImplementedError

    def psi(self, xi, check: bool = False):
        xi = np.asarray(xi, dtype=complex)
        if check:
            self.check_domain(xi)
        return -1j * self.mu * xi + self.psi0(xi)

    def __call__(self, xi):
        return self.psi(xi)

    def check_domain(self, xi) -> None:
        raise NotImplementedError

    def c_infinity(self, phi: float) -> complex:
        raise NotImplementedError

    def min_psi_on_segment(self, v_lo: float, v_hi: float, n: int = 401) -> float:
        """min of psi(i v) over v in [v_lo, v_hi] (psi is real on the imaginary axis)."""
        v = np.linspace(v_lo, v_hi, n)
        return float(np.min(self.psi(1j * v).real))


class Kobol(LevyModel):
    def __init__(self, params: KobolParams):
        self.params = params
        nu = params.nu
        gp = 0.5 * math.pi
        gpp = min(gp, gp / nu)
        self.data = AnalyticityData(
            mu_minus=params.lambda_minus, mu_plus=params.lambda_plus,
            gamma_minus=-gp, gamma_plus=gp,
            gamma_p_minus=-gpp, gamma_p_plus=gpp,
            nu=nu, mu=params.mu,
        )
        self._cg = params.c * float(_gamma(-nu))

    @classmethod
    def from_m2(cls, nu, lambda_minus, lambda_plus, m2, mu=0.0) -> "Kobol":
        c = calibrate_c(nu, lambda_minus, lambda_plus, m2)
        return cls(KobolParams(nu=nu, c=c, lambda_minus=lambda_minus, lambda_plus=lambda_plus, mu=mu))

    def psi0(self, xi):
        p = self.params
        xi = np.asarray(xi, dtype=complex)
        a = _pow_shift_minus_one(-p.lambda_minus, -1j * xi, p.nu)
        b = _pow_shift_minus_one(p.lambda_plus, 1j * xi, p.nu)
        return -self._cg * (a + b)

    def check_domain(self, xi) -> None:
        xi = np.atleast_1d(np.asarray(xi, dtype=complex))
        on_axis = np.abs(xi.real) <= 1e-300
        up = on_axis & (xi.imag >= self.params.lambda_plus)
        if np.any(up):
            z = xi[np.argmax(up)]
            raise DomainError(f"xi={z} lies on the branch cut i[mu_plus, inf), mu_plus={self.params.lambda_plus}")
        down = on_axis & (xi.imag <= self.params.lambda_minus)
        if np.any(down):
            z = xi[np.argmax(down)]
            raise DomainError(f"xi={z} lies on the branch cut i(-inf, mu_minus], mu_minus={self.params.lambda_minus}")
        if not np.all(np.isfinite(xi)):
            raise DomainError("non-finite xi")

    def c_infinity(self, phi: float) -> complex:
        d = self.data
        if not (d.gamma_minus < phi < d.gamma_plus):
            raise DomainError(f"phi={phi} outside the cone ({d.gamma_minus}, {d.gamma_plus})")
        nu = self.params.nu
        return -2.0 * self._cg * math.cos(0.5 * nu * math.pi) * complex(math.cos(nu * phi), math.sin(nu * phi))


class Brownian(LevyModel):
    def __init__(self, params: BrownianParams):
        self.params = params
        R = params.strip_bound
        gp = 0.5 * math.pi
        self.data = AnalyticityData(
            mu_minus=-R, mu_plus=R,
            gamma_minus=-gp, gamma_plus=gp,
            gamma_p_minus=-0.25 * math.pi, gamma_p_plus=0.25 * math.pi,
            nu=2.0, mu=params.mu,
        )

    def psi0(self, xi):
        xi = np.asarray(xi, dtype=complex)
        return 0.5 * self.params.sigma ** 2 * xi * xi

    def check_domain(self, xi) -> None:
        xi = np.atleast_1d(np.asarray(xi, dtype=complex))
        if not np.all(np.isfinite(xi)):
            raise DomainError("non-finite xi")
        R = self.params.strip_bound
        if np.any(np.abs(xi.imag) >= R):
            raise DomainError(f"|Im xi| exceeds the clamped strip bound {R}")

    def c_infinity(self, phi: float) -> complex:
        d = self.data
        if not (d.gamma_minus < phi < d.gamma_plus):
            raise DomainError(f"phi={phi} outside the cone ({d.gamma_minus}, {d.gamma_plus})")
        s2 = self.params.sigma ** 2
        return 0.5 * s2 * complex(math.cos(2 * phi), math.sin(2 * phi))


def psi(model: LevyModel, xi, check: bool = True):
    return model.psi(xi, check=check)


def c_infinity(model: LevyModel, phi: float) -> complex:
    return model.c_infinity(phi)


def model_from_config(block: dict) -> LevyModel:
    """Build a model from a CLI/JSON block, e.g. {"type": "kobol", "nu": 1.2, ...}."""
    kind = str(block.get("type", "")).lower()
    if kind == "kobol":
        if "m2" in block and "c" in block:
            raise ValueError("model: 'm2' and 'c' are mutually exclusive")
        nu = float(block["nu"])
        lp = float(block.get("lambda_plus", 1.0))
        lm = float(block.get("lambda_minus", -2.0))
        mu = float(block.get("mu", 0.0))
        if "c" in block:
            return Kobol(KobolParams(nu=nu, c=float(block["c"]), lambda_minus=lm, lambda_plus=lp, mu=mu))
        return Kobol.from_m2(nu, lm, lp, float(block.get("m2", 0.1)), mu=mu)
    if kind in ("bm", "brownian"):
        return Brownian(BrownianParams(sigma=float(block.get("sigma", 1.0)), mu=float(block.get("mu", 0.0)),
                                       strip_bound=float(block.get("strip_bound", 1e6))))
    raise ValueError(f"model.type: unknown model type {block.get('type')!r}")


def benchmark_kobol(nu: float = 1.2) -> Kobol:
    """KoBoL set used throughout the tests: lambda+=1, lambda-=-2, mu=0, m2=0.1."""
    return Kobol.from_m2(nu, -2.0, 1.0, 0.1)
