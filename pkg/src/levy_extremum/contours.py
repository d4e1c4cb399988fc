"""Sinh-deformed contours, grid sizing and admissibility checks.

Fourier contours:  chi(y) = i*omega1 + b*sinh(i*omega + y)
Bromwich contours: chi(y) = sigma + i*b*sinh(i*omega + y)

A Fourier contour with omega > 0 (upward wings) is denoted L+, with
omega < 0 (downward wings) L-.  The vertex chi(0) lies at height
omega1 + b*sin(omega) on the imaginary axis.  Shifting y into the strip
|Im y| < d maps the contour onto the family with angles omega +- d.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, replace
from typing import Optional

import numpy as np

from .levy_models import LevyModel

UP, DOWN, BROMWICH = "fourier-up", "fourier-down", "bromwich"

OMEGA_L = math.pi / 10
STRIP_FRACTION = 0.9        # d = 0.9 * (usable half-width)
BROMWICH_LENGTH_FACTOR = 2.5
MIN_NODE_GAP = 0.5          # in units of zeta*b


class AdmissibilityError(ValueError):
    pass


@dataclass(frozen=True)
class SinhContour:
    omega1: float            # vertical shift (sigma for Bromwich contours)
    b: float
    omega: float
    kind: str
    zeta: float
    n_minus: int
    n_plus: int
    d: float = 0.0           # strip half-width in y used for sizing

    def __post_init__(self):
        if self.b <= 0:
            raise ValueError("contour scale b must be positive")
        if not abs(self.omega) < 0.5 * math.pi:
            raise ValueError("|omega| must be < pi/2")
        if self.kind == UP and not self.omega > 0:
            raise ValueError("fourier-up contour needs omega > 0")
        if self.kind == DOWN and not self.omega < 0:
            raise ValueError("fourier-down contour needs omega < 0")
        if self.kind == BROMWICH and not (0 < self.omega < 0.5 * math.pi):
            raise ValueError("Bromwich contour needs omega_l in (0, pi/2)")
        if self.kind not in (UP, DOWN, BROMWICH):
            raise ValueError(f"unknown contour kind {self.kind!r}")
        if self.zeta <= 0 or self.n_minus < 0 or self.n_plus < 0:
            raise ValueError("need zeta > 0 and nonnegative truncation indices")

    # -- geometry ---------------------------------------------------------
    @property
    def y(self) -> np.ndarray:
        return self.zeta * np.arange(-self.n_minus, self.n_plus + 1)

    def point(self, y):
        y = np.asarray(y, dtype=complex)
        s = np.sinh(1j * self.omega + y)
        if self.kind == BROMWICH:
            return self.omega1 + 1j * self.b * s
        return 1j * self.omega1 + self.b * s

    def derivative(self, y):
        """b*cosh(i omega + y); for Bromwich contours dq/dy = i times this."""
        return self.b * np.cosh(1j * self.omega + np.asarray(y, dtype=complex))

    @property
    def vertex(self) -> float:
        if self.kind == BROMWICH:
            return self.omega1 - self.b * math.sin(self.omega)
        return self.omega1 + self.b * math.sin(self.omega)

    def vertex_range(self, d: Optional[float] = None) -> tuple[float, float]:
        """Vertex heights (real parts for Bromwich) of the family |Im y| <= d."""
        d = self.d if d is None else d
        a = [self.omega - d, self.omega + d]
        if self.kind == BROMWICH:
            v = [self.omega1 - self.b * math.sin(x) for x in a]
        else:
            v = [self.omega1 + self.b * math.sin(x) for x in a]
        return min(v), max(v)

    def shifted(self, dy: float) -> "SinhContour":
        """The member of the family obtained by y -> y + i*dy."""
        return replace(self, omega=self.omega + dy)

    def scaled_angle(self, k: float) -> "SinhContour":
        """Same vertex and scale, angle multiplied by k (deformation pair)."""
        om = self.omega * k
        if self.kind == BROMWICH:
            w1 = self.vertex + self.b * math.sin(om)
        else:
            w1 = self.vertex - self.b * math.sin(om)
        return replace(self, omega=om, omega1=w1, d=self.d * k)

    def with_grid(self, zeta: float, n_minus: int, n_plus: int) -> "SinhContour":
        return replace(self, zeta=zeta, n_minus=n_minus, n_plus=n_plus)


def nodes_and_weights(contour: SinhContour):
    y = contour.y
    return contour.point(y), contour.derivative(y)


# ---------------------------------------------------------------------------
# parameter selection
# ---------------------------------------------------------------------------

def _from_vertex_range(v_lo: float, v_hi: float, omega: float, d: float):
    """(omega1, b) such that the family |Im y|<d has vertices exactly in [v_lo, v_hi]."""
    b = (v_hi - v_lo) / (2.0 * math.cos(omega) * math.sin(d))
    if omega > 0:
        w1 = v_hi - b * math.sin(omega + d)
    else:
        w1 = v_lo - b * math.sin(omega - d)
    return w1, b


def working_strip(model: LevyModel, x_scale: float = 1.0) -> tuple[float, float]:
    """Finite strip used for contour placement (infinite strips are capped)."""
    cap = 2.0 / x_scale
    return max(model.data.mu_minus, -cap), min(model.data.mu_plus, cap)


def fourier_angle(model: LevyModel, omega_l: float = OMEGA_L, k_omega: float = 1.0) -> tuple[float, float]:
    """(|omega|, d) for the Fourier contours.

    The families omega +- d must keep max(1,nu)*(|omega|+d) below
    pi/2 - (omega_l + d_l) so that q + psi(xi) avoids (-inf, 0] when q runs
    over the Bromwich family; 10% margin, d = 0.9*|omega|.
    """
    nu = max(1.0, model.nu)
    budget = 0.9 * (0.5 * math.pi - omega_l * (1.0 + STRIP_FRACTION)) / nu
    cone = min(model.data.gamma_plus, -model.data.gamma_minus)
    budget = min(budget, 0.9 * cone)
    if budget <= 0:
        raise AdmissibilityError("infeasible cone: no room for a sinh deformation")
    om = budget / (1.0 + STRIP_FRACTION)
    return om * k_omega, STRIP_FRACTION * om * k_omega


def fourier_length(model: LevyModel, Ne: float, decay: Optional[float] = None) -> float:
    """Truncation length Y (in y) so that the slowest non-oscillating envelope is below 10^-Ne.

    Without an explicit rate the envelope is taken as exp(-DECAY_PER_ORDER * nu * |y|):
    the products of Wiener-Hopf factors in the quintuple sums decay only like
    |xi|^(-nu/2) along the contour.
    """
    if decay is None:
        decay = DECAY_PER_ORDER * model.nu
    return Ne * math.log(10.0) / decay


DECAY_PER_ORDER = 0.5
VERTEX_LO, VERTEX_HI = 0.15, 0.7


def select_fourier_params(model: LevyModel, direction: str, Ne: float, x_scale: float = 1.0,
                          omega_l: float = OMEGA_L, k_omega: float = 1.0,
                          decay: Optional[float] = None, length: Optional[float] = None,
                          vertex_fracs: tuple[float, float] = (VERTEX_LO, VERTEX_HI),
                          max_nodes: int = 1200) -> SinhContour:
    """Sinh contour L+ (direction 'up') or L- ('down') sized for tolerance 10^-Ne.

    The vertex family is placed in [lo*mu+, hi*mu+] (resp. [hi*mu-, lo*mu-])
    of the working strip, so that every L+ member lies above every L- member.
    """
    mm, mp = working_strip(model, x_scale)
    om, d = fourier_angle(model, omega_l, k_omega)
    lo, hi = vertex_fracs
    if direction in ("up", UP):
        w1, b = _from_vertex_range(lo * mp, hi * mp, om, d)
        kind, sgn = UP, 1.0
    elif direction in ("down", DOWN):
        w1, b = _from_vertex_range(hi * mm, lo * mm, -om, d)
        kind, sgn = DOWN, -1.0
    else:
        raise ValueError("direction must be 'up' or 'down'")
    zeta = 2.0 * math.pi * d / (Ne * math.log(10.0))
    Y = length if length is not None else fourier_length(model, Ne, decay)
    N = int(math.ceil(Y / zeta))
    if N > max_nodes:
        warnings.warn(f"Fourier grid capped at {max_nodes} nodes per side (wanted {N}); "
                      f"truncation error may exceed 10^-{Ne:g}", stacklevel=2)
        N = max_nodes
    c = SinhContour(omega1=w1, b=b, omega=sgn * om, kind=kind, zeta=zeta, n_minus=N, n_plus=N, d=d)
    if k_omega != 1.0:
        # deformation pair: same vertex and node count as the unscaled contour,
        # so the pair is shorter and finer and sees truncation as well as step error
        ref = select_fourier_params(model, direction, Ne, x_scale, omega_l, 1.0, decay, length, vertex_fracs,
                                    max_nodes)
        c = replace(ref.scaled_angle(k_omega), zeta=zeta)
    return c


def sigma0(model: LevyModel, contours) -> float:
    """-min psi(i v) over the vertex ranges of the given Fourier contours (0 if positive)."""
    lo = min(c.vertex_range()[0] for c in contours)
    hi = max(c.vertex_range()[1] for c in contours)
    return max(0.0, -model.min_psi_on_segment(lo, hi))


def select_bromwich_params(model: LevyModel, Ne: float, T: float, sigma_min: float = 0.0,
                           omega_l: float = OMEGA_L, half: bool = False, gwr: bool = False,
                           length_factor: float = BROMWICH_LENGTH_FACTOR):
    """Bromwich contour q = sigma + i b sinh(i omega_l + y) for the time horizon T.

    b = 1/T; sigma puts the lowest vertex of the family |Im y| < 0.9 omega_l
    at sigma_min + 0.1/T.  The grid length follows from |e^{qT}| and is then
    stretched by `length_factor`.  With gwr=True the real GWR nodes are
    returned instead.
    """
    if gwr:
        from .laplace import gwr_nodes
        return gwr_nodes(T)
    if T <= 0:
        raise ValueError("time must be positive")
    d = STRIP_FRACTION * omega_l
    b = 1.0 / T
    floor = sigma_min + 0.1 / T
    sig = floor + b * math.sin(omega_l + d)
    zeta = 2.0 * math.pi * d / (Ne * math.log(10.0))
    target = Ne * math.log(10.0) + sig * T
    Y = math.acosh(max(1.0, target / (T * b * math.sin(omega_l))))
    N = int(math.ceil(length_factor * Y / zeta))
    return SinhContour(omega1=sig, b=b, omega=omega_l, kind=BROMWICH, zeta=zeta,
                       n_minus=0 if half else N, n_plus=N, d=d)


# ---------------------------------------------------------------------------
# admissibility
# ---------------------------------------------------------------------------

@dataclass
class AdmissibilityReport:
    ok: bool
    message: str = ""
    q: Optional[complex] = None
    xi: Optional[complex] = None
    value: Optional[complex] = None

    def __bool__(self):
        return self.ok


def admissibility_check(q_nodes, xi_nodes, model: LevyModel, eta_nodes=None, eta2_nodes=None,
                        guard: float = 1e-12) -> AdmissibilityReport:
    """Check q + psi(xi) not in (-inf, 0] and, if given, xi - eta != 0, xi - eta - eta' != 0."""
    q = np.atleast_1d(np.asarray(q_nodes, dtype=complex))
    xi = np.atleast_1d(np.asarray(xi_nodes, dtype=complex))
    if q.size and xi.size:
        ps = model.psi(xi)
        for qi in q:
            v = qi + ps
            bad = (v.real <= 0) & (np.abs(v.imag) < guard)
            if np.any(bad):
                k = int(np.argmax(bad))
                return AdmissibilityReport(False, "q + psi(xi) on (-inf, 0]", qi, xi[k], v[k])
    if eta_nodes is not None and xi.size:
        eta = np.atleast_1d(np.asarray(eta_nodes, dtype=complex))
        diff = xi[:, None] - eta[None, :]
        if eta.size and np.min(np.abs(diff)) == 0:
            k, j = np.unravel_index(np.argmin(np.abs(diff)), diff.shape)
            return AdmissibilityReport(False, "xi = eta", None, xi[k], eta[j])
        if eta2_nodes is not None:
            eta2 = np.atleast_1d(np.asarray(eta2_nodes, dtype=complex))
            if eta.size and eta2.size and not np.min(xi.imag) > np.max(eta.imag) + np.max(eta2.imag):
                for e in eta:
                    if np.min(np.abs(xi[:, None] - e - eta2[None, :])) == 0:
                        return AdmissibilityReport(False, "xi = eta + eta'", None, None, e)
    return AdmissibilityReport(True)


def assert_admissible(*args, **kw) -> None:
    rep = admissibility_check(*args, **kw)
    if not rep.ok:
        raise AdmissibilityError(f"{rep.message}: q={rep.q}, xi={rep.xi}, value={rep.value}")


# ---------------------------------------------------------------------------
# full scheme
# ---------------------------------------------------------------------------

@dataclass
class SchemeParams:
    Ne: float
    Ne_whf: float
    xi: SinhContour          # L+ (main grid)
    eta: SinhContour         # L- (main grid, also used for eta')
    xi1: SinhContour         # L+_1 (WHF grid)
    eta1: SinhContour        # L-_1 (WHF grid)
    q: SinhContour           # half Bromwich grid for the T-integral
    qp: Optional[SinhContour]  # full Bromwich grid for the t-integral (None when t = 0)
    sigma0: float
    T: float
    t: float
    k_omega: float = 1.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, dct: dict) -> "SchemeParams":
        kw = dict(dct)
        for key in ("xi", "eta", "xi1", "eta1", "q", "qp"):
            if kw.get(key) is not None:
                kw[key] = SinhContour(**kw[key])
        return cls(**kw)


def build_scheme(model: LevyModel, T: float, t: float, Ne: float = 8.0, Ne_whf: Optional[float] = None,
                 k_omega: float = 1.0, x_scale: float = 1.0, decay: Optional[float] = None,
                 omega_l: float = OMEGA_L) -> SchemeParams:
    """Coordinated contours for all five integration variables plus the WHF grids."""
    if Ne_whf is None:
        Ne_whf = Ne + 2.0
    om_l = omega_l * k_omega
    xi = select_fourier_params(model, "up", Ne, x_scale, omega_l, k_omega, decay)
    eta = select_fourier_params(model, "down", Ne, x_scale, omega_l, k_omega, decay)
    Y = xi.n_plus * xi.zeta
    Y1 = Y * Ne_whf / Ne + 2.0
    z1 = 2.0 * math.pi * xi.d / (Ne_whf * math.log(10.0))
    N1 = int(math.ceil(Y1 / z1))
    xi1 = xi.with_grid(z1, N1, N1)
    eta1 = eta.with_grid(z1, N1, N1)
    s0 = sigma0(model, [xi, eta])
    q = select_bromwich_params(model, Ne, T, s0, om_l, half=True)
    qp = select_bromwich_params(model, Ne, t, s0, om_l, half=False) if t > 0 else None
    return SchemeParams(Ne=Ne, Ne_whf=Ne_whf, xi=xi, eta=eta, xi1=xi1, eta1=eta1, q=q, qp=qp,
                        sigma0=s0, T=T, t=t, k_omega=k_omega)
