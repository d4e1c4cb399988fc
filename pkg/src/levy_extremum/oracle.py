"""Independent reference values for the joint law of (X_T, sup X, argmax).

* Brownian motion without drift: the classical density of (argmax, max, X_T),
  integrated with the X_T- and max-integrals done in closed form and the
  time integral by adaptive quadrature.
* Monte Carlo on a discrete skeleton, with Gaussian increments for Brownian
  motion and inverse-CDF sampling for other models (the CDF of one step is
  obtained by Fourier inversion and does not touch the Wiener-Hopf code).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import ndtr

from .levy_models import Brownian, LevyModel


class OracleError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Brownian motion
# ---------------------------------------------------------------------------

def bm_triple_density(s, m, b, T: float, sigma: float = 1.0):
    """Density of (argmax, max, B_T) at (s, m, b) for sigma*W on [0, T]; zero off the support."""
    s, m, b = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (s, m, b)))
    ok = (s > 0) & (s < T) & (m >= 0) & (m >= b)
    ss = np.where(ok, s, 0.5 * T)
    s2 = sigma * sigma
    with np.errstate(over="ignore", invalid="ignore"):
        val = (m * (m - b) / (math.pi * s2 * s2 * ss ** 1.5 * (T - ss) ** 1.5)
               * np.exp(-m * m / (2 * s2 * ss) - (m - b) ** 2 / (2 * s2 * (T - ss))))
    out = np.where(ok, val, 0.0)
    return out if out.ndim else float(out)


def _gauss_moment_slab(lo, hi, mu, V):
    """int_lo^hi m exp(-(m-mu)^2/(2V)) dm."""
    r = math.sqrt(V)
    e_lo = math.exp(-0.5 * ((lo - mu) / r) ** 2)
    e_hi = 0.0 if math.isinf(hi) else math.exp(-0.5 * ((hi - mu) / r) ** 2)
    return V * (e_lo - e_hi) + mu * math.sqrt(2 * math.pi * V) * (ndtr((hi - mu) / r) - ndtr((lo - mu) / r))


def _bm_time_integrand(s, a1, a2, T, sigma):
    """Density of argmax at s restricted to {max <= a2, B_T <= a1} (b and m integrated)."""
    A = sigma ** 2 * s
    B = sigma ** 2 * (T - s)
    pref = B / (math.pi * sigma ** 4 * s ** 1.5 * (T - s) ** 1.5)
    acc = 0.0
    if a1 > 0:
        c = min(a1, a2)
        acc += -A * math.expm1(-c * c / (2 * A))
    lo = max(a1, 0.0)
    if a2 > lo:
        V = A * B / (A + B)
        mu = V * a1 / B
        C = a1 * a1 / (2 * (A + B))
        acc += math.exp(-C) * _gauss_moment_slab(lo, a2, mu, V)
    return pref * acc


def bm_triple_cpdf(a1: float, a2: float, T: float, t: float, sigma: float = 1.0, tol: float = 1e-10) -> float:
    """P[B_T <= a1, max B <= a2, argmax <= t] for B = sigma*W."""
    if not (T > 0 and 0 < t <= T and sigma > 0):
        raise ValueError("need T > 0, 0 < t <= T, sigma > 0")
    if a2 <= 0:
        return 0.0
    # s = u^2 and s = T - w^2 remove the inverse square-root singularities at both ends
    def f_left(u):
        s = u * u
        return 2 * u * _bm_time_integrand(s, a1, a2, T, sigma) if 0 < s < T else 0.0

    def f_right(w):
        s = T - w * w
        return 2 * w * _bm_time_integrand(s, a1, a2, T, sigma) if 0 < s < T else 0.0

    mid = 0.5 * T
    pieces = [(f_left, 0.0, math.sqrt(min(t, mid)))]
    if t > mid:
        pieces.append((f_right, math.sqrt(T - t), math.sqrt(T - mid)))
    total, err = 0.0, 0.0
    for fn, lo, hi in pieces:
        v, e = integrate.quad(fn, lo, hi, epsabs=tol, epsrel=tol, limit=400)
        total += v
        err += e
    if err > 1e-7:
        raise OracleError(f"BM oracle quadrature did not reach tolerance: estimate {total}, error {err}")
    return float(total)


def bm_joint_cdf(a1: float, h: float, T: float, sigma: float = 1.0) -> float:
    """P[B_T <= a1, max B <= h] by reflection (a1 <= h, h > 0)."""
    r = sigma * math.sqrt(T)
    a1 = min(a1, h)
    return float(ndtr(a1 / r) - ndtr((a1 - 2 * h) / r))


def arcsine_cdf(t: float, T: float) -> float:
    return 2.0 / math.pi * math.asin(math.sqrt(t / T))


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class McConfig:
    n_steps: int = 10_000
    n_paths: int = 100_000
    seed: int = 20240611
    sampler: str = "auto"          # gaussian | cdf-inversion | auto
    chunk: int = 500               # paths per block; the seed of a block is (seed, block index)
    table_size: int = 2048

    def __post_init__(self):
        if self.n_steps < 10:
            raise ValueError("n_steps must be >= 10")
        if self.n_paths < 1000:
            raise ValueError("n_paths must be >= 1000")
        if self.sampler not in ("gaussian", "cdf-inversion", "auto"):
            raise ValueError("sampler must be gaussian, cdf-inversion or auto")
        if self.chunk < 1 or self.table_size < 16:
            raise ValueError("chunk >= 1 and table_size >= 16 required")


def _step_variance(model: LevyModel, dt: float) -> float:
    h = 1e-3
    d2 = (model.psi(h) - 2 * model.psi(0.0) + model.psi(-h)).real / (h * h)
    return max(d2, 1e-300) * dt


def step_cdf_table(model: LevyModel, dt: float, size: int = 2048, Ne: float = 12.0):
    """(x, F) with F the CDF of X_dt on a sinh-graded grid; F is made monotone."""
    from .joint_cpdf import SinhEngine  # marginal CDF only, no Wiener-Hopf factors

    scale = math.sqrt(_step_variance(model, dt))
    lam = min(-model.data.mu_minus, model.data.mu_plus)
    # exponential tails reach e^-40 at 40/lam; light tails need a floor in units of the step scale
    reach = max(40.0 / lam, 12.0 * scale) + abs(model.mu) * dt
    U = math.asinh(reach / scale)
    x = scale * np.sinh(np.linspace(-U, U, size)) + model.mu * dt
    eng = SinhEngine(model, dt, dt, Ne=Ne, check=False)
    F = np.clip(eng.marginal_cdf(x), 0.0, 1.0)
    F = np.maximum.accumulate(F)
    if not (F[0] < 1e-4 and F[-1] > 1 - 1e-4):
        raise OracleError(f"step CDF table does not bracket the distribution: F[0]={F[0]:.3g}, F[-1]={F[-1]:.3g}")
    keep = np.concatenate([[True], np.diff(F) > 0])
    return x[keep], F[keep]


def _mc_counts(model: LevyModel, T: float, t: float, pairs, cfg: McConfig, thins=(1,)):
    """Counts of {X_T <= a1, max <= a2, argmax <= t} per (thin, pair); thin k uses every k-th skeleton point."""
    n = cfg.n_steps
    if any(n % k for k in thins):
        raise ValueError("every thinning factor must divide n_steps")
    dt = T / n
    sampler = cfg.sampler
    if sampler == "auto":
        sampler = "gaussian" if isinstance(model, Brownian) else "cdf-inversion"
    if sampler == "gaussian":
        if not isinstance(model, Brownian):
            raise OracleError("the Gaussian sampler needs a Brownian model")
        sig = model.params.sigma * math.sqrt(dt)
        drift = model.mu * dt
    else:
        xs, Fs = step_cdf_table(model, dt, cfg.table_size)
    counts = np.zeros((len(thins), len(pairs)))
    done = 0
    block = 0
    while done < cfg.n_paths:
        m = min(cfg.chunk, cfg.n_paths - done)
        rng = np.random.default_rng([cfg.seed, block])
        if sampler == "gaussian":
            inc = drift + sig * rng.standard_normal((m, n))
        else:
            inc = np.interp(rng.random((m, n)), Fs, xs)
        full = np.cumsum(inc, axis=1)
        for r, k in enumerate(thins):
            path = full[:, k - 1::k]
            it = int(math.floor(t / (k * dt) + 1e-9))
            # X_0 = 0 is part of the skeleton; argmax ties go to the earliest index
            top = path.max(axis=1)
            mx = np.maximum(top, 0.0)
            am = np.where(top > 0.0, np.argmax(path, axis=1) + 1, 0)
            early = am <= it
            for j, (a1, a2) in enumerate(pairs):
                counts[r, j] += np.count_nonzero(early & (mx <= a2) & (path[:, -1] <= a1))
        done += m
        block += 1
    return counts / cfg.n_paths


def _se(p, n):
    return np.sqrt(np.maximum(p * (1 - p), 1.0 / n) / n)


def mc_triple_cpdf(model: LevyModel, query, cfg: McConfig = McConfig(), points=None):
    """Skeleton estimate of P[X_T <= a1, max <= a2, argmax <= t].

    `points` may list several (a1, a2) pairs for the same (T, t); the result is
    then a pair of arrays.  Returns (estimate, standard error).
    """
    pairs = [(query.a1, query.a2)] if points is None else list(points)
    p = _mc_counts(model, query.T, query.t, pairs, cfg)[0]
    se = _se(p, cfg.n_paths)
    if points is None:
        return float(p[0]), float(se[0])
    return p, se


def mc_with_skeleton_bias(model: LevyModel, query, cfg: McConfig = McConfig(), points=None, factor: int = 10):
    """(estimate, se, bias allowance) from one set of paths.

    The allowance is |p_n - p_{n/factor}|, the change caused by thinning the
    same paths to a skeleton `factor` times coarser.  The monitoring bias
    shrinks as the skeleton is refined, so this bounds the remaining bias at
    n steps when the convergence is at least geometric in the refinement.
    """
    pairs = [(query.a1, query.a2)] if points is None else list(points)
    p = _mc_counts(model, query.T, query.t, pairs, cfg, thins=(1, factor))
    se = _se(p[0], cfg.n_paths)
    bias = np.abs(p[0] - p[1])
    if points is None:
        return float(p[0, 0]), float(se[0]), float(bias[0])
    return p[0], se, bias
