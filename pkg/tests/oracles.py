"""Independent reference implementations used to check the library.

Everything here deliberately avoids the code paths under test: special
functions come from mpmath or direct quadrature of integral representations,
variances from oscillatory quadrature of the defining spectral integral, and
lattice sums from plain truncated summation with an integral-comparison tail
bound.
"""

import math

import mpmath as mp
import numpy as np
from scipy import integrate

mp.mp.dps = 40


def mp_gamma(x: float) -> float:
    return float(mp.gamma(x))


def mp_besselk(nu: float, x: float) -> float:
    return float(mp.besselk(mp.mpf(float(nu)), mp.mpf(float(x))))


def mp_hyp2f3(a, b, z) -> float:
    return float(mp.hyper([mp.mpf(x) for x in a], [mp.mpf(x) for x in b], mp.mpf(z)))


def besselk_quadrature(nu: float, x: float) -> float:
    """K_nu(x) from int_0^inf exp(-x cosh t) cosh(nu t) dt."""

    def f(t):
        a = x * math.cosh(t)
        if a > 700.0:
            return 0.0
        return math.exp(-a) * math.cosh(nu * t)

    v, _ = integrate.quad(f, 0.0, 40.0, epsabs=1e-16, epsrel=1e-14, limit=400)
    return v


def spectral_variance(H: float, lam: float, t: float) -> float:
    """Variance of TFBM II from (1/pi) int_0^inf (2-2cos wt) w^-2 (lam^2+w^2)^{1/2-H} dw."""
    g = lambda w: (lam * lam + w * w) ** (0.5 - H) / (w * w)
    full = lambda w: (2.0 - 2.0 * math.cos(w * t)) * g(w)
    omega0 = max(1.0, 2.0 * lam)
    v1 = integrate.quad(full, 0.0, omega0, limit=800, epsabs=1e-14, epsrel=1e-12)[0]
    v2 = integrate.quad(g, omega0, np.inf, limit=400, epsabs=1e-14, epsrel=1e-12)[0]
    v3 = integrate.quad(g, omega0, np.inf, weight="cos", wvar=t, limit=800)[0]
    return (v1 + 2.0 * v2 - 2.0 * v3) / math.pi


def _plus_pow(x: float, p: float) -> float:
    return x ** p if x > 0.0 else 0.0


def fbm_variance_timedomain(H: float, t: float) -> float:
    """Untempered variance from the time-domain kernel integral at t = 1,
    scaled by t^{2H}."""
    f = lambda s: (_plus_pow(1.0 - s, H - 0.5) - _plus_pow(-s, H - 0.5)) ** 2
    v = (integrate.quad(f, -np.inf, 0.0, epsabs=1e-14, epsrel=1e-12)[0]
         + integrate.quad(f, 0.0, 1.0, epsabs=1e-14, epsrel=1e-12)[0])
    return abs(t) ** (2.0 * H) * v / mp_gamma(H + 0.5) ** 2


def h_kernel_integral_rep(H: float, alpha: float, lam: float,
                          t: float, y: float) -> float:
    """Second-kind kernel from kappa * int_0^t (s-y)_+^{kappa-1} e^{-lam(s-y)} ds
    (valid for H > 1/alpha, and for H < 1/alpha when y < 0)."""
    k = H - 1.0 / alpha

    def f(s):
        return (s - y) ** (k - 1.0) * math.exp(-lam * (s - y)) if s > y else 0.0

    lo = max(0.0, y)
    v, _ = integrate.quad(f, lo, t, epsabs=1e-14, epsrel=1e-12, limit=400)
    return k * v


def frac_derivative_quadrature(kappa: float, lam: float, t: float, y: float) -> float:
    """Tempered fractional derivative of 1_[0,t] at y by quadrature of the
    defining difference integral (0 < kappa < 1)."""
    ind = lambda s: 1.0 if 0.0 <= s <= t else 0.0
    fy = ind(y)

    def f(s):
        return (fy - ind(s)) * (s - y) ** (-kappa - 1.0) * math.exp(-lam * (s - y))

    c = kappa / mp_gamma(1.0 - kappa)
    splits = sorted({x for x in (0.0, t, y) if x > y} | {y + 60.0 / max(lam, 1.0)})
    total = 0.0
    lo = y
    for hi in splits:
        v, _ = integrate.quad(f, lo, hi, epsabs=1e-14, epsrel=1e-11, limit=400)
        total += v
        lo = hi
    return lam ** kappa * fy + c * total


def lattice_density_brute(H: float, lam: float, omega: float, second_kind: bool,
                          n_terms: int = 2_000_000) -> tuple[float, float]:
    """Spectral density by plain truncated lattice summation.

    Returns (value, tail_bound) with the bound from integral comparison of
    the omitted |l| > n_terms terms.
    """
    ell = np.arange(1, n_terms + 1, dtype=float)
    xs = np.concatenate([omega + 2.0 * np.pi * ell, omega - 2.0 * np.pi * ell])
    if second_kind:
        s = float(np.sum((lam * lam + xs * xs) ** (0.5 - H) / (xs * xs)))
        s += (lam * lam + omega * omega) ** (0.5 - H) / (omega * omega) \
            if omega != 0.0 else 0.0
    else:
        s = float(np.sum((lam * lam + xs * xs) ** (-(H + 0.5))))
        s += (lam * lam + omega * omega) ** (-(H + 0.5))
    w2 = 2.0 - 2.0 * math.cos(omega)
    # omitted terms are below (2 pi l - pi)^{-1-2H} (1 + lam^2/pi^2)^{max(1/2-H,0)}
    sup = (1.0 + (lam / math.pi) ** 2) ** max(0.5 - H, 0.0)
    tail = 2.0 * sup * (2.0 * math.pi) ** (-1.0 - 2.0 * H) \
        * (n_terms - 0.5) ** (-2.0 * H) / (2.0 * H)
    return w2 * s / (2.0 * math.pi), w2 * tail / (2.0 * math.pi)


def riemann_alpha_norm(kern, alpha: float, t: float, y_min: float,
                       n: int = 2_000_000) -> float:
    """Brute midpoint Riemann sum of int |kern(t, y)|^alpha dy over [y_min, t]."""
    edges = np.linspace(y_min, t, n + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])
    dy = edges[1] - edges[0]
    vals = np.fromiter((abs(kern(t, float(y))) ** alpha for y in mids),
                       dtype=float, count=n)
    return float(np.sum(vals) * dy)
