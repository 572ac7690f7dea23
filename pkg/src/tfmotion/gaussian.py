"""Second-order theory and exact simulation of TFBM II / TFGN II.

Closed-form variance and covariance of the normalized second-kind tempered
fractional Brownian motion, the Matern-type double-integral representation of
the covariance (H > 1/2), autocovariance and spectral densities of the
unit-lag increment noises, and exact Gaussian path sampling through Cholesky
factorization with a counter-based (Philox) generator.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy import special as _scipy_special

from .errors import FactorizationError, PoleError, QuadratureError
from .kernels import ProcessParams, QuadratureConfig, DEFAULT_QUAD
from .rng import philox_generator
from . import specfun

_SQRT_PI = math.sqrt(math.pi)
_TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# grids, matrices, ensembles


@dataclass(frozen=True)
class SampleGrid:
    """Strictly increasing time points with uniform-spacing metadata."""

    times: np.ndarray
    uniform: bool = field(init=False)
    dt: float | None = field(init=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or t.size < 1:
            raise ValueError("grid must be a 1-D array with at least one point")
        if t.size > 1 and not np.all(np.diff(t) > 0.0):
            raise ValueError("grid times must be strictly increasing")
        object.__setattr__(self, "times", t)
        if t.size > 1:
            d = np.diff(t)
            scale = max(abs(t[0]), abs(t[-1]), 1.0)
            uniform = bool(np.max(np.abs(d - d[0])) <= 1e-12 * scale)
            object.__setattr__(self, "uniform", uniform)
            object.__setattr__(self, "dt", float(d[0]) if uniform else None)
        else:
            object.__setattr__(self, "uniform", True)
            object.__setattr__(self, "dt", None)

    @classmethod
    def regular(cls, t_max: float, n: int, include_zero: bool = True) -> "SampleGrid":
        if n < 1 or t_max <= 0.0:
            raise ValueError("need n >= 1 points and t_max > 0")
        if include_zero:
            return cls(np.linspace(0.0, t_max, n))
        return cls(np.linspace(t_max / n, t_max, n))

    @property
    def n(self) -> int:
        return self.times.size


@dataclass
class CovarianceMatrix:
    """Covariance of TFBM II over a grid, with a cached Cholesky factor."""

    grid: SampleGrid
    values: np.ndarray
    chol: np.ndarray | None = None

    def cholesky(self, jitters=(0.0, 1e-14, 1e-13, 1e-12, 1e-11, 1e-10)) -> np.ndarray:
        """Lower-triangular factor, tolerating exact zero-variance rows (t = 0).

        Escalating jitter eps*trace/n is added on failure; running past the
        ladder signals a bug in the covariance closed form.
        """
        if self.chol is not None:
            return self.chol
        c = self.values
        n = c.shape[0]
        live = np.where(np.diag(c) > 0.0)[0]
        sub = c[np.ix_(live, live)]
        scale = np.trace(sub) / max(len(live), 1)
        for eps in jitters:
            try:
                lsub = np.linalg.cholesky(sub + eps * scale * np.eye(len(live)))
            except np.linalg.LinAlgError:
                continue
            full = np.zeros_like(c)
            full[np.ix_(live, live)] = lsub
            self.chol = full
            return full
        raise FactorizationError(
            "covariance matrix is indefinite beyond the jitter budget "
            f"(n={n}); this indicates a closed-form or series bug")


@dataclass(frozen=True)
class SpectralTable:
    """Rows (omega, value, err_bound) of a spectral density evaluation."""

    omega: np.ndarray
    value: np.ndarray
    err_bound: np.ndarray

    def __post_init__(self):
        o = np.asarray(self.omega, float)
        v = np.asarray(self.value, float)
        e = np.asarray(self.err_bound, float)
        if not (o.shape == v.shape == e.shape):
            raise ValueError("omega, value, err_bound must have equal shapes")
        if np.any(e < 0.0):
            raise ValueError("truncation bounds must be nonnegative")
        if np.any(v - e < 0.0) and np.any(v > 0.0):
            # a density value indistinguishable from zero is only legal at
            # frequencies where the density truly vanishes
            bad = np.where((v - e < 0.0) & (v > 0.0))[0]
            if bad.size:
                raise ValueError(f"err_bound swallows the value at rows {bad[:5]}")
        object.__setattr__(self, "omega", o)
        object.__setattr__(self, "value", v)
        object.__setattr__(self, "err_bound", e)


@dataclass(frozen=True)
class PathEnsemble:
    """Simulated paths (n_paths x n_times) plus the provenance to rebuild them."""

    params: ProcessParams
    grid: SampleGrid
    paths: np.ndarray
    seed: int

    def __post_init__(self):
        if self.paths.shape != (self.paths.shape[0], self.grid.n):
            raise ValueError("paths must be n_paths x n_times")
        if not np.all(np.isfinite(self.paths)):
            raise ValueError("paths contain non-finite entries")


# ---------------------------------------------------------------------------
# closed-form second-order theory


def variance_fbm_limit(H: float, t: float) -> float:
    """Variance of the untempered (lambda = 0) limit process at time t.

    Equals t^{2H} Gamma(1-H) / (sqrt(pi) H 2^{2H} Gamma(H+1/2)), 0 < H < 1.
    """
    if not 0.0 < H < 1.0:
        raise ValueError(f"the untempered limit requires H in (0, 1), got {H}")
    if t == 0.0:
        return 0.0
    c = specfun.gamma_fn(1.0 - H) / (_SQRT_PI * H * 2.0 ** (2.0 * H)
                                     * specfun.gamma_fn(H + 0.5))
    return abs(t) ** (2.0 * H) * c


def variance_tfbm2(H: float, lam: float, t: float,
                   ctl: specfun.SeriesControl = specfun.DEFAULT_SERIES) -> float:
    """Variance C_t^2 of normalized TFBM II at time t (H > 0, lambda > 0).

    Two-term 2F3 closed form in the argument z = lambda^2 t^2 / 4:

        C_t^2 = -2 Gamma(H) lam^{-2H} / (sqrt(pi) Gamma(H - 1/2))
                  * [1 - 2F3(1, -1/2; 1-H, 1/2, 1; z)]
              + t^{2H} Gamma(1-H) / (sqrt(pi) H 2^{2H} Gamma(H + 1/2))
                  * 2F3(1, H - 1/2; 1, H+1, H+1/2; z)

    validated against the defining spectral integral.  H = 1/2 is the
    Brownian case C_t^2 = |t| (the formula's 1/Gamma(0) factor kills the
    first term); integer H hits genuine poles of the closed form and raises.
    Negative t uses |t| (stationary increments).
    """
    if H <= 0.0:
        raise ValueError(f"H must be positive, got {H}")
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    t = abs(t)
    if t == 0.0:
        return 0.0
    if H == 0.5:
        return t
    if H == math.floor(H):
        raise PoleError(
            f"the 2F3 closed form has parameter poles at integer H (H = {H})")
    z = 0.25 * (lam * t) ** 2
    f1 = specfun.hyp2f3((1.0, -0.5), (1.0 - H, 0.5, 1.0), z, ctl)
    f2 = specfun.hyp2f3((1.0, H - 0.5), (1.0, H + 1.0, H + 0.5), z, ctl)
    a = -2.0 * specfun.gamma_fn(H) * lam ** (-2.0 * H) / (
        _SQRT_PI * specfun.gamma_fn(H - 0.5))
    b = specfun.gamma_fn(1.0 - H) / (_SQRT_PI * H * 2.0 ** (2.0 * H)
                                     * specfun.gamma_fn(H + 0.5))
    return a * (1.0 - f1) + b * t ** (2.0 * H) * f2


def covariance_tfbm2(H: float, lam: float, s: float, t: float,
                     ctl: specfun.SeriesControl = specfun.DEFAULT_SERIES) -> float:
    """Cov[B(t), B(s)] = (C_t^2 + C_s^2 - C_{t-s}^2) / 2 for TFBM II."""
    cs = variance_tfbm2(H, lam, s, ctl) if s != 0.0 else 0.0
    ct = variance_tfbm2(H, lam, t, ctl) if t != 0.0 else 0.0
    cd = variance_tfbm2(H, lam, t - s, ctl) if t != s else 0.0
    return 0.5 * (ct + cs - cd)


def matern_cov_integral(H: float, lam: float, s: float, t: float,
                        q: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Covariance of TFBM II via the Matern-kernel double integral (H > 1/2).

        C(H, lam) * int_0^t int_0^s |u-v|^{H-1} K_{H-1}(lam |u-v|) dv du,
        C(H, lam) = 1 / (sqrt(pi) Gamma(H - 1/2) (2 lam)^{H-1}).

    The prefactor is pinned by cross-validation against the spectral-integral
    variance (a prefactor twice as large, which sometimes appears with this
    representation, double-counts the |u-v| symmetry).  The rectangle integral
    is reduced to one dimension in the difference variable w = |u - v|, whose
    occupation length on [0,t] x [0,s] (s <= t) is
    rho(w) = min(s, t-w) + (s-w)_+; the integrable singularity at w = 0 sits
    at a panel endpoint.
    """
    if H <= 0.5:
        raise ValueError(f"the Matern representation requires H > 1/2, got {H}")
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if s < 0.0 or t < 0.0:
        raise ValueError("times must be nonnegative")
    if s == 0.0 or t == 0.0:
        return 0.0
    if s > t:
        s, t = t, s
    nu = H - 1.0
    c = 1.0 / (_SQRT_PI * specfun.gamma_fn(H - 0.5) * (2.0 * lam) ** (H - 1.0))

    def f(w: float) -> float:
        rho = min(s, t - w) + max(s - w, 0.0)
        return w ** (H - 1.0) * specfun.bessel_k(nu, lam * w) * rho

    splits = sorted({0.0, min(s, t - s), max(s, t - s), t})
    total = 0.0
    err = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for a, b in zip(splits[:-1], splits[1:]):
            if b - a <= 0.0:
                continue
            v, e = integrate.quad(f, a, b, epsabs=0.25 * q.abs_tol,
                                  epsrel=0.25 * q.rel_tol, limit=q.max_subdivisions)
            total += v
            err += e
    val = c * total
    if c * err > max(q.abs_tol, q.rel_tol * abs(val)) * 40.0:
        raise QuadratureError(
            f"matern_cov_integral error {c * err:.3e} exceeds tolerance")
    return val


# ---------------------------------------------------------------------------
# increment noise: autocovariance and spectral densities


def tfgn2_acvf(H: float, lam: float, j: int,
               q: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Autocovariance r(j) of TFGN II by quadrature of the real-line form

        r(j) = (1/pi) int_0^inf cos(w j) (2 - 2 cos w) w^{-2}
               (lam^2 + w^2)^{1/2 - H} dw.

    The oscillatory tail beyond Omega is handled by expanding
    (2 - 2 cos w) cos(j w) into pure cosines and integrating each with the
    QUADPACK Fourier transform; the identity against second differences of
    the motion variance is left to the tests.
    """
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if H <= 0.0:
        raise ValueError(f"H must be positive, got {H}")
    j = abs(int(j))

    def g(w: float) -> float:
        return (lam * lam + w * w) ** (0.5 - H) / (w * w)

    omega0 = max(1.0, 2.0 * lam)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        head, _ = integrate.quad(
            lambda w: (2.0 - 2.0 * math.cos(w)) * math.cos(j * w) * g(w),
            0.0, omega0, epsabs=1e-13, epsrel=0.25 * q.rel_tol,
            limit=max(q.max_subdivisions, 200 + 60 * j))
        # cosine coefficients of (2 - 2 cos w) cos(j w)
        coeffs: dict[int, float] = {}
        for m, c in ((j, 2.0), (j + 1, -1.0), (abs(j - 1), -1.0)):
            coeffs[m] = coeffs.get(m, 0.0) + c
        tail = 0.0
        for m, c in sorted(coeffs.items()):
            if c == 0.0:
                continue
            if m == 0:
                v, _ = integrate.quad(g, omega0, np.inf, epsabs=1e-13,
                                      epsrel=0.25 * q.rel_tol,
                                      limit=q.max_subdivisions)
            else:
                v, _ = integrate.quad(g, omega0, np.inf, weight="cos", wvar=m,
                                      limit=q.max_subdivisions)
            tail += c * v
    return (head + tail) / math.pi


def _lattice_tail_zeta(power: float, expo: float, lam: float, omega: float,
                       L: int, tol: float) -> tuple[float, float]:
    """sum_{|l| > L} |omega + 2 pi l|^{-power} (1 + lam^2/(omega+2 pi l)^2)^expo.

    Binomial expansion in lam^2/x^2 with each resulting pure power summed
    exactly through the Hurwitz zeta function; returns (value, remainder
    bound).  Requires 2 pi (L+1) - pi > lam so the expansion converges.
    """
    qp = L + 1.0 + omega / _TWO_PI
    qm = L + 1.0 - omega / _TWO_PI
    x_min = _TWO_PI * (L + 1.0) - math.pi
    u_max = (lam / x_min) ** 2
    if u_max >= 0.5:
        raise ValueError("lattice tail expansion needs 2 pi (L+1) - pi > sqrt(2) lam")
    total = 0.0
    coef = 1.0  # binom(expo, i)
    lam2i = 1.0
    for i in range(60):
        zsum = (_scipy_special.zeta(power + 2 * i, qp)
                + _scipy_special.zeta(power + 2 * i, qm))
        total += coef * lam2i * _TWO_PI ** (-(power + 2 * i)) * zsum
        coef_next = coef * (expo - i) / (i + 1.0)
        lam2i_next = lam2i * lam * lam
        # remainder: first omitted term with geometric domination
        zs_next = (_scipy_special.zeta(power + 2 * i + 2, qp)
                   + _scipy_special.zeta(power + 2 * i + 2, qm))
        rem = abs(coef_next) * lam2i_next * _TWO_PI ** (-(power + 2 * i + 2)) \
            * zs_next / (1.0 - u_max)
        if rem < tol or rem < 1e-18 * abs(total):
            return total, rem
        coef = coef_next
        lam2i = lam2i_next
    return total, rem


def _density_common(H: float, lam: float, omega: float, tol: float):
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if H <= 0.0:
        raise ValueError(f"H must be positive, got {H}")
    if abs(omega) > math.pi + 1e-12:
        raise ValueError(f"omega must lie in [-pi, pi], got {omega}")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    return min(max(omega, -math.pi), math.pi)


def tfgn2_spectral_density(H: float, lam: float, omega: float,
                           tol: float = 1e-10) -> tuple[float, float]:
    """Spectral density of TFGN II on [-pi, pi] and its truncation bound.

        h(w) = (1/2pi) { |e^{iw}-1|^2 w^{-2} (lam^2+w^2)^{1/2-H}
                 + |e^{iw}-1|^2 sum_{l != 0} (w+2pi l)^{-2}
                                [lam^2+(w+2pi l)^2]^{1/2-H} }

    The lattice sum runs directly over 0 < |l| <= L and the remainder is
    summed by a binomially expanded Hurwitz-zeta form whose own truncation
    error is the returned bound (kept below tol).  At w = 0 the value is the
    exact limit lam^{1-2H} / 2pi with zero bound.
    """
    omega = _density_common(H, lam, omega, tol)
    if omega == 0.0:
        return lam ** (1.0 - 2.0 * H) / _TWO_PI, 0.0
    w2 = 2.0 - 2.0 * math.cos(omega)  # |e^{i w} - 1|^2
    ell0 = (lam * lam + omega * omega) ** (0.5 - H) / (omega * omega)
    L = 8
    while True:
        direct = 0.0
        for ell in range(1, L + 1):
            for x in (omega + _TWO_PI * ell, omega - _TWO_PI * ell):
                direct += (lam * lam + x * x) ** (0.5 - H) / (x * x)
        try:
            tail, rem = _lattice_tail_zeta(1.0 + 2.0 * H, 0.5 - H, lam, omega, L,
                                           tol * _TWO_PI / max(w2, 1e-300))
        except ValueError:
            L *= 2
            continue
        bound = w2 * rem / _TWO_PI
        if bound <= tol or L >= 4096:
            value = (w2 * (ell0 + direct + tail)) / _TWO_PI
            return value, bound
        L *= 2


def tfgn1_spectral_density(H: float, lam: float, omega: float,
                           tol: float = 1e-10) -> tuple[float, float]:
    """Spectral density of first-kind TFGN on [-pi, pi] and truncation bound.

        h(w) = (1/2pi) |e^{iw}-1|^2 sum_{l in Z} [lam^2+(w+2pi l)^2]^{-(H+1/2)}

    with the l = 0 term included in the same form.  Vanishes at w = 0 (the
    anti-persistent signature of the first kind).
    """
    omega = _density_common(H, lam, omega, tol)
    if omega == 0.0:
        return 0.0, 0.0
    w2 = 2.0 - 2.0 * math.cos(omega)
    L = 8
    while True:
        direct = (lam * lam + omega * omega) ** (-(H + 0.5))
        for ell in range(1, L + 1):
            for x in (omega + _TWO_PI * ell, omega - _TWO_PI * ell):
                direct += (lam * lam + x * x) ** (-(H + 0.5))
        try:
            tail, rem = _lattice_tail_zeta(1.0 + 2.0 * H, -(H + 0.5), lam, omega, L,
                                           tol * _TWO_PI / max(w2, 1e-300))
        except ValueError:
            L *= 2
            continue
        bound = w2 * rem / _TWO_PI
        if bound <= tol or L >= 4096:
            value = w2 * (direct + tail) / _TWO_PI
            return value, bound
        L *= 2


# ---------------------------------------------------------------------------
# covariance matrices and exact Gaussian sampling


def build_cov_matrix(H: float, lam: float, grid: SampleGrid,
                     ctl: specfun.SeriesControl = specfun.DEFAULT_SERIES) -> CovarianceMatrix:
    """Covariance matrix of TFBM II over the grid, diagonal = C_t^2."""
    t = grid.times
    var_cache: dict[float, float] = {0.0: 0.0}

    def c2(x: float) -> float:
        x = abs(x)
        v = var_cache.get(x)
        if v is None:
            v = variance_tfbm2(H, lam, x, ctl)
            var_cache[x] = v
        return v

    n = grid.n
    values = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            values[i, j] = values[j, i] = 0.5 * (c2(t[i]) + c2(t[j]) - c2(t[i] - t[j]))
    return CovarianceMatrix(grid=grid, values=values)


def simulate_gaussian_paths(H: float, lam: float, grid: SampleGrid,
                            n_paths: int, seed: int,
                            n_workers: int = 1) -> PathEnsemble:
    """Exact TFBM II sampling: paths = L z with L the Cholesky factor.

    Each path draws its normals from a Philox generator keyed by
    (seed, path index), so the ensemble is reproducible regardless of how
    paths are distributed over workers.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    cov = build_cov_matrix(H, lam, grid)
    L = cov.cholesky()
    n = grid.n
    live = np.diag(cov.values) > 0.0
    lsub = L[np.ix_(live, live)]
    k = int(live.sum())
    paths = np.zeros((n_paths, n))

    def fill(i0: int, i1: int) -> None:
        for i in range(i0, i1):
            z = philox_generator(seed, i).standard_normal(k)
            paths[i, live] = lsub @ z

    if n_workers <= 1:
        fill(0, n_paths)
    else:
        step = max(1, -(-n_paths // n_workers))
        with ThreadPoolExecutor(max_workers=n_workers) as ex:
            futures = [ex.submit(fill, i, min(i + step, n_paths))
                       for i in range(0, n_paths, step)]
            for f in futures:
                f.result()
    params = ProcessParams(H=H, alpha=2.0, lam=lam, kind="II")
    return PathEnsemble(params=params, grid=grid, paths=paths, seed=int(seed))
