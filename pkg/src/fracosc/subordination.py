"""Random time change: stable subordinator paths, Monte-Carlo averages, and p^S.

The physical time U(tau) is a one-sided beta-stable subordinator, beta = alpha/2,
and S(t) = inf{tau : U(tau) > t} is its inverse. Averaging cos(omega S(t)) and
sin(omega S(t)) over independent paths gives A(t) and B(t).

Random numbers come from a counter-based generator: path ``i`` of seed ``s``
owns the stream keyed by hash(s, i), so results do not depend on how paths are
split between workers.
"""
import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from ._backend import kernels, num_threads
from .errors import DomainError, HorizonError, InversionError, UnsupportedParameterError
from .oscillations import OscParams

MIN_MEDIAN_STEPS = 1000
CHUNK = 4096
INVERSION_TOL = 1e-8
_SELF_TEST_TAUS = (0.05, 0.5, 1.0, 2.0, 4.0)


def _check_beta(beta):
    if not 0 < beta < 1:
        raise DomainError(f"stable index must lie in (0, 1), got {beta}")


# ---------------------------------------------------------------- sampling

@dataclass
class Substream:
    """Counter-based random stream for one path: draws are f(key, counter)."""

    seed: int
    path: int
    counter: int = 0
    key: int = field(init=False)

    def __post_init__(self):
        self.key = kernels.path_key(self.seed, self.path)


def sample_stable_increment(beta, rng_state):
    """One draw with Laplace transform exp(-s^beta), by Kanter's two-uniform method.

    ``rng_state`` is a :class:`Substream`; its counter advances by one.
    """
    _check_beta(beta)
    x = kernels.stable_draws(beta, rng_state.key, rng_state.counter, 1)
    rng_state.counter += 1
    return float(x[0])


def stable_sample(beta, seed, path, n, start=0):
    """Draws ``start .. start+n-1`` of the stream (seed, path)."""
    _check_beta(beta)
    return np.asarray(kernels.stable_draws(beta, kernels.path_key(seed, path), start, n))


@dataclass(frozen=True)
class SubordinatorPath:
    beta: float
    tau_step: float
    u_values: np.ndarray

    def __post_init__(self):
        _check_beta(self.beta)
        if not self.tau_step > 0:
            raise DomainError("tau_step must be positive")
        u = np.asarray(self.u_values, dtype=float)
        if u.ndim != 1 or u.size < 2 or u[0] != 0.0:
            raise DomainError("u_values must start at 0 and hold at least two points")
        if np.any(np.diff(u) < 0):
            raise DomainError("u_values must be nondecreasing")
        object.__setattr__(self, "u_values", u)

    @property
    def horizon(self):
        return float(self.u_values[-1])


def sample_path(beta, tau_step, horizon, seed, path=0, block=1024):
    """Staircase U(k tau_step), extended until it passes ``horizon``."""
    _check_beta(beta)
    key = kernels.path_key(seed, path)
    scale = tau_step ** (1.0 / beta)
    pieces = [np.zeros(1)]
    last, k = 0.0, 0
    while last <= horizon:
        x = scale * np.asarray(kernels.stable_draws(beta, key, k, block))
        u = last + np.cumsum(x)
        pieces.append(u)
        last = float(u[-1])
        k += block
    return SubordinatorPath(beta, tau_step, np.concatenate(pieces))


def inverse_hitting_time(path, t):
    """S(t), linearly interpolated in operational time between bracketing steps."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    u = path.u_values
    k = int(np.searchsorted(u, t, side="right"))  # first index with u[k] > t
    if k >= u.size:
        raise HorizonError(f"t={t:g} exceeds the path horizon {path.horizon:g}")
    lo, hi = u[k - 1], u[k]
    frac = (t - lo) / (hi - lo) if hi > lo else 0.0
    return path.tau_step * ((k - 1) + frac)


@functools.lru_cache(maxsize=64)
def stable_median(beta, n=20001):
    """Median of the standard one-sided stable law, from a fixed deterministic sample."""
    return float(np.median(stable_sample(beta, 0x5EED, 0, n)))


def default_tau_step(beta, horizon, min_steps=MIN_MEDIAN_STEPS):
    """tau_step with median S(horizon) / tau_step >= min_steps.

    S(T) has the law of (T / X)^beta, so its median is T^beta / median(X)^beta.
    """
    return (horizon / stable_median(beta)) ** beta / min_steps


# ---------------------------------------------------------------- Monte Carlo

@dataclass(frozen=True)
class MCEstimate:
    t_grid: np.ndarray
    a_hat: np.ndarray
    b_hat: np.ndarray
    std_err: np.ndarray  # shape (n_t, 2): columns for a_hat and b_hat
    n_paths: int
    seed: int
    tau_step: float


def hitting_time_matrix(beta, tau_step, t_grid, seed, path_start, n_paths, n_threads=None):
    """S_i(t_j) for paths path_start .. path_start+n_paths-1."""
    n_threads = num_threads() if n_threads is None else n_threads
    return np.asarray(kernels.hitting_times(beta, tau_step, np.asarray(t_grid, dtype=float),
                                            seed, path_start, n_paths, n_threads))


def mc_oscillation(p, t_grid, n_paths, seed, tau_step=None, n_threads=None):
    """Ensemble averages of cos(omega S(t)) and sin(omega S(t))."""
    if not isinstance(p, OscParams):
        raise DomainError("p must be OscParams")
    if p.alpha >= 2.0:
        raise UnsupportedParameterError("alpha = 2 has a deterministic clock; use 1 <= alpha < 2")
    if n_paths < 100:
        raise DomainError("n_paths must be at least 100")
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0 or np.any(t < 0) or np.any(np.diff(t) < 0):
        raise DomainError("t_grid must be a nonempty sorted array of nonnegative times")
    beta = p.alpha / 2.0
    if tau_step is None:
        tau_step = default_tau_step(beta, max(float(t[-1]), 1e-12))
    sums = np.zeros((4, t.size))  # cos, sin, cos^2, sin^2
    # chunks are reduced in a fixed order, so the result is independent of threading
    for start in range(0, n_paths, CHUNK):
        m = min(CHUNK, n_paths - start)
        s = p.omega * hitting_time_matrix(beta, tau_step, t, seed, start, m, n_threads)
        c, sn = np.cos(s), np.sin(s)
        sums += np.stack([c.sum(0), sn.sum(0), (c * c).sum(0), (sn * sn).sum(0)])
    mean = sums[:2] / n_paths
    var = np.maximum(sums[2:] / n_paths - mean ** 2, 0.0) * n_paths / (n_paths - 1)
    std_err = np.sqrt(var / n_paths).T
    return MCEstimate(t, mean[0], mean[1], std_err, int(n_paths), int(seed), float(tau_step))


# ---------------------------------------------------------------- density p^S

def _closed_density_half(t, tau):
    return np.exp(-np.square(tau) / (4.0 * t)) / math.sqrt(math.pi * t)


def _contour_weight(beta, t, tau, phi):
    # on the path where Im(s t - tau s^beta) = 0, s = rho e^{i phi}, the
    # integrand reduces to W e^{-tau W} with W = rho^beta sin((1-beta) phi) / sin(phi)
    sphi = np.sin(phi)
    log_rho = (np.log(tau / t) + np.log(np.sin(beta * phi)) - np.log(sphi)) / (1.0 - beta)
    return np.exp(beta * log_rho) * np.sin((1.0 - beta) * phi) / sphi


def _contour_density(beta, t, tau, atol):
    def integrand(phi):
        w = _contour_weight(beta, t, tau, phi)
        x = tau * w
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.where(x < 700.0, w * np.exp(-np.minimum(x, 700.0)), 0.0)
        return out / (math.pi * (1.0 - beta))

    # tau W rises monotonically from its value at 0 to infinity at pi; the
    # integrand peaks where tau W = 1, which moves toward pi as tau shrinks
    def excess(phi):
        return float(tau * _contour_weight(beta, t, tau, np.array([phi]))[0]) - 1.0

    lo, hi = 1e-12, math.pi * (1.0 - 1e-15)
    brk = {0.0, math.pi}
    if excess(lo) < 0:
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if excess(mid) < 0:
                lo = mid
            else:
                hi = mid
        peak = 0.5 * (lo + hi)
        brk.add(peak)
        gap = math.pi - peak
        for f in (0.5, 0.25, 2.0, 4.0, 8.0):
            v = math.pi - gap * f
            if 0.0 < v < math.pi:
                brk.add(v)
        for f in (0.5, 0.9):
            brk.add(peak * f)
    brk = np.array(sorted(brk))
    return quadrature.integrate_scalar(integrand, brk, atol)


@functools.lru_cache(maxsize=256)
def _self_test(t):
    """Check the contour rule at beta = 1/2 against the closed form at this t."""
    scale = 1.0 / math.sqrt(math.pi * t)
    for x in _SELF_TEST_TAUS:
        tau = x * math.sqrt(t)
        val, _ = _contour_density(0.5, t, tau, 1e-13 * max(scale, 1.0))
        ref = float(_closed_density_half(t, tau))
        if abs(val - ref) > 1e-10 * max(scale, 1.0):
            raise InversionError(
                f"contour self-test failed at t={t:g}, tau={tau:g}: {val!r} vs {ref!r}")
    return True


def _check_density_args(alpha, t, tau):
    if not 1.0 <= alpha < 2.0:
        raise UnsupportedParameterError(
            f"p^S is a density for 1 <= alpha < 2 (alpha = 2 gives a point mass); got {alpha}")
    if not t > 0:
        raise DomainError("t must be positive")
    if tau < 0:
        raise DomainError("tau must be nonnegative")


def ps_density(alpha, t, tau):
    """Density of the operational time S(t) at tau.

    Closed form at alpha = 1; otherwise a real integral along the
    steepest-descent contour of the Bromwich integral, whose integrand is
    positive, so no cancellation occurs.
    """
    _check_density_args(alpha, t, tau)
    beta = alpha / 2.0
    if alpha == 1.0:
        return float(_closed_density_half(t, tau))
    zero_tau = t ** (-beta) / math.gamma(1.0 - beta)
    if tau == 0:
        return zero_tau
    _self_test(float(t))
    scale = max(zero_tau, 1.0)
    val, err = _contour_density(beta, t, tau, 1e-13 * scale)
    if err > INVERSION_TOL * scale:
        raise InversionError(f"p^S at t={t:g}, tau={tau:g}: error {err:.3g} above {INVERSION_TOL:g}")
    return float(val)


def ps_density_contour(alpha, t, tau):
    """p^S by the contour integral even where a closed form exists (used for checks)."""
    _check_density_args(alpha, t, tau)
    beta = alpha / 2.0
    if tau == 0:
        return t ** (-beta) / math.gamma(1.0 - beta)
    scale = max(t ** (-beta) / math.gamma(1.0 - beta), 1.0)
    val, err = _contour_density(beta, t, tau, 1e-13 * scale)
    if err > INVERSION_TOL * scale:
        raise InversionError(f"p^S at t={t:g}, tau={tau:g}: error {err:.3g} above {INVERSION_TOL:g}")
    return float(val)


def ps_density_values(alpha, t, tau):
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    return np.array([ps_density(alpha, t, float(x)) for x in tau])


def _tau_breakpoints(alpha, t):
    s = t ** (alpha / 2.0)  # natural operational-time scale
    brk = [0.0]
    x = 0.125 * s
    while True:
        brk.append(x)
        if ps_density(alpha, t, x) * x < 1e-16:
            return np.array(brk)
        x *= 1.5


def subordination_integrals(alpha, omega, t, atol=1e-11):
    """(int p^S, int p^S cos(omega tau), int p^S sin(omega tau)) over tau >= 0."""
    brk = _tau_breakpoints(alpha, t)

    def f(tau):
        d = ps_density_values(alpha, t, tau)
        return np.stack([d, d * np.cos(omega * tau), d * np.sin(omega * tau)], axis=1)

    val, err = quadrature.integrate(f, brk, atol)
    return val, err


def ps_normalization(alpha, t):
    val, _ = subordination_integrals(alpha, 1.0, t)
    return float(val[0])


def quadrature_oscillation(p, t):
    """A(t), B(t) as integrals of p^S(t, tau) against cos and sin of omega tau."""
    if not t > 0:
        raise DomainError("t must be positive")
    val, _ = subordination_integrals(p.alpha, p.omega, t)
    return float(val[1]), float(val[2])
