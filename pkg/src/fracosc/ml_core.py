"""Special functions and the two-parameter Mittag-Leffler function on the real axis.

``E_{mu,nu}(z) = sum_k z^k / Gamma(mu k + nu)`` is evaluated by one of four
routes: the power series (small |z|), closed forms for mu in {1, 2}, the
asymptotic expansion for large negative z, and the spectral (branch cut plus
residue) representation for 1 < mu < 2 and z < 0. Every route returns an
error estimate it commits to.
"""
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import (
    AccuracyError,
    DomainError,
    OverflowDomainError,
    PoleError,
    SeriesConvergenceError,
    UnsupportedParameterError,
)

EPS = np.finfo(float).eps
SERIES_RADIUS = 5.0
MAX_TERMS = 400
DEFAULT_TOL = 1e-12
ERFI_MAX = 26.0
_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


class Method(enum.Enum):
    Series = "series"
    Spectral = "spectral"
    Asymptotic = "asymptotic"
    ClosedForm = "closed_form"


class Kind(enum.Enum):
    """Which oscillation: the cosine-like ``e`` or the sine-like ``i``."""

    E = "e"
    I = "i"  # noqa: E741

    def nu(self, alpha):
        return 1.0 if self is Kind.E else 1.0 + alpha / 2.0


@dataclass(frozen=True)
class MLArg:
    mu: float
    nu: float
    z: float
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not (self.mu > 0 and self.nu > 0):
            raise DomainError(f"need mu > 0 and nu > 0, got mu={self.mu}, nu={self.nu}")
        if not math.isfinite(self.z):
            raise DomainError("z must be finite")
        if not self.tol >= 10 * EPS:
            raise DomainError(f"tol must be at least 10*eps, got {self.tol}")


@dataclass(frozen=True)
class MLValue:
    value: float
    err_estimate: float
    method: Method


# ---------------------------------------------------------------- special functions

def gamma_real(x):
    """Gamma function of a real argument; raises :class:`PoleError` at 0, -1, -2, ..."""
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"gamma has a pole at {x:g}")
    return math.gamma(x)


def rgamma(x):
    """1/Gamma(x), zero at the poles (vectorised)."""
    return special.rgamma(x)


def dawson(x):
    """Dawson's integral ``exp(-x^2) int_0^x exp(y^2) dy``."""
    return special.dawsn(x)


def erfi(x):
    """Imaginary error function for ``0 <= x <= 26``."""
    x = float(x)
    if x < 0:
        raise DomainError("erfi is implemented for x >= 0")
    if x > ERFI_MAX:
        raise OverflowDomainError(f"erfi({x:g}) overflows; use dawson-based forms")
    return _TWO_OVER_SQRT_PI * math.exp(x * x) * float(dawson(x))


# ---------------------------------------------------------------- series route

def _inv_gamma(x):
    if x < 171.0:
        return 1.0 / math.gamma(x)
    return math.exp(-math.lgamma(x))


def _series(mu, nu, z, tol, max_terms=MAX_TERMS):
    """Vectorised truncated series. Returns (value, err, converged)."""
    z = np.asarray(z, dtype=float)
    total = np.zeros_like(z)
    abs_sum = np.zeros_like(z)
    az = np.abs(z)
    trunc = np.full_like(z, np.inf)
    live = np.ones(z.shape, dtype=bool)
    zk = np.ones_like(z)
    for k in range(max_terms):
        term = zk * _inv_gamma(mu * k + nu)
        total = np.where(live, total + term, total)
        abs_sum = np.where(live, abs_sum + np.abs(term), abs_sum)
        # Gamma(x)/Gamma(x+mu) decreases in x, so the next ratio bounds all later ones
        ratio = az * math.exp(math.lgamma(mu * (k + 1) + nu) - math.lgamma(mu * (k + 2) + nu))
        nxt = np.abs(zk * z) * _inv_gamma(mu * (k + 1) + nu)
        with np.errstate(divide="ignore", invalid="ignore"):
            bound = np.where(ratio < 1, nxt / (1 - ratio), np.inf)
        trunc = np.where(live, bound, trunc)
        round_err = 10 * EPS * abs_sum
        live &= ~((trunc <= 0.1 * tol) | (trunc <= EPS * np.abs(total)))
        live &= ~(round_err > tol)  # more terms cannot help
        if not live.any():
            break
        zk = zk * z
    err = trunc + 10 * EPS * abs_sum
    return total, err, ~live


def ml_series(arg):
    """Power series with a ratio-test remainder bound.

    Raises :class:`SeriesConvergenceError` if truncation plus rounding error
    cannot be brought under ``arg.tol`` within ``MAX_TERMS`` terms.
    """
    val, err, _ = _series(arg.mu, arg.nu, np.array([arg.z]), arg.tol)
    if not err[0] <= arg.tol:
        raise SeriesConvergenceError(
            f"series for E_{{{arg.mu},{arg.nu}}}({arg.z}) reaches only {err[0]:.3g} > tol={arg.tol:g}")
    return MLValue(float(val[0]), float(err[0]), Method.Series)


# ---------------------------------------------------------------- asymptotic route

def _residue_envelope(mu, nu, x):
    """Bound on the pole contribution to E_{mu,nu}(-x) for 1 < mu < 2."""
    t = np.asarray(x, dtype=float) ** (1.0 / mu)
    return (2.0 / mu) * np.exp(t * math.cos(math.pi / mu)) * t ** (1.0 - nu)


def _coef_envelope(y):
    if y >= 0:
        return abs(float(rgamma(y)))
    return math.exp(math.lgamma(1.0 - y)) / math.pi


def _asymptotic(mu, nu, x, tol, max_terms=60):
    """E_{mu,nu}(-x) ~ sum_{k>=1} (-1)^(k+1) x^-k / Gamma(nu - mu k) for large x.

    Terms are added while they shrink; the error is four times the envelope of the
    first omitted term (the expansion diverges, so the omitted term alone is
    not a bound) plus the residue envelope. Returns (value, err).
    """
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    err = np.full_like(x, np.inf)
    live = np.ones(x.shape, dtype=bool)
    prev = np.full_like(x, np.inf)
    abs_sum = np.zeros_like(x)
    env = _residue_envelope(mu, nu, x) if 1 < mu < 2 else np.zeros_like(x)
    for k in range(1, max_terms + 1):
        c = float(rgamma(nu - mu * k))
        xk = x ** (-float(k))
        term = (-1.0) ** (k + 1) * xk * c
        # |1/Gamma(y)| <= Gamma(1 - y)/pi for y < 0; this envelope does not
        # vanish near the poles, so it cannot fake a small omitted term
        mag = xk * _coef_envelope(nu - mu * k)
        growing = mag >= prev
        cand = 4 * mag + env + 10 * EPS * (abs_sum + np.abs(total))
        # stopping at the smallest term leaves the estimate least reliable
        err = np.where(live, np.where(growing, 5 * cand, cand), err)
        stop = live & (growing | (cand <= 0.1 * tol))
        live &= ~stop
        total = np.where(live, total + term, total)
        abs_sum = np.where(live, abs_sum + np.abs(term), abs_sum)
        prev = np.where(live, mag, prev)
        if not live.any():
            break
    return total, err


def ml_tail(alpha, kind, t, n_terms, tol=None):
    """Leading ``n_terms`` of the large-t expansion of e_alpha or i_alpha (omega = 1).

    E kind: sum (-1)^(k+1) t^(-alpha k) / Gamma(1 - alpha k).
    I kind: sum (-1)^(k+1) t^(alpha/2 - alpha k) / Gamma(1 + alpha/2 - alpha k).
    ``err_estimate`` is four times the envelope |t^(-alpha k)| Gamma(1 + alpha k - nu)/pi
    of the first omitted term plus the exponentially small residue envelope. With ``tol`` given, raises :class:`AccuracyError`
    if that estimate exceeds it.
    """
    if not 1 < alpha < 2:
        raise DomainError(f"asymptotic tail needs 1 < alpha < 2, got {alpha}")
    if t <= 0 or n_terms < 1:
        raise DomainError("need t > 0 and n_terms >= 1")
    kind = Kind(kind)
    nu = kind.nu(alpha)
    pref = t ** (nu - 1.0)
    value = 0.0
    k = 0
    used = 0
    while used < n_terms:
        k += 1
        c = float(rgamma(nu - alpha * k))
        if c == 0.0:
            continue
        value += (-1.0) ** (k + 1) * t ** (-alpha * k) * c
        used += 1
    omitted = t ** (-alpha * (k + 1)) * _coef_envelope(nu - alpha * (k + 1))
    env = (2.0 / alpha) * math.exp(t * math.cos(math.pi / alpha))
    err = 4 * pref * omitted + env + 4 * EPS * abs(pref * value)
    if tol is not None and err > tol:
        raise AccuracyError(f"tail at t={t:g} certifies only {err:.3g} > tol={tol:g}")
    return MLValue(pref * value, err, Method.Asymptotic)


def tail_threshold(alpha, kind, tol=1e-10):
    """Smallest t (to 1e-6 relative) at which the optimally truncated tail meets ``tol``."""
    if not 1 < alpha < 2:
        raise DomainError(f"need 1 < alpha < 2, got {alpha}")
    nu = Kind(kind).nu(alpha)

    def ok(t):
        x = t ** alpha
        _, err = _asymptotic(alpha, nu, np.array([x]), tol)
        return err[0] * t ** (nu - 1.0) < tol

    hi = 1.0
    while not ok(hi):
        hi *= 2.0
        if hi > 1e8:
            raise AccuracyError(f"no tail threshold below 1e8 for tol={tol:g}")
    lo = hi / 2.0 if hi > 1.0 else 0.0
    while hi - lo > 1e-6 * hi:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------- closed forms

def _closed_form(mu, nu, z):
    """Exact elementary forms; returns (value, err) or None."""
    if mu == 1.0 and nu == 1.0:
        v = np.exp(z)
        return v, 4 * EPS * np.abs(v)
    if mu == 1.0 and nu == 1.5 and np.all(z < 0):
        s = np.sqrt(-z)
        v = _TWO_OVER_SQRT_PI * dawson(s) / s
        return v, 8 * EPS * np.abs(v)
    if mu == 2.0 and nu in (1.0, 2.0) and np.all(z <= 0):
        s = np.sqrt(-z)
        if nu == 1.0:
            v = np.cos(s)
        else:
            with np.errstate(invalid="ignore", divide="ignore"):
                v = np.where(s > 0, np.sin(s) / np.where(s > 0, s, 1.0), 1.0)
        return v, 4 * EPS * (1.0 + s)
    return None


# ---------------------------------------------------------------- dispatcher

def _spectral(mu, nu, z, tol):
    from . import oscillations  # spectral parts live with the decomposition

    x = -np.asarray(z, dtype=float)
    t = x ** (1.0 / mu)
    pref = t ** (1.0 - nu)
    cut, cut_err, res = oscillations.spectral_parts(mu, nu, t, 0.5 * tol / pref)
    value = pref * (cut + res)
    err = pref * (cut_err + 4 * EPS * (np.abs(cut) + np.abs(res))) + 4 * EPS * np.abs(value)
    return value, err


def _check_route(mu, nu, z, route):
    if route == Method.Spectral:
        if not (1 < mu < 2 and np.all(z < 0) and nu < mu + 1):
            raise UnsupportedParameterError(
                f"spectral route needs 1 < mu < 2, nu < mu + 1 and z < 0 (mu={mu}, nu={nu})")
    if route == Method.Asymptotic and not (np.all(z < 0) and 1 < mu < 2):
        raise UnsupportedParameterError("asymptotic route needs 1 < mu < 2 and z < 0")


def ml_global_array(mu, nu, z, tol=DEFAULT_TOL, route=None):
    """Vectorised :func:`ml_global`. Returns ``(values, errors, methods)``.

    ``tol`` may be a scalar or one tolerance per point.
    ``methods`` is an object array of :class:`Method`. Raises when any point
    cannot be certified to ``tol``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    tol = np.broadcast_to(np.asarray(tol, dtype=float), z.shape).copy()
    MLArg(mu, nu, 0.0, float(tol.min()) if tol.size else DEFAULT_TOL)  # validates parameters
    if not np.all(np.isfinite(z)):
        raise DomainError("z must be finite")
    values = np.empty_like(z)
    errs = np.empty_like(z)
    methods = np.empty(z.shape, dtype=object)

    if route is not None:
        route = Method(route)
        _check_route(mu, nu, z, route)
        if route == Method.Series:
            v, e, _ = _series(mu, nu, z, tol)
        elif route == Method.Spectral:
            v, e = _spectral(mu, nu, z, tol)
        elif route == Method.Asymptotic:
            v, e = _asymptotic(mu, nu, -z, tol)
        else:
            cf = _closed_form(mu, nu, z)
            if cf is None:
                raise UnsupportedParameterError(f"no closed form for mu={mu}, nu={nu}")
            v, e = cf
        methods[:] = route
        values[:], errs[:] = v, e
    else:
        cf = _closed_form(mu, nu, z)
        if cf is not None:
            values[:], errs[:] = cf
            methods[:] = Method.ClosedForm
        else:
            todo = np.ones(z.shape, dtype=bool)
            near = np.abs(z) <= SERIES_RADIUS
            if near.any():
                v, e, _ = _series(mu, nu, z[near], tol[near])
                values[near], errs[near] = v, e
                methods[near] = Method.Series
                todo &= ~near
            far = todo & (z < 0) & (1 < mu < 2)
            if far.any():
                idx = np.nonzero(far)[0]
                v, e = _asymptotic(mu, nu, -z[idx], tol[idx])
                good = e <= tol[idx]
                values[idx[good]], errs[idx[good]] = v[good], e[good]
                methods[idx[good]] = Method.Asymptotic
                todo[idx[good]] = False
                rest = idx[~good]
                if rest.size:
                    if not nu < mu + 1:
                        raise UnsupportedParameterError(
                            f"no route for mu={mu}, nu={nu} at |z| > {SERIES_RADIUS}")
                    v, e = _spectral(mu, nu, z[rest], tol[rest])
                    values[rest], errs[rest] = v, e
                    methods[rest] = Method.Spectral
                    todo[rest] = False
            if todo.any():
                raise UnsupportedParameterError(
                    f"no evaluation route for mu={mu}, nu={nu}, z={z[todo][0]:g}")
    bad = ~(errs <= tol)
    if bad.any():
        i = int(np.nonzero(bad)[0][0])
        raise AccuracyError(
            f"{methods[i].value} route for E_{{{mu},{nu}}}({z[i]:g}) certifies only "
            f"{errs[i]:.3g} > tol={tol[i]:g}")
    return values, errs, methods


def ml_global(arg, route=None):
    """Evaluate ``E_{mu,nu}(z)`` with automatic route selection.

    Dispatch: closed forms for mu in {1, 2}; the series for |z| <= 5; for
    z < -5 and 1 < mu < 2 the asymptotic expansion when it certifies
    ``arg.tol``, else the spectral route. ``route`` forces a single route.
    """
    v, e, m = ml_global_array(arg.mu, arg.nu, np.array([arg.z]), arg.tol, route)
    return MLValue(float(v[0]), float(e[0]), m[0])


def mittag_leffler(mu, nu, z, tol=DEFAULT_TOL):
    """Plain-value convenience wrapper: scalar in, float out; array in, array out."""
    values, _, _ = ml_global_array(mu, nu, z, tol)
    return float(values[0]) if np.ndim(z) == 0 else values
