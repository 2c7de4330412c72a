"""Real zeros of e_alpha and i_alpha for 1 < alpha < 2, and largest-zero asymptotics.

Each function is a sign-definite, algebraically decaying branch-cut part plus
an exponentially damped oscillation bounded by (2/alpha) e^{t cos(pi/alpha)}.
Zeros can only occur while the oscillation can outweigh the cut part, so a
scan out to a point where the cut part dominates by a safe margin finds all
of them.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ConvergenceError, DomainError, RefinementError
from .ml_core import Kind
from .oscillations import OscParams, oscillation_values, residue_envelope, spectral_parts

DOMINANCE = 10.0
DEFAULT_REFINE_TOL = 1e-10


def _check_alpha(alpha):
    if not 1.0 < alpha < 2.0:
        raise DomainError(f"zero analysis needs 1 < alpha < 2, got {alpha}")


@dataclass(frozen=True)
class Certificate:
    """Evidence that no zero lies beyond the scanned range.

    At t_max and 2 t_max the cut part exceeds DOMINANCE times the oscillation
    envelope. If log|cut| is convex, its secant slope bounds its slope from
    below beyond 2 t_max; a secant slope above the envelope's decay rate
    cos(pi/alpha) keeps the ratio growing from there on.
    """

    t_max: float
    cut: tuple
    envelope: tuple
    secant_slope: float
    envelope_rate: float

    @property
    def ratios(self):
        return tuple(c / e for c, e in zip(self.cut, self.envelope))

    @property
    def holds(self):
        return all(r > DOMINANCE for r in self.ratios) and self.secant_slope >= self.envelope_rate


@dataclass(frozen=True)
class ZeroReport:
    kind: Kind
    alpha: float
    zeros: tuple
    scan_points: int
    refine_tol: float
    t_max: float
    scan_step: float
    certificate: Certificate
    trivial_zero: float = None  # i_alpha(0) = 0, kept out of ``zeros``

    @property
    def count(self):
        return len(self.zeros)

    @property
    def largest(self):
        return self.zeros[-1] if self.zeros else None


def scan_step(alpha):
    """An eighth of the half-period pi / sin(pi/alpha) of the oscillating part."""
    return math.pi / (8.0 * math.sin(math.pi / alpha))


def _certificate(kind, alpha, t_max):
    t = np.array([t_max, 2.0 * t_max])
    cut, err, _ = spectral_parts(alpha, kind.nu(alpha), t)
    lower = np.abs(cut) - err
    env = residue_envelope(alpha, t)
    if np.any(lower <= 0):
        slope = -math.inf
    else:
        slope = float(np.log(lower[1] / lower[0]) / t_max)
    return Certificate(float(t_max), tuple(map(float, lower)), tuple(map(float, env)),
                       slope, math.cos(math.pi / alpha))


def dominance_point(kind, alpha, t_start=1.0, growth=1.25, t_limit=1e6):
    """Smallest t on a geometric ladder whose certificate holds."""
    kind = Kind(kind)
    t = t_start
    while t < t_limit:
        cert = _certificate(kind, alpha, t)
        if cert.holds:
            return cert
        t *= growth
    raise ConvergenceError(f"no dominance point below t={t_limit:g} for alpha={alpha}")


def _bisect(f, lo, hi, f_lo, tol, max_iter=200):
    """Vectorised bisection of all brackets at once."""
    lo, hi, f_lo = lo.copy(), hi.copy(), f_lo.copy()
    for _ in range(max_iter):
        active = hi - lo > tol
        if not active.any():
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        vals, errs = f(mid[active])
        idx = np.nonzero(active)[0]
        same = np.sign(vals) == np.sign(f_lo[idx])
        exact = vals == 0.0
        lo[idx[same & ~exact]] = mid[idx[same & ~exact]]
        f_lo[idx[same & ~exact]] = vals[same & ~exact]
        hi[idx[~same | exact]] = mid[idx[~same | exact]]
        lo[idx[exact]] = mid[idx[exact]]
    raise RefinementError(f"bisection did not reach tol={tol:g} in {max_iter} steps")


def find_zeros(kind, alpha, refine_tol=DEFAULT_REFINE_TOL, oversample=1):
    """All positive zeros of e_alpha (E kind) or i_alpha (I kind).

    The scan runs on [0, 2 t_max] with step scan_step(alpha) / oversample;
    sign changes are refined by bisection to ``refine_tol``.
    """
    _check_alpha(alpha)
    if not refine_tol > 0 or oversample < 1:
        raise DomainError("refine_tol must be positive and oversample >= 1")
    kind = Kind(kind)
    p = OscParams(alpha)
    cert = dominance_point(kind, alpha)
    step = scan_step(alpha) / oversample
    end = 2.0 * cert.t_max
    n = int(math.ceil(end / step))
    t = np.linspace(0.0, n * step, n + 1)
    if kind is Kind.I:
        t = t[1:]  # skip the trivial zero at the origin
    vals, _ = oscillation_values(kind, p, t)

    def f(x):
        return oscillation_values(kind, p, x)

    exact = np.nonzero(vals == 0.0)[0]
    change = np.nonzero(vals[:-1] * vals[1:] < 0)[0]
    roots = list(t[exact])
    if change.size:
        roots += list(_bisect(f, t[change], t[change + 1], vals[change], refine_tol))
    zeros = tuple(sorted(float(r) for r in roots))
    return ZeroReport(kind, float(alpha), zeros, int(t.size), float(refine_tol), float(end),
                      float(step), cert, 0.0 if kind is Kind.I else None)


# ---------------------------------------------------------------- asymptotics

def smallest_zero_bound(alpha):
    """pi / sin(pi/alpha); infinite at alpha = 1, pi at alpha = 2."""
    if not 1.0 <= alpha <= 2.0:
        raise DomainError(f"alpha must lie in [1, 2], got {alpha}")
    s = math.sin(math.pi / alpha)
    return math.inf if alpha == 1.0 else math.pi / s


def near1_balance(T, epsilon):
    """Log form of e^{-T} = (1+eps) T^{-(1+eps)/2} / (2 Gamma((1+eps)/2))."""
    a = 0.5 * (1.0 + epsilon)
    return -T - math.log(1.0 + epsilon) + math.log(2.0) + float(gammaln(a)) + a * math.log(T)


def largest_zero_near1(epsilon, max_iter=100):
    """Largest zero of i_{1+eps} from the balance of residue and algebraic tail.

    Damped Newton on the log form from T0 = 3 - ln(eps + 0.1). The balance
    has a root only for eps up to about 0.2; beyond that ConvergenceError.
    """
    if not 0.0 < epsilon <= 0.3:
        raise DomainError(f"epsilon must lie in (0, 0.3], got {epsilon}")
    a = 0.5 * (1.0 + epsilon)
    T = 3.0 - math.log(epsilon + 0.1)
    for _ in range(max_iter):
        g = near1_balance(T, epsilon)
        dg = -1.0 + a / T
        if dg >= 0:
            break  # left the branch where the larger root lives
        step = g / dg
        T_new = T - step
        while T_new <= a:  # stay right of the maximum of g at T = a
            step *= 0.5
            T_new = T - step
        T = T_new
        if abs(step) <= 1e-15 * T and abs(near1_balance(T, epsilon)) <= 1e-12:
            return T
    raise ConvergenceError(f"no root of the near-1 balance for epsilon={epsilon}")


def largest_zero_near2(delta):
    """T = (8 / (pi delta)) ln(2 / delta) for alpha = 2 - delta."""
    if not 0.0 < delta <= 0.3:
        raise DomainError(f"delta must lie in (0, 0.3], got {delta}")
    return 8.0 / (math.pi * delta) * math.log(2.0 / delta)


def delta_of_T(T):
    """delta = (8 / pi) ln(T) / T, the inverse form for T >= 10."""
    if not T >= 10.0:
        raise DomainError(f"T must be at least 10, got {T}")
    return 8.0 / math.pi * math.log(T) / T


def near2_ratio(delta, T):
    """(pi delta T / 4) / ln(2 T / delta); tends to 1 along the largest zero."""
    return math.pi * delta * T / 4.0 / math.log(2.0 * T / delta)


def zero_count_estimate(alpha):
    """N ~ T / pi with T from the near-2 asymptotics."""
    if not 1.7 < alpha < 2.0:
        raise DomainError(f"count estimate needs 1.7 < alpha < 2, got {alpha}")
    return largest_zero_near2(2.0 - alpha) / math.pi
