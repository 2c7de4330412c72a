"""The fractional oscillation pair e_alpha(t), i_alpha(t) and its decomposition.

For 1 < alpha < 2 each function splits into a branch-cut part, a Laplace
integral of a real kernel over (0, inf), and a residue part from the poles
s = exp(+-j pi/alpha):

    e_alpha = f_alpha + g_alpha,     f_alpha(t) = int e^{-rt} K_alpha(r) dr
    i_alpha = h_alpha + q_alpha,     h_alpha(t) = int e^{-rt} V_alpha(r) dr
"""
import enum
import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .errors import DomainError, QuadratureError
from .ml_core import DEFAULT_TOL, EPS, Kind, dawson, ml_global_array

DECOMPOSE_TOL = 1e-10
_QUAD_ATOL = 1e-12


class Part(enum.Enum):
    Total = "total"
    BranchCut = "branch_cut"
    Residue = "residue"


@dataclass(frozen=True)
class OscParams:
    alpha: float
    omega: float = 1.0
    m: float = 1.0
    q0: float = 1.0

    def __post_init__(self):
        if not 1.0 <= self.alpha <= 2.0:
            raise DomainError(f"alpha must lie in [1, 2], got {self.alpha}")
        if not (self.omega > 0 and self.m > 0):
            raise DomainError("omega and m must be positive")


@dataclass(frozen=True)
class OscSample:
    t: float
    value: float
    part: Part
    err_estimate: float


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise DomainError("t must be finite and nonnegative")
    return t


# ---------------------------------------------------------------- e_alpha, i_alpha

def e_alpha_values(p, t, tol=DEFAULT_TOL):
    """A(t) = E_alpha(-omega^2 t^alpha) on an array of times. Returns (values, errors)."""
    t = _check_t(np.atleast_1d(t))
    vals = np.ones_like(t)
    errs = np.zeros_like(t)
    pos = t > 0
    if pos.any():
        z = -(p.omega ** 2) * t[pos] ** p.alpha
        vals[pos], errs[pos], _ = ml_global_array(p.alpha, 1.0, z, tol)
    return vals, errs


def i_alpha_values(p, t, tol=DEFAULT_TOL):
    """B(t) = omega t^(alpha/2) E_{alpha,1+alpha/2}(-omega^2 t^alpha). Returns (values, errors)."""
    t = _check_t(np.atleast_1d(t))
    vals = np.zeros_like(t)
    errs = np.zeros_like(t)
    pos = t > 0
    if pos.any():
        tp = t[pos]
        z = -(p.omega ** 2) * tp ** p.alpha
        scale = p.omega * tp ** (p.alpha / 2)
        # absolute tol on B means tol / scale on the Mittag-Leffler factor,
        # floored where double precision cannot follow
        inner = np.maximum(tol / np.maximum(scale, 1.0), 50 * EPS)
        v, e, _ = ml_global_array(p.alpha, 1.0 + p.alpha / 2, z, inner)
        vals[pos] = scale * v
        errs[pos] = scale * e + EPS * np.abs(vals[pos])
    return vals, errs


def e_alpha(p, t, tol=DEFAULT_TOL):
    v, e = e_alpha_values(p, [t], tol)
    return OscSample(float(t), float(v[0]), Part.Total, float(e[0]))


def i_alpha(p, t, tol=DEFAULT_TOL):
    v, e = i_alpha_values(p, [t], tol)
    return OscSample(float(t), float(v[0]), Part.Total, float(e[0]))


def i_one(t):
    """i_1(t) = exp(-t) erfi(sqrt t), evaluated as (2/sqrt(pi)) D(sqrt t) to avoid overflow."""
    t = _check_t(t)
    out = 2.0 / math.sqrt(math.pi) * dawson(np.sqrt(t))
    return float(out) if out.ndim == 0 else out


def oscillation_values(kind, p, t, tol=DEFAULT_TOL):
    return (e_alpha_values if Kind(kind) is Kind.E else i_alpha_values)(p, t, tol)


# ---------------------------------------------------------------- kernels

def _check_open_alpha(alpha):
    if not 1.0 < alpha < 2.0:
        raise DomainError(f"decomposition needs 1 < alpha < 2, got {alpha}")


def _denominator(alpha, ra):
    # r^{2a} + 2 r^a cos(pi a) + 1 without cancellation near its minimum
    return (ra + math.cos(math.pi * alpha)) ** 2 + math.sin(math.pi * alpha) ** 2


def spectral_kernel(kind, alpha, r):
    """K_alpha (E kind) or V_alpha (I kind) at r > 0."""
    _check_open_alpha(alpha)
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("spectral kernels are evaluated at r > 0")
    ra = r ** alpha
    den = _denominator(alpha, ra)
    if Kind(kind) is Kind.E:
        out = r ** (alpha - 1) * math.sin(math.pi * alpha) / den / math.pi
    else:
        out = r ** (alpha / 2 - 1) * (1 - ra) * math.sin(math.pi * alpha / 2) / den / math.pi
    return float(out) if out.ndim == 0 else out


def _general_kernel(alpha, nu, r):
    """Branch-cut kernel of t^{nu-1} E_{alpha,nu}(-t^alpha), whose image is s^{alpha-nu}/(s^alpha+1)."""
    ra = r ** alpha
    num = ra * math.sin(math.pi * nu) - math.sin(math.pi * (alpha - nu))
    return r ** (alpha - nu) * num / _denominator(alpha, ra) / math.pi


def _kernel_for(alpha, nu):
    if nu == 1.0:
        return lambda r: spectral_kernel(Kind.E, alpha, r)
    if nu == 1.0 + alpha / 2:
        return lambda r: spectral_kernel(Kind.I, alpha, r)
    return lambda r: _general_kernel(alpha, nu, r)


def residue_values(alpha, nu, t):
    """Pole contribution (2/alpha) e^{t cos(pi/alpha)} cos(t sin(pi/alpha) + (1-nu) pi/alpha)."""
    t = np.asarray(t, dtype=float)
    env = (2.0 / alpha) * np.exp(t * math.cos(math.pi / alpha))
    phase = t * math.sin(math.pi / alpha)
    if nu == 1.0:
        return env * np.cos(phase)
    if nu == 1.0 + alpha / 2:
        return env * np.sin(phase)
    return env * np.cos(phase + (1.0 - nu) * math.pi / alpha)


def residue(kind, alpha, t):
    """g_alpha(t) for the E kind, q_alpha(t) for the I kind."""
    _check_open_alpha(alpha)
    out = residue_values(alpha, Kind(kind).nu(alpha), t)
    return float(out) if np.ndim(out) == 0 else out


def residue_envelope(alpha, t):
    return (2.0 / alpha) * np.exp(np.asarray(t, dtype=float) * math.cos(math.pi / alpha))


# ---------------------------------------------------------------- branch cut integral

def _cutoff(kernel, t_min, atol):
    """r_max with |k(r_max)| e^{-r_max t}/t below atol/1000, |k| decreasing beyond."""
    r = 8.0
    while True:
        tail = abs(float(kernel(np.array([r]))[0])) * math.exp(-r * t_min) / t_min
        if tail < 1e-3 * atol or r > 1e12:
            return r, tail
        r *= 2.0


def spectral_parts(alpha, nu, t, atol=_QUAD_ATOL):
    """Branch-cut integral, its error bound and the residue part at each t > 0.

    The substitution r = v^(2/alpha) removes the r^(alpha/2 - 1) endpoint
    singularity of V_alpha; the v axis is split at v = 1 (sign change of
    V_alpha), at the kernel peak and geometrically out to the truncation point.
    """
    _check_open_alpha(alpha)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t <= 0):
        raise DomainError("branch-cut integral needs t > 0")
    atol = np.broadcast_to(np.asarray(atol, dtype=float), t.shape)
    kernel = _kernel_for(alpha, nu)
    p = 2.0 / alpha
    r_max, tail = _cutoff(kernel, float(t.min()), float(atol.min()))
    v_max = r_max ** (1.0 / p)
    brk = {0.0, 1.0, v_max}
    v_peak = math.sqrt(max(-math.cos(math.pi * alpha), 0.0))
    if 0.0 < v_peak < v_max:
        brk.add(v_peak)
        width = math.sin(math.pi * alpha)
        for w in (abs(width), 4 * abs(width)):
            for side in (-1, 1):
                v = v_peak + side * w
                if 0.0 < v < v_max:
                    brk.add(v)
    v = 2.0
    while v < v_max:
        brk.add(v)
        v *= 2.0
    brk = np.array(sorted(brk))

    def integrand(v):
        r = v ** p
        jac = p * v ** (p - 1)
        return np.exp(-np.outer(r, t)) * (kernel(r) * jac)[:, None]

    try:
        val, err = quadrature.integrate(integrand, brk, 0.5 * atol)
    except QuadratureError as exc:
        raise QuadratureError(f"branch-cut integral at alpha={alpha}: {exc}") from exc
    # truncation bound, valid for each t >= t.min()
    kr = abs(float(kernel(np.array([r_max]))[0]))
    err = err + kr * np.exp(-r_max * t) / t
    return val, err, residue_values(alpha, nu, t)


def branch_cut(kind, alpha, t, atol=_QUAD_ATOL):
    """f_alpha (E kind) or h_alpha (I kind) on an array of t > 0. Returns (values, errors)."""
    val, err, _ = spectral_parts(alpha, Kind(kind).nu(alpha), t, atol)
    return val, err


def decompose(kind, p, t):
    """Split e_alpha or i_alpha at time t into (branch_cut, residue) samples.

    Requires omega = 1; for other frequencies rescale t by omega^(2/alpha).
    """
    _check_open_alpha(p.alpha)
    if p.omega != 1.0:
        raise DomainError("decompose works at omega = 1; rescale t by omega**(2/alpha)")
    if not t > 0:
        raise DomainError("decompose needs t > 0")
    cut, err, res = spectral_parts(p.alpha, Kind(kind).nu(p.alpha), [t])
    if err[0] > DECOMPOSE_TOL:
        raise QuadratureError(f"branch-cut error {err[0]:.3g} exceeds {DECOMPOSE_TOL:g}")
    return (OscSample(float(t), float(cut[0]), Part.BranchCut, float(err[0])),
            OscSample(float(t), float(res[0]), Part.Residue, 4 * EPS * abs(float(res[0]))))


def decompose_values(kind, alpha, t):
    """Vectorised decomposition at omega = 1: (total, branch_cut, residue, cut_error)."""
    _check_open_alpha(alpha)
    cut, err, res = spectral_parts(alpha, Kind(kind).nu(alpha), t)
    if np.any(err > DECOMPOSE_TOL):
        raise QuadratureError(f"branch-cut error {err.max():.3g} exceeds {DECOMPOSE_TOL:g}")
    total, _ = oscillation_values(kind, OscParams(alpha), t)
    return total, cut, res, err


# ---------------------------------------------------------------- mechanics

def displacement(p, t, tol=DEFAULT_TOL):
    """q_alpha(t) = q0 A(t)."""
    v, _ = e_alpha_values(p, np.atleast_1d(t), tol)
    return p.q0 * v


def momentum(p, t, tol=DEFAULT_TOL):
    """p_alpha(t) = -m q0 omega^2 t^(alpha/2) E_{alpha,1+alpha/2}(-omega^2 t^alpha) = -m q0 omega B(t)."""
    scalar = np.ndim(t) == 0
    v, _ = i_alpha_values(p, np.atleast_1d(t), tol)
    out = -p.m * p.q0 * p.omega * v
    return float(out[0]) if scalar else out


def energy(p_val, q_val, omega):
    """Hamiltonian (p^2 + omega^2 q^2) / 2."""
    return 0.5 * (np.square(p_val) + omega ** 2 * np.square(q_val))
