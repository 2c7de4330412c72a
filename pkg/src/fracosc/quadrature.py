"""Adaptive Gauss-Kronrod (7/15) quadrature for vector-valued integrands.

The integrand maps an array of nodes of shape ``(m,)`` to values of shape
``(m, k)``; all ``k`` components share one adaptive mesh, and refinement
continues until every component meets the absolute tolerance.
"""
import numpy as np

from .errors import QuadratureError

_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
KRONROD = np.concatenate([_WK[:-1], _WK[::-1]])
GAUSS = np.zeros(15)
GAUSS[1::2] = np.concatenate([_WG[:-1], _WG[::-1]])

_EPS = np.finfo(float).eps


def _rule(f, a, b):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = (mid[:, None] + half[:, None] * NODES[None, :]).ravel()
    fx = np.asarray(f(x), dtype=float).reshape(a.size, 15, -1)
    kr = half[:, None] * np.einsum("j,ijk->ik", KRONROD, fx)
    ga = half[:, None] * np.einsum("j,ijk->ik", GAUSS, fx)
    absint = half[:, None] * np.einsum("j,ijk->ik", KRONROD, np.abs(fx))
    return kr, np.abs(kr - ga), absint


def integrate(f, breakpoints, atol, max_intervals=20000):
    """Integrate ``f`` over consecutive ``breakpoints``.

    ``atol`` is a scalar or one tolerance per integrand component.

    Returns ``(value, error)`` arrays of shape ``(k,)``. ``error`` is the
    sum of |Kronrod - Gauss| differences plus a rounding allowance of
    ``50 eps`` times the integral of |f|; it can exceed ``atol`` only when
    that rounding allowance alone does.
    """
    pts = np.asarray(breakpoints, dtype=float)
    if pts.ndim != 1 or pts.size < 2 or np.any(np.diff(pts) <= 0):
        raise ValueError("breakpoints must be strictly increasing")
    a, b = pts[:-1].copy(), pts[1:].copy()
    val, err, absint = _rule(f, a, b)
    atol = np.broadcast_to(np.asarray(atol, dtype=float), (val.shape[1],))
    done_val = np.zeros(val.shape[1])
    done_err = np.zeros(val.shape[1])
    done_abs = np.zeros(val.shape[1])
    while True:
        total_err = done_err + err.sum(axis=0)
        total_abs = done_abs + absint.sum(axis=0)
        round_err = 50 * _EPS * total_abs
        # components whose discretisation error is below the rounding floor
        # cannot improve further
        unmet = (total_err + round_err > atol) & (total_err > round_err)
        if not unmet.any():
            break
        n_live = a.size
        if n_live > max_intervals:
            raise QuadratureError(
                f"adaptive quadrature did not reach atol={np.min(atol):g} within {max_intervals} intervals "
                f"(estimated error {np.max(total_err):.3g})")
        # bisect every interval carrying a sizeable share of an unmet budget
        bad_cols = unmet
        share = atol / (2.0 * n_live)
        refine = np.any(err[:, bad_cols] > share[bad_cols], axis=1)
        if not refine.any():
            refine = np.any(err[:, bad_cols] >= err[:, bad_cols].max(axis=0), axis=1)
        keep = ~refine
        # intervals that are fine stay in the live set only if they are not negligible
        settle = keep & np.all(err <= 0.1 * share, axis=1)
        done_val += val[settle].sum(axis=0)
        done_err += err[settle].sum(axis=0)
        done_abs += absint[settle].sum(axis=0)
        stay = keep & ~settle
        mid = 0.5 * (a[refine] + b[refine])
        if np.any(mid <= a[refine]) or np.any(mid >= b[refine]):
            raise QuadratureError("interval width underflow during refinement")
        na = np.concatenate([a[refine], mid])
        nb = np.concatenate([mid, b[refine]])
        nv, ne, nab = _rule(f, na, nb)
        a = np.concatenate([a[stay], na])
        b = np.concatenate([b[stay], nb])
        val = np.concatenate([val[stay], nv])
        err = np.concatenate([err[stay], ne])
        absint = np.concatenate([absint[stay], nab])
        if a.size > max_intervals:
            raise QuadratureError(
                f"adaptive quadrature exceeded {max_intervals} intervals at atol={np.min(atol):g}")
    value = done_val + val.sum(axis=0)
    error = done_err + err.sum(axis=0) + 50 * _EPS * (done_abs + absint.sum(axis=0))
    return value, error


def integrate_scalar(f, breakpoints, atol, max_intervals=20000):
    """Scalar-integrand convenience wrapper around :func:`integrate`."""
    value, error = integrate(lambda x: np.asarray(f(x))[:, None], breakpoints, atol, max_intervals)
    return float(value[0]), float(error[0])
