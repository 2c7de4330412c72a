"""Discrete fractional operators on uniform grids and residual checks.

``rl_integral`` is the product-trapezoidal rule (exact for piecewise-linear
integrands). ``caputo_derivative`` uses the L1 scheme for orders in (0, 1)
and, for orders in (1, 2), second differences followed by the product
trapezoidal integral of order 2 - beta.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .errors import DomainError, GridError


@dataclass(frozen=True)
class GridFunction:
    dt: float
    values: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 3:
            raise GridError("a grid function needs at least 3 samples")
        if not self.dt > 0:
            raise DomainError("dt must be positive")
        object.__setattr__(self, "values", v)

    @property
    def n(self):
        return self.values.size

    @property
    def t(self):
        return self.t0 + self.dt * np.arange(self.n)

    @classmethod
    def sample(cls, f, horizon, n):
        """Sample ``f`` at n + 1 uniform nodes on [0, horizon]."""
        t = np.linspace(0.0, horizon, n + 1)
        return cls(horizon / n, np.asarray(f(t), dtype=float))

    def like(self, values):
        return GridFunction(self.dt, values, self.t0)


def _power_diff(p, m):
    """(k+1)^p - k^p for k = 0..m-1, without cancellation at large k."""
    k = np.arange(m, dtype=float)
    out = np.empty(m)
    out[0] = 1.0
    kk = k[1:]
    out[1:] = kk ** p * np.expm1(p * np.log1p(1.0 / kk))
    return out


def rl_weights(beta, n):
    """Product-trapezoid convolution coefficients and first-node weights.

    J^beta f(t_n) ~ dt^beta / Gamma(beta + 2) * (a0[n] f_0 + sum_{m=0}^{n-1} c[m] f_{n-m}),
    with c[0] = 1 and c[m] = (m+1)^(beta+1) - 2 m^(beta+1) + (m-1)^(beta+1).
    """
    p = beta + 1.0
    d = _power_diff(p, n + 1)  # d[m] = (m+1)^p - m^p
    c = np.empty(n + 1)
    c[0] = 1.0
    c[1:] = d[1:] - d[:-1]
    j = np.arange(n + 1, dtype=float)
    a0 = np.zeros(n + 1)
    # (n-1)^(beta+1) - (n-1-beta) n^beta = beta n^beta - (n-1)(n^beta - (n-1)^beta)
    db = _power_diff(beta, n + 1)
    a0[1:] = beta * j[1:] ** beta - (j[1:] - 1) * db[:-1]
    return c, a0


def rl_integral(f, beta):
    """Riemann-Liouville integral J^beta of a grid function, 0 < beta < 2."""
    if not 0 < beta < 2:
        raise DomainError(f"fractional integral order must lie in (0, 2), got {beta}")
    x = f.values
    n = x.size
    if beta == 1.0:
        out = np.concatenate([[0.0], np.cumsum(0.5 * f.dt * (x[1:] + x[:-1]))])
        return f.like(out)
    c, a0 = rl_weights(beta, n - 1)
    conv = kernels.causal_conv(c, x)
    # conv[n] includes c[n] f_0; the first node has its own weight a0[n]
    out = conv + (a0 - c) * x[0]
    out[0] = 0.0
    return f.like(out * f.dt ** beta / math.gamma(beta + 2))


def _second_differences(x, dt):
    d2 = np.empty_like(x)
    d2[1:-1] = x[2:] - 2 * x[1:-1] + x[:-2]
    # one-sided second-order stencils at the ends
    d2[0] = 2 * x[0] - 5 * x[1] + 4 * x[2] - x[3]
    d2[-1] = 2 * x[-1] - 5 * x[-2] + 4 * x[-3] - x[-4]
    return d2 / dt ** 2


def caputo_derivative(f, beta):
    """Caputo derivative of order 0 < beta < 2 (beta = 1 gives the classical derivative).

    Order in (0, 1): L1 scheme, consistency order 2 - beta for smooth f.
    Order in (1, 2): J^{2-beta} applied to second differences. Order 2:
    second differences. The first node inherits the one-sided stencil error.
    """
    if not 0 < beta <= 2:
        raise DomainError(f"derivative order must lie in (0, 2], got {beta}")
    x = f.values
    if x.size < 5:
        raise GridError("Caputo derivative needs at least 5 grid points")
    dt = f.dt
    if beta == 1.0:
        out = np.empty_like(x)
        out[1:-1] = (x[2:] - x[:-2]) / (2 * dt)
        out[0] = (-3 * x[0] + 4 * x[1] - x[2]) / (2 * dt)
        out[-1] = (3 * x[-1] - 4 * x[-2] + x[-3]) / (2 * dt)
        return f.like(out)
    if beta == 2.0:
        return f.like(_second_differences(x, dt))
    if beta < 1:
        b = _power_diff(1.0 - beta, x.size)  # b[m] = (m+1)^(1-beta) - m^(1-beta)
        diffs = np.diff(x)
        conv = kernels.causal_conv(b, diffs)
        out = np.zeros_like(x)
        out[1:] = conv * dt ** (-beta) / math.gamma(2 - beta)
        return f.like(out)
    return rl_integral(f.like(_second_differences(x, dt)), 2.0 - beta)


# ---------------------------------------------------------------- residual reports

@dataclass(frozen=True)
class ResidualReport:
    """Pointwise residual of one identity plus its norms.

    ``sup_norm`` is taken over nodes with t >= ``window_start``; a fixed
    initial layer is excluded because operators applied to t^alpha-type
    singular behaviour at t = 0 have an O(1) error at the first nodes that
    does not shrink with dt. ``sup_norm_full`` covers every node.
    """

    name: str
    sup_norm: float
    l2_norm: float
    grid: GridFunction
    expected_order: float
    window_start: float = 0.0
    sup_norm_full: float = field(default=float("nan"))

    @classmethod
    def from_residual(cls, name, grid, expected_order, window_start=0.0):
        r = np.abs(grid.values)
        mask = grid.t >= window_start - 1e-12
        sup = float(r[mask].max())
        l2 = float(math.sqrt(grid.dt * np.sum(r[mask] ** 2)))
        return cls(name, sup, l2, grid, expected_order, window_start, float(r.max()))


# ---------------------------------------------------------------- identities

WINDOW_START = 1.0


def _window(horizon):
    return min(WINDOW_START, horizon / 4.0)


def _trajectories(alpha, horizon, n, omega=1.0):
    from .oscillations import OscParams, e_alpha_values, i_alpha_values

    if n < 64:
        raise GridError("residual checks need n >= 64")
    if not horizon > 0:
        raise DomainError("horizon must be positive")
    t = np.linspace(0.0, horizon, n + 1)
    p = OscParams(alpha, omega)
    e, _ = e_alpha_values(p, t)
    i, _ = i_alpha_values(p, t)
    dt = horizon / n
    return GridFunction(dt, e), GridFunction(dt, i)


def _is_int(x):
    return float(x) == round(x)


def _half_order_derivative_rate(alpha):
    # L1 away from t = 0 is O(dt^(2 - alpha/2)); alpha = 2 uses central differences
    return 2.0 if alpha == 2.0 else 2.0 - alpha / 2.0


def residual_eq2(alpha, horizon, n):
    """e + J^alpha e - 1 on [0, horizon] with n steps."""
    e, _ = _trajectories(alpha, horizon, n)
    r = e.values + rl_integral(e, alpha).values - 1.0 if alpha < 2 else \
        e.values + rl_integral(rl_integral(e, 1.0), 1.0).values - 1.0
    return ResidualReport.from_residual("eq2", e.like(r), 2.0, _window(horizon))


def residual_eq3(kind, alpha, horizon, n):
    """D^alpha x + x for x = e_alpha (E kind) or i_alpha (I kind).

    Expected orders: classical stencils at alpha in {1, 2} give 2. For
    1 < alpha < 2, second differences of t^alpha are O(dt^(alpha-2)) near
    t = 0 and J^(2-alpha) carries that into the window as O(dt^(alpha-1)).
    For the I kind, i'' ~ t^(alpha/2 - 2) is not integrable and the discrete
    residual grows like dt^(alpha/2 - 1).
    """
    from .ml_core import Kind

    e, i = _trajectories(alpha, horizon, n)
    x = e if Kind(kind) is Kind.E else i
    r = caputo_derivative(x, alpha).values + x.values
    if _is_int(alpha):
        order = 2.0
    elif Kind(kind) is Kind.E:
        order = alpha - 1.0
    else:
        order = alpha / 2.0 - 1.0
    return ResidualReport.from_residual(f"eq3_{Kind(kind).value}", x.like(r), order, _window(horizon))


def residual_eq4(alpha, horizon, n):
    """D^(alpha/2) i + J^(alpha/2) i - 1."""
    _, i = _trajectories(alpha, horizon, n)
    b = alpha / 2.0
    r = caputo_derivative(i, b).values + rl_integral(i, b).values - 1.0
    return ResidualReport.from_residual("eq4", i.like(r), _half_order_derivative_rate(alpha),
                                        _window(horizon))


def duality_check(alpha, horizon, n, omega=1.0):
    """Residuals of the four half-order identities for A(t), B(t) at frequency omega.

    D A = -omega B,  D B = omega A,  J A = B / omega,  J B = (1 - A) / omega,
    with D, J of order alpha/2. At omega = 1 these are the identities
    between e_alpha and i_alpha.
    """
    a, b_ = _trajectories(alpha, horizon, n, omega)
    h = alpha / 2.0
    w = _window(horizon)
    d_rate = _half_order_derivative_rate(alpha)
    j_rate = 2.0 if alpha == 2.0 else min(2.0, 1.0 + alpha / 2.0)
    return {
        "D_e=-i": ResidualReport.from_residual(
            "D_e=-i", a.like(caputo_derivative(a, h).values + omega * b_.values), d_rate, w),
        "D_i=e": ResidualReport.from_residual(
            "D_i=e", a.like(caputo_derivative(b_, h).values - omega * a.values), d_rate, w),
        "J_e=i": ResidualReport.from_residual(
            "J_e=i", a.like(rl_integral(a, h).values - b_.values / omega), 2.0, w),
        "J_i=1-e": ResidualReport.from_residual(
            "J_i=1-e", a.like(rl_integral(b_, h).values - (1.0 - a.values) / omega), j_rate, w),
    }


def hamilton_residual(p, horizon, n):
    """Residuals of D q = p/m and D p = -m omega^2 q along the exact trajectory.

    q(t) = q0 A(t); p(t) is the momentum -m q0 omega B(t); D has order alpha/2.
    """
    from .oscillations import momentum

    if n < 64:
        raise GridError("residual checks need n >= 64")
    a, _ = _trajectories(p.alpha, horizon, n, p.omega)
    t = a.t
    q = a.like(p.q0 * a.values)
    mom = a.like(momentum(p, t))
    h = p.alpha / 2.0
    rate = _half_order_derivative_rate(p.alpha)
    w = _window(horizon)
    r5 = caputo_derivative(q, h).values - mom.values / p.m
    r6 = caputo_derivative(mom, h).values + p.m * p.omega ** 2 * q.values
    return (ResidualReport.from_residual("hamilton_q", q.like(r5), rate, w),
            ResidualReport.from_residual("hamilton_p", q.like(r6), rate, w))


@dataclass(frozen=True)
class ConvergenceResult:
    name: str
    coarse: ResidualReport
    fine: ResidualReport
    measured_order: float
    expected_order: float
    band: float = 0.3

    @property
    def decreasing(self):
        return self.fine.sup_norm < self.coarse.sup_norm

    @property
    def passed(self):
        return self.decreasing and abs(self.measured_order - self.expected_order) <= self.band


def _order(coarse, fine):
    return math.log2(coarse.sup_norm / fine.sup_norm)


def convergence_study(alpha, horizon=10.0, n=1024, omega=1.0, band=0.3, m=1.0, q0=1.0):
    """Run every residual check at n and 2n and compare measured with expected orders."""
    from .ml_core import Kind
    from .oscillations import OscParams

    def pairs():
        yield residual_eq2(alpha, horizon, n), residual_eq2(alpha, horizon, 2 * n)
        yield residual_eq3(Kind.E, alpha, horizon, n), residual_eq3(Kind.E, alpha, horizon, 2 * n)
        yield residual_eq4(alpha, horizon, n), residual_eq4(alpha, horizon, 2 * n)
        c, f = duality_check(alpha, horizon, n, omega), duality_check(alpha, horizon, 2 * n, omega)
        for key in c:
            yield c[key], f[key]
        p = OscParams(alpha, omega, m, q0)
        for c, f in zip(hamilton_residual(p, horizon, n), hamilton_residual(p, horizon, 2 * n)):
            yield c, f

    return [ConvergenceResult(c.name, c, f, _order(c, f), c.expected_order, band)
            for c, f in pairs()]


def jseries_check(alpha, t):
    """Term-wise check of J^(alpha/2) e = i and J^(alpha/2) i = 1 - e.

    Each monomial t^g maps to Gamma(g+1)/Gamma(g+alpha/2+1) t^(g+alpha/2);
    the mapped series are summed and compared with i_alpha and 1 - e_alpha
    from the Mittag-Leffler evaluator. Only points with t^alpha <= 5 are
    accepted so the alternating sums keep their digits. Returns the two
    maximum deviations.
    """
    from .oscillations import OscParams, e_alpha_values, i_alpha_values

    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < 0) or np.any(t ** alpha > 5.0 * (1 + 1e-12)):
        raise DomainError("term-wise check needs 0 <= t^alpha <= 5")
    h = alpha / 2.0
    je = np.zeros_like(t)
    ji = np.zeros_like(t)
    for k in range(200):
        g_e = alpha * k  # exponent of the k-th term of e_alpha
        g_i = alpha * k + h  # ... and of i_alpha
        c_e = (-1.0) ** k / math.gamma(g_e + 1)
        c_i = (-1.0) ** k / math.gamma(g_i + 1)
        je += c_e * math.gamma(g_e + 1) / math.gamma(g_e + h + 1) * t ** (g_e + h)
        ji += c_i * math.gamma(g_i + 1) / math.gamma(g_i + h + 1) * t ** (g_i + h)
        if g_i + h + 1 > 170 or (k > 5 and np.all(np.abs(c_i) * np.maximum(t, 1) ** (g_i + h) < 1e-18)):
            break
    p = OscParams(alpha)
    e, _ = e_alpha_values(p, t)
    i, _ = i_alpha_values(p, t)
    return float(np.max(np.abs(je - i))), float(np.max(np.abs(ji - (1.0 - e))))
