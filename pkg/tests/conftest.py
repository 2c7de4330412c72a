"""Arbitrary-precision reference values used across the test suite."""
import functools

import mpmath
import pytest


@functools.lru_cache(maxsize=4096)
def ml_ref(mu, nu, z):
    """E_{mu,nu}(z) by direct summation, with enough digits to absorb cancellation."""
    digits = int(abs(z) ** (1.0 / mu) / 2.3) + 40
    with mpmath.workdps(digits):
        mu, nu, z = mpmath.mpf(mu), mpmath.mpf(nu), mpmath.mpf(z)
        s = mpmath.mpf(0)
        k = 0
        while True:
            term = z ** k / mpmath.gamma(mu * k + nu)
            s += term
            if k > 10 and abs(term) < mpmath.mpf(10) ** -30 * (mpmath.mpf(10) ** -10 + abs(s)):
                return float(s)
            k += 1


def e_ref(alpha, t, omega=1.0):
    return 1.0 if t == 0 else ml_ref(alpha, 1.0, -(omega ** 2) * t ** alpha)


def i_ref(alpha, t, omega=1.0):
    if t == 0:
        return 0.0
    return omega * t ** (alpha / 2) * ml_ref(alpha, 1.0 + alpha / 2, -(omega ** 2) * t ** alpha)


def dawson_ref(x):
    """e^{-x^2} int_0^x e^{y^2} dy by 30-digit quadrature."""
    with mpmath.workdps(30):
        x = mpmath.mpf(x)
        return float(mpmath.exp(-x * x) * mpmath.quad(lambda y: mpmath.exp(y * y), [0, x]))


@pytest.fixture(scope="session")
def oracle():
    return {"ml": ml_ref, "e": e_ref, "i": i_ref, "dawson": dawson_ref}
