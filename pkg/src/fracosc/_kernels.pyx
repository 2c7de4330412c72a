# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: causal convolution and subordinator hitting times.

The pure-Python twin lives in ``_kernels_py``; both expose the same
functions and must agree to rounding.
"""
import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport sin, log, exp, pow, M_PI
from libc.stdint cimport uint64_t

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t PATH_MULT = 0xD1B54A32D192ED03ULL


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t c_path_key(uint64_t seed, uint64_t path) noexcept nogil:
    return mix64(mix64(seed + GOLDEN) ^ (path * PATH_MULT + GOLDEN))


cdef inline double c_uniform(uint64_t key, uint64_t counter) noexcept nogil:
    # open interval (0, 1)
    cdef uint64_t x = mix64(key + (counter + 1) * GOLDEN)
    return ((x >> 11) + 0.5) * (1.0 / 9007199254740992.0)


cdef inline double c_stable(double beta, uint64_t key, uint64_t k) noexcept nogil:
    # Kanter's representation, evaluated in log space
    cdef double u = M_PI * c_uniform(key, 2 * k)
    cdef double w = -log(c_uniform(key, 2 * k + 1))
    cdef double omb = 1.0 - beta
    cdef double log_a = ((beta * log(sin(beta * u)) - log(sin(u))) / omb
                         + log(sin(omb * u)))
    return exp((log_a - log(w)) * omb / beta)


def path_key(seed, path):
    return int(c_path_key(<uint64_t>seed, <uint64_t>path))


def uniforms(uint64_t key, uint64_t start, Py_ssize_t n):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = c_uniform(key, start + i)
    return out


def stable_draws(double beta, uint64_t key, uint64_t start, Py_ssize_t n):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = c_stable(beta, key, start + i)
    return out


def causal_conv(const double[::1] c, const double[::1] x, int n_threads=1):
    """out[n] = sum_{m=0}^{n} c[m] * x[n - m].

    Four interleaved partial sums per output break the serial dependency
    chain; the order is fixed, so results do not depend on n_threads.
    """
    cdef Py_ssize_t n_out = x.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n_out)
    cdef double[::1] o = out
    cdef Py_ssize_t n
    if c.shape[0] < n_out:
        raise ValueError("coefficient array shorter than input")
    for n in prange(n_out, nogil=True, num_threads=n_threads, schedule="guided"):
        o[n] = _conv_at(c, x, n)
    return out


cdef inline double _conv_at(const double[::1] c, const double[::1] x, Py_ssize_t n) noexcept nogil:
    cdef double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0
    cdef Py_ssize_t m = 0
    while m + 3 <= n:
        a0 += c[m] * x[n - m]
        a1 += c[m + 1] * x[n - m - 1]
        a2 += c[m + 2] * x[n - m - 2]
        a3 += c[m + 3] * x[n - m - 3]
        m += 4
    while m <= n:
        a0 += c[m] * x[n - m]
        m += 1
    return (a0 + a1) + (a2 + a3)


cdef void _one_path(double beta, double tau_step, double scale, const double[::1] t_grid,
                    uint64_t key, double[:, ::1] out, Py_ssize_t row) noexcept nogil:
    cdef Py_ssize_t n_t = t_grid.shape[0]
    cdef Py_ssize_t j = 0
    cdef uint64_t k = 0
    cdef double u = 0.0
    cdef double x, u_new
    while j < n_t:
        x = scale * c_stable(beta, key, k)
        u_new = u + x
        while j < n_t and t_grid[j] < u_new:
            out[row, j] = tau_step * (<double>k + (t_grid[j] - u) / x)
            j += 1
        u = u_new
        k += 1


def hitting_times(double beta, double tau_step, const double[::1] t_grid,
                  uint64_t seed, uint64_t path_start, Py_ssize_t n_paths, int n_threads=1):
    """Inverse-subordinator values S_i(t) for paths path_start .. path_start+n_paths-1.

    Each row depends only on (seed, path index), so the thread count never
    changes the result.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n_paths, t_grid.shape[0]))
    cdef double[:, ::1] o = out
    cdef double scale = pow(tau_step, 1.0 / beta)
    cdef Py_ssize_t i
    if n_threads < 1:
        n_threads = 1
    for i in prange(n_paths, nogil=True, num_threads=n_threads, schedule="static"):
        _one_path(beta, tau_step, scale, t_grid, c_path_key(seed, path_start + i), o, i)
    return out
