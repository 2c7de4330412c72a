"""Pure-numpy implementation of the compiled kernels in ``_kernels.pyx``."""
import numpy as np

_M64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
PATH_MULT = 0xD1B54A32D192ED03

_U = np.uint64


def _mix64(z):
    # numpy uint64 arithmetic wraps modulo 2**64, which is what we want
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _U(30))) * _U(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> _U(27))) * _U(0x94D049BB133111EB)
    return z ^ (z >> _U(31))


def _mix64_int(z):
    z &= _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def path_key(seed, path):
    return _mix64_int(_mix64_int(seed + GOLDEN) ^ ((path * PATH_MULT + GOLDEN) & _M64))


def _path_keys(seed, path_start, n_paths):
    base = _U(_mix64_int(seed + GOLDEN))
    paths = np.arange(path_start, path_start + n_paths, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix64(base ^ (paths * _U(PATH_MULT) + _U(GOLDEN)))


def _uniform(keys, counters):
    with np.errstate(over="ignore"):
        x = _mix64(keys + (counters + _U(1)) * _U(GOLDEN))
    return ((x >> _U(11)).astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)


def _stable(beta, keys, k):
    k = np.asarray(k, dtype=np.uint64)
    u = np.pi * _uniform(keys, _U(2) * k)
    w = -np.log(_uniform(keys, _U(2) * k + _U(1)))
    omb = 1.0 - beta
    log_a = (beta * np.log(np.sin(beta * u)) - np.log(np.sin(u))) / omb + np.log(np.sin(omb * u))
    return np.exp((log_a - np.log(w)) * omb / beta)


def uniforms(key, start, n):
    counters = np.arange(start, start + n, dtype=np.uint64)
    return _uniform(_U(key), counters)


def stable_draws(beta, key, start, n):
    return _stable(beta, _U(key), np.arange(start, start + n, dtype=np.uint64))


def causal_conv(c, x, n_threads=1):
    c = np.asarray(c, dtype=float)
    x = np.asarray(x, dtype=float)
    if c.shape[0] < x.shape[0]:
        raise ValueError("coefficient array shorter than input")
    return np.convolve(c[: x.shape[0]], x)[: x.shape[0]]


def hitting_times(beta, tau_step, t_grid, seed, path_start, n_paths, n_threads=1, block=64):
    t_grid = np.asarray(t_grid, dtype=float)
    n_t = t_grid.shape[0]
    out = np.empty((n_paths, n_t))
    scale = tau_step ** (1.0 / beta)
    keys = _path_keys(seed, path_start, n_paths)
    u = np.zeros(n_paths)
    nxt = np.zeros(n_paths, dtype=np.intp)  # next unresolved grid index per path
    rows = np.arange(n_paths)
    k0 = 0
    while True:
        live = nxt < n_t
        if not live.any():
            return out
        idx = rows[live]
        steps = np.arange(k0, k0 + block, dtype=np.uint64)
        x = scale * _stable(beta, keys[idx, None], steps[None, :])
        # sequential accumulation, same order as the compiled loop
        pos = np.cumsum(np.concatenate([u[idx, None], x], axis=1), axis=1)
        cur = nxt[idx]
        for j in range(int(cur.min()), n_t):
            sel = np.nonzero(cur == j)[0]
            if sel.size == 0:
                continue
            s = (pos[sel] <= t_grid[j]).sum(axis=1)
            hit = s <= block
            sel, kk = sel[hit], s[hit] - 1
            out[idx[sel], j] = tau_step * ((k0 + kk) + (t_grid[j] - pos[sel, kk]) / x[sel, kk])
            cur[sel] += 1
        nxt[idx] = cur
        u[idx] = pos[:, -1]
        k0 += block
