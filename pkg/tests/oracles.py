"""Independent reference computations used by the tests.

Nothing here imports the package: sums are written out in the linear
domain, optima come from dense grids plus scipy's scalar minimizer, and
the AWGN surfaces are integrated numerically.
"""

import math

import numpy as np
from scipy import integrate, optimize


def binary_entropy(p):
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log(p) - (1 - p) * math.log(1 - p)


def bsc_matrix(eps):
    return [[1 - eps, eps], [eps, 1 - eps]]


def _pow(a, b):
    # 0^0 = 1 (so that E_o(s=0) = 0), 0^b = 0 for b > 0
    if a == 0.0:
        return 1.0 if b == 0.0 else 0.0
    return a ** b


def e0_direct(P, p, s, rho):
    """``-ln sum_y [sum_x p P^(1-s)] [sum_x p P^(s/rho)]^rho`` by explicit loops."""
    nx, ny = len(P), len(P[0])
    total = 0.0
    for y in range(ny):
        a = sum(p[x] * _pow(P[x][y], 1 - s) for x in range(nx))
        b = sum(p[x] * _pow(P[x][y], s / rho) for x in range(nx))
        total += a * b ** rho
    return -math.log(total)


def e0_one_direct(P, p, rho):
    nx, ny = len(P), len(P[0])
    total = sum(sum(p[x] * _pow(P[x][y], 1 / (1 + rho)) for x in range(nx)) ** (1 + rho)
                for y in range(ny))
    return -math.log(total)


def ex_direct(P, p, s, rho):
    nx, ny = len(P), len(P[0])
    total = 0.0
    for x in range(nx):
        for x1 in range(nx):
            k = sum(_pow(P[x][y], 1 - s) * _pow(P[x1][y], s) for y in range(ny))
            total += p[x] * p[x1] * k ** (1 / rho)
    return -rho * math.log(total)


def maximize_1d(f, a, b, n=4001):
    """Dense grid then bounded Brent refinement."""
    xs = np.linspace(a, b, n)
    vals = np.array([f(x) for x in xs])
    i = int(np.argmax(vals))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, n - 1)]
    res = optimize.minimize_scalar(lambda x: -f(x), bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-12})
    return max(vals[i], -res.fun)


def er_oracle(P, p, R):
    return max(0.0, maximize_1d(lambda r: e0_one_direct(P, p, r) - r * R, 0.0, 1.0, n=1001))


def eex_oracle(P, p, R, rho_max=4096.0):
    # search w = 1/rho in [1/rho_max, 1]
    return max(0.0, maximize_1d(lambda w: ex_direct(P, p, 0.5, 1 / w) - R / w,
                                1 / rho_max, 1.0, n=4001))


# -- BSC closed forms --------------------------------------------------------

def bsc_capacity(eps):
    return math.log(2) - binary_entropy(eps)


def bsc_r0(eps):
    return math.log(2) - 2 * math.log(math.sqrt(eps) + math.sqrt(1 - eps))


def bsc_critical_rate(eps):
    d = math.sqrt(eps) / (math.sqrt(eps) + math.sqrt(1 - eps))
    return math.log(2) - binary_entropy(d)


def bsc_esp(eps, R):
    """``D(delta || eps)`` with ``H(delta) = ln 2 - R``, ``eps <= delta <= 1/2``."""
    C = bsc_capacity(eps)
    if R >= C:
        return 0.0
    if R == 0.0:
        return -math.log(2 * math.sqrt(eps * (1 - eps)))
    d = optimize.brentq(lambda d: binary_entropy(d) - (math.log(2) - R), eps, 0.5, xtol=1e-15)
    return d * math.log(d / eps) + (1 - d) * math.log((1 - d) / (1 - eps))


def bsc_er(eps, R):
    if R >= bsc_critical_rate(eps):
        return bsc_esp(eps, R)
    return bsc_r0(eps) - R


def bsc_er_rho_form(eps, R):
    """``max_{rho in [0,1]} rho ln2 - (1+rho) ln(eps^(1/(1+rho)) + (1-eps)^(1/(1+rho))) - rho R``."""
    def f(r):
        a = 1 / (1 + r)
        return r * math.log(2) - (1 + r) * math.log(eps ** a + (1 - eps) ** a) - r * R
    return max(0.0, maximize_1d(f, 0.0, 1.0, n=2001))


def bsc_ef(eps, R):
    return bsc_capacity(eps) - R + bsc_esp(eps, R)


# -- AWGN by quadrature --------------------------------------------------------

def _log_gauss(y, mean, var):
    return -(y - mean) ** 2 / (2 * var) - 0.5 * math.log(2 * math.pi * var)


def awgn_e0_quad(s, rho, t, A):
    """Gaussian input ``N(0, A)`` tilted by ``exp(t (x^2 - A))``; unit-variance noise."""
    def inner(y, power):
        f = lambda x: math.exp(_log_gauss(x, 0.0, A) + t * (x * x - A)
                               + power * _log_gauss(y, x, 1.0))
        return integrate.quad(f, -np.inf, np.inf, epsabs=0, epsrel=1e-12, limit=200)[0]

    g = lambda y: inner(y, 1 - s) * inner(y, s / rho) ** rho
    return -math.log(integrate.quad(g, -np.inf, np.inf, epsabs=0, epsrel=1e-11, limit=200)[0])


def awgn_ex_quad(s, rho, t, A):
    # int p(y|x)^(1-s) p(y|x1)^s dy = exp(-s (1-s) (x - x1)^2 / 2) for unit noise
    def f(x1, x):
        return math.exp(_log_gauss(x, 0.0, A) + _log_gauss(x1, 0.0, A)
                        + t * (x * x - A) + t * (x1 * x1 - A)
                        - s * (1 - s) * (x - x1) ** 2 / (2 * rho))
    # the tilted input density has variance A / (1 - 2 t A)
    L = 14 * math.sqrt(A / (1 - 2 * t * A))
    val = integrate.dblquad(f, -L, L, -L, L, epsabs=0, epsrel=1e-11)[0]
    return -rho * math.log(val)


# -- 2-D grid oracle for the deadline maximization ----------------------------------

def e1max_grid(P, p, R, E, L, step=1e-3):
    """``max_{0<=s<=rho<=1} (E_o - rho R - s E)/(1 + s(L-2))`` by a grid then Nelder-Mead."""
    P = np.asarray(P, float)
    p = np.asarray(p, float)
    g = np.arange(step, 1 + step / 2, step)
    S, Rh = np.meshgrid(g, g, indexing="ij")
    with np.errstate(divide="ignore"):
        A = np.einsum("x,xy...->y...", p, P[:, :, None, None] ** (1 - S))
        B = np.einsum("x,xy...->y...", p, P[:, :, None, None] ** (S / Rh))
    eo = -np.log(np.sum(A * B ** Rh, axis=0))
    val = np.where(S <= Rh, (eo - Rh * R - S * E) / (1 + S * (L - 2)), -np.inf)
    i, j = np.unravel_index(np.argmax(val), val.shape)
    best = max(0.0, val[i, j])

    def neg(z):
        s, r = z
        if not (0 < s <= r <= 1):
            return 1e9
        return -(e0_direct(P.tolist(), p.tolist(), s, r) - r * R - s * E) / (1 + s * (L - 2))
    res = optimize.minimize(neg, [S[i, j], Rh[i, j]], method="Nelder-Mead",
                            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
    return max(best, -res.fun)


# -- AWGN feedback exponent by multi-start Nelder-Mead ------------------------------

def awgn_e0_closed(s, rho, t, A):
    """Closed form of the Gaussian-input surface, written out independently."""
    a = -2 * t * A
    b = a + s * A / rho
    return ((1 + rho) * t * A + 0.5 * math.log1p(a) + 0.5 * rho * math.log1p(b)
            + 0.5 * math.log1p(s * A * (1 - s - s / rho) / (1 + b)))


def awgn_ef_oracle(A, R, starts=200, seed=0):
    """``max (E_o(s, rho, t) - rho R)/s`` over ``0 < s <= rho <= 1``, ``0 <= t < 1/(2A)``."""
    def neg(z):
        s, rho, t = z
        if not (0 < s <= rho <= 1 and t >= 0 and 1 - 2 * t * A > 0):
            return 1e9
        try:
            return -(awgn_e0_closed(s, rho, t, A) - rho * R) / s
        except ValueError:
            return 1e9
    rng = np.random.default_rng(seed)
    best = math.inf
    for _ in range(starts):
        s = 10 ** rng.uniform(-5, 0)
        z0 = [s, rng.uniform(s, 1), rng.uniform(0, 0.5 / A) * rng.uniform()]
        res = optimize.minimize(neg, z0, method="Nelder-Mead",
                                options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000})
        best = min(best, res.fun)
    return -best
