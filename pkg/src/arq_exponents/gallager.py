"""Gallager-type functions and the classical exponents built on them.

Two families of base functions are evaluated:

``E_o(s, rho, p)``
    ``-ln sum_y [sum_x p(x) p(y|x)^(1-s)] [sum_x p(x) p(y|x)^(s/rho)]^rho``
``E_x(s, rho, p)``
    ``-rho ln sum_{x,x1} p(x) p(x1) [sum_y p(y|x)^(1-s) p(y|x1)^s]^(1/rho)``

From them come the random coding, sphere packing and expurgated exponents
and, in :mod:`arq_exponents.erasure` and :mod:`arq_exponents.deadline`, the
erasure-decoding and deadline exponents. Everything is in nats.

Each channel family is reduced to a *kernel*: vectorized ``e0``/``ex``
surfaces over numpy grids plus any auxiliary optimization parameters (the
Gaussian-ensemble tilt ``t`` for AWGN). The search routines below only see
kernels.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import optimize
from scipy.special import logsumexp

from . import analytic
from .channels import (Awgn, Bsc, Dmc, ValidationError, Vnc, as_dmc, capacity,
                       input_distribution, is_symmetric, uniform_input)
from .optimize import Optimum, grid_golden_max, zoom_max

RHO_CAPS = (64.0, 128.0, 256.0, 512.0, 1024.0, 2048.0, 4096.0)
RHO_MAX = RHO_CAPS[-1]
S_MIN = 1e-6
RATE_SLACK = 1e-12


class RateAboveCapacityWarning(RuntimeWarning):
    pass


# ---------------------------------------------------------------------------
# kernels


def _lse0(x):
    """``log(sum(exp(x), axis=0))`` without scipy's per-call overhead (hot path)."""
    m = np.max(x, axis=0)
    safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        return safe + np.log(np.sum(np.exp(x - safe), axis=0))


class DmcKernel:
    """E_o / E_x surfaces of a DMC for a fixed input distribution."""

    aux_bounds: tuple = ()
    aux_names: tuple = ()
    aux_scaled: tuple = ()

    def __init__(self, P, p):
        P = np.asarray(P, dtype=float)
        p = np.asarray(p, dtype=float)
        keep = p > 0
        self.P = P[keep]
        self.p = p[keep]
        self.full_p = p
        with np.errstate(divide="ignore"):
            self.logP = np.log(self.P)

    def _col(self, y, shape):
        return self.P[:, y].reshape((-1,) + (1,) * len(shape))

    def e0(self, s, rho):
        s, rho = np.broadcast_arrays(np.asarray(s, float), np.asarray(rho, float))
        shape = s.shape
        w = self.p.reshape((-1,) + (1,) * len(shape))
        with np.errstate(divide="ignore", invalid="ignore"):
            b = np.where(rho > 0, s / np.where(rho > 0, rho, 1.0), 0.0)
            terms = []
            for y in range(self.P.shape[1]):
                col = self._col(y, shape)
                A = np.sum(w * np.power(col, 1.0 - s), axis=0)
                B = np.sum(w * np.power(col, b), axis=0)
                logB = np.log(B)
                terms.append(np.log(A) + np.where(rho > 0, rho * logB, 0.0))
            return -_lse0(np.stack(terms))

    def e0_one(self, rho):
        """``E_o(rho/(1+rho), rho)``: the one-parameter Gallager function."""
        rho = np.asarray(rho, float)
        a = 1.0 / (1.0 + rho)
        w = self.p.reshape((-1,) + (1,) * rho.ndim)
        with np.errstate(divide="ignore"):
            terms = [(1.0 + rho) * np.log(np.sum(w * np.power(self._col(y, rho.shape), a), axis=0))
                     for y in range(self.P.shape[1])]
        return -_lse0(np.stack(terms))

    def e0_limit(self):
        # rho -> inf: only outputs reachable from every used input survive
        full = np.all(self.P > 0, axis=0)
        if not np.any(full):
            return math.inf
        geo = self.p @ self.logP[:, full]
        return float(-logsumexp(geo))

    def _log_overlap(self, s):
        """``ln sum_y P(y|x)^(1-s) P(y|x1)^s`` with shape ``(X, X) + s.shape``."""
        s = np.asarray(s, float)
        X = self.P.shape[0]
        ex = (1,) * s.ndim
        Pi = self.P.reshape((X, 1, -1) + ex)
        Pj = self.P.reshape((1, X, -1) + ex)
        sv = s.reshape((1, 1, 1) + s.shape)
        with np.errstate(divide="ignore"):
            return np.log(np.sum(np.power(Pi, 1.0 - sv) * np.power(Pj, sv), axis=2))

    def ex(self, s, rho):
        s, rho = np.broadcast_arrays(np.asarray(s, float), np.asarray(rho, float))
        lk = self._log_overlap(s)
        X = self.P.shape[0]
        ww = np.outer(self.p, self.p).reshape((X, X) + (1,) * s.ndim)
        with np.errstate(invalid="ignore"):
            total = np.sum(ww * np.expm1(lk / rho), axis=(0, 1))
        return -rho * np.log1p(total)

    def ex_limit(self, s=0.5):
        lk = self._log_overlap(np.asarray(s, float))
        if np.any(np.isneginf(lk)):
            return math.inf
        return float(-np.sum(np.outer(self.p, self.p) * lk))


class AwgnKernel:
    """Gaussian-input AWGN surfaces with the ensemble tilt ``t`` as auxiliary."""

    aux_names = ("t",)
    # the optimal tilt shrinks with s, so it is searched on a log-refined
    # axis and moved along with s when probing the s -> 0 limit
    aux_scaled = (True,)

    def __init__(self, A):
        self.A = float(A)
        self.t_max = 0.5 / self.A
        self.aux_bounds = ((0.0, self.t_max * (1.0 - 1e-9)),)
        # bounds on t/s for the second search chart, where t moves with s
        self.aux_ratio_bounds = ((0.0, 64.0 / self.A),)

    def e0(self, s, rho, t):
        A = self.A
        with np.errstate(all="ignore"):
            rho = np.maximum(rho, 1e-300)
            # log1p keeps the O(s) value accurate when s and t are tiny
            a = -2.0 * t * A
            b = a + s * A / rho
            c = s * A * (1.0 - s - s / rho) / (1.0 + b)
            v = ((1.0 + rho) * t * A + 0.5 * np.log1p(a) + 0.5 * rho * np.log1p(b)
                 + 0.5 * np.log1p(c))
            ok = (t >= 0) & (a > -1.0) & (b > -1.0) & (c > -1.0)
        return np.where(ok, v, -np.inf)

    def e0_one(self, rho, t):
        return self.e0(rho / (1.0 + rho), rho, t)

    def e0_limit(self):
        return 0.5 * self.A

    def ex(self, s, rho, t):
        A = self.A
        with np.errstate(all="ignore"):
            a = -2.0 * t * A
            b = a + 2.0 * s * (1.0 - s) * A / rho
            v = 2.0 * rho * t * A + 0.5 * rho * np.log1p(a) + 0.5 * rho * np.log1p(b)
            ok = (t >= 0) & (a > -1.0) & (b > -1.0)
        return np.where(ok, v, -np.inf)

    def ex_limit(self, s=0.5):
        return 2.0 * s * (1.0 - s) * self.A


class VncKernel:
    """Very noisy channel surfaces (second order in the channel perturbation)."""

    aux_bounds: tuple = ()
    aux_names: tuple = ()
    aux_scaled: tuple = ()

    def __init__(self, C):
        self.C = float(C)

    def e0(self, s, rho):
        with np.errstate(all="ignore"):
            return self.C * (2.0 * s - s * s - s * s / np.maximum(rho, 1e-300))

    def e0_one(self, rho):
        return self.C * rho / (1.0 + rho)

    def e0_limit(self):
        return self.C

    def ex(self, s, rho):
        s, rho = np.broadcast_arrays(np.asarray(s, float), np.asarray(rho, float))
        return 2.0 * s * (1.0 - s) * self.C + 0.0 * rho

    def ex_limit(self, s=0.5):
        return 2.0 * s * (1.0 - s) * self.C


def needs_input_search(channel, p=None) -> bool:
    return p is None and isinstance(channel, Dmc) and not is_symmetric(channel.transition)


def kernel(channel, p=None):
    """Kernel for ``channel``; finite channels use ``p`` (default uniform)."""
    if isinstance(channel, (Dmc, Bsc)):
        dmc = as_dmc(channel)
        p = uniform_input(dmc) if p is None else input_distribution(p, dmc)
        return DmcKernel(dmc.transition, p)
    if isinstance(channel, Awgn):
        return AwgnKernel(channel.snr_power)
    if isinstance(channel, Vnc):
        return VncKernel(channel.capacity)
    raise ValidationError(f"unsupported channel type {type(channel).__name__}")


@lru_cache(maxsize=256)
def _capacity_cached(channel) -> float:
    return capacity(channel)


def channel_capacity(channel) -> float:
    return _capacity_cached(channel)


# ---------------------------------------------------------------------------
# base functions


def e0_two_param(channel, p, s: float, rho: float) -> float:
    """Two-parameter ``E_o(s, rho, p)`` of a finite channel."""
    if not (s >= 0.0):
        raise ValidationError(f"s must be >= 0, got {s!r}")
    if not (rho > 0.0):
        raise ValidationError(f"rho must be > 0, got {rho!r}")
    return float(kernel(channel, p).e0(s, rho))


def ex_two_param(channel, p, s: float, rho: float) -> float:
    """Two-parameter ``E_x(s, rho, p)`` of a finite channel."""
    if not (0.0 <= s <= 1.0):
        raise ValidationError(f"s must lie in [0, 1], got {s!r}")
    if not (rho >= 1.0):
        raise ValidationError(f"rho must be >= 1, got {rho!r}")
    return float(kernel(channel, p).ex(s, rho))


def e0_gallager(channel, p, rho: float) -> float:
    """One-parameter Gallager function ``E_o(rho, p)``."""
    if not (rho >= 0.0):
        raise ValidationError(f"rho must be >= 0, got {rho!r}")
    return float(kernel(channel, p).e0_one(rho))


def e0_awgn(s: float, rho: float, t: float, A: float) -> float:
    """``E_o(s, rho, t)`` of the AWGN channel with Gaussian input of power ``A``.

    All logarithm arguments are checked; a domain violation raises instead
    of producing NaN.
    """
    if not (A > 0.0):
        raise ValidationError(f"power must be positive, got {A!r}")
    if not (rho > 0.0):
        raise ValidationError(f"rho must be > 0, got {rho!r}")
    if not (t >= 0.0):
        raise ValidationError(f"t must be >= 0, got {t!r}")
    u = 1.0 - 2.0 * t * A
    if not (u > 0.0):
        raise ValidationError(f"1 - 2tA = {u!r} must be positive")
    D = u + s * A / rho
    if not (D > 0.0):
        raise ValidationError(f"1 - 2tA + sA/rho = {D!r} must be positive")
    c = s * A * (1.0 - s - s / rho) / D
    if not (c > -1.0):
        raise ValidationError(f"final logarithm argument {1.0 + c!r} must be positive")
    return ((1.0 + rho) * t * A + 0.5 * math.log1p(-2.0 * t * A)
            + 0.5 * rho * math.log1p(s * A / rho - 2.0 * t * A) + 0.5 * math.log1p(c))


# ---------------------------------------------------------------------------
# search machinery


def _check_rate(channel, R):
    """Validate ``R``; returns ``(C, trivial)``.

    ``trivial`` is set above capacity (with a warning) and for zero-capacity
    channels, where every exponent is 0.
    """
    if not (R >= 0.0) or not math.isfinite(R):
        raise ValidationError(f"rate must be a finite number >= 0, got {R!r}")
    C = channel_capacity(channel)
    above = R > C * (1.0 + RATE_SLACK) + 1e-15
    if above:
        warnings.warn(f"rate {R:.6g} exceeds capacity {C:.6g}; exponent set to 0",
                      RateAboveCapacityWarning, stacklevel=3)
    return C, above or C <= 0.0


def _above_capacity(R, C):
    note = "zero-capacity channel" if C <= 0.0 else f"rate {R:.12g} above capacity {C:.12g}"
    return Optimum(0.0, params={}, clamped=True, notes=[note])


def _max_over_rho(ker, fn, lo, hi, n=1001):
    """Maximize ``fn(x, *aux)`` over ``x`` in ``[lo, hi]`` and the kernel's aux box."""
    if not ker.aux_bounds:
        x, fx, _ = grid_golden_max(fn, lo, hi, n=n)
        return x, (), fx
    pt, fx, _ = zoom_max(fn, [(lo, hi), *ker.aux_bounds])
    return float(pt[0]), tuple(float(a) for a in pt[1:]), fx


def _aux_params(ker, aux):
    return dict(zip(ker.aux_names, aux))


def _er_kernel(ker, R):
    x, aux, fx = _max_over_rho(ker, lambda r, *a: ker.e0_one(r, *a) - r * R, 0.0, 1.0)
    return Optimum(max(fx, 0.0), params={"rho": x, **_aux_params(ker, aux)},
                   clamped=fx < 0.0)


def _esp_kernel(ker, R):
    if R == 0.0:
        return Optimum(ker.e0_limit(), params={"rho": math.inf}, branch="rho->inf limit")
    for cap in RHO_CAPS:
        top = cap / (1.0 + cap)

        def f(nu, *a):
            rho = nu / (1.0 - nu)
            return ker.e0_one(rho, *a) - rho * R

        nu, aux, fx = _max_over_rho(ker, f, 0.0, top, n=2001)
        rho = nu / (1.0 - nu)
        if rho < cap * (1.0 - 1e-6):
            return Optimum(max(fx, 0.0), params={"rho": rho, **_aux_params(ker, aux)},
                           clamped=fx < 0.0)
    return Optimum(max(fx, 0.0), params={"rho": rho, **_aux_params(ker, aux)},
                   boundary=True, clamped=fx < 0.0,
                   notes=[f"optimum at rho cap {RHO_MAX:g}"])


def _eex_kernel(ker, R):
    if R == 0.0:
        return Optimum(ker.ex_limit(0.5), params={"rho": math.inf, "s": 0.5},
                       branch="rho->inf limit")
    for cap in RHO_CAPS:
        lo = 1.0 / cap

        def f(w, *a):
            rho = 1.0 / w
            return ker.ex(0.5, rho, *a) - rho * R

        w, aux, fx = _max_over_rho(ker, f, lo, 1.0, n=2001)
        if w > lo * (1.0 + 1e-6):
            break
    rho = 1.0 / w
    opt = Optimum(max(fx, 0.0), params={"rho": rho, "s": 0.5, **_aux_params(ker, aux)},
                  clamped=fx < 0.0)
    if w <= lo * (1.0 + 1e-6):
        opt.boundary = True
        opt.notes.append(f"optimum at rho cap {RHO_MAX:g}")
    return opt


def _log_axes(ker, fixed):
    return fixed + tuple(2 + i for i, on in enumerate(ker.aux_scaled) if on)


def _floor_limit(ker, opt, f, pt, s_min):
    """Linear extrapolation to ``s -> 0`` when the optimum sits near the ``s`` floor.

    The second coordinate is held fixed, which for the high-rate
    parametrization keeps the direction ``s/rho`` fixed; auxiliary
    parameters flagged in ``ker.aux_scaled`` move in proportion to ``s``.
    """
    if s_min <= 0.0 or pt[0] > 8.0 * s_min:
        return
    scaled = [2 + i for i, on in enumerate(ker.aux_scaled) if on]
    q1 = np.array(pt, dtype=float)
    q1[scaled] *= s_min / q1[0]
    q1[0] = s_min
    q2 = q1.copy()
    q2[scaled] *= 2.0
    q2[0] = 2.0 * s_min
    with np.errstate(all="ignore"):
        f1 = float(f(*q1))
        f2 = float(f(*q2))
    drift = f1 - f2
    opt.params["s_floor_drift"] = drift
    if math.isfinite(f1) and math.isfinite(f2) and 0.0 <= drift < 1e-3:
        opt.value = max(opt.value, f1 + drift)
        opt.notes.append(f"s -> 0 limit extrapolated from s_min, drift {drift:.3e}")
    else:
        opt.notes.append(f"optimum near s floor, drift to 2*s_min {drift:.3e}")


def _box_search(ker, f, bounds, log_axes, s_min):
    """Zoom search over ``bounds`` (``s`` first), plus the ``s = s_min`` face when ``s_min > 0``.

    The face search keeps the ``s -> 0`` candidate from being crowded out
    by an interior local maximum on the coarse first grid. Parameters
    flagged in ``ker.aux_scaled`` are searched as ``s`` times a ratio:
    optima at small ``s`` lie on thin ridges ``t ~ s`` that a grid in ``t``
    resolves poorly. Those kernels also get a final local polish.
    """
    scaled = [2 + i for i, on in enumerate(ker.aux_scaled) if on]
    g, box = f, list(bounds)
    if scaled:
        def g(s, x, *ratios):
            aux = [r * s if 2 + i in scaled else r for i, r in enumerate(ratios)]
            return f(s, x, *aux)

        for i, b in zip(scaled, ker.aux_ratio_bounds):
            box[i] = b
    n0 = 65 if len(box) <= 2 else 33
    # the polish finishes scaled searches, so their grids stop early
    tol = 1e-6 if scaled else 1e-10
    pt, fx, _ = zoom_max(g, box, n0=n0, log_axes=log_axes, tol=tol)
    if s_min > 0.0:
        face, ff, _ = zoom_max(lambda *x: g(s_min, *x), box[1:], n0=n0, tol=tol,
                               log_axes=tuple(i - 1 for i in log_axes if i > 0))
        if ff > fx:
            pt, fx = np.concatenate(([s_min], face)), ff
    pt = np.array(pt, dtype=float)
    if scaled:
        pt, fx = _polish(g, pt, fx, box, s_min)
        pt[scaled] *= pt[0]
    return pt, fx


def _polish(g, q, fq, bounds, s_min):
    """Nelder-Mead ascent from ``q`` with ``log s`` as first coordinate.

    Grid zooming narrows the box around its best cell; a ridge climbing
    away from the ``s`` floor is then left unexplored. Only improvements
    are kept.
    """
    log_lo = math.log(max(s_min, 1e-12))
    box = [(log_lo, 0.0), *bounds[1:]]
    z0 = np.array([math.log(max(q[0], 1e-12)), *q[1:]])
    z0 = np.clip(z0, [b[0] for b in box], [b[1] for b in box])

    def neg(z):
        with np.errstate(all="ignore"):
            v = float(g(math.exp(z[0]), *z[1:]))
        return -v if math.isfinite(v) else 1e300

    res = optimize.minimize(neg, z0, method="Nelder-Mead", bounds=box,
                            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
    if -res.fun > fq:
        return np.array([math.exp(res.x[0]), *res.x[1:]]), float(-res.fun)
    return q, fq


def high_rate_search(ker, objective, s_min=0.0):
    """Maximize ``objective(E_o, s, rho)`` over ``s_min <= s <= rho <= 1``.

    Coordinates are ``(s, v)`` with ``rho = s / (s + v (1 - s))``: ``v = 0``
    is the edge ``rho = 1`` and ``v = 1`` the diagonal ``rho = s``. Fixing
    ``v`` while ``s -> 0`` follows a ray into the origin, where ratio-type
    objectives attain their supremum. Auxiliary kernel parameters are
    searched jointly.
    """
    def f(s, v, *aux):
        rho = np.maximum(s / np.maximum(s + v * (1.0 - s), 1e-300), 1e-300)
        return objective(ker.e0(s, rho, *aux), s, rho)

    pt, fx = _box_search(ker, f, [(s_min, 1.0), (0.0, 1.0), *ker.aux_bounds],
                         _log_axes(ker, (0,)), s_min)
    s, v = float(pt[0]), float(pt[1])
    rho = s / max(s + v * (1.0 - s), 1e-300)
    params = {"s": s, "rho": rho, **_aux_params(ker, pt[2:])}
    opt = Optimum(fx, params=params, branch="high")
    _floor_limit(ker, opt, f, pt, s_min)
    return opt


def low_rate_search(ker, objective, s_min=0.0, rho_max=RHO_MAX):
    """Maximize ``objective(E_x, s, rho)`` over ``s_min <= s <= 1``, ``1 <= rho <= rho_max``.

    ``rho`` is searched through ``w = 1/rho``; ending on ``w = 1/rho_max``
    sets the boundary flag.
    """
    def f(s, w, *aux):
        rho = 1.0 / w
        return objective(ker.ex(s, rho, *aux), s, rho)

    lo = 1.0 / rho_max
    pt, fx = _box_search(ker, f, [(s_min, 1.0), (lo, 1.0), *ker.aux_bounds],
                         _log_axes(ker, (0, 1)), s_min)
    s, w = float(pt[0]), float(pt[1])
    opt = Optimum(fx, params={"s": s, "rho": 1.0 / w, **_aux_params(ker, pt[2:])},
                  branch="low")
    if w <= lo * (1.0 + 1e-6):
        opt.boundary = True
        opt.notes.append(f"optimum at rho cap {rho_max:g}")
    _floor_limit(ker, opt, f, pt, s_min)
    return opt


# input-distribution search for asymmetric DMCs

def _project_simplex(v):
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, v.size + 1)
    cond = u - (css - 1.0) / k > 0
    r = k[cond][-1]
    theta = (css[cond][-1] - 1.0) / r
    return np.maximum(v - theta, 0.0)


def _input_objective(P, which, s, rho):
    """``F(p)`` to minimize so that ``E(s, rho, p)`` is maximized."""
    if which == "e0":
        Pa = np.power(P, 1.0 - s)
        Pb = np.power(P, s / rho) if rho > 0 else np.ones_like(P)

        def F(p):
            A, B = p @ Pa, p @ Pb
            return float(np.sum(A * B ** rho))

        def grad(p):
            A, B = p @ Pa, p @ Pb
            with np.errstate(divide="ignore", invalid="ignore"):
                Bm = np.where(B > 0, B ** (rho - 1.0), 0.0)
            return Pa @ (B ** rho) + rho * (Pb @ (A * Bm))
    else:
        with np.errstate(divide="ignore"):
            K = np.sum(np.power(P[:, None, :], 1.0 - s) * np.power(P[None, :, :], s), axis=2)
        Kr = np.power(K, 1.0 / rho)

        def F(p):
            return float(p @ Kr @ p)

        def grad(p):
            return 2.0 * (Kr @ p)
    return F, grad


def _ascend_input(P, p, which, s, rho, iters=200):
    F, grad = _input_objective(P, which, s, rho)
    fp = F(p)
    step = 1.0
    for _ in range(iters):
        g = grad(p)
        while step > 1e-14:
            q = _project_simplex(p - step * g)
            fq = F(q)
            if fq < fp:
                break
            step *= 0.5
        else:
            break
        if fp - fq < 1e-15 * max(fp, 1.0):
            p, fp = q, fq
            break
        p, fp = q, fq
        step *= 2.0
    return p


def search_inputs(channel, solve, which, restarts=8, seed=0, max_rounds=30):
    """Alternate between ``solve(kernel)`` and an input-distribution ascent.

    Starts from uniform and ``restarts`` random simplex points. The result
    is achievable but not certified optimal, which is recorded in the notes.
    """
    P = as_dmc(channel).transition
    rng = np.random.default_rng(seed)
    starts = [np.full(P.shape[0], 1.0 / P.shape[0])]
    starts += [rng.dirichlet(np.ones(P.shape[0])) for _ in range(restarts)]
    best = None
    for p in starts:
        current = None
        for _ in range(max_rounds):
            opt = solve(DmcKernel(P, p))
            opt.params["p"] = p.copy()
            if current is not None and opt.value <= current.value + 1e-12:
                break
            current = opt
            s = opt.params.get("s")
            rho = opt.params.get("rho", 0.0)
            if s is None:
                s = rho / (1.0 + rho) if math.isfinite(rho) else 1.0
            if not math.isfinite(rho):
                break
            p = _ascend_input(P, p, which, s, rho)
        if best is None or current.value > best.value:
            best = current
    best.notes.append("input distribution optimized numerically: certified lower bound only")
    return best


def solve(channel, problem, which="e0", p=None):
    """Run ``problem(kernel)`` with the input distribution chosen per channel type."""
    if needs_input_search(channel, p):
        return search_inputs(channel, problem, which)
    opt = problem(kernel(channel, p))
    if isinstance(channel, (Dmc, Bsc)):
        opt.params.setdefault("p", kernel(channel, p).full_p)
    return opt


# ---------------------------------------------------------------------------
# classical exponents


def _result(opt, full):
    return opt if full else float(opt.value)


def random_coding_exponent(channel, R: float, *, p=None, full: bool = False):
    """Random coding exponent ``E_r(R) = max_{0<=rho<=1} E_o(rho) - rho R``."""
    C, above = _check_rate(channel, R)
    if above:
        return _result(_above_capacity(R, C), full)
    if isinstance(channel, Vnc):
        return _result(Optimum(analytic.vnc_er(R, channel.capacity), branch="closed form"), full)
    return _result(solve(channel, lambda k: _er_kernel(k, R), "e0", p), full)


def sphere_packing_exponent(channel, R: float, *, p=None, full: bool = False):
    """Sphere packing exponent ``sup_{rho>=0} E_o(rho) - rho R``.

    The search cap on rho is doubled from 64 up to 4096; an optimum still at
    the cap is returned with ``boundary`` set. At ``R = 0`` the rho -> inf
    limit of ``E_o`` is returned.
    """
    C, above = _check_rate(channel, R)
    if above:
        return _result(_above_capacity(R, C), full)
    if isinstance(channel, Vnc):
        return _result(Optimum(analytic.vnc_esp(R, channel.capacity), branch="closed form"), full)
    return _result(solve(channel, lambda k: _esp_kernel(k, R), "e0", p), full)


def expurgated_exponent(channel, R: float, *, p=None, full: bool = False):
    """Expurgated exponent ``max_{rho>=1} E_x(1/2, rho) - rho R``, floored at 0."""
    C, above = _check_rate(channel, R)
    if above:
        return _result(_above_capacity(R, C), full)
    if isinstance(channel, Vnc):
        return _result(Optimum(analytic.vnc_er(R, channel.capacity), branch="closed form"), full)
    return _result(solve(channel, lambda k: _eex_kernel(k, R), "ex", p), full)


def ml_exponent(channel, R: float, *, expurgated: bool = True, p=None, full: bool = False):
    """Best ML-decoding achievable exponent: ``max(E_r, E_ex)`` or plain ``E_r``."""
    er = random_coding_exponent(channel, R, p=p, full=True)
    if expurgated:
        ex = expurgated_exponent(channel, R, p=p, full=True)
        if ex.value > er.value:
            ex.branch = "expurgated"
            return _result(ex, full)
    er.branch = er.branch or "random coding"
    return _result(er, full)


# ---------------------------------------------------------------------------
# curves


@dataclass
class ExponentCurve:
    """Exponent values on a rate grid (nats) with per-point optimizer data."""

    name: str
    rates: np.ndarray
    values: np.ndarray
    argmax_params: list = field(default_factory=list)
    boundary_flags: np.ndarray = None
    branches: list = field(default_factory=list)

    def __post_init__(self):
        self.rates = np.asarray(self.rates, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.boundary_flags is None:
            self.boundary_flags = np.zeros(self.rates.size, dtype=bool)
        if self.rates.size > 1 and np.any(np.diff(self.rates) <= 0):
            raise ValidationError("rate grid must be strictly increasing")

    @property
    def any_boundary(self) -> bool:
        return bool(np.any(self.boundary_flags))


def workers() -> int:
    """Worker count from ``ARQ_EXPONENTS_WORKERS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("ARQ_EXPONENTS_WORKERS", "1")))
    except ValueError:
        return 1


def _evaluate(args):
    fn, channel, R, kwargs = args
    return fn(channel, R, full=True, **kwargs)


def parallel_map(fn, channel, rates, **kwargs):
    """Evaluate ``fn(channel, R, full=True)`` over rates; order of results follows ``rates``."""
    jobs = [(fn, channel, float(R), kwargs) for R in rates]
    n = workers()
    if n == 1 or len(jobs) < 2:
        return [_evaluate(j) for j in jobs]
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(_evaluate, jobs, chunksize=max(1, len(jobs) // (4 * n))))


def exponent_curve(fn, channel, rates, name: str | None = None, **kwargs) -> ExponentCurve:
    rates = np.asarray(rates, dtype=float)
    if rates.size > 1 and np.any(np.diff(rates) <= 0):
        raise ValidationError("rate grid must be strictly increasing")
    results = parallel_map(fn, channel, rates, **kwargs)
    return ExponentCurve(
        name=name or fn.__name__,
        rates=rates,
        values=np.array([r.value for r in results]),
        argmax_params=[r.params for r in results],
        boundary_flags=np.array([r.boundary for r in results], dtype=bool),
        branches=[r.branch for r in results],
    )
