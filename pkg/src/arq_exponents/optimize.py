"""Bounded maximizers used by the exponent computations.

The exponent objectives are smooth and (quasi-)concave on boxes, but joint
concavity in several parameters is not guaranteed, so every search starts
from a dense grid and only then refines locally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class Optimum:
    """Value of an exponent together with the optimizer diagnostics.

    ``params`` holds the maximizing coordinates by name, ``boundary`` is set
    when the optimum sits on an artificial search limit (e.g. a cap on rho),
    and ``clamped`` when a negative unconstrained optimum was replaced by 0.
    """

    value: float
    params: dict = field(default_factory=dict)
    boundary: bool = False
    clamped: bool = False
    branch: str | None = None
    notes: list[str] = field(default_factory=list)

    def __float__(self):
        return float(self.value)


def golden_max(f, a: float, b: float, tol: float = 1e-9, max_iter: int = 200):
    """Golden-section search for the maximum of a unimodal ``f`` on ``[a, b]``.

    Returns ``(x, f(x))``; the endpoints are compared as well so a monotone
    objective returns its better end.
    """
    if b < a:
        a, b = b, a
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    candidates = [(fc, c), (fd, d)]
    for x in (a, b):
        candidates.append((f(x), x))
    fx, x = max(candidates, key=lambda t: (t[0], -abs(t[1] - 0.5 * (a + b))))
    return x, fx


def grid_golden_max(f, a: float, b: float, n: int = 1001, tol: float = 1e-9):
    """Dense grid on ``[a, b]`` followed by golden-section refinement.

    ``f`` must accept numpy arrays. Returns ``(x, fx, at_edge)`` where
    ``at_edge`` tells whether the grid maximum was an endpoint of ``[a, b]``.
    """
    xs = np.linspace(a, b, n)
    with np.errstate(all="ignore"):
        vals = np.asarray(f(xs), dtype=float)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    i = int(np.argmax(vals))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, n - 1)]

    def scalar(x):
        with np.errstate(all="ignore"):
            v = float(f(np.asarray(x)))
        return -math.inf if math.isnan(v) else v

    x, fx = golden_max(scalar, lo, hi, tol=tol)
    if vals[i] > fx:
        x, fx = float(xs[i]), float(vals[i])
    at_edge = i in (0, n - 1)
    return float(x), float(fx), at_edge


def _first_axis(lo, hi, n, log):
    x = np.linspace(lo, hi, n)
    if log and hi > lo:
        x = np.union1d(x, lo + (hi - lo) * np.logspace(-7.0, 0.0, n))
    return x


def _evaluate(f, axes):
    mesh = np.meshgrid(*axes, indexing="ij")
    with np.errstate(all="ignore"):
        vals = np.asarray(f(*mesh), dtype=float)
    return mesh, np.where(np.isnan(vals), -np.inf, vals)


def zoom_max(f, bounds, n0: int = 65, n: int = 33, keep: int = 4,
             tol: float = 1e-10, max_iter: int = 80, log_axes=()):
    """Maximize ``f(*coords)`` over a box by successively zoomed grids.

    Each pass evaluates a full tensor grid, then shrinks the box to
    ``keep`` grid steps either side of the best point (clipped to the
    original bounds). Axes listed in ``log_axes`` get extra geometrically
    spaced points near their lower bound on the first pass, so optima
    crowding that edge are not skipped. ``f`` must be vectorized; NaN
    counts as ``-inf``.

    Returns ``(x, fx, on_bound)`` with ``on_bound`` a boolean array marking
    coordinates that ended on the original box faces.
    """
    lo0 = np.array([b[0] for b in bounds], dtype=float)
    hi0 = np.array([b[1] for b in bounds], dtype=float)
    axes = [_first_axis(l, h, n0, i in log_axes) for i, (l, h) in enumerate(zip(lo0, hi0))]
    best_x, best_f = None, -math.inf
    for it in range(max_iter):
        mesh, vals = _evaluate(f, axes)
        k = np.unravel_index(int(np.argmax(vals)), vals.shape)
        fx = float(vals[k])
        x = np.array([m[k] for m in mesh])
        if fx >= best_f or best_x is None:
            best_x, best_f = x, fx
        lo = np.array([a[max(j - keep, 0)] for a, j in zip(axes, k)])
        hi = np.array([a[min(j + keep, a.size - 1)] for a, j in zip(axes, k)])
        if np.all(hi - lo <= tol):
            break
        lo = np.maximum(lo0, np.minimum(lo, best_x))
        hi = np.minimum(hi0, np.maximum(hi, best_x))
        axes = [np.linspace(l, h, n) for l, h in zip(lo, hi)]
    span = np.maximum(hi0 - lo0, 1e-300)
    on_bound = (np.abs(best_x - lo0) <= 1e-7 * span) | (np.abs(best_x - hi0) <= 1e-7 * span)
    return best_x, best_f, on_bound
