"""Threshold (erasure) decoding exponents.

A decoder that accepts message ``m`` only when
``p(y|x_m) / sum_{k!=m} p(y|x_k) >= exp(N T)`` has erasure exponent
``E_1(R, T)`` and undetected-error exponent ``E_2(R, T) = E_1(R, T) + T``.
Two achievable forms of ``E_1`` are combined here::

    high rate:  max_{0<=s<=rho<=1}        E_o(s, rho) - rho R - s T
    low rate:   max_{0<=s<=1, rho>=1}     E_x(s, rho) - rho R - s T

Driving ``E_1`` to zero gives the feedback exponent
``E_F(R) = max (E_o(s, rho) - rho R) / s`` (and its ``E_x`` counterpart).
"""

from __future__ import annotations

import math

from . import analytic
from .channels import ValidationError, Vnc
from .gallager import (S_MIN, _above_capacity, _check_rate, _result,
                       high_rate_search, low_rate_search, solve)
from .optimize import Optimum

BRANCHES = ("high", "low")


def _check_threshold(T):
    if not (T >= 0.0) or not math.isfinite(T):
        raise ValidationError(f"threshold must be finite and >= 0, got {T!r}")


def _best(candidates):
    return max(candidates, key=lambda o: o.value)


def e1(channel, R: float, T: float, *, branches=BRANCHES, p=None, full: bool = False):
    """Erasure exponent ``E_1(R, T)``: the larger of the requested forms, floored at 0.

    When no strictly positive value is achievable the result is 0 with
    ``clamped`` set.
    """
    _check_threshold(T)
    C, above = _check_rate(channel, R)
    if above:
        return _result(_above_capacity(R, C), full)
    found = []
    if "high" in branches:
        found.append(solve(channel, lambda k: high_rate_search(
            k, lambda e, s, rho: e - rho * R - s * T), "e0", p))
    if "low" in branches:
        found.append(solve(channel, lambda k: low_rate_search(
            k, lambda e, s, rho: e - rho * R - s * T), "ex", p))
    if not found:
        raise ValidationError(f"no branch selected from {branches!r}")
    opt = _best(found)
    if opt.value <= 1e-12:
        opt.clamped = True
        opt.value = 0.0
    return _result(opt, full)


def e2(channel, R: float, T: float, **kwargs):
    """Undetected-error exponent ``E_2(R, T) = E_1(R, T) + T``."""
    full = kwargs.pop("full", False)
    opt = e1(channel, R, T, full=True, **kwargs)
    out = Optimum(opt.value + T, params=opt.params, boundary=opt.boundary,
                  clamped=opt.clamped, branch=opt.branch, notes=opt.notes)
    return _result(out, full)


def _ratio_objective(R):
    def objective(e, s, rho):
        return (e - rho * R) / s
    return objective


def feedback_exponent(channel, R: float, *, branches=BRANCHES, p=None, full: bool = False):
    """Forney's feedback exponent ``E_F(R)``.

    The ratio ``(E - rho R)/s`` is maximized with ``s >= 1e-6`` in both the
    high-rate (``E_o``, ``rho <= 1``) and low-rate (``E_x``, ``rho >= 1``)
    regions and the larger value is kept; ``branch`` names the winner.
    """
    C, above = _check_rate(channel, R)
    if above:
        return _result(_above_capacity(R, C), full)
    if isinstance(channel, Vnc):
        return _result(Optimum(analytic.vnc_ef(R, channel.capacity), branch="closed form"), full)
    objective = _ratio_objective(R)
    found = []
    if "high" in branches:
        found.append(solve(channel, lambda k: high_rate_search(
            k, objective, s_min=S_MIN), "e0", p))
    if "low" in branches:
        found.append(solve(channel, lambda k: low_rate_search(
            k, objective, s_min=S_MIN), "ex", p))
    opt = _best(found)
    if opt.value < 0.0:
        opt.value = 0.0
        opt.clamped = True
    return _result(opt, full)
