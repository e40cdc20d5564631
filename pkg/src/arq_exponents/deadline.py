"""Error-exponent bounds for ARQ with a deadline of ``L`` rounds.

Memoryless decoding (each round sees only its own ``N`` symbols, rounds
``1..L-1`` use a threshold decoder and round ``L`` decodes by ML)::

    E + (L-1) E_1max  <=  E_MD(R, L)  <=  L E_sp(R)

    E_1max = max_{0<=s<=rho<=1} (E_o(s, rho) - rho R - s E) / (1 + s (L-2))

where ``E`` is the ML exponent (``E_r``, or ``max(E_r, E_ex)`` with the
expurgated refinement). The maximizing threshold is
``T* = E + (L-2) E_1max``, which satisfies ``E_1(R, T*) = E_1max``.

Incremental redundancy (round ``k`` decodes from all ``kN`` symbols with
threshold ``T/k``)::

    E_IR(R, L) >= min(E_F(R), L E(R/L))
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import analytic, erasure
from .channels import ValidationError, Vnc
from .gallager import (_above_capacity, _check_rate, _result, channel_capacity,
                       high_rate_search, low_rate_search, ml_exponent, parallel_map,
                       sphere_packing_exponent, solve)
from .optimize import Optimum

FIXED_POINT_TOL = 1e-5
LREQ_GRID = 512
LREQ_TOL = 1e-6
LREQ_MAX = 64


class ThresholdConsistencyError(RuntimeError):
    """``E_1(R, T*)`` disagrees with the closed maximization ``E_1max``."""

    def __init__(self, e1_max, e1_at_tstar, t_star):
        self.e1_max = e1_max
        self.e1_at_tstar = e1_at_tstar
        self.t_star = t_star
        super().__init__(
            f"E_1(R, T*={t_star:.12g}) = {e1_at_tstar:.12g} but E_1max = {e1_max:.12g}")


def _check_deadline(L):
    if isinstance(L, bool) or int(L) != L or L < 2:
        raise ValidationError(f"deadline L must be an integer >= 2, got {L!r}")
    return int(L)


@dataclass
class MdBounds:
    """Memoryless-decoding bounds at one ``(R, L)``; all values in nats."""

    lower: float
    upper: float
    t_star: float
    e1_at_tstar: float
    e1_max: float = 0.0
    ml: float = 0.0
    branch: str | None = None
    boundary: bool = False
    notes: list[str] = field(default_factory=list)

    def __float__(self):
        return float(self.lower)


def _e1max(channel, R, E, L, expurgated, p=None):
    """Closed maximization of ``(E_o - rho R - s E) / (1 + s (L-2))``."""
    def objective(e, s, rho):
        return (e - rho * R - s * E) / (1.0 + s * (L - 2))

    found = [solve(channel, lambda k: high_rate_search(k, objective), "e0", p)]
    if expurgated:
        found.append(solve(channel, lambda k: low_rate_search(k, objective), "ex", p))
    opt = max(found, key=lambda o: o.value)
    if opt.value < 0.0:
        opt.value, opt.clamped = 0.0, True
    return opt


def md_bounds(channel, R: float, L: int, *, expurgated: bool = True, p=None,
              check: bool = True) -> MdBounds:
    """Lower and upper bounds on the memoryless-decoding exponent with diagnostics.

    With ``check`` set, ``E_1(R, T*)`` is recomputed by the erasure module
    and compared with ``E_1max``; a residual above ``1e-5`` raises
    :class:`ThresholdConsistencyError`.
    """
    L = _check_deadline(L)
    C, above = _check_rate(channel, R)
    upper = md_upper_bound(channel, R, L, full=True)
    if above:
        return MdBounds(0.0, 0.0, 0.0, 0.0, notes=_above_capacity(R, C).notes)
    ml = ml_exponent(channel, R, expurgated=expurgated, p=p, full=True)
    E = ml.value
    opt = _e1max(channel, R, E, L, expurgated, p)
    e1max = opt.value
    t_star = E + (L - 2) * e1max
    branches = erasure.BRANCHES if expurgated else ("high",)
    e1_at = e1max
    if check:
        e1_at = erasure.e1(channel, R, t_star, branches=branches, p=p)
        if abs(e1_at - e1max) >= FIXED_POINT_TOL:
            raise ThresholdConsistencyError(e1max, e1_at, t_star)
    lower = E + (L - 1) * e1max
    notes = list(opt.notes) + list(ml.notes)
    return MdBounds(lower=lower, upper=float(upper), t_star=t_star, e1_at_tstar=e1_at,
                    e1_max=e1max, ml=E, branch=opt.branch,
                    boundary=bool(upper.boundary or ml.boundary), notes=notes)


def md_lower_bound(channel, R: float, L: int, *, expurgated: bool = True, p=None,
                   full: bool = False):
    """Achievable memoryless-decoding exponent ``E + (L-1) E_1max``.

    ``full=True`` returns the :class:`MdBounds` record including ``T*``.
    """
    b = md_bounds(channel, R, L, expurgated=expurgated, p=p)
    return b if full else b.lower


def md_upper_bound(channel, R: float, L: int, *, p=None, full: bool = False):
    """Converse ``L E_sp(R)``; boundary flags of the ``E_sp`` search carry over."""
    L = _check_deadline(L)
    esp = sphere_packing_exponent(channel, R, p=p, full=True)
    out = Optimum(L * esp.value, params=esp.params, boundary=esp.boundary,
                  clamped=esp.clamped, branch=esp.branch, notes=list(esp.notes))
    return _result(out, full)


def ir_lower_bound(channel, R: float, L: int, *, expurgated: bool = True, p=None,
                   full: bool = False):
    """Achievable IR-ARQ exponent ``min(E_F(R), L E(R/L))``.

    ``branch`` is ``"feedback"`` or ``"deadline"`` according to the arm
    attaining the minimum (ties go to ``"feedback"``).
    """
    L = _check_deadline(L)
    C, above = _check_rate(channel, R)
    if above:
        return _result(_above_capacity(R, C), full)
    ef = erasure.feedback_exponent(channel, R, p=p, full=True)
    ml = ml_exponent(channel, R / L, expurgated=expurgated, p=p, full=True)
    arm = L * ml.value
    if ef.value <= arm:
        out = Optimum(ef.value, params={"e_f": ef.value, "deadline_arm": arm},
                      boundary=ef.boundary, branch="feedback", notes=list(ef.notes))
    else:
        out = Optimum(arm, params={"e_f": ef.value, "deadline_arm": arm},
                      boundary=ml.boundary, branch="deadline", notes=list(ml.notes))
    return _result(out, full)


def optimal_threshold(channel, R: float, L: int, *, expurgated: bool = True, p=None) -> float:
    """Deadline-optimal threshold ``T* = E + (L-2) E_1max``.

    Raises :class:`ThresholdConsistencyError` if ``E_1(R, T*)`` misses
    ``E_1max`` by ``1e-5`` or more.
    """
    return md_bounds(channel, R, L, expurgated=expurgated, p=p).t_star


def md_limit_check(channel, R: float, L_big: int = 10_000, *, expurgated: bool = True):
    """``(md_lower(R, L_big), E_F(R))``; the first approaches the second from below."""
    if _check_deadline(L_big) < 100:
        raise ValidationError(f"L_big must be >= 100, got {L_big!r}")
    lower = md_lower_bound(channel, R, L_big, expurgated=expurgated)
    return lower, erasure.feedback_exponent(channel, R)


@dataclass
class Lemma1Result:
    bound: int
    er0: float
    ef0: float
    loose: bool

    def __int__(self):
        return self.bound


def lemma1_bound(epsilon: float, full: bool = False):
    """``ceil(E_F(0) / E_r(0))`` for a BSC: a deadline sufficient at zero rate.

    Below ``epsilon = 0.05`` the bound is flagged loose. At ``epsilon = 0.5``
    both exponents vanish; with ``d = 1/2 - epsilon`` they behave as ``d^2``
    and ``4 d^2``, so the ratio is continued by its limit 4.
    """
    er0, ef0 = analytic.bsc_zero_rate(epsilon)
    ratio = ef0 / er0 if er0 > 0.0 else 4.0
    res = Lemma1Result(max(2, math.ceil(ratio - 1e-12)), er0, ef0, epsilon < 0.05)
    return res if full else res.bound


@dataclass
class LreqReport:
    """Outcome of the minimum-deadline search.

    ``l_req`` is ``None`` when no ``L <= l_max`` works. ``deficits`` maps
    each tried ``L`` to ``min_R [L E(R/L) - E_F(R)]`` and ``binding_rate``
    to the rate attaining it.
    """

    l_req: int | None
    rates: np.ndarray
    deficits: dict = field(default_factory=dict)
    binding_rate: dict = field(default_factory=dict)
    tol: float = LREQ_TOL

    @property
    def unbounded(self) -> bool:
        return self.l_req is None


def _ml_at(channel, rates, expurgated):
    return np.array([o.value for o in parallel_map(ml_exponent, channel, rates,
                                                   expurgated=expurgated)])


def l_req(channel, *, grid: int = LREQ_GRID, tol: float = LREQ_TOL, l_max: int = LREQ_MAX,
          expurgated: bool = True, full: bool = False):
    """Smallest ``L >= 2`` with ``L E(R/L) >= E_F(R) - tol`` on a ``grid``-point rate grid."""
    if grid < 2:
        raise ValidationError(f"grid must have at least 2 points, got {grid!r}")
    C = channel_capacity(channel)
    rates = np.linspace(0.0, C, grid)
    if isinstance(channel, Vnc):
        ef = np.array([analytic.vnc_ef(R, C) for R in rates])
    else:
        ef = np.array([o.value for o in parallel_map(erasure.feedback_exponent, channel, rates)])
    report = LreqReport(None, rates, tol=tol)
    for L in range(2, l_max + 1):
        arm = L * _ml_at(channel, rates / L, expurgated)
        gap = arm - ef
        i = int(np.argmin(gap))
        report.deficits[L] = float(gap[i])
        report.binding_rate[L] = float(rates[i])
        if gap[i] >= -tol:
            report.l_req = L
            break
    return report if full else report.l_req
