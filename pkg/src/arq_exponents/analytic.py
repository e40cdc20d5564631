"""Closed-form exponents that need no numerical optimization.

Very noisy channel (capacity ``C`` nats)::

    E_r(R)  = C/2 - R                 0 <= R <= C/4
            = (sqrt(C) - sqrt(R))^2   C/4 <= R <= C
    E_sp(R) = (sqrt(C) - sqrt(R))^2
    E_F(R)  = (C - R) + (sqrt(C) - sqrt(R))^2

Binary symmetric channel at zero rate::

    E_r(0) = ln 2 - ln(1 + 2 sqrt(eps (1 - eps)))
    E_F(0) = C - ln 2 - ln sqrt(eps (1 - eps))
"""

from __future__ import annotations

import math

from .channels import ValidationError, binary_entropy


def _check_vnc(R, C):
    if not (C > 0.0):
        raise ValidationError(f"capacity must be positive, got {C!r}")
    if not (0.0 <= R <= C):
        raise ValidationError(f"rate must lie in [0, C={C:g}], got {R!r}")


def vnc_er(R: float, C: float) -> float:
    _check_vnc(R, C)
    if R <= C / 4.0:
        return C / 2.0 - R
    return (math.sqrt(C) - math.sqrt(R)) ** 2


def vnc_esp(R: float, C: float) -> float:
    _check_vnc(R, C)
    return (math.sqrt(C) - math.sqrt(R)) ** 2


def vnc_ef(R: float, C: float) -> float:
    _check_vnc(R, C)
    return (C - R) + (math.sqrt(C) - math.sqrt(R)) ** 2


def vnc_ir_bound(R: float, C: float, L: int) -> float:
    """IR-ARQ exponent bound ``min(E_F(R), L E_r(R/L))`` for the VNC."""
    if L < 2:
        raise ValidationError(f"deadline must be >= 2, got {L!r}")
    return min(vnc_ef(R, C), L * vnc_er(R / L, C))


def bsc_zero_rate(epsilon: float) -> tuple[float, float]:
    """``(E_r(0), E_F(0))`` of a BSC with crossover ``epsilon`` in ``(0, 0.5]``."""
    if not (0.0 < epsilon <= 0.5):
        raise ValidationError(f"crossover must lie in (0, 0.5], got {epsilon!r}")
    C = math.log(2.0) - binary_entropy(epsilon)
    root = math.sqrt(epsilon * (1.0 - epsilon))
    er0 = math.log(2.0) - math.log1p(2.0 * root)
    ef0 = C - math.log(2.0) - math.log(root)
    return er0, ef0
