"""Exponent curves on a rate grid, with the per-point optimizer flags.

:func:`curve_table` evaluates any subset of the exponents below at every
rate, sharing work between them (``E_F`` feeds the IR bound, ``E_r`` the
ML column) and parallelizing over rates.

============  ==============================================
``e_r``       random coding exponent
``e_sp``      sphere packing exponent
``e_ex``      expurgated exponent
``e_f``       feedback exponent
``md_lower``  memoryless-decoding lower bound at deadline L
``md_upper``  ``L E_sp``
``ir_lower``  IR-ARQ lower bound at deadline L
``ml``        ``E_r``: the ``L = 1`` reference
============  ==============================================
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import deadline, erasure, gallager
from .channels import ValidationError

EXPONENTS = ("e_r", "e_sp", "e_ex", "e_f", "md_lower", "md_upper", "ir_lower", "ml")


def curve_point(channel, R, *, names=EXPONENTS, L=2, expurgated=True, full=True):
    """Values and flags of the requested exponents at one rate (nats)."""
    values, flags = {}, {}
    cache = {}

    def get(key, fn):
        if key not in cache:
            cache[key] = fn()
        return cache[key]

    def er():
        return get("e_r", lambda: gallager.random_coding_exponent(channel, R, full=True))

    def ef():
        return get("e_f", lambda: erasure.feedback_exponent(channel, R, full=True))

    for name in names:
        if name in ("e_r", "ml"):
            opt = er()
        elif name == "e_sp":
            opt = gallager.sphere_packing_exponent(channel, R, full=True)
        elif name == "e_ex":
            opt = gallager.expurgated_exponent(channel, R, full=True)
        elif name == "e_f":
            opt = ef()
            flags["e_f_branch"] = opt.branch or ""
        elif name == "md_lower":
            b = deadline.md_bounds(channel, R, L, expurgated=expurgated)
            values[name] = b.lower
            flags["md_lower_boundary"] = int(b.boundary)
            flags["md_lower_branch"] = b.branch or ""
            flags["t_star"] = b.t_star
            continue
        elif name == "md_upper":
            opt = deadline.md_upper_bound(channel, R, L, full=True)
        elif name == "ir_lower":
            f = ef()
            arm = L * gallager.ml_exponent(channel, R / L, expurgated=expurgated)
            values[name] = min(f.value, arm)
            flags["ir_lower_arm"] = "feedback" if f.value <= arm else "deadline"
            continue
        else:
            raise ValidationError(f"unknown exponent {name!r}; choose from {EXPONENTS}")
        values[name] = float(opt.value)
        flags[f"{name}_boundary"] = int(opt.boundary)
    return values, flags


@dataclass
class CurveTable:
    """Exponent columns on a common rate grid (nats)."""

    rates: np.ndarray
    values: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)

    def __getitem__(self, name):
        return self.values[name]


class _Point:
    # picklable wrapper so parallel_map can ship the request to workers
    def __init__(self, names, L, expurgated):
        self.names, self.L, self.expurgated = names, L, expurgated

    def __call__(self, channel, R, full=True):
        return curve_point(channel, R, names=self.names, L=self.L, expurgated=self.expurgated)


def curve_table(channel, rates, names=EXPONENTS, *, L=2, expurgated=True) -> CurveTable:
    """Evaluate ``names`` at every rate of the increasing grid ``rates``."""
    names = tuple(names)
    bad = [n for n in names if n not in EXPONENTS]
    if bad:
        raise ValidationError(f"unknown exponents {bad}; choose from {EXPONENTS}")
    rates = np.asarray(rates, dtype=float)
    if rates.size > 1 and np.any(np.diff(rates) <= 0):
        raise ValidationError("rate grid must be strictly increasing")
    results = gallager.parallel_map(_Point(names, L, expurgated), channel, rates)
    table = CurveTable(rates)
    for name in names:
        table.values[name] = np.array([v[name] for v, _ in results])
    for key in results[0][1] if results else ():
        table.flags[key] = [f[key] for _, f in results]
    return table
