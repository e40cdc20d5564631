"""Memoryless channel models, input distributions and capacity.

All quantities are in nats. Four channel families are supported:

* :class:`Dmc` -- a finite transition matrix ``p(y|x)`` (one row per input).
* :class:`Bsc` -- binary symmetric channel, handled through its 2x2 matrix
  but with closed-form capacity.
* :class:`Awgn` -- unit-variance Gaussian noise with a Gaussian input of
  power ``A``; treated analytically.
* :class:`Vnc` -- the very noisy channel, described only by its capacity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import singledispatch
from pathlib import Path

import numpy as np

ROW_SUM_TOL = 1e-12
RENORMALIZE_TOL = 1e-9


class ValidationError(ValueError):
    """Raised when a channel, distribution or parameter is out of its domain."""


def binary_entropy(p: float) -> float:
    """Binary entropy in nats with ``0 ln 0 = 0``."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log(p) - (1.0 - p) * math.log1p(-p)


@dataclass(frozen=True, eq=False)
class Dmc:
    """Discrete memoryless channel with transition matrix ``p(y|x)``.

    Use :func:`make_dmc` or :func:`make_bsc` to build one; the constructor
    only checks and freezes an already normalized matrix.
    """

    transition: np.ndarray

    def __post_init__(self):
        P = np.array(self.transition, dtype=float)
        if P.ndim != 2:
            raise ValidationError("transition matrix must be two-dimensional")
        if P.shape[0] < 2 or P.shape[1] < 2:
            raise ValidationError(
                f"need at least 2 inputs and 2 outputs, got shape {P.shape}")
        if not np.all(np.isfinite(P)):
            raise ValidationError("transition matrix has non-finite entries")
        if np.any(P < 0.0) or np.any(P > 1.0):
            raise ValidationError("transition probabilities must lie in [0, 1]")
        dev = np.abs(P.sum(axis=1) - 1.0)
        if np.any(dev > ROW_SUM_TOL):
            raise ValidationError(
                f"row sums deviate from 1 by up to {dev.max():.3e}")
        P.setflags(write=False)
        object.__setattr__(self, "transition", P)

    @property
    def input_size(self) -> int:
        return self.transition.shape[0]

    @property
    def output_size(self) -> int:
        return self.transition.shape[1]

    @property
    def is_symmetric(self) -> bool:
        return is_symmetric(self.transition)

    def __eq__(self, other):
        if not isinstance(other, Dmc):
            return NotImplemented
        return (self.transition.shape == other.transition.shape
                and np.array_equal(self.transition, other.transition))

    def __hash__(self):
        return hash((self.transition.shape, self.transition.tobytes()))


@dataclass(frozen=True)
class Bsc:
    """Binary symmetric channel with crossover probability ``epsilon``."""

    epsilon: float

    def __post_init__(self):
        _check_epsilon(self.epsilon)
        object.__setattr__(self, "epsilon", float(self.epsilon))

    @property
    def dmc(self) -> Dmc:
        return make_bsc(self.epsilon)


@dataclass(frozen=True)
class Awgn:
    """AWGN channel with unit noise variance and Gaussian input of power ``snr_power``."""

    snr_power: float

    def __post_init__(self):
        A = float(self.snr_power)
        if not (math.isfinite(A) and A > 0.0):
            raise ValidationError(f"snr_power must be positive, got {self.snr_power!r}")
        object.__setattr__(self, "snr_power", A)

    @classmethod
    def from_db(cls, snr_db: float) -> "Awgn":
        return cls(10.0 ** (snr_db / 10.0))


@dataclass(frozen=True)
class Vnc:
    """Very noisy channel, known only through its capacity (nats)."""

    capacity: float

    def __post_init__(self):
        C = float(self.capacity)
        if not (math.isfinite(C) and C > 0.0):
            raise ValidationError(f"capacity must be positive, got {self.capacity!r}")
        object.__setattr__(self, "capacity", C)


Channel = Dmc | Bsc | Awgn | Vnc


def _check_epsilon(epsilon):
    try:
        eps = float(epsilon)
    except (TypeError, ValueError):
        raise ValidationError(f"crossover probability must be a number, got {epsilon!r}")
    if not (0.0 <= eps <= 0.5):
        raise ValidationError(f"crossover probability must lie in [0, 0.5], got {epsilon!r}")
    return eps


def make_bsc(epsilon: float) -> Dmc:
    """2x2 transition matrix of a BSC; ``epsilon`` above 0.5 is rejected."""
    eps = _check_epsilon(epsilon)
    return Dmc(np.array([[1.0 - eps, eps], [eps, 1.0 - eps]]))


def make_dmc(matrix) -> Dmc:
    """Validate a transition matrix and wrap it as a :class:`Dmc`.

    Rows whose sums are within ``1e-9`` of one are renormalized; anything
    further off is rejected rather than silently fixed.
    """
    try:
        P = np.array(matrix, dtype=float)
    except ValueError as exc:
        raise ValidationError(f"transition matrix is not rectangular: {exc}") from None
    if P.ndim != 2:
        raise ValidationError("transition matrix must be rectangular and two-dimensional")
    if P.shape[0] < 2 or P.shape[1] < 2:
        raise ValidationError(f"need at least 2 rows and 2 columns, got shape {P.shape}")
    if not np.all(np.isfinite(P)):
        raise ValidationError("transition matrix has non-finite entries")
    if np.any(P < 0.0):
        raise ValidationError("transition matrix has negative entries")
    sums = P.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) >= RENORMALIZE_TOL)
    if bad.size:
        i = int(bad[0])
        raise ValidationError(f"row {i} sums to {sums[i]:.12g}, not 1")
    # rows already summing to one within round-off are kept bit-for-bit
    off = np.abs(sums - 1.0) > ROW_SUM_TOL
    P[off] /= sums[off, None]
    return Dmc(P)


def load_dmc(path: str | Path) -> Dmc:
    """Read a DMC from CSV: one row per input, ``#`` starts a comment line."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError:
            raise ValidationError(f"{path}:{lineno}: cannot parse {line!r}")
    if len({len(r) for r in rows}) > 1:
        raise ValidationError(f"{path}: rows have different lengths")
    return make_dmc(rows)


def save_dmc(channel: Dmc, path: str | Path) -> None:
    lines = ["# transition matrix p(y|x), one row per input symbol"]
    lines += [",".join(repr(float(v)) for v in row) for row in channel.transition]
    Path(path).write_text("\n".join(lines) + "\n")


def is_symmetric(P: np.ndarray, tol: float = 1e-9) -> bool:
    """Symmetry in Gallager's sense.

    The outputs must split into groups such that within each group every
    row is a permutation of every other row and every column a
    permutation of every other column. Uniform inputs are optimal for
    such channels.
    """
    P = np.asarray(P, dtype=float)
    groups: dict[tuple, list[int]] = {}
    for j in range(P.shape[1]):
        key = tuple(np.round(np.sort(P[:, j]), 9))
        groups.setdefault(key, []).append(j)
    for cols in groups.values():
        sub = np.sort(P[:, cols], axis=1)
        if np.max(np.abs(sub - sub[0])) > tol:
            return False
    return True


def uniform_input(channel: Channel) -> np.ndarray:
    n = _input_size(channel)
    return np.full(n, 1.0 / n)


def input_distribution(probs, channel: Channel | None = None) -> np.ndarray:
    """Validate a probability vector over the input alphabet of ``channel``."""
    p = np.array(probs, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise ValidationError("input distribution must be a non-empty vector")
    if not np.all(np.isfinite(p)) or np.any(p < 0.0):
        raise ValidationError("input probabilities must be finite and nonnegative")
    if abs(p.sum() - 1.0) > ROW_SUM_TOL:
        raise ValidationError(f"input probabilities sum to {p.sum():.15g}, not 1")
    if channel is not None and p.size != _input_size(channel):
        raise ValidationError(
            f"distribution has {p.size} entries, channel has {_input_size(channel)} inputs")
    p.setflags(write=False)
    return p


def _input_size(channel) -> int:
    if isinstance(channel, Dmc):
        return channel.input_size
    if isinstance(channel, Bsc):
        return 2
    raise ValidationError(f"{type(channel).__name__} has no finite input alphabet")


def as_dmc(channel) -> Dmc:
    if isinstance(channel, Dmc):
        return channel
    if isinstance(channel, Bsc):
        return channel.dmc
    raise ValidationError(f"{type(channel).__name__} is not a finite-alphabet channel")


@dataclass
class CapacityResult:
    capacity: float
    input_distribution: np.ndarray
    iterations: int
    history: list[float] = field(default_factory=list)


def _mutual_information(P: np.ndarray, p: np.ndarray) -> float:
    q = p @ P
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(P > 0, P / q[None, :], 1.0)
        terms = np.where(P > 0, P * np.log(ratio), 0.0)
    return float(p @ terms.sum(axis=1))


def blahut_arimoto(P: np.ndarray, tol: float = 1e-10, max_iter: int = 100_000) -> CapacityResult:
    """Capacity of a DMC by the Blahut-Arimoto alternating maximization.

    Stops when the gap between the upper bound ``max_x D(P_x || q)`` and the
    lower bound ``I(p; P)`` falls below ``tol``. The lower bound is checked to
    be nondecreasing at every step.
    """
    P = np.asarray(P, dtype=float)
    p = np.full(P.shape[0], 1.0 / P.shape[0])
    history: list[float] = []
    for it in range(1, max_iter + 1):
        q = p @ P
        with np.errstate(divide="ignore", invalid="ignore"):
            d = np.where(P > 0, P * np.log(np.where(P > 0, P, 1.0) / np.where(q > 0, q, 1.0)), 0.0)
        D = d.sum(axis=1)
        lower = float(p @ D)
        upper = float(D.max())
        if history and lower < history[-1] - 1e-13:
            raise AssertionError(
                f"Blahut-Arimoto objective decreased at iteration {it}: "
                f"{history[-1]!r} -> {lower!r}")
        history.append(lower)
        if upper - lower < tol:
            break
        w = p * np.exp(D - D.max())
        p = w / w.sum()
    return CapacityResult(lower, p, it, history)


@singledispatch
def capacity(channel) -> float:
    """Capacity in nats per channel use."""
    raise ValidationError(f"unsupported channel type {type(channel).__name__}")


@capacity.register
def _(channel: Dmc) -> float:
    return blahut_arimoto(channel.transition).capacity


@capacity.register
def _(channel: Bsc) -> float:
    return math.log(2.0) - binary_entropy(channel.epsilon)


@capacity.register
def _(channel: Awgn) -> float:
    return 0.5 * math.log1p(channel.snr_power)


@capacity.register
def _(channel: Vnc) -> float:
    return channel.capacity


def to_bits(nats):
    return np.asarray(nats) / math.log(2.0) if np.ndim(nats) else float(nats) / math.log(2.0)


def to_nats(bits):
    return np.asarray(bits) * math.log(2.0) if np.ndim(bits) else float(bits) * math.log(2.0)
