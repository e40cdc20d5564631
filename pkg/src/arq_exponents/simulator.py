"""Monte Carlo simulation of deadline-constrained ARQ over a BSC.

Each trial draws a message, a random binary codebook of ``M`` words of
length ``L*N`` and the channel noise for all ``L`` rounds from a generator
keyed by ``(seed, trial)``. The two schemes read the same draws:

* memoryless (``md``): every round retransmits the first ``N`` codeword
  symbols and decodes from the latest ``N`` received symbols only;
* incremental redundancy (``ir``): round ``k`` sends symbols
  ``(k-1)N..kN-1`` and decodes from all ``kN`` symbols received so far.

Rounds ``1..L-1`` use the threshold test
``ln p(y|x_m) - ln sum_{j!=m} p(y|x_j) >= N T`` (for IR the per-round
threshold ``T/k`` over ``kN`` symbols gives the same ``N T``); round ``L``
decodes by minimum Hamming distance with ties to the lowest index.

Because every draw depends only on ``(seed, trial)`` and trials are merged
by integer addition, reports are identical for any worker count.

With ``fixed_code`` set, the message and codebook are drawn once per seed
and only the noise varies between trials. Rounds of the memoryless scheme
are then independent; under a fresh codebook per trial they are positively
correlated, since a codebook with close codewords tends to erase again.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np
from scipy import stats
from scipy.special import xlogy

from .channels import ValidationError

SCHEMES = {"md": "memoryless", "memoryless": "memoryless",
           "ir": "incremental", "incremental": "incremental"}
MAX_MESSAGES = 2 ** 16
MAX_SYMBOLS = 2 ** 20
MIN_EXPONENT_EVENTS = 20
CHUNK_BYTES = 1 << 22
FIXED_CODE_STREAM = 2 ** 64 - 1


@dataclass(frozen=True)
class ArqConfig:
    """Simulation parameters. ``threshold`` is ``T`` in nats per symbol."""

    scheme: str
    epsilon: float
    n: int
    num_messages: int
    threshold: float
    deadline: int
    trials: int
    seed: int = 0
    fixed_code: bool = False

    def __post_init__(self):
        scheme = SCHEMES.get(str(self.scheme).lower())
        if scheme is None:
            raise ValidationError(f"scheme: expected one of {sorted(SCHEMES)}, got {self.scheme!r}")
        object.__setattr__(self, "scheme", scheme)
        if not (0.0 <= self.epsilon <= 1.0):
            raise ValidationError(f"epsilon: must lie in [0, 1], got {self.epsilon!r}")
        for name, low in (("n", 1), ("num_messages", 2), ("deadline", 2), ("trials", 1)):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < low:
                raise ValidationError(f"{name}: must be an integer >= {low}, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.num_messages > MAX_MESSAGES:
            raise ValidationError(f"num_messages: at most {MAX_MESSAGES}, got {self.num_messages}")
        if self.deadline * self.n > MAX_SYMBOLS:
            raise ValidationError(f"deadline*n: at most {MAX_SYMBOLS} symbols, got {self.deadline * self.n}")
        if not (self.threshold >= 0.0) or not math.isfinite(self.threshold):
            raise ValidationError(f"threshold: must be finite and >= 0, got {self.threshold!r}")
        if self.rate > math.log(2.0) + 1e-12:
            raise ValidationError(f"num_messages: rate ln(M)/n = {self.rate:.6g} exceeds ln 2")
        if not (0 <= self.seed < 2 ** 64):
            raise ValidationError(f"seed: must be a 64-bit unsigned integer, got {self.seed!r}")
        if not isinstance(self.fixed_code, (bool, np.bool_)):
            raise ValidationError(f"fixed_code: must be a boolean, got {self.fixed_code!r}")
        if self.trials >= FIXED_CODE_STREAM:
            raise ValidationError(f"trials: must be below {FIXED_CODE_STREAM}")

    @property
    def rate(self) -> float:
        """Per-round rate ``R_1 = ln(M) / N`` in nats."""
        return math.log(self.num_messages) / self.n


@dataclass(frozen=True)
class DecodeOutcome:
    """Threshold-decoder verdict: ``index`` is ``None`` for an erasure."""

    accepted: bool
    index: int | None
    log_ratio: float
    tie: bool = False

    @property
    def kind(self) -> str:
        return "accept" if self.accepted else "erase"


def _log_likelihood(dist, length, epsilon):
    """``d ln(eps) + (n - d) ln(1 - eps)`` with ``0 ln 0 = 0``."""
    dist = np.asarray(dist, dtype=float)
    return xlogy(dist, epsilon) + xlogy(length - dist, 1.0 - epsilon)


def _threshold_batch(ll, thr):
    """Threshold test on rows of log-likelihoods ``ll`` (shape ``(B, M)``).

    Only the most likely message can reach a ratio >= 1, so it is the only
    candidate. Returns ``(accept, index, log_ratio, tie)``; an exact tie at
    the top with ``thr = 0`` lets two messages qualify and is erased.
    """
    top = np.argmax(ll, axis=1)
    rows = np.arange(ll.shape[0])
    best = ll[rows, top]
    others = ll.copy()
    others[rows, top] = -np.inf
    m = others.max(axis=1)
    safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = safe + np.log(np.sum(np.exp(others - safe[:, None]), axis=1))
        log_ratio = np.where(np.isneginf(denom), np.inf, best - denom)
    qualifies = log_ratio >= thr
    tie = qualifies & (m == best)
    return qualifies & ~tie, top, log_ratio, tie


def erasure_decode(received, codebook, threshold_exponent: float, epsilon: float) -> DecodeOutcome:
    """Threshold decoding of one received word against codebook rows of equal length.

    ``threshold_exponent`` is the total ``kN T_k``; the best message is
    accepted when its log likelihood ratio against the sum of all others
    reaches it.
    """
    y = np.asarray(received, dtype=np.uint8)
    cb = np.asarray(codebook, dtype=np.uint8)
    if cb.ndim != 2 or cb.shape[1] != y.size:
        raise ValidationError("codebook rows must have the length of the received word")
    if not (threshold_exponent >= 0.0):
        raise ValidationError(f"threshold exponent must be >= 0, got {threshold_exponent!r}")
    if not (0.0 <= epsilon <= 1.0):
        raise ValidationError(f"epsilon must lie in [0, 1], got {epsilon!r}")
    dist = np.count_nonzero(cb != y[None, :], axis=1)
    ll = _log_likelihood(dist, y.size, epsilon)[None, :]
    ok, idx, lr, tie = _threshold_batch(ll, threshold_exponent)
    return DecodeOutcome(bool(ok[0]), int(idx[0]) if ok[0] else None, float(lr[0]), bool(tie[0]))


def _ml_index(dist, epsilon):
    # minimum distance is ML for eps <= 1/2; argmax takes the lowest index on ties
    return np.argmin(dist, axis=1) if epsilon <= 0.5 else np.argmax(dist, axis=1)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based generator for one trial, independent of how trials are split."""
    return np.random.Generator(np.random.Philox(key=int(seed) + (int(trial) << 64)))


def _draw_code(cfg, rng):
    msg = int(rng.integers(cfg.num_messages))
    cb = rng.integers(0, 2, size=(cfg.num_messages, cfg.deadline * cfg.n), dtype=np.uint8)
    return msg, cb


def _draw(cfg, trial):
    rng = trial_rng(cfg.seed, trial)
    if cfg.fixed_code:
        msg, cb = _draw_code(cfg, trial_rng(cfg.seed, FIXED_CODE_STREAM))
    else:
        msg, cb = _draw_code(cfg, rng)
    noise = (rng.random((cfg.deadline, cfg.n)) < cfg.epsilon).astype(np.uint8)
    return msg, cb, noise


def _empty_counts(L):
    return {"erasures": np.zeros(L - 1, dtype=np.int64),
            "errors": np.zeros(L, dtype=np.int64),
            "accepted_correct": 0, "ties": 0, "delay_symbols": 0, "trials": 0}


def _run_chunk(args):
    cfg, start, stop = args
    L, N = cfg.deadline, cfg.n
    B = stop - start
    msgs = np.empty(B, dtype=np.int64)
    cbs = np.empty((B, cfg.num_messages, L * N), dtype=np.uint8)
    noise = np.empty((B, L, N), dtype=np.uint8)
    for i, trial in enumerate(range(start, stop)):
        msgs[i], cbs[i], noise[i] = _draw(cfg, trial)
    rows = np.arange(B)
    sent = cbs[rows, msgs]
    counts = _empty_counts(L)
    failed = np.zeros(B, dtype=bool)
    active = np.ones(B, dtype=bool)
    thr = N * cfg.threshold
    for k in range(1, L + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        if cfg.scheme == "memoryless":
            length = N
            y = sent[idx, :N] ^ noise[idx, k - 1]
            dist = np.count_nonzero(cbs[idx, :, :N] != y[:, None, :], axis=2)
        else:
            length = k * N
            y = sent[idx, :length] ^ noise[idx, :k].reshape(idx.size, length)
            dist = np.count_nonzero(cbs[idx, :, :length] != y[:, None, :], axis=2)
        if k < L:
            ll = _log_likelihood(dist, length, cfg.epsilon)
            accept, choice, _, tie = _threshold_batch(ll, thr)
            counts["ties"] += int(np.count_nonzero(tie))
            counts["erasures"][k - 1] += int(np.count_nonzero(~accept))
        else:
            choice = _ml_index(dist, cfg.epsilon)
            accept = np.ones(idx.size, dtype=bool)
        done = idx[accept]
        wrong = choice[accept] != msgs[done]
        counts["errors"][k - 1] += int(np.count_nonzero(wrong))
        failed[done[wrong]] = True
        counts["accepted_correct"] += int(np.count_nonzero(~wrong))
        counts["delay_symbols"] += int(done.size) * k * N
        active[done] = False
    counts["trials"] = B
    return counts, failed


def _merge(a, b):
    return {key: a[key] + b[key] for key in a}


def sim_workers() -> int:
    """Worker processes from ``ARQ_EXPONENTS_WORKERS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("ARQ_EXPONENTS_WORKERS", "1")))
    except ValueError:
        return 1


@dataclass
class SimulationReport:
    """Aggregated outcome of a simulation run.

    ``errors_per_round[L-1]`` counts ML errors in the final round;
    ``error_ci`` is the 95% Clopper-Pearson interval for ``error_prob``.
    """

    config: ArqConfig
    erasures_per_round: np.ndarray
    errors_per_round: np.ndarray
    accepted_correct: int
    ties: int
    delay_symbols: int
    trials: int
    error_prob: float = field(init=False)
    error_ci: tuple = field(init=False)
    avg_delay: float = field(init=False)
    throughput: float = field(init=False)
    empirical_exponent: float | None = field(init=False)

    def __post_init__(self):
        errors = int(self.errors_per_round.sum())
        if errors + self.accepted_correct != self.trials:
            raise AssertionError("outcome counts do not add up to the number of trials")
        self.error_prob = errors / self.trials
        self.error_ci = clopper_pearson(errors, self.trials)
        self.avg_delay = self.delay_symbols / self.trials
        self.throughput = math.log(self.config.num_messages) / self.avg_delay
        self.empirical_exponent = (-math.log(self.error_prob) / self.avg_delay
                                   if self.error_prob > 0 else None)

    @property
    def errors(self) -> int:
        return int(self.errors_per_round.sum())

    def rows(self):
        """``(field, value)`` pairs for CSV output."""
        out = [(f.name, getattr(self.config, f.name)) for f in fields(self.config)]
        out.append(("rate_nats", self.config.rate))
        for k, v in enumerate(self.erasures_per_round, start=1):
            out.append((f"erasures_round_{k}", int(v)))
        for k, v in enumerate(self.errors_per_round, start=1):
            out.append((f"errors_round_{k}", int(v)))
        out += [("accepted_correct", self.accepted_correct), ("ties", self.ties),
                ("avg_delay", self.avg_delay), ("throughput", self.throughput),
                ("error_prob", self.error_prob), ("error_ci_low", self.error_ci[0]),
                ("error_ci_high", self.error_ci[1]),
                ("empirical_exponent", "" if self.empirical_exponent is None
                 else self.empirical_exponent)]
        return out

    def summary(self) -> str:
        c = self.config
        lines = [f"{c.scheme} ARQ over BSC({c.epsilon:g}): N={c.n} M={c.num_messages} "
                 f"T={c.threshold:g} L={c.deadline} trials={self.trials} seed={c.seed}",
                 f"  erasures per round: {list(map(int, self.erasures_per_round))}",
                 f"  errors per round:   {list(map(int, self.errors_per_round))}",
                 f"  average delay {self.avg_delay:.6g} symbols, throughput "
                 f"{self.throughput:.6g} nats/symbol (R1 = {c.rate:.6g})",
                 f"  error probability {self.error_prob:.6g} "
                 f"[{self.error_ci[0]:.3g}, {self.error_ci[1]:.3g}]"]
        return "\n".join(lines)


def clopper_pearson(k: int, n: int, level: float = 0.95):
    a = (1.0 - level) / 2.0
    lo = 0.0 if k == 0 else float(stats.beta.ppf(a, k, n - k + 1))
    hi = 1.0 if k == n else float(stats.beta.ppf(1.0 - a, k + 1, n - k))
    return lo, hi


def _chunks(cfg):
    per_trial = cfg.num_messages * cfg.deadline * cfg.n
    size = max(1, min(4096, CHUNK_BYTES // per_trial))
    return [(cfg, a, min(a + size, cfg.trials)) for a in range(0, cfg.trials, size)]


def _simulate(cfg, workers):
    jobs = _chunks(cfg)
    n = sim_workers() if workers is None else max(1, int(workers))
    total = _empty_counts(cfg.deadline)
    flags = []
    if n == 1 or len(jobs) == 1:
        parts = map(_run_chunk, jobs)
        for counts, failed in parts:
            total = _merge(total, counts)
            flags.append(failed)
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            for counts, failed in pool.map(_run_chunk, jobs):
                total = _merge(total, counts)
                flags.append(failed)
    report = SimulationReport(cfg, total["erasures"], total["errors"], total["accepted_correct"],
                              total["ties"], total["delay_symbols"], total["trials"])
    return report, np.concatenate(flags)


def simulate(cfg: ArqConfig, workers: int | None = None) -> SimulationReport:
    """Run ``cfg.trials`` trials of ``cfg.scheme`` and aggregate them."""
    return _simulate(cfg, workers)[0]


def run_memoryless_arq(cfg: ArqConfig, workers: int | None = None) -> SimulationReport:
    if cfg.scheme != "memoryless":
        raise ValidationError(f"scheme: expected memoryless, got {cfg.scheme}")
    return simulate(cfg, workers)


def run_ir_arq(cfg: ArqConfig, workers: int | None = None) -> SimulationReport:
    if cfg.scheme != "incremental":
        raise ValidationError(f"scheme: expected incremental, got {cfg.scheme}")
    return simulate(cfg, workers)


@dataclass(frozen=True)
class ExponentEstimate:
    """``-ln P(E) / tau`` with a delta-method 95% interval, or a refusal.

    When fewer than 20 error events were seen ``value`` is ``None`` and
    ``insufficient`` is set.
    """

    value: float | None
    ci: tuple | None
    events: int

    @property
    def insufficient(self) -> bool:
        return self.value is None


def estimate_exponent(report: SimulationReport, min_events: int = MIN_EXPONENT_EVENTS) -> ExponentEstimate:
    k, n = report.errors, report.trials
    if k < min_events:
        return ExponentEstimate(None, None, k)
    p, tau = k / n, report.avg_delay
    value = -math.log(p) / tau
    # d(-ln p)/dp = -1/p, so sd(-ln p_hat) = sqrt((1-p)/(n p))
    half = 1.959963984540054 * math.sqrt((1.0 - p) / (n * p)) / tau
    return ExponentEstimate(value, (value - half, value + half), k)


def paired_error_test(cfg_md: ArqConfig, cfg_ir: ArqConfig, workers: int | None = None):
    """One-sided exact test of ``P_IR(E) > P_MD(E)`` on paired trials.

    Both configurations must share every field except the scheme, so trial
    ``i`` sees the same message, codebook and noise under both schemes.
    Returns ``(md_report, ir_report, p_value)``; a small ``p_value`` would
    contradict ``P_IR(E) <= P_MD(E)``.
    """
    same = all(getattr(cfg_md, f.name) == getattr(cfg_ir, f.name)
               for f in fields(ArqConfig) if f.name != "scheme")
    if not same or cfg_md.scheme != "memoryless" or cfg_ir.scheme != "incremental":
        raise ValidationError("paired test needs a memoryless and an incremental config "
                              "that differ only in scheme")
    md, md_err = _simulate(cfg_md, workers)
    ir, ir_err = _simulate(cfg_ir, workers)
    only_ir = int(np.count_nonzero(ir_err & ~md_err))
    only_md = int(np.count_nonzero(md_err & ~ir_err))
    p_value = 1.0
    if only_ir + only_md:
        p_value = float(stats.binomtest(only_ir, only_ir + only_md, 0.5,
                                        alternative="greater").pvalue)
    return md, ir, p_value
