"""Acceptance criteria, one PASS/FAIL line each (echoed in the terminal summary).

Crossover convention: for a condition evaluated on a rate grid, the crossover
is the first rate of the final run of grid points where it holds, with the
capacity point excluded (every exponent is 0 there). Rates are in bits for
the BSC and AWGN and in nats for the VNC.
"""

import functools
import math
import time

import numpy as np
import pytest

from arq_exponents import analytic, deadline, erasure, gallager as g
from arq_exponents.channels import Awgn, Bsc, Dmc, Vnc, capacity, make_bsc, to_bits, to_nats
from arq_exponents.curves import curve_table
from arq_exponents.simulator import ArqConfig, paired_error_test, simulate

from acceptance_log import check
from oracles import bsc_ef, bsc_er, bsc_esp

BSC = Bsc(0.15)
VNC = Vnc(1.0)
AWGN = Awgn.from_db(3)
NAMES = ("e_r", "e_sp", "e_f", "md_lower", "md_upper", "ir_lower")
SIM_SECONDS = []


@functools.cache
def curve(name, L, points):
    ch = {"bsc": BSC, "vnc": VNC, "awgn": AWGN}[name]
    C = capacity(ch)
    start = time.perf_counter()
    if name == "vnc":
        rates = np.linspace(0.0, C, points)
        shown = rates
    else:
        shown = np.linspace(0.0, to_bits(C), points)
        rates = np.minimum(to_nats(shown), C)
    table = curve_table(ch, rates, NAMES, L=L)
    return shown, table, time.perf_counter() - start


def onset(rates, cond):
    """First rate of the final run where ``cond`` holds, ignoring the capacity point."""
    cond = np.asarray(cond[:-1])
    if not cond[-1]:
        return None
    bad = np.flatnonzero(~cond)
    return float(rates[bad[-1] + 1 if bad.size else 0])


def near(x, target, tol):
    return x is not None and abs(x - target) <= tol


def fmt(x):
    return "none" if x is None else f"{x:.4f}"


# 1. BSC figure crossovers ---------------------------------------------------------------

def test_1a_bsc_l2_crossovers():
    rates, t, secs = curve("bsc", 2, 256)
    ef = t["e_f"]
    md_gap = onset(rates, t["md_upper"] < ef)
    ir_meets = onset(rates, t["ir_lower"] >= ef - 1e-6)
    ir_beats = onset(rates, t["ir_lower"] > t["md_upper"])
    ok = [check("1a BSC L=2 md bounds fall below E_F (~0.006 bits)", near(md_gap, 0.006, 0.01),
                fmt(md_gap)),
          check("1a BSC L=2 ir_lower reaches E_F within 1e-6 (~0.18 bits)",
                near(ir_meets, 0.18, 0.01), fmt(ir_meets)),
          check("1a BSC L=2 ir_lower exceeds md_upper (~0.057 bits)", near(ir_beats, 0.057, 0.01),
                fmt(ir_beats)),
          check("1a BSC L=2 curve runtime under 30 s", secs < 30, f"{secs:.1f} s")]
    assert all(ok)


def test_1b_bsc_l4_crossovers():
    rates, t, secs = curve("bsc", 4, 256)
    md_gap = onset(rates, t["md_upper"] < t["e_f"])
    dev = float(np.max(np.abs(t["ir_lower"] - t["e_f"])))
    ok = [check("1b BSC L=4 md_upper < E_F (~0.141 bits)", near(md_gap, 0.141, 0.01), fmt(md_gap)),
          check("1b BSC L=4 ir_lower = E_F on [0, C]", dev <= 1e-6, f"max dev {dev:.2e}"),
          check("1b BSC L=4 curve runtime under 30 s", secs < 30, f"{secs:.1f} s")]
    assert all(ok)


# 2. L_req table ------------------------------------------------------------------------------

def test_2_lreq_table():
    expected = {0.01: 3, 0.02: 3, 0.025: 3, 0.05: 4, 0.1: 4, 0.15: 4, 0.3: 4, 0.45: 4}
    got = {eps: deadline.l_req(Bsc(eps)) for eps in expected}
    ok = check("2 l_req BSC table", got == expected, str(got))
    eps_grid = np.round(np.arange(0.05, 0.5 + 1e-9, 0.05), 2)
    lemma = {float(e): deadline.lemma1_bound(float(e)) for e in eps_grid}
    ok &= check("2 lemma1_bound = 4 on [0.05, 0.5]", set(lemma.values()) == {4}, str(lemma))
    assert ok


# 3. L = 100 residual gap ----------------------------------------------------------------------

def test_3_l100_residual_gap():
    bits = np.linspace(0.38, 0.39, 64)
    t = curve_table(BSC, to_nats(bits), ("md_upper", "ir_lower"), L=100)
    margin = t["ir_lower"] - t["md_upper"]
    ok = check("3 BSC L=100 md_upper < ir_lower on [0.38, 0.39] bits", bool(np.all(margin > 0)),
               f"min margin {margin.min():.3e}")
    assert ok


# 4. VNC identities -------------------------------------------------------------------------

def test_4_vnc_identities_and_crossovers():
    R = np.linspace(0.0, 1.0, 1001)
    er_id = all(4 * analytic.vnc_er(r / 4, 1.0) == 2 - r for r in R)
    ir_id = all(analytic.vnc_ir_bound(r, 1.0, 4) == analytic.vnc_ef(r, 1.0) for r in R)
    ok = check("4 VNC 4 E_r(R/4) = 2 - R exactly", er_id)
    ok &= check("4 VNC ir bound(L=4) = E_F exactly", ir_id)
    for L, target in ((2, 0.12), (4, 0.25)):
        rates, t, _ = curve("vnc", L, 256)
        x = onset(rates, t["ir_lower"] > t["md_upper"])
        ok &= check(f"4 VNC L={L} IR exceeds MD bounds (~{target} nats)", near(x, target, 0.02),
                    fmt(x))
    assert ok


# 5. AWGN crossovers ----------------------------------------------------------------------------

def test_5_awgn_crossovers():
    ok = True
    for L, target in ((2, 0.19), (4, 0.46)):
        rates, t, secs = curve("awgn", L, 128)
        x = onset(rates, t["ir_lower"] > t["md_upper"])
        ok &= check(f"5 AWGN 3 dB L={L} IR exceeds MD bounds (~{target} bits)",
                    near(x, target, 0.03), f"{fmt(x)} ({secs:.0f} s)")
    dev = float(np.max(np.abs(t["ir_lower"] - t["e_f"])))
    ok &= check("5 AWGN 3 dB L=4 ir_lower = E_F within 1e-4", dev <= 1e-4, f"max dev {dev:.2e}")
    assert ok


# 6. Sandwich and large-L limit ---------------------------------------------------------------

SANDWICH = [("bsc", 2, 256), ("bsc", 4, 256), ("vnc", 2, 256), ("vnc", 4, 256),
            ("awgn", 2, 128), ("awgn", 4, 128)]


@pytest.mark.parametrize("name,L,points", SANDWICH)
def test_6_sandwich(name, L, points):
    _, t, _ = curve(name, L, points)
    inner = slice(0, -1)
    lo, up, ef = t["md_lower"], t["md_upper"], t["e_f"]
    conds = {
        "E_r <= md_lower": np.all(t["e_r"] <= lo + 1e-9),
        "md_lower < E_F below C": np.all(lo[inner] < ef[inner]),
        "md_lower <= md_upper": np.all(lo <= up + 1e-12),
        "E_sp <= E_F": np.all(t["e_sp"] <= ef + 1e-9),
        "md_upper = L E_sp": np.allclose(up, L * t["e_sp"], rtol=0, atol=1e-12),
    }
    bad = [k for k, v in conds.items() if not v]
    assert check(f"6 sandwich {name} L={L}", not bad, "; ".join(bad) or "all orderings hold")


def limit_gaps(ch, L):
    C = capacity(ch)
    rates = np.linspace(0.0, C, 17)[:-1]
    gaps = []
    for R in rates:
        lower, ef = deadline.md_limit_check(ch, R, L)
        gaps.append(ef - lower)
    return np.array(gaps)


@pytest.mark.xfail(strict=True, reason="the gap to E_F decays like L^-1/2; at L=1e4 it is "
                                       "8e-3 (BSC) to 3.4e-2 (VNC) nats, above 1e-3")
@pytest.mark.parametrize("ch", [BSC, VNC, AWGN], ids=["bsc", "vnc", "awgn"])
def test_6_limit_within_1e3_at_l1e4(ch):
    gaps = limit_gaps(ch, 10_000)
    ok = bool(np.all((gaps >= 0) & (gaps <= 1e-3)))
    assert check(f"6 md_lower(L=1e4) within 1e-3 of E_F, {type(ch).__name__}", ok,
                 f"max gap {gaps.max():.2e} nats")


@pytest.mark.parametrize("ch", [BSC, VNC, AWGN], ids=["bsc", "vnc", "awgn"])
def test_6_limit_converges(ch):
    g4, g6 = limit_gaps(ch, 10_000), limit_gaps(ch, 1_000_000)
    ok = bool(np.all(g6 > 0) and np.all(g6 <= g4 / 5))
    assert check(f"6 md_lower -> E_F from below, {type(ch).__name__} (companion)", ok,
                 f"max gap {g4.max():.2e} at L=1e4, {g6.max():.2e} at L=1e6")


# 7. Closed-form oracle equivalence -------------------------------------------------------------

def test_7_generic_dmc_matches_bsc_closed_forms():
    worst = 0.0
    for eps in (0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4):
        ch = make_bsc(eps)
        C = capacity(ch)
        for frac in (0.05, 0.3, 0.6, 0.9):
            R = frac * C
            worst = max(worst,
                        abs(g.random_coding_exponent(ch, R) - bsc_er(eps, R)),
                        abs(g.sphere_packing_exponent(ch, R) - bsc_esp(eps, R)),
                        abs(erasure.feedback_exponent(ch, R) - bsc_ef(eps, R)))
    assert check("7 generic Dmc E_r/E_sp/E_F = BSC closed forms (32 pairs)", worst <= 1e-6,
                 f"max dev {worst:.2e}")


def test_7_two_param_reduces_to_gallager():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(40):
        nx, ny = rng.integers(2, 5, size=2)
        P = rng.random((nx, ny)) + 0.01
        ch = Dmc(P / P.sum(axis=1, keepdims=True))
        p = rng.dirichlet(np.ones(nx))
        rho = float(rng.uniform(0.01, 5.0))
        worst = max(worst, abs(g.e0_two_param(ch, p, rho / (1 + rho), rho)
                               - g.e0_gallager(ch, p, rho)))
    assert check("7 e0_two_param(s = rho/(1+rho)) = e0_gallager", worst <= 1e-12,
                 f"max dev {worst:.1e}")


# 8. Simulator properties -------------------------------------------------------------------------

def timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    SIM_SECONDS.append(time.perf_counter() - start)
    return out


def spec_cfg(scheme, **kw):
    base = dict(scheme=scheme, epsilon=0.15, n=200, num_messages=16, threshold=0.05, deadline=2,
                trials=100_000, seed=7)
    base.update(kw)
    return ArqConfig(**base)


def stressed_cfg(scheme, **kw):
    # short blocks so that erasures and errors actually occur
    return spec_cfg(scheme, **{"n": 24, **kw})


@pytest.fixture(scope="module")
def spec_pair():
    return timed(paired_error_test, spec_cfg("md"), spec_cfg("ir"))


def test_8a_noiseless_channel():
    errs = {s: timed(simulate, stressed_cfg(s, epsilon=0.0)).errors for s in ("md", "ir")}
    assert check("8a eps=0 gives zero errors in 1e5 trials", set(errs.values()) == {0}, str(errs))


def test_8b_determinism_across_workers():
    same = all(timed(simulate, stressed_cfg(s, trials=20_000), workers=1).rows()
               == timed(simulate, stressed_cfg(s, trials=20_000), workers=8).rows()
               for s in ("md", "ir"))
    assert check("8b identical reports for 1 and 8 workers", same)


def delay_check(r):
    L, N = r.config.deadline, r.config.n
    reached = np.concatenate([[r.trials], r.erasures_per_round])[:L]
    ended = reached - np.concatenate([r.erasures_per_round, [0]])
    d = N * np.arange(1, L + 1)
    var = (ended * (d - r.avg_delay) ** 2).sum() / (r.trials - 1)
    se = math.sqrt(var / r.trials)
    p_x = r.erasures_per_round.sum() / reached[:-1].sum()
    predicted = N * sum(p_x ** k for k in range(L))
    return abs(r.avg_delay - predicted) <= max(3 * se, 1e-9), r.avg_delay, predicted, se


def test_8c_delay_identity(spec_pair):
    md = spec_pair[0]
    ok, avg, pred, se = delay_check(md)
    e1 = erasure.e1(Bsc(0.15), md.config.rate, md.config.threshold)
    ok &= check("8c delay identity, N=200 M=16 L=2 T=0.05", ok and e1 > 0,
                f"avg {avg:.4f} predicted {pred:.4f} se {se:.2e}; E_1(R1, T) = {e1:.3f} "
                "so erasures are rare")
    stressed = timed(simulate, stressed_cfg("md", threshold=0.2, deadline=4, fixed_code=True))
    s_ok, avg, pred, se = delay_check(stressed)
    ok &= check("8c delay identity, stressed N=24 L=4 T=0.2 fixed code", s_ok,
                f"avg {avg:.4f} predicted {pred:.4f} se {se:.2e}")
    assert ok


def test_8d_paired_comparison(spec_pair):
    md, ir, p = spec_pair
    ok = check("8d P_IR <= P_MD, N=200 M=16 L=2", ir.error_prob <= md.error_prob and p > 0.05,
               f"MD {md.error_prob:.2e} IR {ir.error_prob:.2e} p={p:.3f}")
    md, ir, p = timed(paired_error_test, stressed_cfg("md"), stressed_cfg("ir"))
    ok &= check("8d P_IR <= P_MD, stressed N=24", ir.error_prob <= md.error_prob and p > 0.05,
                f"MD {md.error_prob:.2e} IR {ir.error_prob:.2e} p={p:.3f}")
    assert ok


def test_8e_erasures_monotone_in_threshold():
    ok = True
    for scheme in ("md", "ir"):
        counts = [int(timed(simulate, stressed_cfg(scheme, threshold=T, trials=20_000))
                      .erasures_per_round[0]) for T in (0.0, 0.05, 0.1, 0.2, 0.3, 0.5)]
        ok &= check(f"8e {scheme} erasures nondecreasing in T (seed 7)",
                    bool(np.all(np.diff(counts) >= 0)) and counts[-1] > counts[0], str(counts))
    assert ok


def test_8_total_runtime():
    total = sum(SIM_SECONDS)
    assert check("8 simulator runtime under 5 min", total < 300, f"{total:.0f} s")
