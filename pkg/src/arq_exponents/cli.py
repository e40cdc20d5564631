"""Command-line interface: ``arq-exponents {curve,lreq,simulate,vnc-check}``.

Channel specs: ``bsc:<eps>``, ``awgn:<dB>dB`` or ``awgn:<linear power>``,
``vnc:<capacity in nats>``, ``dmc:<path to CSV matrix>``.

Exit status is 0 on success, 2 for invalid input (bad spec, bad grid,
invalid simulation config) and 1 for failures while computing.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys

import numpy as np

from . import analytic, deadline
from .channels import Awgn, Bsc, ValidationError, Vnc, capacity, load_dmc
from .curves import EXPONENTS, curve_table
from .simulator import ArqConfig, estimate_exponent, simulate

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2
LN2 = math.log(2.0)


class ConfigError(Exception):
    """Invalid command-line or configuration input."""


def parse_channel(spec: str):
    """Build a channel from its spec string."""
    kind, sep, arg = spec.partition(":")
    kind = kind.strip().lower()
    if not sep or not arg:
        raise ConfigError(f"channel spec {spec!r} must look like kind:parameter")
    try:
        if kind == "bsc":
            return Bsc(float(arg))
        if kind == "awgn":
            if arg.lower().endswith("db"):
                return Awgn.from_db(float(arg[:-2]))
            return Awgn(float(arg))
        if kind == "vnc":
            return Vnc(float(arg))
        if kind == "dmc":
            return load_dmc(arg)
    except (ValueError, OSError) as exc:
        raise ConfigError(f"channel spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown channel kind {kind!r} in {spec!r}; use bsc, awgn, vnc or dmc")


def fmt(value) -> str:
    """CSV cell: 12 significant digits, tiny round-off shown as 0, never NaN."""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if not math.isfinite(v):
        raise ValueError(f"refusing to write non-finite value {v!r}")
    if abs(v) < 1e-14:
        v = 0.0
    return f"{v:.12g}"


def write_csv(rows, header, out):
    buf = io.StringIO(newline="")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    text = buf.getvalue()
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def rate_grid(C, start, stop, count, units):
    """Rate grid in nats from ``start``/``stop`` given in ``units``."""
    scale = LN2 if units == "bits" else 1.0
    if count < 2:
        raise ConfigError(f"--count must be at least 2, got {count}")
    if C <= 0.0:
        return np.array([0.0])
    lo = 0.0 if start is None else start * scale
    hi = C if stop is None else stop * scale
    if lo < 0.0:
        raise ConfigError(f"--start must be >= 0, got {start}")
    if hi > C * (1.0 + 1e-9):
        raise ConfigError(f"--stop {stop} exceeds capacity {C / scale:.12g} {units}")
    if hi <= lo:
        raise ConfigError("--stop must exceed --start")
    return np.minimum(np.linspace(lo, hi, count), C)


def cmd_curve(args) -> int:
    channel = parse_channel(args.channel)
    names = [n.strip() for n in args.exponents.split(",") if n.strip()]
    bad = [n for n in names if n not in EXPONENTS]
    if bad:
        raise ConfigError(f"unknown exponents {bad}; choose from {', '.join(EXPONENTS)}")
    if args.deadline < 2:
        raise ConfigError(f"--deadline must be >= 2, got {args.deadline}")
    C = capacity(channel)
    rates = rate_grid(C, args.start, args.stop, args.count, args.units)
    table = curve_table(channel, rates, names, L=args.deadline,
                        expurgated=not args.no_expurgated)
    scale = 1.0 / LN2 if args.units == "bits" else 1.0
    flag_names = list(table.flags)
    header = ["rate_nats", "rate_bits"] + names + flag_names
    rows = []
    for i, R in enumerate(rates):
        row = [R, R / LN2] + [table.values[n][i] * scale for n in names]
        row += [table.flags[f][i] * (scale if f == "t_star" else 1) for f in flag_names]
        rows.append(row)
    write_csv(rows, header, args.out)
    return EXIT_OK


def cmd_lreq(args) -> int:
    channel = parse_channel(args.channel)
    rep = deadline.l_req(channel, grid=args.grid, l_max=args.l_max,
                         expurgated=not args.no_expurgated, full=True)
    scale = 1.0 / LN2 if args.units == "bits" else 1.0
    if rep.l_req is None:
        print(f"l_req: unbounded (no L <= {args.l_max} satisfies L E(R/L) >= E_F(R))")
    else:
        print(f"l_req: {rep.l_req}")
    for L, gap in rep.deficits.items():
        print(f"  L={L}: min_R [L E(R/L) - E_F(R)] = {gap * scale:.6g} {args.units} "
              f"at R = {rep.binding_rate[L] * scale:.6g} {args.units}")
    if isinstance(channel, Bsc) and channel.epsilon > 0.0:
        lem = deadline.lemma1_bound(channel.epsilon, full=True)
        note = " (loose for small crossover)" if lem.loose else ""
        print(f"lemma1: {lem.bound}{note}  [E_F(0)/E_r(0) = {lem.ef0:.6g}/{lem.er0:.6g}]")
    return EXIT_OK if rep.l_req is not None else EXIT_RUNTIME


def cmd_vnc_check(args) -> int:
    C = args.capacity
    if not (C > 0.0):
        raise ConfigError(f"--capacity must be positive, got {C}")
    rates = np.linspace(0.0, C, args.count)
    checks = {
        "4 E_r(R/4) = 2C - R": max(abs(4 * analytic.vnc_er(R / 4, C) - (2 * C - R)) for R in rates),
        "min(E_F, 4 E_r(R/4)) = E_F": max(abs(analytic.vnc_ir_bound(R, C, 4) - analytic.vnc_ef(R, C))
                                          for R in rates),
        "E_r continuous at C/4": abs((C / 2 - C / 4) - (math.sqrt(C) - math.sqrt(C / 4)) ** 2),
        "E_r <= E_F": max(max(analytic.vnc_er(R, C) - analytic.vnc_ef(R, C), 0.0) for R in rates),
    }
    ok = True
    for name, dev in checks.items():
        good = dev <= 1e-12 * max(C, 1.0)
        ok &= good
        print(f"{'PASS' if good else 'FAIL'}  {name}  (max deviation {dev:.3g})")
    return EXIT_OK if ok else EXIT_RUNTIME


SIM_FIELDS = {"scheme": "scheme", "bsc": "epsilon", "n": "n", "m": "num_messages",
              "t": "threshold", "l": "deadline", "trials": "trials", "seed": "seed",
              "fixed_code": "fixed_code"}
OPTIONAL_SIM_FIELDS = ("seed", "fixed_code")


def _sim_config(args) -> ArqConfig:
    values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        for key, val in raw.items():
            name = SIM_FIELDS.get(key, key)
            if name not in SIM_FIELDS.values():
                raise ConfigError(f"unknown config field {key!r}")
            values[name] = val
    for flag, name in SIM_FIELDS.items():
        val = getattr(args, flag)
        if val is not None:
            values[name] = val
    missing = [flag for flag, name in SIM_FIELDS.items() if name not in values and name not in OPTIONAL_SIM_FIELDS]
    if missing:
        raise ConfigError(f"missing simulation fields: {', '.join('--' + m for m in missing)}")
    try:
        return ArqConfig(**values)
    except (ValidationError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def cmd_simulate(args) -> int:
    cfg = _sim_config(args)
    report = simulate(cfg)
    write_csv(report.rows(), ["field", "value"], args.out)
    if args.out not in (None, "-"):
        print(report.summary())
        est = estimate_exponent(report)
        if est.insufficient:
            print(f"  exponent estimate: insufficient events ({est.events} errors, need 20)")
        else:
            print(f"  exponent estimate: {est.value:.6g} nats/symbol "
                  f"[{est.ci[0]:.4g}, {est.ci[1]:.4g}]")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="arq-exponents",
                     description="Error exponents of ARQ with a deadline constraint.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("curve", help="exponent curves as CSV")
    p.add_argument("channel", help="bsc:<eps> | awgn:<dB>dB | awgn:<power> | vnc:<C> | dmc:<path>")
    p.add_argument("--exponents", default="md_lower,md_upper,ir_lower,e_f,ml",
                   help=f"comma-separated subset of {','.join(EXPONENTS)}")
    p.add_argument("-L", "--deadline", type=int, default=2)
    p.add_argument("--start", type=float, default=None, help="first rate (default 0)")
    p.add_argument("--stop", type=float, default=None, help="last rate (default capacity)")
    p.add_argument("--count", type=int, default=256)
    p.add_argument("--units", choices=("bits", "nats"), default="bits")
    p.add_argument("--no-expurgated", action="store_true",
                   help="use E_r instead of max(E_r, E_ex) inside the deadline bounds")
    p.add_argument("--out", default=None, help="output CSV (default stdout)")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("lreq", help="minimum deadline for the IR bound to reach E_F")
    p.add_argument("channel")
    p.add_argument("--grid", type=int, default=deadline.LREQ_GRID)
    p.add_argument("--l-max", type=int, default=deadline.LREQ_MAX)
    p.add_argument("--units", choices=("bits", "nats"), default="bits")
    p.add_argument("--no-expurgated", action="store_true")
    p.set_defaults(func=cmd_lreq)

    p = sub.add_parser("simulate", help="Monte Carlo ARQ over a BSC")
    p.add_argument("--config", help="JSON file with any of the fields below")
    p.add_argument("--scheme", choices=("md", "ir", "memoryless", "incremental"))
    p.add_argument("--bsc", type=float, help="crossover probability")
    p.add_argument("--n", type=int, help="symbols per round")
    p.add_argument("--m", type=int, help="number of messages")
    p.add_argument("--t", type=float, help="threshold T in nats per symbol")
    p.add_argument("--l", type=int, help="deadline (rounds, >= 2)")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--fixed-code", dest="fixed_code", action="store_true", default=None,
                   help="draw one codebook and message per seed; only the noise varies")
    p.add_argument("--out", default=None, help="report CSV (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("vnc-check", help="check the very noisy channel identities")
    p.add_argument("--capacity", type=float, default=1.0)
    p.add_argument("--count", type=int, default=1001)
    p.set_defaults(func=cmd_vnc_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValidationError) as exc:
        print(f"arq-exponents: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - reported, not swallowed
        print(f"arq-exponents: failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
