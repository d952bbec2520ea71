"""``entmono`` command-line interface.

Exit codes: 0 success / claims confirmed, 1 claims not confirmed,
2 numeric failure, 64 usage error, 65 bad input data.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import EntmonoError, InvalidStateError, NumericError, ShapeError
from .measures import fef_2xd, fef_two_qubit, fidelity_from_fef
from .monogamy import KINDS, all_residuals, closed_forms, gamma_sweep, HOLD_TOL
from .states import SigmaGammaParams, as_density, haar_pure, load_state, seed_sequence, sigma_gamma_pair
from .telesim import build_channel, mc_average_fidelity

EXIT_OK = 0
EXIT_CLAIMS_FAILED = 1
EXIT_NUMERIC = 2
EXIT_USAGE = 64
EXIT_DATA = 65

PAPER_GRID = (0.125, 0.15, 0.2, 0.3, 5 / 12, 0.5, 0.6, 0.75, 0.9, 0.99, 1.0)

ROW_COLUMNS = (
    "gamma",
    "alpha",
    "F_1_23",
    "F_13",
    "f_1_23",
    "f_13",
    "C_13",
    "fef_violated",
    "fid_violated",
    "strictness_proxy",
    "F_12",
    "raw_fef_violated",
    "gamma_exact",
    "F_1_23_exact",
    "F_13_exact",
    "f_13_exact",
    "C_13_exact",
    "error",
)

log = logging.getLogger("entmono")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    seed: int = 42
    restarts: int = 32
    tol: float = 1e-10
    output_format: str = "csv"
    output_path: Path | None = None

    def __post_init__(self):
        if self.seed < 0:
            raise UsageError("--seed must be non-negative")
        if self.restarts < 1:
            raise UsageError("--restarts must be positive")
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.output_format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")


# --- formatting ------------------------------------------------------------


def _full(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return "nan" if math.isnan(x) else format(x, ".17g")
    return str(x)


def _rational(fr) -> str:
    if fr is None:
        return ""
    return str(fr) if fr.denominator != 1 else str(fr.numerator)


def row_record(row) -> dict:
    exact = closed_forms(row.gamma)
    return {
        "gamma": row.gamma,
        "alpha": row.alpha,
        "F_1_23": row.F_1_23,
        "F_13": row.F_13,
        "f_1_23": row.f_1_23,
        "f_13": row.f_13,
        "C_13": row.C_13,
        "fef_violated": row.fef_violated,
        "fid_violated": row.fid_violated,
        "strictness_proxy": row.strictness_proxy,
        "F_12": row.F_12,
        "raw_fef_violated": row.raw_fef_violated,
        "gamma_exact": _rational(Fraction(row.gamma).limit_denominator(10**6)),
        "F_1_23_exact": _rational(exact.get("F_1_23")),
        "F_13_exact": _rational(exact["F_13"]),
        "f_13_exact": _rational(exact["f_13"]),
        "C_13_exact": _rational(exact["C_13"]),
        "error": row.error,
    }


def to_csv(records, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for rec in records:
        w.writerow([_full(rec[c]) for c in columns])
    return buf.getvalue()


def _json_value(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def to_json(records, columns) -> str:
    out = [{c: _json_value(rec[c]) for c in columns} for rec in records]
    return json.dumps(out, indent=2) + "\n"


def human_table(records, columns) -> str:
    def cell(x):
        if isinstance(x, bool):
            return "yes" if x else "no"
        if isinstance(x, float):
            return f"{x:.6f}"
        return str(x)

    rows = [[cell(r[c]) for c in columns] for r in records]
    widths = [max(len(c), *(len(r[i]) for r in rows)) if rows else len(c) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in rows]
    return "\n".join(lines) + "\n"


def emit(cfg: RunConfig, records, columns, human_columns=None) -> None:
    text = to_csv(records, columns) if cfg.output_format == "csv" else to_json(records, columns)
    if cfg.output_path is None:
        sys.stdout.write(text)
        return
    cfg.output_path.write_text(text)
    sys.stdout.write(human_table(records, human_columns or columns))
    sys.stdout.write(f"wrote {cfg.output_path}\n")


# --- commands --------------------------------------------------------------

HUMAN_ROW_COLUMNS = ROW_COLUMNS[:10]


def _sweep_exit(rows) -> int:
    return EXIT_NUMERIC if any(r.error for r in rows) else EXIT_OK


def cmd_reproduce_paper(cfg: RunConfig) -> int:
    rows = gamma_sweep(PAPER_GRID, restarts=cfg.restarts, seed=cfg.seed, tol=cfg.tol)
    emit(cfg, [row_record(r) for r in rows], ROW_COLUMNS, HUMAN_ROW_COLUMNS)
    if any(r.error for r in rows):
        return EXIT_NUMERIC
    confirmed = all(r.fef_violated for r in rows if 0.5 <= r.gamma < 1.0)
    confirmed &= not any(r.fef_violated for r in rows if r.gamma == 1.0)
    if not confirmed:
        log.error("violation pattern does not match the expected one")
        return EXIT_CLAIMS_FAILED
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, gamma_min: float, gamma_max: float, steps: int) -> int:
    if not (0.0 <= gamma_min <= gamma_max <= 1.0):
        raise UsageError("need 0 <= --gamma-min <= --gamma-max <= 1")
    if steps < 1:
        raise UsageError("--steps must be positive")
    grid = np.linspace(gamma_min, gamma_max, steps).tolist()
    rows = gamma_sweep(grid, restarts=cfg.restarts, seed=cfg.seed, tol=cfg.tol)
    emit(cfg, [row_record(r) for r in rows], ROW_COLUMNS, HUMAN_ROW_COLUMNS)
    return _sweep_exit(rows)


CHECK_COLUMNS = ("kind", "qubits", "trials", "min_residual", "violations")


def cmd_check(cfg: RunConfig, qubits: int, trials: int) -> int:
    if qubits not in (3, 4, 5):
        raise UsageError("--qubits must be 3, 4 or 5")
    if trials < 1:
        raise UsageError("--trials must be positive")
    mins = {k: math.inf for k in KINDS}
    bad = {k: 0 for k in KINDS}
    for s in seed_sequence(cfg.seed).spawn(trials):
        psi = haar_pure((2,) * qubits, s)
        for kind, rep in all_residuals(psi).items():
            mins[kind] = min(mins[kind], rep.residual)
            bad[kind] += not rep.holds
    records = [
        {"kind": k, "qubits": qubits, "trials": trials, "min_residual": mins[k], "violations": bad[k]}
        for k in KINDS
    ]
    if cfg.output_path is None and cfg.output_format == "csv":
        sys.stdout.write(human_table(records, CHECK_COLUMNS))
    else:
        emit(cfg, records, CHECK_COLUMNS)
    return EXIT_OK if all(mins[k] >= -HOLD_TOL for k in KINDS) else EXIT_CLAIMS_FAILED


def cmd_fef(cfg: RunConfig, state_file: Path, dims) -> int:
    try:
        state = load_state(state_file, dims)
    except OSError as exc:
        raise InvalidStateError(f"cannot read {state_file}: {exc.strerror}") from exc
    rho = as_density(state)
    if rho.dims[0] != 2 or len(rho.dims) != 2:
        raise InvalidStateError(f"--dims must describe a 2 x d split, got {rho.dims}")
    try:
        res = fef_2xd(rho, restarts=cfg.restarts, tol=cfg.tol, seed=cfg.seed)
    except NumericError as exc:
        print(f"optimizer failed: {exc}; best value {exc.best.value:.6f}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"fef          {res.value:.6f}")
    print(f"fidelity     {fidelity_from_fef(res.value):.6f}")
    print(f"restarts     {res.restarts_used}")
    print(f"iterations   {res.iterations}")
    print(f"converged    {'yes' if res.converged else 'no'}")
    if rho.dims == (2, 2):
        closed = fef_two_qubit(rho).value
        print(f"closed_form  {closed:.6f}  (|diff| {abs(closed - res.value):.2e})")
    return EXIT_OK


def cmd_telesim(cfg: RunConfig, gamma: float, samples: int) -> int:
    if not 0.0 <= gamma <= 1.0:
        raise UsageError("--gamma must lie in [0, 1]")
    if samples < 100:
        raise UsageError("--samples must be at least 100")
    ch = build_channel(sigma_gamma_pair(SigmaGammaParams(gamma), (1, 3)))
    est = mc_average_fidelity(ch, samples, cfg.seed)
    print(f"gamma        {gamma:.6f}")
    print(f"mc_mean      {est.mc_mean:.6f}")
    print(f"mc_std_err   {est.mc_std_err:.6f}")
    print(f"exact_value  {est.exact_value:.6f}")
    print(f"samples      {est.samples}")
    print(f"consistent   {'yes' if est.consistent else 'no'}")
    return EXIT_OK


# --- argument parsing ------------------------------------------------------


def _dims(text: str):
    try:
        dims = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid dims {text!r}; expected e.g. 2,4")
    if not dims or any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError(f"invalid dims {text!r}")
    return dims


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--restarts", type=int, default=32)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--format", dest="output_format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", dest="output_path", type=Path)

    p = _Parser(prog="entmono", description="Entanglement monogamy diagnostics.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("reproduce-paper", parents=[common], help="sigma_gamma counterexample table")

    sw = sub.add_parser("sweep", parents=[common], help="counterexample rows on a gamma grid")
    sw.add_argument("--gamma-min", type=float, default=0.0)
    sw.add_argument("--gamma-max", type=float, default=1.0)
    sw.add_argument("--steps", type=int, default=21)

    ck = sub.add_parser("check", parents=[common], help="monogamy on Haar-random pure states")
    ck.add_argument("--qubits", type=int, default=3)
    ck.add_argument("--trials", type=int, default=200)

    fe = sub.add_parser("fef", parents=[common], help="fully entangled fraction of a state file")
    fe.add_argument("--state", type=Path, required=True)
    fe.add_argument("--dims", type=_dims, required=True)

    te = sub.add_parser("telesim", parents=[common], help="teleport over the sigma_gamma 1-3 pair")
    te.add_argument("--gamma", type=float, required=True)
    te.add_argument("--samples", type=int, default=100_000)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = RunConfig(
            command=args.command,
            seed=args.seed,
            restarts=args.restarts,
            tol=args.tol,
            output_format=args.output_format,
            output_path=args.output_path,
        )
        if args.command == "reproduce-paper":
            return cmd_reproduce_paper(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.gamma_min, args.gamma_max, args.steps)
        if args.command == "check":
            return cmd_check(cfg, args.qubits, args.trials)
        if args.command == "fef":
            return cmd_fef(cfg, args.state, args.dims)
        if args.command == "telesim":
            return cmd_telesim(cfg, args.gamma, args.samples)
    except UsageError as exc:
        print(f"entmono: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidStateError, ShapeError) as exc:
        print(f"entmono: invalid input: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"entmono: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except EntmonoError as exc:
        print(f"entmono: {exc}", file=sys.stderr)
        return EXIT_DATA
    parser.error(f"unknown command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
