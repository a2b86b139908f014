"""Command-line front end: ``ougap {table,figure,solve1d,solve2d,verify}``.

Exit codes: 0 success / all checks pass, 1 a verification failed, 2 usage or
configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import List, Optional

from . import domain2d, model1d, verify
from .domainfile import DomainFileError, load_domain
from .errors import NumericalError, OugapError


EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_TABLE_D = tuple(float(d) for d in range(1, 11))


class UsageError(OugapError, ValueError):
    pass


def _err(message: str) -> None:
    print(f"ougap: {message}", file=sys.stderr)


@dataclass
class RunConfig:
    command: str
    diameters: List[float] = field(default_factory=list)
    order: Optional[int] = None
    grid_step: float = 1 / 64
    range_: Optional[tuple] = None
    gauge: str = "schrodinger"
    domain: Optional[str] = None
    out: Optional[str] = None
    format: str = "csv"
    seed: int = 42
    suites: List[str] = field(default_factory=list)
    method: str = "auto"
    suite_grid_step: Optional[float] = None

    def validate(self):
        if self.order is not None and self.order < 32:
            raise UsageError(f"--order must be >= 32, got {self.order}")
        if not self.grid_step > 0:
            raise UsageError(f"--grid-step must be positive, got {self.grid_step}")
        if self.range_ is not None:
            a, b, s = self.range_
            if not s > 0:
                raise UsageError("--range step must be positive")
            if not 0 < a < b and self.command == "figure":
                raise UsageError("--range needs 0 < a < b")
        if self.command == "solve1d" and len(self.diameters) != 1:
            raise UsageError("solve1d needs exactly one --diameter")
        if self.command == "solve2d" and not self.domain:
            raise UsageError("solve2d needs --domain <file>")
        return self


def parse_range(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected a:b:s, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric range {text!r}") from None


def _fmt_D(D: float) -> str:
    return str(float(D))


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def to_json(obj) -> str:
    return json.dumps(_finite(obj), indent=2, allow_nan=False) + "\n"


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def table_rows(D_values, N=None):
    rows = []
    for D in D_values:
        l1, l2 = model1d.solve_scaled(D, N)
        rows.append((float(D), l1, l2, (l2 - l1) / model1d.THREE_PI_SQ))
    return rows


def cmd_table(cfg: RunConfig) -> str:
    if cfg.range_ is not None:
        D_values = verify.sweep(*cfg.range_)
    else:
        D_values = cfg.diameters or DEFAULT_TABLE_D
    rows = table_rows(D_values, cfg.order)
    header = ["D", "lambda1_scaled", "lambda2_scaled", "gap_normalized"]
    if cfg.format == "json":
        return to_json([dict(zip(header, r)) for r in rows])
    return to_csv(header, [[_fmt_D(r[0])] + [f"{v:.6f}" for v in r[1:]] for r in rows])


def cmd_figure(cfg: RunConfig) -> str:
    D_values = verify.sweep(*(cfg.range_ or (0.1, 10.0, 0.1)))
    rows = [(float(D), model1d.normalized_gap(D, cfg.order).normalized) for D in D_values]
    header = ["D", "gap_normalized"]
    if cfg.format == "json":
        return to_json([dict(zip(header, r)) for r in rows])
    return to_csv(header, [[_fmt_D(D), f"{g:.6f}"] for D, g in rows])


def solve1d_record(D: float, gauge: str, N=None) -> dict:
    spec = model1d.solve_model(D, gauge, N)
    return {
        "diameter": spec.D,
        "gauge": spec.gauge.value,
        "order": spec.order,
        "lambda1": spec.lambda1,
        "lambda2": spec.lambda2,
        "gap": spec.gap,
        "gap_normalized": spec.gap * spec.D**2 / model1d.THREE_PI_SQ,
    }


def _flat_record(rec: dict) -> str:
    scalars = {k: v for k, v in rec.items() if not isinstance(v, (list, dict))}
    return to_csv(list(scalars), [list(scalars.values())])


def cmd_solve1d(cfg: RunConfig) -> str:
    rec = solve1d_record(cfg.diameters[0], cfg.gauge, cfg.order)
    return to_json(rec) if cfg.format == "json" else _flat_record(rec)


def cmd_solve2d(cfg: RunConfig) -> str:
    domain = load_domain(cfg.domain)
    rep = domain2d.check_gap_bound(domain, cfg.grid_step, cfg.order, cfg.method)
    rec = rep.to_dict()
    return to_json(rec) if cfg.format == "json" else _flat_record(rec)


def cmd_verify(cfg: RunConfig):
    names = cfg.suites or ["all"]
    try:
        outcomes = verify.run_suites(names, seed=cfg.seed, h=cfg.suite_grid_step)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    failed = [o.claim_id for o in outcomes if not o.passed]
    for claim in dict.fromkeys(failed):
        _err(f"verification failed: {claim}")
    return to_json([o.to_dict() for o in outcomes]), (EXIT_FAIL if failed else EXIT_OK)


def _common(p, diameter=False):
    p.add_argument("--help", action="help", help="show this help message and exit")
    p.add_argument("--order", "-N", type=int, default=None,
                   help="Chebyshev order (default: double from 64 until converged)")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    if diameter:
        p.add_argument("--diameter", "-D", type=float, action="append", default=[],
                       help="diameter; repeat for several values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ougap",
        description="Dirichlet spectra and fundamental gaps of the Ornstein-Uhlenbeck operator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", add_help=False, help="scaled eigenvalues and normalized gaps")
    _common(p, diameter=True)
    p.add_argument("--range", dest="range_", type=parse_range, default=None, metavar="a:b:s")

    p = sub.add_parser("figure", add_help=False, help="normalized-gap sweep as CSV")
    _common(p)
    p.add_argument("--range", dest="range_", type=parse_range, default=None, metavar="a:b:s")

    p = sub.add_parser("solve1d", add_help=False, help="one 1-D model problem")
    _common(p, diameter=True)
    p.add_argument("--gauge", choices=("ou", "schrodinger"), default="schrodinger")

    p = sub.add_parser("solve2d", add_help=False, help="gap-bound report for a domain file")
    _common(p)
    p.add_argument("--domain", required=True, help="domain description file")
    p.add_argument("--grid-step", "-h", dest="grid_step", type=float, default=1 / 64)
    p.add_argument("--method", choices=("auto", "fd", "separable"), default="auto")

    p = sub.add_parser("verify", add_help=False, help="run verification suites")
    p.add_argument("--help", action="help", help="show this help message and exit")
    p.add_argument("names", nargs="*", help="suite names or 'all'")
    p.add_argument("--suite", default=None, help="comma-separated suite names")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--grid-step", "-h", dest="grid_step", type=float, default=None,
                   help="grid step for the 2-D gap-bound suite (default 1/128)")
    p.add_argument("--out", default=None)
    return parser


def make_config(args) -> RunConfig:
    ns = vars(args)
    default_fmt = "json" if args.command in ("solve1d", "solve2d", "verify") else "csv"
    suites = list(ns.get("names") or [])
    if ns.get("suite"):
        suites += [s.strip() for s in ns["suite"].split(",") if s.strip()]
    cfg = RunConfig(
        command=args.command,
        diameters=ns.get("diameter") or [],
        order=ns.get("order"),
        grid_step=ns.get("grid_step") or 1 / 64,
        range_=ns.get("range_"),
        gauge=ns.get("gauge", "schrodinger"),
        domain=ns.get("domain"),
        out=ns.get("out"),
        format=ns.get("format") or default_fmt,
        seed=ns.get("seed", 42),
        suites=suites,
        method=ns.get("method", "auto"),
        suite_grid_step=ns.get("grid_step") if args.command == "verify" else None,
    )
    return cfg.validate()


COMMANDS = {"table": cmd_table, "figure": cmd_figure, "solve1d": cmd_solve1d,
            "solve2d": cmd_solve2d}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
        if cfg.command == "verify":
            text, code = cmd_verify(cfg)
        else:
            text, code = COMMANDS[cfg.command](cfg), EXIT_OK
    except (UsageError, DomainFileError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    except OSError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except NumericalError as exc:
        _err(f"numerical failure: {exc}")
        return EXIT_NUMERIC
    except OugapError as exc:
        _err(str(exc))
        return EXIT_USAGE
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
