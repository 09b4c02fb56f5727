"""
Command-line front end.

Products are written as factors joined by ``*``: ``C<m>`` (cyclic of order
m), ``Z`` (integers), ``F<n>`` (free group of rank n) or ``file:<path>`` (a
finite Cayley graph in edge-list format), e.g. ``C2*C3`` or ``Z*F2``.

Exit codes: 0 success, 2 bad arguments or product spec, 3 a factor that
cannot be handled exactly (enumeration cap exceeded), 4 degenerate product
(``C2*C2``) where a bound does not apply.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

import numpy as np

from . import bounds as bd
from . import simulator as sim
from . import solver as sv
from .errors import (
    DegenerateProductError,
    EnumerationCapError,
    FreePercError,
    GraphFormatError,
    ParameterRangeError,
    SpecParseError,
)
from .factors import Cyclic, ExplicitFinite, Free, Integers, read_edge_list
from .poly import isolate_roots_01

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNSUPPORTED = 3
EXIT_DEGENERATE = 4

SEED_ENV = "FREEPERC_SEED"

DEFAULT_ROWS = "2,4,10"
DEFAULT_COLS = "2,3,4,5,10,100,inf"


# ---------------------------------------------------------------------------
# product spec parsing
# ---------------------------------------------------------------------------


def parse_product(text: str) -> sv.FreeProduct:
    """Parse ``factor ("*" factor)+`` into a :class:`~freeperc.solver.FreeProduct`."""
    pos = 0
    factors = []

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def integer():
        nonlocal pos
        start = pos
        while pos < len(text) and text[pos].isdigit():
            pos += 1
        if start == pos:
            raise SpecParseError(text, pos, ["integer"])
        return int(text[start:pos])

    while True:
        skip_ws()
        start = pos
        if text.startswith("file:", pos):
            pos += 5
            end = text.find("*", pos)
            end = len(text) if end < 0 else end
            path = text[pos:end].strip()
            if not path:
                raise SpecParseError(text, pos, ["path"])
            try:
                graph = read_edge_list(path)
            except OSError as exc:
                raise SpecParseError(text, pos, [f"readable file ({exc.strerror})"]) from None
            except (GraphFormatError, FreePercError) as exc:
                raise SpecParseError(text, pos, [f"valid edge list ({exc})"]) from None
            factors.append(ExplicitFinite(graph, name=os.path.basename(path)))
            pos = end
        elif pos < len(text) and text[pos] in "CcFf":
            kind = text[pos].upper()
            pos += 1
            val_pos = pos
            n = integer()
            if kind == "C" and n < 2:
                raise SpecParseError(text, val_pos, ["cyclic order >= 2"])
            if kind == "F" and n < 1:
                raise SpecParseError(text, val_pos, ["free rank >= 1"])
            if kind == "C":
                factors.append(Cyclic(n))
            else:
                factors.append(Integers() if n == 1 else Free(n))
        elif pos < len(text) and text[pos] in "Zz":
            pos += 1
            factors.append(Integers())
        else:
            raise SpecParseError(text, start, ["'C<m>'", "'Z'", "'F<n>'", "'file:<path>'"])
        skip_ws()
        if pos == len(text):
            break
        if text[pos] != "*":
            raise SpecParseError(text, pos, ["'*'", "end of input"])
        pos += 1
    if len(factors) < 2:
        raise SpecParseError(text, len(text), ["'*'"])
    return sv.FreeProduct(factors)


def _parse_int_list(text: str, allow_inf: bool = False) -> list:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if allow_inf and tok.lower() in ("inf", "z", "∞"):
            out.append(math.inf)
            continue
        try:
            out.append(int(tok))
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {tok!r}") from None
    return out


def _parse_grid(text: str) -> list[float]:
    """``start:stop:num`` (inclusive linspace) or a comma-separated list."""
    try:
        if ":" in text:
            a, b, n = text.split(":")
            return [float(x) for x in np.linspace(float(a), float(b), int(n))]
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None


def _fmt4(x: float) -> str:
    return str(Decimal(repr(float(x))).quantize(Decimal("0.0001"), rounding=ROUND_HALF_UP))


def _num(x):
    """JSON-safe number: infinities become the string ``"inf"``."""
    x = float(x)
    return "inf" if math.isinf(x) else x


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_pc(args, out):
    product = parse_product(args.spec)
    pc = sv.pc_numeric(product, tol=args.tol)
    result = {"spec": args.spec, "pc": float(pc), "tol": args.tol}
    if args.exact:
        poly = sv.pc_polynomial(product)
        roots = isolate_roots_01(poly, tol=args.tol)
        result["polynomial"] = str(poly)
        result["coefficients"] = poly.integer_coefficients()
        if len(roots) == 1:
            r = roots[0]
            result["bracket"] = [float(r.bracket_low), float(r.bracket_high)]
            result["bracket_exact"] = [str(r.bracket_low), str(r.bracket_high)]
        elif not roots and pc == 1 and poly(Fraction(1)) == 0:
            # C2*C2: the root sits on the boundary
            result["bracket"] = [1.0, 1.0]
            result["bracket_exact"] = ["1", "1"]
        else:
            result["bracket"] = None
            result["roots_in_unit_interval"] = len(roots)
    json.dump(result, out)
    out.write("\n")


def _table_factor(x):
    return Integers() if math.isinf(x) else Cyclic(x)


def cmd_table(args, out):
    rows = _parse_int_list(args.rows, allow_inf=True)
    cols = _parse_int_list(args.cols, allow_inf=True)
    for v in rows + cols:
        if not math.isinf(v) and v < 2:
            raise argparse.ArgumentTypeError(f"cyclic order must be >= 2, got {v}")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["m"] + ["inf" if math.isinf(c) else c for c in cols])
    for m in rows:
        cells = []
        for n in cols:
            product = sv.FreeProduct([_table_factor(m), _table_factor(n)])
            cells.append(_fmt4(sv.pc_numeric(product, tol=args.tol)))
        w.writerow(["inf" if math.isinf(m) else m] + cells)


def cmd_curve(args, out):
    product = parse_product(args.spec)
    w = csv.writer(out, lineterminator="\n")
    ps = args.p_grid
    if args.quantity == "theta":
        w.writerow(["p", "theta", "regime"])
        for p in ps:
            rep = sv.theta(product, p, tol=args.tol)
            w.writerow([p, rep.theta, rep.regime])
    elif args.quantity == "ec":
        w.writerow(["p", "expected_cluster_size"])
        for p in ps:
            w.writerow([p, _num(sv.expected_cluster_size(product, p))])
    else:
        w.writerow(["p", "t", "h"])
        for p in ps:
            for t in args.t_grid:
                w.writerow([p, t, sv.fixed_point_gap(product, p, t)])


def cmd_simulate(args, out):
    product = parse_product(args.spec)
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get(SEED_ENV, "0"))
    config = sim.SimulationConfig(args.p, args.trials, args.size_cap, args.radius_cap, seed)
    counts, _, trunc = sim.run_trials(product, config, workers=args.workers)
    theta_est = sim.summarize_theta(counts, trunc, config)
    result = {
        "spec": args.spec,
        "p": args.p,
        "trials": args.trials,
        "seed": seed,
        "size_cap": args.size_cap,
        "theta": vars(theta_est),
        "mean_cluster": None,
    }
    if args.p < sv.pc_numeric(product):
        result["mean_cluster"] = vars(sim.summarize_mean(counts, trunc, config))
    json.dump(result, out)
    out.write("\n")


def cmd_bounds(args, out):
    product = parse_product(args.spec)
    if sv.pc_numeric(product) >= 1:
        raise DegenerateProductError(f"{args.spec} has p_c = 1; the bounds do not apply")
    rep = bd.bounds_report(product)
    result = {k: (list(v) if isinstance(v, tuple) else v) for k, v in vars(rep).items()}
    result["spec"] = args.spec
    json.dump(result, out)
    out.write("\n")


def cmd_approx(args, out):
    target = parse_product(args.target)
    if not any(isinstance(f, Integers) for f in target.factors):
        raise argparse.ArgumentTypeError("target must contain a Z factor to approximate")
    family = bd.cyclic_family(target, radius=(args.family == "ball"))
    js = _parse_int_list(args.j)
    res = bd.approximation_experiment(target, family, js)
    if args.format == "json":
        json.dump({
            "target": args.target,
            "family": args.family,
            "pc_limit": res.pc_limit,
            "rows": [vars(r) for r in res.rows],
            "slope": res.slope,
            "r_squared": res.r_squared,
            "nonpositive": res.nonpositive,
        }, out)
        out.write("\n")
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["j", "pc_j", "delta_j"])
    for r in res.rows:
        w.writerow([r.j, repr(r.pc_j), repr(r.delta_j)])


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="freeperc", description="Percolation on free products of groups.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("pc", help="critical probability of a product")
    p.add_argument("spec")
    p.add_argument("--tol", type=float, default=sv.DEFAULT_TOL)
    p.add_argument("--exact", action="store_true", help="also print the integer polynomial and root bracket")
    p.set_defaults(func=cmd_pc)

    p = sub.add_parser("table", help="CSV grid of p_c(C_m * C_n)")
    p.add_argument("--rows", default=DEFAULT_ROWS)
    p.add_argument("--cols", default=DEFAULT_COLS)
    p.add_argument("--tol", type=float, default=sv.DEFAULT_TOL)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("curve", help="theta, mean cluster size or fixed-point gap on a grid")
    p.add_argument("spec")
    p.add_argument("--quantity", choices=["theta", "ec", "fixedpoint-h"], default="theta")
    p.add_argument("--p-grid", type=_parse_grid, default=_parse_grid("0:1:101"))
    p.add_argument("--t-grid", type=_parse_grid, default=_parse_grid("0:1:101"))
    p.add_argument("--tol", type=float, default=sv.DEFAULT_TOL)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("simulate", help="Monte Carlo estimates of theta and mean cluster size")
    p.add_argument("spec")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=None, help=f"base seed (default ${SEED_ENV} or 0)")
    p.add_argument("--size-cap", type=int, default=100_000)
    p.add_argument("--radius-cap", type=int, default=sim.NO_RADIUS_CAP)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bounds", help="lower bound and Cheeger upper bound on p_c")
    p.add_argument("spec")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("approx", help="p_c of finite quotient approximations of a product with Z factors")
    p.add_argument("target")
    p.add_argument("--family", choices=["C", "ball"], default="C",
                   help="C: replace Z by C_j; ball: by C_(2j+1)")
    p.add_argument("--j", default="5,10,20,40,80")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_approx)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args, out)
    except (SpecParseError, argparse.ArgumentTypeError) as exc:
        print(f"freeperc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EnumerationCapError as exc:
        print(f"freeperc: unsupported factor: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (DegenerateProductError, ParameterRangeError) as exc:
        print(f"freeperc: degenerate product: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (FreePercError, ValueError) as exc:
        print(f"freeperc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
