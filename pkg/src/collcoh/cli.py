"""``collcoh`` command line: ``sweep``, ``spectrum`` and ``limits``.

Exit codes: 0 success, 2 config, 3 solver, 4 spectrum truncation, 5 I/O.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import sweep as sw
from .emission import branching_ratio_limits, enhancement_ratio
from .errors import ConfigError, SingularSystem, TruncationError
from .model import RateSet

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_TRUNCATION, EXIT_IO = 0, 2, 3, 4, 5

log = logging.getLogger("collcoh")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _float_list(text):
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="collcoh", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat key = value config file")
    common.add_argument("--gamma-uv", type=_float_list, metavar="G[,G...]",
                        help="UV decay rate(s); replaces gamma_uv_list")
    common.add_argument("--p", type=_float_list, metavar="P[,P...]",
                        help="alignment factor(s); replaces p_list")
    common.add_argument("--model", choices=sw.MODELS)
    common.add_argument("--out", metavar="PATH", help="output CSV (default: stdout)")

    s = sub.add_parser("sweep", parents=[common], help="steady-state density sweep")
    s.add_argument("--ne-min", type=float)
    s.add_argument("--ne-max", type=float)
    s.add_argument("--ne-points", type=int)
    s.add_argument("--jobs", type=int, default=1, help="worker threads for grid points")

    sp = sub.add_parser("spectrum", parents=[common], help="visible and UV spectra at one density")
    sp.add_argument("--ne", type=float, required=True)
    sp.add_argument("--omega-max", type=float, help="grid half-span (default 200 x visible width)")
    sp.add_argument("--points", type=int, default=4001)

    lim = sub.add_parser("limits", help="closed-form low/high-density and enhancement ratios")
    lim.add_argument("--gamma-vis", type=float, default=1.0)
    lim.add_argument("--gamma-uv", type=_float_list, default=(0.1, 1.0, 5.0), metavar="G[,G...]")
    return parser


def _config(args) -> sw.SweepConfig:
    overrides = {
        "gamma_uv_list": args.gamma_uv, "p_list": args.p, "model": args.model,
        "output_path": args.out,
    }
    for name in ("ne_min", "ne_max", "ne_points"):
        overrides[name] = getattr(args, name, None)
    return sw.parse_config(args.config, overrides)


def _cmd_sweep(args) -> int:
    cfg = _config(args)
    rows = sw.run_density_sweep(cfg, jobs=args.jobs)
    for row in sw.monotonicity_violations(rows):
        log.warning("R_numeric rises with n_e at n_e=%r (gamma_uv=%r, p=%r)", row.n_e, row.gamma_uv, row.p)
    sw.emit_csv(rows, cfg.output_path)
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    cfg = _config(args)
    if args.points < 3:
        raise ConfigError("--points must be >= 3")
    if not args.ne > 0:
        raise ConfigError("--ne must be > 0")
    rates = cfg.rates(args.ne, cfg.gamma_uv_list[0], cfg.p_list[0])
    table = sw.run_spectrum(rates, cfg.model, args.omega_max, args.points)
    sw.emit_spectrum_csv(table, cfg.output_path)
    return EXIT_OK


def _cmd_limits(args) -> int:
    if args.gamma_vis <= 0 or any(g <= 0 for g in args.gamma_uv):
        raise ConfigError("decay rates must be positive")
    rows = []
    for g_uv in args.gamma_uv:
        rates = RateSet.simplified(args.gamma_vis, g_uv, 0.0)
        low, high = branching_ratio_limits(rates)
        rows.append((args.gamma_vis, g_uv, low, high, enhancement_ratio(rates)))
    sw.write_rows(sys.stdout, ("gamma_vis", "gamma_uv", "R_limit_low", "R_limit_high", "R_enhanced"), rows)
    return EXIT_OK


_COMMANDS = {"sweep": _cmd_sweep, "spectrum": _cmd_spectrum, "limits": _cmd_limits}


def main(argv=None) -> int:
    logging.basicConfig(format="%(name)s: %(levelname)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        if args.verbose:
            log.setLevel(logging.INFO)
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"collcoh: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SingularSystem as exc:
        print(f"collcoh: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except TruncationError as exc:
        print(f"collcoh: spectrum truncated: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except OSError as exc:
        print(f"collcoh: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
