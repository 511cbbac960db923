"""Command-line entry point.

Exit codes: 0 all checks passed, 1 a check failed, 2 invalid configuration
or arguments, 3 runtime error (I/O, numerical failure).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import RunConfig, load_config, parse_rhs
from .errors import ConfigError, DomainError

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", metavar="PATH", default=d, help="key = value run configuration")
    parser.add_argument("--seed", type=int, default=d, help="master seed")
    parser.add_argument("--out", metavar="PATH", default=d, help="write the report here")
    parser.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS if suppress
                        else False, help="print nothing on success")


def _example_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--example", default=None,
                   help="line | log-line | schrodinger-line | quadrant:<d> | lattice:<d>")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None, help="override the constant γ")
    p.add_argument("--support-radius", type=int, default=None, dest="support_radius")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    _global_flags(common, suppress=True)
    parser = _Parser(prog="hardyrellich",
                     description="Hardy and Rellich inequalities on weighted graphs.")
    parser.add_argument("--version", action="version", version=__version__)
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gamma", parents=[common], help="print an admissible constant")
    p.add_argument("--kind", choices=("power", "log"), required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--c", type=float, help="floor of the log family (or lower bound of u with --degree)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--eps", type=float)
    g.add_argument("--degree", type=float, help="degree bound D (uses ε = D^{-1/2})")

    for name in ("hardy", "eikonal", "rellich"):
        p = sub.add_parser(name, help=f"{name} verification")
        s = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
        v = s.add_parser("verify", parents=[common])
        _example_flags(v)
        if name != "eikonal":
            v.add_argument("--samples", type=int, default=None)
        if name == "hardy":
            v.add_argument("--csv", metavar="PATH", help="export the weight table on the window")

    p = sub.add_parser("green", help="lattice Green function tables")
    s = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    c = s.add_parser("compute", parents=[common])
    c.add_argument("--dim", type=int, default=3)
    c.add_argument("--radius", type=int, default=48)
    c.add_argument("--steps", type=int, default=2048)
    c.add_argument("--tail-model", default="lclt", dest="tail_model",
                   choices=("lclt", "power", "fit", "none"))
    e = s.add_parser("export-csv", parents=[common])
    e.add_argument("--input", required=True, metavar="TABLE.bin")

    p = sub.add_parser("solve", parents=[common], help="exhaustion solve of Hu = f")
    p.add_argument("--example", default="line")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--f", default=None, help="right-hand side, e.g. delta:5 or 2*delta:3;delta:7")
    p.add_argument("--stages", type=int, default=None)
    p.add_argument("--csv", metavar="PATH", help="export the final solution")

    p = sub.add_parser("suite", help="verification suites")
    s = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    r = s.add_parser("run", parents=[common])
    r.add_argument("--suite", default=None)
    return parser


# --------------------------------------------------------------------------


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    changes = {}
    for key in ("seed", "out", "alpha", "gamma", "samples", "support_radius", "example",
                "stages", "f", "suite"):
        v = getattr(args, key, None)
        if v is not None:
            changes[key] = v
    return cfg.replace(**changes)


def _emit(text: str, cfg: RunConfig, quiet: bool, out: str | None = None) -> None:
    path = out if out is not None else cfg.out
    if path:
        Path(path).write_text(text, encoding="utf-8")
    elif not quiet:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def cmd_gamma(args) -> int:
    from .eikonal import corollary_constants, gamma_log, gamma_power

    if args.kind == "power" and args.alpha is None:
        raise ConfigError("--kind power needs --alpha")
    if args.kind == "log" and args.c is None:
        raise ConfigError("--kind log needs --c")
    if args.degree is not None:
        value = corollary_constants(args.kind, args.degree, alpha=args.alpha, c=args.c)
    elif args.kind == "power":
        value = gamma_power(args.alpha, args.eps)
    else:
        value = gamma_log(args.c, args.eps)
    print(repr(value))
    return EXIT_PASS


def _example(cfg: RunConfig):
    from .instances import make_example
    return make_example(cfg.example, cfg.alpha, cfg.support_radius)


def cmd_verify(args) -> int:
    cfg = _config(args)
    ex = _example(cfg)
    if args.command == "hardy":
        rep = ex.hardy_sweep(cfg.samples, cfg.seed)
        if getattr(args, "csv", None):
            from .hardy import HardyWeight, export_weight_csv
            w = ex.weight if isinstance(ex.weight, HardyWeight) else HardyWeight(ex.weight)
            export_weight_csv(w, ex.window, args.csv)
        body, passed = rep.to_dict(), rep.passed
    elif args.command == "rellich":
        rep = ex.rellich_sweep(cfg.samples, cfg.seed, gamma=cfg.gamma)
        body, passed = rep.to_dict(), rep.passed
    else:
        rep = ex.eikonal_report(cfg.gamma)
        body, passed = rep.to_dict(), rep.passed
    body = {"schema": 1, "version": __version__, "example": ex.name, "report": body,
            "pass": passed}
    _emit(_dump(body), cfg, getattr(args, "quiet", False))
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_green(args) -> int:
    from .green import export_green_csv, green_window, read_green_binary, write_green_binary

    out = getattr(args, "out", None)
    if args.action == "compute":
        if out is None:
            raise ConfigError("green compute needs --out TABLE.bin")
        table = green_window(args.dim, args.radius, args.steps, args.tail_model)
        write_green_binary(table, out)
        meta = _dump({"schema": 1, "version": __version__, "metadata": table.metadata()})
        Path(out + ".json").write_text(meta, encoding="utf-8")
        if not getattr(args, "quiet", False):
            sys.stdout.write(meta)
        return EXIT_PASS
    table = read_green_binary(args.input)
    if out is None:
        raise ConfigError("green export-csv needs --out TABLE.csv")
    export_green_csv(table, out)
    return EXIT_PASS


def cmd_solve(args) -> int:
    from .functions import FiniteFunction
    from .instances import make_example
    from .poisson import Exhaustion, bound_report, exhaustion_solve, export_solution_csv

    cfg = _config(args)
    ex = make_example(cfg.example, cfg.alpha)
    H = ex.operator
    f = FiniteFunction(parse_rhs(cfg.f))
    for x in f.support():
        if not ex.domain(x):
            raise ConfigError(f"right-hand side is supported outside the domain at {x!r}")
    root = min(ex.window, key=lambda x: (sum(x), x) if isinstance(x, tuple) else (x, x))
    exh = Exhaustion.balls(H.graph, root, cfg.stages, ex.domain)
    gamma = cfg.gamma if cfg.gamma is not None else ex.gamma

    def ratio(u):
        return bound_report(u, f, ex.g, ex.weight, H.measure, gamma)

    rep = exhaustion_solve(H, f, exh, domain=ex.domain, bound=ratio)
    passed = rep.monotone and max(rep.residuals) <= 1e-9 and max(rep.ratios) <= 1.0
    if getattr(args, "csv", None):
        export_solution_csv(rep.u, exh.stages[-1], args.csv)
    body = {"schema": 1, "version": __version__, "example": ex.name, "gamma": gamma,
            "f": cfg.f, "report": rep.to_dict(), "pass": passed}
    _emit(_dump(body), cfg, getattr(args, "quiet", False))
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_suite(args) -> int:
    from .suites import dump_report, run_suite

    cfg = _config(args)
    timings: dict = {}
    report = run_suite(cfg, timings)
    _emit(dump_report(report), cfg, getattr(args, "quiet", False))
    if cfg.out:
        # wall-clock lives beside the report so the report itself stays byte-identical
        Path(cfg.out + ".timings.json").write_text(_dump(timings), encoding="utf-8")
    return EXIT_PASS if report["pass"] else EXIT_FAIL


COMMANDS = {"gamma": cmd_gamma, "hardy": cmd_verify, "eikonal": cmd_verify,
            "rellich": cmd_verify, "green": cmd_green, "solve": cmd_solve, "suite": cmd_suite}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - the exit-code contract covers every failure
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
