"""Command line entry point.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import io
import sys

from . import harness, theory
from .baselines import METHODS
from .distributions import CASES, Normal, Pareto, UniformUnion


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _methods(text: str) -> tuple[str, ...]:
    return tuple(m.strip() for m in text.split(",") if m.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="voronoi-bayes", description="Voronoi-area density classification experiments")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run-case", help="run a simulation case and write tallies as CSV")
    run.add_argument("case", nargs="?", help=f"one of {', '.join(CASES)}")
    run.add_argument("--config", help="key = value config file; command line flags override it")
    run.add_argument("--n-train", type=int)
    run.add_argument("--n-test", type=int)
    run.add_argument("--n-uniforms", type=int)
    run.add_argument("--methods", type=_methods, help=f"comma list from {', '.join(METHODS)}")
    run.add_argument("--seeds", help="e.g. 1..20 or 1,2,3 (default 0)")
    run.add_argument("--r", type=float, help="boundary threshold (default max(0.02, 5/n))")
    run.add_argument("--out", help="output path (default stdout)")

    ver = sub.add_parser("verify-theory", help="Monte Carlo check of spacing moments")
    ver.add_argument("--n", type=int, default=100)
    ver.add_argument("--m", type=int, default=2)
    ver.add_argument("--q", type=float, default=0.5)
    ver.add_argument("--dist", default="uniform", choices=("uniform", "normal", "pareto", "uniform-union"))
    ver.add_argument("--replications", type=int, default=100_000)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--out")

    plot = sub.add_parser("plot-data", help="density curves of a 1D case as CSV")
    plot.add_argument("case")
    plot.add_argument("--seed", type=int, default=0)
    plot.add_argument("--grid", type=int, default=1000, help="grid points (at least 500)")
    plot.add_argument("--n-train", type=int, default=200)
    plot.add_argument("--n-uniforms", type=int, default=2500)
    plot.add_argument("--methods", type=_methods, default=("NN1", "NN10", "NN25"))
    plot.add_argument("--r", type=float)
    plot.add_argument("--out")

    sub.add_parser("list-cases", help="print the available case presets")
    return parser


def _run_case(args) -> str:
    values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                values = harness.parse_config_text(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    if args.case:
        values["case"] = args.case
    if "case" not in values:
        raise ConfigError("run-case needs a case name or a config file with 'case ='")
    try:
        config = harness.config_from_mapping(
            values,
            n_train=args.n_train,
            n_test=args.n_test,
            n_uniforms=args.n_uniforms,
            methods=args.methods,
            r=args.r,
            seeds=harness.parse_seeds(args.seeds) if args.seeds else None,
        )
    except (ValueError, KeyError) as exc:
        raise ConfigError(exc.args[0] if exc.args else str(exc)) from None
    result = harness.run_experiment(config)
    for method, msg in sorted(result.errors.items()):
        print(f"warning: {method} skipped: {msg}", file=sys.stderr)
    if not result.summaries:
        raise RuntimeError("no method could be run")
    return harness.results_csv(result)


def _verify_theory(args) -> str:
    if not (1 <= args.m < args.n and 0 < args.q < 1 and args.replications >= 2):
        raise ConfigError("need 1 <= m < n, 0 < q < 1 and at least 2 replications")
    if args.dist == "uniform":
        r = theory.quantile_index(args.q, args.n, args.m)
        report = theory.verify_uniform_spacing(args.n, r, args.m, args.replications, args.seed)
    else:
        dist = {"normal": Normal(0, 1), "pareto": Pareto(1, 3), "uniform-union": UniformUnion(((0, 1), (6, 7)))}[args.dist]
        report = theory.verify_density_spacing(dist, args.q, args.n, args.m, args.replications, args.seed)
    buf = io.StringIO()
    theory.write_reports([report], buf)
    return buf.getvalue()


def _plot_data(args) -> str:
    try:
        config = harness.ExperimentConfig(args.case, n_train=args.n_train, methods=args.methods, r=args.r)
        if config.preset.dim != 1:
            raise ValueError("plot export is 1D-only")
    except (ValueError, KeyError) as exc:
        raise ConfigError(exc.args[0] if exc.args else str(exc)) from None
    return harness.density_plot_csv(config, args.seed, args.grid, args.n_uniforms)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "list-cases":
            text = "".join(f"{p.name}\t{p.description}\n" for p in CASES.values())
            out = None
        else:
            handler = {"run-case": _run_case, "verify-theory": _verify_theory, "plot-data": _plot_data}
            text = handler[args.command](args)
            out = args.out
        _emit(text, out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
