"""Command-line front end for the sweep engine.

Three subcommands::

    oam-mzi run <config.yaml>      evaluate a sweep and write its tables
    oam-mzi validate <config.yaml> parse and report without computing
    oam-mzi figures <id>           run a canned figure configuration

Exit codes: 0 success, 1 configuration error, 2 numeric failure at runtime,
3 I/O failure.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, IoError, SimulationError
from .figures import figure_config, list_figures
from .sweeps import emit, parse_config, run_sweep

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_IO = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oam-mzi",
        description="Parameter sweeps over a lossy OAM-geared interferometer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--jobs",
            type=int,
            default=None,
            metavar="N",
            help="worker threads (default: available parallelism)",
        )
        p.add_argument(
            "--allow-heavy",
            action="store_true",
            help="permit lossy sweeps beyond the desk-scale envelope",
        )
        p.add_argument(
            "--output",
            default=None,
            metavar="PATH",
            help="result path (overrides the config's output.path)",
        )
        p.add_argument(
            "--format",
            choices=("csv", "json"),
            default=None,
            help="result format (overrides the config's output.format)",
        )

    run = sub.add_parser("run", help="evaluate a sweep configuration")
    run.add_argument("config", help="path of the YAML sweep configuration")
    add_run_flags(run)

    val = sub.add_parser("validate", help="check a configuration without running")
    val.add_argument("config", help="path of the YAML sweep configuration")

    figs = sub.add_parser("figures", help="run a canned figure configuration")
    figs.add_argument(
        "id",
        nargs="?",
        help="figure identifier, e.g. fig2 .. fig17 or figA1",
    )
    figs.add_argument("--list", action="store_true", help="list the known identifiers")
    figs.add_argument(
        "--show-config",
        action="store_true",
        help="print the canned configuration instead of running it",
    )
    add_run_flags(figs)
    return parser


def _progress(done: int, total: int) -> None:
    print(f"  [{done}/{total}] grid units complete", file=sys.stderr, flush=True)


def _execute(text: str, args: argparse.Namespace, default_stem: str | None) -> int:
    spec = parse_config(text)
    fmt = args.format or spec.output_format
    path = args.output or spec.output_path
    if path is None:
        if default_stem is None:
            raise ConfigError("output/path: required (or pass --output)")
        path = f"{default_stem}.{fmt}"
    table = run_sweep(
        spec,
        jobs=args.jobs,
        allow_heavy=args.allow_heavy,
        progress=_progress if sys.stderr.isatty() else None,
    )
    written = emit(table, path, fmt)
    for p in written:
        print(p)
    return EXIT_OK


def _read_config(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _execute(_read_config(args.config), args, default_stem=None)
        if args.command == "validate":
            spec = parse_config(_read_config(args.config))
            print(
                f"valid: experiment={spec.experiment.value} "
                f"states={len(spec.states)} hash={spec.config_hash[:12]}"
            )
            return EXIT_OK
        if args.command == "figures":
            if args.list:
                for fig_id in list_figures():
                    print(fig_id)
                return EXIT_OK
            if args.id is None:
                raise ConfigError("figure: an identifier is required (or --list)")
            text = figure_config(args.id)
            if args.show_config:
                print(text, end="")
                return EXIT_OK
            return _execute(text, args, default_stem=args.id)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IoError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SimulationError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
