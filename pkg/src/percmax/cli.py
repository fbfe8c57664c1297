"""Command-line entry point.

    percmax <kind> --config run.toml [--seed U64] [--workers N] [--out DIR]

The subcommand must agree with the config's `kind`.  Exit codes: 0 success,
2 configuration error, 3 runtime failure.  Relative output directories are
rooted at $PERCMAX_OUT when that variable is set.
"""

from __future__ import annotations

import argparse
import sys

from .harness import KINDS, ConfigError, load_config, run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="percmax",
        description="Maximal-cluster statistics for non-critical site percolation",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        sp = sub.add_parser(kind, help=f"run a '{kind}' experiment")
        sp.add_argument("--config", required=True, help="TOML experiment config")
        sp.add_argument("--seed", type=int, default=None, help="override master_seed")
        sp.add_argument("--workers", type=int, default=1, help="worker threads")
        sp.add_argument("--out", default=None, help="output directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if cfg.kind != args.kind:
            raise ConfigError("kind", f"config says {cfg.kind!r}, subcommand is {args.kind!r}")
        if args.seed is not None:
            if not 0 <= args.seed < (1 << 64):
                raise ConfigError("--seed", "must fit in 64 bits")
            cfg.master_seed = args.seed
            cfg.raw = dict(cfg.raw, master_seed=args.seed)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        manifest = run(cfg, args.out, workers=max(1, args.workers))
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as e:
        print(f"runtime failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    for name in sorted(manifest.outputs):
        print(name)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
