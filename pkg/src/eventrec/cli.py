"""
Command line interface.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 internal error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, load_config
from .errors import DataError, ModelFormatError
from .pipeline import PIPELINE_STAGES, STAGES, Pipeline, StageError, UnknownEntityError
from .toy import TOY_CONFIG

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=str(TOY_CONFIG),
                        help="pipeline config file (default: bundled toy dataset)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--workers", type=int, help="worker count; 1 keeps runs reproducible")
    common.add_argument("--force", action="store_true", help="rerun stages even if outputs are current")
    common.add_argument("--output", help="override the output directory")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = _Parser(prog="eventrec", description="Language-specific event recommendation pipeline.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in STAGES:
        sub.add_parser(name, parents=[common], help=f"run the {name} stage (and stale dependencies)")
    sub.add_parser("pipeline", parents=[common], help="run " + ", ".join(PIPELINE_STAGES))
    rec = sub.add_parser("recommend", parents=[common], help="rank events for a query entity")
    rec.add_argument("--query", required=True)
    rec.add_argument("--lang", required=True)
    rec.add_argument("--top", type=int, default=10)
    rec.add_argument("--format", choices=("tsv", "json"), default="tsv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = load_config(args.config).with_overrides(args.seed, args.workers, args.output)
        if args.workers is not None and args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        pipe = Pipeline(cfg, force=args.force)
        if args.command == "pipeline":
            pipe.run_all()
        elif args.command == "recommend":
            if args.top < 1:
                raise ConfigError("--top must be >= 1")
            result = pipe.recommend(args.query, args.lang, args.top)
            sys.stdout.write(result.to_json() if args.format == "json" else result.to_tsv())
        else:
            pipe.run(args.command)
        if args.command != "recommend":
            print(f"ran: {' '.join(pipe.ran) or '-'}; skipped: {' '.join(pipe.skipped) or '-'}", file=sys.stderr)
    except ConfigError as exc:
        print(f"eventrec: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StageError, DataError, ModelFormatError, UnknownEntityError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"eventrec: error: {msg}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - last resort
        logging.getLogger(__name__).exception("internal error")
        print(f"eventrec: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
