import argparse
import sys
from typing import Optional, Sequence

from ..config import load_config, resolve_cache_dir
from ..errors import ParseError
from ..logger import get_logger, setup_logging
from .cache import ResolutionCache
from .commands import EXIT_PARSE, Context, run
from .models import COMMANDS, FORMATS, Job

_OPTIONS = ("degree", "length", "seed", "functor", "range", "jobs", "format")


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so usage errors map to exit 1."""

    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="pic2ha",
        description="Homological algebra of symmetric 2-groups: resolutions, homology and derived functors.",
    )
    parser.add_argument("command", choices=COMMANDS, help="Operation to run.")
    parser.add_argument("inputs", nargs="*", help="Input file (matrix, pic2, complex or extension format).")
    parser.add_argument("--degree", type=int, default=None, help="Homology or derived degree.")
    parser.add_argument("--length", type=int, default=None, help="Resolution or sequence length.")
    parser.add_argument("--seed", type=int, default=None, help="Seed for redundant, shuffled covers.")
    parser.add_argument("--functor", type=str, default=None, help="Additive functor, e.g. tensor:Z/4 or hom:Z/2.")
    parser.add_argument("--range", type=str, default=None, help="Grid range a..b for the table command.")
    parser.add_argument("--jobs", type=int, default=None, help="Worker threads for the table command.")
    parser.add_argument("--format", choices=FORMATS, default="text", help="Report format.")
    parser.add_argument("--cache", type=str, default=None, help="Resolution cache directory.")
    parser.add_argument("--no-cache", action="store_true", help="Do not read or write the resolution cache.")
    parser.add_argument("--verbose", action="store_true", help="Enable verbose debug output on stderr.")
    parser.add_argument("--log-file", type=str, default=None, help="Write JSONL log records to this file.")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        job = Job(args.command, tuple(args.inputs), {k: getattr(args, k.replace("-", "_")) for k in _OPTIONS})
    except ParseError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_PARSE

    config = load_config()
    setup_logging(
        log_file=args.log_file,
        verbose=args.verbose or config.logging_config.get("verbose", False),
        log_dir=None if args.log_file else config.logging_config.get("log_dir"),
    )
    logger = get_logger("pic2ha.cli")

    cache = None
    if args.command in ("resolve", "derived") and not args.no_cache and config.cache_config.get("enabled", True):
        cache_dir = resolve_cache_dir(args.cache, config.cache_config)
        cache = ResolutionCache(cache_dir)
        logger.debug("CacheOpened", {"path": cache_dir})

    context = Context(config.engine_config, cache)
    return run(job, context=context)


if __name__ == "__main__":
    sys.exit(main())
