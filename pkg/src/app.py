from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from .cli.commands import build_parser
from .core.dtcwt import TransformError
from .core.fusion import FusionError
from .core.mopso import ArchiveEmptyError
from .io.images import ImageFormatError
from .io.pyramid_codec import ContainerError

RUNTIME_ERRORS = (
    ImageFormatError,
    ContainerError,
    TransformError,
    FusionError,
    ArchiveEmptyError,
    ValueError,
    OSError,
)


def configure_logging(args: argparse.Namespace) -> None:
    if args.quiet:
        level = logging.ERROR
    elif args.verbose >= 2:
        level = logging.DEBUG
    elif args.verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", force=True)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        configure_logging(args)
        return args.handler(args, parser)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else (0 if exc.code is None else 2)
    except RUNTIME_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
