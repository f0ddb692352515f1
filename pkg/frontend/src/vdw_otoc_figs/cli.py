"""Command-line entry point.

    vdw-otoc-figs --artifacts <dir> --figure <id> --out <path> [--state n ...]

Renders one figure from a completed artifact directory. Physics is
never recomputed; a missing input file is reported by name and exits
nonzero.
"""

from __future__ import annotations

import argparse
import sys

from .artifacts import MissingArtifactError
from .figures import FIGURE_IDS, FigureSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="vdw-otoc-figs",
        description="Render figures from a vdw-otoc artifact directory",
    )
    parser.add_argument("--artifacts", required=True, help="artifact directory")
    parser.add_argument("--figure", required=True, choices=FIGURE_IDS)
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--state", type=int, action="append",
                        help="restrict to these states (repeatable)")
    args = parser.parse_args(sys.argv[1:] if argv is None else list(argv))

    spec = FigureSpec(
        artifact_dir=args.artifacts,
        figure_id=args.figure,
        out_path=args.out,
        states=tuple(args.state) if args.state else None,
    )
    try:
        render(spec)
    except MissingArtifactError as exc:
        print(f"vdw-otoc-figs: missing artifact file: {exc.filename}", file=sys.stderr)
        return 1
    except (KeyError, ValueError) as exc:
        print(f"vdw-otoc-figs: {exc}", file=sys.stderr)
        return 1
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
