"""gemplots command line: render figures from analysis CSV directories."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .render import PlotInputError, render_comparison, render_experiment


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gemplots", description="Render behaviour-space analysis figures."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render figures from analysis CSVs")
    p.add_argument("--in", dest="input", required=True,
                   help="analysis directory (one experiment, a root of experiments, "
                        "or a comparison directory with --compare)")
    p.add_argument("--out", required=True)
    p.add_argument("--compare", nargs=2, metavar=("A", "B"),
                   help="render the comparison set for experiments A vs B")
    p.add_argument("--animate", action="store_true",
                   help="also render search-progress animations")
    return parser


def _comparison_dir(root: Path, a: str, b: str) -> Path:
    if list(root.glob("compare_coverage_*.csv")):
        return root
    candidate = root / f"{a} vs {b}"
    if candidate.is_dir():
        return candidate
    matches = [d for d in root.rglob(f"{a} vs {b}") if d.is_dir()]
    if len(matches) == 1:
        return matches[0]
    raise PlotInputError(f"cannot locate comparison directory '{a} vs {b}' under {root}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.compare:
            in_dir = _comparison_dir(Path(args.input), *args.compare)
            written = render_comparison(in_dir, args.out)
        else:
            written = render_experiment(args.input, args.out, animate=args.animate)
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"{args.out}: {len(written)} figures")
    return 0


if __name__ == "__main__":
    sys.exit(main())
