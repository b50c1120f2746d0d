"""CLI: udw-render --recipe <id> --in <csv> --out <png> [--style ...]"""

from __future__ import annotations

import argparse
import sys

from .render import RenderError, RenderJob, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="udw-render", description="Render udw-harvest CSV output to PNG"
    )
    parser.add_argument("--recipe", required=True)
    parser.add_argument("--in", dest="input_csv", required=True)
    parser.add_argument("--out", dest="output_png", required=True)
    parser.add_argument("--style", choices=["heatmap", "lines"])
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    job = RenderJob(
        recipe=args.recipe,
        input_csv=args.input_csv,
        output_png=args.output_png,
        style=args.style,
    )
    try:
        render(job)
    except RenderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
