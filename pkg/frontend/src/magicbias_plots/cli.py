"""Batch figure renderer: magicbias-plots render --spec <file.json>.

The spec file describes one figure: input data file(s) produced by the
simulation CLI, the figure kind, axis scales, and the output image path.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .render import FigureSpec, RenderError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="magicbias-plots")
    sub = parser.add_subparsers(dest="command", required=True)
    p_render = sub.add_parser("render", help="render one figure from a spec file")
    p_render.add_argument("--spec", required=True)
    args = parser.parse_args(argv)

    try:
        raw = json.loads(Path(args.spec).read_text())
    except FileNotFoundError:
        print(f"missing spec file {args.spec}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as err:
        print(f"invalid spec: {err}", file=sys.stderr)
        return 2
    try:
        out = render(FigureSpec.from_dict(raw))
    except RenderError as err:
        print(f"render error: {err}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
