"""Batch figure rendering: ``wrfrft-figures render --spec <file>``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .readers import InputError
from .render import parse_spec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="wrfrft-figures")
    sub = parser.add_subparsers(dest="verb", required=True)
    sp = sub.add_parser("render", help="render one figure from a spec file")
    sp.add_argument("--spec", required=True, help="path to a figure spec (TOML)")
    args = parser.parse_args(argv)
    spec_path = Path(args.spec)
    try:
        if not spec_path.exists():
            raise InputError(f"spec file not found: {spec_path}")
        spec = parse_spec(spec_path.read_text())
        out = render(spec)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"render: wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
