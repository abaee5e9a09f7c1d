#!/usr/bin/env python3
"""Run a figure preset and write its CSV: ``python scripts/run_preset.py fig5a out.csv``."""

import sys

from rsmimo.cli import main

if __name__ == "__main__":
    if len(sys.argv) < 3:
        print(__doc__)
        raise SystemExit(2)
    preset, out = sys.argv[1], sys.argv[2]
    raise SystemExit(main(["simulate", "--preset", preset, "--out", out, *sys.argv[3:]]))
