"""Regenerate the CSV data of every figure preset.

Usage: python3 scripts/make_figures.py [OUT_DIR] [--mode analytic|oracle|both]
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from nmqcrypt.cli import run_figure
from nmqcrypt.presets import preset_names


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("out", nargs="?", default="figures", type=Path)
    parser.add_argument("--mode", choices=("analytic", "oracle", "both"))
    parser.add_argument("--only", nargs="*", help="subset of preset names")
    args = parser.parse_args()

    for name in args.only or preset_names():
        start = time.perf_counter()
        paths = run_figure(name, args.out / name, args.mode)
        print(f"{name}: {len(paths)} file(s) in {time.perf_counter() - start:.2f}s")


if __name__ == "__main__":
    main()
