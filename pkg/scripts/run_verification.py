"""Cross-check every closed form against the Kraus oracle and save the report.

Usage: python3 scripts/run_verification.py [--density N] [--out report.txt]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from nmqcrypt.sweep import verify_all


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("--density", type=int, default=100)
    parser.add_argument("--out", type=Path)
    args = parser.parse_args()

    report = verify_all(args.density)
    text = report.render()
    if args.out:
        args.out.write_text(text + "\n", encoding="utf-8")
        print(text.splitlines()[-2])
    else:
        print(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
