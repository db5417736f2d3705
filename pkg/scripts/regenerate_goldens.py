"""Rewrite the CSV goldens in tests/golden from tests/golden/cases.txt.

Run after an intentional change to scan output:

    python3 scripts/regenerate_goldens.py
"""

import shlex
import sys
from pathlib import Path

from felldeform.cli import main

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"


def load_cases(path=GOLDEN / "cases.txt"):
    cases = []
    for line in path.read_text().splitlines():
        if line.strip() and not line.startswith("#"):
            name, _, args = line.partition(":")
            cases.append((name.strip(), shlex.split(args)))
    return cases


if __name__ == "__main__":
    for name, args in load_cases():
        rc = main([*args, "--out", str(GOLDEN / name)])
        print(f"{name}: exit {rc}")
        if rc:
            sys.exit(rc)
