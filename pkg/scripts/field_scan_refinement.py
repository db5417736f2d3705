"""Field-scan refinement study: the Rayleigh columns' largest step should halve
each time the hbar grid is refined by two.

    python3 scripts/field_scan_refinement.py [--model sphere] [--theta 0.3]
"""

import argparse
import io

from felldeform.cli import cmd_field_scan, make_config
from felldeform.report import read_csv


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--model", default="sphere")
    ap.add_argument("--theta", default="0.3")
    ap.add_argument("--counts", type=int, nargs="+", default=[11, 21, 41])
    args = ap.parse_args()

    prev = None
    for n in args.counts:
        buf = io.StringIO()
        cfg = make_config(["field-scan", "--model", args.model, "--theta", args.theta,
                           "--hbar-count", str(n), "--trials", "1"])
        cmd_field_scan(cfg, buf)
        meta = read_csv(buf.getvalue()).metadata
        mods = [float(meta[k]) for k in sorted(meta) if k.startswith("modulus_xi_")]
        ratio = "" if prev is None else "  ratios " + ", ".join(f"{b / a:.3f}" for a, b in zip(prev, mods))
        print(f"{n:4d} points  moduli " + ", ".join(f"{v:.5f}" for v in mods) + ratio)
        prev = mods


if __name__ == "__main__":
    main()
