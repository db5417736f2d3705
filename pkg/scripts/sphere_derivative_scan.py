"""Derivative-limit scan for W x Z on the deformed 3-sphere.

Prints the residual table, the fitted log-log slope and the limit of
residual / hbar, which should approach pi^2.

    python3 scripts/sphere_derivative_scan.py [--theta 0.3] [--out scan.csv]
"""

import argparse
import math

from felldeform.calculus import default_hbar_grid, derivative_limit_scan, log_log_slope
from felldeform.models import build_sphere


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--theta", type=float, default=0.3)
    ap.add_argument("--out")
    args = ap.parse_args()

    m = build_sphere(args.theta)
    scan = derivative_limit_scan(m.generator("W"), m.generator("Z"), default_hbar_grid(), m.theta, m.calculus)
    print(f"{'hbar':>12}  {'residual':>12}  {'bound':>12}  {'res/hbar':>10}")
    for h, r, b, q in scan.rows():
        print(f"{h:12.4e}  {r:12.4e}  {b:12.4e}  {q:10.6f}")
    print(f"slope {log_log_slope(scan['hbar'], scan['residual_l1']):.4f}")
    print(f"residual/hbar at {scan['hbar'][-1]:g}: {scan['residual_over_hbar'][-1]:.8f} (pi^2 = {math.pi ** 2:.8f})")
    if args.out:
        scan.write(args.out)


if __name__ == "__main__":
    main()
