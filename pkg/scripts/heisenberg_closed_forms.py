"""Check the four Heisenberg product formulas on seeded theta-function triples.

    python3 scripts/heisenberg_closed_forms.py [--c 1] [--mu 0.11] [--nu 0.23] [--triples 10]
"""

import argparse

import numpy as np

from felldeform.models import build_heisenberg, heis_closed_form_residuals, random_theta


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--c", type=int, default=1)
    ap.add_argument("--mu", type=float, default=0.11)
    ap.add_argument("--nu", type=float, default=0.23)
    ap.add_argument("--triples", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    m = build_heisenberg(args.c, args.mu, args.nu)
    rng = np.random.default_rng(args.seed)
    print(f"{'triple':>6}  {'f x g':>9}  {'g x f':>9}  {'g* x h':>9}  {'g x h*':>9}")
    worst = 0.0
    for i in range(args.triples):
        f, g, h = (random_theta(k, args.c, rng) for k in (0, 1, 1))
        r = heis_closed_form_residuals(m, f, g, h)
        worst = max(worst, r.worst())
        print(f"{i:6d}  {r.ab:9.2e}  {r.ba:9.2e}  {r.bstar_c:9.2e}  {r.b_cstar:9.2e}")
    print(f"worst {worst:.2e}")


if __name__ == "__main__":
    main()
