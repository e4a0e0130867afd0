"""Compare the exact lower tail of the unsatisfied-edge count with exp(-0.18 p D n).

For |E_unsat| = frac * Dn the count of violated edges surviving subsampling is
Binomial(|E_unsat|, p). The script prints the exact Pr[X < 0.2 p D n] next to
the exponential bound and flags the rows where the bound is exceeded, which
happens for frac close to 1/2.

    python3 scripts/chernoff_gap.py --dn 1000 --p 0.05
"""

import argparse

import numpy as np

from lcsparse.harness import binom_cdf_lt, chernoff_bound


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dn", type=int, nargs="+", default=[200, 1000, 5000])
    parser.add_argument("--p", type=float, nargs="+", default=[0.02, 0.05, 0.1])
    parser.add_argument("--fracs", type=float, nargs="+", default=list(np.arange(0.5, 0.81, 0.05)))
    args = parser.parse_args()

    print(f"{'Dn':>6} {'p':>6} {'frac':>5} {'exact tail':>12} {'bound':>12}  bound holds")
    for dn in args.dn:
        for p in args.p:
            bound = chernoff_bound(p, dn)
            for frac in args.fracs:
                # smallest count strictly above frac * Dn, so val(psi) < 1 - frac
                k = int(np.floor(frac * dn + 1e-9)) + 1
                tail = binom_cdf_lt(k, p, 0.2 * p * dn)
                print(f"{dn:6d} {p:6.3f} {frac:5.2f} {tail:12.4e} {bound:12.4e}  {tail <= bound}")


if __name__ == "__main__":
    main()
