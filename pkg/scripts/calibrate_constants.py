"""Calibration runs behind the frozen empirical constants in unitysums.constructions.

Prints LEMMA_C0, THM1_C and the two series remainder constants.  The
calibration grids are deliberately different from those used by the tests.
"""

import argparse
import itertools
from fractions import Fraction

from unitysums.constructions import (fib_approx_pair, thm1_bound, z3r_exact, z3r_series,
                                     z5_exact, z5_series3)


def lemma_c0():
    return max(float(abs(p.a) * p.quality)
               for j in range(9) for r in range(5) for p in [fib_approx_pair(j, r)])


def thm1_c(lo, hi, step):
    return max(float(thm1_bound(n).value.value) * n ** (4 / 3) for n in range(lo, hi + 1, step))


def series_k(exact, series, grid):
    worst = 0.0
    for a, b in itertools.product(grid, grid):
        h = max(abs(a), abs(b))
        worst = max(worst, abs(float(exact(Fraction(a), Fraction(b), 40)) - series(a, b)) / h ** 4)
    return worst


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--thm1-range", type=int, nargs=3, default=(500, 3000, 1))
    args = ap.parse_args()
    print(f"LEMMA_C0 = {lemma_c0():.6f}")
    print(f"THM1_C = {thm1_c(*args.thm1_range):.6f}")
    grid = [s * x for s in (1, -1) for x in (0.01, 0.007, 0.003, 0.001, 3e-4)]
    print(f"SERIES_K5 = {series_k(z5_exact, z5_series3, grid):.6f}")
    print(f"SERIES_K3R = {series_k(z3r_exact, z3r_series, grid):.6f}")


if __name__ == "__main__":
    main()
