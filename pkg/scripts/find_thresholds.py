"""Find the least n beyond which the k=3 and k=4 closed forms match the naive oracle.

Usage: python3 scripts/find_thresholds.py [--max-n 500]
"""

import argparse

from unitysums.closed_forms import closed_form
from unitysums.search import exact_min_naive


def disagreements(k: int, lo: int, hi: int) -> list[int]:
    bad = []
    for n in range(lo, hi + 1):
        oracle = exact_min_naive(k, n).value.value
        formula = closed_form(k, n).value.value
        if abs(oracle - formula) > 1e-12 * max(1, oracle):
            bad.append(n)
    return bad


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=500)
    ap.add_argument("--max-n4", type=int, default=300)
    args = ap.parse_args()
    for k, lo, hi in ((2, 1, args.max_n), (3, 1, args.max_n), (4, 2, args.max_n4)):
        bad = disagreements(k, lo, hi)
        threshold = max(bad) + 1 if bad else lo
        print(f"k={k}: disagreements at {bad}; formula holds for n >= {threshold} (checked to {hi})")


if __name__ == "__main__":
    main()
