"""Compare brute-force median existence with the closed-form predicate.

For each m, every (n_a, n_b) with m <= N <= 2m + 4 is searched; cells where no
stable arrangement exists are listed next to the strict and inclusive region
memberships.
"""

import argparse
import time

from private_blotto.constructive import in_median_critical_region, stable_exists_median, two_class_instance
from private_blotto.stability import find_stable


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--items", type=int, nargs="+", default=[2, 3, 4, 5])
    args = ap.parse_args()

    for m in args.items:
        t0 = time.perf_counter()
        empty, disagree = [], []
        for n in range(m, 2 * m + 5):
            for b in range(0, n // 2 + 1):
                a = n - b
                exists = bool(find_stable(two_class_instance(a, b, m), "first", symmetric=True))
                if not exists:
                    empty.append((a, b))
                if exists != stable_exists_median(a, b, m):
                    disagree.append((a, b))
        strict = [c for c in empty if in_median_critical_region(*c, m, "strict")]
        print(f"m={m}: empty {empty}")
        print(f"      in strict region {strict}; predicate disagreements {disagree} "
              f"({time.perf_counter() - t0:.1f}s)")


if __name__ == "__main__":
    main()
