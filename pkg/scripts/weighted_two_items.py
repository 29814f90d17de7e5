"""Mean-outcome existence maps on two items as the weights move apart.

For each weight split the unstable cells are counted, every stable arrangement
in a two-type cell is checked against weighted proportionality, and the
region CSVs are written side by side.
"""

import argparse
from fractions import Fraction
from pathlib import Path

from private_blotto.analysis import hypothesis_close_violations
from private_blotto.constructive import two_class_instance
from private_blotto.scan import export_region, scan_region
from private_blotto.stability import find_stable

SPLITS = ["1/2", "11/20", "3/5", "13/20", "7/10", "3/4", "4/5", "9/10"]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=11)
    ap.add_argument("--splits", nargs="+", default=SPLITS, help="weight of the heavier item")
    ap.add_argument("--out-dir", type=Path, default=Path("results/weighted"))
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    print(f"{'w1':>6} {'unstable':>9} {'violations':>11}")
    for text in args.splits:
        w1 = Fraction(text)
        weights = (w1, 1 - w1)
        region = scan_region(2, "mean", args.n_max, weights=weights)
        violations = 0
        for c in region.cells:
            if c.n_b == 0:
                continue
            inst = two_class_instance(c.n_a, c.n_b, 2, "mean", weights=weights,
                                      unlabeled_cost=region.unlabeled_cost)
            violations += len(hypothesis_close_violations(inst, find_stable(inst)))
        name = text.replace("/", "_")
        (args.out_dir / f"mean_m2_w{name}.csv").write_text(export_region(region))
        print(f"{text:>6} {len(region.unstable_cells()):>9} {violations:>11}")


if __name__ == "__main__":
    main()
