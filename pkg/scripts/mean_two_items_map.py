"""Existence map for mean outcome on two equally weighted items.

Writes the region CSV and draws it as text: '#' where no stable arrangement
exists, '.' where one does. Rows are n_b, columns n_a.
"""

import argparse
from pathlib import Path

from private_blotto.scan import export_region, scan_region


def render(region) -> str:
    lines = []
    for n_b in range(region.n_max, -1, -1):
        row = []
        for n_a in range(1, region.n_max + 1):
            if n_a < n_b:
                row.append(" ")
                continue
            c = region.cell(n_a, n_b)
            row.append("?" if c.skipped else ("." if c.stable_exists else "#"))
        lines.append(f"{n_b:>3} " + " ".join(row))
    lines.append("    " + " ".join(str(a % 10) for a in range(1, region.n_max + 1)))
    return "\n".join(lines)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=11)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/mean_m2.csv"))
    args = ap.parse_args()

    region = scan_region(2, "mean", args.n_max, workers=args.workers)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(export_region(region))
    print(render(region))
    print(f"\nunstable cells: {region.unstable_cells()}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
