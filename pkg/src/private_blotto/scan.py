"""Sweeps over the (n_a, n_b) plane recording where stable arrangements exist."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .constructive import auto_unlabeled_cost, two_class_instance
from .errors import SearchTooLarge
from .model import Arrangement, Number, Outcome, as_number, number_to_json
from .stability import find_stable, find_stable_canonical

CELL_BUDGET = 10**7
SCAN_BIASES = (1, -1)


@dataclass(frozen=True)
class Cell:
    n_a: int
    n_b: int
    stable_exists: bool | None
    num_stable_canonical: int | None
    sample_witness: Arrangement | None = None

    @property
    def skipped(self) -> bool:
        return self.stable_exists is None


@dataclass(frozen=True)
class RegionMap:
    m: int
    outcome: Outcome
    weights: tuple[Number, ...] | None
    n_max: int
    unlabeled_cost: Number
    cells: tuple[Cell, ...]

    def cell(self, n_a: int, n_b: int) -> Cell:
        for c in self.cells:
            if (c.n_a, c.n_b) == (n_a, n_b):
                return c
        raise KeyError((n_a, n_b))

    def unstable_cells(self) -> list[tuple[int, int]]:
        return [(c.n_a, c.n_b) for c in self.cells if c.stable_exists is False]


def _scan_cell(args) -> Cell:
    n_a, n_b, m, outcome, weights, cost, budget = args
    inst = two_class_instance(n_a, n_b, m, outcome, unlabeled_cost=cost, weights=weights,
                              bias_a=SCAN_BIASES[0], bias_b=SCAN_BIASES[1])
    try:
        if inst.equal_weights:
            found = [arr for arr, _ in find_stable_canonical(inst, budget=budget)]
        else:
            found = find_stable(inst, budget=budget)
    except SearchTooLarge:
        return Cell(n_a, n_b, None, None)
    return Cell(n_a, n_b, bool(found), len(found), found[0] if found else None)


def scan_region(m: int, outcome: Outcome | str, n_max: int = 11, weights: Sequence[Number] | None = None,
                unlabeled_cost: Number | str = "auto", *, workers: int = 1,
                budget: int = CELL_BUDGET) -> RegionMap:
    """Existence map over ``1 <= n_a <= n_max``, ``0 <= n_b <= n_a``.

    ``unlabeled_cost="auto"`` uses 1.1x the empty-item threshold for biases (1, -1).
    With equal weights the count is over item-permutation classes; otherwise over all arrangements.
    """
    outcome = Outcome(outcome)
    ws = tuple(as_number(w) for w in weights) if weights else None
    if ws is not None and len(ws) != m:
        raise ValueError(f"expected {m} weights, got {len(ws)}")
    cost = auto_unlabeled_cost(SCAN_BIASES, ws) if unlabeled_cost == "auto" else as_number(unlabeled_cost)
    jobs = [(n_a, n_b, m, outcome, ws, cost, budget)
            for n_a in range(1, n_max + 1) for n_b in range(0, n_a + 1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_scan_cell, jobs, chunksize=4))
    else:
        cells = [_scan_cell(j) for j in jobs]
    cells.sort(key=lambda c: (c.n_a, c.n_b))
    return RegionMap(m, outcome, ws, n_max, cost, tuple(cells))


def export_region(region: RegionMap | None, fmt: str = "csv") -> str:
    """CSV ``n_a,n_b,stable_exists,num_stable_canonical`` or JSON lines with the sample witness."""
    cells = sorted(region.cells, key=lambda c: (c.n_a, c.n_b)) if region is not None else []
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n_a", "n_b", "stable_exists", "num_stable_canonical"])
        for c in cells:
            if c.skipped:
                w.writerow([c.n_a, c.n_b, "skipped", ""])
            else:
                w.writerow([c.n_a, c.n_b, int(c.stable_exists), c.num_stable_canonical])
        return buf.getvalue()
    if fmt == "jsonl":
        lines = []
        for c in cells:
            lines.append(json.dumps({
                "n_a": c.n_a,
                "n_b": c.n_b,
                "stable_exists": c.stable_exists,
                "num_stable_canonical": c.num_stable_canonical,
                "sample_witness": c.sample_witness.to_text() if c.sample_witness else None,
                "skipped": c.skipped,
            }))
        return "".join(line + "\n" for line in lines)
    raise ValueError(f"unknown export format {fmt!r}")


def region_metadata(region: RegionMap) -> dict:
    return {
        "m": region.m,
        "outcome": region.outcome.value,
        "weights": [number_to_json(w) for w in region.weights] if region.weights else None,
        "n_max": region.n_max,
        "unlabeled_cost": number_to_json(region.unlabeled_cost),
    }
