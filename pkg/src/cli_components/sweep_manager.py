"""Usefulness sweeps over the ghz_q family, written as CSV."""

import csv
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from classify import classify_state
from config import DEFAULT_CONFIG, QfiConfig
from errors import SpecError
from statelib import ghz_q


SWEEP_HEADER = ("q", "fq_clu", "fq_lu_lower", "fq_lu_upper", "useful")
FAMILIES = ("ghz_q",)


@dataclass(frozen=True)
class SweepRow:
    q: float
    fq_clu: float
    fq_lu_lower: float
    fq_lu_upper: float
    useful: bool

    def as_csv(self) -> List[str]:
        return ["%.17g" % self.q, "%.17g" % self.fq_clu, "%.17g" % self.fq_lu_lower,
                "%.17g" % self.fq_lu_upper, "true" if self.useful else "false"]


def sweep_grid(q_start: float, q_end: float, steps: int) -> np.ndarray:
    if not 0.0 <= q_start < q_end <= 1.0:
        raise SpecError(f"Need 0 <= from < to <= 1, got from={q_start!r} to={q_end!r}")
    if isinstance(steps, bool) or not isinstance(steps, int) or steps < 2:
        raise SpecError(f"steps must be an integer >= 2, got {steps!r}")
    grid = q_start + np.arange(steps) * (q_end - q_start) / (steps - 1)
    grid[-1] = q_end
    return grid


def run_ghz_sweep(n_qubits: int, q_start: float, q_end: float, steps: int,
                  restarts: Optional[int] = None, seed: Optional[int] = None,
                  *, config: QfiConfig = DEFAULT_CONFIG) -> List[SweepRow]:
    """Classify ghz_q(N, q) on a uniform q grid."""
    rows = []
    for q in sweep_grid(q_start, q_end, steps):
        verdict = classify_state(ghz_q(n_qubits, float(q), config=config), restarts, seed, config=config)
        rows.append(SweepRow(float(q), verdict.fq_clu, verdict.fq_lu, verdict.lu_upper, verdict.useful_clu))
    flips = [r.q for prev, r in zip(rows, rows[1:]) if prev.useful != r.useful]
    logging.info("ghz_q sweep N=%d: %d points, usefulness flips near %s", n_qubits, len(rows), flips)
    return rows


def write_sweep_csv(rows: List[SweepRow], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        for row in rows:
            writer.writerow(row.as_csv())
