"""Brute-force cross-checks of the library against independent computations."""

import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from config import DEFAULT_CONFIG, QfiConfig
from covariance import LocalCovariance, gamma_r, lu_optimize
from errors import DimensionCapError, SpecError
from qstate import PureState, partial_trace, purity
from statelib import STABILIZER_SUM_MAX_QUBITS, graph_state, stabilizer_projector, stabilizer_reduced_state
from cli_components.spec_parser import StateSpec, build_state, graph_of


GRID_MAX_QUBITS = 3
GRID_BUDGET = 120_000_000
GRID_CHUNK = 4_000_000
POLISH_POINTS = 24
TOLERANCES = {"grid_lu": 1e-4, "dense_reduction": 1e-10, "stabilizer_sum": 1e-10}


@dataclass(frozen=True)
class OracleResult:
    check: str
    oracle_value: float
    library_value: float
    gap: float
    tolerance: float
    details: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.gap <= self.tolerance)

    def lines(self) -> List[str]:
        out = [
            f"check: {self.check}",
            f"oracle_value: {self.oracle_value:.17g}",
            f"library_value: {self.library_value:.17g}",
            f"gap: {self.gap:.17g}",
            f"tolerance: {self.tolerance:.17g}",
        ]
        if self.details:
            out.append(f"details: {self.details}")
        out.append(f"result: {'pass' if self.passed else 'fail'}")
        return out


def fibonacci_sphere(n_points: int) -> np.ndarray:
    """Nearly uniform unit vectors on a golden-angle spiral."""
    index = np.arange(n_points) + 0.5
    z = 1.0 - 2.0 * index / n_points
    radius = np.sqrt(np.clip(1.0 - z ** 2, 0.0, None))
    azimuth = math.pi * (3.0 - math.sqrt(5.0)) * index
    return np.column_stack([radius * np.cos(azimuth), radius * np.sin(azimuth), z])


def grid_size(resolution_deg: float, n_qubits: int) -> int:
    """Points per qubit for the requested spacing, coarsened so the product grid fits GRID_BUDGET."""
    if not resolution_deg > 0.0 or not np.isfinite(resolution_deg):
        raise SpecError(f"resolution must be a positive number of degrees, got {resolution_deg!r}")
    points = math.ceil(4.0 * math.pi / math.radians(resolution_deg) ** 2)
    ceiling = int(math.floor(GRID_BUDGET ** (1.0 / n_qubits) + 1e-9))
    return max(2, min(points, ceiling))


def _grid_values(cov: LocalCovariance, points: np.ndarray, first: Optional[np.ndarray] = None) -> np.ndarray:
    """m^T gamma_R m for every combination of grid points, one axis per qubit.

    `first` replaces the points on the qubit-1 axis so the grid can be walked in slices.
    """
    n = cov.n_qubits
    axes = [points if first is None else first] + [points] * (n - 1)
    sizes = [len(a) for a in axes]
    blocks = cov.blocks()
    total = np.zeros(sizes)
    for k in range(n):
        shape = [1] * n
        shape[k] = sizes[k]
        total = total + np.einsum("gi,ij,gj->g", axes[k], blocks[k, k], axes[k]).reshape(shape)
        for l in range(k + 1, n):
            pair = [1] * n
            pair[k] = sizes[k]
            pair[l] = sizes[l]
            total = total + 2.0 * (axes[k] @ blocks[k, l] @ axes[l].T).reshape(pair)
    return total


def _grid_top(cov: LocalCovariance, points: np.ndarray, top: int) -> Tuple[np.ndarray, np.ndarray]:
    """Best `top` grid values and their per-qubit point indices, in slices of about GRID_CHUNK."""
    n = cov.n_qubits
    g = len(points)
    rows = max(1, GRID_CHUNK // g ** (n - 1))
    kept_values = np.empty(0)
    kept_combos = np.empty((0, n), dtype=int)
    for start in range(0, g, rows):
        values = _grid_values(cov, points, points[start:start + rows])
        flat = values.reshape(-1)
        count = min(top, flat.size)
        picks = np.argpartition(flat, -count)[-count:]
        combos = np.column_stack(np.unravel_index(picks, values.shape))
        combos[:, 0] += start
        kept_values = np.concatenate([kept_values, flat[picks]])
        kept_combos = np.concatenate([kept_combos, combos])
        if kept_values.size > top:
            order = np.argsort(kept_values)[-top:]
            kept_values, kept_combos = kept_values[order], kept_combos[order]
    return kept_values, kept_combos


def _from_angles(angles: np.ndarray) -> np.ndarray:
    theta, phi = angles[0::2], angles[1::2]
    return np.column_stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]).reshape(-1)


def _to_angles(directions: np.ndarray) -> np.ndarray:
    theta = np.arccos(np.clip(directions[:, 2], -1.0, 1.0))
    phi = np.arctan2(directions[:, 1], directions[:, 0])
    return np.column_stack([theta, phi]).reshape(-1)


def grid_lu_oracle(state: PureState, resolution_deg: float, restarts: Optional[int] = None,
                   seed: Optional[int] = None, *, config: QfiConfig = DEFAULT_CONFIG) -> OracleResult:
    """Exhaustive direction grid plus local polish against lu_optimize."""
    n = state.n_qubits
    if n > GRID_MAX_QUBITS:
        raise DimensionCapError(f"grid_lu oracle is limited to {GRID_MAX_QUBITS} qubits, got {n}")
    cov = gamma_r(state, config=config)
    g = grid_size(resolution_deg, n)
    effective = math.degrees(math.sqrt(4.0 * math.pi / g))
    details = f"{g} points per qubit, effective resolution {effective:.4g} deg"
    if effective > resolution_deg * (1.0 + 1e-9):
        details = (f"requested resolution {resolution_deg:.4g} deg not honoured: coarsened to {effective:.4g} deg "
                   f"({g} points per qubit) to fit {GRID_BUDGET} evaluations")
        logging.warning("grid_lu: %s", details)
    points = fibonacci_sphere(g)
    logging.info("grid_lu: %d points per qubit (%.3g deg), %d evaluations", g, effective, g ** n)

    top_values, top_combos = _grid_top(cov, points, POLISH_POINTS)
    best = float(top_values.max())
    matrix = np.asarray(cov.matrix)

    def objective(angles: np.ndarray) -> float:
        m = _from_angles(angles)
        return -float(m @ matrix @ m)

    for combo in top_combos:
        start = _to_angles(points[combo])
        polished = minimize(objective, start, method="BFGS", options={"gtol": 1e-10})
        best = max(best, -float(polished.fun))

    library = lu_optimize(cov, restarts, seed, config=config).best_value
    return OracleResult("grid_lu", best, library, abs(best - library), TOLERANCES["grid_lu"], details)


def dense_reduction_oracle(spec: StateSpec, *, config: QfiConfig = DEFAULT_CONFIG) -> OracleResult:
    """Stabilizer-built one- and two-qubit reductions against dense partial traces."""
    graph = graph_of(spec)
    if graph is None:
        raise SpecError(f"dense_reduction needs a graph-state spec, got kind '{spec.kind}'")
    state = graph_state(graph, config=config)
    n = graph.n_vertices
    gap = 0.0
    dense_purity = 0.0
    stabilizer_purity = 0.0
    for size in (1, 2):
        for keep in combinations(range(1, n + 1), size):
            dense = partial_trace(state, keep, config=config)
            reduced = stabilizer_reduced_state(graph, keep)
            gap = max(gap, float(np.max(np.abs(dense.matrix - reduced.matrix))))
            dense_purity += purity(dense)
            stabilizer_purity += purity(reduced)
    return OracleResult("dense_reduction", dense_purity, stabilizer_purity, gap, TOLERANCES["dense_reduction"],
                        "values are summed purities over all one- and two-qubit subsets")


def stabilizer_sum_oracle(spec: StateSpec, *, config: QfiConfig = DEFAULT_CONFIG) -> OracleResult:
    """Projector from the full stabilizer group against the controlled-Z construction."""
    graph = graph_of(spec)
    if graph is None:
        raise SpecError(f"stabilizer_sum needs a graph-state spec, got kind '{spec.kind}'")
    if graph.n_vertices > STABILIZER_SUM_MAX_QUBITS:
        raise DimensionCapError(
            f"stabilizer_sum oracle is limited to {STABILIZER_SUM_MAX_QUBITS} qubits, got {graph.n_vertices}")
    state = graph_state(graph, config=config)
    projector = stabilizer_projector(graph)
    amps = state.amplitudes
    overlap = float(np.vdot(amps, projector @ amps).real)
    gap = float(np.max(np.abs(projector - np.outer(amps, amps.conj()))))
    return OracleResult("stabilizer_sum", overlap, 1.0, gap, TOLERANCES["stabilizer_sum"],
                        "oracle_value is <G|P|G>; gap is the largest entry of P - |G><G|")


def run_oracle(spec: StateSpec, check: str, resolution_deg: float = 2.0, restarts: Optional[int] = None,
               seed: Optional[int] = None, *, config: QfiConfig = DEFAULT_CONFIG) -> OracleResult:
    runners: Dict[str, Callable[[], OracleResult]] = {
        "grid_lu": lambda: grid_lu_oracle(build_state(spec, config=config), resolution_deg, restarts, seed,
                                          config=config),
        "dense_reduction": lambda: dense_reduction_oracle(spec, config=config),
        "stabilizer_sum": lambda: stabilizer_sum_oracle(spec, config=config),
    }
    if check not in runners:
        raise SpecError(f"Unknown oracle '{check}'. Choose from: {', '.join(runners)}")
    result = runners[check]()
    logging.info("oracle %s: gap %.3e (tolerance %.1e)", check, result.gap, result.tolerance)
    return result
