"""Covariance matrices of collective and local spin components and their optimization.

gamma_c / mixed_gamma_c give the 3x3 matrix whose quadratic form is F_Q/4 for
a collective generator J_n. gamma_r / mixed_gamma_r give the 3N x 3N matrix in
per-qubit 3-blocks whose quadratic form m^T gamma m is F_Q for the local
generator J' = 1/2 sum_k n_k . sigma^(k).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.optimize import brentq

from config import DEFAULT_CONFIG, QfiConfig
from errors import InvalidStateError, NotSymmetricError, QfiError
from qstate import (
    PAULIS,
    Direction,
    MixedState,
    PureState,
    State,
    apply_single_qubit,
    as_density_matrix,
    bloch_vectors,
    check_qubit_cap,
    is_symmetric,
    lambda_of,
    partial_trace,
    single_site_operator,
)


SOURCES = ("pure", "mixed")


def _symmetric_copy(matrix: np.ndarray, shape: Tuple[int, int], name: str) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape != shape:
        raise InvalidStateError(f"{name} must have shape {shape}, got {matrix.shape}")
    if np.max(np.abs(matrix - matrix.T)) > 1e-10:
        raise InvalidStateError(f"{name} is not symmetric")
    matrix = (matrix + matrix.T) / 2
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True, eq=False)
class CollectiveCovariance:
    """gamma_C (pure source) or Gamma_C (mixed source)."""

    matrix: np.ndarray
    source: str = "pure"

    def __post_init__(self):
        if self.source not in SOURCES:
            raise InvalidStateError(f"source must be one of {SOURCES}, got {self.source!r}")
        matrix = _symmetric_copy(self.matrix, (3, 3), "Collective covariance")
        if self.source == "pure" and np.linalg.eigvalsh(matrix)[0] < -1e-9:
            raise InvalidStateError("Collective covariance of a pure state must be positive semidefinite")
        object.__setattr__(self, "matrix", matrix)

    def quadratic_form(self, direction: Direction) -> float:
        n_vec = direction.components
        return float(n_vec @ self.matrix @ n_vec)


@dataclass(frozen=True, eq=False)
class LocalCovariance:
    """gamma_R (pure source) or Gamma_R (mixed source) in per-qubit 3-blocks."""

    n_qubits: int
    matrix: np.ndarray
    source: str = "pure"

    def __post_init__(self):
        if self.source not in SOURCES:
            raise InvalidStateError(f"source must be one of {SOURCES}, got {self.source!r}")
        if not isinstance(self.n_qubits, (int, np.integer)) or self.n_qubits < 1:
            raise InvalidStateError(f"n_qubits must be a positive integer, got {self.n_qubits!r}")
        size = 3 * self.n_qubits
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        object.__setattr__(self, "matrix", _symmetric_copy(self.matrix, (size, size), "Local covariance"))

    def block(self, k: int, l: int) -> np.ndarray:
        """3x3 block between qubits k and l (1-indexed)."""
        return np.array(self.matrix[3 * (k - 1):3 * k, 3 * (l - 1):3 * l])

    def blocks(self) -> np.ndarray:
        """(N, N, 3, 3) view indexed [k, l, i, j]."""
        n = self.n_qubits
        return np.asarray(self.matrix).reshape(n, 3, n, 3).transpose(0, 2, 1, 3)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def collective(self) -> CollectiveCovariance:
        """gamma_C = 1/4 sum_{k,l} gamma_R[k, l]."""
        return CollectiveCovariance(self.blocks().sum(axis=(0, 1)) / 4.0, self.source)


@dataclass(frozen=True, eq=False)
class DirectionAssignment:
    """One unit direction per qubit; `stacked` is the 3N-vector m."""

    directions: Tuple[Direction, ...]

    def __post_init__(self):
        if not self.directions:
            raise InvalidStateError("An assignment needs at least one direction")
        object.__setattr__(self, "directions", tuple(self.directions))

    @classmethod
    def from_stacked(cls, stacked: Sequence[float]) -> "DirectionAssignment":
        """Split a 3N-vector into blocks and normalize each block."""
        vec = np.asarray(stacked, dtype=float).reshape(-1)
        if vec.size % 3:
            raise InvalidStateError(f"Stacked assignment length {vec.size} is not a multiple of 3")
        return cls(tuple(Direction.from_vector(block) for block in vec.reshape(-1, 3)))

    @classmethod
    def common(cls, direction: Direction, n_qubits: int) -> "DirectionAssignment":
        return cls(tuple(direction for _ in range(n_qubits)))

    @property
    def n_qubits(self) -> int:
        return len(self.directions)

    @property
    def stacked(self) -> np.ndarray:
        return np.concatenate([d.components for d in self.directions])

    def as_lists(self) -> List[List[float]]:
        return [d.as_list() for d in self.directions]


@dataclass(frozen=True, eq=False)
class CluOptimum:
    direction: Direction
    fq: float
    degenerate: bool
    eigenvalues: Tuple[float, float, float]


@dataclass(frozen=True, eq=False)
class LuOptimum:
    upper_bound: float
    best_value: float
    best_assignment: DirectionAssignment
    certified: bool
    restarts_run: int = 0


@dataclass(frozen=True, eq=False)
class SymmetricSpectrum:
    """Spectrum of gamma_R for a permutation-symmetric pure state.

    gamma_R has diagonal blocks A = 1 - s s^T and off-diagonal blocks
    B = T - s s^T, so its eigenvalues are those of A + (N-1)B (collective
    sector) and of A - B with multiplicity N-1.
    """

    n_qubits: int
    lambda1: float
    lambda2: float
    n_max: Direction
    collective_eigenvalues: Tuple[float, ...]
    local_eigenvalues: Tuple[float, ...]
    tie: bool
    antisymmetric_direction: Direction

    def full_spectrum(self) -> np.ndarray:
        values = list(self.collective_eigenvalues) + list(self.local_eigenvalues) * (self.n_qubits - 1)
        return np.sort(np.array(values))


def _sign_fixed(vector: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    """Flip so the first nonzero component is positive."""
    for c in vector:
        if abs(c) > atol:
            return vector if c > 0 else -vector
    return vector


def _top_eigen(matrix: np.ndarray, rtol: float) -> Tuple[np.ndarray, np.ndarray, bool]:
    """Eigenvalues, deterministic top eigenvector and a degeneracy flag.

    For a degenerate top eigenvalue the representative is P e_j / |P e_j| for the
    first basis vector e_j with a non-negligible projection onto the eigenspace.
    """
    vals, vecs = np.linalg.eigh(matrix)
    lam_max = vals[-1]
    top = vals >= lam_max - rtol * max(1.0, abs(lam_max))
    degenerate = int(top.sum()) > 1
    if not degenerate:
        return vals, _sign_fixed(vecs[:, -1]), False
    projector = vecs[:, top] @ vecs[:, top].T
    norms = np.linalg.norm(projector, axis=0)
    j = int(np.argmax(norms > 1e-6))
    return vals, _sign_fixed(projector[:, j] / norms[j]), True


def _pauli_columns(state: PureState) -> np.ndarray:
    """(2^N, 3N) block of sigma_i^(k)|psi>, column 3(k-1) + (i-1)."""
    n = state.n_qubits
    psi = state.amplitudes
    columns = [apply_single_qubit(psi, PAULIS[i], k, n) for k in range(1, n + 1) for i in (1, 2, 3)]
    return np.stack(columns, axis=1)


def _pure_local_matrix(state: PureState) -> np.ndarray:
    phi = _pauli_columns(state)
    means = np.real(state.amplitudes.conj() @ phi)
    return np.real(phi.conj().T @ phi) - np.outer(means, means)


def gamma_r(state: State, *, config: QfiConfig = DEFAULT_CONFIG) -> LocalCovariance:
    """gamma_R for a pure state; mixed states are passed on to mixed_gamma_r."""
    if isinstance(state, MixedState):
        return mixed_gamma_r(state, config=config)
    check_qubit_cap(state.n_qubits, config=config)
    return LocalCovariance(state.n_qubits, _pure_local_matrix(state), "pure")


def gamma_c(state: State, *, config: QfiConfig = DEFAULT_CONFIG) -> CollectiveCovariance:
    """[gamma_C]_ij = 1/2 <J_i J_j + J_j J_i> - <J_i><J_j>."""
    if isinstance(state, MixedState):
        return mixed_gamma_c(state, config=config)
    check_qubit_cap(state.n_qubits, config=config)
    n = state.n_qubits
    j_cols = _pauli_columns(state).reshape(state.dim, n, 3).sum(axis=1) / 2.0
    means = np.real(state.amplitudes.conj() @ j_cols)
    return CollectiveCovariance(np.real(j_cols.conj().T @ j_cols) - np.outer(means, means), "pure")


def mixed_gamma_r(state: State, *, config: QfiConfig = DEFAULT_CONFIG) -> LocalCovariance:
    """Gamma_R with m^T Gamma_R m = F_Q[rho; J'] from the spectral QFI formula.

    Only columns in the support of rho enter; a pair (m, s) with m outside the
    support stands for both (m, s) and (s, m) and is weighted twice.
    """
    n = state.n_qubits
    check_qubit_cap(n, mixed=True, config=config)
    rho = as_density_matrix(state)
    eigvals, eigvecs = np.linalg.eigh(rho)
    eigvals = np.clip(eigvals, 0.0, None)

    support = eigvals > config.eigen_pair_tol / 2
    sums = eigvals[:, None] + eigvals[None, :]
    diffs = eigvals[:, None] - eigvals[None, :]
    weights = np.zeros_like(sums)
    mask = sums > config.eigen_pair_tol
    weights[mask] = diffs[mask] ** 2 / sums[mask]
    weights = weights[:, support] * np.where(support, 1.0, 2.0)[:, None]
    root_w = np.sqrt(weights)

    v_support = eigvecs[:, support]
    rows = []
    for k in range(1, n + 1):
        for i in (1, 2, 3):
            image = apply_single_qubit(v_support, PAULIS[i], k, n)
            rows.append((root_w * (eigvecs.conj().T @ image)).reshape(-1))
    x_mat = np.array(rows)
    matrix = 0.5 * np.real(x_mat @ x_mat.conj().T)
    logging.debug("Gamma_R from %d support vectors of a %d-qubit state", int(support.sum()), n)
    return LocalCovariance(n, matrix, "mixed")


def mixed_gamma_c(state: State, *, config: QfiConfig = DEFAULT_CONFIG) -> CollectiveCovariance:
    """Gamma_C with 4 n^T Gamma_C n = F_Q[rho; J_n]."""
    return mixed_gamma_r(state, config=config).collective()


def best_clu(cov: CollectiveCovariance, *, config: QfiConfig = DEFAULT_CONFIG) -> CluOptimum:
    """Maximal eigenpair of gamma_C: F_Q = 4 lambda_max along its eigenvector."""
    vals, vec, degenerate = _top_eigen(np.asarray(cov.matrix), config.degeneracy_rtol)
    return CluOptimum(Direction.from_vector(vec), float(4.0 * vals[-1]), degenerate,
                      tuple(float(v) for v in vals))


def lu_upper_bound(cov: LocalCovariance) -> float:
    """N lambda_max(gamma_R), the bound from relaxing the per-block constraints."""
    return float(cov.n_qubits * np.linalg.eigvalsh(cov.matrix)[-1])


def assignment_value(cov: LocalCovariance, assignment: DirectionAssignment) -> float:
    if assignment.n_qubits != cov.n_qubits:
        raise InvalidStateError(f"Assignment has {assignment.n_qubits} blocks, expected {cov.n_qubits}")
    m = assignment.stacked
    return float(m @ cov.matrix @ m)


def local_generator(assignment: DirectionAssignment, *, config: QfiConfig = DEFAULT_CONFIG) -> sp.csr_matrix:
    """J' = 1/2 sum_k n_k . sigma^(k) as a sparse matrix."""
    n = assignment.n_qubits
    check_qubit_cap(n, config=config)
    total = sp.csr_matrix((2 ** n, 2 ** n), dtype=complex)
    for k, direction in enumerate(assignment.directions, 1):
        n_vec = direction.components
        single = 0.5 * sum(n_vec[i - 1] * PAULIS[i] for i in (1, 2, 3))
        total = total + single_site_operator(n, k, single)
    return total.tocsr()


def _sphere_max(vals: np.ndarray, vecs: np.ndarray, linear: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    """Maximizer of n^T A n + 2 b^T n on |n| = 1 given the eigendecomposition of A.

    The stationary points satisfy (mu - A) n = b; the global maximum takes the
    root mu > lambda_max of sum_i c_i^2 / (mu - lambda_i)^2 = 1 with c = Q^T b.
    """
    if np.linalg.norm(linear) <= atol:
        return _sign_fixed(vecs[:, -1])
    coeffs = vecs.T @ linear
    lam_max = vals[-1]
    top = vals >= lam_max - 1e-12 * max(1.0, abs(lam_max))
    c_norm = float(np.linalg.norm(coeffs))
    c_top = float(np.linalg.norm(coeffs[top]))

    def secular(mu: float, active: np.ndarray) -> float:
        return float(np.sum(coeffs[active] ** 2 / (mu - vals[active]) ** 2) - 1.0)

    if c_top <= atol:
        # hard case: no linear pull along the top eigenspace
        rest = ~top
        w = np.zeros_like(coeffs)
        w[rest] = coeffs[rest] / (lam_max - vals[rest])
        w_norm = float(np.linalg.norm(w))
        if w_norm <= 1.0:
            w[int(np.argmax(top))] = np.sqrt(max(0.0, 1.0 - w_norm ** 2))
            return vecs @ w
        mu = brentq(secular, lam_max, lam_max + c_norm, args=(rest,), xtol=1e-15)
    else:
        everything = np.ones_like(top)
        lo, hi = lam_max + c_top / 2.0, lam_max + c_norm
        if secular(hi, everything) >= 0.0:
            mu = hi
        else:
            mu = brentq(secular, lo, hi, args=(everything,), xtol=1e-15)

    solution = vecs @ (coeffs / (mu - vals))
    return solution / np.linalg.norm(solution)


def solve_sphere_subproblem(matrix: np.ndarray, linear: np.ndarray) -> np.ndarray:
    """Global maximizer of n^T A n + 2 b^T n over unit vectors n."""
    matrix = np.asarray(matrix, dtype=float)
    vals, vecs = np.linalg.eigh((matrix + matrix.T) / 2)
    return _sphere_max(vals, vecs, np.asarray(linear, dtype=float))


def _ascend(cov: LocalCovariance, start: np.ndarray, config: QfiConfig) -> Tuple[float, np.ndarray]:
    """Block-coordinate ascent from `start` (N x 3, unit rows)."""
    blocks = cov.blocks()
    n = cov.n_qubits
    diag_eigs = [np.linalg.eigh(blocks[k, k]) for k in range(n)]
    m = np.array(start, dtype=float)
    value = float(np.einsum("ki,klij,lj->", m, blocks, m))
    for sweep in range(config.max_sweeps):
        for k in range(n):
            linear = np.einsum("lij,lj->i", blocks[k], m) - blocks[k, k] @ m[k]
            m[k] = _sphere_max(diag_eigs[k][0], diag_eigs[k][1], linear)
        new_value = float(np.einsum("ki,klij,lj->", m, blocks, m))
        improvement = new_value - value
        value = max(value, new_value)
        if improvement < config.sweep_tol:
            logging.debug("ascent converged after %d sweeps at %.12g", sweep + 1, value)
            break
    return value, m


def _eigen_start(cov: LocalCovariance) -> np.ndarray:
    """Top eigenvector of gamma_R with each block renormalized; empty blocks become x."""
    vec = np.linalg.eigh(cov.matrix)[1][:, -1].reshape(cov.n_qubits, 3)
    start = np.zeros_like(vec)
    for k, block in enumerate(vec):
        norm = np.linalg.norm(block)
        start[k] = block / norm if norm > 1e-9 else np.array([1.0, 0.0, 0.0])
    return start


def _random_start(n_qubits: int, seed: int, index: int) -> np.ndarray:
    rng = np.random.default_rng([seed, index])
    start = rng.normal(size=(n_qubits, 3))
    return start / np.linalg.norm(start, axis=1, keepdims=True)


def lu_optimize(cov: LocalCovariance, restarts: Optional[int] = None, seed: Optional[int] = None,
                *, max_workers: Optional[int] = None, config: QfiConfig = DEFAULT_CONFIG) -> LuOptimum:
    """Best m^T gamma_R m with unit blocks, found by block-coordinate ascent.

    Starts from the renormalized top eigenvector and, unless that start already
    meets the upper bound, from `restarts` random assignments seeded by
    (seed, index). Ties within 1e-12 go to the lexicographically largest m.
    """
    restarts = config.default_restarts if restarts is None else restarts
    seed = config.default_seed if seed is None else seed
    if isinstance(restarts, bool) or not isinstance(restarts, (int, np.integer)) or restarts < 0:
        raise QfiError(f"restarts must be a nonnegative integer, got {restarts!r}")
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise QfiError(f"seed must be a nonnegative integer, got {seed!r}")

    upper = lu_upper_bound(cov)
    results = [_ascend(cov, _eigen_start(cov), config)]
    restarts_run = 0
    if results[0][0] < upper - config.certify_tol:
        starts = [_random_start(cov.n_qubits, int(seed), idx) for idx in range(int(restarts))]
        if max_workers and max_workers > 1:
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                results.extend(pool.map(lambda s: _ascend(cov, s, config), starts))
        else:
            results.extend(_ascend(cov, s, config) for s in starts)
        restarts_run = len(starts)

    best_value = max(value for value, _ in results)
    candidates = [m.reshape(-1) for value, m in results if value >= best_value - 1e-12]
    best_m = max(candidates, key=tuple)
    certified = best_value >= upper - config.certify_tol
    logging.debug("lu_optimize: value %.12g, bound %.12g, certified=%s, restarts=%d",
                  best_value, upper, certified, restarts_run)
    return LuOptimum(upper, best_value, DirectionAssignment.from_stacked(best_m), certified, restarts_run)


def symmetric_spectrum(state: PureState, require_symmetric: bool = True,
                       *, config: QfiConfig = DEFAULT_CONFIG) -> SymmetricSpectrum:
    """gamma_R spectrum of a symmetric state from two 3x3 eigenproblems."""
    if require_symmetric and not is_symmetric(state, config=config):
        raise NotSymmetricError("symmetric_spectrum needs a permutation-symmetric state")
    n = state.n_qubits
    if n < 2:
        raise InvalidStateError("symmetric_spectrum needs at least two qubits")
    s = bloch_vectors(partial_trace(state, [1], config=config), config=config)[0]
    corr = lambda_of(partial_trace(state, [1, 2], config=config), config=config).T
    corr = (corr + corr.T) / 2
    a_mat = np.eye(3) - np.outer(s, s)
    b_mat = corr - np.outer(s, s)

    coll_vals, n_max, _ = _top_eigen(a_mat + (n - 1) * b_mat, config.degeneracy_rtol)
    loc_vals, antisym, _ = _top_eigen(a_mat - b_mat, config.degeneracy_rtol)
    lambda1, lambda2 = float(coll_vals[-1]), float(loc_vals[-1])
    tie = abs(lambda1 - lambda2) <= config.degeneracy_rtol * max(1.0, abs(lambda1))
    if tie:
        logging.debug("symmetric_spectrum: lambda1 and lambda2 tie at %.12g", lambda1)
    return SymmetricSpectrum(
        n_qubits=n,
        lambda1=lambda1,
        lambda2=lambda2,
        n_max=Direction.from_vector(n_max),
        collective_eigenvalues=tuple(float(v) for v in coll_vals),
        local_eigenvalues=tuple(float(v) for v in loc_vals),
        tie=tie,
        antisymmetric_direction=Direction.from_vector(antisym),
    )
