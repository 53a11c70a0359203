"""Classical and quantum Fisher information and the resulting phase bounds."""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from config import DEFAULT_CONFIG, QfiConfig
from errors import (
    DimensionMismatchError,
    InvalidStateError,
    NonHermitianError,
    QfiError,
    SingularOutcomeError,
)
from qstate import (
    MixedState,
    PureState,
    State,
    as_density_matrix,
    check_qubit_cap,
    variance,
)


def dense(operator) -> np.ndarray:
    """Dense complex copy of a dense or scipy sparse operator."""
    if sp.issparse(operator):
        return operator.toarray().astype(complex)
    return np.asarray(operator, dtype=complex)


def _check_hermitian(matrix: np.ndarray, tol: float) -> None:
    scale = max(1.0, float(np.max(np.abs(matrix))))
    if np.max(np.abs(matrix - matrix.conj().T)) > tol * scale:
        raise NonHermitianError("Generator is not Hermitian")


@dataclass(frozen=True, eq=False)
class Povm:
    """Discrete POVM: PSD elements summing to the identity."""

    elements: Tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = [np.asarray(e, dtype=complex) for e in self.elements]
        if not mats:
            raise InvalidStateError("A POVM needs at least one element")
        dim = mats[0].shape[0]
        for k, mat in enumerate(mats):
            if mat.shape != (dim, dim):
                raise DimensionMismatchError(f"POVM element {k} has shape {mat.shape}, expected {(dim, dim)}")
            if np.max(np.abs(mat - mat.conj().T)) > 1e-10:
                raise InvalidStateError(f"POVM element {k} is not Hermitian")
            if np.linalg.eigvalsh(mat)[0] < -1e-10:
                raise InvalidStateError(f"POVM element {k} is not positive semidefinite")
        if np.max(np.abs(sum(mats) - np.eye(dim))) > 1e-10:
            raise InvalidStateError("POVM elements do not sum to the identity")
        frozen = []
        for mat in mats:
            mat = (mat + mat.conj().T) / 2
            mat.setflags(write=False)
            frozen.append(mat)
        object.__setattr__(self, "elements", tuple(frozen))

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.elements)

    @classmethod
    def projective(cls, basis: np.ndarray) -> "Povm":
        """Rank-one projectors onto the columns of a unitary matrix."""
        basis = np.asarray(basis, dtype=complex)
        return cls(tuple(np.outer(basis[:, k], basis[:, k].conj()) for k in range(basis.shape[1])))

    @classmethod
    def from_observable(cls, operator, atol: float = 1e-9) -> "Povm":
        """Spectral projectors of a Hermitian observable, one per distinct eigenvalue."""
        matrix = dense(operator)
        _check_hermitian(matrix, 1e-10)
        values, vectors = np.linalg.eigh(matrix)
        groups = []
        start = 0
        for k in range(1, len(values) + 1):
            if k == len(values) or values[k] - values[start] > atol:
                block = vectors[:, start:k]
                groups.append(block @ block.conj().T)
                start = k
        return cls(tuple(groups))

    @classmethod
    def random(cls, dim: int, n_outcomes: int, rng: np.random.Generator) -> "Povm":
        """E_k = S^-1/2 G_k S^-1/2 with Ginibre G_k and S = sum_k G_k."""
        if n_outcomes < 1:
            raise InvalidStateError(f"n_outcomes must be positive, got {n_outcomes}")
        raw = []
        for _ in range(n_outcomes):
            ginibre = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            raw.append(ginibre @ ginibre.conj().T)
        weights, vectors = np.linalg.eigh(sum(raw))
        inv_sqrt = vectors @ np.diag(weights ** -0.5) @ vectors.conj().T
        return cls(tuple(inv_sqrt @ g @ inv_sqrt for g in raw))


@dataclass(frozen=True)
class SensitivityBound:
    """Cramer-Rao bound delta_theta = 1/sqrt(m F); infinite when F = 0."""

    fisher: float
    repetitions: int
    delta_theta: float

    @property
    def infinite(self) -> bool:
        return bool(np.isinf(self.delta_theta))


def qfi_pure(state: PureState, generator, *, config: QfiConfig = DEFAULT_CONFIG) -> float:
    """F_Q = 4 <(Delta H)^2>."""
    return 4.0 * variance(state, generator, config=config)


def qfi_mixed(state: State, generator, *, config: QfiConfig = DEFAULT_CONFIG) -> float:
    """F_Q = 2 sum_{l,m} (lam_l - lam_m)^2 / (lam_l + lam_m) |<l|H|m>|^2.

    Pairs with lam_l + lam_m at or below `eigen_pair_tol` are left out.
    """
    check_qubit_cap(state.n_qubits, mixed=True, config=config)
    rho = as_density_matrix(state)
    hamiltonian = dense(generator)
    if hamiltonian.shape != rho.shape:
        raise DimensionMismatchError(f"Generator shape {hamiltonian.shape} does not match state {rho.shape}")
    _check_hermitian(hamiltonian, config.hermitian_tol)

    eigvals, eigvecs = np.linalg.eigh(rho)
    eigvals = np.clip(eigvals, 0.0, None)
    h_eig = eigvecs.conj().T @ hamiltonian @ eigvecs
    sums = eigvals[:, None] + eigvals[None, :]
    diffs = eigvals[:, None] - eigvals[None, :]
    mask = sums > config.eigen_pair_tol
    weights = np.zeros_like(sums)
    weights[mask] = diffs[mask] ** 2 / sums[mask]
    return float(2.0 * np.sum(weights * np.abs(h_eig) ** 2))


def evolve(state: State, generator, theta: float, *, config: QfiConfig = DEFAULT_CONFIG) -> State:
    """exp(-i theta H) applied to a pure state or by conjugation to a mixed one."""
    if not np.isfinite(theta):
        raise InvalidStateError(f"theta must be finite, got {theta!r}")
    if getattr(generator, "shape", None) != (state.dim, state.dim):
        raise DimensionMismatchError(
            f"Generator shape {getattr(generator, 'shape', None)} does not match dimension {state.dim}")

    if isinstance(state, PureState) and sp.issparse(generator):
        amps = expm_multiply(-1j * theta * generator.tocsc(), state.amplitudes)
        return PureState(state.n_qubits, amps / np.linalg.norm(amps))

    hamiltonian = dense(generator)
    _check_hermitian(hamiltonian, config.hermitian_tol)
    values, vectors = np.linalg.eigh(hamiltonian)
    unitary = (vectors * np.exp(-1j * theta * values)) @ vectors.conj().T
    if isinstance(state, PureState):
        amps = unitary @ state.amplitudes
        return PureState(state.n_qubits, amps / np.linalg.norm(amps))
    rho = unitary @ state.matrix @ unitary.conj().T
    return MixedState(state.n_qubits, rho / np.trace(rho).real)


def outcome_probabilities(state: State, generator, povm: Povm, theta: float,
                          *, config: QfiConfig = DEFAULT_CONFIG) -> Tuple[np.ndarray, np.ndarray]:
    """P(xi|theta) and dP/dtheta = tr(E_xi (-i)[H, rho(theta)])."""
    if povm.dim != state.dim:
        raise DimensionMismatchError(f"POVM dimension {povm.dim} does not match state dimension {state.dim}")
    rho = as_density_matrix(evolve(state, generator, theta, config=config))
    hamiltonian = dense(generator)
    commutator = -1j * (hamiltonian @ rho - rho @ hamiltonian)
    probs = np.array([np.trace(e @ rho).real for e in povm.elements])
    derivs = np.array([np.trace(e @ commutator).real for e in povm.elements])
    return probs, derivs


def classical_fisher(state: State, generator, povm: Povm, theta: float,
                     *, config: QfiConfig = DEFAULT_CONFIG) -> float:
    """F = sum_xi (dP/dtheta)^2 / P over the POVM outcomes."""
    probs, derivs = outcome_probabilities(state, generator, povm, theta, config=config)
    total = 0.0
    for idx, (p, dp) in enumerate(zip(probs, derivs)):
        if p < config.probability_floor:
            if abs(dp) < config.derivative_floor:
                logging.debug("Skipping zero-probability outcome %d", idx)
                continue
            raise SingularOutcomeError(
                f"Outcome {idx} has probability {p:.3e} but derivative {dp:.3e}")
        total += dp ** 2 / p
    return float(total)


def _positive_int(value: int, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise QfiError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def cramer_rao(fisher: float, m: int = 1) -> SensitivityBound:
    m = _positive_int(m, "m")
    if fisher < 0 or not np.isfinite(fisher):
        raise QfiError(f"Fisher information must be finite and nonnegative, got {fisher!r}")
    delta = float("inf") if fisher == 0 else 1.0 / np.sqrt(m * fisher)
    return SensitivityBound(float(fisher), m, float(delta))


def shot_noise_limit(n_qubits: int) -> float:
    return 1.0 / np.sqrt(_positive_int(n_qubits, "n_qubits"))


def heisenberg_limit(m: int, n_qubits: int) -> float:
    """1/(sqrt(m) N) for m repetitions with N particles each."""
    return 1.0 / (np.sqrt(_positive_int(m, "m")) * _positive_int(n_qubits, "n_qubits"))


def heisenberg_limit_total(n_total: int) -> float:
    """1/N_tot when the whole resource goes into one entangled probe."""
    return 1.0 / _positive_int(n_total, "n_total")


def separable_bound(n_qubits: int) -> float:
    """Largest F_Q[rho; J_n] a fully separable state can reach."""
    return float(_positive_int(n_qubits, "n_qubits"))
