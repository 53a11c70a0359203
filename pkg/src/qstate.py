"""Dense N-qubit states and the operators acting on them.

Qubit k (1-indexed) is the k-th most significant bit of the basis index,
and |0> is the +1 eigenstate of sigma_z. Pure states hold a 2^N amplitude
vector, mixed states a 2^N x 2^N density matrix. Collective and local
operators are returned as scipy sparse matrices so that pure-state work up
to the qubit cap stays cheap.
"""

import logging
import string
from dataclasses import dataclass
from enum import IntEnum
from math import comb
from typing import List, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.spatial.transform import Rotation

from config import DEFAULT_CONFIG, QfiConfig
from errors import (
    DimensionCapError,
    DimensionMismatchError,
    InvalidStateError,
    NonHermitianError,
)


IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z)


class Axis(IntEnum):
    """Cartesian axes x, y, z mapped to Pauli indices 1, 2, 3."""

    X = 1
    Y = 2
    Z = 3

    @classmethod
    def from_label(cls, label: str) -> "Axis":
        try:
            return cls[label.strip().upper()]
        except KeyError as exc:
            raise InvalidStateError(f"Unknown axis '{label}'. Use x, y or z.") from exc

    @property
    def unit_vector(self) -> np.ndarray:
        vec = np.zeros(3)
        vec[self.value - 1] = 1.0
        return vec


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Direction:
    """Unit vector in R^3."""

    components: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.components, dtype=float).reshape(-1)
        if vec.shape != (3,) or not np.all(np.isfinite(vec)):
            raise InvalidStateError(f"A direction needs 3 finite components, got {vec}")
        if abs(np.linalg.norm(vec) - 1.0) > DEFAULT_CONFIG.direction_tol:
            raise InvalidStateError(f"Direction is not normalized: |n| = {np.linalg.norm(vec)!r}")
        object.__setattr__(self, "components", _frozen(vec))

    @classmethod
    def from_vector(cls, vector: Sequence[float]) -> "Direction":
        vec = np.asarray(vector, dtype=float).reshape(-1)
        norm = np.linalg.norm(vec)
        if vec.shape != (3,) or norm == 0.0 or not np.isfinite(norm):
            raise InvalidStateError(f"Cannot normalize {vec} into a direction")
        return cls(vec / norm)

    @classmethod
    def along(cls, axis: Union["Axis", str]) -> "Direction":
        if isinstance(axis, str):
            axis = Axis.from_label(axis)
        return cls(axis.unit_vector)

    def as_list(self) -> List[float]:
        return [float(c) for c in self.components]


DirectionLike = Union[Direction, Axis, str, Sequence[float], np.ndarray]


def as_direction(direction: DirectionLike) -> Direction:
    """Coerce an axis label, Axis or 3-vector into a Direction."""
    if isinstance(direction, Direction):
        return direction
    if isinstance(direction, (Axis, str)):
        return Direction.along(direction)
    return Direction.from_vector(direction)


def check_qubit_cap(n_qubits: int, mixed: bool = False, *, config: QfiConfig = DEFAULT_CONFIG) -> None:
    """Raise DimensionCapError when 2^n exceeds the configured cap."""
    if not isinstance(n_qubits, (int, np.integer)) or n_qubits < 1:
        raise InvalidStateError(f"Number of qubits must be a positive integer, got {n_qubits!r}")
    cap = config.max_mixed_qubits if mixed else config.max_pure_qubits
    if n_qubits > cap:
        kind = "mixed" if mixed else "pure"
        raise DimensionCapError(f"{n_qubits} qubits exceeds the {kind}-state cap of {cap}")


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit-norm amplitude vector of n_qubits qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not isinstance(self.n_qubits, (int, np.integer)) or self.n_qubits < 1:
            raise InvalidStateError(f"n_qubits must be a positive integer, got {self.n_qubits!r}")
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** self.n_qubits:
            raise DimensionMismatchError(
                f"{self.n_qubits} qubits need {2 ** self.n_qubits} amplitudes, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > DEFAULT_CONFIG.norm_tol:
            raise InvalidStateError(f"State is not normalized: |psi| = {norm!r}")
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex], normalize: bool = True,
                        *, config: QfiConfig = DEFAULT_CONFIG) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n_qubits = int(round(np.log2(amps.size))) if amps.size > 0 else 0
        if amps.size == 0 or 2 ** n_qubits != amps.size:
            raise DimensionMismatchError(f"Amplitude count {amps.size} is not a power of two")
        check_qubit_cap(n_qubits, config=config)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0.0:
                raise InvalidStateError("Cannot normalize the zero vector")
            amps = amps / norm
        return cls(n_qubits, amps)

    @classmethod
    def basis(cls, bits: str) -> "PureState":
        """Computational basis state from a bit string such as '010'."""
        if not bits or set(bits) - {"0", "1"}:
            raise InvalidStateError(f"Invalid bit string '{bits}'")
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(len(bits), amps)

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def density_matrix(self) -> "MixedState":
        return MixedState(self.n_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def equals_up_to_phase(self, other: "PureState", atol: float = 1e-10) -> bool:
        if other.n_qubits != self.n_qubits:
            return False
        return abs(abs(self.overlap(other)) - 1.0) <= atol


@dataclass(frozen=True, eq=False)
class MixedState:
    """Hermitian, unit-trace, positive-semidefinite density matrix."""

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        if not isinstance(self.n_qubits, (int, np.integer)) or self.n_qubits < 1:
            raise InvalidStateError(f"n_qubits must be a positive integer, got {self.n_qubits!r}")
        rho = np.asarray(self.matrix, dtype=complex)
        dim = 2 ** self.n_qubits
        if rho.shape != (dim, dim):
            raise DimensionMismatchError(f"{self.n_qubits} qubits need a {dim}x{dim} matrix, got {rho.shape}")
        tol = DEFAULT_CONFIG
        if np.max(np.abs(rho - rho.conj().T)) > tol.hermitian_tol:
            raise InvalidStateError("Density matrix is not Hermitian")
        rho = (rho + rho.conj().T) / 2
        if abs(np.trace(rho).real - 1.0) > tol.trace_tol:
            raise InvalidStateError(f"Density matrix trace is {np.trace(rho).real!r}, expected 1")
        if np.linalg.eigvalsh(rho)[0] < -tol.psd_tol:
            raise InvalidStateError("Density matrix has a negative eigenvalue")
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        object.__setattr__(self, "matrix", _frozen(rho))

    @classmethod
    def from_pure(cls, state: PureState) -> "MixedState":
        return state.density_matrix()

    @classmethod
    def maximally_mixed(cls, n_qubits: int, *, config: QfiConfig = DEFAULT_CONFIG) -> "MixedState":
        check_qubit_cap(n_qubits, mixed=True, config=config)
        dim = 2 ** n_qubits
        return cls(n_qubits, np.eye(dim, dtype=complex) / dim)

    @classmethod
    def mixture(cls, states: Sequence[Union[PureState, "MixedState"]],
                weights: Sequence[float]) -> "MixedState":
        """Incoherent mixture sum_k p_k rho_k."""
        weights = np.asarray(weights, dtype=float)
        if len(states) != len(weights) or len(states) == 0:
            raise InvalidStateError("Need one weight per state")
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > DEFAULT_CONFIG.trace_tol:
            raise InvalidStateError("Mixture weights must be a probability distribution")
        mats = [as_density_matrix(s) for s in states]
        n_qubits = states[0].n_qubits
        if any(s.n_qubits != n_qubits for s in states):
            raise DimensionMismatchError("All states in a mixture need the same number of qubits")
        return cls(n_qubits, sum(w * m for w, m in zip(weights, mats)))

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits


State = Union[PureState, MixedState]


def as_density_matrix(state: State) -> np.ndarray:
    if isinstance(state, PureState):
        return np.outer(state.amplitudes, state.amplitudes.conj())
    return np.asarray(state.matrix)


def as_mixed(state: State) -> MixedState:
    return state if isinstance(state, MixedState) else state.density_matrix()


@dataclass(frozen=True, eq=False)
class LocalRotationSet:
    """One proper rotation O_k in SO(3) per qubit."""

    rotations: Tuple[np.ndarray, ...]

    def __post_init__(self):
        checked = []
        tol = DEFAULT_CONFIG.rotation_tol
        for k, rot in enumerate(self.rotations, 1):
            rot = np.asarray(rot, dtype=float)
            if rot.shape != (3, 3):
                raise InvalidStateError(f"Rotation {k} must be 3x3, got {rot.shape}")
            if np.max(np.abs(rot.T @ rot - np.eye(3))) > tol:
                raise InvalidStateError(f"Rotation {k} is not orthogonal")
            if abs(np.linalg.det(rot) - 1.0) > tol:
                raise InvalidStateError(f"Rotation {k} has determinant {np.linalg.det(rot)!r}, expected +1")
            checked.append(_frozen(rot))
        if not checked:
            raise InvalidStateError("A rotation set needs at least one rotation")
        object.__setattr__(self, "rotations", tuple(checked))

    @classmethod
    def common(cls, rotation: np.ndarray, n_qubits: int) -> "LocalRotationSet":
        return cls(tuple(rotation for _ in range(n_qubits)))

    @classmethod
    def identity(cls, n_qubits: int) -> "LocalRotationSet":
        return cls.common(np.eye(3), n_qubits)

    def __len__(self) -> int:
        return len(self.rotations)


@dataclass(frozen=True, eq=False)
class LambdaMatrix:
    """Two-qubit correlation matrix lambda_ij = <sigma_i (x) sigma_j>, i, j = 0..3."""

    entries: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.entries, dtype=float)
        if lam.shape != (4, 4):
            raise DimensionMismatchError(f"Lambda matrix must be 4x4, got {lam.shape}")
        if abs(lam[0, 0] - 1.0) > 1e-10:
            raise InvalidStateError(f"lambda_00 must be 1, got {lam[0, 0]!r}")
        if np.max(np.abs(lam)) > 1.0 + 1e-10:
            raise InvalidStateError("Lambda entries must lie in [-1, 1]")
        object.__setattr__(self, "entries", _frozen(lam))

    @property
    def s(self) -> np.ndarray:
        """Bloch vector of the first qubit."""
        return np.array(self.entries[1:, 0])

    @property
    def s_second(self) -> np.ndarray:
        return np.array(self.entries[0, 1:])

    @property
    def T(self) -> np.ndarray:  # pylint: disable=invalid-name
        return np.array(self.entries[1:, 1:])

    def is_symmetric(self, atol: float = 1e-10) -> bool:
        return bool(np.allclose(self.entries, self.entries.T, atol=atol, rtol=0.0))

    def reconstruct(self) -> np.ndarray:
        rho = np.zeros((4, 4), dtype=complex)
        for i in range(4):
            for j in range(4):
                rho += self.entries[i, j] * np.kron(PAULIS[i], PAULIS[j])
        return rho / 4


def pauli_matrix(index: int) -> np.ndarray:
    if index not in (0, 1, 2, 3):
        raise InvalidStateError(f"Pauli index must be 0..3, got {index}")
    return PAULIS[index].copy()


def single_site_operator(n_qubits: int, site: int, op: np.ndarray) -> sp.csr_matrix:
    """Embed a 2x2 operator on qubit `site` (1-indexed) of n_qubits."""
    if not 1 <= site <= n_qubits:
        raise InvalidStateError(f"Qubit index {site} out of range 1..{n_qubits}")
    left = sp.identity(2 ** (site - 1), dtype=complex, format="csr")
    right = sp.identity(2 ** (n_qubits - site), dtype=complex, format="csr")
    return sp.kron(sp.kron(left, sp.csr_matrix(op)), right, format="csr")


def collective_spin_matrix(n_qubits: int, direction: DirectionLike,
                           *, config: QfiConfig = DEFAULT_CONFIG) -> sp.csr_matrix:
    """J_n = 1/2 sum_k n . sigma^(k) as a sparse Hermitian matrix."""
    check_qubit_cap(n_qubits, config=config)
    n_vec = as_direction(direction).components
    single = 0.5 * (n_vec[0] * SIGMA_X + n_vec[1] * SIGMA_Y + n_vec[2] * SIGMA_Z)
    total = sp.csr_matrix((2 ** n_qubits, 2 ** n_qubits), dtype=complex)
    for site in range(1, n_qubits + 1):
        total = total + single_site_operator(n_qubits, site, single)
    return total.tocsr()


def total_spin_squared(n_qubits: int, *, config: QfiConfig = DEFAULT_CONFIG) -> sp.csr_matrix:
    """Casimir J_x^2 + J_y^2 + J_z^2."""
    result = sp.csr_matrix((2 ** n_qubits, 2 ** n_qubits), dtype=complex)
    for axis in Axis:
        j_op = collective_spin_matrix(n_qubits, axis, config=config)
        result = result + j_op @ j_op
    return result.tocsr()


def _check_operator(dim: int, operator) -> None:
    if getattr(operator, "shape", None) != (dim, dim):
        raise DimensionMismatchError(
            f"Operator shape {getattr(operator, 'shape', None)} does not match state dimension {dim}")


def _real_value(value: complex, config: QfiConfig) -> float:
    if abs(np.imag(value)) > config.imag_tol:
        raise NonHermitianError(f"Expectation value has imaginary part {np.imag(value)!r}")
    return float(np.real(value))


def expectation(state: State, operator, *, config: QfiConfig = DEFAULT_CONFIG) -> float:
    """<H> for a pure or mixed state; H may be dense or sparse."""
    _check_operator(state.dim, operator)
    if isinstance(state, PureState):
        psi = state.amplitudes
        value = np.vdot(psi, operator @ psi)
    else:
        value = np.trace(np.asarray(operator @ state.matrix))
    return _real_value(value, config)


def variance(state: State, operator, *, config: QfiConfig = DEFAULT_CONFIG) -> float:
    """<H^2> - <H>^2, clamped at zero within the variance tolerance."""
    _check_operator(state.dim, operator)
    if isinstance(state, PureState):
        psi = state.amplitudes
        h_psi = operator @ psi
        mean = _real_value(np.vdot(psi, h_psi), config)
        second = float(np.vdot(h_psi, h_psi).real)
    else:
        h_rho = np.asarray(operator @ state.matrix)
        mean = _real_value(np.trace(h_rho), config)
        second = _real_value(np.trace(np.asarray(operator @ h_rho)), config)
    value = second - mean ** 2
    if value < -config.variance_tol:
        raise NonHermitianError(f"Negative variance {value!r}; is the operator Hermitian?")
    return max(value, 0.0)


def basis_bits(n_qubits: int) -> np.ndarray:
    """(2^n, n) array; column k-1 holds the bit of qubit k for every basis index."""
    index = np.arange(2 ** n_qubits)
    shifts = n_qubits - 1 - np.arange(n_qubits)
    return (index[:, None] >> shifts[None, :]) & 1


def dicke_state(n_qubits: int, m: float, *, config: QfiConfig = DEFAULT_CONFIG) -> PureState:
    """Symmetric Dicke state |N/2, m> with N/2 - m excitations (ones)."""
    check_qubit_cap(n_qubits, config=config)
    twice_m = 2 * float(m)
    if abs(twice_m - round(twice_m)) > 1e-9:
        raise InvalidStateError(f"m must be a half-integer, got {m!r}")
    twice_m = int(round(twice_m))
    if abs(twice_m) > n_qubits or (n_qubits - twice_m) % 2:
        raise InvalidStateError(f"m = {m} is not in -N/2..N/2 for N = {n_qubits}")
    ones = (n_qubits - twice_m) // 2
    popcount = basis_bits(n_qubits).sum(axis=1)
    amps = (popcount == ones).astype(complex) / np.sqrt(comb(n_qubits, ones))
    return PureState(n_qubits, amps)


def _check_keep(n_qubits: int, keep: Sequence[int]) -> List[int]:
    keep = [int(k) for k in keep]
    if not keep:
        raise InvalidStateError("At least one qubit must be kept")
    if len(set(keep)) != len(keep):
        raise InvalidStateError(f"Duplicate qubit indices in {keep}")
    for k in keep:
        if not 1 <= k <= n_qubits:
            raise InvalidStateError(f"Qubit index {k} out of range 1..{n_qubits}")
    return keep


def partial_trace(state: State, keep: Sequence[int], *, config: QfiConfig = DEFAULT_CONFIG) -> MixedState:
    """Reduced state on `keep`; the output qubit order follows `keep`."""
    n_qubits = state.n_qubits
    keep = _check_keep(n_qubits, keep)
    check_qubit_cap(len(keep), mixed=True, config=config)
    axes = [k - 1 for k in keep]
    rest = [q for q in range(n_qubits) if q not in axes]

    if isinstance(state, PureState):
        mat = np.transpose(state.tensor(), axes + rest).reshape(2 ** len(keep), -1)
        rho = mat @ mat.conj().T
    else:
        letters = string.ascii_letters
        rows = list(letters[:n_qubits])
        cols = list(letters[n_qubits:2 * n_qubits])
        for q in rest:
            cols[q] = rows[q]
        out = [rows[q] for q in axes] + [cols[q] for q in axes]
        tensor = np.asarray(state.matrix).reshape((2,) * (2 * n_qubits))
        rho = np.einsum(f"{''.join(rows)}{''.join(cols)}->{''.join(out)}", tensor)
        rho = rho.reshape(2 ** len(keep), 2 ** len(keep))
    return MixedState(len(keep), rho)


def purity(state: State) -> float:
    if isinstance(state, PureState):
        return 1.0
    rho = np.asarray(state.matrix)
    return float(np.sum(np.abs(rho) ** 2))


def lambda_of(rho2: MixedState, *, config: QfiConfig = DEFAULT_CONFIG) -> LambdaMatrix:
    """lambda_ij = tr(rho sigma_i (x) sigma_j) of a two-qubit state."""
    if not isinstance(rho2, MixedState) or rho2.n_qubits != 2:
        raise DimensionMismatchError("lambda_of needs a two-qubit density matrix")
    entries = np.zeros((4, 4))
    for i in range(4):
        for j in range(4):
            value = np.trace(rho2.matrix @ np.kron(PAULIS[i], PAULIS[j]))
            entries[i, j] = _real_value(value, config)
    return LambdaMatrix(entries)


def bloch_vectors(state: State, *, config: QfiConfig = DEFAULT_CONFIG) -> np.ndarray:
    """(N, 3) array of single-qubit expectation vectors."""
    vectors = np.zeros((state.n_qubits, 3))
    for k in range(1, state.n_qubits + 1):
        rho_k = partial_trace(state, [k], config=config).matrix
        for i in range(1, 4):
            vectors[k - 1, i - 1] = np.real(np.trace(rho_k @ PAULIS[i]))
    return vectors


def apply_single_qubit(vectors: np.ndarray, op: np.ndarray, site: int, n_qubits: int) -> np.ndarray:
    """Apply a 2x2 operator on qubit `site` to a (2^n,) vector or a (2^n, r) block of columns."""
    vectors = np.asarray(vectors)
    extra = vectors.shape[1:]
    tensor = vectors.reshape((2,) * n_qubits + extra)
    axis = site - 1
    tensor = np.moveaxis(np.tensordot(op, tensor, axes=([1], [axis])), 0, axis)
    return tensor.reshape(vectors.shape)


def su2_lift(rotation: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    """SU(2) element U with U^dagger sigma U = O sigma.

    Axis-angle lift U = cos(a/2) 1 - i sin(a/2) u.sigma; of the pair +-U the
    one whose leading diagonal element has nonnegative real part is kept,
    ties go to nonnegative imaginary part.
    """
    rotvec = Rotation.from_matrix(np.asarray(rotation, dtype=float)).as_rotvec()
    angle = float(np.linalg.norm(rotvec))
    if angle < atol:
        return IDENTITY.copy()
    axis = rotvec / angle
    generator = axis[0] * SIGMA_X + axis[1] * SIGMA_Y + axis[2] * SIGMA_Z
    unitary = np.cos(angle / 2) * IDENTITY - 1j * np.sin(angle / 2) * generator

    lead = unitary[0, 0] if abs(unitary[0, 0]) > atol else unitary[1, 0]
    if lead.real < -atol or (abs(lead.real) <= atol and lead.imag < -atol):
        unitary = -unitary
    return unitary


def apply_local_rotations(state: PureState, rotations: LocalRotationSet,
                          *, config: QfiConfig = DEFAULT_CONFIG) -> PureState:
    """Apply U_1 (x) ... (x) U_N built from per-qubit SO(3) rotations.

    Bloch vectors of the output are O_k s^(k).
    """
    if len(rotations) != state.n_qubits:
        raise DimensionMismatchError(
            f"Got {len(rotations)} rotations for {state.n_qubits} qubits")
    check_qubit_cap(state.n_qubits, config=config)
    amps = np.array(state.amplitudes)
    for site, rot in enumerate(rotations.rotations, 1):
        amps = apply_single_qubit(amps, su2_lift(rot), site, state.n_qubits)
    return PureState(state.n_qubits, amps / np.linalg.norm(amps))


def is_symmetric(state: PureState, *, config: QfiConfig = DEFAULT_CONFIG) -> bool:
    """True iff every adjacent transposition leaves the amplitudes unchanged."""
    tensor = state.tensor()
    for k in range(state.n_qubits - 1):
        swapped = np.swapaxes(tensor, k, k + 1)
        if not np.allclose(tensor, swapped, atol=config.symmetry_tol, rtol=0.0):
            return False
    return True


def is_pure_entangled(state: PureState, *, config: QfiConfig = DEFAULT_CONFIG) -> bool:
    """A pure state is entangled iff some single-qubit reduction is mixed."""
    linear_entropy = max(
        1.0 - purity(partial_trace(state, [k], config=config))
        for k in range(1, state.n_qubits + 1)
    )
    logging.debug("max single-qubit linear entropy %.3e", linear_entropy)
    return linear_entropy > config.entanglement_tol
