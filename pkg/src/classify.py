"""Usefulness of pure states for sub-shot-noise interferometry.

A state is useful when some admissible generator gives F_Q > N. Symmetric
pure states are decided exactly: every entangled one is useful under
collective rotations except members of the family
sqrt(q)|0...0> + e^{i phi} sqrt(1-q)|1...1> with q outside a window around
1/2, and local rotations never beat the collective optimum. Other states get
a lower/upper bracket from the local covariance matrix.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np
from scipy.spatial.transform import Rotation

from config import DEFAULT_CONFIG, QfiConfig
from covariance import LuOptimum, best_clu, gamma_c, gamma_r, lu_optimize
from errors import InvalidStateError, NotSymmetricError, SeparableStateError
from qstate import (
    Direction,
    LocalRotationSet,
    PureState,
    State,
    apply_local_rotations,
    apply_single_qubit,
    bloch_vectors,
    is_pure_entangled,
    is_symmetric,
    lambda_of,
    partial_trace,
)
from statelib import ghz_q


@dataclass(frozen=True)
class GhzFamily:
    q: float
    phi: float


@dataclass(frozen=True, eq=False)
class UsefulnessVerdict:
    n_qubits: int
    useful_clu: bool
    useful_lu: bool
    fq_clu: float
    fq_lu: float
    optimal_direction: Direction
    degenerate: bool
    lu_upper: float
    lu_certified: bool
    witness_direction: Optional[Direction] = None
    family_detected: Optional[GhzFamily] = None
    boundary: bool = False
    lu_optimum: Optional[LuOptimum] = None

    def __post_init__(self):
        n = self.n_qubits
        if self.useful_clu and not self.fq_clu > n:
            raise InvalidStateError("A CLU-useful verdict needs fq_clu > N")
        if self.useful_lu and not self.fq_lu > n:
            raise InvalidStateError("An LU-useful verdict needs fq_lu > N")
        if self.useful_clu and not self.useful_lu:
            raise InvalidStateError("CLU usefulness implies LU usefulness")


class UsefulnessBracket(NamedTuple):
    lower: float
    upper: float


@dataclass(frozen=True, eq=False)
class LoccBranch:
    probability: float
    state: PureState


@dataclass(frozen=True, eq=False)
class LoccOutcome:
    branch1: LoccBranch
    branch2: LoccBranch
    kraus: Tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True)
class LoccMonotonicity:
    e_input: float
    e_average: float
    violated: bool


def _single_and_pair(state: PureState, config: QfiConfig) -> Tuple[np.ndarray, np.ndarray]:
    s = bloch_vectors(partial_trace(state, [1], config=config), config=config)[0]
    corr = lambda_of(partial_trace(state, [1, 2], config=config), config=config).T
    return s, (corr + corr.T) / 2


def _require_symmetric(state: PureState, config: QfiConfig) -> None:
    if not isinstance(state, PureState) or not is_symmetric(state, config=config):
        raise NotSymmetricError("A permutation-symmetric pure state is required")
    if state.n_qubits < 2:
        raise InvalidStateError("At least two qubits are required")


def symmetric_condition(state: PureState, direction: Direction, *, config: QfiConfig = DEFAULT_CONFIG) -> bool:
    """<sigma_n sigma_n> > N/(N-1) <sigma_n>^2, i.e. F_Q[J_n] > N."""
    _require_symmetric(state, config)
    n = state.n_qubits
    s, corr = _single_and_pair(state, config)
    n_vec = direction.components
    s_n = float(s @ n_vec)
    c_nn = float(n_vec @ corr @ n_vec)
    return c_nn - n / (n - 1) * s_n ** 2 > config.condition_margin


def ghz_q_threshold(n_qubits: int) -> Tuple[float, float]:
    """q values where the family member stops being useful."""
    if n_qubits < 2:
        raise InvalidStateError(f"Need at least two qubits, got {n_qubits}")
    half_width = 0.5 * np.sqrt((n_qubits - 1) / n_qubits)
    return 0.5 - half_width, 0.5 + half_width


def ghz_q_useful(n_qubits: int, q: float, *, config: QfiConfig = DEFAULT_CONFIG) -> bool:
    """(q - 1/2)^2 < (N-1)/(4N); for two qubits every 0 < q < 1 is useful."""
    if not 0.0 <= q <= 1.0:
        raise InvalidStateError(f"q must lie in [0, 1], got {q!r}")
    if n_qubits < 2:
        raise InvalidStateError(f"Need at least two qubits, got {n_qubits}")
    if n_qubits == 2:
        return 0.0 < q < 1.0
    return (q - 0.5) ** 2 < (n_qubits - 1) / (4.0 * n_qubits) - config.ghz_margin


def _align_to(vector: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Smallest rotation taking unit `vector` onto unit `target`."""
    axis = np.cross(vector, target)
    sin_a = np.linalg.norm(axis)
    angle = np.arctan2(sin_a, float(vector @ target))
    if sin_a < 1e-15:
        return np.eye(3)
    return Rotation.from_rotvec(axis / sin_a * angle).as_matrix()


def _rotation_about_z(angle: float) -> np.ndarray:
    return Rotation.from_rotvec([0.0, 0.0, angle]).as_matrix()


def _canonical_frame(s: np.ndarray, corr: np.ndarray, config: QfiConfig) -> Tuple[np.ndarray, bool]:
    """Common rotation R bringing (s, T) to canonical form, and the family flag.

    With s != 0, s goes to +z or -z (by the sign of s_z) and the x-y block of T is
    then diagonalized with its larger eigenvector on x. With s = 0 the eigenvectors
    of T in decreasing order go to z, x, y.
    """
    s_norm = np.linalg.norm(s)
    if s_norm > config.bloch_zero_tol:
        target = np.array([0.0, 0.0, 1.0 if s[2] >= 0 else -1.0])
        rot = _align_to(s / s_norm, target)
        rotated = rot @ corr @ rot.T
        if np.max(np.abs(rotated[:2, :2])) < config.family_tol:
            return rot, True
        vals, vecs = np.linalg.eigh(rotated[:2, :2])
        lead = vecs[:, int(np.argmax(vals))]
        return _rotation_about_z(-np.arctan2(lead[1], lead[0])) @ rot, False

    vals, vecs = np.linalg.eigh(corr)
    top = vecs[:, 2] if vecs[2, 2] >= 0 else -vecs[:, 2]
    rot = np.array([vecs[:, 1], vecs[:, 0], top])
    if np.linalg.det(rot) < 0:
        rot[1] = -rot[1]
    rotated = rot @ corr @ rot.T
    logging.debug("zero Bloch vector; T eigenvalues %s", vals)
    if np.max(np.abs(rotated[:2, :2])) < config.family_tol:
        # x-y orientation is free here; keep the smallest rotation so phi is not shifted
        return _align_to(top, np.array([0.0, 0.0, 1.0])), True
    return rot, False


def _family_parameters(state: PureState, rotation: np.ndarray, config: QfiConfig) -> GhzFamily:
    rotated = apply_local_rotations(state, LocalRotationSet.common(rotation, state.n_qubits), config=config)
    a0, a1 = rotated.amplitudes[0], rotated.amplitudes[-1]
    weight = abs(a0) ** 2 + abs(a1) ** 2
    q = float(abs(a0) ** 2 / weight)
    phi = float(np.angle(a1 * np.conj(a0)))
    overlap = abs(np.vdot(ghz_q(state.n_qubits, q, phi, config=config).amplitudes, rotated.amplitudes))
    if abs(overlap - 1.0) > 1e-8:
        logging.warning("family member reconstruction is off by %.3e", abs(overlap - 1.0))
    return GhzFamily(q, phi)


def classify_symmetric(state: PureState, restarts: Optional[int] = None, seed: Optional[int] = None,
                       *, config: QfiConfig = DEFAULT_CONFIG) -> UsefulnessVerdict:
    """Exact verdict for an entangled permutation-symmetric pure state."""
    _require_symmetric(state, config)
    if not is_pure_entangled(state, config=config):
        raise SeparableStateError("classify_symmetric needs an entangled state")
    n = state.n_qubits
    clu = best_clu(gamma_c(state, config=config), config=config)

    s, corr = _single_and_pair(state, config)
    rotation, in_family = _canonical_frame(s, corr, config)
    family = None
    witness = None
    if in_family:
        family = _family_parameters(state, rotation, config)
        constructed = ghz_q_useful(n, family.q, config=config)
        logging.debug("ghz_q family member q=%.12g phi=%.6g useful=%s", family.q, family.phi, constructed)
    else:
        witness = Direction.from_vector(rotation.T @ np.array([1.0, 0.0, 0.0]))
        constructed = True

    above = clu.fq > n + config.useful_margin
    if above and not constructed:
        logging.warning("fq_clu %.12g exceeds N but the family rule says not useful", clu.fq)
    useful = constructed and above
    boundary = not above and clu.fq >= n - config.useful_margin

    lu = lu_optimize(gamma_r(state, config=config), restarts, seed, config=config)
    return UsefulnessVerdict(
        n_qubits=n,
        useful_clu=useful,
        useful_lu=useful,
        fq_clu=clu.fq,
        fq_lu=max(clu.fq, lu.best_value),
        optimal_direction=clu.direction,
        degenerate=clu.degenerate,
        lu_upper=lu.upper_bound,
        lu_certified=lu.certified,
        witness_direction=witness,
        family_detected=family,
        boundary=boundary,
        lu_optimum=lu,
    )


def classify_state(state: State, restarts: Optional[int] = None, seed: Optional[int] = None,
                   *, config: QfiConfig = DEFAULT_CONFIG) -> UsefulnessVerdict:
    """Exact verdict for symmetric entangled pure states, LU bracket otherwise."""
    if isinstance(state, PureState) and state.n_qubits >= 2 and is_symmetric(state, config=config) \
            and is_pure_entangled(state, config=config):
        return classify_symmetric(state, restarts, seed, config=config)

    n = state.n_qubits
    clu = best_clu(gamma_c(state, config=config), config=config)
    lu = lu_optimize(gamma_r(state, config=config), restarts, seed, config=config)
    separable = isinstance(state, PureState) and not is_pure_entangled(state, config=config)
    fq_lu = max(clu.fq, lu.best_value)
    useful_clu = not separable and clu.fq > n + config.useful_margin
    useful_lu = not separable and fq_lu > n + config.useful_margin
    return UsefulnessVerdict(
        n_qubits=n,
        useful_clu=useful_clu,
        useful_lu=useful_lu,
        fq_clu=clu.fq,
        fq_lu=fq_lu,
        optimal_direction=clu.direction,
        degenerate=clu.degenerate,
        lu_upper=lu.upper_bound,
        lu_certified=lu.certified,
        boundary=not useful_lu and abs(fq_lu - n) <= config.useful_margin,
        lu_optimum=lu,
    )


def usefulness_measure(state: State, restarts: Optional[int] = None, seed: Optional[int] = None,
                       *, config: QfiConfig = DEFAULT_CONFIG) -> UsefulnessBracket:
    """Bracket on e(rho) = max[0, max_LU F_Q - N]."""
    n = state.n_qubits
    lu = lu_optimize(gamma_r(state, config=config), restarts, seed, config=config)
    lower = max(0.0, lu.best_value - n)
    upper = max(lower, lu.upper_bound - n, 0.0)
    return UsefulnessBracket(lower, upper)


def locc_filter_demo(n_qubits: int, q: float, phi: float = 0.0,
                     *, config: QfiConfig = DEFAULT_CONFIG) -> LoccOutcome:
    """Local filter on qubit 1 of ghz_q(N, q, phi) that yields NOON with probability 2q(1-q)."""
    if n_qubits < 2:
        raise InvalidStateError(f"Need at least two qubits, got {n_qubits}")
    if not 0.0 < q < 1.0:
        raise InvalidStateError(f"q must lie strictly between 0 and 1, got {q!r}")
    source = ghz_q(n_qubits, q, phi, config=config)
    kraus = (
        np.diag([np.sqrt(1.0 - q), np.sqrt(q)]).astype(complex),
        np.diag([np.sqrt(q), np.sqrt(1.0 - q)]).astype(complex),
    )
    completeness = sum(k.conj().T @ k for k in kraus)
    if np.max(np.abs(completeness - np.eye(2))) > 1e-12:
        raise InvalidStateError("Kraus operators are not complete")

    branches = []
    for op in kraus:
        amps = apply_single_qubit(source.amplitudes, op, 1, n_qubits)
        prob = float(np.vdot(amps, amps).real)
        branches.append(LoccBranch(prob, PureState(n_qubits, amps / np.sqrt(prob))))
    return LoccOutcome(branches[0], branches[1], kraus)


def locc_monotonicity_check(n_qubits: int, q: float, restarts: Optional[int] = None, seed: Optional[int] = None,
                            *, config: QfiConfig = DEFAULT_CONFIG) -> LoccMonotonicity:
    """Compare e of the input with the average e after the local filter."""
    outcome = locc_filter_demo(n_qubits, q, config=config)
    e_input = usefulness_measure(ghz_q(n_qubits, q, config=config), restarts, seed, config=config).lower
    e_average = sum(
        branch.probability * usefulness_measure(branch.state, restarts, seed, config=config).lower
        for branch in (outcome.branch1, outcome.branch2)
    )
    return LoccMonotonicity(e_input, e_average, e_input < e_average - 1e-12)
