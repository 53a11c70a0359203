import os
import sys
import unittest

import numpy as np
from numpy.testing import assert_allclose

# Ensure the src folder is importable during tests
ROOT = os.path.dirname(os.path.dirname(__file__))
SRC_PATH = os.path.join(ROOT, 'src')
if SRC_PATH not in sys.path:
    sys.path.insert(0, SRC_PATH)

from errors import DimensionCapError, DimensionMismatchError, InvalidStateError, NonHermitianError
from qstate import (
    PAULIS,
    SIGMA_Y,
    Axis,
    Direction,
    LocalRotationSet,
    PureState,
    apply_local_rotations,
    bloch_vectors,
    check_qubit_cap,
    collective_spin_matrix,
    dicke_state,
    expectation,
    is_pure_entangled,
    is_symmetric,
    lambda_of,
    partial_trace,
    purity,
    su2_lift,
    total_spin_squared,
    variance,
)
from statelib import noon, random_mixed_state, random_product_state, random_pure_state, random_rotation


class TestStates(unittest.TestCase):
    def test_unnormalized_amplitudes_rejected(self):
        with self.assertRaises(InvalidStateError):
            PureState(1, np.array([1.0, 1.0]))

    def test_from_amplitudes_normalizes(self):
        state = PureState.from_amplitudes([1.0, 1.0])
        assert_allclose(state.amplitudes, [2 ** -0.5, 2 ** -0.5])

    def test_wrong_length(self):
        with self.assertRaises(DimensionMismatchError):
            PureState(2, np.array([1.0, 0.0]))

    def test_basis_state_bloch_vectors(self):
        vectors = bloch_vectors(PureState.basis("01"))
        assert_allclose(vectors, [[0, 0, 1], [0, 0, -1]], atol=1e-12)

    def test_direction_normalizes(self):
        d = Direction.from_vector([0, 3, 4])
        assert_allclose(d.components, [0, 0.6, 0.8])
        with self.assertRaises(InvalidStateError):
            Direction.from_vector([0, 0, 0])
        with self.assertRaises(InvalidStateError):
            Direction([1.0, 1.0, 0.0])

    def test_axis_labels(self):
        self.assertEqual(Axis.from_label("y"), Axis.Y)
        with self.assertRaises(InvalidStateError):
            Axis.from_label("w")

    def test_qubit_cap(self):
        check_qubit_cap(14)
        with self.assertRaises(DimensionCapError):
            check_qubit_cap(15)
        with self.assertRaises(DimensionCapError):
            check_qubit_cap(11, mixed=True)


class TestOperators(unittest.TestCase):
    def test_jz_on_basis_states(self):
        jz = collective_spin_matrix(2, "z")
        self.assertAlmostEqual(expectation(PureState.basis("00"), jz), 1.0)
        self.assertAlmostEqual(expectation(PureState.basis("11"), jz), -1.0)
        self.assertAlmostEqual(expectation(PureState.basis("01"), jz), 0.0)

    def test_collective_operator_hermitian(self):
        op = collective_spin_matrix(3, [1.0, 2.0, -0.5]).toarray()
        assert_allclose(op, op.conj().T)

    def test_dicke_states_have_maximal_spin(self):
        for n in (2, 3, 4, 5):
            casimir = total_spin_squared(n)
            j = n / 2
            for twice_m in range(-n, n + 1, 2):
                state = dicke_state(n, twice_m / 2)
                self.assertAlmostEqual(expectation(state, casimir), j * (j + 1), places=10)

    def test_dicke_state_amplitudes(self):
        state = dicke_state(4, 0)
        nonzero = state.amplitudes[np.abs(state.amplitudes) > 0]
        self.assertEqual(len(nonzero), 6)
        assert_allclose(nonzero, 1 / np.sqrt(6))
        with self.assertRaises(InvalidStateError):
            dicke_state(4, 0.5)

    def test_non_hermitian_expectation(self):
        op = np.array([[0, 1j], [0, 0]])
        with self.assertRaises(NonHermitianError):
            expectation(PureState.from_amplitudes([1, 1]), op)

    def test_variance_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            variance(PureState.basis("0"), collective_spin_matrix(2, "x"))


class TestReductions(unittest.TestCase):
    def test_ghz_reductions(self):
        state = noon(3)
        assert_allclose(partial_trace(state, [1]).matrix, np.eye(2) / 2, atol=1e-12)
        assert_allclose(partial_trace(state, [1, 3]).matrix, np.diag([0.5, 0, 0, 0.5]), atol=1e-12)

    def test_keep_order_is_output_order(self):
        rho = partial_trace(PureState.basis("01"), [2, 1]).matrix
        self.assertAlmostEqual(rho[2, 2].real, 1.0)

    def test_mixed_matches_pure_path(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            state = random_pure_state(4, rng)
            for keep in ([1], [2, 4], [3, 1, 2]):
                assert_allclose(partial_trace(state, keep).matrix,
                                partial_trace(state.density_matrix(), keep).matrix, atol=1e-12)

    def test_invalid_keep(self):
        with self.assertRaises(InvalidStateError):
            partial_trace(noon(3), [1, 1])
        with self.assertRaises(InvalidStateError):
            partial_trace(noon(3), [4])

    def test_lambda_matrix_reconstructs_state(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            rho = random_mixed_state(2, rng)
            assert_allclose(lambda_of(rho).reconstruct(), rho.matrix, atol=1e-12)

    def test_purity(self):
        self.assertAlmostEqual(purity(partial_trace(noon(2), [1])), 0.5)


class TestLocalRotations(unittest.TestCase):
    def test_su2_lift_conjugation(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            rot = random_rotation(rng)
            unitary = su2_lift(rot)
            for j in range(3):
                lhs = unitary.conj().T @ PAULIS[j + 1] @ unitary
                rhs = sum(rot[j, k] * PAULIS[k + 1] for k in range(3))
                assert_allclose(lhs, rhs, atol=1e-10)

    def test_su2_lift_sign_convention(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            unitary = su2_lift(random_rotation(rng))
            self.assertGreaterEqual(unitary[0, 0].real, -1e-12)

    def test_bloch_vectors_rotate(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            state = random_product_state(3, rng)
            rotations = [random_rotation(rng) for _ in range(3)]
            rotated = apply_local_rotations(state, LocalRotationSet(tuple(rotations)))
            before = bloch_vectors(state)
            after = bloch_vectors(rotated)
            for k in range(3):
                assert_allclose(after[k], rotations[k] @ before[k], atol=1e-10)

    def test_improper_rotation_rejected(self):
        with self.assertRaises(InvalidStateError):
            LocalRotationSet((np.diag([1.0, 1.0, -1.0]),))

    def test_rotation_count_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            apply_local_rotations(noon(3), LocalRotationSet.identity(2))

    def test_y_rotation_maps_z_to_x(self):
        # quarter turn about y takes +z to +x
        rot = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]])
        rotated = apply_local_rotations(PureState.basis("0"), LocalRotationSet((rot,)))
        assert_allclose(bloch_vectors(rotated)[0], [1, 0, 0], atol=1e-12)
        self.assertAlmostEqual(expectation(rotated, SIGMA_Y), 0.0)


class TestPredicates(unittest.TestCase):
    def test_symmetry(self):
        self.assertTrue(is_symmetric(dicke_state(4, 1)))
        self.assertTrue(is_symmetric(noon(5)))
        self.assertFalse(is_symmetric(PureState.basis("01")))

    def test_entanglement(self):
        self.assertTrue(is_pure_entangled(noon(2)))
        self.assertFalse(is_pure_entangled(PureState.basis("010")))
        rng = np.random.default_rng(2)
        self.assertFalse(is_pure_entangled(random_product_state(4, rng)))


class TestInvariants(unittest.TestCase):
    def test_variance_is_second_moment_minus_mean_squared(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            n = int(rng.integers(1, 4))
            op = collective_spin_matrix(n, rng.normal(size=3)).toarray()
            for state in (random_pure_state(n, rng), random_mixed_state(n, rng)):
                mean = expectation(state, op)
                self.assertAlmostEqual(variance(state, op), expectation(state, op @ op) - mean ** 2, places=10)

    def test_collective_spin_commutes_with_casimir(self):
        rng = np.random.default_rng(14)
        for n in (2, 3, 4, 5):
            jn = collective_spin_matrix(n, rng.normal(size=3))
            casimir = total_spin_squared(n)
            commutator = (jn @ casimir - casimir @ jn).toarray()
            self.assertLess(np.max(np.abs(commutator)), 1e-10)

    def test_composed_partial_traces(self):
        rng = np.random.default_rng(15)
        for _ in range(5):
            state = random_pure_state(4, rng)
            direct = partial_trace(state, [1, 4]).matrix
            # drop qubit 2 first, or qubit 3 first; qubits are renumbered after each trace
            via_134 = partial_trace(partial_trace(state, [1, 3, 4]), [1, 3]).matrix
            via_124 = partial_trace(partial_trace(state, [1, 2, 4]), [1, 3]).matrix
            assert_allclose(via_134, direct, atol=1e-12)
            assert_allclose(via_124, direct, atol=1e-12)

    def test_common_rotation_moves_collective_mean(self):
        rng = np.random.default_rng(16)
        for _ in range(10):
            n = int(rng.integers(1, 5))
            state = random_pure_state(n, rng)
            rot = random_rotation(rng)
            n_vec = Direction.from_vector(rng.normal(size=3)).components
            rotated = apply_local_rotations(state, LocalRotationSet.common(rot, n))
            self.assertAlmostEqual(expectation(rotated, collective_spin_matrix(n, n_vec)),
                                   expectation(state, collective_spin_matrix(n, rot.T @ n_vec)), places=10)



if __name__ == '__main__':
    unittest.main()
