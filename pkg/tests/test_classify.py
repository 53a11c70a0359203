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

from classify import (
    _canonical_frame,
    classify_state,
    classify_symmetric,
    ghz_q_threshold,
    ghz_q_useful,
    locc_filter_demo,
    locc_monotonicity_check,
    symmetric_condition,
    usefulness_measure,
)
from config import QfiConfig
from errors import InvalidStateError, NotSymmetricError, SeparableStateError
from qstate import Direction, LocalRotationSet, PureState, apply_local_rotations
from statelib import (
    cabello_singlet,
    ghz_q,
    graph_state,
    noon,
    random_product_state,
    random_rotation,
    random_symmetric_state,
    ring_cluster,
    twin_fock,
)


class TestGhzFamily(unittest.TestCase):
    def test_threshold(self):
        low, high = ghz_q_threshold(4)
        self.assertAlmostEqual(low, 0.5 - 0.5 * np.sqrt(0.75))
        self.assertAlmostEqual(high, 0.5 + 0.5 * np.sqrt(0.75))
        self.assertAlmostEqual(low, 0.0670, places=4)

    def test_window(self):
        self.assertFalse(ghz_q_useful(4, 0.01))
        self.assertTrue(ghz_q_useful(4, 0.5))
        self.assertTrue(ghz_q_useful(2, 0.01))
        self.assertFalse(ghz_q_useful(2, 0.0))
        with self.assertRaises(InvalidStateError):
            ghz_q_useful(4, 1.2)

    def test_noon_detected_as_family(self):
        verdict = classify_symmetric(noon(4))
        self.assertTrue(verdict.useful_clu)
        self.assertTrue(verdict.useful_lu)
        self.assertAlmostEqual(verdict.fq_clu, 16.0)
        self.assertIsNotNone(verdict.family_detected)
        self.assertAlmostEqual(verdict.family_detected.q, 0.5)
        self.assertAlmostEqual(verdict.family_detected.phi, 0.0)

    def test_member_outside_window(self):
        verdict = classify_symmetric(ghz_q(4, 0.01))
        self.assertFalse(verdict.useful_clu)
        self.assertFalse(verdict.useful_lu)
        self.assertAlmostEqual(verdict.family_detected.q, 0.01)
        self.assertTrue(verdict.boundary)

    def test_rotated_member_is_recognized(self):
        rng = np.random.default_rng(51)
        for q in (0.3, 0.04):
            base = ghz_q(4, q, 0.7)
            rotation = random_rotation(rng)
            state = apply_local_rotations(base, LocalRotationSet.common(rotation, 4))
            verdict = classify_symmetric(state)
            self.assertIsNotNone(verdict.family_detected)
            found = verdict.family_detected.q
            self.assertLess(min(abs(found - q), abs(found - (1 - q))), 1e-8)
            self.assertEqual(verdict.useful_clu, ghz_q_useful(4, q))

    def test_two_qubit_states_are_useful(self):
        for q in (0.05, 0.5, 0.9):
            self.assertTrue(classify_state(ghz_q(2, q)).useful_clu)


class TestSymmetricClassification(unittest.TestCase):
    def test_twin_fock_witness(self):
        state = twin_fock(4)
        verdict = classify_symmetric(state)
        self.assertTrue(verdict.useful_clu)
        self.assertIsNone(verdict.family_detected)
        self.assertIsNotNone(verdict.witness_direction)
        self.assertAlmostEqual(verdict.witness_direction.components[2], 0.0)
        self.assertTrue(symmetric_condition(state, verdict.witness_direction))
        self.assertFalse(symmetric_condition(state, Direction.along("z")))

    def test_agrees_with_collective_optimum(self):
        rng = np.random.default_rng(52)
        for _ in range(30):
            n = int(rng.integers(3, 7))
            verdict = classify_symmetric(random_symmetric_state(n, rng), restarts=2, seed=0)
            self.assertEqual(verdict.useful_clu, verdict.fq_clu > n + 1e-9)
            self.assertEqual(verdict.useful_clu, verdict.useful_lu)

    def test_rejects_inputs(self):
        with self.assertRaises(NotSymmetricError):
            classify_symmetric(cabello_singlet(4))
        with self.assertRaises(SeparableStateError):
            classify_symmetric(PureState.basis("000"))

    def test_small_bloch_vector_threshold(self):
        s = np.array([0.0, 0.0, 1e-6])
        corr = np.diag([0.5, 0.3, 0.2])
        for config in (QfiConfig(), QfiConfig(entanglement_tol=1e-3)):
            rotation, _ = _canonical_frame(s, corr, config)
            assert_allclose(rotation @ np.array([0.0, 0.0, 1.0]), [0, 0, 1], atol=1e-12)
            assert_allclose(np.abs(rotation @ np.array([1.0, 0.0, 0.0])), [1, 0, 0], atol=1e-12)
        # below bloch_zero_tol the leading correlation axis is sent to z
        rotation, _ = _canonical_frame(s, corr, QfiConfig(bloch_zero_tol=1e-3))
        assert_allclose(np.abs(rotation @ np.array([1.0, 0.0, 0.0])), [0, 0, 1], atol=1e-12)


class TestGeneralClassification(unittest.TestCase):
    def test_ghz_q_report_values(self):
        verdict = classify_state(ghz_q(6, 0.02))
        self.assertFalse(verdict.useful_lu)
        self.assertAlmostEqual(verdict.lu_upper, 6.0, places=9)

    def test_ring_cluster_is_not_useful(self):
        verdict = classify_state(graph_state(ring_cluster(5)))
        self.assertFalse(verdict.useful_lu)
        self.assertTrue(verdict.lu_certified)
        self.assertTrue(verdict.boundary)

    def test_product_state(self):
        verdict = classify_state(random_product_state(3, np.random.default_rng(53)))
        self.assertFalse(verdict.useful_clu)
        self.assertFalse(verdict.useful_lu)

    def test_singlet_uses_local_rotations(self):
        verdict = classify_state(cabello_singlet(4))
        self.assertFalse(verdict.useful_clu)
        self.assertTrue(verdict.useful_lu)

    def test_usefulness_measure(self):
        bracket = usefulness_measure(noon(4))
        self.assertAlmostEqual(bracket.lower, 12.0, places=7)
        self.assertGreaterEqual(bracket.upper, bracket.lower)
        self.assertAlmostEqual(usefulness_measure(ghz_q(4, 0.05)).lower, 0.0, places=9)


class TestLocc(unittest.TestCase):
    def test_filter_outcomes(self):
        q = 0.2
        outcome = locc_filter_demo(4, q)
        self.assertAlmostEqual(outcome.branch1.probability, 2 * q * (1 - q))
        self.assertAlmostEqual(outcome.branch1.probability + outcome.branch2.probability, 1.0)
        self.assertTrue(outcome.branch1.state.equals_up_to_phase(noon(4)))
        completeness = sum(k.conj().T @ k for k in outcome.kraus)
        assert_allclose(completeness, np.eye(2), atol=1e-12)

    def test_filter_increases_average_usefulness(self):
        q = 0.05
        check = locc_monotonicity_check(4, q)
        self.assertAlmostEqual(check.e_input, 0.0, places=9)
        self.assertAlmostEqual(check.e_average, 2 * q * (1 - q) * 12.0, places=6)
        self.assertTrue(check.violated)

    def test_invalid_filter(self):
        with self.assertRaises(InvalidStateError):
            locc_filter_demo(4, 0.0)

    def test_filter_probabilities_at_small_q(self):
        outcome = locc_filter_demo(4, 0.02)
        self.assertAlmostEqual(outcome.branch1.probability, 0.0392, places=12)
        self.assertAlmostEqual(outcome.branch2.probability, 0.9608, places=12)
        self.assertTrue(outcome.branch1.state.equals_up_to_phase(noon(4)))
        check = locc_monotonicity_check(4, 0.02)
        self.assertLess(check.e_input, check.e_average)
        self.assertTrue(check.violated)


if __name__ == '__main__':
    unittest.main()
