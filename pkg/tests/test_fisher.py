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

from errors import InvalidStateError, NonHermitianError, QfiError
from fisher import (
    Povm,
    classical_fisher,
    cramer_rao,
    evolve,
    heisenberg_limit,
    heisenberg_limit_total,
    outcome_probabilities,
    qfi_mixed,
    qfi_pure,
    separable_bound,
    shot_noise_limit,
)
from qstate import SIGMA_Y, Direction, MixedState, PureState, collective_spin_matrix
from statelib import noon, random_mixed_state, random_product_state, random_pure_state


def random_direction(rng):
    return Direction.from_vector(rng.normal(size=3))


class TestQuantumFisher(unittest.TestCase):
    def test_noon_reaches_heisenberg(self):
        for n in range(2, 7):
            self.assertAlmostEqual(qfi_pure(noon(n), collective_spin_matrix(n, "z")), n ** 2, places=9)

    def test_pure_and_mixed_formulas_agree(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            n = int(rng.integers(1, 4))
            state = random_pure_state(n, rng)
            generator = collective_spin_matrix(n, random_direction(rng))
            assert_allclose(qfi_mixed(state.density_matrix(), generator), qfi_pure(state, generator),
                            atol=1e-8)

    def test_convexity(self):
        rng = np.random.default_rng(22)
        for _ in range(30):
            n = int(rng.integers(1, 4))
            rho1 = random_mixed_state(n, rng, rank=int(rng.integers(1, 2 ** n + 1)))
            rho2 = random_mixed_state(n, rng)
            p = float(rng.uniform())
            mixture = MixedState.mixture([rho1, rho2], [p, 1 - p])
            generator = collective_spin_matrix(n, random_direction(rng))
            bound = p * qfi_mixed(rho1, generator) + (1 - p) * qfi_mixed(rho2, generator)
            self.assertLessEqual(qfi_mixed(mixture, generator), bound + 1e-8)

    def test_product_states_stay_below_shot_noise(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            n = int(rng.integers(1, 5))
            state = random_product_state(n, rng)
            value = qfi_pure(state, collective_spin_matrix(n, random_direction(rng)))
            self.assertLessEqual(value, separable_bound(n) + 1e-9)

    def test_non_hermitian_generator(self):
        with self.assertRaises(NonHermitianError):
            qfi_mixed(PureState.basis("0"), np.array([[0, 1], [0, 0]]))


class TestClassicalFisher(unittest.TestCase):
    def test_plus_state_measured_along_y(self):
        plus = PureState.from_amplitudes([1, 1])
        jz = collective_spin_matrix(1, "z")
        value = classical_fisher(plus, jz, Povm.from_observable(SIGMA_Y), 0.0)
        self.assertAlmostEqual(value, 1.0, places=10)
        self.assertAlmostEqual(qfi_pure(plus, jz), 1.0, places=10)

    def test_zero_probability_outcome_skipped(self):
        zero = PureState.basis("0")
        jx = collective_spin_matrix(1, "x")
        povm = Povm.projective(np.eye(2))
        self.assertAlmostEqual(classical_fisher(zero, jx, povm, 0.0), 0.0)

    def test_bounded_by_quantum_fisher(self):
        rng = np.random.default_rng(24)
        for _ in range(30):
            n = int(rng.integers(1, 3))
            state = random_mixed_state(n, rng)
            generator = collective_spin_matrix(n, random_direction(rng))
            povm = Povm.random(2 ** n, int(rng.integers(2, 6)), rng)
            theta = float(rng.uniform(-np.pi, np.pi))
            self.assertLessEqual(classical_fisher(state, generator, povm, theta),
                                 qfi_mixed(state, generator) + 1e-8)

    def test_invalid_povm(self):
        with self.assertRaises(InvalidStateError):
            Povm((np.eye(2), np.eye(2)))

    def test_evolution_paths_agree(self):
        rng = np.random.default_rng(25)
        state = random_pure_state(3, rng)
        generator = collective_spin_matrix(3, "y")
        sparse = evolve(state, generator, 0.7)
        dense = evolve(state, generator.toarray(), 0.7)
        self.assertTrue(sparse.equals_up_to_phase(dense))
        mixed = evolve(state.density_matrix(), generator, 0.7)
        assert_allclose(mixed.matrix, dense.density_matrix().matrix, atol=1e-10)


class TestBounds(unittest.TestCase):
    def test_cramer_rao(self):
        self.assertAlmostEqual(cramer_rao(4.0, 4).delta_theta, 0.25)
        self.assertTrue(cramer_rao(0.0).infinite)
        with self.assertRaises(QfiError):
            cramer_rao(-1.0)
        with self.assertRaises(QfiError):
            cramer_rao(1.0, 0)

    def test_limits(self):
        self.assertAlmostEqual(shot_noise_limit(4), 0.5)
        self.assertAlmostEqual(heisenberg_limit(1, 4), 0.25)
        self.assertAlmostEqual(heisenberg_limit(4, 4), 0.125)
        self.assertAlmostEqual(heisenberg_limit_total(8), 0.125)
        self.assertEqual(separable_bound(5), 5.0)


class TestEvolutionInvariants(unittest.TestCase):
    def test_derivative_matches_central_difference(self):
        rng = np.random.default_rng(26)
        step = 1e-5
        for _ in range(10):
            n = int(rng.integers(1, 3))
            state = random_mixed_state(n, rng)
            generator = collective_spin_matrix(n, random_direction(rng))
            povm = Povm.random(2 ** n, 3, rng)
            theta = float(rng.uniform(-np.pi, np.pi))
            _, derivs = outcome_probabilities(state, generator, povm, theta)
            plus, _ = outcome_probabilities(state, generator, povm, theta + step)
            minus, _ = outcome_probabilities(state, generator, povm, theta - step)
            assert_allclose(derivs, (plus - minus) / (2 * step), atol=1e-7)

    def test_qfi_unchanged_by_phase_evolution(self):
        rng = np.random.default_rng(27)
        for _ in range(10):
            n = int(rng.integers(1, 4))
            generator = collective_spin_matrix(n, random_direction(rng))
            theta = float(rng.uniform(-np.pi, np.pi))
            pure = random_pure_state(n, rng)
            self.assertAlmostEqual(qfi_pure(evolve(pure, generator, theta), generator),
                                   qfi_pure(pure, generator), places=9)
            mixed = random_mixed_state(n, rng)
            self.assertAlmostEqual(qfi_mixed(evolve(mixed, generator, theta), generator),
                                   qfi_mixed(mixed, generator), places=8)



if __name__ == '__main__':
    unittest.main()
