"""
Tests for the lattice conventions and exact pure-state evolution
"""
import numpy as np
import pytest
from django.test import SimpleTestCase

from walks.channels import WalkConfig
from walks.exceptions import CapacityExceeded, InvalidArgument
from walks.lattice import (
    CoinLabel,
    CoinOp,
    Distribution,
    PureState,
    coin_state,
    distribution,
    evolve_pure,
    hadamard,
    initial_state,
    step_pure,
    walk_operator,
)

INV_SQRT2 = 1 / np.sqrt(2)


def haar_coin(seed):
    """Haar-random 2x2 unitary (QR of a complex Ginibre matrix)."""
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return CoinOp(q * np.exp(-1j * np.angle(np.diag(r)))[None, :])


class CoinTest(SimpleTestCase):
    """Test coin operators and coin preparations"""

    def test_hadamard_entries(self):
        """Hadamard in coin order (-1, +1)"""
        expected = [[0.7071068, 0.7071068], [0.7071068, -0.7071068]]
        np.testing.assert_allclose(hadamard().entries, expected, atol=1e-7)

    def test_hadamard_is_involution(self):
        """H.H is the identity"""
        h = hadamard().entries
        np.testing.assert_allclose(h @ h, np.eye(2), atol=1e-15)

    def test_hadamard_column_norms(self):
        """Columns are unit vectors"""
        np.testing.assert_allclose(np.linalg.norm(hadamard().entries, axis=0), [1, 1], atol=1e-15)

    def test_non_unitary_coin_rejected(self):
        """Non-unitary matrices are invalid"""
        with self.assertRaises(InvalidArgument):
            CoinOp(np.array([[1, 1], [0, 1]]))

    def test_coin_label_index(self):
        """-1 maps to index 0, +1 to index 1"""
        self.assertEqual(CoinLabel.MINUS.index, 0)
        self.assertEqual(CoinLabel.PLUS.index, 1)
        self.assertIs(CoinLabel.from_index(1), CoinLabel.PLUS)

    def test_coin_label_parse(self):
        """Only -1 and +1 parse; 0 is an invalid argument"""
        self.assertIs(CoinLabel.parse(-1), CoinLabel.MINUS)
        self.assertIs(CoinLabel.parse(np.int64(1)), CoinLabel.PLUS)
        for bad in (0, 2, "x", None):
            with self.assertRaises(InvalidArgument):
                CoinLabel.parse(bad)

    def test_named_coin_states(self):
        """plus, minus and symmetric preparations"""
        np.testing.assert_array_equal(coin_state("plus"), [0, 1])
        np.testing.assert_array_equal(coin_state("minus"), [1, 0])
        np.testing.assert_allclose(coin_state("symmetric"), [INV_SQRT2, 1j * INV_SQRT2])
        np.testing.assert_array_equal(coin_state(CoinLabel.MINUS), [1, 0])

    def test_invalid_coin_states(self):
        """Unknown names and unnormalized vectors are rejected"""
        with self.assertRaises(InvalidArgument):
            coin_state("sideways")
        with self.assertRaises(InvalidArgument):
            coin_state([1, 1])
        with self.assertRaises(InvalidArgument):
            coin_state(0)


class InitialStateTest(SimpleTestCase):
    """Test walk preparation at the origin"""

    def test_basis_start(self):
        """Unit norm with support only at (0, +1)"""
        state = initial_state(CoinLabel.PLUS, 3)
        self.assertAlmostEqual(state.norm(), 1.0, places=14)
        self.assertEqual(state.amplitudes[3, 1], 1.0)
        self.assertEqual(np.count_nonzero(state.amplitudes), 1)
        self.assertEqual(state.time, 0)

    def test_zero_horizon(self):
        """horizon 0 holds a single site"""
        state = initial_state(-1, 0)
        self.assertEqual(state.amplitudes.shape, (1, 2))
        self.assertEqual(state.amplitudes[0, 0], 1.0)

    def test_initial_distribution_is_delta(self):
        """Born readout of the start state"""
        dist = distribution(initial_state(1, 5))
        self.assertEqual(dist.prob(0, 1), 1.0)
        self.assertEqual(dist.total(), 1.0)

    def test_negative_horizon(self):
        """horizon < 0 is invalid"""
        with self.assertRaises(InvalidArgument):
            initial_state(1, -1)

    def test_state_is_read_only(self):
        """States are immutable after construction"""
        state = initial_state(1, 2)
        with self.assertRaises(ValueError):
            state.amplitudes[0, 0] = 1.0


class StepTest(SimpleTestCase):
    """Test the structured unitary step"""

    def test_step_from_plus(self):
        """|0,+1> -> (|-1,-1> - |+1,+1>)/sqrt2"""
        state = step_pure(initial_state(1, 1), hadamard())
        expected = np.zeros((3, 2), dtype=complex)
        expected[0, 0] = INV_SQRT2
        expected[2, 1] = -INV_SQRT2
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-15)
        self.assertEqual(state.time, 1)

    def test_step_from_minus(self):
        """|0,-1> -> (|-1,-1> + |+1,+1>)/sqrt2"""
        state = step_pure(initial_state(-1, 1), hadamard())
        expected = np.zeros((3, 2), dtype=complex)
        expected[0, 0] = INV_SQRT2
        expected[2, 1] = INV_SQRT2
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-15)

    def test_two_steps(self):
        """P(-2) = 1/4, P(0) = 1/2, P(2) = 1/4"""
        state = initial_state(1, 2)
        for _ in range(2):
            state = step_pure(state, hadamard())
        marginal = distribution(state).marginal()
        np.testing.assert_allclose(marginal, [0.25, 0, 0.5, 0, 0.25], atol=1e-15)

    def test_capacity_exceeded(self):
        """A step at t = horizon would leave the lattice"""
        state = step_pure(initial_state(1, 1), hadamard())
        with self.assertRaises(CapacityExceeded):
            step_pure(state, hadamard())

    def test_norm_preserved_for_random_coins(self):
        """Any unitary coin preserves the norm"""
        for seed in range(5):
            coin = haar_coin(seed)
            state = initial_state(coin_state("symmetric"), 30)
            for _ in range(30):
                state = step_pure(state, coin)
                self.assertAlmostEqual(state.norm(), 1.0, delta=1e-12)


class EvolutionTest(SimpleTestCase):
    """Test evolve_pure and its structural invariants"""

    def test_zero_steps(self):
        """T = 0 returns the initial state"""
        state = evolve_pure(WalkConfig(T=0, initial_coin="plus"))
        np.testing.assert_array_equal(state.amplitudes, initial_state(1, 0).amplitudes)

    def test_two_steps_match_step_pure(self):
        """evolve_pure agrees with repeated step_pure"""
        marginal = distribution(evolve_pure(WalkConfig(T=2, initial_coin="plus"))).marginal()
        np.testing.assert_allclose(marginal, [0.25, 0, 0.5, 0, 0.25], atol=1e-15)

    def test_nonzero_p_rejected(self):
        """Decoherent runs belong to the master engine"""
        with self.assertRaises(InvalidArgument):
            evolve_pure(WalkConfig(T=3, p=0.1))

    def test_quantum_spread_at_T100(self):
        """sigma/T is within 3% of sqrt(1 - 1/sqrt2)"""
        dist = distribution(evolve_pure(WalkConfig(T=100, initial_coin="plus")))
        sigma = np.sqrt(dist.positions.astype(float) ** 2 @ dist.marginal())
        self.assertAlmostEqual(sigma / 100, 0.541196, delta=0.03 * 0.541196)

    def test_parity_and_lightcone_exact(self):
        """Amplitudes vanish identically off the parity/lightcone support"""
        config = WalkConfig(T=20, initial_coin="symmetric")
        state = initial_state(config.initial_coin, 20)
        for t in range(1, 21):
            state = step_pure(state, config.coin)
            x = state.positions
            forbidden = ((x + t) % 2 == 1) | (np.abs(x) > t)
            self.assertTrue(np.all(state.amplitudes[forbidden] == 0))

    def test_reflection_symmetry(self):
        """Starts |0,+1> and |0,-1> are mirror images under x -> -x, a -> -a"""
        plus = distribution(evolve_pure(WalkConfig(T=40, initial_coin="plus"))).probs
        minus = distribution(evolve_pure(WalkConfig(T=40, initial_coin="minus"))).probs
        np.testing.assert_allclose(plus[::-1, ::-1], minus, atol=1e-12)

    def test_right_mover_drifts_right(self):
        """Three steps from |0,+1>: P(1) = 5/8, mean +1/2"""
        dist = distribution(evolve_pure(WalkConfig(T=3, initial_coin="plus")))
        self.assertAlmostEqual(dist.marginal()[3 + 1], 5 / 8, places=14)
        self.assertAlmostEqual(dist.positions @ dist.marginal(), 0.5, places=14)

    def test_matches_dense_operator(self):
        """Structured evolution equals explicit U^T psi0 for T <= 8"""
        for T in range(0, 9):
            for start in ("plus", "minus", "symmetric"):
                config = WalkConfig(T=T, initial_coin=start)
                unitary = walk_operator(T, config.coin)
                psi = initial_state(config.initial_coin, T).flat()
                for _ in range(T):
                    psi = unitary @ psi
                np.testing.assert_allclose(evolve_pure(config).flat(), psi, atol=1e-12)


class DistributionTest(SimpleTestCase):
    """Test the Born readout and distribution helpers"""

    def test_one_step_readout(self):
        """(|-1,-1> - |1,+1>)/sqrt2 gives 1/2, 1/2"""
        dist = distribution(step_pure(initial_state(1, 1), hadamard()))
        self.assertAlmostEqual(dist.prob(-1, -1), 0.5, places=15)
        self.assertAlmostEqual(dist.prob(1, 1), 0.5, places=15)
        self.assertEqual(dist.prob(1, -1), 0.0)

    def test_global_phase_invariance(self):
        """e^{i theta} psi has the same distribution"""
        state = evolve_pure(WalkConfig(T=12))
        rotated = PureState(horizon=12, amplitudes=np.exp(0.7j) * state.amplitudes, time=12)
        np.testing.assert_allclose(distribution(rotated).probs, distribution(state).probs, atol=1e-15)

    def test_from_table(self):
        """Bare positions land on coin +1"""
        dist = Distribution.from_table({-1: 0.5, 1: 0.5}, time=1)
        self.assertEqual(dist.horizon, 1)
        self.assertEqual(dist.prob(-1, 1), 0.5)
        np.testing.assert_array_equal(dist.marginal(), [0.5, 0, 0.5])

    def test_invalid_coin_label(self):
        """Coin 0 is refused by prob and from_table"""
        dist = Distribution.from_table({-1: 0.5, 1: 0.5}, time=1)
        with self.assertRaises(InvalidArgument):
            dist.prob(1, 0)
        with self.assertRaises(InvalidArgument):
            Distribution.from_table({(0, 0): 1.0})

    def test_negative_probabilities_rejected(self):
        """P(x, a) >= 0"""
        with self.assertRaises(InvalidArgument):
            Distribution(horizon=0, probs=np.array([[1.5, -0.5]]))

    def test_support_rows(self):
        """Rows cover x + t even, |x| <= t, both coins"""
        dist = distribution(evolve_pure(WalkConfig(T=3)))
        rows = list(dist.support_rows())
        self.assertEqual([x for x, _, _ in rows[::2]], [-3, -1, 1, 3])
        self.assertAlmostEqual(sum(prob for _, _, prob in rows), 1.0, places=12)


@pytest.mark.parametrize("start", ["plus", "minus", "symmetric"])
def test_norm_after_long_walk(start):
    """Norm survives a 300-step walk from every preparation"""
    state = evolve_pure(WalkConfig(T=300, initial_coin=start))
    assert abs(state.norm() - 1.0) < 1e-12
