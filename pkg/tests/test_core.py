import math

import numpy as np
import pytest

from qusense.core import (
    DimensionVector,
    InvariantError,
    MixedState,
    PureState,
    apply_gate,
    digits_to_index,
    index_to_digits,
    measure_distribution,
    partial_trace,
    purity,
    sample_outcomes,
)
from qusense.gates import chrestenson, custom, phase_rotation


def random_pure(dims, rng):
    n = math.prod(dims)
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return PureState(dims, v / np.linalg.norm(v))


def random_mixed(dims, rng, rank=3):
    n = math.prod(dims)
    a = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = a @ a.conj().T
    return MixedState(dims, rho / np.trace(rho).real)


def random_unitary(d, rng):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestDimensionVector:
    def test_size_and_weights(self):
        dv = DimensionVector((3, 2, 2))
        assert dv.size == 12
        assert dv.place_weights() == (4, 2, 1)

    def test_rejects_small_dims(self):
        with pytest.raises(ValueError):
            DimensionVector((3, 1))
        with pytest.raises(ValueError):
            DimensionVector(())


class TestIndexing:
    def test_zero_case(self):
        assert index_to_digits(0, (3, 2, 2)).digits == (0, 0, 0)

    def test_maximum_index(self):
        assert index_to_digits(11, (3, 2, 2)).digits == (2, 1, 1)

    def test_mid_index(self):
        # 5 = 1*4 + 0*2 + 1
        assert index_to_digits(5, (3, 2, 2)).digits == (1, 0, 1)

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            index_to_digits(12, (3, 2, 2))
        with pytest.raises(IndexError):
            index_to_digits(-1, (3, 2, 2))

    def test_brute_force_expansion(self):
        # enumerate all 12 indices against the mixed-radix expansion
        dims = (3, 2, 2)
        for flat in range(12):
            d = index_to_digits(flat, dims).digits
            assert flat == d[2] + d[1] * 2 + d[0] * 4

    def test_round_trip_randomized(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            n = rng.integers(1, 7)
            dims = tuple(int(d) for d in rng.integers(2, 6, size=n))
            size = math.prod(dims)
            flats = range(size) if size <= 64 else rng.integers(0, size, size=64)
            for flat in flats:
                r = index_to_digits(int(flat), dims)
                assert digits_to_index(r.digits, dims).flat == flat


class TestApplyGate:
    def test_identity(self):
        rng = np.random.default_rng(0)
        state = random_pure((3, 2), rng)
        out = apply_gate(state, custom(np.eye(3), (0,)))
        np.testing.assert_allclose(out.amplitudes, state.amplitudes)

    def test_chrestenson_on_qutrit_zero(self):
        state = PureState((3,), np.array([1, 0, 0], dtype=complex))
        out = apply_gate(state, chrestenson(3, 0))
        np.testing.assert_allclose(out.amplitudes, np.ones(3) / math.sqrt(3), atol=1e-12)

    def test_sequential_phases_match_matrix_product(self):
        # two Z_{pi/2} on |+> total a pi phase on |1>
        plus = PureState((2,), np.array([1, 1], dtype=complex) / math.sqrt(2))
        z = phase_rotation(math.pi / 2, 0)
        out = apply_gate(apply_gate(plus, z), z)
        oracle = (z.matrix @ z.matrix) @ plus.amplitudes
        np.testing.assert_allclose(out.amplitudes, oracle, atol=1e-12)
        np.testing.assert_allclose(out.amplitudes[1] / out.amplitudes[0], np.exp(1j * math.pi))

    def test_mixed_state_conjugation(self):
        rng = np.random.default_rng(1)
        state = random_mixed((2, 3), rng)
        u = random_unitary(3, rng)
        gate = custom(u, (1,))
        out = apply_gate(state, gate)
        full = np.kron(np.eye(2), u)
        np.testing.assert_allclose(out.rho, full @ state.rho @ full.conj().T, atol=1e-12)

    def test_dimension_mismatch(self):
        state = PureState((3,), np.array([1, 0, 0], dtype=complex))
        with pytest.raises(ValueError):
            apply_gate(state, custom(np.eye(2), (0,)))

    def test_norm_and_trace_preserved(self):
        rng = np.random.default_rng(2)
        for _ in range(25):
            dims = (2, 3, 2)
            u = random_unitary(6, rng)
            gate = custom(u, (1, 2))
            pure = apply_gate(random_pure(dims, rng), gate)
            mixed = apply_gate(random_mixed(dims, rng), gate)
            assert abs(np.linalg.norm(pure.amplitudes) - 1) < 1e-10
            assert abs(np.trace(mixed.rho).real - 1) < 1e-10

    def test_disjoint_gates_commute(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            dims = (2, 3, 2)
            state = random_pure(dims, rng)
            g1 = custom(random_unitary(2, rng), (0,))
            g2 = custom(random_unitary(2, rng), (2,))
            a = apply_gate(apply_gate(state, g1), g2)
            b = apply_gate(apply_gate(state, g2), g1)
            assert np.linalg.norm(a.amplitudes - b.amplitudes) < 1e-10


class TestPartialTrace:
    def test_keep_everything(self):
        rng = np.random.default_rng(4)
        state = random_mixed((2, 3), rng)
        out = partial_trace(state, (0, 1))
        np.testing.assert_allclose(out.rho, state.rho, atol=1e-12)

    def test_product_state_factorizes(self):
        rng = np.random.default_rng(5)
        a = random_mixed((2,), rng)
        b = random_mixed((3,), rng)
        joint = MixedState((2, 3), np.kron(a.rho, b.rho))
        np.testing.assert_allclose(partial_trace(joint, (0,)).rho, a.rho, atol=1e-12)
        np.testing.assert_allclose(partial_trace(joint, (1,)).rho, b.rho, atol=1e-12)

    def test_bell_state_reduces_to_maximally_mixed(self):
        bell = PureState((2, 2), np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2))
        reduced = partial_trace(bell.to_mixed(), (0,))
        np.testing.assert_allclose(reduced.rho, np.eye(2) / 2, atol=1e-12)

    def test_empty_keep_rejected(self):
        rng = np.random.default_rng(6)
        with pytest.raises(ValueError):
            partial_trace(random_mixed((2, 2), rng), ())


class TestMeasurement:
    def test_eigenstate_is_delta(self):
        amps = np.zeros(12, dtype=complex)
        amps[7] = 1.0
        dist = measure_distribution(PureState((3, 2, 2), amps))
        assert dist[7] == pytest.approx(1.0)
        assert dist.sum() == pytest.approx(1.0)

    def test_uniform_superposition(self):
        state = PureState((3, 2, 2), np.ones(12, dtype=complex) / math.sqrt(12))
        np.testing.assert_allclose(measure_distribution(state), np.full(12, 1 / 12), atol=1e-12)

    def test_pure_matches_density_diagonal(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            state = random_pure((2, 3, 2), rng)
            np.testing.assert_allclose(
                measure_distribution(state),
                measure_distribution(state.to_mixed()),
                atol=1e-12,
            )


class TestSampling:
    def test_delta_distribution(self):
        dist = np.zeros(5)
        dist[3] = 1.0
        counts = sample_outcomes(dist, 1000, seed=0)
        assert counts[3] == 1000 and counts.sum() == 1000

    def test_uniform_binomial_statistics(self):
        counts = sample_outcomes(np.array([0.5, 0.5]), 10**6, seed=1)
        # 5 sigma of a fair binomial at 1e6 shots
        assert abs(counts[0] - 5 * 10**5) < 5 * 500

    def test_seed_determinism(self):
        dist = np.array([0.2, 0.3, 0.5])
        a = sample_outcomes(dist, 999, seed=42)
        b = sample_outcomes(dist, 999, seed=42)
        np.testing.assert_array_equal(a, b)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            sample_outcomes(np.array([0.5, 0.4]), 10, seed=0)
        with pytest.raises(ValueError):
            sample_outcomes(np.array([0.5, 0.5]), 0, seed=0)


class TestPurity:
    def test_pure_state(self):
        rng = np.random.default_rng(8)
        state = random_pure((2, 2), rng)
        assert purity(state.to_mixed()) == pytest.approx(1.0, abs=1e-12)

    def test_maximally_mixed(self):
        state = MixedState((3, 2, 2), np.eye(12) / 12)
        assert purity(state) == pytest.approx(1 / 12)

    def test_dephased_plus_states(self):
        # |+>^n with coherences removed keeps 2^-n
        for n in (1, 2, 3):
            rho = np.eye(2**n) / 2**n
            assert purity(MixedState((2,) * n, rho)) == pytest.approx(2.0**-n)


class TestInvariants:
    def test_norm_enforced(self):
        with pytest.raises(InvariantError):
            PureState((2,), np.array([1.0, 1.0], dtype=complex))

    def test_trace_enforced(self):
        with pytest.raises(InvariantError):
            MixedState((2,), np.eye(2))

    def test_hermiticity_enforced(self):
        rho = np.array([[0.5, 0.5], [0.1, 0.5]], dtype=complex)
        with pytest.raises(InvariantError):
            MixedState((2,), rho)
