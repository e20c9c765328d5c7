import math

import numpy as np
import pytest

from qusense.core import CapacityError, PureState
from qusense.gates import (
    Circuit,
    apply_circuit,
    chrestenson,
    chrestenson_matrix,
    circuit_from_json,
    circuit_to_json,
    circuit_unitary,
    controlled_phase,
    crot,
    custom,
    dft_matrix,
    digit_reversal_permutation,
    hadamard,
    phase_rotation,
    synthesize_inverse_qft,
    synthesize_qft,
    y_rotation_hadamard,
)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def reference_dft(n):
    # independent construction, written out rather than reusing dft_matrix
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return np.exp(2j * np.pi * j * k / n) / np.sqrt(n)


class TestChrestenson:
    def test_d2_is_hadamard(self):
        np.testing.assert_allclose(chrestenson_matrix(2), HADAMARD, atol=1e-15)

    def test_d3_rows(self):
        w = np.exp(2j * np.pi / 3)
        expected = np.array([[1, 1, 1], [1, w, w**2], [1, w**2, w]]) / math.sqrt(3)
        np.testing.assert_allclose(chrestenson_matrix(3), expected, atol=1e-15)

    def test_d4_equals_dft(self):
        np.testing.assert_allclose(chrestenson_matrix(4), reference_dft(4), atol=1e-15)

    def test_rejects_d1(self):
        with pytest.raises(ValueError):
            chrestenson_matrix(1)

    def test_y_rotation_variant_differs_by_two_signs(self):
        diff = y_rotation_hadamard(0).matrix - HADAMARD
        assert np.count_nonzero(np.abs(diff) > 1e-12) == 2


class TestDftMatrix:
    def test_size_one(self):
        np.testing.assert_allclose(dft_matrix(1), [[1.0]])

    def test_size_two_is_hadamard(self):
        np.testing.assert_allclose(dft_matrix(2), HADAMARD, atol=1e-15)

    def test_row_sums_geometric_series(self):
        f = dft_matrix(12)
        sums = f.sum(axis=1)
        assert sums[0] == pytest.approx(math.sqrt(12))
        np.testing.assert_allclose(sums[1:], 0, atol=1e-12)


class TestSynthesis:
    @pytest.mark.parametrize(
        "dims", [(2,), (3,), (2, 2), (3, 2), (3, 2, 2), (2, 2, 2, 2), (4, 3), (5, 2)]
    )
    def test_matches_dft_oracle(self, dims):
        u = circuit_unitary(synthesize_qft(dims))
        perm = digit_reversal_permutation(dims)
        oracle = reference_dft(math.prod(dims))[:, perm]
        assert np.linalg.norm(u - oracle) < 1e-9

    def test_single_qubit_is_hadamard(self):
        circuit = synthesize_qft((2,))
        assert len(circuit) == 1
        np.testing.assert_allclose(circuit.ops[0].matrix, HADAMARD, atol=1e-15)

    def test_single_qutrit_is_chrestenson(self):
        circuit = synthesize_qft((3,))
        assert len(circuit) == 1
        np.testing.assert_allclose(circuit.ops[0].matrix, chrestenson_matrix(3), atol=1e-15)

    def test_twelve_level_gate_sequence(self):
        # qutrit + 2 qubits: C, H + Z_{pi/3} control, H + Z_{pi/2} + Z_{pi/6} controls
        circuit = synthesize_qft((3, 2, 2))
        kinds = [(op.kind, op.targets, op.theta) for op in circuit.ops]
        assert kinds == [
            ("hadamard", (2,), None),
            ("controlled_phase", (1, 2), math.pi / 2),
            ("controlled_phase", (0, 2), math.pi / 6),
            ("hadamard", (1,), None),
            ("controlled_phase", (0, 1), math.pi / 3),
            ("chrestenson", (0,), None),
        ]

    def test_gate_count_quadratic(self):
        for dims in [(2,) * n for n in range(1, 7)]:
            n = len(dims)
            circuit = synthesize_qft(dims)
            assert len(circuit) == n + n * (n - 1) // 2

    def test_randomized_small_registers(self):
        rng = np.random.default_rng(17)
        for _ in range(40):
            n = int(rng.integers(1, 5))
            dims = tuple(int(d) for d in rng.integers(2, 5, size=n))
            if math.prod(dims) > 64:
                continue
            u = circuit_unitary(synthesize_qft(dims))
            perm = digit_reversal_permutation(dims)
            assert np.linalg.norm(u - reference_dft(math.prod(dims))[:, perm]) < 1e-9

    def test_parseval(self):
        rng = np.random.default_rng(23)
        dims = (3, 2, 2)
        circuit = synthesize_qft(dims)
        for _ in range(10):
            v = rng.normal(size=12) + 1j * rng.normal(size=12)
            state = PureState(dims, v / np.linalg.norm(v))
            out = apply_circuit(state, circuit)
            assert abs(np.linalg.norm(out.amplitudes) - 1) < 1e-12


class TestInverse:
    def test_inverse_times_forward_is_identity(self):
        dims = (3, 2, 2)
        u = circuit_unitary(synthesize_qft(dims))
        ui = circuit_unitary(synthesize_inverse_qft(dims))
        assert np.linalg.norm(ui @ u - np.eye(12)) < 1e-9

    def test_single_qubit_self_inverse(self):
        np.testing.assert_allclose(
            circuit_unitary(synthesize_inverse_qft((2,))), HADAMARD, atol=1e-15
        )

    def test_fourier_state_maps_to_basis_state(self):
        # matrix-vector oracle: QFT+ on the k-th Fourier column gives a basis state
        dims = (2, 2, 2)
        ui = circuit_unitary(synthesize_inverse_qft(dims))
        perm = digit_reversal_permutation(dims)
        f = reference_dft(8)
        for k in range(8):
            out = ui @ f[:, k]
            hit = int(np.argmax(np.abs(out)))
            assert abs(out[hit]) == pytest.approx(1.0, abs=1e-12)
            assert perm[hit] == k


class TestCircuitUnitary:
    def test_empty_circuit(self):
        np.testing.assert_allclose(circuit_unitary(Circuit((2, 2), ())), np.eye(4))

    def test_full_space_custom(self):
        rng = np.random.default_rng(5)
        z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        q, _ = np.linalg.qr(z)
        np.testing.assert_allclose(
            circuit_unitary(Circuit((2, 2), (custom(q, (0, 1)),))), q, atol=1e-12
        )

    def test_two_qubit_qft_vs_direct_dft(self):
        u = circuit_unitary(synthesize_qft((2, 2)))
        perm = digit_reversal_permutation((2, 2))
        np.testing.assert_allclose(u, reference_dft(4)[:, perm], atol=1e-12)

    def test_capacity_error(self):
        with pytest.raises(CapacityError):
            circuit_unitary(Circuit((2,) * 13, ()))


class TestGateOps:
    def test_non_unitary_rejected(self):
        with pytest.raises(ValueError):
            custom(np.array([[1, 0], [0, 2]]), (0,))

    def test_controlled_phase_ladder(self):
        g = controlled_phase(0, 1, math.pi / 3, d_control=3, d_target=2)
        diag = np.diag(g.matrix)
        for a in range(3):
            for b in range(2):
                assert diag[2 * a + b] == pytest.approx(np.exp(1j * math.pi / 3 * a * b))

    def test_controlled_phase_single_value(self):
        g = controlled_phase(0, 1, math.pi / 2, d_control=3, d_target=2, control_value=2)
        diag = np.diag(g.matrix)
        assert diag[2 * 2 + 1] == pytest.approx(np.exp(1j * math.pi / 2))
        assert diag[2 * 1 + 1] == pytest.approx(1.0)

    def test_crot_is_controlled_not_at_pi(self):
        g = crot(0, 1)
        amps = np.zeros(4, dtype=complex)
        amps[2] = 1.0  # |10>
        out = np.abs(g.matrix @ amps) ** 2
        assert out[3] == pytest.approx(1.0)

    def test_theta_not_reduced_mod_two_pi(self):
        g = phase_rotation(5 * math.pi, 0)
        assert g.theta == pytest.approx(5 * math.pi)


class TestSerialization:
    def test_round_trip(self):
        circuit = synthesize_qft((3, 2, 2))
        text = circuit_to_json(circuit)
        back = circuit_from_json(text)
        np.testing.assert_allclose(
            circuit_unitary(back), circuit_unitary(circuit), atol=1e-12
        )
        assert circuit_to_json(back) == text

    def test_inverse_round_trip(self):
        circuit = synthesize_inverse_qft((3, 2))
        back = circuit_from_json(circuit_to_json(circuit))
        np.testing.assert_allclose(
            circuit_unitary(back), circuit_unitary(circuit), atol=1e-12
        )

    def test_custom_gate_rejected(self):
        circuit = Circuit((2,), (custom(np.eye(2), (0,)),))
        with pytest.raises(ValueError):
            circuit_to_json(circuit)

    def test_field_order_stable(self):
        text = circuit_to_json(synthesize_qft((2, 2)))
        assert text.index('"dims"') < text.index('"ops"')
        assert '"kind"' in text and '"targets"' in text
