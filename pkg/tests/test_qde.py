"""End-to-end behavior of the three determinant-estimation modes."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdet.errors import ValidationError
from qdet.linalg import TWO_PI, det_lu, haar_orthogonal, haar_unitary
from qdet.qde import (
    contraction_run,
    magnitude_estimate,
    phase_from_k,
    qde_run,
    sign_run,
)

from conftest import random_contraction


def diag_phase(n, k0, t):
    d = np.ones(n, dtype=complex)
    d[0] = np.exp(2j * math.pi * k0 / 2**t)
    return np.diag(d)


def circular_distance(a, b):
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


class TestPhaseFromK:
    def test_zero(self):
        assert phase_from_k(0, 5) == 0.0

    def test_half_turn(self):
        assert phase_from_k(1, 1) == pytest.approx(math.pi)

    def test_three_eighths(self):
        assert phase_from_k(3, 3) == pytest.approx(3 * math.pi / 4)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValidationError):
            phase_from_k(8, 3)
        with pytest.raises(ValidationError):
            phase_from_k(-1, 3)


class TestQdeRun:
    def test_identity_matrix_reads_zero(self):
        result = qde_run(np.eye(2), t=3, shots=150, seed=4)
        assert result.phase.k_prime == 0
        assert result.phase.frequencies() == {0: 1.0}

    def test_dyadic_quarter_phase(self):
        result = qde_run(np.diag([1.0, np.exp(1j * math.pi / 2)]), t=2, shots=100, seed=4)
        assert result.phase.k_prime == 1
        assert result.phase.frequencies() == {1: 1.0}
        assert result.phase.phi_hat == pytest.approx(math.pi / 2)

    def test_non_dyadic_phase_concentrates_on_nearest(self):
        # phi = 2*pi*0.3 at t = 3: nearest 3-bit value is k = 2 (0.25).
        result = qde_run(np.diag([np.exp(2j * math.pi * 0.3), 1.0]), t=3, shots=500, seed=9)
        exact_mode = int(np.argmax(result.exact_distribution))
        assert exact_mode == 2
        assert result.exact_distribution[2] >= 4.0 / math.pi**2

    def test_rejects_non_unitary(self):
        with pytest.raises(ValidationError):
            qde_run(0.5 * np.eye(2), t=2, shots=10, seed=0)

    def test_counters(self):
        result = qde_run(haar_unitary(4, 3), t=3, shots=10, seed=0)
        assert result.counters.controlled_slot_applications == 3 * 4

    def test_deterministic_histogram(self):
        u = haar_unitary(2, 8)
        a = qde_run(u, t=4, shots=300, seed=11)
        b = qde_run(u, t=4, shots=300, seed=11)
        assert a.phase.histogram == b.phase.histogram


class TestOracleAgreement:
    @pytest.mark.parametrize("n,t", [(2, 5), (4, 5)])
    def test_modal_estimate_within_one_grid_step(self, n, t):
        for seed in range(20):
            u = haar_unitary(n, 1000 + seed)
            phi = det_lu(u).phase
            result = qde_run(u, t=t, shots=1, seed=seed)
            exact_mode = int(np.argmax(result.exact_distribution))
            assert circular_distance(phase_from_k(exact_mode, t), phi) <= TWO_PI / 2**t + 1e-9

    def test_dyadic_phases_read_exactly_after_conjugation(self):
        t = 3
        for k0 in range(2**t):
            v = haar_unitary(2, 50 + k0)
            u = v @ np.diag([np.exp(2j * math.pi * k0 / 2**t), 1.0]) @ v.conj().T
            result = qde_run(u, t=t, shots=50, seed=k0)
            assert result.phase.k_prime == k0
            assert result.exact_distribution[k0] >= 1.0 - 1e-9


class TestSignRun:
    def test_identity(self):
        result = sign_run(np.eye(2), shots=25, seed=1)
        assert result.sign == 1 and result.unanimous

    def test_transposition(self):
        result = sign_run(np.array([[0.0, 1.0], [1.0, 0.0]]), shots=25, seed=1)
        assert result.sign == -1 and result.unanimous

    @pytest.mark.parametrize("n", [2, 4])
    def test_matches_oracle_sign(self, n):
        for seed in range(25):
            o = haar_orthogonal(n, 2000 + seed)
            oracle_sign = 1 if det_lu(o).value.real > 0 else -1
            result = sign_run(o, shots=20, seed=seed)
            assert result.sign == oracle_sign
            assert result.unanimous

    def test_exact_certainty(self):
        for seed in range(10):
            result = sign_run(haar_orthogonal(4, 3000 + seed), shots=5, seed=seed)
            assert abs(result.majority_probability - 1.0) <= 1e-12

    def test_rejects_complex_input(self):
        with pytest.raises(ValidationError):
            sign_run(haar_unitary(2, 5), shots=10, seed=0)

    def test_rejects_non_orthogonal(self):
        with pytest.raises(ValidationError):
            sign_run(np.array([[1.0, 1.0], [0.0, 1.0]]), shots=10, seed=0)


class TestContractionRun:
    def test_unitary_input_always_accepts(self):
        result = contraction_run(np.eye(2), t=2, shots=500, seed=3)
        assert result.acceptance_rate == 1.0
        assert result.exact_acceptance == pytest.approx(1.0, abs=1e-12)
        assert result.phase.k_prime == 0
        assert not result.no_accepted_shots

    def test_scaled_identity_acceptance_statistics(self):
        shots = 10_000
        result = contraction_run(0.9 * np.eye(2), t=2, shots=shots, seed=17)
        p = 0.81 ** (2 * (2**2 - 1))
        assert result.predicted_acceptance == pytest.approx(p, abs=1e-12)
        assert result.exact_acceptance == pytest.approx(p, abs=1e-9)
        assert abs(result.acceptance_rate - p) <= 3.0 * math.sqrt(p * (1 - p) / shots)
        assert abs(result.magnitude_estimate - 0.81) <= 0.02

    def test_postselected_phase_point_mass(self):
        a = 0.95 * np.exp(1j * math.pi / 4) * np.eye(2)
        result = contraction_run(a, t=2, shots=3000, seed=23)
        # arg det = pi/2, the k = 1 grid point at t = 2.
        assert set(result.phase.histogram) == {1}
        assert result.exact_conditioned_distribution[1] >= 1.0 - 1e-9

    def test_zero_matrix_never_accepts(self):
        result = contraction_run(np.zeros((2, 2)), t=2, shots=200, seed=5)
        assert result.accepted == 0
        assert result.no_accepted_shots
        assert result.phase.histogram == {}
        assert result.phase.k_prime is None
        assert result.magnitude_estimate == 0.0
        assert result.exact_acceptance == 0.0

    def test_vanishing_determinant_rejects_without_error(self):
        # |det| = 1e-160, so the first stage's zero branch underflows; the run
        # must report universal rejection, not raise.
        result = contraction_run(1e-80 * np.eye(2), t=3, shots=50, seed=2)
        assert result.no_accepted_shots
        assert result.exact_acceptance == 0.0

    def test_rejects_expanding_matrix(self):
        with pytest.raises(ValidationError):
            contraction_run(1.2 * np.eye(2), t=2, shots=10, seed=0)

    def test_exact_acceptance_matches_product_law(self):
        # Exact (non-sampled) acceptance equals |det A|^(2*(2^t - 1)).
        for t in (1, 2, 3):
            for seed in range(5):
                a = random_contraction(2, 4000 + seed)
                result = contraction_run(a, t=t, shots=1, seed=seed)
                expected = det_lu(a).magnitude ** (2 * (2**t - 1))
                assert result.exact_acceptance == pytest.approx(expected, abs=1e-9)

    def test_conditioned_distribution_matches_phase_only_unitary(self):
        # Conditioned on all-zero ancillas the phase register is distributed
        # exactly as a unitary-mode run at phase arg det(A).
        t = 2
        for seed in range(5):
            a = random_contraction(2, 4100 + seed)
            phi = det_lu(a).phase
            contraction = contraction_run(a, t=t, shots=1, seed=seed)
            unitary_mode = qde_run(np.diag([np.exp(1j * phi), 1.0]), t=t, shots=1, seed=seed)
            assert np.max(
                np.abs(contraction.exact_conditioned_distribution - unitary_mode.exact_distribution)
            ) <= 1e-9

    def test_deterministic_for_fixed_seed(self):
        a = random_contraction(2, 4242)
        r1 = contraction_run(a, t=2, shots=800, seed=77)
        r2 = contraction_run(a, t=2, shots=800, seed=77)
        assert r1.accepted == r2.accepted
        assert r1.phase.histogram == r2.phase.histogram

    def test_four_slot_contraction(self):
        # Non-diagonal input on the larger register: 4 slots of 2 qubits plus
        # t = 2 ancillas, block encodings of dimension 512.
        a = 0.97 * haar_unitary(4, 5)
        oracle = det_lu(a)
        result = contraction_run(a, t=2, shots=300, seed=9)
        expected = oracle.magnitude ** (2 * (2**2 - 1))
        assert result.exact_acceptance == pytest.approx(expected, abs=1e-9)
        grid = TWO_PI / 4
        k_star = int(np.argmax(result.exact_conditioned_distribution))
        assert circular_distance(phase_from_k(k_star, 2), oracle.phase) <= grid / 2 + 1e-9


class TestMagnitudeEstimate:
    def test_full_acceptance(self):
        assert magnitude_estimate(500, 500, 3) == 1.0

    def test_zero_acceptance(self):
        assert magnitude_estimate(0, 500, 3) == 0.0

    def test_inverts_product_law(self):
        assert magnitude_estimate(2824, 10_000, 2) == pytest.approx(0.81, abs=0.01)

    def test_rejects_zero_attempts(self):
        with pytest.raises(ValidationError):
            magnitude_estimate(0, 0, 2)

    @given(st.integers(1, 1000), st.integers(1, 4))
    @settings(max_examples=50, deadline=None)
    def test_roundtrips_exact_rate(self, accepted, t):
        attempted = 1000
        est = magnitude_estimate(accepted, attempted, t)
        assert 0.0 <= est <= 1.0
        assert est ** (2 * (2**t - 1)) == pytest.approx(accepted / attempted, rel=1e-9)
