"""The three determinant-estimation modes and their measurement bookkeeping.

* `qde_run`: phase estimation of arg det(U) for unitary U.
* `sign_run`: the one-qubit variant deciding det(O) = +1 or -1 for
  orthogonal O with certainty.
* `contraction_run`: the block-encoded extension to contractions, with
  per-stage ancilla post-selection and magnitude recovery from the
  acceptance rate.

Every result carries the exact (non-sampled) distributions alongside the
sampled histograms, because the verification suite asserts exact
probabilities, not just frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .antisym import asym_state
from .errors import ValidationError, VerificationError
from .linalg import (
    TWO_PI,
    as_matrix,
    block_encode,
    det_lu,
    is_unitary,
    kron_power,
    mat_pow2,
    operator_norm,
)
from .simulator import (
    REG_PHASE,
    CostCounters,
    QubitLayout,
    ancilla_zero_probability,
    controlled_block_stage,
    controlled_power_stage,
    hadamard_layer,
    init_state,
    inverse_qft,
    load_asym,
    measure_ancilla_postselect,
    measure_register,
    register_probabilities,
    shot_rng,
)

VALIDATION_TOL = 1e-9


@dataclass(frozen=True)
class PhaseEstimate:
    """Readout of the phase register: modal value, grid phase, histogram."""

    k_prime: int | None
    t: int
    phi_hat: float | None
    histogram: dict[int, int]
    shots: int

    @classmethod
    def from_counts(cls, counts: dict[int, int], t: int) -> "PhaseEstimate":
        shots = sum(counts.values())
        if not counts:
            return cls(k_prime=None, t=t, phi_hat=None, histogram={}, shots=0)
        best = max(counts.values())
        k_prime = min(k for k, c in counts.items() if c == best)
        return cls(
            k_prime=k_prime,
            t=t,
            phi_hat=phase_from_k(k_prime, t),
            histogram=dict(sorted(counts.items())),
            shots=shots,
        )

    def frequencies(self) -> dict[int, float]:
        if self.shots == 0:
            return {}
        return {k: c / self.shots for k, c in self.histogram.items()}


@dataclass(frozen=True)
class QdeResult:
    phase: PhaseEstimate
    counters: CostCounters
    #: Exact Born distribution of the phase register, indexed by k.
    exact_distribution: np.ndarray


@dataclass(frozen=True)
class SignResult:
    sign: int
    shots: int
    unanimous: bool
    #: Exact probability of the majority outcome; 1.0 for orthogonal input.
    majority_probability: float
    counters: CostCounters


@dataclass(frozen=True)
class ContractionResult:
    accepted: int
    attempted: int
    acceptance_rate: float
    phase: PhaseEstimate
    magnitude_estimate: float
    predicted_acceptance: float
    #: Product of the exact per-stage ancilla-zero probabilities.
    exact_acceptance: float
    #: Exact phase-register distribution conditioned on all-zero ancillas,
    #: or None when that branch has zero probability.
    exact_conditioned_distribution: np.ndarray | None
    no_accepted_shots: bool
    counters: CostCounters


def phase_from_k(k: int, t: int) -> float:
    """Grid phase 2*pi*k / 2**t read off the phase register."""
    if not 0 <= k < (1 << t):
        raise ValidationError(f"register value {k} outside [0, {1 << t})")
    return TWO_PI * k / (1 << t)


def qde_run(
    u, t: int, shots: int, seed: int, *, qubit_cap: int | None = None
) -> QdeResult:
    """Full unitary-mode pipeline: estimate arg det(U) to t binary digits."""
    arr = as_matrix(u)
    if not is_unitary(arr, VALIDATION_TOL):
        raise ValidationError("input matrix is not unitary to 1e-9")
    layout = _layout(arr.shape[0], t, ancillas=False, qubit_cap=qubit_cap)
    if shots < 1:
        raise ValidationError(f"need at least one shot, got {shots}")

    sv = init_state(layout)
    load_asym(sv, asym_state(layout.n_particles))
    hadamard_layer(sv)
    for m in range(t):
        controlled_power_stage(sv, m, mat_pow2(arr, m))
    inverse_qft(sv)

    exact = register_probabilities(sv, REG_PHASE)
    counts = measure_register(sv, REG_PHASE, seed, shots)
    return QdeResult(
        phase=PhaseEstimate.from_counts(counts, t),
        counters=sv.counters,
        exact_distribution=exact,
    )


def sign_run(o, shots: int, seed: int, *, qubit_cap: int | None = None) -> SignResult:
    """Decide the determinant sign of a real orthogonal matrix.

    Runs the t = 1 circuit (Hadamard, controlled slot-wise O, Hadamard);
    the final qubit reads 0 for det +1 and 1 for det -1 with certainty, so
    any disagreement between shots means the input was not orthogonal
    within tolerance and is reported as an inconsistency.
    """
    arr = as_matrix(o)
    if np.max(np.abs(arr.imag)) > VALIDATION_TOL:
        raise ValidationError("input matrix is not real to 1e-9")
    if not is_unitary(arr, VALIDATION_TOL):
        raise ValidationError("input matrix is not orthogonal to 1e-9")

    result = qde_run(arr, 1, shots, seed, qubit_cap=qubit_cap)
    counts = result.phase.histogram
    unanimous = len(counts) == 1
    if not unanimous:
        raise VerificationError(
            f"sign readout was not unanimous over {shots} shots ({counts}); "
            "the input is not orthogonal within tolerance"
        )
    outcome = result.phase.k_prime
    return SignResult(
        sign=1 if outcome == 0 else -1,
        shots=shots,
        unanimous=unanimous,
        majority_probability=float(np.max(result.exact_distribution)),
        counters=result.counters,
    )


def contraction_run(
    a, t: int, shots: int, seed: int, *, qubit_cap: int | None = None
) -> ContractionResult:
    """Contraction-mode pipeline with per-stage ancilla post-selection.

    Each attempted shot walks the per-stage ancilla measurements; a shot is
    rejected at the first ancilla reading 1 and accepted shots contribute one
    phase-register sample.  The states along the all-zeros path do not depend
    on the shot, so the path (and the exact conditioned distribution) is
    computed once; per-shot sampling then consumes the same substream draws
    in the same order as a literal per-shot rerun would.
    """
    arr = as_matrix(a)
    norm = operator_norm(arr)
    if norm > 1.0 + VALIDATION_TOL:
        raise ValidationError(f"not a contraction: operator norm {norm:.12g} > 1")
    layout = _layout(arr.shape[0], t, ancillas=True, qubit_cap=qubit_cap)
    if shots < 1:
        raise ValidationError(f"need at least one shot, got {shots}")
    n = layout.n_particles
    if layout.slot_dim > 4096:
        raise ValidationError(
            f"contraction mode builds dense block encodings of dimension 2*{layout.slot_dim}; "
            f"slot spaces beyond 4096 (particle counts above 4) are out of desk scale"
        )

    sv = init_state(layout)
    load_asym(sv, asym_state(n))
    hadamard_layer(sv)

    stage_zero_probs: list[float] = []
    conditioned: np.ndarray | None = None
    for m in range(t):
        encoding = block_encode(kron_power(mat_pow2(arr, m), n))
        controlled_block_stage(sv, m, encoding)
        p_zero = ancilla_zero_probability(sv, m)
        if p_zero < 1e-300:
            # The zero branch carries no usable amplitude at this stage;
            # every shot is rejected here at the latest.
            stage_zero_probs.append(0.0)
            break
        measure_ancilla_postselect(sv, m, 0.0)
        stage_zero_probs.append(p_zero)
    else:
        inverse_qft(sv)
        conditioned = register_probabilities(sv, REG_PHASE)

    exact_acceptance = float(np.prod(stage_zero_probs))
    cumulative = np.cumsum(conditioned) if conditioned is not None else None

    accepted = 0
    counts: dict[int, int] = {}
    top = (1 << t) - 1
    for shot in range(shots):
        rng = shot_rng(seed, shot)
        survived = True
        for p_zero in stage_zero_probs:
            if rng.random() >= p_zero:
                survived = False
                break
        if survived and cumulative is not None:
            k = min(int(np.searchsorted(cumulative, rng.random(), side="right")), top)
            counts[k] = counts.get(k, 0) + 1
            accepted += 1

    oracle_magnitude = det_lu(arr).magnitude
    exponent = 2 * ((1 << t) - 1)
    return ContractionResult(
        accepted=accepted,
        attempted=shots,
        acceptance_rate=accepted / shots,
        phase=PhaseEstimate.from_counts(counts, t),
        magnitude_estimate=magnitude_estimate(accepted, shots, t),
        predicted_acceptance=oracle_magnitude**exponent,
        exact_acceptance=exact_acceptance,
        exact_conditioned_distribution=conditioned,
        no_accepted_shots=accepted == 0,
        counters=sv.counters,
    )


def magnitude_estimate(accepted: int, attempted: int, t: int) -> float:
    """Invert the all-zeros probability law to recover |det A|.

    The acceptance probability is |det A| raised to 2*(2**t - 1), so the
    empirical rate raised to the reciprocal exponent estimates the magnitude.
    """
    if attempted < 1:
        raise ValidationError(f"attempted count must be positive, got {attempted}")
    if accepted == 0:
        return 0.0
    return (accepted / attempted) ** (1.0 / (2 * ((1 << t) - 1)))


def _layout(n: int, t: int, *, ancillas: bool, qubit_cap: int | None) -> QubitLayout:
    kwargs = {} if qubit_cap is None else {"qubit_cap": qubit_cap}
    return QubitLayout(t=t, n_particles=n, ancilla_count=t if ancillas else 0, **kwargs)


__all__ = [
    "PhaseEstimate",
    "QdeResult",
    "SignResult",
    "ContractionResult",
    "phase_from_k",
    "qde_run",
    "sign_run",
    "contraction_run",
    "magnitude_estimate",
]
