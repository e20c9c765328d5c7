"""Phase digitization, AC-field estimation, and two-target correlation spectroscopy.

All protocols share one abstraction: the sensor writes phases onto register
qudits as ideal controlled rotations, so a sensing run reduces to preparing a
phase-ladder state, applying a readout map, and measuring.  Qudit ``l`` of the
ladder carries the base phase multiplied by its mixed-radix place weight, so
the flat amplitudes are simply ``exp(i*phi*x)/sqrt(N)`` and the inverse QFT
digitizes ``phi`` into the register index nearest ``phi*N/(2*pi)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import (
    DimensionVector,
    PureState,
    apply_gate,
    as_dims,
    measure_distribution,
)
from .gates import (
    apply_circuit,
    chrestenson,
    circuit_unitary,
    digit_reversal_permutation,
    synthesize_inverse_qft,
)

TWO_PI = 2.0 * math.pi


def prepare_phase_state(dims, phi: float) -> PureState:
    """Phase-ladder state: qudit l carries phi times its place weight.

    Flat form ``amp[x] = exp(i*phi*x)/sqrt(N)``; at ``phi = 2*pi*k/N`` this is
    exactly column ``k`` of the DFT matrix, and ``phi = 0`` gives the uniform
    superposition.
    """
    dims = as_dims(dims)
    n = dims.size
    amps = np.exp(1j * phi * np.arange(n)) / math.sqrt(n)
    return PureState(dims, amps)


@lru_cache(maxsize=32)
def _inverse_qft_parts(dims_key: tuple[int, ...]):
    dims = DimensionVector(dims_key)
    circuit = synthesize_inverse_qft(dims)
    u = circuit_unitary(circuit)
    u.setflags(write=False)
    perm = digit_reversal_permutation(dims)
    perm.setflags(write=False)
    return circuit, u, perm


@lru_cache(maxsize=32)
def _local_hadamard_unitary(dims_key: tuple[int, ...]) -> np.ndarray:
    u = np.eye(1, dtype=complex)
    for d in dims_key:
        u = np.kron(u, chrestenson_dagger_matrix(d))
    u.setflags(write=False)
    return u


def chrestenson_dagger_matrix(d: int) -> np.ndarray:
    return chrestenson(d).matrix.conj().T


def readout_qft(state) -> np.ndarray:
    """Outcome distribution after the inverse-QFT digitization circuit.

    Outcomes are relabeled through the digit-reversal permutation so that the
    ladder phase ``2*pi*k/N`` reads out deterministically as index ``k``.
    """
    dims = state.dims
    circuit, _, perm = _inverse_qft_parts(dims.dims)
    raw = measure_distribution(apply_circuit(state, circuit))
    logical = np.empty_like(raw)
    logical[perm] = raw
    return logical


def readout_local_hadamard(state) -> np.ndarray:
    """Outcome distribution after inverse local Hadamard/Chrestenson gates only."""
    out = state
    for q, d in enumerate(state.dims):
        out = apply_gate(out, chrestenson(d, q).dagger())
    return measure_distribution(out)


def qft_outcome_image(dims, phis) -> np.ndarray:
    """Probability image of the inverse-QFT readout over a phase sweep.

    Returns an array of shape ``(len(phis), N)`` whose row ``i`` is the
    outcome distribution for ladder phase ``phis[i]``.
    """
    dims = as_dims(dims)
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    n = dims.size
    _, udag, perm = _inverse_qft_parts(dims.dims)
    ladders = np.exp(1j * np.outer(np.arange(n), phis)) / math.sqrt(n)
    raw = np.abs(udag @ ladders) ** 2
    logical = np.empty_like(raw)
    logical[perm] = raw
    return logical.T


def local_hadamard_outcome_image(dims, phis) -> np.ndarray:
    """Probability image of the local-Hadamard readout over a phase sweep."""
    dims = as_dims(dims)
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    n = dims.size
    u = _local_hadamard_unitary(dims.dims)
    ladders = np.exp(1j * np.outer(np.arange(n), phis)) / math.sqrt(n)
    return (np.abs(u @ ladders) ** 2).T


@dataclass(frozen=True)
class AcFieldResult:
    """Outcome image and per-amplitude max-likelihood phase estimates."""

    dims: DimensionVector
    field_phases: np.ndarray
    image: np.ndarray
    estimate_indices: np.ndarray
    estimates: np.ndarray
    shots: int


def simulate_ac_field_estimation(field_phases, dims, shots: int = 0, seed: int = 0) -> AcFieldResult:
    """Digitize a swept field-induced phase through the inverse QFT.

    Each register qudit accumulates the field phase times its place weight
    (the binary doubling pattern generalized to mixed radices), the inverse
    QFT maps the ladder onto populations, and the most likely outcome ``k``
    yields the estimate ``2*pi*k/N``.  With ``shots > 0`` the estimate is the
    modal outcome of a finite multinomial sample instead of the exact argmax.
    """
    dims = as_dims(dims)
    phis = np.atleast_1d(np.asarray(field_phases, dtype=float))
    image = qft_outcome_image(dims, phis)
    if shots > 0:
        rng = np.random.default_rng(seed)
        counts = np.stack([rng.multinomial(shots, row / row.sum()) for row in image])
        k_hat = counts.argmax(axis=1)
    else:
        k_hat = image.argmax(axis=1)
    estimates = TWO_PI * k_hat / dims.size
    return AcFieldResult(dims, phis, image, k_hat, estimates, shots)


def ml_phase_estimates(counts, dims, coarse_points: int | None = None) -> np.ndarray:
    """Continuous max-likelihood phase from recorded outcome counts.

    Maximizes the multinomial log-likelihood of the inverse-QFT readout over
    the full phase circle: a coarse grid locates the peak, then the bracket
    is refined by repeated zooming well below shot-noise resolution.  Accepts
    one count vector or a (trials, N) matrix and returns one estimate per row.
    """
    dims = as_dims(dims)
    n = dims.size
    counts = np.atleast_2d(np.asarray(counts, dtype=float))
    if counts.shape[1] != n:
        raise ValueError(f"count rows must have length {n}")
    points = coarse_points or max(256, 32 * n)
    grid = np.linspace(0.0, TWO_PI, points, endpoint=False)
    log_probs = np.log(np.maximum(qft_outcome_image(dims, grid), 1e-300))
    best = grid[np.argmax(log_probs @ counts.T, axis=0)]
    half = TWO_PI / points
    estimates = np.empty(len(counts))
    for t, row in enumerate(counts):
        lo, hi = best[t] - half, best[t] + half
        for _ in range(8):
            local = np.linspace(lo, hi, 33)
            log_local = np.log(np.maximum(qft_outcome_image(dims, local), 1e-300))
            i = int(np.argmax(log_local @ row))
            width = (hi - lo) / 32
            lo, hi = local[i] - width, local[i] + width
        estimates[t] = 0.5 * (lo + hi) % TWO_PI
    return estimates


# --- correlation spectroscopy -------------------------------------------------

TARGET_STATES = ("up", "down", "superposition")

LEDGER_FOUR_TAU = "four_tau"
LEDGER_TWO_TAU = "two_tau"

DEFAULT_READOUT_FIDELITIES = (0.969, 0.996)
"""Single-shot bit fidelities of the two memory outputs, for opt-in use."""


@dataclass(frozen=True)
class TargetSpinConfig:
    """Two weakly coupled target spins probed by the sensor.

    ``couplings`` are the A_zz values in Hz, weaker target first.  ``initial``
    marks each target as a parked eigenstate ("up"/"down") or as undergoing a
    Ramsey sequence during the correlation window ("superposition").
    ``detuning`` is the Ramsey drive offset from the weaker target's
    transition, in Hz.
    """

    couplings: tuple[float, float]
    initial: tuple[str, str] = ("superposition", "superposition")
    detuning: float = 2500.0

    def __post_init__(self):
        couplings = tuple(float(a) for a in self.couplings)
        if len(couplings) != 2:
            raise ValueError("exactly two target spins are supported")
        if any(a <= 0 for a in couplings):
            raise ValueError(f"couplings must be positive, got {couplings}")
        initial = tuple(self.initial)
        for s in initial:
            if s not in TARGET_STATES:
                raise ValueError(f"initial state {s!r} not one of {TARGET_STATES}")
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "initial", initial)


@dataclass(frozen=True)
class CorrelationRun:
    """Sweep parameters for a two-step correlation measurement."""

    tau: float
    correlation_times: np.ndarray
    shots: int = 0
    t2_star: float | None = 5e-3
    readout_fidelities: tuple[float, float] | None = None
    phase_ledger: str = LEDGER_FOUR_TAU

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError(f"sensing time tau must be positive, got {self.tau}")
        times = np.asarray(self.correlation_times, dtype=float)
        if times.ndim != 1 or len(times) < 2:
            raise ValueError("correlation_times must be a 1-D sweep of at least 2 points")
        if self.phase_ledger not in (LEDGER_FOUR_TAU, LEDGER_TWO_TAU):
            raise ValueError(f"unknown phase ledger {self.phase_ledger!r}")
        object.__setattr__(self, "correlation_times", times)


@dataclass(frozen=True)
class CorrelationResult:
    """Per-memory flip probabilities vs correlation time plus their spectra."""

    tau: float
    correlation_times: np.ndarray
    p_memory: np.ndarray  # shape (n_times, 2); column 0 tracks the weaker target
    frequencies: np.ndarray
    spectra: np.ndarray  # shape (n_freq, 2), |FFT| magnitudes
    peak_frequencies: tuple[float, float]
    linewidths: tuple[float, float]
    target_frequencies: tuple[float, float]
    first_step_table: dict


def default_tau(couplings=(6000.0, 12400.0)) -> float:
    """Sensing time putting the stronger target's flip at a pi phase on the MSQ."""
    return 1.0 / (4.0 * couplings[1])


def default_correlation_times(t_max: float = 6e-3, step: float = 15e-6) -> np.ndarray:
    return np.arange(0.0, t_max + step / 2, step)


def first_step_phases(spins, couplings, tau: float, ledger: str = LEDGER_TWO_TAU):
    """Register phases (LSQ, MSQ) acquired in one sensing step, in radians.

    ``spins`` are "up"/"down" eigenstates aligned with ``couplings``.  Under
    the "two_tau" ledger the MSQ collects ``2*pi * 2*tau * sum_i A_i I_i``
    with ``I = +-1/2`` and the LSQ twice that; "four_tau" doubles both.  The
    two conventions describe the same circuit and the two-step flip dynamics
    are identical under either; only this per-step bookkeeping differs.
    """
    weights = {"up": 0.5, "down": -0.5}
    shift = sum(a * weights[s] for a, s in zip(couplings, spins))
    scale = 2.0 if ledger == LEDGER_FOUR_TAU else 1.0
    phi_msq = TWO_PI * 2.0 * tau * shift * scale
    return 2.0 * phi_msq, phi_msq


def first_step_phase_table(couplings, tau: float, ledger: str = LEDGER_TWO_TAU):
    """Phase bookkeeping rows keyed by (stronger target, weaker target) state."""
    table = {}
    for strong in ("up", "down"):
        for weak in ("up", "down"):
            table[(strong, weak)] = first_step_phases(
                (weak, strong), couplings, tau, ledger
            )
    return table


def memory_flip_probabilities(msq_phases) -> tuple[np.ndarray, np.ndarray]:
    """Flip probabilities of both memory outputs for given net MSQ phases.

    The register is the two-qubit ladder (LSQ phase doubled), digitized by
    the inverse QFT; bit 0 of the outcome index comes from the LSQ and bit 1
    from the MSQ.  A net MSQ phase of pi flips the MSQ output alone; pi/2
    flips the LSQ alone, which is how the two targets demultiplex.
    """
    dist = qft_outcome_image((2, 2), np.atleast_1d(msq_phases))
    p_lsb = dist[:, 1] + dist[:, 3]
    p_msb = dist[:, 2] + dist[:, 3]
    return p_lsb, p_msb


def target_ramsey_frequencies(cfg: TargetSpinConfig) -> tuple[float, float]:
    """Precession frequencies of the targets in the Ramsey drive frame.

    The drive sits ``detuning`` away from the weaker target's transition; the
    stronger target's transition is shifted further by the full coupling
    difference while the sensor is parked in its polarized state.
    """
    a1, a2 = cfg.couplings
    f1 = abs(cfg.detuning)
    f2 = abs((a2 - a1) - cfg.detuning)
    return f1, f2


def simulate_correlation_spectroscopy(
    cfg: TargetSpinConfig, run: CorrelationRun, seed: int = 0
) -> CorrelationResult:
    """Two sign-reversed sensing steps separated by a swept correlation time.

    Targets marked "superposition" undergo a detuned Ramsey sequence between
    the steps and flip with probability ``(1 - cos(2 pi f T_c) * env) / 2``;
    parked targets contribute identical phases to both steps, which cancel.
    Each flip pattern leaves a net phase ladder on the memory register whose
    inverse-QFT readout routes the weaker target to memory 1 (LSQ output bit)
    and the stronger one to memory 2 (MSQ output bit).
    """
    a = np.asarray(cfg.couplings)
    times = run.correlation_times
    freqs_t = target_ramsey_frequencies(cfg)
    env = np.exp(-times / run.t2_star) if run.t2_star else np.ones_like(times)
    p_flip = np.zeros((len(times), 2))
    for i in range(2):
        if cfg.initial[i] == "superposition":
            p_flip[:, i] = 0.5 * (1.0 - np.cos(TWO_PI * freqs_t[i] * times) * env)

    # net MSQ phase per flip pattern (delta I = 1 per flipped target)
    patterns = [(0, 0), (1, 0), (0, 1), (1, 1)]
    msq_phases = np.array([TWO_PI * 2.0 * run.tau * float(a @ c) for c in patterns])
    register_dists = qft_outcome_image((2, 2), msq_phases)  # (4 patterns, 4 outcomes)
    if run.readout_fidelities is not None:
        register_dists = register_dists @ _confusion_matrix(run.readout_fidelities).T

    weights = np.empty((len(times), 4))
    for j, (c1, c2) in enumerate(patterns):
        w1 = p_flip[:, 0] if c1 else 1.0 - p_flip[:, 0]
        w2 = p_flip[:, 1] if c2 else 1.0 - p_flip[:, 1]
        weights[:, j] = w1 * w2
    joint = weights @ register_dists  # (n_times, 4 outcomes)

    if run.shots > 0:
        rng = np.random.default_rng(seed)
        sampled = np.stack(
            [rng.multinomial(run.shots, row / row.sum()) / run.shots for row in joint]
        )
        joint = sampled

    p_memory = np.column_stack([joint[:, 1] + joint[:, 3], joint[:, 2] + joint[:, 3]])

    freqs, mag1 = periodogram(times, p_memory[:, 0])
    _, mag2 = periodogram(times, p_memory[:, 1])
    peak1, width1 = spectral_peak(freqs, mag1)
    peak2, width2 = spectral_peak(freqs, mag2)
    return CorrelationResult(
        tau=run.tau,
        correlation_times=times,
        p_memory=p_memory,
        frequencies=freqs,
        spectra=np.column_stack([mag1, mag2]),
        peak_frequencies=(peak1, peak2),
        linewidths=(width1, width2),
        target_frequencies=freqs_t,
        first_step_table=first_step_phase_table(cfg.couplings, run.tau, run.phase_ledger),
    )


def _confusion_matrix(fidelities) -> np.ndarray:
    """Joint 4-outcome readout confusion from per-memory bit fidelities."""
    f1, f2 = fidelities
    m1 = np.array([[f1, 1 - f1], [1 - f1, f1]])
    m2 = np.array([[f2, 1 - f2], [1 - f2, f2]])
    c = np.zeros((4, 4))
    for r1 in range(2):
        for r2 in range(2):
            for b1 in range(2):
                for b2 in range(2):
                    c[2 * r2 + r1, 2 * b2 + b1] = m1[r1, b1] * m2[r2, b2]
    return c


def single_memory_protocol(a_zz: float, tau: float, flip_target: bool) -> float:
    """Memory flip probability of the one-memory correlation experiment.

    Without a deliberate target flip the two sign-reversed steps cancel.  A
    flip leaves ``delta_phi = 2*pi*A_zz*tau``, read out as population
    ``sin^2(delta_phi/2)``, maximal at ``tau = 1/(2*A_zz)``.
    """
    if tau <= 0:
        raise ValueError(f"sensing time tau must be positive, got {tau}")
    if not flip_target:
        return 0.0
    return math.sin(math.pi * a_zz * tau) ** 2


_QPEA_ANCHORS = ((0.0, "00"), (math.pi / 2, "01"), (3 * math.pi / 2, "10"), (TWO_PI, "11"))


def two_memory_qpea_example(phi: float) -> str:
    """Two-bit digitization of a phase, MSB first.

    The four anchor phases {0, pi/2, 3*pi/2, 2*pi} map to {00, 01, 10, 11}
    by a fixed lookup.  Note the anchors are not uniformly spaced and the
    lookup at 3*pi/2 and 2*pi differs from the most likely outcome of the
    underlying two-qubit circuit (which peaks at 11 and 00 there); phases off
    the anchors return that circuit's max-probability outcome.
    """
    for anchor, label in _QPEA_ANCHORS:
        if abs(phi - anchor) < 1e-12:
            return label
    dist = qft_outcome_image((2, 2), np.array([phi]))[0]
    return format(int(dist.argmax()), "02b")


# --- spectra ------------------------------------------------------------------


def periodogram(times, values) -> tuple[np.ndarray, np.ndarray]:
    """Rectangular-window FFT magnitude of a mean-subtracted uniform series."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    steps = np.diff(times)
    if len(steps) < 1 or not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
        raise ValueError("correlation times must be uniformly spaced")
    spectrum = np.abs(np.fft.rfft(values - values.mean()))
    freqs = np.fft.rfftfreq(len(values), d=steps[0])
    return freqs, spectrum


def spectral_peak(freqs, magnitude) -> tuple[float, float]:
    """Location and full width at half maximum of the strongest non-DC line.

    Width is interpolated linearly between bins and reported as NaN when a
    half-maximum crossing is not bracketed inside the spectrum.
    """
    freqs = np.asarray(freqs, dtype=float)
    magnitude = np.asarray(magnitude, dtype=float)
    if len(freqs) < 2 or magnitude[1:].max() <= 0:
        return float("nan"), float("nan")
    i = 1 + int(np.argmax(magnitude[1:]))
    peak = freqs[i]
    half = magnitude[i] / 2.0
    left = right = float("nan")
    for j in range(i, 0, -1):
        if magnitude[j - 1] <= half:
            drop = magnitude[j] - magnitude[j - 1]
            frac = (magnitude[j] - half) / drop if drop > 0 else 0.0
            left = freqs[j] - frac * (freqs[j] - freqs[j - 1])
            break
    for j in range(i, len(freqs) - 1):
        if magnitude[j + 1] <= half:
            drop = magnitude[j] - magnitude[j + 1]
            frac = (magnitude[j] - half) / drop if drop > 0 else 0.0
            right = freqs[j] + frac * (freqs[j + 1] - freqs[j])
            break
    return float(peak), float(right - left)
