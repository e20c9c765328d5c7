"""Fisher information, Cramer-Rao precision bounds, and dynamic-range scalings.

Three probe strategies over n qubits are compared:

* ``sql``   independent probes, every qubit carries the phase once;
* ``qpea``  phase-estimation ladder, qubit weights double down the register;
* ``noon``  maximally entangled pair of branches with total weight 2^n - 1.

Quantum Fisher information of a pure state family is evaluated as
``4 * (<dpsi|dpsi> - |<psi|dpsi>|^2)`` with a central-difference derivative,
and classical Fisher information of a measurement as
``sum_k (dp_k/dphi)^2 / p_k`` on a phase grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ATOL, InvariantError, PureState
from .parallel import sweep_map
from .sensing import readout_local_hadamard, readout_qft, prepare_phase_state

STRATEGIES = ("sql", "qpea", "noon")

PLANCK_SI = 6.62607015e-34
"""Planck constant in J s, for runs in SI units; default unit system has h = 1."""

DEFAULT_H_STEP = 1e-6
"""Central-difference step in radians.

Chosen so the O((w*h)^2) truncation stays below 1e-8 relative error even for
the fastest phase weight w = 2^8 - 1 while staying far above the double
precision roundoff floor.
"""

DEFAULT_PROB_FLOOR = 1e-12


def phase_weights(strategy: str, n: int) -> np.ndarray:
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")
    if n < 1:
        raise ValueError(f"qubit count must be >= 1, got {n}")
    if strategy == "sql":
        return np.ones(n, dtype=float)
    return 2.0 ** np.arange(n - 1, -1, -1)


def strategy_state(strategy: str, n: int, phi: float) -> PureState:
    """Final probe state of a strategy at phase phi, over an n-qubit register."""
    weights = phase_weights(strategy, n)
    size = 2**n
    if strategy == "noon":
        amps = np.zeros(size, dtype=complex)
        amps[0] = 1 / math.sqrt(2)
        amps[-1] = np.exp(1j * weights.sum() * phi) / math.sqrt(2)
        return PureState((2,) * n, amps)
    if strategy == "qpea":
        # ladder weights equal the binary place values, so the flat form applies
        return prepare_phase_state((2,) * n, phi)
    bits = (np.arange(size)[:, None] >> np.arange(n - 1, -1, -1)) & 1
    amps = np.exp(1j * phi * bits.sum(axis=1)) / math.sqrt(size)
    return PureState((2,) * n, amps)


def strategy_distribution(strategy: str, n: int, phi: float) -> np.ndarray:
    """Outcome distribution of the readout naturally paired with a strategy.

    SQL probes are read per qubit in the x basis, the QPEA ladder through the
    inverse QFT, and NOON states in the basis containing the two balanced
    superpositions of the extremal branches (outcomes 0 and 2^n - 1).
    """
    state = strategy_state(strategy, n, phi)
    if strategy == "sql":
        return readout_local_hadamard(state)
    if strategy == "qpea":
        return readout_qft(state)
    amps = state.amplitudes
    dist = np.abs(amps) ** 2
    plus = (amps[0] + amps[-1]) / math.sqrt(2)
    minus = (amps[0] - amps[-1]) / math.sqrt(2)
    dist[0] = abs(plus) ** 2
    dist[-1] = abs(minus) ** 2
    return dist


def qfi_pure(state_fn, phi: float, h_step: float = DEFAULT_H_STEP) -> float:
    """Quantum Fisher information of a pure-state family at one phase.

    ``state_fn`` maps a phase to a normalized PureState; the derivative is the
    central difference ``(psi(phi+h) - psi(phi-h)) / (2h)``.
    """
    if h_step <= 0:
        raise ValueError(f"h_step must be positive, got {h_step}")
    psi = _amplitudes(state_fn(phi))
    dpsi = (_amplitudes(state_fn(phi + h_step)) - _amplitudes(state_fn(phi - h_step))) / (
        2 * h_step
    )
    overlap = np.vdot(psi, dpsi)
    return float(4.0 * (np.vdot(dpsi, dpsi).real - abs(overlap) ** 2))


def _amplitudes(state) -> np.ndarray:
    amps = state.amplitudes if isinstance(state, PureState) else np.asarray(state, dtype=complex)
    if abs(np.linalg.norm(amps) - 1.0) > ATOL:
        raise InvariantError("state family returned a non-normalized state")
    return amps


def qfi_analytic(strategy: str, n: int) -> float:
    """Closed-form QFI: n (sql), (4^n - 1)/3 (qpea), (2^n - 1)^2 (noon)."""
    if n < 1:
        raise ValueError(f"qubit count must be >= 1, got {n}")
    if strategy == "sql":
        return float(n)
    if strategy == "qpea":
        return (4.0**n - 1.0) / 3.0
    if strategy == "noon":
        return float(2**n - 1) ** 2
    raise ValueError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")


def default_phi_grid(points: int = 720) -> np.ndarray:
    return np.linspace(0.0, 2 * math.pi, points, endpoint=False)


def adaptive_phi_grid(n: int, samples_per_cycle: int = 64, minimum: int = 720) -> np.ndarray:
    """Phase grid resolving the fastest ladder oscillation 2^(n-1) * phi.

    Finite-difference CFI needs tens of samples per cycle of the fastest
    outcome-probability oscillation, not just the Nyquist pair, so the grid
    grows with the register instead of staying at the 720-point default.
    """
    points = max(minimum, samples_per_cycle * 2 ** (n - 1))
    return default_phi_grid(points)


def cfi(prob_fn, phi_grid, prob_floor: float = DEFAULT_PROB_FLOOR) -> np.ndarray:
    """Classical Fisher information on a phase grid.

    Derivatives are central differences on the grid (periodic when the grid
    uniformly covers a full circle).  ``(dp)^2 / p`` has removable
    singularities where an outcome probability touches zero; at grid points
    with ``p < prob_floor`` the analytic limit ``2 p''`` of a quadratic zero
    is substituted (a second central difference), which keeps deterministic
    readouts at their exact Fisher value instead of diverging through the
    floored quotient.  Those points remain in any average over the curve.
    """
    grid = np.asarray(phi_grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 3:
        raise ValueError("phase grid needs at least 3 points")
    probs = np.asarray(sweep_map(prob_fn, grid), dtype=float)
    return cfi_from_probs(probs, grid, prob_floor)


def cfi_from_probs(
    probs: np.ndarray, phi_grid, prob_floor: float = DEFAULT_PROB_FLOOR
) -> np.ndarray:
    """CFI curve from a precomputed (grid, outcome) probability matrix."""
    grid = np.asarray(phi_grid, dtype=float)
    probs = np.asarray(probs, dtype=float)
    if probs.shape[0] != len(grid):
        raise ValueError("probability matrix rows must match the phase grid")
    dprobs = _grid_derivative(probs, grid)
    contrib = dprobs**2 / np.maximum(probs, prob_floor)
    small = probs < prob_floor
    if small.any():
        limit = np.clip(2.0 * _grid_second_derivative(probs, grid), 0.0, None)
        contrib = np.where(small, limit, contrib)
    return contrib.sum(axis=1)


def _uniform_periodic_step(grid: np.ndarray) -> float | None:
    steps = np.diff(grid)
    if np.allclose(steps, steps[0], rtol=0, atol=1e-12) and (
        abs((grid[-1] - grid[0]) + steps[0] - 2 * math.pi) < 1e-9
    ):
        return float(steps[0])
    return None


def _grid_derivative(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    step = _uniform_periodic_step(grid)
    if step is not None:
        return (np.roll(values, -1, axis=0) - np.roll(values, 1, axis=0)) / (2 * step)
    return np.gradient(values, grid, axis=0)


def _grid_second_derivative(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    step = _uniform_periodic_step(grid)
    if step is not None:
        return (
            np.roll(values, -1, axis=0) - 2 * values + np.roll(values, 1, axis=0)
        ) / step**2
    return np.gradient(np.gradient(values, grid, axis=0), grid, axis=0)


@dataclass(frozen=True)
class FisherResult:
    """QFI next to the sampled CFI curve of the paired measurement."""

    strategy: str
    n: int
    qfi: float
    phi_grid: np.ndarray
    cfi_curve: np.ndarray
    cfi_mean: float


def strategy_distribution_sweep(strategy: str, n: int, phi_grid) -> np.ndarray:
    """Readout distributions of a strategy over a whole phase grid at once."""
    grid = np.asarray(phi_grid, dtype=float)
    if strategy == "qpea":
        from .sensing import qft_outcome_image

        return qft_outcome_image((2,) * n, grid)
    if strategy == "sql":
        size = 2**n
        q = (1.0 - np.cos(grid))[:, None] / 2.0
        pops = np.array([bin(x).count("1") for x in range(size)])
        return q**pops * (1.0 - q) ** (n - pops)
    if strategy == "noon":
        size = 2**n
        w = float(2**n - 1)
        probs = np.zeros((len(grid), size))
        probs[:, 0] = (1.0 + np.cos(w * grid)) / 2.0
        probs[:, -1] = (1.0 - np.cos(w * grid)) / 2.0
        return probs
    raise ValueError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")


def fisher_scan(strategy: str, n: int, phi_grid=None) -> FisherResult:
    grid = adaptive_phi_grid(n) if phi_grid is None else np.asarray(phi_grid, dtype=float)
    curve = cfi_from_probs(strategy_distribution_sweep(strategy, n, grid), grid)
    return FisherResult(
        strategy=strategy,
        n=n,
        qfi=qfi_analytic(strategy, n),
        phi_grid=grid,
        cfi_curve=curve,
        cfi_mean=float(curve.mean()),
    )


@dataclass(frozen=True)
class SensingParams:
    """Translation between phase and a physical parameter.

    ``energy_derivative`` is dE/d(alpha) in energy units per unit of alpha,
    ``tau`` the interrogation time in seconds, ``n_measurements`` the repeat
    count, ``n_qubits`` the register size.
    """

    energy_derivative: float
    tau: float
    n_measurements: int
    n_qubits: int

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.n_measurements < 1:
            raise ValueError(f"n_measurements must be >= 1, got {self.n_measurements}")
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be >= 1, got {self.n_qubits}")


def parameter_fisher(phase_fisher: float, params: SensingParams, planck: float = 1.0) -> float:
    """Chain rule from phase to parameter: F_alpha = F_phi * (tau dE/da / h)^2."""
    return phase_fisher * (params.tau * params.energy_derivative / planck) ** 2


def qcrb_precision(strategy: str, params: SensingParams, planck: float = 1.0) -> float:
    """Cramer-Rao precision of the parameter for each probe strategy.

    sql:  h / (sqrt(N_m) tau dE)           (independent of register size)
    qpea: h sqrt(3 / (N_m (4^n - 1))) / (tau dE)
    noon: h / (sqrt(N_m) (2^n - 1) tau dE)
    """
    n_m = params.n_measurements
    denom = params.tau * params.energy_derivative
    if strategy == "sql":
        return planck / (math.sqrt(n_m) * denom)
    if strategy == "qpea":
        return planck * math.sqrt(3.0 / (n_m * (4.0**params.n_qubits - 1.0))) / denom
    if strategy == "noon":
        return planck / (math.sqrt(n_m) * (2.0**params.n_qubits - 1.0) * denom)
    raise ValueError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")


def dynamic_range(
    strategy: str,
    params: SensingParams,
    register_size: int | None = None,
    planck: float = 1.0,
) -> float:
    """Ratio of unambiguous range to precision.

    sql:  (pi / h) sqrt(N_m)
    qpea: (2 pi / (sqrt(3) h)) sqrt(N_m) sqrt(R^2 - 1)

    where ``R`` is the register dimension, 2^n for qubit ladders; hybrid
    registers pass their total dimension through ``register_size``.
    """
    n_m = params.n_measurements
    if strategy == "sql":
        return math.pi / planck * math.sqrt(n_m)
    if strategy == "qpea":
        r = 2.0**params.n_qubits if register_size is None else float(register_size)
        return 2 * math.pi / (math.sqrt(3.0) * planck) * math.sqrt(n_m) * math.sqrt(r**2 - 1.0)
    raise ValueError(f"dynamic range is defined for 'sql' and 'qpea', not {strategy!r}")
