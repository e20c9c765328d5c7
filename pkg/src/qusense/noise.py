"""Computational-basis dephasing channel and the purity-retention study.

Dephasing multiplies every coherence between basis states that differ on
qudit ``i`` by ``(1 - lambda_i)``, leaving populations untouched.  The
multiplier matrix is a tensor product of per-qudit positive semidefinite
blocks, so the channel preserves trace, hermiticity, and positivity and is
idempotent at full strength.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import MixedState, PureState, as_dims, measure_distribution, purity
from .gates import apply_circuit, chrestenson, synthesize_inverse_qft
from .sensing import prepare_phase_state

MAPPINGS = ("qft", "local_h")


@dataclass(frozen=True)
class DephasingSpec:
    """Per-qudit dephasing strength, 1 meaning all coherences of that qudit die."""

    strengths: tuple[float, ...]

    def __post_init__(self):
        strengths = tuple(float(s) for s in self.strengths)
        if any(not 0.0 <= s <= 1.0 for s in strengths):
            raise ValueError(f"dephasing strengths must lie in [0, 1], got {strengths}")
        object.__setattr__(self, "strengths", strengths)

    @classmethod
    def uniform(cls, n: int, strength: float = 1.0) -> "DephasingSpec":
        return cls((strength,) * n)


def dephasing_mask(dims, spec: DephasingSpec) -> np.ndarray:
    """Schur multiplier of the channel: prod over differing qudits of (1 - lambda)."""
    dims = as_dims(dims)
    if len(spec.strengths) != dims.n:
        raise ValueError(
            f"spec covers {len(spec.strengths)} qudits, register has {dims.n}"
        )
    mask = np.ones((1, 1))
    for d, lam in zip(dims, spec.strengths):
        block = np.full((d, d), 1.0 - lam)
        np.fill_diagonal(block, 1.0)
        mask = np.kron(mask, block)
    return mask


def dephase(state, spec: DephasingSpec) -> MixedState:
    """Apply the dephasing channel; pure inputs are promoted to density matrices."""
    if isinstance(state, PureState):
        state = state.to_mixed()
    return MixedState(state.dims, state.rho * dephasing_mask(state.dims, spec))


@dataclass(frozen=True)
class PurityStudyResult:
    n_qubits: int
    mapping: str
    phi_grid: np.ndarray
    purities: np.ndarray
    mean_purity: float
    stderr: float


@lru_cache(maxsize=16)
def _mapping_circuit(n_qubits: int, mapping: str):
    dims = (2,) * n_qubits
    if mapping == "qft":
        return synthesize_inverse_qft(dims)
    from .gates import Circuit

    return Circuit(dims, tuple(chrestenson(2, q) for q in range(n_qubits)))


def purity_study(n_qubits: int, phi_grid=None, mapping: str = "qft") -> PurityStudyResult:
    """Register purity left after phase-to-population mapping and full dephasing.

    For every phase on the grid a qubit phase ladder is prepared, mapped to
    populations either through the inverse QFT or through one Hadamard per
    qubit, fully dephased, and scored by Tr(rho^2).  The inverse QFT parks
    the register in (or next to) a basis state, so its purity survives; the
    local map spreads weight across the register and the average purity
    collapses with qubit number.
    """
    if n_qubits < 1:
        raise ValueError(f"n_qubits must be >= 1, got {n_qubits}")
    if mapping not in MAPPINGS:
        raise ValueError(f"mapping must be one of {MAPPINGS}, got {mapping!r}")
    grid = (
        np.linspace(0.0, 2 * math.pi, 256, endpoint=False)
        if phi_grid is None
        else np.asarray(phi_grid, dtype=float)
    )
    circuit = _mapping_circuit(n_qubits, mapping)
    spec = DephasingSpec.uniform(n_qubits, 1.0)
    purities = np.empty(len(grid))
    for i, phi in enumerate(grid):
        mapped = apply_circuit(prepare_phase_state((2,) * n_qubits, phi), circuit)
        purities[i] = purity(dephase(mapped, spec))
    return PurityStudyResult(
        n_qubits=n_qubits,
        mapping=mapping,
        phi_grid=grid,
        purities=purities,
        mean_purity=float(purities.mean()),
        stderr=float(purities.std(ddof=1) / math.sqrt(len(grid))),
    )


def diagonal_purity_oracle(distribution) -> float:
    """Purity of a fully dephased state from its outcome distribution alone."""
    p = np.asarray(distribution, dtype=float)
    return float((p**2).sum())


def purity_after_mapping(n_qubits: int, phi: float, mapping: str) -> float:
    """Single-phase version of the study, handy for pointwise checks."""
    circuit = _mapping_circuit(n_qubits, mapping)
    mapped = apply_circuit(prepare_phase_state((2,) * n_qubits, phi), circuit)
    return purity(dephase(mapped, DephasingSpec.uniform(n_qubits, 1.0)))
