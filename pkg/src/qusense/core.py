"""Mixed-radix Hilbert-space engine.

A register is an ordered list of qudit dimensions, position 0 being the most
significant digit of the flat basis index.  States are dense complex vectors
(pure) or matrices (mixed); gates are applied by tensor contraction on the
target axes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ATOL = 1e-10
"""Structural tolerance for norm/trace/hermiticity checks (module setting)."""

DENSE_CAP = 4096
"""Largest total dimension handled by the dense backend (module setting)."""


class InvariantError(ValueError):
    """A numeric state invariant (norm, trace, hermiticity, ...) is violated."""


class CapacityError(ValueError):
    """Requested object exceeds the dense-representation cap."""


@dataclass(frozen=True)
class DimensionVector:
    """Ordered qudit dimensions, most significant position first."""

    dims: tuple[int, ...]

    def __init__(self, dims) -> None:
        dims = tuple(int(d) for d in dims)
        if len(dims) < 1:
            raise ValueError("register needs at least one qudit")
        if any(d < 2 for d in dims):
            raise ValueError(f"every qudit dimension must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        """Total Hilbert-space dimension (product of qudit dimensions)."""
        return math.prod(self.dims)

    def place_weights(self) -> tuple[int, ...]:
        """Mixed-radix place value of each position (last position has weight 1)."""
        w = [1] * self.n
        for i in range(self.n - 2, -1, -1):
            w[i] = w[i + 1] * self.dims[i + 1]
        return tuple(w)

    def __iter__(self):
        return iter(self.dims)

    def __len__(self) -> int:
        return len(self.dims)

    def __getitem__(self, i):
        return self.dims[i]


def as_dims(dims) -> DimensionVector:
    return dims if isinstance(dims, DimensionVector) else DimensionVector(dims)


@dataclass(frozen=True)
class RegisterIndex:
    """A basis index both as a flat integer and as mixed-radix digits."""

    digits: tuple[int, ...]
    flat: int


def index_to_digits(flat: int, dims) -> RegisterIndex:
    """Decompose a flat index into mixed-radix digits, most significant first."""
    dims = as_dims(dims)
    flat = int(flat)
    if not 0 <= flat < dims.size:
        raise IndexError(f"flat index {flat} out of range for size {dims.size}")
    digits = []
    rem = flat
    for w in dims.place_weights():
        digits.append(rem // w)
        rem %= w
    return RegisterIndex(tuple(digits), flat)


def digits_to_index(digits, dims) -> RegisterIndex:
    """Recompose mixed-radix digits (most significant first) into a flat index."""
    dims = as_dims(dims)
    digits = tuple(int(d) for d in digits)
    if len(digits) != dims.n:
        raise ValueError(f"expected {dims.n} digits, got {len(digits)}")
    for pos, (d, dim) in enumerate(zip(digits, dims)):
        if not 0 <= d < dim:
            raise ValueError(f"digit {d} at position {pos} exceeds base {dim}")
    flat = sum(d * w for d, w in zip(digits, dims.place_weights()))
    return RegisterIndex(digits, flat)


@dataclass(frozen=True)
class PureState:
    """Normalized complex amplitude vector over a mixed-radix register."""

    dims: DimensionVector
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = as_dims(self.dims)
        object.__setattr__(self, "dims", dims)
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (dims.size,):
            raise ValueError(
                f"amplitude vector has shape {amps.shape}, expected ({dims.size},)"
            )
        if abs(np.linalg.norm(amps) - 1.0) > ATOL:
            raise InvariantError(f"state norm {np.linalg.norm(amps)!r} is not 1")
        object.__setattr__(self, "amplitudes", amps)

    def to_mixed(self) -> "MixedState":
        return MixedState(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class MixedState:
    """Density matrix over a mixed-radix register."""

    dims: DimensionVector
    rho: np.ndarray

    def __post_init__(self):
        dims = as_dims(self.dims)
        object.__setattr__(self, "dims", dims)
        rho = np.asarray(self.rho, dtype=complex)
        n = dims.size
        if rho.shape != (n, n):
            raise ValueError(f"density matrix has shape {rho.shape}, expected ({n}, {n})")
        if np.abs(rho - rho.conj().T).max() > ATOL:
            raise InvariantError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > ATOL:
            raise InvariantError(f"density matrix trace {np.trace(rho)!r} is not 1")
        object.__setattr__(self, "rho", rho)

    def assert_valid(self, atol: float = ATOL) -> None:
        """Full validity check including spectrum positivity (O(N^3))."""
        evals = np.linalg.eigvalsh(self.rho)
        if evals.min() < -atol:
            raise InvariantError(f"density matrix has negative eigenvalue {evals.min()}")


def state_size(state) -> int:
    return state.dims.size


def _contract_rows(tensor: np.ndarray, dims: DimensionVector, targets, matrix: np.ndarray):
    """Apply a local unitary to the given row axes of a dims-shaped tensor.

    ``tensor`` may carry extra trailing axes (columns of a matrix, batches);
    only the first ``dims.n`` axes are register axes.
    """
    tdims = [dims[t] for t in targets]
    k = len(targets)
    u = np.asarray(matrix, dtype=complex).reshape(tdims + tdims)
    out = np.tensordot(u, tensor, axes=(list(range(k, 2 * k)), list(targets)))
    # tensordot moved the contracted axes to the front; put them back in place
    return np.moveaxis(out, list(range(k)), list(targets))


def _check_gate(dims: DimensionVector, gate) -> None:
    targets = tuple(gate.targets)
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate gate targets {targets}")
    for t in targets:
        if not 0 <= t < dims.n:
            raise ValueError(f"gate target {t} outside register of {dims.n} qudits")
    d = math.prod(dims[t] for t in targets)
    if gate.matrix.shape != (d, d):
        raise ValueError(
            f"gate matrix shape {gate.matrix.shape} does not match targets "
            f"{targets} of local dimension {d}"
        )


def apply_gate(state, gate):
    """Apply a unitary gate to a PureState (U|psi>) or MixedState (U rho U+)."""
    dims = state.dims
    _check_gate(dims, gate)
    targets = tuple(gate.targets)
    if isinstance(state, PureState):
        psi = state.amplitudes.reshape(dims.dims)
        psi = _contract_rows(psi, dims, targets, gate.matrix)
        return PureState(dims, psi.reshape(-1))
    rho = state.rho.reshape(dims.dims + dims.dims)
    rho = _contract_rows(rho, dims, targets, gate.matrix)
    col_targets = tuple(t + dims.n for t in targets)
    col_dims = DimensionVector(dims.dims + dims.dims)
    rho = _contract_rows(rho, col_dims, col_targets, gate.matrix.conj())
    return MixedState(dims, rho.reshape(dims.size, dims.size))


def partial_trace(state: MixedState, keep) -> MixedState:
    """Trace out all qudits not in ``keep`` (labels sorted ascending)."""
    if isinstance(state, PureState):
        state = state.to_mixed()
    dims = state.dims
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep set must be nonempty")
    for k in keep:
        if not 0 <= k < dims.n:
            raise ValueError(f"keep label {k} outside register of {dims.n} qudits")
    n = dims.n
    rho = state.rho.reshape(dims.dims + dims.dims)
    traced = [q for q in range(n) if q not in keep]
    remaining = n
    for q in reversed(traced):
        rho = np.trace(rho, axis1=q, axis2=q + remaining)
        remaining -= 1
    kept_dims = DimensionVector(tuple(dims[k] for k in keep))
    return MixedState(kept_dims, rho.reshape(kept_dims.size, kept_dims.size))


def measure_distribution(state) -> np.ndarray:
    """Computational-basis outcome probabilities of a state."""
    if isinstance(state, PureState):
        p = np.abs(state.amplitudes) ** 2
    else:
        p = np.diag(state.rho).real.copy()
    p = np.clip(p, 0.0, None)
    total = p.sum()
    if abs(total - 1.0) > ATOL:
        raise InvariantError(f"outcome probabilities sum to {total}, not 1")
    return p / total


def sample_outcomes(dist, shots: int, seed: int) -> np.ndarray:
    """Draw multinomial outcome counts from a probability vector, reproducibly."""
    dist = np.asarray(dist, dtype=float)
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    if dist.ndim != 1 or dist.min() < -ATOL or abs(dist.sum() - 1.0) > 1e-9:
        raise ValueError("not a valid probability vector")
    dist = np.clip(dist, 0.0, None)
    rng = np.random.default_rng(seed)
    return rng.multinomial(shots, dist / dist.sum())


def purity(state: MixedState) -> float:
    """Tr(rho^2); equals 1 exactly for pure states."""
    if isinstance(state, PureState):
        return 1.0
    return float(np.einsum("ij,ji->", state.rho, state.rho).real)
