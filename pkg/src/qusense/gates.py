"""Gate library and mixed-radix QFT circuit synthesis.

The Fourier transform of a register with dimensions ``(d0, d1, ..., d_{n-1})``
factorizes into one local Chrestenson (Hadamard for qubits) gate per qudit
plus ``n(n-1)/2`` ladder-controlled phase rotations.  Processing runs from the
last qudit to the first: a local gate on qudit ``l`` followed by controlled
rotations from every earlier qudit ``p`` with angle ``2*pi / (d_p*...*d_l)``
per unit of the control digit.

The synthesized circuit equals the dense DFT matrix up to a digit-reversal
permutation of the input index, exported as
:func:`digit_reversal_permutation` so the equivalence

    circuit_unitary(synthesize_qft(dims)) == dft_matrix(N)[:, perm]

is exact and testable.  The forward transform uses the ``e^{+2 pi i jk/N}``
sign convention; the inverse conjugates it.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .core import ATOL, DENSE_CAP, CapacityError, DimensionVector, as_dims, apply_gate

KIND_HADAMARD = "hadamard"
KIND_CHRESTENSON = "chrestenson"
KIND_CHRESTENSON_INV = "chrestenson_inv"
KIND_PHASE = "phase"
KIND_CONTROLLED_PHASE = "controlled_phase"
KIND_CROT = "crot"
KIND_CUSTOM = "custom"


@dataclass(frozen=True)
class GateOp:
    """A unitary acting on a named subset of qudits.

    ``matrix`` lives on the product space of ``targets`` in the given order.
    ``theta`` is kept in radians and never reduced modulo 2*pi, so composed
    circuits retain their exact phase bookkeeping.
    """

    kind: str
    targets: tuple[int, ...]
    matrix: np.ndarray
    theta: float | None = None
    control_value: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"gate matrix must be square, got shape {m.shape}")
        if np.abs(m @ m.conj().T - np.eye(m.shape[0])).max() > ATOL:
            raise ValueError(f"{self.kind} gate matrix is not unitary")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def dagger(self) -> "GateOp":
        """Adjoint gate; parametric kinds flip the sign of theta."""
        kind = self.kind
        if kind == KIND_CHRESTENSON:
            kind = KIND_CHRESTENSON_INV
        elif kind == KIND_CHRESTENSON_INV:
            kind = KIND_CHRESTENSON
        theta = None if self.theta is None else -self.theta
        return GateOp(kind, self.targets, self.matrix.conj().T, theta, self.control_value)


def chrestenson_matrix(d: int) -> np.ndarray:
    """d x d single-qudit DFT matrix with entries exp(2i pi jk/d)/sqrt(d)."""
    if d < 2:
        raise ValueError(f"qudit dimension must be >= 2, got {d}")
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / math.sqrt(d)


def hadamard(target: int) -> GateOp:
    return GateOp(KIND_HADAMARD, (target,), chrestenson_matrix(2))


def chrestenson(d: int, target: int = 0) -> GateOp:
    """Generalized Hadamard on one d-level qudit; equals H for d = 2."""
    kind = KIND_HADAMARD if d == 2 else KIND_CHRESTENSON
    return GateOp(kind, (target,), chrestenson_matrix(d))


def y_rotation_hadamard(target: int) -> GateOp:
    """pi/2 rotation about y: maps populations to phases like H up to two signs.

    Provided as an alternative for gate-fidelity studies; the canonical QFT
    synthesis uses the textbook Hadamard so the DFT oracle comparison is exact.
    """
    m = np.array([[1.0, -1.0], [1.0, 1.0]], dtype=complex) / math.sqrt(2)
    return GateOp(KIND_CUSTOM, (target,), m)


def phase_rotation(theta: float, target: int, d: int = 2) -> GateOp:
    """Z_theta: level k of the target acquires phase exp(i theta k)."""
    m = np.diag(np.exp(1j * theta * np.arange(d)))
    return GateOp(KIND_PHASE, (target,), m, theta=theta)


def controlled_phase(
    control: int,
    target: int,
    theta: float,
    d_control: int = 2,
    d_target: int = 2,
    control_value: int | None = None,
) -> GateOp:
    """Controlled Z_theta between two qudits.

    With ``control_value=None`` the rotation is applied once per unit of the
    control digit (phase ``theta * a * b`` on ``|a>|b>``), which is the form
    required by the QFT ladder; multi-valued controls fall out naturally.
    With an explicit ``control_value`` the rotation fires only on that digit.
    """
    a = np.arange(d_control)
    b = np.arange(d_target)
    weight = np.where(a == control_value, 1, 0) if control_value is not None else a
    phases = np.exp(1j * theta * np.outer(weight, b))
    m = np.diag(phases.reshape(-1))
    return GateOp(
        KIND_CONTROLLED_PHASE, (control, target), m, theta=theta, control_value=control_value
    )


def crot(
    control: int, target: int, d_control: int = 2, control_value: int = 1, theta: float = math.pi
) -> GateOp:
    """Controlled y-rotation R_y(theta) on a qubit target (a NOT for theta = pi)."""
    ry = np.array(
        [
            [math.cos(theta / 2), -math.sin(theta / 2)],
            [math.sin(theta / 2), math.cos(theta / 2)],
        ],
        dtype=complex,
    )
    m = np.eye(2 * d_control, dtype=complex)
    base = 2 * control_value
    m[base : base + 2, base : base + 2] = ry
    return GateOp(KIND_CROT, (control, target), m, theta=theta, control_value=control_value)


def custom(matrix, targets) -> GateOp:
    return GateOp(KIND_CUSTOM, tuple(targets), np.asarray(matrix, dtype=complex))


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over a fixed register."""

    dims: DimensionVector
    ops: tuple[GateOp, ...]

    def __post_init__(self):
        dims = as_dims(self.dims)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "ops", tuple(self.ops))
        for op in self.ops:
            for t in op.targets:
                if not 0 <= t < dims.n:
                    raise ValueError(f"gate target {t} invalid for {dims.n}-qudit register")

    def dagger(self) -> "Circuit":
        return Circuit(self.dims, tuple(op.dagger() for op in reversed(self.ops)))

    def __len__(self) -> int:
        return len(self.ops)


def apply_circuit(state, circuit: Circuit):
    if state.dims.dims != circuit.dims.dims:
        raise ValueError("state and circuit act on different registers")
    for op in circuit.ops:
        state = apply_gate(state, op)
    return state


def dft_matrix(size: int) -> np.ndarray:
    """N x N discrete Fourier matrix, entries exp(2i pi jk/N)/sqrt(N)."""
    if size < 1:
        raise ValueError(f"size must be >= 1, got {size}")
    j = np.arange(size)
    return np.exp(2j * np.pi * np.outer(j, j) / size) / math.sqrt(size)


def digit_reversal_permutation(dims) -> np.ndarray:
    """Index permutation sending big-endian digits to reversed significance.

    ``perm[x]`` re-reads the digits ``(x_0, ..., x_{n-1})`` of ``x`` with
    position 0 as the least significant digit (weight 1) instead of the most
    significant one.  It is the mixed-radix generalization of the bit
    reversal of the binary QFT.
    """
    dims = as_dims(dims)
    n = dims.size
    perm = np.zeros(n, dtype=np.int64)
    weights = []
    w = 1
    for d in dims:
        weights.append(w)
        w *= d
    place = dims.place_weights()
    for x in range(n):
        rem = x
        j = 0
        for pos in range(dims.n):
            digit = rem // place[pos]
            rem %= place[pos]
            j += digit * weights[pos]
        perm[x] = j
    return perm


def synthesize_qft(dims) -> Circuit:
    """Build the QFT circuit for an arbitrary mixed-radix register.

    Qudits are processed from the last position to the first: a local
    Chrestenson/Hadamard on qudit ``l``, then controlled phase rotations from
    each earlier qudit ``p < l`` with angle ``2*pi / prod(d_p..d_l)``, nearest
    control first.  Gate count is ``n`` local gates plus ``n(n-1)/2``
    controlled rotations.
    """
    dims = as_dims(dims)
    ops: list[GateOp] = []
    for l in range(dims.n - 1, -1, -1):
        ops.append(chrestenson(dims[l], l))
        for p in range(l - 1, -1, -1):
            theta = 2 * math.pi / math.prod(dims[m] for m in range(p, l + 1))
            ops.append(controlled_phase(p, l, theta, dims[p], dims[l]))
    return Circuit(dims, tuple(ops))


def synthesize_inverse_qft(dims) -> Circuit:
    """Gate-by-gate reversal of :func:`synthesize_qft` with conjugated phases."""
    return synthesize_qft(dims).dagger()


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of the whole circuit (ordered product of embedded gates)."""
    from .core import _check_gate, _contract_rows  # dense helpers

    dims = circuit.dims
    n = dims.size
    if n > DENSE_CAP:
        raise CapacityError(f"register dimension {n} exceeds dense cap {DENSE_CAP}")
    u = np.eye(n, dtype=complex).reshape(dims.dims + (n,))
    for op in circuit.ops:
        _check_gate(dims, op)
        u = _contract_rows(u, dims, op.targets, op.matrix)
    return u.reshape(n, n)


_SERIALIZABLE = {
    KIND_HADAMARD,
    KIND_CHRESTENSON,
    KIND_CHRESTENSON_INV,
    KIND_PHASE,
    KIND_CONTROLLED_PHASE,
    KIND_CROT,
}


def circuit_to_json(circuit: Circuit) -> str:
    """Serialize a circuit to the stable JSON gate-list format.

    Custom-matrix gates have no wire representation and are rejected.
    """
    ops = []
    for op in circuit.ops:
        if op.kind not in _SERIALIZABLE:
            raise ValueError(f"gate kind {op.kind!r} is not serializable")
        entry: dict = {"kind": op.kind, "targets": list(op.targets)}
        if op.theta is not None:
            entry["theta"] = op.theta
        if op.control_value is not None:
            entry["control_value"] = op.control_value
        ops.append(entry)
    return json.dumps({"dims": list(circuit.dims.dims), "ops": ops})


def circuit_from_json(text: str) -> Circuit:
    data = json.loads(text)
    dims = DimensionVector(data["dims"])
    ops = []
    for entry in data["ops"]:
        kind = entry["kind"]
        targets = tuple(entry["targets"])
        theta = entry.get("theta")
        cval = entry.get("control_value")
        if kind == KIND_HADAMARD:
            ops.append(hadamard(targets[0]))
        elif kind == KIND_CHRESTENSON:
            ops.append(chrestenson(dims[targets[0]], targets[0]))
        elif kind == KIND_CHRESTENSON_INV:
            ops.append(chrestenson(dims[targets[0]], targets[0]).dagger())
        elif kind == KIND_PHASE:
            ops.append(phase_rotation(theta, targets[0], dims[targets[0]]))
        elif kind == KIND_CONTROLLED_PHASE:
            ops.append(
                controlled_phase(
                    targets[0], targets[1], theta, dims[targets[0]], dims[targets[1]], cval
                )
            )
        elif kind == KIND_CROT:
            ops.append(crot(targets[0], targets[1], dims[targets[0]], cval, theta))
        else:
            raise ValueError(f"unknown gate kind {kind!r}")
    return Circuit(dims, tuple(ops))
