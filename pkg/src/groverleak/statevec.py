"""Dense state vectors for an ``n_q``-qubit register.

Bit ordering: qubit ``q`` (1-based, ``1 <= q <= n_q``) is bit ``q - 1`` of the
basis index, so qubit 1 is the least-significant bit. Every observable in this
package is independent of that choice, but tests rely on it.

The conditional phase shift keeps ``|0>`` and negates every other basis
state. With that sign, Hadamard layer + shift + Hadamard layer is exactly the
diffusion matrix ``D_kl = -delta_kl + 2/N``.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InvalidArgumentError

MAX_QUBITS = 24

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)


def _check_n_qubits(n_q):
    if not isinstance(n_q, (int, np.integer)) or not 1 <= n_q <= MAX_QUBITS:
        raise InvalidArgumentError(f"n_q must be an integer in [1, {MAX_QUBITS}], got {n_q!r}")
    return int(n_q)


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Register wavefunction: ``2**n_qubits`` complex amplitudes."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        n_q = _check_n_qubits(self.n_qubits)
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << n_q,):
            raise InvalidArgumentError(
                f"expected {1 << n_q} amplitudes for {n_q} qubits, got shape {amps.shape}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes):
        amps = np.asarray(amplitudes, dtype=np.complex128)
        n = amps.shape[0] if amps.ndim == 1 else 0
        if n < 2 or n & (n - 1):
            raise InvalidArgumentError(f"amplitude count must be a power of two >= 2, got {amps.shape}")
        return cls(n.bit_length() - 1, amps)

    @property
    def dim(self):
        return self.amplitudes.shape[0]

    def norm_sq(self):
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def copy(self):
        return QuantumState(self.n_qubits, self.amplitudes.copy())


def _check_index(state, j):
    if not isinstance(j, (int, np.integer)) or not 0 <= j < state.dim:
        raise InvalidArgumentError(f"basis index must be in [0, {state.dim}), got {j!r}")
    return int(j)


def check_unitary(gate, atol=1e-12):
    g = np.asarray(gate, dtype=np.complex128)
    if g.shape != (2, 2):
        raise InvalidArgumentError(f"single-qubit gate must be 2x2, got shape {g.shape}")
    if not np.allclose(g.conj().T @ g, np.eye(2), rtol=0.0, atol=atol):
        raise InvalidArgumentError("gate is not unitary")
    return g


def uniform_superposition(n_q):
    """Equal-amplitude state ``1/sqrt(2**n_q)`` on every basis state."""
    n_q = _check_n_qubits(n_q)
    dim = 1 << n_q
    return QuantumState(n_q, np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128))


def basis_state(n_q, k):
    n_q = _check_n_qubits(n_q)
    amps = np.zeros(1 << n_q, dtype=np.complex128)
    state = QuantumState(n_q, amps)
    amps[_check_index(state, k)] = 1.0
    return state


def apply_single_qubit_gate(state, gate, q):
    """Apply a 2x2 unitary to qubit ``q`` (1-based, qubit 1 = LSB)."""
    if not isinstance(q, (int, np.integer)) or not 1 <= q <= state.n_qubits:
        raise InvalidArgumentError(f"qubit index must be in [1, {state.n_qubits}], got {q!r}")
    g = check_unitary(gate)
    view = state.amplitudes.reshape(state.dim >> q, 2, 1 << (q - 1))
    out = np.einsum("ab,xby->xay", g, view).reshape(state.dim)
    return QuantumState(state.n_qubits, out)


def apply_gate_layer(state, gates):
    """Apply ``gates[q-1]`` to every qubit ``q`` (tensor-product layer)."""
    gates = np.asarray(gates, dtype=np.complex128)
    if gates.shape != (state.n_qubits, 2, 2):
        raise InvalidArgumentError(f"expected gate stack of shape ({state.n_qubits}, 2, 2), got {gates.shape}")
    out = state.amplitudes.copy()
    _kernels.apply_layer(out.view(np.float64), _kernels.pack_gates(gates))
    return QuantumState(state.n_qubits, out)


def phase_flip_target(state, j):
    """Negate the amplitude of basis state ``j`` (the oracle)."""
    j = _check_index(state, j)
    out = state.amplitudes.copy()
    out[j] = -out[j]
    return QuantumState(state.n_qubits, out)


def conditional_phase_shift(state):
    """Keep ``|0>``, negate every other amplitude."""
    out = state.amplitudes.copy()
    out[1:] = -out[1:]
    return QuantumState(state.n_qubits, out)


def target_probability(state, j):
    j = _check_index(state, j)
    a = state.amplitudes[j]
    return float(a.real * a.real + a.imag * a.imag)


def overlap_sq(a, b):
    """``|<a|b>|**2``."""
    if a.n_qubits != b.n_qubits:
        raise InvalidArgumentError(f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)
