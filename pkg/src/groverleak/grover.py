"""Ideal and imperfect Grover iterations on the full register.

Imperfections live only in the Hadamard gates of the diffusion step. An ideal
Hadamard is ``n . sigma`` with ``n = (1, 0, 1)/sqrt(2)``; the imperfect gate
uses the tilted unit axis

    m = ( (cos(phi) sin(delta) + cos(delta)) / sqrt(2),
          sin(phi) sin(delta),
          (-cos(phi) sin(delta) + cos(delta)) / sqrt(2) )

whose angle to ``n`` is exactly ``|delta|``. For every qubit and layer,
``delta`` is uniform on ``(-eps/2, eps/2)`` and ``phi`` uniform on
``[0, 2 pi)``.

Imperfection-strength units: ``draw_noise`` takes ``eps`` in radians. The
simulation entry points take ``epsilon`` together with ``epsilon_unit``.
``"turn"`` (the default) means ``eps = 2 pi epsilon``, so the maximum tilt is
``pi * epsilon`` radians. ``"rad"`` means ``eps = epsilon``. The turn
convention reproduces the published decay rates at n_q = 13.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InvalidArgumentError
from .statevec import (
    QuantumState,
    uniform_superposition,
)

EPSILON_UNITS = {"turn": 2.0 * math.pi, "rad": 1.0}


@dataclass(frozen=True)
class GroverGeometry:
    n_q: int
    N: int
    omega: float
    theta0: float

    def angle(self, t):
        """Ideal rotation angle ``theta0 + omega t``."""
        return self.theta0 + self.omega * np.asarray(t, dtype=np.float64)

    def ideal_probability(self, t):
        return np.sin(self.angle(t)) ** 2

    def first_peak(self):
        return round((math.pi / 2 - self.theta0) / self.omega)


def grover_geometry(n_q):
    if not isinstance(n_q, (int, np.integer)) or n_q < 1:
        raise InvalidArgumentError(f"n_q must be a positive integer, got {n_q!r}")
    n_q = int(n_q)
    N = 1 << n_q
    omega = math.asin(min(1.0, 2.0 * math.sqrt(N - 1) / N))
    theta0 = math.asin(1.0 / math.sqrt(N))
    return GroverGeometry(n_q=n_q, N=N, omega=omega, theta0=theta0)


@dataclass(frozen=True)
class NoiseDraw:
    """Per-qubit tilt samples for one Hadamard layer (radians)."""

    delta: np.ndarray
    phi: np.ndarray

    def gates(self):
        return hadamard_layer(self.delta, self.phi)


@dataclass(frozen=True)
class RealizationSeries:
    sample_times: np.ndarray
    p_j: np.ndarray
    fidelity: np.ndarray


def sample_grid(t_max, sample_every):
    if not isinstance(t_max, (int, np.integer)) or t_max < 1:
        raise InvalidArgumentError(f"t_max must be a positive integer, got {t_max!r}")
    if not isinstance(sample_every, (int, np.integer)) or not 1 <= sample_every <= t_max:
        raise InvalidArgumentError(f"sample_every must be in [1, t_max], got {sample_every!r}")
    return np.arange(0, t_max + 1, sample_every, dtype=np.int64)


def tilt_axis(delta, phi):
    """Tilted rotation axis ``m`` for arrays (or scalars) of ``delta, phi``."""
    sd, cd = np.sin(delta), np.cos(delta)
    cp, sp = np.cos(phi), np.sin(phi)
    r2 = math.sqrt(2.0)
    return np.stack([(cp * sd + cd) / r2, sp * sd, (-cp * sd + cd) / r2], axis=-1)


def hadamard_layer(delta, phi):
    """Stack of imperfect Hadamards ``m_q . sigma``, shape ``(n_q, 2, 2)``."""
    m = tilt_axis(np.asarray(delta, dtype=np.float64), np.asarray(phi, dtype=np.float64))
    mx, my, mz = m[..., 0], m[..., 1], m[..., 2]
    g = np.empty(m.shape[:-1] + (2, 2), dtype=np.complex128)
    g[..., 0, 0] = mz
    g[..., 0, 1] = mx - 1j * my
    g[..., 1, 0] = mx + 1j * my
    g[..., 1, 1] = -mz
    return g


def imperfect_hadamard(delta, phi):
    """Single imperfect Hadamard gate; ``delta = 0`` gives the ideal one."""
    return hadamard_layer(np.float64(delta), np.float64(phi))


def draw_noise(epsilon, n_q, rng):
    """One layer of tilts: ``delta ~ U(-eps/2, eps/2)``, ``phi ~ U[0, 2 pi)``."""
    if not epsilon >= 0:
        raise InvalidArgumentError(f"epsilon must be >= 0, got {epsilon!r}")
    delta = rng.uniform(-epsilon / 2, epsilon / 2, n_q)
    phi = rng.uniform(0.0, 2.0 * math.pi, n_q)
    return NoiseDraw(delta=delta, phi=phi)


def grover_iteration(state, j, geometry, layer1, layer2):
    """Oracle, imperfect Hadamards (``layer1``), conditional phase shift,
    imperfect Hadamards (``layer2``)."""
    if state.n_qubits != geometry.n_q:
        raise InvalidArgumentError(f"state has {state.n_qubits} qubits, geometry {geometry.n_q}")
    if not isinstance(j, (int, np.integer)) or not 0 <= j < geometry.N:
        raise InvalidArgumentError(f"target index must be in [0, {geometry.N}), got {j!r}")
    out = state.amplitudes.copy()
    _kernels.grover_step(
        out.view(np.float64),
        int(j),
        _kernels.pack_gates(layer1.gates()),
        _kernels.pack_gates(layer2.gates()),
    )
    return QuantumState(state.n_qubits, out)


def ideal_state(geometry, j, t):
    """Closed-form noiseless state after ``t`` iterations."""
    if t < 0:
        raise InvalidArgumentError(f"t must be >= 0, got {t!r}")
    if not 0 <= j < geometry.N:
        raise InvalidArgumentError(f"target index must be in [0, {geometry.N}), got {j!r}")
    th = geometry.theta0 + geometry.omega * t
    amps = np.full(geometry.N, math.cos(th) / math.sqrt(geometry.N - 1), dtype=np.complex128)
    amps[j] = math.sin(th)
    return QuantumState(geometry.n_q, amps)


def run_ga_realization(
    n_q,
    j,
    epsilon,
    t_max,
    sample_every,
    rng,
    shared_layer_draws=False,
    epsilon_unit="turn",
):
    """One noisy Grover run from the uniform state, sampled every
    ``sample_every`` iterations (``t = 0`` included).

    Each iteration draws fresh tilts; the two Hadamard layers of one diffusion
    step get independent draws unless ``shared_layer_draws`` is set.
    """
    geometry = grover_geometry(n_q)
    if not isinstance(j, (int, np.integer)) or not 0 <= j < geometry.N:
        raise InvalidArgumentError(f"target index must be in [0, {geometry.N}), got {j!r}")
    if epsilon_unit not in EPSILON_UNITS:
        raise InvalidArgumentError(f"epsilon_unit must be one of {sorted(EPSILON_UNITS)}, got {epsilon_unit!r}")
    if not epsilon >= 0:
        raise InvalidArgumentError(f"epsilon must be >= 0, got {epsilon!r}")
    eps = epsilon * EPSILON_UNITS[epsilon_unit]
    times = sample_grid(t_max, sample_every)

    layers = 1 if shared_layer_draws else 2
    # one block draw consumes the stream exactly as per-iteration draw_noise calls
    u = rng.random((t_max, layers, 2, n_q))
    delta = -eps / 2 + (eps / 2 - -eps / 2) * u[:, :, 0, :]
    phi = 0.0 + (2.0 * math.pi - 0.0) * u[:, :, 1, :]
    gates = hadamard_layer(delta, phi).reshape(t_max, layers, n_q, 4).view(np.float64)

    amps = uniform_superposition(n_q).amplitudes
    p = np.empty(times.shape[0])
    f = np.empty(times.shape[0])
    _kernels.ga_run(
        amps.view(np.float64),
        int(j),
        np.ascontiguousarray(gates),
        bool(shared_layer_draws),
        int(sample_every),
        geometry.theta0,
        geometry.omega,
        p,
        f,
    )
    return RealizationSeries(sample_times=times, p_j=p, fidelity=f)


__all__ = [
    "EPSILON_UNITS",
    "GroverGeometry",
    "NoiseDraw",
    "RealizationSeries",
    "draw_noise",
    "grover_geometry",
    "grover_iteration",
    "hadamard_layer",
    "ideal_state",
    "imperfect_hadamard",
    "run_ga_realization",
    "sample_grid",
    "tilt_axis",
]
