"""Stochastic two-level model with dissipation.

One step maps ``(c_m, c_n) -> exp(-gamma) R(omega) U(phi_m, phi_n) (c_m, c_n)``
where ``U = diag(exp(i phi_m), exp(i phi_n))`` and both phases are drawn
independently from the box ``[-W_phi/2, W_phi/2]`` at every step. The decay is
a scalar applied after the matrix product. There is no saturation floor:
amplitudes decay to zero.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InvalidArgumentError
from .grover import RealizationSeries, grover_geometry, sample_grid


@dataclass(frozen=True)
class StlmParams:
    gamma: float
    w_phi: float
    omega: float
    theta0: float

    def __post_init__(self):
        if not self.gamma >= 0:
            raise InvalidArgumentError(f"gamma must be >= 0, got {self.gamma!r}")
        if not self.w_phi >= 0:
            raise InvalidArgumentError(f"w_phi must be >= 0, got {self.w_phi!r}")

    @classmethod
    def for_qubits(cls, n_q, gamma, w_phi):
        """Parameters with the Grover frequency and initial angle of ``n_q`` qubits."""
        g = grover_geometry(n_q)
        return cls(gamma=gamma, w_phi=w_phi, omega=g.omega, theta0=g.theta0)


@dataclass(frozen=True)
class TwoLevelState:
    c_m: complex
    c_n: complex
    t: int = 0

    @classmethod
    def initial(cls, theta0):
        return cls(complex(math.cos(theta0)), complex(math.sin(theta0)), 0)

    def norm_sq(self):
        return abs(self.c_m) ** 2 + abs(self.c_n) ** 2


def rotation(omega):
    """Grover rotation ``((cos w, -sin w), (sin w, cos w))``."""
    c, s = math.cos(omega), math.sin(omega)
    return np.array([[c, -s], [s, c]])


def stlm_step(state, params, phi_m, phi_n):
    um = state.c_m * complex(math.cos(phi_m), math.sin(phi_m))
    un = state.c_n * complex(math.cos(phi_n), math.sin(phi_n))
    c, s = math.cos(params.omega), math.sin(params.omega)
    decay = math.exp(-params.gamma)
    return TwoLevelState(decay * (c * um - s * un), decay * (s * um + c * un), state.t + 1)


def observables(state, params):
    """``(p, F)`` of a single state at its own iteration count."""
    a = params.omega * state.t + params.theta0
    p = abs(state.c_n) ** 2
    f = abs(state.c_m * math.cos(a) + state.c_n * math.sin(a)) ** 2
    return p, f


def draw_phases(rng, t_max):
    """Unit-box phase draws ``u - 1/2`` of shape ``(t_max, 2)``; multiply by
    ``W_phi`` to get ``(phi_m, phi_n)`` per step."""
    return rng.random((t_max, 2)) - 0.5


def evolve(params, phases, sample_every):
    """Run one realization with prescribed ``(phi_m, phi_n)`` per step.

    ``phases`` has shape ``(t_max, 2)``. Returns ``(p, F)`` arrays on the grid
    ``0, sample_every, ...`` and the final ``TwoLevelState``.
    """
    phases = np.ascontiguousarray(phases, dtype=np.float64)
    t_max = phases.shape[0]
    n = t_max // sample_every + 1
    p = np.empty(n)
    f = np.empty(n)
    c_m, c_n = _kernels.stlm_evolve(
        complex(math.cos(params.theta0)),
        complex(math.sin(params.theta0)),
        params.gamma,
        params.omega,
        params.theta0,
        phases,
        sample_every,
        p,
        f,
    )
    return p, f, TwoLevelState(c_m, c_n, t_max)


def evolve_unit_phases(params, unit_phases, sample_every):
    """``evolve`` with phases ``W_phi * unit_phases``; returns ``(p, F)``."""
    p, f, _ = evolve(params, params.w_phi * unit_phases, sample_every)
    return p, f


def run_stlm_realization(params, t_max, sample_every, rng):
    times = sample_grid(t_max, sample_every)
    p, f = evolve_unit_phases(params, draw_phases(rng, t_max), sample_every)
    return RealizationSeries(sample_times=times, p_j=p, fidelity=f)
