"""Closed-form ensemble predictions and the Gaussian angle-walk oracle.

Width convention: a Gaussian of *width* ``D`` has density proportional to
``exp(-x**2 / D**2)``, i.e. standard deviation ``D / sqrt(2)``. This is not
the usual sigma convention. It is the one under which
``<cos 2x> = exp(-D_theta**2 t)`` for the accumulated angle after ``t`` steps
and ``<cos phi> = exp(-D_phi**2 / 4)``, which is what the closed forms below
assume.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InvalidArgumentError
from .grover import RealizationSeries, grover_geometry, sample_grid


@dataclass(frozen=True)
class AnalyticParams:
    gamma: float
    delta_theta: float
    delta_phi: float
    omega: float
    theta0: float

    def __post_init__(self):
        for name in ("gamma", "delta_theta", "delta_phi"):
            if not getattr(self, name) >= 0:
                raise InvalidArgumentError(f"{name} must be >= 0, got {getattr(self, name)!r}")

    @classmethod
    def for_qubits(cls, n_q, gamma, delta_theta, delta_phi=0.0):
        g = grover_geometry(n_q)
        return cls(gamma=gamma, delta_theta=delta_theta, delta_phi=delta_phi, omega=g.omega, theta0=g.theta0)


def _times(t):
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0):
        raise InvalidArgumentError("t must be >= 0")
    return t


def p_analytic(t, params):
    """Ensemble-mean target probability
    ``exp(-2 gamma t)/2 * (1 - cos(2 omega t + 2 theta0) exp(-D_theta^2 t))``."""
    t = _times(t)
    a2 = 2.0 * (params.omega * t + params.theta0)
    return 0.5 * np.exp(-2.0 * params.gamma * t) * (1.0 - np.cos(a2) * np.exp(-params.delta_theta**2 * t))


def f_analytic(t, params):
    """Ensemble-mean fidelity; reduces to ``exp(-2 gamma t)(1 + exp(-D_theta^2 t))/2``
    when ``delta_phi = 0``."""
    t = _times(t)
    a2 = 2.0 * (params.omega * t + params.theta0)
    dephase = 1.0 - np.sin(a2) ** 2 * (1.0 - math.exp(-params.delta_phi**2 / 4.0))
    return 0.5 * np.exp(-2.0 * params.gamma * t) * (1.0 + np.exp(-params.delta_theta**2 * t) * dephase)


def lower_envelope(t, params):
    """Trough values of ``p_analytic``: ``exp(-2 gamma t)/2 (1 - exp(-D_theta^2 t))``."""
    t = _times(t)
    return 0.5 * np.exp(-2.0 * params.gamma * t) * (1.0 - np.exp(-params.delta_theta**2 * t))


def draw_walk_normals(rng, n_samples):
    """Standard normals for one walk realization: ``n_samples - 1`` interval
    increments, then ``n_samples`` relative phases."""
    inc = rng.standard_normal(n_samples - 1)
    phi = rng.standard_normal(n_samples)
    return inc, phi


def walk_observables(params, times, z_inc, z_phi):
    """Observables for a block of walk realizations from unit normals.

    The angle increment over an interval of ``k`` steps is the sum of ``k``
    i.i.d. width-``D_theta`` Gaussians, drawn directly as one Gaussian of
    standard deviation ``D_theta sqrt(k/2)``.
    """
    z_phi = np.atleast_2d(z_phi)
    cum = accumulated_angle(params, times, z_inc)
    phi = z_phi * (params.delta_phi / math.sqrt(2.0))
    p = np.empty(cum.shape)
    f = np.empty(cum.shape)
    _kernels.walk_rows(np.asarray(times, dtype=np.int64), params.theta0, params.omega, params.gamma, cum, phi, p, f)
    return p, f


def run_walk_realization(params, t_max, sample_every, rng):
    """One Gaussian-walk realization: ``theta(t) = theta0 + omega t + sum eta``,
    ``p = exp(-2 gamma t) sin^2 theta``, ``F`` from
    ``c = (exp(-gamma t) cos theta, exp(-gamma t + i phi) sin theta)``."""
    times = sample_grid(t_max, sample_every)
    z_inc, z_phi = draw_walk_normals(rng, times.shape[0])
    p, f = walk_observables(params, times, z_inc, z_phi)
    return RealizationSeries(sample_times=times, p_j=p[0], fidelity=f[0])


def accumulated_angle(params, times, z_inc):
    """Accumulated angle deviation ``sum eta`` at each sample time."""
    z_inc = np.atleast_2d(z_inc)
    steps = np.diff(times).astype(np.float64)
    out = np.zeros((z_inc.shape[0], z_inc.shape[1] + 1))
    np.cumsum(z_inc * (params.delta_theta * np.sqrt(steps / 2.0)), axis=1, out=out[:, 1:])
    return out
