"""Recover effective-model parameters from ensemble curves.

Both fitters minimise the summed squared residuals of ``p`` and ``F`` over a
fit window, by multi-start Nelder-Mead in parameter coordinates scaled to the
unit box. Starting points are the best cells of a coarse grid. A run counts as
converged when its final simplex spans less than ``1e-6`` in every scaled
coordinate.

The default window ends at the first sample where the fidelity falls below
``0.02``. Past that point the register sits on its ``~1/N`` floor, which the
effective models do not have.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .analytic import AnalyticParams, f_analytic, p_analytic
from .ensemble import EnsembleSeries, realization_rng
from .errors import DataError, InvalidArgumentError
from .stlm import StlmParams, draw_phases, evolve_unit_phases

SATURATION_THRESHOLD = 0.02
MIN_POINTS = 10
N_STARTS = 8
SIMPLEX_TOL = 1e-6

ANALYTIC_BOUNDS = {"gamma": (0.0, 0.1), "delta_theta": (0.0, 0.5), "delta_phi": (0.0, 0.5)}
STLM_BOUNDS = {"gamma": (0.0, 0.1), "w_phi": (0.0, 2.0)}


@dataclass(frozen=True)
class FitResult:
    params: dict
    sse: float
    n_points: int
    evaluations: int
    converged: bool
    fit_window: tuple
    starts: list = field(default_factory=list, repr=False)


def default_fit_window(series, threshold=SATURATION_THRESHOLD):
    """``(t_first, t_hi)`` with ``t_hi`` the first sample where ``f_mean < threshold``.

    Fast decay can reach the threshold within fewer than ``MIN_POINTS``
    samples; the window is then stretched to hold ``MIN_POINTS`` of them.
    """
    t = series.sample_times
    below = np.nonzero(series.f_mean < threshold)[0]
    k = below[0] if below.size else len(t) - 1
    k = min(max(k, MIN_POINTS - 1), len(t) - 1)
    return int(t[0]), int(t[k])


def series_sse(a, b, window=None, weight_f=1.0):
    """Sum over shared sample times in ``window`` of ``dp**2 + weight_f * dF**2``."""
    ta, tb = np.asarray(a.sample_times), np.asarray(b.sample_times)
    common, ia, ib = np.intersect1d(ta, tb, return_indices=True)
    if window is not None:
        keep = (common >= window[0]) & (common <= window[1])
        ia, ib = ia[keep], ib[keep]
    if ia.size == 0:
        raise InvalidArgumentError("no overlapping samples in the window")
    dp = np.asarray(a.p_mean)[ia] - np.asarray(b.p_mean)[ib]
    df = np.asarray(a.f_mean)[ia] - np.asarray(b.f_mean)[ib]
    return float(np.sum(dp * dp) + weight_f * np.sum(df * df))


def analytic_series(sample_times, params):
    """Closed-form curves packaged as a zero-error series."""
    t = np.asarray(sample_times, dtype=np.int64)
    zeros = np.zeros(t.shape)
    return EnsembleSeries(t, p_analytic(t, params), zeros, f_analytic(t, params), zeros.copy(), 1, "ANALYTIC", "")


def _fit_data(series, window):
    if window is None:
        window = default_fit_window(series)
    t_lo, t_hi = window
    keep = (series.sample_times >= t_lo) & (series.sample_times <= t_hi)
    t = series.sample_times[keep]
    p = np.asarray(series.p_mean, dtype=np.float64)[keep]
    f = np.asarray(series.f_mean, dtype=np.float64)[keep]
    if t.size < MIN_POINTS:
        raise InvalidArgumentError(f"need at least {MIN_POINTS} sample points in the fit window {window}, got {t.size}")
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(f))):
        raise DataError("non-finite values in the data to fit")
    return (int(t_lo), int(t_hi)), t, p, f


def _simplex_span(simplex):
    return float(np.max(np.ptp(simplex, axis=0)))


def _multistart(objective, names, bounds, grid, n_starts=N_STARTS):
    """Minimise ``objective(values)`` from the ``n_starts`` best grid points."""
    upper = np.array([bounds[n][1] for n in names])
    lower = np.array([bounds[n][0] for n in names])
    span = upper - lower
    evals = 0

    def scaled(x):
        nonlocal evals
        evals += 1
        return objective(lower + span * np.clip(x, 0.0, 1.0))

    cand = np.array(list(itertools.product(*grid)), dtype=np.float64)
    scores = np.array([objective(c) for c in cand])
    evals += len(cand)
    order = np.argsort(scores, kind="stable")[:n_starts]

    best = None
    starts = []
    for k in order:
        x0 = (cand[k] - lower) / span
        res = _nelder_mead(scaled, x0)
        # one restart from the optimum guards against a collapsed simplex
        res = _nelder_mead(scaled, res.x)
        conv = bool(res.success) and _simplex_span(res.final_simplex[0]) < SIMPLEX_TOL
        values = lower + span * np.clip(res.x, 0.0, 1.0)
        starts.append((dict(zip(names, cand[k])), float(res.fun)))
        if best is None or res.fun < best[1]:
            best = (values, float(res.fun), conv)
    return best[0], best[1], best[2], evals, starts


def _nelder_mead(fun, x0):
    x0 = np.asarray(x0, dtype=np.float64)
    n = x0.size
    simplex = [x0]
    for i in range(n):
        v = x0.copy()
        step = 0.1 * v[i] if v[i] > 1e-3 else 0.01
        v[i] = v[i] + step if v[i] + step <= 1.0 else v[i] - step
        simplex.append(v)
    return minimize(
        fun,
        x0,
        method="Nelder-Mead",
        bounds=[(0.0, 1.0)] * n,
        options={
            "initial_simplex": np.array(simplex),
            # termination purely on simplex size
            "xatol": SIMPLEX_TOL / 2,
            "fatol": np.inf,
            "maxiter": 5000,
            "maxfev": 10000,
        },
    )


def fit_analytic(ga, geometry, fix_delta_phi_zero=True, window=None, weight_f=1.0):
    """Fit the closed-form ``p(t), F(t)`` to ensemble means.

    Free parameters: ``gamma, delta_theta`` and, unless ``fix_delta_phi_zero``,
    ``delta_phi``.
    """
    window, t, p, f = _fit_data(ga, window)
    names = ["gamma", "delta_theta"] if fix_delta_phi_zero else ["gamma", "delta_theta", "delta_phi"]

    def objective(values):
        kw = dict(zip(names, values))
        params = AnalyticParams(
            gamma=kw["gamma"],
            delta_theta=kw["delta_theta"],
            delta_phi=kw.get("delta_phi", 0.0),
            omega=geometry.omega,
            theta0=geometry.theta0,
        )
        dp = p_analytic(t, params) - p
        df = f_analytic(t, params) - f
        return float(np.sum(dp * dp) + weight_f * np.sum(df * df))

    grid = [
        np.geomspace(1e-5, 0.05, 16),
        np.geomspace(1e-3, 0.4, 16),
    ]
    if not fix_delta_phi_zero:
        grid.append(np.array([0.0, 0.05, 0.15, 0.3]))
    values, sse, conv, evals, starts = _multistart(objective, names, ANALYTIC_BOUNDS, grid)
    fitted = dict(zip(names, (float(v) for v in values)))
    if fix_delta_phi_zero:
        fitted["delta_phi"] = 0.0
    return FitResult(fitted, sse, int(t.size), evals, conv, window, starts)


class StlmObjective:
    """SSE between target curves and an STLM ensemble under common random numbers.

    The unit phase draws of all ``m`` realizations are fixed once from
    ``fit_seed`` (the same streams ``run_ensemble`` uses), so the objective is
    a deterministic function of ``(gamma, w_phi)``.
    """

    def __init__(self, t, p, f, geometry, m, fit_seed, weight_f=1.0):
        t = np.asarray(t, dtype=np.int64)
        self.t_max = int(t[-1])
        self.sample_every = int(np.gcd.reduce(t[t > 0])) if np.any(t > 0) else 1
        grid = np.arange(0, self.t_max + 1, self.sample_every)
        self.index = np.searchsorted(grid, t)
        self.p, self.f = p, f
        self.geometry = geometry
        self.weight_f = weight_f
        self.unit = [draw_phases(realization_rng(fit_seed, "STLM", i), self.t_max) for i in range(m)]

    def curves(self, gamma, w_phi):
        params = StlmParams(gamma=gamma, w_phi=w_phi, omega=self.geometry.omega, theta0=self.geometry.theta0)
        n = self.t_max // self.sample_every + 1
        p_sum = np.zeros(n)
        f_sum = np.zeros(n)
        for u in self.unit:
            p, f = evolve_unit_phases(params, u, self.sample_every)
            p_sum += p
            f_sum += f
        m = len(self.unit)
        return p_sum[self.index] / m, f_sum[self.index] / m

    def __call__(self, values):
        p, f = self.curves(*values)
        dp = p - self.p
        df = f - self.f
        return float(np.sum(dp * dp) + self.weight_f * np.sum(df * df))


def fit_stlm(ga, geometry, m_stlm=1000, fit_seed=0, window=None, weight_f=1.0):
    """Fit ``(gamma, w_phi)`` of the two-level model to ensemble means."""
    window, t, p, f = _fit_data(ga, window)
    if m_stlm < 1:
        raise InvalidArgumentError(f"m_stlm must be >= 1, got {m_stlm!r}")
    objective = StlmObjective(t, p, f, geometry, m_stlm, fit_seed, weight_f)
    grid = [np.geomspace(1e-5, 0.05, 8), np.array([0.02, 0.05, 0.1, 0.2, 0.4, 0.8])]
    values, sse, conv, evals, starts = _multistart(objective, ["gamma", "w_phi"], STLM_BOUNDS, grid)
    fitted = {"gamma": float(values[0]), "w_phi": float(values[1])}
    return FitResult(fitted, sse, int(t.size), evals, conv, window, starts)


def relative_error(value, reference):
    return abs(value - reference) / abs(reference) if reference else math.inf
