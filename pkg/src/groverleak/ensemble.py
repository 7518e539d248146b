"""Monte Carlo ensembles over independent realizations.

Realization ``i`` of a model draws from its own stream,
``SeedSequence([master_seed, model_code, i])`` fed to PCG64, so the result
never depends on execution order or worker count. Per-realization series are
buffered and reduced in ascending index order; merging two ensembles that
carry their raw rows therefore reproduces a single larger run bit for bit.

The standard error is ``sample std (ddof=1) / sqrt(M)`` and is 0 for ``M = 1``.
"""

import dataclasses
import functools
import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import ClassVar, Optional

import numpy as np

from .analytic import AnalyticParams, draw_walk_normals, run_walk_realization, walk_observables
from .errors import ConfigError, InvalidArgumentError
from .grover import EPSILON_UNITS, run_ga_realization, sample_grid
from .stlm import StlmParams, run_stlm_realization
from .statevec import MAX_QUBITS

MODEL_CODES = {"GA": 1, "STLM": 2, "WALK": 3}
DEFAULT_M = {"GA": 100, "STLM": 1000, "WALK": 100_000}


def realization_rng(master_seed, model_tag, index):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([master_seed, MODEL_CODES[model_tag], index])))


def _require_int(cfg, name, lo, hi=None):
    v = getattr(cfg, name)
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < lo or (hi is not None and v > hi):
        bound = f"[{lo}, {hi}]" if hi is not None else f">= {lo}"
        raise ConfigError(name, f"must be an integer {bound}, got {v!r}")


def _require_nonneg(cfg, name):
    v = getattr(cfg, name)
    if isinstance(v, bool) or not isinstance(v, (int, float, np.floating, np.integer)) or not math.isfinite(v) or v < 0:
        raise ConfigError(name, f"must be a finite number >= 0, got {v!r}")


class _Grid:
    """Shared sample-grid handling for the model configs below."""

    def _validate_grid(self):
        _require_int(self, "n_q", 1, MAX_QUBITS)
        _require_int(self, "t_max", 1)
        _require_int(self, "sample_every", 1, self.t_max)

    @property
    def sample_times(self):
        return sample_grid(self.t_max, self.sample_every)

    def digest(self):
        blob = json.dumps({"model": self.tag, **dataclasses.asdict(self)}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def simulate_block(self, master_seed, lo, hi):
        times = self.sample_times
        p = np.empty((hi - lo, times.shape[0]))
        f = np.empty((hi - lo, times.shape[0]))
        for r, i in enumerate(range(lo, hi)):
            s = self.realize(realization_rng(master_seed, self.tag, i))
            p[r] = s.p_j
            f[r] = s.fidelity
        return p, f


@dataclass(frozen=True)
class GAConfig(_Grid):
    """Noisy Grover search; ``epsilon`` is in ``epsilon_unit`` (see ``grover``)."""

    tag: ClassVar[str] = "GA"
    n_q: int = 13
    epsilon: float = 0.0
    t_max: int = 1400
    sample_every: int = 20
    target_j: int = 0
    shared_layer_draws: bool = False
    epsilon_unit: str = "turn"

    def validate(self):
        self._validate_grid()
        _require_nonneg(self, "epsilon")
        _require_int(self, "target_j", 0, (1 << self.n_q) - 1)
        if not isinstance(self.shared_layer_draws, bool):
            raise ConfigError("shared_layer_draws", f"must be a bool, got {self.shared_layer_draws!r}")
        if self.epsilon_unit not in EPSILON_UNITS:
            raise ConfigError("epsilon_unit", f"must be one of {sorted(EPSILON_UNITS)}, got {self.epsilon_unit!r}")

    def realize(self, rng):
        return run_ga_realization(
            self.n_q,
            self.target_j,
            self.epsilon,
            self.t_max,
            self.sample_every,
            rng,
            shared_layer_draws=self.shared_layer_draws,
            epsilon_unit=self.epsilon_unit,
        )


@dataclass(frozen=True)
class STLMConfig(_Grid):
    tag: ClassVar[str] = "STLM"
    n_q: int = 13
    gamma: float = 0.0
    w_phi: float = 0.0
    t_max: int = 1400
    sample_every: int = 20

    def validate(self):
        self._validate_grid()
        _require_nonneg(self, "gamma")
        _require_nonneg(self, "w_phi")

    @property
    def params(self):
        return StlmParams.for_qubits(self.n_q, self.gamma, self.w_phi)

    def realize(self, rng):
        return run_stlm_realization(self.params, self.t_max, self.sample_every, rng)


@functools.lru_cache(maxsize=2)
def _walk_normals(master_seed, lo, hi, n_samples):
    inc = np.empty((hi - lo, n_samples - 1))
    phi = np.empty((hi - lo, n_samples))
    for r, i in enumerate(range(lo, hi)):
        inc[r], phi[r] = draw_walk_normals(realization_rng(master_seed, "WALK", i), n_samples)
    inc.flags.writeable = False
    phi.flags.writeable = False
    return inc, phi


@dataclass(frozen=True)
class WalkConfig(_Grid):
    tag: ClassVar[str] = "WALK"
    n_q: int = 13
    gamma: float = 0.0
    delta_theta: float = 0.0
    delta_phi: float = 0.0
    t_max: int = 500
    sample_every: int = 20

    def validate(self):
        self._validate_grid()
        _require_nonneg(self, "gamma")
        _require_nonneg(self, "delta_theta")
        _require_nonneg(self, "delta_phi")

    @property
    def params(self):
        return AnalyticParams.for_qubits(self.n_q, self.gamma, self.delta_theta, self.delta_phi)

    def realize(self, rng):
        return run_walk_realization(self.params, self.t_max, self.sample_every, rng)

    def simulate_block(self, master_seed, lo, hi):
        # unit draws do not depend on the model parameters; cached for sweeps
        times = self.sample_times
        inc, phi = _walk_normals(master_seed, lo, hi, times.shape[0])
        return walk_observables(self.params, times, inc, phi)


@dataclass(frozen=True)
class EnsembleSeries:
    sample_times: np.ndarray
    p_mean: np.ndarray
    p_stderr: np.ndarray
    f_mean: np.ndarray
    f_stderr: np.ndarray
    m_realizations: int
    model_tag: str
    config_digest: str
    p_samples: Optional[np.ndarray] = field(default=None, repr=False)
    f_samples: Optional[np.ndarray] = field(default=None, repr=False)

    @classmethod
    def from_samples(cls, sample_times, p_samples, f_samples, model_tag, config_digest):
        p_samples = np.asarray(p_samples, dtype=np.float64)
        f_samples = np.asarray(f_samples, dtype=np.float64)
        m = p_samples.shape[0]
        p_mean, p_err = _mean_stderr(p_samples)
        f_mean, f_err = _mean_stderr(f_samples)
        for a in (p_samples, f_samples):
            a.flags.writeable = False
        return cls(
            sample_times=np.asarray(sample_times, dtype=np.int64),
            p_mean=p_mean,
            p_stderr=p_err,
            f_mean=f_mean,
            f_stderr=f_err,
            m_realizations=m,
            model_tag=model_tag,
            config_digest=config_digest,
            p_samples=p_samples,
            f_samples=f_samples,
        )

    @classmethod
    def empty(cls, sample_times, model_tag, config_digest):
        n = len(sample_times)
        return cls.from_samples(sample_times, np.empty((0, n)), np.empty((0, n)), model_tag, config_digest)

    @property
    def has_samples(self):
        return self.p_samples is not None and self.f_samples is not None

    def window(self, t_lo=None, t_hi=None):
        """Restrict to samples with ``t_lo <= t <= t_hi``."""
        t = self.sample_times
        keep = np.ones(t.shape, dtype=bool)
        if t_lo is not None:
            keep &= t >= t_lo
        if t_hi is not None:
            keep &= t <= t_hi
        return dataclasses.replace(
            self,
            sample_times=t[keep],
            p_mean=self.p_mean[keep],
            p_stderr=self.p_stderr[keep],
            f_mean=self.f_mean[keep],
            f_stderr=self.f_stderr[keep],
            p_samples=self.p_samples[:, keep] if self.p_samples is not None else None,
            f_samples=self.f_samples[:, keep] if self.f_samples is not None else None,
        )


def _mean_stderr(x):
    m = x.shape[0]
    if m == 0:
        nan = np.full(x.shape[1], np.nan)
        return nan, nan.copy()
    mean = x.mean(axis=0)
    if m == 1:
        return mean, np.zeros_like(mean)
    return mean, x.std(axis=0, ddof=1) / math.sqrt(m)


def _run_block(args):
    config, master_seed, lo, hi = args
    return config.simulate_block(master_seed, lo, hi)


def run_ensemble(config, m=None, master_seed=0, workers=1):
    """Run ``m`` realizations of ``config`` and aggregate them.

    ``workers > 1`` spreads contiguous index blocks over processes; the
    output is identical to a serial run.
    """
    if not hasattr(config, "validate"):
        raise ConfigError("model", f"unsupported model config {type(config).__name__}")
    config.validate()
    if m is None:
        m = DEFAULT_M[config.tag]
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 1:
        raise ConfigError("m", f"must be an integer >= 1, got {m!r}")
    if isinstance(master_seed, bool) or not isinstance(master_seed, (int, np.integer)) or master_seed < 0:
        raise ConfigError("seed", f"must be a non-negative integer, got {master_seed!r}")
    workers = max(1, min(int(workers or 1), m))

    bounds = np.linspace(0, m, workers + 1).astype(int)
    blocks = [(config, int(master_seed), int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    if workers == 1:
        parts = [_run_block(b) for b in blocks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_block, blocks))
    p = np.concatenate([x[0] for x in parts], axis=0)
    f = np.concatenate([x[1] for x in parts], axis=0)
    return EnsembleSeries.from_samples(config.sample_times, p, f, config.tag, config.digest())


def merge_ensembles(a, b):
    """Pool two ensembles of the same configuration.

    With raw rows on both sides the result equals a single run over the
    concatenated realizations; otherwise the moments are pooled exactly.
    """
    if a.model_tag != b.model_tag:
        raise InvalidArgumentError(f"model mismatch: {a.model_tag} vs {b.model_tag}")
    if a.config_digest != b.config_digest:
        raise InvalidArgumentError("config digest mismatch")
    if not np.array_equal(a.sample_times, b.sample_times):
        raise InvalidArgumentError("sample times differ")
    if a.m_realizations == 0:
        return b
    if b.m_realizations == 0:
        return a
    if a.has_samples and b.has_samples:
        return EnsembleSeries.from_samples(
            a.sample_times,
            np.concatenate([a.p_samples, b.p_samples]),
            np.concatenate([a.f_samples, b.f_samples]),
            a.model_tag,
            a.config_digest,
        )
    ma, mb = a.m_realizations, b.m_realizations
    m = ma + mb
    p_mean, p_err = _pool(a.p_mean, a.p_stderr, ma, b.p_mean, b.p_stderr, mb)
    f_mean, f_err = _pool(a.f_mean, a.f_stderr, ma, b.f_mean, b.f_stderr, mb)
    return EnsembleSeries(a.sample_times, p_mean, p_err, f_mean, f_err, m, a.model_tag, a.config_digest)


def _pool(mean_a, err_a, ma, mean_b, err_b, mb):
    m = ma + mb
    mean = (ma * mean_a + mb * mean_b) / m
    # sums of squared deviations recovered from stderr = s / sqrt(M)
    ss = (ma - 1) * ma * err_a**2 + (mb - 1) * mb * err_b**2 + ma * mb / m * (mean_a - mean_b) ** 2
    return mean, np.sqrt(ss / (m - 1) / m)
