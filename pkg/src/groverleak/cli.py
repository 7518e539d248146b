"""Command-line front end.

Subcommands::

    groverleak run      --model {ga,stlm,walk,analytic} [model flags] --out FILE
    groverleak fit      CSV --mode {analytic,stlm} [--out FILE]
    groverleak figures  OUTDIR

Exit codes: 0 success, 2 configuration or input error, 3 fit did not
converge, 4 I/O error. ``GROVERLEAK_OUT_DIR`` sets the default output
directory. Options may also come from a ``key=value`` file given with
``--config``; command-line flags win.
"""

import argparse
import os
import sys
import time
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from .csvio import read_series_csv, write_series_csv
from .ensemble import DEFAULT_M, GAConfig, STLMConfig, WalkConfig, run_ensemble
from .errors import ConfigError, DataError, InvalidArgumentError
from .fit import analytic_series, fit_analytic, fit_stlm
from .analytic import AnalyticParams
from .grover import grover_geometry, sample_grid

ENV_OUT_DIR = "GROVERLEAK_OUT_DIR"

EXIT_OK, EXIT_CONFIG, EXIT_NOT_CONVERGED, EXIT_IO = 0, 2, 3, 4

MODEL_PARAMS = {
    "ga": ({"epsilon"}, {"target_j", "shared_layer_draws", "epsilon_unit"}),
    "stlm": ({"gamma", "w_phi"}, set()),
    "walk": ({"gamma", "delta_theta"}, {"delta_phi"}),
    "analytic": ({"gamma", "delta_theta"}, {"delta_phi"}),
}
ALL_MODEL_PARAMS = set().union(*(req | opt for req, opt in MODEL_PARAMS.values()))


@dataclass
class ExperimentConfig:
    model: str
    n_q: int = 13
    epsilon: Optional[float] = None
    gamma: Optional[float] = None
    w_phi: Optional[float] = None
    delta_theta: Optional[float] = None
    delta_phi: Optional[float] = None
    t_max: int = 1400
    sample_every: int = 20
    m: Optional[int] = None
    seed: int = 0
    target_j: Optional[int] = None
    shared_layer_draws: Optional[bool] = None
    epsilon_unit: Optional[str] = None
    workers: Optional[int] = None
    output_path: Optional[str] = None

    def validate(self):
        if self.model not in MODEL_PARAMS:
            raise ConfigError("model", f"must be one of {sorted(MODEL_PARAMS)}, got {self.model!r}")
        required, optional = MODEL_PARAMS[self.model]
        for name in sorted(required):
            if getattr(self, name) is None:
                raise ConfigError(name, f"required for model {self.model}")
        for name in sorted(ALL_MODEL_PARAMS - required - optional):
            if getattr(self, name) is not None:
                raise ConfigError(name, f"not accepted by model {self.model}")
        if self.m is not None and self.model == "analytic":
            raise ConfigError("m", "not accepted by model analytic (deterministic)")
        self.model_config().validate()
        if self.m is not None and (isinstance(self.m, bool) or self.m < 1):
            raise ConfigError("m", f"must be >= 1, got {self.m!r}")
        if self.seed < 0:
            raise ConfigError("seed", f"must be >= 0, got {self.seed!r}")

    def model_config(self):
        grid = dict(n_q=self.n_q, t_max=self.t_max, sample_every=self.sample_every)
        if self.model == "ga":
            extra = {
                k: getattr(self, k)
                for k in ("target_j", "shared_layer_draws", "epsilon_unit")
                if getattr(self, k) is not None
            }
            return GAConfig(epsilon=self.epsilon, **grid, **extra)
        if self.model == "stlm":
            return STLMConfig(gamma=self.gamma, w_phi=self.w_phi, **grid)
        # walk and analytic share the parameter set
        return WalkConfig(gamma=self.gamma, delta_theta=self.delta_theta, delta_phi=self.delta_phi or 0.0, **grid)


_INT_FIELDS = {"n_q", "t_max", "sample_every", "m", "seed", "target_j", "workers"}
_FLOAT_FIELDS = {"epsilon", "gamma", "w_phi", "delta_theta", "delta_phi"}
_ALIASES = {"nq": "n_q", "tmax": "t_max", "wphi": "w_phi", "out": "output_path"}


def load_config_file(path):
    """Parse ``key=value`` lines (``#`` comments allowed) into field values."""
    values = {}
    names = {f.name for f in fields(ExperimentConfig)}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError("config", f"{path}:{lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            key = _ALIASES.get(key, key)
            if key not in names:
                raise ConfigError(key, f"{path}:{lineno}: unknown option")
            values[key] = _coerce(key, val)
    return values


def _coerce(key, val):
    try:
        if key in _INT_FIELDS:
            return int(val)
        if key in _FLOAT_FIELDS:
            return float(val)
    except ValueError:
        raise ConfigError(key, f"cannot parse {val!r}") from None
    if key == "shared_layer_draws":
        if val.lower() in ("1", "true", "yes", "on"):
            return True
        if val.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(key, f"cannot parse {val!r} as a boolean")
    return val


def _default_out(name):
    return os.path.join(os.environ.get(ENV_OUT_DIR, "."), name)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="groverleak", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="simulate or evaluate one model and write its curves as CSV")
    run.add_argument("--config", help="key=value file; flags override its entries")
    run.add_argument("--model", choices=sorted(MODEL_PARAMS))
    run.add_argument("--nq", dest="n_q", type=int)
    run.add_argument("--epsilon", type=float)
    run.add_argument("--epsilon-unit", choices=("turn", "rad"))
    run.add_argument("--gamma", type=float)
    run.add_argument("--wphi", dest="w_phi", type=float)
    run.add_argument("--delta-theta", type=float)
    run.add_argument("--delta-phi", type=float)
    run.add_argument("--tmax", dest="t_max", type=int)
    run.add_argument("--sample-every", type=int)
    run.add_argument("--m", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--target-j", type=int)
    run.add_argument("--shared-layer-draws", action="store_const", const=True, default=None)
    run.add_argument("--workers", type=int)
    run.add_argument("--out", dest="output_path")

    fit = sub.add_parser("fit", help="fit effective-model parameters to a GA ensemble CSV")
    fit.add_argument("csv")
    fit.add_argument("--mode", choices=("analytic", "stlm"), required=True)
    fit.add_argument("--nq", dest="n_q", type=int, default=13)
    fit.add_argument("--free-delta-phi", action="store_true", help="also fit delta_phi (analytic mode)")
    fit.add_argument("--m-stlm", type=int, default=1000)
    fit.add_argument("--seed", type=int, default=0, help="common-random-number seed for the STLM objective")
    fit.add_argument("--t-lo", type=int)
    fit.add_argument("--t-hi", type=int)
    fit.add_argument("--weight-f", type=float, default=1.0)
    fit.add_argument("--out", help="write the fitted curves as CSV")

    fig = sub.add_parser("figures", help="reproduce the reference figure panels (CSV + SVG)")
    fig.add_argument("output_dir", nargs="?")
    fig.add_argument("--nq", dest="n_q", type=int, default=13)
    fig.add_argument("--tmax", dest="t_max", type=int, default=1400)
    fig.add_argument("--sample-every", type=int, default=20)
    fig.add_argument("--m", type=int, default=DEFAULT_M["GA"])
    fig.add_argument("--m-stlm", type=int, default=DEFAULT_M["STLM"])
    fig.add_argument("--seed", type=int, default=0)
    fig.add_argument("--workers", type=int)
    return parser


def _experiment_from_args(args):
    values = load_config_file(args.config) if args.config else {}
    for f in fields(ExperimentConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    if "model" not in values:
        raise ConfigError("model", "required (--model or model= in the config file)")
    cfg = ExperimentConfig(**values)
    cfg.validate()
    return cfg


def cmd_run(cfg, out=None):
    out = out or sys.stdout
    started = time.perf_counter()
    if cfg.model == "analytic":
        mc = cfg.model_config()
        series = analytic_series(sample_grid(cfg.t_max, cfg.sample_every), mc.params)
    else:
        workers = cfg.workers or os.cpu_count() or 1
        series = run_ensemble(cfg.model_config(), cfg.m, cfg.seed, workers=workers)
    path = cfg.output_path or _default_out(f"{cfg.model}.csv")
    write_series_csv(series, path)
    k = int(np.argmax(series.p_mean))
    print(
        f"{cfg.model}: wrote {len(series.sample_times)} rows to {path}; "
        f"max p_mean={series.p_mean[k]:.6f} at t={int(series.sample_times[k])}; "
        f"wall={time.perf_counter() - started:.2f}s",
        file=out,
    )
    return series


def cmd_fit(args, out=None):
    out = out or sys.stdout
    data = read_series_csv(args.csv)
    geometry = grover_geometry(args.n_q)
    window = None
    if args.t_lo is not None or args.t_hi is not None:
        t = data.sample_times
        window = (args.t_lo if args.t_lo is not None else int(t[0]), args.t_hi if args.t_hi is not None else int(t[-1]))
    if args.mode == "analytic":
        res = fit_analytic(data, geometry, fix_delta_phi_zero=not args.free_delta_phi, window=window, weight_f=args.weight_f)
        names = ("gamma", "delta_theta", "delta_phi")
    else:
        res = fit_stlm(data, geometry, m_stlm=args.m_stlm, fit_seed=args.seed, window=window, weight_f=args.weight_f)
        names = ("gamma", "w_phi")
    print(f"mode={args.mode}", file=out)
    for name in names:
        print(f"{name}={res.params[name]:.10g}", file=out)
    print(f"sse={res.sse:.10g}", file=out)
    print(f"n_points={res.n_points}", file=out)
    print(f"window={res.fit_window[0]}..{res.fit_window[1]}", file=out)
    print(f"evaluations={res.evaluations}", file=out)
    print(f"converged={res.converged}", file=out)
    if args.out:
        t = data.sample_times
        if args.mode == "analytic":
            params = AnalyticParams.for_qubits(args.n_q, res.params["gamma"], res.params["delta_theta"], res.params["delta_phi"])
            curve = analytic_series(t, params)
        else:
            cfg = STLMConfig(
                n_q=args.n_q,
                gamma=res.params["gamma"],
                w_phi=res.params["w_phi"],
                t_max=int(t[-1]),
                sample_every=int(np.gcd.reduce(t[t > 0])),
            )
            curve = run_ensemble(cfg, args.m_stlm, args.seed)
        write_series_csv(curve, args.out)
    return res


def cmd_figures(args, out=None):
    out = out or sys.stdout
    from .figures import reproduce_figures

    out_dir = args.output_dir or os.environ.get(ENV_OUT_DIR, "figures")
    return reproduce_figures(
        out_dir,
        n_q=args.n_q,
        t_max=args.t_max,
        sample_every=args.sample_every,
        m_ga=args.m,
        m_stlm=args.m_stlm,
        seed=args.seed,
        workers=args.workers or os.cpu_count() or 1,
        log=lambda msg: print(msg, file=out),
    )


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            cmd_run(_experiment_from_args(args))
        elif args.command == "fit":
            res = cmd_fit(args)
            if not res.converged:
                return EXIT_NOT_CONVERGED
        else:
            cmd_figures(args)
    except (ConfigError, InvalidArgumentError, DataError) as exc:
        print(f"groverleak: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"groverleak: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
