"""Reference parameter sets and the figure-reproduction pipeline.

Each panel pairs an imperfection strength with the effective-model parameters
reported for it: ``(gamma, w_phi)`` for the two-level model and
``(gamma, delta_theta)`` with ``delta_phi = 0`` for the closed forms.
"""

import os
from dataclasses import dataclass

import numpy as np

from .csvio import write_series_csv
from .ensemble import GAConfig, STLMConfig, run_ensemble
from .fit import analytic_series
from .analytic import AnalyticParams
from .svgplot import PALETTE, Trace, line_chart


@dataclass(frozen=True)
class Panel:
    name: str
    epsilon: float
    gamma: float
    w_phi: float
    delta_theta: float


PANELS = (
    Panel("a", 0.005, 7.6e-4, 0.089, 2.0e-2),
    Panel("b", 0.01, 3.0e-3, 0.19, 4.2e-2),
    Panel("inset", 0.02, 1.3e-2, 0.25, 3.5e-2),
)
PANEL_BY_EPSILON = {p.epsilon: p for p in PANELS}


def _eps_tag(eps):
    return f"eps{eps:g}"


def _points(series, label_p, label_f, color_p, color_f):
    t = series.sample_times.tolist()
    return [
        Trace(label_p, t, series.p_mean.tolist(), color=color_p, line=False, marker="filled"),
        Trace(label_f, t, series.f_mean.tolist(), color=color_f, line=False, marker="open"),
    ]


def reproduce_figures(out_dir, n_q=13, t_max=1400, sample_every=20, m_ga=100, m_stlm=1000, seed=0, workers=1, log=None):
    """Run the GA ensembles and overlays; write CSVs and one SVG per panel.

    Returns a dict mapping output file names to their paths.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = {}

    def emit(name, text=None, series=None):
        path = os.path.join(out_dir, name)
        if series is not None:
            write_series_csv(series, path)
        else:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        written[name] = path
        if log:
            log(f"wrote {path}")

    ga = {}
    for eps in (0.0,) + tuple(p.epsilon for p in PANELS):
        cfg = GAConfig(n_q=n_q, epsilon=eps, t_max=t_max, sample_every=sample_every)
        ga[eps] = run_ensemble(cfg, m_ga, seed, workers=workers)
        emit(f"ga_{_eps_tag(eps)}.csv", series=ga[eps])

    ideal = ga[0.0]
    for panel in PANELS:
        stlm = run_ensemble(
            STLMConfig(n_q=n_q, gamma=panel.gamma, w_phi=panel.w_phi, t_max=t_max, sample_every=sample_every),
            m_stlm,
            seed,
            workers=workers,
        )
        emit(f"stlm_{_eps_tag(panel.epsilon)}.csv", series=stlm)
        params = AnalyticParams.for_qubits(n_q, panel.gamma, panel.delta_theta, 0.0)
        fine = np.arange(0, t_max + 1, dtype=np.int64)
        curve = analytic_series(fine, params)
        emit(f"analytic_{_eps_tag(panel.epsilon)}.csv", series=analytic_series(ga[panel.epsilon].sample_times, params))

        data = _points(ga[panel.epsilon], "<p_j> GA", "F GA", PALETTE[0], PALETTE[1])
        fig1 = data + [
            Trace("<p_j> STLM", stlm.sample_times.tolist(), stlm.p_mean.tolist(), color=PALETTE[0]),
            Trace("F STLM", stlm.sample_times.tolist(), stlm.f_mean.tolist(), color=PALETTE[1]),
        ]
        if panel.name == "a":
            fig1.append(Trace("<p_j> ideal", ideal.sample_times.tolist(), ideal.p_mean.tolist(), color=PALETTE[5], dash="2,3"))
        emit(
            f"fig1_{panel.name}.svg",
            line_chart(
                fig1,
                title=f"n_q={n_q}, epsilon={panel.epsilon:g}: GA vs STLM (gamma={panel.gamma:g}, W_phi={panel.w_phi:g})",
                xlabel="iteration t",
                ylabel="<p_j>, F",
                ylim=(0.0, 1.0),
            ),
        )
        fig2 = data + [
            Trace("<p_j> closed form", fine.tolist(), curve.p_mean.tolist(), color=PALETTE[0]),
            Trace("F closed form", fine.tolist(), curve.f_mean.tolist(), color=PALETTE[1]),
        ]
        emit(
            f"fig2_{panel.name}.svg",
            line_chart(
                fig2,
                title=f"n_q={n_q}, epsilon={panel.epsilon:g}: GA vs closed form "
                f"(gamma={panel.gamma:g}, D_theta={panel.delta_theta:g})",
                xlabel="iteration t",
                ylabel="<p_j>, F",
                ylim=(0.0, 1.0),
            ),
        )
    return written
