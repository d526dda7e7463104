"""Static SVG renderings of the percentile, ratio and shape charts."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .chart import Phase  # noqa: E402
from .limits import ratio_limits, ratio_pdf  # noqa: E402

# fixed metadata keeps the SVG output byte-stable across runs
_SVG_META = {"Date": None, "Creator": None}


def _draw_chart(ax, points, phase1_len, title, ylabel):
    pts = [p for p in points if p.phase is not Phase.PRIOR]
    k = np.array([p.k for p in pts])
    est = np.array([p.estimate for p in pts])
    lcl = np.array([p.lcl for p in pts])
    ucl = np.array([p.ucl for p in pts])
    sig = np.array([p.signal for p in pts], dtype=bool)

    ax.step(k, ucl, where="mid", color="tab:red", lw=1, label="UCL")
    ax.step(k, lcl, where="mid", color="tab:red", lw=1, ls="-.", label="LCL")
    ax.plot(k, est, "-o", color="tab:blue", ms=3.5, lw=0.8, label="estimate")
    if sig.any():
        ax.plot(k[sig], est[sig], "s", mfc="none", mec="black", ms=8, label="signal")
    prior = [p for p in points if p.phase is Phase.PRIOR]
    if prior:
        p = prior[0]
        ax.errorbar([0], [p.estimate], yerr=[[p.estimate - p.lcl], [p.ucl - p.estimate]],
                    fmt="D", color="gray", capsize=3, ms=4, label="prior")
    ax.axvline(phase1_len + 0.5, color="black", ls="--", lw=0.8)
    ax.set_title(title)
    ax.set_xlabel("sample k")
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=7, loc="best")


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)
    return path


def plot_percentile_chart(points, phase1_len, path, title="Percentile chart"):
    fig, ax = plt.subplots(figsize=(8, 4))
    _draw_chart(ax, points, phase1_len, title, "percentile estimate")
    fig.tight_layout()
    return _save(fig, path)


def plot_beta_chart(points, phase1_len, path, title="Shape chart"):
    fig, ax = plt.subplots(figsize=(8, 4))
    _draw_chart(ax, points, phase1_len, title, "shape estimate")
    ks = [p.k for p in points]
    ax.plot(ks, [p.beta_bar for p in points], color="tab:green", lw=0.8, ls=":",
            label="running mean")
    ax.legend(fontsize=7, loc="best")
    fig.tight_layout()
    return _save(fig, path)


def plot_ratio_chart(ratio_run, path, title="Ratio chart"):
    """Ratio chart with a side panel of the ratio density at k = 0 and at the end of Phase I."""
    points = [ratio_run.prior_point()] + list(ratio_run.ratio_points)
    fig, (ax, side) = plt.subplots(
        1, 2, figsize=(10, 4), sharey=True, gridspec_kw={"width_ratios": [4, 1]}
    )
    _draw_chart(ax, points, ratio_run.phase1_len, title, "ratio estimate")
    ctxs = ratio_run.contexts
    shown = [(0, ctxs[0])]
    if len(ctxs) > ratio_run.phase1_len:
        shown.append((ratio_run.phase1_len, ctxs[ratio_run.phase1_len]))
    lo, hi = ax.get_ylim()
    u = np.linspace(max(lo, 1e-6), hi, 400)
    for k, ctx in shown:
        side.plot(ratio_pdf(u, ctx.C, ctx.beta_bar, ctx.k, ctx.n), u, label=f"k = {k}")
        lim = ratio_limits(ctx, ratio_run.alpha)
        side.axhline(lim.lcl, color="gray", lw=0.5)
        side.axhline(lim.ucl, color="gray", lw=0.5)
    side.set_xlabel("density")
    side.legend(fontsize=7)
    fig.tight_layout()
    return _save(fig, path)
