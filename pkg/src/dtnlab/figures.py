"""Figure rendering for experiment reports.

Every panel is drawn from the report's tables (the same data that lands in
the CSV payloads), never from recomputed quantities, so a figure can always
be reproduced offline from the delimited output alone.
"""

from __future__ import annotations

import math
import os

import numpy as np
from matplotlib.figure import Figure

from .experiments import ExperimentReport

__all__ = ["render_figures"]

_DPI = 150


def _save(fig: Figure, out_dir: str, name: str) -> str:
    path = os.path.join(out_dir, name)
    fig.savefig(path, dpi=_DPI)
    return path


def _positive(xs, ys):
    # strip nonpositive samples before a log-scale plot
    keep = [(x, y) for x, y in zip(xs, ys) if y > 0.0]
    if not keep:
        return [], []
    return [p[0] for p in keep], [p[1] for p in keep]


def _fig_bessel(report: ExperimentReport) -> Figure:
    tab = report.table("bessel_certification")
    pairs = sorted({(c, d) for c, d in zip(tab.column("C"), tab.column("d"))})
    fig = Figure(figsize=(4.0 * len(pairs) / 2 + 4, 6.0))
    axes = fig.subplots(2, max(1, (len(pairs) + 1) // 2), squeeze=False).ravel()
    series = ("j_margin", "j_deriv_margin", "y_margin", "y_deriv_margin")
    for ax, (c, d) in zip(axes, pairs):
        rows = [r for r in tab.rows if (r[0], r[1]) == (c, d)]
        ns = [r[3] for r in rows]
        for name in series:
            k = tab.columns.index(name)
            ax.plot(ns, [r[k] for r in rows], marker=".", label=name)
        ax.axhline(0.0, color="k", lw=0.8)
        ax.set_title(f"C={c:g}, d={d}, order > {rows[0][2]}")
        ax.set_xlabel("order n")
        ax.set_ylabel("log margin")
    axes[0].legend(fontsize=7)
    for ax in axes[len(pairs):]:
        ax.set_axis_off()
    fig.suptitle("envelope certification margins (positive = certified)")
    fig.tight_layout()
    return fig


def _fig_decay(report: ExperimentReport) -> Figure:
    lev = report.table("decay_levels")
    fig = Figure(figsize=(9, 4))
    ax0, ax1 = fig.subplots(1, 2)
    levels = lev.column("level")
    sup = lev.column("sup_abs")
    kept = lev.column("kept")
    x, y = _positive(levels, sup)
    ax0.semilogy(x, y, marker="o", ms=3, lw=0.8, label="sup |entry| at level")
    xk, yk = _positive([l for l, k in zip(levels, kept) if k],
                       [s for s, k in zip(sup, kept) if k])
    ax0.semilogy(xk, yk, "o", ms=5, mfc="none", label="kept by fit")
    ax0.set_xlabel("max(row, col) degree")
    ax0.set_ylabel("sup over energies")
    ax0.legend(fontsize=8)
    fit = next((t for t in report.tables if t.name == "decay_fit"), None)
    xs, ys = _positive(levels, lev.column("scaled"))
    ax1.semilogy(xs, ys, marker="s", ms=3, lw=0.8, label="2^level scaled")
    if fit is not None and "rho_hat" in fit.columns:
        for row in fit.rows:
            rho = row[fit.columns.index("rho_hat")]
            if rho > 0:
                label = "rho_hat"
                if "j_max" in fit.columns:
                    label += f" (j_max={row[fit.columns.index('j_max')]})"
                ax1.axhline(rho, ls="--", lw=0.9, label=label)
    ax1.set_xlabel("max(row, col) degree")
    ax1.legend(fontsize=8)
    fig.suptitle("matrix-element decay across degree levels")
    fig.tight_layout()
    return fig


def _fig_counterexample(report: ExperimentReport) -> Figure:
    main = report.table("counterexample")
    norms = report.table("counterexample_norms")
    fitrow = report.table("instability_fit").rows[0]
    fitcols = report.table("instability_fit").columns
    c_fit = fitrow[fitcols.index("c_fit")]
    intercept = fitrow[fitcols.index("intercept")]
    c_star = fitrow[fitcols.index("c_star")]
    m = float(report.config_echo.get("m", 2.0))

    ns = main.column("n")
    fig = Figure(figsize=(12, 4))
    ax0, ax1, ax2 = fig.subplots(1, 3)

    ax0.semilogy(*_positive(ns, main.column("sup_norm")), marker="o",
                 label="sup over energies")
    ax0.semilogy(*_positive(ns, norms.column("chain_bound")), marker="^",
                 ls="--", label="factorized bound")
    ax0.set_xlabel("angular mode n")
    ax0.set_ylabel("operator norm")
    ax0.legend(fontsize=8)

    cps = main.column("c_prime")
    med = sorted(cps)[len(cps) // 2] if len(cps) % 2 else (
        0.5 * (sorted(cps)[len(cps) // 2 - 1] + sorted(cps)[len(cps) // 2]))
    ax1.plot(ns, cps, marker="o", label="c'(n)")
    ax1.axhline(4.0 * med, ls="--", color="r", label="4 x median")
    ax1.axhline(med, ls=":", color="gray", label="median")
    ax1.set_xlabel("angular mode n")
    ax1.set_ylabel("calibration constant")
    ax1.legend(fontsize=8)

    eps = main.column("eps_equiv")
    sup = main.column("sup_norm")
    xv = [e ** (-1.0 / m) for e in eps]
    yv = [math.log(sn) for sn in sup if sn > 0]
    ax2.plot(xv[: len(yv)], yv, "o", label="log norm")
    xx = np.linspace(min(xv), max(xv), 50)
    ax2.plot(xx, -c_fit * xx + intercept, "-", lw=1.0,
             label=f"fit, c={c_fit:.3f}")
    if c_star > 0:
        ax2.plot(xx, -c_star * xx, "--", lw=1.0, label=f"envelope, c={c_star:.3f}")
    ax2.set_xlabel("eps^(-1/m)")
    ax2.set_ylabel("log sup norm")
    ax2.legend(fontsize=8)

    fig.suptitle("single-mode family: norms, calibration, stretched-exponential fit")
    fig.tight_layout()
    return fig


def _fig_scatter(report: ExperimentReport) -> Figure:
    sc = report.table("scatter")
    ov = report.table("overlay")
    eps = float(report.config_echo["eps"])
    fig = Figure(figsize=(9, 4))
    ax0, ax1 = fig.subplots(1, 2)

    x, y = _positive(ov.column("eps_equiv"), ov.column("sup_norm"))
    ax0.loglog(x, y, marker="o", label="single-mode sweep")
    xe, ye = _positive(ov.column("eps_equiv"), ov.column("envelope"))
    ax0.loglog(xe, ye, "--", label="exp(-c eps^(-1/m))")
    norms = [v for v in sc.column("sup_dtn_norm") if v > 0]
    ax0.loglog([eps] * len(norms), norms, "x", color="r",
               label="family pair distances")
    ax0.set_xlabel("amplitude eps")
    ax0.set_ylabel("operator norm of difference")
    ax0.legend(fontsize=8)

    pairs = sc.column("pair")
    ax1.semilogy(pairs, sc.column("sup_dtn_norm"), "o")
    kmin = min(range(len(norms)), key=lambda i: norms[i]) if norms else None
    if kmin is not None:
        ax1.annotate("min observed", (pairs[kmin], norms[kmin]),
                     textcoords="offset points", xytext=(5, 5), fontsize=8)
    ax1.set_xlabel("pair index")
    ax1.set_ylabel("sup over energies")

    fig.suptitle("pairwise map distances across the separated family")
    fig.tight_layout()
    return fig


def _fig_entropy(report: ExperimentReport) -> Figure:
    book = dict(zip(report.table("bookkeeping").column("quantity"),
                    report.table("bookkeeping").column("value")))
    fig = Figure(figsize=(12, 4))
    ax0, ax1, ax2 = fig.subplots(1, 3)

    names = ("log_family", "log_net")
    vals = [float(book[k]) for k in names]
    ax0.bar(names, vals, color=("tab:blue", "tab:orange"))
    ax0.set_yscale("log")
    ax0.set_ylabel("log cardinality (nats)")
    for i, v in enumerate(vals):
        ax0.text(i, v, f"{v:.3g}", ha="center", va="bottom", fontsize=8)

    img = report.table("image_levels")
    ax1.bar(img.column("level"), img.column("log_size"), width=0.8)
    ax1.set_xlabel("degree level")
    ax1.set_ylabel("log #tuples retained")

    nu = report.table("holo_nu")
    ax2.semilogx(nu.column("delta"), nu.column("nu"), marker="o")
    ax2.set_xlabel("resolution delta")
    ax2.set_ylabel("log size / log(1/delta)^2")
    ax2.invert_xaxis()

    fig.suptitle("separated-family vs image-net counting")
    fig.tight_layout()
    return fig


def _fig_dtn(report: ExperimentReport) -> Figure:
    norms = report.table("dtn_norms")
    mat = report.table("dtn_matrix")
    fig = Figure(figsize=(9, 4))
    ax0, ax1 = fig.subplots(1, 2)

    es = norms.column("energy")
    ax0.plot(es, norms.column("hs_norm"), marker="o", label="Sobolev operator norm")
    ax0.plot(es, norms.column("weighted_sup_bound"), marker="^", ls="--",
             label="weighted entry bound")
    ax0.set_xlabel("energy")
    ax0.set_yscale("log")
    ax0.legend(fontsize=8)

    idx = sorted({(d_, p) for d_, p in zip(mat.column("row_degree"),
                                           mat.column("row_slot"))})
    pos = {key: i for i, key in enumerate(idx)}
    size = len(idx)
    mags = np.zeros((size, size))
    for rd, rp, cd, cp, re, im in mat.rows:
        mags[pos[(rd, rp)], pos[(cd, cp)]] = math.hypot(re, im)
    top = mags.max()
    floor = top * 1e-16 if top > 0 else 1.0
    img = ax1.imshow(np.log10(np.maximum(mags, floor)), cmap="viridis",
                     origin="upper")
    fig.colorbar(img, ax=ax1, label="log10 |entry|")
    ax1.set_xlabel("column (degree-major)")
    ax1.set_ylabel("row (degree-major)")
    ax1.set_title(f"matrix at E={norms.rows[0][0]:g}")

    fig.suptitle("map difference: norm curve and entry magnitudes")
    fig.tight_layout()
    return fig


_RENDERERS = {
    "bessel-cert": _fig_bessel,
    "decay-scan": _fig_decay,
    "counterexample": _fig_counterexample,
    "scatter": _fig_scatter,
    "entropy": _fig_entropy,
    "dtn": _fig_dtn,
}


def render_figures(report: ExperimentReport, out_dir: str) -> list[str]:
    """Render the report's figure (if its experiment has one) into out_dir.

    Returns the list of written paths; unknown experiment ids render nothing.
    """
    fn = _RENDERERS.get(report.experiment_id)
    if fn is None:
        return []
    fig = fn(report)
    return [_save(fig, out_dir, report.experiment_id + ".png")]
