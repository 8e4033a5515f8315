"""Figure builders: one function per figure family, keyed by the manifest.

Shared styling: reference-state curves are dotted blue, sample-state curves
dashed red, loss curves solid black; the precision comparisons use solid blue
for the classical measurement and green/cyan/red line styles for increasing
round-trip counts.
"""
from __future__ import annotations

import numpy as np
from matplotlib.figure import Figure

STATE_STYLES = (
    ("p_r", dict(color="tab:blue", linestyle=":", label=r"$P_R$")),
    ("p_s", dict(color="tab:red", linestyle="--", label=r"$P_S$")),
    ("p_l", dict(color="black", linestyle="-", label=r"$P_L$")),
)

CURVE_STYLES = {
    "classical": dict(color="tab:blue", linestyle="-", label="classical"),
    10: dict(color="tab:green", linestyle="-.", label="N=10"),
    50: dict(color="tab:purple", linestyle=(0, (3, 1, 1, 1)), label="N=50"),
    100: dict(color="tab:cyan", linestyle="--", label="N=100"),
    500: dict(color="tab:red", linestyle=":", label="N=500"),
}

POINT_MARKERS = {
    "classical": dict(color="tab:blue", marker="o", label="classical"),
    10: dict(color="tab:green", marker="^", label="IFM N=10"),
    50: dict(color="tab:purple", marker="D", label="IFM N=50"),
    100: dict(color="tab:cyan", marker="s", label="IFM N=100"),
    500: dict(color="tab:red", marker="v", label="IFM N=500"),
}


def _plot_states(ax, x, table, drop_zero_loss=False):
    for col, style in STATE_STYLES:
        if drop_zero_loss and col == "p_l" and np.allclose(table[col], 0.0):
            continue
        ax.plot(x, table[col], **style)


def _evolution_axis(ax, table, title):
    _plot_states(ax, table["t_over_t"], table)
    ax.set_xlabel("t / T")
    ax.set_ylabel("probability")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(title)


def build_evolution_overview(tables) -> Figure:
    fig = Figure(figsize=(10.5, 3.4))
    axes = fig.subplots(1, 3)
    _evolution_axis(axes[0], tables["transparent"], "(a) transparent sample")
    _evolution_axis(axes[1], tables["opaque"], "(b) opaque sample")
    axes[0].legend(loc="center left")

    loss = tables["loss_vs_n"]
    axes[2].plot(loss["n"], loss["p_l"], color="black")
    axes[2].set_xlabel("round trips N")
    axes[2].set_ylabel(r"$P_L$ at time $T$")
    axes[2].set_title("(c) opaque-sample loss vs N")
    inset = axes[2].inset_axes([0.45, 0.45, 0.5, 0.5])
    inset.loglog(loss["n"], loss["p_l"], color="black")
    fig.tight_layout()
    return fig


def build_evolution_panels(tables) -> Figure:
    roles = sorted(tables)
    fig = Figure(figsize=(3.5 * len(roles), 3.4))
    axes = fig.subplots(1, len(roles))
    for ax, role in zip(np.atleast_1d(axes), roles):
        table = tables[role]
        _evolution_axis(ax, table, f"alpha = {table.config['alpha']}")
    np.atleast_1d(axes)[0].legend(loc="center left")
    fig.tight_layout()
    return fig


def _sweep_panels(tables, x_of, xlabel, log_x=False, invert=False) -> Figure:
    table = tables["sweep"]
    n_values = sorted(set(int(v) for v in table["n"]))
    fig = Figure(figsize=(3.5 * len(n_values), 3.4))
    axes = fig.subplots(1, len(n_values))
    for ax, n in zip(np.atleast_1d(axes), n_values):
        mask = table["n"] == n
        x = x_of(table["alpha"][mask])
        for col, style in STATE_STYLES:
            ax.plot(x, table[col][mask], **style)
        if log_x:
            ax.set_xscale("log")
        if invert:
            ax.invert_xaxis()
        ax.set_xlabel(xlabel)
        ax.set_ylabel("probability")
        ax.set_ylim(-0.02, 1.02)
        ax.set_title(f"N = {n}")
    np.atleast_1d(axes)[0].legend(loc="center right")
    fig.tight_layout()
    return fig


def build_sweep_panels(tables) -> Figure:
    return _sweep_panels(tables, lambda a: a, "transparency")


def build_sweep_panels_log(tables) -> Figure:
    # plotted against 1 - alpha so the near-1 structure is resolved; axis
    # inverted so transparency still increases to the right
    return _sweep_panels(
        tables, lambda a: np.maximum(1.0 - a, 1e-12), "1 - transparency", log_x=True, invert=True
    )


def build_contrast_loss(tables) -> Figure:
    table = tables["contrast"]
    fig = Figure(figsize=(4.6, 3.4))
    ax = fig.subplots()
    ax.semilogx(table["contrast"], table["avg_loss"], color="black", marker="o", markersize=3)
    ax.set_xlabel(r"contrast $(1-\alpha_1)/(1-\alpha_2)$")
    ax.set_ylabel("average loss probability")
    ax.set_ylim(0, 0.7)
    fig.tight_layout()
    return fig


def _discrimination_axis(ax, curves, bound, title):
    for key in ("classical", 10, 50, 100, 500):
        if key == "classical":
            mask = curves["strategy"] == "classical"
        else:
            mask = (curves["strategy"] == "ifm") & (curves["n"] == key)
        if not np.any(mask):
            continue
        ax.scatter(
            curves["error"][mask],
            curves["mean_lost"][mask],
            s=14,
            alpha=0.85,
            **POINT_MARKERS[key],
        )
    ax.plot(bound["p_e"], bound["min_lost"], color="black", label="minimum loss")
    ax.set_xlim(0, 0.3)
    ax.set_xlabel("error probability")
    ax.set_ylabel("mean lost particles")
    ax.set_title(title)


def build_discrimination_panels(tables) -> Figure:
    panels = sorted(role[len("curves_") :] for role in tables if role.startswith("curves_"))
    fig = Figure(figsize=(9.6, 7.0))
    axes = fig.subplots(2, 2).ravel()
    for ax, panel in zip(axes, panels):
        curves = tables[f"curves_{panel}"]
        bound = tables[f"bound_{panel}"]
        a1 = curves.config["alpha1"]
        a2 = curves.config["alpha2"]
        _discrimination_axis(ax, curves, bound, f"({panel}) alpha = {a1} vs {a2}")
        top = np.percentile(curves["mean_lost"], 97)
        ax.set_ylim(0, max(top, np.max(bound["min_lost"]) * 1.2, 0.1))
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    return fig


def _precision_axis(ax, table, title, overlay=None):
    classical = table["signal"] == "classical_transmission"
    finite = np.isfinite(table["expected_lost"])
    if np.any(classical):
        mask = classical & finite
        ax.plot(table["alpha"][mask], table["expected_lost"][mask], **CURVE_STYLES["classical"])
    for n in (10, 100, 500):
        mask = (~classical) & (table["n"] == n) & finite
        if not np.any(mask):
            continue
        ax.plot(table["alpha"][mask], table["expected_lost"][mask], **CURVE_STYLES[n])
    if overlay is not None:
        mask = (overlay["signal"] == "classical_transmission") & np.isfinite(
            overlay["expected_lost"]
        )
        ax.plot(
            overlay["alpha"][mask],
            overlay["expected_lost"][mask],
            color="0.8",
            linestyle="-",
            zorder=0,
            label="classical (binomial)",
        )
    ax.set_yscale("log")
    ax.set_xlabel("transparency")
    ax.set_ylabel("expected lost particles")
    ax.set_title(title)


def build_precision_panels(tables) -> Figure:
    fig = Figure(figsize=(9.2, 3.6))
    axes = fig.subplots(1, 2)
    _precision_axis(axes[0], tables["reference"], "(a) reference signal")
    _precision_axis(axes[1], tables["sample"], "(b) sample signal")
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    return fig


def build_precision_panels_poisson(tables) -> Figure:
    overlay = tables["binomial_overlay"]
    fig = Figure(figsize=(9.2, 3.6))
    axes = fig.subplots(1, 2)
    _precision_axis(axes[0], tables["reference"], "(a) reference signal", overlay=overlay)
    _precision_axis(axes[1], tables["sample"], "(b) sample signal", overlay=overlay)
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    return fig


def build_phase_panels(tables) -> Figure:
    table = tables["phase"]
    n_values = sorted(set(int(v) for v in table["n"]))
    fig = Figure(figsize=(3.5 * len(n_values), 3.4))
    axes = fig.subplots(1, len(n_values))
    for ax, n in zip(np.atleast_1d(axes), n_values):
        mask = table["n"] == n
        x = table["phi"][mask]
        for col, style in STATE_STYLES:
            if col == "p_l":
                continue  # fully transparent sample: nothing is lost
            ax.plot(x, table[col][mask], **style)
        ax.set_xlabel(r"phase shift $\phi$")
        ax.set_ylabel("probability")
        ax.set_ylim(-0.02, 1.02)
        ax.set_title(f"N = {n}")
    np.atleast_1d(axes)[0].legend(loc="center right")
    fig.tight_layout()
    return fig


_EVOLUTION_COLS = {"t_over_t", "p_r", "p_s", "p_l"}
_SWEEP_COLS = {"n", "alpha", "p_r", "p_s", "p_l"}
_CURVE_COLS = {"strategy", "n", "error", "mean_lost"}
_BOUND_COLS = {"p_e", "min_lost"}
_PRECISION_COLS = {"signal", "n", "alpha", "expected_lost"}

BUILDERS = {
    "evolution_overview": (
        build_evolution_overview,
        {
            "transparent": _EVOLUTION_COLS,
            "opaque": _EVOLUTION_COLS,
            "loss_vs_n": {"n", "p_l"},
        },
    ),
    "evolution_panels": (build_evolution_panels, {}),
    "sweep_panels": (build_sweep_panels, {"sweep": _SWEEP_COLS}),
    "sweep_panels_log": (build_sweep_panels_log, {"sweep": _SWEEP_COLS}),
    "contrast_loss": (build_contrast_loss, {"contrast": {"contrast", "avg_loss"}}),
    "discrimination_panels": (
        build_discrimination_panels,
        {
            "curves_a": _CURVE_COLS,
            "curves_b": _CURVE_COLS,
            "curves_c": _CURVE_COLS,
            "curves_d": _CURVE_COLS,
            "bound_a": _BOUND_COLS,
            "bound_b": _BOUND_COLS,
            "bound_c": _BOUND_COLS,
            "bound_d": _BOUND_COLS,
        },
    ),
    "precision_panels": (
        build_precision_panels,
        {"reference": _PRECISION_COLS, "sample": _PRECISION_COLS},
    ),
    "precision_panels_poisson": (
        build_precision_panels_poisson,
        {
            "reference": _PRECISION_COLS,
            "sample": _PRECISION_COLS,
            "binomial_overlay": _PRECISION_COLS,
        },
    ),
    "phase_panels": (build_phase_panels, {"phase": {"n", "phi", "p_r", "p_s"}}),
}
