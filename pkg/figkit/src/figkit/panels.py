"""The nine figure panels, rendered deterministically to SVG.

Every panel reads one or two CSV artifacts (validated against the shipped
schema), never recomputes physics (theory overlays come from CSV columns),
and produces byte-stable SVG output: fixed hash salt, no date metadata,
fixed figure geometry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .schema import SchemaError, load_table

matplotlib.rcParams["svg.hashsalt"] = "figkit"

PANELS = ("staircase", "overlaps", "scatter", "chi-divergence", "fss",
          "relax", "hysteresis", "growth", "free-energy")


@dataclass(frozen=True)
class FigureSpec:
    panel: str
    inputs: tuple
    output: str
    log_x: bool | None = None
    log_y: bool | None = None

    def __post_init__(self):
        if self.panel not in PANELS:
            raise SchemaError(f"unknown panel kind {self.panel!r}; "
                              f"choose from {PANELS}")
        if not self.inputs:
            raise SchemaError("panel needs at least one input CSV")


def _new_axes():
    fig, ax = plt.subplots(figsize=(5.0, 3.6), dpi=100)
    return fig, ax


def _save(fig, output):
    fig.tight_layout()
    fig.savefig(output, format="svg", metadata={"Date": None})
    plt.close(fig)


def _groups(table, key):
    values = np.asarray(table[key])
    for v in sorted(set(values.tolist())):
        yield v, values == v


def _panel_staircase(spec):
    t = load_table(spec.inputs[0], "svd_track")
    fig, ax = _new_axes()
    u = np.asarray(t["update_index"])
    w = np.asarray(t["w_alpha"])
    for a, mask in _groups(t, "alpha"):
        ax.plot(u[mask], w[mask], lw=1.0, label=f"mode {int(a)}")
    ax.axhline(4.0, color="k", ls="--", lw=0.7)
    ax.set_xscale("log")
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel("training updates")
    ax.set_ylabel("singular value")
    ax.legend(fontsize=7, ncol=2)
    _save(fig, spec.output)


def _panel_overlaps(spec):
    t = load_table(spec.inputs[0], "svd_track")
    fig, ax = _new_axes()
    u = np.asarray(t["update_index"])
    ov = np.asarray(t["overlap_alpha"])
    for a, mask in _groups(t, "alpha"):
        keep = mask & np.isfinite(ov)
        ax.plot(u[keep], ov[keep], lw=1.0, label=f"mode {int(a)}")
    ax.set_xscale("log")
    ax.set_ylim(-0.02, 1.05)
    ax.set_xlabel("training updates")
    ax.set_ylabel("|mode . principal direction|")
    ax.legend(fontsize=7)
    _save(fig, spec.output)


def _panel_scatter(spec):
    t = load_table(spec.inputs[0], "scan_samples")
    fig, ax = _new_axes()
    updates = np.asarray(t["update_index"])
    stages = sorted(set(updates.tolist()))
    shown = stages[:: max(1, len(stages) // 6)]
    cmap = plt.get_cmap("viridis")
    for i, stage in enumerate(shown):
        mask = updates == stage
        ax.scatter(np.asarray(t["m_1"])[mask], np.asarray(t["m_2"])[mask],
                   s=6, color=cmap(i / max(len(shown) - 1, 1)),
                   label=f"u={int(stage)}")
    ax.set_xlabel("m_1")
    ax.set_ylabel("m_2")
    ax.legend(fontsize=6, ncol=2)
    _save(fig, spec.output)


def _panel_chi_divergence(spec):
    t = load_table(spec.inputs[0], "chi_divergence")
    fig, ax = _new_axes()
    w = np.asarray(t["w_alpha"])
    chi = np.asarray(t["chi_m_alpha"])
    theory = np.asarray(t["chi_theory"])
    for n, mask in _groups(t, "N"):
        ax.plot(w[mask], chi[mask], "o", ms=2.5, label=f"N={n:g}")
    # the overlay comes from the CSV column, drawn where present
    keep = np.isfinite(theory)
    if keep.any():
        order = np.argsort(w[keep])
        ax.plot(w[keep][order], theory[keep][order], "k--", lw=1.0,
                label="critical branch")
    ax.set_yscale("log")
    ax.set_xlabel("first singular value")
    ax.set_ylabel("susceptibility")
    ax.legend(fontsize=7)
    _save(fig, spec.output)


def _panel_fss(spec):
    t = load_table(spec.inputs[0], "fss_collapse")
    fig, ax = _new_axes()
    x = np.asarray(t["x"])
    y = np.asarray(t["y"])
    branch = np.asarray(t["branch"])
    for n, mask in _groups(t, "N"):
        below = mask & (branch < 0)
        ax.plot(x[below], y[below], "o", ms=2.5, label=f"N={n:g}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("N^(1/2) |beta - beta_c|")
    ax.set_ylabel("chi / N^(1/2)")
    ax.legend(fontsize=7)
    _save(fig, spec.output)


def _panel_relax(spec):
    t = load_table(spec.inputs[0], "relax")
    fig, ax = _new_axes()
    d = np.asarray(t["distance"])
    tau = np.asarray(t["tau_exp"])
    order = np.argsort(d)
    ax.plot(d[order], tau[order], "o-", ms=3)
    # slope -1 guide anchored on the measured endpoint (presentation only)
    ax.plot(d[order], tau[order][0] * d[order][0] / d[order], "k--", lw=0.8,
            label="slope -1")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("|beta - beta_c|")
    ax.set_ylabel("relaxation time (sweeps)")
    ax.legend(fontsize=7)
    _save(fig, spec.output)


def _panel_hysteresis(spec):
    t = load_table(spec.inputs[0], "hysteresis")
    fig, ax = _new_axes()
    h = np.asarray(t["h"])
    m = np.asarray(t["mean_m"])
    s = np.asarray(t["std_m"])
    ax.plot(h, m, "-", lw=1.2)
    ax.fill_between(h, m - s, m + s, alpha=0.25, lw=0)
    ax.set_xlabel("field h")
    ax.set_ylabel("mean magnetization")
    _save(fig, spec.output)


def _panel_growth(spec):
    t = load_table(spec.inputs[0], "growth")
    fig, ax = _new_axes()
    time_ax = np.asarray(t["t"])
    run = np.abs(np.asarray(t["u_xi_run"]))
    theory = np.abs(np.asarray(t["u_xi_theory"]))
    ax.plot(time_ax[::5], run[::5], "o", ms=2.5, label="trained run")
    ax.plot(time_ax, theory, "k-", lw=1.0, label="integrated dynamics")
    ax.set_yscale("log")
    ax.set_xlabel("rescaled time")
    ax.set_ylabel("pattern projection")
    ax.legend(fontsize=7)
    _save(fig, spec.output)


def _panel_free_energy(spec):
    t = load_table(spec.inputs[0], "free_energy")
    h1 = np.asarray(t["h1"])
    h2 = np.asarray(t["h2"])
    f = np.asarray(t["f"])
    xs = np.unique(h1)
    ys = np.unique(h2)
    grid = f.reshape(len(xs), len(ys))
    fig, ax = _new_axes()
    pc = ax.contourf(xs, ys, grid.T, levels=24, cmap="viridis")
    fig.colorbar(pc, ax=ax, label="free energy per site")
    ax.set_xlabel("h_1")
    ax.set_ylabel("h_2")
    _save(fig, spec.output)


_RENDERERS = {
    "staircase": _panel_staircase,
    "overlaps": _panel_overlaps,
    "scatter": _panel_scatter,
    "chi-divergence": _panel_chi_divergence,
    "fss": _panel_fss,
    "relax": _panel_relax,
    "hysteresis": _panel_hysteresis,
    "growth": _panel_growth,
    "free-energy": _panel_free_energy,
}


def render(spec: FigureSpec) -> str:
    """Render one panel; returns the output path."""
    _RENDERERS[spec.panel](spec)
    return spec.output
