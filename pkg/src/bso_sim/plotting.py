"""Render PNG figures from the CSV tables the CLI emits.

Uses the object-oriented matplotlib API only, so no GUI backend is touched.
"""

from __future__ import annotations

from pathlib import Path

from matplotlib.figure import Figure

from .report import read_csv

LW = 1.0


def _figure(width=6.4, height=3.6):
    return Figure(figsize=(width, height), layout="constrained")


def plot_trajectory(ax, data):
    ax.plot(data["t"], data["p1"], lw=LW, label=r"$|C_1|^2$")
    ax.set_xlabel(r"$t\ [1/\omega]$")
    ax.set_ylabel("excited population")
    ax.set_ylim(-0.05, 1.05)


def plot_residual(ax, data):
    ax.plot(data["t"], data["residual"], lw=LW, label="exact - Rabi")
    ax.plot(data["t"], data["predicted_bso"], lw=LW, ls="--", label="first order")
    ax.set_xlabel(r"$t\ [1/\omega]$")
    ax.set_ylabel("BSO residual")
    ax.legend(loc="upper left", fontsize="small", frameon=False)


def plot_envelope(ax, data):
    ax.plot(data["t"], data["g0"], lw=LW, label=r"$g_0(t)$")
    ax.plot(data["t"], data["g0_avg"], lw=LW, ls="--", label=r"$g_0'(t)$")
    ax.set_xlabel(r"$t\ [1/\omega]$")
    ax.set_ylabel(r"Rabi frequency [$\omega$]")
    ax.legend(loc="lower right", fontsize="small", frameon=False)


def plot_phase_sweep(ax, data):
    ax.plot(data["phi"], data["p1"], "o", ms=3)
    ax.axhline(0.5, color="0.6", lw=0.8)
    ax.set_xlabel(r"$\phi$ [rad]")
    ax.set_ylabel(r"$|C_1(\tau)|^2$")


def plot_floquet_compare(ax, data):
    ax.plot(data["t"], data["p1_exact"] - data["p1_closed_form"], lw=LW, label="exact - closed form")
    ax.plot(data["t"], data["p1_exact"] - data["p1_modes"], lw=LW, label="exact - modes")
    ax.set_xlabel(r"$t\ [1/\omega]$")
    ax.set_ylabel(r"$\Delta p_1$")
    ax.legend(loc="upper left", fontsize="small", frameon=False)


_PLOTTERS = {
    "trajectory": plot_trajectory,
    "residual": plot_residual,
    "envelope": plot_envelope,
    "phase_sweep": plot_phase_sweep,
    "floquet_compare": plot_floquet_compare,
}


def plot_fig1_panels(tables: dict, path: Path) -> Path:
    """Stacked trajectory / residual / envelope panels with the phase sweep as inset."""
    fig = _figure(6.4, 7.2)
    axes = fig.subplots(3, 1, sharex=True)
    plot_trajectory(axes[0], tables["trajectory"])
    plot_residual(axes[1], tables["residual"])
    plot_envelope(axes[2], tables["envelope"])
    for ax, tag in zip(axes, "abc"):
        ax.set_title(f"({tag})", loc="left", fontsize="medium")
        ax.label_outer()
    if "phase_sweep" in tables:
        inset = axes[2].inset_axes([0.1, 0.55, 0.3, 0.38])
        plot_phase_sweep(inset, tables["phase_sweep"])
        inset.tick_params(labelsize="x-small")
        inset.xaxis.label.set_fontsize("x-small")
        inset.yaxis.label.set_fontsize("x-small")
    fig.savefig(path, dpi=150)
    return path


def plot_directory(directory) -> list[Path]:
    """Write ``<stem>.png`` next to every recognised CSV in ``directory``."""
    directory = Path(directory)
    tables = {}
    written = []
    for stem, plotter in _PLOTTERS.items():
        csv_path = directory / f"{stem}.csv"
        if not csv_path.exists():
            continue
        tables[stem] = read_csv(csv_path)
        fig = _figure()
        plotter(fig.subplots(), tables[stem])
        out = directory / f"{stem}.png"
        fig.savefig(out, dpi=150)
        written.append(out)
    if {"trajectory", "residual", "envelope"} <= set(tables):
        written.append(plot_fig1_panels(tables, directory / "fig1_right.png"))
    return written
