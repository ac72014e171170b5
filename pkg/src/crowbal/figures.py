"""Matplotlib rendering of transient and sweep reports to image files.

The delimited outputs (CSV, JSON) are the machine contract; these
figures are the same data drawn for humans, written alongside.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .params import Channel, Waveform
from .sweep import SweepResult
from .units import eng

_PANELS = (
    (Channel.V_DRIVE, "drive voltage (V)"),
    (Channel.V_AK1, "slow-device voltage (V)"),
    (Channel.I_CH, "charging current (A)"),
    (Channel.I_DIS, "discharging current (A)"),
)


def plot_transients(waves: dict[Channel, Waveform], path: Path | str) -> Path:
    """2x2 panel of the four transient channels, time in microseconds."""
    fig, axes = plt.subplots(2, 2, figsize=(9.0, 6.0))
    for ax, (channel, label) in zip(axes.flat, _PANELS):
        wave = waves.get(channel)
        if wave is None:
            ax.set_visible(False)
            continue
        t_us = [t * 1e6 for t in wave.t]
        ax.plot(t_us, list(wave.y), lw=1.2)
        ax.set_xlabel("time (us)")
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


_METRICS = (
    ("V_d_ov", "overvoltage (%)", lambda r: r.V_d_ov),
    ("I_ch_max", "peak charging current (A)", lambda r: r.I_ch_max),
    ("I_dis_max", "peak discharging current magnitude (A)", lambda r: abs(r.I_dis_max)),
    ("I_ratio", "charge/discharge current ratio", lambda r: r.I_ratio),
)


def _series_label(key: tuple, varying: list[str]) -> str:
    rd, tdtol, ton, l_val = key
    parts = []
    if "R_d" in varying:
        parts.append(f"R_d={eng(rd, 'ohm')}")
    if "t_dTol" in varying:
        parts.append(f"t_dTol={eng(tdtol, 's')}")
    if "t_on" in varying:
        parts.append(f"t_on={eng(ton, 's')}")
    if "L" in varying:
        parts.append(f"L={eng(l_val, 'H')}")
    return ", ".join(parts) if parts else "all points"


def plot_sweep(result: SweepResult, out_dir: Path | str) -> list[Path]:
    """One semilog figure per metric, curves vs C_d grouped by the other axes."""
    out_dir = Path(out_dir)
    grid = result.grid
    varying = []
    if len(grid.rd_values) > 1:
        varying.append("R_d")
    if len(grid.tdtol_values) > 1:
        varying.append("t_dTol")
    if len(grid.ton_values) > 1:
        varying.append("t_on")
    if len(grid.l_values) > 1:
        varying.append("L")

    groups: dict[tuple, list] = {}
    for row in result.rows:
        if row.skipped:
            continue
        groups.setdefault((row.R_d, row.t_dTol, row.t_on, row.L), []).append(row)

    paths = []
    for name, label, getter in _METRICS:
        fig, ax = plt.subplots(figsize=(7.0, 4.8))
        for key in sorted(groups):
            rows = groups[key]
            xs = [r.C_d * 1e9 for r in rows]
            ys = [getter(r) for r in rows]
            pairs = [(x, y) for x, y in zip(xs, ys) if y is not None]
            if not pairs:
                continue
            ax.semilogx([p[0] for p in pairs], [p[1] for p in pairs], lw=1.2,
                        label=_series_label(key, varying))
        ax.set_xlabel("C_d (nF)")
        ax.set_ylabel(label)
        ax.grid(True, which="both", alpha=0.3)
        if groups and len(groups) <= 12:
            ax.legend(fontsize=7)
        fig.tight_layout()
        path = out_dir / f"sweep_{name}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)
    return paths
