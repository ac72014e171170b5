"""Cartesian parameter sweeps of the peak stresses over the design space.

Regenerates the design curves: overvoltage, peak charge and discharge
currents and their ratio, tabulated against capacitance with damping
resistance, delay mismatch, fall time and inductance as parameters.
CSV plus a JSON manifest are the machine contract; figures are a
convenience rendering of the same rows.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .errors import EmptyGrid, NotUnderdamped
from .params import (
    BalancingDesign,
    CircuitSpec,
    DeviceParams,
    ToleranceSpec,
    validate,
)
from .transients import analyze

CSV_COLUMNS = (
    "C_d", "R_d", "t_dTol", "t_on", "L",
    "V_d_ov", "I_ch_max", "I_dis_max", "I_ratio", "skipped",
)


def default_cd_axis(n: int = 64, lo: float = 5e-9, hi: float = 300e-9) -> tuple[float, ...]:
    """Log-spaced capacitance axis used for figure replication."""
    ratio = hi / lo
    return tuple(lo * ratio ** (i / (n - 1)) for i in range(n))


def _check_axis(name: str, values: tuple[float, ...], positive: bool) -> None:
    if not values:
        raise EmptyGrid(f"axis {name} is empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"axis {name} must be strictly increasing")
    low_ok = all(v > 0 for v in values) if positive else all(v >= 0 for v in values)
    if not low_ok:
        raise ValueError(f"axis {name} has out-of-range values")


@dataclass(frozen=True)
class SweepGrid:
    """Axes of a sweep plus the fixed base parameters.

    Delay mismatch is swept by moving t_dmax while keeping the base
    t_dmin; every other base field is carried through unchanged.
    """

    cd_axis: tuple[float, ...]
    rd_values: tuple[float, ...]
    tdtol_values: tuple[float, ...]
    ton_values: tuple[float, ...]
    l_values: tuple[float, ...]
    base: tuple[CircuitSpec, DeviceParams, ToleranceSpec]

    def __post_init__(self) -> None:
        object.__setattr__(self, "cd_axis", tuple(float(v) for v in self.cd_axis))
        object.__setattr__(self, "rd_values", tuple(float(v) for v in self.rd_values))
        object.__setattr__(self, "tdtol_values", tuple(float(v) for v in self.tdtol_values))
        object.__setattr__(self, "ton_values", tuple(float(v) for v in self.ton_values))
        object.__setattr__(self, "l_values", tuple(float(v) for v in self.l_values))
        _check_axis("cd_axis", self.cd_axis, positive=True)
        _check_axis("rd_values", self.rd_values, positive=False)
        _check_axis("tdtol_values", self.tdtol_values, positive=False)
        _check_axis("ton_values", self.ton_values, positive=True)
        _check_axis("l_values", self.l_values, positive=True)
        spec, dev, tol = self.base
        outcome = validate(spec, dev, BalancingDesign(R_d=0.0, C_d=self.cd_axis[0], tolerances=tol))
        if not outcome.ok:
            raise ValueError("invalid sweep base: " + "; ".join(outcome.messages()))

    def size(self) -> int:
        return (
            len(self.cd_axis) * len(self.rd_values) * len(self.tdtol_values)
            * len(self.ton_values) * len(self.l_values)
        )


@dataclass(frozen=True)
class SweepRow:
    C_d: float
    R_d: float
    t_dTol: float
    t_on: float
    L: float
    skipped: bool
    V_d_ov: Optional[float] = None
    I_ch_max: Optional[float] = None
    I_dis_max: Optional[float] = None  # signed
    I_ratio: Optional[float] = None


@dataclass(frozen=True)
class SweepResult:
    grid: SweepGrid
    rows: tuple[SweepRow, ...]


def run_sweep(grid: SweepGrid) -> SweepResult:
    """One row per grid point, lexicographic over (C_d, R_d, t_dTol, t_on, L).

    Points outside the underdamped region become skipped rows with empty
    metrics; dropping them silently would corrupt the curve shapes.
    """
    spec0, dev0, tol = grid.base
    rows: list[SweepRow] = []
    for cd in grid.cd_axis:
        for rd in grid.rd_values:
            design = BalancingDesign(R_d=rd, C_d=cd, tolerances=tol)
            for tdtol in grid.tdtol_values:
                for ton in grid.ton_values:
                    dev = replace(dev0, t_dmax=dev0.t_dmin + tdtol, t_on=ton)
                    for l_val in grid.l_values:
                        spec = replace(spec0, L=l_val)
                        try:
                            rep = analyze(spec, dev, design)
                        except NotUnderdamped:
                            rows.append(
                                SweepRow(C_d=cd, R_d=rd, t_dTol=tdtol, t_on=ton, L=l_val, skipped=True)
                            )
                            continue
                        mag = abs(rep.I_dis_max)
                        ratio = rep.I_ch_max / mag if mag > 0.0 else None
                        rows.append(
                            SweepRow(
                                C_d=cd, R_d=rd, t_dTol=tdtol, t_on=ton, L=l_val,
                                skipped=False,
                                V_d_ov=rep.V_d_ov,
                                I_ch_max=rep.I_ch_max,
                                I_dis_max=rep.I_dis_max,
                                I_ratio=ratio,
                            )
                        )
    return SweepResult(grid=grid, rows=tuple(rows))


def _cell(value: Optional[float]) -> str:
    return "" if value is None else format(value, ".17e")


def export_csv(result: SweepResult, path: Path | str) -> None:
    """Header plus one data row per grid point, full-precision floats."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in result.rows:
            writer.writerow(
                [
                    format(r.C_d, ".17e"),
                    format(r.R_d, ".17e"),
                    format(r.t_dTol, ".17e"),
                    format(r.t_on, ".17e"),
                    format(r.L, ".17e"),
                    _cell(r.V_d_ov),
                    _cell(r.I_ch_max),
                    _cell(r.I_dis_max),
                    _cell(r.I_ratio),
                    "true" if r.skipped else "false",
                ]
            )


def write_manifest(grid: SweepGrid, path: Path | str) -> None:
    """Record the grid and base parameters so a sweep can be reproduced."""
    spec, dev, tol = grid.base
    doc = {
        "cd_axis": list(grid.cd_axis),
        "rd_values": list(grid.rd_values),
        "tdtol_values": list(grid.tdtol_values),
        "ton_values": list(grid.ton_values),
        "l_values": list(grid.l_values),
        "base": {
            "circuit": {"V_s": spec.V_s, "N": spec.N, "L": spec.L},
            "device": {
                "t_dmax": dev.t_dmax,
                "t_dmin": dev.t_dmin,
                "t_on": dev.t_on,
                "I_Dmax": dev.I_Dmax,
                "I_Dmin": dev.I_Dmin,
                "V_Ddc": dev.V_Ddc,
                "I_Trms": dev.I_Trms,
                "I_TSM": dev.I_TSM,
                "Q_max": dev.Q_max,
                "Q_min": dev.Q_min,
            },
            "tolerances": {"a_c": tol.a_c, "a_R": tol.a_R},
        },
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
