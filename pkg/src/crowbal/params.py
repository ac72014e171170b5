"""Domain value objects and shared derived quantities.

Everything in this package is kept in SI base units (volts, amperes,
seconds, henries, farads, ohms). Pretty-printing with unit prefixes
happens at the CLI boundary, never inside the models.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

from .errors import DomainError, NotUnderdamped


@dataclass(frozen=True)
class CircuitSpec:
    """Crowbar-level electrical context."""

    V_s: float  # dc source voltage, V
    N: int      # series device count
    L: float    # di/dt limiting inductance, H


@dataclass(frozen=True)
class DeviceParams:
    """Thyristor datasheet values relevant to turn-on balancing."""

    t_dmax: float  # max gate turn-on delay, s
    t_dmin: float  # min gate turn-on delay, s
    t_on: float    # linearized anode-voltage fall time, s
    I_Dmax: float  # max forward leakage, A
    I_Dmin: float  # min forward leakage, A
    V_Ddc: float   # rated dc blocking voltage, V
    I_Trms: float  # rms on-state current, A
    I_TSM: float   # peak non-repetitive surge current, A
    Q_max: float   # max recovery charge, C
    Q_min: float   # min recovery charge, C

    @property
    def t_dTol(self) -> float:
        """Turn-on delay mismatch between the slowest and fastest device."""
        return self.t_dmax - self.t_dmin


@dataclass(frozen=True)
class ToleranceSpec:
    """Fractional component tolerances used for worst-case analysis."""

    a_c: float = 0.0  # capacitor tolerance, dimensionless
    a_R: float = 0.0  # resistor tolerance, dimensionless


@dataclass(frozen=True)
class BalancingDesign:
    """One candidate static + dynamic balancing network.

    R_s is optional because the dynamic (turn-on) transient model never
    reads it; sweeps over the dynamic network leave it unset.
    """

    R_d: float  # dynamic damping resistance, ohm
    C_d: float  # dynamic balancing capacitance, F
    tolerances: ToleranceSpec = field(default_factory=ToleranceSpec)
    R_s: Optional[float] = None  # static balancing resistance, ohm


def effective_capacitance(design: BalancingDesign) -> float:
    """Worst-case capacitance of the slowest device's network.

    The slow device is assumed to carry the capacitor at its lower
    tolerance bound; the symmetric (1 + a_c) case is not modeled.
    """
    return (1.0 - design.tolerances.a_c) * design.C_d


class Regime(Enum):
    """Charging-cycle model selector.

    REGIME1: the delay mismatch fits inside the anode-voltage fall time,
    so the ramp drive holds for the whole charging window.
    REGIME2: the fast devices finish turning on first and the drive
    saturates before the slow device fires.
    """

    REGIME1 = "regime1"  # t_dTol <= t_on
    REGIME2 = "regime2"  # t_dTol > t_on


def regime_for(dev: DeviceParams) -> Regime:
    return Regime.REGIME1 if dev.t_dTol <= dev.t_on else Regime.REGIME2


@dataclass(frozen=True)
class SecondOrderParams:
    """Damping rate, damped angular frequency and phase of the charging
    transient of the slow device's RC network."""

    delta: float    # damping rate, 1/s
    omega_d: float  # damped angular frequency, rad/s
    phi: float      # phase of the charging-current cosine, rad


def second_order_params(spec: CircuitSpec, design: BalancingDesign) -> SecondOrderParams:
    """Second-order parameters of the charging loop (L, R_d, worst-case C).

    Raises NotUnderdamped when R_d reaches the characteristic impedance
    and the roots turn real; the closed forms only cover the oscillatory
    case, by construction.
    """
    c_eff = effective_capacitance(design)
    if c_eff <= 0.0:
        raise DomainError("effective capacitance (1 - a_c) * C_d must be positive")
    if spec.L <= 0.0:
        raise DomainError("inductance L must be positive")
    delta = design.R_d / (2.0 * spec.L)
    w0_sq = 1.0 / (spec.L * c_eff)
    if w0_sq <= delta * delta:
        raise NotUnderdamped(
            "R_d=%g ohm is not below the critical damping value 2*sqrt(L/C_eff)=%g ohm"
            % (design.R_d, 2.0 * math.sqrt(spec.L / c_eff))
        )
    omega_d = math.sqrt(w0_sq - delta * delta)
    return SecondOrderParams(delta=delta, omega_d=omega_d, phi=math.atan(delta / omega_d))


@dataclass(frozen=True)
class Violation:
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.field}: {self.message}"


@dataclass(frozen=True)
class ValidationOutcome:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def messages(self) -> list[str]:
        return [str(v) for v in self.violations]


def validate(
    spec: CircuitSpec,
    dev: Optional[DeviceParams] = None,
    design: Optional[BalancingDesign] = None,
) -> ValidationOutcome:
    """Check every structural invariant; never raises, errors are data."""
    bad: list[Violation] = []

    def check(ok: bool, fieldname: str, rule: str) -> None:
        if not ok:
            bad.append(Violation(fieldname, rule))

    check(spec.V_s > 0, "V_s", "V_s > 0")
    check(spec.N >= 2, "N", "N >= 2")
    check(spec.L > 0, "L", "L > 0")

    if dev is not None:
        check(dev.t_dmin >= 0, "t_dmin", "t_dmin >= 0")
        check(dev.t_dmax >= dev.t_dmin, "t_dmax", "t_dmax >= t_dmin")
        check(dev.t_on > 0, "t_on", "t_on > 0")
        check(dev.I_Dmin >= 0, "I_Dmin", "I_Dmin >= 0")
        check(dev.I_Dmax > dev.I_Dmin, "I_Dmax", "I_Dmax > I_Dmin")
        check(dev.Q_min >= 0, "Q_min", "Q_min >= 0")
        check(dev.Q_max >= dev.Q_min, "Q_max", "Q_max >= Q_min")

    if design is not None:
        check(design.C_d > 0, "C_d", "C_d > 0")
        check(design.R_d >= 0, "R_d", "R_d >= 0")
        if design.R_s is not None:
            check(design.R_s > 0, "R_s", "R_s > 0")
        tol = design.tolerances
        check(tol.a_c >= 0, "a_c", "a_c >= 0")
        check(1.0 - tol.a_c > 0, "a_c", "(1 - a_c) > 0")
        check(tol.a_R >= 0, "a_R", "a_R >= 0")
        check(1.0 - tol.a_R * tol.a_R > 0, "a_R", "(1 - a_R^2) > 0")

    return ValidationOutcome(tuple(bad))


class Channel(Enum):
    V_DRIVE = "v_drive"
    I_CH = "i_ch"
    V_AK1 = "v_AK1"
    I_DIS = "i_dis"


@dataclass(frozen=True, eq=False)
class Waveform:
    """A sampled scalar signal; times strictly increasing, one channel tag."""

    t: tuple[float, ...]  # sample times, s
    y: tuple[float, ...]
    channel: Channel

    def __post_init__(self) -> None:
        t = tuple(float(v) for v in self.t)
        y = tuple(float(v) for v in self.y)
        if len(t) != len(y):
            raise ValueError("t and y must have equal lengths")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ValueError("sample times must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return len(self.t)

    def max_magnitude(self) -> float:
        return max(abs(v) for v in self.y) if self.y else 0.0


def write_waveform_csv(wave: Waveform, path: Path | str) -> None:
    """One file per channel, columns t_s,value, full-precision floats."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t_s", "value"])
        for t, y in zip(wave.t, wave.y):
            writer.writerow([format(t, ".17e"), format(y, ".17e")])


@dataclass(frozen=True)
class TransientReport:
    """Peak stresses of one balancing-network design point.

    I_dis_max keeps the raw signed value (discharge runs negative);
    use I_dis_max_abs when comparing against current limits.
    """

    V_AK1_max: float  # peak slow-device voltage, V
    V_d_ov: float     # overvoltage, percent of the static share
    I_ch_max: float   # peak charging current, A
    I_dis_max: float  # peak discharging current, signed, A
    t_on1: float      # slow-device conduction-reach time, s
    regime: Regime

    @property
    def I_dis_max_abs(self) -> float:
        return abs(self.I_dis_max)

    def to_dict(self) -> dict:
        return {
            "V_AK1_max": self.V_AK1_max,
            "V_d_ov": self.V_d_ov,
            "I_ch_max": self.I_ch_max,
            "I_dis_max": self.I_dis_max,
            "I_dis_max_abs": self.I_dis_max_abs,
            "t_on1": self.t_on1,
            "regime": self.regime.value,
        }
