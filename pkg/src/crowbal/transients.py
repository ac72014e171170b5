"""Closed-form turn-on transients of the slow device's balancing network.

The charging cycle runs from the instant the fast devices fire (t_dmin)
until the slow device fires (t_dmax). While the delay mismatch fits
inside the anode-voltage fall time the drive is a single ramp (regime 1);
otherwise the drive saturates at the bus voltage partway through and the
transient continues as the homogeneous response (regime 2). After t_dmax
the charged capacitor discharges into the now-conducting device through
R_d, a first-order decay.

All formulas here assume the underdamped case; the oracle module
cross-checks them by direct integration and also covers other damping.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError, InfeasibleRR, InfeasibleStatic
from .params import (
    BalancingDesign,
    Channel,
    CircuitSpec,
    DeviceParams,
    Regime,
    SecondOrderParams,
    ToleranceSpec,
    TransientReport,
    Waveform,
    effective_capacitance,
    regime_for,
    second_order_params,
)


def ramp_slope(spec: CircuitSpec, dev: DeviceParams) -> float:
    """Rate of rise of the drive voltage while the fast devices turn on, V/s."""
    return spec.V_s * (spec.N - 1) / (spec.N * dev.t_on)


def discharge_slope(spec: CircuitSpec, dev: DeviceParams) -> float:
    """Anode-voltage fall rate of the slow device once it conducts, V/s.

    Shared with the fast devices' fall rate by assumption, hence the
    same V_s/(N*t_on) constant rather than a separate parameter.
    """
    return spec.V_s / (spec.N * dev.t_on)


def drive_voltage(t: float, spec: CircuitSpec, dev: DeviceParams) -> float:
    """Voltage across the inductor plus the still-blocking slow device.

    Ramps from the static share V_s/N while the fast devices commutate,
    then holds at V_s once all of them conduct.
    """
    if t < dev.t_dmin:
        raise DomainError(f"t={t!r} s precedes the first firing instant t_dmin={dev.t_dmin!r} s")
    t_1 = dev.t_dmin + dev.t_on
    if t > t_1:
        return spec.V_s
    return spec.V_s / spec.N + ramp_slope(spec, dev) * (t - dev.t_dmin)


def _charging_current_ramp(
    tau: float, spec: CircuitSpec, dev: DeviceParams, c_eff: float, p: SecondOrderParams
) -> float:
    # tau is time since t_dmin; valid while the ramp drive holds
    if tau == 0.0:
        return 0.0  # stated initial condition, kept exact
    level = spec.V_s * (spec.N - 1) * c_eff / (spec.N * dev.t_on)
    atten = math.exp(-p.delta * tau) / (p.omega_d * math.sqrt(spec.L * c_eff))
    return level * (1.0 - atten * math.cos(p.omega_d * tau - p.phi))


def _vak1_ramp(
    tau: float, spec: CircuitSpec, dev: DeviceParams, p: SecondOrderParams
) -> float:
    transient = tau - math.exp(-p.delta * tau) * math.sin(p.omega_d * tau) / p.omega_d
    return spec.V_s / spec.N + ramp_slope(spec, dev) * transient


@dataclass(frozen=True)
class Regime2Constants:
    """State handed across the drive-saturation instant in regime 2."""

    t_1: float       # boundary time t_dmin + t_on, s
    I_ch_t1: float   # charging current at t_1, A
    V_AK1_t1: float  # slow-device voltage at t_1, V
    V_c_t1: float    # capacitor voltage at t_1, V
    K_1: float       # cosine coefficient of the continuation, A
    K_2: float       # sine coefficient of the continuation, A


@lru_cache(maxsize=512)
def regime2_constants(
    spec: CircuitSpec, dev: DeviceParams, design: BalancingDesign
) -> Regime2Constants:
    """Continuation coefficients for the homogeneous phase, cached per design point."""
    p = second_order_params(spec, design)
    c_eff = effective_capacitance(design)
    t_1 = dev.t_dmin + dev.t_on
    i_t1 = _charging_current_ramp(dev.t_on, spec, dev, c_eff, p)
    v_t1 = _vak1_ramp(dev.t_on, spec, dev, p)
    v_c_t1 = v_t1 - i_t1 * design.R_d
    k_1 = i_t1
    k_2 = (spec.V_s - v_c_t1 - i_t1 * spec.L * p.delta) / (spec.L * p.omega_d)
    return Regime2Constants(t_1=t_1, I_ch_t1=i_t1, V_AK1_t1=v_t1, V_c_t1=v_c_t1, K_1=k_1, K_2=k_2)


def _check_charging_window(t: float, dev: DeviceParams) -> None:
    if t < dev.t_dmin or t > dev.t_dmax:
        raise DomainError(
            f"t={t!r} s outside the charging window [{dev.t_dmin!r}, {dev.t_dmax!r}] s"
        )


def charging_current(
    t: float, spec: CircuitSpec, dev: DeviceParams, design: BalancingDesign
) -> float:
    """Charging current of the slow device's balancing network at time t."""
    _check_charging_window(t, dev)
    p = second_order_params(spec, design)
    c_eff = effective_capacitance(design)
    k = regime2_constants(spec, dev, design) if regime_for(dev) is Regime.REGIME2 else None
    if k is not None and t > k.t_1:
        tau2 = t - k.t_1
        damp = math.exp(-p.delta * tau2)
        return damp * (
            k.K_1 * math.cos(p.omega_d * tau2) + k.K_2 * math.sin(p.omega_d * tau2)
        )
    return _charging_current_ramp(t - dev.t_dmin, spec, dev, c_eff, p)


def vak1(t: float, spec: CircuitSpec, dev: DeviceParams, design: BalancingDesign) -> float:
    """Voltage across the slow (still blocking) device at time t."""
    _check_charging_window(t, dev)
    p = second_order_params(spec, design)
    k = regime2_constants(spec, dev, design) if regime_for(dev) is Regime.REGIME2 else None
    if k is not None and t > k.t_1:
        tau2 = t - k.t_1
        damp = math.exp(-p.delta * tau2)
        osc = (k.K_1 * p.omega_d + k.K_2 * p.delta) * math.sin(p.omega_d * tau2) + (
            k.K_1 * p.delta - k.K_2 * p.omega_d
        ) * math.cos(p.omega_d * tau2)
        return spec.V_s + spec.L * damp * osc
    return _vak1_ramp(t - dev.t_dmin, spec, dev, p)


def peak_charging(
    spec: CircuitSpec, dev: DeviceParams, design: BalancingDesign
) -> tuple[float, float]:
    """(I_ch_max, V_AK1_max): both stresses evaluated at the slow device's
    firing instant t_dmax, which is where the charging cycle ends."""
    i_pk = charging_current(dev.t_dmax, spec, dev, design)
    v_pk = vak1(dev.t_dmax, spec, dev, design)
    return i_pk, v_pk


def discharge_current(
    t: float,
    spec: CircuitSpec,
    dev: DeviceParams,
    design: BalancingDesign,
    init: float | None = None,
) -> float:
    """Discharging current of the network after the slow device fires.

    `init` is the current handed over from the charging cycle at t_dmax;
    computed from the charging closed form when not supplied. Sign
    convention: charging positive, discharging negative.
    """
    if t < dev.t_dmax:
        raise DomainError(f"t={t!r} s precedes the slow device firing at {dev.t_dmax!r} s")
    if init is None:
        init = charging_current(dev.t_dmax, spec, dev, design)
    c_eff = effective_capacitance(design)
    forced = spec.V_s * c_eff / (spec.N * dev.t_on)
    if design.R_d == 0.0:
        # RC time constant collapses; the decay is instantaneous
        return init if t == dev.t_dmax else -forced
    decay = math.exp(-(t - dev.t_dmax) / (design.R_d * c_eff))
    return (init + forced) * decay - forced


def conduction_reach_time(spec: CircuitSpec, dev: DeviceParams, v_ak1_max: float) -> float:
    """Time for the slow device to ramp from its peak voltage down to
    conduction, starting from the common anode-voltage fall rate."""
    return v_ak1_max * spec.N * dev.t_on / spec.V_s + dev.t_dmax


def first_device_turnon_time(
    spec: CircuitSpec, dev: DeviceParams, design: BalancingDesign
) -> float:
    """Conduction-reach time of the slow device for this design point."""
    _, v_pk = peak_charging(spec, dev, design)
    return conduction_reach_time(spec, dev, v_pk)


def peak_discharge(spec: CircuitSpec, dev: DeviceParams, design: BalancingDesign) -> float:
    """Signed peak discharging current, reached when the slow device has
    fully commutated (largest magnitude of the decay toward the forced level)."""
    i_pk, v_pk = peak_charging(spec, dev, design)
    t_on1 = conduction_reach_time(spec, dev, v_pk)
    return discharge_current(t_on1, spec, dev, design, init=i_pk)


def overvoltage_percent(spec: CircuitSpec, v_ak1_max: float) -> float:
    """Peak voltage expressed as percent above the static share V_s/N."""
    share = spec.V_s / spec.N
    return 100.0 * (v_ak1_max - share) / share


def static_resistor(
    spec: CircuitSpec, dev: DeviceParams, tol: ToleranceSpec, V_d1: float
) -> float:
    """Static balancing resistance holding the worst device at or below V_d1
    against leakage mismatch, with resistor tolerance a_R at worst case.

    Returns 0 at the exact feasibility boundary; raises InfeasibleStatic
    when no resistor can reach the requested V_d1.
    """
    a_r = tol.a_R
    num = V_d1 * (spec.N * (1.0 - a_r) + 2.0 * a_r) - (1.0 + a_r) * spec.V_s
    if num < 0.0:
        raise InfeasibleStatic(
            f"V_d1={V_d1!r} V is below the reachable steady-state share for N={spec.N}, a_R={a_r!r}"
        )
    den = (spec.N - 1) * (1.0 - a_r * a_r) * (dev.I_Dmax - dev.I_Dmin)
    return num / den


def reverse_recovery_cd(
    spec: CircuitSpec, dev: DeviceParams, tol: ToleranceSpec, V_d1: float
) -> float:
    """Capacitance required by the conventional turn-off (recovery charge)
    sizing rule, for comparison against the turn-on based design."""
    a_c = tol.a_c
    k = 1.0 + (spec.N - 1) * (1.0 - a_c) / (1.0 + a_c)
    bracket = V_d1 * k - spec.V_s
    if bracket <= 0.0:
        raise InfeasibleRR(
            f"V_d1={V_d1!r} V gives a non-positive denominator in the recovery-charge sizing"
        )
    return k * (dev.Q_max - dev.Q_min) / ((1.0 - a_c) * bracket)


def analyze(spec: CircuitSpec, dev: DeviceParams, design: BalancingDesign) -> TransientReport:
    """Full peak-stress report for one design point."""
    i_pk, v_pk = peak_charging(spec, dev, design)
    t_on1 = conduction_reach_time(spec, dev, v_pk)
    i_dis = discharge_current(t_on1, spec, dev, design, init=i_pk)
    return TransientReport(
        V_AK1_max=v_pk,
        V_d_ov=overvoltage_percent(spec, v_pk),
        I_ch_max=i_pk,
        I_dis_max=i_dis,
        t_on1=t_on1,
        regime=regime_for(dev),
    )


def _linspace(a: float, b: float, n: int) -> list[float]:
    if n < 2 or b <= a:
        return [a]
    step = (b - a) / (n - 1)
    ts = [a + i * step for i in range(n - 1)]
    ts.append(b)  # endpoint exact
    return ts


def sample_waveforms(
    spec: CircuitSpec,
    dev: DeviceParams,
    design: BalancingDesign,
    points: int = 1201,
    margin: float = 0.2,
) -> tuple[dict[Channel, Waveform], TransientReport]:
    """Sampled renditions of the four transient channels for reporting.

    Charging channels span [t_dmin, t_dmax]; the discharge channel spans
    from t_dmax to the conduction-reach time plus a trailing margin.
    """
    report = analyze(spec, dev, design)
    waves: dict[Channel, Waveform] = {}

    ts_ch = _linspace(dev.t_dmin, dev.t_dmax, points)
    waves[Channel.V_DRIVE] = Waveform(
        t=tuple(ts_ch), y=tuple(drive_voltage(t, spec, dev) for t in ts_ch), channel=Channel.V_DRIVE
    )
    waves[Channel.I_CH] = Waveform(
        t=tuple(ts_ch),
        y=tuple(charging_current(t, spec, dev, design) for t in ts_ch),
        channel=Channel.I_CH,
    )
    waves[Channel.V_AK1] = Waveform(
        t=tuple(ts_ch),
        y=tuple(vak1(t, spec, dev, design) for t in ts_ch),
        channel=Channel.V_AK1,
    )

    t_end = report.t_on1 + margin * (report.t_on1 - dev.t_dmax)
    ts_dis = _linspace(dev.t_dmax, t_end, points)
    waves[Channel.I_DIS] = Waveform(
        t=tuple(ts_dis),
        y=tuple(
            discharge_current(t, spec, dev, design, init=report.I_ch_max) for t in ts_dis
        ),
        channel=Channel.I_DIS,
    )
    return waves, report
