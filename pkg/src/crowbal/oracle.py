"""Fixed-step numerical integration of the governing circuit equations.

Deliberately independent of the closed forms in transients.py: only the
piecewise drive and the differential equations themselves are
discretized here, so the two modules can cross-validate each other.
Fixed steps (no adaptive control) keep runs deterministic; horizons are
tens of microseconds and the equations are only mildly stiff.

Charging loop, second-order form (state i, di/dt):

    L * i'' + R_d * i' + i / C_eff = d(v_drive)/dt

with v_drive the ramp-then-flat drive, i(t_dmin) = 0 and zero inductor
voltage. The slow-device voltage is reconstructed as drive minus the
inductor voltage. Discharge, first-order:

    R_d * i' + i / C_eff = -V_s / (N * t_on)

which degenerates to the algebraic constraint i = -V_s*C_eff/(N*t_on)
at R_d = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

from .errors import DomainError, StepTooLarge
from .params import (
    BalancingDesign,
    Channel,
    CircuitSpec,
    DeviceParams,
    Waveform,
    effective_capacitance,
)
from .transients import drive_voltage, ramp_slope

MIN_STEPS_PER_PERIOD = 200
MAX_STEPS = 4_000_000


class Method(Enum):
    RK4 = "rk4"
    TRAPEZOIDAL = "trapezoidal"


@dataclass(frozen=True)
class IntegratorConfig:
    dt: Optional[float] = None  # step, s; None picks a safe default
    method: Method = Method.RK4
    t_end: Optional[float] = None  # horizon, s


def charging_step_bound(spec: CircuitSpec, design: BalancingDesign) -> float:
    """Largest admissible step for the charging loop.

    Underdamped: at least MIN_STEPS_PER_PERIOD steps per oscillation
    period. Overdamped (exploratory use): resolve the fastest real root.
    """
    c_eff = effective_capacitance(design)
    delta = design.R_d / (2.0 * spec.L)
    w0_sq = 1.0 / (spec.L * c_eff)
    if w0_sq > delta * delta:
        omega_d = math.sqrt(w0_sq - delta * delta)
        return (2.0 * math.pi / omega_d) / MIN_STEPS_PER_PERIOD
    fastest = delta + math.sqrt(delta * delta - w0_sq)
    return 0.1 / fastest


def _segment_steps(span: float, dt: float) -> tuple[int, float]:
    n = max(1, math.ceil(span / dt))
    if n > MAX_STEPS:
        raise StepTooLarge(f"{n} steps needed for span {span!r} s at dt {dt!r} s")
    return n, span / n


def _rk4_second_order(
    i: float, j: float, h: float, g: float, r: float, c_eff: float, l: float, n: int
) -> tuple[list[float], list[float]]:
    """n RK4 steps of (i, j)' = (j, (g - r*j - i/c_eff)/l); g constant."""
    iv = [i]
    jv = [j]
    inv_c = 1.0 / c_eff
    inv_l = 1.0 / l
    for _ in range(n):
        k1i = j
        k1j = (g - r * j - i * inv_c) * inv_l
        i2 = i + 0.5 * h * k1i
        j2 = j + 0.5 * h * k1j
        k2i = j2
        k2j = (g - r * j2 - i2 * inv_c) * inv_l
        i3 = i + 0.5 * h * k2i
        j3 = j + 0.5 * h * k2j
        k3i = j3
        k3j = (g - r * j3 - i3 * inv_c) * inv_l
        i4 = i + h * k3i
        j4 = j + h * k3j
        k4i = j4
        k4j = (g - r * j4 - i4 * inv_c) * inv_l
        i += h * (k1i + 2.0 * k2i + 2.0 * k3i + k4i) / 6.0
        j += h * (k1j + 2.0 * k2j + 2.0 * k3j + k4j) / 6.0
        iv.append(i)
        jv.append(j)
    return iv, jv


def _trapezoid_second_order(
    i: float, j: float, h: float, g: float, r: float, c_eff: float, l: float, n: int
) -> tuple[list[float], list[float]]:
    """Implicit trapezoidal rule on the same linear system, solved exactly.

    y' = A y + b with A = [[0, 1], [-1/(L*C_eff), -R/L]], b = (0, g/L):
    (I - h/2 A) y+ = (I + h/2 A) y + h b, the 2x2 solve done in closed form.
    """
    a21 = -1.0 / (l * c_eff)
    a22 = -r / l
    b2 = g / l
    # M = I - h/2 A, P = I + h/2 A
    m11, m12 = 1.0, -0.5 * h
    m21, m22 = -0.5 * h * a21, 1.0 - 0.5 * h * a22
    det = m11 * m22 - m12 * m21
    # inv(M)
    w11, w12 = m22 / det, -m12 / det
    w21, w22 = -m21 / det, m11 / det
    p11, p12 = 1.0, 0.5 * h
    p21, p22 = 0.5 * h * a21, 1.0 + 0.5 * h * a22
    # step matrix S = inv(M) @ P and constant c = inv(M) @ (h b)
    s11 = w11 * p11 + w12 * p21
    s12 = w11 * p12 + w12 * p22
    s21 = w21 * p11 + w22 * p21
    s22 = w21 * p12 + w22 * p22
    c1 = w12 * h * b2
    c2 = w22 * h * b2
    iv = [i]
    jv = [j]
    for _ in range(n):
        i, j = s11 * i + s12 * j + c1, s21 * i + s22 * j + c2
        iv.append(i)
        jv.append(j)
    return iv, jv


def integrate_charging(
    spec: CircuitSpec,
    dev: DeviceParams,
    design: BalancingDesign,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> tuple[Waveform, Waveform]:
    """Integrate the charging cycle; returns (i_ch, v_AK1) waveforms.

    Works for any damping, unlike the closed forms. The grid is split at
    the drive-saturation instant so no step straddles the slope
    discontinuity. The horizon defaults to t_dmax (where the slow device
    fires and the topology changes); cfg.t_end may extend it for
    exploratory runs such as energy checks.
    """
    t_end = cfg.t_end if cfg.t_end is not None else dev.t_dmax
    if t_end < dev.t_dmin:
        raise DomainError(f"t_end={t_end!r} s precedes t_dmin={dev.t_dmin!r} s")

    bound = charging_step_bound(spec, design)
    if cfg.dt is not None:
        if cfg.dt <= 0.0:
            raise DomainError("dt must be positive")
        if cfg.dt > bound * (1.0 + 1e-12):
            raise StepTooLarge(f"dt={cfg.dt!r} s exceeds the resolution bound {bound!r} s")
        dt = cfg.dt
    else:
        window = t_end - dev.t_dmin
        dt = bound / 2.0
        if window > 0.0:
            dt = min(dt, window / 200.0)

    slope = ramp_slope(spec, dev)
    t_1 = dev.t_dmin + dev.t_on
    if t_end <= t_1:
        segments = [(dev.t_dmin, t_end, slope)]
    else:
        segments = [(dev.t_dmin, t_1, slope), (t_1, t_end, 0.0)]

    c_eff = effective_capacitance(design)
    stepper = _rk4_second_order if cfg.method is Method.RK4 else _trapezoid_second_order

    ts: list[float] = [dev.t_dmin]
    i_samples: list[float] = [0.0]
    j_samples: list[float] = [0.0]
    i, j = 0.0, 0.0
    for seg_start, seg_end, g in segments:
        span = seg_end - seg_start
        if span <= 0.0:
            continue
        n, h = _segment_steps(span, dt)
        iv, jv = stepper(i, j, h, g, design.R_d, c_eff, spec.L, n)
        for k in range(1, n + 1):
            # accumulate from the segment start for a uniform grid
            ts.append(seg_start + k * h if k < n else seg_end)
        i_samples.extend(iv[1:])
        j_samples.extend(jv[1:])
        i, j = iv[-1], jv[-1]

    vak = [drive_voltage(t, spec, dev) - spec.L * jj for t, jj in zip(ts, j_samples)]
    return (
        Waveform(t=tuple(ts), y=tuple(i_samples), channel=Channel.I_CH),
        Waveform(t=tuple(ts), y=tuple(vak), channel=Channel.V_AK1),
    )


def integrate_discharge(
    spec: CircuitSpec,
    dev: DeviceParams,
    design: BalancingDesign,
    init: float,
    cfg: IntegratorConfig,
) -> Waveform:
    """Integrate the discharge decay from t_dmax to cfg.t_end.

    `init` is the current handed over from the charging phase. cfg.t_end
    is required (the conduction-reach horizon is the caller's call). At
    R_d = 0 the equation is algebraic and the forced level is returned
    directly.
    """
    if cfg.t_end is None:
        raise DomainError("integrate_discharge requires cfg.t_end")
    t0 = dev.t_dmax
    t_end = cfg.t_end
    if t_end < t0:
        raise DomainError(f"t_end={t_end!r} s precedes t_dmax={t0!r} s")

    c_eff = effective_capacitance(design)
    forced = spec.V_s * c_eff / (spec.N * dev.t_on)

    if design.R_d == 0.0:
        n = 400
        h = (t_end - t0) / n if t_end > t0 else 0.0
        if h == 0.0:
            return Waveform(t=(t0,), y=(init,), channel=Channel.I_DIS)
        ts = [t0 + k * h for k in range(n)] + [t_end]
        ys = [init] + [-forced] * n
        return Waveform(t=tuple(ts), y=tuple(ys), channel=Channel.I_DIS)

    tau = design.R_d * c_eff
    bound = tau / 5.0
    if cfg.dt is not None:
        if cfg.dt <= 0.0:
            raise DomainError("dt must be positive")
        if cfg.dt > bound * (1.0 + 1e-12):
            raise StepTooLarge(f"dt={cfg.dt!r} s exceeds the RC resolution bound {bound!r} s")
        dt = cfg.dt
    else:
        dt = tau / 6.0
        if t_end > t0:
            dt = min(dt, (t_end - t0) / 200.0)

    if t_end == t0:
        return Waveform(t=(t0,), y=(init,), channel=Channel.I_DIS)
    n, h = _segment_steps(t_end - t0, dt)

    a = -1.0 / tau
    b = -spec.V_s / (spec.N * dev.t_on * design.R_d)
    y = init
    ys = [y]
    if cfg.method is Method.RK4:
        for _ in range(n):
            k1 = a * y + b
            k2 = a * (y + 0.5 * h * k1) + b
            k3 = a * (y + 0.5 * h * k2) + b
            k4 = a * (y + h * k3) + b
            y += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
            ys.append(y)
    else:
        gain = (1.0 + 0.5 * h * a) / (1.0 - 0.5 * h * a)
        push = h * b / (1.0 - 0.5 * h * a)
        for _ in range(n):
            y = gain * y + push
            ys.append(y)
    ts = [t0 + k * h for k in range(n)] + [t_end]
    return Waveform(t=tuple(ts), y=tuple(ys), channel=Channel.I_DIS)


def supnorm_error(wave: Waveform, reference: Callable[[float], float]) -> float:
    """Sup-norm deviation of a waveform from a reference function, relative
    to the reference's maximum magnitude over the same samples."""
    ref = [reference(t) for t in wave.t]
    scale = max(abs(v) for v in ref)
    if scale == 0.0:
        scale = 1.0
    return max(abs(a - b) for a, b in zip(wave.y, ref)) / scale
