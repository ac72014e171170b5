"""Component selection: minimum capacitance for an overvoltage target,
damping-resistor adjustment against current limits, static resistor
sizing and the recovery-charge comparison.

The procedure starts from the undamped optimum (overvoltage is smallest
at R_d = 0), re-solves the capacitance whenever the damping resistor
changes, and walks a fixed resistor grid when currents exceed their
limits, falling back to capacitance reduction past the grid cap. Every
decision lands in an ordered adjustments log that can be replayed.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Optional

from .errors import InfeasibleRR, InfeasibleStatic, TargetUnreachable
from .eseries import ESeries, snap_down, snap_up
from .params import (
    BalancingDesign,
    CircuitSpec,
    DeviceParams,
    ToleranceSpec,
    TransientReport,
)
from .transients import (
    analyze,
    overvoltage_percent,
    peak_charging,
    reverse_recovery_cd,
    static_resistor,
)

RD_GRID = (0.0, 1.0, 2.0, 5.0, 10.0, 15.0, 20.0, 30.0)  # ohm
RD_CAP = 30.0
BACKOFF_FACTOR = 0.9
BACKOFF_STEPS = 20

_CD_BRACKET_LO = 1e-9
_CD_BRACKET_HI = 1e-5
_CD_FLOOR = 1e-15
_CD_CEIL = 1.0


@dataclass(frozen=True)
class DesignConstraints:
    """Limits a selected network must satisfy.

    max_steady_voltage bounds the static (leakage-driven) share and feeds
    the static-resistor formula; the transient limit is expressed through
    max_overvoltage_pct. min_damping is the damping resistance inserted
    even when currents would permit none (guards against the parasitic
    loop inductance of the physical network); set it to 0 to disable.
    """

    max_overvoltage_pct: float
    max_charge_current: float   # A
    max_discharge_current: float  # A, magnitude
    max_steady_voltage: float   # V, per device
    snap: ESeries = ESeries.NONE
    min_damping: float = 3.0    # ohm


@dataclass(frozen=True)
class RRComparison:
    """Capacitor sized by the recovery-charge rule, its stresses at
    R_d = 0, and its size relative to the chosen capacitor."""

    C_d_rr: float
    stresses_rr: TransientReport
    ratio: float


@dataclass(frozen=True)
class DesignReport:
    chosen: Optional[BalancingDesign]
    stresses: Optional[TransientReport]
    rr_comparison: Optional[RRComparison]
    feasible: bool
    binding_constraint: Optional[str]
    adjustments: tuple[dict, ...]

    def to_dict(self) -> dict:
        chosen = None
        if self.chosen is not None:
            chosen = {
                "R_s": self.chosen.R_s,
                "R_d": self.chosen.R_d,
                "C_d": self.chosen.C_d,
                "tolerances": {
                    "a_c": self.chosen.tolerances.a_c,
                    "a_R": self.chosen.tolerances.a_R,
                },
            }
        return {
            "chosen": chosen,
            "stresses": self.stresses.to_dict() if self.stresses else None,
            "rr_comparison": (
                {
                    "C_d_rr": self.rr_comparison.C_d_rr,
                    "stresses_rr": self.rr_comparison.stresses_rr.to_dict(),
                    "ratio": self.rr_comparison.ratio,
                }
                if self.rr_comparison
                else None
            ),
            "feasible": self.feasible,
            "binding_constraint": self.binding_constraint,
            "adjustments": list(self.adjustments),
        }


def solve_min_cd(
    spec: CircuitSpec,
    dev: DeviceParams,
    tol: ToleranceSpec,
    target_pct: float,
    R_d: float = 0.0,
    rel_width: float = 0.005,
) -> float:
    """Smallest capacitance whose worst-case turn-on overvoltage stays at
    or below target_pct, at the given damping resistance.

    Log-space bisection down to rel_width; the feasible upper end of the
    final bracket is returned, so the result always meets the target.
    Relies on the overvoltage being non-increasing in C_d.
    """

    def ov(cd: float) -> float:
        design = BalancingDesign(R_d=R_d, C_d=cd, tolerances=tol)
        _, v_pk = peak_charging(spec, dev, design)
        return overvoltage_percent(spec, v_pk)

    if dev.t_dTol == 0.0:
        # no delay mismatch, no transient: any capacitance meets any target
        return _CD_BRACKET_LO

    hi = _CD_BRACKET_HI
    if R_d > 0.0:
        # stay strictly inside the underdamped region the model covers
        c_crit = 4.0 * spec.L / (R_d * R_d * (1.0 - tol.a_c))
        hi = min(hi, 0.99 * c_crit)

    if ov(hi) > target_pct:
        if R_d > 0.0:
            raise TargetUnreachable(
                f"target {target_pct!r}% unreachable at R_d={R_d!r} ohm; "
                f"best achievable within the underdamped region is {ov(hi):.3f}%"
            )
        while ov(hi) > target_pct:
            hi *= 10.0
            if hi > _CD_CEIL:
                raise TargetUnreachable(
                    f"target {target_pct!r}% unreachable: overvoltage exceeds it at any capacitance"
                )

    lo = min(_CD_BRACKET_LO, hi / 10.0)
    while ov(lo) <= target_pct:
        lo /= 10.0
        if lo < _CD_FLOOR:
            return lo  # target met everywhere probed; degenerate but defined

    # invariant: ov(lo) > target >= ov(hi)
    while hi / lo > 1.0 + rel_width:
        mid = math.sqrt(lo * hi)
        if ov(mid) <= target_pct:
            hi = mid
        else:
            lo = mid
    return hi


def _currents_ok(rep: TransientReport, constraints: DesignConstraints) -> bool:
    return (
        rep.I_ch_max <= constraints.max_charge_current
        and rep.I_dis_max_abs <= constraints.max_discharge_current
    )


def _worst_current_violation(rep: TransientReport, constraints: DesignConstraints) -> str:
    charge_ratio = rep.I_ch_max / constraints.max_charge_current
    discharge_ratio = rep.I_dis_max_abs / constraints.max_discharge_current
    return "max_charge_current" if charge_ratio >= discharge_ratio else "max_discharge_current"


def select_network(
    spec: CircuitSpec,
    dev: DeviceParams,
    tol: ToleranceSpec,
    constraints: DesignConstraints,
) -> DesignReport:
    """Pick (R_d, C_d, R_s) for the given limits; see the module docstring
    for the walk order. Never raises for an unreachable design: the
    report comes back with feasible=False and the binding constraint
    named, the adjustments log holding the full audit trail."""
    log: list[dict] = []
    target = constraints.max_overvoltage_pct

    def stresses(cd: float, rd: float) -> TransientReport:
        return analyze(spec, dev, BalancingDesign(R_d=rd, C_d=cd, tolerances=tol))

    def log_solve(rd: float, cd: float, note: str | None = None) -> None:
        entry = {"action": "solve_cd", "target_pct": target, "R_d": rd, "C_d": cd}
        if note:
            entry["note"] = note
        log.append(entry)

    def log_check(rd: float, cd: float, rep: TransientReport, ok: bool) -> None:
        log.append(
            {
                "action": "check_currents",
                "R_d": rd,
                "C_d": cd,
                "I_ch_max": rep.I_ch_max,
                "I_dis_max_abs": rep.I_dis_max_abs,
                "V_d_ov": rep.V_d_ov,
                "ok": ok,
            }
        )

    feasible = True
    binding: Optional[str] = None
    accepted: Optional[tuple[float, float, TransientReport]] = None
    last_solved: Optional[tuple[float, float, TransientReport]] = None

    try:
        cd0 = solve_min_cd(spec, dev, tol, target, R_d=0.0)
    except TargetUnreachable as exc:
        log.append({"action": "solve_cd_failed", "target_pct": target, "R_d": 0.0, "reason": str(exc)})
        cd0 = None
        feasible = False
        binding = "max_overvoltage_pct"

    if cd0 is not None:
        log_solve(0.0, cd0)
        rep0 = stresses(cd0, 0.0)
        ok0 = _currents_ok(rep0, constraints)
        log_check(0.0, cd0, rep0, ok0)
        last_solved = (cd0, 0.0, rep0)
        if ok0:
            rd_min = max(constraints.min_damping, 0.0)
            if rd_min == 0.0:
                accepted = (cd0, 0.0, rep0)
            else:
                # keep the overvoltage target honest with the damping
                # resistor actually fitted, so re-solve at R_d = rd_min
                cd1 = solve_min_cd(spec, dev, tol, target, R_d=rd_min)
                log_solve(rd_min, cd1, note="minimum damping resistance applied")
                rep1 = stresses(cd1, rd_min)
                ok1 = _currents_ok(rep1, constraints)
                log_check(rd_min, cd1, rep1, ok1)
                last_solved = (cd1, rd_min, rep1)
                if ok1:
                    accepted = (cd1, rd_min, rep1)

        if accepted is None:
            rd_start = max(constraints.min_damping, 0.0)
            for rd in RD_GRID:
                if rd <= rd_start:
                    continue
                try:
                    cd = solve_min_cd(spec, dev, tol, target, R_d=rd)
                except TargetUnreachable as exc:
                    log.append(
                        {"action": "solve_cd_failed", "target_pct": target, "R_d": rd, "reason": str(exc)}
                    )
                    break
                log_solve(rd, cd, note="raised damping to curb currents")
                rep = stresses(cd, rd)
                ok = _currents_ok(rep, constraints)
                log_check(rd, cd, rep, ok)
                last_solved = (cd, rd, rep)
                if ok:
                    accepted = (cd, rd, rep)
                    break

        if accepted is None:
            # damping alone cannot meet the current limits inside the
            # overvoltage-feasible region: that region's limit is binding
            feasible = False
            binding = _worst_current_violation(last_solved[2], constraints)
            cd_base, rd_cap, rep = last_solved
            cd_k = cd_base
            for _ in range(BACKOFF_STEPS):
                cd_k *= BACKOFF_FACTOR
                rep = stresses(cd_k, rd_cap)
                log.append(
                    {
                        "action": "backoff_cd",
                        "factor": BACKOFF_FACTOR,
                        "R_d": rd_cap,
                        "C_d": cd_k,
                        "V_d_ov": rep.V_d_ov,
                        "I_ch_max": rep.I_ch_max,
                        "I_dis_max_abs": rep.I_dis_max_abs,
                    }
                )
                if _currents_ok(rep, constraints):
                    log.append(
                        {
                            "action": "overvoltage_relaxed",
                            "achieved_pct": rep.V_d_ov,
                            "target_pct": target,
                        }
                    )
                    break
            last_solved = (cd_k, rd_cap, rep)

    if accepted is not None:
        cd, rd, rep = accepted
    elif last_solved is not None:
        cd, rd, rep = last_solved
    else:
        cd = rd = None
        rep = None

    # static resistor from the steady-state voltage limit
    rs: Optional[float] = None
    try:
        rs = static_resistor(spec, dev, tol, constraints.max_steady_voltage)
        log.append({"action": "static_resistor", "V_d1": constraints.max_steady_voltage, "R_s": rs})
    except InfeasibleStatic as exc:
        log.append({"action": "static_resistor_failed", "reason": str(exc)})
        feasible = False
        if binding is None:
            binding = "max_steady_voltage"

    # recovery-charge comparison at the transient voltage limit
    rr: Optional[RRComparison] = None
    v_d1_transient = (1.0 + target / 100.0) * spec.V_s / spec.N
    try:
        cd_rr = reverse_recovery_cd(spec, dev, tol, v_d1_transient)
        rep_rr = stresses(cd_rr, 0.0)
        ratio = cd_rr / cd if cd else math.nan
        rr = RRComparison(C_d_rr=cd_rr, stresses_rr=rep_rr, ratio=ratio)
        log.append({"action": "reverse_recovery", "V_d1": v_d1_transient, "C_d_rr": cd_rr, "ratio": ratio})
    except InfeasibleRR as exc:
        log.append({"action": "reverse_recovery_failed", "reason": str(exc)})

    # snap to purchasable values and re-verify with the snapped parts
    if constraints.snap is not ESeries.NONE and feasible and cd is not None:
        cd_snapped = snap_up(cd, constraints.snap)  # up: conservative for overvoltage
        rs_snapped = snap_down(rs, constraints.snap) if rs is not None and rs > 0 else rs
        log.append(
            {"action": "snap", "series": constraints.snap.value, "C_d": cd_snapped, "R_s": rs_snapped}
        )
        rep_snapped = stresses(cd_snapped, rd)
        ok_ov = rep_snapped.V_d_ov <= target
        ok_cur = _currents_ok(rep_snapped, constraints)
        log.append(
            {
                "action": "verify_post_snap",
                "V_d_ov": rep_snapped.V_d_ov,
                "I_ch_max": rep_snapped.I_ch_max,
                "I_dis_max_abs": rep_snapped.I_dis_max_abs,
                "ok": ok_ov and ok_cur,
            }
        )
        cd, rs, rep = cd_snapped, rs_snapped, rep_snapped
        if rr is not None:
            rr = replace(rr, ratio=rr.C_d_rr / cd)
        if not ok_ov:
            feasible = False
            binding = "max_overvoltage_pct"
        elif not ok_cur:
            feasible = False
            binding = _worst_current_violation(rep_snapped, constraints)

    chosen = None
    if cd is not None:
        chosen = BalancingDesign(R_d=rd, C_d=cd, tolerances=tol, R_s=rs)

    return DesignReport(
        chosen=chosen,
        stresses=rep,
        rr_comparison=rr,
        feasible=feasible,
        binding_constraint=None if feasible else binding,
        adjustments=tuple(log),
    )


def replay_adjustments(
    spec: CircuitSpec,
    dev: DeviceParams,
    tol: ToleranceSpec,
    adjustments: tuple[dict, ...] | list[dict],
) -> Optional[BalancingDesign]:
    """Re-execute the logged decisions; the reconstructed network must
    equal the one originally chosen (the log is a complete audit)."""
    cd: Optional[float] = None
    rd: Optional[float] = None
    rs: Optional[float] = None
    for entry in adjustments:
        action = entry["action"]
        if action == "solve_cd":
            rd = entry["R_d"]
            cd = solve_min_cd(spec, dev, tol, entry["target_pct"], R_d=rd)
        elif action == "backoff_cd":
            rd = entry["R_d"]
            cd = cd * entry["factor"]
        elif action == "static_resistor":
            rs = static_resistor(spec, dev, tol, entry["V_d1"])
        elif action == "snap":
            series = ESeries(entry["series"])
            cd = snap_up(cd, series)
            if rs is not None and rs > 0:
                rs = snap_down(rs, series)
        # check_currents / reverse_recovery / verify entries are informational
    if cd is None or rd is None:
        return None
    return BalancingDesign(R_d=rd, C_d=cd, tolerances=tol, R_s=rs)


def render_text(report: DesignReport, spec: CircuitSpec, dev: DeviceParams) -> str:
    """Human-readable design summary; SI prefixes allowed here."""
    from .units import eng

    lines = []
    lines.append("Balancing network design report")
    lines.append("=" * 34)
    lines.append(f"Bus: {eng(spec.V_s, 'V')}, {spec.N} devices in series, L = {eng(spec.L, 'H')}")
    lines.append(
        f"Device: t_dTol = {eng(dev.t_dTol, 's')}, t_on = {eng(dev.t_on, 's')}"
    )
    lines.append("")
    if report.chosen is not None:
        c = report.chosen
        rs_text = eng(c.R_s, "ohm") if c.R_s is not None else "n/a"
        lines.append(f"Chosen network: C_d = {eng(c.C_d, 'F')}, R_d = {eng(c.R_d, 'ohm')}, R_s = {rs_text}")
    if report.stresses is not None:
        s = report.stresses
        lines.append(
            f"Stresses: V_AK1_max = {eng(s.V_AK1_max, 'V')} ({s.V_d_ov:.1f}% over), "
            f"I_ch_max = {eng(s.I_ch_max, 'A')}, |I_dis_max| = {eng(s.I_dis_max_abs, 'A')}, "
            f"t_on1 = {eng(s.t_on1, 's')}"
        )
    lines.append(f"Feasible: {'yes' if report.feasible else 'no'}")
    if report.binding_constraint:
        lines.append(f"Binding constraint: {report.binding_constraint}")
    if report.rr_comparison is not None:
        rr = report.rr_comparison
        lines.append("")
        lines.append("Recovery-charge sizing comparison:")
        lines.append(
            f"  C_d(rr) = {eng(rr.C_d_rr, 'F')} ({rr.ratio:.1f}x the chosen capacitance)"
        )
        lines.append(
            f"  stresses at C_d(rr): I_ch_max = {eng(rr.stresses_rr.I_ch_max, 'A')}, "
            f"|I_dis_max| = {eng(rr.stresses_rr.I_dis_max_abs, 'A')}"
        )
    lines.append("")
    lines.append("Adjustments:")
    for i, entry in enumerate(report.adjustments, 1):
        lines.append(f"  {i:2d}. {json.dumps(entry)}")
    return "\n".join(lines) + "\n"
