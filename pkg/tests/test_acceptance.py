"""Acceptance gate: every exit criterion at its stated tolerance.

Each test prints one PASS/FAIL line so the gate can be read off the
pytest -s output directly. Tolerances are pinned here, not configurable.
"""
import functools
import json
import math
import random
import time
from dataclasses import replace

import pytest

from crowbal import (
    BalancingDesign,
    CircuitSpec,
    DesignConstraints,
    ESeries,
    IntegratorConfig,
    NotUnderdamped,
    SweepGrid,
    ToleranceSpec,
    analyze,
    charging_current,
    conduction_reach_time,
    default_cd_axis,
    discharge_current,
    effective_capacitance,
    export_csv,
    integrate_charging,
    integrate_discharge,
    peak_charging,
    replay_adjustments,
    run_sweep,
    select_network,
    solve_min_cd,
    supnorm_error,
    vak1,
)
from crowbal.cli import main
from conftest import make_device


def criterion(number, title):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"ACCEPTANCE {number} FAIL: {title}")
                raise
            print(f"ACCEPTANCE {number} PASS: {title}")

        return wrapper

    return deco


HV_SPEC = CircuitSpec(V_s=12e3, N=6, L=250e-6)
HV_TOL = ToleranceSpec(a_c=0.1, a_R=0.05)
HV_DEV = make_device(t_dmax=3e-6, t_dmin=0.0, t_on=5e-6)


@criterion(1, "worked design replication (min C_d, stresses at 40 nF)")
def test_criterion_1_worked_design():
    start = time.perf_counter()
    cd = solve_min_cd(HV_SPEC, HV_DEV, HV_TOL, 50.0, R_d=0.0)
    assert 38e-9 <= cd <= 42e-9

    rep = analyze(HV_SPEC, HV_DEV, BalancingDesign(R_d=0.0, C_d=40e-9, tolerances=HV_TOL))
    assert rep.I_ch_max == pytest.approx(33.0, rel=0.10)
    assert rep.I_dis_max_abs == pytest.approx(15.0, rel=0.10)
    assert rep.V_AK1_max == pytest.approx(3000.0, rel=0.02)
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"criterion 1 took {elapsed:.3f} s"


@criterion(2, "static resistor at 2.7 kV steady-state limit")
def test_criterion_2_static_resistor():
    from crowbal import static_resistor

    assert static_resistor(HV_SPEC, HV_DEV, HV_TOL, 2.7e3) == pytest.approx(2.5e6, rel=0.02)


@criterion(3, "recovery-charge comparison (size, stresses, ratio)")
def test_criterion_3_recovery_charge():
    from crowbal import reverse_recovery_cd

    cd_rr = reverse_recovery_cd(HV_SPEC, HV_DEV, HV_TOL, 3e3)
    assert cd_rr == pytest.approx(2.25e-6, rel=0.02)

    rep = analyze(HV_SPEC, HV_DEV, BalancingDesign(R_d=0.0, C_d=cd_rr, tolerances=HV_TOL))
    assert rep.I_ch_max == pytest.approx(36.0, rel=0.10)
    assert rep.I_dis_max_abs == pytest.approx(810.0, rel=0.10)

    cd_delay = solve_min_cd(HV_SPEC, HV_DEV, HV_TOL, 50.0, R_d=0.0)
    assert cd_rr / cd_delay == pytest.approx(56.0, rel=0.10)


@criterion(4, "low-voltage experiment cross-check (480 V stack)")
def test_criterion_4_experiment():
    spec = CircuitSpec(V_s=480.0, N=6, L=250e-6)
    design = BalancingDesign(R_d=3.0, C_d=47e-9, tolerances=HV_TOL)

    rep_24 = analyze(spec, make_device(t_dmax=2.4e-6, t_dmin=0.0, t_on=3e-6), design)
    assert rep_24.V_AK1_max == pytest.approx(112.6, rel=0.05)

    rep_08 = analyze(spec, make_device(t_dmax=0.8e-6, t_dmin=0.0, t_on=3e-6), design)
    assert rep_08.V_AK1_max == pytest.approx(82.0, rel=0.05)
    assert rep_08.I_ch_max == pytest.approx(0.18, rel=0.15)
    assert rep_08.I_dis_max_abs == pytest.approx(1.14, rel=0.15)


def _random_fixture(rng):
    """One valid underdamped sample point spanning 3 decades of C_d and
    the full damping-resistor range."""
    c_d = 4e-9 * 10.0 ** (rng.random() * 3.0)
    a_c = rng.uniform(0.0, 0.2)
    t_on = rng.uniform(1.5e-6, 10e-6)
    t_dtol = t_on * rng.uniform(0.2, 2.2)  # both regimes
    t_dmin = rng.choice([0.0, rng.uniform(0.0, 1e-6)])
    if rng.random() < 0.05:
        r_d = 0.0
    else:
        r_d = 0.3 * (30.0 / 0.3) ** rng.random()  # log-uniform in [0.3, 30]
    c_eff = (1.0 - a_c) * c_d
    r_limit = 2.0 * math.sqrt(250e-6 / c_eff)
    if r_d >= 0.9 * r_limit:
        r_d = 0.9 * r_limit
    dev = make_device(t_dmax=t_dmin + t_dtol, t_dmin=t_dmin, t_on=t_on)
    design = BalancingDesign(R_d=r_d, C_d=c_d, tolerances=ToleranceSpec(a_c=a_c, a_R=0.05))
    return dev, design


@criterion(5, "oracle equivalence over randomized fixtures, 4th-order convergence")
def test_criterion_5_oracle_equivalence():
    start = time.perf_counter()
    rng = random.Random(20260809)
    worst = {"i_ch": 0.0, "v_AK1": 0.0, "i_dis": 0.0}
    n_fixtures = 500
    for _ in range(n_fixtures):
        dev, design = _random_fixture(rng)
        wave_i, wave_v = integrate_charging(HV_SPEC, dev, design)
        err_i = supnorm_error(wave_i, lambda t: charging_current(t, HV_SPEC, dev, design))
        err_v = supnorm_error(wave_v, lambda t: vak1(t, HV_SPEC, dev, design))

        init = charging_current(dev.t_dmax, HV_SPEC, dev, design)
        t_on1 = conduction_reach_time(HV_SPEC, dev, vak1(dev.t_dmax, HV_SPEC, dev, design))
        cfg = IntegratorConfig(t_end=dev.t_dmax + 1.2 * (t_on1 - dev.t_dmax))
        wave_d = integrate_discharge(HV_SPEC, dev, design, init, cfg)
        err_d = supnorm_error(
            wave_d, lambda t: discharge_current(t, HV_SPEC, dev, design, init=init)
        )

        worst["i_ch"] = max(worst["i_ch"], err_i)
        worst["v_AK1"] = max(worst["v_AK1"], err_v)
        worst["i_dis"] = max(worst["i_dis"], err_d)
    assert worst["i_ch"] < 1e-3, worst
    assert worst["v_AK1"] < 1e-3, worst
    assert worst["i_dis"] < 1e-3, worst

    # halving dt must shrink the error consistent with a 4th-order method
    for t_dmax, c_d, r_d in ((3e-6, 47e-9, 3.0), (8e-6, 60e-9, 5.0), (3e-6, 40e-9, 0.0)):
        dev = make_device(t_dmax=t_dmax, t_dmin=0.0, t_on=5e-6)
        design = BalancingDesign(R_d=r_d, C_d=c_d, tolerances=HV_TOL)
        from crowbal import second_order_params

        period = 2.0 * math.pi / second_order_params(HV_SPEC, design).omega_d

        def err_at(dt):
            wave_i, _ = integrate_charging(HV_SPEC, dev, design, IntegratorConfig(dt=dt))
            return supnorm_error(wave_i, lambda t: charging_current(t, HV_SPEC, dev, design))

        e_coarse = err_at(period / 205.0)
        e_fine = err_at(period / 410.0)
        assert e_fine < e_coarse / 8.0, (e_coarse, e_fine)

    elapsed = time.perf_counter() - start
    print(f"  (criterion 5: worst errors {worst}, {elapsed:.1f} s)")
    assert elapsed < 60.0, f"criterion 5 took {elapsed:.1f} s"


@criterion(6, "trivial limits (no mismatch, initial conditions, continuity, fixed point)")
def test_criterion_6_trivial_limits():
    # no delay mismatch: no transient at all, exactly
    dev0 = make_device(t_dmax=0.0, t_dmin=0.0)
    design = BalancingDesign(R_d=3.0, C_d=47e-9, tolerances=HV_TOL)
    i_pk, v_pk = peak_charging(HV_SPEC, dev0, design)
    assert i_pk == 0.0
    assert v_pk == HV_SPEC.V_s / HV_SPEC.N

    # zero charging current at the fast devices' firing instant, any R_d
    for r_d in (0.0, 0.5, 3.0, 10.0, 30.0):
        d = BalancingDesign(R_d=r_d, C_d=47e-9, tolerances=HV_TOL)
        assert charging_current(0.0, HV_SPEC, HV_DEV, d) == 0.0

    # continuation continuity at the drive-saturation instant
    rng = random.Random(7)
    checked = 0
    while checked < 40:
        t_on = rng.uniform(1e-6, 6e-6)
        dev = make_device(t_dmax=t_on * rng.uniform(1.05, 3.0), t_dmin=0.0, t_on=t_on)
        d = BalancingDesign(
            R_d=rng.uniform(0.0, 20.0),
            C_d=rng.uniform(10e-9, 300e-9),
            tolerances=ToleranceSpec(a_c=rng.uniform(0.0, 0.2)),
        )
        try:
            i_mid = charging_current(dev.t_on, HV_SPEC, dev, d)
        except NotUnderdamped:
            continue
        t_right = math.nextafter(dev.t_on, dev.t_dmax)
        i_right = charging_current(t_right, HV_SPEC, dev, d)
        v_mid = vak1(dev.t_on, HV_SPEC, dev, d)
        v_right = vak1(t_right, HV_SPEC, dev, d)
        assert abs(i_right - i_mid) <= 1e-9 * max(abs(i_mid), 1e-12)
        assert abs(v_right - v_mid) <= 1e-9 * abs(v_mid)
        checked += 1

    # the discharge equation's equilibrium is held by the integrator
    c_eff = effective_capacitance(design)
    forced = HV_SPEC.V_s * c_eff / (HV_SPEC.N * HV_DEV.t_on)
    wave = integrate_discharge(
        HV_SPEC, HV_DEV, design, -forced, IntegratorConfig(t_end=HV_DEV.t_dmax + 5e-6)
    )
    assert all(abs(y + forced) <= 1e-9 * forced for y in wave.y)


@criterion(7, "design-curve trends and current-ratio behavior")
def test_criterion_7_trends():
    base = (HV_SPEC, HV_DEV, HV_TOL)
    grid = SweepGrid(
        cd_axis=default_cd_axis(),
        rd_values=(0.0, 15.0, 30.0),
        tdtol_values=(1e-6, 2e-6, 3e-6),
        ton_values=(5e-6,),
        l_values=(250e-6,),
        base=base,
    )
    rows = [r for r in run_sweep(grid).rows if not r.skipped]
    eps = 1.0 + 1e-9

    def series(**fixed):
        picked = [r for r in rows if all(getattr(r, k) == v for k, v in fixed.items())]
        return sorted(picked, key=lambda r: r.C_d)

    for rd in (0.0, 15.0, 30.0):
        for tdtol in (1e-6, 2e-6, 3e-6):
            s = series(R_d=rd, t_dTol=tdtol)
            assert len(s) == 64
            for a, b in zip(s, s[1:]):
                assert b.V_d_ov <= a.V_d_ov * eps  # falls with capacitance

    cds = sorted({r.C_d for r in rows})
    probes = (cds[0], cds[len(cds) // 2], cds[-1])
    for cd in probes:
        for rd in (0.0, 15.0, 30.0):
            by_tol = sorted((r for r in rows if r.C_d == cd and r.R_d == rd), key=lambda r: r.t_dTol)
            for a, b in zip(by_tol, by_tol[1:]):
                assert b.V_d_ov * eps >= a.V_d_ov  # grows with mismatch
        for tdtol in (1e-6, 3e-6):
            by_rd = sorted((r for r in rows if r.C_d == cd and r.t_dTol == tdtol), key=lambda r: r.R_d)
            for a, b in zip(by_rd, by_rd[1:]):
                assert b.V_d_ov * eps >= a.V_d_ov  # grows with damping

    # inductance sweep: voltage and charging stress fall as L grows
    grid_l = SweepGrid(
        cd_axis=default_cd_axis(16),
        rd_values=(5.0,),
        tdtol_values=(1e-6, 3e-6),
        ton_values=(5e-6,),
        l_values=(100e-6, 250e-6, 500e-6),
        base=base,
    )
    rows_l = [r for r in run_sweep(grid_l).rows if not r.skipped]
    for cd in {r.C_d for r in rows_l}:
        for tdtol in (1e-6, 3e-6):
            by_l = sorted(
                (r for r in rows_l if r.C_d == cd and r.t_dTol == tdtol), key=lambda r: r.L
            )
            for a, b in zip(by_l, by_l[1:]):
                assert b.V_d_ov <= a.V_d_ov * eps

    # fall-time sweep: every stress rises as t_on shrinks; the
    # charge/discharge ratio is nearly independent of t_on and exceeds
    # one at small capacitance
    grid_t = SweepGrid(
        cd_axis=default_cd_axis(16),
        rd_values=(5.0,),
        tdtol_values=(1e-6, 2e-6, 3e-6),
        ton_values=(5e-6, 7.5e-6, 10e-6),
        l_values=(250e-6,),
        base=base,
    )
    rows_t = [r for r in run_sweep(grid_t).rows if not r.skipped]
    for cd in {r.C_d for r in rows_t}:
        for tdtol in (1e-6, 2e-6, 3e-6):
            by_ton = sorted(
                (r for r in rows_t if r.C_d == cd and r.t_dTol == tdtol), key=lambda r: r.t_on
            )
            for a, b in zip(by_ton, by_ton[1:]):
                assert a.V_d_ov * eps >= b.V_d_ov
                assert a.I_ch_max * eps >= b.I_ch_max
                assert abs(a.I_dis_max) * eps >= abs(b.I_dis_max)
            ratios = [r.I_ratio for r in rows_t if r.C_d == cd and r.t_dTol == tdtol]
            for x in ratios:
                for y in ratios:
                    assert abs(x - y) / y < 0.10

    small_cd = sorted({r.C_d for r in rows_t})[0]
    assert small_cd == pytest.approx(5e-9)
    for r in rows_t:
        if r.C_d == small_cd:
            assert r.I_ratio > 1.0


@criterion(8, "determinism: byte-identical sweeps, replayable design log")
def test_criterion_8_determinism(tmp_path):
    doc = {
        "circuit": {"V_s": 12e3, "N": 6, "L": 250e-6},
        "device": {
            "t_dmax": 3e-6, "t_dmin": 0.0, "t_on": 5e-6,
            "I_Dmax": 350e-6, "I_Dmin": 100e-6, "V_Ddc": 3.3e3,
            "I_Trms": 550.0, "I_TSM": 4500.0, "Q_max": 2300e-6, "Q_min": 1000e-6,
        },
        "tolerances": {"a_c": 0.1, "a_R": 0.05},
        "sweep": {
            "cd_axis": list(default_cd_axis(32)),
            "rd_values": [0.0, 15.0, 30.0],
            "tdtol_values": [1e-6, 3e-6],
        },
    }
    cfg_path = tmp_path / "sweep.json"
    cfg_path.write_text(json.dumps(doc))
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["sweep", "--config", str(cfg_path), "--out", str(out_a), "--no-plot"]) == 0
    assert main(["sweep", "--config", str(cfg_path), "--out", str(out_b), "--no-plot"]) == 0
    assert (out_a / "sweep.csv").read_bytes() == (out_b / "sweep.csv").read_bytes()
    assert (out_a / "sweep_manifest.json").read_bytes() == (out_b / "sweep_manifest.json").read_bytes()

    for snap in (ESeries.NONE, ESeries.E12):
        constraints = DesignConstraints(
            max_overvoltage_pct=50.0,
            max_charge_current=100.0,
            max_discharge_current=100.0,
            max_steady_voltage=2.7e3,
            snap=snap,
        )
        report = select_network(HV_SPEC, HV_DEV, HV_TOL, constraints)
        rebuilt = replay_adjustments(HV_SPEC, HV_DEV, HV_TOL, report.adjustments)
        assert rebuilt == report.chosen
