import math

import pytest
from hypothesis import given, strategies as st

from crowbal import (
    BalancingDesign,
    CircuitSpec,
    IntegratorConfig,
    NotUnderdamped,
    ToleranceSpec,
    Waveform,
    Channel,
    effective_capacitance,
    integrate_charging,
    second_order_params,
    validate,
)
from conftest import make_device


def test_validate_table_values_ok(hv_spec, hv_dev, hv_design_40n):
    design = BalancingDesign(R_d=3.0, C_d=40e-9, tolerances=hv_design_40n.tolerances, R_s=2.5e6)
    outcome = validate(hv_spec, hv_dev, design)
    assert outcome.ok
    assert outcome.messages() == []


def test_validate_flags_single_device(hv_dev):
    outcome = validate(CircuitSpec(V_s=12e3, N=1, L=250e-6), hv_dev)
    assert not outcome.ok
    assert any(v.field == "N" and "N >= 2" in v.message for v in outcome.violations)


def test_validate_flags_full_tolerance(hv_spec, hv_dev):
    design = BalancingDesign(R_d=0.0, C_d=40e-9, tolerances=ToleranceSpec(a_c=1.0, a_R=0.05))
    outcome = validate(hv_spec, hv_dev, design)
    assert any(v.field == "a_c" and "(1 - a_c) > 0" in v.message for v in outcome.violations)


def test_validate_is_total_and_collects_everything():
    spec = CircuitSpec(V_s=-5.0, N=0, L=0.0)
    dev = make_device(t_dmax=1e-6, t_dmin=2e-6, t_on=-1.0)
    design = BalancingDesign(R_d=-1.0, C_d=0.0, tolerances=ToleranceSpec(a_c=-0.1, a_R=1.5), R_s=0.0)
    outcome = validate(spec, dev, design)
    flagged = {v.field for v in outcome.violations}
    assert {"V_s", "N", "L", "t_dmax", "t_on", "R_d", "C_d", "R_s", "a_c", "a_R"} <= flagged


def test_second_order_params_undamped(hv_spec, hv_tol):
    design = BalancingDesign(R_d=0.0, C_d=40e-9, tolerances=hv_tol)
    p = second_order_params(hv_spec, design)
    c_eff = effective_capacitance(design)
    assert c_eff == pytest.approx(36e-9)
    assert p.delta == 0.0
    assert p.phi == 0.0
    assert p.omega_d == pytest.approx(1.0 / math.sqrt(hv_spec.L * c_eff), rel=1e-12)
    assert p.omega_d == pytest.approx(3.333e5, rel=1e-3)


def test_undamped_omega_matches_measured_resonance(hv_spec, hv_tol):
    # independent check: measure the oscillation period from the ODE
    # integrator once the drive has saturated (constant forcing)
    design = BalancingDesign(R_d=0.0, C_d=40e-9, tolerances=hv_tol)
    expected = second_order_params(hv_spec, design)
    period = 2.0 * math.pi / expected.omega_d
    dev = make_device(t_dmax=1e-6 + 3.2 * period, t_dmin=0.0, t_on=1e-6)
    wave_i, _ = integrate_charging(hv_spec, dev, design)
    t_1 = dev.t_dmin + dev.t_on
    crossings = []
    for (t_a, y_a), (t_b, y_b) in zip(zip(wave_i.t, wave_i.y), zip(wave_i.t[1:], wave_i.y[1:])):
        if t_a <= t_1 + 0.25 * period:
            continue
        if y_a <= 0.0 < y_b:
            crossings.append(t_a + (t_b - t_a) * (-y_a) / (y_b - y_a))
    assert len(crossings) >= 3
    measured = (crossings[-1] - crossings[0]) / (len(crossings) - 1)
    assert measured == pytest.approx(period, rel=1e-3)


def test_second_order_params_critical_damping_rejected(hv_spec, hv_tol):
    c_d = 40e-9
    c_eff = (1.0 - hv_tol.a_c) * c_d
    r_crit = 2.0 * math.sqrt(hv_spec.L / c_eff)
    with pytest.raises(NotUnderdamped):
        second_order_params(hv_spec, BalancingDesign(R_d=r_crit, C_d=c_d, tolerances=hv_tol))


def test_second_order_params_damped_phase(hv_spec, hv_tol):
    design = BalancingDesign(R_d=3.0, C_d=47e-9, tolerances=hv_tol)
    p = second_order_params(hv_spec, design)
    assert p.delta == pytest.approx(3.0 / (2.0 * 250e-6))  # 6000 1/s
    assert p.phi == pytest.approx(math.atan(p.delta / p.omega_d), rel=1e-15)
    assert 0.0 < p.phi < 0.05


@given(
    r_d=st.floats(min_value=0.0, max_value=30.0),
    c_d=st.floats(min_value=1e-9, max_value=5e-6),
    a_c=st.floats(min_value=0.0, max_value=0.3),
    l_val=st.floats(min_value=5e-5, max_value=1e-3),
)
def test_second_order_identity(r_d, c_d, a_c, l_val):
    # omega_d^2 + delta^2 == 1/(L * C_eff), and R_d = 0 gives exact zeros
    spec = CircuitSpec(V_s=12e3, N=6, L=l_val)
    design = BalancingDesign(R_d=r_d, C_d=c_d, tolerances=ToleranceSpec(a_c=a_c))
    c_eff = effective_capacitance(design)
    try:
        p = second_order_params(spec, design)
    except NotUnderdamped:
        assert 1.0 / (l_val * c_eff) <= (r_d / (2.0 * l_val)) ** 2
        return
    assert p.omega_d > 0.0
    assert 0.0 <= p.phi < math.pi / 2.0
    lhs = p.omega_d**2 + p.delta**2
    assert lhs == pytest.approx(1.0 / (l_val * c_eff), rel=1e-12)
    if r_d == 0.0:
        assert p.delta == 0.0
        assert p.phi == 0.0


def test_waveform_rejects_bad_shapes():
    with pytest.raises(ValueError):
        Waveform(t=(0.0, 1.0), y=(1.0,), channel=Channel.I_CH)
    with pytest.raises(ValueError):
        Waveform(t=(0.0, 1.0, 1.0), y=(1.0, 2.0, 3.0), channel=Channel.I_CH)


def test_waveform_single_sample_allowed():
    w = Waveform(t=(0.0,), y=(5.0,), channel=Channel.V_AK1)
    assert len(w) == 1
    assert w.max_magnitude() == 5.0
