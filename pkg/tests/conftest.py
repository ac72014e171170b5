import pytest

from crowbal import BalancingDesign, CircuitSpec, DeviceParams, ToleranceSpec


def make_device(t_dmax=3e-6, t_dmin=0.0, t_on=5e-6):
    """Datasheet values of the 12 kV crowbar's thyristor, with the timing
    fields overridable per test."""
    return DeviceParams(
        t_dmax=t_dmax,
        t_dmin=t_dmin,
        t_on=t_on,
        I_Dmax=350e-6,
        I_Dmin=100e-6,
        V_Ddc=3.3e3,
        I_Trms=550.0,
        I_TSM=4500.0,
        Q_max=2300e-6,
        Q_min=1000e-6,
    )


@pytest.fixture
def hv_spec():
    return CircuitSpec(V_s=12e3, N=6, L=250e-6)


@pytest.fixture
def hv_dev():
    return make_device()


@pytest.fixture
def hv_tol():
    return ToleranceSpec(a_c=0.1, a_R=0.05)


@pytest.fixture
def hv_design_40n(hv_tol):
    return BalancingDesign(R_d=0.0, C_d=40e-9, tolerances=hv_tol)


@pytest.fixture
def lab_spec():
    """The low-voltage bench setup: same stack driven at 480 V."""
    return CircuitSpec(V_s=480.0, N=6, L=250e-6)


def lab_device(t_dtol):
    return make_device(t_dmax=t_dtol, t_dmin=0.0, t_on=3e-6)


@pytest.fixture
def lab_design(hv_tol):
    return BalancingDesign(R_d=3.0, C_d=47e-9, tolerances=hv_tol)
