"""crowbal: voltage-balancing network design for series-thyristor crowbars.

Models the turn-on transient of the slowest device in a series string,
sizes the dynamic (R_d, C_d) and static (R_s) balancing networks against
worst-case delay mismatch and component tolerances, and cross-checks
every closed form against an independent fixed-step ODE integrator.
"""

from .errors import (
    BalancingError,
    ConfigError,
    DomainError,
    EmptyGrid,
    InfeasibleRR,
    InfeasibleStatic,
    NotUnderdamped,
    StepTooLarge,
    TargetUnreachable,
)
from .eseries import ESeries, snap_down, snap_up
from .oracle import (
    IntegratorConfig,
    Method,
    integrate_charging,
    integrate_discharge,
    supnorm_error,
)
from .params import (
    BalancingDesign,
    Channel,
    CircuitSpec,
    DeviceParams,
    Regime,
    SecondOrderParams,
    ToleranceSpec,
    TransientReport,
    ValidationOutcome,
    Violation,
    Waveform,
    effective_capacitance,
    regime_for,
    second_order_params,
    validate,
    write_waveform_csv,
)
from .selector import (
    DesignConstraints,
    DesignReport,
    RRComparison,
    replay_adjustments,
    select_network,
    solve_min_cd,
)
from .sweep import SweepGrid, SweepResult, SweepRow, default_cd_axis, export_csv, run_sweep
from .transients import (
    Regime2Constants,
    analyze,
    charging_current,
    conduction_reach_time,
    discharge_current,
    drive_voltage,
    first_device_turnon_time,
    overvoltage_percent,
    peak_charging,
    peak_discharge,
    regime2_constants,
    reverse_recovery_cd,
    sample_waveforms,
    static_resistor,
    vak1,
)

__version__ = "0.1.0"

__all__ = [
    "BalancingDesign",
    "BalancingError",
    "Channel",
    "CircuitSpec",
    "ConfigError",
    "DesignConstraints",
    "DesignReport",
    "DeviceParams",
    "DomainError",
    "ESeries",
    "EmptyGrid",
    "InfeasibleRR",
    "InfeasibleStatic",
    "IntegratorConfig",
    "Method",
    "NotUnderdamped",
    "Regime",
    "Regime2Constants",
    "RRComparison",
    "SecondOrderParams",
    "StepTooLarge",
    "SweepGrid",
    "SweepResult",
    "SweepRow",
    "TargetUnreachable",
    "ToleranceSpec",
    "TransientReport",
    "ValidationOutcome",
    "Violation",
    "Waveform",
    "analyze",
    "charging_current",
    "conduction_reach_time",
    "default_cd_axis",
    "discharge_current",
    "drive_voltage",
    "effective_capacitance",
    "export_csv",
    "first_device_turnon_time",
    "integrate_charging",
    "integrate_discharge",
    "overvoltage_percent",
    "peak_charging",
    "peak_discharge",
    "regime2_constants",
    "regime_for",
    "replay_adjustments",
    "reverse_recovery_cd",
    "run_sweep",
    "sample_waveforms",
    "second_order_params",
    "select_network",
    "snap_down",
    "snap_up",
    "solve_min_cd",
    "static_resistor",
    "supnorm_error",
    "vak1",
    "validate",
    "write_waveform_csv",
]
