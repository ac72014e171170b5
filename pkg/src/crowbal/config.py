"""Strict JSON configuration for the CLI.

One format, one schema: plain numbers in SI base units, unknown keys
rejected. Blocks mirror the domain types one-to-one.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from .errors import ConfigError, EmptyGrid
from .eseries import ESeries
from .params import BalancingDesign, CircuitSpec, DeviceParams, ToleranceSpec
from .selector import DesignConstraints
from .sweep import SweepGrid

_TOP_KEYS = {"circuit", "device", "tolerances", "design", "constraints", "sweep"}
_CIRCUIT_KEYS = {"V_s", "N", "L"}
_DEVICE_KEYS = {
    "t_dmax", "t_dmin", "t_on", "I_Dmax", "I_Dmin",
    "V_Ddc", "I_Trms", "I_TSM", "Q_max", "Q_min",
}
_TOL_KEYS = {"a_c", "a_R"}
_DESIGN_REQUIRED = {"R_d", "C_d"}
_DESIGN_OPTIONAL = {"R_s"}
_CONSTRAINT_REQUIRED = {
    "max_overvoltage_pct", "max_charge_current", "max_discharge_current", "max_steady_voltage",
}
_CONSTRAINT_OPTIONAL = {"snap", "min_damping"}
_SWEEP_REQUIRED = {"cd_axis"}
_SWEEP_OPTIONAL = {"rd_values", "tdtol_values", "ton_values", "l_values"}

_SNAP_NAMES = {"none": ESeries.NONE, "e12": ESeries.E12, "e24": ESeries.E24}


@dataclass(frozen=True)
class Config:
    circuit: CircuitSpec
    device: DeviceParams
    tolerances: ToleranceSpec
    design: Optional[BalancingDesign]
    constraints: Optional[DesignConstraints]
    sweep: Optional[SweepGrid]


def _expect_mapping(doc: Any, name: str) -> dict:
    if not isinstance(doc, dict):
        raise ConfigError(f"{name} must be a JSON object")
    return doc


def _check_keys(block: dict, name: str, required: set, optional: set = frozenset()) -> None:
    unknown = set(block) - required - optional
    if unknown:
        raise ConfigError(f"{name}: unknown keys {sorted(unknown)}")
    missing = required - set(block)
    if missing:
        raise ConfigError(f"{name}: missing keys {sorted(missing)}")


def _number(block: dict, name: str, key: str) -> float:
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name}.{key} must be a number, got {value!r}")
    return float(value)


def _integer(block: dict, name: str, key: str) -> int:
    value = block[key]
    if isinstance(value, bool):
        raise ConfigError(f"{name}.{key} must be an integer, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    raise ConfigError(f"{name}.{key} must be an integer, got {value!r}")


def _number_list(block: dict, name: str, key: str) -> tuple[float, ...]:
    value = block[key]
    if not isinstance(value, list):
        raise ConfigError(f"{name}.{key} must be a list of numbers")
    out = []
    for item in value:
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ConfigError(f"{name}.{key} must contain only numbers, got {item!r}")
        out.append(float(item))
    return tuple(out)


def parse_config(doc: Any) -> Config:
    doc = _expect_mapping(doc, "config")
    _check_keys(doc, "config", {"circuit", "device", "tolerances"}, _TOP_KEYS)

    circuit_block = _expect_mapping(doc["circuit"], "circuit")
    _check_keys(circuit_block, "circuit", _CIRCUIT_KEYS)
    circuit = CircuitSpec(
        V_s=_number(circuit_block, "circuit", "V_s"),
        N=_integer(circuit_block, "circuit", "N"),
        L=_number(circuit_block, "circuit", "L"),
    )

    device_block = _expect_mapping(doc["device"], "device")
    _check_keys(device_block, "device", _DEVICE_KEYS)
    device = DeviceParams(**{k: _number(device_block, "device", k) for k in _DEVICE_KEYS})

    tol_block = _expect_mapping(doc["tolerances"], "tolerances")
    _check_keys(tol_block, "tolerances", _TOL_KEYS)
    tolerances = ToleranceSpec(
        a_c=_number(tol_block, "tolerances", "a_c"),
        a_R=_number(tol_block, "tolerances", "a_R"),
    )

    design = None
    if "design" in doc:
        block = _expect_mapping(doc["design"], "design")
        _check_keys(block, "design", _DESIGN_REQUIRED, _DESIGN_OPTIONAL)
        design = BalancingDesign(
            R_d=_number(block, "design", "R_d"),
            C_d=_number(block, "design", "C_d"),
            tolerances=tolerances,
            R_s=_number(block, "design", "R_s") if "R_s" in block else None,
        )

    constraints = None
    if "constraints" in doc:
        block = _expect_mapping(doc["constraints"], "constraints")
        _check_keys(block, "constraints", _CONSTRAINT_REQUIRED, _CONSTRAINT_OPTIONAL)
        snap = ESeries.NONE
        if "snap" in block:
            raw = block["snap"]
            if not isinstance(raw, str) or raw.lower() not in _SNAP_NAMES:
                raise ConfigError(f"constraints.snap must be one of none/E12/E24, got {raw!r}")
            snap = _SNAP_NAMES[raw.lower()]
        min_damping = 3.0
        if "min_damping" in block:
            min_damping = _number(block, "constraints", "min_damping")
            if min_damping < 0:
                raise ConfigError("constraints.min_damping must be >= 0")
        constraints = DesignConstraints(
            max_overvoltage_pct=_number(block, "constraints", "max_overvoltage_pct"),
            max_charge_current=_number(block, "constraints", "max_charge_current"),
            max_discharge_current=_number(block, "constraints", "max_discharge_current"),
            max_steady_voltage=_number(block, "constraints", "max_steady_voltage"),
            snap=snap,
            min_damping=min_damping,
        )

    grid = None
    if "sweep" in doc:
        block = _expect_mapping(doc["sweep"], "sweep")
        _check_keys(block, "sweep", _SWEEP_REQUIRED, _SWEEP_OPTIONAL)
        cd_axis = _number_list(block, "sweep", "cd_axis")
        rd_values = _number_list(block, "sweep", "rd_values") if "rd_values" in block else (0.0,)
        tdtol_values = (
            _number_list(block, "sweep", "tdtol_values")
            if "tdtol_values" in block
            else (device.t_dTol,)
        )
        ton_values = (
            _number_list(block, "sweep", "ton_values") if "ton_values" in block else (device.t_on,)
        )
        l_values = _number_list(block, "sweep", "l_values") if "l_values" in block else (circuit.L,)
        try:
            grid = SweepGrid(
                cd_axis=cd_axis,
                rd_values=rd_values,
                tdtol_values=tdtol_values,
                ton_values=ton_values,
                l_values=l_values,
                base=(circuit, device, tolerances),
            )
        except (EmptyGrid, ValueError) as exc:
            raise ConfigError(f"sweep: {exc}") from exc

    return Config(
        circuit=circuit,
        device=device,
        tolerances=tolerances,
        design=design,
        constraints=constraints,
        sweep=grid,
    )


def load_config(path: Path | str) -> Config:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(doc)
