"""Command-line front end.

Subcommands: analyze, sweep, design, compare-rr, verify. Machine output
goes to files under --out; diagnostics go to stderr. Exit codes:
0 success, 2 invalid input, 3 infeasible design, 4 verification failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional

from .config import Config, load_config
from .errors import (
    ConfigError,
    DomainError,
    EmptyGrid,
    InfeasibleRR,
    NotUnderdamped,
    StepTooLarge,
    TargetUnreachable,
)
from .eseries import ESeries
from .oracle import IntegratorConfig, integrate_charging, integrate_discharge, supnorm_error
from .params import Channel, validate, write_waveform_csv
from .selector import select_network, solve_min_cd
from .sweep import export_csv, run_sweep, write_manifest
from .transients import (
    analyze,
    charging_current,
    conduction_reach_time,
    discharge_current,
    overvoltage_percent,
    reverse_recovery_cd,
    sample_waveforms,
    vak1,
)
from .units import eng

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_VERIFY_FAILED = 4

VERIFY_THRESHOLD = 1e-3

_SNAP_FLAG = {"none": ESeries.NONE, "e12": ESeries.E12, "e24": ESeries.E24}


def _err(message: str) -> None:
    print(message, file=sys.stderr)


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crowbal",
        description="Voltage-balancing network design for series-thyristor crowbars",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, plot: bool = False) -> None:
        p.add_argument("--config", required=True, help="JSON config path (SI base units)")
        p.add_argument("--out", required=True, help="output directory; all files land here")
        if plot:
            p.add_argument(
                "--no-plot", action="store_true", help="skip rendering figures next to the data files"
            )

    p_analyze = sub.add_parser("analyze", help="peak stresses and waveforms of a given design")
    common(p_analyze, plot=True)

    p_sweep = sub.add_parser("sweep", help="tabulate stresses over a parameter grid")
    common(p_sweep, plot=True)

    p_design = sub.add_parser("design", help="select R_d, C_d and R_s against constraints")
    common(p_design, plot=True)
    p_design.add_argument(
        "--snap", choices=sorted(_SNAP_FLAG), help="override the E-series snapping from the config"
    )

    p_rr = sub.add_parser("compare-rr", help="recovery-charge sizing comparison")
    common(p_rr)

    p_verify = sub.add_parser("verify", help="cross-check closed forms against the ODE integrator")
    common(p_verify)
    p_verify.add_argument("--dt", type=float, help="integrator step override, seconds")

    return parser


def _write_json(doc: dict, path: Path) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _transient_text(cfg: Config, report) -> str:
    spec = cfg.circuit
    lines = [
        "Transient stress report",
        "=" * 23,
        f"Bus: {eng(spec.V_s, 'V')}, {spec.N} devices, L = {eng(spec.L, 'H')}",
        f"Design: C_d = {eng(cfg.design.C_d, 'F')}, R_d = {eng(cfg.design.R_d, 'ohm')}",
        f"Regime: {report.regime.value} (t_dTol = {eng(cfg.device.t_dTol, 's')}, t_on = {eng(cfg.device.t_on, 's')})",
        f"V_AK1_max = {eng(report.V_AK1_max, 'V')} ({report.V_d_ov:.2f}% over the static share)",
        f"I_ch_max = {eng(report.I_ch_max, 'A')}",
        f"I_dis_max = {eng(report.I_dis_max, 'A')} (magnitude {eng(report.I_dis_max_abs, 'A')})",
        f"t_on1 = {eng(report.t_on1, 's')}",
    ]
    return "\n".join(lines) + "\n"


def cmd_analyze(cfg: Config, out_dir: Path, plot: bool) -> int:
    if cfg.design is None:
        _err("analyze: config is missing the design block")
        return EXIT_INVALID
    try:
        waves, report = sample_waveforms(cfg.circuit, cfg.device, cfg.design)
    except NotUnderdamped as exc:
        _err(f"analyze: {exc}")
        return EXIT_INVALID

    with open(out_dir / "report.txt", "w") as fh:
        fh.write(_transient_text(cfg, report))
    _write_json(report.to_dict(), out_dir / "report.json")
    for channel, wave in waves.items():
        write_waveform_csv(wave, out_dir / f"waveform_{channel.value}.csv")
    if plot:
        from . import figures

        figures.plot_transients(waves, out_dir / "transients.png")
    _note(f"analyze: report and waveforms written to {out_dir}")
    return EXIT_OK


def cmd_sweep(cfg: Config, out_dir: Path, plot: bool) -> int:
    if cfg.sweep is None:
        _err("sweep: config is missing the sweep block")
        return EXIT_INVALID
    try:
        result = run_sweep(cfg.sweep)
    except EmptyGrid as exc:
        _err(f"sweep: {exc}")
        return EXIT_INVALID
    export_csv(result, out_dir / "sweep.csv")
    write_manifest(cfg.sweep, out_dir / "sweep_manifest.json")
    if plot:
        from . import figures

        figures.plot_sweep(result, out_dir)
    skipped = sum(1 for r in result.rows if r.skipped)
    _note(f"sweep: {len(result.rows)} rows ({skipped} skipped) written to {out_dir}")
    return EXIT_OK


def cmd_design(cfg: Config, out_dir: Path, plot: bool, snap_flag: Optional[str]) -> int:
    if cfg.constraints is None:
        _err("design: config is missing the constraints block")
        return EXIT_INVALID
    constraints = cfg.constraints
    if snap_flag is not None:
        constraints = replace(constraints, snap=_SNAP_FLAG[snap_flag])

    report = select_network(cfg.circuit, cfg.device, cfg.tolerances, constraints)

    from .selector import render_text

    with open(out_dir / "design_report.txt", "w") as fh:
        fh.write(render_text(report, cfg.circuit, cfg.device))
    _write_json(report.to_dict(), out_dir / "design_report.json")

    if plot and report.chosen is not None:
        try:
            waves, _ = sample_waveforms(cfg.circuit, cfg.device, report.chosen)
        except NotUnderdamped:
            waves = None
        if waves:
            from . import figures

            figures.plot_transients(waves, out_dir / "design_transients.png")

    if not report.feasible:
        _err(f"design: infeasible, binding constraint: {report.binding_constraint}")
        return EXIT_INFEASIBLE
    _note(f"design: report written to {out_dir}")
    return EXIT_OK


def cmd_compare_rr(cfg: Config, out_dir: Path) -> int:
    if cfg.constraints is None:
        _err("compare-rr: config is missing the constraints block")
        return EXIT_INVALID
    spec, dev, tol = cfg.circuit, cfg.device, cfg.tolerances
    target = cfg.constraints.max_overvoltage_pct
    v_d1 = (1.0 + target / 100.0) * spec.V_s / spec.N
    try:
        cd_rr = reverse_recovery_cd(spec, dev, tol, v_d1)
    except InfeasibleRR as exc:
        _err(f"compare-rr: {exc}")
        return EXIT_INFEASIBLE
    from .params import BalancingDesign

    stresses_rr = analyze(spec, dev, BalancingDesign(R_d=0.0, C_d=cd_rr, tolerances=tol))
    if cfg.design is not None:
        cd_base = cfg.design.C_d
        base_origin = "config design block"
    else:
        try:
            cd_base = solve_min_cd(spec, dev, tol, target, R_d=0.0)
        except TargetUnreachable as exc:
            _err(f"compare-rr: {exc}")
            return EXIT_INFEASIBLE
        base_origin = "minimum capacitance for the overvoltage target at R_d=0"
    doc = {
        "V_d1": v_d1,
        "C_d_rr": cd_rr,
        "C_d_base": cd_base,
        "base_origin": base_origin,
        "ratio": cd_rr / cd_base,
        "stresses_rr": stresses_rr.to_dict(),
    }
    _write_json(doc, out_dir / "compare_rr.json")
    with open(out_dir / "compare_rr.txt", "w") as fh:
        fh.write(
            "Recovery-charge sizing comparison\n"
            "=================================\n"
            f"C_d by recovery charge: {eng(cd_rr, 'F')}\n"
            f"C_d by turn-on delay:   {eng(cd_base, 'F')} ({base_origin})\n"
            f"Size ratio:             {cd_rr / cd_base:.1f}x\n"
            f"Stresses at C_d(rr):    I_ch_max = {eng(stresses_rr.I_ch_max, 'A')}, "
            f"|I_dis_max| = {eng(stresses_rr.I_dis_max_abs, 'A')}\n"
        )
    _note(f"compare-rr: report written to {out_dir}")
    return EXIT_OK


def cmd_verify(cfg: Config, out_dir: Path, dt: Optional[float]) -> int:
    if cfg.design is None:
        _err("verify: config is missing the design block")
        return EXIT_INVALID
    spec, dev, design = cfg.circuit, cfg.device, cfg.design
    icfg = IntegratorConfig(dt=dt)

    try:
        wave_i, wave_v = integrate_charging(spec, dev, design, icfg)
    except (StepTooLarge, DomainError) as exc:
        _err(f"verify: {exc}")
        return EXIT_INVALID

    try:
        errors = {
            "i_ch": supnorm_error(wave_i, lambda t: charging_current(t, spec, dev, design)),
            "v_AK1": supnorm_error(wave_v, lambda t: vak1(t, spec, dev, design)),
        }
    except NotUnderdamped as exc:
        # closed forms do not apply; emit the oracle waveforms and stop
        _err(f"verify: closed forms skipped ({exc}); oracle waveforms still written")
        write_waveform_csv(wave_i, out_dir / "oracle_i_ch.csv")
        write_waveform_csv(wave_v, out_dir / "oracle_v_AK1.csv")
        _write_json(
            {"analytic_skipped": True, "reason": str(exc), "threshold": VERIFY_THRESHOLD},
            out_dir / "verify.json",
        )
        return EXIT_OK

    init_oracle = wave_i.y[-1]
    t_on1 = conduction_reach_time(spec, dev, wave_v.y[-1])
    t_end = dev.t_dmax + 1.2 * (t_on1 - dev.t_dmax)
    init_analytic = charging_current(dev.t_dmax, spec, dev, design)
    try:
        wave_d = integrate_discharge(spec, dev, design, init_oracle, replace(icfg, t_end=t_end))
    except (StepTooLarge, DomainError) as exc:
        _err(f"verify: {exc}")
        return EXIT_INVALID
    errors["i_dis"] = supnorm_error(
        wave_d, lambda t: discharge_current(t, spec, dev, design, init=init_analytic)
    )

    write_waveform_csv(wave_i, out_dir / "oracle_i_ch.csv")
    write_waveform_csv(wave_v, out_dir / "oracle_v_AK1.csv")
    write_waveform_csv(wave_d, out_dir / "oracle_i_dis.csv")

    ok = all(err < VERIFY_THRESHOLD for err in errors.values())
    for name, err in errors.items():
        _note(f"verify: {name} sup-norm relative error = {err:.3e}")
    _write_json(
        {
            "analytic_skipped": False,
            "threshold": VERIFY_THRESHOLD,
            "errors": errors,
            "ok": ok,
        },
        out_dir / "verify.json",
    )
    if not ok:
        _err("verify: FAILED, closed forms and integrator disagree beyond the threshold")
        return EXIT_VERIFY_FAILED
    _note("verify: OK")
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        _err(f"config error: {exc}")
        return EXIT_INVALID

    outcome = validate(cfg.circuit, cfg.device, cfg.design)
    if not outcome.ok:
        for message in outcome.messages():
            _err(f"invalid input: {message}")
        return EXIT_INVALID

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.command == "analyze":
        return cmd_analyze(cfg, out_dir, plot=not args.no_plot)
    if args.command == "sweep":
        return cmd_sweep(cfg, out_dir, plot=not args.no_plot)
    if args.command == "design":
        return cmd_design(cfg, out_dir, plot=not args.no_plot, snap_flag=args.snap)
    if args.command == "compare-rr":
        return cmd_compare_rr(cfg, out_dir)
    if args.command == "verify":
        return cmd_verify(cfg, out_dir, dt=args.dt)
    parser.error(f"unknown command {args.command!r}")
    return EXIT_INVALID


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
