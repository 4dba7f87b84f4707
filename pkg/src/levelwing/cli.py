"""Command-line entry point.

Subcommands:
  simulate   run one controller over a scenario, optionally export a CSV log
  compare    run both controllers over one scenario and write a report
  gains      print the synthesized controller gains for a scenario
  trim       solve and print the level-flight trim point

Exit codes: 0 success, 2 configuration error, 3 trim failure,
4 dynamics or control fault, 5 I/O error, 1 anything else.
"""

from __future__ import annotations

import argparse
import math
import sys

from .config import load_config
from .control import (
    aotc_gain_synthesis,
    lon_gain_synthesis,
    ratc_gain_synthesis,
    roll_gain_synthesis,
)
from .dynamics import (
    AirData,
    Environment,
    combined_yaw_coeffs,
    gamma_terms,
    trim,
)
from .errors import (
    ConfigError,
    IntegrationFaultError,
    SimulatorError,
    SingularityError,
    TrimFailureError,
    UncontrollablePlantError,
)
from .scenario import compare_controllers, export_csv, run_scenario, write_comparison

_FAULT_ERRORS = (SingularityError, IntegrationFaultError,
                 UncontrollablePlantError)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levelwing",
        description="Fixed-wing lateral guidance simulator comparing "
                    "aileron-only and rudder-augmented trajectory correction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True,
                       help="scenario config file (.ini)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the gust random seed")
        p.add_argument("--duration", type=float, default=None,
                       help="override the duration cap in seconds")
        p.add_argument("--slew", choices=("on", "off"), default=None,
                       help="force the course-command slew limiter on or off")

    p_sim = sub.add_parser("simulate", help="run one controller")
    add_common(p_sim)
    p_sim.add_argument("--controller", choices=("aotc", "ratc"), default=None,
                       help="lateral controller (default: scenario setting)")
    p_sim.add_argument("--csv", default=None,
                       help="write the time-series log to this CSV file")

    p_cmp = sub.add_parser("compare", help="run both controllers")
    add_common(p_cmp)
    p_cmp.add_argument("--out-dir", required=True,
                       help="directory for aotc.csv, ratc.csv, summary files")

    p_gain = sub.add_parser("gains", help="print synthesized gains")
    p_gain.add_argument("--config", required=True,
                        help="scenario config file (.ini)")

    p_trim = sub.add_parser("trim", help="solve the level-flight trim point")
    p_trim.add_argument("--config", required=True,
                        help="scenario config file (.ini)")
    p_trim.add_argument("--airspeed", type=float, default=None,
                        help="trim airspeed in m/s (default: scenario "
                             "airspeed command)")
    return parser


def _slew_flag(value: str | None) -> bool | None:
    if value is None:
        return None
    return value == "on"


def _print_run(result) -> None:
    print(f"scenario  : {result.scenario}")
    print(f"controller: {result.mode}")
    print(f"steps     : {result.steps} ({result.steps * result.dt:.2f} s)")
    print(f"completed : {result.completed}")
    if result.fault:
        print(f"fault     : {result.fault}")
    for h_ref in sorted(result.stats_by_href):
        s = result.stats_by_href[h_ref]
        print(f"image error @ {h_ref:.0f} m: mean {s.mean:+.3f} m, "
              f"std {s.std:.3f} m, rms {s.rms:.3f} m")
    if result.lat_stats is not None:
        s = result.lat_stats
        print(f"lateral path error : mean {s.mean:+.3f} m, std {s.std:.3f} m")
    if result.roll_stats_deg is not None:
        s = result.roll_stats_deg
        print(f"roll angle         : mean {s.mean:+.3f} deg, "
              f"std {s.std:.3f} deg")
    if result.beta_stats_deg is not None:
        s = result.beta_stats_deg
        print(f"sideslip estimate  : mean {s.mean:+.3f} deg, "
              f"std {s.std:.3f} deg")


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, seed=args.seed)
    result = run_scenario(cfg, mode=args.controller,
                          duration_override=args.duration,
                          slew_override=_slew_flag(args.slew))
    _print_run(result)
    if args.csv:
        export_csv(result, args.csv)
        print(f"log written to {args.csv}")
    return 4 if result.fault else 0


def _cmd_compare(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, seed=args.seed)
    comp = compare_controllers(cfg, duration_override=args.duration,
                               slew_override=_slew_flag(args.slew))
    paths = write_comparison(comp, args.out_dir)
    print(comp.table_text)
    print(f"report written to {paths['summary_txt'].parent}")
    return 0


def _cmd_gains(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    env = Environment(cfg.env.wind_n, cfg.env.wind_e, cfg.env.wind_d)
    trim_state, trim_cmd = trim(cfg.params, env, cfg.va_cmd)
    gammas = gamma_terms(cfg.params)
    va = cfg.va_cmd
    c = cfg.ctrl

    airdata = AirData(va=va, vg=va, alpha=trim_state.theta, beta=0.0,
                      gamma_climb=0.0, chi=0.0)
    coeffs = combined_yaw_coeffs(cfg.params, gammas, airdata)
    yaw = ratc_gain_synthesis(coeffs, c.wn_psi, c.zeta_psi)
    roll = roll_gain_synthesis(cfg.params, gammas, va, c.wn_roll,
                               c.zeta_roll, ki=c.ki_roll)
    aotc = aotc_gain_synthesis(cfg.params, gammas, va, va, c.wn_roll,
                               c.zeta_roll, c.course_separation,
                               c.zeta_course)
    lon = lon_gain_synthesis(cfg.params, va, c.wn_pitch, c.zeta_pitch,
                             c.wn_alt, c.zeta_alt, c.kp_airspeed,
                             c.ki_airspeed, c.pitch_limit)

    print(f"scenario {cfg.name}, airspeed {va:.1f} m/s")
    print(f"heading plant : a_psi1 {coeffs.a_psi1:+.4f} 1/s, "
          f"a_psi2 {coeffs.a_psi2:+.4f} 1/s^2 per rad")
    print(f"ratc heading  : kp {yaw.kp_psi:+.4f}, kd {yaw.kd_psi:+.4f} "
          f"(wn {yaw.wn_psi:.2f} rad/s, zeta {yaw.zeta_psi:.2f})")
    print(f"roll hold     : kp {roll.kp:+.4f}, kd {roll.kd:+.4f}, "
          f"ki {roll.ki:+.4f} (wn {roll.wn:.2f} rad/s)")
    print(f"aotc course   : kp {aotc.course.kp:+.4f}, "
          f"ki {aotc.course.ki:+.4f} (wn {aotc.course.wn:.3f} rad/s, "
          f"separation {c.course_separation:.1f})")
    print(f"pitch hold    : kp {lon.kp_theta:+.4f}, kd {lon.kd_theta:+.4f}")
    print(f"altitude hold : kp {lon.kp_h:+.5f}, ki {lon.ki_h:+.5f}")
    print(f"trim          : alpha {math.degrees(trim_state.theta):.3f} deg, "
          f"elevator {math.degrees(trim_cmd.delta_e):.3f} deg, "
          f"throttle {trim_cmd.delta_t:.4f}")
    return 0


def _cmd_trim(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    va = cfg.va_cmd if args.airspeed is None else args.airspeed
    env = Environment(cfg.env.wind_n, cfg.env.wind_e, cfg.env.wind_d)
    state, cmd = trim(cfg.params, env, va)
    print(f"trim at Va = {va:.2f} m/s, level flight:")
    print(f"  alpha    = {math.degrees(state.theta):+.4f} deg")
    print(f"  u, w     = {state.u:+.4f}, {state.w:+.4f} m/s (body)")
    print(f"  elevator = {math.degrees(cmd.delta_e):+.4f} deg")
    print(f"  throttle = {cmd.delta_t:.4f}")
    return 0


_HANDLERS = {
    "simulate": _cmd_simulate,
    "compare": _cmd_compare,
    "gains": _cmd_gains,
    "trim": _cmd_trim,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ConfigError as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        return 2
    except TrimFailureError as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        return 3
    except _FAULT_ERRORS as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return 5
    except SimulatorError as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
