"""Scenario runner: closed-loop simulation, controller comparison, CSV export.

One run trims the aircraft, places it at the plan start, and steps
guidance, control, and dynamics at the same fixed rate until the plan
completes or the duration cap is reached. Comparisons run both lateral
controllers against one shared environment realization (same seed, same
gust draws) with identical guidance gains, so only the lateral law
differs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .angles import wrap_pi
from .config import ScenarioConfig
from .control import (
    ControlCommand,
    LoopState,
    aotc_gain_synthesis,
    aotc_step,
    apply_rate_limits,
    lon_gain_synthesis,
    longitudinal_holds,
    ratc_gain_synthesis,
    ratc_step,
    roll_gain_synthesis,
)
from .dynamics import (
    AircraftState,
    Environment,
    GustModel,
    air_data,
    clamp_command,
    combined_yaw_coeffs,
    gamma_terms,
    integrate_step,
    trim,
)
from .errors import (
    ConfigError,
    IntegrationFaultError,
    SimulatorError,
    SingularityError,
)
from .guidance import PathManager
from .metrics import (
    ErrorStats,
    SummaryRow,
    beta_estimate,
    render_summary_table,
    series_stats,
    summary_csv_lines,
    total_image_error,
)

# Reference altitudes of the fixed summary-table columns. A 450 m column
# is always derivable because the roll term rescales linearly in h_ref;
# it is recomputed from the logged series, never re-simulated.
TABLE_H_REFS = (150.0, 450.0)

CSV_COLUMNS = (
    "t", "pn", "pe", "pd", "u", "v", "w", "phi_deg", "theta_deg", "psi_deg",
    "p", "q", "r", "delta_a_deg", "delta_e_deg", "delta_r_deg", "delta_t",
    "Va", "beta_est_deg", "chi_deg", "chi_cmd_deg", "chi_cmd_raw_deg",
    "segment_id", "e_lateral_m", "e_total_150_m", "e_total_450_m",
)

_LOG_FIELDS = (
    "t", "pn", "pe", "pd", "u", "v", "w", "phi", "theta", "psi", "p", "q",
    "r", "delta_a", "delta_e", "delta_r", "delta_t", "va", "beta_est", "chi",
    "chi_cmd", "chi_cmd_raw", "segment_id", "e_lateral", "wind_n", "wind_e",
    "wind_d",
)


class FlightController:
    """Full autopilot for one run: one lateral law plus the longitudinal
    holds, gain-scheduled on the current airspeed."""

    def __init__(self, mode: str, cfg: ScenarioConfig,
                 trim_state: AircraftState, trim_cmd: ControlCommand):
        if mode not in ("aotc", "ratc"):
            raise ConfigError(f"controller mode must be aotc or ratc, got "
                              f"{mode!r}")
        self.mode = mode
        self.params = cfg.params
        self.ctrl = cfg.ctrl
        self.gammas = gamma_terms(cfg.params)
        self.trim_theta = trim_state.theta
        self.trim_cmd = trim_cmd
        self.h_cmd = cfg.plan.nominal_agl
        self.va_cmd = cfg.va_cmd
        self.loop = LoopState()

    def step(self, chi_cmd: float, state: AircraftState, airdata,
             dt: float) -> ControlCommand:
        va = max(airdata.va, 1.0)
        c = self.ctrl
        if self.mode == "ratc":
            coeffs = combined_yaw_coeffs(self.params, self.gammas, airdata,
                                         p=state.p,
                                         delta_a=(self.loop.prev_command.delta_a
                                                  if self.loop.prev_command
                                                  else 0.0))
            yaw_gains = ratc_gain_synthesis(coeffs, c.wn_psi, c.zeta_psi)
            roll_gains = roll_gain_synthesis(self.params, self.gammas, va,
                                             c.wn_roll, c.zeta_roll,
                                             ki=c.ki_roll)
            delta_a, delta_r = ratc_step(chi_cmd, state, airdata, yaw_gains,
                                         roll_gains, self.loop, dt,
                                         self.params)
        else:
            gains = aotc_gain_synthesis(self.params, self.gammas, va,
                                        airdata.vg, c.wn_roll, c.zeta_roll,
                                        c.course_separation, c.zeta_course)
            delta_a, delta_r = aotc_step(chi_cmd, state, airdata, gains,
                                         self.loop, dt, self.params,
                                         c.bank_limit)
        lon = lon_gain_synthesis(self.params, va, c.wn_pitch, c.zeta_pitch,
                                 c.wn_alt, c.zeta_alt, c.kp_airspeed,
                                 c.ki_airspeed, c.pitch_limit)
        delta_e, delta_t = longitudinal_holds(state, airdata, self.h_cmd,
                                              self.va_cmd, lon, self.loop, dt,
                                              self.trim_theta, self.trim_cmd,
                                              self.params)
        cmd = ControlCommand(delta_a=delta_a, delta_e=delta_e,
                             delta_r=delta_r, delta_t=delta_t)
        cmd = apply_rate_limits(cmd, self.loop.prev_command, self.params, dt)
        cmd = clamp_command(cmd, self.params)
        self.loop.prev_command = cmd
        return cmd


@dataclass
class RunResult:
    """Time-series log and summary statistics of one closed-loop run."""

    mode: str
    scenario: str
    dt: float
    log: dict[str, np.ndarray]
    steps: int
    completed: bool
    fault: str | None
    stats_by_href: dict[float, ErrorStats]
    lat_stats: ErrorStats | None
    roll_stats_deg: ErrorStats | None
    beta_stats_deg: ErrorStats | None
    mean_abs_roll_deg: float | None
    mean_abs_beta_deg: float | None

    def wind_series(self) -> np.ndarray:
        return np.column_stack(
            [self.log["wind_n"], self.log["wind_e"], self.log["wind_d"]]
        )

    def summary_row(self) -> SummaryRow:
        def stat(s: ErrorStats | None, attr: str) -> float:
            return getattr(s, attr) if s is not None else math.nan

        return SummaryRow(
            scenario=self.scenario,
            controller=self.mode,
            mean_150=stat(self.stats_by_href.get(150.0), "mean"),
            std_150=stat(self.stats_by_href.get(150.0), "std"),
            mean_450=stat(self.stats_by_href.get(450.0), "mean"),
            std_450=stat(self.stats_by_href.get(450.0), "std"),
            rms_450=stat(self.stats_by_href.get(450.0), "rms"),
            lat_mean=stat(self.lat_stats, "mean"),
            lat_std=stat(self.lat_stats, "std"),
            roll_mean_deg=stat(self.roll_stats_deg, "mean"),
            roll_std_deg=stat(self.roll_stats_deg, "std"),
            beta_mean_deg=stat(self.beta_stats_deg, "mean"),
            beta_std_deg=stat(self.beta_stats_deg, "std"),
        )


def _initial_state(cfg: ScenarioConfig, trim_state: AircraftState,
                   env: Environment) -> AircraftState:
    start = cfg.plan.start_position()
    chi0 = cfg.plan.initial_course()
    state = AircraftState(
        pn=float(start[0]), pe=float(start[1]), pd=float(start[2]),
        u=trim_state.u, v=trim_state.v, w=trim_state.w,
        phi=trim_state.phi, theta=trim_state.theta, psi=chi0,
        p=trim_state.p, q=trim_state.q, r=trim_state.r,
    )
    return state


def _stats_or_none(values: np.ndarray) -> ErrorStats | None:
    if values.size < 2:
        return None
    return series_stats(values)


def run_scenario(
    cfg: ScenarioConfig,
    mode: str | None = None,
    duration_override: float | None = None,
    slew_override: bool | None = None,
    seed_override: int | None = None,
) -> RunResult:
    """Run one closed-loop scenario and return its log and statistics.

    A zero duration override yields an empty but valid result flagged
    incomplete. Dynamics faults (singularity, non-finite state) truncate
    the log and are reported in the fault field instead of raising.
    """
    mode = cfg.ctrl.mode if mode is None else mode
    if mode not in ("aotc", "ratc"):
        raise ConfigError(f"controller mode must be aotc or ratc, got {mode!r}")
    duration = cfg.duration if duration_override is None else duration_override
    if duration < 0.0:
        raise ConfigError("duration cap must be >= 0")
    seed = cfg.seed if seed_override is None else seed_override
    dt = cfg.dt

    base_env = Environment(cfg.env.wind_n, cfg.env.wind_e, cfg.env.wind_d)
    trim_state, trim_cmd = trim(cfg.params, base_env, cfg.va_cmd)
    state = _initial_state(cfg, trim_state, base_env)

    slew = cfg.ctrl.slew_settings()
    if slew_override is not None:
        slew.enabled = slew_override
    manager = PathManager(cfg.plan, cfg.ctrl.guidance_gains(), dt, slew)
    controller = FlightController(mode, cfg, trim_state, trim_cmd)
    gust = GustModel(cfg.env.gust_intensity, cfg.env.gust_tau, dt, seed)
    gammas = gamma_terms(cfg.params)

    n_cap = int(round(duration / dt))
    log = {key: np.zeros(n_cap) for key in _LOG_FIELDS}
    log["segment_id"] = np.zeros(n_cap, dtype=int)

    steps = 0
    fault: str | None = None
    for k in range(n_cap):
        gust_ned = gust.step()
        env = Environment(
            base_env.wind_n + float(gust_ned[0]),
            base_env.wind_e + float(gust_ned[1]),
            base_env.wind_d + float(gust_ned[2]),
        )
        airdata = air_data(state, env)
        course = manager.step(state.position())
        e_lateral = manager.lateral_error(state.position())
        cmd = controller.step(course.chi_cmd, state, airdata, dt)

        t = k * dt
        row = (
            t, state.pn, state.pe, state.pd, state.u, state.v, state.w,
            state.phi, state.theta, state.psi, state.p, state.q, state.r,
            cmd.delta_a, cmd.delta_e, cmd.delta_r, cmd.delta_t, airdata.va,
            beta_estimate(airdata.chi, state.psi), airdata.chi,
            course.chi_cmd, course.chi_cmd_raw, course.segment_id, e_lateral,
            env.wind_n, env.wind_e, env.wind_d,
        )
        for key, value in zip(_LOG_FIELDS, row):
            log[key][k] = value
        steps = k + 1

        try:
            state = integrate_step(state, cmd, env, cfg.params, dt, gammas)
        except (SingularityError, IntegrationFaultError) as exc:
            fault = f"{exc.category}: {exc} at t = {t:.2f} s"
            break
        if manager.complete:
            break

    log = {key: arr[:steps] for key, arr in log.items()}
    completed = manager.complete and fault is None

    warm = log["t"] >= cfg.warmup if steps else np.zeros(0, dtype=bool)
    phi_w = log["phi"][warm] if steps else np.zeros(0)
    lat_w = log["e_lateral"][warm] if steps else np.zeros(0)
    beta_w = log["beta_est"][warm] if steps else np.zeros(0)

    h_refs = tuple(sorted(set(cfg.h_refs) | set(TABLE_H_REFS)))
    stats_by_href: dict[float, ErrorStats] = {}
    if phi_w.size >= 2:
        tan_phi = np.tan(phi_w)
        for h_ref in h_refs:
            stats_by_href[h_ref] = series_stats(lat_w + h_ref * tan_phi)

    return RunResult(
        mode=mode,
        scenario=cfg.name,
        dt=dt,
        log=log,
        steps=steps,
        completed=completed,
        fault=fault,
        stats_by_href=stats_by_href,
        lat_stats=_stats_or_none(lat_w),
        roll_stats_deg=_stats_or_none(np.degrees(phi_w)),
        beta_stats_deg=_stats_or_none(np.degrees(beta_w)),
        mean_abs_roll_deg=(float(np.mean(np.abs(np.degrees(phi_w))))
                           if phi_w.size else None),
        mean_abs_beta_deg=(float(np.mean(np.abs(np.degrees(beta_w))))
                           if beta_w.size else None),
    )


@dataclass
class ComparisonResult:
    """Paired runs of both controllers over one shared environment."""

    aotc: RunResult
    ratc: RunResult
    rows: list[SummaryRow]
    ratios: dict[str, float]
    table_text: str


def compare_controllers(
    cfg: ScenarioConfig,
    duration_override: float | None = None,
    slew_override: bool | None = None,
    seed_override: int | None = None,
) -> ComparisonResult:
    """Run both lateral controllers over the identical scenario and wind."""
    results = {}
    for mode in ("aotc", "ratc"):
        result = run_scenario(cfg, mode, duration_override=duration_override,
                              slew_override=slew_override,
                              seed_override=seed_override)
        if result.fault is not None:
            raise SimulatorError(
                f"comparison aborted: {mode} run failed ({result.fault})"
            )
        results[mode] = result

    aotc, ratc = results["aotc"], results["ratc"]
    rows = [aotc.summary_row(), ratc.summary_row()]
    ratios: dict[str, float] = {}
    a450, r450 = aotc.stats_by_href.get(450.0), ratc.stats_by_href.get(450.0)
    if a450 is not None and r450 is not None and a450.rms > 0.0:
        ratios["rms_450_ratc_over_aotc"] = r450.rms / a450.rms
    if (aotc.mean_abs_roll_deg and ratc.mean_abs_roll_deg is not None):
        ratios["mean_abs_roll_ratc_over_aotc"] = (
            ratc.mean_abs_roll_deg / aotc.mean_abs_roll_deg
        )
    ratios["mean_abs_roll_aotc_deg"] = aotc.mean_abs_roll_deg or math.nan
    ratios["mean_abs_roll_ratc_deg"] = ratc.mean_abs_roll_deg or math.nan
    ratios["mean_abs_beta_aotc_deg"] = aotc.mean_abs_beta_deg or math.nan
    ratios["mean_abs_beta_ratc_deg"] = ratc.mean_abs_beta_deg or math.nan

    lines = [render_summary_table(rows), ""]
    for key in sorted(ratios):
        lines.append(f"{key} = {ratios[key]:.4f}")
    return ComparisonResult(aotc=aotc, ratc=ratc, rows=rows, ratios=ratios,
                            table_text="\n".join(lines))


def export_csv(result: RunResult, path: str | Path) -> None:
    """Write the run log with fixed columns, degrees at the boundary."""
    log = result.log
    tan_phi = np.tan(log["phi"]) if result.steps else np.zeros(0)
    e150 = log["e_lateral"] + 150.0 * tan_phi
    e450 = log["e_lateral"] + 450.0 * tan_phi
    deg = math.degrees
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for k in range(result.steps):
            values = (
                log["t"][k], log["pn"][k], log["pe"][k], log["pd"][k],
                log["u"][k], log["v"][k], log["w"][k],
                deg(log["phi"][k]), deg(log["theta"][k]), deg(log["psi"][k]),
                log["p"][k], log["q"][k], log["r"][k],
                deg(log["delta_a"][k]), deg(log["delta_e"][k]),
                deg(log["delta_r"][k]), log["delta_t"][k],
                log["va"][k], deg(log["beta_est"][k]), deg(log["chi"][k]),
                deg(log["chi_cmd"][k]), deg(log["chi_cmd_raw"][k]),
            )
            cells = [f"{v:.12g}" for v in values]
            cells.append(str(int(log["segment_id"][k])))
            cells += [f"{v:.12g}" for v in
                      (log["e_lateral"][k], e150[k], e450[k])]
            fh.write(",".join(cells) + "\n")


def write_comparison(comp: ComparisonResult, out_dir: str | Path) -> dict[str, Path]:
    """Write aotc.csv, ratc.csv, summary.txt, and summary.csv to out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "aotc_csv": out / "aotc.csv",
        "ratc_csv": out / "ratc.csv",
        "summary_txt": out / "summary.txt",
        "summary_csv": out / "summary.csv",
    }
    export_csv(comp.aotc, paths["aotc_csv"])
    export_csv(comp.ratc, paths["ratc_csv"])
    paths["summary_txt"].write_text(comp.table_text + "\n", encoding="utf-8")
    paths["summary_csv"].write_text(
        "\n".join(summary_csv_lines(comp.rows)) + "\n", encoding="utf-8"
    )
    return paths
