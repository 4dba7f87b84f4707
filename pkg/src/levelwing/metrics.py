"""Image-error metrics and summary statistics.

The body-fixed camera looks straight down, so its ground footprint
displaces by the lateral tracking error plus the roll-induced shift
h_ref*tan(phi) at the imaging reference altitude. Statistics use the
population standard deviation, which keeps rms^2 = mean^2 + std^2 exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .angles import wrap_pi
from .errors import ConfigError, DomainError, InsufficientDataError


@dataclass
class ImageErrorRecord:
    """One time-stamped image-error sample at a reference altitude."""

    t: float
    e_lateral: float
    e_roll: float
    e_total: float
    h_ref: float
    phi: float
    beta_est: float
    segment_id: int


@dataclass
class ErrorStats:
    """Signed-series statistics: mean, population std, rms, sample count."""

    mean: float
    std: float
    rms: float
    count: int


def total_image_error(e_lateral: float, phi: float, h_ref: float) -> float:
    """Ground image displacement: lateral error plus h_ref*tan(phi)."""
    if h_ref <= 0.0:
        raise ConfigError("reference altitude must be positive")
    if abs(phi) >= math.pi / 2.0:
        raise DomainError(
            f"roll {math.degrees(phi):.1f} deg has no ground intersection"
        )
    return e_lateral + h_ref * math.tan(phi)


def lateral_error_select(line_err: float, orbit_err: float,
                         active_kind: str) -> float:
    """Pick the lateral error matching the active segment kind."""
    if active_kind == "line":
        return line_err
    if active_kind == "orbit":
        return orbit_err
    raise ConfigError(f"unknown segment kind '{active_kind}'")


def beta_estimate(chi: float, psi: float) -> float:
    """Sideslip estimate as the wrapped course/heading split.

    Equals the true sideslip in zero wind; with wind it also absorbs the
    crab angle, matching what a GPS-course-minus-heading flight log shows.
    """
    return wrap_pi(chi - psi)


def series_stats(values) -> ErrorStats:
    """Mean, population standard deviation, and rms of a signed series."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        arr = arr.ravel()
    if arr.size < 2:
        raise InsufficientDataError(
            f"need at least 2 samples for statistics, got {arr.size}"
        )
    mean = float(np.mean(arr))
    std = float(np.std(arr))  # population: rms^2 == mean^2 + std^2
    rms = float(np.sqrt(np.mean(arr**2)))
    return ErrorStats(mean=mean, std=std, rms=rms, count=int(arr.size))


@dataclass
class SummaryRow:
    """One controller's row of the comparison table."""

    scenario: str
    controller: str
    mean_150: float
    std_150: float
    mean_450: float
    std_450: float
    rms_450: float
    lat_mean: float
    lat_std: float
    roll_mean_deg: float
    roll_std_deg: float
    beta_mean_deg: float
    beta_std_deg: float


SUMMARY_COLUMNS = (
    "scenario", "controller", "mean_150", "std_150", "mean_450", "std_450",
    "rms_450", "lat_mean", "lat_std", "roll_mean_deg", "roll_std_deg",
    "beta_mean_deg", "beta_std_deg",
)


def render_summary_table(rows: list[SummaryRow]) -> str:
    """Fixed-width plain-text comparison table."""
    header = [
        f"{'scenario':<14}", f"{'controller':<10}",
        f"{'mean_150':>9}", f"{'std_150':>9}",
        f"{'mean_450':>9}", f"{'std_450':>9}", f"{'rms_450':>9}",
        f"{'lat_mean':>9}", f"{'lat_std':>9}",
        f"{'roll_mean':>10}", f"{'roll_std':>9}",
        f"{'beta_mean':>10}", f"{'beta_std':>9}",
    ]
    lines = ["  ".join(header)]
    for row in rows:
        cells = [
            f"{row.scenario:<14}", f"{row.controller:<10}",
            f"{row.mean_150:>9.2f}", f"{row.std_150:>9.2f}",
            f"{row.mean_450:>9.2f}", f"{row.std_450:>9.2f}",
            f"{row.rms_450:>9.2f}",
            f"{row.lat_mean:>9.2f}", f"{row.lat_std:>9.2f}",
            f"{row.roll_mean_deg:>10.2f}", f"{row.roll_std_deg:>9.2f}",
            f"{row.beta_mean_deg:>10.2f}", f"{row.beta_std_deg:>9.2f}",
        ]
        lines.append("  ".join(cells))
    return "\n".join(lines)


def summary_csv_lines(rows: list[SummaryRow]) -> list[str]:
    """Machine-readable form of the comparison table."""
    lines = [",".join(SUMMARY_COLUMNS)]
    for row in rows:
        lines.append(",".join([
            row.scenario, row.controller,
            f"{row.mean_150:.6f}", f"{row.std_150:.6f}",
            f"{row.mean_450:.6f}", f"{row.std_450:.6f}", f"{row.rms_450:.6f}",
            f"{row.lat_mean:.6f}", f"{row.lat_std:.6f}",
            f"{row.roll_mean_deg:.6f}", f"{row.roll_std_deg:.6f}",
            f"{row.beta_mean_deg:.6f}", f"{row.beta_std_deg:.6f}",
        ]))
    return lines
