"""Lateral path representation, tracking errors, and course commands.

Flight plans are ordered waypoint lists with circular fillets blended
into interior corners, or standalone orbits. A small sequential manager
switches segments by half-plane crossings at the fillet tangent points,
so the active segment index never decreases (self-crossing plans are
safe). Course commands can pass through a configurable slew-rate limiter
to soften plan discontinuities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .angles import wrap_pi
from .errors import ConfigError, UndefinedBearingError

# Fillet arcs are skipped when adjacent legs are within this angle (rad)
# of collinear; the turn is degenerate there.
COLLINEAR_TOLERANCE = 1e-6


@dataclass
class PathSegment:
    """One trackable path element: an infinite line or a circular orbit.

    Lines carry a 3-D origin (NED) and horizontal unit direction. Orbits
    carry a horizontal center (n, e), radius (m), and direction flag
    (+1 clockwise from above, -1 counterclockwise).
    """

    kind: str
    origin: np.ndarray | None = None
    direction: np.ndarray | None = None
    center: np.ndarray | None = None
    radius: float = 0.0
    lam: int = 1
    exit_fillet_radius: float = 0.0

    @classmethod
    def line(cls, origin, direction) -> "PathSegment":
        origin = np.asarray(origin, dtype=float)
        direction = np.asarray(direction, dtype=float)
        norm = float(np.linalg.norm(direction))
        if norm < 1e-12:
            raise ConfigError("line segment direction must be non-zero")
        if abs(norm - 1.0) > 1e-9:
            direction = direction / norm
        return cls(kind="line", origin=origin, direction=direction)

    @classmethod
    def orbit(cls, center, radius: float, lam: int) -> "PathSegment":
        if radius <= 0.0:
            raise ConfigError(
                f"orbit at ({center[0]:.1f}, {center[1]:.1f}) must have a "
                f"positive radius, got {radius}"
            )
        if lam not in (1, -1):
            raise ConfigError("orbit direction flag must be +1 (cw) or -1 (ccw)")
        return cls(kind="orbit", center=np.asarray(center, dtype=float),
                   radius=float(radius), lam=int(lam))

    def course(self) -> float:
        """Course angle of a line segment's direction."""
        return math.atan2(float(self.direction[1]), float(self.direction[0]))


@dataclass
class GuidanceGains:
    """Shared cross-track shaping constants (identical for both controllers).

    intercept_angle caps the commanded course correction toward a line;
    capture_gain (rad/m) scales the cross-track error inside the cap;
    orbit_gain shapes the radial correction as atan(orbit_gain * e/rd).
    """

    intercept_angle: float = math.radians(45.0)
    capture_gain: float = 0.0125
    orbit_gain: float = 2.0

    def validate(self) -> None:
        if not 0.0 < self.intercept_angle <= math.pi / 2.0:
            raise ConfigError("intercept angle must be in (0, 90] deg")
        if self.capture_gain <= 0.0 or self.orbit_gain <= 0.0:
            raise ConfigError("guidance gains must be positive")


@dataclass
class CourseCommand:
    """Course command for one step: slewed value, raw value, active segment."""

    chi_cmd: float
    chi_cmd_raw: float
    segment_id: int


def line_error(p, seg: PathSegment) -> tuple[float, float, float]:
    """Path-frame position error relative to a line segment.

    Returns (e_px, e_py, e_pz): along-track, cross-track (positive right
    of the path direction), and down components.
    """
    delta = np.asarray(p, dtype=float) - seg.origin
    chi_path = seg.course()
    c, s = math.cos(chi_path), math.sin(chi_path)
    e_px = c * float(delta[0]) + s * float(delta[1])
    e_py = -s * float(delta[0]) + c * float(delta[1])
    e_pz = float(delta[2])
    return e_px, e_py, e_pz


def orbit_error(p, seg: PathSegment) -> float:
    """Signed radial error -lam*(rd - dist) from the orbit circle."""
    p = np.asarray(p, dtype=float)
    dist = math.hypot(float(p[0]) - float(seg.center[0]),
                      float(p[1]) - float(seg.center[1]))
    return -seg.lam * (seg.radius - dist)


def course_command_line(e_py: float, seg: PathSegment,
                        gains: GuidanceGains) -> float:
    """Saturating proportional course command toward a line.

    The correction is clamped at the intercept angle, so arbitrarily
    large offsets command a constant-angle intercept.
    """
    correction = gains.capture_gain * e_py
    cap = gains.intercept_angle
    correction = max(-cap, min(cap, correction))
    return wrap_pi(seg.course() - correction)


def course_command_orbit(p, seg: PathSegment, gains: GuidanceGains) -> float:
    """Course command tangent to an orbit plus a radial capture correction."""
    p = np.asarray(p, dtype=float)
    dn = float(p[0]) - float(seg.center[0])
    de = float(p[1]) - float(seg.center[1])
    dist = math.hypot(dn, de)
    if dist < 1e-9:
        raise UndefinedBearingError(
            "bearing from orbit center undefined at the center itself"
        )
    bearing = math.atan2(de, dn)
    correction = math.atan(gains.orbit_gain * (dist - seg.radius) / seg.radius)
    return wrap_pi(bearing + seg.lam * (math.pi / 2.0 + correction))


def slew_limit(prev: float, raw: float, max_rate: float, dt: float) -> float:
    """Move from prev toward raw along the shortest angular path, at most
    max_rate*dt in one tick."""
    if max_rate <= 0.0 or dt <= 0.0:
        raise ConfigError("slew rate and dt must be positive")
    step = wrap_pi(raw - prev)
    limit = max_rate * dt
    if abs(step) <= limit:
        return wrap_pi(raw)
    return wrap_pi(prev + math.copysign(limit, step))


@dataclass
class SlewSettings:
    """Course-command slew limiter configuration."""

    enabled: bool = False
    rate: float = math.radians(30.0)
    threshold: float = math.radians(30.0)

    def validate(self) -> None:
        if self.rate <= 0.0 or self.threshold <= 0.0:
            raise ConfigError("slew rate and threshold must be positive")


@dataclass
class OrbitPlan:
    """Standalone orbit plan: center, radius, direction, and how many
    revolutions count as completion (0 = never complete)."""

    center_n: float
    center_e: float
    radius: float
    lam: int
    revolutions: float = 1.0
    start_bearing: float = 0.0


@dataclass
class ManagedSegment:
    """A path segment plus the half-plane that retires it.

    switch_normal None means the segment never retires by position
    (standalone orbits complete by accumulated revolutions instead).
    """

    segment: PathSegment
    switch_point: np.ndarray | None = None
    switch_normal: np.ndarray | None = None


@dataclass
class FlightPlan:
    """Ordered waypoints with corner fillets, or a standalone orbit."""

    name: str = "plan"
    waypoints: list[tuple[float, float, float]] = field(default_factory=list)
    fillet_radius: float = 0.0
    nominal_agl: float = 150.0
    orbit: OrbitPlan | None = None

    def validate(self) -> None:
        if self.nominal_agl <= 0.0:
            raise ConfigError(f"plan '{self.name}': nominal AGL must be positive")
        if self.orbit is not None:
            if self.orbit.radius <= 0.0:
                raise ConfigError(
                    f"plan '{self.name}': orbit radius must be positive, "
                    f"got {self.orbit.radius}"
                )
            if self.orbit.lam not in (1, -1):
                raise ConfigError(f"plan '{self.name}': orbit direction must "
                                  "be cw or ccw")
            if self.orbit.revolutions < 0.0:
                raise ConfigError(f"plan '{self.name}': revolutions must be "
                                  ">= 0")
            return
        if len(self.waypoints) < 2:
            raise ConfigError(
                f"plan '{self.name}': needs at least two waypoints"
            )
        if self.fillet_radius < 0.0:
            raise ConfigError(f"plan '{self.name}': fillet radius must be "
                              ">= 0")
        pts = np.array([(w[0], w[1]) for w in self.waypoints])
        legs = np.diff(pts, axis=0)
        lengths = np.linalg.norm(legs, axis=1)
        if np.any(lengths < 1e-6):
            raise ConfigError(
                f"plan '{self.name}': consecutive waypoints coincide"
            )
        # Every leg must be long enough for the fillet cutbacks at both ends.
        if self.fillet_radius > 0.0:
            consumed = np.zeros(len(legs))
            for i in range(1, len(pts) - 1):
                q_prev = legs[i - 1] / lengths[i - 1]
                q_next = legs[i] / lengths[i]
                dot = float(np.clip(np.dot(q_prev, q_next), -1.0, 1.0))
                if dot < -1.0 + COLLINEAR_TOLERANCE:
                    raise ConfigError(
                        f"plan '{self.name}': waypoint {i} reverses direction"
                    )
                if dot > 1.0 - COLLINEAR_TOLERANCE:
                    continue  # straight through, no fillet
                varrho = math.acos(-dot)
                cut = self.fillet_radius / math.tan(varrho / 2.0)
                consumed[i - 1] += cut
                consumed[i] += cut
            over = consumed >= lengths - 1e-9
            if np.any(over):
                leg = int(np.argmax(over))
                raise ConfigError(
                    f"plan '{self.name}': fillet radius {self.fillet_radius} m "
                    f"does not fit on leg {leg} ({lengths[leg]:.1f} m)"
                )

    def initial_course(self) -> float:
        """Course at the plan start point."""
        if self.orbit is not None:
            return wrap_pi(self.orbit.start_bearing
                           + self.orbit.lam * math.pi / 2.0)
        d = np.subtract(self.waypoints[1][:2], self.waypoints[0][:2])
        return math.atan2(float(d[1]), float(d[0]))

    def start_position(self) -> np.ndarray:
        """NED start point of the plan."""
        down = -self.nominal_agl
        if self.orbit is not None:
            o = self.orbit
            return np.array(
                [o.center_n + o.radius * math.cos(o.start_bearing),
                 o.center_e + o.radius * math.sin(o.start_bearing),
                 down]
            )
        w0 = self.waypoints[0]
        return np.array([w0[0], w0[1], down])

    def build_segments(self) -> list[ManagedSegment]:
        """Expand the plan into managed segments with switching half-planes."""
        self.validate()
        down = -self.nominal_agl
        if self.orbit is not None:
            seg = PathSegment.orbit(
                (self.orbit.center_n, self.orbit.center_e),
                self.orbit.radius, self.orbit.lam,
            )
            return [ManagedSegment(segment=seg)]

        pts = [np.array([w[0], w[1]], dtype=float) for w in self.waypoints]
        segments: list[ManagedSegment] = []
        n = len(pts)
        for i in range(1, n - 1):
            q_prev = pts[i] - pts[i - 1]
            q_prev /= np.linalg.norm(q_prev)
            q_next = pts[i + 1] - pts[i]
            q_next /= np.linalg.norm(q_next)
            dot = float(np.clip(np.dot(q_prev, q_next), -1.0, 1.0))
            origin3 = np.array([pts[i - 1][0], pts[i - 1][1], down])
            line = PathSegment.line(origin3, np.array([q_prev[0], q_prev[1], 0.0]))
            if self.fillet_radius <= 0.0 or dot > 1.0 - COLLINEAR_TOLERANCE:
                # Sharp corner (or straight through): retire the leg on the
                # bisector half-plane at the waypoint itself.
                normal = q_prev + q_next
                norm = float(np.linalg.norm(normal))
                normal = q_prev if norm < 1e-9 else normal / norm
                segments.append(ManagedSegment(line, pts[i].copy(), normal))
                continue
            varrho = math.acos(-dot)
            cut = self.fillet_radius / math.tan(varrho / 2.0)
            z_enter = pts[i] - cut * q_prev
            z_exit = pts[i] + cut * q_next
            bisector = q_prev - q_next
            bisector /= np.linalg.norm(bisector)
            center = pts[i] - (self.fillet_radius / math.sin(varrho / 2.0)) * bisector
            lam = 1 if (q_prev[0] * q_next[1] - q_prev[1] * q_next[0]) > 0.0 else -1
            line.exit_fillet_radius = self.fillet_radius
            segments.append(ManagedSegment(line, z_enter, q_prev.copy()))
            arc = PathSegment.orbit(center, self.fillet_radius, lam)
            segments.append(ManagedSegment(arc, z_exit, q_next.copy()))
        q_last = pts[-1] - pts[-2]
        q_last /= np.linalg.norm(q_last)
        origin3 = np.array([pts[-2][0], pts[-2][1], down])
        last = PathSegment.line(origin3, np.array([q_last[0], q_last[1], 0.0]))
        segments.append(ManagedSegment(last, pts[-1].copy(), q_last.copy()))
        return segments


class PathManager:
    """Sequential segment manager producing one course command per step.

    Holds the active segment index (non-decreasing), the previous slewed
    command for the rate limiter, and the accumulated arc angle for
    standalone-orbit completion.
    """

    def __init__(self, plan: FlightPlan, gains: GuidanceGains, dt: float,
                 slew: SlewSettings | None = None):
        gains.validate()
        if dt <= 0.0:
            raise ConfigError("path manager dt must be positive")
        self.plan = plan
        self.gains = gains
        self.dt = dt
        self.slew = slew if slew is not None else SlewSettings()
        self.slew.validate()
        self.segments = plan.build_segments()
        self.index = 0
        self.complete = False
        self.prev_cmd: float | None = None
        self._orbit_accum = 0.0
        self._prev_bearing: float | None = None

    def active_segment(self) -> PathSegment:
        return self.segments[self.index].segment

    def lateral_error(self, p) -> float:
        """Cross-track (line) or radial (orbit) error of the active segment."""
        seg = self.active_segment()
        if seg.kind == "line":
            return line_error(p, seg)[1]
        return orbit_error(p, seg)

    def _advance(self, p2: np.ndarray) -> None:
        # A fillet with a zero-length arc can retire two half-planes in one
        # tick, hence the loop.
        while True:
            ms = self.segments[self.index]
            if ms.switch_normal is None:
                return
            if float(np.dot(p2 - ms.switch_point, ms.switch_normal)) < 0.0:
                return
            if self.index == len(self.segments) - 1:
                self.complete = True
                return
            self.index += 1

    def _track_orbit_completion(self, p2: np.ndarray) -> None:
        plan_orbit = self.plan.orbit
        if plan_orbit is None or self.complete:
            return
        if plan_orbit.revolutions <= 0.0:
            return
        seg = self.active_segment()
        bearing = math.atan2(float(p2[1]) - float(seg.center[1]),
                             float(p2[0]) - float(seg.center[0]))
        if self._prev_bearing is not None:
            self._orbit_accum += wrap_pi(bearing - self._prev_bearing)
        self._prev_bearing = bearing
        if abs(self._orbit_accum) >= math.tau * plan_orbit.revolutions:
            self.complete = True

    def step(self, p) -> CourseCommand:
        """Advance switching logic and produce the course command at p."""
        p = np.asarray(p, dtype=float)
        p2 = p[:2]
        if not self.complete:
            self._advance(p2)
        self._track_orbit_completion(p2)

        seg = self.active_segment()
        if seg.kind == "line":
            _, e_py, _ = line_error(p, seg)
            raw = course_command_line(e_py, seg, self.gains)
        else:
            raw = course_command_orbit(p, seg, self.gains)

        if self.slew.enabled and self.prev_cmd is not None:
            step_size = abs(wrap_pi(raw - self.prev_cmd))
            if step_size > self.slew.threshold * self.dt:
                cmd = slew_limit(self.prev_cmd, raw, self.slew.rate, self.dt)
            else:
                cmd = wrap_pi(raw)
        else:
            cmd = wrap_pi(raw)
        self.prev_cmd = cmd
        return CourseCommand(chi_cmd=cmd, chi_cmd_raw=wrap_pi(raw),
                             segment_id=self.index)
