"""Avatar robot state machine.

One robot is a pure state transformer: prepared head/arm motions, direct
drive, and semi-autonomous line tracing, all under the hardware limits
(0.2 m/s top speed, 6 h battery).  Mobile units drive on the floor;
stationary units sit on a table and reject all locomotion.

All mutating operations take the state first and return it, so callers can
chain; nothing here is shared between robots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

MAX_SPEED_MPS = 0.2                 # 0.72 km/h
BATTERY_CAPACITY_S = 6 * 3600.0     # 6 h of driving time
HEAD_MOTION_DURATION_S = 1.5
ARM_MOTION_DURATION_S = 2.5
TURN_RATE_RADPS = 0.5               # direct turn_left / turn_right commands

NECK_LIMIT_RAD = math.pi / 2
ARM_LIMIT_RAD = math.pi

# Line-trace controller (waypoint pursuit)
LOOKAHEAD_M = 0.3
CAPTURE_DISTANCE_M = 0.5            # max distance from path start to engage
ARRIVE_TOLERANCE_M = 0.03
HEADING_GAIN = 4.0
PIVOT_RATE_RADPS = 3.0              # max turn rate while tracing

MOBILE = "mobile"
STATIONARY = "stationary"


class RobotError(Exception):
    """Base class for command rejections; `code` is the wire reject reason."""

    code = "robot_error"


class UnknownMotion(RobotError):
    code = "unknown_motion"


class Busy(RobotError):
    code = "busy"


class NotMobile(RobotError):
    code = "not_mobile"


class PathUnreachable(RobotError):
    code = "path_unreachable"


class BatteryEmpty(RobotError):
    code = "battery_empty"


@dataclass(frozen=True)
class RobotSpec:
    """Physical constants of one avatar unit."""

    kind: str = MOBILE                  # "mobile" | "stationary"
    length_m: float = 0.50
    width_m: float = 0.40
    height_m: float = 1.18
    mass_kg: float = 20.0
    max_speed_mps: float = MAX_SPEED_MPS
    battery_capacity_s: float = BATTERY_CAPACITY_S

    def __post_init__(self):
        if self.kind not in (MOBILE, STATIONARY):
            raise ValueError(f"unknown robot kind {self.kind!r}")


@dataclass
class JointState:
    """Neck (pitch, yaw) and two 6-axis arms.

    Arm axis order is shoulder pitch/roll/yaw then elbow pitch, wrist
    yaw/roll.
    """

    neck: tuple[float, float] = (0.0, 0.0)
    arm_left: tuple[float, ...] = (0.0,) * 6
    arm_right: tuple[float, ...] = (0.0,) * 6

    def __post_init__(self):
        if len(self.neck) != 2:
            raise ValueError("neck has exactly 2 degrees of freedom")
        if len(self.arm_left) != 6 or len(self.arm_right) != 6:
            raise ValueError("each arm has exactly 6 degrees of freedom")

    def within_limits(self) -> bool:
        return all(abs(a) <= NECK_LIMIT_RAD + 1e-9 for a in self.neck) and all(
            abs(a) <= ARM_LIMIT_RAD + 1e-9 for a in self.arm_left + self.arm_right
        )

    def copy(self) -> "JointState":
        return JointState(self.neck, self.arm_left, self.arm_right)


def _lerp_joints(a: JointState, b: JointState, u: float) -> JointState:
    mix = lambda p, q: tuple(x + (y - x) * u for x, y in zip(p, q))
    return JointState(mix(a.neck, b.neck), mix(a.arm_left, b.arm_left), mix(a.arm_right, b.arm_right))


@dataclass(frozen=True)
class Motion:
    """A prepared primitive: absolute joint keyframes played over a fixed time."""

    motion_id: str
    group: str                          # "head" | "arm"
    duration_s: float
    keyframes: tuple[JointState, ...]


def _neck_kf(pitch, yaw):
    return JointState(neck=(pitch, yaw))


def _arm_kf(left=None, right=None):
    zero = (0.0,) * 6
    return JointState(arm_left=tuple(left) if left else zero, arm_right=tuple(right) if right else zero)


_REST = JointState()
_RAISED = (-1.5, 0.0, 0.0, -0.4, 0.0, 0.0)
_WAVE_IN = (-1.5, 0.4, 0.0, -0.4, 0.0, 0.0)
_WAVE_OUT = (-1.5, -0.4, 0.0, -0.4, 0.0, 0.0)
_FISTS = (-1.2, 0.0, 0.0, -1.0, 0.0, 0.0)
_POWER = (-1.0, 0.8, 0.0, -0.6, 0.0, 0.0)

HEAD_MOTIONS = {
    m.motion_id: m
    for m in (
        Motion("look_up", "head", HEAD_MOTION_DURATION_S, (_neck_kf(-0.5, 0.0),)),
        Motion("look_down", "head", HEAD_MOTION_DURATION_S, (_neck_kf(0.5, 0.0),)),
        Motion("look_right", "head", HEAD_MOTION_DURATION_S, (_neck_kf(0.0, -0.6),)),
        Motion("look_left", "head", HEAD_MOTION_DURATION_S, (_neck_kf(0.0, 0.6),)),
        Motion("nod_once", "head", HEAD_MOTION_DURATION_S, (_neck_kf(0.4, 0.0), _REST)),
        Motion("shake_head", "head", HEAD_MOTION_DURATION_S,
               (_neck_kf(0.0, 0.5), _neck_kf(0.0, -0.5), _REST)),
        Motion("nod_twice", "head", HEAD_MOTION_DURATION_S,
               (_neck_kf(0.4, 0.0), _REST, _neck_kf(0.4, 0.0), _REST)),
    )
}

ARM_MOTIONS = {
    m.motion_id: m
    for m in (
        Motion("raise_one_hand", "arm", ARM_MOTION_DURATION_S, (_arm_kf(right=_RAISED), _REST)),
        Motion("bye_bye", "arm", ARM_MOTION_DURATION_S,
               (_arm_kf(right=_WAVE_IN), _arm_kf(right=_WAVE_OUT), _arm_kf(right=_WAVE_IN), _REST)),
        Motion("hold_up_fists", "arm", ARM_MOTION_DURATION_S,
               (_arm_kf(left=_FISTS, right=_FISTS), _REST)),
        Motion("power_pose", "arm", ARM_MOTION_DURATION_S,
               (_arm_kf(left=_POWER, right=_POWER), _REST)),
    )
}

LOCOMOTION_DIRECTIONS = ("forward", "backward", "turn_left", "turn_right")


@dataclass(frozen=True)
class MotionCatalog:
    """The closed command vocabulary: 7 head + 4 arm + 4 locomotion primitives."""

    head: tuple[str, ...] = tuple(HEAD_MOTIONS)
    arm: tuple[str, ...] = tuple(ARM_MOTIONS)
    locomotion: tuple[str, ...] = LOCOMOTION_DIRECTIONS

    def __post_init__(self):
        if len(self.head) != 7 or len(self.arm) != 4 or len(self.locomotion) != 4:
            raise ValueError("catalog must hold exactly 7 head, 4 arm, 4 locomotion primitives")

    def motion(self, motion_id: str) -> Motion:
        if motion_id in self.head:
            return HEAD_MOTIONS[motion_id]
        if motion_id in self.arm:
            return ARM_MOTIONS[motion_id]
        raise UnknownMotion(f"motion {motion_id!r} is not in the catalog")

    @property
    def all_ids(self) -> tuple[str, ...]:
        return self.head + self.arm + self.locomotion


DEFAULT_CATALOG = MotionCatalog()


@dataclass
class LinePath:
    """A preset route: polyline of waypoints ending at a labelled target."""

    path_id: str
    waypoints: list[tuple[float, float]]
    target_label: str
    _cumlen: list[float] = field(default_factory=list, repr=False)

    def __post_init__(self):
        if len(self.waypoints) < 2:
            raise ValueError("a line path needs at least 2 waypoints")
        acc = [0.0]
        for (x0, y0), (x1, y1) in zip(self.waypoints, self.waypoints[1:]):
            seg = math.hypot(x1 - x0, y1 - y0)
            if seg <= 1e-9:
                raise ValueError("consecutive waypoints must be distinct")
            acc.append(acc[-1] + seg)
        self._cumlen = acc

    @property
    def length_m(self) -> float:
        return self._cumlen[-1]

    def point_at(self, s: float) -> tuple[float, float]:
        """Point at arc length s, clamped to the polyline."""
        s = min(max(s, 0.0), self.length_m)
        for i in range(len(self.waypoints) - 1):
            if s <= self._cumlen[i + 1]:
                seg = self._cumlen[i + 1] - self._cumlen[i]
                u = (s - self._cumlen[i]) / seg
                (x0, y0), (x1, y1) = self.waypoints[i], self.waypoints[i + 1]
                return (x0 + (x1 - x0) * u, y0 + (y1 - y0) * u)
        return self.waypoints[-1]

    def project(self, p: tuple[float, float], s_lo: float, window_m: float = 0.5) -> float:
        """Arc position nearest p, searched forward from s_lo (keeps progress monotone)."""
        s_hi = min(s_lo + window_m, self.length_m)
        best_s, best_d = s_lo, math.dist(p, self.point_at(s_lo))
        # Segment-wise exact projection within the window.
        for i in range(len(self.waypoints) - 1):
            a, b = self._cumlen[i], self._cumlen[i + 1]
            if b < s_lo or a > s_hi:
                continue
            (x0, y0), (x1, y1) = self.waypoints[i], self.waypoints[i + 1]
            dx, dy = x1 - x0, y1 - y0
            seg = b - a
            t = ((p[0] - x0) * dx + (p[1] - y0) * dy) / (seg * seg)
            s = min(max(a + t * seg, max(a, s_lo)), min(b, s_hi))
            d = math.dist(p, self.point_at(s))
            if d < best_d:
                best_s, best_d = s, d
        return best_s


@dataclass
class Pose:
    x_m: float
    y_m: float
    heading_rad: float

    def position(self) -> tuple[float, float]:
        return (self.x_m, self.y_m)

    def copy(self) -> "Pose":
        return Pose(self.x_m, self.y_m, self.heading_rad)


# --- activity modes (exactly one at a time) ---

@dataclass
class Idle:
    pass


@dataclass
class ExecutingMotion:
    motion_id: str
    elapsed_s: float = 0.0
    start_joints: JointState = field(default_factory=JointState)


@dataclass
class Locomoting:
    direction: str
    remaining_s: float


@dataclass
class LineTracing:
    path: LinePath
    arc_position_m: float = 0.0

    @property
    def path_id(self) -> str:
        return self.path.path_id


@dataclass
class RobotState:
    """Full per-robot state; advanced by `step`, mutated in place by one writer."""

    robot_id: str
    spec: RobotSpec = RobotSpec()
    pose: Pose = field(default_factory=lambda: Pose(0.0, 0.0, 0.0))
    joints: JointState = field(default_factory=JointState)
    battery_s: float = BATTERY_CAPACITY_S
    mode: Idle | ExecutingMotion | Locomoting | LineTracing = field(default_factory=Idle)
    catalog: MotionCatalog = DEFAULT_CATALOG

    @property
    def idle(self) -> bool:
        return isinstance(self.mode, Idle)

    @property
    def moving(self) -> bool:
        return isinstance(self.mode, (Locomoting, LineTracing))


def _wrap_angle(a: float) -> float:
    return (a + math.pi) % (2 * math.pi) - math.pi


def _require_ready(state: RobotState):
    if state.battery_s <= 0.0:
        raise BatteryEmpty(f"{state.robot_id}: battery exhausted")
    if not state.idle:
        raise Busy(f"{state.robot_id}: already {type(state.mode).__name__}")


def start_motion(state: RobotState, motion_id: str) -> RobotState:
    """Begin a prepared head or arm primitive.  Rejects (never queues) when busy."""
    motion = state.catalog.motion(motion_id)  # raises UnknownMotion first
    _require_ready(state)
    state.mode = ExecutingMotion(motion.motion_id, 0.0, state.joints.copy())
    return state


def start_locomotion(state: RobotState, direction: str, duration_s: float) -> RobotState:
    """Begin direct drive in one of the four locomotion directions."""
    if direction not in state.catalog.locomotion:
        raise UnknownMotion(f"direction {direction!r} is not in the catalog")
    if state.spec.kind != MOBILE:
        raise NotMobile(f"{state.robot_id} is a stationary unit")
    if duration_s <= 0:
        raise ValueError("duration_s must be > 0")
    _require_ready(state)
    state.mode = Locomoting(direction, duration_s)
    return state


def start_line_trace(state: RobotState, path: LinePath) -> RobotState:
    """Engage the line-trace autopilot toward the path's target."""
    if state.spec.kind != MOBILE:
        raise NotMobile(f"{state.robot_id} is a stationary unit")
    _require_ready(state)
    if math.dist(state.pose.position(), path.waypoints[0]) > CAPTURE_DISTANCE_M:
        raise PathUnreachable(f"{state.robot_id} is too far from the start of {path.path_id}")
    state.mode = LineTracing(path, 0.0)
    return state


def stop(state: RobotState) -> RobotState:
    """Abort the current activity; always succeeds (idempotent)."""
    state.mode = Idle()
    return state


def step(state: RobotState, dt_s: float) -> RobotState:
    """Advance the robot by dt_s.

    Drains the battery linearly; an empty battery freezes pose and joints
    (only the world clock moves on).  Positional displacement never exceeds
    max_speed_mps * dt_s.
    """
    if dt_s <= 0:
        raise ValueError("dt_s must be > 0")
    if state.battery_s <= 0.0:
        state.battery_s = 0.0
        return state
    state.battery_s = max(0.0, state.battery_s - dt_s)

    mode = state.mode
    if isinstance(mode, ExecutingMotion):
        _step_motion(state, mode, dt_s)
    elif isinstance(mode, Locomoting):
        _step_locomotion(state, mode, dt_s)
    elif isinstance(mode, LineTracing):
        _step_line_trace(state, mode, dt_s)
    return state


def _step_motion(state: RobotState, mode: ExecutingMotion, dt_s: float):
    motion = state.catalog.motion(mode.motion_id)
    mode.elapsed_s += dt_s
    frames = (mode.start_joints,) + motion.keyframes
    if mode.elapsed_s >= motion.duration_s:
        state.joints = frames[-1].copy()
        state.mode = Idle()
        return
    # Piecewise-linear through the keyframe chain.
    u = mode.elapsed_s / motion.duration_s * (len(frames) - 1)
    i = min(int(u), len(frames) - 2)
    state.joints = _lerp_joints(frames[i], frames[i + 1], u - i)


def _step_locomotion(state: RobotState, mode: Locomoting, dt_s: float):
    move_dt = min(dt_s, mode.remaining_s)
    v = state.spec.max_speed_mps
    pose = state.pose
    if mode.direction == "forward":
        pose.x_m += v * move_dt * math.cos(pose.heading_rad)
        pose.y_m += v * move_dt * math.sin(pose.heading_rad)
    elif mode.direction == "backward":
        pose.x_m -= v * move_dt * math.cos(pose.heading_rad)
        pose.y_m -= v * move_dt * math.sin(pose.heading_rad)
    elif mode.direction == "turn_left":
        pose.heading_rad = _wrap_angle(pose.heading_rad + TURN_RATE_RADPS * move_dt)
    elif mode.direction == "turn_right":
        pose.heading_rad = _wrap_angle(pose.heading_rad - TURN_RATE_RADPS * move_dt)
    mode.remaining_s -= dt_s
    if mode.remaining_s <= 1e-9:
        state.mode = Idle()


def _step_line_trace(state: RobotState, mode: LineTracing, dt_s: float):
    path, pose = mode.path, state.pose
    goal = path.waypoints[-1]
    dist_goal = math.dist(pose.position(), goal)
    if dist_goal <= ARRIVE_TOLERANCE_M:
        state.mode = Idle()
        return

    mode.arc_position_m = path.project(pose.position(), mode.arc_position_m)
    target = path.point_at(mode.arc_position_m + LOOKAHEAD_M)
    if math.dist(pose.position(), target) < 1e-9:
        target = goal
    alpha = _wrap_angle(math.atan2(target[1] - pose.y_m, target[0] - pose.x_m) - pose.heading_rad)

    omega = max(-PIVOT_RATE_RADPS, min(PIVOT_RATE_RADPS, HEADING_GAIN * alpha))
    pose.heading_rad = _wrap_angle(pose.heading_rad + omega * dt_s)
    # Slow through turns so the trace hugs the line; never exceed the cap.
    v = state.spec.max_speed_mps * max(0.0, math.cos(alpha))
    step_len = v * dt_s
    if dist_goal <= step_len and abs(alpha) < math.pi / 4:
        # Last step lands exactly on the target (within the speed cap).
        pose.x_m, pose.y_m = goal
        state.mode = Idle()
        return
    pose.x_m += step_len * math.cos(pose.heading_rad)
    pose.y_m += step_len * math.sin(pose.heading_rad)
