"""Gait engine: phase machine, metric wiring, integration, foot pinning.

Each frame the engine measures the bound metrics (scaled hip progress,
per-joint angle-to-target, sole-vs-surface angle), evaluates the bound
fuzzy controllers to angular velocities, integrates the joints with an
explicit Euler step at a fixed dt, and re-solves the root position so
the planted stance heel never moves.  A swing ends when the scaled hip
metric saturates and the swing heel is on target; legs then swap after
a short double-support dwell.

Plans are made once per swing: the touchdown configuration (where the
hip ends up, how flexed the landing knee must be, where the stance hip
must rotate to) is solved in closed form from the terrain, and the
metric anchors are frozen from it, so every controller sees the same
fixed [-1, +1] progress axis regardless of step size or limb lengths.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

from . import metrics as gm
from .dsl import ControllerSet
from .errors import ConfigurationError, GeometryError, InvalidInputError, ReachError
from .fuzzy import CompiledController
from .skeleton import (
    DEFAULT_DIMS,
    DEFAULT_LIMITS,
    JointLimits,
    LegAngles,
    LimbDimensions,
    Point,
    Pose,
    clamp_to_limits,
    forward_kinematics,
    standing_pose,
)

STAIR_NOSE_INSET = 0.03

EVENT_STEP_COMPLETED = "step_completed"
EVENT_TARGET_REACHED = "target_reached"
EVENT_CLAMPED = "clamped"
EVENT_WATCHDOG = "watchdog_reset"

_METRIC_ALPHA = 0
_METRIC_DELTA = 1
_METRIC_SOLE = 2
_METRIC_IDS = {"alpha": _METRIC_ALPHA, "delta_scaled": _METRIC_DELTA, "sole_angle": _METRIC_SOLE}

LEGS = ("left", "right")
JOINT_KEYS = (
    "left_hip", "left_knee", "left_ankle", "left_ball",
    "right_hip", "right_knee", "right_ankle", "right_ball",
)


def _other(leg: str) -> str:
    return "right" if leg == "left" else "left"


@dataclass(frozen=True)
class Terrain:
    """Walking surface: flat ground, a constant incline, or a staircase."""

    kind: str
    angle: float = 0.0
    riser: float = 0.0
    tread: float = 0.0

    def __post_init__(self):
        if self.kind == "flat":
            pass
        elif self.kind == "incline":
            if not (math.isfinite(self.angle) and abs(self.angle) <= 0.35):
                raise ConfigurationError(
                    f"incline angle must be within +-0.35 rad, got {self.angle}"
                )
        elif self.kind == "stairs":
            if not (0.0 < self.riser <= 0.3):
                raise ConfigurationError(f"riser must be in (0, 0.3] m, got {self.riser}")
            if not (0.15 < self.tread <= 0.5):
                raise ConfigurationError(f"tread must be in (0.15, 0.5] m, got {self.tread}")
        else:
            raise ConfigurationError(f"unknown terrain kind {self.kind!r}")

    @staticmethod
    def flat() -> "Terrain":
        return Terrain("flat")

    @staticmethod
    def incline(angle: float) -> "Terrain":
        return Terrain("incline", angle=angle)

    @staticmethod
    def stairs(riser: float, tread: float) -> "Terrain":
        return Terrain("stairs", riser=riser, tread=tread)

    @property
    def gait_mode(self) -> str:
        return "ascent" if self.kind == "stairs" else "level"

    def surface_height(self, x: float) -> float:
        """Ground height under x. Stair treads start INSET behind each heel."""
        if self.kind == "flat":
            return 0.0
        if self.kind == "incline":
            return math.tan(self.angle) * x
        return self.riser * math.floor((x + STAIR_NOSE_INSET) / self.tread)

    def surface_tangent(self, x: float = 0.0) -> Point:
        del x
        if self.kind == "incline":
            return (math.cos(self.angle), math.sin(self.angle))
        return (1.0, 0.0)

    def nose_positions(self, x_lo: float, x_hi: float) -> list[Point]:
        """Step edges (nose point of each tread) with x in [x_lo, x_hi]."""
        if self.kind != "stairs":
            return []
        noses = []
        j = math.ceil((x_lo + STAIR_NOSE_INSET) / self.tread)
        while True:
            x = j * self.tread - STAIR_NOSE_INSET
            if x > x_hi:
                break
            noses.append((x, j * self.riser))
            j += 1
        return noses


@dataclass
class GaitConfig:
    """Everything a run needs; treat as read-only once created."""

    controllers: ControllerSet
    step_length: float = 0.6
    dims: LimbDimensions = DEFAULT_DIMS
    dt: float = 1.0 / 120.0
    terrain: Terrain = field(default_factory=Terrain.flat)
    max_phase_duration: float = 2.0
    double_support_dwell: float = 0.05
    limits: JointLimits = DEFAULT_LIMITS
    placement_tolerance: float = 0.01
    completion_scaled: float = 0.995
    _runtime: Optional["_Runtime"] = field(
        default=None, init=False, repr=False, compare=False
    )

    def __post_init__(self):
        if not (0.0 < self.dt <= 1.0 / 30.0):
            raise ConfigurationError(f"dt must be in (0, 1/30] s, got {self.dt}")
        if not (0.0 < self.step_length < self.dims.leg_length):
            raise ConfigurationError(
                f"step length must be in (0, {self.dims.leg_length}) m, "
                f"got {self.step_length}"
            )
        if self.max_phase_duration <= 0.0:
            raise ConfigurationError("max_phase_duration must be positive")

    def runtime(self) -> "_Runtime":
        if self._runtime is None:
            self._runtime = _Runtime(self.controllers)
        return self._runtime


_JOINT_INDEX = {"hip": 0, "knee": 1, "ankle": 2, "ball": 3}


class _Runtime:
    """Bindings compiled per gait mode for the per-frame loop.

    Each entry is (is_swing, joint index, evaluator arity, evaluator,
    first metric id, second metric id) with the role's strings resolved
    up front so the frame loop never touches them.
    """

    def __init__(self, cs: ControllerSet):
        compiled: dict[str, CompiledController] = {}
        self.modes: dict[str, list] = {}
        self._checked: set[str] = set()
        for b in cs.bindings:
            ctl = compiled.get(b.controller)
            if ctl is None:
                ctl = CompiledController(cs.controller(b.controller))
                compiled[b.controller] = ctl
            ids = tuple(_METRIC_IDS[m] for m in b.metrics)
            is_swing = b.role.endswith("_swing")
            joint = _JOINT_INDEX[b.role.rsplit("_", 1)[0]]
            entry = (
                is_swing,
                joint,
                ctl.arity,
                ctl.eval1 if ctl.arity == 1 else ctl.eval2,
                ids[0],
                ids[1] if len(ids) > 1 else -1,
            )
            self.modes.setdefault(b.mode, []).append(entry)

    def bindings_for(self, mode: str):
        entries = self.modes.get(mode)
        if mode not in self._checked:
            if not entries:
                raise ConfigurationError(f"no controllers bound for gait mode '{mode}'")
            if not any(e[0] and e[1] == 0 for e in entries):
                raise ConfigurationError(f"gait mode '{mode}' has no hip_swing binding")
            self._checked.add(mode)
        return entries


@dataclass(frozen=True)
class SwingPlan:
    """Frozen-per-swing touchdown solution and metric anchors."""

    target: gm.FootTarget
    anchors: gm.DeltaAnchors
    swing_hip_end: float
    swing_knee_end: float
    stance_hip_end: float
    stance_knee_end: float
    hip_end: Point


@dataclass(frozen=True)
class GaitState:
    """Complete simulation state between frames (immutable snapshot)."""

    pose: Pose
    swing_leg: str
    phase: str  # "swing" | "double_support"
    phase_time: float
    time: float
    plan: SwingPlan | None
    pinned: Point | None
    targets: tuple[gm.FootTarget | None, gm.FootTarget | None]  # (left, right)
    delta: gm.DeltaMetric | None
    cycle_count: int
    reached: bool

    def target_for(self, leg: str) -> gm.FootTarget | None:
        return self.targets[0] if leg == "left" else self.targets[1]


@dataclass(frozen=True)
class FrameOutput:
    """One simulated frame: the new pose plus everything observers need."""

    time: float
    pose: Pose
    joint_velocities: dict[str, float]
    scaled_delta: float | None
    events: tuple[str, ...]
    phase: str
    swing_leg: str
    target: Point | None


def _zero_velocities() -> dict[str, float]:
    return {k: 0.0 for k in JOINT_KEYS}


def initial_state(config: GaitConfig) -> GaitState:
    """Standing start: feet together under the root, first swing is left."""
    pose = standing_pose(config.dims, ground=config.terrain.surface_height(0.0))
    return GaitState(
        pose=pose,
        swing_leg="left",
        phase="double_support",
        phase_time=0.0,
        time=0.0,
        plan=None,
        pinned=None,
        targets=(None, None),
        delta=None,
        cycle_count=0,
        reached=False,
    )


def plan_target(state: GaitState, config: GaitConfig) -> gm.FootTarget:
    """Where the current swing foot should land, per the terrain."""
    return _plan_swing(state.pose, config, state.swing_leg).target


def _plan_swing(pose: Pose, config: GaitConfig, swing_leg: str) -> SwingPlan:
    dims = config.dims
    terrain = config.terrain
    stance_leg = _other(swing_leg)
    st_chain = forward_kinematics(pose, dims, stance_leg)
    sw_chain = forward_kinematics(pose, dims, swing_leg)
    sx, sy = st_chain.ankle
    leg_len = dims.leg_length

    if terrain.kind == "stairs":
        # canonical heel spot of the next tread (INSET past its nose), so
        # small per-step placement errors never accumulate into the grid
        next_tread = math.floor((sx + STAIR_NOSE_INSET) / terrain.tread) + 1
        tx = next_tread * terrain.tread
        ty = terrain.surface_height(tx)
        half = (tx - sx) / 2.0
        if half >= leg_len:
            raise ReachError(
                f"tread {terrain.tread} m exceeds leg reach", shortfall=half - leg_len
            )
        hip_end = (sx + half, sy + math.sqrt(leg_len * leg_len - half * half))
        dx, dy = tx - hip_end[0], ty - hip_end[1]
        r = math.hypot(dx, dy)
        if r > leg_len:
            raise ReachError(
                f"stair target {r - leg_len:.4f} m beyond reach",
                shortfall=r - leg_len,
            )
        min_r = abs(dims.thigh - dims.shank)
        if r <= min_r:
            raise ReachError(
                f"stair target inside minimum reach by {min_r - r:.4f} m",
                shortfall=min_r - r,
            )
        cos_k = (dims.thigh**2 + dims.shank**2 - r * r) / (2.0 * dims.thigh * dims.shank)
        knee_end_flexion = math.pi - math.acos(max(-1.0, min(1.0, cos_k)))
        target = gm.FootTarget((tx, ty), terrain.surface_tangent(), knee_end_flexion)
        _, swing_hip_end = gm.knee_end_position(hip_end, dims, target)
    else:
        tangent = terrain.surface_tangent()
        tx = sx + config.step_length * tangent[0]
        ty = terrain.surface_height(tx)
        target = gm.FootTarget((tx, ty), tangent, 0.0)
        dx, dy = tx - sx, ty - sy
        d = math.hypot(dx, dy)
        if d >= 2.0 * leg_len:
            raise ReachError(
                f"step {d:.3f} m needs legs longer than {d / 2:.3f} m",
                shortfall=d / 2.0 - leg_len,
            )
        if d == 0.0:
            raise GeometryError("stance foot and target coincide")
        h_perp = math.sqrt(leg_len * leg_len - (d / 2.0) ** 2)
        ux, uy = dx / d, dy / d
        nx, ny = -uy, ux
        if ny < 0.0:
            nx, ny = -nx, -ny
        hip_end = ((sx + tx) / 2.0 + h_perp * nx, (sy + ty) / 2.0 + h_perp * ny)
        swing_hip_end = math.atan2(tx - hip_end[0], hip_end[1] - ty)

    stance_hip_end = math.atan2(sx - hip_end[0], hip_end[1] - sy)

    hip_now = sw_chain.hip
    if terrain.kind == "stairs":
        raw_start = gm.delta_ascent(hip_now, sw_chain.knee, dims, target)
        _, zero_thigh = gm.knee_end_position(hip_now, dims, target)
        raw_zero = zero_thigh
    else:
        raw_start = gm.delta_level(hip_now, sw_chain.knee, target)
        raw_zero = math.atan2(target.position[0] - hip_now[0], hip_now[1] - target.position[1])

    anchors = _repair_anchors(raw_start, raw_zero)
    return SwingPlan(
        target=target,
        anchors=anchors,
        swing_hip_end=swing_hip_end,
        swing_knee_end=target.required_knee_flexion,
        stance_hip_end=stance_hip_end,
        stance_knee_end=0.0,
        hip_end=hip_end,
    )


def _repair_anchors(at_start: float, at_zero: float, at_end: float = 0.0) -> gm.DeltaAnchors:
    """Fix degenerate anchor triples (standing starts, awkward poses)."""
    span = at_start - at_end
    if abs(span) < 1e-4:
        at_start = at_end + (0.05 if span >= 0.0 else -0.05)
    lo = min(at_start, at_end)
    hi = max(at_start, at_end)
    margin = 1e-6 * max(1.0, abs(at_start - at_end))
    if not (lo + margin < at_zero < hi - margin):
        at_zero = 0.5 * (at_start + at_end)
    return gm.DeltaAnchors(at_start, at_zero, at_end)


def _swing_delta_raw(hip: Point, knee: Point, config: GaitConfig, target: gm.FootTarget) -> float:
    if config.terrain.kind == "stairs":
        try:
            return gm.delta_ascent(hip, knee, config.dims, target)
        except ReachError:
            # hip momentarily too far from the landing heel: steer at the
            # heel itself until the chain solve becomes feasible again
            return gm.delta_level(hip, knee, gm.FootTarget(target.position))
    return gm.delta_level(hip, knee, target)


def step_frame(state: GaitState, config: GaitConfig) -> tuple[GaitState, FrameOutput]:
    """Advance the simulation by one fixed timestep."""
    if state.phase == "double_support":
        return _step_double_support(state, config)
    return _step_swing(state, config)


def _step_double_support(state: GaitState, config: GaitConfig) -> tuple[GaitState, FrameOutput]:
    dt = config.dt
    time = state.time + dt
    phase_time = state.phase_time + dt
    if phase_time + 1e-12 >= config.double_support_dwell:
        plan = _plan_swing(state.pose, config, state.swing_leg)
        stance_leg = _other(state.swing_leg)
        pinned = forward_kinematics(state.pose, config.dims, stance_leg).ankle
        delta0 = gm.delta_metric(plan.anchors.at_start, plan.anchors)
        targets = _with_target(state.targets, state.swing_leg, plan.target)
        new_state = GaitState(
            pose=state.pose,
            swing_leg=state.swing_leg,
            phase="swing",
            phase_time=0.0,
            time=time,
            plan=plan,
            pinned=pinned,
            targets=targets,
            delta=delta0,
            cycle_count=state.cycle_count,
            reached=False,
        )
        frame = FrameOutput(
            time, state.pose, _zero_velocities(), delta0.scaled, (), "swing",
            state.swing_leg, plan.target.position,
        )
        return new_state, frame
    new_state = replace(state, phase_time=phase_time, time=time)
    frame = FrameOutput(
        time, state.pose, _zero_velocities(), None, (), "double_support",
        state.swing_leg, None,
    )
    return new_state, frame


def _with_target(
    targets: tuple[gm.FootTarget | None, gm.FootTarget | None],
    leg: str,
    target: gm.FootTarget,
) -> tuple[gm.FootTarget | None, gm.FootTarget | None]:
    if leg == "left":
        return (target, targets[1])
    return (targets[0], target)


def _step_swing(state: GaitState, config: GaitConfig) -> tuple[GaitState, FrameOutput]:
    plan = state.plan
    if plan is None:
        raise InvalidInputError("swing phase without a plan")
    dt = config.dt
    dims = config.dims
    pose = state.pose
    swing_leg = state.swing_leg
    swing_is_left = swing_leg == "left"
    stance_leg = _other(swing_leg)
    entries = config.runtime().bindings_for(config.terrain.gait_mode)

    thigh = dims.thigh
    shank = dims.shank
    root_x, root_y = pose.root
    hip_x = root_x
    hip_y = root_y - dims.pelvis_height_offset
    sw = pose.leg(swing_leg)
    st = pose.leg(stance_leg)

    sw_knee_pre = (hip_x + thigh * math.sin(sw.hip), hip_y - thigh * math.cos(sw.hip))
    raw_pre = _swing_delta_raw((hip_x, hip_y), sw_knee_pre, config, plan.target)
    s_pre = gm.scale_delta(raw_pre, plan.anchors)

    tts = plan.target.surface_tangent
    target_tangent_angle = math.atan2(tts[1], tts[0])
    st_tan = config.terrain.surface_tangent()
    stance_tangent_angle = math.atan2(st_tan[1], st_tan[0])

    # velocities indexed left hip/knee/ankle/ball then right
    vels = [0.0] * 8
    for is_swing, joint, arity, evaluate_fn, m0, m1 in entries:
        angles = sw if is_swing else st
        v0 = _metric_value(m0, is_swing, joint, angles, s_pre, plan,
                           target_tangent_angle, stance_tangent_angle)
        if arity == 1:
            v = evaluate_fn(v0)
        else:
            v = evaluate_fn(
                v0,
                _metric_value(m1, is_swing, joint, angles, s_pre, plan,
                              target_tangent_angle, stance_tangent_angle),
            )
        vels[(0 if is_swing == swing_is_left else 4) + joint] = v

    events: list[str] = []
    sw_base = 0 if swing_is_left else 4
    st_base = 4 - sw_base
    lim = config.limits
    new_sw, sw_clamped = _integrate_leg(sw, vels, sw_base, dt, lim)
    new_st, st_clamped = _integrate_leg(st, vels, st_base, dt, lim)
    if sw_clamped or st_clamped:
        events.append(EVENT_CLAMPED)

    # stance chain under the old root, then shift the root so the stance
    # heel lands exactly back on its pinned world position
    st_dir = new_st.hip - new_st.knee
    st_ankle_x = hip_x + thigh * math.sin(new_st.hip) + shank * math.sin(st_dir)
    st_ankle_y = hip_y - thigh * math.cos(new_st.hip) - shank * math.cos(st_dir)
    pin = state.pinned if state.pinned is not None else (st_ankle_x, st_ankle_y)
    shift_x = pin[0] - st_ankle_x
    shift_y = pin[1] - st_ankle_y
    new_root = (root_x + shift_x, root_y + shift_y)
    if swing_is_left:
        new_pose = Pose(new_root, new_sw, new_st)
    else:
        new_pose = Pose(new_root, new_st, new_sw)

    sw_dir = new_sw.hip - new_sw.knee
    sw_kx = hip_x + thigh * math.sin(new_sw.hip)
    sw_ky = hip_y - thigh * math.cos(new_sw.hip)
    sw_hip = (hip_x + shift_x, hip_y + shift_y)
    sw_knee = (sw_kx + shift_x, sw_ky + shift_y)
    sw_ankle = (
        sw_kx + shank * math.sin(sw_dir) + shift_x,
        sw_ky - shank * math.cos(sw_dir) + shift_y,
    )

    raw_post = _swing_delta_raw(sw_hip, sw_knee, config, plan.target)
    delta_post = gm.delta_metric(raw_post, plan.anchors)
    velocities = dict(zip(JOINT_KEYS, vels))

    time = state.time + dt
    phase_time = state.phase_time + dt
    placement = math.hypot(
        sw_ankle[0] - plan.target.position[0], sw_ankle[1] - plan.target.position[1]
    )
    on_target = placement <= config.placement_tolerance
    reached = state.reached
    if on_target and not reached:
        events.append(EVENT_TARGET_REACHED)
        reached = True

    completed = delta_post.scaled >= config.completion_scaled and on_target
    timed_out = phase_time > config.max_phase_duration
    if completed or timed_out:
        if timed_out and not completed:
            events.append(EVENT_WATCHDOG)
        events.append(EVENT_STEP_COMPLETED)
        targets = _with_target(state.targets, swing_leg, plan.target)
        new_state = GaitState(
            pose=new_pose,
            swing_leg=stance_leg,
            phase="double_support",
            phase_time=0.0,
            time=time,
            plan=None,
            pinned=None,
            targets=targets,
            delta=None,
            cycle_count=state.cycle_count + 1,
            reached=False,
        )
    else:
        new_state = GaitState(
            pose=new_pose,
            swing_leg=swing_leg,
            phase="swing",
            phase_time=phase_time,
            time=time,
            plan=plan,
            pinned=pin,
            targets=state.targets,
            delta=delta_post,
            cycle_count=state.cycle_count,
            reached=reached,
        )
    frame = FrameOutput(
        time, new_pose, velocities, delta_post.scaled, tuple(events),
        new_state.phase, swing_leg, plan.target.position,
    )
    return new_state, frame


def _integrate_leg(
    a: LegAngles, vels: list, base: int, dt: float, lim: JointLimits
) -> tuple[LegAngles, bool]:
    h = a.hip + vels[base] * dt
    k = a.knee + vels[base + 1] * dt
    an = a.ankle + vels[base + 2] * dt
    b = a.ball + vels[base + 3] * dt
    clamped = False
    lo, hi = lim.hip
    if h < lo:
        h = lo
        clamped = True
    elif h > hi:
        h = hi
        clamped = True
    lo, hi = lim.knee
    if k < lo:
        k = lo
        clamped = True
    elif k > hi:
        k = hi
        clamped = True
    lo, hi = lim.ankle
    if an < lo:
        an = lo
        clamped = True
    elif an > hi:
        an = hi
        clamped = True
    lo, hi = lim.ball
    if b < lo:
        b = lo
        clamped = True
    elif b > hi:
        b = hi
        clamped = True
    return LegAngles(h, k, an, b), clamped


def _metric_value(
    metric_id: int,
    is_swing: bool,
    joint: int,
    angles: LegAngles,
    s: float,
    plan: SwingPlan,
    target_tangent_angle: float,
    stance_tangent_angle: float,
) -> float:
    if metric_id == _METRIC_DELTA:
        return s
    if metric_id == _METRIC_SOLE:
        tangent = target_tangent_angle if is_swing else stance_tangent_angle
        return _wrap_pi(angles.hip - angles.knee + angles.ankle - tangent)
    # alpha: remaining rotation of this joint toward its planned end angle
    if joint == 0:
        end = plan.swing_hip_end if is_swing else plan.stance_hip_end
        return gm.alpha(angles.hip, end)
    if joint == 1:
        end = plan.swing_knee_end if is_swing else plan.stance_knee_end
        return gm.alpha(angles.knee, end)
    if joint == 3:
        return gm.alpha(angles.ball, 0.0)
    # ankle: remaining rotation toward a sole flush with the relevant surface
    tangent = target_tangent_angle if is_swing else stance_tangent_angle
    return -_wrap_pi(angles.hip - angles.knee + angles.ankle - tangent)


def _wrap_pi(angle: float) -> float:
    wrapped = math.fmod(angle + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


def perturb(
    state: GaitState, joint_role: str, offset: float, limits: JointLimits = DEFAULT_LIMITS
) -> GaitState:
    """Offset one joint of the current swing or stance leg (clamped).

    Exists for robustness probing: the controllers must recover from the
    altered state without replanning.
    """
    if joint_role.endswith("_swing"):
        leg = state.swing_leg
    elif joint_role.endswith("_stance"):
        leg = _other(state.swing_leg)
    else:
        raise InvalidInputError(f"unknown joint role {joint_role!r}")
    joint = joint_role.rsplit("_", 1)[0]
    angles = state.pose.leg(leg)
    if joint not in ("hip", "knee", "ankle", "ball"):
        raise InvalidInputError(f"unknown joint role {joint_role!r}")
    moved = angles.replace(**{joint: getattr(angles, joint) + offset})
    clamped, _ = clamp_to_limits(moved, limits)
    return replace(state, pose=state.pose.with_leg(leg, clamped), reached=False)


def run(
    config: GaitConfig,
    duration: float | None = None,
    n_steps: int | None = None,
) -> list[FrameOutput]:
    """Simulate until a step count or a duration is reached.

    Deterministic: identical configs produce bit-identical frame lists.
    The first element is the untouched initial standing frame.
    """
    if (duration is None) == (n_steps is None):
        raise InvalidInputError("specify exactly one of duration or n_steps")
    state = initial_state(config)
    frames = [
        FrameOutput(
            0.0, state.pose, _zero_velocities(), None, (), state.phase,
            state.swing_leg, None,
        )
    ]
    completed = 0
    while True:
        if n_steps is not None and completed >= n_steps:
            break
        if duration is not None and state.time >= duration - 1e-12:
            break
        state, frame = step_frame(state, config)
        frames.append(frame)
        if EVENT_STEP_COMPLETED in frame.events:
            completed += 1
    return frames
