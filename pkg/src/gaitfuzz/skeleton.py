"""Sagittal-plane biped rig: dimensions, pose, forward kinematics.

Conventions (x forward, y up, all angles radians):

* hip angle 0 points the thigh straight down; positive hip is flexion
  (thigh swings forward / counter-clockwise),
* knee angle 0 keeps the shank collinear with the thigh; positive knee
  is flexion (shank folds backward),
* ankle angle 0 holds the sole perpendicular to the shank, so the sole
  is flush with flat ground in the zero pose,
* ball angle 0 keeps the toe segment collinear with the sole; positive
  lifts the toes.

These match the sign conventions of clinical gait plots so recorded
curves can be compared against reference data without sign fixes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError

Point = tuple[float, float]


@dataclass(frozen=True)
class LimbDimensions:
    """Segment lengths in meters."""

    thigh: float = 0.45
    shank: float = 0.45
    heel_to_ball: float = 0.15
    ball_to_toe: float = 0.07
    pelvis_height_offset: float = 0.10

    def __post_init__(self):
        strict = {
            "thigh": self.thigh,
            "shank": self.shank,
            "heel_to_ball": self.heel_to_ball,
        }
        for name, value in strict.items():
            if not (math.isfinite(value) and value > 0.0):
                raise ConfigurationError(f"{name} must be a positive length, got {value}")
        for name, value in (
            ("ball_to_toe", self.ball_to_toe),
            ("pelvis_height_offset", self.pelvis_height_offset),
        ):
            if not (math.isfinite(value) and value >= 0.0):
                raise ConfigurationError(f"{name} must be >= 0, got {value}")

    @property
    def leg_length(self) -> float:
        return self.thigh + self.shank


DEFAULT_DIMS = LimbDimensions()


@dataclass(frozen=True)
class LegAngles:
    """Joint angles of one leg (hip, knee, ankle, ball)."""

    hip: float = 0.0
    knee: float = 0.0
    ankle: float = 0.0
    ball: float = 0.0

    def replace(self, **kw) -> "LegAngles":
        fields = {"hip": self.hip, "knee": self.knee, "ankle": self.ankle, "ball": self.ball}
        fields.update(kw)
        return LegAngles(**fields)


@dataclass(frozen=True)
class JointLimits:
    """Per-joint (lo, hi) intervals used by robustness clamping."""

    hip: tuple[float, float] = (-0.7, 2.0)
    knee: tuple[float, float] = (0.0, 2.6)
    ankle: tuple[float, float] = (-0.9, 0.9)
    ball: tuple[float, float] = (0.0, 1.0)


DEFAULT_LIMITS = JointLimits()

JOINT_NAMES = ("hip", "knee", "ankle", "ball")


@dataclass(frozen=True)
class Pose:
    """World root position plus both legs' joint angles."""

    root: Point
    left: LegAngles
    right: LegAngles

    def leg(self, side: str) -> LegAngles:
        return self.left if side == "left" else self.right

    def with_leg(self, side: str, angles: LegAngles) -> "Pose":
        if side == "left":
            return Pose(self.root, angles, self.right)
        return Pose(self.root, self.left, angles)

    def with_root(self, root: Point) -> "Pose":
        return Pose(root, self.left, self.right)


@dataclass(frozen=True)
class LegChain:
    """World positions of one leg's joints, hip to toe."""

    hip: Point
    knee: Point
    ankle: Point
    ball: Point
    toe: Point


def forward_kinematics(pose: Pose, dims: LimbDimensions, leg: str) -> LegChain:
    """World joint positions for ``leg`` ("left" or "right").

    The hip sits ``pelvis_height_offset`` below the root; every segment
    length is preserved exactly.
    """
    a = pose.leg(leg)
    rx, ry = pose.root
    hx = rx
    hy = ry - dims.pelvis_height_offset
    h = a.hip
    kx = hx + dims.thigh * math.sin(h)
    ky = hy - dims.thigh * math.cos(h)
    shank_dir = h - a.knee
    ax = kx + dims.shank * math.sin(shank_dir)
    ay = ky - dims.shank * math.cos(shank_dir)
    sole_dir = shank_dir + a.ankle
    bx = ax + dims.heel_to_ball * math.cos(sole_dir)
    by = ay + dims.heel_to_ball * math.sin(sole_dir)
    toe_dir = sole_dir + a.ball
    tx = bx + dims.ball_to_toe * math.cos(toe_dir)
    ty = by + dims.ball_to_toe * math.sin(toe_dir)
    return LegChain((hx, hy), (kx, ky), (ax, ay), (bx, by), (tx, ty))


def sole_orientation(angles: LegAngles) -> float:
    """Angle of the heel-to-ball segment above the world x axis."""
    return angles.hip - angles.knee + angles.ankle


def sole_angle(
    pose: Pose,
    dims: LimbDimensions,
    leg: str,
    surface_tangent: Point = (1.0, 0.0),
) -> float:
    """Signed angle between the sole and the local surface tangent.

    Zero means the sole is flush; positive means the toes point above
    the surface. ``dims`` only matters for degenerate (zero-length)
    soles, which the dimension invariants already exclude.
    """
    del dims  # lengths cancel; the segment direction is set by the angles
    sole = sole_orientation(pose.leg(leg))
    tx, ty = surface_tangent
    tangent = math.atan2(ty, tx)
    return _wrap_pi(sole - tangent)


def _wrap_pi(angle: float) -> float:
    """Wrap into (-pi, pi]."""
    wrapped = math.fmod(angle + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


def clamp_to_limits(
    angles: LegAngles, limits: JointLimits = DEFAULT_LIMITS
) -> tuple[LegAngles, tuple[bool, bool, bool, bool]]:
    """Clamp each joint into its interval; flags mark clamped joints."""
    out = []
    flags = []
    for name in JOINT_NAMES:
        value = getattr(angles, name)
        lo, hi = getattr(limits, name)
        clamped = min(max(value, lo), hi)
        out.append(clamped)
        flags.append(clamped != value)
    return LegAngles(*out), tuple(flags)


def standing_pose(dims: LimbDimensions = DEFAULT_DIMS, ground: float = 0.0) -> Pose:
    """Both legs straight, feet together, heels on the ground line."""
    root_y = ground + dims.leg_length + dims.pelvis_height_offset
    zero = LegAngles()
    return Pose((0.0, root_y), zero, zero)
