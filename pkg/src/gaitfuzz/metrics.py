"""Controller input metrics for gait: target angles and their scaling.

The swing hip is steered by the signed angle between the thigh and the
segment from the hip to where the thigh should end up: directly at the
foot target for level walking, or at the computed end position of the
knee when the landing requires a flexed knee (stair ascent).  That raw
angle shrinks as the step progresses, and its absolute range depends on
step size and limb lengths, so it is rescaled onto a fixed [-1, +1]
axis (-1 at the swing's start value, 0 where the thigh would hang
vertical, +1 on arrival) before the fuzzy controller sees it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError, GeometryError, ReachError
from .skeleton import LimbDimensions, Point

SCALED_DELTA_CLAMP = 1.2


def _wrap_pi(angle: float) -> float:
    wrapped = math.fmod(angle + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


@dataclass(frozen=True)
class FootTarget:
    """Where the swing heel should land, and how.

    ``position`` is the desired heel (ankle point) at touchdown,
    ``surface_tangent`` the landing surface direction used to level the
    sole, and ``required_knee_flexion`` the knee angle the landing calls
    for (zero on level ground).
    """

    position: Point
    surface_tangent: Point = (1.0, 0.0)
    required_knee_flexion: float = 0.0

    def __post_init__(self):
        x, y = self.position
        tx, ty = self.surface_tangent
        if not all(math.isfinite(v) for v in (x, y, tx, ty, self.required_knee_flexion)):
            raise ConfigurationError("foot target fields must be finite")
        norm = math.hypot(tx, ty)
        if abs(norm - 1.0) > 1e-9:
            if norm == 0.0:
                raise ConfigurationError("surface tangent must be non-zero")
            object.__setattr__(self, "surface_tangent", (tx / norm, ty / norm))


@dataclass(frozen=True)
class DeltaAnchors:
    """Raw metric values pinned to scaled -1 / 0 / +1."""

    at_start: float
    at_zero_rotation: float
    at_end: float

    def __post_init__(self):
        vals = (self.at_start, self.at_zero_rotation, self.at_end)
        if not all(math.isfinite(v) for v in vals):
            raise ConfigurationError("delta anchors must be finite")
        d1 = self.at_zero_rotation - self.at_start
        d2 = self.at_end - self.at_zero_rotation
        if d1 == 0.0 or d2 == 0.0 or (d1 > 0.0) != (d2 > 0.0):
            raise ConfigurationError(
                "delta anchors must be pairwise distinct and monotone: "
                f"{vals}"
            )


@dataclass(frozen=True)
class DeltaMetric:
    """A raw hip metric value together with its anchors and scaled form."""

    raw: float
    anchors: DeltaAnchors
    scaled: float


def alpha(current_angle: float, target_angle: float) -> float:
    """Signed shortest rotation from ``current`` to ``target``, in (-pi, pi]."""
    return _wrap_pi(target_angle - current_angle)


def _signed_angle(ux: float, uy: float, vx: float, vy: float) -> float:
    """Signed angle rotating direction u onto v (counter-clockwise positive)."""
    cross = ux * vy - uy * vx
    dot = ux * vx + uy * vy
    return math.atan2(cross, dot)


def delta_level(hip: Point, knee: Point, target: FootTarget) -> float:
    """Angle at the hip between the thigh and the hip-to-target segment.

    Positive means the thigh still has to rotate forward (flexion) to
    point at the target.
    """
    hx, hy = hip
    kx, ky = knee
    tx, ty = target.position
    ux, uy = kx - hx, ky - hy
    vx, vy = tx - hx, ty - hy
    if ux == 0.0 and uy == 0.0:
        raise GeometryError("hip and knee coincide; thigh direction undefined")
    if vx == 0.0 and vy == 0.0:
        raise GeometryError("hip and target coincide; bearing undefined")
    return _signed_angle(ux, uy, vx, vy)


def knee_end_position(
    hip: Point, dims: LimbDimensions, target: FootTarget
) -> tuple[Point, float]:
    """End position of the knee for a landing with the required flexion.

    The heel is taken to be planted at ``target.position``; the thigh
    angle that brings the two-segment chain closest to that heel (with
    the knee held at the required flexion) is solved in closed form via
    the law of cosines.  Returns the knee point and that thigh angle.
    The point moves as the hip moves, which is fine: the hip approaches
    it monotonically.
    """
    hx, hy = hip
    ax, ay = target.position
    dx, dy = ax - hx, ay - hy
    dist = math.hypot(dx, dy)
    if dist == 0.0:
        raise GeometryError("hip and landing heel coincide")
    reach = dims.thigh + dims.shank
    if dist > reach:
        raise ReachError(
            f"landing heel {dist - reach:.4f} m beyond maximum reach",
            shortfall=dist - reach,
        )
    k = target.required_knee_flexion
    # bearing of the hip->heel ray, measured from straight down, forward +
    lam = math.atan2(dx, -dy)
    # interior angle between the thigh and that ray for knee flexion k
    psi = math.atan2(dims.shank * math.sin(k), dims.thigh + dims.shank * math.cos(k))
    thigh_angle = lam + psi
    knee = (
        hx + dims.thigh * math.sin(thigh_angle),
        hy - dims.thigh * math.cos(thigh_angle),
    )
    return knee, thigh_angle


def delta_ascent(
    hip: Point, knee: Point, dims: LimbDimensions, target: FootTarget
) -> float:
    """Angle at the hip between the thigh and the hip-to-knee-end segment.

    Reduces to :func:`delta_level` against the derived knee end point
    when the required flexion is zero.
    """
    knee_end, _ = knee_end_position(hip, dims, target)
    return delta_level(hip, knee, FootTarget(knee_end))


def scale_delta(raw: float, anchors: DeltaAnchors) -> float:
    """Map a raw metric onto the fixed controller axis.

    Piecewise linear through (at_start, -1), (at_zero_rotation, 0),
    (at_end, +1); extrapolates linearly beyond the anchors and clamps at
    +-1.2 so controllers still see usable values from awkward states.
    """
    s, z, e = anchors.at_start, anchors.at_zero_rotation, anchors.at_end
    # pick the segment by position along the monotone anchor axis
    forward = e > s
    before_zero = raw < z if forward else raw > z
    if before_zero:
        scaled = -1.0 + (raw - s) / (z - s)
    else:
        scaled = (raw - z) / (e - z)
    if scaled > SCALED_DELTA_CLAMP:
        return SCALED_DELTA_CLAMP
    if scaled < -SCALED_DELTA_CLAMP:
        return -SCALED_DELTA_CLAMP
    return scaled


def delta_metric(raw: float, anchors: DeltaAnchors) -> DeltaMetric:
    return DeltaMetric(raw, anchors, scale_delta(raw, anchors))
