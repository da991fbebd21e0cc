"""Figure rendering for recorded curve sets (SVG/PNG via matplotlib)."""
from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .curves import CurveSet, RESAMPLE_POINTS, _mean_cycle  # noqa: E402
from .errors import EmptyCycleError, InvalidInputError  # noqa: E402
from .skeleton import LegAngles, LimbDimensions, Pose, forward_kinematics  # noqa: E402

_DEG = 180.0 / math.pi


def render_curves(
    cs: CurveSet,
    out_path: str,
    joints: list[str] | None = None,
    stick_frames: int = 0,
) -> None:
    """Write a joint-curve chart, optionally with a stick-figure strip.

    The output format follows the file extension (``.svg`` is the
    default report format).
    """
    selected = joints if joints else cs.joints()
    selected = [j for j in selected if j in cs.series and cs.series[j]]
    if not selected:
        raise EmptyCycleError("no joint series to plot")

    nrows = 2 if stick_frames > 0 else 1
    fig, axes = plt.subplots(
        nrows, 1, figsize=(8, 4 * nrows),
        gridspec_kw={"height_ratios": [3, 1] if nrows == 2 else [1]},
    )
    ax = axes[0] if nrows == 2 else axes

    grid = np.linspace(0.0, 100.0, RESAMPLE_POINTS)
    for joint in selected:
        ax.plot(grid, _mean_cycle(cs, joint, grid) * _DEG, label=joint, linewidth=1.4)
    ax.set_xlabel("gait cycle [%]")
    ax.set_ylabel("joint angle [deg]")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="upper right", fontsize=8)
    title = "joint angle curves"
    if cs.meta.get("step_length"):
        title += f" (step {cs.meta['step_length']:.2f} m)"
    ax.set_title(title)

    if stick_frames > 0:
        _draw_stick_strip(axes[1], cs, stick_frames)

    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def _pose_at(cs: CurveSet, pct: float, dims: LimbDimensions) -> Pose:
    def value(joint: str) -> float:
        pts = cs.series[joint]
        xs = [p for p, _ in pts]
        ys = [a for _, a in pts]
        return float(np.interp(pct, xs, ys))

    if cs.root:
        rx = float(np.interp(pct, [p for p, _, _ in cs.root], [x for _, x, _ in cs.root]))
        ry = float(np.interp(pct, [p for p, _, _ in cs.root], [y for _, _, y in cs.root]))
    else:
        rx = pct / 100.0
        ry = dims.leg_length + dims.pelvis_height_offset
    left = LegAngles(value("left_hip"), value("left_knee"), value("left_ankle"), value("left_ball"))
    right = LegAngles(value("right_hip"), value("right_knee"), value("right_ankle"), value("right_ball"))
    return Pose((rx, ry), left, right)


def _draw_stick_strip(ax, cs: CurveSet, n: int) -> None:
    missing = [j for j in ("left_hip", "right_hip") if j not in cs.series or not cs.series[j]]
    if missing:
        raise InvalidInputError(f"stick figures need both legs recorded, missing {missing}")
    dims_meta = cs.meta.get("dims", {})
    dims = LimbDimensions(
        thigh=dims_meta.get("thigh", 0.45),
        shank=dims_meta.get("shank", 0.45),
        heel_to_ball=dims_meta.get("heel_to_ball", 0.15),
        ball_to_toe=dims_meta.get("ball_to_toe", 0.07),
        pelvis_height_offset=dims_meta.get("pelvis_height_offset", 0.10),
    )
    percents = np.linspace(0.0, 100.0, n)
    xs_seen = []
    for pct in percents:
        pose = _pose_at(cs, float(pct), dims)
        xs_seen.append(pose.root[0])
        for leg, color in (("left", "#1f77b4"), ("right", "#d62728")):
            ch = forward_kinematics(pose, dims, leg)
            px = [pose.root[0], ch.hip[0], ch.knee[0], ch.ankle[0], ch.ball[0], ch.toe[0]]
            py = [pose.root[1], ch.hip[1], ch.knee[1], ch.ankle[1], ch.ball[1], ch.toe[1]]
            ax.plot(px, py, "-", color=color, linewidth=1.0, alpha=0.85)
            ax.plot(px, py, ".", color=color, markersize=2.0)

    terrain = cs.meta.get("terrain", {"kind": "flat"})
    x_lo = min(xs_seen) - 0.5
    x_hi = max(xs_seen) + 0.5
    if terrain.get("kind") == "stairs":
        riser, tread = terrain["riser"], terrain["tread"]
        xs, ys = [], []
        j = math.floor(x_lo / tread)
        while j * tread < x_hi:
            xs.extend([j * tread, (j + 1) * tread])
            ys.extend([j * riser, j * riser])
            j += 1
        ax.step(xs, ys, where="post", color="#555555", linewidth=1.0)
    elif terrain.get("kind") == "incline":
        slope = math.tan(terrain.get("angle", 0.0))
        ax.plot([x_lo, x_hi], [slope * x_lo, slope * x_hi], color="#555555", linewidth=1.0)
    else:
        ax.plot([x_lo, x_hi], [0.0, 0.0], color="#555555", linewidth=1.0)
    ax.set_aspect("equal")
    ax.set_title("pose strip over one cycle", fontsize=9)
    ax.tick_params(labelsize=7)
