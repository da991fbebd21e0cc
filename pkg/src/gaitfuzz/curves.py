"""Record joint-angle trajectories and compare them across runs.

Frames are cut into gait cycles (heel-strike to next heel-strike of the
same leg, the standard plotting convention), normalized to cycle
percent, and exported as CSV (degrees, for spreadsheets and reference
data) or JSON (radians, lossless round trip).  Comparison resamples
both curve sets onto a common 200-point cycle grid and reports RMS
error per joint, averaging across recorded cycles.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .engine import EVENT_STEP_COMPLETED, FrameOutput, GaitConfig
from .errors import EmptyCycleError, InvalidInputError

JOINT_ORDER = (
    "left_hip", "left_knee", "left_ankle", "left_ball",
    "right_hip", "right_knee", "right_ankle", "right_ball",
)

RESAMPLE_POINTS = 200

_DEG = 180.0 / math.pi


@dataclass
class CurveSet:
    """Per-joint (cycle_percent, angle) samples for one or more cycles."""

    meta: dict
    series: dict[str, list[tuple[float, float]]]
    cycles: list[tuple[float, float]]
    root: list[tuple[float, float, float]] = field(default_factory=list)

    def joints(self) -> list[str]:
        return [j for j in JOINT_ORDER if j in self.series]

    def split_cycles(self, joint: str) -> list[list[tuple[float, float]]]:
        """Samples grouped per cycle (the percent axis restarts at each)."""
        samples = self.series[joint]
        groups: list[list[tuple[float, float]]] = []
        current: list[tuple[float, float]] = []
        last = math.inf
        for pct, ang in samples:
            if pct < last and current:
                groups.append(current)
                current = []
            current.append((pct, ang))
            last = pct
        if current:
            groups.append(current)
        return groups


def _angle_of(frame: FrameOutput, joint: str) -> float:
    leg, name = joint.split("_", 1)
    return getattr(frame.pose.leg(leg), name)


def record(frames: list[FrameOutput], config: GaitConfig | None = None) -> CurveSet:
    """Cut frames into same-leg-strike cycles and normalize the time axis.

    The leg of the first completed step defines the cycle boundaries;
    raises :class:`EmptyCycleError` when fewer than two of its strikes
    are present.
    """
    strikes = [
        (f.time, f.swing_leg) for f in frames if EVENT_STEP_COMPLETED in f.events
    ]
    if not strikes:
        raise EmptyCycleError("no completed step in the recording")
    lead_leg = strikes[0][1]
    lead_times = [t for t, leg in strikes if leg == lead_leg]
    if len(lead_times) < 2:
        raise EmptyCycleError(
            f"no full cycle: leg '{lead_leg}' completed only {len(lead_times)} step(s)"
        )
    cycles = list(zip(lead_times, lead_times[1:]))

    meta: dict = {}
    if config is not None:
        terrain = {"kind": config.terrain.kind}
        if config.terrain.kind == "incline":
            terrain["angle"] = config.terrain.angle
        elif config.terrain.kind == "stairs":
            terrain["riser"] = config.terrain.riser
            terrain["tread"] = config.terrain.tread
        meta = {
            "step_length": config.step_length,
            "terrain": terrain,
            "dims": {
                "thigh": config.dims.thigh,
                "shank": config.dims.shank,
                "heel_to_ball": config.dims.heel_to_ball,
                "ball_to_toe": config.dims.ball_to_toe,
                "pelvis_height_offset": config.dims.pelvis_height_offset,
            },
            "dt": config.dt,
        }

    series: dict[str, list[tuple[float, float]]] = {j: [] for j in JOINT_ORDER}
    root: list[tuple[float, float, float]] = []
    for t0, t1 in cycles:
        span = t1 - t0
        for f in frames:
            if f.time < t0 or f.time > t1:
                continue
            pct = (f.time - t0) / span * 100.0
            for joint in JOINT_ORDER:
                series[joint].append((pct, _angle_of(f, joint)))
            root.append((pct, f.pose.root[0], f.pose.root[1]))
    return CurveSet(meta=meta, series=series, cycles=cycles, root=root)


# ---------------------------------------------------------------------------
# Export / import


def export(cs: CurveSet, format: str) -> bytes:
    """CSV (cycle percent + joint angles in degrees) or JSON (lossless)."""
    if not cs.series or not any(cs.series.values()):
        raise EmptyCycleError("nothing to export")
    if format == "csv":
        lines = ["cycle_percent," + ",".join(JOINT_ORDER)]
        n = len(next(iter(cs.series.values())))
        for i in range(n):
            pct = cs.series[JOINT_ORDER[0]][i][0]
            row = [f"{pct:.6f}"]
            for joint in JOINT_ORDER:
                row.append(f"{cs.series[joint][i][1] * _DEG:.6f}")
            lines.append(",".join(row))
        return ("\n".join(lines) + "\n").encode("utf-8")
    if format == "json":
        doc = {
            "meta": cs.meta,
            "cycles": [[t0, t1] for t0, t1 in cs.cycles],
            "series": {
                joint: [[pct, ang] for pct, ang in samples]
                for joint, samples in cs.series.items()
            },
            "root": [[pct, x, y] for pct, x, y in cs.root],
        }
        return (json.dumps(doc, indent=1) + "\n").encode("utf-8")
    raise InvalidInputError(f"unknown export format {format!r}")


def load_json(data: bytes | str) -> CurveSet:
    doc = json.loads(data)
    return CurveSet(
        meta=doc.get("meta", {}),
        series={
            joint: [(p, a) for p, a in samples]
            for joint, samples in doc["series"].items()
        },
        cycles=[(t0, t1) for t0, t1 in doc["cycles"]],
        root=[(p, x, y) for p, x, y in doc.get("root", [])],
    )


def load_csv(data: bytes | str) -> CurveSet:
    """Ingest reference curves written in the export CSV schema."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    lines = [ln for ln in text.replace("\r\n", "\n").split("\n") if ln.strip()]
    if not lines:
        raise EmptyCycleError("empty curve file")
    header = [h.strip() for h in lines[0].split(",")]
    if header[0] != "cycle_percent":
        raise InvalidInputError("first CSV column must be cycle_percent")
    joints = header[1:]
    series: dict[str, list[tuple[float, float]]] = {j: [] for j in joints}
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(header):
            raise InvalidInputError(
                f"CSV row has {len(parts)} fields, expected {len(header)}"
            )
        pct = float(parts[0])
        for joint, value in zip(joints, parts[1:]):
            series[joint].append((pct, float(value) / _DEG))
    return CurveSet(meta={}, series=series, cycles=[(0.0, 1.0)], root=[])


# ---------------------------------------------------------------------------
# Comparison / summary


def _mean_cycle(cs: CurveSet, joint: str, grid: np.ndarray) -> np.ndarray:
    resampled = []
    for group in cs.split_cycles(joint):
        pct = np.array([p for p, _ in group])
        ang = np.array([a for _, a in group])
        resampled.append(np.interp(grid, pct, ang))
    return np.mean(resampled, axis=0)


def compare(a: CurveSet, b: CurveSet, joints: list[str]) -> dict[str, float]:
    """Per-joint RMS difference (radians) on a common 200-point grid.

    Joints absent from either set are left out of the result; callers
    that care should warn on the difference.  Symmetric by construction.
    """
    grid = np.linspace(0.0, 100.0, RESAMPLE_POINTS)
    out: dict[str, float] = {}
    for joint in joints:
        if joint not in a.series or joint not in b.series:
            continue
        if not a.series[joint] or not b.series[joint]:
            continue
        ya = _mean_cycle(a, joint, grid)
        yb = _mean_cycle(b, joint, grid)
        out[joint] = float(np.sqrt(np.mean((ya - yb) ** 2)))
    return out


@dataclass(frozen=True)
class CurveSummary:
    min: float
    max: float
    range: float
    peak_time_percent: float
    start_velocity: float
    end_velocity: float


def summarize(cs: CurveSet) -> dict[str, CurveSummary]:
    """Per-joint envelope and endpoint velocities of the mean cycle."""
    grid = np.linspace(0.0, 100.0, RESAMPLE_POINTS)
    durations = [t1 - t0 for t0, t1 in cs.cycles]
    duration = sum(durations) / len(durations) if durations else 1.0
    dt_grid = duration / (RESAMPLE_POINTS - 1)
    out = {}
    for joint in cs.joints():
        if not cs.series[joint]:
            continue
        y = _mean_cycle(cs, joint, grid)
        peak_i = int(np.argmax(y))
        out[joint] = CurveSummary(
            min=float(y.min()),
            max=float(y.max()),
            range=float(y.max() - y.min()),
            peak_time_percent=float(grid[peak_i]),
            start_velocity=float((y[1] - y[0]) / dt_grid),
            end_velocity=float((y[-1] - y[-2]) / dt_grid),
        )
    return out
