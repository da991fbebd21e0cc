"""Command-line interface: validate, simulate, render, compare, serve.

Exit codes: 0 success, 1 domain error (bad controllers, unreachable
targets, malformed curve files), 2 usage or I/O error.  Angles are
degrees at this surface; files on disk follow the library formats.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import curves, default_controller_text, dsl
from .engine import GaitConfig, Terrain, run
from .errors import GaitfuzzError
from .skeleton import LimbDimensions

ENV_CONTROLLERS = "GAITFUZZ_CONTROLLERS"

_DEG = 180.0 / math.pi


def _read_controllers(path: str | None) -> tuple[dsl.ControllerSet, str]:
    """Resolve the controller source: flag, environment, or shipped default."""
    if path is None:
        path = os.environ.get(ENV_CONTROLLERS)
    if path is None:
        text = default_controller_text()
        origin = "<default>"
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
        origin = path
    cs, diags = dsl.parse(text, origin=origin)
    if cs is None:
        lines = "\n".join(d.format(origin) for d in diags)
        raise GaitfuzzError(f"invalid controller file:\n{lines}")
    return cs, origin


def _parse_terrain(spec: str) -> Terrain:
    if spec == "flat":
        return Terrain.flat()
    if spec.startswith("incline:"):
        return Terrain.incline(math.radians(float(spec.split(":", 1)[1])))
    if spec.startswith("stairs:"):
        body = spec.split(":", 1)[1]
        riser, _, tread = body.partition("x")
        if not tread:
            raise GaitfuzzError(
                f"bad terrain {spec!r}: expected stairs:<riser>x<tread>"
            )
        return Terrain.stairs(float(riser), float(tread))
    raise GaitfuzzError(
        f"unknown terrain {spec!r} (expected flat, incline:<deg> or stairs:<riser>x<tread>)"
    )


def _parse_dims(spec: str | None) -> LimbDimensions:
    if spec is None:
        return LimbDimensions()
    if spec.lstrip().startswith("{"):
        doc = json.loads(spec)
    else:
        with open(spec, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    return LimbDimensions(**doc)


def _expand_joints(names: list[str]) -> list[str]:
    out = []
    for name in names:
        if name in curves.JOINT_ORDER:
            out.append(name)
        else:
            out.extend([f"left_{name}", f"right_{name}"])
    return out


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_validate(args) -> int:
    try:
        with open(args.controllers, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read {args.controllers}: {exc}", file=sys.stderr)
        return 2
    cs, diags = dsl.parse(text, origin=args.controllers)
    if cs is None:
        for d in diags:
            print(d.format(args.controllers), file=sys.stderr)
        return 1
    return 0


def _load_sim_config_file(path: str) -> dict:
    """Simulation config file: {dims, dt, terrain, step_length,
    controller_file, seedless}. Flags override individual fields;
    'seedless' is accepted for completeness (nothing here draws random
    numbers either way)."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    known = {"dims", "dt", "terrain", "step_length", "controller_file", "seedless"}
    unknown = set(doc) - known
    if unknown:
        raise GaitfuzzError(f"unknown config fields: {sorted(unknown)}")
    return doc


def _terrain_from_value(value) -> Terrain:
    if isinstance(value, str):
        return _parse_terrain(value)
    kind = value.get("kind")
    if kind == "flat":
        return Terrain.flat()
    if kind == "incline":
        return Terrain.incline(float(value["angle"]))
    if kind == "stairs":
        return Terrain.stairs(float(value["riser"]), float(value["tread"]))
    raise GaitfuzzError(f"unknown terrain kind {kind!r}")


def _build_config(args) -> GaitConfig:
    file_cfg = _load_sim_config_file(args.config) if args.config else {}

    controllers_path = args.controllers
    if controllers_path is None:
        controllers_path = file_cfg.get("controller_file")
    cs, _ = _read_controllers(controllers_path)

    if args.terrain is not None:
        terrain = _parse_terrain(args.terrain)
    elif "terrain" in file_cfg:
        terrain = _terrain_from_value(file_cfg["terrain"])
    else:
        terrain = Terrain.flat()

    if args.dims is not None:
        dims = _parse_dims(args.dims)
    elif "dims" in file_cfg:
        dims = LimbDimensions(**file_cfg["dims"])
    else:
        dims = LimbDimensions()

    step_length = args.step_length
    if step_length is None:
        step_length = file_cfg.get("step_length", 0.6)
    dt = args.dt
    if dt is None:
        dt = file_cfg.get("dt", 1.0 / 120.0)

    return GaitConfig(
        controllers=cs,
        step_length=float(step_length),
        dims=dims,
        dt=float(dt),
        terrain=terrain,
    )


def _cmd_simulate(args) -> int:
    config = _build_config(args)
    frames = run(config, n_steps=args.steps)
    recorded = curves.record(frames, config)
    payload = curves.export(recorded, args.format)
    with open(args.out, "wb") as fh:
        fh.write(payload)
    if args.plot:
        from . import plots

        plots.render_curves(recorded, args.plot, stick_frames=args.stick_frames)
    _print_summary(recorded)
    return 0


def _print_summary(recorded: curves.CurveSet) -> None:
    summary = curves.summarize(recorded)
    print(
        f"{'joint':<12} {'min[deg]':>9} {'max[deg]':>9} {'range':>8} "
        f"{'peak[%]':>8} {'v0[deg/s]':>10} {'v1[deg/s]':>10}"
    )
    for joint, s in summary.items():
        print(
            f"{joint:<12} {s.min * _DEG:>9.2f} {s.max * _DEG:>9.2f} "
            f"{s.range * _DEG:>8.2f} {s.peak_time_percent:>8.1f} "
            f"{s.start_velocity * _DEG:>10.2f} {s.end_velocity * _DEG:>10.2f}"
        )


def _cmd_render(args) -> int:
    from . import plots

    try:
        with open(args.infile, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        print(f"error: cannot read {args.infile}: {exc}", file=sys.stderr)
        return 2
    cs = curves.load_json(data)
    joints = _expand_joints(args.joints.split(",")) if args.joints else None
    plots.render_curves(cs, args.out, joints=joints, stick_frames=args.stick_frames)
    return 0


def _cmd_compare(args) -> int:
    sets = []
    for path in (args.a, args.b):
        try:
            with open(path, "rb") as fh:
                data = fh.read()
        except OSError as exc:
            print(f"error: cannot read {path}: {exc}", file=sys.stderr)
            return 2
        sets.append(curves.load_json(data) if path.endswith(".json") else curves.load_csv(data))
    a, b = sets
    joints = _expand_joints(args.joints.split(","))
    rms = curves.compare(a, b, joints)
    for joint in joints:
        if joint not in rms:
            print(f"warning: joint '{joint}' missing from one of the inputs")
    print(f"{'joint':<12} {'rms[deg]':>10}")
    for joint, value in rms.items():
        print(f"{joint:<12} {value * _DEG:>10.4f}")
    return 0


def _cmd_serve(args) -> int:
    from . import service

    config = _build_config(args)
    try:
        service.serve(config, host=args.host, port=args.port)
    except OSError as exc:
        print(f"error: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------


def _add_sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="simulation config JSON file; flags override its fields")
    p.add_argument("--controllers", help=f"controller file (default: ${ENV_CONTROLLERS} or built-in)")
    p.add_argument("--terrain", help="flat | incline:<deg> | stairs:<riser>x<tread> (default flat)")
    p.add_argument("--step-length", type=float, dest="step_length", help="meters (default 0.6)")
    p.add_argument("--dt", type=float, help="fixed timestep, seconds (default 1/120)")
    p.add_argument("--dims", help="limb dimensions as inline JSON or a JSON file path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaitfuzz",
        description="Procedural biped gait driven by tunable fuzzy controllers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a controller file, print diagnostics")
    p.add_argument("--controllers", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("simulate", help="run a gait and export the joint curves")
    _add_sim_flags(p)
    p.add_argument("--steps", type=int, default=6, help="number of steps to take")
    p.add_argument("--out", required=True, help="output curve file")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--plot", help="also render a figure (svg/png) next to the export")
    p.add_argument("--stick-frames", type=int, default=0, dest="stick_frames")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("render", help="render a curve file to a figure")
    p.add_argument("--in", dest="infile", required=True, help="curves .json from simulate")
    p.add_argument("--out", required=True, help="figure path (.svg or .png)")
    p.add_argument("--joints", help="comma list, e.g. hip,knee or left_hip")
    p.add_argument("--stick-frames", type=int, default=0, dest="stick_frames")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("compare", help="RMS error between two curve files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--joints", default="hip,knee")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("serve", help="run the live tuning service")
    _add_sim_flags(p)
    p.add_argument("--port", type=int, default=7341)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GaitfuzzError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON input: {exc}", file=sys.stderr)
        return 1
    except KeyError as exc:
        print(f"error: malformed input, missing {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
