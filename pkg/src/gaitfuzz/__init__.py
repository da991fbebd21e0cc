"""Procedural biped gait animation driven by tunable fuzzy controllers."""
from importlib import resources

from . import curves, dsl, engine, fuzzy, metrics, skeleton  # noqa: F401
from .dsl import ControllerSet, apply_patch, parse, serialize
from .engine import FrameOutput, GaitConfig, GaitState, Terrain, run, step_frame
from .skeleton import LimbDimensions, Pose

__version__ = "0.1.0"

__all__ = [
    "ControllerSet",
    "FrameOutput",
    "GaitConfig",
    "GaitState",
    "LimbDimensions",
    "Pose",
    "Terrain",
    "apply_patch",
    "default_controller_text",
    "default_controllers",
    "parse",
    "run",
    "serialize",
    "step_frame",
    "__version__",
]


def default_controller_text() -> str:
    """Source text of the controller set shipped with the package."""
    return (
        resources.files("gaitfuzz.data").joinpath("default.fzc").read_text("utf-8")
    )


def default_controllers() -> ControllerSet:
    """The shipped controller set, parsed and validated."""
    return dsl.loads(default_controller_text())
