"""Exact potential-flow solutions of relativistic hydrodynamics, with a
finite-difference verification engine and a first-order finite-volume solver."""

__version__ = "0.1.0"

from .eos import IteratedLog, Linear, LogEos, Stiff, eos_point, sound_speed_sq  # noqa: E402
from .field_map import FieldGradient, FlowClass, FluidState, map_to_fluid  # noqa: E402
from .solutions import CATALOG, ExactSolution, make  # noqa: E402

__all__ = [
    "__version__", "Stiff", "Linear", "LogEos", "IteratedLog", "eos_point", "sound_speed_sq",
    "FieldGradient", "FlowClass", "FluidState", "map_to_fluid", "CATALOG", "ExactSolution", "make",
]
