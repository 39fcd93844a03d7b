"""Numerical construction and certification of delta(2, n-2)-ideal Lagrangian submanifolds."""

__version__ = "0.1.0"

from .ambient import AmbientSpace, SpaceKind  # noqa: E402
from .delta import DeltaOptions, Theorem, delta_invariant  # noqa: E402
from .ideal import Case, classify_case  # noqa: E402
from .jets import ImmersionChart  # noqa: E402
from .pipeline import PointRecord, analyze_point, sample_points  # noqa: E402

__all__ = [
    "AmbientSpace", "SpaceKind", "DeltaOptions", "Theorem", "delta_invariant", "Case", "classify_case",
    "ImmersionChart", "PointRecord", "analyze_point", "sample_points", "__version__",
]
