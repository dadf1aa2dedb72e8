"""gfixlab: a numerical lab for graph-constrained fixed-point iteration."""

__version__ = "0.1.0"

from .vecspace import (  # noqa: F401
    Ball, BallPlusPoint, Box, ConvexSet, NormTag, OrderInterval, L2,
    modulus_of_convexity, norm, project, vector,
)
from .graphs import GraphSpec, PathInK, chain_path, has_edge, in_reachability_class  # noqa: F401
from .maps import (  # noqa: F401
    ALL_POINTS, AlphaSequence, AveragedRotation, Contraction, Identity,
    MonotoneAverage, Rotation, SelfMap, SquareShift, known_fixed_points,
)
from .center import CenterResult, TailWindow, asymptotic_center, radius_at  # noqa: F401
from .orbit import Orbit, detect_limit, run_orbit  # noqa: F401
from .pipelines import (  # noqa: F401
    PipelineSettings, PipelineVerdict, pipeline_C38, pipeline_S4, pipeline_T35,
    pipeline_T37,
)
