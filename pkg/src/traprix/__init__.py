"""Point location with a trapezoidal map built by randomized incremental construction."""
from .arrdepth import (
    OpenRect,
    brute_force_depth,
    compute_order,
    max_rectangle_depth,
    reduce_trapezoids,
    verify_arrangement_depth,
)
from .errors import (
    CycleDetected,
    DegenerateBox,
    DegenerateSegment,
    DuplicateSegment,
    GenerationStalled,
    IntersectsExisting,
    OutOfBox,
    ParseError,
    RebuildLimitExceeded,
    TraprixError,
    UnknownCurve,
    ValidationFailed,
    XRangeViolation,
)
from .geometry import (
    Point,
    Segment,
    cmp_lex,
    orientation,
    point,
    point_vs_segment,
    segments_interior_disjoint,
)
from .pathlen import max_search_path_length
from .scenarios import (
    Scene,
    gen_random_segments,
    gen_recursive_blocks,
    gen_sqrt_blocks,
    read_scene,
    write_scene,
)
from .trapmap import BBox, BuildConfig, TrapezoidalMap, build, new_map

__version__ = "0.1.0"
