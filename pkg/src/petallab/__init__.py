"""petallab: a numerical laboratory for the boundaries of attracting basins
of meromorphic maps, centered on the Newton map f(z) = z - tan z.

The pieces:

- maps: the map catalog, orbit classification, inverse-branch continuation
- metrics: conformal densities, ladder sequences, contraction bounds, glue
- petals: sector geometry and petal certification at infinity
- tracer: equipotential curve pullbacks and Cauchy-modulus diagnostics
- census: Fatou-component census and summability statistics
- render, cli: rasterization and the command-line front door
"""

from ._kernels import NUMBA_ENABLED
from .errors import (
    AlignmentError,
    AuditError,
    CensusError,
    ConfigError,
    ContinuationError,
    DomainError,
    ParameterError,
    PetalLabError,
    PoleError,
    SeedError,
    SingularityError,
    TopologyError,
    UnsupportedMap,
    UnsupportedPetalKind,
)
from .maps import (
    INFINITY,
    MapSpec,
    OrbitResult,
    classify_grid,
    classify_orbit,
    derivative,
    eval_map,
    eval_map_array,
    inverse_branch_step,
    map_by_id,
    sine_attractors,
    translation_check,
)
from .metrics import (
    ExpansionReport,
    GlueProfile,
    LogConvexFn,
    MetricKind,
    constant_gauge,
    density,
    euclidean,
    exp_decay_gauge,
    expansion_audit,
    glue_profile_build,
    glued_infinity,
    logconvex_ladder,
    metric_derivative,
    parabolic_bound_seq,
    power_decay_gauge,
    power_infinity,
    power_point,
    sph_dist,
    sph_dist_array,
    spherical,
)
from .petals import (
    PetalReport,
    PetalSpec,
    SectorSpec,
    asymptotic_form_check,
    lower_half_plane_petal,
    parabolic_direction_angles,
    petal_condition_audit,
    sector_contains,
    upper_half_plane_petal,
)
from .tracer import (
    ClosedCurve,
    TraceReport,
    cauchy_modulus,
    load_curve_points,
    pullback_curve,
    pullback_residual,
    save_curve,
    seed_curve,
    trace_boundary,
    transversal_arcs,
)
from .census import (
    CensusConfig,
    ComponentRecord,
    SummabilityReport,
    census,
    component_extent,
    component_points,
    locate_component_anchor,
    sph_disc_bounds,
    summability_report,
    whyburn_count,
)
from .render import RenderJob, Viewport, read_image, render, write_image

__version__ = "0.1.0"
