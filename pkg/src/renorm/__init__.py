"""Certified convex-body surgery and smooth/polyhedral norm gluing.

The library builds, entirely at desk scale in R^M, a pipeline that takes a
polyhedral seed norm and a decreasing target sequence and produces an
equivalent norm whose distance to the seed improves as fast as requested
on tail coordinate subspaces.  Every structural identity along the way is
verified exactly over the rationals; the smooth evaluation path carries
float diagnostics and certified brackets instead.
"""

from .body import (
    ConvexBody,
    body_from_doc,
    body_from_text,
    body_to_doc,
    body_to_text,
    ell1_ball,
    ellinf_ball,
    embed_tail,
    facet_enumerate,
    hull_of_points,
    hull_union,
    intersect_halfspaces,
    intersect_slab,
    scale_body,
    section,
    vertex_enumerate,
)
from .errors import (
    DomainError,
    InvariantError,
    LowerDimensionalBodyError,
    ParameterError,
    RenormError,
    RepresentationError,
    ToleranceNotMetError,
    UnboundedBodyError,
)
from .glue import (
    ConvexRamp,
    GlueFamily,
    HingeRamp,
    PowerSmoothedNorm,
    choose_power,
)
from .harness import (
    Pipeline,
    RunConfig,
    VerificationReport,
    build_pipeline,
    run_verification,
)
from .norms import PolytopeNorm, basis_constant, tail_projection_constant
from .oracle import (
    GaugeOracle,
    ell2_oracle,
    infconv_gauge,
    infconv_oracle,
    max_gauge,
    numeric_tower,
    oracle_from_norm,
    restrict_oracle,
    scale_oracle,
    slab_oracle,
)
from .planner import (
    ParameterPlan,
    plan_inflations,
    plan_ramp_margins,
    tail_product,
)
from .polyhedral import PolyhedralFamily, build_polyhedral_family
from .sampling import random_rational_vectors, sample_tail_vectors
from .tower import (
    RenormTower,
    StepCertificate,
    active_index,
    build_slab_piece,
    build_tower,
    merge_with_ball,
    renorm_step,
    rescale_tower,
    small_tail_witness,
    tail_leveled_hull,
    uniform_tail_threshold,
)

__version__ = "0.1.0"
