"""Vector S-metric spaces and common-fixed-point machinery for commuting map pairs."""

from .convergence import (
    OrbitTrace,
    RateCertificate,
    certify_geometric_rate,
    is_v_cauchy,
    is_v_convergent,
    read_trace,
    write_trace,
)
from .checker import (
    CheckReport,
    QEstimate,
    check_applicability,
    check_commutes,
    check_continuity,
    check_range_containment,
    estimate_q,
)
from .errors import (
    DimensionMismatchError,
    EvaluationFault,
    ExprSyntaxError,
    InversionError,
    ProblemError,
    VsmetricError,
)
from .expr import MapSpec, compose, eval_map, format_expr, parse, parse_map
from .lattice import (
    DominatingSequence,
    LatticeElement,
    Point,
    Vec,
    decreases_to_zero,
    inf,
    leq,
    sup,
    tail_supremum,
    vec,
)
from .problemfile import RunOptions, load_problem
from .catalog import CATALOG_NAMES, catalog_path, load_catalog_problem
from .sampling import Box, BoxSampler
from .smetric import (
    AxiomReport,
    SMetricSpec,
    SymmetryReport,
    check_symmetry,
    eval_s,
    s_distance,
    validate_axioms,
)
from .solver import (
    ProblemSpec,
    SolveReport,
    UniquenessReport,
    jungck_step,
    multi_start,
    residuals,
    solve,
)

__version__ = "0.1.0"
