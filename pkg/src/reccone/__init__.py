"""Polyhedral approximation of recession cones of spectrahedra and their
projections, with certified truncated-Hausdorff accuracy."""

from .config import ApproxConfig
from .errors import (
    AlgorithmFailure,
    AssumptionViolation,
    DegenerateInput,
    EmptyPolyhedron,
    InputError,
    InvariantViolation,
    IterationLimit,
    ParseError,
    RecconeError,
    SamplingExhausted,
    SolverFailure,
    UnboundedPolyhedron,
)
from .pencil import (
    MatrixPencil,
    ShadowInstance,
    Spectrahedron,
    SymMatrix,
    intersect_halfspaces,
    is_psd,
    min_eigenvalue,
    pencil_eval,
    recession_spectrahedron,
)
from .conic import (
    ConicProblem,
    ConicSolution,
    CvxpySolver,
    SolveStatus,
    build_D2,
    build_P1,
    build_P2,
    record_d2_solutions,
    solve_D2,
    solve_D2_shadow,
    solve_P1,
    solve_P2,
    solve_P2_shadow,
)
from .polyhedra import (
    ApproxResult,
    Halfspace,
    HPolyhedron,
    VCone,
    VPolytope,
    box_truncated_vertices,
    cone_hull,
    cone_membership,
    facet_enumeration,
    hausdorff_polytopes,
    normalize,
    point_polytope_distance,
    truncated_hausdorff_estimate,
    vertex_enumeration,
)
from .spectra import (
    approximate_recession_cone,
    build_strip,
    certify_cone_equality,
    check_assumptions_spectra,
    polar_interior_direction,
    rescale_interior_point,
)
from .shadow import (
    approximate_recession_cone_shadow,
    check_assumptions_shadow,
    direction,
    initialize_shadow,
    k_max_steps,
    vertex_certificate,
)
from .oracles import (
    RayShootOracle,
    brute_force_delta,
    is_recession_direction,
    sample_feasible_points,
    sample_recession_directions,
)
from .model_io import (
    InstanceFile,
    ResultFile,
    parse_instance,
    parse_result,
    write_instance,
    write_result,
)

__version__ = "0.1.0"
