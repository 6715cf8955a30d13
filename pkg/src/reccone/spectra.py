"""Recession-cone approximation for plain spectrahedra.

Given C = {x | A(x) + A0 >= 0} with a pointed recession cone
K = {x | A(x) >= 0} of nonempty interior, the algorithm approximates K by a
pair of polyhedral cones K_I (inner, V-form) and K_O (outer, homogeneous
H-form) whose truncated Hausdorff distance to K is certified below a
requested epsilon.

The work happens on a compact strip M of the cone: a direction w interior
to the polar cone pins every nonzero recession direction x to w.x < 0, so
slicing K between the levels w.x = -(1+eps) and w.x = -(1+2 eps) yields a
compact base M carrying all directional information.  A sandwich
I (inner polytope, V-form) and O (outer polytope, H-form) of M is then
refined from both sides:

* cutting: each vertex of O is targeted by a dual solve (D2) whose optimal
  (U*, w*) yields a halfspace supporting M, shaving outer volume;
* pushing: each facet normal of conv(I) is handed to a support solve (P1)
  whose optimizer is a new inner vertex.

Once the Hausdorff distance between O and I drops below epsilon, both
polytopes are lifted to cones: K_I as the conical hull of I's vertices and
K_O from the facets through the origin of conv(O ∪ {0}).
"""

import dataclasses
import logging

import numpy as np

from .config import ApproxConfig
from .conic import solve_D2, solve_P1, solve_P2
from .errors import (
    AlgorithmFailure,
    AssumptionViolation,
    DegenerateInput,
    EmptyPolyhedron,
    InputError,
    InvariantViolation,
    IterationLimit,
    UnboundedPolyhedron,
)
from .pencil import (
    MatrixPencil,
    Spectrahedron,
    SymMatrix,
    intersect_halfspaces,
    min_eigenvalue,
    pencil_eval,
    recession_spectrahedron,
)
from .errors import RecconeError
from .polyhedra import (
    ApproxResult,
    Halfspace,
    HPolyhedron,
    VPolytope,
    box_truncated_vertices,
    cone_hull,
    cone_membership,
    facet_enumeration,
    hausdorff_polytopes,
    normalize,
    prune_nonextreme_rays,
    prune_redundant_halfspaces,
    vertex_enumeration,
)

logger = logging.getLogger(__name__)

R_PROBE = 100.0

__all__ = [
    "R_PROBE",
    "StripState",
    "check_assumptions_spectra",
    "polar_interior_direction",
    "build_strip",
    "rescale_interior_point",
    "initialize_approximations",
    "refine_once",
    "certify_cone_equality",
    "approximate_recession_cone",
]


@dataclasses.dataclass(frozen=True)
class StripState:
    """One refinement state of Algorithm 1's strip sandwich.

    Attributes:
        M: The compact strip spectrahedron.
        w: Unit polar-interior direction defining the strip.
        xbar: Strictly interior point of M used as the D2 anchor.
        O: Outer polytope (H-form), always containing M.
        I: Inner polytope (V-form), vertices feasible for M.
        kappa: Hausdorff distance between O and I at this state.
    """

    M: Spectrahedron
    w: np.ndarray
    xbar: np.ndarray
    O: HPolyhedron
    I: VPolytope
    kappa: float


def check_assumptions_spectra(C, tol_geom=1e-8, tol_psd=1e-7, solver=None):
    """Test line-freeness and strict recession feasibility of C.

    Line-freeness of the recession cone is equivalent to linear
    independence of the vectorized pencil matrices (the lineality space is
    exactly the kernel of x -> A(x)); it is decided by a singular-value
    rank test at ``tol_geom``.  A strictly positive recession point is
    searched by maximizing lambda subject to A(x) >= lambda I over the box
    ``|x_i| <= R_PROBE``.

    Returns:
        Pair (pointed, strict_point); strict_point is None when the probe
        finds no x with min eigenvalue of A(x) above ``tol_psd``.
    """
    n = C.nvars
    ell = C.dim
    stacked = C.pencil.stack().reshape(n, ell * ell)
    svals = np.linalg.svd(stacked, compute_uv=False)
    scale = svals[0] if svals[0] > 0 else 1.0
    rank = int(np.sum(svals > tol_geom * scale))
    pointed = rank == n

    mats = [m.array for m in C.pencil.mats]
    mats.append(-np.eye(ell))
    probe = Spectrahedron(pencil=MatrixPencil(mats), constant=SymMatrix.zero(ell))
    box = []
    for i in range(n):
        e = np.zeros(n + 1)
        e[i] = 1.0
        box.append(Halfspace(e, R_PROBE))
        box.append(Halfspace(-e, R_PROBE))
    objective = np.zeros(n + 1)
    objective[n] = 1.0
    sol = solve_P1(intersect_halfspaces(probe, box), objective, solver=solver)
    strict_point = None
    if sol.is_optimal and sol.primal_obj > tol_psd:
        strict_point = sol.certificate["x"][:n].copy()
    elif not sol.is_optimal:
        logger.warning("strict-point probe returned %s: %s", sol.status, sol.detail)
    return pointed, strict_point


def polar_interior_direction(C):
    """Unit direction w with w.x < 0 for every nonzero recession direction.

    Uses u_i = -trace(A_i): for x in the recession cone, A(x) is PSD and
    nonzero (line-freeness), so trace A(x) > 0, i.e. u.x < 0.
    """
    u = np.array([-m.trace() for m in C.pencil.mats])
    nrm = float(np.linalg.norm(u))
    if nrm < 1e-12:
        raise AssumptionViolation(
            "C1",
            "all pencil matrices are traceless; no polar interior direction "
            "from the trace functional",
        )
    return u / nrm


def build_strip(C, w, eps):
    """Compact strip of the recession cone between two w-levels.

    The strip is {x | A(x) >= 0, 1+eps <= -w.x <= 1+2 eps}, encoded as a
    single spectrahedron by appending two 1x1 blocks.  It is compact
    exactly when the recession cone is pointed.
    """
    w = np.asarray(w, dtype=float)
    if abs(float(np.linalg.norm(w)) - 1.0) > 1e-12:
        raise InputError("strip direction must be a unit vector")
    if not eps > 0:
        raise InputError(f"eps must be positive, got {eps}")
    return intersect_halfspaces(
        recession_spectrahedron(C),
        [Halfspace(w, -(1.0 + eps)), Halfspace(-w, 1.0 + 2.0 * eps)],
    )


def rescale_interior_point(xbar, w, eps):
    """Scale a strict recession point onto the strip's middle level.

    The returned point xhat = -(2+3 eps) / (2 w.xbar) xbar satisfies
    -w.xhat = (2+3 eps)/2, strictly between the strip levels 1+eps and
    1+2 eps; positive homogeneity of the recession cone keeps it strictly
    recessive.
    """
    xbar = np.asarray(xbar, dtype=float)
    w = np.asarray(w, dtype=float)
    s = float(w @ xbar)
    if s >= 0.0:
        raise AssumptionViolation(
            "C2",
            f"w.xbar = {s:.3e} is not negative; the point is not a strict "
            "recession direction",
        )
    return (-(2.0 + 3.0 * eps) / (2.0 * s)) * xbar


def _require_optimal(sol, context):
    if not sol.is_optimal:
        raise AlgorithmFailure(
            f"{context} returned {sol.status.value}: {sol.detail or 'no detail'}"
        )
    return sol


def _enumerate_vertices(O, tol):
    try:
        return vertex_enumeration(O, tol=tol)
    except (EmptyPolyhedron, UnboundedPolyhedron, DegenerateInput) as exc:
        raise AlgorithmFailure(f"outer polytope enumeration failed: {exc}") from exc


def _tally(tally, count=1):
    if tally is not None:
        tally.append(count)


def initialize_approximations(M, xhat, *, tol_psd=1e-7, tol_lin=1e-7,
                              tol_gap=1e-7, solver=None, tally=None):
    """Initial sandwich of the strip from n+1 support and n+1 step solves.

    For each direction z in {-e (all-ones), e_1, ..., e_n}: a P1 solve
    contributes the outer halfspace {x | z.x <= z.x*}, and a P2 solve from
    ``xhat`` along z contributes the inner vertex xhat + t* z.  The n+1
    directions positively span the space, so O is bounded and conv(I) is
    full-dimensional.

    Raises:
        AlgorithmFailure: Any of the 2(n+1) solves is not Optimal.
    """
    n = M.nvars
    xhat = np.asarray(xhat, dtype=float)
    directions = [-np.ones(n)]
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        directions.append(e)
    halfspaces = []
    points = []
    kw = dict(tol_psd=tol_psd, tol_lin=tol_lin, tol_gap=tol_gap, solver=solver)
    for z in directions:
        sol = solve_P1(M, z, **kw)
        _tally(tally)
        _require_optimal(sol, f"initial support solve along {z.tolist()}")
        halfspaces.append(Halfspace(z, float(z @ sol.certificate["x"])))
        step = solve_P2(M, xhat, z, **kw)
        _tally(tally)
        _require_optimal(step, f"initial step solve along {z.tolist()}")
        points.append(step.certificate["x"])
    return (
        HPolyhedron(halfspaces, ambient_dim=n),
        VPolytope(np.array(points)),
    )


def _append_cut(halfspaces, cut, tol):
    """Append a halfspace unless an equivalent one is already present."""
    cn = normalize(cut)
    for h in halfspaces:
        hn = normalize(h)
        if (
            float(np.max(np.abs(hn.normal - cn.normal))) <= tol
            and abs(hn.offset - cn.offset) <= tol
        ):
            return False
    halfspaces.append(cut)
    return True


def refine_once(state, *, tol_psd=1e-7, tol_lin=1e-7, tol_gap=1e-7,
                tol_geom=1e-8, solver=None, tally=None):
    """One cut-and-push round of the strip sandwich.

    Every vertex v of O is cut by the halfspace from a D2 solve along
    v - xbar (supporting M, so M stays inside); every facet normal of
    conv(I) is pushed by a P1 solve whose optimizer joins I unless it
    duplicates an existing vertex.  The new state's kappa is recomputed
    from the refined pair.
    """
    M, xhat = state.M, state.xbar
    kw = dict(tol_psd=tol_psd, tol_lin=tol_lin, tol_gap=tol_gap, solver=solver)
    overts = _enumerate_vertices(state.O, tol_geom)
    halfspaces = list(state.O.halfspaces)
    for v in overts.vertices:
        d = v - xhat
        if float(np.linalg.norm(d)) <= tol_geom:
            raise InvariantViolation("outer vertex coincides with the anchor point")
        sol = solve_D2(M, xhat, d, **kw)
        _tally(tally)
        _require_optimal(sol, f"cut solve at outer vertex {np.round(v, 12).tolist()}")
        _append_cut(
            halfspaces,
            Halfspace(sol.dual_vector, sol.certificate["halfspace_offset"]),
            tol_geom,
        )
    new_O = HPolyhedron(halfspaces, ambient_dim=state.O.ambient_dim)

    try:
        facets = facet_enumeration(state.I, tol=tol_geom)
    except DegenerateInput as exc:
        raise AlgorithmFailure(f"inner polytope lost full dimension: {exc}") from exc
    fresh = []
    for h in facets.halfspaces:
        sol = solve_P1(M, h.normal, **kw)
        _tally(tally)
        _require_optimal(sol, "push solve along an inner facet normal")
        x = sol.certificate["x"]
        stack = [state.I.vertices]
        if fresh:
            stack.append(np.array(fresh))
        candidates = np.vstack(stack)
        if float(np.min(np.linalg.norm(candidates - x, axis=1))) > tol_geom:
            fresh.append(x)
    new_I = state.I.with_points(np.array(fresh)) if fresh else state.I

    new_overts = _enumerate_vertices(new_O, tol_geom)
    kappa = hausdorff_polytopes(new_overts, new_I, tol=max(tol_geom, 1e-6))
    return dataclasses.replace(state, O=new_O, I=new_I, kappa=kappa)


def certify_cone_equality(inner, outer, tol=1e-9):
    """Whether the inner and outer cones are the same set.

    For polyhedral cones mutual inclusion is decidable exactly: the inner
    cone sits inside the outer one iff every generator satisfies every
    halfspace, and the outer sits inside the inner iff every vertex of the
    box-truncated outer cone is a conic combination of the inner rays.
    When both hold the truncated Hausdorff distance is exactly zero, which
    lets a run on a polyhedral recession cone certify the fixed point
    rather than the strip gap.
    """
    try:
        for r in inner.rays:
            if outer.max_violation(r) > tol:
                return False
        generators = box_truncated_vertices(outer)
        if not generators:
            return inner.nrays == 0
        for v in generators:
            if not cone_membership(v, inner, tol=tol):
                return False
        return True
    except RecconeError as exc:
        logger.debug("cone equality check inconclusive: %s", exc)
        return False


def _lift_cones(O, I, tol_geom):
    """Lift the strip sandwich to cones.

    The inner cone is the conical hull of I's vertices.  The outer cone is
    read off conv(O ∪ {0}): its facets through the origin, offsets set to
    literal zero, are exactly the facets of the cone over O.  Both outputs
    are pruned to a minimal description.
    """
    overts = _enumerate_vertices(O, tol_geom)
    n = overts.vertices.shape[1]
    joined = VPolytope(np.vstack([overts.vertices, np.zeros((1, n))]))
    hull = facet_enumeration(joined, tol=tol_geom)
    through_origin = [
        Halfspace(h.normal, 0.0) for h in hull.halfspaces if abs(h.offset) <= tol_geom
    ]
    if not through_origin:
        raise AlgorithmFailure("no facet of conv(O ∪ {0}) passes through the origin")
    outer = prune_redundant_halfspaces(HPolyhedron(through_origin, ambient_dim=n))
    inner = prune_nonextreme_rays(cone_hull(I))
    return inner, outer


def approximate_recession_cone(C, xbar, cfg=None):
    """Inner/outer polyhedral approximation of a spectrahedron's recession cone.

    Args:
        C: The spectrahedron whose recession cone is approximated.
        xbar: Witness of strict recession feasibility: A(xbar) must be
            positive definite beyond ``cfg.tol_psd``.
        cfg: :class:`ApproxConfig`; defaults to ``ApproxConfig()``.

    Returns:
        :class:`ApproxResult` with the inner cone (unit rays), the outer
        cone (homogeneous halfspaces), the certified truncated Hausdorff
        bound (final strip gap), the iteration count, and the number of
        conic subproblems solved.

    Raises:
        AssumptionViolation: C1 (line-freeness) or C2 (strict recession
            point) fails, or the supplied witness is not strictly recessive.
        IterationLimit: ``cfg.max_iterations`` refinement rounds did not
            reach ``cfg.epsilon``; the partial result is attached.
    """
    cfg = cfg if cfg is not None else ApproxConfig()
    xbar = np.asarray(xbar, dtype=float)
    if xbar.shape != (C.nvars,):
        raise InputError(f"xbar has shape {xbar.shape}, expected ({C.nvars},)")
    tally = []
    pointed, strict_point = check_assumptions_spectra(
        C, tol_geom=cfg.tol_geom, tol_psd=cfg.tol_psd
    )
    _tally(tally)
    report = {
        "pointed": pointed,
        "strict_point": None if strict_point is None else strict_point.tolist(),
    }
    if not pointed:
        raise AssumptionViolation(
            "C1",
            "the recession cone contains a line (pencil matrices are "
            "linearly dependent)",
            report=report,
        )
    lam = min_eigenvalue(pencil_eval(C.pencil, xbar))
    report["xbar_min_eigenvalue"] = lam
    if lam <= cfg.tol_psd:
        if strict_point is None:
            raise AssumptionViolation(
                "C2",
                "the recession pencil admits no strictly positive point",
                report=report,
            )
        raise AssumptionViolation(
            "C2",
            f"A(xbar) has min eigenvalue {lam:.3e}; the supplied point is "
            "not strictly recessive (the report carries one that is)",
            report=report,
        )

    w = polar_interior_direction(C)
    M = build_strip(C, w, cfg.epsilon)
    xhat = rescale_interior_point(xbar, w, cfg.epsilon)
    # the strip blocks leave exactly epsilon/2 of slack at the midlevel, so
    # the strictness threshold must shrink with epsilon
    interior_tol = min(cfg.tol_psd, cfg.epsilon / 4.0)
    lam_hat = min_eigenvalue(pencil_eval(M.pencil, xhat).array + M.constant.array)
    if lam_hat <= interior_tol:
        report["strip_min_eigenvalue"] = lam_hat
        raise AssumptionViolation(
            "C2",
            f"rescaled point is not strictly interior to the strip "
            f"(min eigenvalue {lam_hat:.3e})",
            report=report,
        )

    kw = dict(tol_psd=cfg.tol_psd, tol_lin=cfg.tol_lin, tol_gap=cfg.tol_gap)
    O, I = initialize_approximations(M, xhat, tally=tally, **kw)
    inclusion_tol = max(cfg.tol_geom, 1e-6)
    overts = _enumerate_vertices(O, cfg.tol_geom)
    kappa = hausdorff_polytopes(overts, I, tol=inclusion_tol)
    state = StripState(M=M, w=w, xbar=xhat, O=O, I=I, kappa=kappa)
    logger.info("initial strip gap %.6g (target %.6g)", kappa, cfg.epsilon)

    iterations = 0
    while state.kappa > cfg.epsilon:
        if iterations >= cfg.max_iterations:
            inner, outer = _lift_cones(state.O, state.I, cfg.tol_geom)
            partial = ApproxResult(
                inner=inner,
                outer=outer,
                epsilon_certified=state.kappa,
                iterations=iterations,
                subproblem_count=len(tally),
            )
            raise IterationLimit(
                f"strip gap {state.kappa:.6g} still above epsilon "
                f"{cfg.epsilon:.6g} after {iterations} iterations",
                partial=partial,
            )
        previous = state.kappa
        state = refine_once(state, tol_geom=cfg.tol_geom, tally=tally, **kw)
        iterations += 1
        if state.kappa > previous + cfg.tol_qp:
            raise InvariantViolation(
                f"refinement increased the strip gap: {previous:.6g} -> "
                f"{state.kappa:.6g}"
            )
        logger.info("iteration %d: strip gap %.6g", iterations, state.kappa)

    final_overts = _enumerate_vertices(state.O, cfg.tol_geom)
    epsilon_certified = hausdorff_polytopes(
        final_overts, state.I, tol=inclusion_tol
    )
    inner, outer = _lift_cones(state.O, state.I, cfg.tol_geom)
    if certify_cone_equality(inner, outer):
        logger.info("inner and outer cones coincide; certifying distance 0")
        epsilon_certified = 0.0
    result = ApproxResult(
        inner=inner,
        outer=outer,
        epsilon_certified=epsilon_certified,
        iterations=iterations,
        subproblem_count=len(tally),
    )
    return result.validate(tol=inclusion_tol)
