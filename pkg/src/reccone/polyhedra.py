"""Polyhedral kernel: H- and V-representations and conversions between them.

Provides halfspace/vertex/ray data types, vertex enumeration (incremental
double description over floating point), facet enumeration (polar duality),
conical hulls, cone membership tests, point-to-polytope distances (Wolfe's
minimum-norm-point algorithm in barycentric coordinates) and the Hausdorff
machinery both approximation algorithms terminate on.

All decisions that compare coordinates use absolute tolerances on
unit-normalized data; default activity and duplicate tolerance is
``TOL_GEOM = 1e-8``.  Ambient dimensions are expected to stay at desk scale
(n <= 6); no exact arithmetic is attempted.
"""

import dataclasses
import logging

import numpy as np
import scipy.linalg
from scipy.optimize import linprog, lsq_linear

from .errors import (
    DegenerateInput,
    EmptyPolyhedron,
    InputError,
    InvariantViolation,
    SolverFailure,
    UnboundedPolyhedron,
)

logger = logging.getLogger(__name__)

TOL_GEOM = 1e-8
TOL_QP = 1e-8
TOL_LP = 1e-7

__all__ = [
    "Halfspace",
    "HPolyhedron",
    "VPolytope",
    "VCone",
    "ApproxResult",
    "normalize",
    "vertex_enumeration",
    "facet_enumeration",
    "cone_hull",
    "cone_membership",
    "point_polytope_distance",
    "hausdorff_polytopes",
    "box_truncated_vertices",
    "project_onto_cone",
    "truncated_hausdorff_estimate",
    "prune_nonextreme_rays",
    "prune_redundant_halfspaces",
]


def _as_vector(v, name="vector"):
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise InputError(f"{name} must be a nonempty 1-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} must be finite")
    return arr


def _lexsort_rows(arr):
    """Rows sorted lexicographically by coordinates (first coordinate major)."""
    if arr.shape[0] <= 1:
        return arr
    order = np.lexsort(arr.T[::-1])
    return arr[order]


def _dedup_rows(arr, tol):
    """Drop rows that repeat within ``tol`` (inf-norm), keeping the
    lexicographically smallest representative of each cluster."""
    arr = _lexsort_rows(arr)
    if arr.shape[0] <= 1:
        return arr
    kept = []
    for row in arr:
        if all(np.max(np.abs(row - k)) > tol for k in kept):
            kept.append(row)
    return np.array(kept)


@dataclasses.dataclass(frozen=True, eq=False)
class Halfspace:
    """The closed halfspace {x | normal . x <= offset}.

    The normal must be nonzero; it is not rescaled on construction, use
    :func:`normalize` for the unit-normal representative.
    """

    normal: np.ndarray
    offset: float

    def __init__(self, normal, offset):
        normal = _as_vector(normal, "halfspace normal")
        offset = float(offset)
        if not np.isfinite(offset):
            raise InputError("halfspace offset must be finite")
        if float(np.linalg.norm(normal)) == 0.0:
            raise DegenerateInput("halfspace normal must be nonzero")
        normal = normal.copy()
        normal.flags.writeable = False
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", offset)

    @property
    def dim(self):
        return self.normal.shape[0]

    def value(self, x):
        """The linear functional normal . x."""
        return float(self.normal @ np.asarray(x, dtype=float))

    def contains(self, x, tol=TOL_GEOM):
        return self.value(x) <= self.offset + tol

    def __eq__(self, other):
        if not isinstance(other, Halfspace):
            return NotImplemented
        return self.offset == other.offset and np.array_equal(self.normal, other.normal)

    def __hash__(self):
        return hash((self.normal.tobytes(), self.offset))

    def __repr__(self):
        return f"Halfspace({self.normal.tolist()!r}, {self.offset!r})"


def normalize(h):
    """Unit-normal representative of the same halfspace.

    Both the normal and the offset are divided by the normal's 2-norm.
    """
    nrm = float(np.linalg.norm(h.normal))
    if nrm < 1e-300:
        raise DegenerateInput("cannot normalize a halfspace with zero normal")
    return Halfspace(h.normal / nrm, h.offset / nrm)


@dataclasses.dataclass(frozen=True, eq=False)
class HPolyhedron:
    """Intersection of finitely many halfspaces in R^ambient_dim.

    An empty halfspace list represents the whole ambient space.  The set is
    a cone exactly when every stored offset is literally zero.
    """

    halfspaces: tuple
    ambient_dim: int

    def __init__(self, halfspaces, ambient_dim=None):
        hs = tuple(halfspaces)
        for h in hs:
            if not isinstance(h, Halfspace):
                raise InputError(f"expected Halfspace, got {type(h).__name__}")
        if ambient_dim is None:
            if not hs:
                raise InputError("ambient_dim required for an empty halfspace list")
            ambient_dim = hs[0].dim
        ambient_dim = int(ambient_dim)
        if ambient_dim < 1:
            raise InputError("ambient dimension must be at least 1")
        for h in hs:
            if h.dim != ambient_dim:
                raise InputError(
                    f"halfspace dim {h.dim} does not match ambient dim {ambient_dim}"
                )
        object.__setattr__(self, "halfspaces", hs)
        object.__setattr__(self, "ambient_dim", ambient_dim)

    @property
    def nhalfspaces(self):
        return len(self.halfspaces)

    @property
    def is_cone(self):
        """True iff every offset is exactly zero."""
        return all(h.offset == 0.0 for h in self.halfspaces)

    def normals_matrix(self):
        """Stacked normals, shape (nhalfspaces, ambient_dim)."""
        if not self.halfspaces:
            return np.zeros((0, self.ambient_dim))
        return np.array([h.normal for h in self.halfspaces])

    def offsets_vector(self):
        if not self.halfspaces:
            return np.zeros(0)
        return np.array([h.offset for h in self.halfspaces])

    def max_violation(self, x):
        """max_i (normal_i . x - offset_i); <= 0 iff x is a member."""
        if not self.halfspaces:
            return -np.inf
        x = np.asarray(x, dtype=float)
        return float(np.max(self.normals_matrix() @ x - self.offsets_vector()))

    def contains(self, x, tol=TOL_GEOM):
        return self.max_violation(x) <= tol

    def intersect(self, extra):
        """New polyhedron with the halfspaces of ``extra`` appended."""
        return HPolyhedron(self.halfspaces + tuple(extra), self.ambient_dim)

    def __eq__(self, other):
        if not isinstance(other, HPolyhedron):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.halfspaces == other.halfspaces
        )

    def __repr__(self):
        return (
            f"HPolyhedron({len(self.halfspaces)} halfspaces, "
            f"ambient_dim={self.ambient_dim})"
        )


@dataclasses.dataclass(frozen=True, eq=False)
class VPolytope:
    """Convex hull of a finite nonempty point set.

    Points are stored lexicographically sorted with duplicates (within
    ``tol``, inf-norm) removed; the lexicographically smallest member of a
    duplicate cluster is kept.
    """

    vertices: np.ndarray
    ambient_dim: int

    def __init__(self, vertices, tol=TOL_GEOM):
        arr = np.asarray(vertices, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError(
                f"vertices must be a nonempty 2-d array, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise InputError("vertices must be finite")
        arr = _dedup_rows(arr, tol)
        arr.flags.writeable = False
        object.__setattr__(self, "vertices", arr)
        object.__setattr__(self, "ambient_dim", int(arr.shape[1]))

    @property
    def nvertices(self):
        return self.vertices.shape[0]

    def with_points(self, points, tol=TOL_GEOM):
        """Convex hull of this polytope and extra points (as vertex union)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return VPolytope(np.vstack([self.vertices, pts]), tol=tol)

    def __eq__(self, other):
        if not isinstance(other, VPolytope):
            return NotImplemented
        return np.array_equal(self.vertices, other.vertices)

    def __repr__(self):
        return f"VPolytope({self.nvertices} vertices, ambient_dim={self.ambient_dim})"


@dataclasses.dataclass(frozen=True, eq=False)
class VCone:
    """Conical hull of finitely many unit rays.

    Rays are normalized to unit 2-norm on construction, deduplicated within
    ``tol`` and stored lexicographically sorted.  A zero generator is
    rejected.  The empty ray list represents the trivial cone {0}.
    """

    rays: np.ndarray
    ambient_dim: int

    def __init__(self, rays, ambient_dim=None, tol=TOL_GEOM):
        arr = np.asarray(rays, dtype=float)
        if arr.size == 0:
            if ambient_dim is None:
                raise InputError("ambient_dim required for an empty ray list")
            arr = np.zeros((0, int(ambient_dim)))
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise InputError(f"rays must be a 2-d array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("rays must be finite")
        if arr.shape[0] > 0:
            norms = np.linalg.norm(arr, axis=1)
            if np.any(norms < TOL_GEOM):
                raise DegenerateInput("cone generators must be nonzero")
            arr = arr / norms[:, None]
            arr = _dedup_rows(arr, tol)
        if ambient_dim is not None and int(ambient_dim) != arr.shape[1]:
            raise InputError(
                f"ambient_dim {ambient_dim} does not match ray length {arr.shape[1]}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "rays", arr)
        object.__setattr__(self, "ambient_dim", int(arr.shape[1]))

    @property
    def nrays(self):
        return self.rays.shape[0]

    def with_rays(self, rays, tol=TOL_GEOM):
        """Conical hull of this cone and extra generators."""
        extra = np.atleast_2d(np.asarray(rays, dtype=float))
        if self.nrays == 0:
            return VCone(extra, tol=tol)
        return VCone(np.vstack([self.rays, extra]), tol=tol)

    def __eq__(self, other):
        if not isinstance(other, VCone):
            return NotImplemented
        return np.array_equal(self.rays, other.rays)

    def __repr__(self):
        return f"VCone({self.nrays} rays, ambient_dim={self.ambient_dim})"


@dataclasses.dataclass(frozen=True)
class ApproxResult:
    """Output pair of one approximation run.

    Attributes:
        inner: Inner approximating cone (V-representation, unit rays).
        outer: Outer approximating cone (homogeneous H-representation).
        epsilon_certified: Truncated Hausdorff bound certified at exit.
        iterations: Number of refinement rounds (or passes) executed.
        subproblem_count: Total number of conic subproblems solved.
    """

    inner: VCone
    outer: HPolyhedron
    epsilon_certified: float
    iterations: int
    subproblem_count: int

    def validate(self, tol=TOL_GEOM):
        """Check the structural output invariants.

        The outer cone must be homogeneous and every inner ray must satisfy
        every outer halfspace within ``tol``.
        """
        if not self.outer.is_cone:
            raise InvariantViolation("outer approximation has a nonzero offset")
        for r in self.inner.rays:
            viol = self.outer.max_violation(r)
            if viol > tol:
                raise InvariantViolation(
                    f"inner ray {r.tolist()} violates the outer cone by {viol:.3e}"
                )
        return self


# ---------------------------------------------------------------------------
# linear programming helpers


def _linprog(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None):
    res = linprog(
        c,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=bounds,
        method="highs",
    )
    if res.status not in (0, 2, 3):
        raise SolverFailure(f"linear program failed: {res.message}")
    return res


def _check_feasible_bounded(A, b, tol):
    """LP prefilter for vertex enumeration on {x | Ax <= b}.

    Raises EmptyPolyhedron when infeasible and UnboundedPolyhedron when the
    recession cone {d | Ad <= 0} contains a direction of inf-norm 1.
    """
    n = A.shape[1]
    res = _linprog(np.zeros(n), A_ub=A, b_ub=b, bounds=[(None, None)] * n)
    if res.status == 2:
        raise EmptyPolyhedron("the halfspace system has no solution")
    if res.status == 3:
        raise SolverFailure("feasibility probe reported unbounded")
    box = [(-1.0, 1.0)] * n
    for i in range(n):
        for sign in (1.0, -1.0):
            c = np.zeros(n)
            c[i] = -sign
            rec = _linprog(c, A_ub=A, b_ub=np.zeros(A.shape[0]), bounds=box)
            if rec.status == 0 and -rec.fun > 1e-7:
                raise UnboundedPolyhedron(
                    f"recession direction found along coordinate {i}"
                )


# ---------------------------------------------------------------------------
# vertex enumeration (incremental double description)


def _initial_basis(M, tol=1e-10):
    """Indices of d linearly independent rows of M (d = number of columns)."""
    d = M.shape[1]
    _, R, piv = scipy.linalg.qr(M.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0.0:
        raise InvariantViolation("constraint matrix has rank zero")
    rank = int(np.sum(diag > tol * diag[0]))
    if rank < d:
        raise InvariantViolation(
            f"homogenized constraint matrix has rank {rank} < {d}; "
            "the polyhedron should be bounded at this point"
        )
    return list(piv[:d])


def _dd_cone_rays(M, tol):
    """Extreme rays of the pointed cone {y | My <= 0} by double description.

    M rows must be unit-normalized; rays are returned with unit 2-norm.
    """
    nrows, d = M.shape
    basis = _initial_basis(M)
    B = M[basis]
    rays = -np.linalg.solve(B, np.eye(d)).T
    # rows of ``rays`` are the columns of -B^{-1}
    rays = rays / np.linalg.norm(rays, axis=1)[:, None]
    processed = list(basis)
    remaining = [i for i in range(nrows) if i not in set(basis)]
    for idx in remaining:
        m = M[idx]
        vals = rays @ m
        plus = np.where(vals > tol)[0]
        if plus.size == 0:
            processed.append(idx)
            continue
        minus = np.where(vals < -tol)[0]
        zero = np.where(np.abs(vals) <= tol)[0]
        # activity pattern of every current ray w.r.t. processed rows
        act = np.abs(rays @ M[processed].T) <= tol
        new_rays = []
        for p in plus:
            for q in minus:
                common = act[p] & act[q]
                adjacent = True
                for r in range(rays.shape[0]):
                    if r == p or r == q:
                        continue
                    if np.all(act[r][common]):
                        adjacent = False
                        break
                if not adjacent:
                    continue
                cand = vals[p] * rays[q] - vals[q] * rays[p]
                nrm = float(np.linalg.norm(cand))
                if nrm < 1e-12:
                    logger.debug("skipping a vanishing ray combination")
                    continue
                new_rays.append(cand / nrm)
        keep = np.concatenate([minus, zero])
        blocks = [rays[keep]] if keep.size else []
        if new_rays:
            blocks.append(_dedup_rows(np.array(new_rays), tol))
        if not blocks:
            raise EmptyPolyhedron("all rays eliminated during double description")
        rays = np.vstack(blocks)
        processed.append(idx)
    return rays


def _polish_vertex(x, A, b, tol):
    """Snap a vertex onto its active constraint set by least squares."""
    resid = A @ x - b
    scale = 1.0 + float(np.linalg.norm(x))
    active = np.abs(resid) <= 1e-6 * scale
    if int(np.sum(active)) < A.shape[1]:
        return x
    sol, *_ = np.linalg.lstsq(A[active], b[active], rcond=None)
    if not np.all(np.isfinite(sol)):
        return x
    if float(np.linalg.norm(sol - x)) > 1e-4 * scale:
        return x
    if float(np.max(A @ sol - b)) > tol:
        return x
    return sol


def vertex_enumeration(P, tol=TOL_GEOM):
    """All vertices of a bounded H-polyhedron.

    Runs incremental double description on the homogenization
    {(x, t) | Ax - tb <= 0, t >= 0} after an LP prefilter has established
    feasibility and boundedness.

    Args:
        P: The :class:`HPolyhedron` to enumerate.
        tol: Activity and deduplication tolerance on unit-normalized data.

    Returns:
        A :class:`VPolytope` whose vertex set is exactly the vertex set of P.

    Raises:
        EmptyPolyhedron: The system is infeasible.
        UnboundedPolyhedron: The recession cone is nontrivial.
    """
    n = P.ambient_dim
    if P.nhalfspaces == 0:
        raise UnboundedPolyhedron("the whole space has no vertices")
    A = P.normals_matrix()
    b = P.offsets_vector()
    row_norms = np.linalg.norm(A, axis=1)
    A = A / row_norms[:, None]
    b = b / row_norms
    _check_feasible_bounded(A, b, tol)
    M = np.hstack([A, -b[:, None]])
    t_row = np.zeros(n + 1)
    t_row[n] = -1.0
    M = np.vstack([M, t_row])
    rays = _dd_cone_rays(M, tol)
    t = rays[:, n]
    verts = []
    for ray, ti in zip(rays, t):
        if ti > tol:
            verts.append(_polish_vertex(ray[:n] / ti, A, b, tol))
        else:
            logger.debug("dropping a numerically recessive ray (t=%.2e)", ti)
    if not verts:
        raise EmptyPolyhedron("no vertices found for the bounded polyhedron")
    return VPolytope(np.array(verts), tol=tol)


def facet_enumeration(P, tol=TOL_GEOM):
    """Irredundant H-representation of the hull of a full-dimensional polytope.

    Works through polar duality: after shifting the vertex centroid to the
    origin, the vertices of the polar polytope {y | (v - c) . y <= 1} are in
    bijection with the facets of conv(P).  Facet normals come out outward
    and are returned unit-normalized, sorted lexicographically.

    Raises:
        DegenerateInput: conv(P) is not full-dimensional.
    """
    V = P.vertices
    k, n = V.shape
    c = V.mean(axis=0)
    shifted = V - c
    svals = np.linalg.svd(shifted, compute_uv=False) if k > 1 else np.zeros(1)
    rank_tol = max(k, n) * 1e-10 * (svals[0] if svals.size and svals[0] > 0 else 1.0)
    rank = int(np.sum(svals > rank_tol))
    if rank < n:
        raise DegenerateInput(
            f"polytope is not full-dimensional (affine rank {rank} < {n})"
        )
    polar = HPolyhedron([Halfspace(row, 1.0) for row in shifted])
    try:
        dual_vertices = vertex_enumeration(polar, tol=tol)
    except (UnboundedPolyhedron, EmptyPolyhedron) as exc:
        # a full-dimensional hull with interior centroid has a bounded
        # nonempty polar, so either failure certifies flatness at ``tol``
        raise DegenerateInput(
            f"polytope is numerically flat at tolerance {tol:g}: {exc}"
        ) from exc
    facets = []
    for y in dual_vertices.vertices:
        nrm = float(np.linalg.norm(y))
        if nrm < tol:
            # the origin can appear as a polar vertex only for unbounded
            # duals, which full-dimensionality rules out
            raise InvariantViolation("zero polar vertex in facet enumeration")
        facets.append(Halfspace(y / nrm, (1.0 + float(y @ c)) / nrm))
    facets.sort(key=lambda h: (tuple(h.normal), h.offset))
    return HPolyhedron(facets, ambient_dim=n)


def cone_hull(P):
    """Conical hull of a polytope's vertex set.

    Rays are the normalized nonzero vertices; duplicate directions collapse.
    Vertices with norm below ``TOL_GEOM`` are skipped with a warning.

    Raises:
        DegenerateInput: Every vertex was (numerically) zero.
    """
    keep = []
    for v in P.vertices:
        if float(np.linalg.norm(v)) < TOL_GEOM:
            logger.warning("cone_hull: skipping a zero vertex")
            continue
        keep.append(v)
    if not keep:
        raise DegenerateInput("cone hull of the zero vertex set is trivial")
    return VCone(np.array(keep))


def cone_membership(d, K, tol=TOL_LP):
    """Whether d lies in the conical hull of K's rays.

    Decided by a linear feasibility program: minimize the l1 residual of
    sum_i lambda_i r_i = d over lambda >= 0 and compare the optimum against
    ``tol``.  The query direction is scaled to unit norm first, so the test
    is scale-invariant.

    Args:
        d: Query direction.
        K: A :class:`VCone`.
        tol: Residual threshold.

    Returns:
        True iff d is a nonnegative combination of the rays within ``tol``.
    """
    d = _as_vector(d, "query direction")
    if d.shape[0] != K.ambient_dim:
        raise InputError(
            f"direction length {d.shape[0]} != ambient dim {K.ambient_dim}"
        )
    nrm = float(np.linalg.norm(d))
    if nrm <= tol:
        return True
    if K.nrays == 0:
        return False
    dn = d / nrm
    n = K.ambient_dim
    k = K.nrays
    c = np.concatenate([np.zeros(k), np.ones(2 * n)])
    A_eq = np.hstack([K.rays.T, np.eye(n), -np.eye(n)])
    res = _linprog(c, A_eq=A_eq, b_eq=dn, bounds=[(0, None)] * (k + 2 * n))
    if res.status != 0:
        raise SolverFailure("cone membership feasibility program did not solve")
    return float(res.fun) <= tol


def point_polytope_distance(v, P, tol=TOL_QP):
    """Euclidean distance from a point to a polytope, with the minimizer.

    Runs Wolfe's minimum-norm-point algorithm on the shifted vertex set
    {p - v}: maintain a corral of vertices, alternate between adding the
    vertex most violating the optimality condition and restricting to the
    affine minimizer, until x . x - min_i x . p_i is nonpositive within
    tolerance (the variational inequality characterizing the projection).

    Args:
        v: Query point.
        P: A :class:`VPolytope`.
        tol: Certified slack of the variational inequality at the returned
            point.

    Returns:
        Tuple ``(distance, closest)`` with ``closest`` in conv(P).
    """
    v = _as_vector(v, "query point")
    if v.shape[0] != P.ambient_dim:
        raise InputError(f"point length {v.shape[0]} != ambient dim {P.ambient_dim}")
    Q = P.vertices - v
    k = Q.shape[0]
    sq = np.einsum("ij,ij->i", Q, Q)
    start = int(np.argmin(sq))
    corral = [start]
    weights = np.array([1.0])
    x = Q[start].copy()
    scale = 1.0 + float(np.max(sq))
    stop_gap = min(tol, 1e-12 * scale)
    max_major = 16 * k + 64
    for _ in range(max_major):
        gaps = x @ x - Q @ x
        j = int(np.argmax(gaps))
        if gaps[j] <= stop_gap:
            break
        if j in corral:
            break
        corral.append(j)
        weights = np.append(weights, 0.0)
        # minor loop: pull x to the affine minimizer, dropping vertices
        # whose barycentric weight would turn negative
        for _ in range(16 * k + 64):
            S = Q[corral]
            m = len(corral)
            G = np.empty((m + 1, m + 1))
            G[:m, :m] = S @ S.T
            G[:m, m] = 1.0
            G[m, :m] = 1.0
            G[m, m] = 0.0
            rhs = np.zeros(m + 1)
            rhs[m] = 1.0
            try:
                sol = np.linalg.solve(G, rhs)
                alpha = sol[:m]
            except np.linalg.LinAlgError:
                alpha, *_ = np.linalg.lstsq(G[: m + 1, :m], rhs, rcond=None)
            if np.all(alpha >= -1e-14):
                weights = np.maximum(alpha, 0.0)
                weights = weights / weights.sum()
                x = weights @ S
                break
            neg = alpha < -1e-14
            ratios = weights[neg] / (weights[neg] - alpha[neg])
            theta = float(np.min(ratios))
            weights = (1.0 - theta) * weights + theta * alpha
            weights[weights < 1e-14] = 0.0
            keep = weights > 0.0
            if not np.any(keep):
                keep[0] = True
                weights[0] = 1.0
            corral = [corral[i] for i in range(m) if keep[i]]
            weights = weights[keep]
            weights = weights / weights.sum()
            x = weights @ Q[corral]
        else:
            break
    dist = float(np.linalg.norm(x))
    return dist, x + v


def hausdorff_polytopes(O, I, tol=TOL_GEOM):
    """Hausdorff distance between nested polytopes conv(I) subseteq conv(O).

    Under the inclusion the distance is attained at a vertex of the outer
    polytope, so the value is the maximum over vertices of O of the distance
    to conv(I).  The inclusion precondition is verified within ``tol``.

    Raises:
        InvariantViolation: Some vertex of I is farther than ``tol`` from
            conv(O).
    """
    if O.ambient_dim != I.ambient_dim:
        raise InputError("polytopes live in different ambient dimensions")
    for w in I.vertices:
        d, _ = point_polytope_distance(w, O)
        if d > tol:
            raise InvariantViolation(
                f"inner polytope vertex {w.tolist()} lies {d:.3e} outside the "
                "outer polytope"
            )
    best = 0.0
    for vtx in O.vertices:
        d, _ = point_polytope_distance(vtx, I)
        best = max(best, d)
    return best


def box_truncated_vertices(O, tol=TOL_GEOM):
    """Nonzero vertices of {x in O | max_i |x_i| <= 1} for a cone O.

    Appends the 2n box halfspaces to the homogeneous system and enumerates
    vertices; the zero vertex (inf-norm below ``tol``) is filtered out.

    Args:
        O: Homogeneous :class:`HPolyhedron` (all offsets zero).
        tol: Enumeration and zero-filter tolerance.

    Returns:
        List of coordinate vectors, lexicographically sorted.
    """
    if not O.is_cone:
        raise InputError("box truncation expects a homogeneous halfspace system")
    n = O.ambient_dim
    box = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        box.append(Halfspace(e, 1.0))
        box.append(Halfspace(-e, 1.0))
    truncated = O.intersect(box)
    verts = vertex_enumeration(truncated, tol=tol)
    out = [v for v in verts.vertices if float(np.max(np.abs(v))) >= tol]
    return out


# ---------------------------------------------------------------------------
# cone projections and the truncated Hausdorff estimator


def _project_cone_rays(u, rays):
    """Euclidean projection onto cone{rays} by nonnegative least squares.

    Solved as a bounded-variable least-squares problem; the active-set
    solver is deterministic and exact on degenerate ray sets where plain
    nonnegative least squares can stall at a suboptimal support.
    """
    if rays.shape[0] == 0:
        return np.zeros_like(u)
    sol = lsq_linear(
        rays.T,
        u,
        bounds=(0.0, np.inf),
        method="bvls",
        tol=1e-14,
        max_iter=max(60, 12 * rays.shape[0]),
    )
    return rays.T @ sol.x


def project_onto_cone(u, K):
    """Projection onto a cone in either representation.

    V-representation projects directly; a homogeneous H-representation
    {x | Wx <= 0} goes through the Moreau decomposition u = proj_K(u) +
    proj_polar(u) with the polar cone spanned by the rows of W.
    """
    if isinstance(K, VCone):
        return _project_cone_rays(u, K.rays)
    if isinstance(K, HPolyhedron):
        if not K.is_cone:
            raise InputError("projection expects a homogeneous halfspace system")
        W = K.normals_matrix()
        if W.shape[0] == 0:
            return u.copy()
        return u - _project_cone_rays(u, W)
    raise InputError(f"unsupported cone representation {type(K).__name__}")


def _section_distance(p, K):
    """Distance from p to the unit-ball section K intersect B."""
    q = project_onto_cone(p, K)
    nrm = float(np.linalg.norm(q))
    if nrm > 1.0:
        q = q / nrm
    return float(np.linalg.norm(p - q))


def _section_anchors(K):
    """Deterministic points of K intersect B that are likely extreme."""
    pts = []
    if isinstance(K, VCone):
        pts.extend(K.rays)
    elif isinstance(K, HPolyhedron):
        try:
            for v in box_truncated_vertices(K):
                nrm = float(np.linalg.norm(v))
                pts.append(v / nrm if nrm > 1.0 else v)
        except (EmptyPolyhedron, UnboundedPolyhedron, InvariantViolation):
            logger.debug("anchor extraction failed; falling back to sampling only")
    return pts


def truncated_hausdorff_estimate(K1, K2, samples=2000, seed=0):
    """Monte-Carlo lower estimate of the truncated Hausdorff distance.

    The truncated distance between cones is the Hausdorff distance between
    their unit-ball sections.  The estimator samples unit directions,
    projects them into each section, measures the distance from each sampled
    section point to the other section exactly (cone projection plus radial
    shrink), and maximizes symmetrically.  Deterministic ray and
    box-vertex anchors are included, so simple polyhedral cases evaluate
    exactly.  The result never exceeds the true distance (up to projection
    round-off) and converges to it from below as samples grow.

    Args:
        K1: Cone as :class:`VCone` or homogeneous :class:`HPolyhedron`.
        K2: Same, in either representation.
        samples: Number of random unit directions per side.
        seed: RNG seed; fixes the estimate exactly.

    Returns:
        The estimated distance (float, >= 0).
    """
    n1 = K1.ambient_dim
    n2 = K2.ambient_dim
    if n1 != n2:
        raise InputError("cones live in different ambient dimensions")
    if samples < 0:
        raise InputError("sample count must be nonnegative")
    rng = np.random.default_rng(seed)
    best = 0.0
    for source, target in ((K1, K2), (K2, K1)):
        candidates = list(_section_anchors(source))
        if samples > 0:
            dirs = rng.standard_normal((samples, n1))
            norms = np.linalg.norm(dirs, axis=1)
            norms[norms < 1e-12] = 1.0
            dirs = dirs / norms[:, None]
            for u in dirs:
                p = project_onto_cone(u, source)
                nrm = float(np.linalg.norm(p))
                if nrm > 1.0:
                    p = p / nrm
                candidates.append(p)
        for p in candidates:
            best = max(best, _section_distance(np.asarray(p, dtype=float), target))
    return best


# ---------------------------------------------------------------------------
# output pruning helpers


def prune_nonextreme_rays(K, tol=TOL_LP):
    """Minimal generating subset of a cone's ray list.

    Greedily drops any ray contained in the conical hull of the remaining
    ones (lexicographic scan, deterministic).  For a pointed cone the
    result is exactly the extreme-ray set.
    """
    rays = [np.asarray(r, dtype=float) for r in K.rays]
    keep = list(range(len(rays)))
    for i in range(len(rays)):
        if i not in keep:
            continue
        others = [rays[j] for j in keep if j != i]
        if not others:
            continue
        if cone_membership(rays[i], VCone(np.array(others)), tol=tol):
            keep.remove(i)
    return VCone(np.array([rays[j] for j in keep]))


def prune_redundant_halfspaces(P, tol=TOL_LP):
    """Drop halfspaces implied by the remaining system.

    A halfspace is redundant when maximizing its functional over the other
    halfspaces (intersected with the unit inf-norm box when the system is
    homogeneous, which preserves conic redundancy) stays below its offset
    within ``tol``.  Halfspaces are scanned in stored order.
    """
    hs = list(P.halfspaces)
    homogeneous = P.is_cone
    n = P.ambient_dim
    i = 0
    while i < len(hs):
        h = normalize(hs[i])
        others = hs[:i] + hs[i + 1 :]
        rest = HPolyhedron(others, ambient_dim=n) if others else None
        if rest is None:
            i += 1
            continue
        A = rest.normals_matrix()
        b = rest.offsets_vector()
        bounds = [(-1.0, 1.0)] * n if homogeneous else [(None, None)] * n
        res = _linprog(-h.normal, A_ub=A, b_ub=b, bounds=bounds)
        if res.status == 0 and -res.fun <= h.offset + tol:
            hs.pop(i)
            continue
        i += 1
    return HPolyhedron(hs, ambient_dim=n)
