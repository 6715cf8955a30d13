"""Independent validation oracles: ray shooting, sampling, grid distances.

These routes deliberately avoid the approximation algorithms' own code
paths so they can confirm or refute their outputs: recession membership is
decided by fresh step solves, feasible points and recession directions are
produced by rejection sampling against the raw eigenvalue conditions, and
the brute-force distance walks a deterministic direction grid instead of
the seeded Monte-Carlo estimator.
"""

import dataclasses
import logging
import math

import numpy as np

from .conic import solve_P2_shadow
from .errors import InputError, SamplingExhausted
from .pencil import MatrixPencil, ShadowInstance, Spectrahedron, pencil_eval
from .polyhedra import HPolyhedron, VCone, box_truncated_vertices, project_onto_cone

logger = logging.getLogger(__name__)

__all__ = [
    "RayShootOracle",
    "is_recession_direction",
    "sample_recession_directions",
    "sample_feasible_points",
    "brute_force_delta",
]

#: Attempt budget multiplier shared by every rejection sampler.
ATTEMPT_FACTOR = 100

#: Fixed stream for the >= 4 dimensional direction grids; part of the
#: oracle definition, never user-tunable, so results stay reproducible.
_GRID_SEED = 20240405


def _as_shadow(target):
    if isinstance(target, ShadowInstance):
        return target
    if isinstance(target, Spectrahedron):
        return ShadowInstance.from_spectrahedron(target)
    raise InputError(f"unsupported oracle target {type(target).__name__}")


def _stacked_pencil(pencil):
    return np.stack([m.array for m in pencil.mats])


def _batch_min_eig(mats):
    return np.linalg.eigvalsh(mats)[:, 0]


@dataclasses.dataclass(frozen=True)
class RayShootOracle:
    """Recession-membership oracle backed by step solves from a fixed point.

    A direction d recedes from the target set iff stepping from the
    interior point along d escapes to infinity; the oracle asks exactly
    that question, one conic solve per query, sharing no state with the
    approximation loops it validates.

    Attributes:
        target: :class:`Spectrahedron` or :class:`ShadowInstance`.
        interior_point: Strictly feasible point of the target.
        lift_witness: Lift certificate for the interior point; required
            exactly when the target has lifted variables.
        seed: Stream seed for the sampling helpers.
        tol_psd: Strictness threshold on the interior point's eigenvalues.
    """

    target: object
    interior_point: np.ndarray
    lift_witness: np.ndarray = None
    seed: int = 0
    tol_psd: float = 1e-7

    def __post_init__(self):
        shadow = _as_shadow(self.target)
        x = np.asarray(self.interior_point, dtype=float)
        if x.shape != (shadow.nvars,):
            raise InputError(
                f"interior_point has shape {x.shape}, expected ({shadow.nvars},)"
            )
        object.__setattr__(self, "interior_point", x)
        lifted = pencil_eval(shadow.pencilA, x).array + shadow.constant.array
        if shadow.nlifted > 0:
            if self.lift_witness is None:
                raise InputError("lift_witness required for a lifted target")
            y = np.asarray(self.lift_witness, dtype=float)
            if y.shape != (shadow.nlifted,):
                raise InputError(
                    f"lift_witness has shape {y.shape}, expected ({shadow.nlifted},)"
                )
            object.__setattr__(self, "lift_witness", y)
            lifted = lifted + pencil_eval(shadow.pencilB, y).array
        elif self.lift_witness is not None:
            raise InputError("lift_witness supplied for a target without lifts")
        lam = float(np.linalg.eigvalsh(lifted)[0])
        if lam <= self.tol_psd:
            raise InputError(
                f"interior_point is not strictly feasible (min eigenvalue {lam:.3e})"
            )
        object.__setattr__(self, "_shadow", shadow)

    @property
    def shadow(self):
        return self._shadow


def is_recession_direction(o, d, solver=None):
    """Tri-state recession test: True, False, or None when undecidable.

    True iff the step problem from the oracle's interior point along d is
    unbounded, False iff it has a finite optimum; a solve that settles on
    neither (solver failure, inaccurate status) yields None so callers
    never mistake numerical trouble for a geometric answer.
    """
    d = np.asarray(d, dtype=float)
    if float(np.linalg.norm(d)) < 1e-12:
        raise InputError("direction must be nonzero")
    sol = solve_P2_shadow(o.shadow, o.interior_point, d, solver=solver)
    if sol.is_unbounded:
        return True
    if sol.is_optimal:
        return False
    return None


def _eigen_reject_directions(shadow, count, rng, budget):
    """Batch eigenvalue rejection for targets without lifted variables."""
    mats = _stacked_pencil(shadow.pencilA)
    n = shadow.nvars
    out = []
    attempts = 0
    while len(out) < count and attempts < budget:
        batch = min(256, budget - attempts)
        cand = rng.standard_normal((batch, n))
        attempts += batch
        norms = np.linalg.norm(cand, axis=1)
        keep = norms > 1e-12
        cand = cand[keep] / norms[keep, None]
        lams = _batch_min_eig(np.einsum("nk,kij->nij", cand, mats))
        for d, lam in zip(cand, lams):
            if lam >= 0.0 and len(out) < count:
                out.append(d)
    return out, attempts


def _step_reject_directions(o, count, rng, budget):
    """Per-candidate step solves; candidates diffuse around accepted ones."""
    n = o.shadow.nvars
    out = []
    attempts = 0
    while len(out) < count and attempts < budget:
        g = rng.standard_normal(n)
        if out and rng.uniform() < 0.5:
            anchor = out[int(rng.integers(len(out)))]
            g = anchor + 0.5 * g
        nrm = float(np.linalg.norm(g))
        attempts += 1
        if nrm < 1e-12:
            continue
        d = g / nrm
        if is_recession_direction(o, d) is True:
            out.append(d)
    return out, attempts


def sample_recession_directions(o, count):
    """``count`` unit recession directions of the oracle's target.

    Rejection sampling, deterministic given the oracle's seed: targets
    without lifted variables are filtered by the exact eigenvalue
    condition on the pencil, lifted targets by fresh step solves seeded
    from already accepted directions.

    Raises:
        SamplingExhausted: No ``count`` acceptances within
            ``ATTEMPT_FACTOR * count`` candidate draws.
    """
    if count < 1:
        raise InputError(f"count must be at least 1, got {count}")
    rng = np.random.default_rng(o.seed)
    budget = ATTEMPT_FACTOR * count
    if o.shadow.nlifted == 0:
        out, attempts = _eigen_reject_directions(o.shadow, count, rng, budget)
    else:
        out, attempts = _step_reject_directions(o, count, rng, budget)
    if len(out) < count:
        raise SamplingExhausted(
            f"accepted {len(out)}/{count} directions in {attempts} attempts; "
            "the recession cone may have empty interior"
        )
    return out


def sample_feasible_points(target, base_point, count, *, lift_witness=None,
                           seed=0, scale=1.0):
    """``count`` points of the target set, sampled around ``base_point``.

    Gaussian proposals of width ``scale`` are filtered by the exact
    eigenvalue feasibility condition; lifted targets are sampled jointly
    in (x, y) around (base_point, lift_witness) and only the x part is
    returned (a lifted feasible pair certifies x's membership).

    Returns:
        Array of shape (count, n).

    Raises:
        SamplingExhausted: Acceptance failed within ``ATTEMPT_FACTOR * count``
            draws; a smaller ``scale`` usually fixes it.
    """
    if count < 1:
        raise InputError(f"count must be at least 1, got {count}")
    shadow = _as_shadow(target)
    n, m = shadow.nvars, shadow.nlifted
    base = np.asarray(base_point, dtype=float)
    if base.shape != (n,):
        raise InputError(f"base_point has shape {base.shape}, expected ({n},)")
    if m > 0:
        if lift_witness is None:
            raise InputError("lift_witness required for a lifted target")
        witness = np.asarray(lift_witness, dtype=float)
        if witness.shape != (m,):
            raise InputError(
                f"lift_witness has shape {witness.shape}, expected ({m},)"
            )
        center = np.concatenate([base, witness])
        mats = np.concatenate(
            [_stacked_pencil(shadow.pencilA), _stacked_pencil(shadow.pencilB)]
        )
    else:
        if lift_witness is not None:
            raise InputError("lift_witness supplied for a target without lifts")
        center = base
        mats = _stacked_pencil(shadow.pencilA)
    rng = np.random.default_rng(seed)
    budget = ATTEMPT_FACTOR * count
    out = []
    attempts = 0
    while len(out) < count and attempts < budget:
        batch = min(256, budget - attempts)
        cand = center + scale * rng.standard_normal((batch, n + m))
        attempts += batch
        evals = np.einsum("nk,kij->nij", cand, mats) + shadow.constant.array
        lams = _batch_min_eig(evals)
        for z, lam in zip(cand, lams):
            if lam >= 0.0 and len(out) < count:
                out.append(z[:n])
    if len(out) < count:
        raise SamplingExhausted(
            f"accepted {len(out)}/{count} points in {attempts} attempts; "
            "try a smaller scale"
        )
    return np.array(out)


def _grid_directions(n, grid):
    """Deterministic unit directions: exact circle grid in the plane, a
    Fibonacci lattice on the 2-sphere, a fixed-seed Gaussian cloud above."""
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        theta = np.linspace(0.0, 2.0 * np.pi, grid, endpoint=False)
        return np.stack([np.cos(theta), np.sin(theta)], axis=1)
    if n == 3:
        i = np.arange(grid, dtype=float) + 0.5
        z = 1.0 - 2.0 * i / grid
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        golden = np.pi * (3.0 - np.sqrt(5.0))
        theta = golden * i
        return np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=1)
    rng = np.random.default_rng(_GRID_SEED)
    dirs = rng.standard_normal((grid, n))
    norms = np.linalg.norm(dirs, axis=1)
    norms[norms < 1e-12] = 1.0
    return dirs / norms[:, None]


def _grid_error_bound(n, grid):
    if n == 1:
        return 0.0
    if n == 2:
        return 2.0 * np.pi / grid
    if n == 3:
        return 3.5 / math.sqrt(grid)
    return 4.0 * grid ** (-1.0 / (n - 1))


def _section_anchor_points(K):
    pts = []
    if isinstance(K, VCone):
        pts.extend(np.asarray(r, dtype=float) for r in K.rays)
    elif isinstance(K, HPolyhedron):
        for v in box_truncated_vertices(K):
            nrm = float(np.linalg.norm(v))
            pts.append(v / nrm if nrm > 1.0 else np.asarray(v, dtype=float))
    return pts


def _ball_section_distance(p, K):
    q = project_onto_cone(p, K)
    nrm = float(np.linalg.norm(q))
    if nrm > 1.0:
        q = q / nrm
    return float(np.linalg.norm(p - q))


def brute_force_delta(K1, K2, grid=None):
    """Deterministic grid estimate of the truncated Hausdorff distance.

    The distance between cones is measured between their unit-ball
    sections.  Each grid direction is projected into each section and its
    exact distance to the other section is taken; section anchor points
    (rays, normalized box vertices) are always included, so polyhedrally
    simple cases evaluate exactly.  The estimate approaches the true
    value from below; the grid's discretization error bound is logged.

    Args:
        K1: Cone as :class:`VCone` or homogeneous :class:`HPolyhedron`.
        K2: Same, in either representation.
        grid: Number of grid directions; defaults to 10**4 for ambient
            dimension <= 3 and 10**5 above.

    Returns:
        The estimated distance (float, >= 0).
    """
    n = K1.ambient_dim
    if K2.ambient_dim != n:
        raise InputError("cones live in different ambient dimensions")
    if grid is None:
        grid = 10**4 if n <= 3 else 10**5
    if grid < 1:
        raise InputError(f"grid must be positive, got {grid}")
    dirs = _grid_directions(n, grid)
    logger.info(
        "brute-force distance on a %d-point grid in R^%d, "
        "discretization error bound %.3g",
        len(dirs), n, _grid_error_bound(n, grid),
    )
    best = 0.0
    for source, target in ((K1, K2), (K2, K1)):
        candidates = _section_anchor_points(source)
        for u in dirs:
            p = project_onto_cone(u, source)
            nrm = float(np.linalg.norm(p))
            candidates.append(p / nrm if nrm > 1.0 else p)
        for p in candidates:
            best = max(best, _ball_section_distance(p, target))
    return float(best)
