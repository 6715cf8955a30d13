"""Recession-cone approximation for spectrahedral shadows.

Given S = {x | exists y: A(x) + B(y) + A0 >= 0} with a strict point xbar
and a known unit recession direction dbar, the algorithm approximates
recc S by an inner cone I (V-form) and an outer cone O (homogeneous
H-form) using only step (P2) and supporting-halfspace (D2) queries
against S itself; no description of recc S is ever formed.

Each pass enumerates the nonzero vertices of the box-truncated outer cone
{x in O | ||x||_inf <= 1}.  For a vertex v, the probe directions

    d_v^k = ((2^k - 1) / 2^k) v + (1 / 2^k) dbar,   k = 1, 2, ...

walk from dbar toward v.  A probe that escapes to infinity (P2 unbounded)
certifies a recession direction, which joins I; a bounded probe yields a
supporting halfspace (D2) whose homogeneous version cuts v off O, and the
pass restarts on the new vertex set.  Probing for v stops once
||v - d_v^k|| <= eps.  The run terminates when a full pass upgrades
nothing: every surviving outer vertex is then within eps of a certified
inner ray, which bounds the truncated Hausdorff distance between O and I.
"""

import dataclasses
import logging
import math

import numpy as np

from .config import ApproxConfig
from .conic import solve_D2_shadow, solve_P2_shadow
from .errors import (
    AlgorithmFailure,
    AssumptionViolation,
    InputError,
    InvariantViolation,
    IterationLimit,
)
from .pencil import min_eigenvalue, pencil_eval
from .polyhedra import (
    ApproxResult,
    Halfspace,
    HPolyhedron,
    VCone,
    box_truncated_vertices,
    cone_membership,
    prune_nonextreme_rays,
    prune_redundant_halfspaces,
    truncated_hausdorff_estimate,
)
from .spectra import certify_cone_equality

logger = logging.getLogger(__name__)

#: Pass cap used when no config is supplied; each cut costs one pass
#: restart, so shadows need more headroom than strip refinement rounds.
DEFAULT_MAX_PASSES = 500

__all__ = [
    "DEFAULT_MAX_PASSES",
    "ShadowApproxState",
    "DirectionProbe",
    "check_assumptions_shadow",
    "initialize_shadow",
    "direction",
    "k_max_steps",
    "vertex_certificate",
    "approximate_recession_cone_shadow",
]


@dataclasses.dataclass(frozen=True)
class ShadowApproxState:
    """One pass state of the shadow approximation.

    Attributes:
        S: The shadow instance being queried.
        xbar: Strict point of S (step-problem base point).
        dbar: Known recession direction inside the unit ball.
        O: Outer cone, homogeneous halfspaces only.
        I: Inner cone, unit rays.
        upgraded: Whether O changed during the current pass.
    """

    S: object
    xbar: np.ndarray
    dbar: np.ndarray
    O: HPolyhedron
    I: VCone
    upgraded: bool


@dataclasses.dataclass(frozen=True)
class DirectionProbe:
    """One probe of the direction walk from dbar toward an outer vertex."""

    v: np.ndarray
    k: int
    d: np.ndarray
    k_max: int


def direction(v, dbar, k):
    """The k-th walk direction d_v^k = ((2^k-1)/2^k) v + (1/2^k) dbar.

    The gap to the target halves each step: ||v - d_v^k|| = ||v - dbar|| / 2^k.
    """
    if int(k) != k or k < 1:
        raise InputError(f"step index must be an integer >= 1, got {k}")
    v = np.asarray(v, dtype=float)
    dbar = np.asarray(dbar, dtype=float)
    if v.shape != dbar.shape:
        raise InputError(f"shape mismatch: {v.shape} vs {dbar.shape}")
    scale = 2.0 ** int(k)
    return ((scale - 1.0) / scale) * v + (1.0 / scale) * dbar


def k_max_steps(v, dbar, eps):
    """Number of walk steps until the remaining gap drops below eps.

    Zero when the target is already within eps of dbar; otherwise the
    smallest k with ||v - dbar|| / 2^k <= eps.
    """
    if not eps > 0:
        raise InputError(f"eps must be positive, got {eps}")
    gap = float(np.linalg.norm(np.asarray(v, dtype=float) - np.asarray(dbar, dtype=float)))
    if gap <= eps:
        return 0
    return int(math.ceil(math.log2(gap / eps)))


def _as_vector(x, name, n):
    arr = np.asarray(x, dtype=float)
    if arr.shape != (n,):
        raise InputError(f"{name} has shape {arr.shape}, expected ({n},)")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} must be finite")
    return arr


def _tally(tally, count=1):
    if tally is not None:
        tally.append(count)


def _membership_tol(eps):
    """Inner-cone membership tolerance for probes at accuracy eps.

    Probes near a vertex are spaced on the order of eps, so a fixed
    tolerance would absorb every fine probe into a coarser ray once eps
    drops below it; scaling with eps keeps absorption below the target
    accuracy.  The same tolerance must guard ray pruning, or pruning could
    drop the very rays the exit certificate relies on.
    """
    return min(1e-7, eps / 10.0)


def check_assumptions_shadow(S, xbar, ybar, dbar, *, tol_psd=1e-7, tol_lin=1e-7,
                             tol_gap=1e-7, solver=None, tally=None):
    """Verify the checkable shadow assumptions; report what is trusted.

    Checked: (xbar, ybar) is a strict point of the lifted constraint; dbar
    lies in the unit ball and is nonzero; the step problem along dbar is
    unbounded (dbar is a recession direction); the step problem along
    -dbar is bounded (otherwise 0 would be interior to recc S and S would
    be the whole space).  Closedness of S and interiority of dbar cannot
    be decided from queries and are flagged unverified.

    Returns:
        Report dict with the measured quantities and verification flags.

    Raises:
        AssumptionViolation: S1 (S is the whole space), S2 (supplied point
            is not strict), or S3 (dbar unusable).
    """
    n = S.nvars
    m = S.nlifted
    xbar = _as_vector(xbar, "xbar", n)
    dbar = _as_vector(dbar, "dbar", n)
    if m == 0:
        if ybar is not None and np.asarray(ybar).size != 0:
            raise InputError("ybar supplied for an instance without lifted variables")
        lifted = pencil_eval(S.pencilA, xbar).array + S.constant.array
    else:
        ybar = _as_vector(ybar, "ybar", m)
        lifted = (
            pencil_eval(S.pencilA, xbar).array
            + pencil_eval(S.pencilB, ybar).array
            + S.constant.array
        )
    report = {}
    lam = min_eigenvalue(lifted)
    report["strict_min_eigenvalue"] = lam
    if lam <= tol_psd:
        raise AssumptionViolation(
            "S2",
            f"the supplied point is not strict (min eigenvalue {lam:.3e})",
            report=report,
        )
    nrm = float(np.linalg.norm(dbar))
    report["dbar_norm"] = nrm
    if nrm < 1e-12:
        raise AssumptionViolation("S3", "dbar is the zero vector", report=report)
    if nrm > 1.0 + 1e-12:
        raise AssumptionViolation(
            "S3", f"dbar has norm {nrm:.6g}, outside the unit ball", report=report
        )
    kw = dict(tol_psd=tol_psd, tol_lin=tol_lin, tol_gap=tol_gap, solver=solver)
    ahead = solve_P2_shadow(S, xbar, dbar, **kw)
    _tally(tally)
    if not ahead.is_unbounded:
        if not ahead.is_optimal:
            raise AlgorithmFailure(
                f"probe along dbar returned {ahead.status.value}: "
                f"{ahead.detail or 'no detail'}"
            )
        raise AssumptionViolation(
            "S3",
            "the step problem along dbar is bounded, so dbar is not a "
            "recession direction",
            report=report,
        )
    report["dbar_is_recession_direction"] = True
    behind = solve_P2_shadow(S, xbar, -dbar, **kw)
    _tally(tally)
    if behind.is_unbounded:
        raise AssumptionViolation(
            "S1",
            "the step problem along -dbar is also unbounded, so 0 would be "
            "interior to the recession cone and S would be the whole space",
            report=report,
        )
    if not behind.is_optimal:
        raise AlgorithmFailure(
            f"probe along -dbar returned {behind.status.value}: "
            f"{behind.detail or 'no detail'}"
        )
    report["negated_direction_bounded"] = True
    report["closedness_verified"] = False
    report["interiority_verified"] = False
    return report


def initialize_shadow(S, xbar, dbar, *, tol_psd=1e-7, tol_lin=1e-7,
                      tol_gap=1e-7, solver=None, tally=None):
    """Initial pair: a single supporting halfspace and the ray of dbar.

    The supporting halfspace comes from the cut problem along -dbar; its
    homogeneous version contains every recession direction of S, while
    -dbar itself strictly violates it (the cut normalization forces
    w* . (-dbar) = 1), so the outer cone starts on the correct side.

    Raises:
        AlgorithmFailure: The cut solve is not Optimal.
        InvariantViolation: The computed halfspace fails to cut -dbar.
    """
    n = S.nvars
    xbar = _as_vector(xbar, "xbar", n)
    dbar = _as_vector(dbar, "dbar", n)
    sol = solve_D2_shadow(S, xbar, -dbar, tol_psd=tol_psd, tol_lin=tol_lin,
                          tol_gap=tol_gap, solver=solver)
    _tally(tally)
    if not sol.is_optimal:
        raise AlgorithmFailure(
            f"initial cut along -dbar returned {sol.status.value}: "
            f"{sol.detail or 'no detail'}"
        )
    wn = sol.dual_vector / float(np.linalg.norm(sol.dual_vector))
    if float(wn @ (-dbar)) <= 0.0:
        raise InvariantViolation("initial outer halfspace does not cut -dbar")
    O = HPolyhedron([Halfspace(wn, 0.0)], ambient_dim=n)
    I = VCone(dbar[None, :])
    return O, I


def vertex_certificate(outer, inner, dbar, eps, tol=None):
    """Whether every box-truncated outer vertex is eps-reached by the inner cone.

    For each nonzero vertex v of {x in outer | ||x||_inf <= 1}, the walk
    direction at its final step index must be a member of the inner cone.
    This is the exit condition the refinement establishes constructively;
    re-checking it decouples the reported certificate from the loop logic.
    The membership tolerance defaults to ``min(1e-7, eps / 10)`` so it stays
    below the finest probe spacing even for tiny eps.
    """
    if tol is None:
        tol = _membership_tol(eps)
    dbar = np.asarray(dbar, dtype=float)
    for v in box_truncated_vertices(outer):
        k = k_max_steps(v, dbar, eps)
        d = dbar if k == 0 else direction(v, dbar, k)
        if not cone_membership(d, inner, tol=tol):
            return False
    return True


def approximate_recession_cone_shadow(S, xbar, ybar, dbar, cfg=None, *,
                                      use_membership_shortcircuit=True):
    """Inner/outer polyhedral approximation of a shadow's recession cone.

    Args:
        S: The shadow instance; only step and cut queries against it are used.
        xbar: Strict point of S (with lift witness ybar when S has lifted
            variables).
        ybar: Lift witness for xbar, or None when S has none.
        dbar: Known recession direction in the unit ball, interior to
            recc S (interiority is trusted, not checkable).
        cfg: :class:`ApproxConfig`; when omitted, defaults with the pass
            cap raised to ``DEFAULT_MAX_PASSES``.
        use_membership_shortcircuit: Skip the step solve for probe
            directions already inside the inner cone.  Disabling repeats
            the solves and must not change the result; the knob exists for
            that differential check.

    Returns:
        :class:`ApproxResult`; ``epsilon_certified`` is an independent
        distance estimate between the output cones (exactly 0.0 when the
        cones are certified equal), not the walk bound.

    Raises:
        AssumptionViolation: S1, S2, or S3 fails a checkable test.
        IterationLimit: The pass cap was hit; the partial result is attached.
    """
    cfg = cfg if cfg is not None else ApproxConfig(max_iterations=DEFAULT_MAX_PASSES)
    n = S.nvars
    tally = []
    check_assumptions_shadow(
        S, xbar, ybar, dbar,
        tol_psd=cfg.tol_psd, tol_lin=cfg.tol_lin, tol_gap=cfg.tol_gap, tally=tally,
    )
    xbar = _as_vector(xbar, "xbar", n)
    dbar = _as_vector(dbar, "dbar", n)
    kw = dict(tol_psd=cfg.tol_psd, tol_lin=cfg.tol_lin, tol_gap=cfg.tol_gap)
    O, I = initialize_shadow(S, xbar, dbar, tally=tally, **kw)
    member_tol = _membership_tol(cfg.epsilon)

    passes = 0
    while True:
        if passes >= cfg.max_iterations:
            inner = prune_nonextreme_rays(I, tol=member_tol)
            outer = prune_redundant_halfspaces(O)
            partial = ApproxResult(
                inner=inner,
                outer=outer,
                epsilon_certified=truncated_hausdorff_estimate(
                    inner, outer, seed=cfg.seed
                ),
                iterations=passes,
                subproblem_count=len(tally),
            )
            raise IterationLimit(
                f"outer cone still received upgrades after {passes} passes",
                partial=partial,
            )
        passes += 1
        upgraded = False
        for v in box_truncated_vertices(O, tol=cfg.tol_geom):
            steps = k_max_steps(v, dbar, cfg.epsilon)
            for k in range(1, steps + 1):
                p = DirectionProbe(v=v, k=k, d=direction(v, dbar, k), k_max=steps)
                if use_membership_shortcircuit and cone_membership(
                    p.d, I, tol=member_tol
                ):
                    continue
                step = solve_P2_shadow(S, xbar, p.d, **kw)
                _tally(tally)
                if step.is_unbounded:
                    I = I.with_rays(p.d, tol=cfg.tol_geom)
                    continue
                if not step.is_optimal:
                    raise AlgorithmFailure(
                        f"step solve at pass {passes} returned "
                        f"{step.status.value}: {step.detail or 'no detail'}"
                    )
                cut = solve_D2_shadow(S, xbar, p.d, **kw)
                _tally(tally)
                if not cut.is_optimal:
                    raise AlgorithmFailure(
                        f"cut solve at pass {passes} returned "
                        f"{cut.status.value}: {cut.detail or 'no detail'}"
                    )
                wn = cut.dual_vector / float(np.linalg.norm(cut.dual_vector))
                margin = float(wn @ v)
                if margin <= 0.0:
                    raise InvariantViolation(
                        f"cut failed to separate the probed vertex "
                        f"(margin {margin:.3e})"
                    )
                logger.debug(
                    "pass %d: cut at vertex %s, margin %.3e",
                    passes, np.round(v, 9).tolist(), margin,
                )
                O = HPolyhedron(
                    list(O.halfspaces) + [Halfspace(wn, 0.0)], ambient_dim=n
                )
                upgraded = True
                break
            if upgraded:
                break
        if not upgraded:
            break
        logger.info("pass %d upgraded the outer cone (%d halfspaces)",
                    passes, len(O.halfspaces))

    inner = prune_nonextreme_rays(I, tol=member_tol)
    outer = prune_redundant_halfspaces(O)
    if not vertex_certificate(outer, inner, dbar, cfg.epsilon):
        raise InvariantViolation(
            "termination certificate failed: an outer vertex has no "
            "eps-close inner member"
        )
    epsilon_certified = truncated_hausdorff_estimate(inner, outer, seed=cfg.seed)
    if certify_cone_equality(inner, outer):
        logger.info("inner and outer cones coincide; certifying distance 0")
        epsilon_certified = 0.0
    result = ApproxResult(
        inner=inner,
        outer=outer,
        epsilon_certified=epsilon_certified,
        iterations=passes,
        subproblem_count=len(tally),
    )
    return result.validate(tol=max(cfg.tol_geom, 1e-6))
