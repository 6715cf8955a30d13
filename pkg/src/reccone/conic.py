"""Conic subproblems and the solver boundary.

Three semidefinite subproblem families drive both approximation algorithms:

* P1: maximal shift of a hyperplane with given normal inside a set,
* P2: maximal step from a point along a direction staying inside a set,
* D2: the dual of P2, whose solution (U*, w*) yields a supporting
  halfspace {x | w*.x <= constant . U*} of the set.

Problems are built in a solver-neutral intermediate form
(:class:`ConicProblem`) with a documented canonical layout: scalar
variables ordered (x1..xn, y1..ym, t), PSD blocks listed largest-first,
equalities after cone constraints.  A single narrow boundary
(:class:`CvxpySolver`) hands the problem to an external conic solver;
everything else -- building, independent feasibility re-checks, duality-gap
verification, status interpretation, unboundedness fallbacks -- lives here
and is solver-agnostic.

Every Optimal status returned from this module has passed an independent
feasibility re-check (eigenvalue and residual tests on the returned
numbers) and a duality-gap test against a reconstructed dual bound; the
solver's own claim is never forwarded unchecked.
"""

import contextlib
import dataclasses
import enum
import logging
import warnings

import numpy as np
import cvxpy as cp

from .errors import InputError, SolverFailure
from .pencil import (
    MatrixPencil,
    ShadowInstance,
    Spectrahedron,
    SymMatrix,
    min_eigenvalue,
    pencil_eval,
)

logger = logging.getLogger(__name__)

TOL_PSD = 1e-7
TOL_LIN = 1e-7
TOL_GAP = 1e-7
T_CAP = 1e6
W_MIN_NORM = 1e-10

__all__ = [
    "SolveStatus",
    "AffineMatrix",
    "AffineScalar",
    "ConicProblem",
    "ConicSolution",
    "CvxpySolver",
    "build_P1",
    "build_P2",
    "build_D2",
    "solve_P1",
    "solve_P2",
    "solve_D2",
    "solve_P2_shadow",
    "solve_D2_shadow",
    "D2Record",
    "record_d2_solutions",
]


class SolveStatus(enum.Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"
    INACCURATE = "inaccurate"


@dataclasses.dataclass(frozen=True)
class AffineMatrix:
    """const + sum_i coeff_i * scalar_i, all symmetric matrices."""

    const: SymMatrix
    terms: tuple  # of (scalar name, SymMatrix)

    @property
    def dim(self):
        return self.const.dim

    def evaluate(self, values):
        out = self.const.array
        for name, mat in self.terms:
            out = out + values[name] * mat.array
        return out


@dataclasses.dataclass(frozen=True)
class AffineScalar:
    """const + sum_i coeff_i * scalar_i + sum_k M_k . MatVar_k."""

    const: float
    terms: tuple = ()  # of (scalar name, float)
    mat_terms: tuple = ()  # of (matrix var name, SymMatrix)

    def evaluate(self, values, mat_values=None):
        out = self.const
        for name, coeff in self.terms:
            out += coeff * values[name]
        for name, mat in self.mat_terms:
            out += float(np.tensordot(mat.array, mat_values[name]))
        return out


@dataclasses.dataclass(frozen=True)
class ConicProblem:
    """Solver-neutral conic program in canonical layout.

    Attributes:
        sense: "max" or "min".
        scalar_vars: Names in canonical order (x1..xn, y1..ym, t).
        psd_var: Optional (name, dim) of a single PSD matrix variable.
        objective: Affine functional of the variables.
        psd_blocks: Affine symmetric expressions constrained >= 0,
            ordered largest dimension first.
        linear_eqs: Affine expressions constrained == 0, listed after the
            cone constraints.
    """

    sense: str
    scalar_vars: tuple
    psd_var: object
    objective: AffineScalar
    psd_blocks: tuple
    linear_eqs: tuple

    def __post_init__(self):
        if self.sense not in ("max", "min"):
            raise InputError(f"unknown sense {self.sense!r}")
        names = set(self.scalar_vars)
        if len(names) != len(self.scalar_vars):
            raise InputError("duplicate scalar variable names")
        matnames = set()
        if self.psd_var is not None:
            matnames.add(self.psd_var[0])
        for expr in (self.objective, *self.linear_eqs):
            for name, _ in expr.terms:
                if name not in names:
                    raise InputError(f"unknown scalar variable {name!r}")
            for name, _ in expr.mat_terms:
                if name not in matnames:
                    raise InputError(f"unknown matrix variable {name!r}")
        for block in self.psd_blocks:
            for name, mat in block.terms:
                if name not in names:
                    raise InputError(f"unknown scalar variable {name!r}")
                if mat.dim != block.dim:
                    raise InputError("inconsistent dims inside a PSD block")
        dims = [b.dim for b in self.psd_blocks]
        if dims != sorted(dims, reverse=True):
            raise InputError("PSD blocks must be ordered largest-first")


@dataclasses.dataclass(frozen=True)
class ConicSolution:
    """Interpreted outcome of one conic solve.

    ``dual_matrix``/``dual_vector`` hold (U, w): for D2-type problems these
    are primal variables, for P1/P2-type problems they are reconstructed
    from the PSD constraint's dual.  ``certificate`` carries auxiliary
    evidence (e.g. the recession direction for Unbounded P2 results).
    """

    status: SolveStatus
    primal: dict
    dual_matrix: object = None
    dual_vector: object = None
    primal_obj: object = None
    dual_obj: object = None
    detail: str = ""
    certificate: object = None

    @property
    def is_optimal(self):
        return self.status is SolveStatus.OPTIMAL

    @property
    def is_unbounded(self):
        return self.status is SolveStatus.UNBOUNDED


@dataclasses.dataclass(frozen=True)
class RawSolution:
    """What the plug-in solver reports, uninterpreted."""

    status: str
    values: dict = dataclasses.field(default_factory=dict)
    psd_duals: tuple = ()
    eq_duals: tuple = ()
    objective: object = None
    message: str = ""


#: Default backend options: tighter-than-stock accuracy so geometric
#: post-processing (vertex and facet enumeration at 1e-8) is not dominated
#: by solver noise.  Statuses degrade gracefully when a problem cannot be
#: solved this tightly (the interpretation layer re-checks and promotes).
CLARABEL_OPTIONS = {
    "tol_gap_abs": 1e-11,
    "tol_gap_rel": 1e-11,
    "tol_feas": 1e-11,
}


class CvxpySolver:
    """Narrow boundary to a conic solver, default CLARABEL through cvxpy.

    Stateless: every call builds a fresh solver-side problem, so instances
    may be shared across threads.
    """

    def __init__(self, cvxpy_solver="CLARABEL", options=None):
        self.cvxpy_solver = cvxpy_solver
        if options is None:
            options = CLARABEL_OPTIONS if cvxpy_solver == "CLARABEL" else {}
        self.options = dict(options)

    def solve(self, problem):
        index = {name: i for i, name in enumerate(problem.scalar_vars)}
        svar = cp.Variable(len(problem.scalar_vars)) if problem.scalar_vars else None
        uvar = None
        if problem.psd_var is not None:
            uvar = cp.Variable((problem.psd_var[1],) * 2, PSD=True)

        def scalar_expr(asc):
            expr = cp.Constant(asc.const)
            for name, coeff in asc.terms:
                expr = expr + coeff * svar[index[name]]
            for _, mat in asc.mat_terms:
                expr = expr + cp.sum(cp.multiply(cp.Constant(mat.array), uvar))
            return expr

        psd_cons = []
        for block in problem.psd_blocks:
            expr = cp.Constant(block.const.array)
            for name, mat in block.terms:
                expr = expr + svar[index[name]] * cp.Constant(mat.array)
            psd_cons.append(expr >> 0)
        eq_cons = [scalar_expr(e) == 0 for e in problem.linear_eqs]
        objective = scalar_expr(problem.objective)
        prob = cp.Problem(
            cp.Maximize(objective) if problem.sense == "max" else cp.Minimize(objective),
            psd_cons + eq_cons,
        )
        try:
            with warnings.catch_warnings():
                # inaccurate-solution warnings are redundant here: every
                # claimed optimum is independently re-checked downstream
                warnings.simplefilter("ignore", UserWarning)
                prob.solve(solver=getattr(cp, self.cvxpy_solver), **self.options)
        except cp.error.SolverError as exc:
            return RawSolution(status="solver_error", message=str(exc))
        values = {}
        if svar is not None and svar.value is not None:
            for name, i in index.items():
                values[name] = float(svar.value[i])
        if uvar is not None and uvar.value is not None:
            values[problem.psd_var[0]] = np.asarray(uvar.value, dtype=float)
        return RawSolution(
            status=prob.status if prob.status is not None else "solver_error",
            values=values,
            psd_duals=tuple(c.dual_value for c in psd_cons),
            eq_duals=tuple(
                float(c.dual_value) if c.dual_value is not None else None
                for c in eq_cons
            ),
            objective=float(prob.value)
            if prob.value is not None and np.isfinite(prob.value)
            else None,
        )


_DEFAULT_SOLVER = CvxpySolver()


# ---------------------------------------------------------------------------
# problem builders


def _check_direction(d, n, name="d"):
    d = np.asarray(d, dtype=float)
    if d.shape != (n,):
        raise InputError(f"{name} has shape {d.shape}, expected ({n},)")
    if not np.all(np.isfinite(d)):
        raise InputError(f"{name} must be finite")
    if float(np.linalg.norm(d)) == 0.0:
        raise InputError(f"{name} must be nonzero")
    return d


def _xnames(n):
    return tuple(f"x{i + 1}" for i in range(n))


def _ynames(m):
    return tuple(f"y{j + 1}" for j in range(m))


def _wnames(n):
    return tuple(f"w{i + 1}" for i in range(n))


def build_P1(C, w):
    """max w.x subject to membership in the spectrahedron C."""
    n = C.nvars
    w = _check_direction(w, n, "w")
    xs = _xnames(n)
    block = AffineMatrix(
        const=C.constant,
        terms=tuple(zip(xs, C.pencil.mats)),
    )
    return ConicProblem(
        sense="max",
        scalar_vars=xs,
        psd_var=None,
        objective=AffineScalar(0.0, terms=tuple(zip(xs, map(float, w)))),
        psd_blocks=(block,),
        linear_eqs=(),
    )


def build_P2(S, v, d, t_cap=None):
    """max t subject to x = v + t d and shadow membership of x.

    Variables follow the canonical order (x1..xn, y1..ym, t).  When
    ``t_cap`` is given, the extra 1x1 block t_cap - t >= 0 caps the step.
    """
    n = S.nvars
    m = S.nlifted
    v = np.asarray(v, dtype=float)
    if v.shape != (n,):
        raise InputError(f"v has shape {v.shape}, expected ({n},)")
    d = _check_direction(d, n)
    xs, ys = _xnames(n), _ynames(m)
    terms = list(zip(xs, S.pencilA.mats))
    if m:
        terms += list(zip(ys, S.pencilB.mats))
    blocks = [AffineMatrix(const=S.constant, terms=tuple(terms))]
    if t_cap is not None:
        blocks.append(
            AffineMatrix(
                const=SymMatrix([[float(t_cap)]]),
                terms=(("t", SymMatrix([[-1.0]])),),
            )
        )
    eqs = tuple(
        AffineScalar(-float(v[i]), terms=((xs[i], 1.0), ("t", -float(d[i]))))
        for i in range(n)
    )
    return ConicProblem(
        sense="max",
        scalar_vars=xs + ys + ("t",),
        psd_var=None,
        objective=AffineScalar(0.0, terms=(("t", 1.0),)),
        psd_blocks=tuple(blocks),
        linear_eqs=eqs,
    )


def build_D2(S, v, d):
    """min (A(v) + const) . U over the dual feasible set of P2.

    Constraints: A_i . U = -w_i for each kept variable, B_j . U = 0 for each
    lifted variable, d.w = 1, U >= 0.
    """
    n = S.nvars
    m = S.nlifted
    v = np.asarray(v, dtype=float)
    if v.shape != (n,):
        raise InputError(f"v has shape {v.shape}, expected ({n},)")
    d = _check_direction(d, n)
    ws = _wnames(n)
    ell = S.dim
    anchor = SymMatrix(pencil_eval(S.pencilA, v).array + S.constant.array)
    eqs = [
        AffineScalar(0.0, terms=((ws[i], 1.0),), mat_terms=(("U", S.pencilA.mats[i]),))
        for i in range(n)
    ]
    for j in range(m):
        eqs.append(AffineScalar(0.0, mat_terms=(("U", S.pencilB.mats[j]),)))
    eqs.append(AffineScalar(-1.0, terms=tuple(zip(ws, map(float, d)))))
    return ConicProblem(
        sense="min",
        scalar_vars=ws,
        psd_var=("U", ell),
        objective=AffineScalar(0.0, mat_terms=(("U", anchor),)),
        psd_blocks=(),
        linear_eqs=tuple(eqs),
    )


# ---------------------------------------------------------------------------
# interpretation helpers


def _oriented_psd_dual(raw_dual, tol):
    """Symmetrized PSD-cone dual, sign-flipped if the solver negated it."""
    if raw_dual is None:
        return None
    U = np.asarray(raw_dual, dtype=float)
    U = (U + U.T) / 2.0
    lo = min_eigenvalue(U)
    if lo < -tol and min_eigenvalue(-U) >= -tol:
        U = -U
    return U


def _recheck_feasibility(problem, values, tol_psd, tol_lin):
    """Independent feasibility test of a claimed-optimal assignment."""
    worst_psd = 0.0
    for block in problem.psd_blocks:
        lam = min_eigenvalue(block.evaluate(values))
        worst_psd = max(worst_psd, -lam)
    mat_values = {}
    if problem.psd_var is not None:
        name = problem.psd_var[0]
        U = np.asarray(values[name], dtype=float)
        U = (U + U.T) / 2.0
        mat_values[name] = U
        worst_psd = max(worst_psd, -min_eigenvalue(U))
    worst_eq = 0.0
    for eq in problem.linear_eqs:
        worst_eq = max(worst_eq, abs(eq.evaluate(values, mat_values)))
    ok = worst_psd <= tol_psd and worst_eq <= tol_lin
    return ok, worst_psd, worst_eq


def _gap_ok(primal_obj, dual_obj, tol_gap):
    if primal_obj is None or dual_obj is None:
        return False, np.inf
    gap = abs(primal_obj - dual_obj)
    return gap <= tol_gap * (1.0 + abs(primal_obj)), gap


# ---------------------------------------------------------------------------
# D2 logging hook

_D2_LOG = None


@dataclasses.dataclass(frozen=True)
class D2Record:
    """One logged D2 solve: enough to re-verify its supporting halfspace."""

    target: object
    point: np.ndarray
    direction: np.ndarray
    matrix: SymMatrix
    normal: np.ndarray
    offset: float


@contextlib.contextmanager
def record_d2_solutions():
    """Collect every Optimal D2 solution created inside the context.

    Yields a list that fills with :class:`D2Record` entries; used by the
    validation layer to audit the supporting-halfspace property of every
    cut an algorithm run produced.
    """
    global _D2_LOG
    previous = _D2_LOG
    _D2_LOG = []
    try:
        yield _D2_LOG
    finally:
        _D2_LOG = previous


# ---------------------------------------------------------------------------
# solve wrappers


def solve_P1(C, w, *, tol_psd=TOL_PSD, tol_lin=TOL_LIN, tol_gap=TOL_GAP, solver=None):
    """Solve P1 on a spectrahedron; see module docstring for the contract."""
    solver = solver or _DEFAULT_SOLVER
    problem = build_P1(C, w)
    raw = solver.solve(problem)
    if raw.status in ("unbounded", "unbounded_inaccurate"):
        return ConicSolution(
            status=SolveStatus.UNBOUNDED,
            primal={},
            detail=raw.status,
        )
    if raw.status in ("infeasible", "infeasible_inaccurate"):
        return ConicSolution(status=SolveStatus.INFEASIBLE, primal={}, detail=raw.status)
    if raw.status not in ("optimal", "optimal_inaccurate"):
        return ConicSolution(
            status=SolveStatus.INACCURATE, primal={}, detail=raw.status or raw.message
        )
    values = raw.values
    ok, worst_psd, worst_eq = _recheck_feasibility(problem, values, tol_psd, tol_lin)
    U = _oriented_psd_dual(raw.psd_duals[0], tol_psd)
    primal_obj = problem.objective.evaluate(values)
    dual_obj = float(np.tensordot(C.constant.array, U)) if U is not None else None
    gap_ok, gap = _gap_ok(primal_obj, dual_obj, tol_gap)
    if not (ok and gap_ok):
        return ConicSolution(
            status=SolveStatus.INACCURATE,
            primal=values,
            dual_matrix=SymMatrix(U) if U is not None else None,
            primal_obj=primal_obj,
            dual_obj=dual_obj,
            detail=(
                f"recheck failed: psd={worst_psd:.2e} eq={worst_eq:.2e} gap={gap:.2e}"
            ),
        )
    x = np.array([values[name] for name in problem.scalar_vars])
    return ConicSolution(
        status=SolveStatus.OPTIMAL,
        primal=dict(values),
        dual_matrix=SymMatrix(U),
        dual_vector=None,
        primal_obj=primal_obj,
        dual_obj=dual_obj,
        certificate={"x": x},
    )


def _p2_optimal_solution(S, problem, raw, v, d, tol_psd, tol_lin, tol_gap):
    values = raw.values
    ok, worst_psd, worst_eq = _recheck_feasibility(problem, values, tol_psd, tol_lin)
    U = _oriented_psd_dual(raw.psd_duals[0], tol_psd)
    primal_obj = values["t"]
    dual_obj = None
    w = None
    if U is not None:
        anchor = pencil_eval(S.pencilA, v).array + S.constant.array
        dual_obj = float(np.tensordot(anchor, U))
        w = np.array(
            [-float(np.tensordot(m.array, U)) for m in S.pencilA.mats]
        )
        dw = float(w @ d)
        if abs(dw - 1.0) > tol_lin:
            logger.debug("reconstructed P2 dual has d.w = %.3e (expected 1)", dw)
    gap_ok, gap = _gap_ok(primal_obj, dual_obj, tol_gap)
    if not (ok and gap_ok):
        return ConicSolution(
            status=SolveStatus.INACCURATE,
            primal=dict(values),
            dual_matrix=SymMatrix(U) if U is not None else None,
            dual_vector=w,
            primal_obj=primal_obj,
            dual_obj=dual_obj,
            detail=(
                f"recheck failed: psd={worst_psd:.2e} eq={worst_eq:.2e} gap={gap:.2e}"
            ),
        )
    x = v + values["t"] * d
    return ConicSolution(
        status=SolveStatus.OPTIMAL,
        primal=dict(values),
        dual_matrix=SymMatrix(U) if U is not None else None,
        dual_vector=w,
        primal_obj=primal_obj,
        dual_obj=dual_obj,
        certificate={"x": x, "t": values["t"]},
    )


def _certified_recession(S, d, tol_psd):
    """For m = 0 the recession condition A(d) >= 0 is directly checkable."""
    if S.nlifted > 0:
        return True
    dn = d / float(np.linalg.norm(d))
    return min_eigenvalue(pencil_eval(S.pencilA, dn)) >= -tol_psd


def solve_P2_shadow(
    S, v, d, *, tol_psd=TOL_PSD, tol_lin=TOL_LIN, tol_gap=TOL_GAP, solver=None
):
    """Solve P2 on a shadow instance (m = 0 covers plain spectrahedra).

    Unbounded detection: the solver's dual-infeasibility certificate is the
    primary signal; for m = 0 it is re-verified against the exact recession
    condition on the pencil.  Ambiguous statuses fall back to a capped
    re-solve with t <= T_CAP; hitting the cap classifies as Unbounded.
    """
    solver = solver or _DEFAULT_SOLVER
    d = _check_direction(d, S.nvars)
    v = np.asarray(v, dtype=float)
    problem = build_P2(S, v, d)
    raw = solver.solve(problem)
    if raw.status == "unbounded":
        if not _certified_recession(S, d, max(tol_psd, 1e-6)):
            return ConicSolution(
                status=SolveStatus.INACCURATE,
                primal={},
                detail="solver claims unbounded but A(d) is not PSD",
            )
        return ConicSolution(
            status=SolveStatus.UNBOUNDED,
            primal={},
            certificate={"direction": d.copy()},
            detail="dual infeasibility certificate",
        )
    if raw.status in ("infeasible", "infeasible_inaccurate"):
        return ConicSolution(status=SolveStatus.INFEASIBLE, primal={}, detail=raw.status)
    if raw.status == "optimal":
        sol = _p2_optimal_solution(S, problem, raw, v, d, tol_psd, tol_lin, tol_gap)
        if sol.status is SolveStatus.OPTIMAL:
            return sol
    # ambiguous: optimal_inaccurate, unbounded_inaccurate, solver_error, or a
    # claimed optimum that failed the independent re-check
    capped = build_P2(S, v, d, t_cap=T_CAP)
    raw2 = solver.solve(capped)
    if raw2.status in ("optimal", "optimal_inaccurate") and "t" in raw2.values:
        t_star = raw2.values["t"]
        if t_star >= 0.99 * T_CAP:
            if not _certified_recession(S, d, max(tol_psd, 1e-6)):
                return ConicSolution(
                    status=SolveStatus.INACCURATE,
                    primal=dict(raw2.values),
                    detail="cap reached but A(d) is not PSD",
                )
            return ConicSolution(
                status=SolveStatus.UNBOUNDED,
                primal={},
                certificate={"direction": d.copy(), "cap": T_CAP},
                detail=f"capped re-solve reached t={t_star:.3e}",
            )
        return _p2_optimal_solution(S, capped, raw2, v, d, tol_psd, tol_lin, tol_gap)
    if raw2.status in ("infeasible", "infeasible_inaccurate"):
        return ConicSolution(
            status=SolveStatus.INFEASIBLE, primal={}, detail=raw2.status
        )
    return ConicSolution(
        status=SolveStatus.INACCURATE,
        primal={},
        detail=f"primary status {raw.status!r}, capped status {raw2.status!r}",
    )


def solve_P2(C, v, d, **kwargs):
    """P2 on a plain spectrahedron, routed through the shadow builder."""
    return solve_P2_shadow(ShadowInstance.from_spectrahedron(C), v, d, **kwargs)


def solve_D2_shadow(
    S, v, d, *, tol_psd=TOL_PSD, tol_lin=TOL_LIN, tol_gap=TOL_GAP, solver=None
):
    """Solve D2 on a shadow instance; Optimal yields a supporting halfspace.

    The returned halfspace is {x | w*.x <= constant . U*}; its validity on
    the whole set is the duality argument, re-checked by sampling in the
    validation layer.  Solutions with ‖w*‖ < 1e-10 are classified
    Inaccurate rather than trusted.
    """
    solver = solver or _DEFAULT_SOLVER
    d = _check_direction(d, S.nvars)
    v = np.asarray(v, dtype=float)
    problem = build_D2(S, v, d)
    raw = solver.solve(problem)
    if raw.status in ("infeasible", "infeasible_inaccurate"):
        # mirrors an unbounded primal P2
        return ConicSolution(status=SolveStatus.INFEASIBLE, primal={}, detail=raw.status)
    if raw.status in ("unbounded", "unbounded_inaccurate"):
        return ConicSolution(status=SolveStatus.UNBOUNDED, primal={}, detail=raw.status)
    if raw.status not in ("optimal", "optimal_inaccurate"):
        return ConicSolution(
            status=SolveStatus.INACCURATE, primal={}, detail=raw.status or raw.message
        )
    values = raw.values
    ok, worst_psd, worst_eq = _recheck_feasibility(problem, values, tol_psd, tol_lin)
    U = np.asarray(values["U"], dtype=float)
    U = (U + U.T) / 2.0
    w = np.array([values[name] for name in problem.scalar_vars])
    primal_obj = problem.objective.evaluate(values, {"U": U})
    t_dual = raw.eq_duals[-1]
    dual_obj = -t_dual if t_dual is not None else None
    gap_ok, gap = _gap_ok(primal_obj, dual_obj, tol_gap)
    wnorm = float(np.linalg.norm(w))
    offset = float(np.tensordot(S.constant.array, U))
    if wnorm < W_MIN_NORM:
        return ConicSolution(
            status=SolveStatus.INACCURATE,
            primal=dict(values),
            dual_matrix=SymMatrix(U),
            dual_vector=w,
            primal_obj=primal_obj,
            dual_obj=dual_obj,
            detail=f"degenerate dual normal, norm {wnorm:.2e}",
        )
    if not (ok and gap_ok):
        return ConicSolution(
            status=SolveStatus.INACCURATE,
            primal=dict(values),
            dual_matrix=SymMatrix(U),
            dual_vector=w,
            primal_obj=primal_obj,
            dual_obj=dual_obj,
            detail=(
                f"recheck failed: psd={worst_psd:.2e} eq={worst_eq:.2e} gap={gap:.2e}"
            ),
        )
    solution = ConicSolution(
        status=SolveStatus.OPTIMAL,
        primal=dict(values),
        dual_matrix=SymMatrix(U),
        dual_vector=w,
        primal_obj=primal_obj,
        dual_obj=dual_obj,
        certificate={"halfspace_normal": w.copy(), "halfspace_offset": offset},
    )
    if _D2_LOG is not None:
        _D2_LOG.append(
            D2Record(
                target=S,
                point=v.copy(),
                direction=d.copy(),
                matrix=SymMatrix(U),
                normal=w.copy(),
                offset=offset,
            )
        )
    return solution


def solve_D2(C, v, d, **kwargs):
    """D2 on a plain spectrahedron, routed through the shadow builder."""
    return solve_D2_shadow(ShadowInstance.from_spectrahedron(C), v, d, **kwargs)
