"""Command-line driver.

Subcommands: approx-spectra, approx-shadow, check, distance, gen,
export-plot.  Results go to --output (default: standard output) and all
diagnostics go to standard error, so piping the result is always safe.

Exit codes: 0 success; 2 an input assumption is violated (the check
report is still written); 3 the iteration cap was hit (the partial result
is written with "partial": true); 4 bad input (flags, files, schema);
5 solver or internal failure.

Runs are deterministic: the same argv, instance bytes and seed produce
byte-identical output files.  The serialized timing_ms field is therefore
fixed to 0 and the measured wall time is reported on standard error.
"""

import argparse
import sys
import time
import logging
from pathlib import Path

import numpy as np

from .config import ApproxConfig
from .errors import (
    AlgorithmFailure,
    AssumptionViolation,
    InputError,
    InvariantViolation,
    IterationLimit,
    ParseError,
    RecconeError,
    SolverFailure,
)
from .model_io import (
    FORMAT_VERSION,
    InstanceFile,
    ResultFile,
    parse_instance,
    parse_result,
    write_instance,
    write_json,
    write_result,
)
from .oracles import brute_force_delta
from .pencil import ShadowInstance, Spectrahedron, min_eigenvalue, pencil_eval
from .polyhedra import Halfspace, HPolyhedron, VCone
from .shadow import approximate_recession_cone_shadow, check_assumptions_shadow
from .spectra import approximate_recession_cone, check_assumptions_spectra

__all__ = ["build_parser", "main", "run"]


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit with the input-error code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(4)


def _err(message):
    print(message, file=sys.stderr)


def _diag(args, message):
    if not getattr(args, "quiet", False):
        print(message, file=sys.stderr)


def _read_bytes(path):
    return Path(path).read_bytes()


def _write_output(path, data):
    if path is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(path).write_bytes(data)


def _load_instance(path):
    return parse_instance(_read_bytes(path))


def _load_result(path):
    return parse_result(_read_bytes(path))


def _config(args):
    kwargs = {"epsilon": args.eps, "seed": args.seed}
    if args.max_iter is not None:
        kwargs["max_iterations"] = args.max_iter
    for name in ("tol_psd", "tol_gap", "tol_geom"):
        value = getattr(args, name)
        if value is not None:
            kwargs[name] = value
    return ApproxConfig(**kwargs)


def _check_eps(args):
    # validated before the instance is even read, let alone any solve
    if args.eps is not None and not args.eps > 0.0:
        raise InputError(f"--eps must be positive, got {args.eps}")


def _shadow_target(inst):
    target = inst.to_target()
    if isinstance(target, Spectrahedron):
        target = ShadowInstance.from_spectrahedron(target)
    return target


def _report_doc(kind, passed, report, violated=None, message=None):
    return {
        "format_version": FORMAT_VERSION,
        "checked": kind,
        "passed": passed,
        "violated": violated,
        "message": message,
        "assumption_report": report if report is not None else {},
    }


def _spectra_report(C, xbar, tol_geom, tol_psd):
    """Gather the pointedness / strict-recession report for a spectrahedron.

    Returns (report, violated, message); violated is None when all
    checkable conditions hold.
    """
    pointed, strict_point = check_assumptions_spectra(
        C, tol_geom=tol_geom, tol_psd=tol_psd)
    report = {
        "pointed": pointed,
        "strict_point": None if strict_point is None else strict_point.tolist(),
    }
    if not pointed:
        return report, "C1", "the recession cone contains a line"
    if xbar is not None:
        lam = min_eigenvalue(pencil_eval(C.pencil, xbar))
        report["xbar_min_eigenvalue"] = lam
        if lam <= tol_psd:
            return (report, "C2",
                    f"A(interior_point) has min eigenvalue {lam:.3e}; the "
                    "supplied point is not strictly recessive")
    if strict_point is None:
        return (report, "C2",
                "no strictly recessive point was found by the probe")
    return report, None, None


# ---------------------------------------------------------------------------
# subcommands


def _cmd_approx_spectra(args):
    _check_eps(args)
    inst = _load_instance(args.instance)
    if inst.m != 0:
        raise InputError(
            "approx-spectra needs a plain spectrahedron (m = 0); "
            "use approx-shadow for lifted instances")
    if inst.interior_point is None:
        raise InputError("approx-spectra needs the interior_point field")
    C = inst.to_target()
    cfg = _config(args)
    started = time.monotonic()
    try:
        report, violated, message = _spectra_report(
            C, inst.interior_point, cfg.tol_geom, cfg.tol_psd)
        if violated is not None:
            raise AssumptionViolation(violated, message, report=report)
        result = approximate_recession_cone(C, inst.interior_point, cfg=cfg)
    except AssumptionViolation as exc:
        doc = _report_doc("spectra", False, exc.report, exc.condition, str(exc))
        _write_output(args.output, write_json(doc))
        _err(f"assumption violated: {exc}")
        return 2
    except IterationLimit as exc:
        partial = ResultFile.from_approx(
            exc.partial, args.eps, report, timing_ms=0, partial=True)
        _write_output(args.output, write_result(partial))
        _err(f"iteration cap reached: {exc}; partial result written")
        return 3
    elapsed_ms = int(round(1000.0 * (time.monotonic() - started)))
    res = ResultFile.from_approx(result, args.eps, report, timing_ms=0)
    _write_output(args.output, write_result(res))
    _diag(args, f"certified epsilon {result.epsilon_certified:.6g} in "
                f"{result.iterations} iterations, "
                f"{result.subproblem_count} subproblems, {elapsed_ms} ms")
    return 0


def _cmd_approx_shadow(args):
    _check_eps(args)
    inst = _load_instance(args.instance)
    if inst.recession_interior_direction is None:
        raise InputError(
            "approx-shadow needs the recession_interior_direction field")
    if inst.interior_point is None:
        raise InputError("approx-shadow needs the interior_point field")
    if inst.m > 0 and inst.lift_witness is None:
        raise InputError(
            "approx-shadow needs the lift_witness field when m > 0")
    S = _shadow_target(inst)
    xbar = inst.interior_point
    ybar = inst.lift_witness
    dbar = inst.recession_interior_direction
    cfg = _config(args)
    started = time.monotonic()
    try:
        report = check_assumptions_shadow(
            S, xbar, ybar, dbar,
            tol_psd=cfg.tol_psd, tol_lin=cfg.tol_lin, tol_gap=cfg.tol_gap)
        result = approximate_recession_cone_shadow(S, xbar, ybar, dbar, cfg=cfg)
    except AssumptionViolation as exc:
        doc = _report_doc("shadow", False, exc.report, exc.condition, str(exc))
        _write_output(args.output, write_json(doc))
        _err(f"assumption violated: {exc}")
        return 2
    except IterationLimit as exc:
        partial = ResultFile.from_approx(
            exc.partial, args.eps, report, timing_ms=0, partial=True)
        _write_output(args.output, write_result(partial))
        _err(f"iteration cap reached: {exc}; partial result written")
        return 3
    elapsed_ms = int(round(1000.0 * (time.monotonic() - started)))
    res = ResultFile.from_approx(result, args.eps, report, timing_ms=0)
    _write_output(args.output, write_result(res))
    _diag(args, f"certified epsilon {result.epsilon_certified:.6g} in "
                f"{result.iterations} passes, "
                f"{result.subproblem_count} subproblems, {elapsed_ms} ms")
    return 0


def _cmd_check(args):
    inst = _load_instance(args.instance)
    tol_psd = args.tol_psd if args.tol_psd is not None else 1e-7
    tol_gap = args.tol_gap if args.tol_gap is not None else 1e-7
    tol_geom = args.tol_geom if args.tol_geom is not None else 1e-8
    if inst.recession_interior_direction is not None:
        if inst.interior_point is None:
            raise InputError("checking the shadow conditions needs the "
                             "interior_point field")
        if inst.m > 0 and inst.lift_witness is None:
            raise InputError("checking a lifted instance needs the "
                             "lift_witness field")
        kind = "shadow"
        try:
            report = check_assumptions_shadow(
                _shadow_target(inst), inst.interior_point, inst.lift_witness,
                inst.recession_interior_direction,
                tol_psd=tol_psd, tol_lin=tol_psd, tol_gap=tol_gap)
        except AssumptionViolation as exc:
            doc = _report_doc(kind, False, exc.report, exc.condition, str(exc))
            _write_output(args.output, write_json(doc))
            _err(f"assumption violated: {exc}")
            return 2
        violated, message = None, None
    else:
        if inst.m > 0:
            raise InputError(
                "a lifted instance is checked against the shadow conditions, "
                "which need the recession_interior_direction field")
        kind = "spectra"
        report, violated, message = _spectra_report(
            inst.to_target(), inst.interior_point, tol_geom, tol_psd)
    if violated is not None:
        doc = _report_doc(kind, False, report, violated, message)
        _write_output(args.output, write_json(doc))
        _err(f"assumption violated: {violated}: {message}")
        return 2
    _write_output(args.output, write_json(_report_doc(kind, True, report)))
    _diag(args, f"all checkable {kind} assumptions hold")
    return 0


def _result_cones(res):
    if not res.inner_rays:
        raise InputError("the result file has no inner rays")
    rays = np.array(res.inner_rays)
    dim = rays.shape[1]
    inner = VCone(rays)
    outer = HPolyhedron(
        [Halfspace(w, 0.0) for w in res.outer_halfspaces], ambient_dim=dim)
    return inner, outer, dim


def _cmd_distance(args):
    if args.grid is not None and args.grid < 1:
        raise InputError(f"--grid must be at least 1, got {args.grid}")
    res = _load_result(args.result)
    inner, outer, dim = _result_cones(res)
    if args.against is not None:
        other = _load_result(args.against)
        _, other_outer, other_dim = _result_cones(other)
        if other_dim != dim:
            raise InputError(f"ambient dimensions differ: {dim} vs {other_dim}")
        mode = "outer-vs-outer"
        delta = brute_force_delta(outer, other_outer, grid=args.grid)
    else:
        mode = "inner-vs-outer"
        delta = brute_force_delta(inner, outer, grid=args.grid)
    doc = {"format_version": FORMAT_VERSION, "mode": mode, "delta": delta}
    if args.grid is not None:
        doc["grid"] = args.grid
    _write_output(args.output, write_json(doc))
    _diag(args, f"{mode} truncated Hausdorff estimate {delta:.6g}")
    return 0


# ---------------------------------------------------------------------------
# instance generation


def _gen_diagonal(n, ell, rng):
    """Diagonal pencil whose recession cone is exactly the orthant."""
    coeffs = rng.uniform(0.5, 2.0, size=ell)
    A = []
    for i in range(n):
        diag = np.where(np.arange(ell) % n == i, coeffs, 0.0)
        A.append(np.diag(diag))
    return InstanceFile(
        n=n, m=0, ell=ell, A0=np.zeros((ell, ell)), A=A,
        interior_point=np.ones(n),
        recession_interior_direction=np.ones(n) / np.sqrt(n),
    )


def _gen_soc(n, ell, rng):
    """Pencil whose recession cone is a randomly rotated second-order cone.

    In canonical coordinates u the constraint is the arrow matrix
    u_n I + sum_j u_j (E_{j,n} + E_{n,j}) >= 0, which holds exactly when
    u_n >= ||u_1..n-1||.  The instance substitutes u = Q x for a random
    orthogonal Q; extra diagonal slots carry c_p u_n and never bind.
    """
    Q = np.linalg.qr(rng.standard_normal((n, n)))[0]
    pad_coeffs = rng.uniform(0.5, 2.0, size=ell - n)
    A = []
    for i in range(n):
        M = np.zeros((ell, ell))
        M[:n, :n] = Q[n - 1, i] * np.eye(n)
        for j in range(n - 1):
            M[j, n - 1] += Q[j, i]
            M[n - 1, j] += Q[j, i]
        for p, c in enumerate(pad_coeffs):
            M[n + p, n + p] = c * Q[n - 1, i]
        A.append(M)
    xbar = Q.T[:, n - 1].copy()
    return InstanceFile(
        n=n, m=0, ell=ell, A0=np.zeros((ell, ell)), A=A,
        interior_point=xbar,
        recession_interior_direction=xbar.copy(),
    )


def _gen_shadow_lift(n, m, ell, rng):
    """Lifted instance whose shadow recession cone is exactly the orthant.

    Slot j < m carries c_j y_j - a_j . x, so any x >= 0 is feasible with a
    large enough lift; the remaining slots force x >= 0 componentwise.
    """
    couple = rng.uniform(0.1, 1.0, size=(m, n))
    lift_coeffs = rng.uniform(0.5, 2.0, size=m)
    x_coeffs = rng.uniform(0.5, 2.0, size=ell - m)
    A, B = [], []
    for i in range(n):
        diag = np.zeros(ell)
        diag[:m] = -couple[:, i]
        diag[m:] = np.where(np.arange(ell - m) % n == i, x_coeffs, 0.0)
        A.append(np.diag(diag))
    for j in range(m):
        diag = np.zeros(ell)
        diag[j] = lift_coeffs[j]
        B.append(np.diag(diag))
    witness = (couple.sum(axis=1) + 1.0) / lift_coeffs
    return InstanceFile(
        n=n, m=m, ell=ell, A0=np.zeros((ell, ell)), A=A, B=B,
        interior_point=np.ones(n),
        lift_witness=witness,
        recession_interior_direction=np.ones(n) / np.sqrt(n),
    )


def _cmd_gen(args):
    if args.n < 1:
        raise InputError(f"--n must be at least 1, got {args.n}")
    rng = np.random.default_rng(args.seed)
    if args.family == "diagonal":
        ell = args.ell if args.ell is not None else args.n
        if ell < args.n:
            raise InputError(f"--ell must be at least n = {args.n}")
        inst = _gen_diagonal(args.n, ell, rng)
    elif args.family == "soc":
        if args.n < 2:
            raise InputError("--n must be at least 2 for the soc family")
        ell = args.ell if args.ell is not None else args.n
        if ell < args.n:
            raise InputError(f"--ell must be at least n = {args.n}")
        inst = _gen_soc(args.n, ell, rng)
    else:
        ell = args.ell if args.ell is not None else args.n + args.m
        if ell < args.n + args.m:
            raise InputError(f"--ell must be at least n + m = "
                             f"{args.n + args.m}")
        inst = _gen_shadow_lift(args.n, args.m, ell, rng)
    _write_output(args.output, write_instance(inst))
    _diag(args, f"generated {args.family} instance "
                f"(n={inst.n}, m={inst.m}, ell={inst.ell}, seed={args.seed})")
    return 0


# ---------------------------------------------------------------------------
# plot-data export


def _box_segment(normal):
    """Endpoints of {x : normal . x = 0} clipped to the box [-1, 1]^2."""
    t = np.array([-normal[1], normal[0]], dtype=float)
    t /= np.linalg.norm(t)
    limits = [1.0 / abs(c) for c in t if abs(c) > 1e-300]
    smax = min(limits)
    return -smax * t, smax * t


def _cmd_export_plot(args):
    res = _load_result(args.result)
    dims = {len(r) for r in res.inner_rays}
    dims |= {len(w) for w in res.outer_halfspaces}
    if len(dims) != 1:
        raise InputError("the result file has no geometry to export")
    n = dims.pop()
    lines = ["kind," + ",".join(f"x{i + 1}" for i in range(n))]
    for r in res.inner_rays:
        lines.append("ray," + ",".join(repr(float(v)) for v in r))
    if n == 2:
        for w in res.outer_halfspaces:
            a, b = _box_segment(w)
            lines.append("facet_seg_a," + ",".join(repr(float(v)) for v in a))
            lines.append("facet_seg_b," + ",".join(repr(float(v)) for v in b))
    elif res.outer_halfspaces:
        _diag(args, "facet segments are only exported for 2-d results; "
                    "rays written")
    _write_output(args.output, ("\n".join(lines) + "\n").encode("utf-8"))
    return 0


# ---------------------------------------------------------------------------
# parser and dispatch


def build_parser():
    parser = _Parser(
        prog="reccone",
        description="Polyhedral approximation of recession cones of "
                    "spectrahedra and spectrahedral shadows.",
    )
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="SUBCOMMAND")

    def common(p):
        p.add_argument("--output", default=None,
                       help="output path (default: standard output)")
        p.add_argument("--quiet", action="store_true",
                       help="suppress diagnostics on standard error")

    def tolerances(p):
        p.add_argument("--tol-psd", dest="tol_psd", type=float, default=None,
                       help="eigenvalue slack for PSD checks")
        p.add_argument("--tol-gap", dest="tol_gap", type=float, default=None,
                       help="accepted relative duality gap")
        p.add_argument("--tol-geom", dest="tol_geom", type=float, default=None,
                       help="combinatorial geometry tolerance")

    def approx_flags(p):
        p.add_argument("--instance", required=True, help="instance JSON path")
        p.add_argument("--eps", type=float, required=True,
                       help="target truncated Hausdorff accuracy (> 0)")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for every random stream (default 0)")
        p.add_argument("--max-iter", dest="max_iter", type=int, default=None,
                       help="iteration cap override")
        tolerances(p)
        common(p)

    p = sub.add_parser("approx-spectra",
                       help="approximate the recession cone of a "
                            "spectrahedron (m = 0)")
    approx_flags(p)

    p = sub.add_parser("approx-shadow",
                       help="approximate the recession cone of a "
                            "spectrahedral shadow")
    approx_flags(p)

    p = sub.add_parser("check",
                       help="verify the checkable assumptions and write "
                            "the report")
    p.add_argument("--instance", required=True, help="instance JSON path")
    tolerances(p)
    common(p)

    p = sub.add_parser("distance",
                       help="grid estimate of the truncated Hausdorff "
                            "distance for a result file")
    p.add_argument("--result", required=True, help="result JSON path")
    p.add_argument("--against", default=None,
                   help="second result path: compare the outer cones")
    p.add_argument("--grid", type=int, default=None,
                   help="direction-grid size (default dimension dependent)")
    common(p)

    p = sub.add_parser("gen",
                       help="generate an instance with known ground truth")
    p.add_argument("--family", required=True,
                   choices=["diagonal", "soc", "shadow-lift"])
    p.add_argument("--n", type=int, required=True, help="number of variables")
    p.add_argument("--ell", type=int, default=None,
                   help="matrix dimension (default: smallest valid)")
    p.add_argument("--m", type=int, choices=[1, 2], default=1,
                   help="lifted variables for shadow-lift (default 1)")
    p.add_argument("--seed", type=int, default=0)
    common(p)

    p = sub.add_parser("export-plot",
                       help="CSV of ray endpoints and unit-box facet "
                            "segments of a result")
    p.add_argument("--result", required=True, help="result JSON path")
    common(p)

    return parser


_COMMANDS = {
    "approx-spectra": _cmd_approx_spectra,
    "approx-shadow": _cmd_approx_shadow,
    "check": _cmd_check,
    "distance": _cmd_distance,
    "gen": _cmd_gen,
    "export-plot": _cmd_export_plot,
}


def run(argv):
    """Execute one CLI invocation; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else int(exc.code)
    if getattr(args, "quiet", False):
        logging.getLogger("reccone").setLevel(logging.ERROR)
    try:
        return _COMMANDS[args.command](args)
    except ParseError as exc:
        _err(f"error: {exc}")
        return 4
    except (InputError, OSError) as exc:
        _err(f"error: {exc}")
        return 4
    except AssumptionViolation as exc:
        _err(f"assumption violated: {exc}")
        return 2
    except IterationLimit as exc:
        _err(f"iteration cap reached: {exc}")
        return 3
    except (SolverFailure, AlgorithmFailure, InvariantViolation) as exc:
        _err(f"failure: {exc}")
        return 5
    except RecconeError as exc:
        _err(f"failure: {exc}")
        return 5
    except Exception as exc:
        _err(f"internal error: {type(exc).__name__}: {exc}")
        return 5


def main(argv=None):
    """Console entry point."""
    if argv is None:
        argv = sys.argv[1:]
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
