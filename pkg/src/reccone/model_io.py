"""JSON serialization of problem instances and run results.

One JSON object per file, tagged "format_version": 1.  Matrices travel as
full dense arrays of arrays (row major); symmetry is validated within
1e-12 on parse and the stored matrix is the symmetrized average.  Writers
emit canonical text: keys sorted, two-space indent, floats in their
shortest round-trip form, one trailing newline.  Identical values
therefore produce identical bytes, which is what the determinism checks
compare.
"""

import json
import re

import numpy as np
from jsonschema import Draft202012Validator

from .errors import InputError, ParseError
from .pencil import MatrixPencil, ShadowInstance, Spectrahedron, SymMatrix

__all__ = [
    "FORMAT_VERSION",
    "INSTANCE_SCHEMA",
    "RESULT_SCHEMA",
    "InstanceFile",
    "ResultFile",
    "parse_instance",
    "parse_result",
    "write_instance",
    "write_json",
    "write_result",
]

FORMAT_VERSION = 1

SYMMETRY_TOL = 1e-12
RAY_NORM_TOL = 1e-10

_MATRIX = {
    "type": "array",
    "minItems": 1,
    "items": {"type": "array", "minItems": 1, "items": {"type": "number"}},
}
_VECTOR = {"type": "array", "items": {"type": "number"}}

INSTANCE_SCHEMA = {
    "type": "object",
    "required": ["format_version", "n", "m", "ell", "A0", "A"],
    "additionalProperties": False,
    "properties": {
        "format_version": {"const": FORMAT_VERSION},
        "n": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 0},
        "ell": {"type": "integer", "minimum": 1},
        "A0": _MATRIX,
        "A": {"type": "array", "items": _MATRIX},
        "B": {"type": "array", "items": _MATRIX},
        "interior_point": _VECTOR,
        "lift_witness": _VECTOR,
        "recession_interior_direction": _VECTOR,
    },
}

RESULT_SCHEMA = {
    "type": "object",
    "required": [
        "format_version",
        "epsilon_requested",
        "epsilon_certified",
        "inner_rays",
        "outer_halfspaces",
        "iterations",
        "subproblem_count",
        "assumption_report",
        "timing_ms",
    ],
    "additionalProperties": False,
    "properties": {
        "format_version": {"const": FORMAT_VERSION},
        "epsilon_requested": {"type": "number", "exclusiveMinimum": 0},
        "epsilon_certified": {"type": "number", "minimum": 0},
        "inner_rays": {"type": "array", "items": _VECTOR},
        "outer_halfspaces": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["normal", "offset"],
                "additionalProperties": False,
                "properties": {"normal": _VECTOR, "offset": {"const": 0}},
            },
        },
        "iterations": {"type": "integer", "minimum": 0},
        "subproblem_count": {"type": "integer", "minimum": 0},
        "assumption_report": {"type": "object"},
        "timing_ms": {"type": "integer", "minimum": 0},
        "partial": {"type": "boolean"},
    },
}

_INSTANCE_VALIDATOR = Draft202012Validator(INSTANCE_SCHEMA)
_RESULT_VALIDATOR = Draft202012Validator(RESULT_SCHEMA)

_REQUIRED_RE = re.compile(r"'([^']*)' is a required property")


# ---------------------------------------------------------------------------
# canonical JSON plumbing


def _dumps(doc):
    """Canonical UTF-8 bytes: sorted keys, indent 2, trailing newline."""
    try:
        text = json.dumps(doc, sort_keys=True, indent=2, allow_nan=False)
    except ValueError as exc:
        raise InputError(f"non-finite number in document: {exc}") from exc
    return (text + "\n").encode("utf-8")


def _loads(data, validator, what):
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"{what} is not UTF-8 text: {exc}") from exc
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{what} is not valid JSON: {exc.msg} "
            f"(line {exc.lineno}, column {exc.colno})"
        ) from exc
    errors = sorted(
        validator.iter_errors(doc),
        key=lambda e: (len(e.absolute_path), [str(p) for p in e.absolute_path]),
    )
    if errors:
        err = errors[0]
        pointer = "/" + "/".join(str(p) for p in err.absolute_path)
        if pointer == "/":
            pointer = ""
        if err.validator == "required":
            missing = _REQUIRED_RE.search(err.message)
            if missing:
                pointer = f"{pointer}/{missing.group(1)}"
        raise ParseError(f"{what} violates the schema: {err.message}",
                         pointer=pointer or "/")
    return doc


def _float_vector(values):
    return np.asarray([float(v) for v in values], dtype=float)


def _symmetric_matrix(rows, ell, where):
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2 or arr.shape != (ell, ell):
        raise InputError(f"{where}: expected a {ell}x{ell} matrix, "
                         f"got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{where}: entries must be finite")
    skew = np.max(np.abs(arr - arr.T)) if ell > 1 else 0.0
    if skew > SYMMETRY_TOL:
        raise InputError(f"{where}: matrix is asymmetric by {skew:.3e} "
                         f"(allowed {SYMMETRY_TOL:.0e})")
    return (arr + arr.T) / 2.0


def _matrix_rows(arr):
    return [[float(v) for v in row] for row in np.asarray(arr, dtype=float)]


def _jsonify(value, where):
    """Coerce a report value to plain JSON types, rejecting the rest."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not np.isfinite(v):
            raise InputError(f"{where}: non-finite number")
        return v
    if isinstance(value, str) or value is None:
        return value
    if isinstance(value, np.ndarray):
        return [_jsonify(v, where) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_jsonify(v, where) for v in value]
    if isinstance(value, dict):
        out = {}
        for k, v in value.items():
            if not isinstance(k, str):
                raise InputError(f"{where}: non-string key {k!r}")
            out[k] = _jsonify(v, f"{where}/{k}")
        return out
    raise InputError(f"{where}: value of type {type(value).__name__} "
                     "is not JSON-serializable")


def write_json(doc):
    """Serialize any JSON-compatible document to canonical bytes.

    Same canonical form as the instance and result writers; numpy scalars
    and arrays are coerced to plain types first.
    """
    return _dumps(_jsonify(doc, "document"))


# ---------------------------------------------------------------------------
# instance files


class InstanceFile:
    """Validated in-memory form of an instance document.

    Matrices are stored symmetrized as float64 arrays; optional vectors are
    None when absent.  Equality is exact (bitwise on the arrays), matching
    the lossless round-trip contract.

    Args:
        n: Number of kept variables (length of A).
        m: Number of projected-out variables (length of B, 0 allowed).
        ell: Matrix dimension.
        A0: Constant symmetric matrix, shape (ell, ell).
        A: Sequence of n coefficient matrices for the kept variables.
        B: Sequence of m coefficient matrices for the lifted variables.
        interior_point: Optional strictly feasible x, shape (n,).
        lift_witness: Optional lift y for the interior point, shape (m,).
        recession_interior_direction: Optional direction dbar, shape (n,).
    """

    __slots__ = ("n", "m", "ell", "A0", "A", "B", "interior_point",
                 "lift_witness", "recession_interior_direction")

    def __init__(self, n, m, ell, A0, A, B=(), interior_point=None,
                 lift_witness=None, recession_interior_direction=None):
        n, m, ell = int(n), int(m), int(ell)
        if n < 1:
            raise InputError(f"n must be at least 1, got {n}")
        if m < 0:
            raise InputError(f"m must be nonnegative, got {m}")
        if ell < 1:
            raise InputError(f"ell must be at least 1, got {ell}")
        if len(A) != n:
            raise InputError(f"A has {len(A)} matrices, expected n = {n}")
        if len(B) != m:
            raise InputError(f"B has {len(B)} matrices, expected m = {m}")
        self.n, self.m, self.ell = n, m, ell
        self.A0 = _symmetric_matrix(A0, ell, "A0")
        self.A = tuple(_symmetric_matrix(Mk, ell, f"A/{k}")
                       for k, Mk in enumerate(A))
        self.B = tuple(_symmetric_matrix(Mk, ell, f"B/{k}")
                       for k, Mk in enumerate(B))
        self.interior_point = self._vector(interior_point, n, "interior_point")
        if lift_witness is not None:
            if m == 0:
                raise InputError("lift_witness given but m = 0")
            if interior_point is None:
                raise InputError("lift_witness given without interior_point")
        self.lift_witness = self._vector(lift_witness, m, "lift_witness")
        self.recession_interior_direction = self._vector(
            recession_interior_direction, n, "recession_interior_direction")

    @staticmethod
    def _vector(values, length, where):
        if values is None:
            return None
        vec = _float_vector(values)
        if vec.shape != (length,):
            raise InputError(f"{where}: expected length {length}, "
                             f"got shape {vec.shape}")
        if not np.all(np.isfinite(vec)):
            raise InputError(f"{where}: entries must be finite")
        return vec

    def __eq__(self, other):
        if not isinstance(other, InstanceFile):
            return NotImplemented
        def same(a, b):
            if a is None or b is None:
                return a is None and b is None
            return np.array_equal(a, b)
        return (
            (self.n, self.m, self.ell) == (other.n, other.m, other.ell)
            and np.array_equal(self.A0, other.A0)
            and all(np.array_equal(a, b) for a, b in zip(self.A, other.A))
            and all(np.array_equal(a, b) for a, b in zip(self.B, other.B))
            and same(self.interior_point, other.interior_point)
            and same(self.lift_witness, other.lift_witness)
            and same(self.recession_interior_direction,
                     other.recession_interior_direction)
        )

    def __repr__(self):
        return (f"InstanceFile(n={self.n}, m={self.m}, ell={self.ell}, "
                f"interior_point={'set' if self.interior_point is not None else None}, "
                f"dbar={'set' if self.recession_interior_direction is not None else None})")

    def to_target(self):
        """Build the runtime object: Spectrahedron (m=0) or ShadowInstance."""
        pencilA = MatrixPencil(self.A)
        constant = SymMatrix(self.A0)
        if self.m == 0:
            return Spectrahedron(pencil=pencilA, constant=constant)
        return ShadowInstance(pencilA=pencilA, pencilB=MatrixPencil(self.B),
                              constant=constant)

    @classmethod
    def from_target(cls, target, interior_point=None, lift_witness=None,
                    recession_interior_direction=None):
        """Wrap a Spectrahedron or ShadowInstance back into file form."""
        if isinstance(target, Spectrahedron):
            target = ShadowInstance.from_spectrahedron(target)
        if not isinstance(target, ShadowInstance):
            raise InputError(f"unsupported target type {type(target).__name__}")
        A = [m.array for m in target.pencilA.mats]
        B = [] if target.pencilB is None else [m.array for m in target.pencilB.mats]
        return cls(
            n=target.nvars, m=target.nlifted, ell=target.dim,
            A0=target.constant.array, A=A, B=B,
            interior_point=interior_point, lift_witness=lift_witness,
            recession_interior_direction=recession_interior_direction,
        )


def parse_instance(data):
    """Parse UTF-8 JSON bytes (or str) into an InstanceFile.

    Raises:
        ParseError: text or schema violations, with a JSON-pointer path.
        InputError: schema-valid but dimensionally inconsistent data.
    """
    doc = _loads(data, _INSTANCE_VALIDATOR, "instance")
    return InstanceFile(
        n=doc["n"], m=doc["m"], ell=doc["ell"],
        A0=doc["A0"], A=doc["A"], B=doc.get("B", ()),
        interior_point=doc.get("interior_point"),
        lift_witness=doc.get("lift_witness"),
        recession_interior_direction=doc.get("recession_interior_direction"),
    )


def write_instance(inst):
    """Serialize an InstanceFile to canonical JSON bytes."""
    if not isinstance(inst, InstanceFile):
        raise InputError(f"expected an InstanceFile, got {type(inst).__name__}")
    doc = {
        "format_version": FORMAT_VERSION,
        "n": inst.n,
        "m": inst.m,
        "ell": inst.ell,
        "A0": _matrix_rows(inst.A0),
        "A": [_matrix_rows(Mk) for Mk in inst.A],
    }
    if inst.m > 0:
        doc["B"] = [_matrix_rows(Mk) for Mk in inst.B]
    if inst.interior_point is not None:
        doc["interior_point"] = [float(v) for v in inst.interior_point]
    if inst.lift_witness is not None:
        doc["lift_witness"] = [float(v) for v in inst.lift_witness]
    if inst.recession_interior_direction is not None:
        doc["recession_interior_direction"] = [
            float(v) for v in inst.recession_interior_direction
        ]
    return _dumps(doc)


# ---------------------------------------------------------------------------
# result files


class ResultFile:
    """Validated in-memory form of a result document.

    Inner rays must be unit within 1e-10; outer halfspaces are homogeneous,
    so only their normals are stored and the offset serializes as the
    integer 0.

    Args:
        epsilon_requested: The accuracy the run was asked for (> 0).
        epsilon_certified: The accuracy certified at exit (>= 0, finite).
        inner_rays: Sequence of unit direction vectors (may be empty).
        outer_halfspaces: Sequence of nonzero normal vectors.
        iterations: Refinement rounds executed.
        subproblem_count: Conic subproblems solved.
        assumption_report: JSON-compatible dict of check outcomes.
        timing_ms: Reported wall time in whole milliseconds.
        partial: True when the run stopped at its iteration cap.
    """

    __slots__ = ("epsilon_requested", "epsilon_certified", "inner_rays",
                 "outer_halfspaces", "iterations", "subproblem_count",
                 "assumption_report", "timing_ms", "partial")

    def __init__(self, epsilon_requested, epsilon_certified, inner_rays,
                 outer_halfspaces, iterations, subproblem_count,
                 assumption_report, timing_ms, partial=False):
        epsilon_requested = float(epsilon_requested)
        epsilon_certified = float(epsilon_certified)
        if not np.isfinite(epsilon_requested) or epsilon_requested <= 0.0:
            raise InputError(f"epsilon_requested must be positive, "
                             f"got {epsilon_requested}")
        if not np.isfinite(epsilon_certified) or epsilon_certified < 0.0:
            raise InputError(f"epsilon_certified must be nonnegative, "
                             f"got {epsilon_certified}")
        self.epsilon_requested = epsilon_requested
        self.epsilon_certified = epsilon_certified
        self.inner_rays = self._vector_rows(inner_rays, "inner_rays")
        for k, r in enumerate(self.inner_rays):
            nrm = float(np.linalg.norm(r))
            if abs(nrm - 1.0) > RAY_NORM_TOL:
                raise InputError(f"inner_rays/{k}: norm {nrm!r} is not unit "
                                 f"within {RAY_NORM_TOL:.0e}")
        self.outer_halfspaces = self._vector_rows(outer_halfspaces,
                                                  "outer_halfspaces")
        for k, w in enumerate(self.outer_halfspaces):
            if np.linalg.norm(w) == 0.0:
                raise InputError(f"outer_halfspaces/{k}: zero normal")
        dims = {v.shape[0] for v in self.inner_rays}
        dims |= {v.shape[0] for v in self.outer_halfspaces}
        if len(dims) > 1:
            raise InputError(f"mixed ambient dimensions {sorted(dims)}")
        self.iterations = int(iterations)
        self.subproblem_count = int(subproblem_count)
        if self.iterations < 0 or self.subproblem_count < 0:
            raise InputError("iterations and subproblem_count must be >= 0")
        if not isinstance(assumption_report, dict):
            raise InputError("assumption_report must be a dict")
        self.assumption_report = _jsonify(assumption_report,
                                          "assumption_report")
        self.timing_ms = int(timing_ms)
        if self.timing_ms < 0:
            raise InputError("timing_ms must be >= 0")
        self.partial = bool(partial)

    @staticmethod
    def _vector_rows(rows, where):
        out = []
        for k, row in enumerate(rows):
            vec = _float_vector(row)
            if vec.ndim != 1 or vec.shape[0] < 1:
                raise InputError(f"{where}/{k}: expected a nonempty vector")
            if not np.all(np.isfinite(vec)):
                raise InputError(f"{where}/{k}: entries must be finite")
            out.append(vec)
        return tuple(out)

    def __eq__(self, other):
        if not isinstance(other, ResultFile):
            return NotImplemented
        return (
            self.epsilon_requested == other.epsilon_requested
            and self.epsilon_certified == other.epsilon_certified
            and len(self.inner_rays) == len(other.inner_rays)
            and all(np.array_equal(a, b)
                    for a, b in zip(self.inner_rays, other.inner_rays))
            and len(self.outer_halfspaces) == len(other.outer_halfspaces)
            and all(np.array_equal(a, b) for a, b in
                    zip(self.outer_halfspaces, other.outer_halfspaces))
            and self.iterations == other.iterations
            and self.subproblem_count == other.subproblem_count
            and self.assumption_report == other.assumption_report
            and self.timing_ms == other.timing_ms
            and self.partial == other.partial
        )

    def __repr__(self):
        return (f"ResultFile(eps_req={self.epsilon_requested}, "
                f"eps_cert={self.epsilon_certified}, "
                f"rays={len(self.inner_rays)}, "
                f"halfspaces={len(self.outer_halfspaces)}, "
                f"partial={self.partial})")

    @classmethod
    def from_approx(cls, result, epsilon_requested, assumption_report,
                    timing_ms=0, partial=False):
        """Build from an ApproxResult produced by either algorithm."""
        return cls(
            epsilon_requested=epsilon_requested,
            epsilon_certified=result.epsilon_certified,
            inner_rays=list(result.inner.rays),
            outer_halfspaces=[h.normal for h in result.outer.halfspaces],
            iterations=result.iterations,
            subproblem_count=result.subproblem_count,
            assumption_report=assumption_report,
            timing_ms=timing_ms,
            partial=partial,
        )


def parse_result(data):
    """Parse UTF-8 JSON bytes (or str) into a ResultFile.

    Raises:
        ParseError: text or schema violations, with a JSON-pointer path.
        InputError: schema-valid but inconsistent data (non-unit rays, ...).
    """
    doc = _loads(data, _RESULT_VALIDATOR, "result")
    return ResultFile(
        epsilon_requested=doc["epsilon_requested"],
        epsilon_certified=doc["epsilon_certified"],
        inner_rays=doc["inner_rays"],
        outer_halfspaces=[h["normal"] for h in doc["outer_halfspaces"]],
        iterations=doc["iterations"],
        subproblem_count=doc["subproblem_count"],
        assumption_report=doc["assumption_report"],
        timing_ms=doc["timing_ms"],
        partial=doc.get("partial", False),
    )


def write_result(res):
    """Serialize a ResultFile to canonical JSON bytes.

    Offsets of the outer halfspaces are written as the integer literal 0;
    the "partial" key appears only when set.
    """
    if not isinstance(res, ResultFile):
        raise InputError(f"expected a ResultFile, got {type(res).__name__}")
    doc = {
        "format_version": FORMAT_VERSION,
        "epsilon_requested": res.epsilon_requested,
        "epsilon_certified": res.epsilon_certified,
        "inner_rays": [[float(v) for v in r] for r in res.inner_rays],
        "outer_halfspaces": [
            {"normal": [float(v) for v in w], "offset": 0}
            for w in res.outer_halfspaces
        ],
        "iterations": res.iterations,
        "subproblem_count": res.subproblem_count,
        "assumption_report": res.assumption_report,
        "timing_ms": res.timing_ms,
    }
    if res.partial:
        doc["partial"] = True
    return _dumps(doc)
