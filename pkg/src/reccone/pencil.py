"""Symmetric matrices, linear matrix pencils and spectrahedra.

The central objects are

* :class:`SymMatrix` -- a real symmetric matrix with packed lower-triangle
  storage, so symmetry holds exactly by construction,
* :class:`MatrixPencil` -- a linear map x -> sum_i x_i A_i into symmetric
  matrices,
* :class:`Spectrahedron` -- the feasible set {x | A(x) + A0 >= 0} of a
  linear matrix inequality, and
* :class:`ShadowInstance` -- the data of a projected spectrahedron
  {x | exists y: A(x) + B(y) + A0 >= 0}.

All types are immutable values; the operations in this module are pure
functions.
"""

import dataclasses

import numpy as np

from .errors import InputError

__all__ = [
    "SymMatrix",
    "MatrixPencil",
    "Spectrahedron",
    "ShadowInstance",
    "pencil_eval",
    "min_eigenvalue",
    "is_psd",
    "recession_spectrahedron",
    "intersect_halfspaces",
]


class SymMatrix:
    """A real symmetric matrix of size ``dim`` x ``dim``.

    Only the lower triangle is stored (one copy per unordered index pair),
    so ``entry(i, j) == entry(j, i)`` holds exactly.  Inputs that are not
    exactly symmetric are averaged with their transpose.

    Args:
        data: Square array-like of shape ``(dim, dim)`` with finite entries.
    """

    __slots__ = ("_dim", "_packed")

    def __init__(self, data):
        arr = np.asarray(data, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InputError(f"expected a square matrix, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise InputError("matrix dimension must be at least 1")
        if not np.all(np.isfinite(arr)):
            raise InputError("matrix entries must be finite")
        dim = arr.shape[0]
        sym = (arr + arr.T) / 2.0
        rows, cols = np.tril_indices(dim)
        self._dim = dim
        self._packed = sym[rows, cols]
        self._packed.flags.writeable = False

    @property
    def dim(self):
        """Matrix dimension."""
        return self._dim

    @property
    def array(self):
        """Dense symmetric ndarray copy of the matrix."""
        dim = self._dim
        full = np.zeros((dim, dim))
        rows, cols = np.tril_indices(dim)
        full[rows, cols] = self._packed
        full[cols, rows] = self._packed
        return full

    def entry(self, i, j):
        """Entry (i, j); identical to entry (j, i)."""
        if not (0 <= i < self._dim and 0 <= j < self._dim):
            raise InputError(f"index ({i}, {j}) out of range for dim {self._dim}")
        if i < j:
            i, j = j, i
        return self._packed[i * (i + 1) // 2 + j]

    def trace(self):
        """Sum of diagonal entries."""
        idx = np.arange(self._dim)
        return float(self._packed[idx * (idx + 1) // 2 + idx].sum())

    def dot(self, other):
        """Frobenius inner product with another symmetric matrix."""
        if isinstance(other, SymMatrix):
            other = other.array
        else:
            other = np.asarray(other, dtype=float)
        return float(np.tensordot(self.array, other))

    @classmethod
    def zero(cls, dim):
        """The dim x dim zero matrix."""
        return cls(np.zeros((dim, dim)))

    @classmethod
    def identity(cls, dim):
        """The dim x dim identity matrix."""
        return cls(np.eye(dim))

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return self._dim == other._dim and np.array_equal(self._packed, other._packed)

    def __hash__(self):
        return hash((self._dim, self._packed.tobytes()))

    def __repr__(self):
        return f"SymMatrix({self.array.tolist()!r})"


@dataclasses.dataclass(frozen=True)
class MatrixPencil:
    """An ordered tuple of symmetric matrices defining x -> sum_i x_i A_i.

    Attributes:
        mats: The coefficient matrices A_1, ..., A_n, all of equal dimension.
    """

    mats: tuple

    def __init__(self, mats):
        mats = tuple(m if isinstance(m, SymMatrix) else SymMatrix(m) for m in mats)
        if len(mats) < 1:
            raise InputError("a pencil needs at least one matrix")
        dim = mats[0].dim
        for k, m in enumerate(mats):
            if m.dim != dim:
                raise InputError(
                    f"pencil matrix {k} has dim {m.dim}, expected {dim}"
                )
        object.__setattr__(self, "mats", mats)

    @property
    def dim(self):
        """Common dimension of the member matrices."""
        return self.mats[0].dim

    @property
    def nvars(self):
        """Number of variables (member matrices)."""
        return len(self.mats)

    def stack(self):
        """Dense ndarray of shape (nvars, dim, dim) stacking the matrices."""
        return np.stack([m.array for m in self.mats])


@dataclasses.dataclass(frozen=True)
class Spectrahedron:
    """The set {x in R^n | A(x) + constant >= 0}.

    Attributes:
        pencil: The matrix pencil A.
        constant: The constant matrix added to every evaluation.
    """

    pencil: MatrixPencil
    constant: SymMatrix

    def __post_init__(self):
        if self.pencil.dim != self.constant.dim:
            raise InputError(
                f"pencil dim {self.pencil.dim} != constant dim {self.constant.dim}"
            )

    @property
    def nvars(self):
        return self.pencil.nvars

    @property
    def dim(self):
        return self.pencil.dim


@dataclasses.dataclass(frozen=True)
class ShadowInstance:
    """Data of the projected spectrahedron {x | exists y: A(x)+B(y)+constant >= 0}.

    ``pencilB`` may be None, in which case the instance degenerates to the
    plain spectrahedron over x (m = 0).

    Attributes:
        pencilA: Pencil over the kept variables x.
        pencilB: Pencil over the projected-out variables y, or None.
        constant: The constant matrix.
    """

    pencilA: MatrixPencil
    pencilB: object
    constant: SymMatrix

    def __post_init__(self):
        if self.pencilA.dim != self.constant.dim:
            raise InputError(
                f"pencil dim {self.pencilA.dim} != constant dim {self.constant.dim}"
            )
        if self.pencilB is not None and self.pencilB.dim != self.constant.dim:
            raise InputError(
                f"lift pencil dim {self.pencilB.dim} != constant dim "
                f"{self.constant.dim}"
            )

    @property
    def nvars(self):
        return self.pencilA.nvars

    @property
    def nlifted(self):
        return 0 if self.pencilB is None else self.pencilB.nvars

    @property
    def dim(self):
        return self.constant.dim

    @classmethod
    def from_spectrahedron(cls, spec):
        """Wrap a plain spectrahedron as an m = 0 shadow instance."""
        return cls(pencilA=spec.pencil, pencilB=None, constant=spec.constant)

    def to_spectrahedron(self):
        """The underlying spectrahedron; only valid when m = 0."""
        if self.pencilB is not None:
            raise InputError("instance has lifted variables, not a spectrahedron")
        return Spectrahedron(pencil=self.pencilA, constant=self.constant)


def pencil_eval(pencil, x):
    """Evaluate a pencil: ``sum_i x[i] * mats[i]``.

    Exactly linear in x up to floating round-off.

    Args:
        pencil: The :class:`MatrixPencil` to evaluate.
        x: Coefficient vector of length ``pencil.nvars``.

    Returns:
        The evaluation as a :class:`SymMatrix`.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (pencil.nvars,):
        raise InputError(
            f"coefficient vector has shape {x.shape}, expected ({pencil.nvars},)"
        )
    if not np.all(np.isfinite(x)):
        raise InputError("coefficient vector must be finite")
    return SymMatrix(np.tensordot(x, pencil.stack(), axes=1))


def min_eigenvalue(mat):
    """Smallest eigenvalue of a symmetric matrix.

    Args:
        mat: A :class:`SymMatrix` or square symmetric array-like.

    Returns:
        The minimum eigenvalue as a float.
    """
    if isinstance(mat, SymMatrix):
        arr = mat.array
    else:
        arr = np.asarray(mat, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise InputError("matrix entries must be finite")
        arr = (arr + arr.T) / 2.0
    return float(np.linalg.eigvalsh(arr)[0])


def is_psd(mat, tol=0.0):
    """Whether a symmetric matrix is positive semidefinite within ``tol``.

    True iff the minimum eigenvalue is at least ``-tol``.
    """
    if tol < 0:
        raise InputError(f"tolerance must be nonnegative, got {tol}")
    return min_eigenvalue(mat) >= -tol


def recession_spectrahedron(spec):
    """The recession cone of a spectrahedron, as a spectrahedron.

    Drops the constant matrix: the recession cone of {x | A(x)+A0 >= 0}
    is the homogeneous set {x | A(x) >= 0}.
    """
    return Spectrahedron(pencil=spec.pencil, constant=SymMatrix.zero(spec.dim))


def intersect_halfspaces(spec, halfspaces):
    """Intersect a spectrahedron with halfspaces, as a single spectrahedron.

    Each halfspace {x | w.x <= gamma} becomes one extra 1x1 diagonal block
    encoding gamma - w.x >= 0, so membership in the result equals membership
    in the intersection exactly and every downstream subproblem stays a
    single standard-form semidefinite program.

    Args:
        spec: The :class:`Spectrahedron` to constrain.
        halfspaces: Iterable of halfspace objects with ``normal`` and
            ``offset`` attributes; normals must have length ``spec.nvars``.

    Returns:
        The augmented :class:`Spectrahedron`.
    """
    halfspaces = list(halfspaces)
    if not halfspaces:
        return spec
    n = spec.nvars
    ell = spec.dim
    k = len(halfspaces)
    for h in halfspaces:
        normal = np.asarray(h.normal, dtype=float)
        if normal.shape != (n,):
            raise InputError(
                f"halfspace normal has shape {normal.shape}, expected ({n},)"
            )
    big = ell + k
    mats = []
    for i in range(n):
        block = np.zeros((big, big))
        block[:ell, :ell] = spec.pencil.mats[i].array
        for j, h in enumerate(halfspaces):
            block[ell + j, ell + j] = -float(np.asarray(h.normal, dtype=float)[i])
        mats.append(block)
    const = np.zeros((big, big))
    const[:ell, :ell] = spec.constant.array
    for j, h in enumerate(halfspaces):
        const[ell + j, ell + j] = float(h.offset)
    return Spectrahedron(pencil=MatrixPencil(mats), constant=SymMatrix(const))
