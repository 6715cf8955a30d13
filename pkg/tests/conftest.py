"""Shared fixtures: small canonical instances used across the test suite."""

import numpy as np
import pytest

from reccone.pencil import MatrixPencil, ShadowInstance, Spectrahedron, SymMatrix

E11 = np.array([[1.0, 0.0], [0.0, 0.0]])
E22 = np.array([[0.0, 0.0], [0.0, 1.0]])
OFFDIAG = np.array([[0.0, 1.0], [1.0, 0.0]])


@pytest.fixture
def psd2x2():
    """{(a,b,c) | [[a,b],[b,c]] >= 0}: the 2x2 PSD cone in R^3, self-recessive."""
    return Spectrahedron(
        pencil=MatrixPencil([E11, OFFDIAG, E22]),
        constant=SymMatrix.zero(2),
    )


@pytest.fixture
def disk():
    """{x in R^2 | [[1+x1, x2],[x2, 1-x1]] >= 0}: the unit disk."""
    return Spectrahedron(
        pencil=MatrixPencil([np.diag([1.0, -1.0]), OFFDIAG]),
        constant=SymMatrix.identity(2),
    )


@pytest.fixture
def epigraph():
    """{x | [[x2, x1],[x1, 1]] >= 0}: the parabola epigraph x2 >= x1^2.

    Its recession cone is the single ray spanned by (0, 1); the set has no
    interior-recession direction probe issues but fails the strict
    feasibility of its recession pencil, so it exercises assumption checks.
    """
    return Spectrahedron(
        pencil=MatrixPencil([OFFDIAG, E11]),
        constant=SymMatrix(E22),
    )


@pytest.fixture
def orthant_diag():
    """{x in R^2 | diag(x1, x2) >= 0}: the nonnegative orthant."""
    return Spectrahedron(
        pencil=MatrixPencil([E11, E22]),
        constant=SymMatrix.zero(2),
    )


@pytest.fixture
def halfplane_shadow():
    """Projection {x | exists y: diag(x2 - y, y) >= 0} = {x | x2 >= 0}.

    A closed, non-pointed shadow; recession cone is the upper halfplane.
    """
    return ShadowInstance(
        pencilA=MatrixPencil([np.zeros((2, 2)), E11]),
        pencilB=MatrixPencil([np.diag([-1.0, 1.0])]),
        constant=SymMatrix.zero(2),
    )


@pytest.fixture
def nonclosed_shadow():
    """Projection of {(x,y) | [[x,1],[1,y]] >= 0} onto x: the open ray x > 0."""
    return ShadowInstance(
        pencilA=MatrixPencil([np.array([[1.0, 0.0], [0.0, 0.0]])]),
        pencilB=MatrixPencil([E22]),
        constant=SymMatrix(OFFDIAG),
    )


@pytest.fixture
def fullspace_shadow():
    """S = R^2 encoded with a trivially positive 1x1 block."""
    zero1 = np.zeros((1, 1))
    return ShadowInstance(
        pencilA=MatrixPencil([zero1, zero1]),
        pencilB=None,
        constant=SymMatrix(np.array([[1.0]])),
    )
