"""Tests for symmetric matrices, pencils and spectrahedron helpers."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reccone.errors import DegenerateInput, InputError
from reccone.pencil import (
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
from reccone.polyhedra import Halfspace

# ---------------------------------------------------------------------------
# independent oracles


def eig2x2_min(a, b, c):
    """Closed-form smaller eigenvalue of [[a, b], [b, c]]."""
    mean = (a + c) / 2.0
    return mean - math.sqrt(((a - c) / 2.0) ** 2 + b * b)


def entrywise_pencil_sum(mats, x):
    """Brute-force pencil evaluation, one scalar entry at a time."""
    ell = mats[0].shape[0]
    out = np.zeros((ell, ell))
    for i in range(ell):
        for j in range(ell):
            acc = 0.0
            for k in range(len(mats)):
                acc += x[k] * mats[k][i, j]
            out[i, j] = acc
    return out


# ---------------------------------------------------------------------------
# SymMatrix


class TestSymMatrix:
    def test_entry_symmetry_exact(self):
        m = SymMatrix([[1.0, 2.0], [2.0, 5.0]])
        assert m.entry(0, 1) == m.entry(1, 0)

    def test_asymmetric_input_averaged(self):
        m = SymMatrix([[0.0, 1.0], [3.0, 0.0]])
        assert m.entry(0, 1) == 2.0
        assert m.entry(1, 0) == 2.0

    def test_rejects_nonfinite(self):
        with pytest.raises(InputError):
            SymMatrix([[np.nan, 0.0], [0.0, 1.0]])
        with pytest.raises(InputError):
            SymMatrix([[np.inf, 0.0], [0.0, 1.0]])

    def test_rejects_nonsquare(self):
        with pytest.raises(InputError):
            SymMatrix(np.zeros((2, 3)))

    def test_trace_and_dot_entrywise(self):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((3, 3))
        a = (a + a.T) / 2
        b = rng.standard_normal((3, 3))
        b = (b + b.T) / 2
        ma, mb = SymMatrix(a), SymMatrix(b)
        assert ma.trace() == pytest.approx(sum(a[i, i] for i in range(3)), abs=1e-14)
        want = sum(a[i, j] * b[i, j] for i in range(3) for j in range(3))
        assert ma.dot(mb) == pytest.approx(want, abs=1e-12)

    def test_equality_and_hash(self):
        a = SymMatrix([[1.0, 2.0], [2.0, 3.0]])
        b = SymMatrix([[1.0, 2.0], [2.0, 3.0]])
        assert a == b and hash(a) == hash(b)
        assert a != SymMatrix([[1.0, 2.0], [2.0, 4.0]])


# ---------------------------------------------------------------------------
# pencil_eval


class TestPencilEval:
    def test_zero_coefficients(self):
        p = MatrixPencil([[[0, 1], [1, 0]], [[1, 0], [0, 0]]])
        assert np.array_equal(pencil_eval(p, [0.0, 0.0]).array, np.zeros((2, 2)))

    def test_parabola_epigraph_pencil(self):
        p = MatrixPencil([[[0, 1], [1, 0]], [[1, 0], [0, 0]]])
        got = pencil_eval(p, [3.0, 5.0]).array
        assert np.allclose(got, [[5.0, 3.0], [3.0, 0.0]], atol=0)

    def test_matches_entrywise_sum(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            raw = rng.standard_normal((4, 3, 3))
            mats = [(m + m.T) / 2 for m in raw]
            p = MatrixPencil(mats)
            x = rng.standard_normal(4)
            want = entrywise_pencil_sum(mats, x)
            assert np.allclose(pencil_eval(p, x).array, want, atol=1e-12)

    def test_length_mismatch(self):
        p = MatrixPencil([np.eye(2)])
        with pytest.raises(InputError):
            pencil_eval(p, [1.0, 2.0])

    def test_rejects_nonfinite_coefficients(self):
        p = MatrixPencil([np.eye(2)])
        with pytest.raises(InputError):
            pencil_eval(p, [np.nan])

    @settings(max_examples=60, deadline=None)
    @given(
        x1=st.floats(-10, 10),
        x2=st.floats(-10, 10),
        y1=st.floats(-10, 10),
        y2=st.floats(-10, 10),
        a=st.floats(-5, 5),
        b=st.floats(-5, 5),
        seed=st.integers(0, 2**16),
    )
    def test_linearity(self, x1, x2, y1, y2, a, b, seed):
        rng = np.random.default_rng(seed)
        raw = rng.standard_normal((2, 3, 3))
        p = MatrixPencil([(m + m.T) / 2 for m in raw])
        x = np.array([x1, x2])
        y = np.array([y1, y2])
        lhs = pencil_eval(p, a * x + b * y).array
        rhs = a * pencil_eval(p, x).array + b * pencil_eval(p, y).array
        scale = 1.0 + max(np.abs(lhs).max(), np.abs(rhs).max())
        assert np.max(np.abs(lhs - rhs)) <= 1e-10 * scale


# ---------------------------------------------------------------------------
# min_eigenvalue / is_psd


class TestEigenvalues:
    def test_identity(self):
        assert min_eigenvalue(SymMatrix.identity(2)) == pytest.approx(1.0, abs=1e-12)

    def test_closed_form_2x2(self):
        got = min_eigenvalue(SymMatrix([[5.0, 3.0], [3.0, 0.0]]))
        assert got == pytest.approx((5 - math.sqrt(61)) / 2, abs=1e-9)

    def test_closed_form_random_2x2(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a, b, c = rng.standard_normal(3) * 4
            got = min_eigenvalue(np.array([[a, b], [b, c]]))
            assert got == pytest.approx(eig2x2_min(a, b, c), abs=1e-9)

    def test_diagonal(self):
        assert min_eigenvalue(np.diag([2.0, -7.0])) == pytest.approx(-7.0, abs=0)

    def test_is_psd_zero_matrix(self):
        assert is_psd(SymMatrix.zero(3), tol=0.0)

    def test_is_psd_indefinite(self):
        assert not is_psd(SymMatrix([[1.0, 2.0], [2.0, 1.0]]), tol=1e-9)

    def test_is_psd_epigraph_boundary(self):
        # [[x2, x1], [x1, 1]] at (1, 1) sits on the boundary x2 = x1^2
        assert is_psd(SymMatrix([[1.0, 1.0], [1.0, 1.0]]), tol=1e-9)

    def test_is_psd_rejects_negative_tol(self):
        with pytest.raises(InputError):
            is_psd(SymMatrix.zero(2), tol=-1.0)


# ---------------------------------------------------------------------------
# recession_spectrahedron


class TestRecession:
    def test_parabola_epigraph_recession_ray(self, epigraph):
        rec = recession_spectrahedron(epigraph)
        assert rec.pencil == epigraph.pencil
        assert rec.constant == SymMatrix.zero(2)
        # the homogeneous set {[[x2, x1],[x1, 0]] >= 0} is the ray x1=0, x2>=0
        assert is_psd(pencil_eval(rec.pencil, [0.0, 1.0]), tol=0.0)
        assert not is_psd(pencil_eval(rec.pencil, [1.0, 2.0]), tol=1e-9)
        assert not is_psd(pencil_eval(rec.pencil, [0.0, -1.0]), tol=1e-9)

    def test_idempotent(self, epigraph):
        once = recession_spectrahedron(epigraph)
        twice = recession_spectrahedron(once)
        assert once == twice

    def test_psd_cone_self_recessive(self, psd2x2):
        rec = recession_spectrahedron(psd2x2)
        rng = np.random.default_rng(5)
        for _ in range(1000):
            x = rng.standard_normal(3) * 2
            orig = is_psd(
                SymMatrix(pencil_eval(psd2x2.pencil, x).array + psd2x2.constant.array),
                tol=1e-9,
            )
            rec_m = is_psd(pencil_eval(rec.pencil, x), tol=1e-9)
            assert orig == rec_m

    def test_ray_monotonicity(self, psd2x2):
        rec = recession_spectrahedron(psd2x2)
        rng = np.random.default_rng(9)
        hits = 0
        for _ in range(200):
            g = rng.standard_normal((2, 2))
            psd_point = g @ g.T
            x = np.array([psd_point[0, 0], psd_point[0, 1], psd_point[1, 1]])
            if is_psd(pencil_eval(rec.pencil, x), tol=0.0):
                hits += 1
                for s in (0.0, 0.5, 2.0, 10.0):
                    assert is_psd(pencil_eval(rec.pencil, s * x), tol=1e-12)
        assert hits > 100


# ---------------------------------------------------------------------------
# intersect_halfspaces


class TestIntersectHalfspaces:
    def test_empty_list_unchanged(self, psd2x2):
        assert intersect_halfspaces(psd2x2, []) == psd2x2

    def test_sign_oracle_on_full_space(self):
        # 1x1 pencil that is always feasible; one halfspace x1 <= 0
        free = Spectrahedron(
            pencil=MatrixPencil([np.zeros((1, 1))]),
            constant=SymMatrix([[1.0]]),
        )
        cut = intersect_halfspaces(free, [Halfspace([1.0], 0.0)])
        rng = np.random.default_rng(13)
        for _ in range(100):
            x = rng.standard_normal(1) * 3
            mat = SymMatrix(pencil_eval(cut.pencil, x).array + cut.constant.array)
            assert is_psd(mat, tol=1e-9) == (x[0] <= 1e-9)

    def test_membership_equivalence(self, psd2x2):
        hs = [Halfspace([1.0, 0.0, 1.0], 1.5), Halfspace([-1.0, 2.0, 0.0], 0.25)]
        aug = intersect_halfspaces(psd2x2, hs)
        rng = np.random.default_rng(17)
        for _ in range(1000):
            x = rng.standard_normal(3) * 1.5
            m_orig = SymMatrix(
                pencil_eval(psd2x2.pencil, x).array + psd2x2.constant.array
            )
            m_aug = SymMatrix(pencil_eval(aug.pencil, x).array + aug.constant.array)
            direct = is_psd(m_orig, tol=1e-9) and all(
                h.normal @ x - h.offset <= 1e-9 for h in hs
            )
            assert is_psd(m_aug, tol=1e-9) == direct

    def test_block_structure(self, orthant_diag):
        aug = intersect_halfspaces(orthant_diag, [Halfspace([1.0, 1.0], 2.0)])
        assert aug.dim == 3
        assert aug.nvars == 2
        got = pencil_eval(aug.pencil, [1.0, 1.0]).array + aug.constant.array
        assert np.allclose(got, np.diag([1.0, 1.0, 0.0]), atol=0)

    def test_dimension_mismatch(self, orthant_diag):
        with pytest.raises(InputError):
            intersect_halfspaces(orthant_diag, [Halfspace([1.0, 0.0, 0.0], 1.0)])


# ---------------------------------------------------------------------------
# type invariants


class TestTypes:
    def test_pencil_needs_matching_dims(self):
        with pytest.raises(InputError):
            MatrixPencil([np.eye(2), np.eye(3)])

    def test_pencil_needs_a_matrix(self):
        with pytest.raises(InputError):
            MatrixPencil([])

    def test_spectrahedron_dim_check(self):
        with pytest.raises(InputError):
            Spectrahedron(pencil=MatrixPencil([np.eye(2)]), constant=SymMatrix.zero(3))

    def test_shadow_m0_roundtrip(self, orthant_diag):
        sh = ShadowInstance.from_spectrahedron(orthant_diag)
        assert sh.nlifted == 0
        assert sh.to_spectrahedron() == orthant_diag

    def test_shadow_with_lift_rejects_to_spectrahedron(self, halfplane_shadow):
        with pytest.raises(InputError):
            halfplane_shadow.to_spectrahedron()

    def test_shadow_dim_check(self):
        with pytest.raises(InputError):
            ShadowInstance(
                pencilA=MatrixPencil([np.eye(2)]),
                pencilB=MatrixPencil([np.eye(3)]),
                constant=SymMatrix.zero(2),
            )

    def test_zero_pencil_matrices_allowed(self, halfplane_shadow):
        got = pencil_eval(halfplane_shadow.pencilA, [5.0, 2.0]).array
        assert np.allclose(got, [[2.0, 0.0], [0.0, 0.0]], atol=0)
