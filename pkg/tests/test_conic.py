"""Tests for the conic subproblem builders and the solver boundary.

Closed-form oracles used here:

* support function of the unit disk in direction w is ||w||_2, attained
  at w / ||w||_2;
* the parabola epigraph {x2 >= x1^2} has the unique supporting halfspace
  2 a x1 - x2 <= a^2 at the boundary point (a, a^2);
* strong duality: whenever P2 and D2 both report Optimal, their objective
  values must agree, and the D2 halfspace must contain every feasible
  point with equality at the P2 optimizer.
"""

import numpy as np
import pytest

from reccone.conic import (
    AffineMatrix,
    AffineScalar,
    ConicProblem,
    SolveStatus,
    build_D2,
    build_P1,
    build_P2,
    record_d2_solutions,
    solve_D2,
    solve_D2_shadow,
    solve_P1,
    solve_P2,
    solve_P2_shadow,
)
from reccone.errors import InputError
from reccone.pencil import (
    MatrixPencil,
    ShadowInstance,
    Spectrahedron,
    SymMatrix,
    is_psd,
    pencil_eval,
    recession_spectrahedron,
    intersect_halfspaces,
)
from reccone.polyhedra import Halfspace


@pytest.fixture
def parabola_shadow():
    """{x | exists y: diag([[y, x1],[x1, 1]], x2 - y) >= 0} = {x2 >= x1^2}.

    Lifted (m = 1) encoding of the same set as the ``epigraph`` fixture,
    used for differential tests between the two representations.
    """
    a1 = np.zeros((3, 3))
    a1[0, 1] = a1[1, 0] = 1.0
    a2 = np.zeros((3, 3))
    a2[2, 2] = 1.0
    b1 = np.diag([1.0, 0.0, -1.0])
    a0 = np.diag([0.0, 1.0, 0.0])
    return ShadowInstance(
        pencilA=MatrixPencil([a1, a2]),
        pencilB=MatrixPencil([b1]),
        constant=SymMatrix(a0),
    )


@pytest.fixture
def halfline():
    """{x in R | diag(x, 1) >= 0} = [0, inf)."""
    return Spectrahedron(
        pencil=MatrixPencil([np.diag([1.0, 0.0])]),
        constant=SymMatrix(np.diag([0.0, 1.0])),
    )


def sample_feasible(C, rng, count=40, radius=2.0, attempts=600):
    """Rejection-sample exactly feasible points of a spectrahedron."""
    pts = []
    for _ in range(attempts):
        x = rng.uniform(-radius, radius, size=C.nvars)
        mat = pencil_eval(C.pencil, x).array + C.constant.array
        if is_psd(mat):
            pts.append(x)
            if len(pts) >= count:
                break
    return pts


class TestBuilders:
    def test_p1_layout(self, disk):
        prob = build_P1(disk, np.array([1.0, 0.0]))
        assert prob.sense == "max"
        assert prob.scalar_vars == ("x1", "x2")
        assert prob.psd_var is None
        assert len(prob.psd_blocks) == 1
        assert prob.psd_blocks[0].dim == 2
        assert prob.linear_eqs == ()
        assert prob.objective.terms == (("x1", 1.0), ("x2", 0.0))

    def test_p2_layout(self, parabola_shadow):
        prob = build_P2(parabola_shadow, np.zeros(2), np.array([0.0, 1.0]))
        assert prob.scalar_vars == ("x1", "x2", "y1", "t")
        assert [b.dim for b in prob.psd_blocks] == [3]
        # one coupling equality per kept variable
        assert len(prob.linear_eqs) == 2
        eq0 = prob.linear_eqs[0]
        assert eq0.terms == (("x1", 1.0), ("t", -0.0))
        assert eq0.const == -0.0

    def test_p2_cap_block(self, disk):
        S = ShadowInstance.from_spectrahedron(disk)
        prob = build_P2(S, np.zeros(2), np.array([1.0, 0.0]), t_cap=10.0)
        assert [b.dim for b in prob.psd_blocks] == [2, 1]
        cap = prob.psd_blocks[1]
        assert cap.const.entry(0, 0) == 10.0
        assert cap.terms[0][0] == "t"

    def test_d2_layout(self, parabola_shadow):
        prob = build_D2(parabola_shadow, np.zeros(2), np.array([0.0, 1.0]))
        assert prob.sense == "min"
        assert prob.scalar_vars == ("w1", "w2")
        assert prob.psd_var == ("U", 3)
        # n pencil equalities + m lifted equalities + the normalization d.w = 1
        assert len(prob.linear_eqs) == 4
        assert prob.linear_eqs[-1].const == -1.0

    def test_zero_direction_rejected(self, disk):
        with pytest.raises(InputError):
            build_P2(ShadowInstance.from_spectrahedron(disk), np.zeros(2), np.zeros(2))
        with pytest.raises(InputError):
            solve_D2(disk, np.zeros(2), np.zeros(2))
        with pytest.raises(InputError):
            build_P1(disk, np.zeros(2))

    def test_shape_mismatch_rejected(self, disk):
        with pytest.raises(InputError):
            solve_P2(disk, np.zeros(3), np.ones(2))
        with pytest.raises(InputError):
            solve_P2(disk, np.zeros(2), np.ones(3))

    def test_m0_routes_are_identical(self, disk):
        v = np.array([0.1, -0.2])
        d = np.array([0.6, 0.8])
        S = ShadowInstance.from_spectrahedron(disk)
        S2 = ShadowInstance(pencilA=disk.pencil, pencilB=None, constant=disk.constant)
        assert build_P2(S, v, d) == build_P2(S2, v, d)
        assert build_D2(S, v, d) == build_D2(S2, v, d)

    def test_problem_validation(self):
        one = SymMatrix([[1.0]])
        obj = AffineScalar(0.0, terms=(("t", 1.0),))
        with pytest.raises(InputError):
            ConicProblem("max", ("t", "t"), None, obj, (), ())
        with pytest.raises(InputError):
            ConicProblem("max", ("s",), None, obj, (), ())
        with pytest.raises(InputError):
            ConicProblem("sup", ("t",), None, obj, (), ())
        small = AffineMatrix(const=one, terms=())
        big = AffineMatrix(const=SymMatrix.identity(2), terms=())
        with pytest.raises(InputError):
            ConicProblem("max", ("t",), None, obj, (small, big), ())
        # largest-first ordering passes
        prob = ConicProblem("max", ("t",), None, obj, (big, small), ())
        assert [b.dim for b in prob.psd_blocks] == [2, 1]


class TestP1:
    def test_disk_support_function(self, disk):
        for w in ([1.0, 0.0], [0.6, 0.8], [-2.0, 1.0]):
            w = np.array(w)
            sol = solve_P1(disk, w)
            assert sol.status is SolveStatus.OPTIMAL
            assert sol.primal_obj == pytest.approx(np.linalg.norm(w), abs=1e-6)
            x = sol.certificate["x"]
            assert np.allclose(x, w / np.linalg.norm(w), atol=1e-5)

    def test_duality_gap_reported(self, disk):
        sol = solve_P1(disk, np.array([1.0, 0.0]))
        assert sol.dual_obj == pytest.approx(sol.primal_obj, abs=1e-6)
        assert sol.dual_matrix is not None
        assert is_psd(sol.dual_matrix, tol=1e-7)

    def test_halfline_unbounded_vs_optimal(self, halfline):
        up = solve_P1(halfline, np.array([1.0]))
        assert up.status is SolveStatus.UNBOUNDED
        down = solve_P1(halfline, np.array([-1.0]))
        assert down.status is SolveStatus.OPTIMAL
        assert down.primal_obj == pytest.approx(0.0, abs=1e-6)
        assert down.certificate["x"][0] == pytest.approx(0.0, abs=1e-6)

    def test_infeasible(self):
        empty = Spectrahedron(
            pencil=MatrixPencil([np.zeros((1, 1))]),
            constant=SymMatrix([[-1.0]]),
        )
        sol = solve_P1(empty, np.array([1.0]))
        assert sol.status is SolveStatus.INFEASIBLE

    def test_strip_is_compact(self, psd2x2):
        # polar-interior slab across the PSD cone: every coordinate
        # functional becomes bounded once the trace is pinned to [1.1, 1.2]
        w = np.array([-1.0, 0.0, -1.0]) / np.sqrt(2.0)
        strip = intersect_halfspaces(
            recession_spectrahedron(psd2x2),
            [Halfspace(w, -1.1), Halfspace(-w, 1.2)],
        )
        cone_probe = solve_P1(recession_spectrahedron(psd2x2), np.array([1.0, 0.0, 0.0]))
        assert cone_probe.status is SolveStatus.UNBOUNDED
        for i in range(3):
            for sign in (1.0, -1.0):
                e = np.zeros(3)
                e[i] = sign
                sol = solve_P1(strip, e)
                assert sol.status is SolveStatus.OPTIMAL, (i, sign, sol.detail)
                assert abs(sol.primal_obj) <= 2.0


class TestP2:
    def test_disk_step_to_boundary(self, disk):
        sol = solve_P2(disk, np.zeros(2), np.array([1.0, 0.0]))
        assert sol.status is SolveStatus.OPTIMAL
        assert sol.primal_obj == pytest.approx(1.0, abs=1e-6)
        assert np.allclose(sol.certificate["x"], [1.0, 0.0], atol=1e-6)
        # reconstructed dual halfspace normal supports the disk at (1, 0)
        assert np.allclose(sol.dual_vector, [1.0, 0.0], atol=1e-5)
        assert sol.dual_vector @ np.array([1.0, 0.0]) == pytest.approx(1.0, abs=1e-8)
        assert sol.dual_obj == pytest.approx(1.0, abs=1e-6)

    def test_interior_start(self, disk):
        sol = solve_P2(disk, np.array([0.5, 0.0]), np.array([1.0, 0.0]))
        assert sol.status is SolveStatus.OPTIMAL
        assert sol.primal_obj == pytest.approx(0.5, abs=1e-6)

    def test_unbounded_with_certificate(self, orthant_diag):
        d = np.array([1.0, 2.0])
        sol = solve_P2(orthant_diag, np.array([1.0, 1.0]), d)
        assert sol.status is SolveStatus.UNBOUNDED
        assert np.allclose(sol.certificate["direction"], d)

    def test_bounded_in_nonrecession_direction(self, orthant_diag):
        sol = solve_P2(orthant_diag, np.array([1.0, 3.0]), np.array([0.0, -1.0]))
        assert sol.status is SolveStatus.OPTIMAL
        assert sol.primal_obj == pytest.approx(3.0, abs=1e-6)

    def test_infeasible_start(self, disk):
        sol = solve_P2(disk, np.array([5.0, 5.0]), np.array([1.0, 0.0]))
        assert sol.status is SolveStatus.INFEASIBLE

    def test_nonclosed_shadow_unbounded(self, nonclosed_shadow):
        sol = solve_P2_shadow(nonclosed_shadow, np.array([1.0]), np.array([1.0]))
        assert sol.status is SolveStatus.UNBOUNDED

    def test_m0_wrapper_matches_shadow_call(self, disk):
        v = np.array([0.2, 0.1])
        d = np.array([0.6, 0.8])
        a = solve_P2(disk, v, d)
        b = solve_P2_shadow(ShadowInstance.from_spectrahedron(disk), v, d)
        assert a.status is b.status
        assert a.primal_obj == pytest.approx(b.primal_obj, abs=1e-12)


class TestD2:
    def test_disk_supporting_halfspace(self, disk):
        d = np.array([1.0, 0.0])
        sol = solve_D2(disk, np.zeros(2), d)
        assert sol.status is SolveStatus.OPTIMAL
        assert np.allclose(sol.dual_vector, [1.0, 0.0], atol=1e-6)
        assert sol.certificate["halfspace_offset"] == pytest.approx(1.0, abs=1e-6)
        assert sol.dual_vector @ d == pytest.approx(1.0, abs=1e-8)
        assert is_psd(sol.dual_matrix, tol=1e-7)

    def test_disk_oblique_direction(self, disk):
        d = np.array([0.6, 0.8])
        sol = solve_D2(disk, np.zeros(2), d)
        assert sol.status is SolveStatus.OPTIMAL
        # boundary point d has outer normal d; scaling to d.w = 1 keeps w = d
        assert np.allclose(sol.dual_vector, d, atol=1e-6)
        assert sol.certificate["halfspace_offset"] == pytest.approx(1.0, abs=1e-6)

    def test_strong_duality_with_p2(self, disk):
        v = np.array([0.2, -0.3])
        d = np.array([0.6, 0.8])
        p2 = solve_P2(disk, v, d)
        d2 = solve_D2(disk, v, d)
        assert p2.status is SolveStatus.OPTIMAL
        assert d2.status is SolveStatus.OPTIMAL
        assert d2.primal_obj == pytest.approx(p2.primal_obj, abs=1e-6)
        assert d2.primal_obj == pytest.approx(d2.dual_obj, abs=1e-6)

    def test_unbounded_p2_gives_infeasible_d2(self, orthant_diag):
        sol = solve_D2(orthant_diag, np.array([1.0, 1.0]), np.array([1.0, 1.0]))
        assert sol.status is SolveStatus.INFEASIBLE

    def test_parabola_tangent(self, parabola_shadow):
        v = np.array([0.0, 1.0])
        d = np.array([1.0, 0.0])
        p2 = solve_P2_shadow(parabola_shadow, v, d)
        assert p2.status is SolveStatus.OPTIMAL
        assert p2.primal_obj == pytest.approx(1.0, abs=1e-5)
        d2 = solve_D2_shadow(parabola_shadow, v, d)
        assert d2.status is SolveStatus.OPTIMAL
        # unique tangent at (1, 1): 2 x1 - x2 <= 1, scaled so w . d = 1
        assert np.allclose(d2.dual_vector, [1.0, -0.5], atol=1e-5)
        assert d2.certificate["halfspace_offset"] == pytest.approx(0.5, abs=1e-5)

    def test_halfspace_contains_shadow_samples(self, parabola_shadow, epigraph):
        rng = np.random.default_rng(7)
        d2 = solve_D2_shadow(parabola_shadow, np.array([0.0, 1.0]), np.array([1.0, 0.0]))
        w = d2.dual_vector
        gamma = d2.certificate["halfspace_offset"]
        pts = sample_feasible(epigraph, rng, count=60, radius=3.0)
        assert len(pts) >= 20
        for x in pts:
            assert w @ x <= gamma + 1e-6


class TestLiftedVsEliminated:
    """The parabola shadow (m = 1) and the epigraph pencil (m = 0) encode the
    same set; every subproblem outcome must agree across the encodings."""

    CASES = [
        (np.array([0.0, 1.0]), np.array([1.0, 0.0])),
        (np.array([0.0, 2.0]), np.array([1.0, -1.0])),
        (np.array([1.0, 1.0]), np.array([0.0, -1.0])),
        (np.array([-0.5, 2.0]), np.array([0.3, 1.0])),
    ]

    def test_p2_agreement(self, parabola_shadow, epigraph):
        for v, d in self.CASES:
            a = solve_P2_shadow(parabola_shadow, v, d)
            b = solve_P2(epigraph, v, d)
            assert a.status is b.status, (v, d, a.detail, b.detail)
            if a.status is SolveStatus.OPTIMAL:
                assert a.primal_obj == pytest.approx(b.primal_obj, abs=1e-5)

    def test_p2_unbounded_agreement(self, parabola_shadow, epigraph):
        v = np.array([0.0, 0.0])
        d = np.array([0.0, 1.0])
        assert solve_P2_shadow(parabola_shadow, v, d).status is SolveStatus.UNBOUNDED
        assert solve_P2(epigraph, v, d).status is SolveStatus.UNBOUNDED

    def test_d2_halfspace_agreement(self, parabola_shadow, epigraph):
        v = np.array([0.0, 1.0])
        d = np.array([1.0, 0.0])
        a = solve_D2_shadow(parabola_shadow, v, d)
        b = solve_D2(epigraph, v, d)
        assert a.status is SolveStatus.OPTIMAL
        assert b.status is SolveStatus.OPTIMAL
        assert np.allclose(a.dual_vector, b.dual_vector, atol=1e-5)
        assert a.certificate["halfspace_offset"] == pytest.approx(
            b.certificate["halfspace_offset"], abs=1e-5
        )


class TestRandomDuality:
    """Randomized strong-duality and supporting-halfspace battery."""

    def test_battery(self):
        rng = np.random.default_rng(42)
        optimal_pairs = 0
        for _ in range(12):
            mats = []
            for _ in range(2):
                raw = rng.standard_normal((3, 3))
                mats.append((raw + raw.T) / 2.0)
            C = Spectrahedron(
                pencil=MatrixPencil(mats), constant=SymMatrix.identity(3)
            )
            d = rng.standard_normal(2)
            d = d / np.linalg.norm(d)
            v = np.zeros(2)
            p2 = solve_P2(C, v, d)
            d2 = solve_D2(C, v, d)
            if p2.status is SolveStatus.UNBOUNDED:
                assert d2.status is SolveStatus.INFEASIBLE
                continue
            assert p2.status is SolveStatus.OPTIMAL, p2.detail
            assert d2.status is SolveStatus.OPTIMAL, d2.detail
            optimal_pairs += 1
            t_star = p2.primal_obj
            assert d2.primal_obj == pytest.approx(t_star, abs=1e-5 * (1 + abs(t_star)))
            w = d2.dual_vector
            gamma = d2.certificate["halfspace_offset"]
            assert w @ d == pytest.approx(1.0, abs=1e-7)
            # supporting property: contains samples, tight at the optimizer
            x_star = p2.certificate["x"]
            assert w @ x_star == pytest.approx(gamma, abs=1e-5 * (1 + abs(gamma)))
            pts = sample_feasible(C, np.random.default_rng(3), count=30)
            for x in pts:
                assert w @ x <= gamma + 1e-6
        assert optimal_pairs >= 6


class TestRecording:
    def test_d2_log_collects(self, disk):
        with record_d2_solutions() as log:
            solve_D2(disk, np.zeros(2), np.array([1.0, 0.0]))
            solve_D2(disk, np.zeros(2), np.array([0.0, 1.0]))
        assert len(log) == 2
        rec = log[0]
        assert np.allclose(rec.normal, [1.0, 0.0], atol=1e-6)
        assert rec.offset == pytest.approx(1.0, abs=1e-6)
        assert is_psd(rec.matrix, tol=1e-7)
        assert np.allclose(rec.direction, [1.0, 0.0])

    def test_nested_and_disabled(self, disk):
        with record_d2_solutions() as outer:
            solve_D2(disk, np.zeros(2), np.array([1.0, 0.0]))
            with record_d2_solutions() as inner:
                solve_D2(disk, np.zeros(2), np.array([0.0, 1.0]))
            assert len(inner) == 1
        assert len(outer) == 1
        # outside any context nothing is recorded and nothing breaks
        sol = solve_D2(disk, np.zeros(2), np.array([1.0, 0.0]))
        assert sol.status is SolveStatus.OPTIMAL

    def test_failed_solves_not_recorded(self, orthant_diag):
        with record_d2_solutions() as log:
            solve_D2(orthant_diag, np.array([1.0, 1.0]), np.array([1.0, 1.0]))
        assert log == []
