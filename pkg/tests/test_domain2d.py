import numpy as np
import pytest

from ougap import domain2d, model1d
from ougap.domain2d import (ConvexPolygon, Ellipse, Rectangle, check_gap_bound, diameter, disk,
                            fd_solve, masked_grid, regular_polygon, separable_rectangle,
                            thin_rectangle_experiment)
from ougap.errors import DomainError, ExperimentSetupError, ResolutionError

SQ_L1 = 2 * 9.877771
SQ_L2 = 9.877771 + 39.496084


class TestGeometry:
    def test_rectangle_diameter(self):
        assert diameter(Rectangle(3, 4)) == pytest.approx(5.0)

    def test_ellipse_diameter(self):
        assert diameter(Ellipse(2, 1)) == 4.0

    def test_hexagon_diameter(self):
        assert diameter(regular_polygon(6, 1.0)) == pytest.approx(2.0, abs=1e-14)

    def test_pentagon_diameter_brute_force(self):
        p = regular_polygon(5, 1.0)
        v = p.vertices
        brute = max(np.hypot(*(a - b)) for a in v for b in v)
        assert diameter(p) == pytest.approx(brute, abs=1e-14)

    def test_random_polygon_diameter_brute_force(self):
        from scipy.spatial import ConvexHull
        rng = np.random.default_rng(3)
        pts = rng.standard_normal((40, 2))
        hull = pts[ConvexHull(pts).vertices]
        brute = max(np.hypot(*(a - b)) for a in hull for b in hull)
        assert diameter(ConvexPolygon(hull)) == pytest.approx(brute, abs=1e-12)

    def test_clockwise_polygon_accepted(self):
        sq = [(-1, -1), (-1, 1), (1, 1), (1, -1)]
        assert diameter(ConvexPolygon(sq)) == pytest.approx(2 * np.sqrt(2))

    @pytest.mark.parametrize("verts", [
        [(0, 0), (1, 0)],
        [(0, 0), (1, 0), (2, 0), (1, 1)],            # collinear edge
        [(0, 0), (2, 0), (1, 0.2), (1, 2)],          # reflex vertex
    ])
    def test_bad_polygons(self, verts):
        with pytest.raises(DomainError):
            ConvexPolygon(verts)

    @pytest.mark.parametrize("ctor", [lambda: Rectangle(0, 1), lambda: Ellipse(1, -2)])
    def test_nonpositive_lengths(self, ctor):
        with pytest.raises(DomainError):
            ctor()

    def test_masked_grid_strictly_inside(self):
        for dom in (disk(1.0), Ellipse(2, 1), regular_polygon(5), Rectangle(1, 1)):
            g = masked_grid(dom, 1 / 16)
            assert np.all(dom.inside(g.points[:, 0], g.points[:, 1]))

    def test_masked_grid_symmetric_for_square(self):
        g = masked_grid(Rectangle(1, 1), 1 / 32)
        pts = {tuple(np.round(p, 12)) for p in g.points}
        assert all((round(-x, 12) + 0.0, y) in pts for x, y in pts)

    def test_strict_convexity_flags(self):
        assert Ellipse(1, 1).strictly_convex
        assert not Rectangle(1, 1).strictly_convex
        assert not regular_polygon(5).strictly_convex


class TestFiniteDifference:
    def test_unit_square(self):
        s = fd_solve(Rectangle(1, 1), 1 / 128)
        assert s.lambda1 == pytest.approx(SQ_L1, rel=1e-2)
        assert s.lambda2 == pytest.approx(SQ_L2, rel=1e-2)

    def test_unit_square_no_potential(self):
        s = fd_solve(Rectangle(1, 1), 1 / 128, potential=False)
        assert s.lambda1 == pytest.approx(2 * np.pi**2, rel=1e-2)

    def test_second_order_convergence(self):
        l = [fd_solve(Rectangle(1, 1), h, k=2).lambda1 for h in (1 / 32, 1 / 64, 1 / 128)]
        ratio = (l[1] - l[0]) / (l[2] - l[1])
        assert 3.5 <= ratio <= 4.5

    @pytest.mark.slow
    def test_disk_second_eigenvalue_degenerate(self):
        s = fd_solve(disk(1.0), 1 / 96, k=3)
        l2, l3 = s.eigenvalues[1], s.eigenvalues[2]
        # the discretization splits the pair only by staircase error
        assert abs(l3 - l2) <= 2e-2 * l2
        assert s.lambda2 == min(l2, l3)

    def test_resolution_error(self):
        with pytest.raises(ResolutionError):
            fd_solve(Rectangle(1, 1), 1 / 8)

    def test_bad_k(self):
        with pytest.raises(ValueError):
            fd_solve(Rectangle(1, 1), 1 / 32, k=1)

    def test_ou_shift(self):
        s = fd_solve(Rectangle(1, 1), 1 / 32)
        assert s.ou_eigenvalues[0] == pytest.approx(s.lambda1 - 1.0)

    @pytest.mark.parametrize("w,h", [(1.0, 1.0), (1.5, 1.0)])
    def test_fd_agrees_with_separable_within_estimate(self, w, h):
        a, b = fd_solve(Rectangle(w, h), 1 / 32), fd_solve(Rectangle(w, h), 1 / 64)
        exact = separable_rectangle(w, h, 64)
        for i in range(2):
            est = domain2d.richardson_estimate(a.eigenvalues[i], b.eigenvalues[i])
            assert abs(b.eigenvalues[i] - exact.eigenvalues[i]) <= est


class TestSeparable:
    def test_unit_square(self):
        s = separable_rectangle(1.0, 1.0, 64)
        assert s.lambda1 == pytest.approx(SQ_L1, abs=2e-5)
        # (2,1) and (1,2) give the same value
        assert s.eigenvalues[1] == pytest.approx(s.eigenvalues[2], abs=1e-12)

    def test_thin_strip_gap(self):
        s = separable_rectangle(1.0, 0.01, 64)
        assert s.gap == pytest.approx(29.618313, abs=1e-4)


class TestThinRectangle:
    def test_bracket_and_limit(self):
        gm = model1d.model_gap(2.0)
        out = thin_rectangle_experiment(2.0, [0.1, 0.05, 0.01])
        gaps = [g for _, g in out]
        for e, g in out:
            assert gm - 1e-9 <= g <= gm + e * e + 1e-5
        assert all(b <= a + 1e-9 for a, b in zip(gaps, gaps[1:]))
        assert 7.440203 - 1e-5 <= gaps[-1] <= 7.440203 + 1e-4 + 1e-5

    def test_precondition(self):
        with pytest.raises(ExperimentSetupError):
            thin_rectangle_experiment(2.0, [2.0])

    @pytest.mark.parametrize("eps", [[0.01, 0.1], [0.1, -0.01], []])
    def test_eps_validation(self, eps):
        with pytest.raises(ExperimentSetupError):
            thin_rectangle_experiment(2.0, eps)


class TestGapReport:
    def test_square_separable(self):
        rep = check_gap_bound(Rectangle(1, 1))
        assert rep.D == pytest.approx(np.sqrt(2))
        assert rep.method == "separable"
        assert rep.verdict == "pass" and rep.margin >= 0
        assert rep.convexity == "non-strict"

    def test_thin_rectangle_near_equality(self):
        rep = check_gap_bound(Rectangle(2.0, 0.02))
        assert rep.D == pytest.approx(np.hypot(2.0, 0.02))
        assert rep.margin >= -rep.discretization_error_estimate
        # near equality holds against the long side; the diagonal lowers the model gap slightly
        assert -1e-9 <= rep.gap_2d - model1d.model_gap(2.0) <= 1e-4 + 1e-5
        assert rep.margin <= 1e-4 + 1e-5 + model1d.model_gap(2.0) - rep.gap_model

    @pytest.mark.slow
    def test_disk_fd(self):
        rep = check_gap_bound(disk(1.0), 1 / 64)
        assert rep.gap_model == pytest.approx(7.440203, abs=1e-6)
        assert rep.margin > 0 and rep.verdict == "pass"
        assert rep.convexity == "strict"

    def test_report_dict(self):
        d = check_gap_bound(Rectangle(3, 4)).to_dict()
        assert d["domain"] == {"type": "rectangle", "w": 3, "h": 4}
        assert d["verdict"] == "pass"
        assert d["eigenvalues_ou"][0] == pytest.approx(d["eigenvalues_schrodinger"][0] - 1)

    def test_verdict_logic(self):
        rep = domain2d.GapReport(Rectangle(1, 1), 1.0, 1.0, 2.0, 0.5, "fd_masked", (1.0, 2.0), 0.1)
        assert rep.verdict == "fail"
        rep = domain2d.GapReport(Rectangle(1, 1), 1.0, 1.6, 2.0, 0.5, "fd_masked", (1.0, 2.0), 0.1)
        assert rep.verdict == "pass"

    def test_separable_requires_rectangle(self):
        with pytest.raises(ValueError):
            check_gap_bound(disk(1.0), method="separable")
