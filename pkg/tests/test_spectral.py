import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from ougap.errors import DomainError, InvalidOrderError
from ougap.model1d import solve_model
from ougap.spectral import (Interval, barycentric_eval, cheb_diff_matrix,
                            cheb_dirichlet_second_derivative, cheb_grid,
                            clenshaw_curtis_weights, sine_galerkin_operator,
                            sine_quadratic_moments, sine_quadratic_moments_quadrature)

UNIT = Interval(0.5)


class TestChebGrid:
    def test_order_8_endpoints_and_zero_node(self):
        g = cheb_grid(8, UNIT)
        assert g.full_nodes[0] == 0.5 and g.full_nodes[-1] == -0.5
        assert g.has_zero_node
        assert g.full_nodes[g.center_index] == 0.0

    def test_order_16_counts(self):
        g = cheb_grid(16, Interval(5.0))
        assert len(g.full_nodes) == 17
        assert len(g.interior_nodes) == 15
        assert np.all(np.abs(g.interior_nodes) < 5)
        assert np.all(np.diff(g.full_nodes) < 0)

    def test_endpoint_spacing_matches_cosine_formula(self):
        g = cheb_grid(64, UNIT)
        expected = 0.5 * (1 - np.cos(np.pi / 64))
        assert g.full_nodes[0] - g.full_nodes[1] == pytest.approx(expected, rel=1e-12)

    def test_odd_order_has_no_zero_node(self):
        g = cheb_grid(9, UNIT)
        assert not g.has_zero_node
        assert np.all(g.full_nodes != 0.0)

    @pytest.mark.parametrize("N", [0, 7, 7.5, -2])
    def test_invalid_order(self, N):
        with pytest.raises(InvalidOrderError):
            cheb_grid(N, UNIT)

    def test_interval_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            Interval(0.0)
        assert Interval.from_diameter(3.0).half_width == 1.5

    def test_nodes_exactly_symmetric(self):
        g = cheb_grid(64, Interval(3.7))
        assert np.array_equal(g.full_nodes, -g.full_nodes[::-1])


class TestSecondDerivative:
    def test_full_matrix_on_quadratic(self):
        g = cheb_grid(16, UNIT)
        Dm = cheb_diff_matrix(g)
        s = g.full_nodes
        np.testing.assert_allclose(Dm @ (Dm @ s**2), 2.0, atol=1e-10)

    def test_dirichlet_matrix_on_polynomial_vanishing_at_ends(self):
        g = cheb_grid(16, UNIT)
        s = g.interior_nodes
        op = cheb_dirichlet_second_derivative(g)
        # p = 1/4 - s^2 vanishes at +-1/2, so deleting boundary columns is harmless
        np.testing.assert_allclose(op.matrix @ (0.25 - s**2), -2.0, atol=1e-10)
        assert not op.symmetric
        assert op.shape == (15, 15)

    @pytest.mark.parametrize("k", range(0, 15))
    def test_exact_on_monomials(self, k):
        N = 16
        g = cheb_grid(N, UNIT)
        Dm = cheb_diff_matrix(g)
        s = g.full_nodes
        exact = k * (k - 1) * s ** max(k - 2, 0) if k >= 2 else np.zeros_like(s)
        np.testing.assert_allclose(Dm @ (Dm @ s**k), exact, atol=1e-10)

    @pytest.mark.parametrize("k", range(0, 13))
    def test_dirichlet_exact_on_bubble_monomials(self, k):
        # s^k (1/4 - s^2) has degree k + 2 <= N - 2 and zero boundary values
        N = 16
        g = cheb_grid(N, UNIT)
        s = g.interior_nodes
        p = s**k * (0.25 - s**2)
        pp = (k * (k - 1) * 0.25 * s ** max(k - 2, 0) if k >= 2 else 0.0) \
            - (k + 2) * (k + 1) * s**k
        np.testing.assert_allclose(cheb_dirichlet_second_derivative(g).matrix @ p, pp,
                                   atol=1e-10)

    def test_sine_mode(self):
        g = cheb_grid(32, UNIT)
        s = g.interior_nodes
        f = np.sin(np.pi * (s + 0.5))
        np.testing.assert_allclose(cheb_dirichlet_second_derivative(g).matrix @ f,
                                   -np.pi**2 * f, atol=1e-9)

    def test_smallest_eigenvalue_is_pi_squared(self):
        g = cheb_grid(32, UNIT)
        w = np.linalg.eigvals(-cheb_dirichlet_second_derivative(g).matrix)
        assert np.min(np.abs(w)) == pytest.approx(np.pi**2, abs=1e-8)


class TestClenshawCurtis:
    @pytest.mark.parametrize("N", [8, 9, 16, 33])
    def test_exact_on_polynomials(self, N):
        g = cheb_grid(N, Interval(1.3))
        w = clenshaw_curtis_weights(g)
        s = g.full_nodes
        for k in range(N + 1):
            exact = 0.0 if k % 2 else 2 * 1.3 ** (k + 1) / (k + 1)
            assert w @ s**k == pytest.approx(exact, abs=1e-12 * 1.3 ** (k + 1))


class TestSineGalerkin:
    def test_p11_closed_form_against_quad(self):
        P = sine_quadratic_moments(4)
        val, _ = quad(lambda s: s * s * 2 * np.sin(np.pi * (s + 0.5)) ** 2, -0.5, 0.5,
                      epsabs=1e-15, epsrel=1e-15)
        assert P[0, 0] == pytest.approx(1 / 12 - 1 / (2 * np.pi**2), abs=1e-15)
        assert P[0, 0] == pytest.approx(val, abs=1e-14)

    def test_closed_form_matches_gauss_legendre(self):
        np.testing.assert_allclose(sine_quadratic_moments(64),
                                   sine_quadratic_moments_quadrature(64), atol=1e-13)

    @pytest.mark.parametrize("j,k", [(1, 2), (2, 4), (3, 7), (5, 5)])
    def test_entries_against_adaptive_quad(self, j, k):
        f = lambda s: s * s * 2 * np.sin(j * np.pi * (s + .5)) * np.sin(k * np.pi * (s + .5))
        val, _ = quad(f, -0.5, 0.5, epsabs=1e-15, limit=200)
        assert sine_quadratic_moments(8)[j - 1, k - 1] == pytest.approx(val, abs=1e-13)

    def test_zero_potential_is_diagonal(self):
        op = sine_galerkin_operator(8, 0.0)
        np.testing.assert_allclose(op.matrix, np.diag((np.arange(1, 9) * np.pi) ** 2))
        assert op.symmetric

    def test_quadrature_method_agrees(self):
        a = sine_galerkin_operator(16, 3.0).matrix
        b = sine_galerkin_operator(16, 3.0, method="quadrature").matrix
        np.testing.assert_allclose(a, b, atol=1e-12)

    def test_table_row_one(self):
        w = np.linalg.eigvalsh(sine_galerkin_operator(64, 0.25).matrix)
        assert w[0] == pytest.approx(9.877771, abs=1e-5)

    def test_rejects_other_intervals(self):
        with pytest.raises(DomainError):
            sine_galerkin_operator(8, 1.0, Interval(1.0))


class TestBarycentric:
    def test_exact_at_nodes(self):
        g = cheb_grid(16, UNIT)
        vals = np.cos(3 * g.full_nodes)
        for i in (0, 3, 8, 16):
            assert barycentric_eval(g, vals, g.full_nodes[i]) == vals[i]

    def test_reproduces_cubic(self):
        g = cheb_grid(16, UNIT)
        assert barycentric_eval(g, g.full_nodes**3, 0.123) == pytest.approx(0.123**3, abs=1e-13)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(-0.5, 0.5), st.lists(st.floats(-3, 3), min_size=4, max_size=4))
    def test_reproduces_low_degree_polynomials(self, s, coef):
        g = cheb_grid(12, UNIT)
        p = np.polynomial.Polynomial(coef)
        assert barycentric_eval(g, p(g.full_nodes), s) == pytest.approx(p(s), abs=1e-12)

    def test_vectorized(self):
        g = cheb_grid(16, UNIT)
        s = np.linspace(-0.5, 0.5, 7)
        np.testing.assert_allclose(barycentric_eval(g, g.full_nodes**2, s), s**2, atol=1e-14)

    def test_outside_raises(self):
        g = cheb_grid(16, UNIT)
        with pytest.raises(DomainError):
            barycentric_eval(g, np.zeros(17), 0.5000001)

    def test_eigenfunction_self_convergence(self):
        a = solve_model(2.0, "schrodinger", 64)
        b = solve_model(2.0, "schrodinger", 128)
        for s in (0.0, 0.123, -0.77):
            assert barycentric_eval(a.grid, a.phi1, s) == pytest.approx(
                barycentric_eval(b.grid, b.phi1, s), abs=1e-9)
