import math

import numpy as np
import pytest

from agp.geometry import Ball, Box, Product, WholeSpace
from agp.objective import (Regime, RegularizedObjective, SmoothnessData,
                           make_bilinear, make_nc_sc_sine, make_quadratic,
                           make_robust_svm_toy, make_sc_nc_sine,
                           random_quadratic, regularized_grads)


def finite_diff_grad(f, point, other, which):
    """Central differences of f along the chosen block."""
    sqeps = math.sqrt(np.finfo(float).eps)
    g = np.empty_like(point)
    for i in range(point.size):
        h = sqeps * (1.0 + abs(point[i]))
        hi, lo = point.copy(), point.copy()
        hi[i] += h
        lo[i] -= h
        if which == "x":
            g[i] = (f(hi, other) - f(lo, other)) / (2 * h)
        else:
            g[i] = (f(other, hi) - f(other, lo)) / (2 * h)
    return g


def zoo():
    rng = np.random.default_rng(11)
    feats = rng.standard_normal((6, 2))
    labels = np.where(feats[:, 0] > 0, 1.0, -1.0)
    svm = make_robust_svm_toy(
        list(zip(feats, labels)),
        Ball(np.zeros(3), 1.0),
        Product((Ball(np.zeros(2), 1.0), Box([-1.0], [1.0]))))
    sine = make_nc_sc_sine(3, 2, 0.4 * rng.standard_normal((3, 2)), 1.0,
                           Box(-np.ones(3), np.ones(3)), Box(-np.ones(2), np.ones(2)))
    sine_d = make_sc_nc_sine(2, 3, 0.4 * rng.standard_normal((2, 3)), 0.8,
                             Box(-np.ones(2), np.ones(2)), Box(-np.ones(3), np.ones(3)))
    return [
        random_quadratic(1, 3, 2, Regime.NC_SC),
        random_quadratic(2, 2, 3, Regime.NC_C),
        random_quadratic(3, 3, 2, Regime.SC_NC),
        random_quadratic(4, 2, 2, Regime.C_NC),
        make_bilinear([[1.0]], X=Box([-1], [1]), Y=Box([-1], [1])),
        sine, sine_d, svm,
    ]


class TestQuadratic:
    def test_one_dim_values(self):
        p = make_quadratic([[1.0]], [[1.0]], [[1.0]])
        x, y = np.array([1.0]), np.array([1.0])
        assert p.value(x, y) == pytest.approx(0.5 + 1 - 0.5)
        np.testing.assert_allclose(p.grad_x(x, y), [2.0])
        np.testing.assert_allclose(p.grad_y(x, y), [0.0])

    def test_tags_from_eigen_signs(self):
        p = make_quadratic([[-1.0]], [[1.0]], [[1.0]])
        assert p.tags == frozenset({Regime.NC_SC})
        assert p.constants.mu == pytest.approx(1.0)
        assert p.constants.theta == 0.0

    def test_constants_match_eigendecomposition_oracle(self):
        A = np.array([[2.0, 0.0], [0.0, 1.0]])
        C = np.array([[3.0, 0.0], [0.0, 1.0]])
        p = make_quadratic(A, np.zeros((2, 2)), C)
        # oracle: spectral norms via independent eigendecomposition
        assert p.constants.L_x == pytest.approx(max(abs(np.linalg.eigvalsh(A))))
        assert p.constants.L_y == pytest.approx(max(abs(np.linalg.eigvalsh(C))))
        assert p.constants.L_x == pytest.approx(2.0)
        assert p.constants.L_y == pytest.approx(3.0)
        assert p.constants.L_12 == 0.0
        assert p.constants.mu == pytest.approx(1.0)
        assert p.constants.theta == pytest.approx(1.0)

    def test_random_constants_match_oracle(self):
        rng = np.random.default_rng(5)
        M = rng.standard_normal((3, 3))
        A = M + M.T
        B = rng.standard_normal((3, 2))
        N = rng.standard_normal((2, 2))
        C = N @ N.T + 0.1 * np.eye(2)
        p = make_quadratic(A, B, C)
        assert p.constants.L_12 == pytest.approx(np.linalg.svd(B, compute_uv=False)[0])
        assert p.constants.mu == pytest.approx(min(np.linalg.eigvalsh(C)))

    def test_asymmetric_rejected(self):
        with pytest.raises(ValueError):
            make_quadratic([[1.0, 2.0], [0.0, 1.0]], np.zeros((2, 1)), [[1.0]])


class TestBilinear:
    def test_values(self):
        p = make_bilinear([[1.0]])
        assert p.value(np.array([2.0]), np.array([3.0])) == pytest.approx(6.0)
        np.testing.assert_allclose(p.grad_x(np.array([2.0]), np.array([3.0])), [3.0])
        np.testing.assert_allclose(p.grad_y(np.array([2.0]), np.array([3.0])), [2.0])

    def test_tags_and_constants(self):
        p = make_bilinear(np.eye(2))
        assert p.tags == frozenset({Regime.NC_C, Regime.C_NC})
        assert p.constants.L_x == 0.0 and p.constants.L_y == 0.0
        assert p.constants.L_12 == pytest.approx(1.0)

    def test_zero_matrix_rejected(self):
        with pytest.raises(ValueError):
            make_bilinear(np.zeros((2, 2)))

    def test_grid_scan_gap_oracle(self):
        # only (0, 0) has zero stationarity gap on [-1,1]^2
        from agp.solver import stationarity_gap
        p = make_bilinear([[1.0]], X=Box([-1], [1]), Y=Box([-1], [1]))
        grid = np.linspace(-1, 1, 201)
        best = min(((stationarity_gap(p, np.array([a]), np.array([b]), 1.0, 1.0).norm,
                     a, b) for a in grid for b in grid))
        assert best[0] == pytest.approx(0.0, abs=1e-14)
        assert (best[1], best[2]) == (0.0, 0.0)
        others = [stationarity_gap(p, np.array([a]), np.array([b]), 1.0, 1.0).norm
                  for a in grid for b in grid if (a, b) != (0.0, 0.0)]
        assert min(others) > 0


class TestSine:
    def test_gradients_at_origin(self):
        p = make_nc_sc_sine(1, 1, [[1.0]], 1.0, Box([-2], [2]), Box([-2], [2]))
        np.testing.assert_allclose(p.grad_x(np.zeros(1), np.zeros(1)), [1.0])
        np.testing.assert_allclose(p.grad_y(np.zeros(1), np.zeros(1)), [0.0])

    def test_inner_argmax_stationarity(self):
        B = np.array([[0.5, 0.2], [0.1, 0.4], [0.0, 0.3]])
        p = make_nc_sc_sine(3, 2, B, 2.0, Box(-np.ones(3), np.ones(3)),
                            Box(-5 * np.ones(2), 5 * np.ones(2)))
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.uniform(-1, 1, 3)
            ystar = B.T @ x / 2.0
            np.testing.assert_allclose(p.grad_y(x, ystar), np.zeros(2), atol=1e-14)

    def test_inner_max_matches_grid(self):
        # value of the inner max against a dense grid over a wide Y
        B = np.array([[0.7]])
        mu = 1.0
        p = make_nc_sc_sine(1, 1, B, mu, Box([-1], [1]), Box([-5], [5]))
        x = np.array([0.3])
        grid = np.linspace(-5, 5, 20001)
        grid_max = max(p.value(x, np.array([y])) for y in grid)
        closed_form = math.sin(0.3) + (0.7 * 0.3) ** 2 / (2 * mu)
        assert closed_form == pytest.approx(grid_max, abs=1e-6)

    def test_mu_positive_required(self):
        with pytest.raises(ValueError):
            make_nc_sc_sine(1, 1, [[1.0]], 0.0, Box([-1], [1]), Box([-1], [1]))


class TestRobustSvm:
    def setup_method(self):
        rng = np.random.default_rng(1)
        self.feats = rng.standard_normal((5, 2))
        self.labels = np.where(self.feats[:, 0] > 0, 1.0, -1.0)
        self.X = Ball(np.zeros(3), 1.0)
        self.Y = Product((Ball(np.zeros(2), 1.0), Box([-1.0], [1.0])))
        self.p = make_robust_svm_toy(list(zip(self.feats, self.labels)), self.X, self.Y)

    def test_zero_weights_kill_coupling(self):
        x = np.zeros(3)
        y = np.array([0.3, -0.2, 0.9])
        hinge_only = self.p.value(x, y)
        y2 = np.array([-0.5, 0.1, -0.4])
        assert hinge_only == pytest.approx(self.p.value(x, y2))

    def test_unit_alignment_gives_unit_coupling(self):
        p = make_robust_svm_toy([(np.array([10.0, 0.0]), 1.0)], self.X, self.Y)
        x = np.array([1.0, 0.0, 0.0])   # x_w = e1, x_b = 0
        y = np.array([1.0, 0.0, 1.0])   # y_u = e1, y_v = 1
        x0 = np.zeros(3)
        coupling = p.value(x, y) - p.value(x, np.array([1.0, 0.0, 0.0]) * 0)
        assert coupling == pytest.approx(1.0)

    def test_cross_hessian_bound_by_sampling(self):
        # finite-difference cross-derivative never exceeds the declared L_12
        rng = np.random.default_rng(2)
        L = self.p.constants.L_12
        h = 1e-5
        worst = 0.0
        for _ in range(1000):
            x = self.X.sample(rng)
            y = self.Y.sample(rng)
            d = rng.standard_normal(3)
            d /= np.linalg.norm(d)
            jac = (self.p.grad_y(x + h * d, y) - self.p.grad_y(x - h * d, y)) / (2 * h)
            worst = max(worst, np.linalg.norm(jac))
        assert worst <= L * (1 + 1e-6)

    def test_tag(self):
        assert self.p.tags == frozenset({Regime.C_NC})

    def test_empty_data_rejected(self):
        with pytest.raises(ValueError):
            make_robust_svm_toy([], self.X, self.Y)


class TestRegularized:
    def test_zero_coefficients_identity(self):
        p = make_bilinear([[1.0]])
        r = RegularizedObjective(p, 0.0, 0.0)
        x, y = np.array([2.0]), np.array([3.0])
        gx, gy = regularized_grads(r, x, y)
        np.testing.assert_array_equal(gx, p.grad_x(x, y))
        np.testing.assert_array_equal(gy, p.grad_y(x, y))

    def test_b_shift(self):
        p = make_bilinear([[1.0]])
        r = RegularizedObjective(p, b=0.5, c=0.0)
        gx, gy = regularized_grads(r, np.array([2.0]), np.array([3.0]))
        np.testing.assert_allclose(gx, [4.0])
        np.testing.assert_allclose(gy, [2.0])

    def test_c_shift(self):
        p = make_quadratic(np.zeros((2, 2)), np.eye(2), np.zeros((2, 2)),
                           a=np.array([1.0, 1.0]))
        # base grad_y at x=(1,1)... choose x so base grad_y = (1, 1)
        r = RegularizedObjective(p, b=0.0, c=0.25)
        x = np.array([1.0, 1.0])
        y = np.array([4.0, 0.0])
        gy = r.grad_y(x, y)
        np.testing.assert_allclose(gy, [0.0, 1.0])

    def test_value_formula(self):
        p = make_bilinear([[1.0]])
        r = RegularizedObjective(p, b=0.5, c=0.2)
        x, y = np.array([2.0]), np.array([3.0])
        assert r.value(x, y) == pytest.approx(6.0 + 0.25 * 4 - 0.1 * 9)


class TestZooProperties:
    @pytest.mark.parametrize("idx", range(8))
    def test_gradient_consistency(self, idx):
        p = zoo()[idx]
        rng = np.random.default_rng(idx + 100)
        for _ in range(30):
            x = p.X.sample(rng)
            y = p.Y.sample(rng)
            fdx = finite_diff_grad(p.value, x, y, "x")
            fdy = finite_diff_grad(p.value, y, x, "y")
            for fd, g in ((fdx, p.grad_x(x, y)), (fdy, p.grad_y(x, y))):
                assert np.linalg.norm(fd - g) <= 1e-6 * max(1.0, np.linalg.norm(g))

    def test_lipschitz_certificates_quadratic(self):
        p = random_quadratic(9, 3, 2, Regime.NC_SC)
        d = p.constants
        rng = np.random.default_rng(7)
        for _ in range(10000):
            x1, x2 = rng.standard_normal((2, 3))
            y1, y2 = rng.standard_normal((2, 2))
            y = rng.standard_normal(2)
            x = rng.standard_normal(3)
            assert (np.linalg.norm(p.grad_x(x1, y) - p.grad_x(x2, y))
                    <= d.L_x * np.linalg.norm(x1 - x2) * (1 + 1e-9))
            assert (np.linalg.norm(p.grad_y(x, y1) - p.grad_y(x, y2))
                    <= d.L_y * np.linalg.norm(y1 - y2) * (1 + 1e-9))
            assert (np.linalg.norm(p.grad_y(x1, y) - p.grad_y(x2, y))
                    <= d.L_12 * np.linalg.norm(x1 - x2) * (1 + 1e-9))
            assert (np.linalg.norm(p.grad_x(x, y1) - p.grad_x(x, y2))
                    <= d.L_21 * np.linalg.norm(y1 - y2) * (1 + 1e-9))

    def test_strong_concavity_inequality(self):
        for p in (random_quadratic(12, 2, 3, Regime.NC_SC),
                  zoo()[5]):  # sine instance
            mu = p.constants.mu
            assert mu > 0
            rng = np.random.default_rng(13)
            for _ in range(1000):
                x = p.X.sample(rng)
                y1 = p.Y.sample(rng)
                y2 = p.Y.sample(rng)
                lhs = float((p.grad_y(x, y1) - p.grad_y(x, y2)) @ (y1 - y2))
                assert lhs <= -mu * np.linalg.norm(y1 - y2) ** 2 + 1e-9

    def test_smoothness_data_validation(self):
        with pytest.raises(ValueError):
            SmoothnessData(L_x=1, L_y=1, L_12=0, L_21=0, mu=2.0)
        with pytest.raises(ValueError):
            SmoothnessData(L_x=-1, L_y=1, L_12=0, L_21=0)

    def test_requested_regime_tag_present(self):
        for regime in Regime:
            p = random_quadratic(21, 3, 3, regime)
            assert regime in p.tags
