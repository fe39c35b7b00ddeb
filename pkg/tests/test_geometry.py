import math

import numpy as np
import pytest

from agp.geometry import (Ball, Box, Product, Simplex, UNBOUNDED, WholeSpace,
                          contains, diameter, is_unbounded, max_norm, parse_set,
                          project, sample_point)


def simplex_project_bisection(v, scale):
    """Independent oracle: bisect on tau with sum(max(v - tau, 0)) = scale."""
    lo = float(np.min(v)) - scale - 1.0
    hi = float(np.max(v))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.sum(np.maximum(v - mid, 0.0)) > scale:
            lo = mid
        else:
            hi = mid
    return np.maximum(v - 0.5 * (lo + hi), 0.0)


def all_variants(dim):
    rng = np.random.default_rng(dim)
    return [
        Box(-rng.uniform(0.5, 2, dim), rng.uniform(0.5, 2, dim)),
        Ball(rng.standard_normal(dim), rng.uniform(0.5, 2)),
        Simplex(dim, scale=rng.uniform(0.5, 2)),
    ]


class TestProject:
    def test_box_clamp(self):
        s = Box([0, 0], [1, 1])
        np.testing.assert_allclose(project(s, [-0.5, 2.0]), [0.0, 1.0])

    def test_whole_space_identity(self):
        s = WholeSpace(2)
        np.testing.assert_allclose(project(s, [3.1, -4.2]), [3.1, -4.2])

    def test_simplex_sort_threshold(self):
        s = Simplex(3, scale=1.0)
        got = project(s, [2.0, 0.5, 0.5])
        want = simplex_project_bisection(np.array([2.0, 0.5, 0.5]), 1.0)
        np.testing.assert_allclose(got, [1.0, 0.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(got, want, atol=1e-10)

    def test_ball_radial_scaling(self):
        s = Ball([0.0, 0.0], 1.0)
        np.testing.assert_allclose(project(s, [3.0, 4.0]), [0.6, 0.8])

    def test_ball_center_degenerate(self):
        s = Ball([1.0, 2.0], 0.5)
        np.testing.assert_allclose(project(s, [1.0, 2.0]), [1.0, 2.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            project(Box([0], [1]), [1.0, 2.0])

    def test_simplex_matches_bisection_oracle_dims_to_10(self):
        rng = np.random.default_rng(42)
        for dim in range(1, 11):
            s = Simplex(dim, scale=1.0)
            for _ in range(50):
                v = 3 * rng.standard_normal(dim)
                np.testing.assert_allclose(
                    project(s, v), simplex_project_bisection(v, 1.0), atol=1e-10)

    def test_product_blockwise(self):
        s = Product((Ball([0.0], 1.0), Box([0.0], [1.0])))
        np.testing.assert_allclose(project(s, [5.0, -3.0]), [1.0, 0.0])


class TestProjectionProperties:
    @pytest.mark.parametrize("dim", [2, 5, 10])
    def test_nonexpansive_idempotent_optimal(self, dim):
        rng = np.random.default_rng(dim * 7 + 1)
        for s in all_variants(dim):
            for _ in range(350):
                v = 4 * rng.standard_normal(dim)
                w = 4 * rng.standard_normal(dim)
                pv, pw = project(s, v), project(s, w)
                assert np.linalg.norm(pv - pw) <= np.linalg.norm(v - w) + 1e-10
                np.testing.assert_allclose(project(s, pv), pv, atol=1e-12)
                assert contains(s, pv, tol=1e-12)
                u = sample_point(s, rng)
                assert np.linalg.norm(pv - v) <= np.linalg.norm(u - v) + 1e-10


class TestContains:
    def test_box_inside(self):
        assert contains(Box([0, 0], [1, 1]), [0.5, 0.5], tol=0.0)

    def test_ball_within_tol(self):
        assert contains(Ball([0.0, 0.0], 1.0), [1.0 + 1e-9, 0.0], tol=1e-8)

    def test_simplex_sum_violation(self):
        assert not contains(Simplex(3, 1.0), [0.5, 0.5, 0.5], tol=1e-8)

    def test_negative_tol_rejected(self):
        with pytest.raises(ValueError):
            contains(Box([0], [1]), [0.5], tol=-1.0)


class TestSizes:
    def test_box_diameter(self):
        assert diameter(Box([0, 0], [1, 1])) == pytest.approx(math.sqrt(2))

    def test_ball_diameter(self):
        assert diameter(Ball([3.0, 1.0], 0.7)) == pytest.approx(1.4)

    def test_simplex_diameter_vertex_pairs(self):
        # oracle: max pairwise distance over the scaled vertices
        scale = 1.0
        verts = [scale * np.eye(3)[i] for i in range(3)]
        want = max(np.linalg.norm(a - b) for a in verts for b in verts)
        assert diameter(Simplex(3, scale)) == pytest.approx(want)
        assert want == pytest.approx(math.sqrt(2))

    def test_whole_space_unbounded_marker(self):
        assert is_unbounded(diameter(WholeSpace(3)))
        assert is_unbounded(max_norm(WholeSpace(3)))
        assert diameter(WholeSpace(3)) is UNBOUNDED

    def test_box_max_norm(self):
        assert max_norm(Box([-1, -1], [1, 1])) == pytest.approx(math.sqrt(2))

    def test_ball_max_norm(self):
        assert max_norm(Ball([0.0, 0.0], 2.0)) == pytest.approx(2.0)

    def test_asymmetric_box_max_norm_corner_enumeration(self):
        s = Box([1, -2], [3, 0])
        corners = [np.array([a, b]) for a in (1, 3) for b in (-2, 0)]
        want = max(np.linalg.norm(c) for c in corners)
        assert max_norm(s) == pytest.approx(want)
        assert want == pytest.approx(math.sqrt(13))

    def test_simplex_max_norm(self):
        assert max_norm(Simplex(4, scale=2.5)) == pytest.approx(2.5)

    def test_product_sizes(self):
        s = Product((Ball([0.0], 1.0), Box([-1.0], [1.0])))
        assert diameter(s) == pytest.approx(math.hypot(2.0, 2.0))
        assert max_norm(s) == pytest.approx(math.hypot(1.0, 1.0))


class TestValidation:
    def test_box_requires_ordered_bounds(self):
        with pytest.raises(ValueError):
            Box([1.0], [0.0])

    def test_ball_requires_positive_radius(self):
        with pytest.raises(ValueError):
            Ball([0.0], 0.0)

    def test_simplex_requires_positive_scale(self):
        with pytest.raises(ValueError):
            Simplex(3, scale=-1.0)


class TestSerialization:
    @pytest.mark.parametrize("s", [
        WholeSpace(3),
        Box([0.0, -1.5], [1.0, 2.25]),
        Ball([0.5, 0.5], 1.25),
        Simplex(4, scale=2.0),
        Product((Ball([0.0, 0.0], 1.0), Box([-1.0], [1.0]))),
    ])
    def test_round_trip(self, s):
        t = parse_set(s.descriptor())
        assert type(t) is type(s)
        assert t.descriptor() == s.descriptor()
        rng = np.random.default_rng(0)
        for _ in range(10):
            v = rng.standard_normal(s.dim)
            np.testing.assert_array_equal(project(s, v), project(t, v))

    def test_sample_lands_inside(self):
        rng = np.random.default_rng(3)
        for dim in (1, 2, 6):
            for s in all_variants(dim):
                for _ in range(100):
                    assert contains(s, sample_point(s, rng), tol=1e-9)
