import math

import numpy as np
import pytest

from ballkit import (
    ConvergenceError,
    DomainError,
    PointSet,
    ball_intrinsic_volume,
)
from ballkit.arcgon import measures, point_distance, r_dual, support as support2d
from ballkit.ballbody import (
    BallBodySpec,
    McConfig,
    boundary_samples,
    contains,
    default_epsilons,
    distance_to,
    mean_width_v1,
    project,
    ray_exit,
    steiner_fit,
    support_value,
)


def pset(*pts):
    return PointSet.from_points(np.array(pts, dtype=float))


def lens_body(delta=1.0, r=1.0):
    return BallBodySpec(pset((-delta / 2, 0), (delta / 2, 0)), r)


def ball_body(d, R, center=None):
    c = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    return BallBodySpec(PointSet(d, c.reshape(1, -1)), R)


class TestContains:
    def test_single_center(self):
        B = ball_body(3, 1.0)
        assert contains(B, np.zeros(3))
        assert contains(B, [1.0, 0.0, 0.0])
        assert not contains(B, [1.0 + 1e-12, 0.0, 0.0])

    def test_tangency_midpoint(self):
        B = BallBodySpec(pset((0, 0), (2, 0)), 1.0)
        assert contains(B, (1.0, 0.0))
        assert not contains(B, (1.0 + 1e-9, 0.0))

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            contains(ball_body(3, 1.0), (0.0, 0.0))


class TestProject:
    def test_member_fixed(self):
        B = lens_body()
        x = np.array([0.1, 0.2])
        assert np.array_equal(project(B, x), x)

    def test_single_ball_radial_clamp(self):
        B = ball_body(3, 2.0, center=[1.0, 0.0, 0.0])
        x = np.array([5.0, 0.0, 0.0])
        assert project(B, x) == pytest.approx([3.0, 0.0, 0.0], abs=1e-9)

    def test_lens_vertex_against_exact_2d(self):
        tol = 1e-8
        B = lens_body(1.0, 1.0)
        vertex = np.array([0.0, math.sqrt(3) / 2])
        x = np.array([0.0, 2.0])
        p = project(B, x, tol=tol)
        assert np.linalg.norm(p - vertex) <= 10 * tol

    def test_empty_body_rejected(self):
        B = BallBodySpec(pset((0, 0), (3, 0)), 1.0)
        with pytest.raises(DomainError):
            project(B, (0.0, 0.0))


class TestDistance:
    def test_single_ball_closed_form(self):
        B = ball_body(4, 1.5)
        rng = np.random.default_rng(0)
        for _ in range(10):
            x = rng.uniform(-3, 3, size=4)
            expected = max(0.0, float(np.linalg.norm(x)) - 1.5)
            assert distance_to(B, x) == pytest.approx(expected, abs=1e-7)

    def test_member_distance_zero(self):
        B = lens_body()
        assert distance_to(B, (0.0, 0.0)) == 0.0

    def test_lens_against_exact_2d(self):
        tol = 1e-8
        B = lens_body(1.0, 1.0)
        K = r_dual(B.centers, 1.0)
        rng = np.random.default_rng(1)
        for _ in range(25):
            x = rng.uniform(-2, 2, size=2)
            d_nd = distance_to(B, x, tol=tol)
            d_2d = point_distance(K, x)
            assert abs(d_nd - d_2d) <= 10 * tol


class TestRayExit:
    def test_single_ball(self):
        B = ball_body(3, 1.0)
        t = ray_exit(B, np.zeros(3), np.array([1.0, 0.0, 0.0]))
        assert t == pytest.approx(1.0, abs=1e-12)

    def test_offset_origin(self):
        B = ball_body(2, 1.0)
        t = ray_exit(B, np.array([0.5, 0.0]), np.array([1.0, 0.0]))
        assert t == pytest.approx(0.5, abs=1e-12)

    def test_exit_points_on_boundary(self):
        B = lens_body(1.0, 1.0)
        pts = boundary_samples(B, 200, seed=3)
        dist = np.linalg.norm(pts[:, None, :] - B.centers.points[None, :, :], axis=2)
        worst = np.abs(dist.max(axis=1) - B.radius).max()
        assert worst <= 1e-9

    def test_exterior_origin_rejected(self):
        B = ball_body(2, 1.0)
        with pytest.raises(DomainError):
            ray_exit(B, np.array([2.0, 0.0]), np.array([1.0, 0.0]))


class TestSupportValue:
    def test_single_ball(self):
        tol = 1e-8
        B = ball_body(3, 2.0, center=[1.0, -1.0, 0.0])
        u = np.array([0.0, 1.0, 0.0])
        assert abs(support_value(B, u, tol=tol) - (-1.0 + 2.0)) <= tol

    def test_2d_bodies_against_exact(self):
        tol = 1e-8
        rng = np.random.default_rng(7)
        for _ in range(5):
            pts = rng.uniform(-0.5, 0.5, size=(4, 2))
            B = BallBodySpec(PointSet(2, pts), 1.0)
            K = r_dual(B.centers, 1.0)
            for _ in range(4):
                th = rng.uniform(0, 2 * math.pi)
                u = np.array([math.cos(th), math.sin(th)])
                assert abs(support_value(B, u, tol=tol) - support2d(K, u)) <= 10 * tol

    def test_symmetric_two_ball_3d(self):
        # Support along the symmetry axis comes from the 2D cross-section.
        tol = 1e-8
        delta, r = 1.0, 1.0
        B = BallBodySpec(
            pset((-delta / 2, 0, 0), (delta / 2, 0, 0)), r
        )
        u = np.array([0.0, 0.0, 1.0])
        expected = math.sqrt(r * r - delta * delta / 4)
        assert abs(support_value(B, u, tol=tol) - expected) <= 10 * tol

    def test_non_unit_rejected(self):
        with pytest.raises(DomainError):
            support_value(lens_body(), (1.0, 1.0))


class TestSteinerFit:
    def test_ball_2d(self):
        R = 1.0
        B = ball_body(2, R)
        cfg = McConfig(samples=200_000, seed=11, epsilons=default_epsilons(2, R))
        V = steiner_fit(B, cfg)
        assert V[0] == 1.0
        for l in (1, 2):
            truth = ball_intrinsic_volume(2, l, R)
            assert abs(V[l] - truth) <= 3 * V.stderr[l]

    def test_ball_3d(self):
        R = 0.8
        B = ball_body(3, R)
        cfg = McConfig(samples=150_000, seed=13, epsilons=default_epsilons(3, R))
        V = steiner_fit(B, cfg)
        for l in (1, 2, 3):
            truth = ball_intrinsic_volume(3, l, R)
            assert abs(V[l] - truth) <= 3 * V.stderr[l]

    def test_lens_against_exact_2d(self):
        B = lens_body(1.0, 1.0)
        exact = measures(r_dual(B.centers, 1.0))
        cfg = McConfig(samples=150_000, seed=17, epsilons=default_epsilons(2, 1.0))
        V = steiner_fit(B, cfg)
        assert abs(V[1] - exact[1]) <= 3 * V.stderr[1]
        assert abs(V[2] - exact[2]) <= 3 * V.stderr[2]

    def test_empty_body_returns_zeros(self):
        B = BallBodySpec(pset((0, 0), (5, 0)), 1.0)
        cfg = McConfig(samples=1_000, seed=1, epsilons=default_epsilons(2, 1.0))
        V = steiner_fit(B, cfg)
        assert V[0] == 0.0 and np.all(V.values == 0.0)

    def test_deterministic_across_threads(self):
        B = lens_body(0.8, 1.0)
        cfg = McConfig(samples=64_000, seed=23, epsilons=default_epsilons(2, 1.0), chunk=8_192)
        V1 = steiner_fit(B, cfg, threads=1)
        V4 = steiner_fit(B, cfg, threads=4)
        assert np.array_equal(V1.values, V4.values)
        assert np.array_equal(V1.stderr, V4.stderr)

    def test_monotone_in_centers(self):
        rng = np.random.default_rng(29)
        pts = rng.uniform(-0.4, 0.4, size=(4, 2))
        small = BallBodySpec(PointSet(2, pts), 1.0)
        extra = np.vstack([pts, rng.uniform(-0.4, 0.4, size=(1, 2))])
        large = BallBodySpec(PointSet(2, extra), 1.0)
        cfg = McConfig(samples=80_000, seed=31, epsilons=default_epsilons(2, 1.0))
        Vs = steiner_fit(small, cfg)
        Vl = steiner_fit(large, cfg)
        for k in (1, 2):
            assert Vl[k] <= Vs[k] + 3 * (Vs.stderr[k] + Vl.stderr[k])

    def test_too_few_epsilons(self):
        with pytest.raises(DomainError):
            steiner_fit(
                lens_body(), McConfig(samples=1_000, seed=1, epsilons=(0.5, 1.0))
            )

    def test_config_validation(self):
        with pytest.raises(DomainError):
            McConfig(samples=10, seed=0, epsilons=(0.1, 0.2, 0.3))
        with pytest.raises(DomainError):
            McConfig(samples=2_000, seed=0, epsilons=(0.3, 0.2, 0.1))


class TestMeanWidth:
    def test_ball_3d(self):
        R = 1.2
        B = ball_body(3, R)
        est = mean_width_v1(B, 64, seed=3, tol=1e-8)
        assert est.value == pytest.approx(4 * R, abs=1e-6)

    def test_lens_2d_against_exact(self):
        B = lens_body(1.0, 1.0)
        exact = measures(r_dual(B.centers, 1.0))[1]
        est = mean_width_v1(B, 600, seed=5, tol=1e-7)
        assert abs(est.value - exact) <= 3 * est.stderr

    def test_point_body(self):
        B = BallBodySpec(pset((0, 0), (2, 0)), 1.0)
        est = mean_width_v1(B, 16, seed=1, tol=1e-4)
        assert est.value == pytest.approx(0.0, abs=1e-6)

    def test_agrees_with_steiner(self):
        rng = np.random.default_rng(37)
        pts = rng.uniform(-0.4, 0.4, size=(3, 3))
        B = BallBodySpec(PointSet(3, pts), 1.0)
        cfg = McConfig(samples=120_000, seed=41, epsilons=default_epsilons(3, 1.0))
        V = steiner_fit(B, cfg)
        mw = mean_width_v1(B, 400, seed=43, tol=1e-6)
        assert abs(V[1] - mw.value) <= 3 * (V.stderr[1] + mw.stderr)
