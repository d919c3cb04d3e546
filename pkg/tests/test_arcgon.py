import math

import numpy as np
import pytest

from ballkit import Ball, DomainError, PointSet, min_enclosing_ball
from ballkit.arcgon import (
    Arc,
    ArcGon,
    arcgon_from_obj,
    arcgon_to_obj,
    boundary_points,
    contains,
    disk_intersection,
    farthest_distance,
    hausdorff_distance,
    measures,
    point_distance,
    r_dual,
    r_hull,
    s_dual,
    support,
    support_identity_deviation,
)
from oracles import (
    circle_points,
    disk_intersection_area_mc,
    lens_area,
    lens_perimeter,
    spindle_measures_by_quadrature,
)

TAU = 2 * math.pi


def pset(*pts):
    return PointSet.from_points(np.array(pts, dtype=float))


def random_config(rng, n=None, spread=0.75, r=1.0):
    n = n or rng.integers(2, 11)
    while True:
        pts = rng.uniform(-spread * r / math.sqrt(2), spread * r / math.sqrt(2), size=(int(n), 2))
        S = PointSet.from_points(pts)
        cr = min_enclosing_ball(S).radius
        if 0.05 * r < cr <= 0.98 * r:
            return S


def make_lens(delta, r):
    return disk_intersection(pset((0, 0), (delta, 0)), [r, r])


class TestDiskIntersection:
    def test_single_disk(self):
        K = disk_intersection(pset((1, 2)), [0.5])
        assert K.kind == "disk"
        assert K.disk.radius == 0.5
        assert np.allclose(K.disk.center, [1, 2])

    def test_tangent_pair_snaps_to_point(self):
        r = 1.3
        K = disk_intersection(pset((0, 0), (2 * r, 0)), [r, r])
        assert K.kind == "point"
        assert np.allclose(K.point, [r, 0], atol=1e-9)

    def test_disjoint_pair_empty(self):
        K = disk_intersection(pset((0, 0), (3, 0)), [1, 1])
        assert K.kind == "empty"

    @pytest.mark.parametrize("delta,r", [(0.5, 1.0), (1.4, 1.0), (1.94, 1.0), (2.0, 3.0)])
    def test_lens_against_closed_form(self, delta, r):
        K = make_lens(delta, r)
        assert K.kind == "chain" and len(K.arcs) == 2
        V = measures(K)
        assert V[1] == pytest.approx(lens_perimeter(delta, r) / 2, rel=1e-12)
        assert V[2] == pytest.approx(lens_area(delta, r), rel=1e-12)

    def test_mixed_radii_lens(self):
        # Area oracle: plain hit-or-miss on the raw membership predicate.
        centers = np.array([[0.0, 0.0], [1.0, 0.3]])
        radii = np.array([1.0, 0.8])
        K = disk_intersection(PointSet(2, centers), radii)
        assert K.kind == "chain"
        est, se = disk_intersection_area_mc(centers, radii, 2_000_000, seed=42)
        assert measures(K)[2] == pytest.approx(est, abs=4 * se)

    def test_contained_disk_wins(self):
        K = disk_intersection(pset((0, 0), (0.1, 0)), [0.3, 5.0])
        assert K.kind == "disk"
        assert K.disk.radius == pytest.approx(0.3)

    def test_duplicates_collapse(self):
        K = disk_intersection(pset((0, 0), (0, 0), (2, 0)), [1.5, 1.5, 1.5])
        assert K.kind == "chain"

    def test_triple_with_common_point_only(self):
        # Three unit circles through the origin: circumradius equals r.
        t = np.array([0.0, TAU / 3, 2 * TAU / 3])
        centers = np.stack([np.cos(t), np.sin(t)], axis=1)
        K = disk_intersection(PointSet(2, centers), [1.0, 1.0, 1.0])
        assert K.kind == "point"
        assert np.allclose(K.point, [0, 0], atol=1e-8)

    def test_mismatched_lengths(self):
        with pytest.raises(DomainError):
            disk_intersection(pset((0, 0), (1, 0)), [1.0])

    def test_nonpositive_radius(self):
        with pytest.raises(DomainError):
            disk_intersection(pset((0, 0)), [0.0])

    def test_redundant_disk_dropped(self):
        K = disk_intersection(pset((0, 0), (1, 0), (0.5, 20)), [1, 1, 25])
        assert K.kind == "chain" and len(K.arcs) == 2

    def test_chain_is_convex_and_closed(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            A = random_config(rng)
            K = r_dual(A, 1.0)
            if K.kind != "chain":
                continue
            starts = [a.a0 for a in K.arcs]
            assert all(s2 > s1 for s1, s2 in zip(starts, starts[1:]))
            max_r = K.max_radius()
            for k, a in enumerate(K.arcs):
                nxt = K.arcs[(k + 1) % len(K.arcs)]
                gap = np.linalg.norm(a.end_point - nxt.start_point)
                assert gap <= 1e-9 * max_r
                # Every vertex lies on its two adjacent circles.
                v = nxt.start_point
                assert abs(np.linalg.norm(v - a.center) - a.radius) <= 1e-9 * max_r
                assert abs(np.linalg.norm(v - nxt.center) - nxt.radius) <= 1e-9 * max_r


class TestRDual:
    def test_single_point_gives_disk(self):
        K = r_dual(pset((3, -1)), 2.0)
        assert K.kind == "disk" and K.disk.radius == 2.0

    def test_empty_iff_circumradius_exceeds_r(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            pts = rng.uniform(-1, 1, size=(rng.integers(2, 8), 2))
            S = PointSet.from_points(pts)
            cr = min_enclosing_ball(S).radius
            r = cr * rng.uniform(0.5, 1.5)
            if abs(r - cr) < 1e-6 * cr:
                continue
            K = r_dual(S, r)
            assert K.is_empty == (cr > r)

    def test_reuleaux_triangle_area(self):
        r = 1.0
        pts = [(0, 0), (r, 0), (r / 2, r * math.sqrt(3) / 2)]
        K = r_dual(pset(*pts), r)
        assert K.kind == "chain" and len(K.arcs) == 3
        est, se = disk_intersection_area_mc(np.array(pts), np.full(3, r), 10_000_000, seed=3)
        assert measures(K)[2] == pytest.approx(est, abs=4 * se)
        # Independent closed form for the width-r Reuleaux triangle.
        assert measures(K)[2] == pytest.approx((math.pi - math.sqrt(3)) * r * r / 2, rel=1e-12)

    def test_monotone_in_generators(self):
        rng = np.random.default_rng(23)
        A = random_config(rng, n=5)
        K1 = r_dual(A, 1.0)
        bigger = PointSet(2, np.vstack([A.points, rng.uniform(-0.3, 0.3, size=(3, 2))]))
        K2 = r_dual(bigger, 1.0)
        V1, V2 = measures(K1), measures(K2)
        assert V2[1] <= V1[1] + 1e-12
        assert V2[2] <= V1[2] + 1e-12
        for p in boundary_points(K2, 100):
            assert contains(K1, p, slack=1e-9)


class TestMeasures:
    def test_full_disk(self):
        V = measures(ArcGon.full_disk(Ball(np.zeros(2), 1.0)))
        assert V[0] == 1.0
        assert V[1] == pytest.approx(math.pi)
        assert V[2] == pytest.approx(math.pi)

    def test_point_and_empty(self):
        assert measures(ArcGon.single_point((1, 1))).values.tolist() == [1.0, 0.0, 0.0]
        assert measures(ArcGon.empty()).values.tolist() == [0.0, 0.0, 0.0]

    def test_stderr_zero(self):
        V = measures(make_lens(1.0, 1.0))
        assert np.all(V.stderr == 0.0)


class TestSupport:
    def test_full_disk(self):
        K = ArcGon.full_disk(Ball(np.array([1.0, 2.0]), 0.5))
        u = np.array([1.0, 0.0])
        assert support(K, u) == pytest.approx(1.5)

    def test_single_point(self):
        K = ArcGon.single_point((1, 2))
        assert support(K, (0, 1)) == pytest.approx(2.0)

    def test_empty_raises(self):
        with pytest.raises(DomainError):
            support(ArcGon.empty(), (1, 0))

    def test_non_unit_rejected(self):
        with pytest.raises(DomainError):
            support(ArcGon.single_point((0, 0)), (1, 1))

    def test_lens_against_dense_sampling(self):
        K = make_lens(1.0, 1.0)
        pts = boundary_points(K, 1_000_000)
        # The true support dominates any sampled maximum; at a corner the
        # sampled value can lag by up to half the sample spacing (~2e-6).
        for u in [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (math.cos(1.1), math.sin(1.1))]:
            u = np.asarray(u)
            dense = float((pts @ u).max())
            assert dense - 1e-12 <= support(K, u) <= dense + 5e-6


class TestFarthestDistance:
    def test_full_disk(self):
        K = ArcGon.full_disk(Ball(np.array([1.0, 0.0]), 0.5))
        assert farthest_distance(K, (3.0, 0.0)) == pytest.approx(2.5)

    def test_single_point(self):
        assert farthest_distance(ArcGon.single_point((1, 1)), (4, 5)) == pytest.approx(5.0)

    def test_lens_against_dense_sampling(self):
        K = make_lens(1.0, 1.0)
        pts = boundary_points(K, 1_000_000)
        for v in [(0.0, 5.0), (2.0, 0.0), (-1.0, -1.0), (0.25, 0.1)]:
            dense = float(np.linalg.norm(pts - np.asarray(v), axis=1).max())
            assert dense - 1e-12 <= farthest_distance(K, v) <= dense + 5e-6


class TestRHull:
    def test_point(self):
        H = r_hull(pset((2, 3)), 1.0)
        assert H.kind == "point" and np.allclose(H.point, [2, 3])

    def test_critical_radius_gives_disk(self):
        r = 1.0
        H = r_hull(pset((-r, 0), (r, 0)), r)
        assert H.kind == "disk"
        assert np.allclose(H.disk.center, [0, 0], atol=1e-9)
        assert H.disk.radius == pytest.approx(r)

    def test_undefined_when_too_spread(self):
        with pytest.raises(DomainError):
            r_hull(pset((0, 0), (3, 0)), 1.0)

    def test_spindle_against_quadrature(self):
        delta, r = 1.2, 1.0
        H, info = r_hull(pset((-delta / 2, 0), (delta / 2, 0)), r, with_info=True)
        assert info.path == "duality"
        per, area = spindle_measures_by_quadrature(delta, r)
        V = measures(H)
        assert V[1] == pytest.approx(per / 2, rel=1e-9)
        assert V[2] == pytest.approx(area, rel=1e-9)
        # Closed form: 2 r^2 beta - h * delta with beta = asin(delta / 2r).
        beta = math.asin(delta / (2 * r))
        h = math.sqrt(r * r - delta * delta / 4)
        assert V[2] == pytest.approx(2 * r * r * beta - h * delta, rel=1e-12)

    def test_dense_circle_sample_hull_is_ball(self):
        R0, r = 0.6, 1.0
        A = PointSet(2, circle_points(720, R0))
        H = r_hull(A, r)
        assert H.kind == "chain"
        assert hausdorff_distance(H, ArcGon.full_disk(Ball(np.zeros(2), R0))) <= 1e-4 * R0

    def test_generators_inside_hull(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            A = random_config(rng)
            H = r_hull(A, 1.0)
            for p in A.points:
                assert contains(H, p, slack=1e-9)

    def test_support_identity_random(self):
        rng = np.random.default_rng(29)
        r = 1.0
        for _ in range(50):
            A = random_config(rng)
            dual = r_dual(A, r)
            hull = r_hull(A, r)
            assert support_identity_deviation(dual, hull, r, 360) <= 1e-7 * r

    def test_two_point_support_identity_tight(self):
        r = 1.0
        A = pset((-0.45, 0.0), (0.45, 0.0))
        dev = support_identity_deviation(r_dual(A, r), r_hull(A, r), r, 360)
        assert dev <= 1e-9 * r

    def test_idempotence(self):
        # The hull rebuilt from a dense boundary sample sits inside the
        # original and covers it up to the sampling sagitta.
        rng = np.random.default_rng(31)
        A = random_config(rng, n=6)
        H = r_hull(A, 1.0)
        dense = PointSet(2, boundary_points(H, 2048))
        H2 = r_hull(dense, 1.0)
        for p in boundary_points(H2, 256):
            assert contains(H, p, slack=1e-9)
        directed = max(point_distance(H2, p) for p in boundary_points(H, 256))
        assert directed <= 1e-4


class TestSDual:
    def test_point_becomes_disk(self):
        K = s_dual(ArcGon.single_point((1, 0)), 2.0)
        assert K.kind == "disk" and K.disk.radius == 2.0

    def test_disk_at_critical_s(self):
        K = s_dual(ArcGon.full_disk(Ball(np.array([2.0, 1.0]), 0.7)), 0.7)
        assert K.kind == "point" and np.allclose(K.point, [2, 1])

    def test_disk_below_critical_s(self):
        K = s_dual(ArcGon.full_disk(Ball(np.zeros(2), 1.0)), 0.5)
        assert K.is_empty

    def test_lens_dual_is_spindle(self):
        r, delta = 1.0, 1.1
        A = pset((-delta / 2, 0), (delta / 2, 0))
        lens = r_dual(A, r)
        spindle = r_hull(A, r)
        K, info = s_dual(lens, r, with_info=True)
        assert hausdorff_distance(K, spindle) <= 1e-9

    def test_double_dual_equals_dual(self):
        rng = np.random.default_rng(41)
        r = 1.0
        for _ in range(25):
            A = random_config(rng)
            dual = r_dual(A, r)
            hull = r_hull(A, r)
            if hull.kind != "chain":
                continue
            back = s_dual(hull, r)
            assert hausdorff_distance(back, dual, n=512) <= 1e-7 * r

    def test_reconstruction_path_matches_predicate(self):
        # s > max radius forces the conjectural fast path into validation;
        # whichever path wins must sit on the exact membership boundary.
        rng = np.random.default_rng(43)
        for _ in range(10):
            A = random_config(rng, n=4)
            K = r_dual(A, 1.0)
            if K.kind != "chain":
                continue
            s = 1.0 + rng.uniform(0.1, 0.6)
            out = s_dual(K, s)
            assert out.kind in ("chain", "disk")
            pts = boundary_points(out, 128)
            devs = [abs(farthest_distance(K, p) - s) for p in pts]
            assert max(devs) <= 1e-6 * s

    def test_empty_input_rejected(self):
        with pytest.raises(DomainError):
            s_dual(ArcGon.empty(), 1.0)


class TestMembershipAndDistance:
    def test_contains_lens(self):
        K = make_lens(1.0, 1.0)
        assert contains(K, (0.5, 0.0))
        assert not contains(K, (1.2, 0.0))
        assert not contains(K, (0.5, 0.9))

    def test_point_distance_matches_sampling(self):
        K = make_lens(1.0, 1.0)
        pts = boundary_points(K, 200_000)
        rng = np.random.default_rng(5)
        for _ in range(20):
            x = rng.uniform(-2, 2, size=2)
            dense = float(np.linalg.norm(pts - x, axis=1).min())
            d = point_distance(K, x)
            if contains(K, x):
                assert d == 0.0
            else:
                # Sampled minimum dominates the true distance by at most
                # half the boundary sample spacing.
                assert dense - 2e-5 <= d <= dense + 1e-12

    def test_boundary_points_on_boundary(self):
        K = make_lens(0.8, 1.0)
        for p in boundary_points(K, 64):
            assert point_distance(K, p) <= 1e-12


class TestSerialization:
    @pytest.mark.parametrize(
        "K",
        [
            ArcGon.empty(),
            ArcGon.single_point((1.5, -2.0)),
            ArcGon.full_disk(Ball(np.array([0.0, 3.0]), 1.25)),
        ],
    )
    def test_round_trip_simple(self, K):
        K2 = arcgon_from_obj(arcgon_to_obj(K))
        assert K2.kind == K.kind

    def test_round_trip_chain(self):
        K = make_lens(1.0, 1.0)
        K2 = arcgon_from_obj(arcgon_to_obj(K))
        assert K2.kind == "chain"
        assert hausdorff_distance(K, K2) == 0.0

    def test_bad_variant(self):
        with pytest.raises(DomainError):
            arcgon_from_obj({"variant": "polygon"})


class TestArcValidation:
    def test_bad_sweep(self):
        with pytest.raises(DomainError):
            Arc(0, 0, 1.0, 0.0, 0.0)

    def test_bad_radius(self):
        with pytest.raises(DomainError):
            Arc(0, 0, 0.0, 0.0, 1.0)

    def test_chain_needs_two_arcs(self):
        with pytest.raises(DomainError):
            ArcGon.chain([Arc(0, 0, 1.0, 0.0, 1.0)])
