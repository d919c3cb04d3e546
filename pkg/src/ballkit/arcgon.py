"""Exact planar kernel for intersections of disks and r-ball hulls.

Regions are convex arc-polygons ("arc-gons"): Empty, a single point, a full
disk, or a closed counterclockwise chain of circular arcs. All boundary
geometry is kept exact (circle centers, radii, angular intervals); the only
tolerances are the snapping rules around degenerate configurations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError, StitchingError
from .geom import Ball, IntrinsicVolumes, PointSet, min_enclosing_ball

TAU = 2.0 * math.pi

# Single relative geometric tolerance (relative to the largest radius in
# play). Configurations within it of a degenerate case (tangency, empty
# interval, hairline arc) are snapped to the degenerate case.
EPS_GEO = 1e-9

# Endpoint agreement required of consecutive arcs in a stitched chain,
# relative to the largest radius.
_CLOSURE_REL = 4e-9


@dataclass(frozen=True)
class Arc:
    """Counterclockwise circular arc: center, radius, angular interval.

    a0 lies in [0, 2*pi); a1 in (a0, a0 + 2*pi]. The sweep a1 - a0 is the
    subtended angle.
    """

    cx: float
    cy: float
    radius: float
    a0: float
    a1: float

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise DomainError(f"arc radius must be positive, got {self.radius}")
        if not 0.0 <= self.a0 < TAU:
            raise DomainError(f"arc start angle must lie in [0, 2*pi), got {self.a0}")
        sweep = self.a1 - self.a0
        if not 1e-12 < sweep <= TAU + 1e-12:
            raise DomainError(f"arc sweep must lie in (1e-12, 2*pi], got {sweep}")

    @property
    def center(self) -> np.ndarray:
        return np.array([self.cx, self.cy])

    @property
    def sweep(self) -> float:
        return self.a1 - self.a0

    def point_at(self, theta: float) -> np.ndarray:
        return np.array(
            [self.cx + self.radius * math.cos(theta), self.cy + self.radius * math.sin(theta)]
        )

    @property
    def start_point(self) -> np.ndarray:
        return self.point_at(self.a0)

    @property
    def end_point(self) -> np.ndarray:
        return self.point_at(self.a1)


@dataclass(frozen=True)
class ArcGon:
    """Convex planar region bounded by circular arcs.

    kind is one of "empty", "point", "disk", "chain". A chain is a closed
    counterclockwise sequence of arcs with strictly increasing outward
    normal angles; every vertex lies on its two adjacent circles.
    """

    kind: str
    point: np.ndarray | None = None
    disk: Ball | None = None
    arcs: tuple[Arc, ...] = ()

    def __post_init__(self):
        if self.kind not in ("empty", "point", "disk", "chain"):
            raise DomainError(f"unknown arc-gon kind {self.kind!r}")
        if self.kind == "point":
            p = np.asarray(self.point, dtype=float).reshape(2).copy()
            p.flags.writeable = False
            object.__setattr__(self, "point", p)
        if self.kind == "disk" and not isinstance(self.disk, Ball):
            raise DomainError("disk variant requires a Ball")
        if self.kind == "chain":
            object.__setattr__(self, "arcs", tuple(self.arcs))
            if len(self.arcs) < 2:
                raise DomainError("a chain needs at least two arcs")

    @classmethod
    def empty(cls) -> "ArcGon":
        return cls("empty")

    @classmethod
    def single_point(cls, p) -> "ArcGon":
        return cls("point", point=np.asarray(p, dtype=float))

    @classmethod
    def full_disk(cls, ball: Ball) -> "ArcGon":
        return cls("disk", disk=ball)

    @classmethod
    def chain(cls, arcs) -> "ArcGon":
        return cls("chain", arcs=tuple(arcs))

    @property
    def is_empty(self) -> bool:
        return self.kind == "empty"

    def vertices(self) -> np.ndarray:
        if self.kind != "chain":
            raise DomainError("only chains have vertices")
        return np.array([a.start_point for a in self.arcs])

    def max_radius(self) -> float:
        if self.kind == "chain":
            return max(a.radius for a in self.arcs)
        if self.kind == "disk":
            return self.disk.radius
        return 0.0


# ---------------------------------------------------------------------------
# Angular interval arithmetic (subsets of the circle as disjoint [lo, hi)
# pieces inside [0, 2*pi]; intervals crossing 0 are split).


def _norm_interval(lo: float, width: float) -> list[tuple[float, float]]:
    if width >= TAU - 1e-15:
        return [(0.0, TAU)]
    lo %= TAU
    hi = lo + width
    if hi <= TAU:
        return [(lo, hi)]
    return [(lo, TAU), (0.0, hi - TAU)]


def _intersect_intervals(current, constraint):
    out = []
    for a, b in current:
        for c, d in constraint:
            lo, hi = max(a, c), min(b, d)
            if hi > lo:
                out.append((lo, hi))
    out.sort()
    return out


# ---------------------------------------------------------------------------
# Disk intersection.


def disk_intersection(centers: PointSet, radii) -> ArcGon:
    """Exact intersection of N disks with per-disk radii.

    For each circle, the angular set lying inside every other disk is built
    by interval intersection; the surviving arcs are stitched into a convex
    counterclockwise chain. Tangencies and hairline features within the
    geometric tolerance snap to SinglePoint / Empty / FullDisk.
    """
    if centers.dim != 2:
        raise DomainError("disk_intersection is a planar operation")
    rho = np.asarray(radii, dtype=float).reshape(-1)
    pts = centers.points
    if rho.shape[0] != len(pts):
        raise DomainError(f"{len(pts)} centers but {rho.shape[0]} radii")
    if not np.all(np.isfinite(rho)) or np.any(rho <= 0):
        raise DomainError("radii must be finite and > 0")

    tol = EPS_GEO * float(rho.max())

    # Drop exact duplicates (same center and radius within tolerance).
    keep: list[int] = []
    for i in range(len(pts)):
        if not any(
            np.linalg.norm(pts[i] - pts[k]) <= tol and abs(rho[i] - rho[k]) <= tol for k in keep
        ):
            keep.append(i)
    pts = pts[keep]
    rho = rho[keep]

    # Drop disks that contain another disk (they cannot bound the result).
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    n = len(pts)
    redundant = np.zeros(n, dtype=bool)
    for j in range(n):
        for i in range(n):
            if i != j and not redundant[i] and dist[i, j] <= rho[j] - rho[i] + tol:
                redundant[j] = True
                break
    pts = pts[~redundant]
    rho = rho[~redundant]
    dist = dist[np.ix_(~redundant, ~redundant)]
    n = len(pts)

    if n == 1:
        return ArcGon.full_disk(Ball(pts[0], float(rho[0])))

    # Pairwise emptiness / tangency.
    gap = dist - (rho[:, None] + rho[None, :])
    np.fill_diagonal(gap, -np.inf)
    if float(gap.max()) > tol:
        return ArcGon.empty()
    if float(gap.max()) >= -tol:
        i, j = np.unravel_index(int(gap.argmax()), gap.shape)
        p = pts[i] + (rho[i] / dist[i, j]) * (pts[j] - pts[i])
        inside = np.linalg.norm(p - pts, axis=1) <= rho + tol
        return ArcGon.single_point(p) if bool(inside.all()) else ArcGon.empty()

    # Congruent disks admit an exact emptiness/point decision via the
    # minimal enclosing ball of the centers.
    if float(rho.max() - rho.min()) <= tol:
        r0 = float(rho[0])
        meb = min_enclosing_ball(PointSet(2, pts))
        if meb.radius > r0 + tol:
            return ArcGon.empty()
        if meb.radius >= r0 - tol:
            return ArcGon.single_point(meb.center)

    raw_arcs: list[tuple[int, float, float]] = []
    for i in range(n):
        intervals = [(0.0, TAU)]
        alive = True
        for j in range(n):
            if j == i:
                continue
            d = dist[i, j]
            x = (d * d + rho[i] * rho[i] - rho[j] * rho[j]) / (2.0 * d * rho[i])
            if x >= 1.0:
                # Circle i lies entirely outside disk j.
                alive = False
                break
            if x <= -1.0:
                continue  # circle i entirely inside disk j
            w = math.acos(x)
            m = math.atan2(pts[j, 1] - pts[i, 1], pts[j, 0] - pts[i, 0])
            intervals = _intersect_intervals(intervals, _norm_interval(m - w, 2.0 * w))
            if not intervals:
                alive = False
                break
        if not alive:
            continue
        if intervals == [(0.0, TAU)]:
            return ArcGon.full_disk(Ball(pts[i], float(rho[i])))
        ang_tol = max(1e-12, tol / float(rho[i]))
        for lo, hi in intervals:
            if hi - lo > ang_tol:
                raw_arcs.append((i, lo, hi))

    if not raw_arcs:
        return _resolve_degenerate(pts, rho, tol)

    return _stitch(pts, rho, raw_arcs, tol)


def _resolve_degenerate(pts: np.ndarray, rho: np.ndarray, tol: float) -> ArcGon:
    """No circle contributes boundary: the intersection is empty or a point.

    Decided by minimizing the worst disk deficit (a convex function of the
    candidate point).
    """

    def deficit(v):
        return float((np.linalg.norm(pts - v, axis=1) - rho).max())

    x0 = pts.mean(axis=0)
    scale = float(rho.max())
    res = minimize(
        deficit,
        x0,
        method="Nelder-Mead",
        options={"xatol": 1e-13 * scale, "fatol": 1e-13 * scale, "maxiter": 4000},
    )
    best = min((res.x, x0), key=deficit)
    if deficit(best) <= tol:
        return ArcGon.single_point(best)
    return ArcGon.empty()


def _stitch(pts: np.ndarray, rho: np.ndarray, raw_arcs, tol: float) -> ArcGon:
    """Order surviving arcs by outward normal angle and verify the chain closes."""
    raw_arcs = sorted(raw_arcs, key=lambda t: t[1])

    # An arc split at angle 0 reappears as a leading and a trailing piece on
    # the same circle; merge them across the wrap.
    if len(raw_arcs) >= 2:
        first, last = raw_arcs[0], raw_arcs[-1]
        if (
            first[0] == last[0]
            and first[1] <= 1e-12
            and last[2] >= TAU - 1e-12
            and first != last
        ):
            merged = (last[0], last[1], last[2] + (first[2] - first[1]))
            raw_arcs = raw_arcs[1:-1] + [merged]

    arcs = [
        Arc(float(pts[i, 0]), float(pts[i, 1]), float(rho[i]), lo % TAU, (lo % TAU) + (hi - lo))
        for i, lo, hi in raw_arcs
    ]
    if len(arcs) == 1:
        if arcs[0].sweep >= TAU - 1e-9:
            i = raw_arcs[0][0]
            return ArcGon.full_disk(Ball(pts[i], float(rho[i])))
        raise StitchingError("a single partial arc cannot close a boundary chain")

    closure_tol = max(_CLOSURE_REL * float(rho.max()), 4.0 * tol)
    worst = 0.0
    for k, arc in enumerate(arcs):
        nxt = arcs[(k + 1) % len(arcs)]
        worst = max(worst, float(np.linalg.norm(arc.end_point - nxt.start_point)))
    if worst > closure_tol:
        raise StitchingError(
            f"boundary chain does not close: worst endpoint gap {worst:.3e} "
            f"exceeds {closure_tol:.3e} over {len(arcs)} arcs"
        )
    return ArcGon.chain(arcs)


def r_dual(A: PointSet, r: float) -> ArcGon:
    """Intersection of the radius-r disks centered at the points of A.

    Empty exactly when the circumradius of A exceeds r (within tolerance);
    shrinks to a single point at equality.
    """
    if not (r > 0 and math.isfinite(r)):
        raise DomainError(f"r must be positive, got {r}")
    return disk_intersection(A, np.full(len(A), float(r)))


# ---------------------------------------------------------------------------
# Measures, support, farthest point, membership.


def measures(K: ArcGon) -> IntrinsicVolumes:
    """(V_0, V_1, V_2) of a planar arc-gon: Euler characteristic,
    half-perimeter, area. Exact; stderr identically zero."""
    if K.kind == "empty":
        return IntrinsicVolumes(2, [0.0, 0.0, 0.0])
    if K.kind == "point":
        return IntrinsicVolumes(2, [1.0, 0.0, 0.0])
    if K.kind == "disk":
        r = K.disk.radius
        return IntrinsicVolumes(2, [1.0, math.pi * r, math.pi * r * r])
    perimeter = 0.0
    segment_area = 0.0
    for a in K.arcs:
        perimeter += a.radius * a.sweep
        segment_area += 0.5 * a.radius * a.radius * (a.sweep - math.sin(a.sweep))
    verts = K.vertices()
    x, y = verts[:, 0], verts[:, 1]
    shoelace = 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
    return IntrinsicVolumes(2, [1.0, perimeter / 2.0, shoelace + segment_area])


def _check_unit(u) -> np.ndarray:
    u = np.asarray(u, dtype=float).reshape(2)
    if abs(float(np.linalg.norm(u)) - 1.0) > 1e-12:
        raise DomainError(f"direction must be a unit vector, |u| = {np.linalg.norm(u)}")
    return u


def support(K: ArcGon, u) -> float:
    """Support value h_K(u) = max over K of <x, u>, for unit u."""
    u = _check_unit(u)
    if K.kind == "empty":
        raise DomainError("support of the empty region is undefined")
    if K.kind == "point":
        return float(K.point @ u)
    if K.kind == "disk":
        return float(K.disk.center @ u) + K.disk.radius
    theta = math.atan2(u[1], u[0]) % TAU
    best = float((K.vertices() @ u).max())
    for a in K.arcs:
        if (theta - a.a0) % TAU <= a.sweep:
            best = max(best, a.cx * u[0] + a.cy * u[1] + a.radius)
    return best


def farthest_distance(K: ArcGon, v) -> float:
    """max over x in K of |x - v|; exact, via vertices and arc antipodes."""
    val, _ = _farthest_batch(K, np.asarray(v, dtype=float).reshape(1, 2))
    return float(val[0])


def _chain_elements(K: ArcGon):
    verts = K.vertices()
    centers = np.array([[a.cx, a.cy] for a in K.arcs])
    radii = np.array([a.radius for a in K.arcs])
    a0 = np.array([a.a0 for a in K.arcs])
    sweep = np.array([a.sweep for a in K.arcs])
    return verts, centers, radii, a0, sweep


def _farthest_batch(K: ArcGon, V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Farthest distance from each row of V to K, with the attaining element.

    Element ids: 0..n-1 the chain vertices, n..2n-1 the arcs (antipodal
    interior point). For point/disk variants the id is always 0.
    """
    if K.kind == "empty":
        raise DomainError("farthest distance from the empty region is undefined")
    if K.kind == "point":
        return np.linalg.norm(V - K.point, axis=1), np.zeros(len(V), dtype=int)
    if K.kind == "disk":
        return (
            np.linalg.norm(V - K.disk.center, axis=1) + K.disk.radius,
            np.zeros(len(V), dtype=int),
        )
    verts, centers, radii, a0, sweep = _chain_elements(K)
    n = len(verts)
    vert_d = np.linalg.norm(V[:, None, :] - verts[None, :, :], axis=2)  # (M, n)
    W = centers[None, :, :] - V[:, None, :]  # (M, n, 2)
    dc = np.linalg.norm(W, axis=2)
    theta = np.arctan2(W[:, :, 1], W[:, :, 0]) % TAU
    applicable = (theta - a0[None, :]) % TAU <= sweep[None, :]
    arc_vals = np.where(applicable, dc + radii[None, :], -np.inf)
    allv = np.concatenate([vert_d, arc_vals], axis=1)
    ids = np.argmax(allv, axis=1)
    return allv[np.arange(len(V)), ids], ids


def contains(K: ArcGon, x, slack: float = 0.0) -> bool:
    """Membership test. A chain region is its vertex polygon plus the
    circular segments beyond each chord."""
    x = np.asarray(x, dtype=float).reshape(2)
    if K.kind == "empty":
        return False
    if K.kind == "point":
        return float(np.linalg.norm(x - K.point)) <= slack
    if K.kind == "disk":
        return float(np.linalg.norm(x - K.disk.center)) <= K.disk.radius + slack
    verts = K.vertices()
    n = len(verts)
    edges = np.roll(verts, -1, axis=0) - verts
    rel = x[None, :] - verts
    cross = edges[:, 0] * rel[:, 1] - edges[:, 1] * rel[:, 0]
    lengths = np.linalg.norm(edges, axis=1)
    if n >= 3 and bool(np.all(cross >= -slack * np.maximum(lengths, 1e-300))):
        return True
    for k, a in enumerate(K.arcs):
        if np.linalg.norm(x - a.center) > a.radius + slack:
            continue
        s = verts[k]
        e = verts[(k + 1) % n]
        ch = e - s
        if ch[0] * (x[1] - s[1]) - ch[1] * (x[0] - s[0]) <= slack * max(
            float(np.linalg.norm(ch)), 1e-300
        ):
            return True
    return False


def point_distance(K: ArcGon, x) -> float:
    """Euclidean distance from x to the region (0 inside)."""
    x = np.asarray(x, dtype=float).reshape(2)
    if K.kind == "empty":
        raise DomainError("distance to the empty region is undefined")
    if K.kind == "point":
        return float(np.linalg.norm(x - K.point))
    if K.kind == "disk":
        return max(0.0, float(np.linalg.norm(x - K.disk.center)) - K.disk.radius)
    if contains(K, x):
        return 0.0
    verts = K.vertices()
    best = float(np.linalg.norm(verts - x, axis=1).min())
    for a in K.arcs:
        w = x - a.center
        dw = float(np.linalg.norm(w))
        if dw > 1e-300 and (math.atan2(w[1], w[0]) % TAU - a.a0) % TAU <= a.sweep:
            best = min(best, abs(dw - a.radius))
    return best


def boundary_points(K: ArcGon, n: int) -> np.ndarray:
    """n points spread along the boundary, uniformly by arc length."""
    if K.kind == "empty":
        raise DomainError("the empty region has no boundary")
    if K.kind == "point":
        return np.tile(K.point, (n, 1))
    if K.kind == "disk":
        t = TAU * (np.arange(n) + 0.5) / n
        c, r = K.disk.center, K.disk.radius
        return np.stack([c[0] + r * np.cos(t), c[1] + r * np.sin(t)], axis=1)
    lengths = np.array([a.radius * a.sweep for a in K.arcs])
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    total = cum[-1]
    s = total * (np.arange(n) + 0.5) / n
    idx = np.searchsorted(cum, s, side="right") - 1
    idx = np.clip(idx, 0, len(K.arcs) - 1)
    out = np.empty((n, 2))
    for k, a in enumerate(K.arcs):
        m = idx == k
        if not m.any():
            continue
        theta = a.a0 + (s[m] - cum[k]) / a.radius
        out[m, 0] = a.cx + a.radius * np.cos(theta)
        out[m, 1] = a.cy + a.radius * np.sin(theta)
    return out


def hausdorff_distance(K1: ArcGon, K2: ArcGon, n: int = 1024) -> float:
    """Symmetric Hausdorff distance between two nonempty arc-gons,
    via dense boundary sampling (exact point-to-region distances)."""
    if K1.is_empty or K2.is_empty:
        raise DomainError("Hausdorff distance needs nonempty regions")
    d12 = max(point_distance(K2, p) for p in boundary_points(K1, n))
    d21 = max(point_distance(K1, p) for p in boundary_points(K2, n))
    return max(d12, d21)


def support_identity_deviation(dual: ArcGon, hull: ArcGon, r: float, n_dirs: int = 360) -> float:
    """max over directions of |h_dual(u) + h_hull(-u) - r|.

    Zero exactly when the dual and the hull are a genuine r-dual pair (their
    Minkowski difference is the radius-r ball).
    """
    worst = 0.0
    for t in np.arange(n_dirs) * (TAU / n_dirs):
        u = np.array([math.cos(t), math.sin(t)])
        worst = max(worst, abs(support(dual, u) + support(hull, -u) - r))
    return worst


# ---------------------------------------------------------------------------
# Duals of regions (K^s) and r-hulls.


class HullInfo(NamedTuple):
    path: str  # "duality" | "direct" | "reconstructed" | "closed-form"
    deviation: float  # validation deviation of the accepted result


def _min_farthest(K: ArcGon) -> tuple[np.ndarray, float]:
    """Minimize farthest_distance(K, v) over v (value = circumradius of K)."""
    seed_pts = boundary_points(K, 512)
    x0 = min_enclosing_ball(PointSet(2, seed_pts)).center
    scale = max(K.max_radius(), float(np.abs(seed_pts).max()), 1e-12)

    def f(v):
        return farthest_distance(K, v)

    res = minimize(
        f,
        x0,
        method="Nelder-Mead",
        options={"xatol": 1e-13 * scale, "fatol": 1e-13 * scale, "maxiter": 4000},
    )
    best = min((res.x, x0), key=f)
    return np.asarray(best, dtype=float), f(best)


def _validate_sdual(K: ArcGon, s: float, candidate: ArcGon, n_samples: int = 256) -> float:
    """Deviation of a candidate for K^s from the exact membership boundary.

    Samples the candidate boundary; on the true K^s boundary the farthest
    distance to K equals s exactly, so both over- and undercoverage show up.
    """
    pts = boundary_points(candidate, n_samples)
    if candidate.kind == "chain":
        pts = np.vstack([pts, candidate.vertices()])
    vals, _ = _farthest_batch(K, pts)
    return float(np.abs(vals - s).max())


def s_dual(K: ArcGon, s: float, seed: int = 0, with_info: bool = False):
    """The region K^s = { v : K inside the radius-s ball at v }.

    Fast path: an intersection of disks centered at the chain's vertices
    (radius s) and arc centers (radius s - rho). That formula is only a
    mechanically checked conjecture for mixed radii, so the result is
    validated against the exact farthest-distance predicate and rebuilt by
    ray bisection on validation failure.
    """
    if K.is_empty:
        raise DomainError("the dual of the empty region is undefined")
    if not (s > 0 and math.isfinite(s)):
        raise DomainError(f"s must be positive, got {s}")
    if K.kind == "point":
        out = ArcGon.full_disk(Ball(K.point, s))
        return (out, HullInfo("closed-form", 0.0)) if with_info else out
    if K.kind == "disk":
        r = K.disk.radius
        tol = EPS_GEO * max(s, r)
        if s < r - tol:
            out = ArcGon.empty()
        elif s <= r + tol:
            out = ArcGon.single_point(K.disk.center)
        else:
            out = ArcGon.full_disk(Ball(K.disk.center, s - r))
        return (out, HullInfo("closed-form", 0.0)) if with_info else out

    tol = EPS_GEO * max(s, K.max_radius())
    centers = [a.start_point for a in K.arcs]
    radii = [s] * len(K.arcs)
    for a in K.arcs:
        if s - a.radius > tol:
            centers.append(np.array([a.cx, a.cy]))
            radii.append(s - a.radius)
    candidate = disk_intersection(PointSet(2, np.array(centers)), np.array(radii))

    if candidate.kind in ("chain", "disk"):
        dev = _validate_sdual(K, s, candidate)
        if dev <= 1e-7 * s:
            return (candidate, HullInfo("direct", dev)) if with_info else candidate

    out, dev = _reconstruct_sdual(K, s, seed)
    if with_info:
        return out, HullInfo("reconstructed", dev)
    return out


def _reconstruct_sdual(K: ArcGon, s: float, seed: int, n_rays: int = 4096):
    """Ground-truth reconstruction of K^s from the membership predicate.

    Casts rays from an interior point, bisects the boundary of
    {farthest_distance(K, .) = s}, reads off which extreme element of K
    binds at each boundary sample, and rebuilds the exact boundary arcs
    (radius s around vertices, radius s - rho around arc centers) with
    vertices as exact circle-circle intersections.
    """
    v0, f0 = _min_farthest(K)
    tol = EPS_GEO * max(s, K.max_radius())
    if f0 > s + tol:
        return ArcGon.empty(), 0.0
    if f0 >= s - tol:
        return ArcGon.single_point(v0), 0.0

    jitter = np.random.default_rng(seed).uniform(0.0, 0.5)
    angles = TAU * (np.arange(n_rays) + jitter) / n_rays
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)

    t_lo = np.zeros(n_rays)
    t_hi = np.full(n_rays, s + f0 + tol)
    for _ in range(60):
        t_mid = 0.5 * (t_lo + t_hi)
        vals, _ = _farthest_batch(K, v0 + t_mid[:, None] * dirs)
        above = vals > s
        t_hi = np.where(above, t_mid, t_hi)
        t_lo = np.where(above, t_lo, t_mid)
        if float((t_hi - t_lo).max()) < 1e-12 * s:
            break
    t = 0.5 * (t_lo + t_hi)
    pts = v0 + t[:, None] * dirs
    _, ids = _farthest_batch(K, pts)

    verts, centers, radii, _, _ = _chain_elements(K)
    n = len(verts)

    def element_circle(eid: int) -> tuple[np.ndarray, float]:
        if eid < n:
            return verts[eid], s
        return centers[eid - n], s - radii[eid - n]

    # Maximal runs of the same binding element, in ray order (circular).
    runs: list[tuple[int, int, int]] = []  # (element, first ray, last ray)
    start = 0
    for m in range(1, n_rays + 1):
        if m == n_rays or ids[m] != ids[start]:
            runs.append((int(ids[start]), start, m - 1))
            start = m
    if len(runs) > 1 and runs[0][0] == runs[-1][0]:
        e, s0, e0 = runs.pop()
        runs[0] = (e, s0, runs[0][2])

    if len(runs) == 1:
        q, R = element_circle(runs[0][0])
        out = ArcGon.full_disk(Ball(q, R))
        return out, _validate_sdual(K, s, out)

    # A vertex of K^s sits between consecutive runs: the intersection of the
    # two binding circles nearest the adjacent boundary samples.
    def circle_meet(q1, r1, q2, r2, near) -> np.ndarray:
        if r1 <= tol:
            return q1
        if r2 <= tol:
            return q2
        d = float(np.linalg.norm(q2 - q1))
        a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
        h2 = r1 * r1 - a * a
        h = math.sqrt(max(h2, 0.0))
        base = q1 + (a / d) * (q2 - q1)
        perp = np.array([-(q2 - q1)[1], (q2 - q1)[0]]) / d
        cand = (base + h * perp, base - h * perp)
        return min(cand, key=lambda c: float(np.linalg.norm(c - near)))

    nruns = len(runs)
    junction = []
    for k in range(nruns):
        e_a = runs[k][0]
        e_b = runs[(k + 1) % nruns][0]
        qa, ra = element_circle(e_a)
        qb, rb = element_circle(e_b)
        near = pts[runs[k][2]]
        junction.append(circle_meet(qa, ra, qb, rb, near))

    arcs = []
    for k in range(nruns):
        q, R = element_circle(runs[k][0])
        if R <= tol:
            continue  # degenerate circle: adjacent junctions coincide at q
        v_in = junction[(k - 1) % nruns]
        v_out = junction[k]
        a0 = math.atan2(v_in[1] - q[1], v_in[0] - q[0]) % TAU
        a1 = math.atan2(v_out[1] - q[1], v_out[0] - q[0]) % TAU
        sweep = (a1 - a0) % TAU
        if sweep <= 1e-12:
            continue
        arcs.append(Arc(float(q[0]), float(q[1]), float(R), a0, a0 + sweep))

    if len(arcs) < 2:
        out = ArcGon.single_point(v0)
        return out, _validate_sdual(K, s, out)
    out = ArcGon.chain(arcs)
    dev = _validate_sdual(K, s, out)
    if dev > 1e-6 * s:
        raise StitchingError(
            f"reconstructed dual deviates {dev:.3e} from the membership boundary (s={s})"
        )
    return out, dev


def r_hull(A: PointSet, r: float, seed: int = 0, with_info: bool = False):
    """The r-hull of A: the intersection of all radius-r balls containing A.

    Fast path by vertex-arc duality: the intersection of radius-r disks
    centered at the vertices of the r-dual of A. The result must pass the
    support-identity validation against the dual; otherwise it is rebuilt
    through the exact membership predicate.
    """
    if A.dim != 2:
        raise DomainError("r_hull is a planar operation")
    if not (r > 0 and math.isfinite(r)):
        raise DomainError(f"r must be positive, got {r}")
    cr = min_enclosing_ball(A).radius
    if cr > r * (1.0 + EPS_GEO):
        raise DomainError(f"hull undefined: circumradius {cr} exceeds r = {r}")
    dual = r_dual(A, r)
    if dual.kind == "disk":
        out = ArcGon.single_point(dual.disk.center)
        return (out, HullInfo("closed-form", 0.0)) if with_info else out
    if dual.kind == "point":
        out = ArcGon.full_disk(Ball(dual.point, r))
        return (out, HullInfo("closed-form", 0.0)) if with_info else out

    candidate = disk_intersection(PointSet(2, dual.vertices()), np.full(len(dual.arcs), r))
    dev = support_identity_deviation(dual, candidate, r) if not candidate.is_empty else math.inf
    if dev <= 1e-7 * r:
        return (candidate, HullInfo("duality", dev)) if with_info else candidate

    out, rdev = _reconstruct_sdual(dual, r, seed)
    if with_info:
        return out, HullInfo("reconstructed", rdev)
    return out


# ---------------------------------------------------------------------------
# JSON serialization.


def arcgon_to_obj(K: ArcGon) -> dict:
    if K.kind == "empty":
        return {"variant": "empty"}
    if K.kind == "point":
        return {"variant": "point", "x": float(K.point[0]), "y": float(K.point[1])}
    if K.kind == "disk":
        c = K.disk.center
        return {"variant": "disk", "cx": float(c[0]), "cy": float(c[1]), "r": K.disk.radius}
    return {
        "variant": "chain",
        "arcs": [
            {"cx": a.cx, "cy": a.cy, "r": a.radius, "a0": a.a0, "a1": a.a1} for a in K.arcs
        ],
    }


def arcgon_from_obj(obj) -> ArcGon:
    if not isinstance(obj, dict) or "variant" not in obj:
        raise DomainError('arc-gon JSON must carry a "variant" key')
    variant = obj["variant"]
    if variant == "empty":
        return ArcGon.empty()
    if variant == "point":
        return ArcGon.single_point((obj["x"], obj["y"]))
    if variant == "disk":
        return ArcGon.full_disk(Ball(np.array([obj["cx"], obj["cy"]]), obj["r"]))
    if variant == "chain":
        return ArcGon.chain(
            Arc(a["cx"], a["cy"], a["r"], a["a0"], a["a1"]) for a in obj["arcs"]
        )
    raise DomainError(f"unknown arc-gon variant {variant!r}")
