"""Numerical verification of the convexity identities and inequalities for
r-ball bodies: the Blaschke-Santalo-type bound, the volume-product bound,
the Brunn-Minkowski chain, Alexandrov's comparison, the support identity
between a dual and its hull, Jung's theorem, and the uniform-contraction
chain of bounds.

Planar inputs run on the exact arc-polygon kernel; higher dimensions run on
the Monte-Carlo engine and report standard errors. Checkers are pure given
(inputs, seed).
"""

from __future__ import annotations

import math

import numpy as np

from .arcgon import (
    ArcGon,
    measures,
    r_dual,
    r_hull,
    s_dual,
    support,
    support_identity_deviation,
)
from .ballbody import (
    BallBodySpec,
    Estimate,
    McConfig,
    _support_batch,
    boundary_samples,
    default_epsilons,
    steiner_fit,
)
from .errors import DomainError
from .geom import (
    PointSet,
    ball_intrinsic_volume,
    diameter,
    min_enclosing_ball,
    min_pairwise_distance,
    omega,
    unit_ball_intrinsic_volume,
)
from .reports import InequalityReport

_EPS = 1e-12

# Number of exact boundary points of the dual used to approximate hull
# membership in d >= 3. The sampled farthest-distance test is a relaxation,
# so it overcovers the true hull slightly (second order in the sample
# spacing); hull volumes and intrinsic radii carry that one-sided bias.
_HULL_BOUNDARY_SAMPLES = 4096


def contraction_threshold(d: int) -> float:
    """Smallest N (as a real) for which the uniform-contraction theorem
    applies in dimension d."""
    return (1.0 + math.sqrt(2.0 * d / (d + 1.0))) ** d


def _require_proper(A: PointSet, r: float) -> float:
    cr = min_enclosing_ball(A).radius
    if cr == 0.0:
        raise DomainError("degenerate input: all points coincide (circumradius 0)")
    if cr > r * (1 + 1e-9):
        raise DomainError(f"undefined: circumradius {cr} exceeds r = {r}")
    return cr


def _default_mc(d: int, r: float, seed: int) -> McConfig:
    return McConfig(samples=200_000, seed=seed, epsilons=default_epsilons(d, r))


# ---------------------------------------------------------------------------
# dD hull machinery (sampled-boundary approximation of conv_r).


def _dual_boundary(A: PointSet, r: float, seed: int, n: int = _HULL_BOUNDARY_SAMPLES):
    return boundary_samples(BallBodySpec(A, r), n, seed=seed)


def _hull_volume_nd(A: PointSet, r: float, samples: int, seed: int) -> Estimate:
    """V_d of the r-hull by hit-or-miss over the sampled membership test
    max_j |v - b_j| <= r (b_j exact boundary points of the dual)."""
    bpts = _dual_boundary(A, r, seed)
    center = min_enclosing_ball(A).center
    d = A.dim
    lo, hi = center - r, center + r
    boxvol = float(np.prod(hi - lo))
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed & 0xFFFFFFFFFFFFFFFF)))
    hits = 0
    chunk = 16384
    for start in range(0, samples, chunk):
        m = min(chunk, samples - start)
        X = lo + rng.random((m, d)) * (hi - lo)
        dist = np.linalg.norm(X[:, None, :] - bpts[None, :, :], axis=2).max(axis=1)
        hits += int(np.count_nonzero(dist <= r))
    p = hits / samples
    return Estimate(boxvol * p, boxvol * math.sqrt(max(p * (1 - p), 1.0 / samples) / samples))


def _prune_farthest(points: np.ndarray, target: int) -> np.ndarray:
    """Greedy farthest-point subset: keeps the shape while shrinking the
    constraint count for projections."""
    if len(points) <= target:
        return points
    chosen = [0]
    dist = np.linalg.norm(points - points[0], axis=1)
    for _ in range(target - 1):
        nxt = int(dist.argmax())
        chosen.append(nxt)
        dist = np.minimum(dist, np.linalg.norm(points - points[nxt], axis=1))
    return points[np.array(chosen)]


def _hull_intrinsic_volume_nd(A: PointSet, r: float, l: int, mc: McConfig) -> Estimate:
    """V_l of the r-hull in d >= 3.

    l = d runs plain membership sampling; l < d runs the Steiner fit on the
    hull approximated as an intersection of radius-r balls centered at a
    pruned set of exact dual boundary points.
    """
    d = A.dim
    if l == d:
        return _hull_volume_nd(A, r, mc.samples, mc.seed)
    bpts = _prune_farthest(_dual_boundary(A, r, mc.seed), 256)
    hull_body = BallBodySpec(PointSet(d, bpts), r)
    V = steiner_fit(hull_body, mc)
    return Estimate(V[l], float(V.stderr[l]))


def _dual_intrinsic_volume(A: PointSet, r: float, k: int, mc: McConfig | None, seed: int):
    """V_k(A^r) with stderr, exact in the plane."""
    d = A.dim
    if d == 2:
        return Estimate(measures(r_dual(A, r))[k], 0.0), "exact2d"
    cfg = mc or _default_mc(d, r, seed)
    V = steiner_fit(BallBodySpec(A, r), cfg)
    return Estimate(V[k], float(V.stderr[k])), "mc"


# ---------------------------------------------------------------------------
# Intrinsic radius and the Blaschke-Santalo-type comparison.


def intrinsic_radius(A: PointSet, r: float, l: int, *, seed: int = 0, mc: McConfig | None = None) -> float:
    """Radius of the ball whose V_l matches V_l of the r-hull of A.

    Exact in the plane; estimated (with one-sided overcoverage bias) in
    higher dimension. Always lies in [0, r].
    """
    d = A.dim
    if not 1 <= l <= d:
        raise DomainError(f"need 1 <= l <= d, got l={l}")
    _require_proper(A, r)
    est, _ = _intrinsic_radius_estimate(A, r, l, seed=seed, mc=mc)
    return est.value


def _intrinsic_radius_estimate(A, r, l, *, seed, mc):
    d = A.dim
    if d == 2:
        vl = measures(r_hull(A, r))[l]
        path = "exact2d"
        se = 0.0
    else:
        cfg = mc or _default_mc(d, r, seed)
        vl, se = _hull_intrinsic_volume_nd(A, r, l, cfg)
        path = "mc"
    base = unit_ball_intrinsic_volume(d, l)
    value = (max(vl, 0.0) / base) ** (1.0 / l)
    value = min(value, r)
    se_r = 0.0
    if se > 0 and vl > 0:
        se_r = se / (l * base ** (1.0 / l) * vl ** ((l - 1.0) / l))
    return Estimate(value, se_r), path


def check_blaschke_santalo(
    A: PointSet, r: float, k: int, l: int, *, seed: int = 0, mc: McConfig | None = None
) -> InequalityReport:
    """V_k of the dual against V_k of the dual of the V_l-matching ball:
    among bodies of given l-th intrinsic volume the ball maximizes the k-th
    intrinsic volume of the dual."""
    d = A.dim
    if not 1 <= k <= l <= d:
        raise DomainError(f"need 1 <= k <= l <= d, got k={k}, l={l}")
    _require_proper(A, r)
    (lhs, se_lhs), path = _dual_intrinsic_volume(A, r, k, mc, seed)
    (R, se_R), _ = _intrinsic_radius_estimate(A, r, l, seed=seed, mc=mc)
    ball_r = max(r - R, 0.0)
    rhs = ball_intrinsic_volume(d, k, ball_r)
    se_rhs = k * ball_r ** (k - 1) * unit_ball_intrinsic_volume(d, k) * se_R if se_R else 0.0
    return InequalityReport(
        name="blaschke_santalo",
        params={"d": d, "k": k, "l": l, "r": r, "n": len(A), "seed": seed},
        lhs=lhs,
        rhs=rhs,
        stderr_lhs=se_lhs,
        stderr_rhs=se_rhs,
        path=path,
    )


def check_volume_product(
    A: PointSet, r: float, k: int, *, seed: int = 0, mc: McConfig | None = None
) -> InequalityReport:
    """V_k(hull) * V_k(dual) against its maximum, attained by the radius-r/2
    ball."""
    d = A.dim
    if not 1 <= k <= d:
        raise DomainError(f"need 1 <= k <= d, got k={k}")
    _require_proper(A, r)
    if d == 2:
        v_hull = Estimate(measures(r_hull(A, r))[k], 0.0)
        path = "exact2d"
    else:
        cfg = mc or _default_mc(d, r, seed)
        v_hull = _hull_intrinsic_volume_nd(A, r, k, cfg)
        path = "mc"
    (v_dual, se_dual), _ = _dual_intrinsic_volume(A, r, k, mc, seed)
    lhs = v_hull.value * v_dual
    se_lhs = abs(v_hull.value) * se_dual + abs(v_dual) * v_hull.stderr
    rhs = ball_intrinsic_volume(d, k, r / 2.0) ** 2
    return InequalityReport(
        name="volume_product",
        params={"d": d, "k": k, "r": r, "n": len(A), "seed": seed},
        lhs=lhs,
        rhs=rhs,
        stderr_lhs=se_lhs,
        path=path,
    )


def check_bm_chain(
    A: PointSet, r: float, k: int, *, seed: int = 0, mc: McConfig | None = None
) -> InequalityReport:
    """Brunn-Minkowski for intrinsic volumes applied to the dual/hull pair:
    V_k(dual)^(1/k) + V_k(hull)^(1/k) <= V_k(radius-r ball)^(1/k)."""
    d = A.dim
    if not 1 <= k <= d:
        raise DomainError(f"need 1 <= k <= d, got k={k}")
    _require_proper(A, r)
    if d == 2:
        v_dual = Estimate(measures(r_dual(A, r))[k], 0.0)
        v_hull = Estimate(measures(r_hull(A, r))[k], 0.0)
        path = "exact2d"
    else:
        cfg = mc or _default_mc(d, r, seed)
        (v_dual, se_d), _ = _dual_intrinsic_volume(A, r, k, cfg, seed)
        v_dual = Estimate(v_dual, se_d)
        v_hull = _hull_intrinsic_volume_nd(A, r, k, cfg)
        path = "mc"

    def root_with_se(est: Estimate) -> Estimate:
        v = max(est.value, 0.0)
        root = v ** (1.0 / k)
        se = est.stderr / (k * v ** ((k - 1.0) / k)) if est.stderr and v > 0 else 0.0
        return Estimate(root, se)

    a, b = root_with_se(v_dual), root_with_se(v_hull)
    return InequalityReport(
        name="brunn_minkowski_chain",
        params={"d": d, "k": k, "r": r, "n": len(A), "seed": seed},
        lhs=a.value + b.value,
        rhs=ball_intrinsic_volume(d, k, r) ** (1.0 / k),
        stderr_lhs=a.stderr + b.stderr,
        path=path,
    )


def check_alexandrov(V, k: int, l: int) -> InequalityReport:
    """Normalized intrinsic-volume comparison (V_l/V_l(B1))^k <= (V_k/V_k(B1))^l
    for a convex body with nonempty interior."""
    d = V.dim
    if not 1 <= k <= l <= d:
        raise DomainError(f"need 1 <= k <= l <= d, got k={k}, l={l}")
    if V[k] <= 0 or V[l] <= 0:
        raise DomainError("Alexandrov comparison requires a body with nonempty interior")
    uk, ul = unit_ball_intrinsic_volume(d, k), unit_ball_intrinsic_volume(d, l)
    lhs = (V[l] / ul) ** k
    rhs = (V[k] / uk) ** l
    se_lhs = k * (V[l] / ul) ** (k - 1) * float(V.stderr[l]) / ul
    se_rhs = l * (V[k] / uk) ** (l - 1) * float(V.stderr[k]) / uk
    path = "mc" if (V.stderr[k] > 0 or V.stderr[l] > 0) else "exact2d"
    return InequalityReport(
        name="alexandrov",
        params={"d": d, "k": k, "l": l},
        lhs=lhs,
        rhs=rhs,
        stderr_lhs=se_lhs,
        stderr_rhs=se_rhs,
        path=path,
    )


def check_alexandrov_hull(
    A: PointSet, r: float, k: int, l: int, *, seed: int = 0, mc: McConfig | None = None
) -> InequalityReport:
    """Equivalent ball form of the comparison on the r-hull:
    V_k(ball of the l-th intrinsic radius) <= V_k(hull)."""
    d = A.dim
    if not 1 <= k <= l <= d:
        raise DomainError(f"need 1 <= k <= l <= d, got k={k}, l={l}")
    _require_proper(A, r)
    (R, se_R), path = _intrinsic_radius_estimate(A, r, l, seed=seed, mc=mc)
    lhs = ball_intrinsic_volume(d, k, R)
    se_lhs = k * R ** (k - 1) * unit_ball_intrinsic_volume(d, k) * se_R if se_R else 0.0
    if d == 2:
        rhs = Estimate(measures(r_hull(A, r))[k], 0.0)
    else:
        rhs = _hull_intrinsic_volume_nd(A, r, k, mc or _default_mc(d, r, seed))
    return InequalityReport(
        name="alexandrov_ball_form",
        params={"d": d, "k": k, "l": l, "r": r, "n": len(A), "seed": seed},
        lhs=lhs,
        rhs=rhs.value,
        stderr_lhs=se_lhs,
        stderr_rhs=rhs.stderr,
        path=path,
    )


# ---------------------------------------------------------------------------
# Support identity (dual minus hull is the radius-r ball).


def _hull_support_nd(A: PointSet, r: float, w: np.ndarray, tol: float, seed: int) -> float:
    """Support of the r-hull in d >= 3 by constraint generation.

    The hull is the intersection of radius-r balls centered at every point
    of the dual; starting from a coarse constraint set, repeatedly maximize
    over the current intersection and add the dual's farthest point from
    the maximizer until the exact membership test is satisfied.
    """
    dual = BallBodySpec(A, r)
    bpts = _dual_boundary(A, r, seed)
    constraints = _prune_farthest(bpts, 64)
    d = A.dim
    for _ in range(64):
        body = BallBodySpec(PointSet(d, constraints), r)
        vals, X = _support_batch(body, w.reshape(1, -1), tol, return_points=True)
        v = X[0]
        # Farthest point of the dual from v: global scan over exact boundary
        # samples, polished by iterated support steps.
        dist = np.linalg.norm(bpts - v, axis=1)
        far = bpts[int(dist.argmax())]
        for _ in range(40):
            n = far - v
            nrm = float(np.linalg.norm(n))
            if nrm < _EPS:
                break
            n /= nrm
            _, Xf = _support_batch(dual, n.reshape(1, -1), tol, return_points=True)
            step = Xf[0]
            if np.linalg.norm(step - far) < 0.1 * tol:
                far = step
                break
            far = step
        if float(np.linalg.norm(far - v)) <= r + tol:
            return float(vals[0])
        constraints = np.vstack([constraints, far])
    raise DomainError("hull support generation did not stabilize; loosen tol")


def check_minkowski_identity(
    A: PointSet,
    r: float,
    n_dirs: int = 360,
    *,
    tol: float | None = None,
    seed: int = 0,
) -> InequalityReport:
    """Deviation of h_dual(u) + h_hull(-u) from r over a direction sweep.

    The dual and the hull of the same generators differ by exactly the
    radius-r ball, so the sum of opposite supports is identically r.
    """
    d = A.dim
    cr = min_enclosing_ball(A).radius
    if cr == 0.0:
        raise DomainError("degenerate input: circumradius 0")
    if cr > r * (1 + 1e-9):
        raise DomainError(f"undefined: circumradius {cr} exceeds r = {r}")
    if d == 2:
        dual = r_dual(A, r)
        hull = r_hull(A, r)
        dev = support_identity_deviation(dual, hull, r, n_dirs)
        bound = 1e-7 * r
        path = "exact2d"
    else:
        tol = 1e-8 * r if tol is None else float(tol)
        dual = BallBodySpec(A, r)
        rng = np.random.default_rng(seed)
        U = rng.standard_normal((n_dirs, d))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        h_dual = _support_batch(dual, U, tol)
        dev = 0.0
        for u, hd in zip(U, h_dual):
            hh = _hull_support_nd(A, r, -u, 0.1 * tol, seed)
            dev = max(dev, abs(hd + hh - r))
        bound = 10.0 * tol
        path = "mc"
    return InequalityReport(
        name="support_identity",
        params={"d": d, "r": r, "n": len(A), "seed": seed},
        lhs=dev,
        rhs=bound,
        path=path,
    )


def check_jung(S: PointSet) -> InequalityReport:
    """Circumradius against the dimension-dependent multiple of the diameter
    (equality for the regular simplex)."""
    if len(S) < 2:
        raise DomainError("Jung comparison needs at least 2 points")
    d = S.dim
    lhs = min_enclosing_ball(S).radius
    rhs = math.sqrt(2.0 * d / (d + 1.0)) * diameter(S) / 2.0
    return InequalityReport(
        name="jung",
        params={"d": d, "n": len(S)},
        lhs=lhs,
        rhs=rhs,
        path="exact2d" if d == 2 else "mc",
    )


# ---------------------------------------------------------------------------
# Uniform-contraction chain.


def _pair_is_uniform_contraction(P: PointSet, Q: PointSet, lam: float) -> bool:
    if len(P) != len(Q):
        return False
    if len(P) == 1:
        return True
    return min_pairwise_distance(P) >= lam and diameter(Q) <= lam


def _eq12_volume(P: PointSet, r: float, s: float, mc: McConfig | None, seed: int):
    """V_d of the (r + lambda/2)-hull of the inflated generators, computed
    through the dual-of-the-dual identity."""
    d = P.dim
    if d == 2:
        body = s_dual(r_dual(P, r), s)
        return Estimate(measures(body)[2], 0.0), "exact2d"
    cfg = mc or _default_mc(d, r, seed)
    bpts = boundary_samples(BallBodySpec(P, r), _HULL_BOUNDARY_SAMPLES, seed=seed)
    center = min_enclosing_ball(P).center
    lo, hi = center - s, center + s
    boxvol = float(np.prod(hi - lo))
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed & 0xFFFFFFFFFFFFFFFF)))
    hits = 0
    for start in range(0, cfg.samples, cfg.chunk):
        m = min(cfg.chunk, cfg.samples - start)
        X = lo + rng.random((m, d)) * (hi - lo)
        dist = np.linalg.norm(X[:, None, :] - bpts[None, :, :], axis=2).max(axis=1)
        hits += int(np.count_nonzero(dist <= s))
    p = hits / cfg.samples
    return (
        Estimate(boxvol * p, boxvol * math.sqrt(max(p * (1 - p), 1.0 / cfg.samples) / cfg.samples)),
        "mc",
    )


def check_kp_chain(
    P: PointSet,
    Q: PointSet,
    lam: float,
    r: float,
    k: int,
    *,
    seed: int = 0,
    mc: McConfig | None = None,
) -> list[InequalityReport]:
    """Per-link audit of the uniform-contraction argument.

    Links, in order: the packing lower bound on the hull of the inflated
    generators; the resulting upper bound on V_k of the spread dual; the
    threshold comparison of the two closed-form bounds (emitted only when N
    clears the dimension threshold); the cluster lower bound via Jung's
    theorem; and the final comparison V_k(P^r) <= V_k(Q^r).
    """
    d = P.dim
    if Q.dim != d:
        raise DomainError("P and Q must share a dimension")
    if not 1 <= k <= d:
        raise DomainError(f"need 1 <= k <= d, got k={k}")
    if not (lam > 0 and r > 0):
        raise DomainError("lambda and r must be positive")
    if not _pair_is_uniform_contraction(P, Q, lam):
        raise DomainError("inputs are not a uniform contraction pair at this lambda")

    N = len(P)
    applicable = N >= contraction_threshold(d)
    base = {"d": d, "k": k, "r": r, "lambda": lam, "n": N, "seed": seed}
    extra = {"theorem_applicable": applicable}
    reports: list[InequalityReport] = []

    (vQ, seQ), pathQ = _dual_intrinsic_volume(Q, r, k, mc, seed)
    cr_p = min_enclosing_ball(P).radius
    if cr_p > r * (1 + 1e-12):
        # Empty spread dual: the final comparison holds trivially.
        reports.append(
            InequalityReport(
                name="kp.final",
                params=base,
                lhs=0.0,
                rhs=vQ,
                stderr_rhs=seQ,
                path=pathQ,
                extra={"v_p": 0.0, "v_q": vQ, **extra},
            )
        )
        return reports

    s = r + lam / 2.0
    root_n = N ** (1.0 / d)

    lhs12 = ball_intrinsic_volume(d, d, root_n * lam / 2.0)
    (v12, se12), path12 = _eq12_volume(P, r, s, mc, seed)
    reports.append(
        InequalityReport(
            name="kp.packing_bound",
            params=base,
            lhs=lhs12,
            rhs=v12,
            stderr_rhs=se12,
            path=path12,
            extra=extra,
        )
    )

    (vP, seP), pathP = _dual_intrinsic_volume(P, r, k, mc, seed)
    bound_spread = ball_intrinsic_volume(d, k, max(r - (root_n - 1.0) * lam / 2.0, 0.0))
    reports.append(
        InequalityReport(
            name="kp.dual_upper_bound",
            params=base,
            lhs=vP,
            rhs=bound_spread,
            stderr_lhs=seP,
            path=pathP,
            extra=extra,
        )
    )

    bound_cluster = ball_intrinsic_volume(
        d, k, max(r - math.sqrt(2.0 * d / (d + 1.0)) * lam / 2.0, 0.0)
    )
    if applicable:
        reports.append(
            InequalityReport(
                name="kp.threshold_step",
                params=base,
                lhs=bound_spread,
                rhs=bound_cluster,
                path="exact2d" if d == 2 else "mc",
                extra=extra,
            )
        )

    reports.append(
        InequalityReport(
            name="kp.cluster_lower_bound",
            params=base,
            lhs=bound_cluster,
            rhs=vQ,
            stderr_rhs=seQ,
            path=pathQ,
            extra=extra,
        )
    )

    reports.append(
        InequalityReport(
            name="kp.final",
            params=base,
            lhs=vP,
            rhs=vQ,
            stderr_lhs=seP,
            stderr_rhs=seQ,
            path=pathP if pathP == pathQ else "mc",
            extra={"v_p": vP, "v_q": vQ, **extra},
        )
    )
    return reports


# ---------------------------------------------------------------------------
# Randomized batch running (used by the CLI check suites and the tests).


def random_generators(d: int, n: int, r: float, rng: np.random.Generator, spread: float = 0.75) -> PointSet:
    """A random proper configuration: n points in a ball of radius spread*r,
    redrawn until 0 < circumradius <= 0.98 r."""
    from .geom import sample_in_ball

    while True:
        pts = sample_in_ball(rng, n, d, spread * r)
        S = PointSet(d, pts)
        cr = min_enclosing_ball(S).radius
        if 0.02 * r < cr <= 0.98 * r:
            return S


def run_check_suite(
    suite: str,
    *,
    d: int,
    trials: int,
    seed: int,
    r: float = 1.0,
    k: int | None = None,
    l: int | None = None,
    n: int = 6,
    n_dirs: int = 360,
    mc: McConfig | None = None,
    input_set: PointSet | None = None,
) -> list[InequalityReport]:
    """Run one checker over `trials` random configurations (or over a single
    provided input set), tagging each report with its trial index."""
    reports: list[InequalityReport] = []
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        if suite == "jung":
            S = input_set or PointSet(d, rng.standard_normal((n, d)))
            rep = check_jung(S)
        else:
            A = input_set or random_generators(d, n, r, rng)
            if suite == "bs":
                rep = check_blaschke_santalo(A, r, k or 1, l or d, seed=seed, mc=mc)
            elif suite == "product":
                rep = check_volume_product(A, r, k or 1, seed=seed, mc=mc)
            elif suite == "lemma":
                rep = check_minkowski_identity(A, r, n_dirs, seed=seed)
            elif suite == "alexandrov":
                if d == 2:
                    V = measures(r_hull(A, r))
                else:
                    V = steiner_fit(BallBodySpec(A, r), mc or _default_mc(d, r, seed))
                rep = check_alexandrov(V, k or 1, l or d)
            else:
                raise DomainError(f"unknown check suite {suite!r}")
        params = dict(rep.params)
        params["trial"] = t
        params["seed"] = seed
        params.setdefault("r", r)
        reports.append(
            InequalityReport(
                name=rep.name,
                params=params,
                lhs=rep.lhs,
                rhs=rep.rhs,
                stderr_lhs=rep.stderr_lhs,
                stderr_rhs=rep.stderr_rhs,
                path=rep.path,
                extra=rep.extra,
            )
        )
    return reports
