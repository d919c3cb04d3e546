"""Dimension-generic engine for intersections of congruent balls.

Provides membership, Euclidean projection (Dykstra's corrected cyclic
scheme), support values, exact boundary ray-casting, and Monte-Carlo
intrinsic-volume estimation by fitting the Steiner polynomial of the
inflated body.

All estimators are deterministic functions of (spec, config): sampling is
split into fixed-size chunks, each chunk draws from a counter-based
substream keyed by (seed, epsilon index, chunk index), and chunk results
are reduced in chunk order. Worker threads never change results.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, DomainError, FitError
from .geom import IntrinsicVolumes, PointSet, min_enclosing_ball, omega

_DEFAULT_TOL_REL = 1e-8
_DEFAULT_MAX_ITERS = 100_000
_PREDICATE_MAX_CYCLES = 5_000


@dataclass(frozen=True)
class BallBodySpec:
    """Implicit body: the intersection of radius-`radius` balls centered at
    `centers`. Nonempty exactly when the circumradius of the centers does
    not exceed the radius."""

    centers: PointSet
    radius: float

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise DomainError(f"radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.centers.dim

    def circumradius(self) -> float:
        return min_enclosing_ball(self.centers).radius

    def is_nonempty(self) -> bool:
        return self.circumradius() <= self.radius * (1 + 1e-12)


@dataclass(frozen=True)
class McConfig:
    """Monte-Carlo estimator configuration."""

    samples: int
    seed: int
    epsilons: tuple[float, ...]
    chunk: int = 16384

    def __post_init__(self):
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        if self.samples < 1_000:
            raise DomainError(f"samples must be >= 1000, got {self.samples}")
        if self.chunk < 1:
            raise DomainError("chunk must be positive")
        eps = self.epsilons
        if not eps or any(e <= 0 or not math.isfinite(e) for e in eps):
            raise DomainError("epsilons must be positive reals")
        if any(b <= a for a, b in zip(eps, eps[1:])):
            raise DomainError("epsilons must be strictly increasing")


class Estimate(NamedTuple):
    value: float
    stderr: float


def default_epsilons(d: int, radius: float) -> tuple[float, ...]:
    """d+3 geometrically spaced inflation radii in [0.1 r, r]."""
    return tuple(np.geomspace(0.1 * radius, radius, d + 3))


def contains(B: BallBodySpec, x) -> bool:
    """Exact membership: within `radius` of every center, no tolerance."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != B.dim:
        raise DomainError(f"point has dimension {x.shape[0]}, body has {B.dim}")
    d = np.linalg.norm(B.centers.points - x, axis=1)
    return bool(np.all(d <= B.radius))


def _dykstra(
    centers: np.ndarray,
    radius: float,
    X0: np.ndarray,
    tol: float,
    max_cycles: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dykstra's corrected cyclic projections onto an intersection of balls,
    vectorized over rows of X0.

    Returns (points, converged mask, per-row worst constraint deficit).
    Unlike plain alternating projections, the correction terms make the
    limit the true Euclidean projection of each starting point.
    """
    n = centers.shape[0]
    X = X0.astype(float).copy()
    Q = np.zeros((n,) + X.shape)
    active = np.ones(len(X), dtype=bool)
    deficit = np.full(len(X), np.inf)
    for _ in range(max_cycles):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        Xa = X[idx]
        prev = Xa.copy()
        for i in range(n):
            Y = Xa + Q[i, idx]
            W = Y - centers[i]
            dist = np.linalg.norm(W, axis=1)
            out = dist > radius
            P = Y.copy()
            if out.any():
                P[out] = centers[i] + W[out] * (radius / dist[out])[:, None]
            Q[i, idx] = Y - P
            Xa = P
        X[idx] = Xa
        move = np.linalg.norm(Xa - prev, axis=1)
        dmax = np.linalg.norm(Xa[:, None, :] - centers[None, :, :], axis=2).max(axis=1)
        deficit[idx] = dmax - radius
        done = (move < tol) & (deficit[idx] < tol)
        active[idx[done]] = False
    return X, ~active, deficit


def project(
    B: BallBodySpec,
    x,
    tol: float | None = None,
    max_iters: int = _DEFAULT_MAX_ITERS,
) -> np.ndarray:
    """Euclidean projection of x onto the body.

    Raises ConvergenceError (carrying the last iterate and residual) if the
    cyclic scheme does not settle within max_iters cycles.
    """
    if not B.is_nonempty():
        raise DomainError("cannot project onto an empty body")
    x = np.asarray(x, dtype=float).reshape(1, -1)
    if x.shape[1] != B.dim:
        raise DomainError(f"point has dimension {x.shape[1]}, body has {B.dim}")
    tol = _DEFAULT_TOL_REL * B.radius if tol is None else float(tol)
    if contains(B, x[0]):
        return x[0].copy()
    P, ok, deficit = _dykstra(B.centers.points, B.radius, x, tol, max_iters)
    if not ok[0]:
        raise ConvergenceError(
            f"projection did not converge within {max_iters} cycles",
            last=P[0],
            residual=float(deficit[0]),
        )
    return P[0]


def distance_to(B: BallBodySpec, x, tol: float | None = None) -> float:
    """Distance from x to the body; exactly 0 for members."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if contains(B, x):
        return 0.0
    return float(np.linalg.norm(x - project(B, x, tol)))


def ray_exit(B: BallBodySpec, origin, directions) -> np.ndarray:
    """Exact boundary crossings: for each unit direction, the largest t with
    origin + t * direction inside the body. Origin must be interior."""
    o = np.asarray(origin, dtype=float).reshape(-1)
    U = np.asarray(directions, dtype=float)
    single = U.ndim == 1
    U = U.reshape(-1, B.dim)
    centers = B.centers.points
    offs = o - centers  # (n, d)
    if float(np.linalg.norm(offs, axis=1).max()) >= B.radius:
        raise DomainError("ray_exit origin must be strictly interior")
    b = U @ offs.T  # (m, n): <o - c, u>
    c0 = np.einsum("ij,ij->i", offs, offs) - B.radius**2  # (n,)
    t = -b + np.sqrt(np.maximum(b * b - c0[None, :], 0.0))
    tmin = t.min(axis=1)
    return float(tmin[0]) if single else tmin


def boundary_samples(B: BallBodySpec, n: int, seed: int = 0) -> np.ndarray:
    """n exact boundary points, via ray exits from the circumcenter of the
    generators in seeded random directions."""
    meb = min_enclosing_ball(B.centers)
    if meb.radius >= B.radius * (1 - 1e-12):
        return np.tile(meb.center, (n, 1))
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((n, B.dim))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    t = ray_exit(B, meb.center, U)
    return meb.center + t[:, None] * U


def _support_batch(B: BallBodySpec, U: np.ndarray, tol: float) -> np.ndarray:
    """Support values by projected ascent, batched over directions.

    From a feasible start, x <- project(x + eta * u) never decreases <x, u>;
    eta shrinks whenever a step stops making progress.
    """
    centers = B.centers.points
    meb = min_enclosing_ball(B.centers)
    m = len(U)
    X = np.tile(meb.center, (m, 1))
    eta = np.full(m, 2.0 * B.radius)
    floor = 0.25 * tol
    for _ in range(400):
        live = eta > floor
        if not live.any():
            break
        idx = np.flatnonzero(live)
        stepped = X[idx] + eta[idx, None] * U[idx]
        proj, ok, _ = _dykstra(centers, B.radius, stepped, 0.1 * tol, _PREDICATE_MAX_CYCLES)
        if not ok.all():
            raise ConvergenceError("support ascent: inner projection stalled")
        gain = np.einsum("ij,ij->i", proj - X[idx], U[idx])
        better = gain > 0
        X[idx[better]] = proj[better]
        eta[idx[gain < 0.125 * tol]] *= 0.25
    else:
        raise ConvergenceError(f"support ascent did not reach tolerance {tol}")
    return np.einsum("ij,ij->i", X, U)


def support_value(B: BallBodySpec, u, tol: float | None = None) -> float:
    """Approximate support h_B(u), within tol of the true value."""
    if not B.is_nonempty():
        raise DomainError("support of an empty body is undefined")
    u = np.asarray(u, dtype=float).reshape(-1)
    if abs(float(np.linalg.norm(u)) - 1.0) > 1e-12:
        raise DomainError("direction must be a unit vector")
    tol = _DEFAULT_TOL_REL * B.radius if tol is None else float(tol)
    return float(_support_batch(B, u.reshape(1, -1), tol)[0])


def _classify_chunk(
    centers: np.ndarray,
    radius: float,
    X: np.ndarray,
    eps: float,
    tol: float,
    interior: np.ndarray,
    margin: float,
) -> int:
    """Number of rows of X within eps of the body (hit-or-miss predicate).

    Cheap certificates first: membership, and the single-ball deficit lower
    bound. The ambiguous shell goes through batched Dykstra with an early
    acceptance test (shift toward a strictly interior point to produce a
    feasible witness, giving an upper bound on the distance).
    """
    D = np.linalg.norm(X[:, None, :] - centers[None, :, :], axis=2)
    maxd = D.max(axis=1)
    hits = maxd <= radius
    undecided = ~hits & (maxd - radius <= eps)
    if not undecided.any():
        return int(np.count_nonzero(hits))

    X0 = X[undecided]
    n = centers.shape[0]
    Xt = X0.copy()
    Q = np.zeros((n,) + Xt.shape)
    state = np.zeros(len(Xt), dtype=np.int8)  # 0 open, 1 hit, -1 miss
    use_shift = margin > 10.0 * tol
    for _ in range(_PREDICATE_MAX_CYCLES):
        idx = np.flatnonzero(state == 0)
        if idx.size == 0:
            break
        Xa = Xt[idx]
        prev = Xa.copy()
        for i in range(n):
            Y = Xa + Q[i, idx]
            W = Y - centers[i]
            dist = np.linalg.norm(W, axis=1)
            out = dist > radius
            P = Y.copy()
            if out.any():
                P[out] = centers[i] + W[out] * (radius / dist[out])[:, None]
            Q[i, idx] = Y - P
            Xa = P
        Xt[idx] = Xa
        deficit = (
            np.linalg.norm(Xa[:, None, :] - centers[None, :, :], axis=2).max(axis=1) - radius
        )
        if use_shift:
            alpha = np.clip(deficit, 0.0, None) / (np.clip(deficit, 0.0, None) + margin)
            Z = Xa + alpha[:, None] * (interior - Xa)
            ub = np.linalg.norm(X0[idx] - Z, axis=1)
            state[idx[ub <= eps]] = 1
        move = np.linalg.norm(Xa - prev, axis=1)
        done = (move < tol) & (deficit < tol) & (state[idx] == 0)
        if done.any():
            d_final = np.linalg.norm(X0[idx[done]] - Xa[done], axis=1)
            state[idx[done]] = np.where(d_final <= eps, 1, -1)
    if (state == 0).any():
        raise ConvergenceError(
            f"{int(np.count_nonzero(state == 0))} samples unresolved after "
            f"{_PREDICATE_MAX_CYCLES} projection cycles"
        )
    return int(np.count_nonzero(hits)) + int(np.count_nonzero(state == 1))


def _chunk_rng(seed: int, eps_index: int, chunk_index: int) -> np.random.Generator:
    key = np.array(
        [np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64((eps_index << 40) | chunk_index)],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


def steiner_fit(B: BallBodySpec, cfg: McConfig, threads: int = 1) -> IntrinsicVolumes:
    """Intrinsic volumes (V_0 .. V_d) by Steiner-polynomial fitting.

    Estimates the volume of the body inflated by each epsilon with
    hit-or-miss sampling in the exact bounding box, then solves the weighted
    least-squares system for V_1..V_d (V_0 pinned to 1). Standard errors
    propagate the binomial sampling variance through the normal equations.
    """
    d = B.dim
    if len(cfg.epsilons) < d + 1:
        raise DomainError(f"need at least d+1 = {d + 1} epsilons, got {len(cfg.epsilons)}")
    meb = min_enclosing_ball(B.centers)
    if meb.radius > B.radius * (1 + 1e-12):
        return IntrinsicVolumes(d, np.zeros(d + 1), np.zeros(d + 1))
    margin = B.radius - meb.radius
    centers = B.centers.points
    tol = _DEFAULT_TOL_REL * B.radius

    n_chunks = -(-cfg.samples // cfg.chunk)

    def run_chunk(eps_index: int, chunk_index: int) -> int:
        eps = cfg.epsilons[eps_index]
        lo = centers.min(axis=0) - (B.radius + eps)
        hi = centers.max(axis=0) + (B.radius + eps)
        start = chunk_index * cfg.chunk
        m = min(cfg.chunk, cfg.samples - start)
        rng = _chunk_rng(cfg.seed, eps_index, chunk_index)
        X = lo + rng.random((m, d)) * (hi - lo)
        return _classify_chunk(centers, B.radius, X, eps, tol, meb.center, margin)

    tasks = [(e, c) for e in range(len(cfg.epsilons)) for c in range(n_chunks)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(lambda t: run_chunk(*t), tasks))
    else:
        counts = [run_chunk(*t) for t in tasks]

    y = np.empty(len(cfg.epsilons))
    var = np.empty(len(cfg.epsilons))
    for e, eps in enumerate(cfg.epsilons):
        lo = centers.min(axis=0) - (B.radius + eps)
        hi = centers.max(axis=0) + (B.radius + eps)
        boxvol = float(np.prod(hi - lo))
        hits = sum(counts[e * n_chunks : (e + 1) * n_chunks])
        p = hits / cfg.samples
        y[e] = boxvol * p
        var[e] = boxvol**2 * max(p * (1 - p), 1.0 / cfg.samples) / cfg.samples

    eps_arr = np.asarray(cfg.epsilons)
    X = np.empty((len(eps_arr), d))
    for i in range(1, d + 1):
        X[:, i - 1] = omega(d - i) * eps_arr ** (d - i)
    target = y - omega(d) * eps_arr**d
    w = 1.0 / np.sqrt(var)
    Xw = X * w[:, None]
    cond = float(np.linalg.cond(Xw))
    if cond > 1e8:
        raise FitError(
            f"Steiner fit is ill-conditioned (cond = {cond:.2e}); widen the epsilon grid"
        )
    sol, *_ = np.linalg.lstsq(Xw, target * w, rcond=None)
    cov = np.linalg.inv(Xw.T @ Xw)
    se = np.sqrt(np.diag(cov))

    for i in range(d):
        if sol[i] < 0:
            if sol[i] >= -3.0 * se[i]:
                warnings.warn(
                    f"fitted V_{i + 1} = {sol[i]:.3e} clamped to 0 "
                    f"(within 3 stderr of zero)",
                    stacklevel=2,
                )
                sol[i] = 0.0
            else:
                raise FitError(
                    f"fitted V_{i + 1} = {sol[i]:.3e} is negative beyond 3 stderr "
                    f"({se[i]:.3e}); intrinsic volumes are nonnegative"
                )
    values = np.concatenate([[1.0], sol])
    stderr = np.concatenate([[0.0], se])
    return IntrinsicVolumes(d, values, stderr)


def mean_width_v1(
    B: BallBodySpec, n_dirs: int, seed: int, tol: float | None = None
) -> Estimate:
    """Independent V_1 estimator from the mean width over random directions."""
    if not B.is_nonempty():
        raise DomainError("mean width of an empty body is undefined")
    if n_dirs < 2:
        raise DomainError("need at least 2 directions")
    tol = _DEFAULT_TOL_REL * B.radius if tol is None else float(tol)
    d = B.dim
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed & 0xFFFFFFFFFFFFFFFF)))
    U = rng.standard_normal((n_dirs, d))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    meb = min_enclosing_ball(B.centers)
    if meb.radius >= B.radius * (1 - 1e-12):
        # The body is (within tolerance) a single point.
        return Estimate(0.0, 0.0)
    h_plus = _support_batch(B, U, tol)
    h_minus = _support_batch(B, -U, tol)
    widths = h_plus + h_minus
    c = d * omega(d) / (2.0 * omega(d - 1))
    value = c * float(widths.mean())
    stderr = c * float(widths.std(ddof=1)) / math.sqrt(n_dirs)
    return Estimate(value, stderr)
