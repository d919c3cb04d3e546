"""Foundational types, ball intrinsic-volume constants, and the minimal
enclosing ball.

Lengths are dimensionless reals throughout; the k-th intrinsic volume V_k
carries units of length^k but no unit system is enforced.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

MAX_OMEGA_DIM = 64

# In-ball tests in the minimal-enclosing-ball recursion use this relative
# tolerance; it resolves collinear/cocircular ties deterministically given
# the shuffle seed.
_MEB_REL_TOL = 1e-12


def omega(d: int) -> float:
    """Volume of the d-dimensional unit ball, pi^(d/2) / Gamma(1 + d/2).

    Evaluated through log-Gamma so large d (up to 64) cannot overflow.
    """
    d = _check_int(d, "d")
    if not 0 <= d <= MAX_OMEGA_DIM:
        raise DomainError(f"omega requires 0 <= d <= {MAX_OMEGA_DIM}, got {d}")
    return math.exp(0.5 * d * math.log(math.pi) - math.lgamma(1.0 + 0.5 * d))


def unit_ball_intrinsic_volume(d: int, l: int) -> float:
    """V_l of the d-dimensional unit ball: C(d,l) * omega_d / omega_{d-l}."""
    d = _check_int(d, "d")
    l = _check_int(l, "l")
    if not 0 <= l <= d:
        raise DomainError(f"need 0 <= l <= d, got l={l}, d={d}")
    return math.comb(d, l) * omega(d) / omega(d - l)


def ball_intrinsic_volume(d: int, l: int, radius: float) -> float:
    """V_l of a d-ball of the given radius (homogeneous of degree l).

    A radius-0 ball is a point: V_0 = 1 and V_l = 0 for l >= 1.
    """
    if radius < 0 or not math.isfinite(radius):
        raise DomainError(f"radius must be finite and >= 0, got {radius}")
    return radius**l * unit_ball_intrinsic_volume(d, l)


def _check_int(value, name: str) -> int:
    if isinstance(value, bool) or int(value) != value:
        raise DomainError(f"{name} must be an integer, got {value!r}")
    return int(value)


def _as_points(points, dim: int | None = None) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
        raise DomainError(f"points must be a non-empty N x d array, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise DomainError("points must have finite coordinates")
    if dim is not None and pts.shape[1] != dim:
        raise DomainError(f"expected dimension {dim}, got {pts.shape[1]}")
    return pts


@dataclass(frozen=True)
class PointSet:
    """A labeled finite point configuration in d-space.

    Labels are the row indices; `points` is an immutable (N, dim) array.
    """

    dim: int
    points: np.ndarray

    def __post_init__(self):
        pts = _as_points(self.points, _check_int(self.dim, "dim"))
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_points(cls, points) -> "PointSet":
        pts = _as_points(points)
        return cls(pts.shape[1], pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    def to_json(self) -> str:
        return json.dumps({"dim": self.dim, "points": self.points.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "PointSet":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"invalid JSON: {exc}") from exc
        return cls.from_obj(obj)

    @classmethod
    def from_obj(cls, obj) -> "PointSet":
        if not isinstance(obj, dict) or set(obj) != {"dim", "points"}:
            raise DomainError('point set JSON must be {"dim": int, "points": [[...], ...]}')
        dim = obj["dim"]
        rows = obj["points"]
        if not isinstance(dim, int) or isinstance(dim, bool):
            raise DomainError("dim must be an integer")
        if not isinstance(rows, list) or not rows:
            raise DomainError("points must be a non-empty list of rows")
        for row in rows:
            if not isinstance(row, list) or len(row) != dim:
                raise DomainError(f"ragged or mis-sized row {row!r}, expected {dim} coordinates")
            for v in row:
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise DomainError(f"non-numeric coordinate {v!r}")
        return cls(dim, np.array(rows, dtype=float))


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball given by center and radius."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).reshape(-1).copy()
        if not np.all(np.isfinite(c)):
            raise DomainError("ball center must be finite")
        if not (math.isfinite(self.radius) and self.radius >= 0):
            raise DomainError(f"ball radius must be finite and >= 0, got {self.radius}")
        c.flags.writeable = False
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def contains(self, x, slack: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return float(np.linalg.norm(x - self.center)) <= self.radius + slack


@dataclass(frozen=True)
class IntrinsicVolumes:
    """The vector (V_0, ..., V_d) with one standard error per entry.

    Exact computations carry stderr identically zero. V_0 is the Euler
    characteristic: 1 for a nonempty body, 0 for the empty set.
    """

    dim: int
    values: np.ndarray
    stderr: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        d = _check_int(self.dim, "dim")
        vals = np.asarray(self.values, dtype=float).reshape(-1).copy()
        if vals.shape[0] != d + 1:
            raise DomainError(f"need d+1 = {d + 1} values, got {vals.shape[0]}")
        err = self.stderr
        err = np.zeros(d + 1) if err is None else np.asarray(err, dtype=float).reshape(-1).copy()
        if err.shape[0] != d + 1 or np.any(err < 0):
            raise DomainError("stderr must be d+1 nonnegative reals")
        if vals[0] not in (0.0, 1.0):
            raise DomainError(f"V_0 must be 0 or 1, got {vals[0]}")
        floor = -1e-9 * max(1.0, float(np.abs(vals).max()))
        if np.any(vals < floor):
            raise DomainError(f"intrinsic volumes must be nonnegative, got {vals}")
        vals[vals < 0] = 0.0
        vals.flags.writeable = False
        err.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "stderr", err)

    def __getitem__(self, k: int) -> float:
        return float(self.values[k])

    def to_json(self) -> str:
        return json.dumps(
            {"dim": self.dim, "values": self.values.tolist(), "stderr": self.stderr.tolist()}
        )

    @classmethod
    def from_json(cls, text: str) -> "IntrinsicVolumes":
        obj = json.loads(text)
        return cls(obj["dim"], obj["values"], obj["stderr"])


def diameter(S: PointSet) -> float:
    """Largest pairwise distance; 0 for a single point."""
    pts = S.points
    n = len(pts)
    if n == 1:
        return 0.0
    best = 0.0
    step = max(1, 2_000_000 // max(1, n))
    for lo in range(0, n, step):
        block = pts[lo : lo + step]
        d2 = np.sum((block[:, None, :] - pts[None, :, :]) ** 2, axis=2)
        best = max(best, float(d2.max()))
    return math.sqrt(best)


def min_pairwise_distance(S: PointSet) -> float:
    """Smallest distance between two distinct labels; requires N >= 2."""
    pts = S.points
    n = len(pts)
    if n < 2:
        raise DomainError("min_pairwise_distance requires at least 2 points")
    best = math.inf
    step = max(1, 2_000_000 // n)
    for lo in range(0, n, step):
        block = pts[lo : lo + step]
        d2 = np.sum((block[:, None, :] - pts[None, :, :]) ** 2, axis=2)
        rows = np.arange(lo, min(lo + step, n))
        d2[rows - lo, rows] = np.inf
        best = min(best, float(d2.min()))
    return math.sqrt(best)


def sample_in_ball(rng: np.random.Generator, n: int, d: int, radius: float) -> np.ndarray:
    """n points uniform in the closed d-ball, rejection-sampled from the cube.

    Accepts only strictly interior draws (margin 1e-12) so downstream exact
    diameter comparisons cannot be tipped over by rounding.
    """
    out = np.empty((n, d))
    have = 0
    while have < n:
        cand = rng.uniform(-1.0, 1.0, size=(max(2 * (n - have), 16), d))
        keep = cand[np.einsum("ij,ij->i", cand, cand) <= (1.0 - 1e-12) ** 2]
        take = min(len(keep), n - have)
        out[have : have + take] = keep[:take]
        have += take
    return out * radius


def _circumsphere(support: list[np.ndarray]) -> tuple[np.ndarray | None, float]:
    """Smallest ball with every support point on its boundary.

    Returns (center, squared radius); (None, -inf) for empty support.
    """
    k = len(support)
    if k == 0:
        return None, -math.inf
    q0 = support[0]
    if k == 1:
        return q0, 0.0
    U = np.array([q - q0 for q in support[1:]])
    gram = 2.0 * (U @ U.T)
    rhs = np.einsum("ij,ij->i", U, U)
    try:
        coef = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        coef = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    x = coef @ U
    return q0 + x, float(x @ x)


def _mtf_ball(pts: list[np.ndarray], end: int, support: list[np.ndarray], d: int):
    """Move-to-front recursion: ball of pts[:end] with `support` on the boundary."""
    center, r2 = _circumsphere(support)
    if len(support) == d + 1:
        return center, r2
    i = 0
    while i < end:
        p = pts[i]
        if center is None or float(np.dot(p - center, p - center)) > r2 * (1.0 + _MEB_REL_TOL):
            center, r2 = _mtf_ball(pts, i, support + [p], d)
            pts.insert(0, pts.pop(i))
        i += 1
    return center, r2


def min_enclosing_ball(S: PointSet, seed: int = 0) -> Ball:
    """The unique smallest ball containing S (circumradius and circumcenter).

    Randomized move-to-front recursion over support sets of at most d+1
    points; the shuffle is seeded so runs are reproducible. Exact
    small-dimension path, d <= 10.
    """
    pts = S.points
    n, d = pts.shape
    if d > 10:
        raise DomainError(f"exact minimal enclosing ball supports d <= 10, got {d}")
    if n == 1:
        return Ball(pts[0], 0.0)
    order = np.random.default_rng(seed).permutation(n)
    work = [pts[i] for i in order]
    center, r2 = _mtf_ball(work, n, [], d)
    radius = math.sqrt(max(r2, 0.0))
    _certify_meb(pts, center, radius)
    return Ball(center, radius)


def _certify_meb(pts: np.ndarray, center: np.ndarray, radius: float) -> None:
    dist = np.linalg.norm(pts - center, axis=1)
    scale = max(radius, float(np.abs(pts).max()), 1e-300)
    if float(dist.max()) > radius * (1.0 + 1e-9) + scale * 1e-12:
        raise AssertionError(
            f"minimal enclosing ball certification failed: point at {dist.max()} > radius {radius}"
        )
    on_boundary = int(np.sum(np.abs(dist - radius) <= 1e-7 * scale))
    if on_boundary < 2:
        raise AssertionError(
            f"minimal enclosing ball certification failed: {on_boundary} support points"
        )
