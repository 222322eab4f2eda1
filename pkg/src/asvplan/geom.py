"""2-D computational geometry for planar (North, East) workspaces.

Points are ``(x, y)`` pairs in meters, x pointing North and y pointing
East.  All predicates treat polygon boundaries as *inside* (conservative
for collision checking) and use a fixed 1e-9 m epsilon in orientation
tests instead of exact arithmetic; map coordinates at O(10^3) m leave
ample double-precision headroom for that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, OutOfBoundsError

# Orientation / on-boundary tolerance in meters.
EPS = 1e-9

PointLike = "tuple[float, float] | np.ndarray"


def _as_point(p) -> np.ndarray:
    a = np.asarray(p, dtype=float).reshape(2)
    if not np.all(np.isfinite(a)):
        raise InputError(f"non-finite point {p!r}")
    return a


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle, the workspace boundary."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self):
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise InputError(f"empty rectangle {self}")

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)

    def contains(self, p, tol: float = EPS) -> bool:
        x, y = _as_point(p)
        return (self.xmin - tol <= x <= self.xmax + tol
                and self.ymin - tol <= y <= self.ymax + tol)

    def corners(self) -> np.ndarray:
        """Counter-clockwise corners starting at (xmin, ymin)."""
        return np.array([
            [self.xmin, self.ymin],
            [self.xmax, self.ymin],
            [self.xmax, self.ymax],
            [self.xmin, self.ymax],
        ])


class Polygon:
    """Simple polygon, implicitly closed, canonicalized to CCW winding.

    Raises InputError for fewer than 3 vertices, repeated consecutive
    vertices, zero area, or self-intersection.
    """

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise InputError("polygon needs >= 3 (x, y) vertices")
        if not np.all(np.isfinite(v)):
            raise InputError("polygon has non-finite vertices")
        # Drop a duplicated closing vertex if the caller passed one.
        if np.allclose(v[0], v[-1], atol=EPS) and v.shape[0] > 3:
            v = v[:-1]
        d = np.linalg.norm(np.diff(np.vstack([v, v[:1]]), axis=0), axis=1)
        if np.any(d < EPS):
            raise InputError("polygon has repeated consecutive vertices")
        area2 = _signed_area2(v)
        if abs(area2) < EPS:
            raise InputError("polygon has (near) zero area")
        if area2 < 0:
            v = v[::-1].copy()
        self.vertices = v
        self.vertices.setflags(write=False)
        if _self_intersects(v):
            raise InputError("polygon is self-intersecting")

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"Polygon({len(self.vertices)} vertices)"

    @property
    def edges(self) -> np.ndarray:
        """(n, 2, 2) array of [start, end] per boundary edge."""
        v = self.vertices
        return np.stack([v, np.roll(v, -1, axis=0)], axis=1)

    @property
    def area(self) -> float:
        return 0.5 * _signed_area2(self.vertices)

    @property
    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    @property
    def perimeter(self) -> float:
        v = self.vertices
        return float(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1).sum())


@dataclass
class PolygonMap:
    """Planning world: a rectangular workspace with polygonal obstacles."""

    bounds: Rect
    obstacles: list[Polygon] = field(default_factory=list)
    safety_margin: float = 0.0

    def __post_init__(self):
        if self.safety_margin < 0:
            raise InputError("safety_margin must be >= 0")
        for i, poly in enumerate(self.obstacles):
            for j, v in enumerate(poly.vertices):
                if not self.bounds.contains(v):
                    raise InputError(
                        f"obstacle {i} vertex {j} at ({v[0]:g}, {v[1]:g}) "
                        "lies outside the map bounds")
        for i in range(len(self.obstacles)):
            for j in range(i + 1, len(self.obstacles)):
                if _polygons_overlap(self.obstacles[i], self.obstacles[j]):
                    raise InputError(f"obstacles {i} and {j} overlap")


# ---------------------------------------------------------------------------
# Scalar predicates
# ---------------------------------------------------------------------------

def point_in_polygon(p, poly: Polygon) -> bool:
    """True iff p is strictly inside poly or on its boundary."""
    pt = _as_point(p)
    return bool(points_in_polygon(pt[None, :], poly)[0])


def points_in_polygon(pts: np.ndarray, poly: Polygon) -> np.ndarray:
    """Vectorized point_in_polygon over an (m, 2) array."""
    pts = np.asarray(pts, dtype=float)
    a = poly.vertices
    b = np.roll(a, -1, axis=0)
    x, y = pts[:, 0:1], pts[:, 1:2]            # (m, 1)
    ax, ay = a[:, 0], a[:, 1]                   # (n,)
    bx, by = b[:, 0], b[:, 1]

    # Crossing-number test, half-open in y to count each crossing once.
    cond = (ay > y) != (by > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = ax + (y - ay) * (bx - ax) / (by - ay)
    inside = (np.sum(cond & (x < x_cross), axis=1) % 2) == 1

    on_boundary = _dist_points_to_edges(pts, a, b).min(axis=1) <= EPS
    return inside | on_boundary


def distance_point_segment(p, a, b) -> float:
    """Euclidean distance from p to the closed segment ab."""
    p, a, b = _as_point(p), _as_point(a), _as_point(b)
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.linalg.norm(p - a))
    t = min(1.0, max(0.0, float((p - a) @ ab) / denom))
    return float(np.linalg.norm(p - (a + t * ab)))


def polygon_distance(p, poly: Polygon) -> float:
    """Distance from p to the polygon: 0 if inside, else boundary distance."""
    pt = _as_point(p)
    if points_in_polygon(pt[None, :], poly)[0]:
        return 0.0
    a = poly.vertices
    return float(_dist_points_to_edges(pt[None, :], a, np.roll(a, -1, axis=0)).min())


def segment_collision_free(a, b, pmap: PolygonMap) -> bool:
    """True iff segment ab clears every obstacle by >= safety_margin.

    Crossing an obstacle boundary, or an endpoint inside an (inflated)
    obstacle, counts as a collision irrespective of the margin.
    Raises OutOfBoundsError if an endpoint leaves the workspace.
    """
    a, b = _as_point(a), _as_point(b)
    for name, p in (("a", a), ("b", b)):
        if not pmap.bounds.contains(p):
            raise OutOfBoundsError(
                f"segment endpoint {name}=({p[0]:g}, {p[1]:g}) outside map bounds")
    return bool(segments_collision_free(a[None, :], b[None, :], pmap)[0])


def segments_collision_free(starts: np.ndarray, ends: np.ndarray,
                            pmap: PolygonMap) -> np.ndarray:
    """Vectorized segment_collision_free over (m, 2) start/end arrays.

    Bounds are not re-checked here; callers own that precondition.
    """
    starts = np.asarray(starts, dtype=float)
    ends = np.asarray(ends, dtype=float)
    free = np.ones(len(starts), dtype=bool)
    margin = pmap.safety_margin
    for poly in pmap.obstacles:
        if not np.any(free):
            break
        idx = np.flatnonzero(free)
        d = _segments_to_polygon_distance(starts[idx], ends[idx], poly)
        # Margin 0 still forbids touching: distance must be strictly
        # positive, matching the boundary-counts-as-inside convention.
        ok = (d >= margin) if margin > 0 else (d > 0.0)
        free[idx[~ok]] = False
    return free


def points_collision_free(pts: np.ndarray, pmap: PolygonMap) -> np.ndarray:
    """True per point iff it clears every inflated obstacle."""
    pts = np.asarray(pts, dtype=float)
    free = np.ones(len(pts), dtype=bool)
    for poly in pmap.obstacles:
        inside = points_in_polygon(pts, poly)
        free &= ~inside
        if pmap.safety_margin > 0:
            a = poly.vertices
            d = _dist_points_to_edges(pts, a, np.roll(a, -1, axis=0)).min(axis=1)
            free &= d >= pmap.safety_margin
    return free


def point_collision_free(p, pmap: PolygonMap) -> bool:
    return bool(points_collision_free(_as_point(p)[None, :], pmap)[0])


def boundary_samples(poly: Polygon, spacing: float) -> np.ndarray:
    """Sample the polygon perimeter with arc-length gaps <= spacing.

    All original vertices are kept and traversal order is preserved; each
    side of length L gets ceil(L / spacing) - 1 extra equispaced points.
    """
    if spacing <= 0:
        raise InputError("spacing must be > 0")
    return _sample_ring(poly.vertices, spacing)


def rect_boundary_samples(rect: Rect, spacing: float) -> np.ndarray:
    """boundary_samples for the workspace rectangle."""
    if spacing <= 0:
        raise InputError("spacing must be > 0")
    return _sample_ring(rect.corners(), spacing)


def _sample_ring(vertices: np.ndarray, spacing: float) -> np.ndarray:
    out = []
    n = len(vertices)
    for i in range(n):
        a = vertices[i]
        b = vertices[(i + 1) % n]
        length = float(np.linalg.norm(b - a))
        pieces = max(1, math.ceil(length / spacing - 1e-12))
        for k in range(pieces):
            out.append(a + (b - a) * (k / pieces))
    return np.array(out)


# ---------------------------------------------------------------------------
# Low-level kernels
# ---------------------------------------------------------------------------

def _signed_area2(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _dist_points_to_edges(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(m, n) distances from m points to n segments [a_j, b_j]."""
    ab = b - a                                     # (n, 2)
    ap = pts[:, None, :] - a[None, :, :]           # (m, n, 2)
    denom = np.einsum("nd,nd->n", ab, ab)          # (n,)
    t = np.einsum("mnd,nd->mn", ap, ab)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(denom > 0, t / denom, 0.0)
    t = np.clip(t, 0.0, 1.0)
    proj = a[None, :, :] + t[:, :, None] * ab[None, :, :]
    return np.linalg.norm(pts[:, None, :] - proj, axis=2)


def _orient(a, b, c):
    """Twice the signed area of triangle abc (positive = c left of ab)."""
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) \
        - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])


def _segments_intersect(p1, p2, q1, q2) -> np.ndarray:
    """Proper-or-touching intersection test, broadcast over leading dims."""
    o1 = _orient(p1, p2, q1)
    o2 = _orient(p1, p2, q2)
    o3 = _orient(q1, q2, p1)
    o4 = _orient(q1, q2, p2)
    proper = ((o1 > EPS) & (o2 < -EPS) | (o1 < -EPS) & (o2 > EPS)) \
        & ((o3 > EPS) & (o4 < -EPS) | (o3 < -EPS) & (o4 > EPS))
    touch = (_collinear_on(p1, p2, q1, o1) | _collinear_on(p1, p2, q2, o2)
             | _collinear_on(q1, q2, p1, o3) | _collinear_on(q1, q2, p2, o4))
    return proper | touch


def _collinear_on(a, b, p, o) -> np.ndarray:
    within = (np.minimum(a[..., 0], b[..., 0]) - EPS <= p[..., 0]) \
        & (p[..., 0] <= np.maximum(a[..., 0], b[..., 0]) + EPS) \
        & (np.minimum(a[..., 1], b[..., 1]) - EPS <= p[..., 1]) \
        & (p[..., 1] <= np.maximum(a[..., 1], b[..., 1]) + EPS)
    return (np.abs(o) <= EPS) & within


def _segments_to_polygon_distance(starts: np.ndarray, ends: np.ndarray,
                                  poly: Polygon) -> np.ndarray:
    """(m,) distance from each segment to the polygon (0 if it collides).

    Distance is 0 when the segment crosses the boundary or has an
    endpoint inside the polygon; otherwise the minimum over boundary
    edges of segment-segment distance.
    """
    a = poly.vertices
    b = np.roll(a, -1, axis=0)
    m, n = len(starts), len(a)

    p1 = starts[:, None, :]
    p2 = ends[:, None, :]
    q1 = a[None, :, :]
    q2 = b[None, :, :]
    crossing = _segments_intersect(p1, p2, q1, q2).any(axis=1)
    inside = points_in_polygon(starts, poly) | points_in_polygon(ends, poly)

    # Min of the four endpoint-to-segment distances; valid when disjoint.
    d = np.minimum.reduce([
        _dist_points_to_edges(starts, a, b).min(axis=1),
        _dist_points_to_edges(ends, a, b).min(axis=1),
        _dist_edges_to_points(starts, ends, a).min(axis=1),
        _dist_edges_to_points(starts, ends, b).min(axis=1),
    ])
    d[crossing | inside] = 0.0
    return d


def _dist_edges_to_points(starts: np.ndarray, ends: np.ndarray,
                          pts: np.ndarray) -> np.ndarray:
    """(m, n) distances from n points to m segments [starts_i, ends_i]."""
    ab = ends - starts                              # (m, 2)
    ap = pts[None, :, :] - starts[:, None, :]       # (m, n, 2)
    denom = np.einsum("md,md->m", ab, ab)
    t = np.einsum("mnd,md->mn", ap, ab)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(denom[:, None] > 0, t / denom[:, None], 0.0)
    t = np.clip(t, 0.0, 1.0)
    proj = starts[:, None, :] + t[:, :, None] * ab[:, None, :]
    return np.linalg.norm(pts[None, :, :] - proj, axis=2)


def _self_intersects(v: np.ndarray) -> bool:
    n = len(v)
    for i in range(n):
        a1, a2 = v[i], v[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue  # adjacent edges share a vertex by construction
            b1, b2 = v[j], v[(j + 1) % n]
            if _segments_intersect(a1, a2, b1, b2):
                return True
    return False


def _polygons_overlap(p: Polygon, q: Polygon) -> bool:
    if np.any(points_in_polygon(p.vertices, q)) or np.any(points_in_polygon(q.vertices, p)):
        return True
    pa = p.vertices
    pb = np.roll(pa, -1, axis=0)
    qa = q.vertices
    qb = np.roll(qa, -1, axis=0)
    hit = _segments_intersect(pa[:, None, :], pb[:, None, :],
                              qa[None, :, :], qb[None, :, :])
    return bool(np.any(hit))
