"""Convex 2-D geometry kernel.

Convex polygons with half-plane clipping, box intersection, Minkowski sums,
convex hulls, Voronoi cell construction, signed distance functions and
clipping of cells to implicitly described domains.  All operations are pure
functions of their inputs; polygons are immutable after construction.

The empty polygon is a first-class value: clipping may legitimately
annihilate a polygon and downstream code treats that as "no overlap",
never as an error.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

# Relative tolerance for geometric predicates (scaled by local feature size)
GEOM_RTOL = 1e-10
# Absolute tolerance for root finding on implicit boundaries
ROOT_ATOL = 1e-12
_MAX_BISECT = 100


class GeometryError(ValueError):
    """Invalid geometric input."""


class DegenerateInput(GeometryError):
    """Input is degenerate (e.g. collinear points for a hull)."""


# ---------------------------------------------------------------------------
# Convex polygon
# ---------------------------------------------------------------------------

class ConvexPolygon:
    """Convex polygon with counter-clockwise vertices.

    Vertices are stored as an (n, 2) float array.  A polygon with no
    vertices is the explicit Empty state.  Use :meth:`from_points` to
    orient and validate arbitrary input; the plain constructor trusts
    its input (it is the hot path of the clipping routines).
    """

    __slots__ = ("vertices", "_area", "_centroid")

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.size == 0:
            v = np.empty((0, 2))
        self.vertices = v
        self._area = None
        self._centroid = None

    @classmethod
    def from_points(cls, points) -> "ConvexPolygon":
        """Build a CCW convex polygon from vertices given in any rotation order."""
        v = np.asarray(points, dtype=float)
        if len(v) < 3:
            raise DegenerateInput("polygon needs at least 3 vertices")
        if _signed_area(v) < 0.0:
            v = v[::-1]
        poly = cls(v)
        poly.validate()
        return poly

    # -- basic measures ----------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    @property
    def area(self) -> float:
        if self._area is None:
            self._area = _signed_area(self.vertices) if len(self.vertices) >= 3 else 0.0
        return self._area

    @property
    def centroid(self) -> np.ndarray:
        if self._centroid is None:
            self._centroid = _centroid(self.vertices)
        return self._centroid

    @property
    def diameter(self) -> float:
        if self.is_empty:
            return 0.0
        v = self.vertices
        lo = v.min(axis=0)
        hi = v.max(axis=0)
        return float(math.hypot(hi[0] - lo[0], hi[1] - lo[1]))

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        v = self.vertices
        return v.min(axis=0), v.max(axis=0)

    def edges(self):
        """Yield (v0, v1) pairs in CCW order."""
        v = self.vertices
        n = len(v)
        for i in range(n):
            yield v[i], v[(i + 1) % n]

    def contains(self, p, tol: float = 0.0) -> bool:
        """Point-in-polygon test; ``tol > 0`` accepts points slightly outside."""
        if self.is_empty:
            return False
        v = self.vertices
        w = np.roll(v, -1, axis=0) - v
        q = np.asarray(p, dtype=float) - v
        cross = w[:, 0] * q[:, 1] - w[:, 1] * q[:, 0]
        return bool((cross >= -tol).all())

    def contains_many(self, pts, tol: float = 0.0) -> np.ndarray:
        """Vectorized containment for an (m, 2) array of points."""
        pts = np.asarray(pts, dtype=float)
        if self.is_empty:
            return np.zeros(len(pts), dtype=bool)
        v = self.vertices
        w = np.roll(v, -1, axis=0) - v
        dx = pts[:, None, 0] - v[None, :, 0]
        dy = pts[:, None, 1] - v[None, :, 1]
        cross = w[None, :, 0] * dy - w[None, :, 1] * dx
        return (cross >= -tol).all(axis=1)

    def validate(self, rtol: float = GEOM_RTOL) -> None:
        """Check convexity, orientation and vertex separation."""
        v = self.vertices
        if len(v) < 3:
            raise DegenerateInput("fewer than 3 vertices")
        L = self.diameter
        e = np.roll(v, -1, axis=0) - v
        if (np.hypot(e[:, 0], e[:, 1]) < rtol * L).any():
            raise GeometryError("duplicate vertices")
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        if (cross < -rtol * L * L).any():
            raise GeometryError("polygon is not convex CCW")
        if self.area <= 0.0:
            raise GeometryError("non-positive area")

    def translated(self, d) -> "ConvexPolygon":
        if self.is_empty:
            return EMPTY
        return ConvexPolygon(self.vertices + np.asarray(d, dtype=float))

    def __repr__(self):
        if self.is_empty:
            return "ConvexPolygon(empty)"
        return f"ConvexPolygon({len(self.vertices)} vertices, area={self.area:.6g})"


EMPTY = ConvexPolygon(np.empty((0, 2)))


def _signed_area(v: np.ndarray) -> float:
    if len(v) < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    return 0.5 * float(np.sum(x * yn - xn * y))


def _centroid(v: np.ndarray) -> np.ndarray:
    if len(v) == 0:
        return np.zeros(2)
    if len(v) < 3:
        return v.mean(axis=0)
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    c = x * yn - xn * y
    a = 0.5 * np.sum(c)
    if abs(a) < 1e-300:
        return v.mean(axis=0)
    cx = np.sum((x + xn) * c) / (6.0 * a)
    cy = np.sum((y + yn) * c) / (6.0 * a)
    return np.array([cx, cy])


# ---------------------------------------------------------------------------
# Half-planes and boxes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HalfPlane:
    """Half-plane {p : normal . p <= offset} with unit normal."""

    normal: tuple[float, float]
    offset: float

    @classmethod
    def make(cls, normal, offset: float) -> "HalfPlane":
        nx, ny = float(normal[0]), float(normal[1])
        nn = math.hypot(nx, ny)
        if nn == 0.0:
            raise GeometryError("zero normal")
        return cls((nx / nn, ny / nn), float(offset) / nn)

    @classmethod
    def bisector(cls, keep, other) -> "HalfPlane":
        """Half-plane of points at least as close to ``keep`` as to ``other``."""
        kx, ky = float(keep[0]), float(keep[1])
        ox, oy = float(other[0]), float(other[1])
        nx, ny = ox - kx, oy - ky
        nn = math.hypot(nx, ny)
        if nn == 0.0:
            raise GeometryError("bisector of coincident points")
        nx, ny = nx / nn, ny / nn
        mx, my = 0.5 * (kx + ox), 0.5 * (ky + oy)
        return cls((nx, ny), nx * mx + ny * my)


@dataclass(frozen=True)
class Box:
    """Axis-aligned square given by its center and halfwidth."""

    center: tuple[float, float]
    halfwidth: float

    def __post_init__(self):
        if self.halfwidth <= 0.0:
            raise GeometryError("box halfwidth must be positive")

    @property
    def lo(self) -> tuple[float, float]:
        return (self.center[0] - self.halfwidth, self.center[1] - self.halfwidth)

    @property
    def hi(self) -> tuple[float, float]:
        return (self.center[0] + self.halfwidth, self.center[1] + self.halfwidth)

    def as_polygon(self) -> ConvexPolygon:
        (x0, y0), (x1, y1) = self.lo, self.hi
        return ConvexPolygon([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])

    def contains(self, p, tol: float = 0.0) -> bool:
        (x0, y0), (x1, y1) = self.lo, self.hi
        return (x0 - tol <= p[0] <= x1 + tol) and (y0 - tol <= p[1] <= y1 + tol)


# ---------------------------------------------------------------------------
# Clipping
# ---------------------------------------------------------------------------

def _clip_signed(poly: ConvexPolygon, d: np.ndarray) -> ConvexPolygon:
    """Clip ``poly`` to {d <= 0} given per-vertex signed values ``d``."""
    v = poly.vertices
    n = len(v)
    out_x: list[float] = []
    out_y: list[float] = []
    for i in range(n):
        j = i + 1 if i + 1 < n else 0
        di, dj = d[i], d[j]
        if di <= 0.0:
            out_x.append(v[i, 0])
            out_y.append(v[i, 1])
        if (di < 0.0 < dj) or (dj < 0.0 < di):
            t = di / (di - dj)
            out_x.append(v[i, 0] + t * (v[j, 0] - v[i, 0]))
            out_y.append(v[i, 1] + t * (v[j, 1] - v[i, 1]))
    if len(out_x) < 3:
        return EMPTY
    return _cleaned(np.column_stack([out_x, out_y]))


def _cleaned(v: np.ndarray) -> ConvexPolygon:
    """Drop near-duplicate consecutive vertices and snap slivers to Empty."""
    lo = v.min(axis=0)
    hi = v.max(axis=0)
    L = math.hypot(hi[0] - lo[0], hi[1] - lo[1])
    if L == 0.0:
        return EMPTY
    keep = [0]
    tol = GEOM_RTOL * L
    for i in range(1, len(v)):
        p = v[keep[-1]]
        if math.hypot(v[i, 0] - p[0], v[i, 1] - p[1]) > tol:
            keep.append(i)
    # first/last may coincide
    if len(keep) > 1:
        p, q = v[keep[0]], v[keep[-1]]
        if math.hypot(p[0] - q[0], p[1] - q[1]) <= tol:
            keep.pop()
    if len(keep) < 3:
        return EMPTY
    poly = ConvexPolygon(v[keep])
    if poly.area < GEOM_RTOL * L * L:
        return EMPTY
    return poly


def clip_halfplane(poly: ConvexPolygon, half: HalfPlane) -> ConvexPolygon:
    """Intersect a convex polygon with a half-plane; may return Empty."""
    if poly.is_empty:
        return EMPTY
    v = poly.vertices
    d = v[:, 0] * half.normal[0] + v[:, 1] * half.normal[1] - half.offset
    if (d <= 0.0).all():
        return poly
    if (d >= 0.0).all():
        return EMPTY
    return _clip_signed(poly, d)


def intersect_box(poly: ConvexPolygon, box: Box) -> ConvexPolygon:
    """Boolean intersection of a convex polygon with an axis-aligned box."""
    if poly.is_empty:
        return EMPTY
    (x0, y0), (x1, y1) = box.lo, box.hi
    v = poly.vertices
    plo = v.min(axis=0)
    phi = v.max(axis=0)
    if plo[0] >= x1 or phi[0] <= x0 or plo[1] >= y1 or phi[1] <= y0:
        return EMPTY
    if plo[0] >= x0 and phi[0] <= x1 and plo[1] >= y0 and phi[1] <= y1:
        return poly
    out = poly
    for normal, offset in (((1.0, 0.0), x1), ((-1.0, 0.0), -x0),
                           ((0.0, 1.0), y1), ((0.0, -1.0), -y0)):
        v = out.vertices
        d = v[:, 0] * normal[0] + v[:, 1] * normal[1] - offset
        if (d > 0.0).any():
            if (d >= 0.0).all():
                return EMPTY
            out = _clip_signed(out, d)
            if out.is_empty:
                return EMPTY
    return out


def clip_axis_strip(poly: ConvexPolygon, axis: int, lo: float, hi: float) -> ConvexPolygon:
    """Intersect a polygon with the strip lo <= x[axis] <= hi."""
    if poly.is_empty:
        return EMPTY
    v = poly.vertices
    vmin = v[:, axis].min()
    vmax = v[:, axis].max()
    if vmin >= hi or vmax <= lo:
        return EMPTY
    out = poly
    if vmax > hi:
        out = _clip_signed(out, out.vertices[:, axis] - hi)
        if out.is_empty:
            return EMPTY
    if vmin < lo:
        out = _clip_signed(out, lo - out.vertices[:, axis])
    return out


# ---------------------------------------------------------------------------
# Convex hull and Minkowski sum
# ---------------------------------------------------------------------------

def convex_hull(points, eps_rel: float = 1e-14) -> ConvexPolygon:
    """Convex hull of a point set (Andrew monotone chain), CCW output.

    The collinearity tolerance must stay near machine scale: clusters of
    nearly identical coordinates (1-ulp apart) produce cross products far
    below any geometric tolerance, and a loose threshold can pop genuinely
    extreme vertices.  Raises :class:`DegenerateInput` for collinear input.
    """
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if len(pts) < 3:
        raise DegenerateInput("need at least 3 distinct points")
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    L = math.hypot(hi[0] - lo[0], hi[1] - lo[1])
    eps = eps_rel * L * L

    def half(iterable):
        chain: list[np.ndarray] = []
        for p in iterable:
            while len(chain) >= 2:
                o, a = chain[-2], chain[-1]
                if (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0]) <= eps:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(pts[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateInput("points are collinear")
    return ConvexPolygon(np.array(hull))


def minkowski_sum(poly: ConvexPolygon, box: Box) -> ConvexPolygon:
    """Minkowski sum of a convex polygon with a box centered at the origin.

    The box's stored center is ignored; the sum dilates the polygon by the
    box halfwidth in each axis direction.  Candidate vertex sums are
    quantized to a fine relative grid so that 1-ulp coordinate clusters
    collapse before the hull is taken.
    """
    if poly.is_empty:
        raise GeometryError("Minkowski sum of empty polygon")
    w = box.halfwidth
    corners = np.array([[-w, -w], [w, -w], [w, w], [-w, w]])
    pts = (poly.vertices[:, None, :] + corners[None, :, :]).reshape(-1, 2)
    q = 1e-12 * max(poly.diameter + 2.0 * w, 1e-30)
    pts = np.round(pts / q) * q
    return convex_hull(pts)


# ---------------------------------------------------------------------------
# Voronoi diagrams
# ---------------------------------------------------------------------------

INTERIOR = "interior"
CUT = "cut"
GHOST = "ghost"
EXTERIOR = "exterior"


@dataclass
class VoronoiDiagram:
    """Voronoi cells of a seed set, clipped to a bounding box."""

    seeds: np.ndarray                  # (n, 2)
    cells: list[ConvexPolygon]         # one per seed
    labels: list[str] | None = None    # interior | cut | ghost | exterior


def voronoi(seeds, bounds: Box) -> VoronoiDiagram:
    """Voronoi cells by successive bisector clipping against ``bounds``.

    O(n^2) with a nearest-first early exit: once the remaining candidate
    seeds are farther than twice the current cell radius they cannot cut
    the cell any more.
    """
    seeds = np.asarray(seeds, dtype=float)
    if seeds.ndim != 2 or seeds.shape[1] != 2 or len(seeds) == 0:
        raise GeometryError("seeds must be a non-empty (n, 2) array")
    d2 = np.sum((seeds[:, None, :] - seeds[None, :, :]) ** 2, axis=-1)
    np.fill_diagonal(d2, np.inf)
    scale = max(bounds.halfwidth, 1.0)
    if len(seeds) > 1 and d2.min() < (GEOM_RTOL * scale) ** 2:
        i, j = np.unravel_index(np.argmin(d2), d2.shape)
        raise GeometryError(f"duplicate seeds {i} and {j}")
    base = bounds.as_polygon()
    cells = []
    for i, si in enumerate(seeds):
        cell = base
        order = np.argsort(d2[i])
        dists = np.sqrt(d2[i][order])
        for j, dij in zip(order, dists):
            if j == i or not np.isfinite(dij):
                continue
            v = cell.vertices
            rmax2 = np.max((v[:, 0] - si[0]) ** 2 + (v[:, 1] - si[1]) ** 2)
            if dij * dij > 4.0 * rmax2:
                break
            cell = clip_halfplane(cell, HalfPlane.bisector(si, seeds[j]))
            if cell.is_empty:
                break
        cells.append(cell)
    return VoronoiDiagram(seeds=seeds, cells=cells)


def classify_cells(vd: VoronoiDiagram, sdf: "SignedDistance") -> VoronoiDiagram:
    """Label every cell interior / cut / exterior from vertex signed distances.

    Ghost labelling (exterior cells that still carry basis functions) is the
    mesh builder's job; here exterior simply means "no vertex inside".
    """
    labels = []
    for cell in vd.cells:
        labels.append(classify_polygon(cell, sdf))
    return VoronoiDiagram(seeds=vd.seeds, cells=vd.cells, labels=labels)


def classify_polygon(cell: ConvexPolygon, sdf: "SignedDistance") -> str:
    if cell.is_empty:
        return EXTERIOR
    phi = sdf.value_many(cell.vertices)
    tol = 1e-9 * max(cell.diameter, 1e-30)
    if (phi >= -tol).all():
        return INTERIOR
    if (phi <= tol).all():
        return EXTERIOR
    return CUT


def clip_cell_to_domain(cell: ConvexPolygon, sdf: "SignedDistance") -> ConvexPolygon:
    """Clip a cut cell to {phi >= 0}: keep inside vertices, add edge roots.

    Edge/boundary intersection points are found by bisection; the clipped
    cell is the convex hull of inside vertices and intersection points.
    """
    if cell.is_empty:
        return EMPTY
    v = cell.vertices
    phi = sdf.value_many(v)
    tol = 1e-9 * max(cell.diameter, 1e-30)
    pts = [v[i] for i in range(len(v)) if phi[i] >= -tol]
    n = len(v)
    for i in range(n):
        j = (i + 1) % n
        if (phi[i] > tol and phi[j] < -tol) or (phi[i] < -tol and phi[j] > tol):
            pts.append(_edge_root(v[i], v[j], phi[i], phi[j], sdf))
    if len(pts) < 3:
        return EMPTY
    try:
        clipped = convex_hull(np.array(pts))
    except DegenerateInput:
        return EMPTY
    if clipped.area < GEOM_RTOL * max(cell.diameter, 1e-30) ** 2:
        return EMPTY
    return clipped


def _edge_root(a, b, fa, fb, sdf) -> np.ndarray:
    ta, tb = 0.0, 1.0
    length = math.hypot(b[0] - a[0], b[1] - a[1])
    for _ in range(_MAX_BISECT):
        tm = 0.5 * (ta + tb)
        pm = a + tm * (b - a)
        fm = sdf.value(pm)
        if abs(fm) <= ROOT_ATOL or (tb - ta) * length <= ROOT_ATOL:
            return pm
        if (fa < 0.0) == (fm < 0.0):
            ta, fa = tm, fm
        else:
            tb, fb = tm, fm
    return a + 0.5 * (ta + tb) * (b - a)


# ---------------------------------------------------------------------------
# Triangulation
# ---------------------------------------------------------------------------

def triangulate(poly: ConvexPolygon) -> list[np.ndarray]:
    """Centroid fan: one positively oriented triangle per polygon edge."""
    if poly.is_empty:
        raise GeometryError("cannot triangulate empty polygon")
    c = poly.centroid
    v = poly.vertices
    n = len(v)
    return [np.array([c, v[i], v[(i + 1) % n]]) for i in range(n)]


# ---------------------------------------------------------------------------
# Signed distance functions
# ---------------------------------------------------------------------------

class SignedDistance:
    """Implicit domain description: phi > 0 inside, 0 on the boundary."""

    def value(self, p) -> float:
        raise NotImplementedError

    def gradient(self, p) -> np.ndarray:
        raise NotImplementedError

    def value_many(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return np.array([self.value(p) for p in pts])

    def project_to_boundary(self, p, direction, max_dist: float):
        """Nearest phi = 0 point from ``p`` along +-``direction``, or None.

        Scans symmetric brackets on both sides of ``p`` and bisects the
        closest sign change within ``max_dist``.
        """
        p = np.asarray(p, dtype=float)
        d = np.asarray(direction, dtype=float)
        nd = math.hypot(d[0], d[1])
        if nd == 0.0:
            return None
        d = d / nd
        f0 = self.value(p)
        nstep = 16
        for k in range(1, nstep + 1):
            t = max_dist * k / nstep
            for s in (+1.0, -1.0):
                ft = self.value(p + s * t * d)
                if f0 == 0.0:
                    return p
                if (f0 < 0.0) != (ft < 0.0):
                    a = p + s * max_dist * (k - 1) / nstep * d
                    b = p + s * t * d
                    fa = self.value(a)
                    return _edge_root(a, b, fa, ft, self)
        return None


class HalfPlaneDomain(SignedDistance):
    """Domain {n . p <= offset}: exact signed distance to the line."""

    def __init__(self, normal, offset: float):
        h = HalfPlane.make(normal, offset)
        self.normal = np.array(h.normal)
        self.offset = h.offset

    def value(self, p) -> float:
        return self.offset - float(self.normal[0] * p[0] + self.normal[1] * p[1])

    def value_many(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return self.offset - pts @ self.normal

    def gradient(self, p) -> np.ndarray:
        return -self.normal


class CircleDomain(SignedDistance):
    """Disc of given center/radius; ``inside=False`` keeps the exterior."""

    def __init__(self, center, radius: float, inside: bool = True):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.sign = 1.0 if inside else -1.0

    def value(self, p) -> float:
        r = math.hypot(p[0] - self.center[0], p[1] - self.center[1])
        return self.sign * (self.radius - r)

    def value_many(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        r = np.hypot(pts[:, 0] - self.center[0], pts[:, 1] - self.center[1])
        return self.sign * (self.radius - r)

    def gradient(self, p) -> np.ndarray:
        d = np.asarray(p, dtype=float) - self.center
        r = math.hypot(d[0], d[1])
        if r == 0.0:
            return np.array([self.sign, 0.0])
        return -self.sign * d / r


class BoxSDF(SignedDistance):
    """Exact signed distance to an axis-aligned rectangle [lo, hi]."""

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)

    def value(self, p) -> float:
        p = np.asarray(p, dtype=float)
        inside = np.minimum(p - self.lo, self.hi - p)
        m = inside.min()
        if m >= 0.0:
            return float(m)
        out = np.maximum(np.maximum(self.lo - p, p - self.hi), 0.0)
        return -float(math.hypot(out[0], out[1]))

    def value_many(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        inside = np.minimum(pts - self.lo, self.hi - pts).min(axis=1)
        out = np.maximum(np.maximum(self.lo - pts, pts - self.hi), 0.0)
        dist_out = np.hypot(out[:, 0], out[:, 1])
        return np.where(inside >= 0.0, inside, -dist_out)

    def gradient(self, p) -> np.ndarray:
        # gradient of phi: points towards the interior feature axis
        p = np.asarray(p, dtype=float)
        d = np.array([p[0] - self.lo[0], self.hi[0] - p[0],
                      p[1] - self.lo[1], self.hi[1] - p[1]])
        if d.min() >= 0.0:
            k = int(np.argmin(d))
            return np.array([[1.0, 0], [-1.0, 0], [0, 1.0], [0, -1.0]])[k]
        eps = 1e-7 * max(1.0, float(np.max(self.hi - self.lo)))
        gx = (self.value(p + [eps, 0]) - self.value(p - [eps, 0])) / (2 * eps)
        gy = (self.value(p + [0, eps]) - self.value(p - [0, eps])) / (2 * eps)
        return np.array([gx, gy])


class PolygonSDF(SignedDistance):
    """Exact signed distance to a convex polygon boundary (inside positive)."""

    def __init__(self, poly: ConvexPolygon):
        self.poly = poly

    def value(self, p) -> float:
        p = np.asarray(p, dtype=float)
        d = min(_point_segment_distance(p, a, b) for a, b in self.poly.edges())
        return d if self.poly.contains(p) else -d

    def gradient(self, p) -> np.ndarray:
        eps = 1e-7 * max(1.0, self.poly.diameter)
        gx = (self.value(p + np.array([eps, 0.0])) - self.value(p - np.array([eps, 0.0]))) / (2 * eps)
        gy = (self.value(p + np.array([0.0, eps])) - self.value(p - np.array([0.0, eps]))) / (2 * eps)
        return np.array([gx, gy])


class Intersection(SignedDistance):
    """min of children: intersection of domains."""

    def __init__(self, *children: SignedDistance):
        self.children = children

    def value(self, p) -> float:
        return min(c.value(p) for c in self.children)

    def value_many(self, pts) -> np.ndarray:
        return np.minimum.reduce([c.value_many(pts) for c in self.children])

    def gradient(self, p) -> np.ndarray:
        k = int(np.argmin([c.value(p) for c in self.children]))
        return self.children[k].gradient(p)


class Union(SignedDistance):
    """max of children: union of domains."""

    def __init__(self, *children: SignedDistance):
        self.children = children

    def value(self, p) -> float:
        return max(c.value(p) for c in self.children)

    def value_many(self, pts) -> np.ndarray:
        return np.maximum.reduce([c.value_many(pts) for c in self.children])

    def gradient(self, p) -> np.ndarray:
        k = int(np.argmax([c.value(p) for c in self.children]))
        return self.children[k].gradient(p)


class Complement(SignedDistance):
    def __init__(self, child: SignedDistance):
        self.child = child

    def value(self, p) -> float:
        return -self.child.value(p)

    def value_many(self, pts) -> np.ndarray:
        return -self.child.value_many(pts)

    def gradient(self, p) -> np.ndarray:
        return -self.child.gradient(p)


def _point_segment_distance(p, a, b) -> float:
    ab = b - a
    t = float(np.dot(p - a, ab))
    den = float(np.dot(ab, ab))
    if den > 0.0:
        t = min(max(t / den, 0.0), 1.0)
    else:
        t = 0.0
    q = a + t * ab
    return math.hypot(p[0] - q[0], p[1] - q[1])


# ---------------------------------------------------------------------------
# CSV interfaces
# ---------------------------------------------------------------------------

def seeds_to_csv(seeds, path) -> None:
    """Write seeds as CSV with header ``x,y``."""
    seeds = np.asarray(seeds, dtype=float)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["x", "y"])
        for s in seeds:
            w.writerow([repr(float(s[0])), repr(float(s[1]))])


def seeds_from_csv(path) -> np.ndarray:
    """Read seeds from a CSV file with header ``x,y``."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        if [h.strip().lower() for h in header[:2]] != ["x", "y"]:
            raise GeometryError(f"bad seed CSV header: {header!r}")
        rows = [(float(r[0]), float(r[1])) for r in reader if r]
    if not rows:
        raise GeometryError("empty seed file")
    return np.array(rows)


def polygon_to_csv(poly: ConvexPolygon, path) -> None:
    """Dump polygon vertices (CCW) as CSV for debugging/plotting."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["x", "y"])
        for v in poly.vertices:
            w.writerow([repr(float(v[0])), repr(float(v[1]))])
