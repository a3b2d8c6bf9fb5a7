"""Quadrature rules and polygon integration drivers.

Gauss-Legendre rules on the reference interval [-1, 1], symmetric triangle
rules on the reference triangle {x, y >= 0, x + y <= 1} (classic tables for
low degrees, collapsed Gauss-Jacobi above), boundary segment rules and
quadratic curved triangles for cut cells.  Every constructed rule passes a
monomial exactness self-test.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .geometry import ConvexPolygon, SignedDistance, triangulate


class QuadratureError(ValueError):
    pass


@dataclass(frozen=True)
class Rule:
    """Quadrature rule on a reference element.

    ``points`` is (n,) for the interval [-1, 1] and (n, 2) for the
    reference triangle; weights sum to the reference measure (2 and 1/2).
    """

    points: np.ndarray
    weights: np.ndarray
    exactness_degree: int


def _selftest_interval(rule: Rule) -> None:
    if abs(rule.weights.sum() - 2.0) > 1e-14 * max(1.0, abs(rule.weights).sum()):
        raise QuadratureError("interval weights do not sum to 2")
    for d in range(rule.exactness_degree + 1):
        exact = 0.0 if d % 2 else 2.0 / (d + 1)
        got = float(np.sum(rule.weights * rule.points ** d))
        if abs(got - exact) > 1e-13 * max(1.0, abs(exact)):
            raise QuadratureError(f"interval rule fails x^{d}: {got} vs {exact}")


def _tri_monomial_exact(a: int, b: int) -> float:
    # integral of x^a y^b over the reference triangle
    return math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)


def _selftest_triangle(rule: Rule) -> None:
    if abs(rule.weights.sum() - 0.5) > 1e-14:
        raise QuadratureError("triangle weights do not sum to 1/2")
    x, y = rule.points[:, 0], rule.points[:, 1]
    for d in range(rule.exactness_degree + 1):
        for a in range(d + 1):
            b = d - a
            exact = _tri_monomial_exact(a, b)
            got = float(np.sum(rule.weights * x ** a * y ** b))
            if abs(got - exact) > 1e-13:
                raise QuadratureError(f"triangle rule fails x^{a} y^{b}: {got} vs {exact}")


@lru_cache(maxsize=None)
def gauss_interval(n: int) -> Rule:
    """n-point Gauss-Legendre rule on [-1, 1], exact to degree 2n - 1."""
    if n < 1:
        raise QuadratureError("need at least one Gauss point")
    x, w = np.polynomial.legendre.leggauss(n)
    rule = Rule(points=x, weights=w, exactness_degree=2 * n - 1)
    _selftest_interval(rule)
    return rule


def segment_rule(n: int) -> Rule:
    """Gauss rule for boundary segments, same reference as gauss_interval."""
    return gauss_interval(n)


# Symmetric triangle rules: (degree, [(weight, a, b)]) where the orbit is the
# permutations of the barycentric point (a, b, 1 - a - b); weights are given
# for unit total and rescaled to reference area 1/2.
_TRI_TABLE: dict[int, list[tuple[float, float, float]]] = {
    1: [(1.0, 1.0 / 3.0, 1.0 / 3.0)],
    2: [(1.0 / 3.0, 2.0 / 3.0, 1.0 / 6.0)],
    3: [(-27.0 / 48.0, 1.0 / 3.0, 1.0 / 3.0),
        (25.0 / 48.0, 0.6, 0.2)],
    4: [(0.223381589678011, 0.108103018168070, 0.445948490915965),
        (0.109951743655322, 0.816847572980459, 0.091576213509771)],
    5: [(0.225, 1.0 / 3.0, 1.0 / 3.0),
        (0.132394152788506, 0.059715871789770, 0.470142064105115),
        (0.125939180544827, 0.797426985353087, 0.101286507323456)],
}


def _orbit(a: float, b: float) -> list[tuple[float, float]]:
    """Distinct permutations of the barycentric triple (a, b, 1-a-b),
    projected to reference coordinates (lambda_1, lambda_2)."""
    c = 1.0 - a - b
    seen = {}
    for lam in ((a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)):
        key = (round(lam[1], 12), round(lam[2], 12))
        seen[key] = (lam[1], lam[2])
    return sorted(seen.values())


@lru_cache(maxsize=None)
def triangle_rule(degree: int) -> Rule:
    """Rule on the reference triangle exact for total degree <= ``degree``.

    Uses classic symmetric tables for low degrees and a collapsed
    Gauss-Legendre x Gauss-Jacobi tensor rule above.
    """
    if degree < 0:
        raise QuadratureError("degree must be >= 0")
    degree = max(degree, 1)
    if degree in _TRI_TABLE:
        pts = []
        wts = []
        for w, a, b in _TRI_TABLE[degree]:
            for x, y in _orbit(a, b):
                pts.append((x, y))
                wts.append(0.5 * w)  # per-point weights, unit total over orbits
        rule = Rule(points=np.array(pts), weights=np.array(wts), exactness_degree=degree)
        _selftest_triangle(rule)
        return rule
    return _collapsed_triangle_rule(degree)


def _collapsed_triangle_rule(degree: int) -> Rule:
    """Duffy-collapsed rule: Gauss-Legendre in u, Gauss-Jacobi(1,0) in v.

    With x = u (1 - v), y = v the Jacobian is (1 - v); the Jacobi weight
    absorbs it so polynomials of total degree <= ``degree`` integrate
    exactly with ceil((degree + 1) / 2) points per direction.
    """
    n = (degree + 2) // 2
    xu, wu = np.polynomial.legendre.leggauss(n)
    u = 0.5 * (xu + 1.0)
    wu = 0.5 * wu
    xv, wv = roots_jacobi(n, 1.0, 0.0)
    v = 0.5 * (xv + 1.0)
    wv = wv / 4.0  # maps weight (1-x) on [-1,1] to (1-v) dv on [0,1]
    U, V = np.meshgrid(u, v, indexing="ij")
    W = np.outer(wu, wv)
    x = U * (1.0 - V)
    y = V
    rule = Rule(points=np.column_stack([x.ravel(), y.ravel()]),
                weights=W.ravel(), exactness_degree=degree)
    _selftest_triangle(rule)
    return rule


# ---------------------------------------------------------------------------
# Integration drivers
# ---------------------------------------------------------------------------

def triangle_points(tri: np.ndarray, rule: Rule) -> tuple[np.ndarray, np.ndarray]:
    """Map a reference rule to a physical triangle; returns (points, weights)."""
    v0, v1, v2 = tri
    e1 = v1 - v0
    e2 = v2 - v0
    pts = v0 + np.outer(rule.points[:, 0], e1) + np.outer(rule.points[:, 1], e2)
    detj = e1[0] * e2[1] - e1[1] * e2[0]
    return pts, rule.weights * detj


def polygon_quadrature(poly: ConvexPolygon, degree: int,
                       subdivide: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature points and weights for a convex polygon (centroid fan).

    ``subdivide`` refines every fan triangle 4^k-fold before applying the
    rule; used for high-accuracy reference integrations.
    """
    rule = triangle_rule(degree)
    tris = triangulate(poly)
    for _ in range(subdivide):
        tris = [t for tri in tris for t in _split4(tri)]
    pts = []
    wts = []
    for tri in tris:
        v0, v1, v2 = tri
        e1 = v1 - v0
        e2 = v2 - v0
        detj = e1[0] * e2[1] - e1[1] * e2[0]
        pts.append(v0 + rule.points @ np.array([e1, e2]))
        wts.append(rule.weights * detj)
    return np.concatenate(pts), np.concatenate(wts)


def _split4(tri: np.ndarray) -> list[np.ndarray]:
    v0, v1, v2 = tri
    m01 = 0.5 * (v0 + v1)
    m12 = 0.5 * (v1 + v2)
    m20 = 0.5 * (v2 + v0)
    return [np.array([v0, m01, m20]), np.array([m01, v1, m12]),
            np.array([m20, m12, v2]), np.array([m01, m12, m20])]


def integrate_over_polygon(f, poly: ConvexPolygon, degree: int) -> float:
    """Integrate a callback f(points (n,2)) -> (n,) over a convex polygon."""
    if poly.is_empty:
        return 0.0
    pts, wts = polygon_quadrature(poly, degree)
    return float(np.sum(wts * np.asarray(f(pts), dtype=float)))


# ---------------------------------------------------------------------------
# Curved (quadratic) triangles for cut cells
# ---------------------------------------------------------------------------

@dataclass
class CurvedTriangle:
    """Six-node quadratic triangle: 3 corners followed by mid-edge nodes
    (01, 12, 20); mid-edge nodes may be projected onto a curved boundary."""

    nodes: np.ndarray  # (6, 2)

    def quadrature(self, rule: Rule) -> tuple[np.ndarray, np.ndarray]:
        """Mapped points and weights; raises if the Jacobian is not positive."""
        r = rule.points[:, 0]
        s = rule.points[:, 1]
        t = 1.0 - r - s
        # shape functions and derivatives in (r, s)
        N = np.column_stack([t * (2 * t - 1), r * (2 * r - 1), s * (2 * s - 1),
                             4 * t * r, 4 * r * s, 4 * s * t])
        dNdr = np.column_stack([1 - 4 * t, 4 * r - 1, np.zeros_like(r),
                                4 * (t - r), 4 * s, -4 * s])
        dNds = np.column_stack([1 - 4 * t, np.zeros_like(r), 4 * s - 1,
                                -4 * r, 4 * r, 4 * (t - s)])
        pts = N @ self.nodes
        jr = dNdr @ self.nodes
        js = dNds @ self.nodes
        detj = jr[:, 0] * js[:, 1] - jr[:, 1] * js[:, 0]
        if (detj <= 0.0).any():
            raise QuadratureError("curved triangle has non-positive Jacobian")
        return pts, rule.weights * detj


def straight_triangle(tri: np.ndarray) -> CurvedTriangle:
    v0, v1, v2 = tri
    nodes = np.array([v0, v1, v2, 0.5 * (v0 + v1), 0.5 * (v1 + v2), 0.5 * (v2 + v0)])
    return CurvedTriangle(nodes)


def project_midnodes(tri: np.ndarray, sdf: SignedDistance,
                     boundary_edges: tuple[int, ...]) -> CurvedTriangle:
    """Curve a triangle by projecting flagged mid-edge nodes onto phi = 0.

    ``boundary_edges`` lists local edge indices (0: v0-v1, 1: v1-v2,
    2: v2-v0).  If a projection would move a midnode by more than half the
    edge length the edge stays straight and a warning is recorded.
    """
    ct = straight_triangle(tri)
    nodes = ct.nodes.copy()
    pairs = ((0, 1, 3), (1, 2, 4), (2, 0, 5))
    for e in boundary_edges:
        i, j, mid = pairs[e]
        a, b = nodes[i], nodes[j]
        edge = b - a
        length = math.hypot(edge[0], edge[1])
        if length == 0.0:
            continue
        normal = np.array([edge[1], -edge[0]]) / length
        m = nodes[mid]
        proj = sdf.project_to_boundary(m, normal, 0.5 * length)
        if proj is None or math.hypot(proj[0] - m[0], proj[1] - m[1]) > 0.5 * length:
            warnings.warn("midnode projection exceeded half edge length; "
                          "keeping straight edge", stacklevel=2)
            continue
        nodes[mid] = proj
    out = CurvedTriangle(nodes)
    try:
        out.quadrature(triangle_rule(2))
    except QuadratureError:
        warnings.warn("curved triangle would invert; keeping straight edges",
                      stacklevel=2)
        return ct
    return out
