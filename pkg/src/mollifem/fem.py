"""Finite element solver with mollified basis functions.

Mesh construction (interior / cut / ghost cells over a clipped Voronoi
partition), weak-form assembly for Poisson and plane-stress elasticity with
the parameter-free non-symmetric Nitsche method, variationally consistent
integration (VCI) correction of the test-function gradients, dense linear
solve and error norms.  One-dimensional problems use exact breakpoint-split
integration; two-dimensional problems use triangle quadrature plus VCI.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import basis as _basis
from .basis import (BasisValue, CellBasis, CellEvaluator, eval_2d,
                    eval_interval, support_region)
from .geometry import (CUT, EXTERIOR, GHOST, INTERIOR, Box, ConvexPolygon,
                       SignedDistance, classify_polygon, clip_cell_to_domain,
                       triangulate, voronoi)
from .mollifier import Mollifier1D, MollifierTensor
from .quadrature import (CurvedTriangle, QuadratureError, gauss_interval,
                         project_midnodes, straight_triangle, triangle_rule)


class MeshError(ValueError):
    pass


class SolverError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Problems and manufactured solutions
# ---------------------------------------------------------------------------

@dataclass
class Problem:
    """PDE problem description.

    ``kind`` is "poisson" or "elasticity" (plane stress).  ``dirichlet`` and
    ``source`` are vectorized callbacks of an (n, d) point array; for
    elasticity they return (n, 2).  Boundary segments where
    ``neumann_where`` is true get the ``neumann`` flux instead of the
    Dirichlet treatment.
    """

    kind: str
    source: callable
    dirichlet: callable
    neumann: callable | None = None
    neumann_where: callable | None = None
    material: tuple[float, float] | None = None  # (E, nu)

    def __post_init__(self):
        if self.kind not in ("poisson", "elasticity"):
            raise ValueError(f"unknown problem kind {self.kind!r}")
        if self.kind == "elasticity":
            E, nu = self.material
            if E <= 0 or not (0.0 <= nu < 0.5):
                raise ValueError("need E > 0 and 0 <= nu < 0.5")

    @property
    def ncomp(self) -> int:
        return 2 if self.kind == "elasticity" else 1

    def elasticity_matrix(self) -> np.ndarray:
        E, nu = self.material
        f = E / (1.0 - nu * nu)
        return f * np.array([[1.0, nu, 0.0], [nu, 1.0, 0.0],
                             [0.0, 0.0, 0.5 * (1.0 - nu)]])


@dataclass
class ManufacturedSolution:
    kind: str
    u: callable                 # (n,d) -> (n,) or (n,2)
    grad: callable              # (n,d) -> (n,2) or strain voigt (n,3)
    source: callable
    material: tuple[float, float] | None = None

    def problem(self) -> Problem:
        return Problem(kind=self.kind, source=self.source, dirichlet=self.u,
                       material=self.material)


def _kirsch_horizontal(R: float, T: float, E: float, nu: float):
    """Plane-stress Kirsch fields for remote tension T along x, hole at the
    origin: returns (displacement, stress_voigt) callbacks."""
    mu = E / (2.0 * (1.0 + nu))
    kappa = (3.0 - nu) / (1.0 + nu)

    def disp(pts):
        pts = np.atleast_2d(pts)
        x, y = pts[:, 0], pts[:, 1]
        r = np.hypot(x, y)
        th = np.arctan2(y, x)
        c, s = np.cos(th), np.sin(th)
        c3, s3 = np.cos(3 * th), np.sin(3 * th)
        a = T * R / (8.0 * mu)
        ux = a * (r / R * (kappa + 1.0) * c
                  + 2.0 * R / r * ((1.0 + kappa) * c + c3)
                  - 2.0 * R ** 3 / r ** 3 * c3)
        uy = a * (r / R * (kappa - 3.0) * s
                  + 2.0 * R / r * ((1.0 - kappa) * s + s3)
                  - 2.0 * R ** 3 / r ** 3 * s3)
        return np.column_stack([ux, uy])

    def stress(pts):
        pts = np.atleast_2d(pts)
        x, y = pts[:, 0], pts[:, 1]
        r2 = x * x + y * y
        th = np.arctan2(y, x)
        q2 = R * R / r2
        q4 = q2 * q2
        c2, s2 = np.cos(2 * th), np.sin(2 * th)
        c4, s4 = np.cos(4 * th), np.sin(4 * th)
        sxx = T * (1.0 - q2 * (1.5 * c2 + c4) + 1.5 * q4 * c4)
        syy = T * (-q2 * (0.5 * c2 - c4) - 1.5 * q4 * c4)
        sxy = T * (-q2 * (0.5 * s2 + s4) + 1.5 * q4 * s4)
        return np.column_stack([sxx, syy, sxy])

    return disp, stress


def plate_hole_solution(R: float = 0.25, sigma_inf: float = 1.0e6,
                        E: float = 70.0e6, nu: float = 0.3) -> ManufacturedSolution:
    """Infinite plate with a circular hole under remote vertical tension;
    displacements and stresses from the classical closed-form solution."""
    disp_h, stress_h = _kirsch_horizontal(R, sigma_inf, E, nu)

    def u(pts):
        pts = np.atleast_2d(pts)
        sw = pts[:, ::-1]
        d = disp_h(sw)
        return d[:, ::-1]

    def strain_voigt(pts):
        pts = np.atleast_2d(pts)
        s = stress_h(pts[:, ::-1])
        sxx, syy, sxy = s[:, 1], s[:, 0], s[:, 2]
        exx = (sxx - nu * syy) / E
        eyy = (syy - nu * sxx) / E
        gxy = 2.0 * (1.0 + nu) * sxy / E
        return np.column_stack([exx, eyy, gxy])

    def source(pts):
        pts = np.atleast_2d(pts)
        return np.zeros((len(pts), 2))

    return ManufacturedSolution(kind="elasticity", u=u, grad=strain_voigt,
                                source=source, material=(E, nu))


def exact_solutions(name: str) -> ManufacturedSolution:
    """Manufactured solutions used in the studies."""
    if name == "sin1d":
        return ManufacturedSolution(
            kind="poisson",
            u=lambda x: np.sin(3 * np.pi * np.asarray(x, dtype=float)),
            grad=lambda x: 3 * np.pi * np.cos(3 * np.pi * np.asarray(x, dtype=float)),
            source=lambda x: 9 * np.pi ** 2 * np.sin(3 * np.pi * np.asarray(x, dtype=float)))
    if name == "sin2d":
        def u(p):
            p = np.atleast_2d(p)
            return np.sin(np.pi * p[:, 0]) * np.sin(np.pi * p[:, 1])

        def grad(p):
            p = np.atleast_2d(p)
            return np.column_stack([
                np.pi * np.cos(np.pi * p[:, 0]) * np.sin(np.pi * p[:, 1]),
                np.pi * np.sin(np.pi * p[:, 0]) * np.cos(np.pi * p[:, 1])])

        return ManufacturedSolution(
            kind="poisson", u=u, grad=grad,
            source=lambda p: 2 * np.pi ** 2 * u(p))
    if name == "patch_linear":
        return ManufacturedSolution(
            kind="poisson",
            u=lambda p: np.atleast_2d(p)[:, 0] + 2.0 * np.atleast_2d(p)[:, 1],
            grad=lambda p: np.tile([1.0, 2.0], (len(np.atleast_2d(p)), 1)),
            source=lambda p: np.zeros(len(np.atleast_2d(p))))
    if name == "patch_quadratic":
        def u(p):
            p = np.atleast_2d(p)
            x, y = p[:, 0], p[:, 1]
            return x + 2 * y + x * x + 2 * x * y + y * y

        def grad(p):
            p = np.atleast_2d(p)
            x, y = p[:, 0], p[:, 1]
            return np.column_stack([1 + 2 * x + 2 * y, 2 + 2 * x + 2 * y])

        return ManufacturedSolution(
            kind="poisson", u=u, grad=grad,
            source=lambda p: np.full(len(np.atleast_2d(p)), -4.0))
    if name == "plate_hole":
        return plate_hole_solution()
    raise ValueError(f"unknown exact solution {name!r}")


# ---------------------------------------------------------------------------
# 2-D mesh
# ---------------------------------------------------------------------------

@dataclass
class MeshCell:
    index: int
    polygon: ConvexPolygon          # full (unclipped) cell: basis carrier
    center: np.ndarray              # basis center (seed or sub-cell centroid)
    label: str
    clipped: ConvexPolygon | None   # integration domain, None if outside
    basis: CellBasis | None = None
    support: ConvexPolygon | None = None
    boundary_edges: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)


@dataclass
class Mesh:
    cells: list[MeshCell]
    sdf: SignedDistance
    mollifier: MollifierTensor
    degree: int
    scale: float
    bounds: Box
    domain_area: float

    @property
    def h_m(self) -> float:
        return self.mollifier.h_m

    def integration_cells(self) -> list[MeshCell]:
        return [c for c in self.cells if c.label in (INTERIOR, CUT)]

    def basis_cells(self) -> list[MeshCell]:
        return [c for c in self.cells if c.label in (INTERIOR, CUT, GHOST)]

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for c in self.cells:
            out[c.label] = out.get(c.label, 0) + 1
        return out


def build_mesh(sdf: SignedDistance, seeds: np.ndarray, bounds: Box,
               mollifier: MollifierTensor, degree: int,
               scale: float | None = None) -> Mesh:
    """Clipped Voronoi mesh with ghost layer and per-cell basis data.

    Seeds must cover ``bounds``, a padded box at least one mollifier
    halfwidth beyond the domain; cells of outside seeds whose basis support
    still reaches the domain become ghost cells.
    """
    vd = voronoi(seeds, bounds)
    polys = vd.cells
    cells: list[MeshCell] = []
    areas = []
    for i, poly in enumerate(polys):
        if poly.is_empty:
            raise MeshError(f"seed {i} produced an empty Voronoi cell")
        label = classify_polygon(poly, sdf)
        clipped = None
        if label == INTERIOR:
            clipped = poly
        elif label == CUT:
            clipped = clip_cell_to_domain(poly, sdf)
            if clipped.is_empty:
                clipped = None
                label = EXTERIOR
        cells.append(MeshCell(index=i, polygon=poly, center=np.asarray(seeds[i]),
                              label=label, clipped=clipped))
        if clipped is not None:
            areas.append(clipped.area)
    domain_area = float(np.sum(areas))
    n_int = len(areas)
    if n_int == 0:
        raise MeshError("no cell overlaps the domain")
    if scale is None:
        scale = math.sqrt(domain_area / n_int)
    _finalize_cells(cells, sdf, mollifier, degree, scale)
    mesh = Mesh(cells=cells, sdf=sdf, mollifier=mollifier, degree=degree,
                scale=scale, bounds=bounds, domain_area=domain_area)
    _check_coverage(mesh)
    return mesh


def mesh_from_polygons(polys: list[ConvexPolygon], sdf: SignedDistance,
                       mollifier: MollifierTensor, degree: int,
                       bounds: Box, scale: float | None = None) -> Mesh:
    """Mesh over an explicit convex-polygon partition (e.g. nested
    refinements); the basis center of each cell is its polygon centroid."""
    cells: list[MeshCell] = []
    areas = []
    for i, poly in enumerate(polys):
        label = classify_polygon(poly, sdf)
        clipped = None
        if label == INTERIOR:
            clipped = poly
        elif label == CUT:
            clipped = clip_cell_to_domain(poly, sdf)
            if clipped.is_empty:
                clipped = None
                label = EXTERIOR
        cells.append(MeshCell(index=i, polygon=poly, center=poly.centroid,
                              label=label, clipped=clipped))
        if clipped is not None:
            areas.append(clipped.area)
    domain_area = float(np.sum(areas))
    if scale is None:
        scale = math.sqrt(domain_area / max(len(areas), 1))
    _finalize_cells(cells, sdf, mollifier, degree, scale)
    mesh = Mesh(cells=cells, sdf=sdf, mollifier=mollifier, degree=degree,
                scale=scale, bounds=bounds, domain_area=domain_area)
    _check_coverage(mesh)
    return mesh


def _finalize_cells(cells: list[MeshCell], sdf, mollifier, degree, scale) -> None:
    for c in cells:
        support = support_region(c.polygon, mollifier)
        if c.label == EXTERIOR and _support_reaches_domain(support, sdf):
            c.label = GHOST
        if c.label != EXTERIOR:
            c.support = support
            c.basis = CellBasis(cell_id=c.index, center=tuple(c.center),
                                scale=scale, degree=degree)
        if c.clipped is not None:
            c.boundary_edges = _domain_boundary_edges(c, sdf)


def _support_reaches_domain(support: ConvexPolygon, sdf) -> bool:
    v = support.vertices
    mids = 0.5 * (v + np.roll(v, -1, axis=0))
    samples = np.vstack([v, mids, support.centroid[None, :]])
    return bool((sdf.value_many(samples) > 0.0).any())


def _domain_boundary_edges(cell: MeshCell, sdf) -> list[tuple[np.ndarray, np.ndarray]]:
    """Edges of the clipped polygon that lie on the domain boundary.

    Clip-generated edges (not subsegments of an original cell edge) are
    boundary edges; original edges count as boundary only when they lie on
    the phi = 0 level set, which happens when the partition is aligned with
    a straight boundary.
    """
    clipped = cell.clipped
    poly = cell.polygon
    tol_line = 1e-9 * max(poly.diameter, 1e-30)
    out = []
    orig = list(poly.edges())
    is_cut = cell.label == CUT
    for a, b in clipped.edges():
        on_original = True
        if is_cut:
            on_original = _edge_on_original(a, b, orig, tol_line)
        if on_original:
            mid = 0.5 * (a + b)
            phis = sdf.value_many(np.array([a, b, mid]))
            if (np.abs(phis) <= tol_line).all():
                out.append((a, b))
        else:
            out.append((a, b))
    return out


def _edge_on_original(a, b, orig_edges, tol) -> bool:
    for p, q in orig_edges:
        d = q - p
        L2 = d[0] * d[0] + d[1] * d[1]
        ca = (a[0] - p[0]) * d[1] - (a[1] - p[1]) * d[0]
        cb = (b[0] - p[0]) * d[1] - (b[1] - p[1]) * d[0]
        if abs(ca) <= tol * math.sqrt(L2) and abs(cb) <= tol * math.sqrt(L2):
            ta = ((a - p) @ d) / L2
            tb = ((b - p) @ d) / L2
            if -1e-9 <= ta <= 1 + 1e-9 and -1e-9 <= tb <= 1 + 1e-9:
                return True
    return False


def _check_coverage(mesh: Mesh) -> None:
    """Every mollifier box centered in the domain must stay inside the
    meshed bounds so that local polynomials cover it."""
    hw = mesh.mollifier.halfwidth
    (bx0, by0), (bx1, by1) = mesh.bounds.lo, mesh.bounds.hi
    samples = []
    for c in mesh.integration_cells():
        samples.append(c.clipped.centroid)
        samples.extend(v for v in c.clipped.vertices)
    for p in samples:
        if not (bx0 <= p[0] - hw and p[0] + hw <= bx1
                and by0 <= p[1] - hw and p[1] + hw <= by1):
            raise MeshError(
                f"mollifier box at ({p[0]:.6g}, {p[1]:.6g}) leaves the meshed "
                "bounds; extend the ghost seed layer")


def refine_polygons(polys: list[ConvexPolygon]) -> list[ConvexPolygon]:
    """Nested refinement: split every cell at its centroid and edge centers."""
    out = []
    for poly in polys:
        c = poly.centroid
        v = poly.vertices
        n = len(v)
        mids = 0.5 * (v + np.roll(v, -1, axis=0))
        for k in range(n):
            quad = np.array([v[k], mids[k], c, mids[k - 1]])
            if _is_convex_ccw(quad):
                out.append(ConvexPolygon(quad))
            else:
                out.append(ConvexPolygon(np.array([v[k], mids[k], mids[k - 1]])))
                out.append(ConvexPolygon(np.array([mids[k], c, mids[k - 1]])))
    return out


def _is_convex_ccw(v: np.ndarray) -> bool:
    e = np.roll(v, -1, axis=0) - v
    cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
    return bool((cross > 0.0).all())


# ---------------------------------------------------------------------------
# Quadrature configuration and tabulation
# ---------------------------------------------------------------------------

_DOMAIN_DEGREE = {0: 2, 1: 2, 2: 3, 3: 4}  # 1, 3, 4 and 6 point triangle rules


@dataclass
class QuadConfig:
    """Assembly quadrature: triangle-rule degree for domain integrals,
    Gauss points per boundary segment, optional curved (quadratic) cut-cell
    geometry and optional uniform triangle subdivision."""

    domain_degree: int | None = None
    boundary_points: int = 5
    curved: bool = False
    subdivide: int = 0

    def resolve_domain_degree(self, qp: int) -> int:
        if self.domain_degree is not None:
            return self.domain_degree
        return _DOMAIN_DEGREE.get(qp, 2 * max(qp, 1))


class Tables:
    """Tabulated quadrature data and basis values for one mesh.

    ``cell_pts``/``cell_wts`` hold the domain rule per integration cell;
    ``bnd_*`` the boundary-segment rule with outward unit normals.  Basis
    values, gradients and support masks are stored per (integration cell,
    basis cell) pair and reused by VCI, assembly and the consistency tests.
    """

    def __init__(self, mesh: Mesh, quad: QuadConfig):
        self.mesh = mesh
        self.quad = quad
        qp = mesh.degree
        deg = quad.resolve_domain_degree(qp)
        rule = triangle_rule(deg)
        icells = mesh.integration_cells()
        self.icells = icells
        # decide boundary-edge curving once per edge so the domain triangles
        # and the Nitsche segments always agree; a mismatched pairing leaves
        # an integration defect the VCI correction blows up on
        self.edge_mid: list[list[np.ndarray | None]] = [
            _curved_midpoints(c, quad, mesh.sdf) for c in icells]
        self.cell_pts: list[np.ndarray] = []
        self.cell_wts: list[np.ndarray] = []
        for c, mids in zip(icells, self.edge_mid):
            pts, wts = _cell_quadrature(c, rule, quad, mids)
            self.cell_pts.append(pts)
            self.cell_wts.append(wts)
        # boundary segments (owned by integration cells)
        self.bnd_pts: list[np.ndarray] = []
        self.bnd_wts: list[np.ndarray] = []
        self.bnd_normals: list[np.ndarray] = []
        self.bnd_owner: list[int] = []
        nseg = gauss_interval(quad.boundary_points)
        for c, mids in zip(icells, self.edge_mid):
            for (a, b), mid in zip(c.boundary_edges, mids):
                pts, wts, nrm = _segment_quadrature(a, b, nseg, mid, mesh.sdf)
                self.bnd_pts.append(pts)
                self.bnd_wts.append(wts)
                self.bnd_normals.append(nrm)
                self.bnd_owner.append(c.index)
        self._tabulate_basis()

    def _tabulate_basis(self):
        mesh = self.mesh
        bcells = mesh.basis_cells()
        self.bcells = bcells
        self.bindex = {c.index: k for k, c in enumerate(bcells)}
        self.evaluators = {c.index: CellEvaluator(c.basis, c.polygon, mesh.mollifier)
                           for c in bcells}
        tol = 1e-12 * max(mesh.scale, 1.0)
        nc = len(self.cell_pts)
        self.cell_active = [[] for _ in range(nc)]
        self.cell_V = [{} for _ in range(nc)]
        self.cell_G = [{} for _ in range(nc)]
        self.cell_mask = [{} for _ in range(nc)]
        _scatter_tabulate(self.cell_pts, bcells, self.evaluators, tol,
                          self.cell_active, self.cell_V, self.cell_G,
                          self.cell_mask)
        # only bases seen by the domain quadrature carry degrees of freedom;
        # boundary-only slivers would create near-zero rows and VCI defects
        # that no correction can repair
        seen = set()
        for act in self.cell_active:
            seen.update(act)
        self.dof_candidates = sorted(seen)
        ne = len(self.bnd_pts)
        self.bnd_active = [[] for _ in range(ne)]
        self.bnd_V = [{} for _ in range(ne)]
        self.bnd_G = [{} for _ in range(ne)]
        _scatter_tabulate(self.bnd_pts, bcells, self.evaluators, tol,
                          self.bnd_active, self.bnd_V, self.bnd_G, None,
                          allowed=seen)


def _scatter_tabulate(pts_list, bcells, evaluators, tol,
                      active, Vout, Gout, Mout, allowed=None) -> None:
    """Evaluate every basis over all quadrature points inside its support in
    one batch, then scatter the values back into per-group tables."""
    if not pts_list:
        return
    sizes = np.array([len(p) for p in pts_list])
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    GP = np.concatenate(pts_list) if len(pts_list) else np.empty((0, 2))
    for bc in bcells:
        if allowed is not None and bc.index not in allowed:
            continue
        sup = bc.support
        lo = sup.vertices.min(axis=0)
        hi = sup.vertices.max(axis=0)
        cand = np.nonzero((GP[:, 0] >= lo[0] - tol) & (GP[:, 0] <= hi[0] + tol)
                          & (GP[:, 1] >= lo[1] - tol) & (GP[:, 1] <= hi[1] + tol))[0]
        if len(cand) == 0:
            continue
        inside = sup.contains_many(GP[cand], tol=tol)
        idx = cand[inside]
        if len(idx) == 0:
            continue
        vals, grads = evaluators[bc.index].evaluate_many(GP[idx])
        nb = bc.basis.n_b
        groups = np.searchsorted(offsets, idx, side="right") - 1
        for g in np.unique(groups):
            sel = groups == g
            local = idx[sel] - offsets[g]
            nq = sizes[g]
            V = np.zeros((nq, nb))
            G = np.zeros((nq, nb, 2))
            V[local] = vals[sel]
            G[local] = grads[sel]
            mask = np.zeros(nq, dtype=bool)
            mask[local] = True
            active[g].append(bc.index)
            Vout[g][bc.index] = V
            Gout[g][bc.index] = G
            if Mout is not None:
                Mout[g][bc.index] = mask


def _eval_basis_at(evaluator: CellEvaluator, pts, mask):
    nb = evaluator.cb.n_b
    idx = np.nonzero(mask)[0]
    vals = np.zeros((len(pts), nb))
    grads = np.zeros((len(pts), nb, 2))
    if len(idx):
        v, g = evaluator.evaluate_many(pts[idx])
        vals[idx] = v
        grads[idx] = g
    return vals, grads


def _curved_midpoints(cell: MeshCell, quad: QuadConfig, sdf) -> list:
    """Per boundary edge: the projected (on-boundary) mid node, or None for a
    straight edge.  Projection is rejected when the resulting quadratic fan
    triangle would invert, so both quadratures fall back together."""
    mids: list = []
    if not (quad.curved and cell.label == CUT and cell.boundary_edges):
        return [None] * len(cell.boundary_edges)
    centroid = cell.clipped.centroid
    for a, b in cell.boundary_edges:
        if not _needs_curving(a, b, sdf):
            mids.append(None)
            continue
        edge = np.asarray(b) - np.asarray(a)
        L = math.hypot(edge[0], edge[1])
        normal = np.array([edge[1], -edge[0]]) / L
        mid = 0.5 * (np.asarray(a) + np.asarray(b))
        proj = sdf.project_to_boundary(mid, normal, 0.5 * L)
        if proj is None or math.hypot(proj[0] - mid[0], proj[1] - mid[1]) > 0.5 * L:
            mids.append(None)
            continue
        ct = straight_triangle(np.array([centroid, a, b]))
        nodes = ct.nodes.copy()
        nodes[4] = proj
        try:
            CurvedTriangle(nodes).quadrature(triangle_rule(2))
        except QuadratureError:
            mids.append(None)
            continue
        mids.append(proj)
    return mids


def _cell_quadrature(cell: MeshCell, rule, quad: QuadConfig, mids) -> tuple:
    tris = triangulate(cell.clipped)
    curved_mid = {}
    for (a, b), m in zip(cell.boundary_edges, mids or []):
        if m is not None:
            curved_mid[(tuple(np.round(a, 12)), tuple(np.round(b, 12)))] = m
    pts = []
    wts = []
    for tri in tris:
        key = (tuple(np.round(tri[1], 12)), tuple(np.round(tri[2], 12)))
        proj = curved_mid.get(key)
        if proj is not None and not quad.subdivide:
            ct = straight_triangle(tri)
            nodes = ct.nodes.copy()
            nodes[4] = proj
            p, w = CurvedTriangle(nodes).quadrature(rule)
            pts.append(p)
            wts.append(w)
            continue
        sub = [tri]
        for _ in range(quad.subdivide):
            sub = [t for tt in sub for t in _split4(tt)]
        for t in sub:
            v0, v1, v2 = t
            e1, e2 = v1 - v0, v2 - v0
            detj = e1[0] * e2[1] - e1[1] * e2[0]
            pts.append(v0 + rule.points @ np.array([e1, e2]))
            wts.append(rule.weights * detj)
    return np.concatenate(pts), np.concatenate(wts)


def _split4(tri):
    v0, v1, v2 = tri
    m01, m12, m20 = 0.5 * (v0 + v1), 0.5 * (v1 + v2), 0.5 * (v2 + v0)
    return [np.array([v0, m01, m20]), np.array([m01, v1, m12]),
            np.array([m20, m12, v2]), np.array([m01, m12, m20])]


def _needs_curving(a, b, sdf) -> bool:
    mid = 0.5 * (np.asarray(a) + np.asarray(b))
    L = math.hypot(b[0] - a[0], b[1] - a[1])
    return abs(sdf.value(mid)) > 1e-9 * max(L, 1e-30)


def _segment_quadrature(a, b, rule, proj, sdf):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    u = 0.5 * (rule.points + 1.0)
    wu = 0.5 * rule.weights
    if proj is not None:
        # quadratic Lagrange curve through a, proj, b
        n0 = (1 - u) * (1 - 2 * u)
        n1 = 4 * u * (1 - u)
        n2 = u * (2 * u - 1)
        pts = np.outer(n0, a) + np.outer(n1, proj) + np.outer(n2, b)
        d0 = 4 * u - 3
        d1 = 4 - 8 * u
        d2 = 4 * u - 1
        tan = np.outer(d0, a) + np.outer(d1, proj) + np.outer(d2, b)
        speed = np.hypot(tan[:, 0], tan[:, 1])
        nrm = np.column_stack([tan[:, 1], -tan[:, 0]]) / speed[:, None]
        return pts, wu * speed, nrm
    edge = b - a
    L = math.hypot(edge[0], edge[1])
    pts = a + np.outer(u, edge)
    nrm = np.tile(np.array([edge[1], -edge[0]]) / L, (len(u), 1))
    return pts, wu * L, nrm


# ---------------------------------------------------------------------------
# Variationally consistent integration
# ---------------------------------------------------------------------------

class VciCorrection:
    """Per-cell gradient corrections: for basis cell j, ``lam[j]`` has shape
    (2, n_b, n_psi) so the corrected gradient of scalar function e is
    grad N_e + lam[dir, e, :] . psi inside the cell's support."""

    def __init__(self, lam: dict[int, np.ndarray], psi_degree: int):
        self.lam = lam
        self.psi_degree = psi_degree

    def psi_basis(self, cell: MeshCell, scale: float) -> CellBasis:
        return CellBasis(cell_id=cell.index, center=tuple(cell.center),
                         scale=scale, degree=self.psi_degree)


def vci_correct(mesh: Mesh, tables: Tables) -> VciCorrection | None:
    """Solve the per-basis-function Gram systems making the integration-by-
    parts identity hold under the assembly quadrature.

    For every scalar basis function N and direction k the correction lambda
    solves G lambda = r with G the psi Gram matrix over the support and
    r the integration-by-parts defect of N against each psi.
    """
    qp = mesh.degree
    if qp == 0:
        return None
    psi_deg = qp - 1
    lam: dict[int, np.ndarray] = {}
    bcells = tables.bcells
    npsi = _basis.n_basis(2, psi_deg)
    nb = _basis.n_basis(2, qp)
    gram = {c.index: np.zeros((npsi, npsi)) for c in bcells}
    rhs = {c.index: np.zeros((npsi, nb, 2)) for c in bcells}
    psi_cb = {c.index: CellBasis(cell_id=c.index, center=tuple(c.center),
                                 scale=mesh.scale, degree=psi_deg)
              for c in bcells}
    for kc in range(len(tables.icells)):
        pts = tables.cell_pts[kc]
        wts = tables.cell_wts[kc]
        for j in tables.cell_active[kc]:
            mask = tables.cell_mask[kc][j]
            w = wts * mask
            psi, dpsi = psi_cb[j].monomials(pts)
            V = tables.cell_V[kc][j]
            G = tables.cell_G[kc][j]
            gram[j] += np.einsum("q,qa,qb->ab", w, psi, psi)
            # domain part of the defect: int N d_k psi + int d_k N psi
            rhs[j] -= np.einsum("q,qe,qad->aed", w, V, dpsi)
            rhs[j] -= np.einsum("q,qed,qa->aed", w, G, psi)
    for ke in range(len(tables.bnd_pts)):
        pts = tables.bnd_pts[ke]
        wts = tables.bnd_wts[ke]
        nrm = tables.bnd_normals[ke]
        for j in tables.bnd_active[ke]:
            V = tables.bnd_V[ke][j]
            psi, _ = psi_cb[j].monomials(pts)
            rhs[j] += np.einsum("q,qe,qa,qd->aed", wts, V, psi, nrm)
    for c in bcells:
        j = c.index
        Gm = gram[j]
        if not np.isfinite(Gm).all() or (np.abs(Gm).max() == 0.0):
            lam[j] = np.zeros((2, nb, npsi))
            continue
        try:
            sol = np.linalg.solve(Gm, rhs[j].reshape(npsi, nb * 2))
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"singular VCI Gram matrix on cell {j}") from exc
        lam[j] = np.transpose(sol.reshape(npsi, nb, 2), (2, 1, 0))
    return VciCorrection(lam, psi_deg)


# ---------------------------------------------------------------------------
# Assembly, solve and norms (2-D)
# ---------------------------------------------------------------------------

@dataclass
class DiscreteSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    dof_cells: list[int]            # basis cell index per block
    n_b: int
    ncomp: int
    scaling: np.ndarray | None      # diagonal basis scaling (per dof)
    mesh: Mesh

    @property
    def ndof(self) -> int:
        return len(self.rhs)

    def block(self, cell_index: int) -> slice:
        k = self
        pos = k.dof_cells.index(cell_index)
        w = k.n_b * k.ncomp
        return slice(pos * w, (pos + 1) * w)


@dataclass
class Solution:
    mesh: Mesh
    coeffs: dict[int, np.ndarray]   # cell index -> (n_b,) or (n_b, 2)
    ncomp: int


def assemble(mesh: Mesh, problem: Problem, tables: Tables,
             vci: VciCorrection | None = None,
             cut_scaling: bool = False) -> DiscreteSystem:
    """Assemble the non-symmetric Nitsche system.

    Domain terms use VCI-corrected test gradients against uncorrected trial
    gradients; boundary terms use uncorrected gradients; cut-cell basis
    scaling (by the inverse square root of the in-domain support fraction)
    is recorded so the solution can be unscaled.
    """
    qp = mesh.degree
    nb = _basis.n_basis(2, qp)
    ncomp = problem.ncomp
    bcells = tables.bcells
    # active basis cells: any tabulated appearance
    seen = set()
    for act in tables.cell_active:
        seen.update(act)
    for act in tables.bnd_active:
        seen.update(act)
    dof_cells = sorted(seen)
    pos = {j: k for k, j in enumerate(dof_cells)}
    bw = nb * ncomp
    n = len(dof_cells) * bw
    K = np.zeros((n, n))
    F = np.zeros(n)
    psi_cb = None
    if vci is not None:
        psi_cb = {c.index: vci.psi_basis(c, mesh.scale) for c in bcells}
    D = problem.elasticity_matrix() if ncomp == 2 else None

    for kc in range(len(tables.icells)):
        pts = tables.cell_pts[kc]
        wts = tables.cell_wts[kc]
        act = tables.cell_active[kc]
        if not act:
            continue
        A = len(act)
        Vs = np.stack([tables.cell_V[kc][j] for j in act], axis=1)       # (q, A, nb)
        Gs = np.stack([tables.cell_G[kc][j] for j in act], axis=1)       # (q, A, nb, 2)
        Gt = Gs.copy()
        if vci is not None:
            for ja, j in enumerate(act):
                lamj = vci.lam[j]
                if lamj.size == 0:
                    continue
                psi, _ = psi_cb[j].monomials(pts)
                corr = np.einsum("qa,dea->qed", psi, lamj)
                mask = tables.cell_mask[kc][j]
                Gt[:, ja] += mask[:, None, None] * corr
        nq = len(pts)
        Vf = Vs.reshape(nq, A * nb)
        Gf = Gs.reshape(nq, A * nb, 2)
        Gtf = Gt.reshape(nq, A * nb, 2)
        rows = _dof_rows(act, pos, nb, ncomp)
        if ncomp == 1:
            block = np.einsum("q,qad,qbd->ab", wts, Gtf, Gf)
            K[np.ix_(rows, rows)] += block
            svals = problem.source(pts)
            F[rows] += (wts * svals) @ Vf
        else:
            Bt = _bmat(Gtf)
            Bu = _bmat(Gf)
            block = np.einsum("q,qiA,ij,qjB->AB", wts, Bt, D, Bu)
            K[np.ix_(rows, rows)] += block
            sv = problem.source(pts)            # (q, 2)
            F[rows] += _interleave(np.einsum("q,qa,qc->ac", wts, Vf, sv))
    # boundary terms
    for ke in range(len(tables.bnd_pts)):
        pts = tables.bnd_pts[ke]
        wts = tables.bnd_wts[ke]
        nrm = tables.bnd_normals[ke]
        act = tables.bnd_active[ke]
        if not act:
            continue
        A = len(act)
        Vs = np.stack([tables.bnd_V[ke][j] for j in act], axis=1).reshape(len(pts), A * nb)
        Gs = np.stack([tables.bnd_G[ke][j] for j in act], axis=1).reshape(len(pts), A * nb, 2)
        rows = _dof_rows(act, pos, nb, ncomp)
        is_neumann = False
        if problem.neumann_where is not None:
            mid = pts.mean(axis=0)
            is_neumann = bool(problem.neumann_where(mid))
        if ncomp == 1:
            if is_neumann:
                tv = problem.neumann(pts)
                F[rows] += (wts * tv) @ Vs
            else:
                ndotG = np.einsum("qad,qd->qa", Gs, nrm)
                K[np.ix_(rows, rows)] += (-np.einsum("q,qa,qb->ab", wts, Vs, ndotG)
                                          + np.einsum("q,qa,qb->ab", wts, ndotG, Vs))
                ub = problem.dirichlet(pts)
                F[rows] += (wts * ub) @ ndotG
        else:
            B = _bmat(Gs)
            # traction operator per point: t = Nn D B, Nn built from normals
            DB = np.einsum("ij,qjA->qiA", D, B)
            tr = np.empty((len(pts), 2, B.shape[2]))
            tr[:, 0] = nrm[:, 0, None] * DB[:, 0] + nrm[:, 1, None] * DB[:, 2]
            tr[:, 1] = nrm[:, 1, None] * DB[:, 1] + nrm[:, 0, None] * DB[:, 2]
            Vv = _vecvals(Vs)                  # (q, 2, A*nb*2)
            if is_neumann:
                tv = problem.neumann(pts)      # (q, 2)
                F[rows] += np.einsum("q,qc,qcA->A", wts, tv, Vv)
            else:
                K[np.ix_(rows, rows)] += (-np.einsum("q,qcA,qcB->AB", wts, Vv, tr)
                                          + np.einsum("q,qcA,qcB->AB", wts, tr, Vv))
                ub = problem.dirichlet(pts)    # (q, 2)
                F[rows] += np.einsum("q,qc,qcA->A", wts, ub, tr)
    # prune dofs with no contribution at all
    nz = (np.abs(K).max(axis=1) > 0.0) | (np.abs(K).max(axis=0) > 0.0) | (F != 0.0)
    keep_blocks = []
    for k, j in enumerate(dof_cells):
        sl = slice(k * bw, (k + 1) * bw)
        if nz[sl].any():
            keep_blocks.append(k)
    if len(keep_blocks) != len(dof_cells):
        idx = np.concatenate([np.arange(k * bw, (k + 1) * bw) for k in keep_blocks])
        K = K[np.ix_(idx, idx)]
        F = F[idx]
        dof_cells = [dof_cells[k] for k in keep_blocks]
    scaling = None
    if cut_scaling:
        scaling = _support_fraction_scaling(mesh, dof_cells, nb, ncomp)
    return DiscreteSystem(matrix=K, rhs=F, dof_cells=dof_cells, n_b=nb,
                          ncomp=ncomp, scaling=scaling, mesh=mesh)


def _dof_rows(act, pos, nb, ncomp):
    rows = []
    bw = nb * ncomp
    for j in act:
        base = pos[j] * bw
        rows.extend(range(base, base + bw))
    return np.array(rows)


def _bmat(G: np.ndarray) -> np.ndarray:
    """Voigt strain-displacement matrix stack: G is (q, A, 2) scalar-function
    gradients; returns (q, 3, 2A) for dofs ordered (function, component)."""
    nq, A, _ = G.shape
    B = np.zeros((nq, 3, 2 * A))
    B[:, 0, 0::2] = G[:, :, 0]
    B[:, 1, 1::2] = G[:, :, 1]
    B[:, 2, 0::2] = G[:, :, 1]
    B[:, 2, 1::2] = G[:, :, 0]
    return B


def _vecvals(V: np.ndarray) -> np.ndarray:
    """Vector-valued shape functions: V (q, A) scalars -> (q, 2, 2A)."""
    nq, A = V.shape
    out = np.zeros((nq, 2, 2 * A))
    out[:, 0, 0::2] = V
    out[:, 1, 1::2] = V
    return out


def _interleave(M: np.ndarray) -> np.ndarray:
    """(A, 2) per-function/component contributions -> interleaved vector."""
    return M.reshape(-1)


def _support_fraction_scaling(mesh, dof_cells, nb, ncomp) -> np.ndarray:
    cells = {c.index: c for c in mesh.cells}
    d = np.ones(len(dof_cells) * nb * ncomp)
    bw = nb * ncomp
    for k, j in enumerate(dof_cells):
        c = cells[j]
        frac = _support_fraction(c, mesh.sdf)
        if frac < 1.0 - 1e-12 and frac > 0.0:
            d[k * bw:(k + 1) * bw] = 1.0 / math.sqrt(frac)
    return d


def _support_fraction(cell: MeshCell, sdf) -> float:
    sup = cell.support
    label = classify_polygon(sup, sdf)
    if label == INTERIOR:
        return 1.0
    clipped = clip_cell_to_domain(sup, sdf)
    if clipped.is_empty:
        return 0.0
    return min(clipped.area / sup.area, 1.0)


def solve(system: DiscreteSystem) -> Solution:
    """Dense LU solve with a residual check and one refinement step."""
    K = system.matrix
    F = system.rhs
    d = system.scaling
    if d is not None:
        K = K * d[:, None] * d[None, :]
        F = F * d
    try:
        lu, piv = scipy.linalg.lu_factor(K)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"LU factorization failed: {exc}") from exc
    if not np.isfinite(lu).all():
        raise SolverError("singular system matrix (non-finite LU factors)")
    x = scipy.linalg.lu_solve((lu, piv), F)
    normF = np.linalg.norm(F)
    if normF > 0:
        res = np.linalg.norm(K @ x - F) / normF
        for _ in range(2):
            if res <= 1e-10:
                break
            x = x + scipy.linalg.lu_solve((lu, piv), F - K @ x)
            res = np.linalg.norm(K @ x - F) / normF
        if res > 1e-6:
            raise SolverError(f"linear solve did not converge: residual {res:.3e}")
    if d is not None:
        x = x * d
    coeffs: dict[int, np.ndarray] = {}
    bw = system.n_b * system.ncomp
    for k, j in enumerate(system.dof_cells):
        block = x[k * bw:(k + 1) * bw]
        if system.ncomp == 1:
            coeffs[j] = block.copy()
        else:
            coeffs[j] = block.reshape(system.n_b, 2)
    return Solution(mesh=system.mesh, coeffs=coeffs, ncomp=system.ncomp)


def evaluate_solution(sol: Solution, pts) -> np.ndarray:
    """Field values at arbitrary points (slow path for exports/plots)."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    mesh = sol.mesh
    out = np.zeros((len(pts), sol.ncomp))
    for c in mesh.basis_cells():
        if c.index not in sol.coeffs:
            continue
        mask = c.support.contains_many(pts, tol=0.0)
        for q in np.nonzero(mask)[0]:
            bv = eval_2d(c.basis, c.polygon, mesh.mollifier, pts[q])
            out[q] += bv.values @ np.atleast_2d(sol.coeffs[c.index].reshape(c.basis.n_b, -1))
    return out[:, 0] if sol.ncomp == 1 else out


def error_norms(mesh: Mesh, sol: Solution, exact: ManufacturedSolution,
                norm_degree: int | None = None,
                quad: QuadConfig | None = None) -> tuple[float, float, float]:
    """(L2, H1-seminorm, energy) errors against a manufactured solution.

    Elasticity uses the strain seminorm and the material energy norm; for
    Poisson the energy norm coincides with the H1 seminorm.
    """
    qp = mesh.degree
    if norm_degree is None:
        norm_degree = 2 * qp + 3
    rule = triangle_rule(norm_degree)
    quad = quad or QuadConfig()
    pts_list = []
    wts_list = []
    for c in mesh.integration_cells():
        mids = _curved_midpoints(c, quad, mesh.sdf)
        pts, wts = _cell_quadrature(c, rule, quad, mids)
        pts_list.append(pts)
        wts_list.append(wts)
    GP = np.concatenate(pts_list)
    GW = np.concatenate(wts_list)
    uh, gh = evaluate_field(mesh, sol, GP)
    if exact.kind == "poisson":
        eu = uh - exact.u(GP)
        eg = gh - exact.grad(GP)
        l2 = float(np.sum(GW * eu * eu))
        h1 = float(np.sum(GW[:, None] * eg * eg))
        en = h1
    else:
        E, nu = exact.material
        f = E / (1.0 - nu * nu)
        D = f * np.array([[1.0, nu, 0.0], [nu, 1.0, 0.0], [0.0, 0.0, 0.5 * (1.0 - nu)]])
        eu = uh - exact.u(GP)
        eg = gh - exact.grad(GP)
        l2 = float(np.sum(GW[:, None] * eu * eu))
        h1 = float(np.sum(GW[:, None] * eg * eg))
        en = float(np.einsum("q,qi,ij,qj->", GW, eg, D, eg))
    return math.sqrt(max(l2, 0.0)), math.sqrt(max(h1, 0.0)), math.sqrt(max(en, 0.0))


def evaluate_field(mesh: Mesh, sol: Solution, pts: np.ndarray):
    """Batched field evaluation: returns (u, grad) where grad is the
    gradient for Poisson and the Voigt strain for elasticity."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    n = len(pts)
    if sol.ncomp == 1:
        uh = np.zeros(n)
        gh = np.zeros((n, 2))
    else:
        uh = np.zeros((n, 2))
        gh = np.zeros((n, 3))
    for bc in mesh.basis_cells():
        if bc.index not in sol.coeffs:
            continue
        sup = bc.support
        lo = sup.vertices.min(axis=0)
        hi = sup.vertices.max(axis=0)
        cand = np.nonzero((pts[:, 0] >= lo[0]) & (pts[:, 0] <= hi[0])
                          & (pts[:, 1] >= lo[1]) & (pts[:, 1] <= hi[1]))[0]
        if len(cand) == 0:
            continue
        inside = sup.contains_many(pts[cand], tol=0.0)
        idx = cand[inside]
        if len(idx) == 0:
            continue
        ev = CellEvaluator(bc.basis, bc.polygon, mesh.mollifier)
        vals, grads = ev.evaluate_many(pts[idx])
        a = sol.coeffs[bc.index]
        if sol.ncomp == 1:
            uh[idx] += vals @ a
            gh[idx] += np.einsum("qed,e->qd", grads, a)
        else:
            uh[idx] += vals @ a
            gh[idx, 0] += grads[:, :, 0] @ a[:, 0]
            gh[idx, 1] += grads[:, :, 1] @ a[:, 1]
            gh[idx, 2] += grads[:, :, 1] @ a[:, 0] + grads[:, :, 0] @ a[:, 1]
    return uh, gh


# ---------------------------------------------------------------------------
# One-dimensional problems (exact integration)
# ---------------------------------------------------------------------------

@dataclass
class Mesh1D:
    """Interval partition with ghost padding; basis carried by every cell."""

    nodes: np.ndarray           # ascending cell boundaries incl. ghosts
    domain: tuple[float, float]
    mollifier: Mollifier1D
    degree: int
    scale: float                # average domain-cell length

    @property
    def n_cells(self) -> int:
        return len(self.nodes) - 1

    def cell(self, i: int) -> tuple[float, float]:
        return float(self.nodes[i]), float(self.nodes[i + 1])

    def center(self, i: int) -> float:
        return 0.5 * (self.nodes[i] + self.nodes[i + 1])

    def cell_basis(self, i: int) -> CellBasis:
        return CellBasis(cell_id=i, center=(self.center(i),), scale=self.scale,
                         degree=self.degree)

    def domain_cells(self) -> list[int]:
        a, b = self.domain
        eps = 1e-12 * (b - a)
        return [i for i in range(self.n_cells)
                if self.nodes[i] >= a - eps and self.nodes[i + 1] <= b + eps]


def build_mesh_1d(sizes, degree: int, mollifier: Mollifier1D,
                  domain: tuple[float, float] = (0.0, 1.0)) -> Mesh1D:
    """Mesh the interval with the given cell sizes plus ghost cells wide
    enough that any mollifier support centered in the domain is covered."""
    sizes = np.asarray(sizes, dtype=float)
    if (sizes <= 0.0).any():
        raise MeshError("cell sizes must be positive")
    a, b = domain
    if abs(sizes.sum() - (b - a)) > 1e-10 * (b - a):
        raise MeshError("cell sizes do not tile the domain")
    ghost_h = float(sizes.max())
    n_ghost = max(int(math.ceil(0.5 * mollifier.h_m / ghost_h - 1e-12)), 1)
    nodes = np.concatenate([
        a - ghost_h * np.arange(n_ghost, 0, -1),
        a + np.concatenate([[0.0], np.cumsum(sizes)]),
        b + ghost_h * np.arange(1, n_ghost + 1)])
    scale = float(sizes.mean())
    return Mesh1D(nodes=nodes, domain=domain, mollifier=mollifier,
                  degree=degree, scale=scale)


def _breakpoints_in(mesh: Mesh1D, a: float, b: float) -> np.ndarray:
    """All basis breakpoints inside (a, b): cell boundaries shifted by the
    mollifier breakpoints."""
    pts = (mesh.nodes[:, None] + mesh.mollifier.breakpoints[None, :]).ravel()
    pts = pts[(pts > a + 1e-14) & (pts < b - 1e-14)]
    return np.unique(np.round(pts, 14))


def _active_cells_1d(mesh: Mesh1D, a: float, b: float) -> list[int]:
    hw = mesh.mollifier.halfwidth
    out = []
    for i in range(mesh.n_cells):
        ca, cb = mesh.cell(i)
        if cb + hw > a + 1e-14 and ca - hw < b - 1e-14:
            out.append(i)
    return out


def assemble_1d(mesh: Mesh1D, problem: Problem) -> DiscreteSystem:
    """Exact (to round-off) assembly: integrals are split at every basis
    breakpoint and integrated with Gauss rules of sufficient order; the
    Nitsche boundary terms are point evaluations."""
    if problem.kind != "poisson":
        raise ValueError("1-D solver supports Poisson problems")
    qp = mesh.degree
    nb = qp + 1
    n_cells = mesh.n_cells
    n = n_cells * nb
    K = np.zeros((n, n))
    F = np.zeros(n)
    ng = mesh.mollifier.degree + qp + 2
    ng_src = max(ng, 12)
    rule = gauss_interval(ng)
    rule_src = gauss_interval(ng_src)
    bases = [mesh.cell_basis(i) for i in range(n_cells)]
    a0, b0 = mesh.domain
    for i in mesh.domain_cells():
        ca, cb = mesh.cell(i)
        cuts = np.concatenate([[ca], _breakpoints_in(mesh, ca, cb), [cb]])
        act = _active_cells_1d(mesh, ca, cb)
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            if hi - lo <= 1e-15:
                continue
            xs = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule_src.points
            ws = 0.5 * (hi - lo) * rule_src.weights
            Ns = []
            dNs = []
            for j in act:
                Nj, dNj = eval_interval(bases[j], mesh.cell(j), mesh.mollifier, xs)
                Ns.append(Nj)
                dNs.append(dNj)
            Nst = np.concatenate(Ns, axis=1)
            dNst = np.concatenate(dNs, axis=1)
            rows = np.concatenate([np.arange(j * nb, (j + 1) * nb) for j in act])
            K[np.ix_(rows, rows)] += np.einsum("q,qa,qb->ab", ws, dNst, dNst)
            F[rows] += (ws * problem.source(xs)) @ Nst
    # non-symmetric Nitsche boundary terms at the interval ends
    for xb, nrm in ((a0, -1.0), (b0, 1.0)):
        act = [i for i in range(n_cells)
               if mesh.cell(i)[1] + mesh.mollifier.halfwidth > xb - 1e-12
               and mesh.cell(i)[0] - mesh.mollifier.halfwidth < xb + 1e-12]
        Vs = []
        Ds = []
        for j in act:
            Nj, dNj = eval_interval(bases[j], mesh.cell(j), mesh.mollifier,
                                    np.array([xb]))
            Vs.append(Nj[0])
            Ds.append(dNj[0])
        V = np.concatenate(Vs)
        Dg = np.concatenate(Ds)
        rows = np.concatenate([np.arange(j * nb, (j + 1) * nb) for j in act])
        ub = float(np.atleast_1d(problem.dirichlet(np.array([xb])))[0])
        # - (n u') v  +  u (n v')   and rhs  + ubar (n v')
        K[np.ix_(rows, rows)] += (-nrm * np.outer(V, Dg) + nrm * np.outer(Dg, V))
        F[rows] += ub * nrm * Dg
    return DiscreteSystem(matrix=K, rhs=F, dof_cells=list(range(n_cells)),
                          n_b=nb, ncomp=1, scaling=None, mesh=None)


def solve_1d(system: DiscreteSystem) -> dict[int, np.ndarray]:
    lu, piv = scipy.linalg.lu_factor(system.matrix)
    x = scipy.linalg.lu_solve((lu, piv), system.rhs)
    nb = system.n_b
    return {j: x[k * nb:(k + 1) * nb] for k, j in enumerate(system.dof_cells)}


def error_norms_1d(mesh: Mesh1D, coeffs: dict[int, np.ndarray],
                   exact: ManufacturedSolution) -> tuple[float, float, float]:
    rule = gauss_interval(14)
    bases = [mesh.cell_basis(i) for i in range(mesh.n_cells)]
    l2 = 0.0
    h1 = 0.0
    for i in mesh.domain_cells():
        ca, cb = mesh.cell(i)
        cuts = np.concatenate([[ca], _breakpoints_in(mesh, ca, cb), [cb]])
        act = _active_cells_1d(mesh, ca, cb)
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            if hi - lo <= 1e-15:
                continue
            xs = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.points
            ws = 0.5 * (hi - lo) * rule.weights
            uh = np.zeros(len(xs))
            gh = np.zeros(len(xs))
            for j in act:
                Nj, dNj = eval_interval(bases[j], mesh.cell(j), mesh.mollifier, xs)
                uh += Nj @ coeffs[j]
                gh += dNj @ coeffs[j]
            eu = uh - exact.u(xs)
            eg = gh - exact.grad(xs)
            l2 += float(np.sum(ws * eu * eu))
            h1 += float(np.sum(ws * eg * eg))
    return math.sqrt(l2), math.sqrt(h1), math.sqrt(h1)


def evaluate_solution_1d(mesh: Mesh1D, coeffs: dict[int, np.ndarray], xs) -> np.ndarray:
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    out = np.zeros(len(xs))
    for i in range(mesh.n_cells):
        Nj, _ = eval_interval(mesh.cell_basis(i), mesh.cell(i), mesh.mollifier, xs)
        out += Nj @ coeffs[i]
    return out
