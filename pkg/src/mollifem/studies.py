"""Experiment drivers: meshes and refinement ladders for the studies.

Square-domain Poisson problems on perturbed Voronoi lattices, the
one-dimensional ladders on the non-uniform six-cell mesh, and the elastic
plate with a hole on nested polygon refinements.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .fem import (ManufacturedSolution, Mesh, Problem, QuadConfig, Tables,
                  assemble, assemble_1d, build_mesh, build_mesh_1d,
                  error_norms, error_norms_1d, exact_solutions,
                  mesh_from_polygons, solve, solve_1d, vci_correct)
from .geometry import Box, BoxSDF, CircleDomain, Complement, Intersection, voronoi
from .mollifier import Mollifier1D, MollifierTensor

PAPER_1D_SIZES = (0.15, 0.2, 0.15, 0.15, 0.2, 0.15)


# ---------------------------------------------------------------------------
# Mesh generators
# ---------------------------------------------------------------------------

def square_seed_lattice(n: int, h_m: float, rng_seed: int = 7,
                        perturb_frac: float = 0.15):
    """Seed lattice for the unit square: n x n interior grid plus enough
    ghost rings that every mollifier support centered in the domain stays
    inside the padded bounds.  Seeds farther than one spacing from the
    boundary are perturbed uniformly by ``perturb_frac * h_m / 2``."""
    s = 1.0 / n
    rings = max(int(math.ceil(h_m / s - 1e-12)), 1)
    idx = (np.arange(-rings, n + rings) + 0.5) * s
    X, Y = np.meshgrid(idx, idx, indexing="ij")
    seeds = np.column_stack([X.ravel(), Y.ravel()])
    dist = np.minimum.reduce([seeds[:, 0], 1.0 - seeds[:, 0],
                              seeds[:, 1], 1.0 - seeds[:, 1]])
    mask = dist > s * (1.0 + 1e-9)
    rng = np.random.default_rng(rng_seed)
    amp = perturb_frac * 0.5 * h_m
    seeds[mask] += rng.uniform(-amp, amp, size=(int(mask.sum()), 2))
    bounds = Box((0.5, 0.5), 0.5 + rings * s)
    return seeds, bounds


def unit_square_mesh(n: int, degree: int, chi: float = 1.0,
                     mollifier_kind: str = "quartic", mollifier_degree: int = 4,
                     rng_seed: int = 7, perturb_frac: float = 0.15) -> Mesh:
    """Perturbed Voronoi mesh of the unit square with n^2 domain cells and
    mollifier width h_m = 2 chi (1 / n_c)^(1/2)."""
    n_c = n * n
    h_m = chi * 2.0 / math.sqrt(n_c)
    seeds, bounds = square_seed_lattice(n, h_m, rng_seed, perturb_frac)
    mol = MollifierTensor.make(mollifier_kind, mollifier_degree, h_m)
    sdf = BoxSDF([0.0, 0.0], [1.0, 1.0])
    return build_mesh(sdf, seeds, bounds, mol, degree, scale=1.0 / n)


def plate_hole_sdf(R: float = 0.25):
    return Intersection(BoxSDF([0.0, 0.0], [1.0, 1.0]),
                        Complement(CircleDomain((0.0, 0.0), R)))


def plate_mesh(level: int, degree: int, R: float = 0.25,
               rng_seed: int = 11) -> Mesh:
    """Plate-with-hole mesh: Voronoi of 36 perturbed seeds, refined
    ``level`` times by splitting cells at centroids and edge midpoints
    (nested refinement); the mollifier width halves per level."""
    n = 6
    h_m0 = 2.0 / n
    seeds, bounds = square_seed_lattice(n, h_m0, rng_seed)
    polys = voronoi(seeds, bounds).cells
    h_m = h_m0
    from .fem import refine_polygons
    for _ in range(level):
        polys = refine_polygons(polys)
        h_m *= 0.5
    mol = MollifierTensor.make("quartic", 4, h_m)
    return mesh_from_polygons(polys, plate_hole_sdf(R), mol, degree, bounds)


# ---------------------------------------------------------------------------
# Runners
# ---------------------------------------------------------------------------

@dataclass
class RunResult:
    n_c: int
    h: float
    l2: float
    h1: float
    energy: float
    ndof: int
    wall_ms: float


def solve_2d(mesh: Mesh, exact: ManufacturedSolution,
             quad: QuadConfig | None = None, cut_scaling: bool = False,
             norm_degree: int | None = None):
    """Assemble (with VCI), solve and measure errors for one 2-D problem."""
    t0 = time.perf_counter()
    quad = quad or QuadConfig()
    tables = Tables(mesh, quad)
    vci = vci_correct(mesh, tables)
    system = assemble(mesh, exact.problem(), tables, vci, cut_scaling=cut_scaling)
    sol = solve(system)
    l2, h1, en = error_norms(mesh, sol, exact, norm_degree=norm_degree, quad=quad)
    wall = (time.perf_counter() - t0) * 1e3
    n_int = len(mesh.integration_cells())
    return sol, RunResult(n_c=n_int, h=mesh.scale, l2=l2, h1=h1, energy=en,
                          ndof=system.ndof, wall_ms=wall)


def study_square(degree: int, grids=(4, 8, 16, 32), chi: float = 1.0,
                 rng_seed: int = 7, quad: QuadConfig | None = None) -> list[RunResult]:
    """Poisson convergence ladder on the unit square (sin-sin solution).

    Uses the study quadrature (degree-7 domain rules) by default; the
    low-order assembly counts plus VCI keep the patch test exact but leave
    a visible integration error on smooth non-polynomial solutions.
    """
    exact = exact_solutions("sin2d")
    if quad is None:
        quad = STUDY_QUAD[min(degree, 2) if degree >= 1 else 1]
    rows = []
    for n in grids:
        mesh = unit_square_mesh(n, degree, chi=chi, rng_seed=rng_seed)
        _, res = solve_2d(mesh, exact, quad=quad)
        rows.append(res)
    return rows


def run_patch_2d(degree: int, n: int = 8, rng_seed: int = 7,
                 quad: QuadConfig | None = None) -> tuple[float, float]:
    """Patch test: solve the full polynomial of the basis degree on the
    perturbed square mesh; returns (L2, H1) errors."""
    name = "patch_linear" if degree == 1 else "patch_quadratic"
    exact = exact_solutions(name)
    mesh = unit_square_mesh(n, degree, rng_seed=rng_seed)
    _, res = solve_2d(mesh, exact, quad=quad)
    return res.l2, res.h1


def study_1d(degree: int, mollifier_degree: int = 1, chi: float = 1.0,
             levels: int = 6, sizes=PAPER_1D_SIZES) -> list[RunResult]:
    """One-dimensional Poisson ladder on bisections of the paper mesh."""
    exact = exact_solutions("sin1d")
    rows = []
    base = np.asarray(sizes, dtype=float)
    for lev in range(levels):
        s = np.repeat(base / 2 ** lev, 2 ** lev)
        t0 = time.perf_counter()
        mol = Mollifier1D.bspline(mollifier_degree, 2.0 * chi * float(s.max()))
        mesh = build_mesh_1d(s, degree=degree, mollifier=mol)
        coeffs = solve_1d(assemble_1d(mesh, exact.problem()))
        l2, h1, en = error_norms_1d(mesh, coeffs, exact)
        wall = (time.perf_counter() - t0) * 1e3
        rows.append(RunResult(n_c=len(s), h=float(s.mean()), l2=l2, h1=h1,
                              energy=en, ndof=(degree + 1) * mesh.n_cells,
                              wall_ms=wall))
    return rows


STUDY_QUAD = {1: QuadConfig(domain_degree=7, boundary_points=6),
              2: QuadConfig(domain_degree=7, boundary_points=6)}


def study_plate(degree: int, levels: int = 3, rng_seed: int = 11,
                curved: bool | None = None) -> list[RunResult]:
    """Elastic plate with a hole: energy-norm ladder on nested refinements.

    Quadratic basis functions get curved (quadratic) integration edges
    along the hole, matching the basis order.
    """
    exact = exact_solutions("plate_hole")
    if curved is None:
        curved = degree >= 2
    rows = []
    for lev in range(levels):
        mesh = plate_mesh(lev, degree, rng_seed=rng_seed)
        base = STUDY_QUAD[degree]
        quad = QuadConfig(domain_degree=base.domain_degree,
                          boundary_points=base.boundary_points, curved=curved)
        _, res = solve_2d(mesh, exact, quad=quad, cut_scaling=True)
        rows.append(res)
    return rows


def fit_slope(hs, errors) -> float:
    """Least-squares slope of log(error) against log(h)."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    return float(np.polyfit(np.log(hs), np.log(errors), 1)[0])
