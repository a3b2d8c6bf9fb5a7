"""Command-line driver for the reproduction studies.

Subcommands: ``mesh`` (build and dump a clipped Voronoi mesh), ``patch``
(run the 2-D patch tests), ``converge`` (refinement ladders: 1-D, square
Poisson, plate with hole) and ``basis`` (sample basis functions on a grid).
Outputs are deterministic CSV tables plus legacy ASCII VTK fields.

Exit codes: 0 success, 1 tolerance/acceptance failure, 2 configuration
error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import studies
from .fem import QuadConfig, Tables, assemble, error_norms, exact_solutions, solve, vci_correct
from .geometry import seeds_from_csv, seeds_to_csv, triangulate
from .mollifier import Mollifier1D, MollifierTensor
from .basis import CellEvaluator

PRESETS: dict[str, dict] = {
    "paper-1d": {
        "experiment": "sin1d",
        "degree": 2,
        "mollifier": {"kind": "bspline", "degree": 1},
        "chi": 1.0,
        "levels": 6,
    },
    "paper-square": {
        "experiment": "sin2d",
        "degree": 1,
        "grids": [4, 8, 16, 32],
        "rng_seed": 7,
        "quadrature": {"domain_degree": 7, "boundary_points": 6},
    },
    "paper-plate": {
        "experiment": "plate_hole",
        "degree": 1,
        "levels": 3,
        "rng_seed": 11,
    },
    "paper-patch": {
        "experiment": "patch",
        "grid": 8,
        "rng_seed": 7,
        "tolerances": {"1": 1e-9, "2": 1e-8},
    },
}


class ConfigError(ValueError):
    pass


def _load_config(args) -> dict:
    cfg: dict = {}
    if args.preset:
        if args.preset not in PRESETS:
            raise ConfigError(f"unknown preset {args.preset!r}; "
                              f"choose from {sorted(PRESETS)}")
        cfg.update(json.loads(json.dumps(PRESETS[args.preset])))
    if args.config:
        if not os.path.exists(args.config):
            raise ConfigError(f"config file not found: {args.config}")
        try:
            with open(args.config) as f:
                cfg.update(json.load(f))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad JSON in {args.config}: {exc}") from exc
    return cfg


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_csv(path, header, rows) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, float) else v for v in row])


def _write_vtk_mesh(path, mesh) -> None:
    """Legacy ASCII VTK wireframe of the (clipped) cells."""
    points = []
    polys = []
    for c in mesh.integration_cells():
        base = len(points)
        v = c.clipped.vertices
        points.extend([(p[0], p[1], 0.0) for p in v])
        polys.append(list(range(base, base + len(v))))
    with open(path, "w") as f:
        f.write("# vtk DataFile Version 3.0\nmollifem mesh\nASCII\n")
        f.write("DATASET POLYDATA\n")
        f.write(f"POINTS {len(points)} double\n")
        for p in points:
            f.write(f"{p[0]!r} {p[1]!r} {p[2]!r}\n")
        size = sum(len(p) + 1 for p in polys)
        f.write(f"POLYGONS {len(polys)} {size}\n")
        for p in polys:
            f.write(" ".join([str(len(p))] + [str(i) for i in p]) + "\n")


def _write_vtk_solution(path, mesh, sol) -> None:
    """Point-sampled solution on the per-cell triangulation (legacy VTK)."""
    from .fem import evaluate_field
    points = []
    tris = []
    for c in mesh.integration_cells():
        for tri in triangulate(c.clipped):
            base = len(points)
            points.extend([(p[0], p[1]) for p in tri])
            tris.append((base, base + 1, base + 2))
    pts = np.array(points)
    u, _ = evaluate_field(mesh, sol, pts)
    with open(path, "w") as f:
        f.write("# vtk DataFile Version 3.0\nmollifem solution\nASCII\n")
        f.write("DATASET UNSTRUCTURED_GRID\n")
        f.write(f"POINTS {len(pts)} double\n")
        for p in pts:
            f.write(f"{p[0]!r} {p[1]!r} 0.0\n")
        f.write(f"CELLS {len(tris)} {4 * len(tris)}\n")
        for t in tris:
            f.write(f"3 {t[0]} {t[1]} {t[2]}\n")
        f.write(f"CELL_TYPES {len(tris)}\n")
        f.write("5\n" * len(tris))
        f.write(f"POINT_DATA {len(pts)}\n")
        if u.ndim == 1:
            f.write("SCALARS u double 1\nLOOKUP_TABLE default\n")
            for v in u:
                f.write(f"{v!r}\n")
        else:
            f.write("VECTORS u double\n")
            for v in u:
                f.write(f"{v[0]!r} {v[1]!r} 0.0\n")


def _quad_from_cfg(cfg) -> QuadConfig | None:
    q = cfg.get("quadrature")
    if not q:
        return None
    return QuadConfig(domain_degree=q.get("domain_degree"),
                      boundary_points=q.get("boundary_points", 5),
                      curved=q.get("curved", False),
                      subdivide=q.get("subdivide", 0))


def cmd_mesh(args) -> int:
    cfg = _load_config(args)
    out = args.out
    os.makedirs(out, exist_ok=True)
    degree = int(cfg.get("degree", 1))
    if "seed_file" in cfg:
        seeds = seeds_from_csv(cfg["seed_file"])
        n = int(round(len(seeds) ** 0.5))
    else:
        n = int(cfg.get("grid", 6))
    mesh = studies.unit_square_mesh(n, degree,
                                    rng_seed=int(cfg.get("rng_seed", 7)),
                                    perturb_frac=float(cfg.get("perturb", 0.15)))
    counts = mesh.counts()
    rows = []
    for c in mesh.cells:
        rows.append([c.index, c.label, _fmt(c.center[0]), _fmt(c.center[1]),
                     _fmt(c.clipped.area if c.clipped is not None else 0.0)])
    _write_csv(os.path.join(out, "cells.csv"),
               ["index", "label", "seed_x", "seed_y", "area"], rows)
    seeds_to_csv(np.array([c.center for c in mesh.cells]),
                 os.path.join(out, "seeds.csv"))
    _write_vtk_mesh(os.path.join(out, "mesh.vtk"), mesh)
    print(f"mesh: {counts} -> {out}/cells.csv, seeds.csv, mesh.vtk")
    return 0


def cmd_patch(args) -> int:
    cfg = _load_config(args)
    out = args.out
    n = int(cfg.get("grid", 8))
    seed = int(cfg.get("rng_seed", 7))
    tols = cfg.get("tolerances", {"1": 1e-9, "2": 1e-8})
    quad = _quad_from_cfg(cfg)
    rows = []
    status = 0
    for qp in (1, 2):
        l2, h1 = studies.run_patch_2d(qp, n=n, rng_seed=seed, quad=quad)
        tol = float(tols.get(str(qp), 1e-8))
        ok = l2 <= tol
        rows.append([qp, _fmt(l2), _fmt(h1), _fmt(tol), "pass" if ok else "FAIL"])
        print(f"patch q^p={qp}: L2={l2:.3e} H1={h1:.3e} "
              f"(tol {tol:.0e}) {'pass' if ok else 'FAIL'}")
        if not ok:
            status = 1
    _write_csv(os.path.join(out, "patch.csv"),
               ["degree", "l2", "h1", "tolerance", "status"], rows)
    return status


def cmd_converge(args) -> int:
    cfg = _load_config(args)
    out = args.out
    experiment = cfg.get("experiment")
    if experiment not in ("sin1d", "sin2d", "plate_hole"):
        raise ConfigError(f"unknown experiment {experiment!r}")
    degree = int(cfg.get("degree", 1))
    if experiment == "sin1d":
        mol = cfg.get("mollifier", {"kind": "bspline", "degree": 1})
        rows = studies.study_1d(degree,
                                mollifier_degree=int(mol.get("degree", 1)),
                                chi=float(cfg.get("chi", 1.0)),
                                levels=int(cfg.get("levels", 6)))
    elif experiment == "sin2d":
        rows = studies.study_square(degree, grids=tuple(cfg.get("grids", (4, 8, 16, 32))),
                                    chi=float(cfg.get("chi", 1.0)),
                                    rng_seed=int(cfg.get("rng_seed", 7)),
                                    quad=_quad_from_cfg(cfg))
    else:
        rows = studies.study_plate(degree, levels=int(cfg.get("levels", 3)),
                                   rng_seed=int(cfg.get("rng_seed", 11)),
                                   curved=cfg.get("curved"))
    _write_csv(os.path.join(out, f"{experiment}_q{degree}.csv"),
               ["n_c", "h", "l2", "h1_semi", "energy", "n_dof", "wall_time_ms"],
               [[r.n_c, _fmt(r.h), _fmt(r.l2), _fmt(r.h1), _fmt(r.energy),
                 r.ndof, _fmt(r.wall_ms)] for r in rows])
    hs = [r.h for r in rows]
    sl2 = studies.fit_slope(hs, [r.l2 for r in rows])
    sh1 = studies.fit_slope(hs, [r.h1 for r in rows])
    sen = studies.fit_slope(hs, [r.energy for r in rows])
    print(f"{experiment} q^p={degree}: slopes L2={sl2:.3f} H1={sh1:.3f} "
          f"energy={sen:.3f} -> {out}")
    return 0


def cmd_basis(args) -> int:
    cfg = _load_config(args)
    out = args.out
    os.makedirs(out, exist_ok=True)
    dim = int(cfg.get("dim", 2))
    degree = int(cfg.get("degree", 2))
    mol = cfg.get("mollifier", {"kind": "quartic", "degree": 4})
    samples = int(cfg.get("samples", 81))
    if dim == 1:
        from .basis import CellBasis, eval_interval
        h_m = float(cfg.get("h_m", 0.4))
        m = Mollifier1D.make(mol.get("kind", "bspline"), int(mol.get("degree", 1)), h_m)
        cell = (0.0, float(cfg.get("cell_size", 0.2)))
        cb = CellBasis(cell_id=0, center=(0.5 * (cell[0] + cell[1]),),
                       scale=cell[1] - cell[0], degree=degree)
        xs = np.linspace(cell[0] - h_m, cell[1] + h_m, samples)
        N, dN = eval_interval(cb, cell, m, xs)
        rows = [[_fmt(x)] + [_fmt(v) for v in N[i]] + [_fmt(v) for v in dN[i]]
                for i, x in enumerate(xs)]
        hdr = ["x"] + [f"N{k}" for k in range(cb.n_b)] + [f"dN{k}" for k in range(cb.n_b)]
        _write_csv(os.path.join(out, "basis1d.csv"), hdr, rows)
        print(f"basis: {cb.n_b} functions sampled at {samples} points -> "
              f"{out}/basis1d.csv")
    else:
        from .basis import CellBasis, support_region
        from .geometry import ConvexPolygon
        h_m = float(cfg.get("h_m", 0.5))
        mt = MollifierTensor.make(mol.get("kind", "quartic"), int(mol.get("degree", 4)), h_m)
        side = float(cfg.get("cell_size", 0.25))
        cell = ConvexPolygon([[0, 0], [side, 0], [side, side], [0, side]])
        cb = CellBasis(cell_id=0, center=(0.5 * side, 0.5 * side),
                       scale=side, degree=degree)
        sup = support_region(cell, mt)
        lo = sup.vertices.min(axis=0)
        hi = sup.vertices.max(axis=0)
        g = int(round(samples ** 0.5))
        xs = np.linspace(lo[0], hi[0], g)
        ys = np.linspace(lo[1], hi[1], g)
        ev = CellEvaluator(cb, cell, mt)
        rows = []
        for x in xs:
            for y in ys:
                v, grad = ev.evaluate(x, y)
                rows.append([_fmt(x), _fmt(y)] + [_fmt(t) for t in v])
        hdr = ["x", "y"] + [f"N{k}" for k in range(cb.n_b)]
        _write_csv(os.path.join(out, "basis2d.csv"), hdr, rows)
        print(f"basis: {cb.n_b} functions sampled on {g}x{g} grid -> "
              f"{out}/basis2d.csv")
    return 0


def cmd_solve(args) -> int:
    """Solve one square-domain Poisson problem and export the field."""
    cfg = _load_config(args)
    out = args.out
    os.makedirs(out, exist_ok=True)
    n = int(cfg.get("grid", 8))
    degree = int(cfg.get("degree", 1))
    exact = exact_solutions(cfg.get("experiment", "sin2d"))
    mesh = studies.unit_square_mesh(n, degree, rng_seed=int(cfg.get("rng_seed", 7)))
    sol, res = studies.solve_2d(mesh, exact, quad=_quad_from_cfg(cfg))
    _write_vtk_solution(os.path.join(out, "solution.vtk"), mesh, sol)
    from .fem import evaluate_field
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 1, (500, 2))
    u, _ = evaluate_field(mesh, sol, pts)
    _write_csv(os.path.join(out, "solution.csv"), ["x", "y", "u"],
               [[_fmt(p[0]), _fmt(p[1]), _fmt(v)] for p, v in zip(pts, u)])
    print(f"solve: L2={res.l2:.3e} H1={res.h1:.3e} -> {out}/solution.vtk, solution.csv")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="mollifem",
                                 description="Mollified finite element studies")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn in (("mesh", cmd_mesh), ("patch", cmd_patch),
                     ("converge", cmd_converge), ("basis", cmd_basis),
                     ("solve", cmd_solve)):
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--preset", help=f"named preset: {sorted(PRESETS)}")
        p.add_argument("--out", default="out", help="output directory")
        p.set_defaults(fn=fn)
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
