"""Mollified finite element approximants on convex polytopic partitions.

Basis functions are convolutions of per-cell polynomials with a compactly
supported mollifier; the geometry kernel, exact convolution evaluation,
non-symmetric Nitsche boundary treatment and variationally consistent
integration live in the submodules:

- :mod:`mollifem.geometry`: convex polygons, clipping, Voronoi, signed
  distance functions
- :mod:`mollifem.mollifier`: B-spline and quartic mollifiers
- :mod:`mollifem.basis`: mollified basis evaluation and reproduction
- :mod:`mollifem.quadrature`: Gauss/triangle rules, curved cut-cell maps
- :mod:`mollifem.fem`: meshes, VCI, assembly, solve, error norms
- :mod:`mollifem.studies`: the reproduction experiments
- :mod:`mollifem.cli`: command-line driver
"""

from .basis import BasisValue, CellBasis, eval_1d, eval_2d, support_region
from .fem import (DiscreteSystem, ManufacturedSolution, Mesh, Mesh1D, Problem,
                  QuadConfig, Solution, assemble, assemble_1d, build_mesh,
                  build_mesh_1d, error_norms, error_norms_1d, exact_solutions,
                  solve, solve_1d, vci_correct)
from .geometry import (Box, ConvexPolygon, HalfPlane, SignedDistance,
                       VoronoiDiagram, clip_halfplane, convex_hull,
                       intersect_box, minkowski_sum, triangulate, voronoi)
from .mollifier import Mollifier1D, MollifierTensor

__version__ = "0.1.0"
