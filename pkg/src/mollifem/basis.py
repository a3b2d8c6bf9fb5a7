"""Mollified basis functions on cells.

Each cell carries a scaled and shifted monomial basis; the mollified basis
functions are the convolutions of those monomials with the mollifier over
the cell.  Univariate evaluation splits the convolution integral at the
translated mollifier breakpoints and integrates each smooth piece with a
Gauss rule of sufficient exactness.  Multivariate evaluation intersects the
mollifier support box with the cell and integrates the polynomial integrand
over the resulting convex polygon exactly, either via the divergence theorem
(edge quadrature of an anti-derivative) or via centroid-fan triangulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from numpy.polynomial import polynomial as P

from .geometry import Box, ConvexPolygon, clip_axis_strip, intersect_box, minkowski_sum, triangulate
from .mollifier import Mollifier1D, MollifierTensor
from .quadrature import gauss_interval, triangle_rule


def monomial_exponents(dim: int, degree: int) -> list[tuple[int, ...]]:
    """All monomial exponents of total degree <= degree, graded order."""
    if dim == 1:
        return [(k,) for k in range(degree + 1)]
    if dim == 2:
        out = []
        for d in range(degree + 1):
            for a in range(d, -1, -1):
                out.append((a, d - a))
        return out
    raise ValueError("only dim 1 and 2 supported")


def n_basis(dim: int, degree: int) -> int:
    return degree + 1 if dim == 1 else (degree + 1) * (degree + 2) // 2


class BasisValue(NamedTuple):
    """Values and gradients of one cell's basis functions at a point."""

    values: np.ndarray     # (n_b,)
    gradients: np.ndarray  # (n_b, d)


@dataclass(frozen=True)
class CellBasis:
    """Scaled and shifted monomial basis of one cell.

    The scaled coordinate is xi = 2 (x - center) / scale per component,
    with one global ``scale`` (the average cell size) shared by all cells.
    """

    cell_id: int
    center: tuple[float, ...]
    scale: float
    degree: int
    exponents: tuple[tuple[int, ...], ...] = field(init=False)

    def __post_init__(self):
        dim = len(self.center)
        object.__setattr__(self, "exponents",
                           tuple(monomial_exponents(dim, self.degree)))

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def n_b(self) -> int:
        return len(self.exponents)

    def monomials(self, pts) -> tuple[np.ndarray, np.ndarray]:
        """Monomial values and gradients at an (n, d) array of points.

        Returns (values (n, n_b), gradients (n, n_b, d)); gradients carry
        the chain-rule factor 2 / scale.
        """
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        n = len(pts)
        s = 2.0 / self.scale
        xi = s * (pts - np.asarray(self.center))
        d = self.dim
        deg = self.degree
        # per-direction power tables
        pows = [np.ones((n, deg + 1)) for _ in range(d)]
        for k in range(d):
            for e in range(1, deg + 1):
                pows[k][:, e] = pows[k][:, e - 1] * xi[:, k]
        vals = np.empty((n, self.n_b))
        grads = np.zeros((n, self.n_b, d))
        for i, exp in enumerate(self.exponents):
            v = pows[0][:, exp[0]]
            if d == 2:
                v = v * pows[1][:, exp[1]]
            vals[:, i] = v
            for k in range(d):
                if exp[k] == 0:
                    continue
                g = s * exp[k] * pows[k][:, exp[k] - 1]
                for j in range(d):
                    if j != k:
                        g = g * pows[j][:, exp[j]]
                grads[:, i, k] = g
        return vals, grads


# ---------------------------------------------------------------------------
# Univariate evaluation (exact convolution)
# ---------------------------------------------------------------------------

def eval_interval(cb: CellBasis, interval: tuple[float, float], m: Mollifier1D,
                  xs) -> tuple[np.ndarray, np.ndarray]:
    """Mollified basis values/derivatives of a 1-D cell at points ``xs``.

    The convolution integral over cell ``interval`` is split at translated
    mollifier breakpoints and each smooth piece is integrated with a Gauss
    rule exact for the integrand degree, so the result is accurate to
    round-off.  Returns (N (n_x, n_b), dN (n_x, n_b)).
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    a, b = float(interval[0]), float(interval[1])
    nb = cb.n_b
    N = np.zeros((len(xs), nb))
    dN = np.zeros((len(xs), nb))
    s = 2.0 / cb.scale
    c0 = cb.center[0]
    ng = (m.degree + cb.degree) // 2 + 1
    rule = gauss_interval(ng)
    xg = 0.5 * (rule.points + 1.0)
    wg = 0.5 * rule.weights
    for blo, bhi, coef in m.pieces():
        dcoef = P.polyder(coef) if len(coef) > 1 else np.zeros(1)
        lo = np.maximum(a, xs + blo)
        hi = np.minimum(b, xs + bhi)
        span = hi - lo
        mask = span > 0.0
        if not mask.any():
            continue
        y = lo[:, None] + span[:, None] * xg[None, :]
        t = y - xs[:, None]
        mv = P.polyval(t, coef)
        dmv = -P.polyval(t, dcoef)
        w = np.where(mask, span, 0.0)[:, None] * wg[None, :]
        xi = s * (y - c0)
        pw = np.ones((len(xs), ng, nb))
        for e in range(1, nb):
            pw[:, :, e] = pw[:, :, e - 1] * xi
        N += np.einsum("xg,xge->xe", w * mv, pw)
        dN += np.einsum("xg,xge->xe", w * dmv, pw)
    return N, dN


def eval_1d(cb: CellBasis, interval: tuple[float, float], m: Mollifier1D,
            x: float) -> BasisValue:
    """Single-point univariate evaluation (see :func:`eval_interval`)."""
    N, dN = eval_interval(cb, interval, m, [x])
    return BasisValue(values=N[0], gradients=dN[0][:, None])


# ---------------------------------------------------------------------------
# Multivariate evaluation (exact polygon integration)
# ---------------------------------------------------------------------------

def support_region(cell: ConvexPolygon, m: MollifierTensor) -> ConvexPolygon:
    """Support of the cell's basis functions: cell (+) mollifier box."""
    return minkowski_sum(cell, Box((0.0, 0.0), m.halfwidth))


def _clip_box_raw(v: np.ndarray, x0: float, x1: float, y0: float, y1: float):
    """Clip a CCW convex polygon (raw (n, 2) array) to a box; returns the
    vertex array, or None when the intersection is empty.  Degenerate
    slivers are harmless here: zero-length edges integrate to zero."""
    xs = v[:, 0]
    ys = v[:, 1]
    if xs.min() >= x1 or xs.max() <= x0 or ys.min() >= y1 or ys.max() <= y0:
        return None
    if xs.min() >= x0 and xs.max() <= x1 and ys.min() >= y0 and ys.max() <= y1:
        return v
    pts = [(float(p[0]), float(p[1])) for p in v]
    for axis, bound, keep_below in ((0, x1, True), (0, x0, False),
                                    (1, y1, True), (1, y0, False)):
        if not pts:
            return None
        out = []
        n = len(pts)
        for i in range(n):
            px, py = pts[i]
            qx, qy = pts[(i + 1) % n]
            pc = px if axis == 0 else py
            qc = qx if axis == 0 else qy
            pin = (pc <= bound) if keep_below else (pc >= bound)
            qin = (qc <= bound) if keep_below else (qc >= bound)
            if pin:
                out.append((px, py))
            if pin != qin:
                t = (bound - pc) / (qc - pc)
                out.append((px + t * (qx - px), py + t * (qy - py)))
        pts = out
    if len(pts) < 3:
        return None
    return np.array(pts)


def _toeplitz_rows(coef: np.ndarray, qp: int, imax: int) -> np.ndarray:
    """T[u, u + i] = coef[i]: shifts of the mollifier-piece coefficients so
    that (W @ T) folds the binomial expansion into plain power coefficients."""
    T = np.zeros((qp + 1, imax + 1))
    for u in range(qp + 1):
        T[u, u:u + len(coef)] = coef
    return T


class CellEvaluator:
    """Repeated evaluation of one cell's mollified basis (divergence path).

    Precomputes everything that does not depend on the evaluation point:
    mollifier piece coefficients as Toeplitz blocks, Gauss nodes for the
    edge quadrature of the divergence-theorem reduction, and the exponent
    bookkeeping of the graded monomial basis.
    """

    def __init__(self, cb: CellBasis, cell: ConvexPolygon, m: MollifierTensor):
        self.cb = cb
        self.verts = cell.vertices
        self.hw = m.halfwidth
        qp = cb.degree
        self.qp = qp
        self.s = 2.0 / cb.scale
        self.cx, self.cy = float(cb.center[0]), float(cb.center[1])
        self.ea = np.array([e[0] for e in cb.exponents])
        self.eb = np.array([e[1] for e in cb.exponents])
        # CS[a, u] = comb(a, u) s^u; IDX[a, u] = a - u (clipped at 0)
        CS = np.zeros((qp + 1, qp + 1))
        IDX = np.zeros((qp + 1, qp + 1), dtype=int)
        for a in range(qp + 1):
            for u in range(a + 1):
                CS[a, u] = math.comb(a, u) * self.s ** u
                IDX[a, u] = a - u
        self.CS = CS
        self.IDX = IDX
        m1, m2 = m.factors
        self.pieces = []
        for lo1, hi1, c1 in m1.pieces():
            d1c = -P.polyder(c1) if len(c1) > 1 else np.zeros(1)
            for lo2, hi2, c2 in m2.pieces():
                d2c = -P.polyder(c2) if len(c2) > 1 else np.zeros(1)
                imax = len(c1) - 1 + qp
                jmax = len(c2) - 1 + qp
                ng = (imax + jmax + 3) // 2
                rule = gauss_interval(ng)
                sg = 0.5 * (rule.points + 1.0)
                wg = 0.5 * rule.weights
                self.pieces.append((
                    lo1, hi1, lo2, hi2,
                    _toeplitz_rows(c1, qp, imax), _toeplitz_rows(d1c, qp, imax),
                    _toeplitz_rows(c2, qp, jmax), _toeplitz_rows(d2c, qp, jmax),
                    imax, jmax, sg, wg,
                    1.0 / np.arange(1, imax + 2)))
        self.single = len(self.pieces) == 1

    def _wmat(self, xi: float) -> np.ndarray:
        xp = np.empty(self.qp + 1)
        xp[0] = 1.0
        for k in range(1, self.qp + 1):
            xp[k] = xp[k - 1] * xi
        return self.CS * xp[self.IDX]

    def evaluate(self, px: float, py: float):
        """Values (n_b,) and gradients (n_b, 2) at one point."""
        nb = self.cb.n_b
        hw = self.hw
        clipped = _clip_box_raw(self.verts, px - hw, px + hw, py - hw, py + hw)
        if clipped is None:
            return np.zeros(nb), np.zeros((nb, 2))
        tv = clipped - (px, py)
        W1 = self._wmat(self.s * (px - self.cx))
        W2 = self._wmat(self.s * (py - self.cy))
        qp1 = self.qp + 1
        VAL = np.zeros((qp1, qp1))
        GX = np.zeros((qp1, qp1))
        GY = np.zeros((qp1, qp1))
        for (lo1, hi1, lo2, hi2, T1v, T1d, T2v, T2d,
             imax, jmax, sg, wg, inv_rows) in self.pieces:
            if self.single:
                sub = tv
            else:
                sub = _clip_box_raw(tv, lo1, hi1, lo2, hi2)
                if sub is None:
                    continue
            B = _edge_power_table(sub, imax, jmax, sg, wg, inv_rows)
            A1 = W1 @ T1v
            A2 = W2 @ T2v
            BA2 = B @ A2.T
            VAL += A1 @ BA2
            GX += (W1 @ T1d) @ BA2
            GY += A1 @ (B @ (W2 @ T2d).T)
        vals = VAL[self.ea, self.eb]
        grads = np.empty((nb, 2))
        grads[:, 0] = GX[self.ea, self.eb]
        grads[:, 1] = GY[self.ea, self.eb]
        return vals, grads

    def evaluate_many(self, pts: np.ndarray):
        """Batched values (n, n_b) and gradients (n, n_b, 2).

        All points are clipped simultaneously: polygons are padded to a
        fixed vertex count by repeating vertices, which creates degenerate
        edges that contribute exactly zero to the edge quadrature.
        """
        pts = np.asarray(pts, dtype=float)
        n = len(pts)
        nb = self.cb.n_b
        vals = np.zeros((n, nb))
        grads = np.zeros((n, nb, 2))
        if n == 0:
            return vals, grads
        hw = self.hw
        px = pts[:, 0]
        py = pts[:, 1]
        V = np.broadcast_to(self.verts, (n,) + self.verts.shape).copy()
        V = _batch_clip(V, 0, px + hw, True)
        V = _batch_clip(V, 0, px - hw, False)
        V = _batch_clip(V, 1, py + hw, True)
        V = _batch_clip(V, 1, py - hw, False)
        T = V - pts[:, None, :]
        qp1 = self.qp + 1
        xp1 = _point_powers(self.s * (px - self.cx), self.qp)
        xp2 = _point_powers(self.s * (py - self.cy), self.qp)
        W1 = self.CS[None, :, :] * xp1[:, self.IDX]
        W2 = self.CS[None, :, :] * xp2[:, self.IDX]
        VAL = np.zeros((n, qp1, qp1))
        GX = np.zeros((n, qp1, qp1))
        GY = np.zeros((n, qp1, qp1))
        for (lo1, hi1, lo2, hi2, T1v, T1d, T2v, T2d,
             imax, jmax, sg, wg, inv_rows) in self.pieces:
            if self.single:
                S = T
            else:
                S = _batch_clip(T, 0, np.full(n, hi1), True)
                S = _batch_clip(S, 0, np.full(n, lo1), False)
                S = _batch_clip(S, 1, np.full(n, hi2), True)
                S = _batch_clip(S, 1, np.full(n, lo2), False)
            B = _batch_power_table(S, imax, jmax, sg, wg, inv_rows)
            A1 = W1 @ T1v
            A2 = W2 @ T2v
            A1d = W1 @ T1d
            A2d = W2 @ T2d
            BA2 = B @ A2.transpose(0, 2, 1)
            VAL += A1 @ BA2
            GX += A1d @ BA2
            GY += A1 @ (B @ A2d.transpose(0, 2, 1))
        vals = VAL[:, self.ea, self.eb]
        grads = np.empty((n, nb, 2))
        grads[:, :, 0] = GX[:, self.ea, self.eb]
        grads[:, :, 1] = GY[:, self.ea, self.eb]
        return vals, grads


def _point_powers(x: np.ndarray, deg: int) -> np.ndarray:
    out = np.empty((len(x), deg + 1))
    out[:, 0] = 1.0
    for k in range(1, deg + 1):
        out[:, k] = out[:, k - 1] * x
    return out


def _batch_clip(V: np.ndarray, axis: int, bound: np.ndarray, keep_below: bool) -> np.ndarray:
    """Clip a batch of convex polygons (n, S, 2) against per-row axis-aligned
    half-planes.  Output has S + 1 slots; non-emitted tail slots repeat the
    last emitted vertex (degenerate edges, zero quadrature contribution)."""
    n, S, _ = V.shape
    c = V[:, :, axis]
    b = bound[:, None]
    inside = (c <= b) if keep_below else (c >= b)
    if inside.all():
        return V
    Vn = np.concatenate([V[:, 1:], V[:, :1]], axis=1)
    cn = np.concatenate([c[:, 1:], c[:, :1]], axis=1)
    inside_n = np.concatenate([inside[:, 1:], inside[:, :1]], axis=1)
    den = cn - c
    den = np.where(den == 0.0, 1.0, den)
    t = (b - c) / den
    inter = V + t[:, :, None] * (Vn - V)
    cand = np.empty((n, 2 * S, 2))
    cand[:, 0::2] = V
    cand[:, 1::2] = inter
    emit = np.empty((n, 2 * S), dtype=bool)
    emit[:, 0::2] = inside
    emit[:, 1::2] = inside != inside_n
    order = np.argsort(~emit, axis=1, kind="stable")
    cand = np.take_along_axis(cand, order[:, :, None], axis=1)
    emit = np.take_along_axis(emit, order, axis=1)
    pos = np.where(emit, np.arange(2 * S)[None, :], 0)
    np.maximum.accumulate(pos, axis=1, out=pos)
    out = np.take_along_axis(cand, pos[:, :, None], axis=1)
    return out[:, :S + 1]


def _batch_power_table(T: np.ndarray, imax: int, jmax: int,
                       sg: np.ndarray, wg: np.ndarray,
                       inv_rows: np.ndarray) -> np.ndarray:
    """Batched divergence-theorem power tables for (n, S, 2) polygons."""
    n, S, _ = T.shape
    v1 = np.concatenate([T[:, 1:], T[:, :1]], axis=1)
    e = v1 - T
    ng = len(sg)
    P = T[:, :, None, :] + sg[None, None, :, None] * e[:, :, None, :]
    X = P[..., 0].reshape(n, S * ng)
    Y = P[..., 1].reshape(n, S * ng)
    PX = np.empty((n, S * ng, imax + 2))
    PX[:, :, 0] = 1.0
    for k in range(1, imax + 2):
        PX[:, :, k] = PX[:, :, k - 1] * X
    PY = np.empty((n, S * ng, jmax + 1))
    PY[:, :, 0] = 1.0
    for k in range(1, jmax + 1):
        PY[:, :, k] = PY[:, :, k - 1] * Y
    cf = (wg[None, None, :] * e[:, :, 1:2]).reshape(n, S * ng)
    B = np.einsum("pk,pki,pkj->pij", cf, PX[:, :, 1:], PY, optimize=True)
    B *= inv_rows[None, :, None]
    return B


def _edge_power_table(tv: np.ndarray, imax: int, jmax: int,
                      sg: np.ndarray, wg: np.ndarray,
                      inv_rows: np.ndarray) -> np.ndarray:
    """Integrals of t1^i t2^j over the polygon via the divergence theorem."""
    v1 = np.empty_like(tv)
    v1[:-1] = tv[1:]
    v1[-1] = tv[0]
    e = v1 - tv
    pts = tv[:, None, :] + sg[None, :, None] * e[:, None, :]
    X = pts[..., 0].ravel()
    Y = pts[..., 1].ravel()
    PX = np.vander(X, imax + 2, increasing=True)
    PY = np.vander(Y, jmax + 1, increasing=True)
    cf = (wg[None, :] * e[:, 1:2]).ravel()
    B = (PX[:, 1:] * cf[:, None]).T @ PY
    B *= inv_rows[:, None]
    return B


def eval_2d(cb: CellBasis, cell: ConvexPolygon, m: MollifierTensor, point,
            method: str = "divergence") -> BasisValue:
    """Mollified basis values and gradients of a 2-D cell at one point.

    The integration domain is the boolean intersection of the mollifier
    support box centered at ``point`` with the cell, subdivided at internal
    mollifier breakpoint lines; on each piece the polynomial integrand is
    integrated exactly.  ``method`` selects the divergence-theorem path
    (default) or the centroid-fan triangulation path.
    """
    point = np.asarray(point, dtype=float)
    if method == "divergence":
        vals, grads = CellEvaluator(cb, cell, m).evaluate(point[0], point[1])
        return BasisValue(vals, grads)
    if method != "triangulation":
        raise ValueError(f"unknown integration method {method!r}")
    nb = cb.n_b
    vals = np.zeros(nb)
    grads = np.zeros((nb, 2))
    omega = intersect_box(cell, Box((point[0], point[1]), m.halfwidth))
    if omega.is_empty:
        return BasisValue(vals, grads)
    tverts = omega.vertices - point
    qp = cb.degree
    s = 2.0 / cb.scale
    xi_p = s * (point - np.asarray(cb.center))

    m1, m2 = m.factors
    pieces1 = list(m1.pieces())
    pieces2 = list(m2.pieces())
    single = len(pieces1) == 1 and len(pieces2) == 1

    # binomial expansion weights: W[a, u] = C(a, u) * xi_p^(a-u) * s^u
    W1 = _binom_weights(qp, xi_p[0], s)
    W2 = _binom_weights(qp, xi_p[1], s)

    VAL = np.zeros((qp + 1, qp + 1))
    GX = np.zeros((qp + 1, qp + 1))
    GY = np.zeros((qp + 1, qp + 1))
    for lo1, hi1, c1 in pieces1:
        for lo2, hi2, c2 in pieces2:
            if single:
                sub = ConvexPolygon(tverts)
            else:
                sub = clip_axis_strip(ConvexPolygon(tverts), 0, lo1, hi1)
                if sub.is_empty:
                    continue
                sub = clip_axis_strip(sub, 1, lo2, hi2)
                if sub.is_empty:
                    continue
            d1 = len(c1)
            d2 = len(c2)
            imax = d1 - 1 + qp
            jmax = d2 - 1 + qp
            B = _power_table_fan(sub, imax, jmax)
            dc1 = np.zeros(d1)
            dc1[: max(d1 - 1, 1)] = -P.polyder(c1) if d1 > 1 else 0.0
            dc2 = np.zeros(d2)
            dc2[: max(d2 - 1, 1)] = -P.polyder(c2) if d2 > 1 else 0.0
            win = sliding_window_view(B, (d1, d2))
            VAL += np.einsum("uvij,i,j->uv", win, c1, c2)
            GX += np.einsum("uvij,i,j->uv", win, dc1, c2)
            GY += np.einsum("uvij,i,j->uv", win, c1, dc2)
    val2 = W1 @ VAL @ W2.T
    gx2 = W1 @ GX @ W2.T
    gy2 = W1 @ GY @ W2.T
    ea = np.array([e[0] for e in cb.exponents])
    eb = np.array([e[1] for e in cb.exponents])
    vals[:] = val2[ea, eb]
    grads[:, 0] = gx2[ea, eb]
    grads[:, 1] = gy2[ea, eb]
    return BasisValue(vals, grads)


def _binom_weights(deg: int, xi_p: float, s: float) -> np.ndarray:
    W = np.zeros((deg + 1, deg + 1))
    for a in range(deg + 1):
        for u in range(a + 1):
            W[a, u] = math.comb(a, u) * xi_p ** (a - u) * s ** u
    return W


def _power_table_fan(poly: ConvexPolygon, imax: int, jmax: int) -> np.ndarray:
    """Same integrals via centroid-fan triangulation and a triangle rule."""
    rule = triangle_rule(imax + jmax)
    pts = []
    wts = []
    for tri in triangulate(poly):
        v0, v1, v2 = tri
        e1, e2 = v1 - v0, v2 - v0
        detj = e1[0] * e2[1] - e1[1] * e2[0]
        pts.append(v0 + rule.points @ np.array([e1, e2]))
        wts.append(rule.weights * detj)
    pts = np.concatenate(pts)
    wts = np.concatenate(wts)
    P1 = np.ones((len(pts), imax + 1))
    P2 = np.ones((len(pts), jmax + 1))
    for i in range(1, imax + 1):
        P1[:, i] = P1[:, i - 1] * pts[:, 0]
    for j in range(1, jmax + 1):
        P2[:, j] = P2[:, j - 1] * pts[:, 1]
    return np.einsum("q,qi,qj->ij", wts, P1, P2)


# ---------------------------------------------------------------------------
# Polynomial reproduction
# ---------------------------------------------------------------------------

def mollification_matrix_1d(m: Mollifier1D, degree: int, scale: float = 1.0) -> np.ndarray:
    """Map M with (m * xi^j) = sum_i M[i, j] xi^i in a coordinate
    xi = scale * (x - c); unit upper-triangular by mollifier symmetry."""
    M = np.zeros((degree + 1, degree + 1))
    moments = [m.moment(k) for k in range(degree + 1)]
    for j in range(degree + 1):
        for k in range(0, j + 1):
            M[j - k, j] += math.comb(j, k) * (-scale) ** k * moments[k]
    return M


def reproduction_coefficients_1d(target: np.ndarray, m: Mollifier1D,
                                 scale: float = 1.0) -> np.ndarray:
    """Coefficients g with m * g = target (ascending coefficients in xi)."""
    target = np.asarray(target, dtype=float)
    M = mollification_matrix_1d(m, len(target) - 1, scale)
    return np.linalg.solve(M, target)


def mollification_matrix_2d(m: MollifierTensor, degree: int,
                            scale: float = 1.0) -> np.ndarray:
    """Tensor-product mollification map over graded 2-D monomials."""
    exps = monomial_exponents(2, degree)
    M1 = mollification_matrix_1d(m.factors[0], degree, scale)
    M2 = mollification_matrix_1d(m.factors[1], degree, scale)
    n = len(exps)
    M = np.zeros((n, n))
    for col, (a, b) in enumerate(exps):
        for row, (ar, br) in enumerate(exps):
            if ar <= a and br <= b:
                M[row, col] = M1[ar, a] * M2[br, b]
    return M


def reproduction_coefficients_2d(target: np.ndarray, m: MollifierTensor,
                                 scale: float = 1.0) -> np.ndarray:
    """Graded coefficients g with m * g = target in scaled 2-D monomials."""
    target = np.asarray(target, dtype=float)
    degree = _degree_from_len(len(target))
    M = mollification_matrix_2d(m, degree, scale)
    return np.linalg.solve(M, target)


def _degree_from_len(n: int) -> int:
    d = 0
    while (d + 1) * (d + 2) // 2 < n:
        d += 1
    if (d + 1) * (d + 2) // 2 != n:
        raise ValueError("length is not a graded 2-D basis size")
    return d


def rebase_poly_1d(coeffs: np.ndarray, s: float, c: float) -> np.ndarray:
    """Re-express p(x) = sum a_k x^k in xi = s (x - c): returns b with
    p = sum b_i xi^i."""
    coeffs = np.asarray(coeffs, dtype=float)
    out = np.zeros_like(coeffs)
    for k, ak in enumerate(coeffs):
        if ak == 0.0:
            continue
        for i in range(k + 1):
            out[i] += ak * math.comb(k, i) * (1.0 / s) ** i * c ** (k - i)
    return out


def rebase_poly_2d(coeffs: dict[tuple[int, int], float], s: float,
                   center, degree: int) -> np.ndarray:
    """Re-express a global polynomial {(i, j): a_ij} in the graded scaled
    monomials xi^a eta^b with xi = s (x - cx), eta = s (y - cy)."""
    exps = monomial_exponents(2, degree)
    index = {e: i for i, e in enumerate(exps)}
    out = np.zeros(len(exps))
    cx, cy = float(center[0]), float(center[1])
    for (i, j), a in coeffs.items():
        if a == 0.0:
            continue
        for u in range(i + 1):
            cu = math.comb(i, u) * (1.0 / s) ** u * cx ** (i - u)
            for v in range(j + 1):
                cv = math.comb(j, v) * (1.0 / s) ** v * cy ** (j - v)
                out[index[(u, v)]] += a * cu * cv
    return out
