"""Compactly supported mollifier kernels.

A mollifier is a non-negative, symmetric, unit-volume kernel supported on
(-h_m/2, h_m/2).  Two families are provided: uniform B-splines of degree 1-3
built by the Cox-de Boor recursion with exact piecewise-polynomial
coefficients, and the single-piece C^1 quartic spline.  The tensor-product
form combines one factor per spatial direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .geometry import Box


def _shift_poly(c: np.ndarray, x0: float) -> np.ndarray:
    """Coefficients of p(x + x0) given ascending coefficients of p(x)."""
    out = np.zeros_like(c)
    for k, ck in enumerate(c):
        # (x + x0)^k expanded
        row = np.array([math.comb(k, j) * x0 ** (k - j) for j in range(k + 1)])
        out[: k + 1] += ck * row
    return out


def _poly_eval(c: np.ndarray, x):
    return P.polyval(x, c)


class Mollifier1D:
    """Piecewise-polynomial 1-D mollifier.

    Pieces are stored with ascending global-x coefficients between
    consecutive breakpoints; evaluation outside the support is zero.
    """

    def __init__(self, kind: str, degree: int, h_m: float,
                 breakpoints: np.ndarray, coeffs: list[np.ndarray]):
        self.kind = kind
        self.degree = int(degree)
        self.h_m = float(h_m)
        self.breakpoints = np.asarray(breakpoints, dtype=float)
        self.coeffs = [np.asarray(c, dtype=float) for c in coeffs]
        self._deriv_cache: dict[int, list[np.ndarray]] = {0: self.coeffs}

    # -- constructors --------------------------------------------------------

    @classmethod
    def bspline(cls, degree: int, h_m: float) -> "Mollifier1D":
        """Uniform B-spline of the given degree, normalized to unit volume.

        Built by the Cox-de Boor recursion on ``degree + 1`` equal knot
        spans covering (-h_m/2, h_m/2).
        """
        if degree < 1:
            raise ValueError("B-spline mollifier degree must be >= 1")
        if h_m <= 0.0:
            raise ValueError("mollifier support must be positive")
        nspans = degree + 1
        knots = np.linspace(-0.5 * h_m, 0.5 * h_m, nspans + 1)
        pieces = _cox_de_boor_pieces(degree, knots)
        total = sum(_integral(c, knots[i], knots[i + 1]) for i, c in enumerate(pieces))
        pieces = [c / total for c in pieces]
        return cls("bspline", degree, h_m, knots, pieces)

    @classmethod
    def quartic(cls, h_m: float) -> "Mollifier1D":
        """Single-piece C^1 quartic spline on (-h_m/2, h_m/2)."""
        if h_m <= 0.0:
            raise ValueError("mollifier support must be positive")
        a = 15.0 / (8.0 * h_m)
        c = np.array([a, 0.0, -8.0 * a / h_m ** 2, 0.0, 16.0 * a / h_m ** 4])
        bp = np.array([-0.5 * h_m, 0.5 * h_m])
        return cls("quartic", 4, h_m, bp, [c])

    @classmethod
    def make(cls, kind: str, degree: int, h_m: float) -> "Mollifier1D":
        if kind == "quartic":
            return cls.quartic(h_m)
        if kind == "bspline":
            return cls.bspline(degree, h_m)
        raise ValueError(f"unknown mollifier kind {kind!r}")

    # -- evaluation -----------------------------------------------------------

    def _piece_coeffs(self, order: int) -> list[np.ndarray]:
        if order not in self._deriv_cache:
            base = self._piece_coeffs(order - 1)
            self._deriv_cache[order] = [P.polyder(c) if len(c) > 1 else np.zeros(1)
                                        for c in base]
        return self._deriv_cache[order]

    def eval(self, x, order: int = 0):
        """Value (or ``order``-th derivative) at scalar or array ``x``."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xf = np.atleast_1d(x)
        out = np.zeros_like(xf)
        bp = self.breakpoints
        idx = np.searchsorted(bp, xf, side="right") - 1
        inside = (xf > bp[0]) & (xf < bp[-1])
        coeffs = self._piece_coeffs(order)
        for k in range(len(coeffs)):
            m = inside & (np.clip(idx, 0, len(coeffs) - 1) == k)
            if m.any():
                out[m] = _poly_eval(coeffs[k], xf[m])
        return float(out[0]) if scalar else out

    def deriv(self, x, order: int = 1):
        return self.eval(x, order=order)

    def moment(self, s: int) -> float:
        """s-th moment: integral of m(x) x^s by per-piece Gauss quadrature."""
        if s < 0:
            raise ValueError("moment order must be >= 0")
        n = (self.degree + s) // 2 + 1
        xg, wg = np.polynomial.legendre.leggauss(n)
        total = 0.0
        for k, c in enumerate(self.coeffs):
            a, b = self.breakpoints[k], self.breakpoints[k + 1]
            xm = 0.5 * (a + b) + 0.5 * (b - a) * xg
            total += 0.5 * (b - a) * np.sum(wg * _poly_eval(c, xm) * xm ** s)
        return float(total)

    def pieces(self):
        """Yield (lo, hi, ascending global-x coefficients) per smooth piece."""
        for k, c in enumerate(self.coeffs):
            yield self.breakpoints[k], self.breakpoints[k + 1], c

    @property
    def halfwidth(self) -> float:
        return 0.5 * self.h_m

    def __repr__(self):
        return f"Mollifier1D({self.kind}, degree={self.degree}, h_m={self.h_m:g})"


def _cox_de_boor_pieces(degree: int, knots: np.ndarray) -> list[np.ndarray]:
    """Exact per-span polynomial coefficients of the single B-spline
    B_{0,degree} over the given knot vector (ascending global-x coeffs)."""
    nspans = len(knots) - 1
    # funcs[j][s]: polynomial of B_{j,k} on span s
    funcs = [[np.array([1.0]) if s == j else np.array([0.0]) for s in range(nspans)]
             for j in range(nspans)]
    for k in range(1, degree + 1):
        new = []
        for j in range(nspans - k):
            spans = []
            for s in range(nspans):
                c = np.zeros(1)
                den1 = knots[j + k] - knots[j]
                if den1 > 0.0:
                    w1 = np.array([-knots[j] / den1, 1.0 / den1])
                    c = P.polyadd(c, P.polymul(w1, funcs[j][s]))
                den2 = knots[j + k + 1] - knots[j + 1]
                if den2 > 0.0:
                    w2 = np.array([knots[j + k + 1] / den2, -1.0 / den2])
                    c = P.polyadd(c, P.polymul(w2, funcs[j + 1][s]))
                spans.append(np.trim_zeros(c, "b") if c.any() else np.zeros(1))
            new.append(spans)
        funcs = new
    return [np.asarray(c, dtype=float) for c in funcs[0]]


def _integral(c: np.ndarray, a: float, b: float) -> float:
    ci = P.polyint(c)
    return float(_poly_eval(ci, b) - _poly_eval(ci, a))


@dataclass
class MollifierTensor:
    """Tensor-product mollifier m(x) = m1(x1) * m2(x2)."""

    factors: tuple[Mollifier1D, ...]

    @classmethod
    def make(cls, kind: str, degree: int, h_m: float, dim: int = 2) -> "MollifierTensor":
        return cls(tuple(Mollifier1D.make(kind, degree, h_m) for _ in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.factors)

    @property
    def h_m(self) -> float:
        return self.factors[0].h_m

    @property
    def halfwidth(self) -> float:
        return 0.5 * self.h_m

    def support_box(self, center) -> Box:
        return Box((float(center[0]), float(center[1])), self.halfwidth)

    def eval(self, p) -> float:
        out = 1.0
        for k, m in enumerate(self.factors):
            out *= m.eval(p[k])
        return float(out)

    def grad(self, p) -> np.ndarray:
        vals = [m.eval(p[k]) for k, m in enumerate(self.factors)]
        ders = [m.eval(p[k], order=1) for k, m in enumerate(self.factors)]
        g = np.zeros(self.dim)
        for k in range(self.dim):
            gk = ders[k]
            for j in range(self.dim):
                if j != k:
                    gk *= vals[j]
            g[k] = gk
        return g
