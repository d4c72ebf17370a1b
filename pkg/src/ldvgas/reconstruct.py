"""Piecewise polynomial reconstruction of grid data in velocity space.

When a cell's velocity grid moves between time steps, the old node
values have to be read at the new node positions.  That is done with
an ENO interpolant: starting from the bracketing interval the stencil
grows one node at a time toward the side with the smaller divided
difference, which keeps the polynomial from straddling a steep front.
Outside the source grid the distribution is taken to be zero.

Everything here is written over batches of rows so the solver can
evaluate one reconstruction per spatial cell in single numpy calls.
A row is a source grid (nodes, valid size) plus node values; arrays
are padded on the right, and padded node positions must keep
increasing so divided-difference denominators stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import VelocityGrid

__all__ = ["Reconstruction"]

POINT_COUNTS = (2, 3, 4)


def _dd_table(values: np.ndarray, nodes: np.ndarray, sizes: np.ndarray, points: int):
    """Divided differences D[c][i, k] over nodes k..k+c of row i.

    Entries whose window would cross the end of a row's valid nodes are
    zeroed, so a too-short row degrades to a lower-degree interpolant
    instead of reading padding.
    """
    n, width = values.shape
    col = np.arange(width)
    D = np.zeros((points, n, width))
    D[0] = np.where(col[None, :] < sizes[:, None], values, 0.0)
    for c in range(1, points):
        D[c, :, : width - c] = (
            D[c - 1, :, 1 : width - c + 1] - D[c - 1, :, : width - c]
        ) / (nodes[:, c:] - nodes[:, : width - c])
        D[c][col[None, :] > sizes[:, None] - 1 - c] = 0.0
    return D


def _locate_uniform(vmin, dv, sizes, X):
    """Bracketing interval index for every target on uniform rows."""
    idx = np.floor((X - vmin[:, None]) / dv[:, None]).astype(np.int64)
    return np.clip(idx, 0, (sizes - 2)[:, None])


def _select_stencil(D, sizes, left, points):
    """Grow each 2-point window to `points` nodes, ENO style.

    The candidate with the smaller magnitude divided difference wins;
    ties go left.  At a grid edge the stencil just grows into the grid.
    """
    s = left
    limit = (sizes - 1)[:, None]
    for c in range(2, points):
        can_left = s >= 1
        can_right = s + c <= limit
        ddl = np.abs(np.take_along_axis(D[c], np.maximum(s - 1, 0), axis=1))
        ddr = np.abs(np.take_along_axis(D[c], s, axis=1))
        go_left = can_left & (~can_right | (ddl <= ddr))
        s = np.where(go_left, s - 1, s)
    return s


def _evaluate(D, nodes, sizes, left, X, points):
    """Interpolant values at pre-located targets X (zero outside support)."""
    last = nodes.shape[1] - 1
    xl = np.take_along_axis(nodes, left, axis=1)
    xr = np.take_along_axis(nodes, left + 1, axis=1)
    fl = np.take_along_axis(D[0], left, axis=1)
    fr = np.take_along_axis(D[0], left + 1, axis=1)
    if points == 2:
        # convex combination: non-negative data stays non-negative
        theta = np.clip((X - xl) / (xr - xl), 0.0, 1.0)
        out = (1.0 - theta) * fl + theta * fr
    else:
        s = _select_stencil(D, sizes, left, points)
        out = np.take_along_axis(D[points - 1], s, axis=1)
        for c in range(points - 2, -1, -1):
            xc = np.take_along_axis(nodes, np.minimum(s + c, last), axis=1)
            out = np.take_along_axis(D[c], s, axis=1) + (X - xc) * out
        # targets that sit on a source node get the node value verbatim
        out = np.where(X == xl, fl, np.where(X == xr, fr, out))
    lo = nodes[:, :1]
    hi = np.take_along_axis(nodes, (sizes - 1)[:, None], axis=1)
    # Rounding collar: a target a hair past the boundary keeps the edge
    # interpolant instead of dropping to zero.  Rebuilt grids reproduce
    # their bounds only to roundoff, and without the collar that wobble
    # toggles the edge value between the tail and zero from step to step.
    # Kept far below the node spacing so real extrapolation stays off.
    tol = 1e-9 * (hi - lo)
    return np.where((X < lo - tol) | (X > hi + tol), 0.0, out)


def _newton_to_monomial(D, nodes, s, points):
    """Expand the stencil polynomials into monomial coefficients.

    Returns (points, m) coefficients in ascending powers for each of the
    m selected stencils of one row batch.
    """
    n, m = s.shape
    last = nodes.shape[1] - 1
    coeffs = np.zeros((points, n, m))
    coeffs[0] = np.take_along_axis(D[points - 1], s, axis=1)
    for c in range(points - 2, -1, -1):
        a = np.take_along_axis(nodes, np.minimum(s + c, last), axis=1)
        shifted = np.zeros_like(coeffs)
        shifted[1:] = coeffs[:-1]
        coeffs = shifted - a[None, :, :] * coeffs
        coeffs[0] += np.take_along_axis(D[c], s, axis=1)
    return coeffs


def _power_integrals(coeffs, lo, hi, extra):
    """Integrals of v**extra times the polynomials over [lo, hi]."""
    points = coeffs.shape[0]
    total = np.zeros(lo.shape)
    for p in range(points):
        e = p + extra + 1
        total += coeffs[p] * (hi**e - lo**e) / e
    return np.where(hi > lo, total, 0.0)


@dataclass(frozen=True)
class Reconstruction:
    """ENO interpolant of node values on one velocity grid.

    `points` is the stencil size: 2 gives the positivity-preserving
    linear interpolant, 3 and 4 give the higher order variants.
    """

    grid: VelocityGrid
    values: np.ndarray
    points: int = 4
    _table: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.nodes.shape:
            raise ValueError(
                f"values shape {values.shape} does not match grid size {self.grid.size}"
            )
        if self.points not in POINT_COUNTS:
            raise ValueError(f"points must be one of {POINT_COUNTS}, got {self.points}")
        object.__setattr__(self, "values", values)
        sizes = np.array([self.grid.size])
        table = _dd_table(
            values[None, :], self.grid.nodes[None, :], sizes, self.points
        )
        object.__setattr__(self, "_table", table)

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        scalar = v.ndim == 0
        X = np.atleast_1d(v)[None, :]
        nodes = self.grid.nodes[None, :]
        sizes = np.array([self.grid.size])
        left = np.searchsorted(self.grid.nodes, X[0], side="right") - 1
        left = np.clip(left, 0, self.grid.size - 2)[None, :]
        out = _evaluate(self._table, nodes, sizes, left, X, self.points)[0]
        return float(out[0]) if scalar else out

    def integrate_moments(self, weight: str = "m"):
        """Exact integral of the interpolant against a weight.

        weight: "1", "v+", "v-" give scalars; "m", "v+m", "v-m" give the
        (1, v, v^2/2) moment triple, with v+/v- restricting to the
        outgoing/incoming half of velocity space.
        """
        nodes = self.grid.nodes[None, :]
        sizes = np.array([self.grid.size])
        k = self.grid.size - 1
        left = np.arange(k)[None, :]
        s = (
            left
            if self.points == 2
            else _select_stencil(self._table, sizes, left, self.points)
        )
        coeffs = _newton_to_monomial(self._table, nodes, s, self.points)[:, 0, :]
        lo = self.grid.nodes[:-1].copy()
        hi = self.grid.nodes[1:].copy()
        if weight in ("1", "m"):
            pass
        elif weight in ("v+", "v+m"):
            lo, hi = np.maximum(lo, 0.0), np.maximum(hi, 0.0)
        elif weight in ("v-", "v-m"):
            lo, hi = np.minimum(lo, 0.0), np.minimum(hi, 0.0)
        else:
            raise ValueError(f"unknown weight {weight!r}")

        if weight == "1":
            return float(np.sum(_power_integrals(coeffs, lo, hi, 0)))
        if weight in ("v+", "v-"):
            return float(np.sum(_power_integrals(coeffs, lo, hi, 1)))
        shift = 0 if weight == "m" else 1
        return np.array(
            [
                np.sum(_power_integrals(coeffs, lo, hi, shift)),
                np.sum(_power_integrals(coeffs, lo, hi, shift + 1)),
                0.5 * np.sum(_power_integrals(coeffs, lo, hi, shift + 2)),
            ]
        )
