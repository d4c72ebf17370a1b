"""Velocity grids and their moment quadrature.

A distribution function is stored as node values on a velocity grid
together with trapezoidal quadrature weights.  The weights carry the
node spacing, so every moment is a plain weighted sum and nothing else
in the code needs to know how the grid is spaced.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateGridError, NegativeTemperatureError

__all__ = [
    "MomentVector",
    "VelocityGrid",
    "maxwellian_support_bounds",
    "build_local_grid",
    "build_global_grid",
    "extend_grid",
    "moments",
]


@dataclass(frozen=True)
class MomentVector:
    """Conserved state (density, momentum, total energy) of a 1D gas."""

    rho: float
    momentum: float
    energy: float

    @classmethod
    def from_primitive(cls, rho: float, u: float, T: float, R: float) -> "MomentVector":
        return cls(rho, rho * u, 0.5 * rho * u * u + 0.5 * rho * R * T)

    @classmethod
    def from_array(cls, a) -> "MomentVector":
        return cls(float(a[0]), float(a[1]), float(a[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.rho, self.momentum, self.energy])

    @property
    def velocity(self) -> float:
        return self.momentum / self.rho

    def temperature(self, R: float) -> float:
        u = self.velocity
        return (2.0 * self.energy / self.rho - u * u) / R

    def pressure(self, R: float) -> float:
        return self.rho * R * self.temperature(R)

    def is_realizable(self, R: float) -> bool:
        return self.rho > 0.0 and self.temperature(R) > 0.0


def _trapezoid_weights(nodes: np.ndarray) -> np.ndarray:
    """Composite trapezoid weights for arbitrary (sorted) nodes."""
    w = np.empty_like(nodes)
    w[0] = 0.5 * (nodes[1] - nodes[0])
    w[-1] = 0.5 * (nodes[-1] - nodes[-2])
    w[1:-1] = 0.5 * (nodes[2:] - nodes[:-2])
    return w


@dataclass(frozen=True)
class VelocityGrid:
    """Sorted velocity nodes plus trapezoidal weights (weights include dv)."""

    nodes: np.ndarray
    weights: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise DegenerateGridError(f"need at least 2 nodes, got shape {nodes.shape}")
        if not np.all(np.diff(nodes) > 0.0):
            raise DegenerateGridError("velocity nodes must be strictly increasing")
        weights = self.weights
        if weights is None:
            weights = _trapezoid_weights(nodes)
        else:
            weights = np.asarray(weights, dtype=float)
            if weights.shape != nodes.shape:
                raise ValueError("weights and nodes length mismatch")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, vmin: float, vmax: float, size: int) -> "VelocityGrid":
        if size < 2:
            raise DegenerateGridError(f"need at least 2 nodes, got {size}")
        if not vmax > vmin:
            raise DegenerateGridError(f"empty velocity span [{vmin}, {vmax}]")
        dv = (vmax - vmin) / (size - 1)
        # built as vmin + k*dv so batched code paths reproduce the same bits
        nodes = vmin + dv * np.arange(size)
        w = np.full(size, dv)
        w[0] = 0.5 * dv
        w[-1] = 0.5 * dv
        return cls(nodes, w)

    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def vmin(self) -> float:
        return float(self.nodes[0])

    @property
    def vmax(self) -> float:
        return float(self.nodes[-1])

    @property
    def dv(self) -> float:
        """Boundary spacing; equals the uniform spacing on uniform grids."""
        return float(self.nodes[1] - self.nodes[0])

    def max_speed(self) -> float:
        return max(abs(self.vmin), abs(self.vmax))


def moments(values: np.ndarray, grid: VelocityGrid) -> MomentVector:
    """Quadrature moments of node values against (1, v, v^2/2)."""
    values = np.asarray(values, dtype=float)
    if values.shape != grid.nodes.shape:
        raise ValueError(
            f"values shape {values.shape} does not match grid size {grid.size}"
        )
    fw = values * grid.weights
    v = grid.nodes
    return MomentVector(
        float(np.sum(fw)),
        float(np.sum(fw * v)),
        float(0.5 * np.sum(fw * v * v)),
    )


def maxwellian_support_bounds(
    u: float, T: float, R: float, span: float = 4.0
) -> tuple[float, float]:
    """Velocity interval [u - span*sqrt(RT), u + span*sqrt(RT)].

    Outside a few thermal speeds the Maxwellian carries no usable mass,
    so this interval is what a grid needs to cover.
    """
    if T < 0.0:
        raise NegativeTemperatureError(f"negative temperature {T}")
    c = np.sqrt(R * T)
    return u - span * c, u + span * c


def build_local_grid(
    U: MomentVector, size: int, R: float, span: float = 4.0
) -> VelocityGrid:
    """Uniform grid with `size` nodes covering the support of M(U)."""
    if U.rho <= 0.0:
        raise NegativeTemperatureError(f"non-positive density {U.rho}")
    u = U.velocity
    T = U.temperature(R)
    if T <= 0.0:
        raise NegativeTemperatureError(f"non-positive temperature {T}")
    vmin, vmax = maxwellian_support_bounds(u, T, R, span)
    return VelocityGrid.uniform(vmin, vmax, size)


def build_global_grid(
    fields: list[tuple[float, float]], R: float, span: float = 4.0
) -> VelocityGrid:
    """Single grid covering every (u, T) extreme of a flow.

    The bounds must hold the fastest Maxwellian; the spacing must
    resolve the narrowest one (dv below its thermal speed).  The node
    count follows from the two constraints, which is what makes a
    global grid expensive when temperatures spread over decades.
    """
    if not fields:
        raise DegenerateGridError("no (u, T) states given")
    vmin = np.inf
    vmax = -np.inf
    dv_max = np.inf
    for u, T in fields:
        lo, hi = maxwellian_support_bounds(u, T, R, span)
        vmin = min(vmin, lo)
        vmax = max(vmax, hi)
        dv_max = min(dv_max, np.sqrt(R * T))
    if dv_max <= 0.0:
        raise DegenerateGridError("all states have zero temperature")
    size = int(np.ceil((vmax - vmin) / dv_max)) + 1
    return VelocityGrid.uniform(vmin, vmax, size)


def extend_grid(grid: VelocityGrid, side: str) -> VelocityGrid:
    """New grid with one extra node appended at the boundary spacing."""
    nodes = grid.nodes
    if side == "right":
        step = nodes[-1] - nodes[-2]
        nodes = np.append(nodes, nodes[-1] + step)
    elif side == "left":
        step = nodes[1] - nodes[0]
        nodes = np.insert(nodes, 0, nodes[0] - step)
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return VelocityGrid(nodes)
