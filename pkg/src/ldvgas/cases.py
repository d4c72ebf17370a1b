"""The published 1D test cases and their boundary treatments.

Five setups: a Sod shock tube in rarefied, fluid, and collisionless
regimes, two interacting blast waves, and heat transfer between walls
at different temperatures.  Each case carries its physical data plus
the solver settings it was published with, so a run can be launched
from the case name alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWallError
from .grid import MomentVector, VelocityGrid, build_local_grid, moments
from .maxwellian import GasModel, discrete_maxwellian

__all__ = [
    "Band",
    "CaseSpec",
    "BoundaryGhost",
    "CASE_NAMES",
    "HEAT_TRANSFER_KNUDSEN",
    "make_case",
    "cell_centers",
    "initial_moments",
    "diffuse_wall_ghosts",
    "wall_maxwellian",
    "free_transport_exact",
]

CASE_NAMES = ("sod-rarefied", "sod-fluid", "sod-free", "blast", "heat-transfer")

# Knudsen number -> (initial density, space cells, velocities per grid)
HEAT_TRANSFER_KNUDSEN = {
    1e-2: (1.88862e-5, 1000, 30),
    1.0: (1.88862e-7, 300, 300),
    10.0: (1.88862e-8, 300, 100),
    1000.0: (1.88862e-10, 300, 100),
}


@dataclass(frozen=True)
class Band:
    """One piecewise-constant slab of the initial condition."""

    x_lo: float
    x_hi: float
    rho: float
    u: float
    T: float


@dataclass(frozen=True)
class CaseSpec:
    name: str
    domain: tuple[float, float]
    nx: int
    t_final: float
    output_times: tuple[float, ...]
    gas: GasModel
    bands: tuple[Band, ...]
    boundary: str  # "neumann" or "diffuse-wall"
    wall_temperatures: tuple[float, float] | None = None
    # solver settings the case was published with
    velocities: int = 30
    points: int = 4
    variant: str = "moment-correction"
    enlarge: bool = False

    @property
    def dx(self) -> float:
        return (self.domain[1] - self.domain[0]) / self.nx


def make_case(name: str, kn: float = 1e-2, nx: int | None = None) -> CaseSpec:
    """Build a named test case, optionally overriding the cell count."""
    if name == "sod-rarefied" or name == "sod-fluid":
        gas = GasModel(
            R=208.1,
            C=1.08e-9,
            omega=-0.19,
            regime="finite-tau" if name == "sod-rarefied" else "fluid",
        )
        spec = CaseSpec(
            name=name,
            domain=(0.0, 0.6),
            nx=nx or 300,
            t_final=7.34e-2,
            output_times=(7.34e-2,),
            gas=gas,
            bands=(
                Band(0.0, 0.3, 1e-4, 0.0, 0.00480208),
                Band(0.3, 0.6, 1.25e-5, 0.0, 0.00384167),
            ),
            boundary="neumann",
            velocities=30 if name == "sod-rarefied" else 10,
            variant="moment-correction" if name == "sod-rarefied" else "base",
        )
    elif name == "sod-free":
        # dimensionless shock tube, pressure 1 / 0.1 -> T = 1 / 0.8
        spec = CaseSpec(
            name=name,
            domain=(-1.0, 1.0),
            nx=nx or 300,
            t_final=0.3,
            output_times=(0.3,),
            gas=GasModel(R=1.0, regime="free-transport"),
            bands=(
                Band(-1.0, 0.0, 1.0, 0.0, 1.0),
                Band(0.0, 1.0, 0.125, 0.0, 0.8),
            ),
            boundary="neumann",
        )
    elif name == "blast":
        spec = CaseSpec(
            name=name,
            domain=(0.0, 1.0),
            nx=nx or 300,
            t_final=0.05,
            output_times=(0.008, 0.05),
            gas=GasModel(R=208.1, C=1.08e-9, omega=-0.19),
            bands=(
                Band(0.0, 0.1, 1.0, 0.0, 4.8),
                Band(0.1, 0.9, 1.0, 0.0, 4.8e-5),
                Band(0.9, 1.0, 1.0, 0.0, 0.48),
            ),
            boundary="neumann",
        )
    elif name == "heat-transfer":
        if kn not in HEAT_TRANSFER_KNUDSEN:
            known = sorted(HEAT_TRANSFER_KNUDSEN)
            raise ValueError(f"knudsen must be one of {known}, got {kn}")
        rho0, nx_default, velocities = HEAT_TRANSFER_KNUDSEN[kn]
        spec = CaseSpec(
            name=name,
            domain=(0.0, 1.0),
            nx=nx or nx_default,
            t_final=1.3e-3,
            output_times=(1.3e-3,),
            gas=GasModel(R=208.1, C=6.15e-9, omega=-0.5),
            bands=(Band(0.0, 1.0, rho0, 0.0, 300.0),),
            boundary="diffuse-wall",
            wall_temperatures=(300.0, 1000.0),
            velocities=velocities,
            enlarge=True,
        )
    else:
        raise ValueError(f"unknown case {name!r}, expected one of {CASE_NAMES}")
    return spec


def cell_centers(case: CaseSpec) -> np.ndarray:
    xa, xb = case.domain
    return xa + (np.arange(case.nx) + 0.5) * case.dx


def initial_moments(case: CaseSpec) -> list[MomentVector]:
    """Conserved state per cell; a center on a band edge takes the left band."""
    out = []
    for x in cell_centers(case):
        band = case.bands[-1]
        for b in case.bands:
            if x <= b.x_hi:
                band = b
                break
        out.append(MomentVector.from_primitive(band.rho, band.u, band.T, case.gas.R))
    return out


@dataclass(frozen=True)
class BoundaryGhost:
    """Ghost cell state used to close the boundary fluxes."""

    grid: VelocityGrid
    values: np.ndarray
    moments: MomentVector


def wall_maxwellian(T_wall: float, grid: VelocityGrid, R: float) -> np.ndarray:
    """Unit-density resting Maxwellian sampled moment-exactly on a grid."""
    U = MomentVector.from_primitive(1.0, 0.0, T_wall, R)
    return discrete_maxwellian(U, grid, R)


def diffuse_wall_ghosts(
    left_cell,
    right_cell,
    wall_temperatures: tuple[float, float],
    R: float,
    ghost_grids: tuple[VelocityGrid, VelocityGrid],
    unit_walls: tuple[np.ndarray, np.ndarray] | None = None,
) -> tuple[BoundaryGhost, BoundaryGhost]:
    """Ghost states enforcing diffuse reflection at both walls.

    The wall density is the ratio of the outgoing mass flux in the
    boundary cell to the incoming half flux of a unit wall Maxwellian
    on the ghost grid, which balances the mass flux at the wall
    exactly.  `unit_walls` lets a caller reuse the sampled wall
    Maxwellians when the ghost grids do not change between steps.
    """
    T_L, T_R = wall_temperatures
    grid_l, grid_r = ghost_grids
    if unit_walls is None:
        unit_walls = (wall_maxwellian(T_L, grid_l, R), wall_maxwellian(T_R, grid_r, R))
    unit_l, unit_r = unit_walls

    v_l = left_cell.grid.nodes
    out_l = np.sum(np.minimum(v_l, 0.0) * left_cell.values * left_cell.grid.weights)
    in_l = np.sum(np.maximum(grid_l.nodes, 0.0) * unit_l * grid_l.weights)
    v_r = right_cell.grid.nodes
    out_r = np.sum(np.maximum(v_r, 0.0) * right_cell.values * right_cell.grid.weights)
    in_r = np.sum(np.minimum(grid_r.nodes, 0.0) * unit_r * grid_r.weights)
    if in_l <= 0.0 or in_r >= 0.0:
        raise DegenerateWallError(
            f"incoming wall half fluxes degenerate: {in_l:.3e}, {in_r:.3e}"
        )
    rho_l = -out_l / in_l
    rho_r = -out_r / in_r

    ghosts = []
    for rho, grid, unit in ((rho_l, grid_l, unit_l), (rho_r, grid_r, unit_r)):
        values = rho * unit
        ghosts.append(BoundaryGhost(grid, values, moments(values, grid)))
    return ghosts[0], ghosts[1]


def _erf(z):
    return np.vectorize(math.erf, otypes=[float])(z)


def _truncated_moments(rho, u, T, R, a, b):
    """Moments of a Maxwellian restricted to velocities in [a, b].

    Closed form via the error function; a and b may be infinite.
    """
    sigma = math.sqrt(R * T)
    za = (np.asarray(a, dtype=float) - u) / sigma
    zb = (np.asarray(b, dtype=float) - u) / sigma
    Phi = lambda z: 0.5 * (1.0 + _erf(np.clip(z, -40, 40) / math.sqrt(2.0)))
    phi = lambda z: np.exp(-0.5 * np.clip(z, -40, 40) ** 2) / math.sqrt(2.0 * math.pi)
    dPhi = Phi(zb) - Phi(za)
    dphi = phi(za) - phi(zb)
    zphi = np.where(np.isfinite(za), za, 0.0) * phi(za) - np.where(
        np.isfinite(zb), zb, 0.0
    ) * phi(zb)
    m0 = rho * dPhi
    m1 = rho * (u * dPhi + sigma * dphi)
    m2 = rho * (u * u * dPhi + 2.0 * u * sigma * dphi + sigma * sigma * (dPhi + zphi))
    return m0, m1, 0.5 * m2


def free_transport_exact(case: CaseSpec, t: float, x: np.ndarray) -> np.ndarray:
    """Exact conserved moments of collisionless flow from a banded start.

    Transport moves each velocity in a straight line, so the state at
    (t, x) integrates the initial Maxwellian of every band over the
    velocities that started inside it: x - v*t in [lo, hi].  Returns an
    (n, 3) array of (density, momentum, energy).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros((x.size, 3))
    R = case.gas.R
    for j, band in enumerate(case.bands):
        # outer bands continue past the domain, matching open boundaries
        lo = -np.inf if j == 0 else band.x_lo
        hi = np.inf if j == len(case.bands) - 1 else band.x_hi
        if t > 0.0:
            v_lo = (x - hi) / t
            v_hi = (x - lo) / t
        else:
            inside = (lo < x) & (x <= hi)
            v_lo = np.where(inside, -np.inf, np.inf)
            v_hi = np.full_like(x, np.inf)
        m0, m1, m2 = _truncated_moments(band.rho, band.u, band.T, R, v_lo, v_hi)
        out[:, 0] += m0
        out[:, 1] += m1
        out[:, 2] += m2
    return out
