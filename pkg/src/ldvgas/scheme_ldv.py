"""One time step on local velocity grids that follow the macroscopic flow.

The step advances the conserved moments with upwind half fluxes, rebuilds
every cell's velocity grid around its new state, transports the
reconstructed distribution onto the new nodes along characteristics, and
relaxes it toward the discrete Maxwellian of the new moments in closed
form.  Freezing the grids turns the very same step into the classic
global-grid method, which is what the baseline module delegates to.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cases import (
    BoundaryGhost,
    CaseSpec,
    diffuse_wall_ghosts,
    initial_moments,
    wall_maxwellian,
)
from .errors import (
    DegenerateGridError,
    EnlargementOverflowError,
    MaxwellianConvergenceError,
    NegativeTemperatureError,
    SolverError,
)
from .grid import (
    MomentVector,
    VelocityGrid,
    _trapezoid_weights,
    build_local_grid,
    extend_grid,
    moments,
)
from .maxwellian import GasModel, _solve_batch, continuous_maxwellian, discrete_maxwellian
from .reconstruct import Reconstruction, _dd_table, _evaluate, _locate_uniform

ENLARGE_TOL = 1e-4
GROWTH_CAP = 16
_MAX_REDOS = 8


@dataclass(frozen=True)
class CellState:
    """Distribution values on one cell's velocity grid, plus its moments.

    For the moment-correction and exact-integral variants the stored
    moments are the (quadrature or exact) moments of `values`; for the
    base variant they follow the fluxed update and are allowed to drift
    from the quadrature of `values`.
    """

    grid: VelocityGrid
    values: np.ndarray
    moments: MomentVector

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.nodes.shape:
            raise ValueError(
                f"values shape {values.shape} does not match grid size {self.grid.size}"
            )
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class StepDiagnostics:
    """Per-step health record."""

    dt: float
    totals: np.ndarray
    flux_left: np.ndarray
    flux_right: np.ndarray
    min_value: float
    max_size: int
    enlarged: int
    fallbacks: int
    redos: int


def initial_row(
    case: CaseSpec,
    *,
    velocities: int | None = None,
    span: float = 4.0,
    points: int = 4,
    variant: str | None = None,
    grid: VelocityGrid | None = None,
) -> list[CellState]:
    """Cells at t=0: discrete Maxwellians of the initial macroscopic fields.

    Passing a shared `grid` freezes every cell onto the same global nodes.
    The exact-integral variant stores the reconstruction integrals as its
    starting moments so that its realizability guarantee holds from the
    first step.
    """
    K = velocities if velocities is not None else case.velocities
    R = case.gas.R
    cells = []
    for U in initial_moments(case):
        g = grid if grid is not None else build_local_grid(U, K, R, span)
        f = discrete_maxwellian(U, g, R)
        if variant == "exact-integral":
            U = MomentVector.from_array(
                Reconstruction(g, f, points).integrate_moments("m")
            )
        cells.append(CellState(g, f, U))
    return cells


def _half_flux(cell, sign: int) -> np.ndarray:
    """Outgoing (sign>0) or incoming half flux of (1, v, v^2/2) moments."""
    v = cell.grid.nodes
    vh = np.maximum(v, 0.0) if sign > 0 else np.minimum(v, 0.0)
    a = cell.grid.weights * cell.values * vh
    return np.array([a.sum(), (a * v).sum(), 0.5 * (a * v * v).sum()])


def numerical_flux(left, right, *, exact: bool = False, points: int = 4) -> MomentVector:
    """Interface flux: each half integrated on its own cell's grid."""
    if exact:
        out = Reconstruction(left.grid, left.values, points).integrate_moments("v+m")
        inc = Reconstruction(right.grid, right.values, points).integrate_moments("v-m")
        return MomentVector.from_array(out + inc)
    return MomentVector.from_array(_half_flux(left, +1) + _half_flux(right, -1))


def _interface_fluxes(cells, ghosts, *, exact: bool, points: int) -> np.ndarray:
    row = [ghosts[0], *cells, ghosts[1]]
    if exact:
        recons = [Reconstruction(c.grid, c.values, points) for c in row]
        out = [r.integrate_moments("v+m") for r in recons]
        inc = [r.integrate_moments("v-m") for r in recons]
    else:
        out = [_half_flux(c, +1) for c in row]
        inc = [_half_flux(c, -1) for c in row]
    return np.array([out[j] + inc[j + 1] for j in range(len(row) - 1)])


def _check_realizable(U: np.ndarray) -> None:
    rho = U[:, 0]
    bad = rho <= 0.0
    safe = np.where(bad, 1.0, rho)
    bad |= U[:, 2] - 0.5 * U[:, 1] ** 2 / safe <= 0.0
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise NegativeTemperatureError(
            f"cell {i}: moments {U[i]} have no positive-temperature state", cell=i
        )


def _local_bounds(U: np.ndarray, R: float, span: float):
    """Per-row support bounds u +- span*sqrt(RT), same bits as the scalar path."""
    rho = U[:, 0]
    u = U[:, 1] / rho
    T = (2.0 * U[:, 2] / rho - u * u) / R
    c = np.sqrt(R * T)
    return u - span * c, u + span * c


def conservation_update(
    cells,
    dt: float,
    dx: float,
    *,
    ghosts,
    variant: str = "base",
    points: int = 4,
) -> tuple[list[MomentVector], np.ndarray]:
    """Fluxed moment update per cell.

    Returns the new moments and the interface fluxes (one row per
    interface, outermost rows included), which the caller needs for
    conservation accounting.
    """
    phi = _interface_fluxes(
        cells, ghosts, exact=variant == "exact-integral", points=points
    )
    U = np.array([c.moments.as_array() for c in cells])
    U_new = U - (dt / dx) * (phi[1:] - phi[:-1])
    _check_realizable(U_new)
    return [MomentVector.from_array(u) for u in U_new], phi


@dataclass
class _Packed:
    """Rectangular row storage; columns past each row's size are padding."""

    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    sizes: np.ndarray
    dv: np.ndarray


def _pack(grids, values=None, pad: int = 0) -> _Packed:
    m = len(grids)
    g0 = grids[0]
    if pad == 0 and all(g is g0 for g in grids):
        # shared grid: broadcast views, no per-row copies
        k = g0.size
        nodes = np.broadcast_to(g0.nodes, (m, k))
        wts = np.broadcast_to(g0.weights, (m, k))
        vals = np.stack(values) if values is not None else np.zeros((m, k))
        return _Packed(nodes, wts, vals, np.full(m, k), np.full(m, g0.dv))
    sizes = np.array([g.size for g in grids])
    W = int(sizes.max()) + pad
    nodes = np.zeros((m, W))
    wts = np.zeros((m, W))
    vals = np.zeros((m, W))
    dv = np.empty(m)
    for i, g in enumerate(grids):
        k = sizes[i]
        nodes[i, :k] = g.nodes
        wts[i, :k] = g.weights
        if values is not None:
            vals[i, :k] = values[i]
        dv[i] = g.dv
        if k < W:
            # keep padding sorted so divided differences stay finite
            nodes[i, k:] = g.nodes[-1] + dv[i] * np.arange(1, W - k + 1)
    return _Packed(nodes, wts, vals, sizes, dv)


def _pack_uniform(lo, hi, size: int, pad: int = 0) -> _Packed:
    """Packed row of uniform grids on [lo_i, hi_i], same bits as per-cell builds."""
    if not np.all(hi > lo):
        i = int(np.flatnonzero(~(hi > lo))[0])
        raise DegenerateGridError(f"cell {i}: empty velocity span [{lo[i]}, {hi[i]}]")
    m = lo.size
    dv = (hi - lo) / (size - 1)
    nodes = lo[:, None] + dv[:, None] * np.arange(size + pad)
    wts = np.zeros((m, size + pad))
    wts[:, :size] = dv[:, None]
    wts[:, 0] = 0.5 * dv
    wts[:, size - 1] = 0.5 * dv
    return _Packed(nodes, wts, np.zeros((m, size + pad)), np.full(m, size), dv)


def _half_fluxes_packed(packed: _Packed):
    """Row-at-a-time version of the half fluxes; padding has zero weight."""
    v = packed.nodes
    base = packed.weights * packed.values
    out = np.empty((v.shape[0], 3))
    inc = np.empty_like(out)
    for F, vh in ((out, np.maximum(v, 0.0)), (inc, np.minimum(v, 0.0))):
        a = base * vh
        F[:, 0] = a.sum(axis=1)
        av = a * v
        F[:, 1] = av.sum(axis=1)
        F[:, 2] = 0.5 * (av * v).sum(axis=1)
    return out, inc


def _moments_packed(packed: _Packed, values) -> np.ndarray:
    fw = values * packed.weights
    v = packed.nodes
    return np.stack(
        [fw.sum(axis=1), (fw * v).sum(axis=1), 0.5 * (fw * v * v).sum(axis=1)], axis=1
    )


@dataclass
class _Transport:
    """Characteristic upwind update evaluated at arbitrary velocities.

    Holds the divided-difference tables of the ghosted row at time tn.
    `apply` uses the convex form of the update, so 2-point stencils keep
    non-negative data non-negative under the CFL condition.
    """

    packed: _Packed
    table: np.ndarray
    points: int

    @classmethod
    def build(cls, packed: _Packed, points: int) -> "_Transport":
        return cls(packed, _dd_table(packed.values, packed.nodes, packed.sizes, points), points)

    def _interp(self, rows, X):
        nodes = self.packed.nodes[rows]
        sizes = self.packed.sizes[rows]
        left = _locate_uniform(nodes[:, 0], self.packed.dv[rows], sizes, X)
        return _evaluate(self.table[:, rows], nodes, sizes, left, X, self.points)

    def apply(self, center, left, right, X, lam, self_values=None):
        E0 = self._interp(center, X) if self_values is None else self_values
        EL = self._interp(left, X)
        ER = self._interp(right, X)
        vp = np.maximum(X, 0.0)
        vm = np.minimum(X, 0.0)
        return (1.0 - lam * np.abs(X)) * E0 + (lam * vp) * EL - (lam * vm) * ER


def moment_correction(cell, *, exact: bool = False, points: int = 4) -> MomentVector:
    """Moments recomputed from the cell's own distribution."""
    if exact:
        return MomentVector.from_array(
            Reconstruction(cell.grid, cell.values, points).integrate_moments("m")
        )
    return moments(cell.values, cell.grid)


def select_timestep(cells, dx, cfl_safety: float = 1.0, *, ghosts=(), new_grids=()) -> float:
    """Largest stable step, cfl_safety * dx / max |v| over every grid."""
    smax = 0.0
    for c in cells:
        smax = max(smax, c.grid.max_speed())
    for g in ghosts:
        smax = max(smax, g.grid.max_speed())
    for g in new_grids:
        smax = max(smax, g.max_speed())
    if smax <= 0.0:
        raise DegenerateGridError("no nonzero velocity node to set the time step")
    return cfl_safety * dx / smax


def _relax(packed: _Packed, f_star, U, gas: GasModel, dt, fallback: bool):
    """Implicit relaxation toward the discrete Maxwellian, in closed form."""
    col = np.arange(f_star.shape[1])[None, :]
    valid = col < packed.sizes[:, None]
    if gas.regime == "free-transport":
        return np.where(valid, f_star, 0.0), 0
    rho = U[:, 0]
    u = U[:, 1] / rho
    T = (2.0 * U[:, 2] / rho - u * u) / gas.R
    M, _, res, _, ok = _solve_batch(packed.nodes, packed.weights, rho, u, gas.R * T)
    nfall = 0
    if not ok.all():
        bad = np.flatnonzero(~ok)
        if not fallback:
            i = int(bad[0])
            raise MaxwellianConvergenceError(
                f"discrete Maxwellian failed in cell {i}", residual=float(res[i])
            )
        for i in bad:
            M[i] = continuous_maxwellian(MomentVector.from_array(U[i]), gas.R, packed.nodes[i])
        nfall = bad.size
    if gas.regime == "fluid":
        out = M
    else:
        c = (dt / gas.tau(rho, T))[:, None]
        out = (f_star + c * M) / (1.0 + c)
    return np.where(valid, out, 0.0), nfall


def _enlarge_packed(packed: _Packed, f_star, tr: _Transport, lam, tol, cap):
    """Append nodes while a transported tail is still visible at a boundary.

    Right side first, then left, repeating until every boundary value is
    below tol times its cell's peak.  A new node takes its value from the
    same transport formula, so a node outside every old support starts at
    exactly zero and the growth stops there.
    """
    nodes, weights, sizes = packed.nodes, packed.weights, packed.sizes
    sizes0 = sizes.copy()
    total = 0
    while True:
        grew = False
        peak = np.abs(f_star).max(axis=1)
        for side in ("right", "left"):
            if side == "right":
                edge = np.take_along_axis(f_star, (sizes - 1)[:, None], axis=1)[:, 0]
            else:
                edge = f_star[:, 0]
            idx = np.flatnonzero(np.abs(edge) > tol * peak)
            if idx.size == 0:
                continue
            if np.any(sizes[idx] >= cap):
                i = int(idx[np.argmax(sizes[idx])])
                raise EnlargementOverflowError(
                    f"cell {i} grid grew past the cap of {cap} nodes"
                )
            if int(sizes[idx].max()) + 1 > nodes.shape[1]:
                grow = ((0, 0), (0, 8))
                nodes = np.pad(nodes, grow)
                weights = np.pad(weights, grow)
                f_star = np.pad(f_star, grow)
            if side == "right":
                last = sizes[idx] - 1
                a = nodes[idx, last]
                v_new = a + (a - nodes[idx, last - 1])
                f_new = tr.apply(idx + 1, idx, idx + 2, v_new[:, None], lam)[:, 0]
                nodes[idx, last + 1] = v_new
                f_star[idx, last + 1] = f_new
            else:
                a = nodes[idx, 0]
                v_new = a - (nodes[idx, 1] - a)
                f_new = tr.apply(idx + 1, idx, idx + 2, v_new[:, None], lam)[:, 0]
                nodes[idx] = np.roll(nodes[idx], 1, axis=1)
                f_star[idx] = np.roll(f_star[idx], 1, axis=1)
                nodes[idx, 0] = v_new
                f_star[idx, 0] = f_new
            sizes[idx] += 1
            total += idx.size
            grew = True
        if not grew:
            break
    for i in np.flatnonzero(sizes != sizes0):
        k = sizes[i]
        weights[i, :k] = _trapezoid_weights(nodes[i, :k])
        weights[i, k:] = 0.0
    packed.nodes, packed.weights, packed.sizes = nodes, weights, sizes
    return f_star, total


def enlarge_step(
    new_grid: VelocityGrid,
    left,
    center,
    right,
    dt: float,
    dx: float,
    *,
    points: int = 4,
    tol: float = ENLARGE_TOL,
    cap: int | None = None,
):
    """Transport one cell onto a tentative grid, widening it as needed.

    left/center/right are the time-tn states feeding the characteristics.
    Returns (grid, transported values, number of appended nodes); the
    relaxation is applied afterward by the caller.
    """
    packed = _pack(
        [left.grid, center.grid, right.grid],
        [left.values, center.values, right.values],
    )
    tr = _Transport.build(packed, points)
    one = np.array([1])
    lam = dt / dx
    f = tr.apply(one, one - 1, one + 1, new_grid.nodes[None, :], lam)[0]
    cap = GROWTH_CAP * center.grid.size if cap is None else cap
    grid = new_grid
    count = 0
    while True:
        grew = False
        peak = np.abs(f).max()
        for side in ("right", "left"):
            edge = f[-1] if side == "right" else f[0]
            if abs(edge) <= tol * peak:
                continue
            if grid.size >= cap:
                raise EnlargementOverflowError(f"grid grew past the cap of {cap} nodes")
            grid = extend_grid(grid, side)
            pos = -1 if side == "right" else 0
            f_new = tr.apply(one, one - 1, one + 1, np.array([[grid.nodes[pos]]]), lam)[0, 0]
            f = np.append(f, f_new) if side == "right" else np.insert(f, 0, f_new)
            count += 1
            grew = True
        if not grew:
            return grid, f, count


def kinetic_update(
    cells,
    new_grids,
    new_moments,
    dt: float,
    dx: float,
    gas: GasModel,
    *,
    ghosts,
    points: int = 4,
    fallback: bool = False,
) -> list[np.ndarray]:
    """Transport every cell onto its new grid, then relax.

    Reconstruction evaluation at a velocity outside a neighbor's support
    contributes zero, which is what lets grids move independently.
    """
    row = [ghosts[0], *cells, ghosts[1]]
    packed = _pack([c.grid for c in row], [c.values for c in row])
    tr = _Transport.build(packed, points)
    pn = _pack(new_grids)
    f_star = tr.apply(slice(1, -1), slice(0, -2), slice(2, None), pn.nodes, dt / dx)
    col = np.arange(pn.nodes.shape[1])[None, :]
    f_star = np.where(col < pn.sizes[:, None], f_star, 0.0)
    U = np.array([u.as_array() for u in new_moments])
    values, _ = _relax(pn, f_star, U, gas, dt, fallback)
    return [values[i, : pn.sizes[i]].copy() for i in range(len(cells))]


def _ghost_pair(cells, case: CaseSpec, *, span: float, cache: dict | None):
    """Boundary closure: copies for open ends, wall Maxwellians otherwise."""
    if case.boundary == "neumann":
        a, b = cells[0], cells[-1]
        return (
            BoundaryGhost(a.grid, a.values, a.moments),
            BoundaryGhost(b.grid, b.values, b.moments),
        )
    R = case.gas.R
    shared = cells[0].grid if all(c.grid is cells[0].grid for c in cells) else None
    if cache is None:
        cache = {}
    grids = []
    units = []
    for key, cell, T_wall in (
        ("left", cells[0], case.wall_temperatures[0]),
        ("right", cells[-1], case.wall_temperatures[1]),
    ):
        want = shared if shared is not None else None
        entry = cache.get(key)
        if want is None:
            k = cell.grid.size
            if entry is None or entry[0].size != k:
                g = build_local_grid(MomentVector.from_primitive(1.0, 0.0, T_wall, R), k, R, span)
                entry = (g, wall_maxwellian(T_wall, g, R))
                cache[key] = entry
        else:
            if entry is None or entry[0] is not want:
                entry = (want, wall_maxwellian(T_wall, want, R))
                cache[key] = entry
        grids.append(entry[0])
        units.append(entry[1])
    return diffuse_wall_ghosts(
        cells[0], cells[-1], case.wall_temperatures, R, tuple(grids), tuple(units)
    )


def ldv_step(
    cells,
    case: CaseSpec,
    dt: float | None = None,
    *,
    variant: str | None = None,
    points: int | None = None,
    velocities: int | None = None,
    span: float = 4.0,
    frozen: bool = False,
    enlarge: bool | None = None,
    enlarge_tol: float = ENLARGE_TOL,
    growth_cap: int = GROWTH_CAP,
    cfl_safety: float = 1.0,
    strict_dt: bool = False,
    fallback: bool = False,
    wall_cache: dict | None = None,
) -> tuple[list[CellState], StepDiagnostics]:
    """Advance one row of cells by a single step.

    `frozen` keeps all grids fixed, which turns the step into the
    global-grid method.  `strict_dt` re-runs the moment update with a
    smaller dt whenever the rebuilt (and possibly enlarged) grids break
    the CFL bound, instead of trusting the time-tn speeds.
    """
    gas = case.gas
    variant = case.variant if variant is None else variant
    points = case.points if points is None else points
    enlarge = case.enlarge if enlarge is None else enlarge
    if frozen:
        enlarge = False
    K = velocities if velocities is not None else case.velocities
    dx = case.dx
    exact = variant == "exact-integral"

    ghosts = _ghost_pair(cells, case, span=span, cache=wall_cache)
    row = [ghosts[0], *cells, ghosts[1]]
    if frozen:
        g0 = cells[0].grid
        if any(c.grid is not g0 for c in row):
            raise DegenerateGridError("frozen step needs one shared velocity grid")
    packed = _pack([c.grid for c in row], [c.values for c in row])
    # on a shared grid the transported values at the (unchanged) nodes are
    # the stored values themselves, so no reconstruction table is needed
    tr = None if frozen else _Transport.build(packed, points)
    if exact:
        phi = _interface_fluxes(cells, ghosts, exact=True, points=points)
    else:
        out, inc = _half_fluxes_packed(packed)
        phi = out[:-1] + inc[1:]
    U_start = np.array([c.moments.as_array() for c in cells])
    if dt is None:
        dt = select_timestep(cells, dx, cfl_safety, ghosts=ghosts)

    redos = 0
    while True:
        lam = dt / dx
        U_new = U_start - lam * (phi[1:] - phi[:-1])
        _check_realizable(U_new)
        if frozen:
            pn = _Packed(
                packed.nodes[1:-1],
                packed.weights[1:-1],
                packed.values[1:-1],
                packed.sizes[1:-1],
                packed.dv[1:-1],
            )
            V = pn.nodes
            F = packed.values
            vp = np.maximum(V, 0.0)
            vm = np.minimum(V, 0.0)
            f_star = (
                (1.0 - lam * np.abs(V)) * F[1:-1] + (lam * vp) * F[:-2] - (lam * vm) * F[2:]
            )
        else:
            lo, hi = _local_bounds(U_new, gas.R, span)
            pn = _pack_uniform(lo, hi, K, pad=1 if enlarge else 0)
            f_star = tr.apply(slice(1, -1), slice(0, -2), slice(2, None), pn.nodes, lam)
            col = np.arange(pn.nodes.shape[1])[None, :]
            f_star = np.where(col < pn.sizes[:, None], f_star, 0.0)
        enlarged = 0
        if enlarge:
            f_star, enlarged = _enlarge_packed(
                pn, f_star, tr, lam, enlarge_tol, growth_cap * K
            )
        if not strict_dt:
            break
        first = np.abs(pn.nodes[:, 0])
        last = np.abs(np.take_along_axis(pn.nodes, (pn.sizes - 1)[:, None], axis=1)[:, 0])
        s_new = float(max(first.max(), last.max()))
        if dt * s_new <= cfl_safety * dx * (1.0 + 1e-12):
            break
        dt = cfl_safety * dx / s_new
        redos += 1
        if redos > _MAX_REDOS:
            raise SolverError(f"time step did not settle after {_MAX_REDOS} retries")

    values, nfall = _relax(pn, f_star, U_new, gas, dt, fallback)

    if variant == "moment-correction":
        U_stored = _moments_packed(pn, values)
    else:
        U_stored = U_new
    new_cells = []
    for i in range(len(cells)):
        k = int(pn.sizes[i])
        if frozen:
            g = cells[i].grid
        else:
            g = VelocityGrid(pn.nodes[i, :k].copy(), pn.weights[i, :k].copy())
        f = values[i, :k].copy()
        if exact:
            U_i = MomentVector.from_array(
                Reconstruction(g, f, points).integrate_moments("m")
            )
        else:
            U_i = MomentVector.from_array(U_stored[i])
        new_cells.append(CellState(g, f, U_i))

    totals = np.sum([c.moments.as_array() for c in new_cells], axis=0) * dx
    valid = np.arange(values.shape[1])[None, :] < pn.sizes[:, None]
    diag = StepDiagnostics(
        dt=float(dt),
        totals=totals,
        flux_left=phi[0].copy(),
        flux_right=phi[-1].copy(),
        min_value=float(np.where(valid, values, np.inf).min()),
        max_size=int(pn.sizes.max()),
        enlarged=int(enlarged),
        fallbacks=int(nfall),
        redos=redos,
    )
    return new_cells, diag
