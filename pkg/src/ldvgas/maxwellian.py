"""Gas model and Maxwellian distributions on velocity grids.

Sampling a continuous Maxwellian on a coarse grid gives node values
whose quadrature moments drift from the target state, which slowly
leaks mass and energy out of a scheme.  The discrete Maxwellian fixes
this: it is the exponential-family density exp(a0 + a1*v + a2*v^2)
whose *quadrature* moments match the target exactly, found by Newton
iteration on the three coefficients.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import MaxwellianConvergenceError
from .grid import MomentVector, VelocityGrid

__all__ = [
    "GasModel",
    "MaxwellianParams",
    "continuous_maxwellian",
    "discrete_maxwellian",
]

log = logging.getLogger(__name__)

REGIMES = ("finite-tau", "fluid", "free-transport")

# Newton settings.  The solve runs in centered, thermally scaled velocity
# coordinates, so a relative residual of 1e-12 is reachable in a handful
# of iterations from the continuous-Maxwellian starting point.
_TOL = 1e-12
_MAX_ITER = 50
_MAX_HALVINGS = 30
_EXP_CAP = 700.0  # keep exp() finite while a damped step is still wild


@dataclass(frozen=True)
class GasModel:
    """Gas constant plus the relaxation-time law tau = C * T**omega / rho."""

    R: float
    C: float = 0.0
    omega: float = 0.0
    regime: str = "finite-tau"

    def __post_init__(self):
        if self.R <= 0.0:
            raise ValueError(f"gas constant must be positive, got {self.R}")
        if self.regime not in REGIMES:
            raise ValueError(f"regime must be one of {REGIMES}, got {self.regime!r}")
        if self.regime == "finite-tau" and self.C <= 0.0:
            raise ValueError("finite-tau regime needs a positive relaxation prefactor")

    def tau(self, rho: float, T: float) -> float:
        return self.C * T**self.omega / rho


@dataclass(frozen=True)
class MaxwellianParams:
    """Coefficients of exp(a0 + a1*v + a2*v^2) with a2 < 0, plus solve info."""

    alpha: np.ndarray
    residual: float
    iterations: int


def continuous_maxwellian(U: MomentVector, R: float, v: np.ndarray) -> np.ndarray:
    """Pointwise 1D Maxwellian with the density, velocity, temperature of U."""
    return _gaussian(U.rho, U.velocity, U.temperature(R), R, v)


def _gaussian(rho, u, T, R, v):
    RT = R * T
    v = np.asarray(v, dtype=float)
    return rho / np.sqrt(2.0 * np.pi * RT) * np.exp(-((v - u) ** 2) / (2.0 * RT))


def discrete_maxwellian(
    U: MomentVector,
    grid: VelocityGrid,
    R: float,
    return_params: bool = False,
):
    """Node values of the quadrature-exact Maxwellian for state U.

    Raises MaxwellianConvergenceError if Newton stalls; the caller
    decides whether to fall back on the continuous Maxwellian.
    """
    values, alpha, residual, iters, ok = _solve_batch(
        grid.nodes[None, :],
        grid.weights[None, :],
        np.array([U.rho]),
        np.array([U.velocity]),
        np.array([R * U.temperature(R)]),
    )
    if not ok[0]:
        raise MaxwellianConvergenceError(
            f"no convergence after {iters} iterations (residual {residual[0]:.3e})",
            residual=float(residual[0]),
        )
    if return_params:
        params = MaxwellianParams(alpha[0], float(residual[0]), iters)
        return values[0], params
    return values[0]


def _solve_batch(nodes, weights, rho, u, RT, tol=_TOL, max_iter=_MAX_ITER):
    """Moment-matching Newton solve for a batch of states on their grids.

    nodes, weights: (n, K) arrays; rho, u, RT: (n,), with RT the product
    of gas constant and temperature.  Works in the centered variable
    w = (v - u)/sqrt(RT), where the target moments reduce to
    (rho/s, 0, rho/2s) and the Jacobian stays well conditioned no
    matter how fast or cold the state is.

    Returns (values, alpha, residual, iterations, converged) with alpha
    the v-space coefficients of exp(a0 + a1*v + a2*v^2).
    """
    n = rho.shape[0]
    sigma = np.sqrt(RT)
    w = (nodes - u[:, None]) / sigma[:, None]
    ww = weights / sigma[:, None]
    half_w2 = 0.5 * w * w
    basis = np.stack([np.ones_like(w), w, half_w2], axis=-1)  # (n, K, 3)
    scale = rho / sigma
    target = np.zeros((n, 3))
    target[:, 0] = scale
    target[:, 2] = 0.5 * scale

    beta = np.zeros((n, 3))
    beta[:, 0] = np.log(rho / (sigma * np.sqrt(2.0 * np.pi)))
    beta[:, 2] = -1.0

    def residual_of(b):
        expo = b[:, 0, None] + b[:, 1, None] * w + b[:, 2, None] * half_w2
        M = np.exp(np.minimum(expo, _EXP_CAP))
        G = np.einsum("nk,nkc->nc", M * ww, basis) - target
        return M, G, np.max(np.abs(G), axis=1) / scale

    M, G, res = residual_of(beta)
    iters = 0
    active = res > tol
    while iters < max_iter and np.any(active):
        Mw = (M * ww) * active[:, None]  # frozen rows get an identity solve
        J = np.einsum("nk,nkc,nkd->ncd", Mw, basis, basis)
        J[~active] = np.eye(3)
        try:
            delta = np.linalg.solve(J, -G[..., None])[..., 0]
        except np.linalg.LinAlgError:
            delta, active = _solve_rowwise(J, -G, active)
        delta[~active] = 0.0

        step = np.ones((n, 1))
        for _ in range(_MAX_HALVINGS):
            Mc, Gc, resc = residual_of(beta + step * delta)
            worse = active & (resc > res) & (res > tol)
            if not np.any(worse):
                break
            step[worse] *= 0.5
        beta = beta + step * delta
        M, G, res = np.where(active[:, None], Mc, M), np.where(
            active[:, None], Gc, G
        ), np.where(active, resc, res)
        iters += 1
        active = active & (res > tol)

    alpha = np.empty((n, 3))
    alpha[:, 2] = 0.5 * beta[:, 2] / RT
    alpha[:, 1] = beta[:, 1] / sigma - beta[:, 2] * u / RT
    alpha[:, 0] = beta[:, 0] - beta[:, 1] * u / sigma + 0.5 * beta[:, 2] * u * u / RT
    return M, alpha, res, iters, res <= tol


def _solve_rowwise(J, rhs, active):
    """Fallback when the batched solve hits a singular Jacobian."""
    n = J.shape[0]
    delta = np.zeros_like(rhs)
    ok = active.copy()
    for i in range(n):
        if not active[i]:
            continue
        try:
            delta[i] = np.linalg.solve(J[i], rhs[i])
        except np.linalg.LinAlgError:
            ok[i] = False
    return delta, ok
