"""Half-line grid, weighted norms, finite differences, and boundary traces.

The half-line is truncated at T and sampled uniformly.  All norms are
trapezoid-rule quadratures of the weighted integrand; derivatives use
6th-order stencils (9-point centered in the interior, 10-point skewed rows
near both ends, exact on polynomials of degree <= 6).
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DimensionMismatch, GridTooSmall, InadmissibleWeight
from .operators import OperatorModel, frac_power

INTERIOR_POINTS = 9
BOUNDARY_POINTS = 10


@dataclass(frozen=True)
class Grid:
    """Uniform grid t_k = k*T/(N-1) on [0, T] with weight exp(-kappa*t)."""

    T: float
    N: int
    kappa: float
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def h(self) -> float:
        return self.T / (self.N - 1)


@dataclass(frozen=True)
class WeightedGridFunction:
    """H-valued samples on a Grid; samples has shape (N, n)."""

    grid: Grid
    samples: np.ndarray

    @property
    def n(self) -> int:
        return self.samples.shape[1]

    def with_samples(self, samples) -> "WeightedGridFunction":
        return grid_function(self.grid, samples)


def make_grid(T: float, N: int, kappa: float = 0.0) -> Grid:
    if T <= 0:
        raise ValueError(f"truncation length T={T} must be positive")
    if N < 2:
        raise GridTooSmall(f"grid needs at least 2 nodes, got {N}")
    nodes = np.linspace(0.0, T, N)
    return Grid(T=float(T), N=int(N), kappa=float(kappa), nodes=nodes,
                weights=np.exp(-kappa * nodes))


def default_truncation(lambda0: float, kappa: float = 0.0) -> float:
    """T such that the slowest weighted mode decays below ~1e-12 by t = T."""
    margin = 2.0 * lambda0 - abs(kappa)
    if margin <= 0:
        raise InadmissibleWeight(f"|kappa|={abs(kappa)} >= 2*lambda0={2*lambda0}")
    return 30.0 / margin


def grid_function(grid: Grid, samples) -> WeightedGridFunction:
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[0] == 1 and grid.N != 1:
        samples = samples.T
    if samples.shape[0] != grid.N:
        raise DimensionMismatch(
            f"sample count {samples.shape[0]} does not match grid size {grid.N}")
    return WeightedGridFunction(grid=grid, samples=samples)


def fd_weights(order: int, x0: float, nodes) -> np.ndarray:
    """Finite-difference weights for the order-th derivative at x0 (Fornberg)."""
    nodes = np.asarray(nodes, dtype=float)
    npts = nodes.size
    c = np.zeros((npts, order + 1))
    c1, c4 = 1.0, nodes[0] - x0
    c[0, 0] = 1.0
    for i in range(1, npts):
        mn = min(i, order)
        c2, c5, c4 = 1.0, c4, nodes[i] - x0
        for j in range(i):
            c3 = nodes[i] - nodes[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


@lru_cache(maxsize=None)
def _stencils(order: int, N: int):
    """(interior kernel, left rows, right rows) for an N-point uniform grid."""
    wb = min(N, BOUNDARY_POINTS)
    kern = fd_weights(order, 0.0, np.arange(-4.0, 5.0))
    left = np.array([fd_weights(order, float(i), np.arange(float(wb)))
                     for i in range(min(4, N))])
    right = np.array([fd_weights(order, float(N - 1 - i), np.arange(float(N - wb), float(N)))
                      for i in range(min(4, N))])
    return kern, left, right


def _diff(samples: np.ndarray, h: float, order: int) -> np.ndarray:
    N = samples.shape[0]
    if N < INTERIOR_POINTS:
        raise GridTooSmall(f"derivative needs at least {INTERIOR_POINTS} nodes, got {N}")
    kern, left, right = _stencils(order, N)
    wb = left.shape[1]
    out = np.empty_like(samples)
    win = sliding_window_view(samples, INTERIOR_POINTS, axis=0)
    out[4:N - 4] = np.einsum("k,ink->in", kern, win)
    out[:4] = left @ samples[:wb]
    out[N - 4:] = (right @ samples[N - wb:])[::-1]
    out /= h ** order
    return out


def derivative(u: WeightedGridFunction, order: int) -> WeightedGridFunction:
    """order-th derivative (order in 1..4), 6th-order accurate."""
    if not 1 <= order <= 4:
        raise ValueError(f"derivative order must be in 1..4, got {order}")
    return u.with_samples(_diff(u.samples, u.grid.h, order))


def _endpoint_weights() -> np.ndarray:
    """Endpoint-corrected trapezoid weights of order 6 (Euler-Maclaurin with
    the boundary derivatives replaced by one-sided stencils).  All positive,
    so the quadrature still induces a norm; plain trapezoid is only O(h^2),
    which the tightest identity checks cannot afford at desk-scale N."""
    m = 6
    w = np.ones(m)
    w[0] -= 0.5
    w += (fd_weights(1, 0.0, np.arange(float(m))) / 12.0
          - fd_weights(3, 0.0, np.arange(float(m))) / 720.0
          + fd_weights(5, 0.0, np.arange(float(m))) / 30240.0)
    return w


_EDGE_WEIGHTS = None


def quadrature_weights(grid: Grid) -> np.ndarray:
    """Composite quadrature weights on the grid (endpoint-corrected trapezoid
    of order 6; plain trapezoid when the grid is too short for the edges)."""
    global _EDGE_WEIGHTS
    if _EDGE_WEIGHTS is None:
        _EDGE_WEIGHTS = _endpoint_weights()
    m = _EDGE_WEIGHTS.size
    w = np.full(grid.N, grid.h)
    if grid.N >= 2 * m:
        w[:m] = _EDGE_WEIGHTS * grid.h
        w[-m:] = _EDGE_WEIGHTS[::-1] * grid.h
    else:
        w[0] *= 0.5
        w[-1] *= 0.5
    return w


def l2k_norm(u: WeightedGridFunction) -> float:
    """Weighted L2 norm (int ||u(t)||^2 e^{-kappa t} dt)^{1/2} by quadrature."""
    sq = np.einsum("ij,ij->i", u.samples, u.samples)
    return float(np.sqrt(np.dot(quadrature_weights(u.grid), sq * u.grid.weights)))


def l2k_inner(u: WeightedGridFunction, v: WeightedGridFunction) -> float:
    """Weighted L2 inner product of two grid functions on the same grid."""
    dots = np.einsum("ij,ij->i", u.samples, v.samples)
    return float(np.dot(quadrature_weights(u.grid), dots * u.grid.weights))


def apply_matrix(u: WeightedGridFunction, M) -> WeightedGridFunction:
    """Nodewise application of a fixed matrix M to the H-values of u."""
    M = np.asarray(M, dtype=float)
    if M.shape != (u.n, u.n):
        raise DimensionMismatch(f"matrix shape {M.shape} does not match n={u.n}")
    return u.with_samples(u.samples @ M.T)


def sobolev_norm(u: WeightedGridFunction, A: OperatorModel) -> float:
    """Graph norm (||u''''||^2 + ||A^4 u||^2)^{1/2} in the weighted L2 space."""
    d4 = derivative(u, 4)
    a4u = apply_matrix(u, frac_power(A, 4))
    return float(np.sqrt(l2k_norm(d4) ** 2 + l2k_norm(a4u) ** 2))


def trace_norms(u: WeightedGridFunction, A: OperatorModel):
    """Boundary traces ||A^{7/2-j} u^{(j)}(0)|| for j = 0, 1, 2.

    In finite dimension the fractional powers are bounded, so the limit
    t -> 0 reduces to evaluation at the first node.
    """
    if u.n != A.n:
        raise DimensionMismatch(f"function dimension {u.n} != operator dimension {A.n}")
    values = [u.samples[0]]
    for j in (1, 2):
        values.append(derivative(u, j).samples[0])
    return tuple(
        float(np.linalg.norm(frac_power(A, 3.5 - j) @ values[j])) for j in (0, 1, 2)
    )
