"""Numerical verification of the estimates behind the solvability theory.

Each check recomputes both sides of an identity or inequality by quadrature
on the grid and reports the margin.  The energy identity and the two
auxiliary bounds hold for every admissible weight; the four intermediate-
derivative estimates are additionally checked in their combined forms.
Empirically the intermediate-derivative constants are only valid for
kappa >= 0 -- the checks report violations rather than hiding them (see the
acceptance suite).
"""

import numpy as np

from .certificates import constants, gamma
from .errors import BoundaryConditionViolated, InadmissibleWeight, NotInDomain
from .grids import (Grid, WeightedGridFunction, apply_matrix, derivative,
                    grid_function, l2k_norm, make_grid, default_truncation,
                    quadrature_weights, sobolev_norm, trace_norms)
from .operators import OperatorModel, frac_power, operator_from_spectrum
from .principal import apply_P0

BOUNDARY_TOL = 1e-6


def random_operator(rng, n: int, lambda0_range=(0.5, 2.0), spread: float = 4.0) -> OperatorModel:
    """Random SPD operator: lambda0 drawn from the range, the rest of the
    spectrum up to spread*lambda0, in a random orthonormal basis."""
    lam0 = rng.uniform(*lambda0_range)
    eigs = np.concatenate([[lam0], lam0 * rng.uniform(1.0, spread, size=n - 1)]) if n > 1 else np.array([lam0])
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return operator_from_spectrum(np.sort(eigs), Q)


def _decay_rate(rng, A: OperatorModel, kappa: float, grid_T: float) -> float:
    """Decay exponent for test profiles: fast enough that the weighted tail
    clears the truncation, slow enough to stay in [lambda0/2, 2 lambda0]."""
    lam0 = A.lambda0
    a_min = max(0.5 * lam0, 0.5 * abs(kappa) + 12.5 / grid_T)
    a_max = 2.0 * lam0
    if a_min >= a_max:
        return a_min
    return rng.uniform(a_min, a_max)


def random_wbar4_function(rng, A: OperatorModel, grid: Grid) -> WeightedGridFunction:
    """Sample u(t) = t^3 e^{-at} p(t) x: vanishing traces, random decay rate
    a, random cubic p with coefficients in [-1, 1], random unit direction x."""
    a = _decay_rate(rng, A, grid.kappa, grid.T)
    p = rng.uniform(-1.0, 1.0, size=4)
    x = rng.standard_normal(A.n)
    x /= np.linalg.norm(x)
    t = grid.nodes
    profile = t ** 3 * (p[0] + p[1] * t + p[2] * t ** 2 + p[3] * t ** 3) * np.exp(-a * t)
    return grid_function(grid, np.outer(profile, x))


def random_zero_value_function(rng, A: OperatorModel, grid: Grid) -> WeightedGridFunction:
    """Sample u(t) = t e^{-at} p(t) x: vanishing value (only) at t = 0."""
    a = _decay_rate(rng, A, grid.kappa, grid.T)
    p = rng.uniform(-1.0, 1.0, size=3)
    x = rng.standard_normal(A.n)
    x /= np.linalg.norm(x)
    t = grid.nodes
    profile = t * (p[0] + p[1] * t + p[2] * t ** 2) * np.exp(-a * t)
    return grid_function(grid, np.outer(profile, x))


def _unweighted(grid: Grid) -> Grid:
    return make_grid(grid.T, grid.N, 0.0)


def check_energy_identity(u: WeightedGridFunction, A: OperatorModel):
    """Both sides of Re(h, A^2 w) = ||A w'||^2 + ||A^2 w||^2 - (k^2/4)||A w||^2
    for w = u e^{-kappa t/2}, h = -(d/dt + kappa/2)^2 w + A^2 w, u(0) = 0.

    Returns (lhs, rhs, relative gap).
    """
    kappa = u.grid.kappa
    if np.linalg.norm(u.samples[0]) > BOUNDARY_TOL * max(1.0, np.abs(u.samples).max()):
        raise BoundaryConditionViolated(
            f"u(0) has norm {np.linalg.norm(u.samples[0]):.3e}; the identity needs u(0)=0")
    g0 = _unweighted(u.grid)
    w = grid_function(g0, u.samples * np.exp(-0.5 * kappa * u.grid.nodes)[:, None])
    wp = derivative(w, 1)
    wpp = derivative(w, 2)
    A2 = frac_power(A, 2)
    h = grid_function(g0, -(wpp.samples + kappa * wp.samples
                            + 0.25 * kappa ** 2 * w.samples) + w.samples @ A2.T)
    a2w = apply_matrix(w, A2)
    lhs = float(np.dot(np.einsum("ij,ij->i", h.samples, a2w.samples),
                       _trapz(g0)))
    rhs = (l2k_norm(apply_matrix(wp, A.matrix)) ** 2
           + l2k_norm(a2w) ** 2
           - 0.25 * kappa ** 2 * l2k_norm(apply_matrix(w, A.matrix)) ** 2)
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return lhs, rhs, abs(lhs - rhs) / scale


def _trapz(grid: Grid) -> np.ndarray:
    return quadrature_weights(grid) * grid.weights


def check_aux_estimates(u: WeightedGridFunction, A: OperatorModel, slack: float = 1e-6):
    """The two bounds from the auxiliary second-order problem, in the
    substituted variables: ||A^2 w|| <= gamma^-1 ||h|| and
    ||A w'||^2 <= 1/4 gamma^-1 ||h||^2.  Returns a dict of both sides."""
    kappa = u.grid.kappa
    if abs(kappa) >= 2.0 * A.lambda0:
        raise InadmissibleWeight(f"|kappa|={abs(kappa)} >= 2*lambda0={2 * A.lambda0}")
    if np.linalg.norm(u.samples[0]) > BOUNDARY_TOL * max(1.0, np.abs(u.samples).max()):
        raise BoundaryConditionViolated("u(0) must vanish")
    g0 = _unweighted(u.grid)
    w = grid_function(g0, u.samples * np.exp(-0.5 * kappa * u.grid.nodes)[:, None])
    wp = derivative(w, 1)
    wpp = derivative(w, 2)
    A2 = frac_power(A, 2)
    h = grid_function(g0, -(wpp.samples + kappa * wp.samples
                            + 0.25 * kappa ** 2 * w.samples) + w.samples @ A2.T)
    g = gamma(A.lambda0, kappa)
    hnorm = l2k_norm(h)
    lhs12 = l2k_norm(apply_matrix(w, A2))
    lhs13 = l2k_norm(apply_matrix(wp, A.matrix)) ** 2
    return {
        "A2w": lhs12,
        "A2w_bound": hnorm / g,
        "A2w_ok": bool(lhs12 <= hnorm / g + slack),
        "Awp_sq": lhs13,
        "Awp_sq_bound": 0.25 / g * hnorm ** 2,
        "Awp_sq_ok": bool(lhs13 <= 0.25 / g * hnorm ** 2 + slack),
    }


def intermediate_norms(u: WeightedGridFunction, A: OperatorModel):
    """||A^j d^{4-j} u|| in the weighted space for j = 1..4."""
    out = []
    for j in (1, 2, 3, 4):
        term = u if j == 4 else derivative(u, 4 - j)
        out.append(l2k_norm(apply_matrix(term, frac_power(A, j))))
    return out


def check_estimate_16(u: WeightedGridFunction, A: OperatorModel,
                      slack: float = 1e-4, trace_tol: float = 1e-6):
    """The four intermediate-derivative bounds ||A^j d^{4-j}u|| <= c_j ||P0 u||
    plus their two combined quadratic forms (weights 1, 2, 1).

    Returns a dict with each lhs, rhs, and ok flag.  Valid only for functions
    with vanishing traces; raises NotInDomain otherwise.
    """
    kappa = u.grid.kappa
    scale = max(1.0, float(np.abs(u.samples).max()))
    traces = trace_norms(u, A)
    if max(traces) > trace_tol * scale * max(1.0, A.eigenvalues[-1] ** 3.5):
        raise NotInDomain(f"trace norms {traces} exceed {trace_tol:.0e}")
    g = gamma(A.lambda0, kappa)
    if g <= 0:
        raise InadmissibleWeight(f"|kappa|={abs(kappa)} >= 2*lambda0")
    cj = constants(A.lambda0, kappa)
    fnorm = l2k_norm(apply_P0(u, A))
    lhs = intermediate_norms(u, A)
    result = {"P0u": fnorm}
    for j in (1, 2, 3, 4):
        rhs = cj[j - 1] * fnorm
        result[f"j{j}"] = (lhs[j - 1], rhs, bool(lhs[j - 1] <= rhs + slack * rhs))
    comb14 = lhs[1] ** 2 + 2.0 * lhs[2] ** 2 + lhs[3] ** 2
    rhs14 = fnorm ** 2 / g ** 2
    comb15 = lhs[0] ** 2 + 2.0 * lhs[1] ** 2 + lhs[2] ** 2
    rhs15 = 0.25 * fnorm ** 2 / g
    result["combined14"] = (comb14, rhs14, bool(comb14 <= rhs14 + slack * rhs14))
    result["combined15"] = (comb15, rhs15, bool(comb15 <= rhs15 + slack * rhs15))
    result["all_ok"] = all(result[k][2] for k in ("j1", "j2", "j3", "j4",
                                                  "combined14", "combined15"))
    return result


def check_P0_boundedness(u: WeightedGridFunction, A: OperatorModel,
                         slack: float = 1e-6, trace_tol: float = 1e-6):
    """||P0 u||^2 <= 4 ||u||_W4^2 + 16 (||A u'''||^2 + ||A^3 u'||^2)."""
    scale = max(1.0, float(np.abs(u.samples).max()))
    traces = trace_norms(u, A)
    if max(traces) > trace_tol * scale * max(1.0, A.eigenvalues[-1] ** 3.5):
        raise NotInDomain(f"trace norms {traces} exceed {trace_tol:.0e}")
    lhs = l2k_norm(apply_P0(u, A)) ** 2
    au3 = l2k_norm(apply_matrix(derivative(u, 3), A.matrix)) ** 2
    a3u1 = l2k_norm(apply_matrix(derivative(u, 1), frac_power(A, 3))) ** 2
    rhs = 4.0 * sobolev_norm(u, A) ** 2 + 16.0 * (au3 + a3u1)
    return lhs, rhs


def check_norm_equivalence(sample_count: int, A: OperatorModel, kappa: float,
                           rng=None, N: int = 1024):
    """Empirical two-sided bracket of ||P0 u|| / ||u||_W4 over the random
    vanishing-trace family.  Returns (min_ratio, max_ratio)."""
    if abs(kappa) >= 2.0 * A.lambda0:
        raise InadmissibleWeight(f"|kappa|={abs(kappa)} >= 2*lambda0")
    rng = np.random.default_rng(0) if rng is None else rng
    grid = make_grid(default_truncation(A.lambda0, kappa), N, kappa)
    ratios = []
    for _ in range(sample_count):
        u = random_wbar4_function(rng, A, grid)
        wnorm = sobolev_norm(u, A)
        if wnorm < 1e-12:
            continue
        ratios.append(l2k_norm(apply_P0(u, A)) / wnorm)
    return float(min(ratios)), float(max(ratios))


def substitution_chain_residual(u: WeightedGridFunction, A: OperatorModel) -> float:
    """||y(0)|| for y = (d/dt + A)^2 u, normalized; vanishes for u with
    vanishing traces, tying the auxiliary problem to the main one."""
    up = derivative(u, 1)
    upp = derivative(u, 2)
    y0 = (upp.samples[0] + 2.0 * (A.matrix @ up.samples[0])
          + frac_power(A, 2) @ u.samples[0])
    return float(np.linalg.norm(y0) / max(1.0, np.abs(u.samples).max()))
