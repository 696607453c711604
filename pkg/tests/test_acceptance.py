"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

All tolerances are pinned here, not calibrated after the fact.  Three
criteria (2, 8, 9) probe constants that are provably one-sided in the sign
of the weight; the affected tests run the full stated sweep and are expected
to fail on the defective side.  Companion tests pin down the restricted
regime where each of those properties does hold, so a red criterion together
with its green companion localizes the defect precisely.  See
/root/notes/decisions.md for the analysis.
"""

import math
from math import comb, factorial

import numpy as np
import pytest

from pencilbvp import (NotContractive, apply_P0, bound_A4, bound_xi4,
                       check_aux_estimates, check_energy_identity,
                       check_estimate_16, constants, critical_sweep,
                       default_truncation, grid_function, l2k_norm, make_grid,
                       make_operator, make_perturbations, make_xi_grid,
                       neumann_solve, operator_from_spectrum, principal_solve,
                       sobolev_norm, symbol, symbol_lower_bound, trace_norms,
                       zero_perturbations)
from pencilbvp.principal import assemble_solution, boundary_phis
from pencilbvp.verification import (random_operator, random_wbar4_function,
                                    random_zero_value_function)

KAPPA_FRACTIONS = (0.0, 0.5, -0.5, 1.5, -1.5)


def _sweep_operators(seed=101, count=50, nmax=8):
    rng = np.random.default_rng(seed)
    ops = []
    for _ in range(count):
        n = int(rng.integers(1, nmax + 1))
        ops.append(random_operator(rng, n, lambda0_range=(0.6, 2.0), spread=4.0))
    return ops


def _report(criterion, ok, detail):
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")


def test_criterion_01_xi4_resolvent_bound():
    """sup_xi ||xi^4 P0^{-1}|| <= 1 + 1e-12 over 50 random operators and
    kappa in {0, +-0.5, +-1.5} lambda0."""
    worst = 0.0
    for A in _sweep_operators():
        xi = make_xi_grid(A.lambda0)
        for frac in KAPPA_FRACTIONS:
            worst = max(worst, bound_xi4(A, frac * A.lambda0, xi))
    ok = worst <= 1.0 + 1e-12
    _report(1, ok, f"max grid sup of xi^4/|symbol| = {worst:.15f}")
    assert ok


def test_criterion_02_A4_resolvent_bound():
    """Measured sup of ||A^4 P0^{-1}|| against the closed form
    lambda0^4/((lambda0^2-kappa^2/4)(lambda0+kappa/2)^2), same sweep.

    EXPECTED RED for kappa > 0: the closed form assumes the spectral ratio is
    maximized at lambda0, which fails there (it climbs toward 1 along the
    spectrum); measured sups with spread spectra exceed the printed constant.
    """
    A_id = make_operator(np.eye(2))
    measured, closed = bound_A4(A_id, 0.0, make_xi_grid(1.0))
    assert closed == pytest.approx(1.0)
    assert measured == pytest.approx(1.0, abs=1e-10)  # attained at xi = 0

    violations = []
    for A in _sweep_operators():
        xi = make_xi_grid(A.lambda0)
        for frac in KAPPA_FRACTIONS:
            kappa = frac * A.lambda0
            m, c = bound_A4(A, kappa, xi)
            if m > c + 1e-12:
                violations.append((A.n, round(frac, 2), round(m / c, 4)))
    ok = not violations
    _report(2, ok, f"{len(violations)} of 250 sweep points exceed the closed form"
                   + (f"; worst measured/closed = "
                      f"{max(v[2] for v in violations):.4f} (all at kappa > 0)"
                      if violations else ""))
    assert ok, (
        "the closed-form A^4 resolvent constant is exceeded for kappa > 0: "
        f"violations (n, kappa/lambda0, measured/closed) = {violations[:8]} ...")


def test_criterion_02_companion_nonpositive_weight():
    """The same closed form does hold (grid-verified) whenever kappa <= 0."""
    worst = 0.0
    for A in _sweep_operators(seed=202):
        xi = make_xi_grid(A.lambda0)
        for frac in (0.0, -0.5, -1.0, -1.5, -1.9):
            m, c = bound_A4(A, frac * A.lambda0, xi)
            worst = max(worst, (m - c) / c)
    ok = worst <= 1e-12
    _report("2c", ok, f"kappa <= 0 restriction: max relative excess = {worst:.2e}")
    assert ok


def test_criterion_03_symbol_lower_bound():
    """|symbol(i xi + kappa/2, lam)| >= (lambda0^2 - kappa^2/4)(lambda0 +
    kappa/2)^2 with zero violations over the whole sweep."""
    violations = 0
    for A in _sweep_operators():
        xi = make_xi_grid(A.lambda0)
        for frac in KAPPA_FRACTIONS:
            kappa = frac * A.lambda0
            bound = symbol_lower_bound(A.lambda0, kappa)
            mags = np.abs(symbol(1j * xi[:, None] + kappa / 2.0,
                                 A.eigenvalues[None, :]))
            violations += int(np.sum(mags < bound * (1.0 - 1e-12)))
    ok = violations == 0
    _report(3, ok, f"{violations} grid violations of the symbol lower bound")
    assert ok


def test_criterion_04_constants_table():
    """c_j(0) exactly (1/2, 1/(2 sqrt 2), 1/2, 1); c_j(1; lambda0=1) equals
    (3^-1/2, 6^-1/2, 3^-1/2, 4/3) within 1e-15."""
    c0 = constants(1.0, 0.0)
    exact0 = (0.5, 1.0 / (2.0 * math.sqrt(2.0)), 0.5, 1.0)
    ok = c0 == exact0
    c1 = constants(1.0, 1.0)
    want1 = (3.0 ** -0.5, 6.0 ** -0.5, 3.0 ** -0.5, 4.0 / 3.0)
    ok = ok and all(abs(a - b) <= 1e-15 for a, b in zip(c1, want1))
    _report(4, ok, f"c(0) = {c0}; c(1) matches closed forms within 1e-15")
    assert ok


def _manufactured_error(A, kappa, N):
    grid = make_grid(default_truncation(A.lambda0, kappa), N, kappa)
    t = grid.nodes
    x = np.full(A.n, 1.0 / math.sqrt(A.n))
    ustar = grid_function(grid, np.outer(t ** 3 * np.exp(-t), x))
    f = apply_P0(ustar, A)
    report = principal_solve(f, A)  # raises ResidualTooLarge above 1e-3
    diff = report.u.with_samples(report.u.samples - ustar.samples)
    err = sobolev_norm(diff, A) / sobolev_norm(ustar, A)
    return err, report


def test_criterion_05_principal_isomorphism():
    """Manufactured cubic-exponential recovery within 1e-3 relative graph
    norm at N = 2048 for kappa in {0, +-lambda0/2} and n in {1, 4}; traces
    below 1e-5; the error shrinks by >= 4x when N doubles."""
    rng = np.random.default_rng(4242)
    Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    ops = {1: make_operator(np.eye(1)),
           4: operator_from_spectrum([1.0, 1.35, 1.8, 2.4], Q)}
    worst = 0.0
    for n, A in ops.items():
        for frac in (0.0, 0.5, -0.5):
            err, report = _manufactured_error(A, frac * A.lambda0, 2048)
            assert max(report.trace_norms) < 1e-5 * max(1.0, report.forcing_norm), \
                (n, frac, report.trace_norms)
            assert err < 1e-3, (n, frac, err)
            worst = max(worst, err)
    coarse, _ = _manufactured_error(ops[1], 0.0, 128)
    fine, _ = _manufactured_error(ops[1], 0.0, 256)
    shrink = coarse / fine
    ok = worst < 1e-3 and shrink >= 4.0
    _report(5, ok, f"worst relative error {worst:.2e} at N=2048; "
                   f"error shrinks {shrink:.0f}x for N 128 -> 256")
    assert ok


def test_criterion_06_boundary_correction():
    """100 random trace triples and operators: the assembled solution's
    traces fall below 1e-8 and the correction terms are annihilated by the
    pencil to better than 1e-4."""
    rng = np.random.default_rng(77)
    worst_trace, worst_residual = 0.0, 0.0
    for _ in range(100):
        n = int(rng.integers(1, 7))
        A = random_operator(rng, n, lambda0_range=(0.7, 1.3), spread=2.5)
        grid = make_grid(default_truncation(A.lambda0, 0.0), 1024, 0.0)
        t = grid.nodes
        triple = [rng.standard_normal(n) for _ in range(3)]
        scale = max(np.linalg.norm(v) for v in triple)
        sigma = A.lambda0
        qm = [sum(comb(m, j) * sigma ** (m - j) * triple[j]
                  for j in range(min(m, 2) + 1)) for m in range(3)]
        prof = sum(np.outer(t ** m / factorial(m), qm[m]) for m in range(3))
        u0 = grid_function(grid, prof * np.exp(-sigma * t)[:, None])
        phi = boundary_phis(triple, A)
        u = assemble_solution(u0, phi, A)
        worst_trace = max(worst_trace, max(trace_norms(u, A)) / max(1.0, scale))
        corr = assemble_solution(grid_function(grid, np.zeros((grid.N, n))), phi, A)
        worst_residual = max(worst_residual,
                             l2k_norm(apply_P0(corr, A)) / max(1.0, l2k_norm(corr)))
    ok = worst_trace < 1e-8 and worst_residual < 1e-4
    _report(6, ok, f"worst assembled trace {worst_trace:.2e}; "
                   f"worst kernel residual {worst_residual:.2e}")
    assert ok


def test_criterion_07_energy_identity():
    """Equality gap <= 1e-3 relative over 200 randomized (u, A, kappa)
    trials with u(0) = 0."""
    rng = np.random.default_rng(55)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 7))
        A = random_operator(rng, n, lambda0_range=(0.6, 1.8), spread=3.0)
        kappa = rng.uniform(-1.8, 1.8) * A.lambda0
        grid = make_grid(default_truncation(A.lambda0, kappa), 4096, kappa)
        u = random_zero_value_function(rng, A, grid)
        _, _, gap = check_energy_identity(u, A)
        worst = max(worst, gap)
    ok = worst <= 1e-3
    _report(7, ok, f"worst relative identity gap {worst:.2e} over 200 trials")
    assert ok


def _estimate_trial(rng, kappa_low, kappa_high):
    """One randomized trial: the grid is sized to the drawn decay rate, so
    near-critical weights do not force needlessly long (and coarse) grids."""
    n = int(rng.integers(1, 7))
    A = random_operator(rng, n, lambda0_range=(0.6, 1.8), spread=3.0)
    lam0 = A.lambda0
    kappa = rng.uniform(kappa_low, kappa_high) * lam0
    a = rng.uniform(max(0.5 * lam0, 0.5 * abs(kappa) + 0.05 * lam0), 2.0 * lam0)
    s = 2.0 * a + kappa  # weighted decay rate of the squared profiles
    T = min(default_truncation(lam0, kappa), 45.0 / s)
    grid = make_grid(T, 2048, kappa)
    t = grid.nodes
    p = rng.uniform(-1.0, 1.0, 4)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    profile = t ** 3 * np.polyval(p[::-1], t) * np.exp(-a * t)
    u = grid_function(grid, np.outer(profile, x))
    zprof = t * np.polyval(p[1:][::-1], t) * np.exp(-a * t)
    uz = grid_function(grid, np.outer(zprof, x))
    aux = check_aux_estimates(uz, A)
    # the family's traces vanish identically; the loosened gate only admits
    # the stencil-truncation residue of near-critical (long, coarse) grids
    e16 = check_estimate_16(u, A, trace_tol=1e-5)
    return kappa / lam0, aux, e16


def test_criterion_08_estimates_12_to_16():
    """Estimates (12)-(16): zero violations beyond 1e-4 relative slack over
    500 randomized trials spanning kappa in (-1.9, 1.9) lambda0.

    EXPECTED RED for kappa < 0: the intermediate-derivative constants are
    one-sided in the weight; the auxiliary-problem bounds (the '12'/'13'
    side) hold everywhere, the translation to the four u-derivative bounds
    does not.
    """
    rng = np.random.default_rng(808)
    aux_failures = 0
    violations = []
    for _ in range(500):
        frac, aux, e16 = _estimate_trial(rng, -1.9, 1.9)
        if not (aux["A2w_ok"] and aux["Awp_sq_ok"]):
            aux_failures += 1
        if not e16["all_ok"]:
            worst = max(e16[k][0] / max(e16[k][1], 1e-300)
                        for k in ("j1", "j2", "j3", "j4", "combined14", "combined15"))
            violations.append((round(frac, 2), round(worst, 2)))
    ok = aux_failures == 0 and not violations
    detail = (f"auxiliary bounds: {aux_failures} failures; derivative bounds: "
              f"{len(violations)} of 500 trials violated")
    if violations:
        fracs = [v[0] for v in violations]
        detail += (f" (all at kappa/lambda0 in [{min(fracs):.2f}, {max(fracs):.2f}], "
                   f"worst lhs/rhs = {max(v[1] for v in violations):.2f})")
    _report(8, ok, detail)
    assert ok, ("intermediate-derivative estimates fail for negative weights: "
                f"{violations[:8]} ...")


def test_criterion_08_companion_nonnegative_weight():
    """The same 500-trial battery restricted to kappa >= 0 holds in full."""
    rng = np.random.default_rng(808)
    bad = 0
    for _ in range(500):
        frac, aux, e16 = _estimate_trial(rng, 0.0, 1.9)
        if not (aux["A2w_ok"] and aux["Awp_sq_ok"] and e16["all_ok"]):
            bad += 1
    ok = bad == 0
    _report("8c", ok, f"kappa >= 0 restriction: {bad} of 500 trials violated")
    assert ok


def _certified_instance(rng):
    n = int(rng.integers(1, 9))
    A = random_operator(rng, n, lambda0_range=(0.9, 1.8), spread=3.0)
    kappa = rng.uniform(-1.9, 1.9) * A.lambda0
    return _instance_for(rng, A, kappa)


def _instance_for(rng, A, kappa):
    from pencilbvp.certificates import constants as cs
    n = A.n
    target_q = rng.uniform(0.1, 0.85)
    cj = cs(A.lambda0, kappa)
    wts = rng.dirichlet(np.ones(4))
    mats = []
    for j in (1, 2, 3, 4):
        R = rng.standard_normal((n, n))
        mats.append(R * (target_q * wts[j - 1] / (cj[j - 1] * np.linalg.norm(R, 2))))
    P = make_perturbations(A, mats, normalized=True)
    # target h ~ 0.03: much finer raises the h^-4-amplified roundoff floor of
    # the residual check, much coarser leaves truncation above its gate
    T = default_truncation(A.lambda0, kappa)
    N = int(np.clip(2 ** np.ceil(np.log2(T / 0.03)), 512, 4096))
    grid = make_grid(T, N, kappa)
    a = max(0.55 * A.lambda0, 0.5 * abs(kappa) + 12.5 / grid.T)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    prof = grid.nodes * np.exp(-a * grid.nodes) * (1.0 + 0.5 * grid.nodes)
    f = grid_function(grid, np.outer(prof, x))
    return f, A, P


def test_criterion_09_certified_contraction(recwarn):
    """50 random certified instances (q < 0.9 by construction): the
    iteration converges with empirical ratio <= q + 0.05 and relative
    residual <= 1e-3, with a finite reported graph-norm bound.

    EXPECTED RED for kappa < 0 draws: certification rests on the same
    one-sided constants as criterion 8, and near-critical negative weights
    produce certified instances whose iteration genuinely diverges.
    """
    rng = np.random.default_rng(2024)
    failures = []
    for k in range(50):
        f, A, P = _certified_instance(rng)
        kappa = f.grid.kappa / A.lambda0
        try:
            report, cert = neumann_solve(f, A, P, tol=1e-9, max_iter=200)
        except NotContractive:
            failures.append((k, round(kappa, 2), "diverged"))
            continue
        if not report.converged:
            failures.append((k, round(kappa, 2), "no convergence"))
        elif report.contraction_ratio > cert.q + 0.05:
            failures.append((k, round(kappa, 2),
                             f"ratio {report.contraction_ratio:.2f} > q+0.05={cert.q + 0.05:.2f}"))
        elif report.residual_rel > 1e-3:
            failures.append((k, round(kappa, 2), f"residual {report.residual_rel:.1e}"))
        else:
            assert np.isfinite(report.bound_ratio)
    ok = not failures
    detail = f"{len(failures)} of 50 certified instances failed"
    if failures:
        detail += (f" (all at kappa/lambda0 in "
                   f"[{min(f[1] for f in failures):.2f}, {max(f[1] for f in failures):.2f}])")
    _report(9, ok, detail)
    assert ok, f"certified-contraction failures: {failures}"


def test_criterion_09_companion_nonnegative_weight(recwarn):
    """The same instance family restricted to kappa >= 0 converges with
    ratio <= q + 0.05 and residual <= 1e-3 in all 50 cases."""
    rng = np.random.default_rng(2024)
    worst_margin = -np.inf
    for _ in range(50):
        n = int(rng.integers(1, 9))
        A = random_operator(rng, n, lambda0_range=(0.6, 1.8), spread=3.0)
        kappa = rng.uniform(0.0, 1.9) * A.lambda0
        f, A, P = _instance_for(rng, A, kappa)
        report, cert = neumann_solve(f, A, P, tol=1e-9, max_iter=200)
        assert report.converged
        assert report.residual_rel <= 1e-3
        worst_margin = max(worst_margin, report.contraction_ratio - cert.q)
        assert report.contraction_ratio <= cert.q + 0.05
        assert np.isfinite(report.bound_ratio)
    ok = worst_margin <= 0.05
    _report("9c", ok, f"kappa >= 0 restriction: worst (ratio - q) = {worst_margin:+.3f}")
    assert ok


def test_criterion_10_critical_weight_diagnostic():
    """Sweep at lambda0 = 1: c4 >= 100 for |kappa| >= 1.99 and verdict
    INADMISSIBLE_WEIGHT exactly when |kappa| >= 2."""
    A = operator_from_spectrum([1.0])
    kappas = [0.0, 0.5, -0.5, 1.0, -1.0, 1.5, -1.5, 1.9, -1.9, 1.99, -1.99,
              1.995, -1.995, 2.0, -2.0, 2.1, -2.1, 2.2, -2.2]
    rows = critical_sweep(A, kappas, zero_perturbations(A))
    ok = True
    for row in rows:
        k = row["kappa"]
        if abs(k) >= 2.0:
            ok = ok and row["verdict"] == "INADMISSIBLE_WEIGHT"
        else:
            ok = ok and row["verdict"] == "REGULARLY_SOLVABLE_CERTIFIED"
            if abs(k) >= 1.99:
                ok = ok and row["c4"] >= 100.0
    c4_199 = next(r["c4"] for r in rows if r["kappa"] == 1.99)
    _report(10, ok, f"c4(1.99) = {c4_199:.2f}; inadmissible flags exactly at |kappa| >= 2")
    assert ok
