"""Acceptance criteria, one test per criterion; each records a PASS/FAIL line."""

import math
import time

import numpy as np
from scipy import integrate, optimize

from nonlocal_torus.const_solver import (
    WeakForm,
    h2s_constant,
    measure_estimate,
    relative_drift,
    solve_const,
    standard_rhs_family,
)
from nonlocal_torus.estimate_verifier import refinement_check, run_suite
from nonlocal_torus.frozen_solver import (
    admissible_R,
    assemble_forms,
    build_localization,
    fixed_point_solve,
    spectral_radius,
)
from nonlocal_torus.kernels import Cone, cone_indicator_kernel, constant_kernel, modulated_kernel
from nonlocal_torus.plap_lab import c_p, cone_certificate, field_from_config, ftc_residuals, t_average
from nonlocal_torus.symbolics import compute_symbol, explicit_constant, one_minus_cos_root, periodize, verify_coercivity
from nonlocal_torus.torus_field import RegularityOrders, TorusGrid, bandlimited_field, dft, lp_norm, trig_mode

from conftest import record_acceptance
from test_cli import CASES, run_case, snapshot


def test_criterion_01_symbol_closed_form():
    t0 = time.perf_counter()
    grid = TorusGrid(1, 64)
    sym = compute_symbol(periodize(constant_kernel(1.0, 0.5), [0.0]), grid, kmax=32)
    k = np.arange(-32, 33)
    k = k[k != 0]
    m = np.array([sym.value((int(j),)) for j in k])
    err = float(np.max(np.abs(m / (2 * math.pi**2 * np.abs(k)) - 1)))
    elapsed = time.perf_counter() - t0
    ok = err < 1e-4 and elapsed < 10
    record_acceptance(1, ok, f"max rel err {err:.2e} (< 1e-4), {elapsed:.2f} s (< 10 s)")
    assert ok


def f_by_quadrature(caps, alpha):
    # int over the arcs of cos^2(theta - alpha), arc by arc with scipy quad
    tot = 0.0
    for centre, half in caps:
        tot += integrate.quad(lambda t: math.cos(t - alpha) ** 2, centre - half, centre + half,
                              epsabs=1e-14, epsrel=1e-13)[0]
    return tot


def test_criterion_02_coercivity_certificate():
    t0 = time.perf_counter()
    sigma = Cone([1.0, 0.0], math.pi / 4)
    caps = [(0.0, math.pi / 4)]
    # independent f_min: dense scan, then bounded scalar minimization of the quadrature
    scan = np.linspace(0, math.pi, 721)
    i = int(np.argmin([f_by_quadrature(caps, a) for a in scan]))
    res = optimize.minimize_scalar(lambda a: f_by_quadrature(caps, a),
                                   bounds=(scan[max(i - 1, 0)], scan[min(i + 1, 720)]), method="bounded",
                                   options={"xatol": 1e-10})
    f_quad = float(res.fun)
    r0 = one_minus_cos_root()
    grid = TorusGrid(2, 64)
    details, ok = [], True
    for s in (0.3, 0.5, 0.7):
        K = cone_indicator_kernel(sigma, 1.0, 1.0, s)
        sym = compute_symbol(periodize(K, [0.0, 0.0]), grid, kmax=32)
        cert = verify_coercivity(sym, sigma, 1.0, kmax=32, slack=1e-8)
        ec = explicit_constant(sigma, 1.0, s)
        formula = r0 ** (2 - 2 * s) * f_quad / (8 * (1 - s))
        ks = grid.freqs().reshape(-1, 2)
        kk = np.linalg.norm(ks, axis=1)
        sel = (kk > 0) & (kk <= 32)
        mvals = sym.values.reshape(-1)[sel]
        margin = float(np.min(mvals - ec.c_explicit * kk[sel] ** (2 * s)))
        this = (cert.passed and margin >= -1e-8 and abs(ec.f_min - f_quad) < 1e-6
                and abs(ec.c_explicit - formula) <= 1e-6 * formula)
        ok &= this
        details.append(f"s={s}: c={ec.c_explicit:.6f} min m/|k|^2s={cert.min_ratio:.4f}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 120
    record_acceptance(2, ok, f"{'; '.join(details)}; |f_min - quad| = {abs(ec.f_min - f_quad):.1e}; "
                             f"{elapsed:.1f} s (< 120 s)")
    assert ok


def test_criterion_03_constant_solver_exactness():
    K = cone_indicator_kernel(Cone([1.0, 0.0], math.pi / 4, symmetric=True), 1.0, 1.0, 0.4)
    grid = TorusGrid(2, 32)
    sym = compute_symbol(periodize(K, [0.0, 0.0]), grid)
    mode_err = 0.0
    for k in [(1, 0), (0, 3), (2, -5), (7, 7), (-11, 4)]:
        g = trig_mode(grid, k)
        u = solve_const(sym, g)
        ref = g.values / (2 * sym.value(k))
        mode_err = max(mode_err, float(np.max(np.abs(u.values - ref))) / float(np.max(np.abs(ref))))
    B = WeakForm(sym)
    resid = 0.0
    for i in range(50):
        g = bandlimited_field(grid, 6, 100 + i, "acc-g").zero_mean()
        phi = bandlimited_field(grid, 6, 100 + i, "acc-phi")
        u = solve_const(sym, g)
        gphi = grid.cell_volume * float(np.sum(g.values * phi.values))
        resid = max(resid, abs(B(u, phi) - gphi) / max(1.0, abs(gphi)))
    ok = mode_err < 1e-10 and resid < 1e-8
    record_acceptance(3, ok, f"mode-wise err {mode_err:.1e} (< 1e-10), weak residual {resid:.1e} (< 1e-8)")
    assert ok


def test_criterion_04_plancherel_h2s():
    consts, planch = [], 0.0
    for N in (32, 64):
        grid = TorusGrid(1, N)
        sym = compute_symbol(periodize(constant_kernel(1.0, 0.5), [0.0]), grid)
        fam = standard_rhs_family(grid, 20)
        for g in fam:
            planch = max(planch, abs(lp_norm(g, 2) ** 2 - float(np.sum(np.abs(dft(g).coeffs) ** 2))))
        consts.append(h2s_constant(sym, fam))
    drift = relative_drift(*consts)
    ok = drift < 0.10 and planch < 1e-12
    record_acceptance(4, ok, f"C(32)={consts[0]:.6f} C(64)={consts[1]:.6f} drift {drift:.2%} (< 10%), "
                             f"Plancherel defect {planch:.1e}")
    assert ok


def frozen_rate(amp, grid, loc):
    return spectral_radius(assemble_forms(modulated_kernel(1.0, amp, 0.5), loc))


def test_criterion_05_freezing_decomposition():
    t0 = time.perf_counter()
    grid = TorusGrid(1, 64)
    loc = build_localization(grid, [0.0], admissible_R(grid))
    forms = assemble_forms(modulated_kernel(1.0, 0.05, 0.5), loc)
    resid = 0.0
    for seed in range(3):
        u = bandlimited_field(grid, 6, seed, "acc-u")
        g = forms.density(u)
        probes = list(np.eye(loc.cell.size)) + [np.random.default_rng(seed).standard_normal(loc.cell.size)
                                                 for _ in range(10)]
        for psi in probes:
            resid = max(resid, abs(forms.decomposition_residual(u, g, psi)))
    u = bandlimited_field(grid, 6, 0, "acc-u")
    v, trace = fixed_point_solve(forms, u, tol=1e-12)
    rho = trace.asymptotic_rate
    observed = max(trace.rates[1:4]) if len(trace.rates) > 1 else 0.0
    rho_half = frozen_rate(0.025, grid, loc)
    factor = rho / rho_half
    elapsed = time.perf_counter() - t0
    ok = (resid < 1e-7 and trace.converged and rho <= 0.5 and observed <= 0.5
          and 1.6 <= factor <= 2.4 and elapsed < 300)
    record_acceptance(5, ok, f"residual {resid:.1e} (< 1e-7), rho {rho:.4f} (<= 0.5, observed {observed:.4f}), "
                             f"halving factor {factor:.3f} in [1.6, 2.4], {elapsed:.1f} s")
    assert ok


def test_criterion_06_regularity_estimate():
    orders = RegularityOrders(0.4, 0.6, 0.2, 4.0)
    affine, ratio = [], []
    for N in (32, 64):
        grid = TorusGrid(1, N)
        sym = compute_symbol(periodize(constant_kernel(1.0, 0.4), [0.0]), grid)
        rep = measure_estimate(sym, orders, standard_rhs_family(grid, 20))
        affine.append(rep.constant_affine)
        ratio.append(rep.constant)
    drift = relative_drift(*affine)
    ok = drift < 0.15 and all(np.isfinite(affine))
    record_acceptance(6, ok, f"C(32)={affine[0]:.4f} C(64)={affine[1]:.4f} drift {drift:.2%} (< 15%); "
                             f"ratio form {ratio[0]:.4f} -> {ratio[1]:.4f}")
    assert ok


def test_criterion_07_plap_ftc():
    grid = TorusGrid(1, 64)
    u = bandlimited_field(grid, 4, 11, "acc-plap")
    worst = {}
    for p in (3.0, 4.0):
        rng = np.random.default_rng(int(p))
        x, y, t = (rng.uniform(-0.5, 0.5, (1000, 1)) for _ in range(3))
        worst[p] = float(np.max(np.abs(ftc_residuals(u, p, x, y, t))))
    lhs = abs(1.0) ** 2 * 1.0 - 0.0
    rhs = c_p(4.0) * (1.0 - 0.0) * float(t_average(0.0, 1.0, 4.0))
    ok = all(w < 1e-9 for w in worst.values()) and lhs == 1.0 and abs(rhs - 1.0) < 1e-15 and c_p(3.0) == 2.0
    record_acceptance(7, ok, f"max residual p=3 {worst[3.0]:.1e}, p=4 {worst[4.0]:.1e} (< 1e-9); "
                             f"scalar case lhs={lhs:g} rhs={rhs:.15g}")
    assert ok


def test_criterion_08_cone_certificate():
    details, ok = [], True
    for n, N in ((1, 64), (2, 32)):
        u = field_from_config({"kind": "sine", "k": [1] + [0] * (n - 1), "N": N}, n)
        cert = cone_certificate(u, [0.0] * n, [0.0] * n, 4.0, sigma_angle=0.5, probes=500)
        if n == 1:
            h = np.array([[1.0], [-1.0]])
        else:
            a = np.linspace(-math.pi / 3, math.pi / 3, 25)
            h = np.concatenate([np.stack([np.cos(a), np.sin(a)], -1), -np.stack([np.cos(a), np.sin(a)], -1)])
        in_cap = np.abs(h[:, 0]) >= 0.5
        k = cert.kernel.eval(np.zeros(n), 0.0, h[in_cap])
        target = np.abs(h[in_cap] @ np.asarray(cert.grad)) ** 2
        raw = k / target
        dev = float(np.max(np.abs(raw / c_p(4.0) - 1)))
        this = cert.eta_eff > 0 and dev < 0.05
        ok &= this
        details.append(f"n={n}: eta_eff={cert.eta_eff:.4f}, max |K~/(c_p|grad u.h|^2) - 1| = {dev:.2e} "
                       f"(raw ratio {float(np.median(raw)):.4f})")
    record_acceptance(8, ok, "; ".join(details))
    assert ok


def test_criterion_09_local_inequalities():
    t0 = time.perf_counter()
    suites = [run_suite(N) for N in (32, 64, 128)]
    ok, worst = True, {}
    for key in suites[0]:
        drift = 0.0
        for col in zip(*(s[key] for s in suites)):
            d, good = refinement_check(list(col), 0.25)
            drift = max(drift, d)
            ok &= good and all(r.passed and np.isfinite(r.implied) for r in col)
        worst[key] = drift
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 600
    record_acceptance(9, ok, ", ".join(f"{k} drift {v:.1%}" for k, v in worst.items())
                      + f" (< 25%), {elapsed:.1f} s (< 600 s)")
    assert ok


def test_criterion_10_determinism(tmp_path):
    mismatched = []
    for case in sorted(CASES):
        run_case(case, tmp_path / case / "a")
        run_case(case, tmp_path / case / "b")
        if snapshot(tmp_path / case / "a") != snapshot(tmp_path / case / "b"):
            mismatched.append(case)
    ok = not mismatched
    record_acceptance(10, ok, f"{len(CASES) - len(mismatched)}/{len(CASES)} CLI golden cases byte-identical")
    assert ok
