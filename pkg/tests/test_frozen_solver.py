import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonlocal_torus.errors import BallTooLarge, LadderStalled, MaxIter, NoContraction
from nonlocal_torus.frozen_solver import (
    admissible_R,
    assemble_forms,
    bootstrap_regularity,
    build_localization,
    cover_centers,
    fixed_point_solve,
    ladder_orders,
    smooth_step,
    spectral_radius,
)
from nonlocal_torus.kernels import constant_kernel, custom_table_kernel, modulated_kernel
from nonlocal_torus.torus_field import TorusGrid, bandlimited_field

GRID = TorusGrid(1, 64)


def forms_for(amp, s=0.5, grid=GRID):
    loc = build_localization(grid, [0.0] * grid.n, admissible_R(grid))
    return assemble_forms(modulated_kernel(1.0, amp, s, grid.n), loc)


@settings(max_examples=30, deadline=None)
@given(st.floats(-2, 3))
def test_smooth_step_partition(t):
    a = float(smooth_step(t))
    assert 0 <= a <= 1
    assert a + float(smooth_step(1 - t)) == pytest.approx(1.0)
    if t <= 0:
        assert a == 1
    if t >= 1:
        assert a == 0


def test_localization_geometry():
    loc = build_localization(GRID, [0.0], admissible_R(GRID))
    assert loc.M == 16 and loc.R == pytest.approx(1 / 120)
    eta = loc.eta.flat
    assert np.all(eta[loc.plateau] == 1) and np.all(eta[~loc.ball5] == 0)
    assert np.all(loc.eta_tilde.flat[loc.in_cell] == 1)
    v = np.arange(loc.M, dtype=float)
    assert np.array_equal(loc.restrict(loc.embed(v)), v)


def test_localization_rejects_large_ball():
    with pytest.raises(BallTooLarge):
        build_localization(GRID, [0.0], 0.01)
    with pytest.raises(ValueError):
        build_localization(GRID, [0.0], 1 / 200)


@pytest.mark.parametrize("amp", [0.0, 0.05, 0.2])
@pytest.mark.parametrize("seed", [0, 1])
def test_decomposition_identity(amp, seed):
    f = forms_for(amp)
    u = bandlimited_field(GRID, 6, seed)
    g = f.density(u)
    rng = np.random.default_rng(seed)
    for _ in range(5):
        psi = rng.standard_normal(f.loc.cell.size)
        assert abs(f.decomposition_residual(u, g, psi)) < 1e-9


def test_decomposition_identity_2d():
    grid = TorusGrid(2, 32)
    f = forms_for(0.1, 0.4, grid)
    u = bandlimited_field(grid, 3, 4)
    g = f.density(u)
    psi = np.random.default_rng(0).standard_normal(f.loc.cell.size)
    assert abs(f.decomposition_residual(u, g, psi)) < 1e-9


def test_constant_kernel_converges_in_one_step():
    loc = build_localization(GRID, [0.0], admissible_R(GRID))
    f = assemble_forms(constant_kernel(1.0, 0.5), loc)
    assert spectral_radius(f) < 1e-12
    v, tr = fixed_point_solve(f, bandlimited_field(GRID, 4, 0))
    assert tr.converged and len(tr.increments) <= 2


@pytest.mark.parametrize("seed", [0, 3])
def test_fixed_point_recovers_cutoff_solution(seed):
    f = forms_for(0.05)
    u = bandlimited_field(GRID, 5, seed)
    v, tr = fixed_point_solve(f, u, tol=1e-12)
    ref = f.loc.restrict(f.loc.eta.flat * u.flat)
    assert tr.converged
    assert np.allclose(v - v.mean(), ref - ref.mean(), atol=1e-9)
    assert tr.plateau_error < 1e-9


def test_rate_linear_in_amplitude():
    rho = [spectral_radius(forms_for(a)) for a in (0.05, 0.025, 0.0125)]
    assert rho[0] <= 0.5
    for a, b in zip(rho[:-1], rho[1:]):
        assert 1.6 <= a / b <= 2.4


def test_failure_modes():
    f = forms_for(0.05)
    u = bandlimited_field(GRID, 4, 0)
    # frozen value 100x below its neighbours: the deviation dominates
    K = custom_table_kernel([("x1", [-0.5, -1 / 64, 0.0, 1 / 64, 0.5])], [1, 1, 0.01, 1, 1], 0.5, 1)
    bad = assemble_forms(K, f.loc)
    assert spectral_radius(bad) > 1
    with pytest.raises(NoContraction):
        fixed_point_solve(bad, u)
    with pytest.raises(MaxIter):
        fixed_point_solve(f, u, tol=1e-30, max_iter=2)


def test_ladder_orders():
    rungs = ladder_orders(0.4, 0.4, 0.79)
    ts = [t for t, _ in rungs]
    assert ts == sorted(ts) and ts[-1] >= 0.79 - 1e-12
    for t, tt in rungs:
        assert 0 < tt < 0.8 - t
    with pytest.raises(LadderStalled):
        ladder_orders(0.4, 0.8, 0.9)


def test_cover_centers_cover_ball():
    R = admissible_R(GRID)
    cs = cover_centers(GRID, [0.0], 0.1, R)
    assert (0.0,) in cs
    pts = np.array(cs)[:, 0]
    assert np.all(np.abs(pts) <= 0.1 + 1e-12)


def test_bootstrap_rows_consistent():
    u = bandlimited_field(GRID, 4, 1)
    rep = bootstrap_regularity(modulated_kernel(1.0, 0.05, 0.5), u, target=0.5)
    assert len(rep.rows) == 1
    row = rep.rows[0]
    assert row.seminorm == pytest.approx(row.direct_seminorm, rel=1e-8)


def test_bootstrap_differentiated_rung():
    u = bandlimited_field(GRID, 4, 1)
    rep = bootstrap_regularity(modulated_kernel(1.0, 0.05, 0.5), u, target=1.2)
    last = rep.rows[-1]
    assert last.differentiated and last.t == pytest.approx(1.2)
    assert last.seminorm == pytest.approx(last.direct_seminorm, rel=1e-6)
