import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonlocal_torus.errors import BadTruncation, NotSubsolution
from nonlocal_torus.estimate_verifier import (
    ball_mask,
    bump_probes,
    check_subsolution,
    cutoff,
    cutoff_grad_bound,
    density_of,
    grad_sup,
    log_truncation,
    refinement_check,
    run_suite,
    standard_solutions,
    verify_caccioppoli,
    verify_coercivity_form,
    verify_linfty_bound,
    verify_log_lemma,
    verify_poincare,
)
from nonlocal_torus.kernels import constant_kernel, modulated_kernel, pair_weights
from nonlocal_torus.torus_field import GridFunction, TorusGrid, bandlimited_field

GRID = TorusGrid(1, 32)
K = constant_kernel(1.0, 0.5)


@pytest.fixture(scope="module")
def solution():
    name, v = standard_solutions(GRID)[1]
    return v, density_of(K, v)


@pytest.mark.parametrize("R", [0.125, 0.25])
def test_cutoff_shape(R):
    phi = cutoff(GRID, [0.0], R)
    assert np.all(phi.flat[ball_mask(GRID, [0.0], R / 2)] == 1)
    assert np.all(phi.flat[~ball_mask(GRID, [0.0], R)] == 0)
    assert grad_sup(phi) <= cutoff_grad_bound(R) * (1 + 1e-9)
    assert cutoff_grad_bound(R) == pytest.approx(2 * cutoff_grad_bound(2 * R))


def test_bump_probes_nonnegative():
    ps = bump_probes(TorusGrid(2, 16), 4)
    assert len(ps) == 4
    assert all(np.all(p.values >= 0) and p.values.max() > 0 for p in ps)


def test_standard_solutions_positive():
    for _, v in standard_solutions(GRID):
        assert v.values.min() == pytest.approx(0.1)


def test_subsolution_check(solution):
    v, f = solution
    W = pair_weights(K, GRID)
    probes = bump_probes(GRID, 6)
    assert abs(check_subsolution(v, f, W, probes)) < 1e-9
    with pytest.raises(NotSubsolution):
        check_subsolution(v, f - 1.0, W, probes)


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 3), st.floats(1.01, 20), st.floats(0.05, 2))
def test_log_truncation_range(a, b, d):
    u = bandlimited_field(GRID, 3, 0)
    u = u - float(u.values.min())
    w = log_truncation(u, a, b, d)
    assert np.all(w.values >= 0) and np.all(w.values <= np.log(b) + 1e-15)


def test_log_truncation_rejects_small_b():
    with pytest.raises(BadTruncation):
        log_truncation(GridFunction.constant(GRID, 1.0), 1.0, 1.0, 0.5)
    with pytest.raises(BadTruncation):
        log_truncation(GridFunction.constant(GRID, 1.0), -1.0, 2.0, 0.5)


def test_reports_finite(solution):
    v, f = solution
    c = [0.0]
    reps = [
        verify_caccioppoli(v, f, 0.25, c, K=K),
        verify_linfty_bound(v, f, 0.125, c),
        verify_log_lemma(v, f, 0.1, 0.25, 0.5, c, K=K),
        verify_poincare(log_truncation(v, float(v.values.max()), 4.0, 0.5), 0.25, c),
    ]
    for r in reps:
        assert r.passed and np.isfinite(r.implied) and r.implied > 0
        assert r.rhs == pytest.approx(sum(r.rhs_terms.values()))
        assert r.implied == pytest.approx(r.lhs / r.rhs)


def test_poincare_constant_has_zero_lhs():
    r = verify_poincare(GridFunction.constant(GRID, 2.0), 0.25, [0.0])
    assert r.lhs == 0 and r.implied == 0


def test_report_digest_deterministic(solution):
    v, f = solution
    a = verify_linfty_bound(v, f, 0.125, [0.0])
    b = verify_linfty_bound(v, f, 0.125, [0.0])
    assert a.digest == b.digest
    assert verify_linfty_bound(v * 2.0, f, 0.125, [0.0]).digest != a.digest


def test_coercivity_form_report():
    probes = [bandlimited_field(GRID, 3, i) for i in range(4)]
    r = verify_coercivity_form(modulated_kernel(1.0, 0.2, 0.5), 0.5, probes, GRID)
    assert r.passed and 0 < r.implied < np.inf


def test_refinement_drift():
    a = run_suite(32)
    b = run_suite(64)
    for key in a:
        for ra, rb in zip(a[key], b[key]):
            drift, ok = refinement_check([ra, rb])
            assert ok and drift < 0.25
