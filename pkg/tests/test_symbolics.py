import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from nonlocal_torus.errors import BadEllipticity, EmptyCone
from nonlocal_torus.kernels import Cone, ConeUnion, cone_indicator_kernel, constant_kernel, modulated_kernel, pair_weights
from nonlocal_torus.kernels import fibonacci_sphere, form_value
from nonlocal_torus.symbolics import (
    compute_symbol,
    explicit_constant,
    f_sigma,
    lattice_symbol,
    lattice_tail_bound,
    moment_tensor,
    one_minus_cos_root,
    periodize,
    radial_constant,
    radial_constant_closed_form,
    torus_symbol_quadrature,
    verify_coercivity,
)
from nonlocal_torus.torus_field import TorusGrid, dft, trig_mode


def radial_oracle(s):
    # int_0^inf (1 - cos t) t^{-1-2s} dt by scipy: near part plus Fourier-weighted tail
    near = integrate.quad(lambda t: (1 - math.cos(t)) * t ** (-1 - 2 * s), 0, 1, limit=200)[0]
    far_pow = 1 / (2 * s)
    far_cos = integrate.quad(lambda t: t ** (-1 - 2 * s), 1, np.inf, weight="cos", wvar=1.0)[0]
    return near + far_pow - far_cos


@pytest.mark.parametrize("s", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_radial_constant_oracles(s):
    C, err = radial_constant(s)
    assert C == pytest.approx(radial_oracle(s), rel=1e-8)
    assert C == pytest.approx(math.pi / (2 * special.gamma(1 + 2 * s) * math.sin(math.pi * s)), rel=1e-12)
    assert radial_constant_closed_form(s) == pytest.approx(C, rel=1e-12)
    assert err < 1e-10


def test_one_minus_cos_root():
    r0 = one_minus_cos_root()
    assert 1 - math.cos(2 * r0) == pytest.approx(r0**2 / 4, abs=1e-11)
    assert r0 == pytest.approx(2.232126591897, abs=1e-10)
    # largest root: the curves do not meet again
    t = np.linspace(r0 + 1e-3, 20, 20001)
    assert np.all(1 - np.cos(2 * t) < t**2 / 4)


def f_oracle_2d(sigma, d):
    th = np.linspace(0, 2 * np.pi, 400001)[:-1]
    pts = np.stack([np.cos(th), np.sin(th)], axis=-1)
    vals = (pts @ d) ** 2 * sigma.contains(pts)
    return vals.mean() * 2 * np.pi


@pytest.mark.parametrize("sigma", [
    Cone([1.0, 0.0], np.pi / 4),
    Cone([1.0, 1.0], 0.3, symmetric=True),
    ConeUnion((Cone([1.0, 0.0], 0.5), Cone([0.0, 1.0], 0.2))),
])
@pytest.mark.parametrize("angle", [0.0, 0.7, 2.0])
def test_f_sigma_matches_angular_quadrature(sigma, angle):
    d = np.array([math.cos(angle), math.sin(angle)])
    assert f_sigma(sigma, d) == pytest.approx(f_oracle_2d(sigma, d), abs=1e-4)


def test_moment_tensor_3d_cap():
    cap = Cone([0.0, 0.0, 1.0], 0.6)
    pts = fibonacci_sphere(400_000)
    inside = pts[cap.contains(pts)]
    ref = 4 * np.pi / len(pts) * inside.T @ inside
    assert np.allclose(moment_tensor(cap), ref, atol=2e-4)
    assert np.trace(moment_tensor(cap)) == pytest.approx(cap.measure())


@pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
def test_explicit_constant_formula(s):
    sig = Cone([1.0, 0.0], np.pi / 4)
    ec = explicit_constant(sig, 1.0, s)
    r0 = one_minus_cos_root()
    fmin = (np.pi / 2 - 1) / 2  # f along the worst direction, perpendicular to the axis
    assert ec.f_min == pytest.approx(fmin, abs=1e-9)
    assert ec.c_explicit == pytest.approx(r0 ** (2 - 2 * s) * fmin / (8 * (1 - s)), rel=1e-9)


def test_explicit_constant_3d_eigen_vs_sweep():
    ec = explicit_constant(Cone([0.0, 0.0, 1.0], 0.5, symmetric=True), 1.0, 0.5)
    assert ec.sweep_min >= ec.f_min - 1e-12
    assert ec.sweep_min == pytest.approx(ec.f_min, rel=1e-3)


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_symbol_1d_constant_kernel(s):
    grid = TorusGrid(1, 32)
    sym = compute_symbol(periodize(constant_kernel(1.0, s), [0.0]), grid)
    C = radial_oracle(s)
    for k in (1, 2, 7, 16):
        assert sym.value((k,)) == pytest.approx(2 * C * (2 * math.pi * k) ** (2 * s), rel=1e-8)
    assert sym.value((0,)) == 0


def test_symbol_2d_isotropic_for_constant_kernel():
    grid = TorusGrid(2, 16)
    sym = compute_symbol(periodize(constant_kernel(1.0, 0.5, 2), [0.0, 0.0]), grid, kmax=5)
    assert sym.value((3, 4)) == pytest.approx(sym.value((5, 0)), rel=1e-8)
    assert sym.value((0, 3)) == pytest.approx(sym.value((3, 0)), rel=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.integers(-4, 4), st.integers(-4, 4))
def test_symbol_even_and_homogeneous(a, b):
    if a == 0 and b == 0:
        return
    grid = TorusGrid(2, 32)
    K = cone_indicator_kernel(Cone([1.0, 0.2], 0.6, symmetric=True), 1.0, 1.0, 0.4)
    sym = _cached_cone_symbol(grid, K)
    assert sym.value((a, b)) == pytest.approx(sym.value((-a, -b)), rel=1e-12)
    assert sym.value((2 * a, 2 * b)) == pytest.approx(2**0.8 * sym.value((a, b)), rel=1e-6)


_CACHE = {}


def _cached_cone_symbol(grid, K):
    if "cone" not in _CACHE:
        _CACHE["cone"] = compute_symbol(periodize(K, [0.0, 0.0]), grid, kmax=8)
    return _CACHE["cone"]


@pytest.mark.parametrize("k", [(1,), (3,)])
def test_direct_cell_quadrature_1d(k):
    mu = periodize(modulated_kernel(1.0, 0.0, 0.5), [0.0])
    sym = compute_symbol(mu, TorusGrid(1, 16))
    assert torus_symbol_quadrature(mu, k) == pytest.approx(sym.value(k), rel=1e-6)


@pytest.mark.parametrize("k", [(1, 0), (1, 1)])
def test_direct_cell_quadrature_2d(k):
    K = cone_indicator_kernel(Cone([1.0, 0.0], np.pi / 4, symmetric=True), 1.0, 1.0, 0.5)
    mu = periodize(K, [0.0, 0.0])
    sym = compute_symbol(mu, TorusGrid(2, 8), kmax=2)
    assert torus_symbol_quadrature(mu, k) == pytest.approx(sym.value(k), rel=1e-4)


def test_lattice_tail_bound_decreases():
    assert lattice_tail_bound(1, 0.5, 400) < lattice_tail_bound(1, 0.5, 200)
    assert lattice_tail_bound(2, 0.5, 50) > 0


def test_lattice_symbol_diagonalizes_grid_form():
    grid = TorusGrid(1, 16)
    K = constant_kernel(1.0, 0.5)
    W = pair_weights(K, grid)
    sym = lattice_symbol(grid, W[0], grid.cell_volume, 0.5)
    for k in (1, 3, 8):
        phi = trig_mode(grid, (k,))
        c = dft(phi).coeffs
        spectral = float(np.sum(2 * sym.values * np.abs(c) ** 2))
        assert spectral == pytest.approx(form_value(W, phi.flat, phi.flat, grid.cell_volume), rel=1e-12)


@pytest.mark.parametrize("s", [0.3, 0.7])
def test_coercivity_certificate_pass_and_fail(s):
    sig = Cone([1.0, 0.0], np.pi / 4, symmetric=True)
    K = cone_indicator_kernel(sig, 1.0, 1.0, s)
    sym = compute_symbol(periodize(K, [0.0, 0.0]), TorusGrid(2, 16), kmax=6)
    cert = verify_coercivity(sym, sig, 1.0)
    assert cert.passed and cert.min_ratio > cert.c_explicit
    # an inflated ellipticity claim is caught
    assert not verify_coercivity(sym, sig, 1e3).passed


def test_explicit_constant_rejects_bad_input():
    with pytest.raises(BadEllipticity):
        explicit_constant(Cone([1.0, 0.0], 0.5), 0.0, 0.5)
    with pytest.raises(ValueError):
        explicit_constant(Cone([1.0, 0.0], 0.5), 1.0, 1.0)
    with pytest.raises(EmptyCone):
        explicit_constant(ConeUnion(()), 1.0, 0.5)
