import numpy as np
import pytest
from hypothesis import example, given, settings, strategies as st
from scipy import integrate

from nonlocal_torus.errors import DegenerateGradient, OffGridShift
from nonlocal_torus.kernels import operator_matrix, pair_weights
from nonlocal_torus.plap_lab import (
    PlapConfig,
    bootstrap_hoelder,
    c_p,
    cone_certificate,
    difference_quotient,
    effective_kernel,
    field_from_config,
    ftc_residuals,
    plap_density,
    plap_form,
    t_average,
)
from nonlocal_torus.torus_field import TorusGrid, bandlimited_field

vals = st.floats(-5, 5, allow_nan=False)


def t_average_oracle(a, b, p):
    return integrate.quad(lambda t: abs(t * a + (1 - t) * b) ** (p - 2), 0, 1,
                          points=[b / (b - a)] if a * b < 0 else None, epsabs=1e-14, epsrel=1e-13)[0]


@settings(max_examples=60, deadline=None)
@given(vals, vals, st.sampled_from([2.0, 2.5, 3.0, 4.0, 5.5, 6.0]))
@example(0.0, 1.0, 2.5)
@example(1.0, 1.001, 3.5)
def test_t_average_matches_quad(a, b, p):
    assert float(t_average(a, b, p)) == pytest.approx(t_average_oracle(a, b, p), rel=1e-10, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(vals, vals, st.sampled_from([3.0, 4.0, 3.5]))
def test_ftc_scalar_identity(a, b, p):
    lhs = abs(b) ** (p - 2) * b - abs(a) ** (p - 2) * a
    rhs = c_p(p) * (b - a) * float(t_average(a, b, p))
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


def test_scalar_case_p4():
    assert c_p(4.0) == 3.0
    assert c_p(4.0) * float(t_average(0.0, 1.0, 4.0)) == pytest.approx(1.0, abs=1e-15)


def test_plap_density_represents_form():
    g = TorusGrid(1, 16)
    u = bandlimited_field(g, 3, 0)
    phi = bandlimited_field(g, 3, 1)
    f = plap_density(u, 3.0, 0.8)
    assert plap_form(u, phi, 3.0, 0.8) == pytest.approx(g.cell_volume * np.sum(f.values * phi.values), rel=1e-12)


def test_plap_form_linear_case():
    # p = 2 reduces to the bilinear form, which is symmetric
    g = TorusGrid(1, 16)
    u = bandlimited_field(g, 3, 0)
    phi = bandlimited_field(g, 3, 1)
    assert plap_form(u, phi, 2.0, 0.5) == pytest.approx(plap_form(phi, u, 2.0, 0.5), rel=1e-12)


def test_difference_quotient():
    g = TorusGrid(1, 16)
    u = bandlimited_field(g, 3, 2)
    d = difference_quotient(u, [1 / 16])
    assert np.allclose(d.values, np.roll(u.values, -1) - u.values)
    with pytest.raises(OffGridShift):
        difference_quotient(u, [0.01])


@pytest.mark.parametrize("p", [3.0, 4.0])
@pytest.mark.parametrize("n,N", [(1, 32), (2, 8)])
def test_linearized_equation_on_grid(p, n, N):
    # delta_tau of the p-Laplace density equals the linear operator with kernel K~ applied to delta_tau u
    g = TorusGrid(n, N)
    u = bandlimited_field(g, 2, 1)
    tau = [2 / N] + [0.0] * (n - 1)
    eff = effective_kernel(u, tau, p, 0.9)
    A = operator_matrix(pair_weights(eff.kernel, g, eff.s_eff), g.cell_volume)
    lhs = difference_quotient(plap_density(u, p, 0.9), tau).flat
    rhs = A @ difference_quotient(u, tau).flat
    assert np.max(np.abs(lhs - rhs)) < 1e-11 * np.max(np.abs(lhs))


@pytest.mark.parametrize("p", [3.0, 4.0])
def test_ftc_residuals_random_probes(p):
    g = TorusGrid(1, 64)
    u = bandlimited_field(g, 4, 3)
    rng = np.random.default_rng(0)
    x, y, t = (rng.uniform(-0.5, 0.5, (50, 1)) for _ in range(3))
    assert np.max(np.abs(ftc_residuals(u, p, x, y, t))) < 1e-9


def test_s_eff_and_bounds():
    u = field_from_config({"kind": "sine", "k": [1], "N": 64}, 1)
    eff = effective_kernel(u, [1 / 64], 4.0, 0.9)
    assert eff.s_eff == pytest.approx(0.8)
    assert eff.kernel.Lam >= 0 and eff.kernel.name == "plap_effective"


def test_cone_certificate_sine():
    u = field_from_config({"kind": "sine", "k": [1], "N": 64}, 1)
    cert = cone_certificate(u, [0.0], [0.0], 4.0, probes=200)
    assert cert.passed
    assert cert.eta_eff == pytest.approx(3.0, rel=0.05)
    assert cert.grad[0] == pytest.approx(1.0, rel=1e-2)


def test_cone_certificate_2d_ratio():
    u = field_from_config({"kind": "sine", "k": [1, 0], "N": 32}, 2)
    cert = cone_certificate(u, [0.0, 0.0], [0.0, 0.0], 4.0, probes=200)
    assert cert.passed
    h = np.array([[np.cos(a), np.sin(a)] for a in np.linspace(-0.5, 0.5, 7)])
    k = cert.kernel.eval(np.zeros(2), 0.0, h)
    assert np.allclose(k / (3.0 * h[:, 0] ** 2), 1.0, rtol=0.05)


def test_degenerate_gradient():
    u = field_from_config({"kind": "sine", "k": [1], "N": 64}, 1)
    with pytest.raises(DegenerateGradient):
        cone_certificate(u, [0.25], [0.0], 4.0, probes=50)


def test_plap_config_validation():
    PlapConfig(4.0, 0.9, (0.001,), (0.0,), 0.01)
    with pytest.raises(ValueError):
        PlapConfig(4.0, 0.4, (0.001,), (0.0,), 0.01)
    with pytest.raises(ValueError):
        PlapConfig(4.0, 0.9, (0.02,), (0.0,), 0.01)
    assert PlapConfig(4.0, 0.6, (0.0,), (0.0,), 0.01).alpha_eff == pytest.approx(0.4)
    assert PlapConfig(3.0, 0.9, (0.0,), (0.0,), 0.01).alpha_eff == 1.0


def test_hoelder_bootstrap_small():
    u = field_from_config({"kind": "sine", "k": [1], "N": 256}, 1)
    cfg = PlapConfig(4.0, 0.9, (1 / 256,), (0.0,), 1 / 120)
    rep = bootstrap_hoelder(u, None, cfg, [1 / 256], max_rungs=1)
    row = rep.rows[0]
    assert np.isfinite(row.quotient_one) and 0 < row.quotient_one < 10
    assert row.rate < 0.5
