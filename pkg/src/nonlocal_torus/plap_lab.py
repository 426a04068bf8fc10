"""
Fractional p-Laplacian experiments.

Discrete weak form ``h^{2n} sum |u_x - u_y|^{p-2}(u_x - u_y)(phi_x - phi_y) / |x-y|^{n+sp}``
on the torus, difference quotients, the effective kernel of the shifted
equation and the Hoelder-quotient bootstrap.

With ``a = u(x) - u(y)``, ``b = u(x+tau) - u(y+tau)`` and
``G(z) = |z|^{p-2} z`` the fundamental theorem of calculus gives

    G(b) - G(a) = (p-1) int_0^1 |t a + (1-t) b|^{p-2} dt (b - a),

so ``delta_tau u`` solves a linear equation of order
``s_eff = (sp - p + 2)/2`` with kernel

    K~(x, r, h) = r^{2-p} (p-1) int_0^1 |t (u(x) - u(x-rh)) + (1-t)(u(x+tau) - u(x+tau-rh))|^{p-2} dt.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DegenerateGradient, OffGridShift
from .frozen_solver import (
    assemble_forms,
    build_localization,
    fixed_point_solve,
    ladder_orders,
)
from .kernels import (
    Cone,
    ContinuityReport,
    Kernel,
    cone_indicator_kernel,
    full_sphere,
    measure_continuity,
    sample_sigma,
)
from .torus_field import (
    GridFunction,
    RegularityOrders,
    TorusGrid,
    gagliardo_seminorm,
    gradient,
    lp_norm,
    read_field,
    trig_interpolate,
    wrap,
)

GL_NODES = 32


def c_p(p: float) -> float:
    """FTC constant ``p - 1``."""
    return p - 1.0


@lru_cache(maxsize=None)
def _gl01(q: int):
    x, w = np.polynomial.legendre.leggauss(q)
    return 0.5 * (x + 1), 0.5 * w


def t_average(a, b, p: float, q: int = GL_NODES) -> np.ndarray:
    """``int_0^1 |t a + (1-t) b|^{p-2} dt`` (elementwise).

    Even integer ``p - 2`` uses the exact complete homogeneous sum.  Other
    exponents integrate ``|z|^m`` piecewise between sign changes of the
    linear ``z``; nearly equal ``a, b`` (no root, smooth integrand) use
    Gauss-Legendre to avoid cancellation.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m = p - 2.0
    if m == 0:
        return np.ones(np.broadcast_shapes(a.shape, b.shape))
    if float(m).is_integer() and int(m) % 2 == 0:
        mi = int(m)
        tot = sum(a**j * b ** (mi - j) for j in range(mi + 1))
        return tot / (mi + 1)
    a, b = np.broadcast_arrays(a, b)
    scale = np.maximum(np.abs(a), np.abs(b))
    d = np.abs(a - b)
    close = d <= 1e-2 * scale
    out = np.zeros(a.shape)
    # |z| is linear on each side of the root, so each piece is a power integral
    far = ~close
    if np.any(far):
        af, bf, df = a[far], b[far], d[far]
        same = af * bf >= 0
        e = m + 1
        one = np.abs(np.abs(af) ** e - np.abs(bf) ** e) / (e * df)
        two = (np.abs(af) ** e + np.abs(bf) ** e) / (e * df)
        out[far] = np.where(same, one, two)
    if np.any(close):
        x, w = _gl01(q)
        ac, bc = a[close], b[close]
        z = x * ac[..., None] + (1 - x) * bc[..., None]
        out[close] = np.sum(w * np.abs(z) ** m, axis=-1)
    return out


def _G(z, p):
    return np.abs(z) ** (p - 2) * z


# ---------------------------------------------------------------------------
# Weak form
# ---------------------------------------------------------------------------


def _offset_weights(grid: TorusGrid, expo: float) -> np.ndarray:
    d = np.sqrt(np.sum(grid.wrapped_offsets() ** 2, axis=-1))
    w = np.zeros_like(d)
    nz = d > 0
    w[nz] = d[nz] ** (-expo)
    return w


def plap_form(u: GridFunction, phi: GridFunction, p: float, s: float) -> float:
    """``h^{2n} sum_{x != y} G(u_x - u_y)(phi_x - phi_y) / |x-y|^{n+sp}``."""
    if p < 2:
        raise ValueError("p must be >= 2")
    grid = u.grid
    w = _offset_weights(grid, grid.n + s * p)
    axes = tuple(range(grid.n))
    total = 0.0
    for j in np.ndindex(*grid.shape):
        if not any(j):
            continue
        sh = [-x for x in j]
        du = u.values - np.roll(u.values, sh, axis=axes)
        dp = phi.values - np.roll(phi.values, sh, axis=axes)
        total += w[j] * float(np.sum(_G(du, p) * dp))
    return total * grid.cell_volume**2


def plap_density(u: GridFunction, p: float, s: float) -> GridFunction:
    """``f`` with ``plap_form(u, phi) = h^n sum f phi`` for every ``phi``."""
    grid = u.grid
    w = _offset_weights(grid, grid.n + s * p)
    axes = tuple(range(grid.n))
    acc = np.zeros(grid.shape)
    for j in np.ndindex(*grid.shape):
        if not any(j):
            continue
        du = u.values - np.roll(u.values, [-x for x in j], axis=axes)
        acc += 2 * w[j] * _G(du, p)
    return GridFunction(grid, acc * grid.cell_volume)


def difference_quotient(f: GridFunction, tau: Sequence[float]) -> GridFunction:
    """``delta_tau f = f(. + tau) - f`` for a grid-commensurate ``tau``."""
    grid = f.grid
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    if tau.shape != (grid.n,):
        raise ValueError(f"shift needs {grid.n} components")
    steps = tau * grid.N
    if np.max(np.abs(steps - np.round(steps))) > 1e-9:
        raise OffGridShift(f"shift {tau.tolist()} is not a multiple of h = 1/{grid.N}")
    return f.shifted(np.round(steps).astype(int)) - f


# ---------------------------------------------------------------------------
# Effective kernel
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EffectiveKernel:
    """Linearized kernel of the shifted p-Laplace equation."""

    u: GridFunction
    tau: tuple[float, ...]
    p: float
    s: float
    kernel: Kernel
    grad: tuple[GridFunction, ...] = field(repr=False, default=())

    @property
    def s_eff(self) -> float:
        return (self.s * self.p - self.p + 2) / 2

    def values_at(self, X: np.ndarray) -> np.ndarray:
        return trig_interpolate(self.u, X)

    def eval(self, x, r, h) -> np.ndarray:
        return self.kernel.eval(x, r, h)

    def identity_check(self, x, y) -> np.ndarray:
        """Residual of the FTC identity at point pairs ``(x, y)`` (shape ``(m, n)`` each)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        y = np.atleast_2d(np.asarray(y, dtype=float))
        tau = np.asarray(self.tau)
        d = wrap(x - y)
        r = np.sqrt(np.sum(d * d, axis=-1))
        h = d / r[:, None]
        ux, uy = self.values_at(x), self.values_at(x - d)
        ut, uyt = self.values_at(x + tau), self.values_at(x - d + tau)
        a, b = ux - uy, ut - uyt
        lhs = _G(b, self.p) - _G(a, self.p)
        Kt = self.kernel.eval(x, r, h)
        rhs = r ** (self.p - 2) * Kt * (b - a)
        return np.abs(lhs - rhs)


def effective_kernel(u: GridFunction, tau: Sequence[float], p: float, s: float,
                     r_small: float = 1e-7) -> EffectiveKernel:
    """Build ``K~_tau`` for the field ``u``; ``r <= r_small`` uses the spectral gradient."""
    if p < 2:
        raise ValueError("p must be >= 2")
    grid = u.grid
    n = grid.n
    tau = np.atleast_1d(np.asarray(tau, dtype=float)).reshape(n)
    grads = tuple(gradient(u))
    gmax = float(np.max(np.sqrt(sum(gi.values**2 for gi in grads))))
    cp = c_p(p)
    Lam = cp * gmax ** (p - 2) if p > 2 else 1.0
    s_eff = (s * p - p + 2) / 2
    if s_eff <= 0:
        raise ValueError(f"need s > (p-2)/p, got s={s}, p={p}")

    def grad_at(X):
        return np.stack([trig_interpolate(gi, X) for gi in grads], axis=-1)

    def fn(x, r, h):
        shape = r.shape
        xf = x.reshape(-1, n)
        rf = r.reshape(-1)
        hf = h.reshape(-1, n)
        out = np.empty(len(rf))
        small = rf <= r_small
        if small.any():
            ga = np.sum(grad_at(xf[small]) * hf[small], axis=-1)
            gb = np.sum(grad_at(xf[small] + tau) * hf[small], axis=-1)
            out[small] = cp * t_average(ga, gb, p)
        big = ~small
        if big.any():
            xb, rb, hb = xf[big], rf[big], hf[big]
            y = xb - rb[:, None] * hb
            a = trig_interpolate(u, xb) - trig_interpolate(u, y)
            b = trig_interpolate(u, xb + tau) - trig_interpolate(u, y + tau)
            out[big] = cp * t_average(a, b, p) * rb ** (2 - p)
        return out.reshape(shape)

    steps = tau * grid.N
    on_grid = bool(np.max(np.abs(steps - np.round(steps))) <= 1e-9)

    def pair_fn(g2: TorusGrid):
        if g2 != grid or not on_grid:
            raise ValueError("pair fast path needs the field's own grid and a grid shift")
        v = u.flat
        vt = u.shifted(np.round(steps).astype(int)).flat
        X = grid.flat_points()
        D = wrap(X[:, None, :] - X[None, :, :])
        r = np.sqrt(np.sum(D * D, axis=-1))
        a = v[:, None] - v[None, :]
        b = vt[:, None] - vt[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            out = cp * t_average(a, b, p) * np.where(r > 0, r, 1.0) ** (2 - p)
        return out

    K = Kernel(fn, n, float(s_eff), float(Lam), 0.0, full_sphere(n), "plap_effective", None, False,
               {"family": "plap_effective", "p": p, "s": s, "tau": tau.tolist()},
               pair_fn if on_grid else None)
    return EffectiveKernel(u, tuple(tau.tolist()), float(p), float(s), K, grads)


def ftc_residuals(u: GridFunction, p: float, x: np.ndarray, y: np.ndarray, taus: np.ndarray,
                  s: float = 0.9) -> np.ndarray:
    """FTC residuals at independent ``(x, y, tau)`` triples, each relative to ``1 + |lhs|``."""
    out = []
    for xi, yi, ti in zip(np.atleast_2d(x), np.atleast_2d(y), np.atleast_2d(taus)):
        eff = effective_kernel(u, ti, p, s)
        res = eff.identity_check(xi[None, :], yi[None, :])[0]
        a = trig_interpolate(u, xi[None, :])[0] - trig_interpolate(u, (xi - wrap(xi - yi))[None, :])[0]
        out.append(res / (1.0 + abs(a) ** (p - 1)))
    return np.array(out)


# ---------------------------------------------------------------------------
# Cone certificate
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PlapConfig:
    p: float
    s: float
    tau: tuple[float, ...]
    x0: tuple[float, ...]
    R: float

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("p must be >= 2")
        if not 0 < self.s < 1:
            raise ValueError("s must lie in (0, 1)")
        if self.s * self.p - self.p + 2 <= 0:
            raise ValueError(f"need s > (p-2)/p, got s={self.s}, p={self.p}")
        if np.linalg.norm(self.tau) >= self.R:
            raise ValueError("|tau| must be smaller than R")

    @property
    def alpha_eff(self) -> float:
        return min(self.s * self.p - self.p + 2, 1.0)


@dataclass(frozen=True, eq=False)
class PlapCertificate:
    sigma: Cone
    eta_eff: float
    grad: tuple[float, ...]
    continuity: ContinuityReport
    kernel: EffectiveKernel
    probes: int

    @property
    def passed(self) -> bool:
        return self.eta_eff > 0


def fd_gradient(u: GridFunction, x0: Sequence[float]) -> np.ndarray:
    """Centered finite-difference gradient at a grid point."""
    grid = u.grid
    idx = np.array(grid.index_of(x0))
    out = np.empty(grid.n)
    for i in range(grid.n):
        e = np.zeros(grid.n, dtype=int)
        e[i] = 1
        up = u.values[tuple((idx + e) % grid.N)]
        dn = u.values[tuple((idx - e) % grid.N)]
        out[i] = (up - dn) / (2 * grid.h)
    return out


def cone_certificate(u: GridFunction, x0: Sequence[float], tau: Sequence[float], p: float,
                     sigma_angle: float = 0.5, s: float = 0.9, floor: float = 1e-3, probes: int = 2000,
                     scales: Sequence[float] = (0.0625, 0.125, 0.25, 0.5, 1.0), rscale: float = 0.1,
                     seed: int = 0) -> PlapCertificate:
    """Cone of directions ``|<h, v>| >= sigma_angle`` around ``v = grad u(x0)/|grad u(x0)|``.

    ``eta_eff`` is the smallest ``K~(x0, 0, h)`` over seeded probes of the
    cap; the continuity report measures ``K~`` against its frozen value.
    """
    if not 0 < sigma_angle <= 1:
        raise ValueError("sigma_angle must lie in (0, 1]")
    g = fd_gradient(u, x0)
    gmax = float(np.max(np.sqrt(sum(gi.values**2 for gi in gradient(u)))))
    gn = float(np.linalg.norm(g))
    if gn <= floor * gmax or gn == 0:
        raise DegenerateGradient(f"|grad u(x0)| = {gn:.3e} is below the floor {floor * gmax:.3e}")
    sig = Cone(g / gn, float(np.arccos(sigma_angle)) if sigma_angle < 1 else 1e-9, True)
    eff = effective_kernel(u, tau, p, s)
    hs = sample_sigma(sig, probes, seed)
    x0a = np.asarray(x0, dtype=float)
    vals = eff.eval(x0a, 0.0, hs)
    cont = measure_continuity(eff.kernel, x0a, rscale, scales, probes=256, seed=seed)
    return PlapCertificate(sig, float(np.min(vals)), tuple(g.tolist()), cont, eff, probes)


def extend_effective_kernel(eff: EffectiveKernel, cert: PlapCertificate, x0: Sequence[float],
                            radius: float) -> Kernel:
    """``K~`` on ``B(x0, radius)``; outside, the cone indicator with ``eta = eta_eff``."""
    x0 = np.asarray(x0, dtype=float)
    ind = cone_indicator_kernel(cert.sigma, cert.eta_eff, max(cert.eta_eff, eff.kernel.Lam), eff.kernel.s)
    inner = eff.kernel

    def fn(x, r, h):
        near = np.sqrt(np.sum(wrap(x - x0) ** 2, axis=-1)) < radius
        out = ind.fn(x, r, h)
        if np.any(near):
            out = np.where(near, inner.fn(x, r, h), out)
        return out

    return Kernel(fn, inner.n, inner.s, inner.Lam, cert.eta_eff, cert.sigma, "plap_extended", None, False,
                  dict(inner.params, radius=radius))


# ---------------------------------------------------------------------------
# Hoelder bootstrap
# ---------------------------------------------------------------------------


def hoelder_seminorm(values: np.ndarray, points: np.ndarray, beta: float) -> float:
    """``max |f_x - f_y| / |x - y|^beta`` over distinct points (wrapped distance)."""
    values = np.asarray(values, dtype=float)
    if len(values) < 2:
        return 0.0
    d = wrap(points[:, None, :] - points[None, :, :])
    r = np.sqrt(np.sum(d * d, axis=-1))
    mask = r > 0
    q = np.abs(values[:, None] - values[None, :])[mask] / r[mask] ** beta
    return float(q.max())


@dataclass(frozen=True)
class HoelderRow:
    tau: float
    rung: int
    order: float
    norm: float
    hoelder: float
    quotient_s: float
    quotient_alpha: float
    quotient_one: float
    rate: float
    plateau_error: float


@dataclass(frozen=True)
class HoelderReport:
    rows: tuple[HoelderRow, ...]
    exponents: tuple[float, float, float]
    beta: float
    sup_quotient_s: float
    sup_quotient_one: float


def bootstrap_hoelder(u: GridFunction, f_rhs: GridFunction | None, cfg: PlapConfig,
                      taus: Sequence[float] | None = None, epsilon: float = 0.05, max_rungs: int = 3,
                      tol: float = 1e-10, direction: Sequence[float] | None = None) -> HoelderReport:
    """Solve the shifted equation for ``delta_tau u`` by the frozen ladder over a tau sweep.

    For each rung the cell solution is measured in ``W^{t,2}``; the final
    table reports ``[delta_tau u]_{C^beta(B(x0,5R))} / |tau|^gamma`` for
    ``beta = alpha_eff - epsilon`` and ``gamma in {s, alpha_eff, 1}``.
    ``f_rhs`` defaults to the discrete p-Laplacian of ``u``.
    """
    grid = u.grid
    n = grid.n
    f = plap_density(u, cfg.p, cfg.s) if f_rhs is None else f_rhs
    e = np.zeros(n)
    e[0] = 1.0
    if direction is not None:
        e = np.asarray(direction, dtype=float)
        e /= np.linalg.norm(e)
    if taus is None:
        taus = [2 / grid.N, 4 / grid.N, 8 / grid.N]
    alpha = cfg.alpha_eff
    beta = max(1e-3, alpha - epsilon)
    rows = []
    loc = build_localization(grid, cfg.x0, cfg.R)
    cell_pts = grid.flat_points()[loc.cell_points][loc.plateau[loc.cell_points]]
    for tmag in taus:
        tau = tmag * e
        du = difference_quotient(u, tau)
        df = difference_quotient(f, tau)
        eff = effective_kernel(u, tau, cfg.p, cfg.s)
        forms = assemble_forms(eff.kernel, loc, eff.s_eff)
        se = eff.s_eff
        rungs = ladder_orders(se, se, 1.0 - 1e-9, max_rungs)
        for i, (t, tt) in enumerate(rungs):
            orders = RegularityOrders(se, se, se, 2.0, 2.0, t=t, t_tilde=tt) if tt > 0 else None
            v, tr = fixed_point_solve(forms, du, df, orders, tol=tol)
            vals = (v + tr.plateau_offset)[loc.plateau[loc.cell_points]]
            hs = hoelder_seminorm(vals, cell_pts, beta)
            norm = gagliardo_seminorm(GridFunction(loc.cell, v), min(t, 0.999), 2.0)
            rows.append(HoelderRow(float(tmag), i, float(t), float(norm), hs, hs / tmag**cfg.s,
                                   hs / tmag**alpha, hs / tmag, tr.asymptotic_rate, tr.plateau_error))
    sup_s = max((r.quotient_s for r in rows), default=0.0)
    sup_1 = max((r.quotient_one for r in rows), default=0.0)
    return HoelderReport(tuple(rows), (cfg.s, alpha, 1.0), beta, sup_s, sup_1)


def h_tau_constant(f: GridFunction, tau: Sequence[float], probes: Sequence[GridFunction]) -> float:
    """Largest ``|int psi delta_tau f| / (|tau| ||f||_{C^1} ||psi||_{L^1})`` over probes."""
    df = difference_quotient(f, tau)
    c1 = float(np.max(np.abs(f.values))) + float(np.max(np.sqrt(sum(g.values**2 for g in gradient(f)))))
    tn = float(np.linalg.norm(tau))
    best = 0.0
    for psi in probes:
        l1 = lp_norm(psi, 1)
        if l1 == 0 or tn == 0:
            continue
        val = abs(f.grid.cell_volume * float(np.sum(psi.values * df.values)))
        best = max(best, val / (tn * c1 * l1))
    return best


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


def field_from_config(cfg: dict, n: int) -> GridFunction:
    """``{file: stem}`` or ``{kind: sine, k: [...], N: 64}`` (``sin(2 pi k.x) / (2 pi |k|)``)."""
    if "file" in cfg:
        f, _ = read_field(cfg["file"])
        return f
    N = int(cfg.get("N", 64))
    grid = TorusGrid(n, N)
    k = np.asarray(cfg.get("k", [1] + [0] * (n - 1)), dtype=float)
    kind = cfg.get("kind", "sine")
    amp = float(cfg.get("amplitude", 1.0))
    arg = 2 * np.pi * (grid.points() @ k)
    if kind == "sine":
        return GridFunction(grid, amp * np.sin(arg) / (2 * np.pi * np.linalg.norm(k)))
    if kind == "cosine":
        return GridFunction(grid, amp * np.cos(arg) / (2 * np.pi * np.linalg.norm(k)))
    raise ValueError(f"unknown field kind {kind!r}")


def effective_kernel_from_config(cfg: dict, n: int) -> Kernel:
    u = field_from_config(cfg.get("field", {}), n)
    tau = cfg.get("tau", [0.0] * n)
    return effective_kernel(u, tau, float(cfg.get("p", 4.0)), float(cfg.get("s", 0.9))).kernel


__all__ = [
    "c_p", "t_average", "plap_form", "plap_density", "difference_quotient", "EffectiveKernel",
    "effective_kernel", "ftc_residuals", "PlapConfig", "PlapCertificate", "fd_gradient",
    "cone_certificate", "extend_effective_kernel", "hoelder_seminorm", "HoelderRow", "HoelderReport",
    "bootstrap_hoelder", "h_tau_constant", "field_from_config", "effective_kernel_from_config",
]
