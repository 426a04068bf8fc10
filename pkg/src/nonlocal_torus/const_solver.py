"""
Constant-coefficient solution operator on the torus.

The weak form ``B(u, phi) = int int mu(x-y) (u(x)-u(y)) (phi(x)-phi(y))``
diagonalizes as ``sum_k 2 m(k) u^(k) conj(phi^(k))``, so the equation
``B(u, phi) = g[phi]`` is solved by ``u^(k) = g^(k) / (2 m(k))`` with the
zero mode removed.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import SingularSymbol, NonzeroMeanWarning
from .symbolics import Symbol
from .torus_field import (
    GridFunction,
    RegularityOrders,
    SpectralField,
    bandlimited_field,
    dft,
    dual_norm_bound,
    frac_laplacian,
    gagliardo_seminorm,
    idft,
    lp_norm,
    trig_mode,
)

MEAN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class WeakForm:
    """``B(u, phi) = sum_k 2 m(k) u^(k) conj(phi^(k))`` for a symbol ``m``."""

    sym: Symbol

    def __call__(self, u: GridFunction, phi: GridFunction) -> float:
        U = dft(u).coeffs
        P = dft(phi).coeffs
        m = np.nan_to_num(self.sym.values, nan=0.0)
        return float(np.real(np.sum(2 * m * U * np.conj(P))))

    def energy(self, u: GridFunction) -> float:
        return self(u, u)


def _check_symbol(sym: Symbol, slack: float) -> np.ndarray:
    m = np.array(sym.values, dtype=float)
    nz = np.ones(m.shape, dtype=bool)
    nz.flat[0] = False
    bad = nz & ~(m > slack)
    if bad.any():
        k = tuple(int(c) for c in sym.grid.freqs()[bad][0])
        raise SingularSymbol(f"symbol vanishes or is undefined at k={k} (m={m[bad][0]:.3e})")
    return m


def solve_const(sym: Symbol, g: GridFunction, slack: float = 1e-12) -> GridFunction:
    """Solve ``B(u, phi) = int g phi`` for mean-zero ``u``."""
    if g.grid != sym.grid:
        raise ValueError("symbol and right side live on different grids")
    m = _check_symbol(sym, slack)
    mean = g.mean()
    if abs(mean) > MEAN_TOL * (1.0 + float(np.max(np.abs(g.values)))):
        warnings.warn(f"right side has mean {mean:.3e}; the k=0 mode is removed", NonzeroMeanWarning,
                      stacklevel=2)
    G = dft(g).coeffs
    U = np.zeros_like(G)
    nz = np.ones(m.shape, dtype=bool)
    nz.flat[0] = False
    U[nz] = G[nz] / (2 * m[nz])
    return idft(SpectralField(g.grid, U))


def apply_operator(sym: Symbol, u: GridFunction) -> GridFunction:
    """Density ``g`` with ``B(u, phi) = int g phi`` (the inverse of :func:`solve_const`)."""
    m = np.nan_to_num(sym.values, nan=0.0)
    return idft(SpectralField(u.grid, 2 * m * dft(u).coeffs))


def hs_seminorm_spectral(phi: GridFunction, s: float) -> float:
    """``(sum_k |k|^{2s} |phi^(k)|^2)^{1/2}``."""
    return float(np.sqrt(np.sum(phi.grid.kabs() ** (2 * s) * np.abs(dft(phi).coeffs) ** 2)))


def weak_residual(sym: Symbol, u: GridFunction, g: GridFunction,
                  probes: Sequence[GridFunction]) -> float:
    """``sup |B(u, phi) - g[phi]| / |phi|_{H^s}`` over nonconstant probes."""
    B = WeakForm(sym)
    worst = 0.0
    for phi in probes:
        nrm = hs_seminorm_spectral(phi, sym.s)
        if nrm == 0:
            continue
        gphi = float(g.grid.cell_volume * np.sum(g.values * phi.values))
        worst = max(worst, abs(B(u, phi) - gphi) / nrm)
    return worst


def mode_probes(grid, kmax: int) -> list[GridFunction]:
    """Cosine and sine modes with ``0 < |k|_inf <= kmax``."""
    out = []
    ks = grid.freqs().reshape(-1, grid.n)
    for k in ks:
        if not np.any(k) or np.max(np.abs(k)) > kmax:
            continue
        first = k[np.nonzero(k)[0][0]]
        if first < 0:
            continue
        out.append(trig_mode(grid, k, "cos"))
        out.append(trig_mode(grid, k, "sin"))
    return out


def differentiate_equation(u: GridFunction, g: GridFunction, sigma: float, s: float):
    """``(v, g') = ((-Delta)^{sigma/2} u, (-Delta)^{sigma/2} g)``.

    ``g'`` is the density of ``phi -> g[(-Delta)^{sigma/2} phi]``; the pair
    solves the same weak form whenever ``(u, g)`` does.
    """
    if not -2 * s < sigma < 2 - 2 * s:
        raise ValueError(f"sigma must lie in ({-2 * s:g}, {2 - 2 * s:g}), got {sigma}")
    return frac_laplacian(u, sigma), frac_laplacian(g, sigma)


def standard_rhs_family(grid, count: int = 20, seed: int = 0, kband: int = 4,
                        modes: Sequence[Sequence[int]] | None = None) -> list[GridFunction]:
    """Seeded bandlimited right sides followed by single modes.

    The family depends only on ``(count, seed, kband, modes)`` and the grid
    dimension, so the same functions are used at every resolution.
    """
    n = grid.n
    if modes is None:
        modes = [tuple([j] + [0] * (n - 1)) for j in (1, 2, 3)]
    band = min(kband, grid.N // 2 - 1)
    out = [trig_mode(grid, k, "cos") for k in modes][: count]
    for i in range(count - len(out)):
        out.append(bandlimited_field(grid, band, seed, stream=f"rhs-{i}", decay=0.0))
    return out


@dataclass(frozen=True)
class SolveReport:
    residual: float
    ladder: tuple[tuple[float, float, float], ...]
    constant: float
    constant_affine: float
    ratios: tuple[float, ...]
    lambdas: tuple[float, ...]
    l2_norms: tuple[float, ...]
    seminorms: tuple[float, ...]
    worst: int
    N: int
    kernel_bound: float | None = None
    orders: dict = field(default_factory=dict)


def _ratio(num: float, den: float) -> float:
    return 0.0 if num == 0 else num / den


def measure_estimate(sym: Symbol, orders: RegularityOrders, rhs_family: Sequence[GridFunction] | None = None,
                     probe_count: int = 16, seed: int = 0, kernel_bound: float | None = None) -> SolveReport:
    """Measure ``C`` in ``[u]_{W^{s1,p}} <= C Lambda + ||u||_{L^2}``.

    ``Lambda`` is the probe lower bound of the ``W^{-s2,p}`` dual norm of
    each right side.  ``constant`` is the largest ratio
    ``[u] / (Lambda + ||u||)``; ``constant_affine`` the largest
    ``([u] - ||u||)_+ / Lambda``.
    """
    grid = sym.grid
    if rhs_family is None:
        rhs_family = standard_rhs_family(grid, seed=seed)
    probes = mode_probes(grid, min(4, grid.N // 2 - 1))
    ratios, lams, l2s, sems, affine = [], [], [], [], []
    residual = 0.0
    sols = []
    for g in rhs_family:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NonzeroMeanWarning)
            u = solve_const(sym, g)
        g0 = g.zero_mean()
        residual = max(residual, weak_residual(sym, u, g0, probes))
        lam = dual_norm_bound(g0, orders.s2, orders.p, probe_count=probe_count, seed=seed)
        sem = gagliardo_seminorm(u, orders.s1, orders.p)
        l2 = lp_norm(u, 2)
        ratios.append(_ratio(sem, lam + l2))
        affine.append(0.0 if lam == 0 else max(0.0, sem - l2) / lam)
        lams.append(lam)
        l2s.append(l2)
        sems.append(sem)
        sols.append(u)
    worst = int(np.argmax(ratios)) if ratios else 0
    ladder = norm_ladder(sols[worst], orders) if sols else ()
    return SolveReport(float(residual), ladder, float(max(ratios, default=0.0)), float(max(affine, default=0.0)),
                       tuple(ratios), tuple(lams), tuple(l2s), tuple(sems), worst, grid.N, kernel_bound,
                       {"s": orders.s, "s1": orders.s1, "s2": orders.s2, "p": orders.p})


def norm_ladder(u: GridFunction, orders: RegularityOrders) -> tuple[tuple[float, float, float], ...]:
    """Seminorms of ``u`` at the orders between ``s2`` and ``s1``, for ``p = 2`` and ``p``."""
    out = []
    sig = sorted({orders.s2, orders.s, orders.s1})
    for p in sorted({2.0, float(orders.p)}):
        for o in sig:
            out.append((float(o), p, float(gagliardo_seminorm(u, o, p))))
    return tuple(out)


def h2s_constant(sym: Symbol, rhs_family: Sequence[GridFunction]) -> float:
    """Largest ``||u||_{H^{2s}} / ||g||_{L^2}`` with ``||u||_{H^{2s}}^2 = sum (1+|k|^2)^{2s} |u^(k)|^2``."""
    weight = (1.0 + sym.grid.kabs() ** 2) ** (2 * sym.s)
    best = 0.0
    for g in rhs_family:
        g0 = g.zero_mean()
        gn = lp_norm(g0, 2)
        if gn == 0:
            continue
        u = solve_const(sym, g0)
        un = float(np.sqrt(np.sum(weight * np.abs(dft(u).coeffs) ** 2)))
        best = max(best, un / gn)
    return best


def energy_coercivity(sym: Symbol, probes: Sequence[GridFunction]) -> float:
    """Largest ``[phi]^2_{W^{s,2}} / B(phi, phi)`` over probes (``kappa_measured``)."""
    B = WeakForm(sym)
    best = 0.0
    for phi in probes:
        e = B.energy(phi)
        if e <= 0:
            continue
        best = max(best, gagliardo_seminorm(phi, sym.s, 2) ** 2 / e)
    return best


def relative_drift(a: float, b: float) -> float:
    """``|a - b| / max(|a|, |b|)`` (0 when both vanish)."""
    d = max(abs(a), abs(b))
    return 0.0 if d == 0 else abs(a - b) / d


__all__ = [
    "WeakForm", "SolveReport", "solve_const", "apply_operator", "weak_residual", "mode_probes",
    "differentiate_equation", "standard_rhs_family", "measure_estimate", "norm_ladder",
    "h2s_constant", "energy_coercivity", "hs_seminorm_spectral", "relative_drift",
]
