"""
Freezing the coefficient: localization, perturbation forms and fixed point.

Setting.  The ambient problem lives on a :class:`TorusGrid` with the dense
pair form

    F_W(a, b) = h^{2n} sum_{x,y} W[x,y] (a_x - a_y)(b_x - b_y),
    W[x,y]    = K(x, |x-y|, (x-y)/|x-y|) / |x-y|^{n+2s}

and a discrete solution ``u`` with density ``g = A_K u`` (so that
``F_W(u, phi) = h^n sum g phi`` for every ``phi``).

Around a grid point ``x0`` the period cell ``T`` of side ``L = 30 R`` carries
the frozen periodized kernel ``mu`` (period ``L``).  With the cutoff ``eta``
(``1`` on ``B(x0, 5R)``, ``0`` off ``B(x0, 6R)``), the outer cutoff
``eta~`` (``1`` on ``T``, ``0`` off the doubled cell), a cell test function
``psi`` and its ambient lift ``psi~ = eta~ (psi_per - mean psi)``, the cell
form of ``w = eta u`` splits exactly as

    B_mu(w, psi) = g[eta psi~] + H(w, psi~) + G_1 + ... + G_5

with ``E = K0 - W`` (``K0`` the frozen kernel over ``|x-y|^{n+2s}``),
``B3 = B(x0, 10R)``, ``B5 = B(x0, 6R)`` and

    H   = F_{E [B3 x B3]}(w, psi~)
    G_1 = cell pair sum of (mu - K0)(w_x - w_y)(psi_x - psi_y)
    G_2 = -F_{W [x in B3, y not in T]}(w, psi~)
    G_3 = -F_{W [x not in T, y in B3]}(w, psi~)
    G_4 = F_{E [B5 x (T \\ B3)]}(w, psi~) + F_{E [(T \\ B3) x B5]}(w, psi~)
    G_5 = h^{2n} sum W[x,y] (eta_x - eta_y)(u_y psi~_x - u_x psi~_y).

The fixed point replaces ``w`` in ``H`` by the previous iterate and solves
the cell problem with the discrete symbol of ``mu``; its limit is
``w - mean_T(w)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._rng import make_rng, max_workers
from .errors import BallTooLarge, LadderStalled, MaxIter, NoContraction
from .kernels import Kernel, form_coefficients, form_value, operator_matrix, pair_geometry, pair_weights
from .symbolics import PeriodizedKernel, lattice_symbol, periodize
from .torus_field import (
    GridFunction,
    RegularityOrders,
    TorusGrid,
    conjugate,
    frac_laplacian,
    gagliardo_seminorm,
    lp_norm,
    wrap,
)

BALL_FACTOR = 60.0
CELL_FACTOR = 30.0


# ---------------------------------------------------------------------------
# Cutoffs and localization
# ---------------------------------------------------------------------------


def _bump_exp(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t) -> np.ndarray:
    """C-infinity step: ``1`` for ``t <= 0``, ``0`` for ``t >= 1``."""
    a = _bump_exp(1.0 - np.asarray(t, dtype=float))
    b = _bump_exp(np.asarray(t, dtype=float))
    return a / (a + b)


@dataclass(frozen=True, eq=False)
class LocalizationSpec:
    grid: TorusGrid
    x0: tuple[float, ...]
    R: float
    L: float
    cell: TorusGrid
    eta: GridFunction
    eta_tilde: GridFunction
    cell_index: np.ndarray      # periodic cell index of every ambient point (flat)
    cell_points: np.ndarray     # ambient flat index of every cell point, in cell order
    in_cell: np.ndarray
    ball3: np.ndarray
    ball5: np.ndarray
    plateau: np.ndarray
    offsets: np.ndarray         # wrapped ambient displacement x - x0, shape (size, n)

    @property
    def M(self) -> int:
        return self.cell.N

    def lift(self, psi: np.ndarray) -> np.ndarray:
        """``psi~ = eta~ (psi_per - mean psi)`` on the ambient grid."""
        psi = np.asarray(psi, dtype=float).reshape(-1)
        return self.eta_tilde.flat * (psi[self.cell_index] - psi.mean())

    def lift_adjoint(self, c: np.ndarray) -> np.ndarray:
        """Transpose of :meth:`lift`."""
        wc = self.eta_tilde.flat * np.asarray(c, dtype=float).reshape(-1)
        out = np.bincount(self.cell_index, weights=wc, minlength=self.cell.size)
        return out - wc.sum() / self.cell.size

    def restrict(self, a: np.ndarray) -> np.ndarray:
        return np.asarray(a, dtype=float).reshape(-1)[self.cell_points]

    def embed(self, v: np.ndarray) -> np.ndarray:
        """Ambient vector equal to ``v`` on the cell and zero elsewhere."""
        out = np.zeros(self.grid.size)
        out[self.cell_points] = np.asarray(v, dtype=float).reshape(-1)
        return out


def max_radius(n: int) -> float:
    return 0.5 / (BALL_FACTOR * math.sqrt(n))


def build_localization(grid: TorusGrid, x0: Sequence[float], R: float) -> LocalizationSpec:
    """Cutoffs and period cell around the grid point ``x0``.

    ``B(x0, 60 sqrt(n) R)`` must fit in the unit torus and the cell side
    ``30 R`` must span a power-of-two number (at least 4) of grid steps.
    """
    n = grid.n
    if R <= 0:
        raise ValueError("R must be positive")
    if BALL_FACTOR * math.sqrt(n) * R > 0.5 + 1e-12:
        raise BallTooLarge(f"B(x0, {BALL_FACTOR}*sqrt(n)*R) = radius {BALL_FACTOR * math.sqrt(n) * R:.4g} "
                           f"does not fit in the torus")
    L = CELL_FACTOR * R
    Mf = L * grid.N
    M = int(round(Mf))
    if abs(Mf - M) > 1e-9 or M < 4 or M & (M - 1):
        raise ValueError(f"cell side 30R = {L:.6g} must span a power-of-two number >= 4 of grid steps "
                         f"(got {Mf:.6g})")
    x0 = np.asarray(x0, dtype=float).reshape(n)
    grid.index_of(x0)
    d = wrap(grid.flat_points() - x0)
    steps = np.round(d * grid.N).astype(int)
    in_cell = np.all((steps >= -M // 2) & (steps < M // 2), axis=1)
    cidx = (steps + M // 2) % M
    cell_index = np.ravel_multi_index(tuple(cidx.T), (M,) * n)
    cell_points = np.empty(M**n, dtype=int)
    cell_points[cell_index[in_cell]] = np.nonzero(in_cell)[0]
    dist = np.sqrt(np.sum(d * d, axis=1))
    eta = smooth_step((dist - 5 * R) / R)
    eta_t = np.prod(smooth_step((np.abs(d) - L / 2) / (L / 2)), axis=1)
    tol = 1e-12
    plateau = dist <= 5 * R + tol
    ball5 = dist < 6 * R - tol
    ball3 = dist <= 10 * R + tol
    # support and plateau containments on the grid
    assert np.all(eta[plateau] == 1.0) and np.all(eta[~ball5] == 0.0)
    assert np.all(eta_t[in_cell] == 1.0) and np.all(ball3 <= in_cell)
    return LocalizationSpec(grid, tuple(x0.tolist()), float(R), float(L), TorusGrid(n, M),
                            GridFunction(grid, eta), GridFunction(grid, eta_t), cell_index, cell_points,
                            in_cell, ball3, ball5, plateau, d)


def admissible_R(grid: TorusGrid, M: int | None = None) -> float:
    """Largest admissible ``R`` whose cell spans ``M`` grid steps (default: the largest power of two)."""
    rmax = max_radius(grid.n)
    if M is None:
        M = 2 ** int(math.floor(math.log2(CELL_FACTOR * rmax * grid.N)))
    return M / (CELL_FACTOR * grid.N)


# ---------------------------------------------------------------------------
# Forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FrozenForms:
    """Pair weights of ``H`` and ``G_1..G_5`` for one localization."""

    loc: LocalizationSpec
    kernel: Kernel
    s: float
    mu: PeriodizedKernel
    W: np.ndarray          # ambient kernel weights
    K0: np.ndarray         # frozen ambient weights
    E: np.ndarray          # deviation K0 - W
    WH: np.ndarray
    WG1: np.ndarray        # cell pairs
    WG2: np.ndarray
    WG3: np.ndarray
    WG4: np.ndarray
    Wmu: np.ndarray        # cell pairs
    cell_symbol: np.ndarray
    vol: float

    # ambient operator and equation
    def operator(self) -> np.ndarray:
        return operator_matrix(self.W, self.vol)

    def density(self, u: GridFunction) -> GridFunction:
        """``g = A_K u``."""
        return GridFunction(self.loc.grid, self.operator() @ u.flat)

    # individual forms
    def B_mu(self, v: np.ndarray, psi: np.ndarray) -> float:
        return form_value(self.Wmu, np.ravel(v), np.ravel(psi), self.vol)

    def H(self, a: np.ndarray, b: np.ndarray) -> float:
        return form_value(self.WH, np.ravel(a), np.ravel(b), self.vol)

    def G_terms(self, u: GridFunction, psi: np.ndarray) -> dict[str, float]:
        loc = self.loc
        w = loc.eta.flat * u.flat
        pt = loc.lift(psi)
        eta = loc.eta.flat
        v2 = self.vol**2
        g5 = v2 * float(np.sum(self.W * (eta[:, None] - eta[None, :])
                               * (u.flat[None, :] * pt[:, None] - u.flat[:, None] * pt[None, :])))
        return {
            "G1": form_value(self.WG1, loc.restrict(w), np.ravel(psi), self.vol),
            "G2": -form_value(self.WG2, w, pt, self.vol),
            "G3": -form_value(self.WG3, w, pt, self.vol),
            "G4": form_value(self.WG4, w, pt, self.vol),
            "G5": g5,
        }

    def G(self, u: GridFunction, psi: np.ndarray) -> float:
        return float(sum(self.G_terms(u, psi).values()))

    def g_term(self, g: GridFunction, psi: np.ndarray) -> float:
        return self.vol * float(np.sum(g.flat * self.loc.eta.flat * self.loc.lift(psi)))

    def decomposition_residual(self, u: GridFunction, g: GridFunction, psi: np.ndarray) -> float:
        """``B_mu(eta u, psi) - [g[eta psi~] + H(eta u, psi~) + G(u, psi)]``."""
        loc = self.loc
        w = loc.eta.flat * u.flat
        lhs = self.B_mu(loc.restrict(w), psi)
        rhs = self.g_term(g, psi) + self.H(w, loc.lift(psi)) + self.G(u, psi)
        return float(lhs - rhs)

    # coefficient vectors on the cell (linear functionals of psi)
    def data_coefficients(self, u: GridFunction, g: GridFunction) -> np.ndarray:
        """Cell vector ``c`` with ``g[eta psi~] + G(u, psi) = c . psi``."""
        loc = self.loc
        w = loc.eta.flat * u.flat
        eta = loc.eta.flat
        amb = self.vol * g.flat * eta
        amb = amb - form_coefficients(self.WG2, w, self.vol)
        amb = amb - form_coefficients(self.WG3, w, self.vol)
        amb = amb + form_coefficients(self.WG4, w, self.vol)
        amb = amb + self.vol**2 * (((self.W + self.W.T) * (eta[:, None] - eta[None, :])) @ u.flat)
        cell = loc.lift_adjoint(amb)
        return cell + form_coefficients(self.WG1, loc.restrict(w), self.vol)

    def H_coefficients(self, v: np.ndarray) -> np.ndarray:
        """Cell vector ``c`` with ``H(embed v, psi~) = c . psi``."""
        return self.loc.lift_adjoint(form_coefficients(self.WH, self.loc.embed(v), self.vol))

    def solve_cell(self, rho: np.ndarray) -> np.ndarray:
        """Mean-zero ``v`` with ``B_mu(v, psi) = rho . psi`` for all cell ``psi``."""
        shape = self.loc.cell.shape
        R = np.fft.fftn(np.asarray(rho, dtype=float).reshape(shape))
        V = np.zeros_like(R)
        nz = np.ones(shape, dtype=bool)
        nz.flat[0] = False
        V[nz] = R[nz] / (self.vol * 2 * self.cell_symbol[nz])
        return np.fft.ifftn(V).real.reshape(-1)

    def increment_matrix(self) -> np.ndarray:
        """Matrix of the increment map ``w -> T H w`` on the cell."""
        M = self.loc.cell.size
        cols = [self.solve_cell(self.H_coefficients(e)) for e in np.eye(M)]
        return np.array(cols).T

    def deviation_oscillation(self) -> float:
        """``max |E| |x-y|^{n+2s}`` over ``B3 x B3`` pairs."""
        _, _, dist, _ = pair_geometry(self.loc.grid)
        mask = np.outer(self.loc.ball3, self.loc.ball3) & (dist > 0)
        if not mask.any():
            return 0.0
        return float(np.max(np.abs(self.E[mask]) * dist[mask] ** (self.loc.grid.n + 2 * self.s)))


def assemble_forms(K: Kernel, loc: LocalizationSpec, s: float | None = None,
                   lattice_M: int | None = None) -> FrozenForms:
    s = K.s if s is None else float(s)
    grid = loc.grid
    n = grid.n
    X, D, dist, H = pair_geometry(grid)
    W = pair_weights(K, grid, s)
    frozen = K.eval(np.asarray(loc.x0), 0.0, np.where(dist[..., None] > 0, H, np.eye(n)[0]))
    K0 = np.zeros_like(W)
    nz = dist > 0
    K0[nz] = frozen[nz] / dist[nz] ** (n + 2 * s)
    E = K0 - W
    B3, B5, T = loc.ball3, loc.ball5, loc.in_cell
    far = T & ~B3
    WH = E * np.outer(B3, B3)
    WG2 = W * np.outer(B3, ~T)
    WG3 = W * np.outer(~T, B3)
    WG4 = E * (np.outer(B5, far) + np.outer(far, B5))
    # cell: frozen periodized kernel sampled at the cell offsets
    mu = periodize(K, loc.x0, s, M=lattice_M, period=loc.L)
    Mc = loc.cell.N
    j = np.stack(np.meshgrid(*([np.arange(Mc)] * n), indexing="ij"), axis=-1).reshape(-1, n)
    z = (j - Mc * (j >= Mc // 2)) * grid.h
    wmu = np.zeros(len(j))
    nzc = np.any(j != 0, axis=1)
    wmu[nzc] = mu(z[nzc])
    cell_of = np.stack(np.unravel_index(np.arange(Mc**n), (Mc,) * n), axis=-1)
    diff = (cell_of[:, None, :] - cell_of[None, :, :]) % Mc
    Wmu = wmu[np.ravel_multi_index(tuple(np.moveaxis(diff, -1, 0)), (Mc,) * n)]
    cp = loc.cell_points
    WG1 = Wmu - K0[np.ix_(cp, cp)]
    sym = lattice_symbol(loc.cell, wmu.reshape(loc.cell.shape), grid.cell_volume, s)
    return FrozenForms(loc, K, s, mu, W, K0, E, WH, WG1, WG2, WG3, WG4, Wmu, np.array(sym.values),
                       grid.cell_volume)


# ---------------------------------------------------------------------------
# Fixed point
# ---------------------------------------------------------------------------


def default_orders(s: float, p: float = 2.0) -> RegularityOrders:
    lo = max(0.0, 2 * s - 1)
    hi = 2 * s - s
    return RegularityOrders(s, s, s, p, conjugate(p), t=s, t_tilde=lo + 0.5 * (hi - lo))


@dataclass(frozen=True)
class IterationTrace:
    seminorms: tuple[float, ...]
    increments: tuple[float, ...]
    rates: tuple[float, ...]
    residual: float
    converged: bool
    asymptotic_rate: float
    plateau_offset: float
    plateau_error: float
    order: float
    exponent: float


def _cell_seminorm(loc: LocalizationSpec, v: np.ndarray, order: float, exponent: float) -> float:
    return gagliardo_seminorm(GridFunction(loc.cell, v), order, exponent)


def spectral_radius(forms: FrozenForms, iters: int = 80, window: int = 20, seed: int = 0) -> float:
    """Spectral radius of the increment map (dense eigenvalues, power iteration beyond 1024 cell points)."""
    if forms.loc.cell.size <= 1024:
        ev = np.linalg.eigvals(forms.increment_matrix())
        return float(np.max(np.abs(ev)))
    rng = make_rng(seed, "power-iteration")
    w = rng.standard_normal(forms.loc.cell.size)
    w -= w.mean()
    logs = []
    for _ in range(iters):
        nw = forms.solve_cell(forms.H_coefficients(w))
        a, b = np.linalg.norm(nw), np.linalg.norm(w)
        if a == 0:
            return 0.0
        logs.append(math.log(a / b))
        w = nw / a
    return float(math.exp(np.mean(logs[-window:])))


def fixed_point_solve(forms: FrozenForms, u: GridFunction, g: GridFunction | None = None,
                      orders: RegularityOrders | None = None, tol: float = 1e-8, max_iter: int = 200,
                      rho_max: float = 0.95) -> tuple[np.ndarray, IterationTrace]:
    """Iterate ``B_mu(v_{k+1}, psi) = g[eta psi~] + H(v_k, psi~) + G(u, psi)`` from ``v_0 = 0``.

    Increments are measured in ``W^{2s - t~, q'}`` on the cell.  Returns the
    mean-zero cell iterate and the trace.
    """
    loc = forms.loc
    s = forms.s
    if g is None:
        g = forms.density(u)
    if orders is None:
        orders = default_orders(s)
    tt = orders.t_tilde
    if tt is None:
        lo, hi = orders.tilde_window()
        tt = lo + 0.5 * (hi - lo)
    order = 2 * s - tt
    expo = orders.q_conj
    base = forms.data_coefficients(u, g)
    v = np.zeros(loc.cell.size)
    sems, incs, rates = [], [], []
    converged = False
    high = 0
    for _ in range(max_iter):
        nv = forms.solve_cell(base + forms.H_coefficients(v))
        w = nv - v
        v = nv
        wn = _cell_seminorm(loc, w, order, expo) if np.any(w) else 0.0
        vn = _cell_seminorm(loc, v, order, expo) if np.any(v) else 0.0
        sems.append(vn)
        if incs:
            rates.append(wn / incs[-1] if incs[-1] > 0 else 0.0)
        incs.append(wn)
        if wn == 0.0:
            converged = True
            break
        high = high + 1 if rates and rates[-1] >= 1.0 else 0
        if high >= 3:
            raise NoContraction(f"increment rates {rates[-3:]} are not below 1; shrink R")
        if wn < tol * (1.0 + vn) and len(rates) >= 3 and all(r <= rho_max for r in rates[-3:]):
            converged = True
            break
    if not converged:
        raise MaxIter(f"no convergence after {max_iter} iterations (last increment {incs[-1]:.3e})")
    w_amb = loc.eta.flat * u.flat
    target = loc.restrict(w_amb)
    offset = float(target.mean())
    pl = loc.plateau[loc.cell_points]
    plateau_error = float(np.max(np.abs(v[pl] + offset - u.flat[loc.cell_points][pl]))) if pl.any() else 0.0
    psi_probe = np.eye(loc.cell.size)
    resid = float(np.max(np.abs(np.array([
        forms.B_mu(v, e) - (base + forms.H_coefficients(v)) @ e for e in psi_probe]))))
    trace = IterationTrace(tuple(sems), tuple(incs), tuple(rates), resid, converged,
                           spectral_radius(forms), offset, plateau_error, float(order), float(expo))
    return v, trace


# ---------------------------------------------------------------------------
# Form estimates
# ---------------------------------------------------------------------------


def form_bound_constants(forms: FrozenForms, u: GridFunction, probes: Sequence[np.ndarray],
                         orders: RegularityOrders) -> dict[str, float]:
    """Largest ``|G_i(u, psi)| / (U * Psi)`` over cell probes.

    ``U = ||u||_{L^2} + [u]_{W^{s,2}} + [u]_{W^{t,p}}`` and
    ``Psi = ||psi~||_{L^q} + [psi~]_{W^{t~,q}}`` (ambient lift).
    """
    s = forms.s
    t = orders.s1 if orders.t is None else orders.t
    tt = orders.t_tilde
    if tt is None:
        lo, hi = orders.tilde_window()
        tt = lo + 0.5 * (hi - lo)
    U = lp_norm(u, 2) + gagliardo_seminorm(u, s, 2) + gagliardo_seminorm(u, t, orders.p)
    out = {f"G{i}": 0.0 for i in range(1, 6)}
    for psi in probes:
        pt = GridFunction(forms.loc.grid, forms.loc.lift(psi))
        Psi = lp_norm(pt, orders.q) + gagliardo_seminorm(pt, tt, orders.q)
        if Psi == 0 or U == 0:
            continue
        for key, val in forms.G_terms(u, psi).items():
            out[key] = max(out[key], abs(val) / (U * Psi))
    return out


# ---------------------------------------------------------------------------
# Bootstrap ladder
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LadderRow:
    rung: int
    t: float
    t_tilde: float
    p: float
    q: float
    center: tuple[float, ...]
    seminorm: float
    direct_seminorm: float
    iterations: int
    rate: float
    plateau_error: float
    differentiated: bool = False


@dataclass(frozen=True)
class LadderReport:
    rows: tuple[LadderRow, ...]
    orders: tuple[float, ...]
    R: float
    stalled: bool = False


def ladder_orders(s: float, t0: float, target: float, max_rungs: int = 8) -> list[tuple[float, float]]:
    """Sequence ``(t_i, t~_i)`` with ``t~ = lo + (hi - lo)/2`` and ``t_{i+1} = 2s - t~``.

    Stops once ``t_i >= target`` or after ``max_rungs`` rungs.
    """
    out = []
    t = t0
    for _ in range(max_rungs):
        lo, hi = max(0.0, 2 * s - 1), 2 * s - t
        if hi <= lo:
            raise LadderStalled(f"no admissible t~ in ({lo:g}, {hi:g}) at t={t:g}")
        tt = lo + 0.5 * (hi - lo)
        out.append((t, tt))
        if t >= target - 1e-12:
            break
        t = 2 * s - tt
    return out


def cover_centers(grid: TorusGrid, center: Sequence[float], radius: float, R: float) -> list[tuple[float, ...]]:
    """Grid points spaced ``floor(5 R N)`` steps covering ``B(center, radius)``."""
    n = grid.n
    c = np.asarray(center, dtype=float).reshape(n)
    grid.index_of(c)
    step = max(1, int(math.floor(5 * R * grid.N)))
    reach = int(math.ceil(radius * grid.N / step))
    offs = np.arange(-reach, reach + 1) * step
    pts = []
    for idx in np.ndindex(*([len(offs)] * n)):
        d = np.array([offs[i] for i in idx]) * grid.h
        if np.linalg.norm(d) <= radius + 1e-12:
            pts.append(tuple(float(v) for v in wrap(c + d)))
    return sorted(set(pts))


def bootstrap_regularity(K: Kernel, u: GridFunction, g: GridFunction | None = None,
                         target: float | None = None, centers: Sequence[Sequence[float]] | None = None,
                         R: float | None = None, p: float = 2.0, max_rungs: int = 6,
                         tol: float = 1e-10, max_iter: int = 200) -> LadderReport:
    """Run the fixed point on every cover ball at every rung of the order ladder.

    Rungs ``t < 1`` measure ``[v]_{W^{t,p}}`` of the cell iterate.  A
    ``target`` at or above ``1`` adds a differentiated rung: ``u`` is
    replaced by ``(-Delta)^{sigma/2} u`` with ``sigma = target - s``, its
    density is recomputed, and ``[v]_{W^{s,p}}`` is recorded as order
    ``target``.
    """
    grid = u.grid
    s = K.s
    R = admissible_R(grid) if R is None else R
    if centers is None:
        centers = [tuple(0.0 for _ in range(grid.n))]
    target = s if target is None else float(target)
    plain_target = min(target, 1.0 - 1e-9)
    rungs = ladder_orders(s, s, plain_target, max_rungs)
    q = conjugate(p)
    rows: list[LadderRow] = []

    def one_ball(c):
        loc = build_localization(grid, c, R)
        forms = assemble_forms(K, loc, s)
        gg = forms.density(u) if g is None else g
        out = []
        for i, (t, tt) in enumerate(rungs):
            orders = RegularityOrders(s, s, s, p, q, t=t, t_tilde=tt) if tt > 0 else None
            v, tr = fixed_point_solve(forms, u, gg, orders, tol=tol, max_iter=max_iter)
            cellf = GridFunction(loc.cell, v)
            direct = GridFunction(loc.cell, loc.restrict(loc.eta.flat * u.flat))
            out.append(LadderRow(i, float(t), float(tt), p, q, tuple(c), gagliardo_seminorm(cellf, t, p),
                                 gagliardo_seminorm(direct, t, p), len(tr.increments), tr.asymptotic_rate,
                                 tr.plateau_error))
        if target >= 1.0:
            sigma = target - s
            ud = frac_laplacian(u, sigma)
            gd = forms.density(ud)
            v, tr = fixed_point_solve(forms, ud, gd, None, tol=tol, max_iter=max_iter)
            direct = GridFunction(loc.cell, loc.restrict(loc.eta.flat * ud.flat))
            out.append(LadderRow(len(rungs), float(target), float("nan"), p, q, tuple(c),
                                 gagliardo_seminorm(GridFunction(loc.cell, v), s, p),
                                 gagliardo_seminorm(direct, s, p), len(tr.increments), tr.asymptotic_rate,
                                 tr.plateau_error, True))
        return out

    workers = max_workers()
    if workers > 1 and len(centers) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(one_ball, centers))
    else:
        results = [one_ball(c) for c in centers]
    for res in results:
        rows.extend(res)
    rows.sort(key=lambda r: (r.rung, r.center))
    return LadderReport(tuple(rows), tuple(t for t, _ in rungs), float(R))


__all__ = [
    "LocalizationSpec", "FrozenForms", "IterationTrace", "LadderRow", "LadderReport", "smooth_step",
    "build_localization", "assemble_forms", "fixed_point_solve", "spectral_radius", "default_orders",
    "form_bound_constants", "ladder_orders", "cover_centers", "bootstrap_regularity", "admissible_R",
    "max_radius",
]
