"""
Discrete checks of the energy, Caccioppoli, local boundedness, logarithmic
and Poincare inequalities.

Every report evaluates both sides on the grid (wrapped balls, dense pair
sums with the wrapped distance) and records the implied constant
``lhs / rhs_core``.  An inequality passes when the implied constant is
finite; refinement sweeps additionally require a drift below 25% between
``N`` and ``2N``.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .const_solver import solve_const
from .errors import BadTruncation, NotSubsolution
from .frozen_solver import smooth_step
from .kernels import Kernel, constant_kernel, form_value, operator_matrix, pair_geometry, pair_weights
from .symbolics import compute_symbol, periodize
from .torus_field import GridFunction, TorusGrid, bandlimited_field, dft, trig_mode, wrap

DRIFT_LIMIT = 0.25
CUTOFF_SUPPORT = 0.75   # default Caccioppoli cutoff lives in B(3R/4)


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: float
    rhs_terms: dict
    rhs: float
    implied: float
    passed: bool
    digest: str
    extra: dict = field(default_factory=dict)


def _digest(*arrays, **params) -> str:
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(np.asarray(a, dtype="<f8")).tobytes())
    for k in sorted(params):
        h.update(f"{k}={params[k]!r};".encode())
    return h.hexdigest()[:16]


def _report(name, lhs, terms, digest, extra=None) -> InequalityReport:
    rhs = float(sum(terms.values()))
    if lhs < 0 or rhs < 0:
        raise ValueError("inequality sides must be nonnegative")
    if lhs == 0:
        implied = 0.0
    elif rhs == 0:
        implied = math.inf
    else:
        implied = lhs / rhs
    return InequalityReport(name, float(lhs), {k: float(v) for k, v in terms.items()}, rhs, float(implied),
                            bool(math.isfinite(implied)), digest, extra or {})


def relative_drift(a: float, b: float) -> float:
    d = max(abs(a), abs(b))
    return 0.0 if d == 0 else abs(a - b) / d


def refinement_check(reports: Sequence[InequalityReport], limit: float = DRIFT_LIMIT) -> tuple[float, bool]:
    """Largest drift of the implied constant between consecutive refinements."""
    drift = 0.0
    for a, b in zip(reports[:-1], reports[1:]):
        drift = max(drift, relative_drift(a.implied, b.implied))
    ok = all(r.passed for r in reports) and drift < limit
    return drift, ok


# ---------------------------------------------------------------------------
# Geometry helpers
# ---------------------------------------------------------------------------


def ball_mask(grid: TorusGrid, center: Sequence[float], radius: float) -> np.ndarray:
    d = wrap(grid.flat_points() - np.asarray(center, dtype=float).reshape(grid.n))
    return np.sqrt(np.sum(d * d, axis=1)) < radius + 1e-12


def _distances_to(grid: TorusGrid, center) -> np.ndarray:
    d = wrap(grid.flat_points() - np.asarray(center, dtype=float).reshape(grid.n))
    return np.sqrt(np.sum(d * d, axis=1))


def _unit_weights(grid: TorusGrid, s: float) -> np.ndarray:
    _, _, dist, _ = pair_geometry(grid)
    W = np.zeros_like(dist)
    nz = dist > 0
    W[nz] = dist[nz] ** (-(grid.n + 2 * s))
    return W


def cutoff(grid: TorusGrid, center: Sequence[float], R: float) -> GridFunction:
    """Smooth cutoff: ``1`` on ``B(center, R/2)``, ``0`` off ``B(center, R)``."""
    d = _distances_to(grid, center)
    return GridFunction(grid, smooth_step((d - R / 2) / (R / 2)))


def cutoff_grad_bound(R: float) -> float:
    """``sup |grad|`` of :func:`cutoff` (profile slope sampled on a fine, grid-independent mesh)."""
    t = np.linspace(0.0, 1.0, 200_001)
    S = smooth_step(t)
    slope = float(np.max(np.abs(np.diff(S)))) / (t[1] - t[0])
    return slope * 2.0 / R


def grad_sup(phi: GridFunction) -> float:
    """Largest one-step difference quotient of ``phi``."""
    g = phi.grid
    best = 0.0
    for ax in range(g.n):
        best = max(best, float(np.max(np.abs(np.roll(phi.values, -1, axis=ax) - phi.values))) * g.N)
    return best


def bump_probes(grid: TorusGrid, count: int = 8, width: float = 0.25) -> list[GridFunction]:
    """Nonnegative smooth bumps centred on a coarse lattice of grid points."""
    n = grid.n
    per = max(1, round(count ** (1.0 / n)))
    step = max(1, grid.N // per)
    out = []
    for idx in np.ndindex(*([per] * n)):
        c = grid.axis()[np.array(idx) * step]
        d = _distances_to(grid, c)
        out.append(GridFunction(grid, smooth_step(d / width)))
    return out[:count]


def check_subsolution(v: GridFunction, f: GridFunction, W: np.ndarray, probes: Sequence[GridFunction],
                      tol: float = 1e-9) -> float:
    """Largest ``F_K(v, phi) - int f phi`` over nonnegative probes; raises if above ``tol``."""
    vol = v.grid.cell_volume
    worst = -math.inf
    scale = 1.0 + float(np.max(np.abs(f.values)))
    for phi in probes:
        if np.any(phi.values < 0):
            raise ValueError("subsolution probes must be nonnegative")
        gap = form_value(W, v.flat, phi.flat, vol) - vol * float(np.sum(f.flat * phi.flat))
        worst = max(worst, gap)
    if worst > tol * scale:
        raise NotSubsolution(f"weak subsolution gap {worst:.3e} exceeds {tol * scale:.3e}")
    return worst


def density_of(K: Kernel, v: GridFunction) -> GridFunction:
    """Dense discrete ``A_K v`` with symmetrized weights."""
    W = pair_weights(K, v.grid)
    Ws = 0.5 * (W + W.T)
    return GridFunction(v.grid, operator_matrix(Ws, v.grid.cell_volume) @ v.flat)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def verify_coercivity_form(K: Kernel, s: float, probes: Sequence[GridFunction], grid: TorusGrid,
                           x0: Sequence[float] | None = None) -> InequalityReport:
    """``[phi]^2_{H^s} <= kappa [phi]^2_{H^s_K}`` measured in symbol space.

    ``kappa_measured`` is the largest ratio ``sum 2 m_1 |phi^|^2 / sum 2 m_K |phi^|^2``
    over the probes (``m_1`` the symbol of ``K = 1``).
    """
    x0 = np.zeros(grid.n) if x0 is None else np.asarray(x0, dtype=float)
    one = compute_symbol(periodize(constant_kernel(1.0, s, grid.n), x0), grid).values
    mk = compute_symbol(periodize(K, x0, s), grid).values
    best = 0.0
    for phi in probes:
        P = np.abs(dft(phi).coeffs) ** 2
        num = float(np.sum(2 * one * P))
        den = float(np.sum(2 * mk * P))
        if num == 0:
            continue
        best = max(best, math.inf if den == 0 else num / den)
    digest = _digest(*[p.flat for p in probes], s=s, N=grid.N, kernel=K.name)
    rep = _report("coercivity", best, {"unit": 1.0}, digest, {"kernel_bound": K.Lam})
    return rep


def verify_caccioppoli(v: GridFunction, f: GridFunction, R: float, center: Sequence[float] | None = None,
                       phi_cut: GridFunction | None = None, K: Kernel | None = None, s: float = 0.5,
                       grad_bound: float | None = None, probes: Sequence[GridFunction] | None = None,
                       tol: float = 1e-9) -> InequalityReport:
    """``1/2 [phi v]^2 <= c (|grad phi|_inf^2 R^{2-2s} |v|^2_{L^2(B_R)} + |phi|_inf (tail + |f|_inf) |v phi|_{L^1})``.

    ``tail = sup_{x in supp phi} int_{y not in B_R} v(y) |x-y|^{-n-2s} dy``.
    The default cutoff is supported in ``B(3R/4)``; a support reaching the
    sphere ``|x| = R`` makes the tail infinite.
    """
    grid = v.grid
    n = grid.n
    center = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    K = constant_kernel(1.0, s, n) if K is None else K
    s = K.s
    B = ball_mask(grid, center, R)
    if np.any(v.flat[B] < -1e-14):
        raise NotSubsolution("v must be nonnegative on B(R)")
    W = pair_weights(K, grid)
    Ws = 0.5 * (W + W.T)
    check_subsolution(v, f, Ws, bump_probes(grid) if probes is None else probes, tol)
    phi = cutoff(grid, center, CUTOFF_SUPPORT * R) if phi_cut is None else phi_cut
    if grad_bound is None:
        grad_bound = cutoff_grad_bound(CUTOFF_SUPPORT * R) if phi_cut is None else grad_sup(phi)
    vol = grid.cell_volume
    U = _unit_weights(grid, s)
    pv = phi.flat * v.flat
    lhs = 0.5 * form_value(U, pv, pv, vol)
    gb = grad_bound
    l2 = vol * float(np.sum(v.flat[B] ** 2))
    supp = phi.flat > 0
    tail = float(np.max(vol * (U[supp][:, ~B] @ np.abs(v.flat[~B])))) if supp.any() and (~B).any() else 0.0
    fsup = float(np.max(np.abs(f.values)))
    terms = {
        "energy": gb**2 * R ** (2 - 2 * s) * l2,
        "tail_source": float(np.max(np.abs(phi.values))) * (tail + fsup) * vol * float(np.sum(np.abs(pv))),
    }
    digest = _digest(v.flat, f.flat, phi.flat, R=R, s=s)
    return _report("caccioppoli", lhs, terms, digest, {"tail": tail, "grad_bound": gb})


def verify_linfty_bound(u: GridFunction, f: GridFunction, r: float, center: Sequence[float] | None = None,
                        s: float = 0.5) -> InequalityReport:
    """``sup_{B_r} |u| <= C (r^{-n/2} |u|_{L^2(B_2r)} + r^{2s} tail + r^{2s} |f|_{L^inf(B_2r)})``.

    ``tail = int_{|y - c| >= r/2} |u(y)| |y - c|^{-n-2s} dy``.
    """
    grid = u.grid
    n = grid.n
    center = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    vol = grid.cell_volume
    Br = ball_mask(grid, center, r)
    B2 = ball_mask(grid, center, 2 * r)
    d = _distances_to(grid, center)
    far = d >= r / 2 - 1e-12
    lhs = float(np.max(np.abs(u.flat[Br]))) if Br.any() else 0.0
    terms = {
        "l2": r ** (-n / 2) * math.sqrt(vol * float(np.sum(u.flat[B2] ** 2))),
        "tail": r ** (2 * s) * vol * float(np.sum(np.abs(u.flat[far]) * d[far] ** (-(n + 2 * s)))),
        "source": r ** (2 * s) * float(np.max(np.abs(f.flat[B2]))) if B2.any() else 0.0,
    }
    digest = _digest(u.flat, f.flat, r=r, s=s)
    return _report("linfty", lhs, terms, digest)


def verify_log_lemma(u: GridFunction, f: GridFunction, r: float, R: float, d: float,
                     center: Sequence[float] | None = None, K: Kernel | None = None, s: float = 0.5,
                     probes: Sequence[GridFunction] | None = None, tol: float = 1e-9) -> InequalityReport:
    """``sum_{B_r x B_r} |log((u_x+d)/(u_y+d))|^2 |x-y|^{-n-2s} <= C r^{n-2s} (1 + d^{-1} (r/R)^{2s} tail_- + d^{-1} r^{2s} |f|_inf)``."""
    if d <= 0:
        raise ValueError("d must be positive")
    if not r < R / 2:
        raise ValueError("need r < R/2")
    grid = u.grid
    n = grid.n
    center = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    K = constant_kernel(1.0, s, n) if K is None else K
    s = K.s
    BR = ball_mask(grid, center, R)
    if np.any(u.flat[BR] < -1e-14):
        raise NotSubsolution("u must be nonnegative on B(R)")
    W = pair_weights(K, grid)
    check_subsolution(u, f, 0.5 * (W + W.T), bump_probes(grid) if probes is None else probes, tol)
    vol = grid.cell_volume
    Br = ball_mask(grid, center, r)
    U = _unit_weights(grid, s)[np.ix_(Br, Br)]
    lg = np.log(u.flat[Br] + d)
    lhs = vol**2 * float(np.sum(U * (lg[:, None] - lg[None, :]) ** 2))
    dist = _distances_to(grid, center)
    out = ~BR
    neg = np.maximum(-u.flat[out], 0.0)
    tail = R ** (2 * s) * vol * float(np.sum(neg * dist[out] ** (-(n + 2 * s))))
    fsup = float(np.max(np.abs(f.flat[BR])))
    core = r ** (n - 2 * s)
    terms = {
        "volume": core,
        "tail": core * (r / R) ** (2 * s) * tail / d,
        "source": core * r ** (2 * s) * fsup / d,
    }
    digest = _digest(u.flat, f.flat, r=r, R=R, d=d, s=s)
    return _report("log", lhs, terms, digest)


def log_truncation(u: GridFunction, a: float, b: float, d: float) -> GridFunction:
    """``w = min((log(a+d) - log(u+d))_+, log b)``."""
    if b <= 1:
        raise BadTruncation(f"truncation level b must exceed 1, got {b}")
    if d <= 0:
        raise ValueError("d must be positive")
    if a + d <= 0 or float(u.values.min()) + d <= 0:
        raise BadTruncation("log arguments a + d and u + d must be positive")
    w = np.minimum(np.maximum(np.log(a + d) - np.log(u.values + d), 0.0), math.log(b))
    return GridFunction(u.grid, w)


def verify_poincare(w: GridFunction, r: float, center: Sequence[float] | None = None,
                    s: float = 0.5) -> InequalityReport:
    """``sum_{B_r} |w - mean_{B_r} w|^2 <= C r^{2s} sum_{B_r x B_r} |w_x - w_y|^2 |x-y|^{-n-2s}``."""
    grid = w.grid
    n = grid.n
    center = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    vol = grid.cell_volume
    Br = ball_mask(grid, center, r)
    vals = w.flat[Br]
    lhs = vol * float(np.sum((vals - vals.mean()) ** 2))
    U = _unit_weights(grid, s)[np.ix_(Br, Br)]
    energy = vol**2 * float(np.sum(U * (vals[:, None] - vals[None, :]) ** 2))
    digest = _digest(w.flat, r=r, s=s)
    return _report("poincare", lhs, {"energy": r ** (2 * s) * energy}, digest)


# ---------------------------------------------------------------------------
# Standard suite
# ---------------------------------------------------------------------------


def standard_solutions(grid: TorusGrid, s: float = 0.5, seed: int = 0) -> list[tuple[str, GridFunction]]:
    """Nonnegative shifts of constant-coefficient solutions (``K = 1``).

    Right sides: ``cos(2 pi x_1)`` and one seeded bandlimited field.  Each
    solution is shifted by ``-min + 0.1``.
    """
    sym = compute_symbol(periodize(constant_kernel(1.0, s, grid.n), np.zeros(grid.n)), grid)
    out = []
    rhs = [("mode", trig_mode(grid, [1] + [0] * (grid.n - 1))),
           ("band", bandlimited_field(grid, 3, seed, stream="suite"))]
    for name, g in rhs:
        u = solve_const(sym, g.zero_mean())
        out.append((name, u - float(u.values.min()) + 0.1))
    return out


def run_suite(N: int, n: int = 1, s: float = 0.5, seed: int = 0) -> dict[str, list[InequalityReport]]:
    """All reports on the standard suite at one resolution."""
    grid = TorusGrid(n, N)
    K = constant_kernel(1.0, s, n)
    out: dict[str, list[InequalityReport]] = {"caccioppoli": [], "linfty": [], "log": [], "poincare": []}
    c = np.zeros(n)
    for name, v in standard_solutions(grid, s, seed):
        f = density_of(K, v)
        out["caccioppoli"].append(verify_caccioppoli(v, f, 0.25, c, K=K))
        out["linfty"].append(verify_linfty_bound(v, f, 0.125, c, s))
        out["log"].append(verify_log_lemma(v, f, 0.1, 0.25, 0.5, c, K=K))
        a = float(v.values.max())
        w = log_truncation(v, a, 4.0, 0.5)
        out["poincare"].append(verify_poincare(w, 0.25, c, s))
    return out


__all__ = [
    "InequalityReport", "verify_coercivity_form", "verify_caccioppoli", "verify_linfty_bound",
    "verify_log_lemma", "verify_poincare", "log_truncation", "refinement_check", "relative_drift",
    "ball_mask", "cutoff", "cutoff_grad_bound", "grad_sup", "bump_probes", "check_subsolution", "density_of",
    "standard_solutions", "run_suite",
]
