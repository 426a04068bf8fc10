"""
Periodized kernels, Fourier symbols and the explicit coercivity constant.

For a kernel frozen at ``(x0, r=0)`` the periodized kernel is the lattice sum

    mu(h) = sum_{m in L Z^n} K((h+m)/|h+m|) / |h+m|^{n+2s}

and its symbol is ``m(k) = int_cell (1 - cos(2 pi <k,h>/L)) mu(h) dh``.  For
integer ``k`` the factor ``1 - cos`` is lattice periodic, so the cell
integral of the lattice sum equals the whole-space integral; in polar
coordinates it factorizes as

    m(k) = C_s (2 pi |k| / L)^{2s} A(k/|k|),
    C_s  = int_0^inf (1 - cos t) t^{-1-2s} dt,
    A(e) = int_{S^{n-1}} K(theta) |<e, theta>|^{2s} dtheta.

``C_s`` is computed with geometrically graded radial panels (ratio 1/2 down
to 1e-8, analytic inner cell, oscillatory tail by QAWF) and ``A`` by graded
angular Gauss-Legendre panels split at cone edges and at the zeros of
``<e, theta>``.  :func:`torus_symbol_quadrature` integrates the truncated
lattice sum over the cell directly and serves as an independent check.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize

from ._rng import max_workers
from .errors import BadEllipticity, EmptyCone, QuadratureNotConverged
from .kernels import Cone, ConeUnion, Kernel, fibonacci_sphere, sample_sigma
from .torus_field import TorusGrid

R_MIN = 1e-8
DEFAULT_TARGET = 1e-6


# ---------------------------------------------------------------------------
# Periodization
# ---------------------------------------------------------------------------


def lattice_tail_bound(n: int, s: float, M: int, Lam: float = 1.0, period: float = 1.0) -> float:
    """Integral-comparison bound for ``sum_{|m|_inf > M} sup_h |h+m|^{-n-2s}`` times ``Lam``."""
    if M < 1:
        raise ValueError("truncation radius must be >= 1")
    growth = (1.0 + 1.0 / (M + 0.5)) ** (n - 1)
    unit = n * 2**n * growth * (M - 0.5) ** (-2 * s) / (2 * s)
    return Lam * unit * period ** (-n - 2 * s)


@dataclass(frozen=True, eq=False)
class PeriodizedKernel:
    """Lattice sum of a direction-only kernel over ``period * Z^n``."""

    base: Callable[[np.ndarray], np.ndarray]
    n: int
    s: float
    M: int
    Lam: float
    tail_bound: float
    period: float = 1.0
    symmetric: bool = True
    kernel: Kernel | None = None
    breakpoints: tuple = ()

    def _offsets(self) -> np.ndarray:
        r = np.arange(-self.M, self.M + 1)
        return np.stack(np.meshgrid(*([r] * self.n), indexing="ij"), axis=-1).reshape(-1, self.n)

    def __call__(self, h, exclude_origin: bool = False) -> np.ndarray:
        """``mu(h)`` for points ``h (..., n)``; ``exclude_origin`` drops the ``m = 0`` term."""
        h = np.asarray(h, dtype=float)
        lead = h.shape[:-1]
        hf = h.reshape(-1, self.n)
        offs = self._offsets() * self.period
        if exclude_origin:
            offs = offs[np.any(offs != 0, axis=1)]
        out = np.zeros(len(hf))
        chunk = max(1, 2**21 // len(offs))
        for a in range(0, len(hf), chunk):
            z = hf[a : a + chunk, None, :] + offs[None, :, :]
            d = np.sqrt(np.sum(z * z, axis=-1))
            with np.errstate(divide="ignore", invalid="ignore"):
                dirs = z / d[..., None]
                vals = self.base(dirs.reshape(-1, self.n)).reshape(d.shape) * d ** (-self.n - 2 * self.s)
            vals[d == 0] = np.inf
            out[a : a + chunk] = vals.sum(axis=1)
        return out.reshape(lead)

    def singular_part(self, h) -> np.ndarray:
        h = np.asarray(h, dtype=float)
        d = np.linalg.norm(h, axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.base(h / d[..., None]) * d ** (-self.n - 2 * self.s)


def _cone_breakpoints(K: Kernel) -> tuple:
    if K.n != 2 or K.name not in ("cone", "constant"):
        return ()
    pts = []
    for axis, ang in K.sigma.caps():
        c = math.atan2(axis[1], axis[0])
        pts += [c - ang, c + ang]
    return tuple(p % (2 * math.pi) for p in pts)


def periodize(K: Kernel, x0, s: float | None = None, M: int | None = None,
              period: float = 1.0) -> PeriodizedKernel:
    """Freeze ``K`` at ``(x0, r=0)`` and periodize over ``period * Z^n``."""
    s = K.s if s is None else s
    if M is None:
        M = {1: 200, 2: 50, 3: 10}[K.n]
    if M < 1:
        raise ValueError("truncation radius must be >= 1")
    base = K.frozen(x0)
    probe = sample_sigma(Cone(np.eye(K.n)[0], np.pi / 2, True), 64, seed=3)
    symmetric = bool(np.allclose(base(probe), base(-probe), rtol=0, atol=1e-14))
    return PeriodizedKernel(base, K.n, float(s), int(M), K.Lam,
                            lattice_tail_bound(K.n, s, M, K.Lam, period), float(period), symmetric, K,
                            _cone_breakpoints(K))


# ---------------------------------------------------------------------------
# Quadrature building blocks
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _gl(q: int):
    x, w = np.polynomial.legendre.leggauss(q)
    return x, w


def _graded_nodes(a: float, b: float, q: int, levels: int, both: bool = True):
    """GL nodes on ``[a, b]`` with panels halving toward ``a`` (and ``b`` if ``both``)."""
    edges = [0.0, 1.0]
    if both:
        edges = [0.5]
        for j in range(levels):
            edges.append(0.5 * 2.0 ** (-j - 1))
            edges.append(1 - 0.5 * 2.0 ** (-j - 1))
        edges += [0.0, 1.0]
    else:
        for j in range(levels):
            edges.append(2.0 ** (-j - 1))
        edges += [0.0]
    edges = np.unique(edges)
    x, w = _gl(q)
    lo, hi = edges[:-1], edges[1:]
    t = (lo[:, None] + hi[:, None]) / 2 + (hi - lo)[:, None] / 2 * x[None, :]
    wt = (hi - lo)[:, None] / 2 * w[None, :]
    return a + (b - a) * t.ravel(), (b - a) * wt.ravel()


def _one_minus_cos(t):
    return 2.0 * np.sin(0.5 * t) ** 2


def _radial_constant_q(s: float, q: int) -> float:
    # inner cell [0, R_MIN]: 1 - cos t = t^2/2 - t^4/24 + ...
    t0 = R_MIN
    total = t0 ** (2 - 2 * s) / (2 * (2 - 2 * s)) - t0 ** (4 - 2 * s) / (24 * (4 - 2 * s))
    x, w = _gl(q)
    # geometric panels from R_MIN to 1 (ratio 1/2)
    J = int(math.ceil(math.log2(1.0 / R_MIN)))
    edges = np.array([R_MIN] + [2.0 ** (-j) for j in range(J - 1, -1, -1)])
    lo, hi = edges[:-1], edges[1:]
    t = (lo[:, None] + hi[:, None]) / 2 + (hi - lo)[:, None] / 2 * x[None, :]
    wt = (hi - lo)[:, None] / 2 * w[None, :]
    total += float(np.sum(wt * _one_minus_cos(t) * t ** (-1 - 2 * s)))
    # uniform panels on [1, T]
    T = 128 * math.pi
    edges = np.linspace(1.0, T, 512)
    lo, hi = edges[:-1], edges[1:]
    t = (lo[:, None] + hi[:, None]) / 2 + (hi - lo)[:, None] / 2 * x[None, :]
    wt = (hi - lo)[:, None] / 2 * w[None, :]
    total += float(np.sum(wt * _one_minus_cos(t) * t ** (-1 - 2 * s)))
    # tail: int_T^inf t^{-1-2s} - int_T^inf cos(t) t^{-1-2s}
    cos_tail, _ = integrate.quad(lambda t: t ** (-1 - 2 * s), T, np.inf, weight="cos", wvar=1.0)
    total += T ** (-2 * s) / (2 * s) - cos_tail
    return total


@lru_cache(maxsize=None)
def radial_constant(s: float) -> tuple[float, float]:
    """``C_s = int_0^inf (1 - cos t) t^{-1-2s} dt`` and a relative error estimate."""
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    hi = _radial_constant_q(s, 24)
    lo = _radial_constant_q(s, 12)
    return hi, abs(hi - lo) / abs(hi)


def radial_constant_closed_form(s: float) -> float:
    """``pi / (2 Gamma(1+2s) sin(pi s))``."""
    return math.pi / (2 * math.gamma(1 + 2 * s) * math.sin(math.pi * s))


# ---------------------------------------------------------------------------
# Angular factor
# ---------------------------------------------------------------------------


def _angular_2d(base, e: np.ndarray, s: float, breaks: Sequence[float], q: int, levels: int) -> float:
    phi_e = math.atan2(e[1], e[0])
    pts = sorted({(phi_e + math.pi / 2) % (2 * math.pi), (phi_e - math.pi / 2) % (2 * math.pi),
                  *[b % (2 * math.pi) for b in breaks]})
    pts = pts + [pts[0] + 2 * math.pi]
    nodes, weights = [], []
    for a, b in zip(pts[:-1], pts[1:]):
        if b - a < 1e-15:
            continue
        x, w = _graded_nodes(a, b, q, levels)
        nodes.append(x)
        weights.append(w)
    th = np.concatenate(nodes)
    wt = np.concatenate(weights)
    dirs = np.stack([np.cos(th), np.sin(th)], axis=-1)
    vals = base(dirs) * np.abs(dirs @ e) ** (2 * s)
    return float(np.sum(wt * vals))


def _angular_3d(base, e: np.ndarray, s: float, q: int, levels: int, n_phi: int) -> float:
    # polar coordinate u = <e, theta> in [-1, 1], graded toward u = 0 and u = +-1
    xu, wu = _graded_nodes(-1.0, 0.0, q, levels)
    xu = np.concatenate([xu, -xu[::-1]])
    wu = np.concatenate([wu, wu[::-1]])
    phi = 2 * math.pi * (np.arange(n_phi) + 0.5) / n_phi
    # orthonormal frame around e
    a = np.array([1.0, 0, 0]) if abs(e[0]) < 0.9 else np.array([0, 1.0, 0])
    f1 = a - (a @ e) * e
    f1 /= np.linalg.norm(f1)
    f2 = np.cross(e, f1)
    rho = np.sqrt(np.maximum(0.0, 1 - xu**2))
    dirs = (xu[:, None, None] * e[None, None, :]
            + rho[:, None, None] * (np.cos(phi)[None, :, None] * f1 + np.sin(phi)[None, :, None] * f2))
    vals = base(dirs.reshape(-1, 3)).reshape(len(xu), n_phi)
    inner = vals.sum(axis=1) * (2 * math.pi / n_phi)
    return float(np.sum(wu * np.abs(xu) ** (2 * s) * inner))


def angular_factor(base, n: int, e: np.ndarray, s: float, breaks: Sequence[float] = (),
                   target: float = DEFAULT_TARGET) -> tuple[float, float]:
    """``A(e) = int_S K(theta) |<e,theta>|^{2s} dtheta`` and a relative error estimate."""
    e = np.asarray(e, dtype=float)
    e = e / np.linalg.norm(e)
    if n == 1:
        v = float(base(np.array([[1.0]]))[0] + base(np.array([[-1.0]]))[0])
        return v, 0.0
    attempts = [(16, 24, 256), (24, 36, 512), (32, 48, 1024)]
    prev = None
    for q, levels, n_phi in attempts:
        if n == 2:
            val = _angular_2d(base, e, s, breaks, q, levels)
        else:
            val = _angular_3d(base, e, s, q, levels, n_phi)
        if prev is not None:
            err = abs(val - prev) / max(abs(val), 1e-300)
            if err <= target:
                return val, err
        prev = val
    if err > 10 * target:
        raise QuadratureNotConverged(f"angular quadrature error {err:.2e} exceeds 10x target {target:.1e}")
    return val, err


# ---------------------------------------------------------------------------
# Symbols
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Symbol:
    """Multiplier ``m(k)`` on a grid's frequency lattice (FFT order).

    ``quad_error`` holds the relative quadrature error estimate per mode;
    modes outside ``|k|_inf <= kmax`` are NaN.
    """

    grid: TorusGrid
    values: np.ndarray
    s: float
    kmax: int
    quad_error: np.ndarray = None
    name: str = "symbol"

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(self.grid.shape)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        qe = np.zeros_like(v) if self.quad_error is None else np.array(self.quad_error, dtype=float).reshape(self.grid.shape)
        qe.setflags(write=False)
        object.__setattr__(self, "quad_error", qe)

    def value(self, k: Sequence[int]) -> float:
        idx = tuple(int(ki) % self.grid.N for ki in np.atleast_1d(k))
        return float(self.values[idx])

    def rows(self) -> list[tuple]:
        """``(k, m(k), |k|^{2s}, ratio, quad_error)`` for ``0 < |k|_inf <= kmax``, sorted by ``k``."""
        ks = self.grid.freqs().reshape(-1, self.grid.n)
        vals = self.values.reshape(-1)
        errs = self.quad_error.reshape(-1)
        out = []
        for k, m, e in zip(ks, vals, errs):
            if not np.any(k) or np.max(np.abs(k)) > self.kmax:
                continue
            kk = float(np.linalg.norm(k)) ** (2 * self.s)
            out.append((tuple(int(c) for c in k), float(m), kk, float(m / kk), float(e)))
        out.sort(key=lambda r: r[0])
        return out


def _primitive(k: np.ndarray) -> tuple:
    g = 0
    for c in k:
        g = math.gcd(g, abs(int(c)))
    p = tuple(int(c) // g for c in k)
    # the angular factor is even in e, so fold +-k together
    first = next(c for c in p if c != 0)
    return p if first > 0 else tuple(-c for c in p)


def compute_symbol(mu: PeriodizedKernel, grid: TorusGrid, kmax: int | None = None,
                   target: float = DEFAULT_TARGET) -> Symbol:
    """Symbol of the periodized kernel on ``grid`` for ``|k|_inf <= kmax``."""
    if mu.n != grid.n:
        raise ValueError("kernel and grid dimensions differ")
    kmax = grid.N // 2 if kmax is None else int(kmax)
    if not 0 < kmax <= grid.N // 2:
        raise ValueError(f"kmax must lie in [1, N/2], got {kmax}")
    C, c_err = radial_constant(mu.s)
    ks = grid.freqs().reshape(-1, grid.n)
    dirs = sorted({_primitive(k) for k in ks if np.any(k) and np.max(np.abs(k)) <= kmax})

    def work(d):
        return angular_factor(mu.base, grid.n, np.array(d, dtype=float), mu.s, mu.breakpoints, target)

    workers = max_workers()
    if workers > 1 and len(dirs) > 8:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            res = list(ex.map(work, dirs))
    else:
        res = [work(d) for d in dirs]
    table = dict(zip(dirs, res))
    vals = np.full(len(ks), np.nan)
    errs = np.full(len(ks), np.nan)
    for i, k in enumerate(ks):
        if not np.any(k):
            vals[i], errs[i] = 0.0, 0.0
            continue
        if np.max(np.abs(k)) > kmax:
            continue
        A, a_err = table[_primitive(k)]
        kn = float(np.linalg.norm(k))
        vals[i] = C * (2 * math.pi * kn / mu.period) ** (2 * mu.s) * A
        errs[i] = a_err + c_err
    return Symbol(grid, vals.reshape(grid.shape), mu.s, kmax, errs.reshape(grid.shape), "continuum")


def lattice_symbol(grid: TorusGrid, weights: np.ndarray, vol: float, s: float, name: str = "lattice") -> Symbol:
    """Symbol of a discrete convolution form with offset weights ``w(z)``.

    ``vol^2 sum_{x,y} w(x-y)(a_x-a_y)(b_x-b_y) = sum_k 2 m(k) a^(k) conj(b^(k))`` with
    ``m(k) = vol * sum_z w(z) (1 - cos(2 pi <k, z_index>/N))`` (real part for
    nonsymmetric weights).
    """
    w = np.array(weights, dtype=float).reshape(grid.shape)
    w.flat[0] = 0.0
    W = np.fft.fftn(w)
    m = vol * (w.sum() - W.real)
    m.flat[0] = 0.0
    return Symbol(grid, np.maximum(m, 0.0), s, grid.N // 2, None, name)


def torus_symbol_quadrature(mu: PeriodizedKernel, k: Sequence[int], q: int = 24) -> float:
    """Direct cell integral of ``(1 - cos 2 pi <k,h>) mu(h)`` for ``n in {1, 2}``.

    In 1-D the ``m = 0`` lattice term is integrated on graded nodes, the rest
    of the truncated lattice sum by Gauss-Legendre panels and the terms beyond
    the truncation by the exterior integral.  In 2-D the truncated sum is
    unfolded into one polar integral over the square of half-side
    ``M + 1/2``; the oscillatory part of the exterior term is dropped.
    """
    k = np.asarray(k, dtype=float)
    n, s, M, L = mu.n, mu.s, mu.M, mu.period
    if n not in (1, 2) or L != 1.0:
        raise ValueError("direct cell quadrature supports n in {1, 2} on the unit period")
    x, w = _gl(q)

    def panels(a, b, count):
        e = np.linspace(a, b, count + 1)
        lo, hi = e[:-1], e[1:]
        t = (lo[:, None] + hi[:, None]) / 2 + (hi - lo)[:, None] / 2 * x[None, :]
        wt = (hi - lo)[:, None] / 2 * w[None, :]
        return t.ravel(), wt.ravel()

    kn = float(np.linalg.norm(k))
    osc = max(4, int(2 * kn) + 4)

    def radial(rmax):
        # graded toward 0 inside the first oscillation, uniform beyond
        d = min(rmax, 1.0 / (4 * kn + 1))
        rg, rgw = _graded_nodes(0.0, d, q, 40, both=False)
        if d < rmax:
            ru, ruw = panels(d, rmax, max(2, int(osc * (rmax - d) * 2)))
            rg, rgw = np.concatenate([rg, ru]), np.concatenate([rgw, ruw])
        return rg, rgw

    if n == 1:
        # m = 0 term: both half-lines share the radial integrand
        rr, rw = radial(0.5)
        rad_g = np.sum(rw * _one_minus_cos(2 * np.pi * kn * rr) * rr ** (-1 - 2 * s))
        Kp = float(mu.base(np.array([[1.0]]))[0])
        Km = float(mu.base(np.array([[-1.0]]))[0])
        sing = (Kp + Km) * rad_g
        hh, hw = panels(-0.5, 0.5, osc)
        rest = np.sum(hw * _one_minus_cos(2 * np.pi * kn * hh) * mu(hh[:, None], exclude_origin=True))
        a = M + 0.5
        cos_tail, _ = integrate.quad(lambda t: t ** (-1 - 2 * s), a, np.inf, weight="cos", wvar=2 * np.pi * kn)
        tail = (Kp + Km) * (a ** (-2 * s) / (2 * s) - cos_tail)
        return float(sing + rest + tail)
    # n == 2: the truncated lattice sum over the cell unfolds (the factor
    # 1 - cos is periodic) into the plane integral over the square of
    # half-side M + 1/2, done in polar coordinates with angular breaks at the
    # cone edges and the square corners so every panel is smooth
    a = M + 0.5
    th_breaks = [np.pi / 4 + j * np.pi / 2 for j in range(4)] + list(mu.breakpoints)
    th_breaks = sorted({b % (2 * np.pi) for b in th_breaks})
    th_breaks.append(th_breaks[0] + 2 * np.pi)
    body, tail = 0.0, 0.0
    for lo, hi in zip(th_breaks[:-1], th_breaks[1:]):
        th, tw = _graded_nodes(lo, hi, 16, 4)
        dirs = np.stack([np.cos(th), np.sin(th)], axis=-1)
        Kth = mu.base(dirs)
        rmax = a / np.maximum(np.abs(np.cos(th)), np.abs(np.sin(th)))
        proj = 2 * np.pi * (dirs @ k)
        for ti in range(len(th)):
            rg, rgw = radial(rmax[ti])
            val = np.sum(rgw * _one_minus_cos(proj[ti] * rg) * rg ** (-1 - 2 * s))
            body += tw[ti] * Kth[ti] * val
            # exterior of the square: non-oscillatory part only
            tail += tw[ti] * Kth[ti] * rmax[ti] ** (-2 * s) / (2 * s)
    return float(body + tail)


# ---------------------------------------------------------------------------
# Explicit constant and certificate
# ---------------------------------------------------------------------------


def one_minus_cos_root(xtol: float = 1e-12) -> float:
    """Largest ``r`` with ``1 - cos(2t) >= t^2/4`` on ``[0, r]`` (bisection)."""
    f = lambda t: 1.0 - math.cos(2 * t) - t * t / 4.0
    return float(optimize.bisect(f, 1.0, 3.0, xtol=xtol))


def moment_tensor(sigma: Cone | ConeUnion) -> np.ndarray:
    """``T = int_Sigma theta theta^T dtheta`` (closed form for arcs and disjoint caps)."""
    n = sigma.n
    caps = sigma.caps()
    if n == 1:
        pts = np.array([[1.0], [-1.0]])
        return np.array([[float(sigma.contains(pts).sum())]])
    if n == 2:
        T = np.zeros((2, 2))
        for a, b in _merged_arcs(caps):
            T[0, 0] += (b - a) / 2 + (math.sin(2 * b) - math.sin(2 * a)) / 4
            T[1, 1] += (b - a) / 2 - (math.sin(2 * b) - math.sin(2 * a)) / 4
            T[0, 1] += (math.sin(b) ** 2 - math.sin(a) ** 2) / 2
        T[1, 0] = T[0, 1]
        return T
    disjoint = all(
        math.acos(max(-1.0, min(1.0, float(caps[i][0] @ caps[j][0])))) >= caps[i][1] + caps[j][1] - 1e-14
        for i in range(len(caps)) for j in range(i + 1, len(caps))
    )
    if disjoint:
        T = np.zeros((3, 3))
        for v, a in caps:
            A = 2 * math.pi * (1 - math.cos(a) ** 3) / 3
            B = math.pi * (2.0 / 3.0 - math.cos(a) + math.cos(a) ** 3 / 3)
            P = np.outer(v, v)
            T += A * P + B * (np.eye(3) - P)
        return T
    pts = fibonacci_sphere(400_000)
    inside = sigma.contains(pts)
    return 4 * math.pi / len(pts) * (pts[inside].T @ pts[inside])


def _merged_arcs(caps) -> list[tuple[float, float]]:
    arcs = []
    for axis, ang in caps:
        c = math.atan2(axis[1], axis[0])
        arcs.append((c - ang, c + ang))
    # normalize to a common window and merge
    arcs = [((a % (2 * math.pi)), (a % (2 * math.pi)) + (b - a)) for a, b in arcs]
    arcs.sort()
    merged = []
    for a, b in arcs:
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    # wrap-around overlap with the first arc
    if len(merged) > 1 and merged[-1][1] >= merged[0][0] + 2 * math.pi:
        a0, b0 = merged.pop(0)
        a1, b1 = merged.pop()
        merged.append((a1, max(b1, b0 + 2 * math.pi)))
    total = sum(b - a for a, b in merged)
    if total >= 2 * math.pi:
        return [(0.0, 2 * math.pi)]
    return merged


@dataclass(frozen=True)
class ExplicitConstant:
    r0: float
    f_min: float
    sigma0: tuple[float, ...]
    c_explicit: float
    sweep_min: float | None = None


def f_sigma(sigma_set: Cone | ConeUnion, direction) -> float:
    """``f(direction) = int_Sigma |<direction, theta>|^2 dtheta``."""
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    return float(d @ moment_tensor(sigma_set) @ d)


def explicit_constant(sigma_set: Cone | ConeUnion, eta: float, s: float) -> ExplicitConstant:
    """``(r0, f_min, c = eta r0^{2-2s} f_min / (8(1-s)))``."""
    if sigma_set.measure() <= 0:
        raise EmptyCone("direction set has zero measure")
    if eta <= 0:
        raise BadEllipticity(f"eta must be positive, got {eta}")
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    r0 = one_minus_cos_root()
    n = sigma_set.n
    T = moment_tensor(sigma_set)
    sweep = None
    if n == 1:
        f_min, s0 = float(T[0, 0]), (1.0,)
    elif n == 2:
        g = lambda a: math.cos(a) ** 2 * T[0, 0] + 2 * math.sin(a) * math.cos(a) * T[0, 1] + math.sin(a) ** 2 * T[1, 1]
        grid = np.linspace(0, math.pi, 65)
        vals = [g(a) for a in grid]
        i = int(np.argmin(vals))
        res = optimize.minimize_scalar(g, bracket=(grid[i] - math.pi / 64, grid[i], grid[i] + math.pi / 64),
                                       method="golden", tol=1e-12)
        f_min, s0 = float(res.fun), (math.cos(res.x), math.sin(res.x))
    else:
        pts = fibonacci_sphere(10_000)
        vals = np.einsum("ij,jk,ik->i", pts, T, pts)
        sweep = float(vals.min())
        w, V = np.linalg.eigh(T)
        f_min, s0 = float(w[0]), tuple(float(c) for c in V[:, 0])
    if f_min <= 0:
        raise EmptyCone("f attains zero; the direction set is degenerate")
    c = eta * r0 ** (2 - 2 * s) * f_min / (8 * (1 - s))
    return ExplicitConstant(r0, f_min, s0, float(c), sweep)


@dataclass(frozen=True)
class CoercivityCertificate:
    eta: float
    s: float
    sigma: dict
    r0: float
    f_min: float
    c_explicit: float
    kmax: int
    min_ratio: float
    argmin: tuple[int, ...]
    worst_margin: float
    slack: float
    passed: bool
    ratios: tuple = field(default=(), repr=False)


def verify_coercivity(sym: Symbol, sigma_set: Cone | ConeUnion, eta: float, kmax: int | None = None,
                      slack: float = 1e-8) -> CoercivityCertificate:
    """Check ``m(k) >= c_explicit |k|^{2s}`` for ``0 < |k|_inf <= kmax``.

    Each mode passes when ``m(k) (1 + quad_error) >= c |k|^{2s} - slack``.
    """
    const = explicit_constant(sigma_set, eta, sym.s)
    kmax = sym.kmax if kmax is None else min(int(kmax), sym.kmax)
    best, arg, worst = np.inf, None, np.inf
    ratios = []
    passed = True
    for k, m, kk, ratio, err in sym.rows():
        if max(abs(c) for c in k) > kmax:
            continue
        ratios.append((k, ratio))
        margin = m * (1 + err) - (const.c_explicit * kk - slack)
        worst = min(worst, margin)
        if margin < 0:
            passed = False
        if ratio < best:
            best, arg = ratio, k
    return CoercivityCertificate(eta, sym.s, sigma_set.describe(), const.r0, const.f_min, const.c_explicit,
                                 kmax, float(best), arg, float(worst), slack, passed, tuple(ratios))


__all__ = [
    "PeriodizedKernel", "Symbol", "ExplicitConstant", "CoercivityCertificate", "periodize",
    "lattice_tail_bound", "compute_symbol", "lattice_symbol", "torus_symbol_quadrature",
    "radial_constant", "radial_constant_closed_form", "angular_factor", "one_minus_cos_root",
    "moment_tensor", "f_sigma", "explicit_constant", "verify_coercivity",
]
