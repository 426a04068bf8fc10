"""
Kernel families ``K(x, r, h)`` and sampled checks of their structural bounds.

A kernel is evaluated at a base point ``x`` (shape ``(..., n)``), a radius
``r >= 0`` and a unit direction ``h`` (shape ``(..., n)``); arguments
broadcast like numpy arrays.  Every kernel carries its order ``s``, an upper
bound ``Lam``, a direction set ``sigma`` (a spherical cap or a finite union
of caps) and an ellipticity level ``eta`` with ``eta <= K(x, 0, h)`` for
``h`` in ``sigma``.

All hypotheses are checked by probing: the certificates report how many
quasi-random probes were used and what was observed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.stats import qmc

from .errors import BadEllipticity, DegenerateJacobian, EmptyCone
from .torus_field import GridFunction, TorusGrid, trig_interpolate, wrap

CAP_TOL = 1e-12
DIFFEO_R_LIMIT = 1e-5
PAIR_POINT_LIMIT = 2**11


# ---------------------------------------------------------------------------
# Direction sets
# ---------------------------------------------------------------------------


def _unit(v) -> np.ndarray:
    v = np.atleast_1d(np.asarray(v, dtype=float))
    nv = np.linalg.norm(v)
    if nv == 0:
        raise EmptyCone("cone axis must be nonzero")
    return v / nv


@dataclass(frozen=True, eq=False)
class Cone:
    """Closed spherical cap ``{h : angle(h, axis) <= half_angle}``, optionally with ``-axis``."""

    axis: np.ndarray
    half_angle: float
    symmetric: bool = False

    def __post_init__(self):
        object.__setattr__(self, "axis", _unit(self.axis))
        if not 0 < self.half_angle <= np.pi / 2 + 1e-15:
            raise EmptyCone(f"half angle must lie in (0, pi/2], got {self.half_angle}")

    @property
    def n(self) -> int:
        return self.axis.size

    def caps(self) -> list[tuple[np.ndarray, float]]:
        out = [(self.axis, float(self.half_angle))]
        if self.symmetric:
            out.append((-self.axis, float(self.half_angle)))
        return out

    def contains(self, h: np.ndarray) -> np.ndarray:
        return _caps_contain(self.caps(), h)

    def measure(self) -> float:
        return _caps_measure(self.caps(), self.n)

    def describe(self) -> dict:
        return {"axis": self.axis.tolist(), "half_angle": float(self.half_angle), "symmetric": self.symmetric}


@dataclass(frozen=True, eq=False)
class ConeUnion:
    """Finite union of caps."""

    cones: tuple

    def __post_init__(self):
        if not self.cones:
            raise EmptyCone("a cone union needs at least one cap")
        ns = {c.n for c in self.cones}
        if len(ns) != 1:
            raise ValueError("caps live in different dimensions")

    @property
    def n(self) -> int:
        return self.cones[0].n

    def caps(self) -> list[tuple[np.ndarray, float]]:
        return [cap for c in self.cones for cap in c.caps()]

    def contains(self, h: np.ndarray) -> np.ndarray:
        return _caps_contain(self.caps(), h)

    def measure(self) -> float:
        return _caps_measure(self.caps(), self.n)

    def describe(self) -> dict:
        return {"union": [c.describe() for c in self.cones]}


def full_sphere(n: int) -> Cone:
    return Cone(np.eye(n)[0], np.pi / 2, symmetric=True)


def _caps_contain(caps, h) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    out = np.zeros(h.shape[:-1], dtype=bool)
    for axis, ang in caps:
        out |= (h @ axis) >= np.cos(ang) - CAP_TOL
    return out


def _arc_union_length(caps) -> float:
    arcs = []
    for axis, ang in caps:
        c = np.arctan2(axis[1], axis[0])
        lo, hi = c - ang, c + ang
        lo_m = lo % (2 * np.pi)
        hi_m = lo_m + (hi - lo)
        if hi_m > 2 * np.pi:
            arcs.append((lo_m, 2 * np.pi))
            arcs.append((0.0, hi_m - 2 * np.pi))
        else:
            arcs.append((lo_m, hi_m))
    arcs.sort()
    total, cur_lo, cur_hi = 0.0, None, None
    for lo, hi in arcs:
        if cur_hi is None or lo > cur_hi:
            if cur_hi is not None:
                total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    total += cur_hi - cur_lo
    return min(total, 2 * np.pi)


def _caps_measure(caps, n: int) -> float:
    if n == 1:
        pts = np.array([[1.0], [-1.0]])
        return float(_caps_contain(caps, pts).sum())
    if n == 2:
        return _arc_union_length(caps)
    # n == 3: closed form when the caps are pairwise disjoint
    disjoint = True
    for i in range(len(caps)):
        for j in range(i + 1, len(caps)):
            ang = np.arccos(np.clip(caps[i][0] @ caps[j][0], -1, 1))
            if ang < caps[i][1] + caps[j][1] - 1e-14:
                disjoint = False
    if disjoint:
        return float(sum(2 * np.pi * (1 - np.cos(a)) for _, a in caps))
    pts = fibonacci_sphere(200_000)
    return float(4 * np.pi * _caps_contain(caps, pts).mean())


def fibonacci_sphere(count: int) -> np.ndarray:
    i = np.arange(count) + 0.5
    z = 1 - 2 * i / count
    phi = np.pi * (1 + 5**0.5) * i
    rho = np.sqrt(1 - z * z)
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Kernel:
    """Evaluator ``K(x, r, h)`` with structural metadata."""

    fn: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
    n: int
    s: float
    Lam: float
    eta: float
    sigma: Cone | ConeUnion
    name: str = "kernel"
    hoelder: tuple[float, float] | None = None
    x_independent: bool = False
    params: dict = field(default_factory=dict)
    pair_fn: Callable | None = None

    def eval(self, x, r, h) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        h = np.asarray(h, dtype=float)
        r = np.asarray(r, dtype=float)
        shape = np.broadcast_shapes(x.shape[:-1], r.shape, h.shape[:-1])
        x = np.broadcast_to(x, shape + (self.n,))
        h = np.broadcast_to(h, shape + (self.n,))
        r = np.broadcast_to(r, shape)
        return np.asarray(self.fn(x, r, h), dtype=float).reshape(shape)

    def frozen(self, x0) -> Callable[[np.ndarray], np.ndarray]:
        """Direction-only kernel ``h -> K(x0, 0, h)``."""
        x0 = np.asarray(x0, dtype=float).reshape(self.n)
        return lambda h: self.eval(x0, 0.0, h)

    def with_order(self, s: float) -> "Kernel":
        return Kernel(self.fn, self.n, s, self.Lam, self.eta, self.sigma, self.name, self.hoelder,
                      self.x_independent, dict(self.params, s=s), self.pair_fn)


def _full(x, r, h, value):
    return np.full(np.broadcast_shapes(x.shape[:-1], r.shape, h.shape[:-1]), float(value))


def constant_kernel(value: float, s: float, n: int = 1) -> Kernel:
    if value <= 0:
        raise BadEllipticity(f"constant kernel needs a positive value, got {value}")
    return Kernel(lambda x, r, h: _full(x, r, h, value), n, s, float(value), float(value),
                  full_sphere(n), "constant", (1.0, 0.0), True, {"family": "constant", "value": value, "s": s})


def cone_indicator_kernel(sigma: Cone | ConeUnion, eta: float, Lam: float, s: float,
                          outside: str = "zero") -> Kernel:
    """``K = Lam`` on ``sigma``; outside it ``0`` or ``eta`` (``outside="eta"``)."""
    if eta <= 0 or eta > Lam:
        raise BadEllipticity(f"need 0 < eta <= Lambda, got eta={eta}, Lambda={Lam}")
    if outside not in ("zero", "eta"):
        raise ValueError("outside must be 'zero' or 'eta'")
    low = eta if outside == "eta" else 0.0
    n = sigma.n

    def fn(x, r, h):
        return np.where(sigma.contains(h), Lam, low)

    return Kernel(fn, n, s, float(Lam), float(eta), sigma, "cone", (1.0, 0.0), True,
                  {"family": "cone", "eta": eta, "Lambda": Lam, "s": s, "outside": outside,
                   "sigma": sigma.describe()})


def modulated_kernel(base: float, amplitude: float, s: float, n: int = 1,
                     k: Sequence[int] | None = None) -> Kernel:
    """``K(x, r, h) = base + amplitude * sin(2 pi <k, x>)`` (default ``k = e_1``)."""
    kv = np.zeros(n)
    kv[0] = 1
    if k is not None:
        kv = np.asarray(k, dtype=float)
    if base - abs(amplitude) <= 0:
        raise BadEllipticity("modulated kernel must stay positive")

    def fn(x, r, h):
        return base + amplitude * np.sin(2 * np.pi * (x @ kv)) + 0.0 * r

    lip = 2 * np.pi * np.linalg.norm(kv) * abs(amplitude)
    return Kernel(fn, n, s, base + abs(amplitude), base - abs(amplitude), full_sphere(n), "modulated",
                  (1.0, lip), False, {"family": "modulated", "base": base, "amplitude": amplitude,
                                      "k": kv.tolist(), "s": s})


def _sphere_from_unit(u: np.ndarray, n: int) -> np.ndarray:
    if n == 1:
        return np.where(u[:, :1] < 0.5, 1.0, -1.0)
    if n == 2:
        t = 2 * np.pi * u[:, 0]
        return np.stack([np.cos(t), np.sin(t)], axis=-1)
    z = 2 * u[:, 0] - 1
    t = 2 * np.pi * u[:, 1]
    rho = np.sqrt(np.maximum(0.0, 1 - z * z))
    return np.stack([rho * np.cos(t), rho * np.sin(t), z], axis=-1)


def _ball_from_unit(u: np.ndarray, n: int) -> np.ndarray:
    """Map uniform ``[0,1)^n`` samples into the unit ball (uniform in volume)."""
    if n == 1:
        return 2 * u[:, :1] - 1
    rad = u[:, 0] ** (1.0 / n)
    dirs = _sphere_from_unit(u[:, 1:], n)
    return rad[:, None] * dirs


def probe_set(n: int, count: int, seed: int = 0, r_max: float = 0.5):
    """Quasi-random probes ``(x, r, h)``: ``x`` in the period cube, ``r`` in ``[0, r_max)``."""
    dim = n + 1 + max(1, n - 1)
    u = qmc.Halton(d=dim, scramble=True, seed=seed).random(count)
    x = u[:, :n] - 0.5
    r = r_max * u[:, n]
    h = _sphere_from_unit(u[:, n + 1 :], n)
    return x, r, h


def sample_sigma(sigma: Cone | ConeUnion, count: int, seed: int = 0) -> np.ndarray:
    """Directions inside the cone, round-robin over its caps."""
    caps = sigma.caps()
    n = sigma.n
    u = qmc.Halton(d=2, scramble=True, seed=seed).random(count)
    out = np.empty((count, n))
    for i in range(count):
        axis, ang = caps[i % len(caps)]
        if n == 1:
            out[i] = axis
        elif n == 2:
            c = np.arctan2(axis[1], axis[0]) + ang * (2 * u[i, 0] - 1)
            out[i] = [np.cos(c), np.sin(c)]
        else:
            z = 1 - u[i, 0] * (1 - np.cos(ang))
            t = 2 * np.pi * u[i, 1]
            rho = np.sqrt(max(0.0, 1 - z * z))
            local = np.array([rho * np.cos(t), rho * np.sin(t), z])
            out[i] = _rotate_from_pole(axis) @ local
    return out


def _rotate_from_pole(axis: np.ndarray) -> np.ndarray:
    """Rotation taking ``e_3`` to ``axis``."""
    e3 = np.array([0.0, 0.0, 1.0])
    v = np.cross(e3, axis)
    c = float(e3 @ axis)
    if np.linalg.norm(v) < 1e-14:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    vx = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + vx + vx @ vx / (1 + c)


@dataclass(frozen=True)
class KernelCertificate:
    bound_probes: int
    cone_probes: int
    observed_min: float
    observed_max: float
    cone_min: float
    bounds_ok: bool
    cone_ok: bool

    @property
    def passed(self) -> bool:
        return self.bounds_ok and self.cone_ok


def certify_kernel(K: Kernel, bound_probes: int = 10_000, cone_probes: int = 1_000,
                   seed: int = 0, slack: float = 1e-12) -> KernelCertificate:
    """Check ``0 <= K <= Lam`` and ``K(x, 0, h) >= eta`` for ``h`` in the cone."""
    x, r, h = probe_set(K.n, bound_probes, seed)
    vals = K.eval(x, r, h)
    hs = sample_sigma(K.sigma, cone_probes, seed + 1)
    xc, _, _ = probe_set(K.n, cone_probes, seed + 2)
    cvals = K.eval(xc, 0.0, hs)
    lo, hi, cmin = float(vals.min()), float(vals.max()), float(cvals.min())
    return KernelCertificate(bound_probes, cone_probes, lo, hi, cmin,
                             lo >= -slack and hi <= K.Lam + slack, cmin >= K.eta - slack)


# ---------------------------------------------------------------------------
# Diffeomorphism kernels
# ---------------------------------------------------------------------------


def _diffeo_values(phi, jac, n, s, x, r, h):
    expo = n + 2 * s
    out = np.empty(r.shape)
    small = r < DIFFEO_R_LIMIT
    if np.any(~small):
        xb, rb, hb = x[~small], r[~small], h[~small]
        dist = np.linalg.norm(phi(xb) - phi(xb + rb[:, None] * hb), axis=-1)
        out[~small] = (rb / dist) ** expo
    if np.any(small):
        xs, hs = x[small], h[small]
        if jac is not None:
            J = np.asarray(jac(xs))
            speed = np.linalg.norm(np.einsum("...mn,...n->...m", J, hs), axis=-1)
        else:
            d = DIFFEO_R_LIMIT
            speed = np.linalg.norm(phi(xs + d * hs) - phi(xs - d * hs), axis=-1) / (2 * d)
        out[small] = speed ** (-expo)
    return out


def diffeo_kernel(phi: Callable[[np.ndarray], np.ndarray], s: float, n: int = 1,
                  jacobian: Callable | None = None, probes: int = 4000, seed: int = 0,
                  tol: float = 1e-8, hoelder: tuple[float, float] | None = None,
                  name: str = "diffeo", params: dict | None = None) -> Kernel:
    """``K(x, r, h) = (r / |phi(x) - phi(x + r h)|)^{n + 2s}`` with its ``r -> 0`` limit.

    ``Lam`` and ``eta`` come from the bi-Lipschitz constants measured on
    ``probes`` quasi-random probes (1% margin unless the kernel is constant
    on the probes).  Raises :class:`DegenerateJacobian` when the measured
    lower bi-Lipschitz constant falls below ``tol``.
    """

    def fn(x, r, h):
        flat_x = x.reshape(-1, n)
        flat_h = h.reshape(-1, n)
        flat_r = r.reshape(-1)
        return _diffeo_values(phi, jacobian, n, s, flat_x, flat_r, flat_h).reshape(r.shape)

    x, r, h = probe_set(n, probes, seed)
    r = np.concatenate([r, np.zeros(len(r) // 4)])
    x = np.concatenate([x, x[: len(x) // 4]])
    h = np.concatenate([h, h[: len(h) // 4]])
    big = r >= DIFFEO_R_LIMIT
    ratio = np.empty(len(r))
    ratio[big] = np.linalg.norm(phi(x[big]) - phi(x[big] + r[big, None] * h[big]), axis=-1) / r[big]
    d = DIFFEO_R_LIMIT
    ratio[~big] = np.linalg.norm(phi(x[~big] + d * h[~big]) - phi(x[~big] - d * h[~big]), axis=-1) / (2 * d)
    lo, hi = float(ratio.min()), float(ratio.max())
    if not np.isfinite(lo) or lo < tol:
        raise DegenerateJacobian(f"measured lower bi-Lipschitz bound {lo:.3e} < {tol:.1e}")
    expo = n + 2 * s
    Lam, eta = lo ** (-expo), hi ** (-expo)
    if Lam - eta > 1e-12 * Lam:
        Lam, eta = 1.01 * Lam, 0.99 * eta
    return Kernel(fn, n, s, Lam, eta, full_sphere(n), name, hoelder, False,
                  dict(params or {}, family="diffeo", s=s, bilip=(lo, hi)))


def displacement_map(fields: Sequence[GridFunction]) -> Callable[[np.ndarray], np.ndarray]:
    """``phi(x) = x + d(x)`` with a sampled periodic displacement (trig interpolation)."""
    n = fields[0].grid.n
    if len(fields) != n:
        raise ValueError("need one displacement component per axis")

    def phi(X):
        X = np.asarray(X, dtype=float)
        return X + np.stack([trig_interpolate(f, X) for f in fields], axis=-1)

    return phi


NAMED_MAPS = ("identity", "scale", "sine")


def named_map(kind: str, n: int, factor: float = 2.0, amplitude: float = 0.1):
    """Closed-form maps reachable from configuration files."""
    if kind == "identity":
        return (lambda X: np.asarray(X, dtype=float)), (lambda X: np.broadcast_to(np.eye(n), np.shape(X)[:-1] + (n, n)))
    if kind == "scale":
        return (lambda X: factor * np.asarray(X, dtype=float)), (lambda X: np.broadcast_to(factor * np.eye(n), np.shape(X)[:-1] + (n, n)))
    if kind == "sine":
        def phi(X):
            X = np.asarray(X, dtype=float)
            return X + amplitude * np.sin(2 * np.pi * X)

        def jac(X):
            X = np.asarray(X, dtype=float)
            diag = 1 + 2 * np.pi * amplitude * np.cos(2 * np.pi * X)
            return diag[..., :, None] * np.eye(n)

        return phi, jac
    raise ValueError(f"unknown map {kind!r}; choose from {NAMED_MAPS}")


# ---------------------------------------------------------------------------
# Tabulated kernels
# ---------------------------------------------------------------------------


def custom_table_kernel(axes: Sequence[tuple[str, Sequence[float]]], values, s: float, n: int,
                        sigma: Cone | ConeUnion | None = None, eta: float | None = None) -> Kernel:
    """Multilinear interpolation of a sampled table.

    Each axis is ``(name, nodes)`` with ``name`` one of ``x1..x3``, ``r``,
    ``h1..h3`` or ``theta`` (planar angle of ``h``).  Inputs outside the
    node range are clamped.
    """
    names = [a[0] for a in axes]
    nodes = [np.asarray(a[1], dtype=float) for a in axes]
    vals = np.asarray(values, dtype=float)
    if vals.shape != tuple(len(v) for v in nodes):
        raise ValueError(f"table shape {vals.shape} does not match axes")
    if np.any(vals < 0):
        raise BadEllipticity("kernel tables must be nonnegative")
    interp = RegularGridInterpolator(nodes, vals, method="linear")

    def coord(name, x, r, h):
        if name.startswith("x"):
            return x[..., int(name[1:]) - 1]
        if name == "r":
            return r
        if name == "theta":
            return np.arctan2(h[..., 1], h[..., 0])
        if name.startswith("h"):
            return h[..., int(name[1:]) - 1]
        raise ValueError(f"unknown table axis {name!r}")

    def fn(x, r, h):
        cols = [np.clip(coord(nm, x, r, h), nd[0], nd[-1]) for nm, nd in zip(names, nodes)]
        pts = np.stack([c.reshape(-1) for c in cols], axis=-1)
        return interp(pts).reshape(r.shape)

    sig = sigma if sigma is not None else full_sphere(n)
    lo = float(vals.min())
    if eta is None:
        eta = lo
    if eta <= 0 or eta > vals.max():
        raise BadEllipticity(f"table kernel ellipticity {eta} outside (0, max]")
    x_indep = not any(nm.startswith("x") for nm in names)
    return Kernel(fn, n, s, float(vals.max()), float(eta), sig, "custom_table", None, x_indep,
                  {"family": "custom_table", "axes": names, "s": s})


# ---------------------------------------------------------------------------
# Pair weights on a grid
# ---------------------------------------------------------------------------


def pair_geometry(grid: TorusGrid):
    """Flat points, wrapped differences ``x - y``, distances and directions."""
    X = grid.flat_points()
    D = wrap(X[:, None, :] - X[None, :, :])
    dist = np.sqrt(np.sum(D * D, axis=-1))
    with np.errstate(invalid="ignore", divide="ignore"):
        H = np.where(dist[..., None] > 0, D / dist[..., None], 0.0)
    return X, D, dist, H


def pair_weights(K: Kernel, grid: TorusGrid, s: float | None = None) -> np.ndarray:
    """Dense matrix ``W[x, y] = K(x, |x-y|, (x-y)/|x-y|) / |x-y|^{n+2s}`` (zero diagonal)."""
    if grid.size > PAIR_POINT_LIMIT:
        raise ValueError(f"{grid.size} points exceed the dense pair limit {PAIR_POINT_LIMIT}")
    s = K.s if s is None else s
    X, D, dist, H = pair_geometry(grid)
    if K.pair_fn is not None:
        kv = K.pair_fn(grid)
    else:
        kv = K.eval(np.broadcast_to(X[:, None, :], D.shape), dist, np.where(dist[..., None] > 0, H, np.eye(grid.n)[0]))
    W = np.zeros_like(dist)
    nz = dist > 0
    W[nz] = kv[nz] / dist[nz] ** (grid.n + 2 * s)
    return W


def form_value(W: np.ndarray, a: np.ndarray, b: np.ndarray, vol: float) -> float:
    """``vol^2 * sum_{x,y} W[x,y] (a_x - a_y)(b_x - b_y)``."""
    r = W.sum(axis=1)
    c = W.sum(axis=0)
    return float(vol**2 * (a @ ((r + c) * b) - a @ (W @ b) - b @ (W @ a)))


def form_coefficients(W: np.ndarray, a: np.ndarray, vol: float) -> np.ndarray:
    """Vector ``c`` with ``form_value(W, a, b) = c . b`` for every ``b``."""
    r = W.sum(axis=1)
    c = W.sum(axis=0)
    return vol**2 * ((r + c) * a - W @ a - W.T @ a)


def operator_matrix(W: np.ndarray, vol: float) -> np.ndarray:
    """Density operator ``A`` with ``form(u, phi) = vol * phi . (A u)``."""
    r = W.sum(axis=1)
    c = W.sum(axis=0)
    return vol * (np.diag(r + c) - W - W.T)


# ---------------------------------------------------------------------------
# Continuity and Hoelder moduli
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContinuityReport:
    x0: tuple[float, ...]
    rscale: float
    table: tuple[tuple[float, float], ...]
    probes: int

    def oscillation(self, lam: float) -> float:
        for l, o in self.table:
            if abs(l - lam) <= 1e-14 * max(1.0, lam):
                return o
        raise KeyError(lam)


def measure_continuity(K: Kernel, x0, rscale: float, scales: Sequence[float], probes: int = 1024,
                       seed: int = 0) -> ContinuityReport:
    """``sup |K(x, r, h) - K(x0, 0, h)|`` over ``|x - x0| < lam*rscale``, ``r < lam*rscale``.

    The probe set at scale ``lam`` is the union of the scaled base probes at
    every scale ``<= lam``, so the table is nonincreasing as ``lam`` shrinks.
    """
    n = K.n
    x0 = np.asarray(x0, dtype=float).reshape(n)
    u = qmc.Halton(d=n + 1 + max(1, n - 1) + max(0, n - 1), scramble=True, seed=seed).random(probes)
    ball = _ball_from_unit(u[:, : max(1, n)], n) if n > 1 else 2 * u[:, :1] - 1
    rho = u[:, n]
    hs = _sphere_from_unit(u[:, n + 1 :], n)
    ref = K.eval(x0, 0.0, hs)
    raw = []
    for lam in sorted(scales):
        rad = lam * rscale
        vals = K.eval(x0 + rad * ball, rad * rho, hs)
        raw.append((float(lam), float(np.max(np.abs(vals - ref)))))
    table, run = [], 0.0
    for lam, osc in raw:
        run = max(run, osc)
        table.append((lam, run))
    return ContinuityReport(tuple(x0.tolist()), float(rscale), tuple(table), probes)


def measure_hoelder(K: Kernel, alpha: float, probes: int = 4000, seed: int = 0,
                    min_sep: float = 1e-3, max_sep: float = 0.25) -> float:
    """``sup |K(x, r, h) - K(y, r, h)| / |x - y|^alpha`` over quasi-random pairs."""
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    n = K.n
    x, r, h = probe_set(n, probes, seed)
    u = qmc.Halton(d=1 + max(1, n - 1), scramble=True, seed=seed + 7).random(probes)
    sep = min_sep * (max_sep / min_sep) ** u[:, 0]
    e = _sphere_from_unit(u[:, 1:], n)
    y = x + sep[:, None] * e
    diff = np.abs(K.eval(x, r, h) - K.eval(y, r, h))
    return float(np.max(diff / sep**alpha))


# ---------------------------------------------------------------------------
# Configuration DSL
# ---------------------------------------------------------------------------


def cone_from_config(cfg: dict, n: int) -> Cone | ConeUnion:
    if "union" in cfg:
        return ConeUnion(tuple(cone_from_config(c, n) for c in cfg["union"]))
    axis = cfg.get("axis", [1.0] + [0.0] * (n - 1))
    if len(axis) != n:
        raise ValueError(f"cone axis needs {n} components")
    return Cone(np.asarray(axis, dtype=float), float(cfg.get("half_angle", np.pi / 2)),
                bool(cfg.get("symmetric", False)))


def kernel_from_config(cfg: dict, n: int) -> Kernel:
    """Build a kernel from ``{family: ..., parameters...}``."""
    fam = cfg.get("family")
    s = float(cfg.get("s", 0.5))
    if fam == "constant":
        return constant_kernel(float(cfg.get("value", 1.0)), s, n)
    if fam == "cone":
        sig = cone_from_config(cfg.get("sigma", cfg), n)
        return cone_indicator_kernel(sig, float(cfg.get("eta", 1.0)), float(cfg.get("Lambda", 1.0)), s,
                                     cfg.get("outside", "zero"))
    if fam == "modulated":
        return modulated_kernel(float(cfg.get("base", 1.0)), float(cfg.get("amplitude", 0.0)), s, n,
                                cfg.get("k"))
    if fam == "diffeo":
        kind = cfg.get("map", "identity")
        phi, jac = named_map(kind, n, float(cfg.get("factor", 2.0)), float(cfg.get("amplitude", 0.1)))
        return diffeo_kernel(phi, s, n, jacobian=jac, seed=int(cfg.get("seed", 0)),
                             params={"map": kind})
    if fam == "custom_table":
        axes = [(a["name"], a["nodes"]) for a in cfg["axes"]]
        sig = cone_from_config(cfg["sigma"], n) if "sigma" in cfg else None
        return custom_table_kernel(axes, cfg["values"], s, n, sig, cfg.get("eta"))
    if fam == "plap_effective":
        from .plap_lab import effective_kernel_from_config

        return effective_kernel_from_config(cfg, n)
    raise ValueError(f"unknown kernel family {fam!r}")


__all__ = [
    "Cone", "ConeUnion", "Kernel", "KernelCertificate", "ContinuityReport", "full_sphere",
    "constant_kernel", "cone_indicator_kernel", "modulated_kernel", "diffeo_kernel",
    "displacement_map", "named_map", "custom_table_kernel", "certify_kernel", "probe_set",
    "sample_sigma", "pair_weights", "pair_geometry", "form_value", "form_coefficients",
    "operator_matrix", "measure_continuity", "measure_hoelder", "kernel_from_config",
    "cone_from_config", "fibonacci_sphere",
]
