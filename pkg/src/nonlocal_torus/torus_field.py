"""
Uniform grids on the flat torus and the norms used throughout the package.

The torus ``T^n`` is the cube ``[-1/2, 1/2)^n`` with opposite faces
identified.  A :class:`TorusGrid` samples it with ``N`` points per axis at
``x_j = -1/2 + j/N``; a :class:`GridFunction` holds real samples on such a
grid.

Fourier convention
------------------
Coefficients are taken with respect to the physical coordinate ``x``::

    f(x) = sum_k  F(k) exp(2 pi i <k, x>),     k in {-N/2, ..., N/2 - 1}^n

so the constant ``1`` has ``F(0) = 1`` and ``cos(2 pi x)`` has
``F(+-1) = 1/2``.  Because the grid starts at ``-1/2`` this differs from the
raw FFT by the phase ``(-1)^{k_1 + ... + k_n}``.  Coefficient arrays are kept
in FFT order; :meth:`TorusGrid.freqs` gives the integer frequency of each
slot.

Distances between grid points are wrapped (componentwise minimum image), so
all seminorms are translation invariant on the grid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from ._rng import make_rng
from .errors import ExactModeTooLarge, NegativeOrderNonzeroMean

EXACT_POINT_LIMIT = 2**14
CUBE_METRIC_POINT_LIMIT = 2**10
MC_REL_STDERR_LIMIT = 0.05


# ---------------------------------------------------------------------------
# Grids and fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid with ``N`` points per axis on the ``n``-torus."""

    n: int
    N: int

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.n}")
        if self.N < 4 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two >= 4, got {self.N}")

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        return self.N**self.n

    @property
    def cell_volume(self) -> float:
        return self.h**self.n

    def axis(self) -> np.ndarray:
        return -0.5 + np.arange(self.N) / self.N

    def points(self) -> np.ndarray:
        """Coordinates with shape ``grid.shape + (n,)``."""
        axes = np.meshgrid(*([self.axis()] * self.n), indexing="ij")
        return np.stack(axes, axis=-1)

    def flat_points(self) -> np.ndarray:
        return self.points().reshape(-1, self.n)

    def freqs(self) -> np.ndarray:
        """Integer frequencies (FFT order) with shape ``grid.shape + (n,)``."""
        k1 = np.fft.fftfreq(self.N, d=1.0 / self.N).round().astype(int)
        ks = np.meshgrid(*([k1] * self.n), indexing="ij")
        return np.stack(ks, axis=-1)

    def kabs(self) -> np.ndarray:
        return np.sqrt((self.freqs() ** 2).sum(axis=-1))

    def wrapped_offsets(self) -> np.ndarray:
        """Minimum-image offset of every index shift, shape ``grid.shape + (n,)``."""
        j = np.arange(self.N)
        d1 = ((j + self.N // 2) % self.N - self.N // 2) / self.N
        ds = np.meshgrid(*([d1] * self.n), indexing="ij")
        return np.stack(ds, axis=-1)

    def index_of(self, x: Sequence[float], tol: float = 1e-9) -> tuple[int, ...]:
        """Grid index of a point that lies on the grid (modulo 1)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (self.n,):
            raise ValueError(f"point must have {self.n} coordinates")
        j = (x + 0.5) * self.N
        jr = np.round(j)
        if np.max(np.abs(j - jr)) > tol * self.N:
            raise ValueError(f"point {x.tolist()} is not a grid point")
        return tuple(int(v) % self.N for v in jr)


def wrap(d: np.ndarray) -> np.ndarray:
    """Minimum-image representative of a displacement in ``[-1/2, 1/2)``."""
    return d - np.floor(d + 0.5)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real periodic samples on a :class:`TorusGrid` (immutable)."""

    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.size != self.grid.size:
            raise ValueError(f"expected {self.grid.size} values, got {v.size}")
        v = v.reshape(self.grid.shape)
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: TorusGrid, fn: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        """Sample ``fn`` on the grid; ``fn`` receives points of shape ``(..., n)``."""
        return cls(grid, fn(grid.points()))

    @classmethod
    def constant(cls, grid: TorusGrid, c: float) -> "GridFunction":
        return cls(grid, np.full(grid.shape, float(c)))

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def mean(self) -> float:
        return float(self.values.mean())

    def zero_mean(self) -> "GridFunction":
        return GridFunction(self.grid, self.values - self.values.mean())

    def shifted(self, shift: Sequence[int]) -> "GridFunction":
        """``f(x + shift*h)`` for an integer index shift."""
        axes = tuple(range(self.grid.n))
        return GridFunction(self.grid, np.roll(self.values, [-int(s) for s in shift], axis=axes))

    def _coerce(self, other):
        if isinstance(other, GridFunction):
            if other.grid != self.grid:
                raise ValueError("grid functions live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return GridFunction(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other):
        return GridFunction(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other):
        return GridFunction(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GridFunction(self.grid, self.values / self._coerce(other))

    def __neg__(self):
        return GridFunction(self.grid, -self.values)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients in FFT order over the balanced frequency lattice."""

    grid: TorusGrid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(self.grid.shape)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def coeff(self, k: Sequence[int]) -> complex:
        idx = tuple(int(ki) % self.grid.N for ki in np.atleast_1d(k))
        return complex(self.coeffs[idx])


def _phase(grid: TorusGrid) -> np.ndarray:
    return np.where(grid.freqs().sum(axis=-1) % 2 == 0, 1.0, -1.0)


def dft(f: GridFunction) -> SpectralField:
    g = f.grid
    return SpectralField(g, np.fft.fftn(f.values) / g.size * _phase(g))


def idft(F: SpectralField) -> GridFunction:
    g = F.grid
    vals = np.fft.ifftn(F.coeffs * _phase(g)) * g.size
    return GridFunction(g, vals.real)


def _mean_tol(f: GridFunction) -> float:
    return 1e-10 * (1.0 + float(np.max(np.abs(f.values))))


def frac_laplacian(f: GridFunction, sigma: float) -> GridFunction:
    """Fourier multiplier ``|k|^sigma`` with the zero mode removed."""
    if not -2.0 < sigma <= 2.0:
        raise ValueError(f"order must lie in (-2, 2], got {sigma}")
    if sigma < 0 and abs(f.mean()) > _mean_tol(f):
        raise NegativeOrderNonzeroMean(f"order {sigma} < 0 needs a mean-zero field (mean={f.mean():.3e})")
    if sigma == 0:
        return f.zero_mean()
    g = f.grid
    kabs = g.kabs()
    mult = np.zeros_like(kabs)
    nz = kabs > 0
    mult[nz] = kabs[nz] ** sigma
    return idft(SpectralField(g, dft(f).coeffs * mult))


def apply_multiplier(f: GridFunction, mult: np.ndarray) -> GridFunction:
    """Multiply Fourier coefficients by ``mult`` (FFT order, grid shape)."""
    return idft(SpectralField(f.grid, dft(f).coeffs * mult))


def gradient(f: GridFunction) -> list[GridFunction]:
    """Spectral partial derivatives (Nyquist modes dropped)."""
    g = f.grid
    F = dft(f).coeffs
    ks = g.freqs()
    out = []
    for i in range(g.n):
        ki = ks[..., i].astype(float)
        ki[ks[..., i] == -g.N // 2] = 0.0
        out.append(idft(SpectralField(g, 2j * np.pi * ki * F)))
    return out


def trig_interpolate(f: GridFunction, X: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant of ``f`` at points ``X (..., n)``."""
    g = f.grid
    X = np.asarray(X, dtype=float)
    lead = X.shape[:-1]
    Xf = X.reshape(-1, g.n)
    F = dft(f).coeffs
    # separable evaluation: contract one axis at a time
    k1 = np.fft.fftfreq(g.N, d=1.0 / g.N)
    out = np.empty(Xf.shape[0])
    chunk = max(1, 2**20 // max(1, g.size))
    for start in range(0, Xf.shape[0], chunk):
        xs = Xf[start : start + chunk]
        acc = np.broadcast_to(F, (xs.shape[0],) + F.shape)
        for i in range(g.n):
            e = np.exp(2j * np.pi * np.outer(xs[:, i], k1))  # (m, N)
            acc = np.einsum("mk...,mk->m...", acc, e)
        out[start : start + chunk] = acc.real
    return out.reshape(lead)


def trig_mode(grid: TorusGrid, k: Sequence[int], kind: str = "cos") -> GridFunction:
    k = np.asarray(k, dtype=float)
    arg = 2 * np.pi * (grid.points() @ k)
    return GridFunction(grid, np.cos(arg) if kind == "cos" else np.sin(arg))


def bandlimited_field(grid: TorusGrid, kband: int, seed: int, stream: str | int = "field",
                      decay: float = 0.0) -> GridFunction:
    """Random real field with modes ``|k|_inf <= kband``.

    The coefficients depend only on ``(kband, seed, stream, decay)``, so the
    same field is produced on every grid that resolves the band.
    """
    if 2 * kband >= grid.N:
        raise ValueError(f"band {kband} not resolved by N={grid.N}")
    rng = make_rng(seed, stream)
    rng_k = np.arange(-kband, kband + 1)
    ks = np.stack(np.meshgrid(*([rng_k] * grid.n), indexing="ij"), axis=-1).reshape(-1, grid.n)
    re = rng.standard_normal(len(ks))
    im = rng.standard_normal(len(ks))
    vals = np.zeros(grid.shape)
    X = grid.points()
    for kk, a, b in zip(ks, re, im):
        # one representative per +-k pair, excluding k = 0
        nz = np.nonzero(kk)[0]
        if len(nz) == 0 or kk[nz[0]] < 0:
            continue
        amp = (1.0 + float(np.dot(kk, kk))) ** (-decay / 2.0)
        arg = 2 * np.pi * (X @ kk)
        vals += amp * (a * np.cos(arg) + b * np.sin(arg))
    return GridFunction(grid, vals)


# ---------------------------------------------------------------------------
# Norms
# ---------------------------------------------------------------------------


def lp_norm(f: GridFunction, p: float) -> float:
    if p < 1:
        raise ValueError("p must be >= 1")
    a = np.abs(f.values)
    if np.isinf(p):
        return float(a.max())
    return float((f.grid.cell_volume * np.sum(a**p)) ** (1.0 / p))


def bessel_seminorm(f: GridFunction, sigma: float, p: float) -> float:
    """``|| (-Delta)^{sigma/2} f ||_{L^p}``."""
    return lp_norm(frac_laplacian(f, sigma), p)


@dataclass(frozen=True)
class SeminormEstimate:
    """Gagliardo seminorm estimate with diagnostics."""

    value: float
    power_sum: float
    mode: str
    samples: int = 0
    rel_stderr: float = 0.0
    variance_flag: bool = False
    cube_value: float | None = None

    @property
    def metric_gap(self) -> float | None:
        """Relative difference between wrapped and cube-distance values."""
        if self.cube_value is None or self.value == 0:
            return None
        return abs(self.cube_value - self.value) / self.value


def _shift_weights(grid: TorusGrid, sigma: float, p: float) -> np.ndarray:
    d = np.sqrt((grid.wrapped_offsets() ** 2).sum(axis=-1))
    w = np.zeros_like(d)
    nz = d > 0
    w[nz] = d[nz] ** (-(grid.n + sigma * p))
    return w


def _wrapped_power_sum(f: GridFunction, sigma: float, p: float) -> float:
    g = f.grid
    w = _shift_weights(g, sigma, p)
    v = f.values
    if p == 2:
        # sum_x |f(x) - f(x+j)|^2 = 2 (sum f^2 - autocorrelation(j))
        Fv = np.fft.fftn(v)
        auto = np.fft.ifftn(np.abs(Fv) ** 2).real
        S = 2.0 * (np.sum(v * v) - auto)
        S = np.maximum(S, 0.0)
        total = float(np.sum(w * S))
    else:
        total = 0.0
        axes = tuple(range(g.n))
        for j in np.ndindex(*g.shape):
            if not any(j):
                continue
            diff = np.abs(v - np.roll(v, [-x for x in j], axis=axes))
            total += w[j] * float(np.sum(diff**p))
    return total * g.cell_volume**2


def _cube_power_sum(f: GridFunction, sigma: float, p: float) -> float:
    g = f.grid
    v = f.values
    N = g.N
    total = 0.0
    expo = -(g.n + sigma * p)
    for d in np.ndindex(*((2 * N - 1,) * g.n)):
        off = np.array(d) - (N - 1)
        if not off.any():
            continue
        src = tuple(slice(max(0, o), N + min(0, o)) for o in off)
        dst = tuple(slice(max(0, -o), N - max(0, o)) for o in off)
        diff = np.abs(v[src] - v[dst])
        dist = np.sqrt(np.sum((off / N) ** 2))
        total += dist**expo * float(np.sum(diff**p))
    return total * g.cell_volume**2


def gagliardo_estimate(f: GridFunction, sigma: float, p: float, mode: str = "exact",
                       samples: int = 100_000, seed: int = 0) -> SeminormEstimate:
    """Discrete double-sum Gagliardo seminorm ``[f]_{W^{sigma,p}}``.

    ``mode="exact"`` sums every ordered pair ``x != y`` (allowed for at most
    ``2**14`` points); ``mode="montecarlo"`` samples ``samples`` pairs and
    raises the variance flag when the relative standard error of the
    ``p``-th power exceeds 5%.
    """
    if not 0 < sigma < 1:
        raise ValueError(f"sigma must lie in (0, 1), got {sigma}")
    if p < 1:
        raise ValueError("p must be >= 1")
    g = f.grid
    if mode == "exact":
        if g.size > EXACT_POINT_LIMIT:
            raise ExactModeTooLarge(f"{g.size} points exceed the exact-mode limit {EXACT_POINT_LIMIT}")
        total = _wrapped_power_sum(f, sigma, p)
        cube = None
        if g.size <= CUBE_METRIC_POINT_LIMIT:
            cube = float(_cube_power_sum(f, sigma, p) ** (1.0 / p))
        return SeminormEstimate(float(total ** (1.0 / p)), float(total), "exact", cube_value=cube)
    if mode != "montecarlo":
        raise ValueError(f"unknown mode {mode!r}")
    rng = make_rng(seed, "gagliardo-mc")
    M = g.size
    xi = rng.integers(0, M, size=samples)
    off = rng.integers(1, M, size=samples)
    xm = np.stack(np.unravel_index(xi, g.shape), axis=-1)
    om = np.stack(np.unravel_index(off, g.shape), axis=-1)
    ym = (xm + om) % g.N
    v = f.values
    fx = v[tuple(xm.T)]
    fy = v[tuple(ym.T)]
    d = np.sqrt(np.sum(wrap(om / g.N) ** 2, axis=-1))
    vals = np.abs(fx - fy) ** p * d ** (-(g.n + sigma * p))
    scale = g.cell_volume**2 * M * (M - 1)
    mean = float(vals.mean())
    total = scale * mean
    std = float(vals.std(ddof=1)) if samples > 1 else 0.0
    rel = (std / np.sqrt(samples)) / mean if mean > 0 else 0.0
    return SeminormEstimate(float(total ** (1.0 / p)), float(total), "montecarlo", samples=samples,
                            rel_stderr=float(rel), variance_flag=bool(rel > MC_REL_STDERR_LIMIT))


def gagliardo_seminorm(f: GridFunction, sigma: float, p: float, mode: str = "exact",
                       samples: int = 100_000, seed: int = 0) -> float:
    return gagliardo_estimate(f, sigma, p, mode=mode, samples=samples, seed=seed).value


def pairing(g: GridFunction, phi: GridFunction) -> float:
    """``g[phi] = int g phi`` for a density ``g``."""
    return float(g.grid.cell_volume * np.sum(g.values * phi.values))


def _probe_keys(n: int, count: int) -> list[tuple]:
    """Interleaved probe descriptors: trig mode, random field, trig mode, ..."""
    ks = []
    r = 1
    while len(ks) < count:
        box = np.arange(-r, r + 1)
        cand = np.stack(np.meshgrid(*([box] * n), indexing="ij"), axis=-1).reshape(-1, n)
        cand = [tuple(int(c) for c in k) for k in cand]
        cand = [k for k in cand if any(k) and k[next(i for i, c in enumerate(k) if c)] > 0]
        cand.sort(key=lambda k: (sum(c * c for c in k), k))
        ks = []
        for k in cand:
            ks.append(("cos", k))
            ks.append(("sin", k))
        r += 1
    out = []
    for i in range(count):
        out.append(ks[i // 2] if i % 2 == 0 else ("rand", i // 2))
    return out


@lru_cache(maxsize=64)
def _probe_bank(n: int, N: int, sigma: float, pc: float, count: int, seed: int, kband: int):
    grid = TorusGrid(n, N)
    band = min(kband, N // 2 - 1)
    fields, norms = [], []
    for key in _probe_keys(n, count):
        if key[0] == "rand":
            phi = bandlimited_field(grid, band, seed, stream=f"probe-{key[1]}")
        else:
            phi = trig_mode(grid, key[1], key[0])
        fields.append(phi.values)
        norms.append(gagliardo_seminorm(phi, sigma, pc))
    A = np.array(fields).reshape(count, -1)
    A.setflags(write=False)
    return A, np.array(norms)


def dual_norm_bound(g: GridFunction, sigma: float, p: float, probe_count: int = 16,
                    seed: int = 0, kband: int = 4,
                    extra_probes: Iterable[GridFunction] = ()) -> float:
    """Lower estimate of the ``W^{-sigma,p}`` dual norm of the density ``g``.

    Maximizes ``|g[phi]| / [phi]_{W^{sigma,p'}}`` over a fixed, seeded probe
    sequence (low trigonometric modes interleaved with random bandlimited
    fields).  Probe sets are nested in ``probe_count``.
    """
    if not 0 < sigma < 1:
        raise ValueError(f"sigma must lie in (0, 1), got {sigma}")
    if p <= 1:
        raise ValueError("p must exceed 1")
    pc = p / (p - 1.0)
    grid = g.grid
    best = 0.0
    for phi in extra_probes:
        nrm = gagliardo_seminorm(phi, sigma, pc)
        if nrm > 0:
            best = max(best, abs(pairing(g, phi)) / nrm)
    if probe_count > 0:
        A, norms = _probe_bank(grid.n, grid.N, float(sigma), float(pc), int(probe_count), int(seed), int(kband))
        pair = np.abs(A @ g.flat) * grid.cell_volume
        ok = norms > 0
        if ok.any():
            best = max(best, float(np.max(pair[ok] / norms[ok])))
    return best


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def write_field(f: GridFunction, stem: str | Path, name: str = "field") -> tuple[Path, Path]:
    """Write ``stem.json`` (metadata) and ``stem.bin`` (little-endian float64)."""
    stem = Path(stem)
    meta = {"n": f.grid.n, "N": f.grid.N, "name": name, "mean": float(f.mean()),
            "dtype": "<f8", "order": "row-major"}
    meta_path = stem.with_suffix(".json")
    bin_path = stem.with_suffix(".bin")
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    bin_path.write_bytes(np.ascontiguousarray(f.flat, dtype="<f8").tobytes())
    return meta_path, bin_path


def read_field(stem: str | Path) -> tuple[GridFunction, dict]:
    stem = Path(stem)
    if stem.suffix in (".json", ".bin"):
        stem = stem.with_suffix("")
    meta = json.loads(stem.with_suffix(".json").read_text())
    grid = TorusGrid(int(meta["n"]), int(meta["N"]))
    data = np.frombuffer(stem.with_suffix(".bin").read_bytes(), dtype="<f8")
    return GridFunction(grid, data.copy()), meta


def write_field_csv(f: GridFunction, path: str | Path) -> Path:
    if f.grid.n > 2:
        raise ValueError("CSV export supports n <= 2")
    path = Path(path)
    arr = f.values.reshape(f.grid.N, -1)
    np.savetxt(path, arr, delimiter=",", fmt="%.17g")
    return path


def read_field_csv(path: str | Path) -> GridFunction:
    arr = np.loadtxt(path, delimiter=",", ndmin=2)
    if arr.shape[1] == 1:
        return GridFunction(TorusGrid(1, arr.shape[0]), arr[:, 0])
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"CSV field must be a column or a square table, got {arr.shape}")
    return GridFunction(TorusGrid(2, arr.shape[0]), arr)


# ---------------------------------------------------------------------------
# Regularity orders
# ---------------------------------------------------------------------------


def conjugate(p: float) -> float:
    return p / (p - 1.0)


@dataclass(frozen=True)
class RegularityOrders:
    """Orders and exponents of one regularity step.

    ``s1 + s2 = 2 s`` splits the operator order between the solution and the
    test side; ``t`` and ``t_tilde`` are measurement orders with
    ``t_tilde in (max(0, 2s - 1), 2s - t)`` when both are set.
    """

    s: float
    s1: float
    s2: float
    p: float = 2.0
    q: float = 2.0
    t: float | None = None
    t_tilde: float | None = None

    def __post_init__(self):
        for name in ("s", "s1", "s2"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if abs(self.s1 + self.s2 - 2 * self.s) > 1e-12:
            raise ValueError(f"s1 + s2 must equal 2s, got {self.s1} + {self.s2} vs {2 * self.s}")
        for name in ("p", "q"):
            v = getattr(self, name)
            if not 1 < v < np.inf:
                raise ValueError(f"{name} must lie in (1, inf), got {v}")
        if self.t_tilde is not None:
            lo, hi = self.tilde_window()
            if not lo < self.t_tilde < hi:
                raise ValueError(f"t_tilde must lie in ({lo:g}, {hi:g}), got {self.t_tilde}")

    @property
    def p_conj(self) -> float:
        return conjugate(self.p)

    @property
    def q_conj(self) -> float:
        return conjugate(self.q)

    def tilde_window(self) -> tuple[float, float]:
        t = self.s1 if self.t is None else self.t
        return max(0.0, 2 * self.s - 1), 2 * self.s - t

    @classmethod
    def parse(cls, text: str) -> "RegularityOrders":
        """Parse ``"s=0.4,s1=0.6,s2=0.2,p=4"``; missing ``s1``/``s2`` default to ``s``."""
        vals = {}
        for part in text.replace(" ", "").split(","):
            if not part:
                continue
            key, _, raw = part.partition("=")
            if key not in ("s", "s1", "s2", "p", "q", "t", "t_tilde"):
                raise ValueError(f"unknown order '{key}'")
            vals[key] = float(raw)
        if "s" not in vals:
            raise ValueError("orders need s")
        vals.setdefault("s1", vals["s"])
        vals.setdefault("s2", 2 * vals["s"] - vals["s1"])
        return cls(**vals)


__all__ = [
    "TorusGrid", "GridFunction", "SpectralField", "SeminormEstimate",
    "dft", "idft", "frac_laplacian", "apply_multiplier", "gradient", "trig_interpolate",
    "trig_mode", "bandlimited_field", "lp_norm", "bessel_seminorm", "gagliardo_estimate",
    "gagliardo_seminorm", "pairing", "dual_norm_bound", "write_field", "read_field",
    "write_field_csv", "read_field_csv", "wrap", "RegularityOrders", "conjugate",
]
