"""
Command-line front end.

    nonlocal-torus <command> [action] --config run.yaml --out DIR [overrides]

Commands: ``symbol``, ``coercivity``, ``solve-const``, ``solve-frozen``,
``bootstrap``, ``plap {identity,certificate,bootstrap}``,
``verify {coercivity,caccioppoli,linfty,log,poincare}`` and ``norms``.

Exit codes: 0 on success, 2 when an inequality or certificate fails, 1 on
errors.  Every run writes ``manifest.json`` listing each artifact with its
SHA-256; artifacts contain no timestamps, so a fixed config and seed give
byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import const_solver, estimate_verifier, frozen_solver, kernels, plap_lab, symbolics
from ._rng import make_rng
from .errors import ConfigError, NonlocalError, NonzeroMeanWarning
from .torus_field import (
    GridFunction,
    RegularityOrders,
    TorusGrid,
    bandlimited_field,
    bessel_seminorm,
    gagliardo_estimate,
    lp_norm,
    read_field,
    trig_mode,
    write_field,
)

COMMANDS = ("symbol", "coercivity", "solve-const", "solve-frozen", "bootstrap", "plap", "verify", "norms")
PLAP_ACTIONS = ("identity", "certificate", "bootstrap")
VERIFY_ACTIONS = ("coercivity", "caccioppoli", "linfty", "log", "poincare")
EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


def fmt(x: Any) -> str:
    """Fixed float formatting for all artifacts."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x != x:
            return "nan"
        if x in (float("inf"), float("-inf")):
            return "inf" if x > 0 else "-inf"
        return f"{x:.12e}"
    return str(x)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


def _line_map(node, prefix="", out=None) -> dict[str, int]:
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            key = f"{prefix}.{k.value}" if prefix else str(k.value)
            out[key] = k.start_mark.line + 1
            _line_map(v, key, out)
    return out


@dataclass
class RunConfig:
    command: str
    action: str | None
    data: dict
    lines: dict = field(default_factory=dict)
    out: Path = Path("out")

    def line(self, key: str) -> int | None:
        while key:
            if key in self.lines:
                return self.lines[key]
            key = key.rpartition(".")[0]
        return None

    def error(self, key: str, message: str) -> ConfigError:
        return ConfigError(message, field=key, line=self.line(key))

    def get(self, key: str, default=None):
        cur: Any = self.data
        for part in key.split("."):
            if not isinstance(cur, dict) or part not in cur:
                return default
            cur = cur[part]
        return cur

    def require(self, key: str):
        v = self.get(key)
        if v is None:
            raise self.error(key, "missing required field")
        return v

    def number(self, key: str, default=None, lo=None, hi=None, integer=False):
        v = self.get(key, default)
        if v is None:
            raise self.error(key, "missing required field")
        try:
            v = int(v) if integer else float(v)
        except (TypeError, ValueError):
            raise self.error(key, f"expected a number, got {v!r}") from None
        if lo is not None and v <= lo or hi is not None and v >= hi:
            raise self.error(key, f"value {v} outside ({lo}, {hi})")
        return v

    @property
    def seed(self) -> int:
        return self.number("seed", 0, integer=True)

    def grid(self) -> TorusGrid:
        n = self.number("grid.n", 1, integer=True)
        N = self.number("grid.N", 64, integer=True)
        try:
            return TorusGrid(n, N)
        except ValueError as exc:
            raise self.error("grid", str(exc)) from None

    def kernel(self, n: int) -> kernels.Kernel:
        spec = self.get("kernel")
        if not isinstance(spec, dict):
            raise self.error("kernel", "kernel must be a mapping with a 'family'")
        spec = dict(spec)
        if "s" not in spec and self.get("s") is not None:
            spec["s"] = self.get("s")
        try:
            return kernels.kernel_from_config(spec, n)
        except NonlocalError:
            raise
        except (ValueError, KeyError, TypeError) as exc:
            raise self.error("kernel", str(exc)) from None

    def orders(self, s: float) -> RegularityOrders:
        raw = self.get("orders")
        try:
            if raw is None:
                return RegularityOrders(s, s, s, 2.0, 2.0)
            if isinstance(raw, str):
                return RegularityOrders.parse(raw)
            vals = {k: float(v) for k, v in raw.items()}
            vals.setdefault("s", s)
            vals.setdefault("s1", vals["s"])
            vals.setdefault("s2", 2 * vals["s"] - vals["s1"])
            return RegularityOrders(**vals)
        except (ValueError, TypeError) as exc:
            raise self.error("orders", str(exc)) from None

    def field_fn(self, key: str, grid: TorusGrid) -> GridFunction:
        spec = self.get(key)
        if spec is None:
            raise self.error(key, "missing required field")
        if isinstance(spec, str):
            spec = {"file": spec}
        if not isinstance(spec, dict):
            raise self.error(key, "field spec must be a mapping or a file stem")
        if "file" in spec:
            try:
                f, _ = read_field(spec["file"])
            except OSError as exc:
                raise self.error(key, f"cannot read field: {exc}") from None
            if f.grid != grid:
                raise self.error(key, f"field grid (n={f.grid.n}, N={f.grid.N}) differs from the run grid")
            return f
        kind = spec.get("kind", "mode")
        try:
            if kind == "mode":
                k = spec.get("k", [1] + [0] * (grid.n - 1))
                return float(spec.get("amplitude", 1.0)) * trig_mode(grid, k, spec.get("trig", "cos"))
            if kind == "band":
                return bandlimited_field(grid, int(spec.get("kband", 4)), int(spec.get("seed", self.seed)),
                                         stream=str(spec.get("stream", key)), decay=float(spec.get("decay", 0.0)))
            if kind == "zero":
                return GridFunction.constant(grid, 0.0)
            if kind in ("sine", "cosine"):
                return plap_lab.field_from_config(dict(spec, N=grid.N), grid.n)
        except ValueError as exc:
            raise self.error(key, str(exc)) from None
        raise self.error(f"{key}.kind", f"unknown field kind {kind!r}")


def load_config(path: str | None, command: str, action: str | None, out: str,
                overrides: dict) -> RunConfig:
    data: dict = {}
    lines: dict = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        try:
            node = yaml.compose(text)
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            raise ConfigError(f"malformed config: {getattr(exc, 'problem', exc)}",
                              line=None if mark is None else mark.line + 1) from None
        if data is None:
            raise ConfigError("config is empty")
        if not isinstance(data, dict):
            raise ConfigError("config must be a mapping", line=1)
        lines = _line_map(node)
    for key, value in overrides.items():
        if value is None:
            continue
        cur = data
        parts = key.split(".")
        for part in parts[:-1]:
            cur = cur.setdefault(part, {})
        cur[parts[-1]] = value
    if not data:
        raise ConfigError("config is empty")
    return RunConfig(command, action, data, lines, Path(out))


# ---------------------------------------------------------------------------
# Artifact writing
# ---------------------------------------------------------------------------


class Artifacts:
    def __init__(self, out: Path):
        self.out = out
        out.mkdir(parents=True, exist_ok=True)
        self.files: list[Path] = []

    def csv(self, name: str, header: list[str], rows) -> None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])
        self._write(name, buf.getvalue())

    def text(self, name: str, pairs) -> None:
        body = "".join(f"{k}: {fmt(v)}\n" for k, v in pairs)
        self._write(name, body)

    def field(self, f: GridFunction, stem: str, name: str) -> None:
        js, bn = write_field(f, self.out / stem, name)
        self.files += [js, bn]

    def _write(self, name: str, body: str) -> None:
        p = self.out / name
        p.write_text(body)
        self.files.append(p)

    def manifest(self, command: str, status: str) -> Path:
        entries = []
        for p in sorted(set(self.files), key=lambda q: q.name):
            data = p.read_bytes()
            entries.append({"name": p.name, "sha256": hashlib.sha256(data).hexdigest(), "bytes": len(data)})
        body = json.dumps({"command": command, "status": status, "artifacts": entries}, indent=2, sort_keys=True)
        path = self.out / "manifest.json"
        path.write_text(body + "\n")
        return path


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _symbol_for(cfg: RunConfig, grid: TorusGrid, K: kernels.Kernel) -> symbolics.Symbol:
    kmax = cfg.number("kmax", grid.N // 2, integer=True)
    x0 = cfg.get("x0", [0.0] * grid.n)
    return symbolics.compute_symbol(symbolics.periodize(K, x0), grid, kmax=kmax)


def _symbol_rows(sym):
    for k, m, kk, ratio, err in sym.rows():
        yield [*k, m, kk, ratio, err]


def cmd_symbol(cfg: RunConfig, art: Artifacts) -> int:
    grid = cfg.grid()
    K = cfg.kernel(grid.n)
    sym = _symbol_for(cfg, grid, K)
    kcols = [f"k{i + 1}" for i in range(grid.n)]
    art.csv("symbol.csv", kcols + ["m", "k_2s", "ratio", "quad_error"], _symbol_rows(sym))
    art.text("report.txt", [("command", "symbol"), ("n", grid.n), ("N", grid.N), ("s", K.s),
                            ("kernel", K.name), ("kmax", sym.kmax),
                            ("max_quad_error", float(np.nanmax(sym.quad_error)))])
    return EXIT_OK


def cmd_coercivity(cfg: RunConfig, art: Artifacts) -> int:
    grid = cfg.grid()
    K = cfg.kernel(grid.n)
    sym = _symbol_for(cfg, grid, K)
    cert = symbolics.verify_coercivity(sym, K.sigma, K.eta, slack=cfg.number("slack", 1e-8))
    kcols = [f"k{i + 1}" for i in range(grid.n)]
    art.csv("ratios.csv", kcols + ["ratio"], ([*k, r] for k, r in cert.ratios))
    art.text("certificate.txt", [("eta", cert.eta), ("s", cert.s), ("sigma", json.dumps(cert.sigma, sort_keys=True)),
                                 ("r0", cert.r0), ("f_min", cert.f_min), ("c_explicit", cert.c_explicit),
                                 ("kmax", cert.kmax), ("min_ratio", cert.min_ratio),
                                 ("argmin", ",".join(str(c) for c in cert.argmin)),
                                 ("worst_margin", cert.worst_margin), ("slack", cert.slack), ("passed", cert.passed)])
    return EXIT_OK if cert.passed else EXIT_FAIL


def cmd_solve_const(cfg: RunConfig, art: Artifacts) -> int:
    grid = cfg.grid()
    K = cfg.kernel(grid.n)
    sym = _symbol_for(cfg, grid, K)
    g = cfg.field_fn("rhs", grid)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NonzeroMeanWarning)
        u = const_solver.solve_const(sym, g)
    removed = any(issubclass(w.category, NonzeroMeanWarning) for w in caught)
    orders = cfg.orders(K.s)
    rep = const_solver.measure_estimate(sym, orders, [g.zero_mean()], seed=cfg.seed, kernel_bound=K.Lam)
    art.field(u, "solution", "u")
    art.csv("ladder.csv", ["order", "p", "seminorm"], rep.ladder)
    art.text("report.txt", [("command", "solve-const"), ("residual", rep.residual), ("mean_removed", removed),
                            ("ratio", rep.constant), ("dual_bound", rep.lambdas[0]), ("l2", rep.l2_norms[0]),
                            ("seminorm_s1_p", rep.seminorms[0]), ("kernel_bound", K.Lam)])
    return EXIT_OK


def _frozen_setup(cfg: RunConfig):
    grid = cfg.grid()
    K = cfg.kernel(grid.n)
    u = cfg.field_fn("u", grid)
    x0 = cfg.get("localization.x0", [0.0] * grid.n)
    R = cfg.get("localization.R")
    R = frozen_solver.admissible_R(grid) if R is None else cfg.number("localization.R")
    try:
        loc = frozen_solver.build_localization(grid, x0, R)
    except ValueError as exc:
        raise cfg.error("localization", str(exc)) from None
    return grid, K, u, loc


def cmd_solve_frozen(cfg: RunConfig, art: Artifacts) -> int:
    grid, K, u, loc = _frozen_setup(cfg)
    forms = frozen_solver.assemble_forms(K, loc)
    g = forms.density(u)
    orders = cfg.orders(K.s) if cfg.get("orders") is not None else None
    tol = cfg.number("tolerances.tol", 1e-8)
    max_iter = cfg.number("tolerances.max_iter", 200, integer=True)
    v, tr = frozen_solver.fixed_point_solve(forms, u, g, orders, tol=tol, max_iter=max_iter)
    rng = make_rng(cfg.seed, "frozen-probes")
    probes = [rng.standard_normal(loc.cell.size) for _ in range(8)]
    resid = max(abs(forms.decomposition_residual(u, g, psi)) for psi in probes)
    art.field(GridFunction(loc.cell, v), "cell_solution", "v")
    art.csv("trace.csv", ["k", "seminorm", "increment", "rate"],
            ([i + 1, tr.seminorms[i], tr.increments[i], tr.rates[i - 1] if 0 < i <= len(tr.rates) else float("nan")]
             for i in range(len(tr.increments))))
    art.text("report.txt", [("command", "solve-frozen"), ("R", loc.R), ("cell_points", loc.M),
                            ("iterations", len(tr.increments)), ("asymptotic_rate", tr.asymptotic_rate),
                            ("decomposition_residual", resid), ("plateau_offset", tr.plateau_offset),
                            ("plateau_error", tr.plateau_error), ("converged", tr.converged)])
    return EXIT_OK


def cmd_bootstrap(cfg: RunConfig, art: Artifacts) -> int:
    grid, K, u, loc = _frozen_setup(cfg)
    target = cfg.number("target", K.s)
    radius = cfg.number("cover_radius", 0.0)
    centers = frozen_solver.cover_centers(grid, loc.x0, radius, loc.R)
    rep = frozen_solver.bootstrap_regularity(K, u, None, target, centers, loc.R,
                                             p=cfg.number("p", 2.0),
                                             max_rungs=cfg.number("max_rungs", 6, integer=True))
    art.csv("ladder.csv", ["rung", "t", "t_tilde", "p", "q", "center", "seminorm", "direct_seminorm",
                           "iterations", "rate", "plateau_error", "differentiated"],
            ([r.rung, r.t, r.t_tilde, r.p, r.q, " ".join(fmt(c) for c in r.center), r.seminorm,
              r.direct_seminorm, r.iterations, r.rate, r.plateau_error, r.differentiated] for r in rep.rows))
    art.text("report.txt", [("command", "bootstrap"), ("R", rep.R), ("balls", len(centers)),
                            ("rungs", len(rep.orders))])
    return EXIT_OK


def cmd_plap(cfg: RunConfig, art: Artifacts) -> int:
    action = cfg.action
    p = cfg.number("p", 4.0)
    s = cfg.number("s", 0.9, lo=0.0, hi=1.0)
    if action == "identity":
        grid = cfg.grid()
        u = cfg.field_fn("field", grid) if cfg.get("field") is not None else bandlimited_field(grid, 3, cfg.seed, "plap-u")
        count = cfg.number("probes", 200, integer=True)
        rng = make_rng(cfg.seed, "plap-identity")
        x = rng.uniform(-0.5, 0.5, (count, grid.n))
        y = rng.uniform(-0.5, 0.5, (count, grid.n))
        t = rng.uniform(-0.25, 0.25, (count, grid.n))
        res = plap_lab.ftc_residuals(u, p, x, y, t, s)
        art.csv("identity.csv", ["probe", "residual"], ([i, r] for i, r in enumerate(res)))
        scalar = plap_lab.c_p(p) * float(plap_lab.t_average(0.0, 1.0, p))
        art.text("report.txt", [("command", "plap identity"), ("p", p), ("c_p", plap_lab.c_p(p)),
                                ("max_residual", float(res.max())), ("scalar_lhs", 1.0), ("scalar_rhs", scalar)])
        return EXIT_OK if res.max() < 1e-9 else EXIT_FAIL
    if action == "certificate":
        grid = cfg.grid()
        u = cfg.field_fn("field", grid)
        x0 = cfg.get("x0", [0.0] * grid.n)
        tau = cfg.get("tau", [0.0] * grid.n)
        cert = plap_lab.cone_certificate(u, x0, tau, p, cfg.number("sigma_angle", 0.5), s=s, seed=cfg.seed)
        art.csv("continuity.csv", ["lambda", "oscillation"], cert.continuity.table)
        art.text("certificate.txt", [("p", p), ("grad", ",".join(fmt(g) for g in cert.grad)),
                                     ("sigma", json.dumps(cert.sigma.describe(), sort_keys=True)),
                                     ("eta_eff", cert.eta_eff), ("passed", cert.passed)])
        return EXIT_OK if cert.passed else EXIT_FAIL
    if action == "bootstrap":
        grid = cfg.grid()
        u = cfg.field_fn("field", grid)
        x0 = tuple(cfg.get("x0", [0.0] * grid.n))
        R = cfg.get("R")
        R = frozen_solver.admissible_R(grid) if R is None else cfg.number("R")
        taus = cfg.get("taus", [1.0 / grid.N, 2.0 / grid.N])
        try:
            pc = plap_lab.PlapConfig(p, s, tuple([float(max(taus))] + [0.0] * (grid.n - 1)), x0, R)
        except ValueError as exc:
            raise cfg.error("taus", str(exc)) from None
        rep = plap_lab.bootstrap_hoelder(u, None, pc, taus, max_rungs=cfg.number("max_rungs", 2, integer=True))
        art.csv("quotients.csv", ["tau", "rung", "order", "norm", "hoelder", "quotient_s", "quotient_alpha",
                                  "quotient_one", "rate"],
                ([r.tau, r.rung, r.order, r.norm, r.hoelder, r.quotient_s, r.quotient_alpha, r.quotient_one,
                  r.rate] for r in rep.rows))
        art.text("report.txt", [("command", "plap bootstrap"), ("beta", rep.beta),
                                ("sup_quotient_s", rep.sup_quotient_s), ("sup_quotient_one", rep.sup_quotient_one)])
        return EXIT_OK
    raise ConfigError(f"plap needs an action in {PLAP_ACTIONS}")


def _report_rows(reports):
    for N, r in reports:
        yield [r.name, N, r.lhs, r.rhs, r.implied, r.passed, json.dumps(r.rhs_terms, sort_keys=True), r.digest]


def cmd_verify(cfg: RunConfig, art: Artifacts) -> int:
    action = cfg.action
    Ns = [int(v) for v in cfg.get("refine", [32, 64])]
    n = cfg.number("grid.n", 1, integer=True)
    s = cfg.number("s", 0.5, lo=0.0, hi=1.0)
    reports: list[tuple[int, Any]] = []
    if action == "coercivity":
        for N in Ns:
            grid = TorusGrid(n, N)
            K = cfg.kernel(n)
            probes = [bandlimited_field(grid, 3, cfg.seed, f"coercivity-{i}") for i in range(8)]
            reports.append((N, estimate_verifier.verify_coercivity_form(K, K.s, probes, grid)))
    elif action in ("caccioppoli", "linfty", "log", "poincare"):
        for N in Ns:
            suite = estimate_verifier.run_suite(N, n, s, cfg.seed)
            reports += [(N, r) for r in suite[action]]
    else:
        raise ConfigError(f"verify needs an action in {VERIFY_ACTIONS}")
    art.csv("reports.csv", ["name", "N", "lhs", "rhs", "implied", "passed", "rhs_terms", "digest"],
            _report_rows(reports))
    by_case: dict[int, list] = {}
    for N, r in reports:
        by_case.setdefault(N, []).append(r)
    limit = cfg.number("drift_limit", estimate_verifier.DRIFT_LIMIT, lo=0.0)
    drift, ok = 0.0, all(r.passed for _, r in reports)
    cases = list(by_case.values())
    for col in zip(*cases):
        d, o = estimate_verifier.refinement_check(list(col), limit)
        drift, ok = max(drift, d), ok and o
    art.text("report.txt", [("command", f"verify {action}"), ("refinements", " ".join(str(N) for N in Ns)),
                            ("max_drift", drift), ("drift_limit", limit), ("passed", ok)])
    return EXIT_OK if ok else EXIT_FAIL


def cmd_norms(cfg: RunConfig, art: Artifacts) -> int:
    grid = cfg.grid()
    f = cfg.field_fn("field", grid)
    orders = cfg.get("norm_orders", [[0.5, 2.0]])
    rows = [["L2", 0.0, 2.0, lp_norm(f, 2), "", ""], ["Linf", 0.0, float("inf"), lp_norm(f, np.inf), "", ""]]
    for o in orders:
        try:
            sig, p = float(o[0]), float(o[1])
        except (TypeError, ValueError, IndexError):
            raise cfg.error("norm_orders", f"entries must be [order, exponent], got {o!r}") from None
        mode = cfg.get("mode", "exact")
        est = gagliardo_estimate(f, sig, p, mode=mode, samples=cfg.number("samples", 100000, integer=True),
                                 seed=cfg.seed)
        rows.append(["gagliardo", sig, p, est.value, est.cube_value if est.cube_value is not None else "",
                     est.variance_flag])
        if f.mean() == 0 or sig > 0:
            rows.append(["bessel", sig, p, bessel_seminorm(f, sig, p), "", ""])
    art.csv("norms.csv", ["kind", "order", "p", "value", "cube_value", "variance_flag"], rows)
    return EXIT_OK


HANDLERS = {
    "symbol": cmd_symbol,
    "coercivity": cmd_coercivity,
    "solve-const": cmd_solve_const,
    "solve-frozen": cmd_solve_frozen,
    "bootstrap": cmd_bootstrap,
    "plap": cmd_plap,
    "verify": cmd_verify,
    "norms": cmd_norms,
}


def run(cfg: RunConfig) -> int:
    art = Artifacts(cfg.out)
    code = HANDLERS[cfg.command](cfg, art)
    art.manifest(cfg.command + (f" {cfg.action}" if cfg.action else ""),
                 {EXIT_OK: "pass", EXIT_FAIL: "fail"}.get(code, "error"))
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nonlocal-torus", description="Nonlocal operators on the flat torus.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("action", nargs="?", default=None)
    ap.add_argument("--config", help="YAML run configuration")
    ap.add_argument("--out", default="out", help="output directory")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--kernel", help="YAML file with the kernel spec")
    ap.add_argument("--rhs", help="field file stem for the right side")
    ap.add_argument("--field", help="field file stem")
    ap.add_argument("--s", type=float)
    ap.add_argument("--p", type=float)
    ap.add_argument("--n", type=int)
    ap.add_argument("--N", type=int)
    ap.add_argument("--orders", help='e.g. "s=0.4,s1=0.6,s2=0.2,p=4"')
    ap.add_argument("--R", type=float)
    ap.add_argument("--x0", help="comma-separated base point")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        kernel = None
        if args.kernel:
            try:
                kernel = yaml.safe_load(Path(args.kernel).read_text())
            except (OSError, yaml.YAMLError) as exc:
                raise ConfigError(f"cannot load kernel file: {exc}", field="kernel") from None
        x0 = None if args.x0 is None else [float(v) for v in args.x0.split(",")]
        overrides = {"seed": args.seed, "kernel": kernel, "rhs": args.rhs and {"file": args.rhs},
                     "field": args.field and {"file": args.field}, "s": args.s, "p": args.p, "grid.n": args.n,
                     "grid.N": args.N, "orders": args.orders, "localization.R": args.R, "R": args.R,
                     "localization.x0": x0, "x0": x0}
        if args.command == "plap" and args.action not in PLAP_ACTIONS:
            raise ConfigError(f"plap needs an action in {PLAP_ACTIONS}")
        if args.command == "verify" and args.action not in VERIFY_ACTIONS:
            raise ConfigError(f"verify needs an action in {VERIFY_ACTIONS}")
        cfg = load_config(args.config, args.command, args.action, args.out, overrides)
        return run(cfg)
    except (NonlocalError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
