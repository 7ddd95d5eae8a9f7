"""Deterministic command-line front end.

Verbs
-----
``homothety``
    Integrate one scalar conformal-factor reduction and emit a ``t,sigma,f``
    CSV (with a closed-form comparison column when one exists).
``sweep``
    Classify the long-time behavior over a ``(kappa, mu)`` grid and emit one
    tag per grid cell, ordered by grid index.
``flow``
    Integrate the coupled metric/flux flow on an invariant geometry and emit
    the metric components and flux scale along the way.
``soliton-check``
    Evaluate every named residual of the coupled and strong systems on a
    candidate and emit a JSON report.
``verify``
    Run batch verification suites (curvature identities, divergence
    identities, soliton constructors) and emit a JSON summary.

Exit codes: 0 success, 1 configuration error, 2 numerical-domain error,
3 verification failure.  Output files are written atomically (temp file +
rename) so a failing run never leaves partial output.  Given the same
configuration and seed, outputs are byte-identical across runs on one
platform; the ``HETFLOW_THREADS`` environment variable caps sweep
parallelism without changing output bytes.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import chart_jets as cj
from . import het_flow as hf
from . import homogeneous as hg
from . import homothety as ht
from . import soliton as so
from . import tensor_core as tc

__all__ = [
    "RunConfig",
    "ConfigError",
    "main",
    "cmd_homothety",
    "cmd_sweep",
    "cmd_flow",
    "cmd_soliton_check",
    "cmd_verify",
]

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DOMAIN = 2
EXIT_VERIFY = 3


class ConfigError(Exception):
    """Malformed configuration: unknown keys, bad values, missing files."""


@dataclass(frozen=True)
class RunConfig:
    """Validated inputs of one CLI invocation.

    All numerics must be finite, grid bounds ordered, and the seed defaults
    to zero so repeated runs are reproducible by construction.
    """

    command: str
    case: str = "positive"
    algebra: str = "heisenberg"
    algebra_param: float | None = None
    kappa: float = 1.0
    mu: float = 0.0
    s: float = 0.0
    f: float | None = None
    sigma0: float = 1.0
    metric_diag: tuple | None = None
    t_min: float = 0.0
    t_max: float = 10.0
    n_points: int = 201
    kappa_min: float = 0.0
    kappa_max: float = 1.0
    kappa_steps: int = 21
    mu_min: float = 0.0
    mu_max: float = 2.0
    mu_steps: int = 21
    rtol: float = 1e-10
    atol: float = 1e-12
    tol: float | None = None
    suite: str = "all"
    trials: int = 100
    seed: int = 0
    output: str | None = None

    def __post_init__(self) -> None:
        numerics = {
            "kappa": self.kappa,
            "mu": self.mu,
            "s": self.s,
            "sigma0": self.sigma0,
            "t_min": self.t_min,
            "t_max": self.t_max,
            "kappa_min": self.kappa_min,
            "kappa_max": self.kappa_max,
            "mu_min": self.mu_min,
            "mu_max": self.mu_max,
            "rtol": self.rtol,
            "atol": self.atol,
        }
        for key, value in numerics.items():
            if not np.isfinite(value):
                raise ConfigError(f"{key} must be finite, got {value!r}")
        for key, value in (("f", self.f), ("tol", self.tol), ("algebra_param", self.algebra_param)):
            if value is not None and not np.isfinite(value):
                raise ConfigError(f"{key} must be finite, got {value!r}")
        if self.kappa_min > self.kappa_max or self.mu_min > self.mu_max:
            raise ConfigError("grid bounds must be ordered (min <= max)")
        if self.kappa_steps < 1 or self.mu_steps < 1:
            raise ConfigError("grid steps must be at least 1")
        if self.n_points < 2:
            raise ConfigError("n_points must be at least 2")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        if self.metric_diag is not None:
            diag = tuple(float(x) for x in self.metric_diag)
            if len(diag) != 3 or not all(np.isfinite(x) for x in diag):
                raise ConfigError("metric_diag must be three finite numbers")
            object.__setattr__(self, "metric_diag", diag)


_CONFIG_FIELDS = {f.name for f in dataclasses.fields(RunConfig)} - {"command"}


def _float_cell(x: float) -> str:
    """Shortest round-trip decimal form; deterministic on one platform."""
    return repr(float(x))


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".hetflow-", suffix=".part")
    try:
        with os.fdopen(fd, "w", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        _atomic_write(cfg.output, text)
    else:
        sys.stdout.write(text)


def _worker_count() -> int:
    raw = os.environ.get("HETFLOW_THREADS")
    if raw is None:
        return max(1, os.cpu_count() or 1)
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ConfigError(f"HETFLOW_THREADS must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise ConfigError("HETFLOW_THREADS must be at least 1")
    return min(cap, max(1, os.cpu_count() or 1))


def _algebra_from_config(cfg: RunConfig) -> hg.LieAlgebraData:
    name = cfg.algebra
    if name not in hg.CATALOG_NAMES:
        raise ConfigError(f"unknown algebra {name!r}; expected one of {hg.CATALOG_NAMES}")
    if name == "su2":
        return hg.catalog("su2", kappa=cfg.algebra_param if cfg.algebra_param is not None else 1.0)
    if name == "hyperbolic":
        return hg.catalog("hyperbolic", c=cfg.algebra_param if cfg.algebra_param is not None else 1.0)
    return hg.catalog(name)


# ---------------------------------------------------------------------------
# homothety
# ---------------------------------------------------------------------------


def _closed_form_fn(problem: ht.HomothetyProblem):
    """Closed-form sigma(t) when one exists for the problem, else ``None``."""
    if problem.sigma0 != 1.0:
        return None
    if problem.case == "flat":
        return lambda t: ht.flat_closed_form(problem.kappa, problem.mu, t)
    if problem.case == "su2":
        return lambda t: ht.su2_closed_form(problem.kappa, t)
    return None


def cmd_homothety(cfg: RunConfig) -> int:
    try:
        problem = ht.HomothetyProblem(
            case=cfg.case, kappa=cfg.kappa, mu=cfg.mu, s=cfg.s, sigma0=cfg.sigma0
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    trajectory = ht.integrate(
        problem, (cfg.t_min, cfg.t_max), rtol=cfg.rtol, atol=cfg.atol, n_points=cfg.n_points
    )
    closed = _closed_form_fn(problem)
    header = ["t", "sigma", "f"]
    if closed is not None:
        header.append("sigma_closed")
    lines = [",".join(header)]
    f_vals = trajectory.f
    rows = list(zip(trajectory.t, trajectory.sigma, f_vals))
    for event in trajectory.events:
        mu_eff = 0.0 if problem.case == "su2" else problem.mu
        rows.append((event.t, event.sigma, mu_eff * max(event.sigma, 1e-300) ** -1.5))
    for t, sigma, f_val in rows:
        cells = [_float_cell(t), _float_cell(sigma), _float_cell(f_val)]
        if closed is not None:
            try:
                cells.append(_float_cell(closed(float(t))))
            except (ValueError, OverflowError):
                cells.append("")
        lines.append(",".join(cells))
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.case not in ("positive", "flat", "negative", "su2"):
        raise ConfigError(f"sweep case must be positive/flat/negative/su2, got {cfg.case!r}")
    kappas = np.linspace(cfg.kappa_min, cfg.kappa_max, cfg.kappa_steps)
    mus = np.linspace(cfg.mu_min, cfg.mu_max, cfg.mu_steps)
    tags = ht.sweep_grid(cfg.case, kappas, mus, max_workers=_worker_count())
    lines = ["i,j,kappa,mu,tag"]
    for i, kap in enumerate(kappas):
        for j, mu in enumerate(mus):
            lines.append(
                f"{i},{j},{_float_cell(kap)},{_float_cell(mu)},{tags[i, j].value}"
            )
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# flow
# ---------------------------------------------------------------------------


def cmd_flow(cfg: RunConfig) -> int:
    alg = _algebra_from_config(cfg)
    diag = cfg.metric_diag if cfg.metric_diag is not None else (1.0, 1.0, 1.0)
    f0 = cfg.f if cfg.f is not None else 1.0
    state = hf.FlowState3(algebra=alg, g=np.diag(diag), f=f0, t=cfg.t_min)
    params = hf.FlowParams(
        kappa=cfg.kappa,
        t_span=(cfg.t_min, cfg.t_max),
        rtol=cfg.rtol,
        atol=cfg.atol,
        n_points=cfg.n_points,
    )
    trajectory = hf.integrate_flow(state, params)
    lines = ["t,g11,g12,g13,g22,g23,g33,f"]
    for k in range(trajectory.t.size):
        g = trajectory.g[k]
        cells = [
            _float_cell(trajectory.t[k]),
            _float_cell(g[0, 0]),
            _float_cell(g[0, 1]),
            _float_cell(g[0, 2]),
            _float_cell(g[1, 1]),
            _float_cell(g[1, 2]),
            _float_cell(g[2, 2]),
            _float_cell(trajectory.f[k]),
        ]
        lines.append(",".join(cells))
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# soliton-check
# ---------------------------------------------------------------------------


def _candidate_from_config(cfg: RunConfig) -> so.SolitonCandidate:
    if cfg.kappa <= 0.0:
        raise ConfigError("soliton-check requires kappa > 0")
    untouched = cfg.metric_diag is None and cfg.f is None
    if cfg.algebra == "heisenberg" and untouched:
        return so.heisenberg_strong_soliton(cfg.kappa)
    if cfg.algebra == "hyperbolic" and untouched and cfg.algebra_param is None:
        return so.hyperbolic_soliton(cfg.kappa)
    alg = _algebra_from_config(cfg)
    diag = cfg.metric_diag if cfg.metric_diag is not None else (1.0, 1.0, 1.0)
    f0 = cfg.f if cfg.f is not None else 1.0
    sample = hg.build_invariant_sample(alg, np.diag(diag), f0)
    return so.SolitonCandidate(sample, cfg.kappa, name=cfg.algebra)


def cmd_soliton_check(cfg: RunConfig) -> int:
    candidate = _candidate_from_config(cfg)
    tol = cfg.tol if cfg.tol is not None else so.TOL_CONSTRUCTOR
    report = so.soliton_report(candidate, tol=tol)
    payload = report.to_json_dict()
    payload["command"] = "soliton-check"
    _emit(cfg, json.dumps(payload, indent=2) + "\n")
    return EXIT_OK if report.all_passed else EXIT_VERIFY


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _suite_identities(trials: int, seed: int) -> list[dict]:
    """Curvature-identity suite over chart and homogeneous samples."""
    names = (
        "curvature_reconstruction",
        "curvature_square_expansion",
        "curvature_norm_expansion",
        "twisted_square_expansion",
        "twisted_norm_expansion",
    )
    worst = {name: 0.0 for name in names}
    for k in range(trials):
        for sample in (
            cj.random_chart_sample(seed + k, maxwell=bool(k % 2)),
            hg.random_invariant_sample(seed + k),
        ):
            g, ric, scal = sample.g, sample.ricci, sample.scalar
            rebuilt = tc.riemann_from_ricci_dim3(g, ric, scal)
            worst["curvature_reconstruction"] = max(
                worst["curvature_reconstruction"], tc.rel_err(sample.riemann, rebuilt)
            )
            worst["curvature_square_expansion"] = max(
                worst["curvature_square_expansion"],
                tc.rel_err(
                    tc.riemann_square(g, sample.riemann), tc.riemann_square_dim3(g, ric, scal)
                ),
            )
            worst["curvature_norm_expansion"] = max(
                worst["curvature_norm_expansion"],
                tc.rel_err(
                    tc.riemann_norm2(g, sample.riemann), tc.riemann_norm2_dim3(g, ric, scal)
                ),
            )
            worst["twisted_square_expansion"] = max(
                worst["twisted_square_expansion"],
                tc.rel_err(
                    sample.riemann_tw_sq,
                    tc.riemann_square_twisted_dim3(
                        g, ric, scal, sample.f, sample.df, sample.orientation
                    ),
                ),
            )
            worst["twisted_norm_expansion"] = max(
                worst["twisted_norm_expansion"],
                tc.rel_err(
                    sample.riemann_tw_norm2,
                    tc.riemann_norm2_twisted_dim3(g, ric, scal, sample.f, sample.df),
                ),
            )
    return [
        {"name": name, "worst": worst[name], "tol": 1e-9, "pass": worst[name] <= 1e-9}
        for name in names
    ]


def _suite_divergence(trials: int, seed: int) -> list[dict]:
    """Divergence-identity suite over chart samples with nonconstant f, phi."""
    rng = np.random.default_rng(seed)
    worst = {"div_curvature_square": 0.0, "div_torsion_square": 0.0, "div_einstein_map": 0.0}
    for k in range(trials):
        kappa = float(rng.uniform(0.05, 3.0))
        sample = cj.random_chart_sample(seed + k, maxwell=bool(k % 2))
        report = so.verify_divergence_identities(sample, kappa)
        for name, eq in report.equations.items():
            worst[name] = max(worst[name], eq.value)
    return [
        {"name": name, "worst": value, "tol": 1e-8, "pass": value <= 1e-8}
        for name, value in worst.items()
    ]


def _suite_solitons(trials: int, seed: int) -> list[dict]:
    """Constructor suite: residuals, classification round-trip, stationarity."""
    rng = np.random.default_rng(seed)
    worst_resid = 0.0
    worst_disc = 0.0
    worst_rhs = 0.0
    cases_ok = True
    for _ in range(trials):
        kappa = float(rng.uniform(0.2, 5.0))
        for make, case_expected in (
            (so.heisenberg_strong_soliton, 1),
            (so.hyperbolic_soliton, 3),
        ):
            candidate = make(kappa)
            report = so.soliton_report(candidate)
            worst_resid = max(worst_resid, max(eq.value for eq in report.equations.values()))
            _, disc = so.residual_quadratic_form(candidate)
            worst_disc = max(worst_disc, abs(disc - 1.0))
            sample = candidate.sample
            alg = _algebra_for_sample(sample)
            match = so.classify_constant_dilaton(alg, sample.g, kappa)
            if match.case != case_expected:
                cases_ok = False
            g_dot, f_dot = hf.rhs_3d(
                hf.FlowState3(algebra=alg, g=sample.g, f=sample.f), kappa=kappa
            )
            worst_rhs = max(worst_rhs, float(np.max(np.abs(g_dot))), abs(f_dot))
    return [
        {"name": "constructor_residuals", "worst": worst_resid, "tol": 1e-12,
         "pass": worst_resid <= 1e-12},
        {"name": "discriminant_unity", "worst": worst_disc, "tol": 1e-12,
         "pass": worst_disc <= 1e-12},
        {"name": "classification_roundtrip", "worst": 0.0 if cases_ok else 1.0, "tol": 0.0,
         "pass": cases_ok},
        {"name": "stationarity", "worst": worst_rhs, "tol": 1e-10, "pass": worst_rhs <= 1e-10},
    ]


def _algebra_for_sample(sample) -> hg.LieAlgebraData:
    meta = sample.meta or {}
    name = meta.get("algebra")
    if name is None:
        raise ValueError("sample carries no algebra tag")
    params = {k: v for k, v in meta.items() if k != "algebra"}
    return hg.catalog(name, **params)


_SUITES = {
    "identities": _suite_identities,
    "divergence": _suite_divergence,
    "solitons": _suite_solitons,
}


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.suite not in (*_SUITES, "all"):
        raise ConfigError(
            f"unknown suite {cfg.suite!r}; expected one of {tuple(_SUITES)} or 'all'"
        )
    selected = tuple(_SUITES) if cfg.suite == "all" else (cfg.suite,)
    checks = []
    for name in selected:
        for check in _SUITES[name](cfg.trials, cfg.seed):
            checks.append({"suite": name, **check})
    all_pass = all(check["pass"] for check in checks)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "suite": cfg.suite,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "checks": checks,
        "all_pass": all_pass,
    }
    _emit(cfg, json.dumps(payload, indent=2) + "\n")
    return EXIT_OK if all_pass else EXIT_VERIFY


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors map to the config exit code."""

    def error(self, message: str):  # noqa: D102 - argparse hook
        raise ConfigError(message)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON file with defaults; flags override it")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--output", help="output path (atomic write); stdout when omitted")


def _build_parser() -> _Parser:
    parser = _Parser(prog="hetflow", description=__doc__, add_help=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("homothety", argument_default=argparse.SUPPRESS,
                       help="integrate one conformal-factor reduction")
    p.add_argument("--case", choices=("positive", "flat", "negative", "su2", "general"))
    p.add_argument("--kappa", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--s", type=float)
    p.add_argument("--sigma0", type=float)
    p.add_argument("--t-min", dest="t_min", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--n-points", dest="n_points", type=int)
    p.add_argument("--rtol", type=float)
    p.add_argument("--atol", type=float)
    _add_common(p)

    p = sub.add_parser("sweep", argument_default=argparse.SUPPRESS,
                       help="classify behavior over a (kappa, mu) grid")
    p.add_argument("--case", choices=("positive", "flat", "negative", "su2"))
    p.add_argument("--kappa-min", dest="kappa_min", type=float)
    p.add_argument("--kappa-max", dest="kappa_max", type=float)
    p.add_argument("--kappa-steps", dest="kappa_steps", type=int)
    p.add_argument("--mu-min", dest="mu_min", type=float)
    p.add_argument("--mu-max", dest="mu_max", type=float)
    p.add_argument("--mu-steps", dest="mu_steps", type=int)
    _add_common(p)

    p = sub.add_parser("flow", argument_default=argparse.SUPPRESS,
                       help="integrate the coupled flow on an invariant geometry")
    p.add_argument("--algebra", choices=hg.CATALOG_NAMES)
    p.add_argument("--algebra-param", dest="algebra_param", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--f", type=float)
    p.add_argument("--metric-diag", dest="metric_diag", type=float, nargs=3)
    p.add_argument("--t-min", dest="t_min", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--n-points", dest="n_points", type=int)
    p.add_argument("--rtol", type=float)
    p.add_argument("--atol", type=float)
    _add_common(p)

    p = sub.add_parser("soliton-check", argument_default=argparse.SUPPRESS,
                       help="evaluate all soliton residuals on a candidate")
    p.add_argument("--algebra", choices=hg.CATALOG_NAMES)
    p.add_argument("--algebra-param", dest="algebra_param", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--f", type=float)
    p.add_argument("--metric-diag", dest="metric_diag", type=float, nargs=3)
    p.add_argument("--tol", type=float)
    _add_common(p)

    p = sub.add_parser("verify", argument_default=argparse.SUPPRESS,
                       help="run batch verification suites")
    p.add_argument("--suite", choices=(*_SUITES, "all"))
    p.add_argument("--trials", type=int)
    p.add_argument("--tol", type=float)
    _add_common(p)

    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


def _config_from_args(ns: argparse.Namespace) -> RunConfig:
    merged: dict = {}
    raw = vars(ns)
    if raw.get("config"):
        merged.update(_load_config_file(raw["config"]))
    merged.update({k: v for k, v in raw.items() if k not in ("config", "command")})
    unknown = set(merged) - _CONFIG_FIELDS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "metric_diag" in merged and merged["metric_diag"] is not None:
        merged["metric_diag"] = tuple(merged["metric_diag"])
    try:
        return RunConfig(command=ns.command, **merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


_COMMANDS = {
    "homothety": cmd_homothety,
    "sweep": cmd_sweep,
    "flow": cmd_flow,
    "soliton-check": cmd_soliton_check,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
        cfg = _config_from_args(ns)
        return _COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, RuntimeError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical-domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
