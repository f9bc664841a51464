"""Command-line front end: ``polyrad {bound,estimate,verify,sweep,curve}``.

Every subcommand reads one flat JSON config (see :class:`RunConfig`), is
deterministic given the config and ``--seed``, and writes its output in a
single pass at the end.  Exit codes: 0 success, 2 config error, 3
verification failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import verify as verify_mod
from .bounds import (
    BoundReport,
    depth_dependent_bound,
    depth_independent_bound,
    gamma_of_net,
    min_ratio_bound,
    perturbation_bound,
    prior_bound_exponential,
    prior_bound_spectral,
    r_dependent_bound,
)
from .norms import as_exponent, matrix_norm_qp
from .polynet import ClassSpec, PolyNet, constraint_threshold, sample_feasible_net, sample_inputs
from .rademacher import OptimizerConfig, estimate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERIFY = 3

ESTIMATE_COLUMNS = (
    "d", "k", "q", "p", "m", "B", "Mprod", "mean", "stderr",
    "depth_dep_bound", "depth_indep_bound", "violation_flag",
)
SWEEP_COLUMNS = (
    "d", "d_eff", "k", "q", "p", "m", "B", "Mprod", "Gamma",
    "depth_dep_bound", "depth_indep_bound", "depth_free_term", "sqrt_d_over_m_term", "branch",
    "r_dep_bound", "best_r", "prior_exponential", "prior_spectral",
    "mean", "stderr", "violation_flag",
)
CURVE_COLUMNS = ("k", "threshold")
VERIFY_COLUMNS = ("suite", "checks", "failures", "passed")
BOUND_NAMES = (
    "depth_dependent", "depth_independent", "perturbation", "min_ratio",
    "r_dependent", "prior_exponential", "prior_spectral",
)


class ConfigError(ValueError):
    """Malformed or inconsistent configuration (exit code 2)."""


@dataclass
class RunConfig:
    """Flat JSON run configuration.

    ``budgets`` default to the canonical ``M(1) = 1/(2B)``, ``M(j) = 2^(k-1)``;
    ``xs`` default to ``m`` points drawn from the L_p ball of radius ``B``.
    """

    dims: list = field(default_factory=lambda: [3, 3, 1])
    k: int = 2
    q: object = 2
    p: object = 2
    B: float = 1.0
    budgets: list | None = None
    Gamma: float | None = None
    gamma_loss: float = 1.0
    c: float = 1.0
    m: int = 40
    xs: list | None = None
    rad_prefix: list | None = None
    seed: int = 0
    draws: int = 200
    steps: int = 500
    step_size: float = 0.05
    restarts: int = 8
    chunk: int = 64
    workers: int = 1
    # sweep axes
    sweep_d: list = field(default_factory=list)
    sweep_k: list = field(default_factory=list)
    sweep_m: list = field(default_factory=list)
    sweep_width: int = 3
    sweep_Mprod: float | None = None
    sweep_estimate: bool = False
    d_rule: str = "axis"
    # verify
    verify_k: list = field(default_factory=lambda: [2, 3])
    verify_nets: int = 20
    verify_samples: int = 2000
    verify_matrices: int = 100
    # curve
    kmax: int = 10
    out: str | None = None


_INT_FIELDS = {"k", "m", "seed", "draws", "steps", "restarts", "chunk", "workers", "sweep_width",
               "verify_nets", "verify_samples", "verify_matrices", "kmax"}
_FLOAT_FIELDS = {"B", "gamma_loss", "c", "step_size"}


def _exponent_value(value, name):
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity"):
            return math.inf
        try:
            value = float(value)
        except ValueError:
            raise ConfigError(f"field '{name}': cannot parse exponent {value!r}") from None
    try:
        as_exponent(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field '{name}': {exc}") from None
    return value


def _check_int(name, value):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"field '{name}': expected an integer, got {value!r}")
    return value


def _check_number(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"field '{name}': expected a finite number, got {value!r}")
    return float(value)


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse a JSON document into a :class:`RunConfig`, with line/field diagnostics."""
    try:
        raw = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{source}: top level must be a JSON object")
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"{source}: unknown field(s) {', '.join(map(repr, unknown))}")
    for name in _INT_FIELDS & raw.keys():
        _check_int(name, raw[name])
    for name in _FLOAT_FIELDS & raw.keys():
        raw[name] = _check_number(name, raw[name])
    for name in ("q", "p"):
        if name in raw:
            raw[name] = _exponent_value(raw[name], name)
    for name in ("Gamma", "sweep_Mprod"):
        if raw.get(name) is not None:
            raw[name] = _check_number(name, raw[name])
    for name in ("dims", "sweep_d", "sweep_k", "sweep_m", "verify_k"):
        if name in raw:
            if not isinstance(raw[name], list):
                raise ConfigError(f"field '{name}': expected a list")
            for v in raw[name]:
                _check_int(name, v)
    for name in ("budgets", "rad_prefix"):
        if raw.get(name) is not None:
            if not isinstance(raw[name], list):
                raise ConfigError(f"field '{name}': expected a list")
            raw[name] = [_check_number(name, v) for v in raw[name]]
    if raw.get("d_rule", "axis") not in ("axis", "cube_root"):
        raise ConfigError("field 'd_rule': expected 'axis' or 'cube_root'")
    return RunConfig(**raw)


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, path)


# -- shared helpers --------------------------------------------------------------


def class_spec(cfg: RunConfig, dims=None, k=None) -> ClassSpec:
    dims = list(cfg.dims if dims is None else dims)
    k = cfg.k if k is None else k
    try:
        if cfg.budgets is None:
            return ClassSpec.canonical(dims, k, cfg.q, cfg.p, cfg.B, cfg.Gamma)
        return ClassSpec(tuple(dims), k, cfg.q, cfg.p, cfg.B, tuple(cfg.budgets), cfg.Gamma)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid class: {exc}") from None


def _input_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), 1]))


def _net_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), 2]))


def sample_points(cfg: RunConfig, spec: ClassSpec, m: int | None = None) -> np.ndarray:
    if cfg.xs is not None and m is None:
        X = np.asarray(cfg.xs, dtype=float)
        if X.ndim != 2 or X.shape[1] != spec.dims[0]:
            raise ConfigError(f"field 'xs': expected {spec.dims[0]} coordinates per point")
        return X
    m = cfg.m if m is None else m
    if m < 1:
        raise ConfigError("field 'm': need at least one input point")
    return sample_inputs(m, spec.dims[0], spec.p, spec.B, _input_rng(cfg.seed))


def resolve_gamma(cfg: RunConfig, spec: ClassSpec) -> tuple[float, str]:
    """Configured Gamma, else ``gamma_of_net`` of a net sampled on the budget spheres."""
    if spec.gamma is not None:
        return spec.gamma, "config"
    net = sample_feasible_net(spec, 1.0, _net_rng(cfg.seed)) if spec.is_canonical else _boundary_net(spec, cfg.seed)
    g = gamma_of_net(net, spec.q)
    if not g > 0:
        raise ConfigError("sampled boundary net has Gamma = 0; supply 'Gamma'")
    return g, "sampled_boundary_net"


def _boundary_net(spec: ClassSpec, seed: int):
    # same construction as sample_feasible_net without the canonical requirement
    rng = _net_rng(seed)
    weights = []
    for j, budget in enumerate(spec.budgets):
        W = rng.standard_normal((spec.dims[j + 1], spec.dims[j]))
        weights.append(W * (budget / matrix_norm_qp(W, spec.q, spec.p)))
    return PolyNet(tuple(weights), spec.k)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.17g" % float(v)
    return str(v)


def write_csv(path: str | None, columns, rows, append: bool = False, stdout=None) -> None:
    """Write rows with a stable header; ``append`` never rewrites existing rows."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    new_file = path is None or not append or not os.path.exists(path) or os.path.getsize(path) == 0
    if new_file:
        writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    if path is None:
        (stdout or sys.stdout).write(buf.getvalue())
        return
    if append and not new_file:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n").split(",")
        if header != list(columns):
            raise ConfigError(f"{path}: existing header does not match {','.join(columns)}")
    with open(path, "a" if append else "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def _exp_str(e) -> str:
    return str(as_exponent(e))


# -- bound -----------------------------------------------------------------------


def compute_bounds(cfg: RunConfig) -> dict:
    spec = class_spec(cfg)
    X = sample_points(cfg, spec)
    m, d = X.shape[0], spec.depth
    if m <= 1:
        raise ConfigError("field 'm': the depth-independent bound needs m > 1")
    gamma, source = resolve_gamma(cfg, spec)
    mprod = spec.budget_product
    if gamma > mprod * (1 + 1e-12):
        raise ConfigError(f"Gamma={gamma} exceeds Mprod={mprod}")
    dep = depth_dependent_bound(spec.budgets, X, spec.p)
    indep = depth_independent_bound(spec.B, mprod, gamma, cfg.gamma_loss, m, d, cfg.c)

    # class-level worst case: prod ||W_j||_{q,p} <= prod M(j)
    rows = []
    for r in range(1, d + 1):
        exact = perturbation_bound(spec.B, mprod, spec.p, mprod, gamma, r, "exact")
        log_form = perturbation_bound(spec.B, mprod, spec.p, mprod, gamma, r, "paper")
        rows.append({
            "r": r, "log_form": log_form.value, "exact": exact.value, "z": log_form.details["z"],
            "inequality_a_domain": log_form.flags["inequality_a_domain"],
        })
    best = min(rows, key=lambda row: row["log_form"])
    pert = BoundReport(
        "perturbation", best["log_form"],
        {"B": spec.B, "prod_qp": mprod, "p": spec.p, "Mprod": mprod, "Gamma": gamma},
        flags={"inequality_a_domain_all_r": all(row["inequality_a_domain"] for row in rows)},
        details={"table": rows, "best_r": best["r"]},
    )
    ratios = [{"r": r, "value": min_ratio_bound(mprod, gamma, r)} for r in range(1, d + 1)]
    ratio = BoundReport("min_ratio", ratios[-1]["value"], {"Mprod": mprod, "Gamma": gamma}, details={"table": ratios})

    if cfg.rad_prefix is not None:
        rad_prefix, rad_source = list(cfg.rad_prefix), "config"
    else:
        rad_prefix = [depth_dependent_bound(spec.budgets[:r], X, spec.p).value for r in range(1, d + 1)]
        rad_source = "prefix_depth_dependent_bound"
    try:
        rdep = r_dependent_bound(spec.B, spec.budgets, gamma, cfg.gamma_loss, m, rad_prefix, spec.p, cfg.c)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    rdep.details["rad_prefix_source"] = rad_source

    net = sample_feasible_net(spec, 1.0, _net_rng(cfg.seed)) if spec.is_canonical else _boundary_net(spec, cfg.seed)
    spectral = [float(np.linalg.norm(W, 2)) for W in net.weights]
    pexp = BoundReport(
        "prior_exponential", prior_bound_exponential(spec.B, spec.budgets, d, m),
        {"B": spec.B, "budgets_F": list(spec.budgets), "d": d, "m": m},
    )
    pspec = BoundReport(
        "prior_spectral", prior_bound_spectral(spec.B, spectral, d, m),
        {"B": spec.B, "spectral_norms": spectral, "d": d, "m": m},
        details={"spectral_norms_source": "sampled_boundary_net"},
    )
    reports = [dep, indep, pert, ratio, rdep, pexp, pspec]
    for rep in reports:
        rep.flags.setdefault("nonnegative", rep.value >= 0)
    return {
        "class": {"dims": list(spec.dims), "k": spec.k, "q": _exp_str(spec.q), "p": _exp_str(spec.p),
                  "B": spec.B, "budgets": list(spec.budgets), "m": m, "seed": cfg.seed},
        "Gamma": gamma,
        "gamma_source": source,
        "reports": [rep.to_dict() for rep in reports],
    }


def cmd_bound(cfg: RunConfig, out: str | None, append: bool = False) -> int:
    doc = compute_bounds(cfg)
    text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


# -- estimate --------------------------------------------------------------------


def _optimizer(cfg: RunConfig) -> OptimizerConfig:
    try:
        return OptimizerConfig(steps=cfg.steps, step_size=cfg.step_size, restarts=cfg.restarts, seed=cfg.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def estimate_row(cfg: RunConfig, spec: ClassSpec, X: np.ndarray, gamma: float | None = None) -> dict:
    if cfg.draws < 1:
        raise ConfigError("field 'draws': must be >= 1")
    try:
        est = estimate(spec, X, cfg.draws, _optimizer(cfg), chunk=cfg.chunk, workers=cfg.workers)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    m = X.shape[0]
    dep = depth_dependent_bound(spec.budgets, X, spec.p).value
    if gamma is None:
        gamma, _ = resolve_gamma(cfg, spec)
    indep = (
        depth_independent_bound(spec.B, spec.budget_product, gamma, cfg.gamma_loss, m, spec.depth, cfg.c).value
        if m > 1 and spec.budget_product >= gamma else math.nan
    )
    return {
        "d": spec.depth, "k": spec.k, "q": _exp_str(spec.q), "p": _exp_str(spec.p), "m": m, "B": spec.B,
        "Mprod": spec.budget_product, "mean": est.mean, "stderr": est.stderr,
        "depth_dep_bound": dep, "depth_indep_bound": indep,
        "violation_flag": bool(est.lower_estimate > dep),
    }


def cmd_estimate(cfg: RunConfig, out: str | None, append: bool = False) -> int:
    spec = class_spec(cfg)
    X = sample_points(cfg, spec)
    row = estimate_row(cfg, spec, X)
    write_csv(out, ESTIMATE_COLUMNS, [row], append)
    return EXIT_OK


# -- verify ----------------------------------------------------------------------


def cmd_verify(cfg: RunConfig, out: str | None, append: bool = False, break_rank1: bool = False) -> int:
    if not cfg.verify_k or any(k < 2 for k in cfg.verify_k):
        raise ConfigError("field 'verify_k': need degrees >= 2")
    suites = verify_mod.run_all(
        k_values=tuple(cfg.verify_k), n_nets=cfg.verify_nets, n_samples=cfg.verify_samples,
        n_matrices=cfg.verify_matrices, seed=cfg.seed, break_rank1=break_rank1,
    )
    stream = sys.stderr if out is None else sys.stdout
    for suite in suites:
        print(suite.line(), file=stream)
        for msg in suite.messages[:3]:
            print(f"      {msg}", file=stream)
    rows = [{"suite": s.name, "checks": s.checks, "failures": s.failures, "passed": s.passed} for s in suites]
    write_csv(out, VERIFY_COLUMNS, rows, append)
    return EXIT_OK if all(s.passed for s in suites) else EXIT_VERIFY


# -- sweep -----------------------------------------------------------------------


def _sweep_grid(cfg: RunConfig):
    if not cfg.sweep_k or not cfg.sweep_m or (cfg.d_rule == "axis" and not cfg.sweep_d):
        raise ConfigError("sweep needs nonempty 'sweep_k', 'sweep_m' and (unless d_rule='cube_root') 'sweep_d'")
    for name in ("sweep_d", "sweep_k", "sweep_m"):
        if any(v < 1 for v in getattr(cfg, name)):
            raise ConfigError(f"field '{name}': values must be positive")
    if any(k < 2 for k in cfg.sweep_k):
        raise ConfigError("field 'sweep_k': degrees must be >= 2")
    for k in cfg.sweep_k:
        for m in cfg.sweep_m:
            if cfg.d_rule == "cube_root":
                d_eff = m ** (1.0 / 3.0)
                yield max(1, int(round(d_eff))), d_eff, k, m
            else:
                for d in cfg.sweep_d:
                    yield d, float(d), k, m


def sweep_rows(cfg: RunConfig) -> list:
    rows = []
    n0 = cfg.dims[0] if cfg.dims else 3
    for d, d_eff, k, m in _sweep_grid(cfg):
        dims = [n0] + [cfg.sweep_width] * (d - 1) + [1]
        if cfg.sweep_Mprod is not None:
            each = cfg.sweep_Mprod ** (1.0 / d)
            spec_cfg = dataclasses.replace(cfg, budgets=[each] * d)
        else:
            spec_cfg = dataclasses.replace(cfg, budgets=None)
        spec = class_spec(spec_cfg, dims, k)
        X = sample_points(cfg, spec, m)
        gamma, _ = resolve_gamma(spec_cfg, spec)
        mprod = spec.budget_product
        if gamma > mprod * (1 + 1e-12):
            raise ConfigError(f"Gamma={gamma} exceeds Mprod={mprod} at d={d}, k={k}")
        if m < 2:
            raise ConfigError("field 'sweep_m': values must exceed 1")
        dep = depth_dependent_bound(spec.budgets, X, spec.p)
        indep = depth_independent_bound(spec.B, mprod, gamma, cfg.gamma_loss, m, d_eff, cfg.c)
        rad_prefix = [depth_dependent_bound(spec.budgets[:r], X, spec.p).value for r in range(1, d + 1)]
        rdep = r_dependent_bound(spec.B, spec.budgets, gamma, cfg.gamma_loss, m, rad_prefix, spec.p, cfg.c)
        row = {
            "d": d, "d_eff": d_eff, "k": k, "q": _exp_str(spec.q), "p": _exp_str(spec.p), "m": m,
            "B": spec.B, "Mprod": mprod, "Gamma": gamma,
            "depth_dep_bound": dep.value, "depth_indep_bound": indep.value,
            "depth_free_term": indep.details["depth_free_term"],
            "sqrt_d_over_m_term": indep.details["sqrt_d_over_m_term"],
            "branch": indep.details["branch"],
            "r_dep_bound": rdep.value, "best_r": rdep.details["best_r"],
            # budgets stand in for the Frobenius / spectral norm products
            "prior_exponential": prior_bound_exponential(spec.B, spec.budgets, d_eff, m),
            "prior_spectral": prior_bound_spectral(spec.B, spec.budgets, d_eff, m),
            "mean": math.nan, "stderr": math.nan, "violation_flag": False,
        }
        if cfg.sweep_estimate:
            est = estimate_row(dataclasses.replace(spec_cfg, xs=X.tolist()), spec, X, gamma)
            row.update(mean=est["mean"], stderr=est["stderr"], violation_flag=est["violation_flag"])
        rows.append(row)
    return rows


def _read_sweep(path_or_text: str, is_text: bool = False) -> list:
    fh = io.StringIO(path_or_text) if is_text else open(path_or_text, encoding="utf-8")
    with fh:
        return list(csv.DictReader(fh))


def sweep_assertions(rows: list, fixed_mprod: bool, cube_root: bool) -> list:
    """Post-hoc checks on emitted sweep rows; returns failure messages."""
    fails = []
    for row in rows:
        lo = min(float(row["depth_free_term"]), float(row["sqrt_d_over_m_term"]))
        if abs(float(row["depth_indep_bound"]) - lo) > 1e-12 * max(lo, 1e-300):
            fails.append(f"d={row['d']} m={row['m']}: depth-independent bound is not the branch minimum")
        if row["violation_flag"] == "true":
            fails.append(f"d={row['d']} k={row['k']} m={row['m']}: estimate exceeds depth-dependent bound")
    groups = {}
    for row in rows:
        groups.setdefault((row["k"], row["m"], row["q"], row["p"]), []).append(row)
    if fixed_mprod and not cube_root:
        for key, grp in groups.items():
            grp = sorted(grp, key=lambda r: float(r["d_eff"]))
            sq = [float(r["sqrt_d_over_m_term"]) for r in grp]
            if any(b <= a for a, b in zip(sq, sq[1:])):
                fails.append(f"{key}: sqrt(d/m) column not strictly increasing in d")
            if len({r["Gamma"] for r in grp}) == 1:
                after = [float(r["depth_indep_bound"]) for r in grp if r["branch"] == "depth_free"]
                if after and max(after) - min(after) > 1e-12 * max(after):
                    fails.append(f"{key}: bound not constant in d after the crossover")
                seen_free = False
                for r in grp:
                    seen_free |= r["branch"] == "depth_free"
                    if seen_free and r["branch"] != "depth_free":
                        fails.append(f"{key}: branch switches back after the crossover")
                        break
    if cube_root:
        by = {}
        for row in rows:
            by.setdefault((row["k"], row["q"], row["p"]), []).append(float(row["prior_spectral"]))
        for key, vals in by.items():
            if max(vals) - min(vals) > 1e-12 * max(vals):
                fails.append(f"{key}: spectral prior bound is not flat under d = m^(1/3)")
    return fails


def cmd_sweep(cfg: RunConfig, out: str | None, append: bool = False) -> int:
    rows = sweep_rows(cfg)
    write_csv(out, SWEEP_COLUMNS, rows, append)
    text = io.StringIO()
    write_csv(None, SWEEP_COLUMNS, rows, stdout=text)
    fails = sweep_assertions(_read_sweep(text.getvalue(), True), cfg.sweep_Mprod is not None, cfg.d_rule == "cube_root")
    for msg in fails:
        print(f"sweep check failed: {msg}", file=sys.stderr)
    return EXIT_VERIFY if fails else EXIT_OK


# -- curve -----------------------------------------------------------------------


def curve_rows(kmax: int) -> list:
    if kmax < 2:
        raise ConfigError("kmax must be >= 2")
    return [{"k": k, "threshold": constraint_threshold(k)} for k in range(2, kmax + 1)]


def cmd_curve(cfg: RunConfig, out: str | None, append: bool = False) -> int:
    write_csv(out, CURVE_COLUMNS, curve_rows(cfg.kmax), append)
    return EXIT_OK


# -- entry point -----------------------------------------------------------------

COMMANDS = {"bound": cmd_bound, "estimate": cmd_estimate, "verify": cmd_verify, "sweep": cmd_sweep, "curve": cmd_curve}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyrad", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="flat JSON RunConfig")
        sp.add_argument("--seed", type=int, help="overrides the config seed")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--append", action="store_true", help="append rows, writing the header only for a new file")
        sp.add_argument("--draws", type=int, help="overrides the config draw count")
        if name == "curve":
            sp.add_argument("--kmax", type=int, help="largest degree (default from config)")
        if name == "verify":
            sp.add_argument("--break-rank1", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.draws is not None:
            cfg.draws = args.draws
        if getattr(args, "kmax", None) is not None:
            cfg.kmax = args.kmax
        out = args.out if args.out is not None else cfg.out
        if args.command == "verify":
            return cmd_verify(cfg, out, args.append, args.break_rank1)
        return COMMANDS[args.command](cfg, out, args.append)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
