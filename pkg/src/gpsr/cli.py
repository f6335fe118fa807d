"""Batch command-line front end.

Subcommands: ``count``, ``bound``, ``rademacher``, ``evolve``,
``experiment``. Tables are CSV, reports flat JSON; every artifact
directory carries the fully resolved configuration (``key = value``
lines), and re-running from that echo reproduces the outputs
byte-identically.

Exit codes: 0 success, 2 usage or configuration error, 3 guard violation.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import counting
from .complexity import (
    ComplexityConstants,
    assemble_bound,
    dudley_fixed_structure_bound,
    dudley_integral_bound,
    finite_union_bound,
    rademacher_exact,
    rademacher_mc_fixed,
)
from .datasets import load_csv, synthesize
from .errors import (
    ConfigError,
    GuardViolation,
    InvalidConfidenceError,
    MissingArtifactError,
    ParseError,
    SchemaError,
)
from .evolution import GpConfig, GenStats, evolve
from .intervals import certify_G, is_rejected
from .sampling import rng_for
from .trees import Budget, Vocabulary, measure, parse, serialize

__all__ = ["main"]

COUNT_MAX_S = 1000
COUNT_MAX_D = 50
EXIT_USAGE = 2
EXIT_GUARD = 3


# --- config files: `key = value` lines, '#' comments, namespaced keys ---

def read_config_file(path: str) -> dict[str, str]:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    out: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _get(cfg: dict, key: str, default, caster):
    if key not in cfg:
        return default
    raw = cfg[key]
    try:
        return caster(raw)
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r} ({exc})") from None


def _as_bool(raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _as_names(raw: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in raw.split(",") if s.strip())


def _as_fixed(raw: str) -> tuple[tuple[str, float], ...]:
    out = []
    for item in _as_names(raw):
        if "=" not in item:
            raise ValueError(f"fixed constant {item!r} must look like name=value")
        name, value = item.split("=", 1)
        out.append((name.strip(), float(value)))
    return tuple(out)


def _as_domain(raw: str) -> list[tuple[float, float]]:
    out = []
    for item in _as_names(raw):
        lo, hi = item.split(":")
        out.append((float(lo), float(hi)))
    return out


def build_vocab(cfg: dict) -> Vocabulary:
    default = Vocabulary()
    return Vocabulary(
        unary_ops=_get(cfg, "vocab.unary", default.unary_ops, _as_names),
        binary_ops=_get(cfg, "vocab.binary", default.binary_ops, _as_names),
        variables=_get(cfg, "vocab.variables", default.variables, int),
        fixed_constants=_get(cfg, "vocab.fixed", default.fixed_constants, _as_fixed),
    )


def build_budget(cfg: dict) -> Budget:
    return Budget(
        max_size=_get(cfg, "budget.size", 25, int),
        max_depth=_get(cfg, "budget.depth", 6, int),
        radius=_get(cfg, "budget.radius", 5.0, float),
    )


def build_consts(cfg: dict) -> ComplexityConstants:
    default = ComplexityConstants()
    return ComplexityConstants(
        c_dudley=_get(cfg, "consts.c_dudley", default.c_dudley, float),
        c_par=_get(cfg, "consts.c_par", default.c_par, float),
        a_sym=_get(cfg, "consts.a_sym", default.a_sym, float),
        b_conf=_get(cfg, "consts.b_conf", default.b_conf, float),
    )


def build_gp_config(cfg: dict, seed_override: int | None = None) -> GpConfig:
    default = GpConfig()
    gp = GpConfig(
        population_size=_get(cfg, "gp.population_size", default.population_size, int),
        generations=_get(cfg, "gp.generations", default.generations, int),
        tournament_size=_get(cfg, "gp.tournament_size", default.tournament_size, int),
        crossover_rate=_get(cfg, "gp.crossover_rate", default.crossover_rate, float),
        mutation_rate=_get(cfg, "gp.mutation_rate", default.mutation_rate, float),
        constant_jitter_rate=_get(cfg, "gp.constant_jitter_rate",
                                  default.constant_jitter_rate, float),
        parsimony=_get(cfg, "gp.parsimony", default.parsimony, str),
        parsimony_alpha=_get(cfg, "gp.parsimony_alpha", default.parsimony_alpha, float),
        bound_lambda=_get(cfg, "gp.bound_lambda", default.bound_lambda, float),
        constant_opt=_get(cfg, "gp.constant_opt", default.constant_opt, str),
        constant_opt_iters=_get(cfg, "gp.constant_opt_iters",
                                default.constant_opt_iters, int),
        constant_opt_top_k=_get(cfg, "gp.constant_opt_top_k",
                                default.constant_opt_top_k, int),
        linear_scaling=_get(cfg, "gp.linear_scaling", default.linear_scaling, _as_bool),
        interval_screening=_get(cfg, "gp.interval_screening",
                                default.interval_screening, _as_bool),
        delta=_get(cfg, "gp.delta", default.delta, float),
        tau=_get(cfg, "gp.tau", default.tau, float),
        seed=_get(cfg, "gp.seed", default.seed, int),
    )
    if seed_override is not None:
        gp.seed = seed_override
    return gp.validated()


def build_dataset(cfg: dict, vocab: Vocabulary) -> Dataset:
    csv_path = cfg.get("data.csv")
    if csv_path:
        return load_csv(csv_path, split_seed=_get(cfg, "data.seed", 0, int))
    target = _get(cfg, "data.target", "poly3", str)
    m = _get(cfg, "data.m", 100, int)
    noise = _get(cfg, "data.noise_sigma", 0.0, float)
    seed = _get(cfg, "data.seed", 0, int)
    domain = _get(cfg, "data.domain", None, _as_domain)
    return synthesize(target, m, domain=domain, noise_sigma=noise, seed=seed)


def resolve_config(cfg: dict, seed_override: int | None = None) -> dict[str, str]:
    """Materialize every key with its final value; the echo is reparseable."""
    vocab = build_vocab(cfg)
    budget = build_budget(cfg)
    consts = build_consts(cfg)
    gp = build_gp_config(cfg, seed_override)
    out = {
        "vocab.unary": ",".join(vocab.unary_ops),
        "vocab.binary": ",".join(vocab.binary_ops),
        "vocab.variables": str(vocab.variables),
        "vocab.fixed": ",".join(f"{n}={repr(v)}" for n, v in vocab.fixed_constants),
        "budget.size": str(budget.max_size),
        "budget.depth": str(budget.max_depth),
        "budget.radius": repr(budget.radius),
        "consts.c_dudley": repr(consts.c_dudley),
        "consts.c_par": repr(consts.c_par),
        "consts.a_sym": repr(consts.a_sym),
        "consts.b_conf": repr(consts.b_conf),
        "gp.population_size": str(gp.population_size),
        "gp.generations": str(gp.generations),
        "gp.tournament_size": str(gp.tournament_size),
        "gp.crossover_rate": repr(gp.crossover_rate),
        "gp.mutation_rate": repr(gp.mutation_rate),
        "gp.constant_jitter_rate": repr(gp.constant_jitter_rate),
        "gp.parsimony": gp.parsimony,
        "gp.parsimony_alpha": repr(gp.parsimony_alpha),
        "gp.bound_lambda": repr(gp.bound_lambda),
        "gp.constant_opt": gp.constant_opt,
        "gp.constant_opt_iters": str(gp.constant_opt_iters),
        "gp.constant_opt_top_k": str(gp.constant_opt_top_k),
        "gp.linear_scaling": "true" if gp.linear_scaling else "false",
        "gp.interval_screening": "true" if gp.interval_screening else "false",
        "gp.delta": repr(gp.delta),
        "gp.tau": repr(gp.tau),
        "gp.seed": str(gp.seed),
    }
    if cfg.get("data.csv"):
        out["data.csv"] = cfg["data.csv"]
        out["data.seed"] = str(_get(cfg, "data.seed", 0, int))
    else:
        target = _get(cfg, "data.target", "poly3", str)
        data = build_dataset(cfg, vocab)
        out["data.target"] = target
        out["data.m"] = str(data.m)
        out["data.noise_sigma"] = repr(float(data.meta["noise_sigma"]))
        out["data.seed"] = str(data.meta["seed"])
        out["data.domain"] = ",".join(f"{repr(lo)}:{repr(hi)}"
                                      for lo, hi in data.meta["domain"])
    return out


def write_config_echo(resolved: dict[str, str], path: str) -> None:
    lines = [f"{k} = {v}" for k, v in sorted(resolved.items())]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# --- small output helpers ---

def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path_or_none, header: list[str], rows: list[list]) -> str:
    text = ",".join(header) + "\n"
    text += "".join(",".join(_fmt(v) for v in row) + "\n" for row in rows)
    if path_or_none:
        with open(path_or_none, "w") as fh:
            fh.write(text)
    return text


def write_json(payload: dict, path_or_none) -> str:
    text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if path_or_none:
        with open(path_or_none, "w") as fh:
            fh.write(text)
    return text


def _parse_grid(spec: str, name: str) -> list[int]:
    """Accept '3', '1..5', or '1,2,7'."""
    try:
        if ".." in spec:
            lo, hi = spec.split("..")
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError("empty range")
            return list(range(lo, hi + 1))
        if "," in spec:
            return [int(s) for s in spec.split(",") if s.strip()]
        return [int(spec)]
    except ValueError as exc:
        raise ConfigError(f"bad {name} grid {spec!r}: {exc}") from None


def _ensure_out(args) -> str | None:
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    return args.out


# --- subcommands ---

def cmd_count(args) -> int:
    s_grid = _parse_grid(args.s, "--s")
    d_grid = _parse_grid(args.depth, "--depth")
    if any(s < 1 for s in s_grid):
        raise ConfigError("--s must be >= 1")
    if any(d < 1 for d in d_grid):
        raise ConfigError("--depth must be >= 1")
    if any(s > COUNT_MAX_S for s in s_grid):
        raise GuardViolation(f"--s must stay within 1..{COUNT_MAX_S}")
    if any(d > COUNT_MAX_D for d in d_grid):
        raise GuardViolation(f"--depth must stay within 1..{COUNT_MAX_D}")
    cfg = read_config_file(args.config) if args.config else {}
    vocab = build_vocab(cfg)
    c_cache: dict[int, float] = {}
    rows = []
    for d in d_grid:
        if d not in c_cache:
            c_cache[d] = counting.calibrate_c_D(d, s_max=min(500, COUNT_MAX_S))
        for s in s_grid:
            exact_structures = counting.count_structures(s, d, vocab)
            rows.append([
                s, d,
                counting.count_shapes(s, d),
                exact_structures,
                float(math.log(exact_structures)),
                counting.log_structure_bound(s, d, vocab, c_cache[d]),
                counting.bkr_asymptotic(s, d),
                counting.rho(d),
            ])
    out = _ensure_out(args)
    text = write_csv(os.path.join(out, "count.csv") if out else None,
                     ["s", "D", "exact_shapes", "exact_structures", "log_exact",
                      "log_theorem_bound", "log_bkr", "rho_D"],
                     rows)
    sys.stdout.write(text)
    return 0


def _load_run_report(run_dir: str) -> dict:
    path = os.path.join(run_dir, "bound_report.json")
    if not os.path.exists(path):
        raise MissingArtifactError(f"no bound_report.json under {run_dir}")
    with open(path) as fh:
        return json.load(fh)


def cmd_bound(args) -> int:
    cfg = read_config_file(args.config) if args.config else {}
    consts = build_consts(cfg)
    if args.run_dir:
        prior = _load_run_report(args.run_dir)
        m = args.m if args.m is not None else prior["m"]
        s = args.s if args.s is not None else prior["s"]
        d = args.depth if args.depth is not None else prior["D"]
        radius = args.radius if args.radius is not None else prior["R"]
        delta = args.delta if args.delta is not None else prior["delta"]
        report = assemble_bound(
            m=m, s=s, D=d, R=radius, delta=delta,
            B=prior["B_used"], G=prior["G_used"], log_T=prior["log_T"],
            B_provenance=prior["B_provenance"], G_provenance=prior["G_provenance"],
            log_T_method=prior["log_T_method"], consts=consts,
            tau=prior.get("tau", 1.0),
            observed_train=prior.get("observed_train"),
            observed_test=prior.get("observed_test"))
    else:
        required = {"--m": args.m, "--s": args.s, "--depth": args.depth,
                    "--radius": args.radius, "--delta": args.delta,
                    "--B": args.B, "--G": args.G}
        missing = [k for k, v in required.items() if v is None]
        if missing:
            raise ConfigError(f"missing required arguments: {' '.join(missing)}")
        vocab = build_vocab(cfg)
        if args.log_T is not None:
            log_T, method = args.log_T, "theorem bound"
        else:
            log_T = float(math.log(counting.count_structures(args.s, args.depth, vocab)))
            method = "exact DP"
        report = assemble_bound(
            m=args.m, s=args.s, D=args.depth, R=args.radius, delta=args.delta,
            B=args.B, G=args.G, log_T=log_T, log_T_method=method,
            consts=consts, tau=args.tau)
    out = _ensure_out(args)
    text = write_json(report.to_dict(),
                      os.path.join(out, "bound_report.json") if out else None)
    sys.stdout.write(text)
    return 0


def cmd_rademacher(args) -> int:
    seed = 0 if args.seed is None else args.seed
    cfg = read_config_file(args.config) if args.config else {}
    vocab = build_vocab(cfg)
    tree = parse(args.tree, vocab)
    p = measure(tree).num_constants
    data = synthesize(args.target, args.m, noise_sigma=0.0, seed=seed)
    consts = build_consts(cfg)
    mean, stderr = rademacher_mc_fixed(tree, args.radius, data,
                                       n_sigma=args.n_sigma,
                                       n_restarts=args.restarts, seed=seed)
    budget = Budget(max(measure(tree).size, 1), max(measure(tree).depth, 1),
                    args.radius)
    g_cert = certify_G(tree, budget, data.meta["domain"])
    payload = {
        "tree": serialize(tree),
        "p": p,
        "m": data.m,
        "radius": args.radius,
        "n_sigma": args.n_sigma,
        "n_restarts": args.restarts,
        "mc_mean": mean,
        "mc_stderr": stderr,
        "G_certified": None if is_rejected(g_cert) else g_cert,
        "dudley_closed_form": None if is_rejected(g_cert)
        else dudley_fixed_structure_bound(p, args.radius, g_cert, data.m, consts),
        "dudley_integral": None if is_rejected(g_cert)
        else dudley_integral_bound(p, args.radius, g_cert, data.m, consts),
    }
    out = _ensure_out(args)
    text = write_json(payload, os.path.join(out, "rademacher.json") if out else None)
    sys.stdout.write(text)
    return 0


def _write_history(history: list[GenStats], path: str) -> None:
    write_csv(path, list(GenStats.FIELDS), [st.row() for st in history])


def _write_best(best, path: str) -> None:
    lines = [
        f"tree = {serialize(best.tree)}",
        f"theta = {','.join(repr(float(t)) for t in best.theta)}",
        f"scale_a = {repr(best.scale[0])}",
        f"scale_b = {repr(best.scale[1])}",
        f"train_mse = {repr(best.train_mse)}",
        f"fitness = {repr(best.fitness)}",
        f"size = {best.metadata['size']}",
        f"depth = {best.metadata['depth']}",
        f"p = {best.metadata['p']}",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_evolve(args) -> int:
    if not args.config:
        raise ConfigError("evolve requires --config")
    cfg = read_config_file(args.config)
    resolved = resolve_config(cfg, seed_override=args.seed)
    vocab = build_vocab(cfg)
    budget = build_budget(cfg)
    gp_cfg = build_gp_config(cfg, seed_override=args.seed)
    data = build_dataset(cfg, vocab)
    result = evolve(vocab, budget, data, gp_cfg)
    out = _ensure_out(args)
    if out:
        write_config_echo(resolved, os.path.join(out, "config_resolved.txt"))
        _write_history(result.history, os.path.join(out, "history.csv"))
        _write_best(result.best, os.path.join(out, "best.txt"))
        write_json(result.report.to_dict(), os.path.join(out, "bound_report.json"))
    rep = result.report
    sys.stdout.write(
        "best_train_mse=%s observed_gap=%s bound_total=%s gap_dominated=%s\n"
        % (repr(result.best.train_mse), repr(rep.observed_gap),
           repr(rep.total), str(rep.observed_gap <= rep.total).lower()))
    return 0


# --- experiments ---

def _experiment_bloat(args, cfg, out):
    vocab = build_vocab(cfg)
    budget = Budget(
        max_size=_get(cfg, "budget.size", 60, int),
        max_depth=_get(cfg, "budget.depth", 10, int),
        radius=_get(cfg, "budget.radius", 5.0, float),
    )
    base_seed = 0 if args.seed is None else args.seed
    seeds = [base_seed + i for i in range(args.seeds)]
    rows = []
    wins = 0
    for seed in seeds:
        data = synthesize("poly3", 64, noise_sigma=0.0, seed=1000 + seed)
        base = dict(population_size=args.population, generations=args.generations,
                    seed=seed, interval_screening=False, constant_opt="off")
        arms = {
            "none": GpConfig(parsimony="none", **base),
            "size_penalty": GpConfig(parsimony="size_penalty",
                                     parsimony_alpha=0.01, **base),
        }
        finals = {}
        for arm, gp_cfg in arms.items():
            result = evolve(vocab, budget, data, gp_cfg)
            finals[arm] = result.history[-1].mean_size
            for st in result.history:
                rows.append([seed, arm, st.generation, st.mean_size])
        wins += finals["none"] > finals["size_penalty"]
    write_csv(os.path.join(out, "sizes.csv"),
              ["seed", "arm", "generation", "mean_size"], rows)
    summary = {"seeds": len(seeds), "wins_without_parsimony_larger": wins,
               "population": args.population, "generations": args.generations}
    sys.stdout.write(write_json(summary, os.path.join(out, "summary.json")))


def _experiment_depth_sweep(args, cfg, out):
    vocab = build_vocab(cfg)
    s = _get(cfg, "budget.size", 20, int)
    rows = []
    for d in range(1, args.max_depth + 1):
        exact = counting.count_structures(s, d, vocab)
        c_d = counting.calibrate_c_D(d)
        rows.append([s, d, counting.rho(d), float(math.log(exact)),
                     counting.log_structure_bound(s, d, vocab, c_d)])
    text = write_csv(os.path.join(out, "depth_sweep.csv"),
                     ["s", "D", "rho_D", "log_exact", "log_theorem_bound"], rows)
    sys.stdout.write(text)


def _experiment_gap_check(args, cfg, out):
    seed = 0 if args.seed is None else args.seed
    vocab = build_vocab(cfg)
    budget = build_budget(cfg)
    rows = []
    all_hold = True
    for target in ("poly3", "keijzer_sine"):
        for m in (64, 256, 1024):
            data = synthesize(target, m, noise_sigma=0.05, seed=seed)
            gp_cfg = build_gp_config(cfg, seed_override=seed)
            gp_cfg.population_size = args.population
            gp_cfg.generations = args.generations
            result = evolve(vocab, budget, data, gp_cfg.validated())
            rep = result.report
            dominated = rep.observed_gap <= rep.total
            all_hold = all_hold and dominated
            slack = rep.total / max(rep.observed_gap, 1e-12)
            rows.append([target, m, rep.observed_train, rep.observed_test,
                         rep.observed_gap, rep.total, slack,
                         str(bool(dominated)).lower()])
    text = write_csv(os.path.join(out, "gap_check.csv"),
                     ["target", "m", "train_loss", "test_loss", "gap",
                      "bound_total", "slack_ratio", "dominated"], rows)
    sys.stdout.write(text)
    write_json({"all_dominated": all_hold}, os.path.join(out, "summary.json"))


def _experiment_union_check(args, cfg, out):
    rng = rng_for(0 if args.seed is None else args.seed)
    m = 8
    rows = []
    holds = 0
    for i in range(args.instances):
        n_classes = int(rng.integers(1, 17))
        bound_b = float(rng.uniform(0.5, 3.0))
        classes = [rng.uniform(-bound_b, bound_b, size=(int(rng.integers(1, 5)), m))
                   for _ in range(n_classes)]
        exact_union = rademacher_exact(np.vstack(classes))
        max_member = max(rademacher_exact(c) for c in classes)
        bound = finite_union_bound(max_member, bound_b, math.log(n_classes), m)
        ok = exact_union <= bound + 1e-12
        holds += ok
        rows.append([i, n_classes, bound_b, max_member, exact_union, bound,
                     str(bool(ok)).lower()])
    text = write_csv(os.path.join(out, "union_check.csv"),
                     ["instance", "M", "B", "max_member", "exact_union",
                      "union_bound", "dominated"], rows)
    sys.stdout.write(text)
    write_json({"instances": args.instances, "dominated": holds},
               os.path.join(out, "summary.json"))


EXPERIMENTS = {
    "bloat": _experiment_bloat,
    "depth_sweep": _experiment_depth_sweep,
    "gap_check": _experiment_gap_check,
    "union_check": _experiment_union_check,
}


def cmd_experiment(args) -> int:
    if args.name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {args.name!r}; "
                          f"choose from {sorted(EXPERIMENTS)}")
    cfg = read_config_file(args.config) if args.config else {}
    out = args.out or f"experiment_{args.name}"
    os.makedirs(out, exist_ok=True)
    write_config_echo(resolve_config(cfg, seed_override=args.seed),
                      os.path.join(out, "config_resolved.txt"))
    EXPERIMENTS[args.name](args, cfg, out)
    return 0


# --- entry point ---

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gpsr",
        description="Symbolic regression with certified capacity bounds")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the configured seed")
    parser.add_argument("--out", default=None, help="artifact directory")
    parser.add_argument("--config", default=None,
                        help="key = value configuration file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="exact/asymptotic counting tables")
    p.add_argument("--s", required=True, help="size grid: N, A..B, or comma list")
    p.add_argument("--depth", required=True, help="depth grid: N, A..B, or comma list")
    p.add_argument("--vocab", default="default",
                   help="'default' or rely on --config vocab.* keys")
    p.set_defaults(fn=cmd_count)

    p = sub.add_parser("bound", help="assemble a generalization-bound report")
    p.add_argument("--m", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--radius", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--B", type=float)
    p.add_argument("--G", type=float)
    p.add_argument("--log-T", dest="log_T", type=float, default=None)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--run-dir", dest="run_dir", default=None,
                   help="reuse certified constants from a finished run")
    p.set_defaults(fn=cmd_bound)

    p = sub.add_parser("rademacher",
                       help="Monte Carlo fixed-structure Rademacher estimate")
    p.add_argument("--tree", required=True, help="prefix expression, e.g. '(mul c x1)'")
    p.add_argument("--m", type=int, default=64)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--n-sigma", dest="n_sigma", type=int, default=50)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--target", default="poly3")
    p.set_defaults(fn=cmd_rademacher)

    p = sub.add_parser("evolve", help="run the GP engine from a config file")
    p.set_defaults(fn=cmd_evolve)

    p = sub.add_parser("experiment", help="run a named replication experiment")
    p.add_argument("name", help="bloat | depth_sweep | gap_check | union_check")
    p.add_argument("--seeds", type=int, default=10, help="seed count (bloat)")
    p.add_argument("--population", type=int, default=60)
    p.add_argument("--generations", type=int, default=200)
    p.add_argument("--max-depth", dest="max_depth", type=int, default=8,
                   help="depth grid upper end (depth_sweep)")
    p.add_argument("--instances", type=int, default=100, help="union_check cases")
    p.set_defaults(fn=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except GuardViolation as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ConfigError, InvalidConfidenceError, MissingArtifactError,
            ParseError, SchemaError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
