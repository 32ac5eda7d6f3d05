"""Command-line front end.

Exit codes: 0 ok, 2 validation failure, 3 solver failure, 4 empty result.
Every command accepts ``--config FILE`` (a JSON object keyed by flag name,
dashes or underscores); explicit flags override the file.
"""
from __future__ import annotations

import argparse
import json
import math
import secrets
import sys

import numpy as np

from . import cost as costmod
from . import optimizer, pom, simulate, spectrum
from .errors import NoRootsInRange, PhasekitError
from .io import csv_table, dumps, write_text


class ConfigError(PhasekitError):
    pass


# ----------------------------------------------------------------- parsing

def parse_cost(text: str, state=None) -> costmod.CostModel:
    """``variance``, ``likelihood:L``, ``fidelity`` or ``coeffs:c0,c1,...``."""
    head, _, rest = text.partition(":")
    head = head.lower()
    try:
        if head in ("variance", "variance_2pi"):
            return costmod.builtin_cost("variance")
        if head == "likelihood":
            return costmod.builtin_cost("likelihood", int(rest) if rest else 1)
        if head == "fidelity":
            if state is None:
                raise ConfigError("--cost: fidelity depends on the input state and needs --state")
            return costmod.builtin_cost("fidelity", 1, state)
        if head == "coeffs":
            return costmod.CostModel(tuple(float(v) for v in rest.split(",")))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"--cost: {exc}") from None
    raise ConfigError(f"--cost: unknown cost {text!r}")


def parse_spectrum(text: str) -> spectrum.Spectrum:
    try:
        return spectrum.Spectrum.parse(text)
    except PhasekitError as exc:
        raise ConfigError(f"--spectrum: {exc}") from None


def parse_state(text: str) -> spectrum.ReducedState:
    """``uniform2``, ``uniform:K``, ``point:N``, ``weights:a,b,..`` or a JSON file."""
    head, _, rest = text.partition(":")
    try:
        if head == "uniform2":
            return spectrum.ReducedState.from_weights(spectrum.Spectrum.naturals(0, 1), [1, 1])
        if head == "uniform":
            k = int(rest)
            return spectrum.ReducedState.from_weights(spectrum.Spectrum.naturals(0, k - 1), np.ones(k))
        if head == "point":
            n = int(rest)
            spec = spectrum.Spectrum.naturals(max(0, n - 1), max(0, n - 1) + 1)
            w = np.zeros(2)
            w[spec.position(n)] = 1.0
            return spectrum.ReducedState(spec, w)
        if head == "weights":
            w = [float(v) for v in rest.split(",")]
            return spectrum.ReducedState.from_weights(spectrum.Spectrum.naturals(0, len(w) - 1), w)
        with open(text, encoding="utf-8") as fh:
            return spectrum.ReducedState.from_dict(json.load(fh))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"--state: cannot build state from {text!r}: {exc}") from None


def parse_range(text: str, name: str, parts: int) -> list[float]:
    try:
        vals = [float(v) for v in str(text).split(":")]
    except ValueError:
        raise ConfigError(f"--{name}: malformed range {text!r}") from None
    if len(vals) not in (1, parts) or not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"--{name}: expected {parts} colon-separated numbers, got {text!r}")
    return vals


def lambda_grid(text: str) -> list[float]:
    if "," in str(text):
        vals = [float(v) for v in str(text).split(",")]
    else:
        vals = parse_range(text, "lambda", 3)
        if len(vals) == 3:
            lo, hi, step = vals
            if step <= 0 or hi < lo:
                raise ConfigError("--lambda: need lo <= hi and step > 0")
            count = int(math.floor((hi - lo) / step + 1e-9)) + 1
            vals = [lo + i * step for i in range(count)]
    if min(vals) < 0:
        raise ConfigError("--lambda: lambda < 0 is unsupported (orders must stay >= 0)")
    return vals


# ---------------------------------------------------------------- commands

def cmd_optimal_state(cfg, out) -> int:
    spec = parse_spectrum(cfg.spectrum)
    model = parse_cost(cfg.cost)
    xi = costmod.optimal_xi(model, spec)
    mat = costmod.cost_operator_matrix(model, xi)
    sol = optimizer.optimal_state_numeric(mat, spectrum=spec)
    report = {"spectrum": spec.to_dict(), "cost": model.to_dict(), "eigenvalue": sol.eigenvalue,
              "residual": sol.residual, "multiplicity": sol.multiplicity,
              "vector": [float(v) for v in np.real(sol.vector)]}
    if sol.state is not None:
        report["state"] = sol.state.to_dict()
    if model.name == "variance_2pi" and spec.kind in (spectrum.NATURALS, spectrum.MOD_Q):
        theta = math.pi / (spec.size + 1)
        cheb = optimizer.chebyshev_weights(theta, spec.size - 1)
        report["chebyshev"] = {
            "theta": theta,
            "eigenvalue": 2 - 2 * math.cos(theta),
            "max_weight_deviation": float(np.max(np.abs(cheb - np.real(sol.vector)))),
        }
    if cfg.format == "csv":
        rows = [(int(n), float(v)) for n, v in zip(spec.indices, np.real(sol.vector))]
        write_text(csv_table(["n", "weight"], rows), cfg.output, out)
    else:
        write_text(dumps(report) + "\n", cfg.output, out)
    return 0


def cmd_two_mode(cfg, out) -> int:
    grid = lambda_grid(cfg.lam)
    xr = parse_range(cfg.x, "x", 2)
    if len(xr) != 2 or not 0 < xr[0] < xr[1]:
        raise ConfigError("--x: need 0 < lo < hi")
    if cfg.n_max is not None and cfg.n_max < 1:
        raise ConfigError("--n-max must be >= 1")
    branches = optimizer.two_mode_branches(grid, xr, cfg.n_max, cfg.max_roots)
    if not branches:
        raise NoRootsInRange(f"no matching roots for lambda in {grid} and x in {xr}")
    frontier = optimizer.pareto_frontier([optimizer.vacuum_solution()] + branches)
    if cfg.branches_output:
        write_text(dumps([b.to_dict() for b in branches]) + "\n", cfg.branches_output, out)
    if cfg.format == "csv":
        write_text(optimizer.frontier_csv(frontier), cfg.output, out)
    else:
        report = {"frontier": [{"N": s.N, "cost": s.cost, "lambda": s.lam, "mu": s.mu, "x": s.x}
                               for s in frontier],
                  "branches": [b.to_dict() for b in branches]}
        write_text(dumps(report) + "\n", cfg.output, out)
    return 0


def cmd_simulate(cfg, out) -> int:
    state = parse_state(cfg.state)
    model = parse_cost(cfg.cost, state)
    if cfg.n < 1:
        raise ConfigError("--n must be >= 1")
    if cfg.bins < 1:
        raise ConfigError("--bins must be >= 1")
    seed = cfg.seed if cfg.seed is not None else secrets.randbits(63)
    run = simulate.sample_estimates(state, cfg.phi, cfg.n, seed, threads=cfg.threads)
    report = simulate.run_report(run, model, cfg.bins)
    try:
        report["analytic_min_cost"] = costmod.min_cost(model, state)
    except PhasekitError:
        report["analytic_min_cost"] = None
    if cfg.samples_output:
        with open(cfg.samples_output, "wb") as fh:
            fh.write(simulate.samples_to_bytes(run))
    if cfg.format == "csv":
        edges = 2 * math.pi * np.arange(cfg.bins) / cfg.bins
        rows = list(zip(edges, report["histogram"]["counts"]))
        write_text(csv_table(["bin_start", "count"], rows), cfg.output, out)
    else:
        write_text(dumps(report) + "\n", cfg.output, out)
    ref = report["analytic_min_cost"]
    print(f"seed {run.seed}: mean cost {report['mean_cost']:.6f} +- {report['std_error']:.6f}"
          + (f" (analytic {ref:.6f})" if ref is not None else ""), file=sys.stderr)
    return 0


def cmd_partition(cfg, out) -> int:
    if cfg.M < 1:
        raise ConfigError("--M must be >= 1")
    if cfg.nmax < 0:
        raise ConfigError("--nmax must be >= 0")
    counts = [spectrum.partition_count(cfg.M, n) for n in range(cfg.nmax + 1)]
    if cfg.format == "csv":
        write_text(csv_table(["n", "N_n"], list(enumerate(counts))), cfg.output, out)
    else:
        write_text(dumps({"M": cfg.M, "nmax": cfg.nmax, "counts": counts}) + "\n", cfg.output, out)
    return 0


def cmd_pom_check(cfg, out) -> int:
    rows = []
    for text in cfg.spectrum:
        spec = parse_spectrum(text)
        grid = cfg.grid if cfg.grid is not None else 4 * spec.size
        row = {"spectrum": spec.to_dict(), "grid": grid,
               "continuous_residual": pom.pom_completeness_residual(spec, grid)}
        if spec.kind == spectrum.MOD_Q:
            row["discrete_residual"] = pom.discrete_completeness_residual(spec.q)
        rows.append(row)
    if cfg.format == "csv":
        table = [(text, r["grid"], r["continuous_residual"], r.get("discrete_residual", ""))
                 for text, r in zip(cfg.spectrum, rows)]
        write_text(csv_table(["spectrum", "grid", "continuous_residual", "discrete_residual"], table),
                   cfg.output, out)
    else:
        write_text(dumps(rows) + "\n", cfg.output, out)
    return 0


def cmd_cost_eval(cfg, out) -> int:
    state = parse_state(cfg.state) if cfg.state else None
    model = parse_cost(cfg.cost, state)
    if cfg.points < 1:
        raise ConfigError("--points must be >= 1")
    phis = 2 * math.pi * np.arange(cfg.points) / cfg.points
    vals = costmod.evaluate_cost(model, phis)
    report = {"cost": model.to_dict(), "phi": phis, "value": vals}
    if state is not None:
        try:
            report["min_cost"] = costmod.min_cost(model, state)
        except PhasekitError as exc:
            report["min_cost"] = None
            report["note"] = str(exc)
    if cfg.spectrum:
        spec = parse_spectrum(cfg.spectrum)
        mat = costmod.cost_operator_matrix(model, costmod.optimal_xi(model, spec))
        if cfg.format == "csv":
            write_text(costmod.cost_matrix_csv(mat, spec), cfg.output, out)
            return 0
        report["matrix"] = mat
    if cfg.format == "csv":
        write_text(csv_table(["phi", "cost"], zip(phis, np.atleast_1d(vals))), cfg.output, out)
    else:
        write_text(dumps(report) + "\n", cfg.output, out)
    return 0


# ------------------------------------------------------------------ parser

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file of flag values; explicit flags win")
    p.add_argument("--format", choices=["json", "csv"], help="output format (default: json)")
    p.add_argument("--output", help="output file (default: stdout)")
    p.add_argument("--threads", type=int,
                   help="worker threads (default: $PHASEKIT_THREADS, else all cores)")


DEFAULTS = {
    "optimal-state": {"cost": "variance"},
    "two-mode": {"x": "0.5:12", "n_max": None, "max_roots": None, "branches_output": None},
    "simulate": {"phi": 0.0, "n": 100000, "seed": None, "cost": "variance", "bins": 64,
                 "samples_output": None},
    "partition": {},
    "pom-check": {"grid": None},
    "cost-eval": {"points": 64, "state": None, "spectrum": None},
}
REQUIRED = {
    "optimal-state": ["spectrum"],
    "two-mode": ["lam"],
    "simulate": ["state"],
    "partition": ["M", "nmax"],
    "pom-check": ["spectrum"],
    "cost-eval": ["cost"],
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasekit", description="Optimal covariant phase estimation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimal-state", help="minimal-cost input state on a spectrum window")
    p.add_argument("--spectrum", help="zq:Q | naturals:LO:HI | integers:LO:HI")
    p.add_argument("--cost", help="variance | likelihood:L | coeffs:c0,c1,... (default: variance)")
    _common(p)
    p.set_defaults(func=cmd_optimal_state)

    p = sub.add_parser("two-mode", help="two-mode Bessel branches and (N, cost) frontier")
    p.add_argument("--lambda", dest="lam",
                   help="lambda grid LO:HI:STEP, a single value, or a comma list (lambda >= 0)")
    p.add_argument("--x", help="search interval for x = 2/mu, LO:HI (default: 0.5:12)")
    p.add_argument("--n-max", dest="n_max", type=int,
                   help="fixed truncation |n| <= n_max (default: adaptive)")
    p.add_argument("--max-roots", dest="max_roots", type=int,
                   help="matching roots per lambda (default: all in range)")
    p.add_argument("--branches-output", dest="branches_output",
                   help="write per-branch solution JSON here")
    _common(p)
    p.set_defaults(func=cmd_two_mode)

    p = sub.add_parser("simulate", help="Monte-Carlo phase estimates from the optimal measurement")
    p.add_argument("--state", help="uniform2 | uniform:K | point:N | weights:a,b,... | state.json")
    p.add_argument("--phi", type=float, help="true phase in radians (default: 0)")
    p.add_argument("--n", type=int, help="number of samples (default: 100000)")
    p.add_argument("--seed", type=int, help="64-bit seed (default: random, echoed)")
    p.add_argument("--cost", help="cost used for the mean (default: variance)")
    p.add_argument("--bins", type=int, help="histogram bins (default: 64)")
    p.add_argument("--samples-output", dest="samples_output",
                   help="raw samples as little-endian float64")
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("partition", help="degeneracy counts N_n of the multipath generator")
    p.add_argument("--M", type=int, help="number of modes (>= 1)")
    p.add_argument("--nmax", type=int, help="largest eigenvalue tabulated")
    _common(p)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("pom-check", help="completeness residuals of the optimal measurement")
    p.add_argument("--spectrum", action="append", help="spectrum (repeatable)")
    p.add_argument("--grid", type=int, help="quadrature points (default: 4 x window size)")
    _common(p)
    p.set_defaults(func=cmd_pom_check)

    p = sub.add_parser("cost-eval", help="tabulate a cost function and its operator")
    p.add_argument("--cost", help="variance | likelihood:L | fidelity | coeffs:c0,c1,...")
    p.add_argument("--points", type=int, help="phase samples over [0, 2pi) (default: 64)")
    p.add_argument("--state", help="reference state (fidelity cost, min_cost)")
    p.add_argument("--spectrum", help="also emit the cost operator on this window")
    _common(p)
    p.set_defaults(func=cmd_cost_eval)
    return parser


def resolve_config(args: argparse.Namespace) -> argparse.Namespace:
    """Merge flags, the optional JSON config and defaults; reject unknown keys."""
    cmd = args.command
    explicit = {k: v for k, v in vars(args).items() if v is not None}
    known = set(vars(args)) - {"func", "command", "config"}
    merged = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"--config: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("--config: top level must be an object")
        for key, val in data.items():
            norm = key.replace("-", "_")
            norm = "lam" if norm == "lambda" else norm
            if norm not in known:
                raise ConfigError(f"--config: unknown key {key!r} for {cmd}")
            merged[norm] = val
    if cmd == "pom-check" and isinstance(merged.get("spectrum"), str):
        merged["spectrum"] = [merged["spectrum"]]
    merged.update({k: v for k, v in explicit.items() if k in known})
    for key, val in DEFAULTS[cmd].items():
        merged.setdefault(key, val)
    merged.setdefault("format", "json")
    merged.setdefault("output", None)
    if merged.get("threads") is None:
        merged["threads"] = simulate.default_threads()
    if merged["threads"] < 1:
        raise ConfigError("--threads must be >= 1")
    for key in REQUIRED[cmd]:
        if merged.get(key) is None:
            raise ConfigError(f"--{key.replace('_', '-') if key != 'lam' else 'lambda'} is required")
    return argparse.Namespace(command=cmd, func=args.func, **merged)


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return cfg.func(cfg, out)
    except PhasekitError as exc:
        print(f"phasekit {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, TypeError) as exc:
        print(f"phasekit {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
