"""Command-line driver for witness evaluations, parameter sweeps, and grids.

Subcommands: xi-specific, xi-resource, xi-prepare, sweep-chi, sweep-gamma,
sweep-n, husimi.  Flags may be preloaded from a JSON config file; explicit
flags override the file.  Every JSON report embeds the resolved config so a
run can be reproduced from its own output.

Exit codes: 0 success, 2 configuration error, 3 numerical singularity.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields as dc_fields, is_dataclass

import numpy as np

from .benchmark import BenchmarkResult
from .cubic_witness import chi_from_chi_prime, xi_to_db
from .errors import ConfigError, DomainError, TruncationError
from .husimi import husimi_grid
from .optimizer import SqueezingResult, dicke_superposition, xi_prepare, xi_resource, xi_specific
from .oscillator import FockSpace, cv_xi, embed, fock_superposition_01
from .rotation_search import OptimizerSettings, min_variance_over_rotations
from .cubic_witness import witness_operator
from .benchmark import ground_state
from .spin_core import QuantumState, make_system

XI_COMMANDS = {"xi-specific", "xi-resource", "xi-prepare", "sweep-chi", "sweep-gamma", "sweep-n"}

DEFAULTS = {
    "n_atoms": 80,
    "gamma": 0.5,
    "chi_prime": 7.96e-4,
    "chi_prime_min": 1e-5,
    "chi_prime_max": 1e-2,
    "chi_prime_points": 61,
    "sweep_chi_min": 1e-4,
    "sweep_chi_max": 2e-3,
    "sweep_chi_points": 25,
    "gamma_min": 0.0,
    "gamma_max": 1.0,
    "gamma_step": 1e-3,
    "n_list": "4,6,8,10,20,40,80,100",
    "chi_min": 1e-2,
    "chi_max": 6.0,
    "chi_points": 41,
    "cutoff": 200,
    "mode": "calibrated",
    "t_grid_points": 41,
    "threads": 1,
    "format": "csv",
    "out": "-",
    "theta_points": 64,
    "phi_points": 128,
    "source": "superposition",
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    n_atoms: int
    gamma: float
    chi_prime: float
    chi_prime_min: float
    chi_prime_max: float
    chi_prime_points: int
    sweep_chi_min: float
    sweep_chi_max: float
    sweep_chi_points: int
    gamma_min: float
    gamma_max: float
    gamma_step: float
    n_list: str
    chi_min: float
    chi_max: float
    chi_points: int
    cutoff: int
    mode: str
    t_grid_points: int
    threads: int
    format: str
    out: str
    theta_points: int
    phi_points: int
    source: str

    def settings(self) -> OptimizerSettings:
        return OptimizerSettings(
            mode=self.mode,
            t_grid_points=self.t_grid_points,
            chi_abs_min=self.chi_prime_min,
            chi_abs_max=self.chi_prime_max,
            chi_points_per_sign=self.chi_prime_points,
            threads=1,  # parallelism lives at the sweep-row level
        )

    def parsed_n_list(self) -> list[int]:
        try:
            values = [int(tok) for tok in self.n_list.split(",") if tok.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad n-list {self.n_list!r}") from exc
        if not values:
            raise ConfigError("n-list is empty")
        return values


def fmt(x) -> str:
    """17-significant-digit, round-trip-safe formatting; literal inf/nan."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _jsonable(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        if isinstance(obj, BenchmarkResult):
            return {
                "min_variance": obj.min_variance,
                "optimal_g": _jsonable(obj.optimal_g),
                "optimal_t": obj.optimal_t,
                "optimal_rotation": _jsonable(obj.optimal_rotation),
                "diagnostics": _jsonable(obj.diagnostics),
            }
        if isinstance(obj, QuantumState):
            return {"kind": obj.kind, "dim": obj.dim}
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dc_fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if np.isinf(x) or np.isnan(x):
            return fmt(x)
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def _write(text: str, out: str):
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _emit_table(config: RunConfig, columns: list[str], rows: list[list], extra: dict | None = None):
    if config.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
        _write(buf.getvalue(), config.out)
    else:
        payload = {
            "command": config.command,
            "config": _jsonable(asdict(config)),
            "result": {"columns": columns, "rows": _jsonable(rows)},
        }
        if extra:
            payload["result"].update(_jsonable(extra))
        _write(json.dumps(payload, indent=2) + "\n", config.out)


def _emit_squeezing(config: RunConfig, result: SqueezingResult, extra_cols: dict | None = None):
    cols = {
        "n_atoms": config.n_atoms,
        "gamma": config.gamma,
        "chi_prime": result.chi_prime,
        "chi": result.chi,
        "numerator": result.numerator_variance,
        "denominator": result.denominator_variance,
        "xi": result.xi,
        "xi_db": result.xi_db,
        "singular": int(result.singular_benchmark),
    }
    if extra_cols:
        cols.update(extra_cols)
    if config.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(cols))
        writer.writerow([fmt(v) for v in cols.values()])
        _write(buf.getvalue(), config.out)
    else:
        payload = {
            "command": config.command,
            "config": _jsonable(asdict(config)),
            "result": _jsonable(result),
        }
        if extra_cols:
            payload["result"].update(_jsonable(extra_cols))
        _write(json.dumps(payload, indent=2) + "\n", config.out)


def _validate_xi_config(config: RunConfig):
    if config.n_atoms < 4:
        raise ConfigError(f"witness commands need --n-atoms >= 4, got {config.n_atoms}")
    if not 0.0 <= config.gamma <= 1.0:
        raise ConfigError(f"--gamma must lie in [0, 1], got {config.gamma}")
    if config.mode not in ("calibrated", "refined"):
        raise ConfigError(f"--mode must be calibrated or refined, got {config.mode!r}")


# --- sweep row workers (module level so process pools can pickle them) -------

def _row_sweep_chi(payload):
    n_atoms, gamma, chi_prime, settings = payload
    sys_ = make_system(n_atoms)
    state = dicke_superposition(sys_, gamma)
    r = xi_specific(state, chi_prime, sys_, settings)
    return [chi_prime, r.numerator_variance, r.denominator_variance, r.xi, r.xi_db]


def _row_sweep_gamma(payload):
    n_atoms, chi_prime, gammas, settings = payload
    sys_ = make_system(n_atoms)
    rows = []
    for gamma in gammas:
        r = xi_specific(dicke_superposition(sys_, gamma), chi_prime, sys_, settings)
        rows.append([gamma, r.xi, r.xi_db])
    return rows


def _row_sweep_n(payload):
    n_atoms, gamma, chi_min, chi_max, chi_points, settings = payload
    sys_ = make_system(n_atoms)
    scale = 3.0 * (n_atoms / 2.0) ** 1.5
    per_n = settings.with_chi_range(chi_min / scale, chi_max / scale)
    per_n = OptimizerSettings(**{**asdict(per_n), "chi_points_per_sign": chi_points})
    r = xi_resource(dicke_superposition(sys_, gamma), sys_, per_n)
    return [n_atoms, r.xi, r.xi_db, r.chi_prime, r.chi]


def _pool_map(fn, payloads, threads):
    if threads > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, payloads))
    return [fn(p) for p in payloads]


# --- commands -----------------------------------------------------------------

def cmd_xi_specific(config: RunConfig) -> int:
    _validate_xi_config(config)
    sys_ = make_system(config.n_atoms)
    state = dicke_superposition(sys_, config.gamma)
    result = xi_specific(state, config.chi_prime, sys_, config.settings())
    _emit_squeezing(config, result)
    return 3 if result.singular_benchmark else 0


def cmd_xi_resource(config: RunConfig) -> int:
    _validate_xi_config(config)
    sys_ = make_system(config.n_atoms)
    state = dicke_superposition(sys_, config.gamma)
    result = xi_resource(state, sys_, config.settings())
    _emit_squeezing(config, result)
    return 3 if result.singular_benchmark else 0


def cmd_xi_prepare(config: RunConfig) -> int:
    _validate_xi_config(config)
    sys_ = make_system(config.n_atoms)
    result = xi_prepare(lambda g: dicke_superposition(sys_, g), config.chi_prime,
                        sys_, config.settings(),
                        bounds=(config.gamma_min, config.gamma_max))
    _emit_squeezing(config, result,
                    extra_cols={"gamma_opt": result.diagnostics["family_parameter_opt"]})
    return 3 if result.singular_benchmark else 0


def cmd_sweep_chi(config: RunConfig) -> int:
    _validate_xi_config(config)
    if not 0 < config.sweep_chi_min < config.sweep_chi_max:
        raise ConfigError("sweep-chi range must satisfy 0 < min < max")
    if config.sweep_chi_points < 1:
        raise ConfigError("sweep-chi needs at least one point")
    grid = np.geomspace(config.sweep_chi_min, config.sweep_chi_max, config.sweep_chi_points)
    settings = config.settings()
    payloads = [(config.n_atoms, config.gamma, float(cp), settings) for cp in grid]
    rows = _pool_map(_row_sweep_chi, payloads, config.threads)
    _emit_table(config, ["chi_prime", "numerator", "denominator", "xi", "xi_db"], rows)
    return 0


def cmd_sweep_gamma(config: RunConfig) -> int:
    _validate_xi_config(config)
    if not (0.0 <= config.gamma_min < config.gamma_max <= 1.0):
        raise ConfigError("gamma range must satisfy 0 <= min < max <= 1")
    if config.gamma_step <= 0:
        raise ConfigError("gamma step must be positive")
    gammas = np.arange(config.gamma_min, config.gamma_max + config.gamma_step / 2,
                       config.gamma_step)
    gammas = np.clip(gammas, 0.0, 1.0)
    settings = config.settings()
    chunks = np.array_split(gammas, max(config.threads, 1))
    payloads = [(config.n_atoms, config.chi_prime, [float(g) for g in chunk], settings)
                for chunk in chunks if len(chunk)]
    nested = _pool_map(_row_sweep_gamma, payloads, config.threads)
    rows = [row for chunk in nested for row in chunk]
    _emit_table(config, ["gamma", "xi", "xi_db"], rows)
    return 0


def cmd_sweep_n(config: RunConfig) -> int:
    _validate_xi_config(config)
    n_values = config.parsed_n_list()
    if any(n < 4 for n in n_values):
        raise ConfigError("all entries of --n-list must be >= 4")
    settings = config.settings()
    payloads = [(n, config.gamma, config.chi_min, config.chi_max, config.chi_points,
                 settings) for n in n_values]
    rows = _pool_map(_row_sweep_n, payloads, config.threads)

    space = FockSpace(config.cutoff)
    state = embed(space, fock_superposition_01())
    xi_inf, chi_opt = cv_xi(space, state, chi=None,
                            chi_range=(config.chi_min, config.chi_max),
                            chi_points=config.chi_points)
    rows.append([np.inf, xi_inf, xi_to_db(xi_inf), np.nan, chi_opt])
    _emit_table(config, ["n_atoms", "xi", "xi_db", "chi_prime_opt", "chi_opt"], rows)
    return 0


def cmd_husimi(config: RunConfig) -> int:
    if config.n_atoms < 1:
        raise ConfigError("--n-atoms must be >= 1")
    sys_ = make_system(config.n_atoms)
    if config.source == "superposition":
        if not 0.0 <= config.gamma <= 1.0:
            raise ConfigError(f"--gamma must lie in [0, 1], got {config.gamma}")
        state = dicke_superposition(sys_, config.gamma)
    elif config.source == "witness-ground":
        gs = ground_state(witness_operator(sys_, config.chi_prime))
        state = gs.state
    else:
        raise ConfigError(f"unknown --source {config.source!r}")
    try:
        grid = husimi_grid(sys_, state, config.theta_points, config.phi_points)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    rows = []
    for i, th in enumerate(grid.theta):
        for k, ph in enumerate(grid.phi):
            rows.append([th, ph, grid.q[i, k], grid.u[i, k], grid.v[i, k]])
    _emit_table(config, ["theta", "phi", "q", "u", "v"], rows,
                extra={"normalization": grid.normalization(config.n_atoms)})
    return 0


COMMANDS = {
    "xi-specific": cmd_xi_specific,
    "xi-resource": cmd_xi_resource,
    "xi-prepare": cmd_xi_prepare,
    "sweep-chi": cmd_sweep_chi,
    "sweep-gamma": cmd_sweep_gamma,
    "sweep-n": cmd_sweep_n,
    "husimi": cmd_husimi,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinwitness",
        description="Cubic nonlinear squeezing witness for collective spins.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--n-atoms", type=int, dest="n_atoms")
        p.add_argument("--gamma", type=float, dest="gamma")
        p.add_argument("--chi-prime", type=float, dest="chi_prime")
        p.add_argument("--mode", choices=["calibrated", "refined"], dest="mode")
        p.add_argument("--t-grid-points", type=int, dest="t_grid_points")
        p.add_argument("--format", choices=["csv", "json"], dest="format")
        p.add_argument("--out", dest="out")
        p.add_argument("--config", dest="config_path")
        p.add_argument("--threads", type=int, dest="threads")

    p = sub.add_parser("xi-specific", help="specific squeezing at fixed chi'")
    add_common(p)

    p = sub.add_parser("xi-resource", help="squeezing minimized over chi'")
    add_common(p)
    p.add_argument("--chi-prime-min", type=float, dest="chi_prime_min")
    p.add_argument("--chi-prime-max", type=float, dest="chi_prime_max")
    p.add_argument("--chi-prime-points", type=int, dest="chi_prime_points")

    p = sub.add_parser("xi-prepare", help="squeezing minimized over the state family")
    add_common(p)
    p.add_argument("--gamma-min", type=float, dest="gamma_min")
    p.add_argument("--gamma-max", type=float, dest="gamma_max")

    p = sub.add_parser("sweep-chi", help="tabulate xi against chi'")
    add_common(p)
    p.add_argument("--chi-prime-min", type=float, dest="sweep_chi_min")
    p.add_argument("--chi-prime-max", type=float, dest="sweep_chi_max")
    p.add_argument("--chi-prime-points", type=int, dest="sweep_chi_points")

    p = sub.add_parser("sweep-gamma", help="tabulate xi against gamma")
    add_common(p)
    p.add_argument("--gamma-min", type=float, dest="gamma_min")
    p.add_argument("--gamma-max", type=float, dest="gamma_max")
    p.add_argument("--gamma-step", type=float, dest="gamma_step")

    p = sub.add_parser("sweep-n", help="resource squeezing against system size")
    add_common(p)
    p.add_argument("--n-list", dest="n_list")
    p.add_argument("--chi-min", type=float, dest="chi_min")
    p.add_argument("--chi-max", type=float, dest="chi_max")
    p.add_argument("--chi-points", type=int, dest="chi_points")
    p.add_argument("--cutoff", type=int, dest="cutoff")

    p = sub.add_parser("husimi", help="Husimi Q grid with Hammer coordinates")
    add_common(p)
    p.add_argument("--theta-points", type=int, dest="theta_points")
    p.add_argument("--phi-points", type=int, dest="phi_points")
    p.add_argument("--source", choices=["superposition", "witness-ground"], dest="source")

    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    merged = dict(DEFAULTS)
    config_path = getattr(args, "config_path", None)
    if config_path:
        try:
            with open(config_path, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
        if isinstance(loaded, dict) and "config" in loaded and isinstance(loaded["config"], dict):
            loaded = loaded["config"]  # accept a previously emitted report
        unknown = set(loaded) - set(DEFAULTS) - {"command"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        merged.update({k: v for k, v in loaded.items() if k != "command"})
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    return RunConfig(command=args.command, **merged)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
        return COMMANDS[config.command](config)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, TruncationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
