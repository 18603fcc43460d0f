"""Squeezing parameters: specific, resource, and preparation-optimal.

All three are ratios of a witness variance on the tested state to the
benchmark (free-state) floor for the same witness.  xi < 1 certifies that no
free state reaches the tested state's variance; xi = 0 marks an exact witness
eigenstate.  Values are also reported on the dB scale, 10 log10(xi).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .benchmark import BenchmarkResult, benchmark_min_variance
from .cubic_witness import chi_from_chi_prime, witness_operator, xi_to_db
from .errors import DomainError
from .rotation_search import (
    OptimizerSettings,
    RotationSearchResult,
    min_variance_over_rotations,
)
from .spin_core import QuantumState, RotationSpec, SpinSystem, make_system

SINGULAR_FACTOR = 1e-12


@dataclass(frozen=True)
class SqueezingResult:
    xi: float
    xi_db: float
    numerator_variance: float
    denominator_variance: float
    chi: float
    chi_prime: float
    rotation: RotationSpec
    mode: str
    singular_benchmark: bool
    benchmark: BenchmarkResult
    diagnostics: dict = field(default_factory=dict)


def dicke_superposition(sys: SpinSystem, gamma: float) -> QuantumState:
    """sqrt(gamma)|0> + sqrt(1-gamma)|1> on the bottom of the Dicke ladder."""
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma must lie in [0, 1], got {gamma}")
    amps = np.zeros(sys.dim, dtype=complex)
    amps[0] = np.sqrt(gamma)
    amps[1] = np.sqrt(1.0 - gamma)
    return QuantumState(kind="pure", amplitudes=amps)


@functools.lru_cache(maxsize=512)
def _cached_benchmark(n_atoms: int, chi_prime: float,
                      settings: OptimizerSettings) -> BenchmarkResult:
    sys = make_system(n_atoms)
    return benchmark_min_variance(sys, witness_operator(sys, chi_prime), settings)


def _ratio(num: float, den: float, n_atoms: int) -> tuple[float, float, bool]:
    """xi, xi_db and the singular-benchmark flag."""
    if den < SINGULAR_FACTOR * n_atoms**2:
        return np.inf, np.inf, True
    xi = num / den
    db = xi_to_db(xi) if xi > 0 else -np.inf
    return xi, db, False


def xi_specific(
    state: QuantumState,
    chi_prime: float,
    sys: SpinSystem,
    settings: OptimizerSettings | None = None,
) -> SqueezingResult:
    """Specific squeezing at a fixed effective cubicity."""
    if sys.n_atoms < 4:
        raise DomainError(f"witness evaluation needs N >= 4, got {sys.n_atoms}")
    settings = settings or OptimizerSettings()
    observable = witness_operator(sys, chi_prime)
    num: RotationSearchResult = min_variance_over_rotations(
        sys, state, observable, mode=settings.mode, settings=settings)
    bench = _cached_benchmark(sys.n_atoms, float(chi_prime), settings)
    xi, db, singular = _ratio(num.variance, bench.min_variance, sys.n_atoms)
    return SqueezingResult(
        xi=xi,
        xi_db=db,
        numerator_variance=num.variance,
        denominator_variance=bench.min_variance,
        chi=chi_from_chi_prime(chi_prime, sys.n_atoms),
        chi_prime=float(chi_prime),
        rotation=num.rotation,
        mode=settings.mode,
        singular_benchmark=singular,
        benchmark=bench,
        diagnostics={
            "numerator_evaluations": num.evaluations,
            "numerator_converged": num.converged,
        },
    )


def xi_resource(
    state: QuantumState,
    sys: SpinSystem,
    settings: OptimizerSettings | None = None,
) -> SqueezingResult:
    """Resource squeezing: the specific ratio minimized over chi'.

    A logarithmic grid over |chi'| is evaluated for each configured sign, the
    bracketed minimum is refined by golden section to relative tolerance
    settings.scalar_rel_tol, and the overall best point is reported.  Ties on
    the grid break toward the earlier (smaller-|chi'|) point.
    """
    if sys.n_atoms < 4:
        raise DomainError(f"witness evaluation needs N >= 4, got {sys.n_atoms}")
    settings = settings or OptimizerSettings()
    if settings.chi_abs_min <= 0 or settings.chi_abs_max <= settings.chi_abs_min:
        raise DomainError("chi' range must satisfy 0 < min < max")
    grid = np.geomspace(settings.chi_abs_min, settings.chi_abs_max,
                        settings.chi_points_per_sign)

    evaluations: list[tuple[float, SqueezingResult]] = []
    for sign in settings.chi_signs:
        for v in grid:
            cp = float(sign * v)
            evaluations.append((cp, xi_specific(state, cp, sys, settings)))

    finite = [(i, r.xi) for i, (_, r) in enumerate(evaluations) if np.isfinite(r.xi)]
    if not finite:
        raise ArithmeticError("benchmark is singular across the entire chi' range")
    i_best = min(finite, key=lambda pair: pair[1])[0]
    best_cp, best = evaluations[i_best]

    # refine within the sign segment holding the grid minimum
    seg = i_best // len(grid)
    pos = i_best - seg * len(grid)
    refined = {}
    if 0 < pos < len(grid) - 1:
        sign = settings.chi_signs[seg]

        def value(cp):
            cp = float(cp)
            if cp not in refined:
                refined[cp] = xi_specific(state, cp, sys, settings)
            r = refined[cp]
            return r.xi if np.isfinite(r.xi) else 1e300

        bracket = tuple(float(sign * grid[pos + k]) for k in (-1, 0, 1))
        try:
            res = minimize_scalar(value, bracket=bracket, method="golden",
                                  options={"xtol": settings.scalar_rel_tol})
            if np.isfinite(res.fun) and res.fun < best.xi:
                best_cp = float(res.x)
                best = refined[best_cp]
        except ValueError:
            pass

    grid_curve = [(cp, r.xi) for cp, r in evaluations]
    diag = dict(best.diagnostics)
    diag.update({
        "chi_prime_grid_curve": grid_curve,
        "chi_prime_opt": best_cp,
        "sign_note": "negative chi' optimum" if best_cp < 0 else "positive chi' optimum",
    })
    return SqueezingResult(
        xi=best.xi, xi_db=best.xi_db,
        numerator_variance=best.numerator_variance,
        denominator_variance=best.denominator_variance,
        chi=chi_from_chi_prime(best_cp, sys.n_atoms),
        chi_prime=best_cp,
        rotation=best.rotation,
        mode=best.mode,
        singular_benchmark=best.singular_benchmark,
        benchmark=best.benchmark,
        diagnostics=diag,
    )


def xi_prepare(
    family: Callable[[float], QuantumState],
    chi_prime: float,
    sys: SpinSystem,
    settings: OptimizerSettings | None = None,
    bounds: tuple[float, float] = (0.0, 1.0),
) -> SqueezingResult:
    """Preparation squeezing: xi_specific minimized over a one-parameter family.

    The family parameter is scanned on a coarse grid to bracket the minimum
    and then refined by golden section.  The benchmark is parameter
    independent and computed once.
    """
    settings = settings or OptimizerSettings()
    lo, hi = bounds
    if not lo < hi:
        raise DomainError(f"family parameter bounds must be increasing, got {bounds}")
    observable = witness_operator(sys, chi_prime)
    bench = _cached_benchmark(sys.n_atoms, float(chi_prime), settings)

    def num_at(p):
        res = min_variance_over_rotations(sys, family(float(p)), observable,
                                          mode=settings.mode, settings=settings)
        return res

    ps = np.linspace(lo, hi, settings.gamma_grid_points)
    nums = [num_at(p) for p in ps]
    values = np.array([r.variance for r in nums])
    i = int(np.argmin(values))
    best_p, best_num = float(ps[i]), nums[i]

    if 0 < i < len(ps) - 1:
        cache = {}

        def value(p):
            p = float(min(max(p, lo), hi))
            if p not in cache:
                cache[p] = num_at(p)
            return cache[p].variance

        try:
            res = minimize_scalar(value, bracket=(ps[i - 1], ps[i], ps[i + 1]),
                                  method="golden",
                                  options={"xtol": settings.scalar_rel_tol})
            if res.fun < best_num.variance:
                best_p = float(min(max(res.x, lo), hi))
                best_num = cache[best_p]
        except ValueError:
            pass

    xi, db, singular = _ratio(best_num.variance, bench.min_variance, sys.n_atoms)
    return SqueezingResult(
        xi=xi, xi_db=db,
        numerator_variance=best_num.variance,
        denominator_variance=bench.min_variance,
        chi=chi_from_chi_prime(chi_prime, sys.n_atoms),
        chi_prime=float(chi_prime),
        rotation=best_num.rotation,
        mode=settings.mode,
        singular_benchmark=singular,
        benchmark=bench,
        diagnostics={
            "family_parameter_opt": best_p,
            "family_grid": ps.tolist(),
            "family_grid_variances": values.tolist(),
        },
    )


def clear_benchmark_cache():
    _cached_benchmark.cache_clear()
