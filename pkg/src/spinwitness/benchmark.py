"""Gaussian-like benchmark states: twist-and-turn ground states.

The free-state class is the family of ground states of

    H(g) = g^2/(1+g^2) Jz^2 + 1/(1+g^2) Jy^2 + g/(1+g^2) Jx

for g in [0, inf].  The benchmark variance is the minimum of the witness
variance over the family and over the free rotations, with g swept on a
compactified grid t = g/(1+g) and the best point refined by golden section.
The endpoint t=1 uses the exact Jz^2 limit.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConfigError, DomainError
from .rotation_search import OptimizerSettings, min_variance_over_rotations
from .spin_core import (
    QuantumState,
    RotationSpec,
    SpinOperator,
    SpinSystem,
    _ops,
)


@dataclass(frozen=True)
class TwistTurnParams:
    """Family parameter g >= 0, carried with its compactified coordinate t."""

    g: float
    t: float

    def __post_init__(self):
        if self.g < 0:
            raise DomainError(f"g must be nonnegative, got {self.g}")
        expected_t = 1.0 if np.isinf(self.g) else self.g / (1.0 + self.g)
        if abs(self.t - expected_t) > 1e-12:
            raise DomainError(f"t={self.t} inconsistent with g={self.g}")

    @classmethod
    def from_g(cls, g: float) -> "TwistTurnParams":
        t = 1.0 if np.isinf(g) else g / (1.0 + g)
        return cls(g=float(g), t=t)

    @classmethod
    def from_t(cls, t: float) -> "TwistTurnParams":
        if not 0.0 <= t <= 1.0:
            raise DomainError(f"t must lie in [0, 1], got {t}")
        g = np.inf if t >= 1.0 else t / (1.0 - t)
        return cls(g=g, t=float(t))


@dataclass(frozen=True)
class GroundStateResult:
    energy: float
    state: QuantumState
    degenerate: bool
    splitting: float


@dataclass(frozen=True)
class BenchmarkResult:
    min_variance: float
    optimal_g: float
    optimal_t: float
    optimal_rotation: RotationSpec
    optimal_state: QuantumState
    diagnostics: dict = field(default_factory=dict)


def twist_turn_hamiltonian(sys: SpinSystem, params: TwistTurnParams) -> SpinOperator:
    """H(g); the g -> inf limit is exactly Jz^2."""
    ops = _ops(sys.n_atoms)
    jz2 = (ops.jz @ ops.jz).real
    if params.t >= 1.0:
        return SpinOperator(matrix=jz2, label="H(g=inf)")
    g = params.g
    c = 1.0 / (1.0 + g * g)
    jy2 = (ops.jy @ ops.jy).real
    mat = (g * g * c) * jz2 + c * jy2 + (g * c) * ops.jx.real
    return SpinOperator(matrix=mat, label=f"H(g={g:g})")


def ground_state(op: SpinOperator, degeneracy_rel_tol: float = 1e-9) -> GroundStateResult:
    """Lowest eigenpair; flags near-degeneracy of the two lowest levels."""
    vals, vecs = np.linalg.eigh(op.matrix)
    spread = float(vals[-1] - vals[0])
    splitting = float(vals[1] - vals[0]) if len(vals) > 1 else np.inf
    degenerate = len(vals) > 1 and splitting < degeneracy_rel_tol * max(spread, 1e-300)
    return GroundStateResult(
        energy=float(vals[0]),
        state=QuantumState(kind="pure", amplitudes=vecs[:, 0].astype(complex)),
        degenerate=degenerate,
        splitting=splitting,
    )


def _ground_candidates(op: SpinOperator, rel_tol: float) -> list[QuantumState]:
    """Ground state, or for a degenerate lowest eigenspace every eigenvector
    plus a coarse grid of superpositions of the first two."""
    vals, vecs = np.linalg.eigh(op.matrix)
    spread = max(float(vals[-1] - vals[0]), 1e-300)
    idx = np.nonzero(vals - vals[0] < rel_tol * spread)[0]
    cands = [QuantumState(kind="pure", amplitudes=vecs[:, i].astype(complex)) for i in idx]
    if len(idx) >= 2:
        v1, v2 = vecs[:, idx[0]], vecs[:, idx[1]]
        for theta in np.linspace(0.0, np.pi / 2, 5):
            for phase in np.linspace(0.0, 2 * np.pi, 8, endpoint=False):
                amps = np.cos(theta) * v1 + np.sin(theta) * np.exp(1j * phase) * v2
                amps = amps / np.linalg.norm(amps)
                cands.append(QuantumState(kind="pure", amplitudes=amps))
    return cands


def _family_variance(sys, observable, t, settings):
    """Witness variance minimized over rotations for the family member at t."""
    h = twist_turn_hamiltonian(sys, TwistTurnParams.from_t(t))
    best = None
    for cand in _ground_candidates(h, settings.degeneracy_rel_tol):
        res = min_variance_over_rotations(sys, cand, observable,
                                          mode=settings.mode, settings=settings)
        if best is None or res.variance < best[0]:
            best = (res.variance, res.rotation, cand)
    return best


def benchmark_min_variance(
    sys: SpinSystem,
    observable: SpinOperator,
    settings: OptimizerSettings | None = None,
) -> BenchmarkResult:
    """Denominator of the squeezing ratio: the free-class variance floor.

    Grid points are independent; with settings.threads > 1 they are evaluated
    concurrently and reduced by minimum, ties broken toward smaller t.
    """
    if sys.n_atoms < 4:
        raise DomainError(f"witness benchmarks need N >= 4, got {sys.n_atoms}")
    settings = settings or OptimizerSettings()
    if settings.t_grid_points < 2:
        raise ConfigError(f"t grid needs at least 2 points, got {settings.t_grid_points}")
    ts = np.linspace(0.0, 1.0, settings.t_grid_points)

    if settings.threads > 1:
        with ThreadPoolExecutor(max_workers=settings.threads) as pool:
            results = list(pool.map(
                lambda t: _family_variance(sys, observable, t, settings), ts))
    else:
        results = [_family_variance(sys, observable, t, settings) for t in ts]

    values = np.array([r[0] for r in results])
    i = int(np.argmin(values))  # first minimum: ties go to smaller t
    best_val, best_rot, best_state = results[i]
    best_t = float(ts[i])

    refine_nfev = 0
    if 0 < i < len(ts) - 1:
        cache = {}

        def value_at(t):
            if t not in cache:
                cache[t] = _family_variance(sys, observable, float(t), settings)
            return cache[t][0]

        try:
            res = minimize_scalar(value_at, bracket=(ts[i - 1], ts[i], ts[i + 1]),
                                  method="golden",
                                  options={"xtol": settings.scalar_rel_tol})
            refine_nfev = int(res.nfev)
            if res.fun < best_val:
                best_val = float(res.fun)
                best_t = float(res.x)
                _, best_rot, best_state = cache[float(res.x)]
        except ValueError:
            pass  # no usable bracket: keep the grid minimum

    params = TwistTurnParams.from_t(best_t)
    return BenchmarkResult(
        min_variance=float(best_val),
        optimal_g=params.g,
        optimal_t=best_t,
        optimal_rotation=best_rot,
        optimal_state=best_state,
        diagnostics={
            "t_grid": ts.tolist(),
            "grid_variances": values.tolist(),
            "refine_evaluations": refine_nfev,
            "mode": settings.mode,
        },
    )
