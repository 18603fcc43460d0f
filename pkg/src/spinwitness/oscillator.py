"""Harmonic-oscillator limit of the cubic witness.

For very large systems the transverse spin components near a pole behave as
quadratures x, p with [x, p] = i, the witness becomes p + chi x^2, and the
free class becomes the pure Gaussian states.  This module evaluates the
squeezing ratio in that limit on a truncated Fock space, mirroring the spin
pipeline: the tested state is displaced to zero mean, the residual phase
rotation is scanned, and both signs of chi are admitted through parity.

The overall sqrt(N/2) scale of the spin operators cancels in the ratio; the
spin N-sweep approaches these values from below.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .errors import DomainError, TruncationError

TOP_POPULATION_TOL = 1e-10


@dataclass(frozen=True)
class FockSpace:
    """Truncated oscillator with quadratures x, p and [x, p] = i on the bulk."""

    cutoff: int
    x_op: np.ndarray = field(repr=False, default=None)
    p_op: np.ndarray = field(repr=False, default=None)
    n_diag: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.cutoff < 10:
            raise DomainError(f"Fock cutoff must be >= 10, got {self.cutoff}")
        n = np.arange(self.cutoff)
        a = np.zeros((self.cutoff, self.cutoff), dtype=complex)
        a[np.arange(self.cutoff - 1), np.arange(1, self.cutoff)] = np.sqrt(n[1:])
        adag = a.conj().T
        object.__setattr__(self, "x_op", (a + adag) / np.sqrt(2.0))
        object.__setattr__(self, "p_op", 1j * (adag - a) / np.sqrt(2.0))
        object.__setattr__(self, "n_diag", n)


@dataclass(frozen=True)
class GaussianMoments:
    """First and second moments of a pure Gaussian state."""

    mean_x: float
    mean_p: float
    vx: float
    vp: float
    cxp: float

    def __post_init__(self):
        if not (self.vx > 0 and self.vp > 0):
            raise DomainError("Gaussian variances must be positive")
        if self.vx * self.vp - self.cxp**2 < 0.25 - 1e-12:
            raise DomainError("Gaussian moments violate the uncertainty bound")


@dataclass(frozen=True)
class GaussianMinResult:
    min_variance: float
    moments: GaussianMoments | None
    divergent: bool
    converged: bool


def cv_cubic_operator(space: FockSpace, chi: float) -> np.ndarray:
    """Witness in the oscillator limit: p + chi x^2."""
    return space.p_op + chi * (space.x_op @ space.x_op)


def _gaussian_objective(chi: float):
    # var(p + chi x^2) on a pure Gaussian, p-mean eliminated exactly:
    # Vp + 4 chi xbar Cxp + chi^2 (2 Vx^2 + 4 xbar^2 Vx) with Vp = (1/4+Cxp^2)/Vx
    def f(params):
        xbar, log_vx, cxp = params
        vx = np.exp(log_vx)
        vp = (0.25 + cxp * cxp) / vx
        return vp + 4.0 * chi * xbar * cxp + chi * chi * (2.0 * vx * vx + 4.0 * xbar * xbar * vx)
    return f


def gaussian_min_variance(chi: float) -> GaussianMinResult:
    """Minimum of var(p + chi x^2) over pure Gaussian states.

    At chi = 0 the infimum is 0 (unbounded p squeezing); it is reported with
    the divergent flag instead of a minimizer.
    """
    if chi == 0.0:
        return GaussianMinResult(0.0, None, divergent=True, converged=True)
    f = _gaussian_objective(chi)
    log_vx0 = np.log((16.0 * chi * chi) ** (-1.0 / 3.0))
    starts = [
        (0.0, log_vx0, 0.0),
        (0.0, 0.0, 0.0),
        (1.0, log_vx0, 0.5),
        (-1.0, log_vx0, -0.5),
        (0.0, log_vx0 + 1.0, 0.0),
        (0.0, log_vx0 - 1.0, 0.0),
        (0.5, log_vx0, -0.5),
        (-0.5, log_vx0, 0.5),
    ]
    best = None
    converged = False
    for x0 in starts:
        res = minimize(f, np.array(x0), method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-14, "maxfev": 4000})
        if best is None or res.fun < best.fun:
            best = res
            converged = bool(res.success)
    xbar, log_vx, cxp = best.x
    vx = float(np.exp(log_vx))
    vp = (0.25 + cxp * cxp) / vx
    moments = GaussianMoments(mean_x=float(xbar), mean_p=0.0, vx=vx,
                              vp=float(vp), cxp=float(cxp))
    return GaussianMinResult(float(best.fun), moments, divergent=False,
                             converged=converged)


def _check_truncation(state: np.ndarray):
    top = abs(state[-1]) ** 2
    if top > TOP_POPULATION_TOL:
        raise TruncationError(
            f"top Fock level holds population {top:.3e} > {TOP_POPULATION_TOL:.0e}; "
            "increase the cutoff")


def _center(space: FockSpace, state: np.ndarray) -> np.ndarray:
    """Displace the state so both quadrature means vanish."""
    xbar = np.vdot(state, space.x_op @ state).real
    pbar = np.vdot(state, space.p_op @ state).real
    gen = -xbar * space.p_op + pbar * space.x_op
    w, v = np.linalg.eigh(gen)
    return v @ (np.exp(-1j * w) * (v.conj().T @ state))


def cv_witness_variance(space: FockSpace, state: np.ndarray, chi: float,
                        scan_steps: int = 72) -> float:
    """Witness variance of a Fock-space vector, minimized over the free frame.

    The free frame covers displacement (handled by exact centering), the
    residual phase rotation (scanned, then golden-polished), and the sign of
    chi (parity equivalence).
    """
    state = np.asarray(state, dtype=complex).ravel()
    state = state / np.linalg.norm(state)
    _check_truncation(state)
    centered = _center(space, state)
    ops = [cv_cubic_operator(space, chi), cv_cubic_operator(space, -chi)]

    def value(theta):
        rotated = np.exp(-1j * theta * space.n_diag) * centered
        best = np.inf
        for op in ops:
            vec = op @ rotated
            mean = np.vdot(rotated, vec).real
            best = min(best, np.vdot(vec, vec).real - mean * mean)
        return best

    thetas = np.linspace(0.0, 2 * np.pi, scan_steps, endpoint=False)
    vals = [value(t) for t in thetas]
    i = int(np.argmin(vals))
    best = vals[i]
    step = 2 * np.pi / scan_steps
    try:
        res = minimize_scalar(value, bracket=(thetas[i] - step, thetas[i], thetas[i] + step),
                              method="golden", options={"xtol": 1e-10})
        best = min(best, float(res.fun))
    except ValueError:
        pass
    return float(best)


def cv_xi(
    space: FockSpace,
    state: np.ndarray,
    chi: float | None = None,
    chi_range: tuple[float, float] = (1e-2, 6.0),
    chi_points: int = 41,
    rel_tol: float = 1e-4,
) -> tuple[float, float]:
    """Oscillator-limit squeezing ratio.

    With chi given, returns the specific ratio at that strength.  With
    chi=None the ratio is minimized over a log grid on chi_range (the
    resource variant) and refined by golden section.  Returns (xi, chi_opt).
    """
    if chi is not None:
        den = gaussian_min_variance(chi)
        if den.min_variance <= 0:
            return np.inf, chi
        return cv_witness_variance(space, state, chi) / den.min_variance, chi

    lo, hi = chi_range
    if not 0 < lo < hi:
        raise DomainError(f"chi_range must satisfy 0 < lo < hi, got {chi_range}")
    grid = np.geomspace(lo, hi, chi_points)

    def ratio(c):
        c = float(abs(c))
        den = gaussian_min_variance(c).min_variance
        if den <= 0:
            return 1e300
        return cv_witness_variance(space, state, c) / den

    vals = [ratio(c) for c in grid]
    i = int(np.argmin(vals))
    best, best_chi = vals[i], float(grid[i])
    if 0 < i < len(grid) - 1:
        try:
            res = minimize_scalar(ratio, bracket=(grid[i - 1], grid[i], grid[i + 1]),
                                  method="golden", options={"xtol": rel_tol})
            if res.fun < best:
                best, best_chi = float(res.fun), float(abs(res.x))
        except ValueError:
            pass
    return best, best_chi


def fock_superposition_01() -> np.ndarray:
    """(|0> + |1>)/sqrt(2) amplitudes, to be embedded in any cutoff."""
    return np.array([1.0, 1.0]) / np.sqrt(2.0)


def embed(space: FockSpace, amplitudes: np.ndarray) -> np.ndarray:
    out = np.zeros(space.cutoff, dtype=complex)
    amps = np.asarray(amplitudes, dtype=complex).ravel()
    out[: amps.size] = amps
    return out
