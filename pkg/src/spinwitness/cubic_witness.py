"""Cubic unitary and the nonlinear witness operator.

The witness is built by conjugating Jy with the cubic unitary
U_c = exp(i chi' Jz^3) where chi' = (chi/3) (N/2)^(-3/2) is the effective
cubicity.  Jz is diagonal in the Dicke basis, so U_c is a diagonal phase
matrix and the witness costs two diagonal-scaled products, not a generic
matrix exponential.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .spin_core import SpinOperator, SpinSystem, _ops


def chi_prime_from_chi(chi: float, n_atoms: int) -> float:
    if n_atoms < 1:
        raise DomainError(f"n_atoms must be >= 1, got {n_atoms}")
    return (chi / 3.0) * (n_atoms / 2.0) ** -1.5


def chi_from_chi_prime(chi_prime: float, n_atoms: int) -> float:
    if n_atoms < 1:
        raise DomainError(f"n_atoms must be >= 1, got {n_atoms}")
    return 3.0 * chi_prime * (n_atoms / 2.0) ** 1.5


@dataclass(frozen=True)
class CubicParams:
    """Interaction strength chi and the size-independent cubicity chi'."""

    chi: float
    chi_prime: float
    n_atoms: int

    def __post_init__(self):
        expected = chi_prime_from_chi(self.chi, self.n_atoms)
        scale = max(abs(expected), abs(self.chi_prime), 1e-300)
        if abs(self.chi_prime - expected) > 1e-14 * scale:
            raise DomainError(
                f"chi_prime={self.chi_prime} inconsistent with chi={self.chi}, N={self.n_atoms}")

    @classmethod
    def from_chi_prime(cls, chi_prime: float, n_atoms: int) -> "CubicParams":
        return cls(chi=chi_from_chi_prime(chi_prime, n_atoms),
                   chi_prime=float(chi_prime), n_atoms=n_atoms)

    @classmethod
    def from_chi(cls, chi: float, n_atoms: int) -> "CubicParams":
        return cls(chi=float(chi), chi_prime=chi_prime_from_chi(chi, n_atoms),
                   n_atoms=n_atoms)


def cubic_unitary(sys: SpinSystem, params: CubicParams) -> np.ndarray:
    """Diagonal matrix with entries exp(i chi' m^3)."""
    if params.n_atoms != sys.n_atoms:
        raise DomainError(
            f"params built for N={params.n_atoms}, system has N={sys.n_atoms}")
    m = sys.m_values()
    return np.diag(np.exp(1j * params.chi_prime * m**3))


def cubic_phases(sys: SpinSystem, chi_prime: float) -> np.ndarray:
    """The diagonal of the cubic unitary, exp(i chi' m^3)."""
    m = sys.m_values()
    return np.exp(1j * chi_prime * m**3)


def cubic_operator(sys: SpinSystem, params: CubicParams) -> SpinOperator:
    """Witness operator U_c Jy U_c^dag; same spectrum as Jy."""
    if params.n_atoms != sys.n_atoms:
        raise DomainError(
            f"params built for N={params.n_atoms}, system has N={sys.n_atoms}")
    ph = cubic_phases(sys, params.chi_prime)
    jy = _ops(sys.n_atoms).jy
    mat = (ph[:, None] * jy) * ph.conj()[None, :]
    return SpinOperator(matrix=mat, label=f"O_c(chi'={params.chi_prime:g})")


def witness_operator(sys: SpinSystem, chi_prime: float) -> SpinOperator:
    """Convenience wrapper: witness at a given effective cubicity."""
    return cubic_operator(sys, CubicParams.from_chi_prime(chi_prime, sys.n_atoms))


def xi_to_db(xi: float) -> float:
    """10 log10(xi); xi must be positive."""
    if not xi > 0:
        raise DomainError(f"xi must be positive for the dB scale, got {xi}")
    return 10.0 * np.log10(xi)
