"""Husimi Q-function on the Bloch sphere, with Hammer-projection coordinates.

Q(theta, phi) = |<theta, phi|psi>|^2 against spin coherent states, where
|theta, phi> points along (sin t cos p, sin t sin p, cos t).  The closure
relation fixes the normalization: integral of Q over the sphere times
(N+1)/(4 pi) equals 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .spin_core import QuantumState, SpinSystem, _ops

MIN_THETA_POINTS = 16
MIN_PHI_POINTS = 32


@dataclass(frozen=True)
class HusimiGrid:
    theta: np.ndarray          # polar angles, midpoint grid on (0, pi)
    phi: np.ndarray            # azimuthal angles, midpoint grid on (0, 2 pi)
    q: np.ndarray              # Q values, shape (n_theta, n_phi)
    u: np.ndarray              # Hammer abscissa, same shape
    v: np.ndarray              # Hammer ordinate, same shape

    def normalization(self, n_atoms: int) -> float:
        """Closure-relation integral; 1 for an exact Q function."""
        d_theta = np.pi / self.theta.size
        d_phi = 2 * np.pi / self.phi.size
        integral = float(np.sum(self.q * np.sin(self.theta)[:, None]) * d_theta * d_phi)
        return integral * (n_atoms + 1) / (4 * np.pi)


def hammer_projection(theta: np.ndarray, phi: np.ndarray):
    """Equal-area Hammer coordinates from polar angle and azimuth."""
    lat = np.pi / 2 - theta               # latitude
    lon = np.mod(phi + np.pi, 2 * np.pi) - np.pi
    d = np.sqrt(1.0 + np.cos(lat) * np.cos(lon / 2))
    u = 2 * np.sqrt(2.0) * np.cos(lat) * np.sin(lon / 2) / d
    v = np.sqrt(2.0) * np.sin(lat) / d
    return u, v


def _pure_q(sys: SpinSystem, amps: np.ndarray, theta: np.ndarray, phi: np.ndarray):
    """|<theta, phi|psi>|^2 for each grid point, vectorized over phi."""
    cache = _ops(sys.n_atoms)
    top = np.zeros(sys.dim, dtype=complex)
    top[-1] = 1.0  # |j, +j>
    phase = np.exp(1j * np.outer(phi, cache.m))  # e^{+i phi m}, rows are phi
    q = np.empty((theta.size, phi.size))
    for i, th in enumerate(theta):
        coh = cache.jy_eigvecs @ (np.exp(-1j * th * cache.jy_eigvals)
                                  * (cache.jy_eigvecs.conj().T @ top))
        overlap = phase @ (coh.conj() * amps)
        q[i] = np.abs(overlap) ** 2
    return q


def husimi_grid(sys: SpinSystem, state: QuantumState,
                n_theta: int = 64, n_phi: int = 128) -> HusimiGrid:
    if n_theta < MIN_THETA_POINTS or n_phi < MIN_PHI_POINTS:
        raise DomainError(
            f"resolution {n_theta}x{n_phi} below minimum "
            f"{MIN_THETA_POINTS}x{MIN_PHI_POINTS}")
    theta = (np.arange(n_theta) + 0.5) * np.pi / n_theta
    phi = (np.arange(n_phi) + 0.5) * 2 * np.pi / n_phi
    if state.kind == "pure":
        q = _pure_q(sys, state.amplitudes, theta, phi)
    else:
        vals, vecs = np.linalg.eigh(state.density)
        q = np.zeros((n_theta, n_phi))
        for w, k in zip(vals, range(len(vals))):
            if w > 1e-14:
                q += w * _pure_q(sys, vecs[:, k], theta, phi)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    u, v = hammer_projection(tt, pp)
    return HusimiGrid(theta=theta, phi=phi, q=q, u=u, v=v)
