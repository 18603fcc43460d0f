"""Collective-spin systems on the Dicke basis.

A system of N spin-1/2 atoms restricted to the symmetric subspace carries
total spin j = N/2 and Hilbert-space dimension N+1.  Basis index k runs from
the south pole up: k <-> m = -j + k, so index 0 is |j, -j>.

All operators are dense complex matrices; matrix exponentials of Hermitian
generators are computed by eigendecomposition, never by series, so rotation
matrices are unitary to machine precision.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

# Dense storage only; cap the dimension so eigensolver cost stays bounded.
MAX_ATOMS = 4000

HERMITICITY_TOL = 1e-12
NORM_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


@dataclass(frozen=True)
class SpinSystem:
    """N two-level atoms in the maximal-spin (symmetric) sector."""

    n_atoms: int
    j: float
    dim: int

    def m_values(self) -> np.ndarray:
        """Jz eigenvalues m = -j ... +j in basis order."""
        return np.arange(self.dim) - self.j


def make_system(n_atoms: int) -> SpinSystem:
    if not isinstance(n_atoms, (int, np.integer)) or isinstance(n_atoms, bool):
        raise DomainError(f"n_atoms must be an integer, got {n_atoms!r}")
    if n_atoms < 1:
        raise DomainError(f"n_atoms must be >= 1, got {n_atoms}")
    if n_atoms > MAX_ATOMS:
        raise DomainError(f"n_atoms must be <= {MAX_ATOMS}, got {n_atoms}")
    return SpinSystem(n_atoms=int(n_atoms), j=n_atoms / 2.0, dim=n_atoms + 1)


@dataclass(frozen=True)
class SpinOperator:
    """Hermitian operator on the Dicke basis with a human-readable label."""

    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        mat = np.ascontiguousarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DomainError(f"operator matrix must be square, got shape {mat.shape}")
        scale = np.abs(mat).max() if mat.size else 0.0
        if scale > 0 and np.abs(mat - mat.conj().T).max() > HERMITICITY_TOL * scale:
            raise DomainError(f"operator {self.label!r} is not Hermitian")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class QuantumState:
    """Pure amplitude vector or mixed density matrix on the Dicke basis."""

    kind: str  # "pure" or "mixed"
    amplitudes: np.ndarray | None = None
    density: np.ndarray | None = None

    @property
    def dim(self) -> int:
        if self.kind == "pure":
            return self.amplitudes.shape[0]
        return self.density.shape[0]

    def density_matrix(self) -> np.ndarray:
        if self.kind == "pure":
            return np.outer(self.amplitudes, self.amplitudes.conj())
        return self.density


def pure_state(amplitudes: np.ndarray) -> QuantumState:
    amps = np.asarray(amplitudes, dtype=complex).ravel()
    norm2 = float(np.vdot(amps, amps).real)
    if abs(norm2 - 1.0) > NORM_TOL:
        raise DomainError(f"pure state squared-norm {norm2} deviates from 1")
    return QuantumState(kind="pure", amplitudes=amps)


def mixed_state(density: np.ndarray) -> QuantumState:
    rho = np.asarray(density, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DomainError(f"density matrix must be square, got shape {rho.shape}")
    if abs(np.trace(rho).real - 1.0) > TRACE_TOL or abs(np.trace(rho).imag) > TRACE_TOL:
        raise DomainError(f"density matrix trace {np.trace(rho)} deviates from 1")
    if np.abs(rho - rho.conj().T).max() > HERMITICITY_TOL * max(np.abs(rho).max(), 1.0):
        raise DomainError("density matrix is not Hermitian")
    lo = np.linalg.eigvalsh(rho).min()
    if lo < -PSD_TOL:
        raise DomainError(f"density matrix has negative eigenvalue {lo}")
    return QuantumState(kind="mixed", density=rho)


@dataclass(frozen=True)
class RotationSpec:
    """z-y-z Euler angles; canonical range alpha, gamma_euler in [0, 2pi), beta in [0, pi]."""

    alpha: float
    beta: float
    gamma_euler: float

    def __post_init__(self):
        a, b, g = float(self.alpha), float(self.beta), float(self.gamma_euler)
        if not (np.isfinite(a) and np.isfinite(b) and np.isfinite(g)):
            raise DomainError("rotation angles must be finite")
        two_pi = 2 * np.pi

        def wrap(x):
            x = x % two_pi
            return 0.0 if x >= two_pi else x

        b = wrap(b)
        if b > np.pi:
            # same rotation, up to a global phase: Rz(a+pi) Ry(2pi-b) Rz(g+pi)
            b = two_pi - b
            a += np.pi
            g += np.pi
        object.__setattr__(self, "alpha", wrap(a))
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "gamma_euler", wrap(g))


IDENTITY_ROTATION = RotationSpec(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class _OperatorCache:
    """Per-system operators and the eigendecompositions used by rotations."""

    m: np.ndarray
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    jy_eigvals: np.ndarray = field(repr=False, default=None)
    jy_eigvecs: np.ndarray = field(repr=False, default=None)
    jx_eigvals: np.ndarray = field(repr=False, default=None)
    jx_eigvecs: np.ndarray = field(repr=False, default=None)


@functools.lru_cache(maxsize=64)
def _ops(n_atoms: int) -> _OperatorCache:
    j = n_atoms / 2.0
    dim = n_atoms + 1
    m = np.arange(dim) - j
    ladder = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    jp = np.zeros((dim, dim), dtype=complex)
    jp[np.arange(1, dim), np.arange(dim - 1)] = ladder
    jm = jp.conj().T
    jx = (jp + jm) / 2.0
    jy = (jp - jm) / 2.0j
    jz = np.diag(m.astype(complex))
    wy, vy = np.linalg.eigh(jy)
    wx, vx = np.linalg.eigh(jx)
    return _OperatorCache(m=m, jx=jx, jy=jy, jz=jz,
                          jy_eigvals=wy, jy_eigvecs=vy,
                          jx_eigvals=wx, jx_eigvecs=vx)


def angular_momentum(sys: SpinSystem, axis: str) -> SpinOperator:
    """Collective J_axis as a dense Hermitian matrix."""
    cache = _ops(sys.n_atoms)
    try:
        mat = {"x": cache.jx, "y": cache.jy, "z": cache.jz}[axis]
    except KeyError:
        raise DomainError(f"axis must be one of x, y, z, got {axis!r}") from None
    return SpinOperator(matrix=mat, label=f"J{axis}")


def dicke_state(sys: SpinSystem, k: int) -> QuantumState:
    """Basis state |j, m = -j + k>."""
    if not (0 <= k <= sys.n_atoms):
        raise DomainError(f"Dicke index k={k} outside 0..{sys.n_atoms}")
    amps = np.zeros(sys.dim, dtype=complex)
    amps[k] = 1.0
    return QuantumState(kind="pure", amplitudes=amps)


def rotation_unitary(sys: SpinSystem, rot: RotationSpec) -> np.ndarray:
    """exp(-i a Jz) exp(-i b Jy) exp(-i g Jz), each factor by eigendecomposition."""
    cache = _ops(sys.n_atoms)
    phase_a = np.exp(-1j * rot.alpha * cache.m)
    phase_g = np.exp(-1j * rot.gamma_euler * cache.m)
    ry = (cache.jy_eigvecs * np.exp(-1j * rot.beta * cache.jy_eigvals)) @ cache.jy_eigvecs.conj().T
    return (phase_a[:, None] * ry) * phase_g[None, :]


def apply_rotation(sys: SpinSystem, state: QuantumState, rot: RotationSpec) -> QuantumState:
    """Rotate a state; pure states stay pure."""
    cache = _ops(sys.n_atoms)
    if state.kind == "pure":
        out = np.exp(-1j * rot.gamma_euler * cache.m) * state.amplitudes
        out = cache.jy_eigvecs @ (np.exp(-1j * rot.beta * cache.jy_eigvals)
                                  * (cache.jy_eigvecs.conj().T @ out))
        out = np.exp(-1j * rot.alpha * cache.m) * out
        return QuantumState(kind="pure", amplitudes=out)
    u = rotation_unitary(sys, rot)
    return QuantumState(kind="mixed", density=u @ state.density @ u.conj().T)


def expectation(state: QuantumState, op: SpinOperator) -> float:
    """<O> = <psi|O|psi> or Tr[rho O]; asserts the imaginary residual is negligible."""
    if state.dim != op.dim:
        raise DomainError(f"dimension mismatch: state {state.dim} vs operator {op.dim}")
    if state.kind == "pure":
        val = np.vdot(state.amplitudes, op.matrix @ state.amplitudes)
    else:
        val = np.trace(op.matrix @ state.density)
    scale = max(abs(val), 1.0)
    if abs(val.imag) > 1e-10 * scale:
        raise ArithmeticError(f"expectation has imaginary residual {val.imag}")
    return float(val.real)


def variance(state: QuantumState, op: SpinOperator) -> float:
    """var[O] = <O^2> - <O>^2, clamped to 0 when within -1e-10."""
    if state.dim != op.dim:
        raise DomainError(f"dimension mismatch: state {state.dim} vs operator {op.dim}")
    if state.kind == "pure":
        vec = op.matrix @ state.amplitudes
        mean = np.vdot(state.amplitudes, vec).real
        second = np.vdot(vec, vec).real
    else:
        mean = expectation(state, op)
        second = np.trace(op.matrix @ op.matrix @ state.density).real
    val = second - mean * mean
    if val < 0:
        if val < -1e-10 * max(second, 1.0):
            raise ArithmeticError(f"variance {val} below tolerance floor")
        val = 0.0
    return float(val)


def mean_spin_vector(sys: SpinSystem, state: QuantumState) -> np.ndarray:
    """(<Jx>, <Jy>, <Jz>)."""
    return np.array([expectation(state, angular_momentum(sys, ax)) for ax in "xyz"])


def spin_covariance(sys: SpinSystem, state: QuantumState) -> np.ndarray:
    """Symmetrized 3x3 covariance matrix of (Jx, Jy, Jz)."""
    ops = [angular_momentum(sys, ax).matrix for ax in "xyz"]
    rho = state.density_matrix()
    means = [np.trace(o @ rho).real for o in ops]
    cov = np.empty((3, 3))
    for i in range(3):
        for k in range(i, 3):
            sym = 0.5 * np.trace((ops[i] @ ops[k] + ops[k] @ ops[i]) @ rho).real
            cov[i, k] = cov[k, i] = sym - means[i] * means[k]
    return cov
