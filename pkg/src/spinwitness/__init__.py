"""Cubic nonlinear squeezing witness for collective spin systems."""

from .benchmark import (
    BenchmarkResult,
    GroundStateResult,
    TwistTurnParams,
    benchmark_min_variance,
    ground_state,
    twist_turn_hamiltonian,
)
from .cubic_witness import (
    CubicParams,
    chi_from_chi_prime,
    chi_prime_from_chi,
    cubic_operator,
    cubic_unitary,
    witness_operator,
    xi_to_db,
)
from .errors import ConfigError, DomainError, TruncationError
from .husimi import HusimiGrid, hammer_projection, husimi_grid
from .optimizer import (
    SqueezingResult,
    dicke_superposition,
    xi_prepare,
    xi_resource,
    xi_specific,
)
from .oscillator import (
    FockSpace,
    GaussianMinResult,
    GaussianMoments,
    cv_cubic_operator,
    cv_witness_variance,
    cv_xi,
    embed,
    fock_superposition_01,
    gaussian_min_variance,
)
from .rotation_search import (
    CalibrationReport,
    OptimizerSettings,
    RotationSearchResult,
    calibrate_rotation,
    min_variance_over_rotations,
)
from .spin_core import (
    QuantumState,
    RotationSpec,
    SpinOperator,
    SpinSystem,
    angular_momentum,
    apply_rotation,
    dicke_state,
    expectation,
    make_system,
    mean_spin_vector,
    mixed_state,
    pure_state,
    rotation_unitary,
    spin_covariance,
    variance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
