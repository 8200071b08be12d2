"""Invertible-disk algebra, the matrix sign iteration and the Lyapunov,
Stein, Hyper-Stein and Hyper-Lyapunov matrix inclusions."""
from __future__ import annotations

__version__ = "0.1.0"

from .cayley_sign import (
    SignResult,
    cayley,
    cayley_involution_check,
    newton_sign_step,
    predicted_iterations,
    sign,
    sign_identities_check,
)
from .config import DEFAULT_TOL, ToleranceConfig
from .disks import (
    Disk,
    DiskTrace,
    Eta,
    cayley_disk,
    convex_decomposition,
    d_inv,
    d_origin,
    eta_bounds_check,
    eta_of_point,
    eta_product,
    half_iteration,
    iterate_trace,
)
from .dynamics import Trajectory, decay_bound_check, max_bound_ratio, simulate
from .errors import (
    DimensionMismatchError,
    HyperLyapError,
    InfiniteEtaError,
    InvalidEtaError,
    InvalidMatrixError,
    MinusOneInSpectrumError,
    NoConvergenceError,
    NotHermitianError,
    NotInRightHalfPlaneError,
    NotInSetError,
    NotIsometryFamilyError,
    NotPositiveDefiniteError,
    NotStableError,
    OrderViolationError,
    RadiusNotSubUnitError,
    SamplerViolationError,
    SingularBaseError,
    SingularIterateError,
    SingularMatrixError,
)
from .inclusions import (
    InclusionCertificate,
    Kind,
    QmiSpec,
    build_qmi,
    convex_combination_check,
    eta_star_lyapunov,
    eta_star_stein,
    evaluate_qmi,
    half_step_eta_check,
    inversion_closure_check,
    is_member,
    matrix_convex_combination_check,
    product_contractivity_check,
    similarity_transport,
    solve_lyapunov,
    stein_norm_form,
    synthesize_certificate,
)
from .linalg import (
    HermitianEig,
    Mode,
    hermitian_eig,
    is_positive_definite,
    rho_pd_pencil,
    solve,
    spectral_norm,
    sqrt_pd,
)
from .matrixio import read_matrix, write_matrix
