"""Lyapunov, Stein, Hyper-Stein and Hyper-Lyapunov matrix inclusions.

All four sets are cut out by a quadratic matrix inequality

    [A; I]^* M [A; I] = A^* W A + R A + (R A)^* + Y = Q  >= 0,

with a 2n x 2n Hermitian ``M = [[W, R^*], [R, Y]]`` built from a base
matrix (H, or a positive definite P for the hyper kinds) and a parameter
eta in (1, inf]:

=================  ====================================
kind               M
=================  ====================================
Lyapunov           [[0, H], [H, 0]]
Stein              [[-H, 0], [0, H]]
Hyper-Stein        [[-P, 0], [0, (eta-1)/(eta+1) P]]
Hyper-Lyapunov     [[-P/eta, P], [P, -P/eta]]
=================  ====================================

At eta = inf the hyper kinds coincide with the classical ones.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import ToleranceConfig, resolve
from .disks import Eta, as_eta, eta_product, half_iteration
from .errors import (
    DimensionMismatchError,
    NotInSetError,
    NotIsometryFamilyError,
    NotPositiveDefiniteError,
    NotStableError,
    SingularBaseError,
    SingularMatrixError,
)
from .linalg import (
    Mode,
    _pd_rule,
    as_matrix,
    check_hermitian,
    hermitian_eig,
    hermitian_eigvals_batch,
    hermitian_part,
    inv_sqrt_pd,
    inverse,
    is_positive_definite,
    rho_pd_pencil,
    solve,
    spectral_norm,
    sqrt_pd,
)

__all__ = [
    "Kind",
    "QmiSpec",
    "InclusionCertificate",
    "build_qmi",
    "evaluate_qmi",
    "is_member",
    "is_member_batch",
    "stein_norm_form",
    "eta_star_lyapunov",
    "eta_star_stein",
    "solve_lyapunov",
    "synthesize_certificate",
    "half_step_target",
    "half_step_eta_check",
    "similarity_transport",
    "product_contractivity_check",
    "convex_combination_check",
    "isometry_combination",
    "matrix_convex_combination_check",
    "inversion_closure_check",
]

MAX_LYAPUNOV_DIM = 30


class Kind(str, enum.Enum):
    LYAPUNOV = "lyapunov"
    STEIN = "stein"
    HYPER_STEIN = "hyper-stein"
    HYPER_LYAPUNOV = "hyper-lyapunov"

    @property
    def is_hyper(self) -> bool:
        return self in (Kind.HYPER_STEIN, Kind.HYPER_LYAPUNOV)

    @classmethod
    def parse(cls, text: str) -> Kind:
        key = text.strip().lower().replace("_", "-")
        aliases = {"lyap": "lyapunov", "hyperstein": "hyper-stein",
                   "hyperlyapunov": "hyper-lyapunov", "hyper-lyap": "hyper-lyapunov"}
        return cls(aliases.get(key, key))

    def scalar_blocks(self, eta: Eta) -> tuple[float, float, float]:
        """``(alpha, beta, gamma)`` with ``M = [[alpha, beta], [beta, gamma]] (x) base``."""
        if self is Kind.LYAPUNOV:
            return 0.0, 1.0, 0.0
        if self is Kind.STEIN:
            return -1.0, 0.0, 1.0
        if self is Kind.HYPER_STEIN:
            return -1.0, 0.0, eta.stein_ratio
        return -eta.reciprocal, 1.0, -eta.reciprocal


@dataclass(frozen=True)
class QmiSpec:
    kind: Kind
    eta: Eta
    base: np.ndarray
    m: np.ndarray
    signature: tuple[int, int] | None = None

    @property
    def n(self) -> int:
        return self.base.shape[0]

    @property
    def w(self) -> np.ndarray:
        return self.m[: self.n, : self.n]

    @property
    def r(self) -> np.ndarray:
        return self.m[self.n:, : self.n]

    @property
    def y(self) -> np.ndarray:
        return self.m[self.n:, self.n:]


@dataclass(frozen=True)
class InclusionCertificate:
    """Witness (or refutation) of membership: the slack Q and its least eigenvalue."""

    kind: Kind
    base: np.ndarray
    eta: Eta
    slack: np.ndarray
    min_eig_slack: float
    strict: bool

    def to_dict(self) -> dict:
        from .matrixio import matrix_to_dict

        return {
            "kind": self.kind.value,
            "eta": "inf" if self.eta.is_infinite else self.eta.value,
            "base": matrix_to_dict(self.base),
            "slack": matrix_to_dict(self.slack),
            "min_eig_slack": self.min_eig_slack,
            "strict": self.strict,
        }


def _signature(m: np.ndarray, tol: ToleranceConfig) -> tuple[int, int]:
    w = hermitian_eig(m, tol).eigenvalues
    band = tol.pd * max(1.0, float(np.max(np.abs(w))))
    return int(np.sum(w > band)), int(np.sum(w < -band))


def build_qmi(kind: Kind | str, base, eta=None, *, require_pd: bool | None = None,
              check_signature: bool = True, tol: ToleranceConfig | None = None) -> QmiSpec:
    """Assemble the 2n x 2n matrix M of the requested inclusion.

    Hyper kinds need ``eta`` and, unless ``require_pd=False``, a positive
    definite base; Lyapunov and Stein accept any nonsingular Hermitian base
    and ignore ``eta``.

    Raises
    ------
    NotHermitianError, NotPositiveDefiniteError, SingularBaseError
    """
    tol = resolve(tol)
    kind = Kind.parse(kind) if isinstance(kind, str) else kind
    h = check_hermitian(base, tol, name="base")
    n = h.shape[0]
    if kind.is_hyper:
        if eta is None:
            raise ValueError(f"{kind.value} requires eta")
        eta = as_eta(eta)
    else:
        eta = Eta.infinity()
    if require_pd is None:
        require_pd = kind.is_hyper

    w = hermitian_eig(h, tol).eigenvalues
    scale = max(1.0, float(np.max(np.abs(w))))
    if require_pd and not _pd_rule(w, Mode.OPEN, tol):
        raise NotPositiveDefiniteError(f"{kind.value} base must be positive definite")
    if float(np.min(np.abs(w))) <= tol.pd * scale:
        raise SingularBaseError("base matrix is singular")

    alpha, beta, gamma = kind.scalar_blocks(eta)
    m = np.kron(np.array([[alpha, beta], [beta, gamma]], dtype=np.complex128), h)
    spec = QmiSpec(kind, eta, h, m)
    if check_signature:
        sig = _signature(m, tol)
        if sig != (n, n):
            raise SingularBaseError(f"M has signature {sig}, expected ({n}, {n})")
        spec = QmiSpec(kind, eta, h, m, sig)
    return spec


def evaluate_qmi(spec: QmiSpec, a) -> np.ndarray:
    """The slack ``Q = A^* W A + R A + (R A)^* + Y``, symmetrized."""
    a = as_matrix(a, square=True, name="A")
    if a.shape[0] != spec.n:
        raise DimensionMismatchError(f"A is {a.shape[0]}x{a.shape[0]}, spec is {spec.n}x{spec.n}")
    ra = spec.r @ a
    q = a.conj().T @ spec.w @ a + ra + ra.conj().T + spec.y
    return hermitian_part(q)


def is_member(spec: QmiSpec, a, mode: Mode | str = Mode.OPEN,
              tol: ToleranceConfig | None = None) -> tuple[bool, InclusionCertificate]:
    tol = resolve(tol)
    q = evaluate_qmi(spec, a)
    w = hermitian_eig(q, tol).eigenvalues
    member = _pd_rule(w, Mode(mode), tol)
    strict = _pd_rule(w, Mode.OPEN, tol)
    cert = InclusionCertificate(spec.kind, spec.base, spec.eta, q, float(w[0]), strict)
    return member, cert


def is_member_batch(spec: QmiSpec, matrices, mode: Mode | str = Mode.OPEN,
                    tol: ToleranceConfig | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized `is_member` over a (B, n, n) stack.

    Returns boolean membership and the least slack eigenvalue per matrix.
    """
    tol = resolve(tol)
    a = np.asarray(matrices, dtype=np.complex128)
    if a.ndim != 3 or a.shape[1:] != (spec.n, spec.n):
        raise DimensionMismatchError(f"expected a (B, {spec.n}, {spec.n}) stack, got {a.shape}")
    ah = np.conj(np.swapaxes(a, 1, 2))
    ra = spec.r @ a
    q = ah @ spec.w @ a + ra + np.conj(np.swapaxes(ra, 1, 2)) + spec.y
    w = hermitian_eigvals_batch(0.5 * (q + np.conj(np.swapaxes(q, 1, 2))), tol)
    band = tol.pd * np.maximum(1.0, np.max(np.abs(w), axis=1)) if len(w) else np.zeros(0)
    if Mode(mode) is Mode.OPEN:
        members = w[:, 0] > band
    else:
        members = w[:, 0] >= -band
    return members, w[:, 0].copy()


def _member(kind: Kind, p: np.ndarray, eta, a, mode, tol) -> bool:
    spec = build_qmi(kind, p, eta, check_signature=False, tol=tol)
    return is_member(spec, a, mode, tol)[0]


def stein_norm_form(p, a, tol: ToleranceConfig | None = None) -> float:
    """``||P^{1/2} A P^{-1/2}||_2``; A is in S_P(eta) iff this is below
    ``sqrt((eta-1)/(eta+1))``."""
    a = as_matrix(a, square=True, name="A")
    return spectral_norm(sqrt_pd(p, tol) @ a @ inv_sqrt_pd(p, tol), tol)


def eta_star_lyapunov(p, a, tol: ToleranceConfig | None = None) -> float:
    """Least eta with A in the closed Hyper-Lyapunov set of P.

    Equal to ``rho((A^* P A + P)(P A + A^* P)^{-1})``; at least 1.

    Raises
    ------
    NotInSetError
        ``P A + A^* P`` is not positive definite, so no finite eta works.
    """
    tol = resolve(tol)
    p = check_hermitian(p, tol, name="P")
    a = as_matrix(a, square=True, name="A")
    if not is_positive_definite(p, Mode.OPEN, tol)[0]:
        raise NotPositiveDefiniteError("P is not positive definite")
    lyap = hermitian_part(p @ a + a.conj().T @ p)
    if not is_positive_definite(lyap, Mode.OPEN, tol)[0]:
        raise NotInSetError("P A + A* P is not positive definite")
    quad = hermitian_part(a.conj().T @ p @ a + p)
    return rho_pd_pencil(quad, lyap, tol)


def eta_star_stein(p, a, tol: ToleranceConfig | None = None) -> float:
    """Least eta with A in the closed Hyper-Stein set of P.

    With ``s = stein_norm_form(P, A)`` this is ``(1 + s^2) / (1 - s^2)``;
    it is 1 for A = 0.

    Raises
    ------
    NotInSetError
        ``s >= 1``.
    """
    s = stein_norm_form(p, a, tol)
    if s >= 1.0:
        raise NotInSetError(f"||P^1/2 A P^-1/2||_2 = {s} >= 1")
    s2 = s * s
    return (1.0 + s2) / (1.0 - s2)


def solve_lyapunov(a, q, tol: ToleranceConfig | None = None) -> np.ndarray:
    """Hermitian P with ``P A + A^* P = Q``.

    Solved as the n^2 x n^2 system ``(A^T (x) I + I (x) A^*) vec(P) = vec(Q)``
    (column-major vec) by LU; limited to n <= 30.

    Raises
    ------
    SingularMatrixError
        A and -A^* share an eigenvalue, e.g. A has spectrum on the
        imaginary axis.
    """
    tol = resolve(tol)
    a = as_matrix(a, square=True, name="A")
    q = check_hermitian(q, tol, name="Q")
    n = a.shape[0]
    if q.shape[0] != n:
        raise DimensionMismatchError("A and Q must have the same size")
    if n > MAX_LYAPUNOV_DIM:
        raise ValueError(f"dense Lyapunov solve is limited to n <= {MAX_LYAPUNOV_DIM}")
    eye = np.eye(n, dtype=np.complex128)
    k = np.kron(a.T, eye) + np.kron(eye, a.conj().T)
    vec_p = solve(k, q.reshape(-1, order="F"), tol)
    return hermitian_part(vec_p.reshape((n, n), order="F"))


def synthesize_certificate(a, tol: ToleranceConfig | None = None) -> tuple[np.ndarray, float]:
    """Find ``(P, eta)`` with A in the closed Hyper-Lyapunov set L_P(eta).

    P solves ``P A + A^* P = I``; eta is the exact threshold for that P, so
    A is a strict member for every larger eta.

    Raises
    ------
    NotStableError
        A is not positively stable (P singular or not positive definite).
    """
    tol = resolve(tol)
    a = as_matrix(a, square=True, name="A")
    n = a.shape[0]
    try:
        p = solve_lyapunov(a, np.eye(n), tol)
    except SingularMatrixError as exc:
        raise NotStableError("A has spectrum on the imaginary axis") from exc
    if not is_positive_definite(p, Mode.OPEN, tol)[0]:
        raise NotStableError("A is not positively stable")
    return p, eta_star_lyapunov(p, a, tol)


def half_step_target(eta, theta: float = 0.5) -> Eta:
    """eta guaranteed for ``theta A + (1 - theta) A^{-1}`` when A is in L_P(eta).

    With ``t = max(theta, 1 - theta)`` the bound is
    ``t eta + (1 - t) / eta``, the convex-combination form of the product
    rule; at ``theta = 1/2`` it is the half iteration ``(eta + 1/eta)/2``.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError("theta must lie in [0, 1]")
    eta = as_eta(eta)
    if theta == 0.5:
        return half_iteration(eta)
    e = eta.finite()
    t = max(theta, 1.0 - theta)
    # rewritten as 1 + (eta - 1)(t eta - (1 - t)) / eta
    return Eta(max(1.0 + (e - 1.0) * (t * e - (1.0 - t)) / e, np.nextafter(1.0, 2.0)))


def half_step_eta_check(a, p, eta, theta: float = 0.5, mode: Mode | str = Mode.CLOSED,
                        tol: ToleranceConfig | None = None) -> bool:
    """Check ``theta A + (1 - theta) A^{-1}`` lies in L_P(half_step_target(eta, theta)).

    A must already be in the closed set L_P(eta).
    """
    tol = resolve(tol)
    a = as_matrix(a, square=True, name="A")
    if not _member(Kind.HYPER_LYAPUNOV, p, eta, a, Mode.CLOSED, tol):
        raise ValueError("A is not in the closed Hyper-Lyapunov set L_P(eta)")
    a1 = theta * a + (1.0 - theta) * inverse(a, tol)
    return _member(Kind.HYPER_LYAPUNOV, p, half_step_target(eta, theta), a1, mode, tol)


def similarity_transport(p, p_hat, tol: ToleranceConfig | None = None) -> np.ndarray:
    """``T = P^{-1/2} P_hat^{1/2}``, so that ``T^{-1} L_P(eta) T = L_{P_hat}(eta)``."""
    p = as_matrix(p, square=True, name="P")
    p_hat = as_matrix(p_hat, square=True, name="P_hat")
    if p.shape != p_hat.shape:
        raise DimensionMismatchError("P and P_hat must have the same size")
    return inv_sqrt_pd(p, tol) @ sqrt_pd(p_hat, tol)


def product_contractivity_check(p, a_a, eta_a, a_b, eta_b,
                                tol: ToleranceConfig | None = None) -> bool:
    """Check ``A_a A_b`` is in the closed Hyper-Stein set at ``eta_product(eta_a, eta_b)``."""
    tol = resolve(tol)
    a_a = as_matrix(a_a, square=True, name="A_a")
    a_b = as_matrix(a_b, square=True, name="A_b")
    return _member(Kind.HYPER_STEIN, p, eta_product(eta_a, eta_b), a_a @ a_b, Mode.CLOSED, tol)


def convex_combination_check(p, eta, a0, a1, theta: float,
                             tol: ToleranceConfig | None = None) -> bool:
    """Check ``theta A_1 + (1 - theta) A_0`` stays in L_P(eta).

    Also confirms the slack identity
    ``Q_theta = theta Q_1 + (1-theta) Q_0 + theta(1-theta)/eta (A_0-A_1)^* P (A_0-A_1)``.
    """
    tol = resolve(tol)
    a0 = as_matrix(a0, square=True, name="A_0")
    a1 = as_matrix(a1, square=True, name="A_1")
    spec = build_qmi(Kind.HYPER_LYAPUNOV, p, eta, check_signature=False, tol=tol)
    a_theta = theta * a1 + (1.0 - theta) * a0
    q0, q1, q_theta = (evaluate_qmi(spec, x) for x in (a0, a1, a_theta))
    diff = a0 - a1
    predicted = (theta * q1 + (1.0 - theta) * q0
                 + theta * (1.0 - theta) * spec.eta.reciprocal * (diff.conj().T @ spec.base @ diff))
    scale = max(1.0, float(np.linalg.norm(q0)), float(np.linalg.norm(q1)))
    identity_ok = np.linalg.norm(q_theta - predicted) <= tol.identity * scale
    return bool(identity_ok) and is_member(spec, a_theta, Mode.OPEN, tol)[0]


def isometry_combination(matrices: Sequence, isometries: Sequence,
                         tol: ToleranceConfig | None = None) -> np.ndarray:
    """``sum_j v_j^* A_j v_j`` for ``v_j`` of shape (gamma_j, n) with
    ``sum_j v_j^* v_j = I_n``."""
    tol = resolve(tol)
    if len(matrices) != len(isometries) or not matrices:
        raise DimensionMismatchError("need one isometry block per matrix")
    vs = [as_matrix(v, name="isometry block") for v in isometries]
    n = vs[0].shape[1]
    total = np.zeros((n, n), dtype=np.complex128)
    combo = np.zeros((n, n), dtype=np.complex128)
    for a, v in zip(matrices, vs):
        a = as_matrix(a, square=True, name="A_j")
        if v.shape[1] != n or v.shape[0] != a.shape[0] or v.shape[0] > n:
            raise DimensionMismatchError(f"block of shape {v.shape} does not fit A_j {a.shape}")
        total += v.conj().T @ v
        combo += v.conj().T @ a @ v
    if np.linalg.norm(total - np.eye(n)) > tol.isometry * n:
        raise NotIsometryFamilyError("sum of v_j^* v_j is not the identity")
    return combo


def matrix_convex_combination_check(kind: Kind | str, eta, matrices: Sequence,
                                    isometries: Sequence, mode: Mode | str = Mode.CLOSED,
                                    tol: ToleranceConfig | None = None) -> bool:
    """Check membership of ``sum_j v_j^* A_j v_j`` at size n with base I_n.

    Each ``A_j`` must be a member at its own size with base ``I``.  The
    slack of the combination is compared with ``sum_j v_j^* Q_j v_j``: the
    difference equals ``-alpha (sum_j v_j^* A_j^* A_j v_j - B^* B)``, which
    vanishes for the Lyapunov kind and is positive semidefinite whenever
    ``alpha <= 0`` (all four kinds); that ordering is verified too.
    """
    tol = resolve(tol)
    kind = Kind.parse(kind) if isinstance(kind, str) else kind
    combo = isometry_combination(matrices, isometries, tol)
    n = combo.shape[0]
    pulled = np.zeros((n, n), dtype=np.complex128)
    for a, v in zip(matrices, isometries):
        a = as_matrix(a, square=True)
        v = as_matrix(v)
        spec_j = build_qmi(kind, np.eye(a.shape[0]), eta, check_signature=False, tol=tol)
        ok, cert = is_member(spec_j, a, mode, tol)
        if not ok:
            raise ValueError(f"A_j of size {a.shape[0]} is not a member of its set")
        pulled += v.conj().T @ cert.slack @ v
    spec = build_qmi(kind, np.eye(n), eta, check_signature=False, tol=tol)
    member, cert = is_member(spec, combo, mode, tol)
    gap = hermitian_part(cert.slack - pulled)
    scale = max(1.0, float(np.linalg.norm(pulled)))
    if kind is Kind.LYAPUNOV:
        gap_ok = np.linalg.norm(gap) <= tol.identity * scale
    else:
        gap_ok = hermitian_eig(gap, tol).eigenvalues[0] >= -tol.identity * scale
    return bool(member and gap_ok)


def inversion_closure_check(p, eta, a, tol: ToleranceConfig | None = None) -> bool:
    """Check ``A^{-1}`` is in L_P(eta) together with the slack transport
    ``Q(A^{-1}) = A^{-*} Q(A) A^{-1}``."""
    tol = resolve(tol)
    a = as_matrix(a, square=True, name="A")
    spec = build_qmi(Kind.HYPER_LYAPUNOV, p, eta, check_signature=False, tol=tol)
    a_inv = inverse(a, tol)
    q = evaluate_qmi(spec, a)
    q_inv = evaluate_qmi(spec, a_inv)
    transported = a_inv.conj().T @ q @ a_inv
    scale = max(1.0, float(np.linalg.norm(q_inv)))
    identity_ok = np.linalg.norm(q_inv - transported) <= tol.identity * scale
    return bool(identity_ok) and is_member(spec, a_inv, Mode.OPEN, tol)[0]
