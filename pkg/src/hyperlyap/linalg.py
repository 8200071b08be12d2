"""Dense complex linear algebra with explicit numerical contracts.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  The only
spectral routine is a Hermitian Jacobi eigensolver; every non-Hermitian
spectral question elsewhere in the package is reduced to a Hermitian one.
"""
from __future__ import annotations

import enum
import math
import warnings
from functools import lru_cache
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .config import ToleranceConfig, resolve
from .errors import (
    DimensionMismatchError,
    InvalidMatrixError,
    NoConvergenceError,
    NotHermitianError,
    NotPositiveDefiniteError,
    SingularMatrixError,
)

__all__ = [
    "Mode",
    "HermitianEig",
    "as_matrix",
    "hermitian_part",
    "check_hermitian",
    "hermitian_eig",
    "hermitian_eigvals_batch",
    "is_positive_definite",
    "sqrt_pd",
    "inv_sqrt_pd",
    "solve",
    "inverse",
    "det",
    "spectral_norm",
    "rho_pd_pencil",
]


class Mode(str, enum.Enum):
    """Open sets use the strict cone P_n, closed sets its closure."""

    OPEN = "open"
    CLOSED = "closed"


class HermitianEig(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a, *, square: bool = False, name: str = "matrix") -> np.ndarray:
    """Validate and convert ``a`` to a 2-D complex128 array.

    Scalars and 1-D input are not promoted; an n x m matrix must be given.
    """
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2:
        raise InvalidMatrixError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InvalidMatrixError(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrixError(f"{name} has non-finite entries")
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {arr.shape}")
    return arr


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def check_hermitian(a, tol: ToleranceConfig | None = None, name: str = "matrix") -> np.ndarray:
    """Return the Hermitian part of ``a`` after checking ``a`` is Hermitian.

    The check is ``||A - A*||_F <= tol.sym * ||A||_F``.
    """
    tol = resolve(tol)
    a = as_matrix(a, square=True, name=name)
    scale = np.linalg.norm(a)
    if np.linalg.norm(a - a.conj().T) > tol.sym * scale:
        raise NotHermitianError(f"{name} is not Hermitian")
    return hermitian_part(a)


@lru_cache(maxsize=None)
def _round_robin(n: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    # Circle-method tournament: n-1 rounds (n even) of n/2 disjoint pairs,
    # every pair (p, q) appearing exactly once per sweep.
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                pairs.append((min(p, q), max(p, q)))
        rounds.append(tuple(pairs))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def hermitian_eig(a, tol: ToleranceConfig | None = None) -> HermitianEig:
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Rotations are applied in round-robin order so that each round of
    disjoint pairs is a single unitary congruence.  Iteration stops once the
    off-diagonal Frobenius mass drops below ``tol.jacobi_offdiag * ||A||_F``.

    Returns
    -------
    HermitianEig
        Ascending real eigenvalues and a unitary matrix whose columns are
        the corresponding eigenvectors.
    """
    tol = resolve(tol)
    a = check_hermitian(a, tol)
    n = a.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    v = eye
    scale = float(np.linalg.norm(a))
    threshold = tol.jacobi_offdiag * scale
    if n > 1 and scale > 0:
        rounds = _round_robin(n)
        sweeps = 0
        while _off_norm(a) > threshold:
            if sweeps >= tol.jacobi_max_sweeps:
                raise NoConvergenceError(f"Jacobi did not converge in {sweeps} sweeps")
            for pairs in rounds:
                j = None
                for p, q in pairs:
                    apq = complex(a[p, q])
                    mag = abs(apq)
                    if mag <= 1e-300:
                        continue
                    # J = diag(1, conj(phase)) @ [[c, s], [-s, c]] zeroes a[p, q]
                    tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                    c = 1.0 / math.sqrt(1.0 + t * t)
                    s = t * c
                    phase = (apq / mag).conjugate()
                    if j is None:
                        j = eye.copy()
                    j[p, p] = c
                    j[p, q] = s
                    j[q, p] = -s * phase
                    j[q, q] = c * phase
                if j is not None:
                    a = j.conj().T @ a @ j
                    v = v @ j
            a = hermitian_part(a)
            sweeps += 1
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return HermitianEig(w[order], v[:, order])


def hermitian_eigvals_batch(stack, tol: ToleranceConfig | None = None) -> np.ndarray:
    """Ascending eigenvalues of each matrix in a (B, n, n) Hermitian stack.

    The same round-robin Jacobi scheme as `hermitian_eig`, vectorized over
    the leading axis; sweeps continue until every matrix meets its own
    off-diagonal threshold.
    """
    tol = resolve(tol)
    a = np.asarray(stack, dtype=np.complex128)
    if a.ndim != 3 or a.shape[1] != a.shape[2] or a.shape[1] == 0:
        raise InvalidMatrixError(f"expected a (B, n, n) stack, got shape {a.shape}")
    if a.shape[0] == 0:
        return np.zeros((0, a.shape[1]))
    if not np.all(np.isfinite(a)):
        raise InvalidMatrixError("stack has non-finite entries")
    ah = np.conj(np.swapaxes(a, 1, 2))
    scale = np.linalg.norm(a, axis=(1, 2))
    if np.any(np.linalg.norm(a - ah, axis=(1, 2)) > tol.sym * scale):
        raise NotHermitianError("stack contains a non-Hermitian matrix")
    a = 0.5 * (a + ah)
    bsz, n = a.shape[0], a.shape[1]
    threshold = tol.jacobi_offdiag * scale
    diag_idx = np.arange(n)

    def off(x):
        d = np.zeros_like(x)
        d[:, diag_idx, diag_idx] = x[:, diag_idx, diag_idx]
        return np.linalg.norm(x - d, axis=(1, 2))

    rounds = [(np.array([p for p, _ in r], dtype=int), np.array([q for _, q in r], dtype=int))
              for r in _round_robin(n) if r]
    eye = np.broadcast_to(np.eye(n, dtype=np.complex128), (bsz, n, n))
    sweeps = 0
    while n > 1 and np.any(off(a) > threshold):
        if sweeps >= tol.jacobi_max_sweeps:
            raise NoConvergenceError(f"Jacobi did not converge in {sweeps} sweeps")
        for ps, qs in rounds:
            apq = a[:, ps, qs]
            mag = np.abs(apq)
            live = mag > 1e-300
            safe = np.where(live, mag, 1.0)
            tau = (a[:, qs, qs].real - a[:, ps, ps].real) / (2.0 * safe)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            t = np.where(live, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            sn = t * c
            phase = np.where(live, np.conj(apq) / safe, 1.0)
            j = eye.copy()
            j[:, ps, ps] = c
            j[:, ps, qs] = sn
            j[:, qs, ps] = -sn * phase
            j[:, qs, qs] = c * phase
            a = np.conj(np.swapaxes(j, 1, 2)) @ a @ j
        a = 0.5 * (a + np.conj(np.swapaxes(a, 1, 2)))
        sweeps += 1
    return np.sort(a[:, diag_idx, diag_idx].real, axis=1)


def _pd_rule(w: np.ndarray, mode: Mode, tol: ToleranceConfig) -> bool:
    band = tol.pd * max(1.0, float(np.max(np.abs(w))))
    if mode is Mode.OPEN:
        return bool(w[0] > band)
    return bool(w[0] >= -band)


def is_positive_definite(q, mode: Mode | str = Mode.OPEN,
                         tol: ToleranceConfig | None = None) -> tuple[bool, float]:
    """Test membership of a Hermitian matrix in P_n (open) or its closure.

    Returns ``(member, lambda_min)``.  The tolerance band is
    ``tol.pd * max(1, ||Q||_2)`` on either side of zero.
    """
    tol = resolve(tol)
    w = hermitian_eig(q, tol).eigenvalues
    return _pd_rule(w, Mode(mode), tol), float(w[0])


def _pd_eig(p, tol: ToleranceConfig | None, name: str) -> HermitianEig:
    tol = resolve(tol)
    eig = hermitian_eig(p, tol)
    if not _pd_rule(eig.eigenvalues, Mode.OPEN, tol):
        raise NotPositiveDefiniteError(
            f"{name} is not positive definite (lambda_min={eig.eigenvalues[0]:.3e})")
    return eig


def sqrt_pd(p, tol: ToleranceConfig | None = None) -> np.ndarray:
    """Hermitian positive definite square root of ``p``."""
    w, v = _pd_eig(p, tol, "P")
    return hermitian_part((v * np.sqrt(w)) @ v.conj().T)


def inv_sqrt_pd(p, tol: ToleranceConfig | None = None) -> np.ndarray:
    w, v = _pd_eig(p, tol, "P")
    return hermitian_part((v / np.sqrt(w)) @ v.conj().T)


def _lu(a: np.ndarray, tol: ToleranceConfig):
    # singularity is judged by the pivot rule below, not by scipy's warning
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    limit = tol.pivot * np.linalg.norm(a)
    if limit == 0 or np.min(pivots) < limit:
        raise SingularMatrixError(
            f"matrix is singular to working precision (min pivot {np.min(pivots):.3e})")
    return lu, piv


def solve(a, b, tol: ToleranceConfig | None = None) -> np.ndarray:
    """Solve ``A X = B`` by LU with partial pivoting.

    Raises `SingularMatrixError` when a pivot magnitude is below
    ``tol.pivot * ||A||_F``.
    """
    tol = resolve(tol)
    a = as_matrix(a, square=True, name="A")
    b = np.asarray(b, dtype=np.complex128)
    vector = b.ndim == 1
    b2 = b.reshape(-1, 1) if vector else as_matrix(b, name="B")
    if b2.shape[0] != a.shape[0]:
        raise DimensionMismatchError(f"B has {b2.shape[0]} rows, A is {a.shape[0]}x{a.shape[0]}")
    x = scipy.linalg.lu_solve(_lu(a, tol), b2, check_finite=False)
    return x.ravel() if vector else x


def inverse(a, tol: ToleranceConfig | None = None) -> np.ndarray:
    a = as_matrix(a, square=True, name="A")
    return solve(a, np.eye(a.shape[0], dtype=np.complex128), tol)


def det(a) -> complex:
    """Determinant from the LU factors; zero for exactly singular input."""
    a = as_matrix(a, square=True, name="A")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    swaps = np.count_nonzero(piv != np.arange(a.shape[0]))
    return complex((-1) ** swaps * np.prod(np.diag(lu)))


def spectral_norm(a, tol: ToleranceConfig | None = None) -> float:
    """Largest singular value, as ``sqrt(lambda_max(A* A))``."""
    a = as_matrix(a, name="A")
    gram = a.conj().T @ a
    lam = hermitian_eig(hermitian_part(gram), tol).eigenvalues[-1]
    return float(np.sqrt(max(lam, 0.0)))


def rho_pd_pencil(x, y, tol: ToleranceConfig | None = None) -> float:
    """Spectral radius of ``X Y^{-1}`` for Hermitian positive definite X, Y.

    Computed as ``lambda_max(Y^{-1/2} X Y^{-1/2})``, which is similar to
    ``X Y^{-1}`` and Hermitian positive definite.
    """
    _pd_eig(x, tol, "X")
    y_isqrt = inv_sqrt_pd(y, tol)
    core = hermitian_part(y_isqrt @ as_matrix(x) @ y_isqrt)
    return float(hermitian_eig(core, tol).eigenvalues[-1])
