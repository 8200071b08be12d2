"""Matrix Cayley transform and the Newton iteration for the matrix sign."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import ToleranceConfig, resolve
from .disks import as_eta, iterate_trace
from .errors import (
    MinusOneInSpectrumError,
    NoConvergenceError,
    SingularIterateError,
    SingularMatrixError,
)
from .linalg import as_matrix, det, inverse, is_positive_definite, spectral_norm

__all__ = [
    "SignResult",
    "cayley",
    "cayley_involution_check",
    "newton_sign_step",
    "sign",
    "predicted_iterations",
    "sign_identities_check",
]

# Above this size the n^2 x n^2 Lyapunov certificate is skipped.
MAX_CERTIFY_DIM = 30


def cayley(a, tol: ToleranceConfig | None = None) -> np.ndarray:
    """``C(A) = (I - A)(I + A)^{-1}``, evaluated as ``2 (I + A)^{-1} - I``."""
    a = as_matrix(a, square=True, name="A")
    n = a.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    try:
        inv = inverse(eye + a, tol)
    except SingularMatrixError as exc:
        raise MinusOneInSpectrumError("-1 is (numerically) an eigenvalue of A") from exc
    return 2.0 * inv - eye


def cayley_involution_check(a, tol: ToleranceConfig | None = None) -> float:
    """``||C(C(A)) - A||_F``."""
    a = as_matrix(a, square=True, name="A")
    return float(np.linalg.norm(cayley(cayley(a, tol), tol) - a))


def newton_sign_step(x, tol: ToleranceConfig | None = None) -> np.ndarray:
    x = as_matrix(x, square=True, name="X")
    return 0.5 * (x + inverse(x, tol))


@dataclass(frozen=True)
class SignResult:
    """Outcome of the sign iteration.

    ``residual_history[k]`` is the relative Frobenius step of iteration k.
    ``certificate`` is the Lyapunov solution P of ``P (E A) + (E A)^* P = I``
    when it was computed.
    """

    sign: np.ndarray
    iterations: int
    residual_history: list[float] = field(default_factory=list)
    converged: bool = False
    certificate: np.ndarray | None = None


def _det_scale(x: np.ndarray) -> float:
    d = abs(det(x))
    if d == 0 or not math.isfinite(d):
        return 1.0
    return d ** (-1.0 / x.shape[0])


def sign(a, max_iter: int = 100, *, scaling: bool = False, certify: bool = True,
         tol: ToleranceConfig | None = None) -> SignResult:
    """Matrix sign by the Newton iteration ``X <- (X + X^{-1}) / 2``.

    Iteration stops once the relative step ``||X_{k+1} - X_k||_F / ||X_{k+1}||_F``
    falls to ``tol.sign_step``.  With ``scaling`` the iterate is multiplied
    by ``|det X|^{-1/n}`` while the step is still large; the default is the
    plain iteration, whose progress the disk trace predicts exactly.

    On convergence ``E = sign(A)`` is checked for ``E^2 = I`` and
    ``EA = AE``, and (for n <= 30) ``EA`` is certified positively stable by
    solving a Lyapunov equation whose solution must be positive definite
    with ``1 / (2 ||P||_2)``, a lower bound on the real parts of the
    spectrum of ``EA``, above ``tol.imag_axis * ||A||_F``.

    Raises
    ------
    SingularIterateError
        An iterate is singular or the certificate fails: the spectrum of
        A touches (or nearly touches) the imaginary axis.
    NoConvergenceError
        ``max_iter`` steps did not meet the stopping rule.
    """
    tol = resolve(tol)
    a = as_matrix(a, square=True, name="A")
    n = a.shape[0]
    x = a
    history: list[float] = []
    converged = False
    for _ in range(max_iter):
        y = x
        if scaling and (not history or history[-1] > 1e-2):
            y = _det_scale(x) * x
        try:
            x_next = 0.5 * (y + inverse(y, tol))
        except SingularMatrixError as exc:
            raise SingularIterateError(
                f"iterate {len(history)} is singular; spectrum meets the imaginary axis") from exc
        size = np.linalg.norm(x_next)
        if size == 0:
            raise SingularIterateError(f"iterate {len(history) + 1} vanished; spectrum meets the imaginary axis")
        step = float(np.linalg.norm(x_next - x) / size)
        history.append(step)
        x = x_next
        if step <= tol.sign_step:
            converged = True
            break
    if not converged:
        raise NoConvergenceError(f"sign iteration did not converge in {max_iter} steps")

    eye = np.eye(n)
    norm_a = float(np.linalg.norm(a))
    if np.linalg.norm(x @ x - eye) > 1e-8 * n or np.linalg.norm(x @ a - a @ x) > 1e-8 * norm_a:
        raise SingularIterateError("sign iteration stalled on an ill-conditioned iterate")

    certificate = None
    if certify and n <= MAX_CERTIFY_DIM:
        from .inclusions import solve_lyapunov

        ea = x @ a
        try:
            p = solve_lyapunov(ea, eye, tol)
        except SingularMatrixError as exc:
            raise SingularIterateError("Sign(A) A is not positively stable") from exc
        ok, _ = is_positive_definite(p, "open", tol)
        if not ok or 0.5 / spectral_norm(p, tol) <= tol.imag_axis * norm_a:
            raise SingularIterateError("spectrum of A is within tolerance of the imaginary axis")
        certificate = p
    return SignResult(x, len(history), history, converged, certificate)


def predicted_iterations(eta0, target_origin_radius: float) -> int:
    """Smallest j with ``d_origin(eta0).radius ** (2**j) <= target``.

    For spectra inside ``+-d_inv(eta0)`` this is the number of Newton steps
    after which the Cayley image of every iterate eigenvalue lies within
    ``target`` of the origin.
    """
    if not target_origin_radius > 0:
        raise ValueError("target radius must be > 0")
    eta0 = as_eta(eta0)
    steps = 8
    while True:
        for rec in iterate_trace(eta0, steps):
            if rec.origin_radius <= target_origin_radius:
                return rec.j
        steps *= 2


def sign_identities_check(a, tol: ToleranceConfig | None = None) -> tuple[float, float]:
    """Residuals of ``-C(A) = C(A^{-1})`` and ``-C(A)^2 = C((A + A^{-1})/2)``."""
    a = as_matrix(a, square=True, name="A")
    a_inv = inverse(a, tol)
    c = cayley(a, tol)
    res1 = np.linalg.norm(-c - cayley(a_inv, tol))
    res2 = np.linalg.norm(-(c @ c) - cayley(0.5 * (a + a_inv), tol))
    return float(res1), float(res2)
