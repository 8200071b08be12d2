"""Seeded random constructions of matrices with known set membership.

All randomness flows from ``numpy.random.Generator(PCG64(seed))``; the same
seed reproduces the same matrices on every platform numpy supports.
"""
from __future__ import annotations

import numpy as np

from .cayley_sign import cayley
from .disks import as_eta
from .linalg import inv_sqrt_pd, sqrt_pd


def make_rng(seed: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def complex_gaussian(rng: np.random.Generator, rows: int, cols: int | None = None) -> np.ndarray:
    cols = rows if cols is None else cols
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary (QR with the phase correction of Mezzadri)."""
    return random_unitary_batch(rng, n, 1)[0]


def random_unitary_batch(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    """``count`` independent Haar unitaries as a ``(count, n, n)`` stack."""
    g = (rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r, axis1=1, axis2=2)
    return q * (d / np.abs(d))[:, None, :]


class UnitaryStream:
    """Haar unitaries drawn from ``rng`` in batches of ``chunk``."""

    def __init__(self, rng: np.random.Generator, n: int, chunk: int = 64):
        self.rng, self.n, self.chunk = rng, n, chunk
        self._buf = np.empty((0, n, n), dtype=np.complex128)
        self._pos = 0

    def __call__(self) -> np.ndarray:
        if self._pos == len(self._buf):
            self._buf = random_unitary_batch(self.rng, self.n, self.chunk)
            self._pos = 0
        self._pos += 1
        return self._buf[self._pos - 1]


def random_pd(rng: np.random.Generator, n: int) -> np.ndarray:
    """``C^* C + I`` for complex Gaussian C."""
    c = complex_gaussian(rng, n)
    p = c.conj().T @ c + np.eye(n)
    return 0.5 * (p + p.conj().T)


def random_hermitian_nonsingular(rng: np.random.Generator, n: int,
                                 min_abs: float = 0.1) -> np.ndarray:
    """Hermitian matrix with random signs and eigenvalue magnitudes in [min_abs, 3]."""
    u = random_unitary(rng, n)
    lam = rng.uniform(min_abs, 3.0, n) * rng.choice([-1.0, 1.0], n)
    h = (u * lam) @ u.conj().T
    return 0.5 * (h + h.conj().T)


def random_with_norm(rng: np.random.Generator, n: int, norm: float,
                     unitaries: UnitaryStream | None = None) -> np.ndarray:
    """``U diag(s) V`` with largest singular value exactly ``norm``.

    ``unitaries`` optionally supplies U and V from a pre-drawn stream.
    """
    draw = unitaries if unitaries is not None else (lambda: random_unitary(rng, n))
    s = rng.uniform(0.0, 1.0, n)
    s[rng.integers(n)] = 1.0
    return (draw() * (norm * s)) @ draw()


def sample_stein_member(rng: np.random.Generator, p, eta, margin: float = 0.05) -> np.ndarray:
    """Random A in S_P(eta): ``P^{-1/2} B P^{1/2}`` with ``||B||_2 <= (1-margin) r``,
    ``r = sqrt((eta-1)/(eta+1))``."""
    p = np.asarray(p, dtype=np.complex128)
    n = p.shape[0]
    radius = np.sqrt(as_eta(eta).stein_ratio)
    b = random_with_norm(rng, n, radius * rng.uniform(0.0, 1.0 - margin))
    return inv_sqrt_pd(p) @ b @ sqrt_pd(p)


def sample_lyapunov_member(rng: np.random.Generator, p, eta, margin: float = 0.05) -> np.ndarray:
    """Random A in L_P(eta), as the Cayley image of a Hyper-Stein sample."""
    return cayley(sample_stein_member(rng, p, eta, margin))


def random_isometry_family(rng: np.random.Generator, n: int,
                           sizes: list[int]) -> list[np.ndarray]:
    """Blocks ``v_j`` of shape ``(sizes[j], n)`` with ``sum v_j^* v_j = I_n``.

    The blocks are row slices of a random matrix with orthonormal columns;
    ``sum(sizes) >= n`` is required and ``sum(sizes) == n`` gives a unitary split.
    """
    total = sum(sizes)
    if total < n or any(not 1 <= g <= n for g in sizes):
        raise ValueError("need 1 <= gamma_j <= n and sum(gamma_j) >= n")
    q, _ = np.linalg.qr(complex_gaussian(rng, total, n))
    blocks, start = [], 0
    for g in sizes:
        blocks.append(q[start:start + g, :])
        start += g
    return blocks


def random_diagonalizable(rng: np.random.Generator, eigenvalues,
                          spread: float = 0.3) -> tuple[np.ndarray, np.ndarray]:
    """``(S diag(lam) S^{-1}, S)`` with ``S = I + spread * G / sqrt(n)``.

    Small ``spread`` keeps the eigenvector matrix well conditioned.
    """
    lam = np.asarray(eigenvalues, dtype=np.complex128)
    n = lam.size
    s = np.eye(n) + spread * complex_gaussian(rng, n) / np.sqrt(n)
    return (s * lam) @ np.linalg.inv(s), s
