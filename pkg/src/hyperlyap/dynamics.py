"""Difference inclusions ``x(k+1) = A(k, x(k)) x(k)`` driven by Hyper-Stein matrices.

If every A(k, .) lies in the closed set S_I(eta) then
``||x(k)|| <= ||x(0)|| * ((eta-1)/(eta+1))**(k/2)`` whatever the sequence.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import ToleranceConfig, resolve
from .disks import as_eta
from .errors import SamplerViolationError
from .inclusions import Kind, build_qmi, is_member_batch
from .linalg import Mode
from .sampling import UnitaryStream, random_with_norm

Sampler = Callable[[int, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Trajectory:
    states: list[np.ndarray]
    norms: list[float]
    matrices_used: list[np.ndarray]

    def bounds(self, eta) -> list[float]:
        r = math.sqrt(as_eta(eta).stein_ratio)
        return [self.norms[0] * r ** k for k in range(len(self.norms))]

    def to_csv(self, eta) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "norm", "bound"])
        for k, (nrm, bnd) in enumerate(zip(self.norms, self.bounds(eta))):
            w.writerow([k, repr(nrm), repr(bnd)])
        return buf.getvalue()


def simulate(sampler: Sampler, x0, steps: int, eta, *, validate: bool = True,
             tol: ToleranceConfig | None = None) -> Trajectory:
    """Iterate ``x(k+1) = sampler(k, x(k)) @ x(k)`` for ``steps`` steps.

    With ``validate`` every drawn matrix is checked against the closed set
    S_I(eta); the check runs once, batched, after the last step, and
    `SamplerViolationError` names the first offending k.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    tol = resolve(tol)
    x = np.asarray(x0, dtype=np.complex128).ravel()
    n = x.size
    states, norms, used = [x], [float(np.linalg.norm(x))], []
    for k in range(steps):
        a = np.asarray(sampler(k, x), dtype=np.complex128)
        if a.shape != (n, n):
            raise SamplerViolationError(f"A({k}) has shape {a.shape}, expected {(n, n)}")
        x = a @ x
        states.append(x)
        norms.append(float(np.linalg.norm(x)))
        used.append(a)
    if validate and used:
        spec = build_qmi(Kind.HYPER_STEIN, np.eye(n), eta, check_signature=False, tol=tol)
        members, _ = is_member_batch(spec, np.stack(used), Mode.CLOSED, tol)
        if not np.all(members):
            k = int(np.argmin(members))
            raise SamplerViolationError(f"A({k}) is outside the closed set S_I(eta)")
    return Trajectory(states, norms, used)


def decay_bound_check(t: Trajectory, eta) -> bool:
    """True iff ``||x(k)|| <= ||x(0)|| r**k + 1e-12 ||x(0)||`` for all k."""
    slack = 1e-12 * t.norms[0]
    return all(nrm <= bnd + slack for nrm, bnd in zip(t.norms, t.bounds(eta)))


def max_bound_ratio(t: Trajectory, eta) -> float:
    """``max_k ||x(k)|| / (||x(0)|| r**k)``; 0 for a zero initial state."""
    ratios = [nrm / bnd for nrm, bnd in zip(t.norms, t.bounds(eta)) if bnd > 0]
    return max(ratios, default=0.0)


def scaled_unitary_sampler(rng: np.random.Generator, n: int, eta, factor: float = 1.0) -> Sampler:
    """``factor * r * U_k`` with fresh Haar unitaries; ``factor > 1`` leaves the set."""
    r = math.sqrt(as_eta(eta).stein_ratio)
    draw = UnitaryStream(rng, n)
    return lambda k, x: factor * r * draw()


def contraction_sampler(rng: np.random.Generator, n: int, eta) -> Sampler:
    """Random matrices with spectral norm uniform in [0, r]."""
    r = math.sqrt(as_eta(eta).stein_ratio)
    draw = UnitaryStream(rng, n)
    return lambda k, x: random_with_norm(rng, n, r * rng.uniform(), draw)


def mixture_sampler(rng: np.random.Generator, n: int, eta) -> Sampler:
    """Time-varying switch between the scaled-unitary and contraction samplers."""
    unitary = scaled_unitary_sampler(rng, n, eta)
    contraction = contraction_sampler(rng, n, eta)
    return lambda k, x: unitary(k, x) if rng.uniform() < 0.5 else contraction(k, x)
