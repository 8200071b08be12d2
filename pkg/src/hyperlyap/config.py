from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds used across the package.

    Every threshold is relative to the scale of its input; see the
    individual functions for the exact scaling.
    """

    sym: float = 1e-12
    eig: float = 1e-12
    pd: float = 1e-10
    pivot: float = 1e-13
    jacobi_offdiag: float = 1e-13
    jacobi_max_sweeps: int = 40
    sign_step: float = 1e-13
    imag_axis: float = 1e-10
    isometry: float = 1e-12
    identity: float = 1e-11

    def with_overrides(self, **kwargs) -> ToleranceConfig:
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


DEFAULT_TOL = ToleranceConfig()


def resolve(tol: ToleranceConfig | None) -> ToleranceConfig:
    return DEFAULT_TOL if tol is None else tol
