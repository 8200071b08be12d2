"""Scalar disk algebra: sub-unit disks, invertible disks and their iteration.

Two families of closed disks are parameterized by ``eta`` in (1, inf]:

* ``d_origin(eta)`` is centered at 0 with radius ``sqrt((eta-1)/(eta+1))``;
* ``d_inv(eta)`` is centered at ``eta`` with radius ``sqrt(eta**2 - 1)``.

The Cayley transform maps one family onto the other, ``d_inv(eta)`` is
closed under inversion, and the Newton sign step ``(c + 1/c)/2`` maps
``d_inv(eta)`` onto ``d_inv((eta + 1/eta)/2)``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .errors import (
    InfiniteEtaError,
    InvalidEtaError,
    NotInRightHalfPlaneError,
    OrderViolationError,
    RadiusNotSubUnitError,
)

_JUST_ABOVE_ONE = math.nextafter(1.0, 2.0)


@dataclass(frozen=True)
class Eta:
    """The parameter eta in (1, inf].

    Infinity is a first-class value (``Eta.infinity()``) which recovers the
    classical Lyapunov and Stein inclusions; it is stored as IEEE ``inf``
    and every formula below treats it by its exact limit.
    """

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v) or v <= 1.0:
            raise InvalidEtaError(f"eta must be > 1, got {self.value!r}")
        object.__setattr__(self, "value", v)

    @classmethod
    def infinity(cls) -> Eta:
        return cls(math.inf)

    @classmethod
    def parse(cls, text: str) -> Eta:
        text = text.strip().lower()
        if text in ("inf", "infinity", "+inf"):
            return cls.infinity()
        try:
            return cls(float(text))
        except ValueError as exc:
            raise InvalidEtaError(f"cannot parse eta from {text!r}") from exc

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    @property
    def reciprocal(self) -> float:
        return 0.0 if self.is_infinite else 1.0 / self.value

    @property
    def stein_ratio(self) -> float:
        """(eta - 1)/(eta + 1), equal to 1 at infinity."""
        if self.is_infinite:
            return 1.0
        return (self.value - 1.0) / (self.value + 1.0)

    def finite(self) -> float:
        if self.is_infinite:
            raise InfiniteEtaError("operation requires a finite eta")
        return self.value

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        return "inf" if self.is_infinite else repr(self.value)


def as_eta(eta) -> Eta:
    if isinstance(eta, Eta):
        return eta
    if isinstance(eta, str):
        return Eta.parse(eta)
    return Eta(eta)


def _eta_above_one(value: float) -> Eta:
    # Rounding toward 1 would leave the open interval; rounding up only
    # enlarges the set, so it stays a valid outer bound.
    return Eta(max(value, _JUST_ABOVE_ONE))


@dataclass(frozen=True)
class Disk:
    """Closed disk ``{x : |x - center| <= radius}`` in the complex plane."""

    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius >= 0:
            raise ValueError(f"radius must be >= 0, got {self.radius}")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))

    def contains(self, z: complex, atol: float = 0.0) -> bool:
        return abs(z - self.center) <= self.radius + atol

    def boundary(self, count: int = 200) -> list[complex]:
        """``count`` equally spaced boundary points, starting at angle 0."""
        return [self.center + self.radius * complex(math.cos(t), math.sin(t))
                for t in (2 * math.pi * k / count for k in range(count))]


def d_origin(eta) -> Disk:
    eta = as_eta(eta)
    return Disk(0j, math.sqrt(eta.stein_ratio))


def d_inv(eta) -> Disk:
    eta = as_eta(eta)
    e = eta.finite()
    d = e - 1.0
    return Disk(complex(e, 0.0), math.sqrt(d * (d + 2.0)))


def eta_of_point(c: complex) -> float:
    """Smallest eta with ``c`` in ``d_inv(eta)``: ``(|c|^2 + 1) / (2 Re c)``."""
    c = complex(c)
    if not c.real > 0:
        raise NotInRightHalfPlaneError(f"Re(c) must be > 0, got {c}")
    return (abs(c) ** 2 + 1.0) / (2.0 * c.real)


def eta_product(eta_a, eta_b) -> Eta:
    """eta of the product disk ``d_origin(eta_a) * d_origin(eta_b)``.

    Equal to ``(1 + eta_a eta_b) / (eta_a + eta_b)``; an infinite argument
    yields the other argument, the limit of the formula.
    """
    a, b = as_eta(eta_a), as_eta(eta_b)
    if a.is_infinite:
        return b
    if b.is_infinite:
        return a
    # 1 + (a-1)(b-1)/(a+b) keeps relative accuracy near eta = 1
    da, db = a.value - 1.0, b.value - 1.0
    return _eta_above_one(1.0 + da * db / (a.value + b.value))


def half_iteration(eta) -> Eta:
    """``(eta + 1/eta) / 2``, the eta reached after one Newton sign step."""
    e = as_eta(eta).finite()
    d = e - 1.0
    return _eta_above_one(1.0 + d * d / (2.0 * e))


def eta_bounds_check(eta_a, eta_b) -> tuple[float, float, float]:
    """Return ``(h(eta_a), eta_product(eta_a, eta_b), h(eta_b))``.

    For ``eta_b >= eta_a`` the triple is non-decreasing.
    """
    a, b = as_eta(eta_a), as_eta(eta_b)
    a.finite(), b.finite()
    if b.value < a.value:
        raise OrderViolationError(f"need eta_b >= eta_a, got {b.value} < {a.value}")
    lower = half_iteration(a).value
    value = eta_product(a, b).value
    upper = half_iteration(b).value
    # the sandwich is exact in real arithmetic; clip rounding drift
    return lower, min(max(value, lower), upper), upper


def convex_decomposition(eta_a, eta_b) -> tuple[float, bool]:
    """Weight ``theta = eta_b / (eta_a + eta_b)`` writing eta_product as
    ``theta * eta_a + (1 - theta) / eta_a``, plus a check of that identity."""
    a, b = as_eta(eta_a).finite(), as_eta(eta_b).finite()
    theta = b / (a + b)
    value = eta_product(a, b).value
    combo = theta * a + (1.0 - theta) / a
    return theta, abs(combo - value) <= 1e-14 * max(1.0, value)


def cayley_disk(d: Disk) -> Disk:
    """Cayley image of a disk centered at the origin with radius < 1.

    The image is ``d_inv(eta)`` with ``eta = (1 + r^2) / (1 - r^2)``; the
    radius is evaluated as ``2r / (1 - r^2)`` to avoid cancellation.
    """
    r = d.radius
    if d.center != 0:
        raise RadiusNotSubUnitError("disk must be centered at the origin")
    if not 0.0 <= r < 1.0:
        raise RadiusNotSubUnitError(f"radius must lie in [0, 1), got {r}")
    r2 = r * r
    return Disk(complex((1.0 + r2) / (1.0 - r2), 0.0), 2.0 * r / (1.0 - r2))


@dataclass(frozen=True)
class TraceRecord:
    j: int
    eta: float
    inv_center: float
    inv_radius: float
    origin_radius: float
    sign: int


CSV_HEADER = ("j", "eta", "inv_center", "inv_radius", "origin_radius", "sign")


@dataclass(frozen=True)
class DiskTrace:
    records: tuple[TraceRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, j: int) -> TraceRecord:
        return self.records[j]

    def __iter__(self):
        return iter(self.records)

    @property
    def etas(self) -> list[float]:
        return [r.eta for r in self.records]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.records:
            w.writerow([r.j, repr(r.eta), repr(r.inv_center), repr(r.inv_radius),
                        repr(r.origin_radius), r.sign])
        return buf.getvalue()


def iterate_trace(eta0, steps: int) -> DiskTrace:
    """Track ``d_inv(eta_j)`` under repeated half iterations.

    The recursion ``eta_{j+1} = (eta_j + 1/eta_j)/2`` is carried out on
    ``delta_j = eta_j - 1`` as ``delta_{j+1} = delta_j^2 / (2 (1 + delta_j))``
    so the radii keep full relative precision long after ``eta_j`` itself
    rounds to 1.  The origin radius then obeys ``r_{j+1} = r_j^2``.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    delta = as_eta(eta0).finite() - 1.0
    records = []
    for j in range(steps + 1):
        eta = 1.0 + delta
        records.append(TraceRecord(
            j=j,
            eta=eta,
            inv_center=eta,
            inv_radius=math.sqrt(delta * (delta + 2.0)),
            origin_radius=math.sqrt(delta / (delta + 2.0)),
            sign=(-1) ** j,
        ))
        delta = delta * delta / (2.0 * (1.0 + delta))
    return DiskTrace(tuple(records))
