"""Closed-form geometry of a Margulis tube.

The tube carries the metric dr^2 + sinh^2 r dθ^2 + cosh^2 r dz^2 on
[0, R] x [0, 2π) x [0, λ), with the ends glued by (r, θ, λ) ~ (r, θ + θ0, 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

MARGULIS_EPS = 0.29
# Constant in the relation between the Margulis constant, the core length
# and the tube radius: cosh R >= eps / sqrt(TUBE_RADIUS_CONST * lambda).
TUBE_RADIUS_CONST = 7.256
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TubeParams:
    lam: float
    theta0: float
    R: float

    def __post_init__(self) -> None:
        for name in ("lam", "theta0", "R"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.lam <= 0.0:
            raise DomainError(f"core length must be positive, got {self.lam}")
        if self.R <= 0.0:
            raise DomainError(f"tube radius must be positive, got {self.R}")


@dataclass(frozen=True)
class TubePoint:
    r: float
    theta: float
    z: float


def metric_weights(r: float) -> tuple[float, float, float]:
    if r < 0:
        raise DomainError("r must be >= 0")
    s, c = math.sinh(r), math.cosh(r)
    return 1.0, s * s, c * c


def log_cosh(r: float) -> float:
    """log cosh r, stable for large r."""
    r = abs(r)
    return r + math.log1p(math.exp(-2.0 * r)) - math.log(2.0)


def tube_volume(t: TubeParams) -> float:
    return math.pi * t.lam * math.sinh(t.R) ** 2


def disk_area(r: float) -> float:
    if r < 0:
        raise DomainError("r must be >= 0")
    # 2π(cosh r - 1) = 4π sinh^2(r/2), which keeps accuracy for small r
    return 4.0 * math.pi * math.sinh(0.5 * r) ** 2


def boundary_torus_area(t: TubeParams) -> float:
    return math.pi * t.lam * math.sinh(2.0 * t.R)


def min_tube_radius(lam: float, eps: float = MARGULIS_EPS) -> float | None:
    """Lower bound on the tube radius, or None when the bound is vacuous."""
    if lam <= 0:
        raise DomainError("core length must be positive")
    x = eps / math.sqrt(TUBE_RADIUS_CONST * lam)
    if x < 1.0:
        return None
    return math.acosh(x)


def canonicalize(t: TubeParams, r: float, theta: float, z: float) -> TubePoint:
    """Move (θ, z) into [0, 2π) x [0, λ) using the twist gluing."""
    if not (0.0 <= r <= t.R):
        raise DomainError(f"r={r} outside [0, {t.R}]")
    periods = math.floor(z / t.lam)
    z_c = z - periods * t.lam
    if z_c >= t.lam:  # rounding can land exactly on λ
        z_c -= t.lam
        periods += 1
    if z_c < 0.0:
        z_c = 0.0
    th = math.fmod(theta + periods * t.theta0, TWO_PI)
    if th < 0.0:
        th += TWO_PI
    if th >= TWO_PI:
        th = 0.0
    return TubePoint(r, th, z_c)
