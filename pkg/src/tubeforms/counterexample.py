"""Explicit tube fields showing that certain uniform norm estimates cannot hold.

Three constructions live here:

* ``linf_l2_growth``: a single k = 0 mode on a sequence of tubes with
  λ_j -> 0 under a volume-type budget λ sinh R cosh R = V/2.  The ratio
  ‖df‖²_∞ / (log cosh R · ‖df‖²_2) grows without bound.
* ``disk_flux_violation``: a search for k = 0 coefficient vectors whose disk
  flux squared beats c · area(D)² · log cosh R · ‖df‖²_2.
* ``poincare_gap``: the pairings of dz with the tube and with a disk differ
  by the factor λ.

Everything is carried in log space because h_m(R) overflows long before the
interesting regime is reached.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError
from .harmonics import (
    HarmonicField,
    Mode,
    QuadratureSpec,
    disk_flux_scaled,
    dz_l2_sq,
    dz_l2_sq_quadrature,
    l2_df_boundary_scaled,
    l2_df_volume_scaled,
    linf_df_sq_scaled,
    _gl,
)
from .radial import mode_frequency, radial_profile
from .tubegeom import TWO_PI, TubeParams, disk_area, log_cosh

CSV_FIELDS = ("lambda", "R", "linf_sq", "l2_sq", "log_cosh_R", "ratio", "constraint")


def _lse(xs) -> float:
    xs = np.asarray(xs, dtype=float)
    top = float(xs.max())
    return top + math.log(float(np.exp(xs - top).sum()))


def _exp(x: float) -> float:
    return math.exp(x) if x < 709.0 else math.inf


@dataclass(frozen=True)
class GrowthRow:
    lam: float
    R: float
    linf_sq: float
    l2_sq: float
    log_cosh_R: float
    ratio: float
    constraint: float
    log_linf_sq: float
    log_l2_sq: float
    linf_lower: float  # (2πm/λ)²
    log_l2_upper: float  # log of 4V (πm/λ)² h(R)² log cosh R / (sinh R cosh R)

    @property
    def lower_bound_holds(self) -> bool:
        return self.log_linf_sq >= math.log(self.linf_lower) - 1e-12

    @property
    def upper_bound_holds(self) -> bool:
        return self.log_l2_sq <= self.log_l2_upper

    def as_dict(self) -> dict:
        d = {"lambda": self.lam}
        d.update({k: v for k, v in asdict(self).items() if k != "lam"})
        return d


def growth_schedule(V: float, steps: int, lam0: float = 1.0) -> list[tuple[float, float]]:
    """(λ_j, R_j) with λ_j = λ0 2^-j and λ_j sinh R_j cosh R_j = V/2."""
    if V <= 0 or steps < 1 or lam0 <= 0:
        raise DomainError("need V > 0, steps >= 1, lam0 > 0")
    out = []
    for j in range(steps):
        lam = lam0 * 2.0**-j
        out.append((lam, 0.5 * math.asinh(V / lam)))
    return out


def growth_row(m: int, V: float, lam: float, R: float, grid: QuadratureSpec = QuadratureSpec()) -> GrowthRow:
    tube = TubeParams(lam, 0.0, R)
    fld = HarmonicField(tube, 0.0, (Mode(0, m, 0.0, 1.0),))
    linf = linf_df_sq_scaled(fld, grid)
    l2 = l2_df_boundary_scaled(fld)
    lc = log_cosh(R)
    log_linf, log_l2 = linf.log_abs, l2.log_abs
    ratio = _exp(log_linf - math.log(lc) - log_l2)
    p = radial_profile(tube, 0, m, [R])
    log_h = p.log_scale + math.log(p.h[0])
    log_ub = (
        math.log(4.0 * V)
        + 2.0 * math.log(math.pi * m / lam)
        + 2.0 * log_h
        + math.log(lc)
        - math.log(0.5 * math.sinh(2.0 * R))
    )
    return GrowthRow(
        lam=lam,
        R=R,
        linf_sq=_exp(log_linf),
        l2_sq=_exp(log_l2),
        log_cosh_R=lc,
        ratio=ratio,
        constraint=lam * 0.5 * math.sinh(2.0 * R),
        log_linf_sq=log_linf,
        log_l2_sq=log_l2,
        linf_lower=(TWO_PI * m / lam) ** 2,
        log_l2_upper=log_ub,
    )


def linf_l2_growth(m: int, V: float = 10.0, steps: int = 20, lam0: float = 1.0,
                   grid: QuadratureSpec = QuadratureSpec()) -> list[GrowthRow]:
    """Rows for f = h_m(r) cos(2πmz/λ) along the geometric schedule."""
    if int(m) != m or m < 1:
        raise DomainError("m must be a positive integer")
    return [growth_row(int(m), V, lam, R, grid) for lam, R in growth_schedule(V, steps, lam0)]


def tail_growth_confirmed(rows: list[GrowthRow], tail: int = 10) -> bool:
    """Tail ratios strictly increasing; vacuously true for fewer than two rows."""
    r = [row.ratio for row in rows[-tail:]]
    return all(b > a for a, b in zip(r, r[1:]))


# ---------------------------------------------------------------------------
# disk flux


@dataclass(frozen=True)
class FluxViolation:
    found: bool
    coefficients: tuple[float, ...]  # sine amplitudes of modes m = 1..n (k = 0)
    lhs: float
    rhs: float
    ratio: float
    strategy: str
    best_ratio: float
    optimal_ratio: float  # sup of lhs/rhs over all vectors on the searched modes
    verified_ratio: float | None = None
    log_lhs: float = -math.inf
    log_rhs: float = -math.inf
    history: tuple[tuple[str, int, float], ...] = field(default=())


def _disk_terms(c: float, tube: TubeParams, n: int):
    """log F_m, log N_m for m = 1..n and log(c A² log cosh R)."""
    R = tube.R
    logF, logN = [], []
    sc = 0.5 * math.sinh(2.0 * R)
    for m in range(1, n + 1):
        p = radial_profile(tube, 0, m, [R])
        lh = p.log_scale + math.log(p.h[0])
        ldh = p.log_scale + math.log(p.dh[0])
        omega = mode_frequency(tube, 0, m)
        # flux of a sin(ωz) at z0 = 0 is a π h'(R) sinh 2R / ω
        logF.append(math.log(math.pi) + ldh + math.log(math.sinh(2.0 * R)) - math.log(omega))
        logN.append(math.log(math.pi * tube.lam * sc) + lh + ldh)
    lc = log_cosh(R)
    log_k = math.log(c) + 2.0 * math.log(disk_area(R)) + math.log(lc)
    return np.array(logF), np.array(logN), log_k


def disk_flux_ratio(c: float, tube: TubeParams, coefficients) -> tuple[float, float]:
    """(log lhs, log rhs) from closed forms for non-negative sine amplitudes on m = 1..n."""
    a = np.asarray(coefficients, dtype=float)
    if (a < 0).any():
        raise DomainError("coefficients must be non-negative")
    logF, logN, log_k = _disk_terms(c, tube, a.size)
    pos = a > 0
    if not pos.any():
        return -math.inf, log_k + -math.inf
    la = np.log(a[pos])
    return 2.0 * _lse(la + logF[pos]), log_k + _lse(2.0 * la + logN[pos])


def disk_flux_violation(c: float, tube: TubeParams, max_modes: int = 10, slack: float = 0.05,
                        q: QuadratureSpec = QuadratureSpec()) -> FluxViolation:
    """Search k = 0 fields for (∫_D ⋆df)² > c · area(D)² · log cosh R · ‖df‖²_2.

    Strategy: equal unit coefficients on m = 1..n for n = 1..max_modes, then
    single modes m = 1..max_modes.  A witness needs lhs/rhs >= 1 + slack and
    is re-checked by quadrature of both sides.  The optimal ratio reported is
    Σ_m F_m² / N_m / (c A² log cosh R), the Cauchy-Schwarz maximum over all
    coefficient vectors supported on the searched modes.
    """
    if c <= 0 or max_modes < 1:
        raise DomainError("need c > 0 and max_modes >= 1")
    logF, logN, log_k = _disk_terms(c, tube, max_modes)
    history = []
    best = (-math.inf, None, None, None, None)
    candidates = []
    for n in range(1, max_modes + 1):
        ll = 2.0 * _lse(logF[:n])
        lr = log_k + _lse(logN[:n])
        candidates.append(("equal", n, tuple([1.0] * n), ll, lr))
    for m in range(1, max_modes + 1):
        coef = tuple(1.0 if j == m - 1 else 0.0 for j in range(m))
        candidates.append(("single", m, coef, 2.0 * logF[m - 1], log_k + logN[m - 1]))
    for strat, n, coef, ll, lr in candidates:
        lratio = ll - lr
        history.append((strat, n, _exp(lratio)))
        if lratio > best[0]:
            best = (lratio, strat, coef, ll, lr)
    log_opt = _lse(2.0 * logF - logN) - log_k
    witness = next((cd for cd in candidates if cd[3] - cd[4] >= math.log1p(slack)), None)
    if witness is None:
        lratio, strat, coef, ll, lr = best
        return FluxViolation(False, coef, _exp(ll), _exp(lr), _exp(lratio), strat, _exp(lratio),
                             _exp(log_opt), None, ll, lr, tuple(history))
    strat, n, coef, ll, lr = witness
    fld = HarmonicField(tube, 0.0, tuple(Mode(0, m + 1, a, 0.0) for m, a in enumerate(coef) if a))
    flux = disk_flux_scaled(fld, 0.0, "quadrature", q)
    l2 = l2_df_volume_scaled(fld, q)
    log_ver = 2.0 * flux.log_abs - log_k - l2.log_abs
    return FluxViolation(True, coef, _exp(ll), _exp(lr), _exp(ll - lr), strat, _exp(best[0]),
                         _exp(log_opt), _exp(log_ver), ll, lr, tuple(history))


# ---------------------------------------------------------------------------
# Poincaré pairing gap


@dataclass(frozen=True)
class PoincareGap:
    tube_pairing: float
    disk_pairing: float
    tube_pairing_quad: float
    disk_pairing_quad: float

    @property
    def ratio(self) -> float:
        return self.tube_pairing / self.disk_pairing


def poincare_gap(tube: TubeParams, n_r: int = 64) -> PoincareGap:
    """(∫_T ⋆dz∧dz, ∫_D ⋆dz) = (2πλ log cosh R, 2π log cosh R), plus quadrature."""
    lc = log_cosh(tube.R)
    r, w = _gl(n_r, 0.0, tube.R)
    disk_q = TWO_PI * float(w @ np.tanh(r))
    return PoincareGap(
        TWO_PI * tube.lam * lc,
        TWO_PI * lc,
        dz_l2_sq_quadrature(tube, tube.lam, n_r),
        disk_q,
    )


__all__ = [
    "CSV_FIELDS",
    "FluxViolation",
    "GrowthRow",
    "PoincareGap",
    "disk_flux_ratio",
    "disk_flux_violation",
    "dz_l2_sq",
    "growth_row",
    "growth_schedule",
    "linf_l2_growth",
    "poincare_gap",
    "tail_growth_confirmed",
]
