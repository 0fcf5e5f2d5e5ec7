"""Radial factors h_km(r) of the harmonic modes.

h_km(r) = tanh^k r * F_k(d; tanh^2 r) with d = |ω|/2, where
ω = (2πm + kθ0)/λ is the longitudinal frequency of the mode.  It solves

    h'' + 2 coth(2r) h' = (k^2 / sinh^2 r + ω^2 / cosh^2 r) h.

Two evaluation routes exist.  The Taylor route sums the hypergeometric
series at every requested radius.  The Riccati route integrates
y = h'/h together with log h from a small starting radius (where the series
is cheap) with an implicit stiff solver; it is the only practical option
once ω sinh r reaches the millions.  Profiles are returned with a common
log scale so that values far beyond the double range stay usable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError
from .hypergeom import ConjugateParams, conj_log_derivatives, estimated_terms
from .tubegeom import TubeParams

SERIES_TOL = 1e-14
_AUTO_TERM_BUDGET = 800_000
_ODE_START_TERMS = 2000.0


def mode_frequency(t: TubeParams, k: int, m: int) -> float:
    """Longitudinal frequency ω_km; the mode's phase is kθ + ω_km z."""
    return (2.0 * math.pi * m + k * t.theta0) / t.lam


def mode_params(t: TubeParams, k: int, m: int) -> ConjugateParams:
    return ConjugateParams(k, 0.5 * abs(mode_frequency(t, k, m)))


@dataclass(frozen=True)
class RadialProfile:
    """h, h', h'' and h/sinh r at the radii ``r``, each divided by exp(log_scale)."""

    r: np.ndarray
    log_scale: float
    h: np.ndarray
    dh: np.ndarray
    d2h: np.ndarray
    h_over_sinh: np.ndarray
    method: str

    def rescaled(self, log_scale: float) -> "RadialProfile":
        f = math.exp(self.log_scale - log_scale) if self.log_scale > -math.inf else 0.0
        return RadialProfile(
            self.r, log_scale, self.h * f, self.dh * f, self.d2h * f, self.h_over_sinh * f, self.method
        )

    def unscaled(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        with np.errstate(over="ignore"):
            f = np.exp(self.log_scale)
            return self.h * f, self.dh * f, self.d2h * f


def _at_axis(k: int, d: float) -> tuple[float, float, float, float]:
    """(h, h', h'', h/sinh r) at r = 0."""
    h = 1.0 if k == 0 else 0.0
    dh = 1.0 if k == 1 else 0.0
    d2h = {0: 2.0 * d * d, 2: 2.0}.get(k, 0.0)
    hs = 1.0 if k == 1 else 0.0
    return h, dh, d2h, hs


def _series_point(p: ConjugateParams, r: float, cap: int) -> tuple[float, float, float, float]:
    """(log h, h'/h, h''/h, log(h/sinh r)) at r > 0 from the Taylor series."""
    k = p.k
    t = math.tanh(r)
    tp = 1.0 / math.cosh(r) ** 2
    lf, p1, p2, _ = conj_log_derivatives(p, t * t, SERIES_TOL, cap=cap)
    logh = k * math.log(t) + lf
    y = tp * (k / t + 2.0 * t * p1)
    pp = (k * (k - 1) / (t * t) if k > 1 else 0.0) + (4 * k + 2) * p1 + 4.0 * t * t * p2
    ypp = -2.0 * t * tp * (k / t + 2.0 * t * p1) + tp * tp * pp
    # h/sinh r = t^{k-1} F / cosh r
    log_hs = (k - 1) * math.log(t) + lf - math.log(math.cosh(r)) if k >= 1 else logh - math.log(math.sinh(r))
    return logh, y, ypp, log_hs


def _assemble(r, logh, y, ypp, log_hs, axis, method) -> RadialProfile:
    finite = np.isfinite(logh)
    scale = float(np.max(logh[finite])) if finite.any() else 0.0
    with np.errstate(under="ignore", invalid="ignore"):
        h = np.where(finite, np.exp(logh - scale), 0.0)
        dh = h * y
        d2h = h * ypp
        hs = np.where(finite, np.exp(log_hs - scale), 0.0)
    if axis is not None:
        at0 = r == 0.0
        if at0.any():
            f = math.exp(-scale)
            h[at0], dh[at0], d2h[at0], hs[at0] = (v * f for v in axis)
    return RadialProfile(r, scale, h, dh, d2h, hs, method)


def _riccati(p: ConjugateParams, omega: float, radii: np.ndarray, r0: float):
    """Integrate (h'/h, log h) from r0 through ``radii`` (sorted, all > r0)."""
    k2 = float(p.k * p.k)
    w2 = omega * omega

    def rhs(r, s):
        y = s[0]
        return [
            k2 / math.sinh(r) ** 2 + w2 / math.cosh(r) ** 2 - 2.0 * y / math.tanh(2.0 * r) - y * y,
            y,
        ]

    def jac(r, s):
        return [[-2.0 / math.tanh(2.0 * r) - 2.0 * s[0], 0.0], [1.0, 0.0]]

    logh0, y0, _, _ = _series_point(p, r0, cap=10 * int(_ODE_START_TERMS) + 10_000)
    sol = solve_ivp(
        rhs,
        (r0, float(radii[-1])),
        [y0, logh0],
        method="Radau",
        jac=jac,
        t_eval=radii,
        rtol=1e-12,
        atol=1e-12,
    )
    if not sol.success:
        raise RuntimeError(f"radial integration failed: {sol.message}")
    return sol.y[0], sol.y[1]


def series_log_derivatives(t: TubeParams, k: int, m: int, r) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(log h, h'/h, h''/h) at radii r > 0 straight from the series, with no rescaling."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if (r <= 0).any():
        raise DomainError("radius must be > 0")
    p = mode_params(t, k, m)
    out = np.zeros((3, r.size))
    if not p.trivial:
        for i, ri in enumerate(r):
            out[:, i] = _series_point(p, float(ri), 10_000_000)[:3]
    return out[0], out[1], out[2]


def radial_profile(
    t: TubeParams, k: int, m: int, r, method: str = "auto", cap: int = 1_000_000
) -> RadialProfile:
    """Evaluate the radial factor of mode (k, m) and its first two derivatives.

    Results are memoised (the returned arrays are read-only).
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    return _cached_profile(t.lam, t.theta0, int(k), int(m), r.tobytes(), method, int(cap))


@lru_cache(maxsize=512)
def _cached_profile(lam, theta0, k, m, rbytes, method, cap) -> RadialProfile:
    prof = _compute_profile(TubeParams(lam, theta0, 1.0), k, m, np.frombuffer(rbytes).copy(), method, cap)
    for arr in (prof.r, prof.h, prof.dh, prof.d2h, prof.h_over_sinh):
        arr.setflags(write=False)
    return prof


def _compute_profile(t: TubeParams, k: int, m: int, r: np.ndarray, method: str, cap: int) -> RadialProfile:
    if (r < 0).any():
        raise DomainError("radius must be >= 0")
    if method not in ("auto", "series", "ode"):
        raise DomainError(f"unknown method {method!r}")
    p = mode_params(t, k, m)
    omega = 2.0 * p.d
    n = r.size
    if p.trivial:
        one = np.ones(n)
        zero = np.zeros(n)
        with np.errstate(divide="ignore"):
            hs = np.where(r > 0, 1.0 / np.sinh(np.where(r > 0, r, 1.0)), 0.0)
        return RadialProfile(r, 0.0, one, zero, zero, hs, "exact")
    if method == "auto":
        rmax = float(r.max()) if n else 0.0
        need = estimated_terms(k, p.d, math.tanh(rmax) ** 2, SERIES_TOL) if rmax > 0 else 1.0
        method = "series" if need <= _AUTO_TERM_BUDGET else "ode"
    logh = np.full(n, -np.inf)
    y = np.zeros(n)
    ypp = np.zeros(n)
    log_hs = np.full(n, -np.inf)
    pos = r > 0
    if method == "series":
        for i in np.flatnonzero(pos):
            logh[i], y[i], ypp[i], log_hs[i] = _series_point(p, float(r[i]), cap)
    else:
        # start where the series needs only a couple of thousand terms
        r0 = min(0.5, math.asinh(_ODE_START_TERMS / max(p.d, 1e-300)))
        near = pos & (r <= r0)
        for i in np.flatnonzero(near):
            logh[i], y[i], ypp[i], log_hs[i] = _series_point(p, float(r[i]), cap)
        far = np.flatnonzero(r > r0)
        if far.size:
            order = far[np.argsort(r[far])]
            rs = r[order]
            uniq, inv = np.unique(rs, return_inverse=True)
            yy, ll = _riccati(p, omega, uniq, r0)
            yy, ll = yy[inv], ll[inv]
            rr = rs
            logh[order] = ll
            y[order] = yy
            # h''/h read off from the radial equation itself
            ypp[order] = p.k**2 / np.sinh(rr) ** 2 + omega**2 / np.cosh(rr) ** 2 - 2.0 * yy / np.tanh(2.0 * rr)
            log_hs[order] = ll - np.log(np.sinh(rr))
    return _assemble(r, logh, y, ypp, log_hs, _at_axis(k, p.d), method)
