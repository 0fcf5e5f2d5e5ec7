"""Harmonic functions on a Margulis tube as finite mode sums.

A field is f = c0 + Σ h_km(r) [a sin φ + a' cos φ] with phase
φ = kθ + ω_km z and ω_km = (2πm + kθ0)/λ.  This module evaluates f and df,
checks the defining equations by residuals, and computes the fluxes and
norms of df both from closed forms and by tensor-product quadrature.

Quadrature uses Gauss-Legendre nodes in r and uniform trapezoid samples in
θ and z.  Large fields are handled with a common log scale: the internal
integrators return (mantissa, log_scale) pairs and the public wrappers
multiply back, which may give ``inf`` for fields beyond the double range.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError, ResolutionError
from .radial import RadialProfile, mode_frequency, mode_params, radial_profile, series_log_derivatives
from .tubegeom import TWO_PI, TubeParams, TubePoint, log_cosh


@dataclass(frozen=True)
class Mode:
    k: int
    m: int
    a: float = 0.0
    a_prime: float = 0.0

    def __post_init__(self) -> None:
        for name in ("k", "m"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 0:
                raise DomainError(f"{name} must be a non-negative integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.k == 0 and self.m == 0:
            raise DomainError("the (0, 0) mode is the constant term c0, not a Mode")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "a_prime", float(self.a_prime))

    @property
    def amplitude_sq(self) -> float:
        return self.a * self.a + self.a_prime * self.a_prime


@dataclass(frozen=True)
class HarmonicField:
    tube: TubeParams
    c0: float = 0.0
    modes: tuple[Mode, ...] = dc_field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "c0", float(self.c0))

    def to_dict(self) -> dict:
        return {
            "lambda": self.tube.lam,
            "theta0": self.tube.theta0,
            "R": self.tube.R,
            "c0": self.c0,
            "modes": [{"k": md.k, "m": md.m, "a": md.a, "a_prime": md.a_prime} for md in self.modes],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "HarmonicField":
        try:
            tube = TubeParams(doc["lambda"], doc["theta0"], doc["R"])
            modes = tuple(
                Mode(int(md["k"]), int(md["m"]), md.get("a", 0.0), md.get("a_prime", 0.0))
                for md in doc.get("modes", [])
            )
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed field document: {exc}") from exc
        return cls(tube, doc.get("c0", 0.0), modes)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "HarmonicField":
        return cls.from_dict(json.loads(text))

    @property
    def max_k(self) -> int:
        return max((md.k for md in self.modes), default=0)

    @property
    def max_m(self) -> int:
        return max((md.m for md in self.modes), default=0)


@dataclass(frozen=True)
class CoframeComponents:
    """df = f_r dr + f_theta dθ + f_z dz at a point, plus the pointwise norm |df|."""

    f_r: float
    f_theta: float
    f_z: float
    norm: float


@dataclass(frozen=True)
class QuadratureSpec:
    n_r: int = 64
    n_theta: int = 64
    n_z: int = 64
    tol: float = 1e-8

    def __post_init__(self) -> None:
        for name in ("n_r", "n_theta", "n_z"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise DomainError(f"{name} must be a positive integer")
        if not self.tol > 0:
            raise DomainError("tol must be positive")

    def check(self, fld: HarmonicField) -> None:
        if self.n_theta < 4 * fld.max_k or self.n_z < 4 * fld.max_m:
            raise ResolutionError(
                f"grid ({self.n_theta} x {self.n_z}) does not resolve modes up to "
                f"k={fld.max_k}, m={fld.max_m}; need n_theta >= {4 * fld.max_k}, n_z >= {4 * fld.max_m}"
            )


# ---------------------------------------------------------------------------
# radial factors


def _scalar_profile(t: TubeParams, k: int, m: int, r: float) -> RadialProfile:
    if r < 0 or r > t.R * (1 + 1e-12):
        raise DomainError(f"r={r} outside [0, {t.R}]")
    return radial_profile(t, k, m, [r])


def radial_value(t: TubeParams, k: int, m: int, r: float) -> float:
    """h_km(r); ``inf`` if it exceeds the double range."""
    p = _scalar_profile(t, k, m, r)
    return float(p.unscaled()[0][0])


def radial_deriv_r(t: TubeParams, k: int, m: int, r: float) -> float:
    p = _scalar_profile(t, k, m, r)
    return float(p.unscaled()[1][0])


def radial_second_deriv_r(t: TubeParams, k: int, m: int, r: float) -> float:
    p = _scalar_profile(t, k, m, r)
    return float(p.unscaled()[2][0])


def ode_residual(t: TubeParams, k: int, m: int, r):
    """Relative residual of the radial equation at r (scalar or array).

    The equation h'' + 2 coth(2r) h' - (k^2/sinh^2 r + ω^2/cosh^2 r) h = 0 is
    divided by h and by the sum of the magnitudes of its four terms, so the
    result is scale free even where h itself overflows.  h and its two
    derivatives come from the hypergeometric series, never from the ODE.
    """
    arr = np.atleast_1d(np.asarray(r, dtype=float))
    if (arr <= 0).any():
        raise DomainError("ode_residual needs r > 0 (coordinate singularity on the axis)")
    if (arr > t.R * (1 + 1e-12)).any():
        raise DomainError("r beyond the tube radius")
    if k == 0 and m == 0:
        out = np.zeros(arr.size)
    else:
        _, y, ypp = series_log_derivatives(t, k, m, arr)
        omega = mode_frequency(t, k, m)
        terms = (
            ypp,
            2.0 * y / np.tanh(2.0 * arr),
            -(k * k) / np.sinh(arr) ** 2,
            -(omega * omega) / np.cosh(arr) ** 2,
        )
        out = sum(terms) / sum(np.abs(x) for x in terms)
    return float(out[0]) if np.ndim(r) == 0 else out


# ---------------------------------------------------------------------------
# grid evaluation with a common log scale


@dataclass
class _GridEval:
    log_scale: float
    f: np.ndarray
    f_r: np.ndarray
    f_theta_over_sinh: np.ndarray  # f_θ / sinh r, continuous at r = 0
    f_theta: np.ndarray
    f_z: np.ndarray


def _profiles(fld: HarmonicField, r: np.ndarray) -> tuple[float, list[RadialProfile]]:
    profs = [radial_profile(fld.tube, md.k, md.m, r) for md in fld.modes]
    scale = max((p.log_scale for p in profs), default=0.0)
    if fld.c0 != 0.0:
        scale = max(scale, 0.0)
    return scale, [p.rescaled(scale) for p in profs]


def _grid_eval(fld: HarmonicField, r, theta, z, want_f: bool = False) -> _GridEval:
    """Evaluate on the tensor grid r x theta x z (1-D arrays); output shape (nr, nθ, nz)."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    z = np.asarray(z, dtype=float)
    shape = (r.size, theta.size, z.size)
    scale, profs = _profiles(fld, r)
    f = np.full(shape, fld.c0 * math.exp(-scale)) if want_f else np.zeros(0)
    f_r = np.zeros(shape)
    f_ts = np.zeros(shape)
    f_t = np.zeros(shape)
    f_z = np.zeros(shape)
    for md, p in zip(fld.modes, profs):
        omega = mode_frequency(fld.tube, md.k, md.m)
        phase = md.k * theta[:, None] + omega * z[None, :]
        s, c = np.sin(phase), np.cos(phase)
        val = md.a * s + md.a_prime * c
        dval = md.a * c - md.a_prime * s
        if want_f:
            f += p.h[:, None, None] * val
        f_r += p.dh[:, None, None] * val
        if md.k:
            f_ts += (md.k * p.h_over_sinh)[:, None, None] * dval
            f_t += (md.k * p.h)[:, None, None] * dval
        f_z += (omega * p.h)[:, None, None] * dval
    return _GridEval(scale, f, f_r, f_ts, f_t, f_z)


def _point(p) -> tuple[float, float, float]:
    if isinstance(p, TubePoint):
        return p.r, p.theta, p.z
    r, th, z = p
    return float(r), float(th), float(z)


def eval_f(fld: HarmonicField, p) -> float:
    """f at a point; the mode formula is valid off the fundamental domain too."""
    r, th, z = _point(p)
    if r < 0 or r > fld.tube.R * (1 + 1e-12):
        raise DomainError(f"r={r} outside [0, {fld.tube.R}]")
    g = _grid_eval(fld, [r], [th], [z], want_f=True)
    return float(g.f[0, 0, 0] * math.exp(g.log_scale))


def eval_df(fld: HarmonicField, p) -> CoframeComponents:
    r, th, z = _point(p)
    if r < 0 or r > fld.tube.R * (1 + 1e-12):
        raise DomainError(f"r={r} outside [0, {fld.tube.R}]")
    g = _grid_eval(fld, [r], [th], [z])
    e = math.exp(g.log_scale)
    fr, fts, ft, fz = (float(x[0, 0, 0]) for x in (g.f_r, g.f_theta_over_sinh, g.f_theta, g.f_z))
    norm = math.sqrt(fr * fr + fts * fts + (fz / math.cosh(r)) ** 2) * e
    return CoframeComponents(fr * e, ft * e, fz * e, norm)


# ---------------------------------------------------------------------------
# finite-difference residuals

_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_OFFS = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])


def _fd(func: Callable[[float, float, float], float], r, th, z, h):
    def line(axis):
        vals = []
        for o in _OFFS:
            x = [r, th, z]
            x[axis] += o * h
            vals.append(func(*x))
        return np.array(vals)

    lr = line(0)
    return (_D1 @ lr) / h, (_D2 @ lr) / h**2, (_D2 @ line(1)) / h**2, (_D2 @ line(2)) / h**2


def laplacian_terms(func: Callable[[float, float, float], float], r: float, th: float, z: float, step: float):
    """The four terms of the tube Laplacian times sinh r cosh r, Richardson-extrapolated.

    Returns (sinh r cosh r f_rr, cosh 2r f_r, coth r f_θθ, tanh r f_zz).
    """
    a = _fd(func, r, th, z, step)
    b = _fd(func, r, th, z, 0.5 * step)
    fr, frr, ftt, fzz = (bb + (bb - aa) / 15.0 for aa, bb in zip(a, b))
    return (
        math.sinh(r) * math.cosh(r) * frr,
        math.cosh(2.0 * r) * fr,
        ftt / math.tanh(r),
        math.tanh(r) * fzz,
    )


def _as_callable(fld) -> tuple[Callable, float | None]:
    if isinstance(fld, HarmonicField):
        return (lambda r, th, z: eval_f(fld, (r, th, z))), fld.tube.R
    return fld, None


def laplacian_residual(fld, p, step: float = 1e-2) -> float:
    """∂_r(f_r sinh r cosh r) + f_θθ coth r + f_zz tanh r by central differences.

    ``fld`` may be a HarmonicField or any callable f(r, θ, z).
    """
    r, th, z = _point(p)
    func, R = _as_callable(fld)
    hi = R if R is not None else math.inf
    if r - 2 * step <= 0 or r + 2 * step > hi:
        raise DomainError("point too close to the axis or the boundary for the stencil")
    return float(sum(laplacian_terms(func, r, th, z, step)))


def laplacian_scale(fld, p, step: float = 1e-2) -> float:
    """Sum of the magnitudes of the Laplacian's terms, the natural residual scale."""
    r, th, z = _point(p)
    func, _ = _as_callable(fld)
    return float(sum(abs(x) for x in laplacian_terms(func, r, th, z, step)))


# ---------------------------------------------------------------------------
# norms and fluxes


@dataclass(frozen=True)
class Scaled:
    """A real number stored as mantissa * exp(log_scale)."""

    mantissa: float
    log_scale: float

    @property
    def value(self) -> float:
        if self.mantissa == 0.0:
            return 0.0
        lv = math.log(abs(self.mantissa)) + self.log_scale
        if lv > 709.0:
            return math.copysign(math.inf, self.mantissa)
        return self.mantissa * math.exp(self.log_scale)

    @property
    def log_abs(self) -> float:
        return math.log(abs(self.mantissa)) + self.log_scale if self.mantissa else -math.inf


def _gl(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _periodic(n: int, length: float) -> tuple[np.ndarray, float]:
    return np.arange(n) * (length / n), length / n


def l2_df_boundary_scaled(fld: HarmonicField) -> Scaled:
    t = fld.tube
    if not fld.modes:
        return Scaled(0.0, 0.0)
    scale, profs = _profiles(fld, np.array([t.R]))
    sc = 0.5 * math.sinh(2.0 * t.R)
    total = 0.0
    for md, p in zip(fld.modes, profs):
        total += math.pi * t.lam * md.amplitude_sq * sc * p.h[0] * p.dh[0]
    return Scaled(total, 2.0 * scale)


def l2_df_boundary(fld: HarmonicField) -> float:
    """‖df‖² from the boundary formula: Σ πλ(a² + a'²) sinh R cosh R h(R) h'(R)."""
    return l2_df_boundary_scaled(fld).value


def _volume_grid(fld: HarmonicField, q: QuadratureSpec):
    q.check(fld)
    t = fld.tube
    r, wr = _gl(q.n_r, 0.0, t.R)
    th, wt = _periodic(q.n_theta, TWO_PI)
    z, wz = _periodic(q.n_z, t.lam)
    g = _grid_eval(fld, r, th, z)
    return r, wr * wt * wz, g


def _l2_alpha_scaled(fld: HarmonicField, kappa: float, q: QuadratureSpec) -> Scaled:
    r, w, g = _volume_grid(fld, q)
    sc = (np.sinh(r) * np.cosh(r))[:, None, None]
    shift = kappa / fld.tube.lam * math.exp(-g.log_scale)
    dens = g.f_r**2 * sc + g.f_theta_over_sinh**2 * sc + (g.f_z + shift) ** 2 * np.tanh(r)[:, None, None]
    return Scaled(float(np.einsum("i,ijk->", w, dens)), 2.0 * g.log_scale)


def l2_df_volume_scaled(fld: HarmonicField, q: QuadratureSpec = QuadratureSpec()) -> Scaled:
    if not fld.modes:
        return Scaled(0.0, 0.0)
    return _l2_alpha_scaled(fld, 0.0, q)


def l2_df_volume(fld: HarmonicField, q: QuadratureSpec = QuadratureSpec()) -> float:
    """‖df‖² by quadrature of |df|² sinh r cosh r over the tube."""
    return l2_df_volume_scaled(fld, q).value


def l2_alpha_volume(fld: HarmonicField, kappa: float, q: QuadratureSpec = QuadratureSpec()) -> float:
    """‖(κ/λ) dz + df‖² by quadrature."""
    return _l2_alpha_scaled(fld, kappa, q).value


def dz_l2_sq(t: TubeParams, kappa: float = 1.0) -> float:
    """‖(κ/λ) dz‖² = κ² (2π/λ) log cosh R."""
    return kappa * kappa * TWO_PI / t.lam * log_cosh(t.R)


def dz_l2_sq_quadrature(t: TubeParams, kappa: float = 1.0, n_r: int = 64) -> float:
    r, w = _gl(n_r, 0.0, t.R)
    # |dz|² dvol = cosh^-2 r · sinh r cosh r; θ and z integrate to 2πλ
    return (kappa / t.lam) ** 2 * TWO_PI * t.lam * float(w @ np.tanh(r))


def _linf_grid(fld: HarmonicField, grid: QuadratureSpec):
    t = fld.tube
    r = np.linspace(0.0, t.R, grid.n_r + 1)
    th = np.arange(grid.n_theta) * (TWO_PI / grid.n_theta)
    z = np.arange(grid.n_z) * (t.lam / grid.n_z)
    return r, th, z


def linf_df_sq_scaled(fld: HarmonicField, grid: QuadratureSpec = QuadratureSpec()) -> Scaled:
    if not fld.modes:
        return Scaled(0.0, 0.0)
    r, th, z = _linf_grid(fld, grid)
    g = _grid_eval(fld, r, th, z)
    sq = g.f_r**2 + g.f_theta_over_sinh**2 + (g.f_z / np.cosh(r)[:, None, None]) ** 2
    return Scaled(float(sq.max()), 2.0 * g.log_scale)


def linf_df(fld: HarmonicField, grid: QuadratureSpec = QuadratureSpec()) -> float:
    """Grid supremum of |df|.

    The grid is r = jR/n_r (j = 0..n_r, axis included), θ = 2πj/n_θ and
    z = λj/n_z, so doubling every count yields a superset of points.
    """
    s = linf_df_sq_scaled(fld, grid)
    return math.sqrt(s.value) if s.mantissa else 0.0


def disk_flux_scaled(fld: HarmonicField, z0: float = 0.0, mode_form: str = "closed-form",
                     q: QuadratureSpec = QuadratureSpec()) -> Scaled:
    t = fld.tube
    if not (0.0 <= z0 < t.lam):
        raise DomainError("z0 must lie in [0, λ)")
    if not fld.modes:
        return Scaled(0.0, 0.0)
    if mode_form == "closed-form":
        scale, profs = _profiles(fld, np.array([t.R]))
        total = 0.0
        for md, p in zip(fld.modes, profs):
            if md.k:
                continue
            omega = mode_frequency(t, 0, md.m)
            ph = omega * z0
            # ∫_0^R h tanh r dr = h'(R) sinh 2R / (2ω²) from the radial equation
            total += math.pi * p.dh[0] * math.sinh(2.0 * t.R) / omega * (
                md.a * math.cos(ph) - md.a_prime * math.sin(ph)
            )
        return Scaled(total, scale)
    if mode_form != "quadrature":
        raise DomainError(f"unknown mode_form {mode_form!r}")
    q.check(fld)
    r, wr = _gl(q.n_r, 0.0, t.R)
    th, wt = _periodic(q.n_theta, TWO_PI)
    g = _grid_eval(fld, r, th, [z0])
    val = float(np.einsum("i,ij->", wr * np.tanh(r), g.f_z[:, :, 0])) * wt
    return Scaled(val, g.log_scale)


def flux_disk(fld: HarmonicField, z0: float = 0.0, mode_form: str = "closed-form",
              q: QuadratureSpec = QuadratureSpec()) -> float:
    """Flux of ⋆df through the totally geodesic disk {z = z0}."""
    return disk_flux_scaled(fld, z0, mode_form, q).value


def disk_integral_h_tanh(t: TubeParams, m: int, n_r: int = 64) -> tuple[float, float]:
    """∫_0^R h_0m tanh r dr by quadrature and by the closed form G(u) u / 2."""
    from .hypergeom import f21_deriv_factor

    r, w = _gl(n_r, 0.0, t.R)
    p = radial_profile(t, 0, m, r)
    quad = float(w @ (p.h * np.tanh(r))) * math.exp(p.log_scale)
    u = math.tanh(t.R) ** 2
    closed = 0.5 * u * f21_deriv_factor(mode_params(t, 0, m).d, u).value
    return quad, closed


def annulus_flux_detail(fld: HarmonicField, eta: float, r0: float,
                        q: QuadratureSpec = QuadratureSpec()) -> tuple[float, float]:
    """(∫_A ⋆df, ∫_A |⋆df|) over the invariant annulus at radius r0 of angular width η.

    A = {(r0, θ, z): θ ∈ [-zθ0/λ, η - zθ0/λ], z ∈ [0, λ]}.  On the torus
    r = r0 the form ⋆df restricts to f_r sinh r0 cosh r0 dθ∧dz; the sheared
    coordinate φ = θ + zθ0/λ has unit Jacobian.
    """
    t = fld.tube
    if not (0.0 < eta <= TWO_PI + 1e-15):
        raise DomainError("eta must lie in (0, 2π]")
    if not (0.0 < r0 <= t.R):
        raise DomainError("r0 must lie in (0, R]")
    if not fld.modes:
        return 0.0, 0.0
    q.check(fld)
    if eta >= TWO_PI:
        phi, wphi = _periodic(q.n_theta, TWO_PI)
        wphi = np.full(q.n_theta, wphi)
    else:
        phi, wphi = _gl(q.n_theta, 0.0, eta)
    z, wz = _periodic(q.n_z, t.lam)
    scale, profs = _profiles(fld, np.array([r0]))
    theta = phi[:, None] - z[None, :] * (t.theta0 / t.lam)
    dens = np.zeros((phi.size, z.size))
    for md, p in zip(fld.modes, profs):
        omega = mode_frequency(t, md.k, md.m)
        ph = md.k * theta + omega * z[None, :]
        dens += p.dh[0] * (md.a * np.sin(ph) + md.a_prime * np.cos(ph))
    dens *= 0.5 * math.sinh(2.0 * r0) * wz * wphi[:, None]
    e = math.exp(scale)
    return float(dens.sum()) * e, float(np.abs(dens).sum()) * e


def flux_invariant_annulus(fld: HarmonicField, eta: float, r0: float,
                           q: QuadratureSpec = QuadratureSpec()) -> float:
    return annulus_flux_detail(fld, eta, r0, q)[0]


def inner_dz_df(fld: HarmonicField, q: QuadratureSpec = QuadratureSpec()) -> float:
    """⟨dz, df⟩ = ∫ f_z tanh r dr dθ dz, i.e. half the integral of dz∧⋆df + ⋆dz∧df."""
    if not fld.modes:
        return 0.0
    r, w, g = _volume_grid(fld, q)
    val = float(np.einsum("i,ijk->", w * np.tanh(r), g.f_z))
    return val * math.exp(g.log_scale)


def random_field(rng: np.random.Generator, tube: TubeParams, n_modes: int = 5, max_k: int = 4,
                 max_m: int = 4, c0: float | None = None, balanced: bool = False) -> HarmonicField:
    """A field with ``n_modes`` distinct random (k, m) and standard-normal amplitudes.

    With ``balanced`` each mode's amplitudes are divided by its own ‖df‖, so no
    single fast mode dominates the field's energy.
    """
    pool = [(k, m) for k in range(max_k + 1) for m in range(max_m + 1) if (k, m) != (0, 0)]
    picks = rng.choice(len(pool), size=min(n_modes, len(pool)), replace=False)
    modes = []
    for i in sorted(picks):
        k, m = pool[i]
        a, b = rng.standard_normal(), rng.standard_normal()
        if balanced:
            unit = l2_df_boundary_scaled(HarmonicField(tube, 0.0, (Mode(k, m, 1.0, 0.0),)))
            f = math.exp(-0.5 * unit.log_abs)
            a, b = a * f, b * f
        modes.append(Mode(k, m, a, b))
    return HarmonicField(tube, float(rng.standard_normal()) if c0 is None else c0, tuple(modes))


def twist_images(points: Iterable[Sequence[float]], t: TubeParams):
    """Map (r, θ, z) to (r, θ + θ0, z - λ), the same point of the tube."""
    for r, th, z in points:
        yield r, th + t.theta0, z - t.lam
