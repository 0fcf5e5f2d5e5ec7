"""Complex log-gamma and digamma kernels used by the hypergeometric module.

Both are written for scalar complex arguments. The log-gamma kernel is a
Lanczos approximation (g = 7, nine coefficients) with the reflection formula
for the left half plane; the digamma kernel shifts the argument upward with
the recurrence and then applies the Stirling series.
"""

from __future__ import annotations

import cmath
import math

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# Bernoulli numbers B_2j / (2j) for the digamma asymptotic series.
_DIGAMMA_BERN = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)


def loggamma(z: complex) -> complex:
    """Principal-ish log Γ(z). Only the real part is relied upon downstream."""
    z = complex(z)
    if z.real < 0.5:
        if z.imag == 0.0 and z.real == math.floor(z.real):
            raise ValueError(f"log-gamma pole at {z.real}")
        # Γ(z)Γ(1-z) = π / sin(πz)
        return complex(math.log(math.pi)) - _log_sin_pi(z) - loggamma(1.0 - z)
    zm = z - 1.0
    acc = complex(_LANCZOS_COEF[0])
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (zm + i)
    t = zm + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * cmath.log(t) - t + cmath.log(acc)


def _log_sin_pi(z: complex) -> complex:
    # log sin(πz) without overflow for large |Im z|.
    x, y = z.real, z.imag
    if abs(y) < 20.0:
        return cmath.log(cmath.sin(math.pi * z))
    # sin(πz) = (s·i/2)·e^{-iπsz}·(1 - e^{2iπsz}) with s = sign(Im z)
    s = 1.0 if y > 0 else -1.0
    lead = complex(math.log(0.5) + math.pi * abs(y), -math.pi * s * x) + cmath.log(complex(0.0, s))
    return lead + cmath.log(1.0 - cmath.exp(2j * math.pi * s * z))


def log_abs_gamma(z: complex) -> float:
    return loggamma(z).real


def digamma(z: complex) -> complex:
    """ψ(z) for Re z > 0 (the only region the library needs)."""
    z = complex(z)
    if z.real <= 0.0:
        raise ValueError("digamma kernel requires Re z > 0")
    shift = 0j
    while abs(z) < 15.0:
        shift -= 1.0 / z
        z += 1.0
    inv2 = 1.0 / (z * z)
    series = 0j
    p = inv2
    for b in _DIGAMMA_BERN:
        series += b * p
        p *= inv2
    return shift + cmath.log(z) - 0.5 / z - series
