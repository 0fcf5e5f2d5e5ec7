"""Gauss hypergeometric functions with a complex-conjugate parameter pair.

The family handled here is

    F_k(d; u) = 2F1(k/2 + i d, k/2 - i d; 1 + k; u),   0 <= u < 1,

together with the companion G(d; u) = 2F1(1 + i d, 1 - i d; 2; u), which
satisfies dF_0/du = d^2 G.  Because the upper parameters are conjugate, every
Taylor coefficient is real and positive, so the series can be summed entirely
in real arithmetic.  Summation runs in log space so that large d does not
overflow; results carry both the linear value (possibly ``inf``) and its
logarithm.

Close to u = 1 the Taylor series needs O(1/(1-u)) terms.  There the module
switches to the logarithmic connection formulas around u = 1, which converge
like a power series in (1-u)|a|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._special import digamma, log_abs_gamma
from .errors import ConvergenceError, DomainError

TERM_CAP = 1_000_000
_AUTO_SERIES_BUDGET = 200_000
_CONNECTION_REACH = 16.0


@dataclass(frozen=True)
class ConjugateParams:
    """Angular index ``k`` and imaginary parameter ``d`` of F_k(d; u)."""

    k: int
    d: float

    def __post_init__(self) -> None:
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 0:
            raise DomainError(f"k must be a non-negative integer, got {self.k!r}")
        if not math.isfinite(self.d) or self.d < 0:
            raise DomainError(f"d must be finite and >= 0, got {self.d!r}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "d", float(self.d))

    @property
    def trivial(self) -> bool:
        return self.k == 0 and self.d == 0.0


@dataclass(frozen=True)
class SeriesResult:
    value: float
    terms_used: int
    truncation_estimate: float
    log_value: float
    method: str = "series"

    @property
    def relative_truncation(self) -> float:
        if self.truncation_estimate == 0.0:
            return 0.0
        return math.exp(math.log(self.truncation_estimate) - self.log_value)


@dataclass(frozen=True)
class EndpointValue:
    """Limit of F_k(d; u) as u -> 1.  ``value`` is ``inf`` when not representable."""

    log_value: float
    value: float
    representable: bool


@dataclass(frozen=True)
class NearBoundaryReport:
    """Both evaluations of G near u = 1; ``series`` is None if the cap was hit."""

    series: SeriesResult | None
    connection: SeriesResult
    asymptote: float


@dataclass(frozen=True)
class _Sums:
    log_s0: float
    mean1: float  # sum n t_n / sum t_n
    mean2: float  # sum n(n-1) t_n / sum t_n
    terms: int
    rel_trunc: float


def _check_u(u: float) -> float:
    u = float(u)
    if not (0.0 <= u < 1.0) or math.isnan(u):
        raise DomainError(f"u must lie in [0, 1), got {u!r}")
    return u


def _check_tol(tol: float) -> float:
    tol = float(tol)
    if not (0.0 < tol <= 1e-3):
        raise DomainError(f"tol must lie in (0, 1e-3], got {tol!r}")
    return tol


def _exp_or_inf(x: float) -> float:
    return math.exp(x) if x < 709.0 else math.inf


class _CoefTable:
    """Growing table of log c_n for one (alpha, c, d); shared by all u."""

    def __init__(self, alpha: float, c: float, d: float):
        self.alpha, self.c, self.d2 = alpha, c, d * d
        self.log_c = np.zeros(1)

    def ratio(self, n):
        return ((n + self.alpha) ** 2 + self.d2) / ((n + self.c) * (n + 1.0))

    def upto(self, n_max: int) -> np.ndarray:
        have = self.log_c.size
        if n_max > have:
            size = max(n_max, 2 * have)
            n = np.arange(have - 1, size - 1, dtype=float)
            # chunk-local cumulative sums keep rounding drift near 1e-13 over 1e6 terms
            ext = np.empty(size - have)
            last = self.log_c[-1]
            for lo in range(0, n.size, 16384):
                with np.errstate(divide="ignore"):  # c_1 = 0 when alpha = d = 0
                    seg = np.cumsum(np.log(self.ratio(n[lo:lo + 16384])))
                ext[lo:lo + 16384] = last + seg
                last = ext[lo + seg.size - 1]
            self.log_c = np.concatenate((self.log_c, ext))
        return self.log_c[:n_max]


@lru_cache(maxsize=256)
def _coef_table(alpha: float, c: float, d: float) -> _CoefTable:
    return _CoefTable(alpha, c, d)


_HEAD_DROP = 50.0  # e-folds below the peak term at which the head is discarded


def _skip_head(table: _CoefTable, logu: float, est: float, cap: int) -> tuple[int, float]:
    """First index worth summing and a bound on the discarded head, relative to the peak term.

    log t_n is unimodal in n (u c_{n+1}/c_n crosses 1 at most once, from above), so
    the peak is located by bisection on the sign of the increment and the cut by
    bisection on the increasing branch.
    """
    if est < 20_000:
        return 0, 0.0
    hi = int(min(cap, 1.3 * est)) + 2
    lc = table.upto(hi)

    def lt(n: int) -> float:
        return float(lc[n]) + n * logu

    lo_i, hi_i = 0, hi - 2
    while hi_i - lo_i > 1:  # largest n with t_{n+1} > t_n
        mid = (lo_i + hi_i) // 2
        if lt(mid + 1) > lt(mid):
            lo_i = mid
        else:
            hi_i = mid
    peak = lo_i + 1 if lt(lo_i + 1) > lt(lo_i) else lo_i
    top = lt(peak)
    if lt(0) >= top - _HEAD_DROP:
        return 0, 0.0
    a, b = 0, peak
    while b - a > 1:
        mid = (a + b) // 2
        if lt(mid) < top - _HEAD_DROP:
            a = mid
        else:
            b = mid
    # every discarded term is below exp(top - drop); the kept sum exceeds exp(top)
    return b, b * math.exp(-_HEAD_DROP)


def _positive_series(
    alpha: float, c: float, d: float, u: float, tol: float, order: int = 0, cap: int = TERM_CAP
) -> _Sums:
    """Sum t_n = c_n u^n with c_{n+1}/c_n = ((n+alpha)^2 + d^2)/((n+c)(n+1)), c_0 = 1.

    Stops at the first index where three consecutive terms of the order-th
    factorial-moment sequence fall below tol times its partial sum and a
    geometric tail bound confirms it.  Requires 2 alpha - c - 1 < 0, so that
    sup_{n>=N} c_{n+1}/c_n = max(1, ratio at N), which makes the bound rigorous.
    Also returns the first two factorial moments, needed for F' and F''.
    """
    if u == 0.0 or (alpha == 0.0 and d == 0.0):
        return _Sums(0.0, 0.0, 0.0, 1, 0.0)
    assert 2 * alpha - c - 1 < 0
    table = _coef_table(alpha, c, d)
    logu = math.log(u)
    start, head_rel = _skip_head(table, logu, estimated_terms(0, d, u, tol), cap)
    scale = None
    s = [0.0, 0.0, 0.0]
    prev_small = np.zeros(2, dtype=bool)
    last_g = 0.0
    chunk = int(min(16384, max(64, 1.25 * estimated_terms(0, d, u, tol))))
    while start < cap:
        size = min(chunk, cap - start)
        n = np.arange(start, start + size, dtype=float)
        lt = table.upto(start + size)[start:] + n * logu
        top = float(lt.max())
        if scale is None or top > scale:
            if scale is not None:
                f = math.exp(scale - top)
                s = [x * f for x in s]
                last_g *= f
            scale = top
        t = np.exp(lt - scale)
        g = t if order == 0 else (n * t if order == 1 else n * (n - 1.0) * t)
        cg = np.cumsum(g)
        cg += s[order]
        small = np.concatenate((prev_small, g < tol * cg))
        three = small[2:] & small[1:-1] & small[:-2]
        cand = np.flatnonzero(three) if three.any() else ()
        if len(cand):
            nn = n[cand] + 1.0  # number of terms kept
            q0 = u * np.maximum(1.0, table.ratio(nn))
            ok = np.ones(cand.size, dtype=bool)
            cums, rel0 = [], None
            for j in range(3):
                wj = t if j == 0 else (n * t if j == 1 else n * (n - 1.0) * t)
                cj = np.cumsum(wj)
                cj += s[j]
                cums.append(cj)
                if j > order:
                    continue
                qj = q0 * (1.0 + 2.0 / np.maximum(nn - 1.0, 1.0)) ** j
                with np.errstate(divide="ignore", invalid="ignore"):
                    ej = np.where(qj < 1.0, wj[cand] * qj / (1.0 - qj), np.inf)
                    rel = np.where(cj[cand] > 0, ej / cj[cand], 0.0)
                ok &= rel <= tol
                if j == 0:
                    rel0 = rel
            hit = np.flatnonzero(ok)
            if hit.size:
                i = int(cand[hit[0]])
                s0v = float(cums[0][i])
                return _Sums(
                    log_s0=scale + math.log(s0v),
                    mean1=float(cums[1][i]) / s0v,
                    mean2=float(cums[2][i]) / s0v,
                    terms=start + i + 1,
                    rel_trunc=float(rel0[hit[0]]) + head_rel,
                )
        prev_small = small[-2:]
        s[0] += float(t.sum())
        s[1] += float(n @ t)
        s[2] += float(g.sum()) if order == 2 else float((n * (n - 1.0)) @ t)
        last_g = float(g[-1])
        start += size
        chunk = min(chunk * 2, 16384)
    raise ConvergenceError(
        f"series did not reach tolerance {tol:g} within {cap} terms",
        partial_log_value=scale + math.log(s[0]),
        estimate=last_g / s[order] if s[order] else math.inf,
    )


def estimated_terms(k: int, d: float, u: float, tol: float = 1e-14) -> float:
    """Rough count of Taylor terms needed at u (peak location plus geometric tail)."""
    if u == 0.0:
        return 1.0
    w = 1.0 - u
    return d * math.sqrt(u / w) + (math.log(1.0 / tol) + 5.0) / -math.log(u) + k


# ---------------------------------------------------------------------------
# endpoint and connection formulas


def endpoint_value(p: ConjugateParams) -> EndpointValue:
    """Gamma(1+k) / |Gamma(1 + k/2 + i d)|^2, the value of F_k(d; u) at u = 1."""
    lv = math.lgamma(1.0 + p.k) - 2.0 * log_abs_gamma(complex(1.0 + 0.5 * p.k, p.d))
    if p.trivial:
        lv = 0.0
    v = _exp_or_inf(lv)
    return EndpointValue(lv, v, math.isfinite(v))


def _conj_connection(k: int, d: float, w: float, tol: float) -> tuple[float, int, float]:
    """log F_k(d; 1-w) from the logarithmic connection formula with m = 1."""
    if k == 0 and d == 0.0:
        return 0.0, 1, 0.0
    a = complex(0.5 * k, d)
    mod_a2 = (0.5 * k) ** 2 + d * d
    lw = math.log(w)
    psi_a = digamma(a + 1.0).real
    psi1 = -0.5772156649015329  # psi(1)
    psi2 = psi1 + 1.0
    b = 1.0
    total = 0.0
    run = 0
    n = 0
    while n < TERM_CAP:
        term = b * (lw - psi1 - psi2 + 2.0 * psi_a)
        total += term
        run = run + 1 if abs(term) < tol * abs(total) else 0
        ratio = ((n + 1 + 0.5 * k) ** 2 + d * d) / ((n + 1.0) * (n + 2.0)) * w
        if run >= 3 and ratio < 0.5:
            break
        psi1 += 1.0 / (n + 1.0)
        psi2 += 1.0 / (n + 2.0)
        psi_a += (1.0 / (a + n + 1.0)).real
        b *= ratio
        n += 1
    bracket = 1.0 + w * mod_a2 * total
    if bracket <= 0.0:
        raise ConvergenceError("connection formula lost all precision", math.nan, math.inf)
    rel = 4.0 * abs(term) * w * mod_a2 / bracket + 1e-16 * (1.0 + abs(w * mod_a2 * total)) / bracket
    lv = endpoint_value(ConjugateParams(k, d)).log_value + math.log(bracket)
    return lv, n + 1, rel


def _deriv_connection(d: float, w: float, tol: float) -> tuple[float, int, float]:
    """log G(d; 1-w) from the logarithmic connection formula in the c = a + b case."""
    lw = math.log(w)
    a = complex(1.0, d)
    psi_n1 = -0.5772156649015329
    psi_a = digamma(a).real
    b = 1.0
    total = 0.0
    run = 0
    n = 0
    while n < TERM_CAP:
        term = b * (2.0 * psi_n1 - 2.0 * psi_a - lw)
        total += term
        run = run + 1 if abs(term) < tol * abs(total) else 0
        ratio = ((n + 1.0) ** 2 + d * d) / (n + 1.0) ** 2 * w
        if run >= 3 and ratio < 0.5:
            break
        psi_n1 += 1.0 / (n + 1.0)
        psi_a += (1.0 / (a + n)).real
        b *= ratio
        n += 1
    if total <= 0.0:
        raise ConvergenceError("connection formula lost all precision", math.nan, math.inf)
    rel = 4.0 * abs(term) / total + 1e-16 * abs(lw) / total
    lv = endpoint_value(ConjugateParams(0, d)).log_value + math.log(total)
    return lv, n + 1, rel


# ---------------------------------------------------------------------------
# public evaluators


def _pick(method: str, k: int, d: float, u: float, tol: float) -> str:
    if method not in ("auto", "series", "connection"):
        raise DomainError(f"unknown method {method!r}")
    if method != "auto":
        return method
    if estimated_terms(k, d, u, tol) <= _AUTO_SERIES_BUDGET:
        return "series"
    if (1.0 - u) * ((0.5 * k) ** 2 + d * d + 1.0) <= _CONNECTION_REACH:
        return "connection"
    return "series"


def _result(lv: float, terms: int, rel: float, method: str) -> SeriesResult:
    v = _exp_or_inf(lv)
    est = _exp_or_inf(lv + math.log(rel)) if rel > 0 else 0.0
    return SeriesResult(v, terms, est, lv, method)


def f21_conj(p: ConjugateParams, u: float, tol: float = 1e-12, method: str = "auto") -> SeriesResult:
    """Evaluate F_k(d; u).  ``method`` is ``auto``, ``series`` or ``connection``."""
    u = _check_u(u)
    tol = _check_tol(tol)
    how = _pick(method, p.k, p.d, u, tol)
    if how == "connection":
        lv, n, rel = _conj_connection(p.k, p.d, 1.0 - u, tol)
        return _result(lv, n, rel, "connection")
    s = _positive_series(0.5 * p.k, 1.0 + p.k, p.d, u, tol)
    return _result(s.log_s0, s.terms, s.rel_trunc, "series")


def f21_deriv_factor(d: float, u: float, tol: float = 1e-12, method: str = "auto") -> SeriesResult:
    """Evaluate G(d; u) = 2F1(1 + i d, 1 - i d; 2; u)."""
    ConjugateParams(0, d)
    u = _check_u(u)
    tol = _check_tol(tol)
    how = _pick(method, 2, d, u, tol)
    if how == "connection":
        if u == 0.0:
            return _result(0.0, 1, 0.0, "connection")
        lv, n, rel = _deriv_connection(float(d), 1.0 - u, tol)
        return _result(lv, n, rel, "connection")
    s = _positive_series(1.0, 2.0, float(d), u, tol)
    return _result(s.log_s0, s.terms, s.rel_trunc, "series")


def _conj_connection_derivs(k: int, d: float, w: float, tol: float) -> tuple[float, float, float, int]:
    """(log F, F'/F, F''/F) at u = 1 - w by differentiating the connection series termwise.

    F = E [1 + |a|^2 sum_n b_n w^{n+1} (log w + beta_n)], so each term's w-derivatives
    are elementary; d/du = -d/dw.
    """
    a = complex(0.5 * k, d)
    mod_a2 = (0.5 * k) ** 2 + d * d
    lw = math.log(w)
    psi_a = digamma(a + 1.0).real
    psi1 = -0.5772156649015329
    psi2 = psi1 + 1.0
    pn = 1.0  # b_n w^n
    s0 = s1 = s2 = 0.0
    run = 0
    n = 0
    while n < TERM_CAP:
        x = lw - psi1 - psi2 + 2.0 * psi_a
        t0 = pn * x
        t1 = pn * ((n + 1) * x + 1.0)
        t2 = pn * (n * (n + 1) * x + 2 * n + 1)
        s0 += t0
        s1 += t1
        s2 += t2
        small = abs(t0) < tol * abs(s0) and abs(t1) < tol * abs(s1) and abs(t2) < tol * abs(s2)
        run = run + 1 if small else 0
        ratio = ((n + 1 + 0.5 * k) ** 2 + d * d) / ((n + 1.0) * (n + 2.0)) * w
        if run >= 3 and ratio < 0.5:
            break
        psi1 += 1.0 / (n + 1.0)
        psi2 += 1.0 / (n + 2.0)
        psi_a += (1.0 / (a + n + 1.0)).real
        pn *= ratio
        n += 1
    bracket = 1.0 + mod_a2 * w * s0
    if bracket <= 0.0:
        raise ConvergenceError("connection formula lost all precision", math.nan, math.inf)
    lf = endpoint_value(ConjugateParams(k, d)).log_value + math.log(bracket)
    return lf, -mod_a2 * s1 / bracket, mod_a2 * s2 / (w * bracket), n + 1


def conj_log_derivatives(
    p: ConjugateParams, u: float, tol: float = 1e-14, cap: int = TERM_CAP, method: str = "auto"
) -> tuple[float, float, float, int]:
    """Return (log F, F'/F, F''/F, terms) at u; derivatives are with respect to u.

    ``auto`` sums the Taylor series unless it would be long and the
    connection series around u = 1 converges quickly ((|a|^2 + 1)(1 - u) <= 4).
    """
    u = _check_u(u)
    if u == 0.0 or p.trivial:
        c1 = (0.25 * p.k * p.k + p.d * p.d) / (1.0 + p.k)
        c2 = c1 * ((1.0 + 0.5 * p.k) ** 2 + p.d * p.d) / (2.0 * (2.0 + p.k))
        if p.trivial:
            c1 = c2 = 0.0
        return 0.0, c1, 2.0 * c2, 1
    if method == "auto":
        near = estimated_terms(p.k, p.d, u, tol) > 20_000
        method = "connection" if near and ((0.25 * p.k * p.k + p.d * p.d + 1.0) * (1.0 - u) <= 4.0) else "series"
    if method == "connection":
        return _conj_connection_derivs(p.k, p.d, 1.0 - u, tol)
    if method != "series":
        raise DomainError(f"unknown method {method!r}")
    s = _positive_series(0.5 * p.k, 1.0 + p.k, p.d, u, tol, order=2, cap=cap)
    return s.log_s0, s.mean1 / u, s.mean2 / (u * u), s.terms


def log_asymptote(d: float, u: float) -> float:
    """Leading behaviour of G(d; u) as u -> 1: endpoint(0, d) * log(1/(1-u))."""
    ConjugateParams(0, d)
    u = float(u)
    if not (0.9 <= u < 1.0):
        raise DomainError(f"log_asymptote needs 0.9 <= u < 1, got {u!r}")
    e = endpoint_value(ConjugateParams(0, d))
    return _exp_or_inf(e.log_value + math.log(-math.log1p(-u)))


def deriv_factor_next_order(d: float) -> float:
    """Constant C(d) in G(d; u) = endpoint * (log(1/(1-u)) + C(d)) + o(1)."""
    return 2.0 * -0.5772156649015329 - 2.0 * digamma(complex(1.0, d)).real


def deriv_factor_near_boundary(d: float, u: float, tol: float = 1e-12) -> NearBoundaryReport:
    """Evaluate G close to u = 1 both by direct Taylor summation and by connection formula."""
    try:
        series = f21_deriv_factor(d, u, tol, method="series")
    except ConvergenceError:
        series = None
    conn = f21_deriv_factor(d, u, tol, method="connection")
    return NearBoundaryReport(series, conn, log_asymptote(d, u))


def inequality_sides(d: float, u: float, tol: float = 1e-12) -> tuple[float, float]:
    """(u G(d; u), F_0(d; u) log(1/(1-u))) in log form, i.e. the logs of both sides."""
    g = f21_deriv_factor(d, u, tol)
    f = f21_conj(ConjugateParams(0, d), u, tol)
    return g.log_value + math.log(u), f.log_value + math.log(-math.log1p(-u))
