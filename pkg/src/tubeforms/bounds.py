"""Closed-form norm inequalities and invariant relations for fibered classes.

Every function is plain arithmetic on user-supplied invariants.  Reports are
lists of :class:`Row`, each naming one inequality with both sides, whether it
holds, its slack (rhs - lhs, positive when satisfied) and an anchor string
naming the relation it encodes.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import DomainError
from .tubegeom import MARGULIS_EPS, TUBE_RADIUS_CONST, TWO_PI, log_cosh

ROUNDED_CONST = 0.676
SIMPLIFIED_CONST = 0.2 * math.pi
SHORT_GEODESIC_THRESHOLD = 58e-6


def exact_const(eps: float = MARGULIS_EPS) -> float:
    """2π ε / sqrt(7.256); equals 0.67645... for ε = 0.29."""
    return TWO_PI * eps / math.sqrt(TUBE_RADIUS_CONST)


@dataclass(frozen=True)
class Row:
    name: str
    lhs: float
    rhs: float
    satisfied: bool
    slack: float
    anchor: str

    def as_dict(self) -> dict:
        return asdict(self)


def compare(name: str, lhs: float, rhs: float, anchor: str, strict: bool = True) -> Row:
    ok = lhs < rhs if strict else lhs <= rhs
    return Row(name, lhs, rhs, ok, rhs - lhs, anchor)


@dataclass(frozen=True)
class ThurstonInput:
    lam: float
    kappa: int

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise DomainError("core length must be positive")
        if int(self.kappa) != self.kappa:
            raise DomainError("kappa must be an integer")


@dataclass(frozen=True)
class ThurstonBound:
    value: float
    simplified: float
    valid_regime: bool  # λ <= 58e-6, where the simplified form is claimed
    vacuous: bool  # value <= 0
    exact_constants: bool

    @property
    def dominates_simplified(self) -> bool:
        return self.value > self.simplified


def thurston_lower_bound(inp: ThurstonInput, exact_constants: bool = True,
                         eps: float = MARGULIS_EPS) -> ThurstonBound:
    """|κ| (C/√λ - 2π), with C exact (default) or the rounded 0.676."""
    c = exact_const(eps) if exact_constants else ROUNDED_CONST
    k = abs(inp.kappa)
    val = k * (c / math.sqrt(inp.lam) - TWO_PI)
    simp = SIMPLIFIED_CONST * k / math.sqrt(inp.lam)
    return ThurstonBound(val, simp, inp.lam <= SHORT_GEODESIC_THRESHOLD, val <= 0.0, exact_constants)


def domination_threshold(eps: float = MARGULIS_EPS) -> float:
    """λ below which the exact-constant bound strictly exceeds 0.2π|κ|/√λ."""
    return ((exact_const(eps) - SIMPLIFIED_CONST) / TWO_PI) ** 2


def bd_sandwich(vol: float, inj: float, thurston: float) -> tuple[float, float]:
    """(π/√vol, 10π/√inj) times the Thurston norm, bracketing the harmonic norm."""
    if vol <= 0 or inj <= 0 or thurston < 0:
        raise DomainError("vol and inj must be positive, thurston non-negative")
    return math.pi / math.sqrt(vol) * thurston, 10.0 * math.pi / math.sqrt(inj) * thurston


def main_ratio_bound(c_eps: float, R: float) -> float:
    """c π + 2 sqrt(c² π² + 16 log cosh R)."""
    if c_eps <= 0 or R < 0:
        raise DomainError("c_eps must be positive and R non-negative")
    cp = c_eps * math.pi
    return cp + 2.0 * math.sqrt(cp * cp + 16.0 * log_cosh(R))


def linf_l2_constant(inj: float) -> float:
    if inj <= 0:
        raise DomainError("injectivity radius must be positive")
    return 5.0 / math.sqrt(inj)


def fiber_translation(K: float) -> float:
    if not K > 0:
        raise DomainError("Lipschitz constant must be positive (trivial class otherwise)")
    return 1.0 / K


@dataclass(frozen=True)
class FiberedInvariants:
    K: float
    ent: float
    vol: float
    thurston: float
    genus: int

    def __post_init__(self) -> None:
        if not (self.K > 0 and self.ent > 0 and self.vol > 0):
            raise DomainError("K, ent and vol must be positive")
        if self.thurston < 0:
            raise DomainError("thurston norm must be non-negative")
        if int(self.genus) != self.genus or self.genus < 2:
            raise DomainError("genus must be an integer >= 2")


@dataclass(frozen=True)
class Report:
    rows: tuple[Row, ...]
    notes: tuple[str, ...] = ()

    @property
    def consistent(self) -> bool:
        return all(r.satisfied for r in self.rows)

    def row(self, name: str) -> Row:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)


def entropy_relations(inv: FiberedInvariants) -> Report:
    chi = abs(2 - 2 * inv.genus)
    rows = (
        compare("lipschitz_entropy", 1.0, 3.0 * inv.K * inv.ent, "1 < 3 K ent"),
        compare("fiber_translation_entropy", fiber_translation(inv.K), 3.0 * inv.ent, "d_alpha < 3 ent"),
        compare("thurston_volume_lipschitz", math.pi * inv.thurston, inv.vol * inv.K, "pi ||a||_Th < Vol K"),
        compare("volume_entropy", inv.vol, 3.0 * math.pi * chi * inv.ent, "Vol <= 3 pi |chi| ent", strict=False),
    )
    notes = ()
    if not all(r.satisfied for r in rows):
        bad = ", ".join(r.name for r in rows if not r.satisfied)
        notes = (f"inconsistent inputs: {bad} violated, so these invariants cannot come from one fibered manifold",)
    return Report(rows, notes)


@dataclass(frozen=True)
class CoveringScaling:
    lip_n: float
    lip_over_n: float
    product: float | None  # (lip/n) * (n ent), when ent is given


def covering_scaling(lip: float, n: int, ent: float | None = None) -> CoveringScaling:
    if lip <= 0 or int(n) != n or n < 1:
        raise DomainError("lip must be positive and n a positive integer")
    over = lip / n
    return CoveringScaling(lip, over, None if ent is None else over * (n * ent))


def product_volume_comparison(genus: int, K: float, vol_hyperbolic: float) -> Report:
    """Compare Vol(M_φ) with half the volume 2π(2g-2)/K of the product manifold."""
    if int(genus) != genus or genus < 2 or K <= 0 or vol_hyperbolic <= 0:
        raise DomainError("need genus >= 2 and positive K, volume")
    vol_id = TWO_PI * (2 * genus - 2) / K
    return Report(
        (compare("half_product_volume", 0.5 * vol_id, vol_hyperbolic, "1/2 Vol(M_Id) < Vol(M_phi)"),),
        (f"Vol(M_Id) = {vol_id!r}",),
    )


def product_volume(genus: int, K: float) -> float:
    return TWO_PI * (2 * genus - 2) / K


@dataclass(frozen=True)
class DehnGrowth:
    lambda_n: float
    lower_bound: float
    valid_regime: bool
    note: str


def dehn_example_growth(n: int, c: float) -> DehnGrowth:
    """λ_n = c/n² and the simplified Thurston bound 0.2π n/√c, linear in n."""
    if int(n) != n or n < 1 or c <= 0:
        raise DomainError("n must be a positive integer and c positive")
    lam = c / (n * n)
    bound = SIMPLIFIED_CONST * n / math.sqrt(c)
    note = "bound 0.2*pi*n/sqrt(c) from direct substitution of lambda_n; grows linearly in n"
    return DehnGrowth(lam, bound, lam <= SHORT_GEODESIC_THRESHOLD, note)
