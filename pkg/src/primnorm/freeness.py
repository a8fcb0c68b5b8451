"""Freeness predicates over a field tower.

An element of GF(q^n)* is e-free (e dividing q^n - 1) when it is no d-th
power for any divisor d > 1 of e; primitive means (q^n - 1)-free.  Under the
GF(q)[x]-module action an element is g-free (g dividing x^n - 1) when it is
not h-composed from any nontrivial divisor h of g; normal means
(x^n - 1)-free.  The g-free test here uses the quotient-action criterion
(one action evaluation per irreducible factor); the definitional search over
preimages is kept as a small-field oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from . import ffpoly
from .ffpoly import FactoredPoly, FieldTower, Poly, poly_action
from .ntheory import Certainty, FactoredInteger

__all__ = [
    "FreenessContext",
    "build_context",
    "is_e_free",
    "is_primitive",
    "additive_order",
    "is_g_free",
    "is_normal",
    "count_primitive_normal",
]


@dataclass
class FreenessContext:
    """A tower bundled with the two factorizations every freeness test needs."""

    tower: FieldTower
    factored_order: FactoredInteger
    factored_xn1: FactoredPoly
    _xn1: Poly = field(init=False, repr=False)
    _quotients: dict = field(init=False, repr=False, default_factory=dict)
    _pn_cache: Optional[tuple] = field(init=False, repr=False, default=None)

    def __post_init__(self):
        if self.factored_order.certainty is Certainty.INCOMPLETE:
            raise ValueError("context requires a complete factorization of q^n - 1")
        self._xn1 = Poly.xn_minus_1(self.tower.base, self.tower.n)
        for P, _ in self.factored_xn1.factors:
            self._quotients[P.coeffs] = (self._xn1 // P).monic()

    @property
    def order(self) -> int:
        return self.tower.order

    def factor_divisor(self, e: Union[int, FactoredInteger]) -> FactoredInteger:
        """Factored form of a divisor of q^n - 1, reusing the known primes."""
        if isinstance(e, FactoredInteger):
            if (self.order - 1) % e.value:
                raise ValueError(f"{e.value} does not divide {self.order - 1}")
            return e
        return self.factored_order.divisor_part(e)

    def factor_xn1_divisor(self, g: Poly) -> FactoredPoly:
        """Factored form of a monic divisor of x^n - 1, reusing the known factors."""
        return self.factored_xn1.divisor_part(g)

    def xn1(self) -> Poly:
        return self._xn1

    def quotient_by(self, P: Poly) -> Poly:
        return self._quotients[P.coeffs]

    def primitive_normal_indices(self) -> tuple:
        """All indices of elements both primitive and normal, ascending."""
        if self._pn_cache is None:
            self.tower.require_enumerable("primitive/normal enumeration")
            top = self.tower.top
            quots = [self.quotient_by(P) for P, _ in self.factored_xn1.factors]
            group = self.order - 1
            out = []
            for a in range(1, self.order):
                if math.gcd(top.log(a), group) != 1:
                    continue
                if all(poly_action(self.tower, h, a) != 0 for h in quots):
                    out.append(a)
            self._pn_cache = tuple(out)
        return self._pn_cache


def build_context(p: int, k: int, n: int, enum_cap: int = ffpoly.DEFAULT_ENUM_CAP) -> FreenessContext:
    tower = ffpoly.build_tower(p, k, n, enum_cap)
    return FreenessContext(tower, tower.factored_order, ffpoly.factor_xn_minus_1(tower))


def context_for_q(q: int, n: int, enum_cap: int = ffpoly.DEFAULT_ENUM_CAP) -> FreenessContext:
    tower = ffpoly.tower_for_q(q, n, enum_cap)
    return FreenessContext(tower, tower.factored_order, ffpoly.factor_xn_minus_1(tower))


# ---------------------------------------------------------------------------
# Multiplicative side
# ---------------------------------------------------------------------------


def is_e_free(ctx: FreenessContext, alpha: int, e: Union[int, FactoredInteger]) -> bool:
    """True when alpha^((q^n-1)/d) != 1 for every prime d dividing e."""
    if alpha == 0:
        raise ValueError("0 is not in the multiplicative group")
    ef = ctx.factor_divisor(e)
    group = ctx.order - 1
    m = ctx.tower.top.log(alpha)
    return all((m * (group // d)) % group for d in ef.primes)


def is_primitive(ctx: FreenessContext, alpha: int) -> bool:
    return is_e_free(ctx, alpha, ctx.factored_order)


# ---------------------------------------------------------------------------
# Additive side
# ---------------------------------------------------------------------------


def additive_order(ctx: FreenessContext, beta: int) -> Poly:
    """The monic generator of the annihilator of beta; divides x^n - 1.

    additive_order(0) = 1 by the convention that 1 acts as the identity scalar
    and the zero ideal argument degenerates.
    """
    g = ctx.xn1()
    for P, mult in ctx.factored_xn1.factors:
        for _ in range(mult):
            candidate = (g // P).monic()
            if poly_action(ctx.tower, candidate, beta) == 0:
                g = candidate
            else:
                break
    return g


def is_g_free(ctx: FreenessContext, beta: int, g: Poly) -> bool:
    """Quotient-action criterion: ((x^n-1)/P) o beta != 0 for every irreducible P | g."""
    gf = ctx.factor_xn1_divisor(g)
    return all(
        poly_action(ctx.tower, ctx.quotient_by(P), beta) != 0 for P, _ in gf.factors
    )


def is_normal(ctx: FreenessContext, beta: int) -> bool:
    return is_g_free(ctx, beta, ctx.xn1())


def _g_free_by_search(ctx: FreenessContext, beta: int, g: Poly) -> bool:
    """Definitional oracle: beta = h o lambda forces h = 1. Enumerates the field."""
    ctx.tower.require_enumerable("definitional g-free search")
    gf = ctx.factor_xn1_divisor(g)
    for h in gf.monic_divisors():
        if h.is_one():
            continue
        for lam in range(ctx.order):
            if poly_action(ctx.tower, h, lam) == beta:
                return False
    return True


# ---------------------------------------------------------------------------
# Counting
# ---------------------------------------------------------------------------


def count_primitive_normal(ctx_or_tower) -> int:
    """Exact count of elements that are simultaneously primitive and normal."""
    ctx = (
        ctx_or_tower
        if isinstance(ctx_or_tower, FreenessContext)
        else FreenessContext(
            ctx_or_tower,
            ctx_or_tower.factored_order,
            ffpoly.factor_xn_minus_1(ctx_or_tower),
        )
    )
    return len(ctx.primitive_normal_indices())


def count_where(ctx: FreenessContext, predicate) -> int:
    ctx.tower.require_enumerable("counting enumeration")
    return sum(1 for a in range(ctx.order) if predicate(a))
