"""Explicit characters of GF(q^n) and the character-sum machinery.

Multiplicative characters are realized through the tower's fixed generator
and its discrete-log table: the phi(d) characters of exact order d | q^n - 1
send gen^m to exp(2*pi*i*j*m/d) for j coprime to d.  Additive characters are
psi_c(beta) = zeta_p^Tr(c*beta) with Tr the absolute trace; the GF(q)-order
of psi_c is found by the minimal-divisor search over divisors of x^n - 1.

On top of these sit the membership indicators for e-free and g-free sets,
the hybrid sums used to count elements with prescribed freeness, and an
empirical checker for the classical character-sum bounds.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .ffpoly import Poly, factor_poly, poly_action
from .freeness import FreenessContext
from .ntheory import FactoredInteger
from .ratfn import RationalFn

__all__ = [
    "ToleranceError",
    "MultCharacter",
    "AddCharacter",
    "WeilData",
    "WeilCheck",
    "mult_characters_of_order",
    "add_characters_of_fq_order",
    "rho",
    "rho_indicator",
    "kappa",
    "kappa_indicator",
    "chi_tilde",
    "n_f_by_characters",
    "weil_check",
]

INDICATOR_TOLERANCE = 1e-6


class ToleranceError(ArithmeticError):
    """A value that must be a 0/1 indicator strayed too far from an integer."""


def _cache(ctx: FreenessContext) -> dict:
    cache = getattr(ctx, "_charsum_cache", None)
    if cache is None:
        cache = {}
        object.__setattr__(ctx, "_charsum_cache", cache)
    return cache


def _roots_of_unity(ctx: FreenessContext, d: int) -> list[complex]:
    cache = _cache(ctx).setdefault("roots", {})
    if d not in cache:
        cache[d] = [cmath.exp(2j * cmath.pi * k / d) for k in range(d)]
    return cache[d]


# ---------------------------------------------------------------------------
# Characters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultCharacter:
    """Multiplicative character of exact order `order`; index selects which one."""

    ctx: FreenessContext
    order: int
    index: int

    def __post_init__(self):
        if (self.ctx.order - 1) % self.order:
            raise ValueError("character order must divide the group order")
        if math.gcd(self.index % self.order, self.order) != 1:
            raise ValueError("index must be coprime to the order")

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    def eval(self, alpha: int) -> complex:
        if alpha == 0:
            raise ValueError("multiplicative characters are not defined at 0")
        m = self.ctx.tower.top.log(alpha)
        return _roots_of_unity(self.ctx, self.order)[(self.index * m) % self.order]


@dataclass(frozen=True)
class AddCharacter:
    """Additive character beta -> zeta_p^Tr(c*beta), c the defining element."""

    ctx: FreenessContext
    c: int

    @property
    def is_trivial(self) -> bool:
        return self.c == 0

    def eval(self, beta: int) -> complex:
        top = self.ctx.tower.top
        t = top.abs_trace(top.mul(self.c, beta))
        return _roots_of_unity(self.ctx, self.ctx.tower.p)[t]

    def fq_order(self) -> Poly:
        """Minimal monic h | x^n - 1 with psi o h trivial (minimal-divisor search)."""
        orders = _add_order_table(self.ctx)
        return orders[self.c]


def _abs_basis(ctx: FreenessContext) -> list[int]:
    # coordinates pack radix-p first, so the F_p basis is the powers of p
    return [ctx.tower.p**m for m in range(ctx.tower.k * ctx.tower.n)]


def _add_order_table(ctx: FreenessContext) -> dict:
    """fq_order for every defining element, by the minimal-divisor search."""
    cache = _cache(ctx)
    if "add_orders" not in cache:
        ctx.tower.require_enumerable("additive character order table")
        tower = ctx.tower
        top = tower.top
        basis = _abs_basis(ctx)
        divisors = list(ctx.factored_xn1.monic_divisors())  # (degree, lex) order
        actions = [
            (h, [poly_action(tower, h, b) for b in basis]) for h in divisors
        ]
        orders = {}
        for c in range(ctx.order):
            for h, hb in actions:
                if all(top.abs_trace(top.mul(c, v)) == 0 for v in hb):
                    orders[c] = h
                    break
            else:
                raise AssertionError("x^n - 1 must annihilate every character")
        cache["add_orders"] = orders
        groups: dict[tuple, list[int]] = {}
        for c, h in orders.items():
            groups.setdefault(h.coeffs, []).append(c)
        cache["add_groups"] = groups
    return cache["add_orders"]


def mult_characters_of_order(ctx: FreenessContext, d: int) -> list[MultCharacter]:
    """The phi(d) multiplicative characters of exact order d."""
    if d == 1:
        return [MultCharacter(ctx, 1, 0)]
    return [MultCharacter(ctx, d, j) for j in range(1, d) if math.gcd(j, d) == 1]


def add_characters_of_fq_order(ctx: FreenessContext, h: Poly) -> list[AddCharacter]:
    """The Phi(h) additive characters of GF(q)-order h."""
    _add_order_table(ctx)
    groups = _cache(ctx)["add_groups"]
    cs = groups.get(h.monic().coeffs, [])
    expected = ctx.factor_xn1_divisor(h.monic()).phi_q
    assert len(cs) == expected, "character count disagrees with the unit-group order"
    return [AddCharacter(ctx, c) for c in cs]


# ---------------------------------------------------------------------------
# Indicator sums
# ---------------------------------------------------------------------------


def _round_indicator(value: complex, what: str) -> int:
    nearest = round(value.real)
    if abs(value - nearest) > INDICATOR_TOLERANCE:
        raise ToleranceError(
            f"{what} = {value} strays {abs(value - nearest):.3g} from an integer"
        )
    return int(nearest)


def _phi_of_squarefree(primes_product_parts) -> int:
    out = 1
    for p in primes_product_parts:
        out *= p - 1
    return out


def rho(ctx: FreenessContext, alpha: int, s: Union[int, FactoredInteger]) -> complex:
    """Character-sum value of the e-free membership indicator at alpha."""
    if alpha == 0:
        raise ValueError("rho is defined on the multiplicative group only")
    sf = ctx.factor_divisor(s)
    m = ctx.tower.top.log(alpha)
    total = 0j
    for d, mu_d in sf.squarefree_divisors():
        roots = _roots_of_unity(ctx, d)
        char_sum = sum(roots[(j * m) % d] for j in range(d) if math.gcd(j, d) == 1)
        if d == 1:
            char_sum = 1.0
        phi_d = _phi_of_squarefree(p for p, _ in sf.divisor_part(d).factors)
        total += Fraction(mu_d, phi_d) * char_sum
    return float(sf.theta) * total


def rho_indicator(ctx: FreenessContext, alpha: int, s) -> int:
    return _round_indicator(rho(ctx, alpha, s), "rho")


def kappa(ctx: FreenessContext, beta: int, g: Poly) -> complex:
    """Character-sum value of the g-free membership indicator at beta."""
    gf = ctx.factor_xn1_divisor(g)
    q = ctx.tower.q
    top = ctx.tower.top
    p = ctx.tower.p
    roots_p = _roots_of_unity(ctx, p)
    _add_order_table(ctx)
    groups = _cache(ctx)["add_groups"]
    total = 0j
    for h, mu_h in gf.squarefree_divisors():
        cs = groups.get(h.coeffs, [])
        char_sum = sum(roots_p[top.abs_trace(top.mul(c, beta))] for c in cs)
        phi_h = 1
        for P, _ in ctx.factor_xn1_divisor(h).factors:
            phi_h *= q**P.degree - 1
        total += Fraction(mu_h, phi_h) * char_sum
    return float(Fraction(gf.phi_q, gf.n_value)) * total


def kappa_indicator(ctx: FreenessContext, beta: int, g: Poly) -> int:
    return _round_indicator(kappa(ctx, beta, g), "kappa")


# ---------------------------------------------------------------------------
# Hybrid sums
# ---------------------------------------------------------------------------


def _function_values(ctx: FreenessContext, f: RationalFn) -> list[tuple[int, int]]:
    """(alpha, f(alpha)) over alpha outside the exceptional set; both nonzero."""
    F = f.field
    out = []
    for a in range(1, F.order):
        nv = f.num.eval(a)
        dv = f.den.eval(a)
        if nv == 0 or dv == 0:
            continue
        out.append((a, F.mul(nv, F.inv(dv))))
    return out


def chi_tilde(
    ctx: FreenessContext,
    f: RationalFn,
    chi1: MultCharacter,
    chi2: MultCharacter,
    psi: AddCharacter,
) -> complex:
    """Sum over alpha outside S_f of chi1(alpha) chi2(f(alpha)) psi(alpha)."""
    ctx.tower.require_enumerable("hybrid character sum")
    return sum(
        chi1.eval(a) * chi2.eval(fa) * psi.eval(a)
        for a, fa in _function_values(ctx, f)
    )


def n_f_by_characters(
    ctx: FreenessContext,
    f: RationalFn,
    e1: Union[int, FactoredInteger],
    e2: Union[int, FactoredInteger],
    g: Poly,
) -> float:
    """The full character expansion of the freeness-constrained value count.

    Expands the product of the two multiplicative indicators (at alpha and at
    f(alpha)) and the additive indicator at alpha over all character triples;
    equals the direct count up to accumulated floating-point error.
    """
    ctx.tower.require_enumerable("character expansion")
    e1f, e2f = ctx.factor_divisor(e1), ctx.factor_divisor(e2)
    gf = ctx.factor_xn1_divisor(g)
    values = _function_values(ctx, f)
    triple_cache = [
        (ctx.tower.top.log(a), ctx.tower.top.log(fa), a) for a, fa in values
    ]
    top = ctx.tower.top
    p = ctx.tower.p
    roots_p = _roots_of_unity(ctx, p)
    _add_order_table(ctx)
    groups = _cache(ctx)["add_groups"]
    q = ctx.tower.q

    total = 0j
    for d1, mu1 in e1f.squarefree_divisors():
        r1 = _roots_of_unity(ctx, d1)
        phi1 = _phi_of_squarefree(p_ for p_, _ in e1f.divisor_part(d1).factors)
        for j1 in (range(1, d1) if d1 > 1 else (0,)):
            if d1 > 1 and math.gcd(j1, d1) != 1:
                continue
            for d2, mu2 in e2f.squarefree_divisors():
                r2 = _roots_of_unity(ctx, d2)
                phi2 = _phi_of_squarefree(p_ for p_, _ in e2f.divisor_part(d2).factors)
                for j2 in (range(1, d2) if d2 > 1 else (0,)):
                    if d2 > 1 and math.gcd(j2, d2) != 1:
                        continue
                    for h, muh in gf.squarefree_divisors():
                        phih = 1
                        for P, _ in ctx.factor_xn1_divisor(h).factors:
                            phih *= q**P.degree - 1
                        weight = (
                            Fraction(mu1, phi1)
                            * Fraction(mu2, phi2)
                            * Fraction(muh, phih)
                        )
                        if weight == 0:
                            continue
                        for c in groups.get(h.coeffs, []):
                            tilde = sum(
                                r1[(j1 * la) % d1]
                                * r2[(j2 * lfa) % d2]
                                * roots_p[top.abs_trace(top.mul(c, a))]
                                for la, lfa, a in triple_cache
                            )
                            total += float(weight) * tilde
    prefactor = (
        Fraction(e1f.phi, e1f.value)
        * Fraction(e2f.phi, e2f.value)
        * Fraction(gf.phi_q, gf.n_value)
    )
    result = float(prefactor) * total
    if abs(result.imag) > 1e-4:
        raise ToleranceError(f"count expansion has imaginary part {result.imag}")
    return result.real


# ---------------------------------------------------------------------------
# Empirical character-sum bound checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeilData:
    """Degree bookkeeping for the character-sum bounds.

    d1: total degree of the distinct irreducibles of v.
    d2: max(deg u, 0) as a rational function.
    d3: degree of the denominator of u.
    d4: degrees of denominator irreducibles of u not already counted in v.
    """

    d1: int
    d2: int
    d3: int
    d4: int

    @property
    def hybrid_coefficient(self) -> int:
        return self.d1 + self.d2 + self.d3 + self.d4 - 1


@dataclass(frozen=True)
class WeilCheck:
    lhs: float
    rhs: float
    holds: bool
    data: WeilData
    hypothesis_verified: bool


def _signed_factors(f: RationalFn) -> list[tuple[Poly, int]]:
    parts: list[tuple[Poly, int]] = []
    for poly, sign in ((f.num, 1), (f.den, -1)):
        if poly.degree >= 1:
            parts.extend((P, sign * m) for P, m in factor_poly(poly).factors)
    return parts


def weil_check(
    ctx: FreenessContext,
    v: RationalFn,
    chi: MultCharacter,
    u: Optional[RationalFn] = None,
    psi: Optional[AddCharacter] = None,
) -> WeilCheck:
    """Enumerate a character sum and compare it against its degree bound.

    Without u: |sum over v(a) != 0, inf of chi(v(a))| <= (D1 - 1) sqrt(Q),
    valid when v is not a perfect ord(chi)-th power in the closure; that
    hypothesis is checked structurally from the multiplicities of v.  With u
    (and a nontrivial psi): the hybrid bound with coefficient
    D1 + D2 + D3 + D4 - 1, valid when u is not an Artin-Schreier shift; this
    is verified structurally when u is a nonconstant polynomial of degree
    below the field order, and reported unverified otherwise.
    """
    ctx.tower.require_enumerable("character sum enumeration")
    F = ctx.tower.top
    vparts = _signed_factors(v)
    d1 = sum(P.degree for P, _ in vparts)
    hypothesis = chi.order > 1 and any(m % chi.order for _, m in vparts)
    if u is None:
        if psi is not None and not psi.is_trivial:
            raise ValueError("a nontrivial additive character needs a hybrid argument u")
        data = WeilData(d1, 0, 0, 0)
        total = 0j
        for a in range(F.order):
            nv = v.num.eval(a)
            dv = v.den.eval(a)
            if nv == 0 or dv == 0:
                continue
            total += chi.eval(F.mul(nv, F.inv(dv)))
        rhs = max(d1 - 1, 0) * math.sqrt(F.order)
        lhs = abs(total)
        return WeilCheck(lhs, rhs, lhs <= rhs + 1e-6, data, hypothesis)
    if psi is None or psi.is_trivial:
        raise ValueError("the hybrid bound needs a nontrivial additive character")
    d2 = max(u.num.degree - u.den.degree, 0)
    d3 = u.den.degree
    vset = {P.coeffs for P, _ in vparts}
    d4 = 0
    if u.den.degree >= 1:
        for P, _ in factor_poly(u.den).factors:
            if P.coeffs not in vset:
                d4 += P.degree
    u_hypothesis = u.den.degree == 0 and 1 <= u.num.degree < F.order
    data = WeilData(d1, d2, d3, d4)
    total = 0j
    for a in range(F.order):
        nv = v.num.eval(a)
        dv = v.den.eval(a)
        if nv == 0 or dv == 0:
            continue
        ud = u.den.eval(a)
        if ud == 0:
            continue
        uval = F.mul(u.num.eval(a), F.inv(ud))
        total += chi.eval(F.mul(nv, F.inv(dv))) * psi.eval(uval)
    rhs = data.hybrid_coefficient * math.sqrt(F.order)
    lhs = abs(total)
    return WeilCheck(lhs, rhs, lhs <= rhs + 1e-6, data, hypothesis and u_hypothesis)
