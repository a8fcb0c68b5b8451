"""Rational functions f1/f2 over a finite field and the admissibility filter.

A reduced rational function within degree caps (m1, m2) is *admissible* when
f1*f2 has a monic irreducible factor t != x whose exact multiplicity a is
coprime to Q - 1, Q being the order of the field the function is defined
over.  Scalar multiples of an admissible function are distinct functions and
all of them are kept; only the denominator is normalized monic, which fixes
one representative per function without collapsing scalar multiples.

Functions are defined over the top field of a tower by default; a subfield
mode (coefficients drawn from F_q, membership tested over F_q) is available
from the enumerator for the variant reading of the admissible set.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator, Optional

from .ffpoly import ExtField, FactoredPoly, Poly, SizeCapError, factor_poly
from .freeness import FreenessContext

__all__ = [
    "RationalFn",
    "make_ratfn",
    "evaluate",
    "exceptional_set",
    "is_admissible",
    "enumerate_admissible",
    "format_ratfn",
    "parse_ratfn",
]


@dataclass(frozen=True)
class RationalFn:
    """A reduced fraction of polynomials with degree caps; den is monic."""

    num: Poly
    den: Poly
    m1: int
    m2: int

    @property
    def field(self):
        return self.num.field

    def __str__(self):
        return format_ratfn(self)


def make_ratfn(num: Poly, den: Poly, m1: int, m2: int) -> RationalFn:
    if den.is_zero():
        raise ValueError("denominator must be nonzero")
    if num.field is not den.field:
        raise ValueError("numerator and denominator live over different fields")
    g = num.gcd(den)
    if not g.is_zero() and not g.is_one():
        num, den = num // g, den // g
    lc = den.lc()
    if lc != 1:
        inv = den.field.inv(lc)
        num, den = num.scale(inv), den.scale(inv)
    if num.degree > m1 or den.degree > m2:
        raise ValueError(
            f"degrees ({num.degree}, {den.degree}) exceed the caps ({m1}, {m2})"
        )
    return RationalFn(num, den, m1, m2)


def evaluate(f: RationalFn, alpha: int) -> Optional[int]:
    """f1(alpha)/f2(alpha), or None when the denominator vanishes."""
    F = f.field
    d = f.den.eval(alpha)
    if d == 0:
        return None
    return F.mul(f.num.eval(alpha), F.inv(d))


def exceptional_set(f: RationalFn) -> frozenset:
    """Zeros of f1 and of f2, together with 0 itself."""
    F = f.field
    bad = {0}
    for a in range(F.order):
        if f.num.eval(a) == 0 or f.den.eval(a) == 0:
            bad.add(a)
    return frozenset(bad)


def is_admissible(
    f: RationalFn, factored: Optional[FactoredPoly] = None
) -> tuple[bool, Optional[tuple[Poly, int]]]:
    """Admissibility over the field f is defined on, with the witness factor.

    Returns (flag, witness) where the witness is the first monic irreducible
    factor t != x of f1*f2, in (degree, coefficients) order, whose exact
    multiplicity a has gcd(a, Q-1) = 1.
    """
    if f.num.is_zero():
        return False, None
    if f.num.gcd(f.den) != Poly.one(f.field):
        return False, None
    group = f.field.order - 1
    if factored is None:
        parts: list[tuple[Poly, int]] = []
        for poly in (f.num, f.den):
            if poly.degree >= 1:
                parts.extend(factor_poly(poly).factors)
        parts.sort(key=lambda t: t[0].sort_key())
    else:
        parts = list(factored.factors)
    x = Poly.x(f.field)
    for t, a in parts:
        if t == x:
            continue
        if math.gcd(a, group) == 1:
            return True, (t, a)
    return False, None


def _monic_polys_upto(field, max_deg: int) -> Iterator[Poly]:
    for d in range(max_deg + 1):
        for low in range(field.order**d):
            lower = Poly.from_packed(field, low, d - 1).coeffs if d else ()
            coeffs = list(lower) + [0] * (d - len(lower)) + [1]
            yield Poly(field, coeffs)


def enumerate_admissible(
    ctx: FreenessContext,
    m1: int,
    m2: int,
    cap: int = 10**7,
    coeff_field: str = "top",
) -> Iterator[RationalFn]:
    """All admissible functions within the caps, in (packed f1, packed f2) order.

    Denominators run over monic polynomials only, so each rational function
    appears exactly once while scalar multiples (distinct functions) are all
    emitted.  coeff_field="base" restricts coefficients to F_q and tests
    admissibility over F_q.
    """
    field = ctx.tower.top if coeff_field == "top" else ctx.tower.base
    q = field.order
    n_f1 = q ** (m1 + 1) - 1
    n_f2 = sum(q**d for d in range(m2 + 1))
    if n_f1 * n_f2 > cap:
        raise SizeCapError(
            f"enumeration of {n_f1 * n_f2} candidate pairs exceeds the cap {cap}"
        )
    dens = list(_monic_polys_upto(field, m2))
    for packed in range(1, q ** (m1 + 1)):
        num = Poly.from_packed(field, packed, m1)
        for den in dens:
            if not num.gcd(den).is_one():
                continue
            f = RationalFn(num, den, m1, m2)
            ok, _ = is_admissible(f)
            if ok:
                yield f


# ---------------------------------------------------------------------------
# Text encoding: "f1/f2", each a little-endian list of coefficient encodings
# ---------------------------------------------------------------------------


def _coeff_to_obj(field, c: int):
    if isinstance(field, ExtField):
        coords = field.decode(c)
        padded = list(coords) + [0] * (field.degree - len(coords))
        return [_coeff_to_obj(field.base, x) for x in padded]
    return c


def format_ratfn(f: RationalFn) -> str:
    num = json.dumps([_coeff_to_obj(f.field, c) for c in f.num.coeffs])
    den = json.dumps([_coeff_to_obj(f.field, c) for c in f.den.coeffs])
    return f"{num}/{den}"


def _coeff_from_obj(field, obj) -> int:
    if isinstance(obj, list):
        if not isinstance(field, ExtField):
            raise ValueError("vector coefficient over a prime field")
        return field.encode([_coeff_from_obj(field.base, o) for o in obj])
    return int(obj)


def parse_ratfn(ctx: FreenessContext, text: str, m1: int, m2: int, coeff_field: str = "top") -> RationalFn:
    field = ctx.tower.top if coeff_field == "top" else ctx.tower.base
    if "/" in text:
        num_text, den_text = text.split("/", 1)
    else:
        num_text, den_text = text, "[1]"
    num = Poly(field, [_coeff_from_obj(field, o) for o in json.loads(num_text)])
    den = Poly(field, [_coeff_from_obj(field, o) for o in json.loads(den_text)])
    return make_ratfn(num, den, m1, m2)
