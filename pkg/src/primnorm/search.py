"""Brute-force oracles on enumerable fields.

Direct counts of elements with prescribed freeness, verification of recorded
counterexample functions, and the exhaustive membership check that walks the
whole admissible function space of a tiny field.  These are the ground truth
the character-sum and sieve machinery is validated against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .ffpoly import Poly, SizeCapError, factor_poly, poly_action
from .freeness import FreenessContext
from .ntheory import FactoredInteger
from .ratfn import RationalFn, make_ratfn

__all__ = [
    "CountResult",
    "ExhaustiveReport",
    "count_nf_direct",
    "verify_counterexample",
    "exhaustive_b_check",
    "recorded_counterexample",
    "RECORDED_COUNTEREXAMPLES",
]

WITNESS_CAP = 16


@dataclass(frozen=True)
class CountResult:
    """Exact count of alpha that are e1-free with f(alpha) e2-free and alpha g-free."""

    n_f: int
    witnesses: tuple
    e1: int
    e2: int
    g: Poly
    f: RationalFn


def count_nf_direct(
    ctx: FreenessContext,
    f: RationalFn,
    e1: Union[int, FactoredInteger],
    e2: Union[int, FactoredInteger],
    g: Poly,
    witness_cap: int = WITNESS_CAP,
) -> CountResult:
    """Full-enumeration count; alpha inside the exceptional set never qualifies.

    A value f(alpha) = 0 cannot be e2-free (freeness lives in the
    multiplicative group), and such alpha are exactly the numerator zeros
    already excluded with the exceptional set.
    """
    ctx.tower.require_enumerable("direct count")
    top = ctx.tower.top
    group = ctx.order - 1
    e1p = ctx.factor_divisor(e1).primes
    e2p = ctx.factor_divisor(e2).primes
    quots = [ctx.quotient_by(P) for P, _ in ctx.factor_xn1_divisor(g).factors]
    tower = ctx.tower
    count = 0
    witnesses = []
    for a in range(1, ctx.order):
        la = top.log(a)
        if any(la % d == 0 for d in e1p):
            continue
        nv = f.num.eval(a)
        dv = f.den.eval(a)
        if nv == 0 or dv == 0:
            continue
        lfa = (top.log(nv) - top.log(dv)) % group if group else 0
        if any(lfa % d == 0 for d in e2p):
            continue
        if any(poly_action(tower, h, a) == 0 for h in quots):
            continue
        count += 1
        if len(witnesses) < witness_cap:
            witnesses.append(a)
    return CountResult(count, tuple(witnesses), ctx.factor_divisor(e1).value,
                       ctx.factor_divisor(e2).value, g, f)


def verify_counterexample(
    ctx: FreenessContext, f: RationalFn
) -> tuple[bool, tuple]:
    """True when no primitive normal alpha has f(alpha) defined, nonzero and primitive."""
    top = ctx.tower.top
    group = ctx.order - 1
    surviving = []
    for a in ctx.primitive_normal_indices():
        nv = f.num.eval(a)
        dv = f.den.eval(a)
        if nv == 0 or dv == 0:
            continue
        lfa = (top.log(nv) - top.log(dv)) % group
        if math.gcd(lfa, group) == 1:
            surviving.append(a)
    return (not surviving), tuple(surviving)


# -- recorded counterexample functions ---------------------------------------

# (q, n) -> builder returning the rational function over the tower's top field;
# each is verified by the test suite to kill every primitive normal element.
RECORDED_COUNTEREXAMPLES = {(2, 6), (3, 3), (3, 4)}


def recorded_counterexample(ctx: FreenessContext, m1: int = 3, m2: int = 2) -> RationalFn:
    """The recorded no-primitive-value function for this field, if any."""
    q, n = ctx.tower.q, ctx.tower.n
    top = ctx.tower.top
    if (q, n) == (2, 6):
        return make_ratfn(Poly(top, (1, 1, 1)), Poly.one(top), m1, m2)
    if (q, n) == (3, 3):
        return make_ratfn(Poly(top, (2, 1, 1)), Poly.one(top), m1, m2)
    if (q, n) == (3, 4):
        # a is a root of y^4 - y^3 - 1; numerator a*x + 2a^3 + 2a^2 + 1,
        # denominator x + 2a
        F = top
        roots = [
            a
            for a in range(F.order)
            if F.add(F.sub(F.pow(a, 4), F.pow(a, 3)), F.neg(1)) == 0
        ]
        if not roots:
            raise ValueError("the defining quartic has no root in this field model")
        a = roots[0]
        two = 2 % ctx.tower.p
        const = F.add(
            F.add(F.mul(two, F.pow(a, 3)), F.mul(two, F.pow(a, 2))), 1
        )
        num = Poly(F, (const, a))
        den = Poly(F, (F.mul(two, a), 1))
        return make_ratfn(num, den, m1, m2)
    raise KeyError(f"no recorded counterexample for (q, n) = ({q}, {n})")


# ---------------------------------------------------------------------------
# Exhaustive membership check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExhaustiveReport:
    """Outcome of walking every admissible function of a tiny field."""

    status: str  # "proved_in" | "proved_not_in" | "unresolved"
    functions_checked: int
    failing: Optional[RationalFn] = None
    witness_sample: tuple = ()


def _poly_profile(field, poly: Poly, points, group: int):
    """(factor keyset, has admissible factor, values at points) for one poly."""
    if poly.degree >= 1:
        factors = factor_poly(poly).factors
    else:
        factors = ()
    keys = frozenset(P.coeffs for P, _ in factors)
    x_coeffs = (0, 1)
    good = any(
        P.coeffs != x_coeffs and math.gcd(m, group) == 1 for P, m in factors
    )
    values = tuple(poly.eval(a) for a in points)
    return keys, good, values


def exhaustive_b_check(
    ctx: FreenessContext, m1: int, m2: int, cap: int = 10**7
) -> ExhaustiveReport:
    """Walk all admissible f and test each against the primitive normal set.

    Returns proved_not_in with the first failing f in enumeration order, or
    proved_in once every function has produced a primitive value at some
    primitive normal element.  Unresolved when the pair space exceeds `cap`.
    """
    field = ctx.tower.top
    q = field.order
    group = q - 1
    n_f1 = q ** (m1 + 1) - 1
    n_f2 = sum(q**d for d in range(m2 + 1))
    if n_f1 * n_f2 > cap:
        return ExhaustiveReport("unresolved", 0)
    pn = ctx.primitive_normal_indices()
    is_prim = [False] * q
    for a in range(1, q):
        is_prim[a] = math.gcd(field.log(a), group) == 1

    dens = []
    for d in range(m2 + 1):
        for low in range(q**d):
            lower = Poly.from_packed(field, low, d - 1).coeffs if d else ()
            coeffs = list(lower) + [0] * (d - len(lower)) + [1]
            dens.append(Poly(field, coeffs))
    den_profiles = [_poly_profile(field, f2, pn, group) for f2 in dens]

    checked = 0
    witness_sample = []
    inv_cache = [0] * q
    for v in range(1, q):
        inv_cache[v] = field.inv(v)
    for packed in range(1, q ** (m1 + 1)):
        f1 = Poly.from_packed(field, packed, m1)
        keys1, good1, vals1 = _poly_profile(field, f1, pn, group)
        for f2, (keys2, good2, vals2) in zip(dens, den_profiles):
            if keys1 & keys2:
                continue  # not in lowest terms; the reduced pair appears elsewhere
            if not (good1 or good2):
                continue  # fails the admissibility factor condition
            checked += 1
            ok = False
            for v1, v2 in zip(vals1, vals2):
                if v1 == 0 or v2 == 0:
                    continue
                if is_prim[field.mul(v1, inv_cache[v2])]:
                    ok = True
                    break
            if not ok:
                failing = RationalFn(f1, f2, m1, m2)
                return ExhaustiveReport("proved_not_in", checked, failing)
            if len(witness_sample) < WITNESS_CAP:
                witness_sample.append((str(RationalFn(f1, f2, m1, m2))))
    return ExhaustiveReport("proved_in", checked, None, tuple(witness_sample))
