"""Shared instance generators for the character-sum and counting tests."""

import math
import random

from primnorm.charsums import AddCharacter, MultCharacter
from primnorm.ffpoly import Poly, factor_poly
from primnorm.ratfn import RationalFn, make_ratfn


def random_irreducibles(ctx, rng, how_many, max_deg=2):
    """Distinct monic irreducibles over the top field, found by factoring noise."""
    F = ctx.tower.top
    found = {}
    guard = 0
    while len(found) < how_many and guard < 200:
        guard += 1
        deg = rng.randrange(1, max_deg + 1)
        coeffs = [rng.randrange(F.order) for _ in range(deg)] + [1]
        for P, _ in factor_poly(Poly(F, coeffs)).factors:
            found.setdefault(P.coeffs, P)
    return list(found.values())[:how_many]


def random_weil_instance(ctx, rng, hybrid):
    """(v, chi, u, psi) with the structural hypotheses satisfied.

    v is a product of distinct irreducibles with signed multiplicities, chi a
    nontrivial character whose order misses at least one multiplicity, and in
    hybrid mode u is a nonconstant polynomial with a nontrivial psi.
    """
    F = ctx.tower.top
    group = F.order - 1
    while True:
        polys = random_irreducibles(ctx, rng, rng.randrange(1, 4))
        if not polys:
            continue
        mults = [rng.choice([1, 1, 2, 3]) * rng.choice([1, -1]) for _ in polys]
        num = Poly.one(F)
        den = Poly.one(F)
        for P, m in zip(polys, mults):
            for _ in range(abs(m)):
                if m > 0:
                    num = num.mul(P)
                else:
                    den = den.mul(P)
        v = RationalFn(num, den, num.degree, den.degree)
        orders = [d for d in range(2, group + 1) if group % d == 0]
        rng.shuffle(orders)
        chi = None
        for d in orders:
            if any(m % d for m in mults):
                js = [j for j in range(1, d) if math.gcd(j, d) == 1]
                chi = MultCharacter(ctx, d, rng.choice(js))
                break
        if chi is None:
            continue
        if not hybrid:
            return v, chi, None, None
        u_deg = rng.randrange(1, 4)
        u_coeffs = [rng.randrange(F.order) for _ in range(u_deg)] + [
            rng.randrange(1, F.order)
        ]
        u = RationalFn(Poly(F, u_coeffs), Poly.one(F), u_deg, 0)
        psi = AddCharacter(ctx, rng.randrange(1, F.order))
        return v, chi, u, psi


def random_admissible(ctx, rng, m1=3, m2=2, max_tries=200):
    """A random admissible rational function within the caps."""
    from primnorm.ratfn import is_admissible

    F = ctx.tower.top
    for _ in range(max_tries):
        num = Poly(F, [rng.randrange(F.order) for _ in range(rng.randrange(1, m1 + 2))])
        den = Poly(F, [rng.randrange(F.order) for _ in range(rng.randrange(1, m2 + 2))])
        if num.is_zero() or den.is_zero():
            continue
        try:
            f = make_ratfn(num, den, m1, m2)
        except ValueError:
            continue
        if is_admissible(f)[0]:
            return f
    raise RuntimeError("could not draw an admissible function")
