import math
import random

import pytest

from primnorm.ffpoly import Poly, SizeCapError, factor_poly
from primnorm.freeness import build_context
from primnorm.ratfn import (
    RationalFn,
    enumerate_admissible,
    evaluate,
    exceptional_set,
    format_ratfn,
    is_admissible,
    make_ratfn,
    parse_ratfn,
)


@pytest.fixture(scope="module")
def ctx64():
    return build_context(2, 1, 6)


@pytest.fixture(scope="module")
def ctx4():
    return build_context(2, 2, 1)


def test_make_reduces_and_normalizes():
    ctx = build_context(3, 1, 2)
    F = ctx.tower.top
    x_plus_1 = Poly(F, (1, 1))
    num = x_plus_1.mul(Poly(F, (2, 1)))
    den = x_plus_1.scale(2)
    f = make_ratfn(num, den, 3, 2)
    assert f.den.is_monic()
    # the common factor is gone: denominator reduced to a constant
    assert f.den.degree == 0
    g = f.num.gcd(f.den)
    assert g.is_one()


def test_degree_caps_enforced():
    ctx = build_context(2, 1, 3)
    F = ctx.tower.top
    with pytest.raises(ValueError):
        make_ratfn(Poly(F, (1, 0, 0, 0, 1)), Poly.one(F), 3, 2)
    with pytest.raises(ValueError):
        make_ratfn(Poly.one(F), Poly.zero(F), 3, 2)


def test_admissible_examples(ctx64, ctx4):
    F = ctx64.tower.top
    # x^2 + x + 1 factors over GF(64) into two linear factors of multiplicity 1
    f = make_ratfn(Poly(F, (1, 1, 1)), Poly.one(F), 3, 2)
    ok, witness = is_admissible(f)
    assert ok
    t, a = witness
    assert t.degree == 1 and a == 1 and math.gcd(a, 63) == 1
    # x^2 alone is rejected: its only irreducible factor is x
    f = make_ratfn(Poly(F, (0, 0, 1)), Poly.one(F), 3, 2)
    ok, witness = is_admissible(f)
    assert not ok and witness is None
    # (x+1)^2 over GF(4): multiplicity 2 is coprime to 3
    F4 = ctx4.tower.top
    f = make_ratfn(Poly(F4, (1, 1)).mul(Poly(F4, (1, 1))), Poly.one(F4), 3, 2)
    ok, witness = is_admissible(f)
    assert ok and witness[1] == 2


def test_admissible_swap_invariance(ctx64):
    # condition (iii) reads the product f1*f2, so swapping keeps the verdict
    F = ctx64.tower.top
    rng = random.Random(9)
    for _ in range(40):
        num = Poly(F, [rng.randrange(64) for _ in range(rng.randrange(1, 4))])
        den = Poly(F, [rng.randrange(64) for _ in range(rng.randrange(1, 3))])
        if num.is_zero() or den.is_zero():
            continue
        try:
            f = make_ratfn(num, den, 3, 2)
            g = make_ratfn(den, num, 3, 2)
        except ValueError:
            continue
        assert is_admissible(f)[0] == is_admissible(g)[0]


def test_witness_multiplicity_reproducible(ctx64):
    F = ctx64.tower.top
    rng = random.Random(31)
    for _ in range(40):
        num = Poly(F, [rng.randrange(64) for _ in range(rng.randrange(1, 5))])
        if num.is_zero():
            continue
        f = make_ratfn(num, Poly.one(F), 3, 2)
        ok, witness = is_admissible(f)
        if not ok:
            continue
        t, a = witness
        refactored = dict()
        for P, m in factor_poly(f.num.mul(f.den)).factors:
            refactored[P.coeffs] = m
        assert refactored[t.coeffs] == a


def test_evaluate_and_exceptional_set(ctx4):
    F4 = ctx4.tower.top
    ident = make_ratfn(Poly.x(F4), Poly.one(F4), 3, 2)
    for a in range(4):
        assert evaluate(ident, a) == a
    f = make_ratfn(Poly(F4, (1, 1, 1)), Poly.one(F4), 3, 2)
    assert exceptional_set(f) == frozenset({0, 2, 3})
    inv = make_ratfn(Poly.one(F4), Poly.x(F4), 3, 2)
    assert evaluate(inv, 0) is None


def test_evaluate_matches_direct_formula():
    ctx = build_context(3, 1, 2)
    F = ctx.tower.top
    rng = random.Random(41)
    for _ in range(100):
        num = Poly(F, [rng.randrange(9) for _ in range(rng.randrange(1, 4))])
        den = Poly(F, [rng.randrange(9) for _ in range(rng.randrange(1, 3))])
        if den.is_zero():
            continue
        f = make_ratfn(num, den, 3, 2)
        for a in range(9):
            dv = f.den.eval(a)
            expect = None if dv == 0 else F.mul(f.num.eval(a), F.inv(dv))
            assert evaluate(f, a) == expect


def test_enumerate_admissible_f4(ctx4):
    fs = list(enumerate_admissible(ctx4, 1, 0))
    # over GF(4): a(x + c) with a != 0, c != 0 qualifies; x and constants do not
    assert len(fs) == 9
    packed = {(f.num.coeffs, f.den.coeffs) for f in fs}
    assert ((0, 1), (1,)) not in packed  # f = x excluded
    for c in (1, 2, 3):
        assert ((c, 1), (1,)) in packed
    for f in fs:
        assert is_admissible(f)[0]


def test_enumerate_admissible_matches_bruteforce_pair_loop(ctx4):
    # independent double loop over coefficient tuples
    F = ctx4.tower.top
    count = 0
    for a1 in range(4):
        for a0 in range(4):
            num = Poly(F, (a0, a1))
            if num.is_zero():
                continue
            den = Poly.one(F)
            if not num.gcd(den).is_one():
                continue
            ok = False
            for P, m in factor_poly(num).factors if num.degree >= 1 else ():
                if P.coeffs != (0, 1) and math.gcd(m, 3) == 1:
                    ok = True
            if ok:
                count += 1
    assert count == len(list(enumerate_admissible(ctx4, 1, 0)))


def test_enumerate_cap(ctx64):
    with pytest.raises(SizeCapError):
        list(enumerate_admissible(ctx64, 3, 2, cap=10))


def test_enumerate_base_mode():
    ctx = build_context(2, 1, 3)
    fs = list(enumerate_admissible(ctx, 1, 0, coeff_field="base"))
    # over GF(2): only f = x + 1 (times the unit 1) has a non-x factor
    assert [(f.num.coeffs, f.den.coeffs) for f in fs] == [((1, 1), (1,))]


def test_text_roundtrip():
    ctx = build_context(2, 1, 6)
    F = ctx.tower.top
    f = make_ratfn(Poly(F, (1, 1, 1)), Poly(F, (5, 1)), 3, 2)
    text = format_ratfn(f)
    g = parse_ratfn(ctx, text, 3, 2)
    assert g.num == f.num and g.den == f.den
    # integer index shorthand is accepted on input
    h = parse_ratfn(ctx, "[1,1,1]/[5,1]", 3, 2)
    assert h.num == f.num and h.den == f.den
    # nested coordinates for a two-level tower
    ctx2 = build_context(2, 2, 2)
    F2 = ctx2.tower.top
    f2 = make_ratfn(Poly(F2, (7, 2, 1)), Poly.one(F2), 3, 2)
    g2 = parse_ratfn(ctx2, format_ratfn(f2), 3, 2)
    assert g2.num == f2.num
