import math
import random

import pytest

from primnorm import ntheory as nt
from primnorm.ntheory import Certainty, IncompleteFactorizationError, PrimeClass


def smallest_factor_sieve(limit):
    spf = list(range(limit + 1))
    for i in range(2, math.isqrt(limit) + 1):
        if spf[i] == i:
            for j in range(i * i, limit + 1, i):
                if spf[j] == j:
                    spf[j] = i
    return spf


def reassemble(f):
    out = f.cofactor
    for p, e in f.factors:
        out *= p**e
    return out


def test_factor_examples():
    assert nt.factor_integer(1).factors == ()
    assert nt.factor_integer(63).factors == ((3, 2), (7, 1))
    f = nt.factor_integer(2047)
    assert f.factors == ((23, 1), (89, 1))
    assert f.phi == 1936
    assert f.phi == 22 * 88


def test_factor_zero_rejected():
    with pytest.raises(ValueError):
        nt.factor_integer(0)


def test_factor_against_sieve_oracle_sample():
    limit = 20_000
    spf = smallest_factor_sieve(limit)
    for n in range(1, limit + 1):
        f = nt.factor_integer(n)
        assert f.certainty is Certainty.PROVEN
        assert reassemble(f) == n
        if n > 1:
            assert f.factors[0][0] == spf[n]


@pytest.mark.slow
def test_factor_against_sieve_oracle_full_million():
    limit = 1_000_000
    spf = smallest_factor_sieve(limit)
    for n in range(2, limit + 1):
        f = nt.factor_integer(n)
        assert reassemble(f) == n
        assert f.factors[0][0] == spf[n]


def test_moebius_values():
    f1 = nt.factor_integer(1)
    assert (f1.w, f1.phi, f1.mu) == (1, 1, 1)
    assert nt.factor_integer(63).w == 4  # square-free divisors 1, 3, 7, 21
    assert [d for d, _ in nt.factor_integer(63).squarefree_divisors()] == [1, 3, 7, 21]
    assert nt.factor_integer(30).mu == -1
    assert nt.factor_integer(12).mu == 0


def test_phi_mu_multiplicative_on_coprime_pairs():
    rng = random.Random(7)
    for _ in range(200):
        a = rng.randrange(2, 5000)
        b = rng.randrange(2, 5000)
        if math.gcd(a, b) != 1:
            continue
        fa, fb, fab = (nt.factor_integer(x) for x in (a, b, a * b))
        assert fab.phi == fa.phi * fb.phi
        assert fab.mu == fa.mu * fb.mu
        assert fab.w == fa.w * fb.w


def test_divisors_enumeration():
    assert list(nt.factor_integer(60).divisors()) == [
        1, 2, 3, 4, 5, 6, 10, 12, 15, 20, 30, 60,
    ]
    assert list(nt.factor_integer(1).divisors()) == [1]


def test_divisor_part():
    f = nt.factor_integer(2**4 * 3**2 * 7)
    part = f.divisor_part(12)
    assert part.factors == ((2, 2), (3, 1))
    with pytest.raises(ValueError):
        f.divisor_part(5)


def test_cyclotomic_values():
    assert nt.cyclotomic_value(1, 2) == 1
    assert nt.cyclotomic_value(2, 2) == 3
    assert nt.cyclotomic_value(4, 2) == 5
    assert nt.cyclotomic_value(6, 2) == 3
    assert nt.cyclotomic_value(3, 7) == 57


def test_cyclotomic_split_examples():
    s = nt.cyclotomic_split(2, 4)
    assert s.value == 15 and s.factors == ((3, 1), (5, 1))
    s = nt.cyclotomic_split(2, 1)
    assert s.value == 1 and s.factors == ()


def test_cyclotomic_split_matches_direct():
    for q, n in [(2, 6), (2, 11), (3, 5), (5, 4), (9, 3), (23, 4)]:
        s = nt.cyclotomic_split(q, n)
        d = nt.factor_integer(q**n - 1, budget_ms=30_000)
        assert s.value == q**n - 1
        assert s.factors == d.factors


def test_cyclotomic_split_large_pair():
    # feeds the escalated certificate for the (23, 22) pair
    s = nt.cyclotomic_split(23, 22, budget_ms=30_000)
    assert s.value == 23**22 - 1
    assert s.certainty is not Certainty.INCOMPLETE
    assert reassemble(s) == s.value


def test_budget_exhaustion_is_explicit():
    # two 40-digit probable primes; rho cannot split this in a millisecond
    p = 1000000000000000000000000000000000000253
    q = 1000000000000000000000000000000000000751
    f = nt.factor_integer(p * q, budget_ms=1.0)
    assert f.certainty is Certainty.INCOMPLETE
    assert f.cofactor > 1
    assert reassemble(f) == p * q
    with pytest.raises(IncompleteFactorizationError) as err:
        _ = f.phi
    assert err.value.cofactor == f.cofactor


def test_w_bound_family():
    assert nt.a_t_bound(0.5).value == 1.0
    rng = random.Random(11)
    bounds = {t: nt.a_t_bound(t) for t in (4.5, 6.0, 8.0)}
    for _ in range(1000):
        m = rng.randrange(2, 10**12)
        f = nt.factor_integer(m, budget_ms=30_000)
        if f.certainty is Certainty.INCOMPLETE:
            continue
        for t, b in bounds.items():
            assert f.w <= b.w_cap(m) * (1 + 1e-12)


def test_a_t_excluded_prime():
    plain = nt.a_t_bound(5.0)
    excl = nt.a_t_bound(5.0, excluded_prime=2)
    # dropping the p=2 term divides out 2/2^(1/5)
    assert excl.value == pytest.approx(plain.value / (2.0 / 2.0 ** (1 / 5.0)), rel=1e-12)


def test_prime_class_caps():
    assert nt.prime_class_cap(6, PrimeClass.ONE_MOD_3) == nt.ClassCap(0, 0, 1)
    cap = nt.prime_class_cap(1.3988e19, PrimeClass.ONE_MOD_3)
    assert cap.r == 11
    assert cap.product < 3e17
    cap = nt.prime_class_cap(2.34e30, PrimeClass.ODD_GT_13)
    assert cap.r == 18
    assert cap.product < 7.92e29
    cap = nt.prime_class_cap(100, PrimeClass.ALL)
    assert cap.product == 2 * 3 * 5 and cap.r == 3


def test_prime_powers_in_range():
    got = [q for q, _, _ in nt.prime_powers_in(2, 32)]
    assert got == [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32]
    assert nt.is_prime_power(729) == (3, 6)
    assert nt.is_prime_power(1024) == (2, 10)
    assert nt.is_prime_power(100) is None
    assert nt.is_prime_power(1) is None


def test_cube_field_divisor_property_sample():
    # primes p != 3 dividing q^2+q+1 are 1 mod 3 and never divide q-1
    for q, _, _ in nt.prime_powers_in(2, 500):
        f = nt.factor_integer(q * q + q + 1)
        for p in f.primes:
            if p == 3:
                continue
            assert p % 3 == 1
            assert (q - 1) % p != 0
