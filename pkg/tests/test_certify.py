import math
import random
from fractions import Fraction

import pytest

from helpers import random_admissible

from primnorm import certify as ct
from primnorm import ntheory as nt
from primnorm.certify import PairStatus
from primnorm.ffpoly import Poly
from primnorm.freeness import context_for_q
from primnorm.ratfn import make_ratfn
from primnorm.search import count_nf_direct


def test_lower_bound_all_trivial():
    ctx = context_for_q(2, 6)
    one_int = ctx.factor_divisor(1)
    one_poly = ctx.factor_xn1_divisor(Poly.one(ctx.tower.base))
    bound, sufficient = ct.nf_lower_bound(2, 6, 3, 2, one_int, one_int, one_poly)
    assert bound == pytest.approx(64 - 6)
    assert sufficient  # 64 >= 36
    rng = random.Random(4)
    f = random_admissible(ctx, rng)
    count = count_nf_direct(ctx, f, 1, 1, Poly.one(ctx.tower.base)).n_f
    assert count >= bound
    assert count > 0


def test_lower_bound_dominated_by_direct_count():
    rng = random.Random(8)
    for q, n in [(2, 4), (3, 3)]:
        ctx = context_for_q(q, n)
        group = ctx.order - 1
        divisors = [d for d in range(1, group + 1) if group % d == 0]
        gs = list(ctx.factored_xn1.monic_divisors())
        for _ in range(8):
            f = random_admissible(ctx, rng)
            e1, e2 = rng.choice(divisors), rng.choice(divisors)
            g = rng.choice(gs)
            bound, sufficient = ct.nf_lower_bound(
                q, n, 3, 2,
                ctx.factor_divisor(e1), ctx.factor_divisor(e2),
                ctx.factor_xn1_divisor(g),
            )
            count = count_nf_direct(ctx, f, e1, e2, g).n_f
            assert count >= bound
            if sufficient:
                assert count > 0


def test_corollary_examples():
    assert not ct.corollary_condition(2, 30, 3, 2)
    assert ct.corollary_condition(2, 17, 3, 2)
    # the large-q regime where the direct condition already wins
    assert ct.corollary_condition(9239, 6, 3, 2)


def test_sieve_trivial_recipe_reduces_to_corollary():
    for q, n in [(2, 6), (5, 4), (9239, 6)]:
        rep = ct.sieve_condition(q, n, 3, 2, "full", "full")
        assert rep.r == 0 and rep.s == 0
        assert rep.delta == 1 and rep.big_delta == 1
        assert rep.holds == ct.corollary_condition(q, n, 3, 2)


def test_sieve_monotonicity_in_recipes():
    # larger ell never increases r; larger g never increases s
    for q, n in [(7, 3), (9239, 6), (23, 22)]:
        r_values = [
            ct.sieve_condition(q, n, 3, 2, spec, "one").r
            for spec in ("one", "gcd:210", "full")
        ]
        assert r_values == sorted(r_values, reverse=True)
        s_values = [
            ct.sieve_condition(q, n, 3, 2, "gcd:210", spec).s
            for spec in ("one", "linear", "full")
        ]
        assert s_values == sorted(s_values, reverse=True)


def test_sieve_report_invariants():
    rep = ct.sieve_condition(7, 3, 3, 2, "gcd:210", "one")
    q, n = 7, 3
    expected_delta = (
        Fraction(1)
        - 2 * sum(Fraction(1, p) for p in rep.excluded_primes)
        - Fraction(3, 7)  # three linear factors of x^3 - 1 excluded
    )
    assert rep.delta == expected_delta
    assert rep.big_delta == Fraction(2 * rep.r + rep.s - 1, 1) / rep.delta + 2
    if rep.holds:
        assert rep.delta > 0


def test_sieve_negative_delta_never_holds():
    rep = ct.sieve_condition(23, 22, 3, 2, "gcd:210", "one", budget_ms=30_000)
    assert rep.delta < 0
    assert rep.big_delta is None
    assert not rep.holds


def test_sieve_regime_constants():
    # the n=3 large-q regime: at most 11 odd primes 1 mod 3 can divide q^2+q+1
    cap3 = nt.prime_class_cap(1.3988e19, nt.PrimeClass.ONE_MOD_3)
    delta_lb = 1 - 2 * cap3.s - 3.0 / 10**4
    assert delta_lb > 0.153
    big_delta = 2 + (2 * cap3.r + 3 - 1) / delta_lb
    assert big_delta < 159
    # the n=4 regime with primes beyond 13
    cap4 = nt.prime_class_cap(2.34e30, nt.PrimeClass.ODD_GT_13)
    delta_lb4 = 1 - 2 * cap4.s - 4.0 / 10**3
    assert delta_lb4 > 0.099
    assert 2 + (2 * cap4.r + 4 - 1) / delta_lb4 < 396


def test_sieve_identity_trivial_configuration():
    ctx = context_for_q(2, 6)
    rng = random.Random(15)
    f = random_admissible(ctx, rng)
    ok, details = ct.sieve_identity_check(ctx, f, ctx.order - 1, ctx.xn1())
    assert ok
    assert details["lhs"] == details["rhs"]  # empty sums, factor -(-1)


def test_sieve_identity_examples():
    ctx = context_for_q(2, 6)
    F = ctx.tower.top
    f = make_ratfn(Poly(F, (1, 1, 1)), Poly.one(F), 3, 2)
    g = Poly(ctx.tower.base, (1, 1))  # x + 1
    ok, details = ct.sieve_identity_check(ctx, f, 3, g)
    assert ok
    ctx27 = context_for_q(3, 3)
    rng = random.Random(16)
    f = random_admissible(ctx27, rng)
    g = Poly(ctx27.tower.base, (2, 1))  # x - 1
    ok, _ = ct.sieve_identity_check(ctx27, f, 2, g)
    assert ok


def test_threshold_validity_errors():
    with pytest.raises(ValueError):
        ct.threshold_q(3, 3, 2, 4.0)
    with pytest.raises(ValueError):
        ct.threshold_n(2, 3, 2, 7.9, "lenstra_q2")
    with pytest.raises(ValueError):
        ct.threshold_n(5, 3, 2, 4.5)  # denominator not positive at q=5, t=4.5


def test_threshold_decreasing_in_t():
    for n in (3, 5, 9):
        values = [ct.threshold_q(n, 3, 2, t) for t in (5.0, 6.0, 7.0, 9.0, 12.0)]
        assert values == sorted(values, reverse=True)


def test_threshold_n_regimes():
    # the q=2 refinement reproduces the published cutoff at t = 9.8
    v = ct.threshold_n(2, 3, 2, 9.8, "lenstra_q2", exclude_prime=2)
    assert math.floor(v) + 1 == 1237
    # generic regime is finite and sane for moderate q
    v = ct.threshold_n(23, 3, 2, 9.0)
    assert 0 < v < 200


def test_classify_examples():
    r = ct.classify_pair(2, 5, 3, 2)
    assert r.status is PairStatus.PROVED_IN and r.rule == "abundance"
    r = ct.classify_pair(7, 3, 3, 2)
    assert r.status is PairStatus.UNRESOLVED
    r = ct.classify_pair(9239, 6, 3, 2)
    assert r.status is PairStatus.PROVED_IN and r.rule == "corollary"
    r = ct.classify_pair(2, 3, 3, 2)
    assert r.status is PairStatus.PROVED_NOT_IN and r.rule == "scarcity"


def test_classify_deterministic_and_replayable():
    a = ct.classify_pair(23, 22, 3, 2, budget_ms=30_000)
    b = ct.classify_pair(23, 22, 3, 2, budget_ms=30_000)
    assert a.status is PairStatus.PROVED_IN and a.rule == "sieve"
    assert a.certificate == b.certificate
    replay = ct.replay_certificate(23, 22, 3, 2, a.certificate, budget_ms=30_000)
    assert replay.status is a.status
    assert replay.certificate == a.certificate


def test_replay_other_rules():
    for q, n in [(2, 3), (2, 5)]:
        r = ct.classify_pair(q, n, 3, 2)
        replay = ct.replay_certificate(q, n, 3, 2, r.certificate)
        assert replay.status is r.status


def test_scan_range_small_slice():
    rows = ct.scan_range([6], 9239, 9400, 3, 2, workers=1)
    assert rows
    qs = [row["q"] for row in rows]
    assert qs == sorted(qs)
    assert {row["status"] for row in rows} == {"proved_in"}
    # 97^2 = 9409 just misses the window; check contents are prime powers
    assert all(nt.is_prime_power(q) for q in qs)


def test_scan_rows_independent_of_worker_count():
    rows1 = ct.scan_range([6], 9239, 9280, 3, 2, workers=1)
    rows2 = ct.scan_range([6], 9239, 9280, 3, 2, workers=2)
    strip = lambda rows: [{k: v for k, v in r.items() if k != "millis"} for r in rows]
    assert strip(rows1) == strip(rows2)
