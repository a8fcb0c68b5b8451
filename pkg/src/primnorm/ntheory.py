"""Exact integer number theory.

Everything downstream (field towers, sieve certificates, range scans) leans on
the factorizations produced here, so results always carry an explicit
certainty level instead of silently degrading:

    PROVEN               every prime part passed a deterministic test
    PROBABLE_PRIME_PARTS some part relies on a strong probable-prime test
    INCOMPLETE           a composite cofactor survived the time budget

Factorization is staged: trial division over a cached sieve, deterministic
Miller-Rabin (exact below ~3.3e24), then Brent's cycle method with a fixed
seed sequence so repeated runs are bit-identical.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, Optional

import gmpy2
from mpmath import mp

__all__ = [
    "Certainty",
    "FactoredInteger",
    "BoundFamily",
    "ClassCap",
    "PrimeClass",
    "IncompleteFactorizationError",
    "factor_integer",
    "cyclotomic_value",
    "cyclotomic_split",
    "a_t_bound",
    "prime_class_cap",
    "primes_upto",
    "is_prime",
    "is_prime_power",
    "prime_powers_in",
]


class IncompleteFactorizationError(ArithmeticError):
    """An exact quantity was requested from a factorization with a leftover cofactor."""

    def __init__(self, message: str, cofactor: int):
        super().__init__(message)
        self.cofactor = cofactor


# ---------------------------------------------------------------------------
# Prime generation and primality
# ---------------------------------------------------------------------------

_primes: list[int] = []
_sieve_limit = 0


def primes_upto(limit: int) -> list[int]:
    """All primes <= limit, from a cached, growable sieve."""
    global _primes, _sieve_limit
    if limit > _sieve_limit:
        new_limit = max(limit, 2 * _sieve_limit, 1 << 12)
        sieve = bytearray([1]) * (new_limit + 1)
        sieve[0:2] = b"\x00\x00"
        for i in range(2, math.isqrt(new_limit) + 1):
            if sieve[i]:
                sieve[i * i :: i] = b"\x00" * len(sieve[i * i :: i])
        _primes = [i for i in range(2, new_limit + 1) if sieve[i]]
        _sieve_limit = new_limit
    # bisect would do; primes are dense enough that a slice scan is fine
    import bisect

    return _primes[: bisect.bisect_right(_primes, limit)]


# Deterministic Miller-Rabin witness set, exact for n < 3.317e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_PROVEN_LIMIT = 3_317_044_064_679_887_385_961_981


def _miller_rabin(n: int, bases) -> bool:
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in bases:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime(n: int) -> tuple[bool, bool]:
    """(is prime, proven). Deterministic below _MR_PROVEN_LIMIT, BPSW-style above."""
    if n < 2:
        return False, True
    if n < 4:
        return True, True
    if n % 2 == 0:
        return False, True
    if n < _MR_PROVEN_LIMIT:
        return _miller_rabin(n, _MR_BASES), True
    # gmpy2: base-2 Miller-Rabin plus Lucas, then extra Miller-Rabin rounds
    return bool(gmpy2.is_prime(gmpy2.mpz(n), 64)), False


# ---------------------------------------------------------------------------
# Factorization
# ---------------------------------------------------------------------------

_TRIAL_LIMIT = 4096
_TRIAL_LIMIT_FALLBACK = 1_000_000


def _brent_rho(n: int, c: int, deadline: float) -> Optional[int]:
    """One Brent cycle attempt with increment c; deterministic. None on failure."""
    m = gmpy2.mpz(n)
    cc = gmpy2.mpz(c)
    y = gmpy2.mpz(2)
    r = 1
    q = gmpy2.mpz(1)
    g = gmpy2.mpz(1)
    x = ys = y
    batch = 128
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + cc) % m
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(batch, r - k)):
                y = (y * y + cc) % m
                q = q * abs(x - y) % m
            g = gmpy2.gcd(q, m)
            k += batch
        r <<= 1
        if time.monotonic() > deadline:
            return None
    if g == m:
        # redo the last batch one step at a time
        g = gmpy2.mpz(1)
        while g == 1:
            ys = (ys * ys + cc) % m
            g = gmpy2.gcd(abs(x - ys), m)
    if 1 < g < m:
        return int(g)
    return None


def _as_perfect_power(n: int) -> Optional[tuple[int, int]]:
    """(root, k) with root**k == n and k >= 2, or None."""
    if n < 4:
        return None
    for k in range(2, n.bit_length() + 1):
        root, exact = gmpy2.iroot(gmpy2.mpz(n), k)
        if exact:
            return int(root), k
        if root < 2:
            break
    return None


@dataclass
class _FactorState:
    found: dict
    proven: bool = True
    leftover: int = 1


def _factor_into(n: int, state: _FactorState, deadline: float) -> None:
    if n == 1:
        return
    prime, proven = is_prime(n)
    if prime:
        state.found[n] = state.found.get(n, 0) + 1
        state.proven = state.proven and proven
        return
    power = _as_perfect_power(n)
    if power is not None:
        root, k = power
        for _ in range(k):
            _factor_into(root, state, deadline)
        return
    factor = None
    for c in range(1, 64):
        if time.monotonic() > deadline:
            break
        factor = _brent_rho(n, c, deadline)
        if factor is not None:
            break
    if factor is None:
        # last resort within the spirit of the trial-division stage
        for p in primes_upto(min(_TRIAL_LIMIT_FALLBACK, math.isqrt(n) + 1)):
            if time.monotonic() > deadline:
                break
            if n % p == 0:
                factor = p
                break
    if factor is None:
        state.leftover *= n
        return
    _factor_into(factor, state, deadline)
    _factor_into(n // factor, state, deadline)


class Certainty(Enum):
    PROVEN = "proven"
    PROBABLE_PRIME_PARTS = "probable_prime_parts"
    INCOMPLETE = "incomplete"


@dataclass(frozen=True)
class FactoredInteger:
    """A positive integer together with its (possibly partial) prime factorization.

    ``factors`` is sorted by prime; when ``certainty`` is INCOMPLETE the
    unfactored part is kept in ``cofactor`` and every exact query raises.
    """

    value: int
    factors: tuple[tuple[int, int], ...]
    certainty: Certainty = Certainty.PROVEN
    cofactor: int = 1

    def __post_init__(self):
        if self.value < 1:
            raise ValueError("value must be a positive integer")
        prev = 1
        prod = self.cofactor
        for p, e in self.factors:
            if p <= prev or e < 1:
                raise ValueError("factors must be sorted by prime with exponents >= 1")
            prev = p
            prod *= p**e
        if prod != self.value:
            raise ValueError("factors do not reassemble to value")
        if (self.cofactor != 1) != (self.certainty is Certainty.INCOMPLETE):
            raise ValueError("cofactor and certainty flag disagree")

    # -- exact multiplicative functions -------------------------------------

    def _require_complete(self, what: str) -> None:
        if self.certainty is Certainty.INCOMPLETE:
            raise IncompleteFactorizationError(
                f"{what} needs a complete factorization of {self.value};"
                f" cofactor {self.cofactor} is unfactored",
                self.cofactor,
            )

    @property
    def primes(self) -> tuple[int, ...]:
        self._require_complete("prime list")
        return tuple(p for p, _ in self.factors)

    @property
    def phi(self) -> int:
        self._require_complete("euler phi")
        result = 1
        for p, e in self.factors:
            result *= (p - 1) * p ** (e - 1)
        return result

    @property
    def mu(self) -> int:
        self._require_complete("moebius")
        if any(e > 1 for _, e in self.factors):
            return 0
        return -1 if len(self.factors) % 2 else 1

    @property
    def omega(self) -> int:
        self._require_complete("omega")
        return len(self.factors)

    @property
    def w(self) -> int:
        """Number of square-free divisors, 2**omega."""
        return 1 << self.omega

    @property
    def radical(self) -> int:
        self._require_complete("radical")
        result = 1
        for p, _ in self.factors:
            result *= p
        return result

    @property
    def theta(self) -> Fraction:
        """phi(value)/value, exactly."""
        self._require_complete("theta")
        result = Fraction(1)
        for p, _ in self.factors:
            result *= Fraction(p - 1, p)
        return result

    def divisors(self) -> Iterator[int]:
        """All positive divisors, ascending."""
        self._require_complete("divisor enumeration")
        divs = [1]
        for p, e in self.factors:
            divs = [d * p**j for d in divs for j in range(e + 1)]
        yield from sorted(divs)

    def squarefree_divisors(self) -> Iterator[tuple[int, int]]:
        """(d, mu(d)) over square-free divisors, ascending d."""
        self._require_complete("square-free divisors")
        divs = [(1, 1)]
        for p, _ in self.factors:
            divs += [(d * p, -s) for d, s in divs]
        yield from sorted(divs)

    def divisor_part(self, m: int) -> "FactoredInteger":
        """Factored form of a divisor m of value, reusing the known primes."""
        self._require_complete("divisor factorization")
        if m < 1 or self.value % m != 0:
            raise ValueError(f"{m} does not divide {self.value}")
        fs = []
        rest = m
        for p, _ in self.factors:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            if e:
                fs.append((p, e))
        assert rest == 1
        return FactoredInteger(m, tuple(fs), self.certainty)


def factor_integer(n: int, budget_ms: float = 10_000.0) -> FactoredInteger:
    """Factor a positive integer within a time budget.

    Stages: trial division, deterministic Miller-Rabin, Brent rho with seeds
    c = 1, 2, 3, ...  A budget overrun yields certainty INCOMPLETE with the
    surviving cofactor recorded; the result is never wrong, only partial.
    """
    if n < 1:
        raise ValueError("factor_integer requires n >= 1")
    if budget_ms <= 0:
        raise ValueError("budget must be positive")
    deadline = time.monotonic() + budget_ms / 1000.0
    found: dict[int, int] = {}
    rest = n
    for p in primes_upto(_TRIAL_LIMIT):
        if p * p > rest:
            break
        while rest % p == 0:
            rest //= p
            found[p] = found.get(p, 0) + 1
    state = _FactorState(found)
    if rest > 1:
        _factor_into(rest, state, deadline)
    certainty = Certainty.PROVEN if state.proven else Certainty.PROBABLE_PRIME_PARTS
    if state.leftover != 1:
        certainty = Certainty.INCOMPLETE
    return FactoredInteger(
        n, tuple(sorted(state.found.items())), certainty, state.leftover
    )


# ---------------------------------------------------------------------------
# Cyclotomic pre-splitting of q^n - 1
# ---------------------------------------------------------------------------


def _small_divisors(n: int) -> list[int]:
    divs = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    divs += [n // d for d in reversed(divs) if d * d != n]
    return divs


def _small_moebius(n: int) -> int:
    result = 1
    for p in primes_upto(math.isqrt(n) + 1):
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
    if n > 1:
        result = -result
    return result


def cyclotomic_value(d: int, q: int) -> int:
    """The d-th cyclotomic polynomial evaluated at q, exactly."""
    if d < 1 or q < 2:
        raise ValueError("need d >= 1 and q >= 2")
    num = den = 1
    for e in _small_divisors(d):
        m = _small_moebius(d // e)
        if m == 1:
            num *= q**e - 1
        elif m == -1:
            den *= q**e - 1
    assert num % den == 0
    return num // den


def cyclotomic_split(q: int, n: int, budget_ms: float = 10_000.0) -> FactoredInteger:
    """Factor q^n - 1 piecewise through its cyclotomic values.

    q^n - 1 is the product of the d-th cyclotomic values at q over d | n, so
    each piece is factored on its own budget and the results are merged.
    """
    if q < 2 or n < 1:
        raise ValueError("need q >= 2 and n >= 1")
    found: dict[int, int] = {}
    certainty = Certainty.PROVEN
    cofactor = 1
    for d in _small_divisors(n):
        piece = factor_integer(cyclotomic_value(d, q), budget_ms)
        for p, e in piece.factors:
            found[p] = found.get(p, 0) + e
        cofactor *= piece.cofactor
        if piece.certainty is Certainty.INCOMPLETE:
            certainty = Certainty.INCOMPLETE
        elif (
            piece.certainty is Certainty.PROBABLE_PRIME_PARTS
            and certainty is not Certainty.INCOMPLETE
        ):
            certainty = Certainty.PROBABLE_PRIME_PARTS
    result = FactoredInteger(
        q**n - 1, tuple(sorted(found.items())), certainty, cofactor
    )
    return result


# ---------------------------------------------------------------------------
# Square-free divisor count bounds
# ---------------------------------------------------------------------------

_A_T_MAX = 22.0  # 2^22 primes is already ~300k; larger t is never needed here


@dataclass(frozen=True)
class BoundFamily:
    """Constant A_t (or its variant excluding one prime) with W(M) <= value * M^(1/t).

    value is the product of 2/p^(1/t) over primes p < 2^t, accumulated in log
    space at extended precision; relative error in the stored double is far
    below 1e-12.
    """

    t: float
    excluded_prime: Optional[int]
    value: float

    def w_cap(self, m: int) -> float:
        """The bound value * m^(1/t) on the number of square-free divisors."""
        return self.value * m ** (1.0 / self.t)


def a_t_bound(t: float, excluded_prime: Optional[int] = None) -> BoundFamily:
    if t <= 0:
        raise ValueError("t must be positive")
    if t > _A_T_MAX:
        raise ValueError(f"t beyond supported range (max {_A_T_MAX})")
    limit = 2.0**t
    with mp.workdps(40):
        total = mp.mpf(0)
        ln2 = mp.log(2)
        tt = mp.mpf(t)
        for p in primes_upto(int(limit) + 1):
            if p >= limit or p == excluded_prime:
                continue
            total += ln2 - mp.log(p) / tt
        value = float(mp.e**total)
    return BoundFamily(float(t), excluded_prime, value)


class PrimeClass(Enum):
    ALL = "all"
    ODD_GT_13 = "odd_gt_13"
    ONE_MOD_3 = "one_mod_3"


def _in_class(p: int, klass: PrimeClass) -> bool:
    if klass is PrimeClass.ALL:
        return True
    if klass is PrimeClass.ODD_GT_13:
        return p > 13
    return p % 3 == 1


@dataclass(frozen=True)
class ClassCap:
    """Largest r with the product of the first r class primes below a bound."""

    r: int
    inverse_sum: Fraction
    product: int

    @property
    def s(self) -> float:
        return float(self.inverse_sum)


def prime_class_cap(bound, klass: PrimeClass = PrimeClass.ALL) -> ClassCap:
    """How many of the smallest primes in a residue class fit under `bound` multiplicatively."""
    if bound < 2:
        return ClassCap(0, Fraction(0), 1)
    r = 0
    inv = Fraction(0)
    prod = 1
    limit = 1 << 8
    while True:
        for p in primes_upto(limit):
            if not _in_class(p, klass):
                continue
            if prod * p > bound:
                return ClassCap(r, inv, prod)
            prod *= p
            inv += Fraction(1, p)
            r += 1
        limit <<= 1


# ---------------------------------------------------------------------------
# Prime powers
# ---------------------------------------------------------------------------


def is_prime_power(m: int) -> Optional[tuple[int, int]]:
    """(p, k) with m == p**k, or None."""
    if m < 2:
        return None
    prime, _ = is_prime(m)
    if prime:
        return m, 1
    power = _as_perfect_power(m)
    if power is None:
        return None
    root, k = power
    base = is_prime_power(root)
    if base is None:
        return None
    return base[0], base[1] * k


def prime_powers_in(lo: int, hi: int) -> Iterator[tuple[int, int, int]]:
    """(q, p, k) for prime powers q with lo <= q <= hi, ascending."""
    if hi < 2:
        return
    lo = max(lo, 2)
    out = []
    for p in primes_upto(hi):
        if p >= lo:
            out.append((p, p, 1))
    for p in primes_upto(math.isqrt(hi)):
        q = p * p
        k = 2
        while q <= hi:
            if q >= lo:
                out.append((q, p, k))
            q *= p
            k += 1
    yield from sorted(out)
