"""Exact arithmetic for the tower F_p < F_q = F_p^k < F_q^n.

Field elements are plain integer indices: an element is the radix-packed
value of its little-endian coordinate vector, so the constant c of the
coefficient field has index c at every level.  Extension fields precompute
exp/log/Zech tables once, after which multiplication, inversion, powering and
addition are table lookups.  Everything is immutable after construction and
safe to share across workers.

Polynomials are dense, trailing-zero-free coefficient tuples over a field
object; `factor_poly` performs square-free decomposition, distinct-degree
splitting and a deterministic equal-degree stage so factorizations are
reproducible run to run.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence, Union

from . import ntheory
from .ntheory import FactoredInteger

__all__ = [
    "SizeCapError",
    "PrimeField",
    "ExtField",
    "Poly",
    "FactoredPoly",
    "FieldTower",
    "FieldElement",
    "Xn1Structure",
    "build_tower",
    "poly_action",
    "frobenius_q",
    "factor_poly",
    "is_irreducible",
    "smallest_irreducible",
    "factor_xn_minus_1",
    "xn1_structure",
    "DEFAULT_ENUM_CAP",
]

DEFAULT_ENUM_CAP = 1 << 20


class SizeCapError(RuntimeError):
    """An enumeration-based operation was asked to run beyond the configured cap."""


# ---------------------------------------------------------------------------
# Fields
# ---------------------------------------------------------------------------


class PrimeField:
    """F_p with integer elements 0..p-1."""

    __slots__ = ("p", "order", "char", "degree")

    def __init__(self, p: int):
        prime, proven = ntheory.is_prime(p)
        if not (prime and proven):
            raise ValueError(f"{p} is not a proven prime")
        self.p = p
        self.order = p
        self.char = p
        self.degree = 1  # over the prime field

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inversion of zero")
        return pow(a, self.p - 2, self.p)

    def pow(self, a, e):
        if a == 0:
            return 1 if e == 0 else 0
        return pow(a, e % (self.p - 1), self.p)

    def pth_root(self, a):
        return a

    def abs_trace(self, a) -> int:
        return a

    def elements(self):
        return range(self.order)

    def __repr__(self):
        return f"GF({self.p})"


def _tuple_trim(coeffs) -> tuple:
    i = len(coeffs)
    while i > 0 and coeffs[i - 1] == 0:
        i -= 1
    return tuple(coeffs[:i])


def _raw_mulmod(base, a: tuple, b: tuple, modulus: tuple) -> tuple:
    """Coefficient-tuple product of a*b reduced mod a monic modulus, over `base`."""
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if bj:
                out[i + j] = base.add(out[i + j], base.mul(ai, bj))
    d = len(modulus) - 1
    for i in range(len(out) - 1, d - 1, -1):
        c = out[i]
        if c == 0:
            continue
        out[i] = 0
        for j in range(d):
            out[i - d + j] = base.sub(out[i - d + j], base.mul(c, modulus[j]))
    return _tuple_trim(out[:d])


class ExtField:
    """F_{Q} realised as base[x]/(modulus), with exp/log/Zech tables.

    The modulus must be monic irreducible over `base`.  Indices pack the
    little-endian coordinate vector in radix base.order, so base elements
    embed as their own index.
    """

    __slots__ = (
        "base",
        "modulus",
        "degree",
        "order",
        "char",
        "generator",
        "factored_order",
        "_exp",
        "_log",
        "_zech",
        "_neg_shift",
        "_frob",
        "_abs_trace",
        "_trace_to_base",
    )

    def __init__(
        self,
        base: Union[PrimeField, "ExtField"],
        modulus: Sequence[int],
        factored_order: Optional[FactoredInteger] = None,
        size_cap: int = DEFAULT_ENUM_CAP,
    ):
        modulus = _tuple_trim(modulus)
        d = len(modulus) - 1
        if d < 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree >= 1")
        self.base = base
        self.modulus = modulus
        self.degree = d
        self.order = base.order**d
        self.char = base.char
        if self.order > size_cap:
            raise SizeCapError(
                f"field of order {self.order} exceeds the enumeration cap {size_cap}"
            )
        if not is_irreducible(Poly(base, modulus)):
            raise ValueError("modulus is not irreducible")
        if factored_order is None:
            p, k = ntheory.is_prime_power(self.order)
            factored_order = ntheory.cyclotomic_split(p, k)
        assert factored_order.value == self.order - 1
        self.factored_order = factored_order
        self._build_tables()

    # -- packing -------------------------------------------------------------

    def decode(self, idx: int) -> tuple:
        """Index -> little-endian coordinate tuple over the base field."""
        q = self.base.order
        out = []
        for _ in range(self.degree):
            idx, r = divmod(idx, q)
            out.append(r)
        return _tuple_trim(out)

    def encode(self, coeffs: Sequence[int]) -> int:
        q = self.base.order
        idx = 0
        for c in reversed(tuple(coeffs)):
            idx = idx * q + c
        return idx

    # -- table construction ---------------------------------------------------

    def _coords_add(self, a: int, b: int) -> int:
        ca, cb = self.decode(a), self.decode(b)
        n = max(len(ca), len(cb))
        ca += (0,) * (n - len(ca))
        cb += (0,) * (n - len(cb))
        return self.encode([self.base.add(x, y) for x, y in zip(ca, cb)])

    def _coords_mul(self, a: int, b: int) -> int:
        return self.encode(_raw_mulmod(self.base, self.decode(a), self.decode(b), self.modulus))

    def _coords_pow(self, a: int, e: int) -> int:
        result, cur = 1, a
        while e:
            if e & 1:
                result = self._coords_mul(result, cur)
            cur = self._coords_mul(cur, cur)
            e >>= 1
        return result

    def _multiplicative_order_is_full(self, a: int) -> bool:
        m = self.order - 1
        for p in self.factored_order.primes:
            if self._coords_pow(a, m // p) == 1:
                return False
        return True

    def _build_tables(self):
        q1 = self.order - 1
        gen = 1
        if q1 > 1:
            gen = next(
                a for a in range(2, self.order) if self._multiplicative_order_is_full(a)
            )
        self.generator = gen
        exp = [1] * max(q1, 1)
        cur = 1
        for i in range(1, q1):
            cur = self._coords_mul(cur, gen)
            exp[i] = cur
        log = [-1] * self.order
        for i, v in enumerate(exp):
            log[v] = i
        zech = [-1] * max(q1, 1)
        for m in range(q1):
            s = self._coords_add(1, exp[m])
            zech[m] = log[s] if s else -1
        self._exp, self._log, self._zech = exp, log, zech
        self._neg_shift = q1 // 2 if self.char != 2 and q1 > 1 else 0
        qb = self.base.order
        self._frob = [0] * self.order
        for a in range(1, self.order):
            self._frob[a] = exp[(log[a] * qb) % q1] if q1 > 1 else a
        # absolute trace to F_p, via the base field's own absolute trace
        self._abs_trace = [0] * self.order
        self._trace_to_base = [0] * self.order
        for a in range(1, self.order):
            acc, cur = 0, a
            for _ in range(self.degree):
                acc = self._coords_add(acc, cur)
                cur = self._frob[cur]
            assert acc < qb, "trace landed outside the base field"
            self._trace_to_base[a] = acc
            self._abs_trace[a] = self.base.abs_trace(acc)

    # -- arithmetic ------------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if a == 0:
            return b
        if b == 0:
            return a
        q1 = self.order - 1
        la, lb = self._log[a], self._log[b]
        z = self._zech[(lb - la) % q1]
        if z < 0:
            return 0
        return self._exp[(la + z) % q1]

    def neg(self, a: int) -> int:
        if a == 0 or self.char == 2:
            return a
        q1 = self.order - 1
        return self._exp[(self._log[a] + self._neg_shift) % q1]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        q1 = self.order - 1
        return self._exp[(self._log[a] + self._log[b]) % q1]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inversion of zero")
        q1 = self.order - 1
        return self._exp[(-self._log[a]) % q1]

    def pow(self, a: int, e) -> int:
        """a**e for arbitrary-precision e (negative allowed for a != 0)."""
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("0 to a negative power")
            return 0
        q1 = self.order - 1
        if q1 == 0:
            return a
        return self._exp[(self._log[a] * e) % q1]

    def pth_root(self, a: int) -> int:
        return self.pow(a, self.order // self.char)

    def log(self, a: int) -> int:
        if a == 0:
            raise ValueError("discrete log of zero")
        return self._log[a]

    def exp_of(self, m: int) -> int:
        q1 = self.order - 1
        return self._exp[m % q1] if q1 else 1

    def frobenius(self, a: int, i: int = 1) -> int:
        """a**(base.order**i)."""
        i %= self.degree
        for _ in range(i):
            a = self._frob[a]
        return a

    def trace_to_base(self, a: int) -> int:
        return self._trace_to_base[a]

    def abs_trace(self, a: int) -> int:
        return self._abs_trace[a]

    def elements(self):
        return range(self.order)

    def __repr__(self):
        return f"GF({self.order})[{self.base!r}]"


# ---------------------------------------------------------------------------
# Dense polynomials over a field object
# ---------------------------------------------------------------------------


class Poly:
    """Dense univariate polynomial; coefficients are field indices, little-endian."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs: Sequence[int] = ()):
        self.field = field
        self.coeffs = _tuple_trim(coeffs)

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def zero(field) -> "Poly":
        return Poly(field)

    @staticmethod
    def one(field) -> "Poly":
        return Poly(field, (1,))

    @staticmethod
    def x(field) -> "Poly":
        return Poly(field, (0, 1))

    @staticmethod
    def constant(field, c: int) -> "Poly":
        return Poly(field, (c,))

    @staticmethod
    def xn_minus_1(field, n: int) -> "Poly":
        coeffs = [0] * (n + 1)
        coeffs[0] = field.neg(1)
        coeffs[n] = 1
        return Poly(field, coeffs)

    @staticmethod
    def from_packed(field, packed: int, degree_bound: int) -> "Poly":
        q = field.order
        out = []
        for _ in range(degree_bound + 1):
            packed, r = divmod(packed, q)
            out.append(r)
        return Poly(field, out)

    def packed(self) -> int:
        q = self.field.order
        idx = 0
        for c in reversed(self.coeffs):
            idx = idx * q + c
        return idx

    # -- queries ---------------------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree; -1 stands in for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (1,)

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.field is other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((id(self.field), self.coeffs))

    def sort_key(self) -> tuple:
        return (self.degree, self.coeffs)

    # -- ring operations --------------------------------------------------------

    def add(self, other: "Poly") -> "Poly":
        F = self.field
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = F.add(out[i], c)
        return Poly(F, out)

    def neg(self) -> "Poly":
        F = self.field
        return Poly(F, [F.neg(c) for c in self.coeffs])

    def sub(self, other: "Poly") -> "Poly":
        return self.add(other.neg())

    def mul(self, other: "Poly") -> "Poly":
        F = self.field
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(F)
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] = F.add(out[i + j], F.mul(ai, bj))
        return Poly(F, out)

    def scale(self, c: int) -> "Poly":
        F = self.field
        if c == 0:
            return Poly(F)
        return Poly(F, [F.mul(x, c) for x in self.coeffs])

    def shift(self, k: int) -> "Poly":
        if self.is_zero():
            return self
        return Poly(self.field, (0,) * k + self.coeffs)

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        F = self.field
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        d = other.degree
        inv_lc = F.inv(other.lc())
        if len(rem) - 1 < d:
            return Poly(F), self
        quot = [0] * (len(rem) - d)
        for i in range(len(rem) - 1, d - 1, -1):
            c = rem[i]
            if c == 0:
                continue
            factor = F.mul(c, inv_lc)
            quot[i - d] = factor
            for j in range(d + 1):
                rem[i - d + j] = F.sub(rem[i - d + j], F.mul(factor, other.coeffs[j]))
        return Poly(F, quot), Poly(F, rem)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def divides(self, other: "Poly") -> bool:
        return not self.is_zero() and other.divmod(self)[1].is_zero()

    def monic(self) -> "Poly":
        if self.is_zero() or self.is_monic():
            return self
        return self.scale(self.field.inv(self.lc()))

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def pow_mod(self, e: int, modulus: "Poly") -> "Poly":
        result = Poly.one(self.field)
        cur = self % modulus
        while e:
            if e & 1:
                result = result.mul(cur) % modulus
            cur = cur.mul(cur) % modulus
            e >>= 1
        return result

    def derivative(self) -> "Poly":
        F = self.field
        p = F.char
        out = []
        for i in range(1, len(self.coeffs)):
            mult = i % p
            c = self.coeffs[i]
            acc = 0
            for _ in range(mult):
                acc = F.add(acc, c)
            out.append(acc)
        return Poly(F, out)

    def eval(self, point: int) -> int:
        F = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, point), c)
        return acc

    def __str__(self):
        return str(list(self.coeffs))

    def __repr__(self):
        return f"Poly({list(self.coeffs)})"


# ---------------------------------------------------------------------------
# Factorization of polynomials
# ---------------------------------------------------------------------------


def _pth_root_poly(f: Poly) -> Poly:
    F = f.field
    p = F.char
    return Poly(F, [F.pth_root(c) for c in f.coeffs[::p]])


def _squarefree_decomposition(f: Poly) -> list[tuple[Poly, int]]:
    """Monic f -> [(monic squarefree part, multiplicity)], multiplicities ascending."""
    F = f.field
    p = F.char
    out: list[tuple[Poly, int]] = []
    df = f.derivative()
    if df.is_zero():
        for g, m in _squarefree_decomposition(_pth_root_poly(f)):
            out.append((g, m * p))
        return out
    c = f.gcd(df)
    w = (f // c).monic()
    i = 1
    while not w.is_one():
        y = w.gcd(c)
        fac = (w // y).monic()
        if not fac.is_one():
            out.append((fac, i))
        w = y
        c = c // y
        i += 1
    if not c.is_one():
        for g, m in _squarefree_decomposition(_pth_root_poly(c.monic())):
            out.append((g, m * p))
    return sorted(out, key=lambda t: t[1])


def _distinct_degree(f: Poly) -> list[tuple[Poly, int]]:
    """Monic squarefree f -> [(product of its degree-d factors, d)]."""
    F = f.field
    q = F.order
    out = []
    h = Poly.x(F) % f
    x = Poly.x(F)
    rest = f
    d = 0
    while rest.degree > 2 * (d + 1) - 1:
        d += 1
        h = h.pow_mod(q, rest)
        g = rest.gcd(h.sub(x))
        if not g.is_one():
            out.append((g, d))
            rest = (rest // g).monic()
            h = h % rest
    if not rest.is_one():
        out.append((rest, rest.degree))
    return out


def _equal_degree_split(f: Poly, d: int) -> Poly:
    """A proper monic factor of f, all of whose irreducible factors have degree d.

    Trial elements come from the deterministic packed enumeration, so the
    split (and hence full factorizations) is reproducible.
    """
    F = f.field
    q = F.order
    p = F.char
    for t in range(1, q ** f.degree):
        a = Poly.from_packed(F, t, f.degree - 1)
        g = f.gcd(a)
        if not g.is_one() and g.degree < f.degree:
            return g.monic()
        if p == 2:
            # trace map over F_2: a + a^2 + ... + a^(2^(d*e - 1))
            e = int(math.log2(q)) * d
            acc = Poly.zero(F)
            cur = a % f
            for _ in range(e):
                acc = acc.add(cur)
                cur = cur.mul(cur) % f
            g = f.gcd(acc)
        else:
            b = a.pow_mod((q**d - 1) // 2, f)
            g = f.gcd(b.sub(Poly.one(F)))
        if not g.is_one() and g.degree < f.degree:
            return g.monic()
    raise RuntimeError("equal-degree splitting exhausted its trial elements")


def _equal_degree_factor(f: Poly, d: int) -> list[Poly]:
    if f.degree == d:
        return [f.monic()]
    g = _equal_degree_split(f, d)
    return _equal_degree_factor(g, d) + _equal_degree_factor((f // g).monic(), d)


@dataclass(frozen=True)
class FactoredPoly:
    """unit * product of monic irreducible factors with multiplicities."""

    field: object
    unit: int
    factors: tuple[tuple[Poly, int], ...]

    @property
    def s(self) -> int:
        """Number of distinct monic irreducible factors."""
        return len(self.factors)

    @property
    def w_q(self) -> int:
        """Number of monic square-free divisors."""
        return 1 << self.s

    @property
    def degree(self) -> int:
        return sum(P.degree * m for P, m in self.factors)

    @property
    def phi_q(self) -> int:
        """Order of the unit group of F_q[x]/(g), the polynomial Euler function."""
        q = self.field.order
        out = 1
        for P, m in self.factors:
            d = P.degree
            out *= (q**d - 1) * q ** (d * (m - 1))
        return out

    @property
    def n_value(self) -> int:
        """q^deg(g), the number of residues mod g."""
        return self.field.order**self.degree

    def reassemble(self) -> Poly:
        out = Poly.constant(self.field, self.unit)
        for P, m in self.factors:
            for _ in range(m):
                out = out.mul(P)
        return out

    def distinct(self) -> list[Poly]:
        return [P for P, _ in self.factors]

    def monic_divisors(self) -> Iterator[Poly]:
        """All monic divisors, in (degree, coefficients) order."""
        divs = [Poly.one(self.field)]
        for P, m in self.factors:
            cur = list(divs)
            power = Poly.one(self.field)
            for _ in range(m):
                power = power.mul(P)
                divs += [d.mul(power) for d in cur]
        yield from sorted(divs, key=Poly.sort_key)

    def squarefree_divisors(self) -> Iterator[tuple[Poly, int]]:
        """(d, mobius(d)) over monic square-free divisors."""
        divs = [(Poly.one(self.field), 1)]
        for P, _ in self.factors:
            divs += [(d.mul(P), -s) for d, s in divs]
        yield from sorted(divs, key=lambda t: t[0].sort_key())

    def divisor_part(self, g: Poly) -> "FactoredPoly":
        """Factored form of a monic divisor g, reusing the known factors."""
        if not g.is_monic():
            raise ValueError("divisor must be monic")
        fs = []
        rest = g
        for P, _ in self.factors:
            e = 0
            while P.divides(rest):
                rest = (rest // P).monic()
                e += 1
            if e:
                fs.append((P, e))
        if not rest.is_one():
            raise ValueError("polynomial does not divide this factored product")
        return FactoredPoly(self.field, 1, tuple(fs))


def factor_poly(f: Poly) -> FactoredPoly:
    """Complete factorization into monic irreducibles, deterministically."""
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    unit = f.lc()
    work = f.monic()
    found: list[tuple[Poly, int]] = []
    if work.degree == 0:
        return FactoredPoly(f.field, unit, ())
    for sqfree, mult in _squarefree_decomposition(work):
        for prod, d in _distinct_degree(sqfree):
            for P in _equal_degree_factor(prod, d):
                found.append((P, mult))
    found.sort(key=lambda t: t[0].sort_key())
    return FactoredPoly(f.field, unit, tuple(found))


def is_irreducible(f: Poly) -> bool:
    """Rabin irreducibility test (gcd screens with x^(q^d) - x)."""
    n = f.degree
    if n < 1:
        return False
    if n == 1:
        return True
    F = f.field
    q = F.order
    f = f.monic()
    x = Poly.x(F)
    h = x.pow_mod(q**n, f)
    if h != x % f:
        return False
    for r in {p for p, _ in ntheory.factor_integer(n).factors}:
        g = x.pow_mod(q ** (n // r), f).sub(x)
        if not f.gcd(g).is_one():
            return False
    return True


def smallest_irreducible(field, degree: int) -> Poly:
    """The monic irreducible of given degree that is first in packed order."""
    q = field.order
    for low in range(q**degree):
        f = Poly(field, Poly.from_packed(field, low, degree - 1).coeffs + (0,) * 0)
        coeffs = list(f.coeffs) + [0] * (degree - len(f.coeffs)) + [1]
        cand = Poly(field, coeffs[: degree + 1])
        if is_irreducible(cand):
            return cand
    raise RuntimeError("no irreducible found (impossible for a field)")


# ---------------------------------------------------------------------------
# The tower
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldTower:
    """F_p < F_q < F_{q^n} with deterministic moduli and generator."""

    p: int
    k: int
    n: int
    q: int
    order: int
    base: object
    top: ExtField
    base_modulus: tuple
    top_modulus: tuple
    factored_order: FactoredInteger
    enum_cap: int

    @property
    def generator(self) -> int:
        return self.top.generator

    def require_enumerable(self, what: str, budget: Optional[int] = None) -> None:
        cap = budget if budget is not None else self.enum_cap
        if self.order > cap:
            raise SizeCapError(f"{what} needs enumeration of {self.order} elements (cap {cap})")

    def element(self, index: int) -> "FieldElement":
        return FieldElement(self, index)

    def __repr__(self):
        return f"FieldTower(p={self.p}, k={self.k}, n={self.n})"


@lru_cache(maxsize=64)
def _build_tower_cached(p: int, k: int, n: int, enum_cap: int) -> FieldTower:
    prime, proven = ntheory.is_prime(p)
    if not (prime and proven):
        raise ValueError(f"p = {p} is not prime")
    if k < 1 or n < 1:
        raise ValueError("k and n must be >= 1")
    q = p**k
    order = q**n
    if order > enum_cap:
        raise SizeCapError(
            f"tower of order {order} exceeds the size cap {enum_cap};"
            " raise enum_cap explicitly for larger towers"
        )
    prime_field = PrimeField(p)
    if k == 1:
        base = prime_field
        base_modulus = (0, 1)
    else:
        base_mod_poly = smallest_irreducible(prime_field, k)
        base_modulus = base_mod_poly.coeffs
        base = ExtField(
            prime_field,
            base_modulus,
            factored_order=ntheory.cyclotomic_split(p, k),
            size_cap=enum_cap,
        )
    top_mod_poly = smallest_irreducible(base, n)
    factored_order = ntheory.cyclotomic_split(q, n)
    top = ExtField(base, top_mod_poly.coeffs, factored_order=factored_order, size_cap=enum_cap)
    return FieldTower(
        p=p,
        k=k,
        n=n,
        q=q,
        order=order,
        base=base,
        top=top,
        base_modulus=base_modulus,
        top_modulus=top_mod_poly.coeffs,
        factored_order=factored_order,
        enum_cap=enum_cap,
    )


def build_tower(p: int, k: int, n: int, enum_cap: int = DEFAULT_ENUM_CAP) -> FieldTower:
    """Deterministic tower for F_{p^k}^n; identical inputs give identical tables."""
    return _build_tower_cached(p, k, n, enum_cap)


def tower_for_q(q: int, n: int, enum_cap: int = DEFAULT_ENUM_CAP) -> FieldTower:
    pk = ntheory.is_prime_power(q)
    if pk is None:
        raise ValueError(f"q = {q} is not a prime power")
    return build_tower(pk[0], pk[1], n, enum_cap)


# ---------------------------------------------------------------------------
# Elements and the F_q[x] module action
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldElement:
    """A top-field element carried with its tower; arithmetic sugar over indices."""

    tower: FieldTower
    index: int

    def _wrap(self, idx: int) -> "FieldElement":
        return FieldElement(self.tower, idx)

    def __add__(self, other):
        return self._wrap(self.tower.top.add(self.index, _idx(other)))

    def __sub__(self, other):
        return self._wrap(self.tower.top.sub(self.index, _idx(other)))

    def __mul__(self, other):
        return self._wrap(self.tower.top.mul(self.index, _idx(other)))

    def __pow__(self, e):
        return self._wrap(self.tower.top.pow(self.index, e))

    def inverse(self) -> "FieldElement":
        return self._wrap(self.tower.top.inv(self.index))

    def __neg__(self):
        return self._wrap(self.tower.top.neg(self.index))

    @property
    def coords(self) -> tuple:
        """Coordinates over F_q (each itself a tuple over F_p when k > 1)."""
        top_coords = self.tower.top.decode(self.index)
        padded = top_coords + (0,) * (self.tower.n - len(top_coords))
        if self.tower.k == 1:
            return padded
        base = self.tower.base
        return tuple(
            base.decode(c) + (0,) * (self.tower.k - len(base.decode(c))) for c in padded
        )

    def encode_text(self) -> str:
        return json.dumps([list(c) if isinstance(c, tuple) else c for c in self.coords])

    def __repr__(self):
        return f"<{self.coords} in GF({self.tower.order})>"


def _idx(v) -> int:
    return v.index if isinstance(v, FieldElement) else v


def parse_element(tower: FieldTower, text: str) -> FieldElement:
    """Inverse of FieldElement.encode_text: little-endian coordinate vectors."""
    data = json.loads(text)
    if not isinstance(data, list) or len(data) > tower.n:
        raise ValueError("bad element encoding")
    coords = []
    for c in data:
        if isinstance(c, list):
            if tower.k == 1:
                raise ValueError("nested coordinates for a prime base field")
            coords.append(tower.base.encode(c))
        else:
            coords.append(int(c))
    return FieldElement(tower, tower.top.encode(coords))


def frobenius_q(tower: FieldTower, beta: int, i: int = 1) -> int:
    """beta^(q^i) through the precomputed Frobenius table."""
    return tower.top.frobenius(beta, i)


def poly_action(tower: FieldTower, f: Poly, beta: int) -> int:
    """The F_q[x]-module action: sum of f_i * beta^(q^i)."""
    if f.field is not tower.base:
        raise ValueError("action polynomial must live over the base field")
    top = tower.top
    acc = 0
    cur = beta
    for c in f.coeffs:
        if c:
            acc = top.add(acc, top.mul(c, cur))
        cur = top.frobenius(cur)
    return acc


# ---------------------------------------------------------------------------
# x^n - 1: integer-level structure and actual factorization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Xn1Structure:
    """Degrees of the distinct irreducible factors of x^n - 1 over F_q.

    Computed from q-cyclotomic cosets, so no field arithmetic is needed; every
    distinct factor carries the same multiplicity p^e where n = n' * p^e with
    p the characteristic and gcd(n', p) = 1.
    """

    q: int
    n: int
    multiplicity: int
    degrees: tuple[int, ...]

    @property
    def s(self) -> int:
        return len(self.degrees)

    @property
    def w_q(self) -> int:
        return 1 << self.s

    @property
    def n_linear(self) -> int:
        return sum(1 for d in self.degrees if d == 1)

    @property
    def phi_q(self) -> int:
        out = 1
        for d in self.degrees:
            out *= (self.q**d - 1) * self.q ** (d * (self.multiplicity - 1))
        return out


def xn1_structure(q: int, n: int) -> Xn1Structure:
    pk = ntheory.is_prime_power(q)
    if pk is None:
        raise ValueError(f"q = {q} is not a prime power")
    p, _ = pk
    mult = 1
    n_prime = n
    while n_prime % p == 0:
        n_prime //= p
        mult *= p
    seen = bytearray(n_prime)
    degrees = []
    for j in range(n_prime):
        if seen[j]:
            continue
        size = 0
        cur = j
        while not seen[cur]:
            seen[cur] = 1
            size += 1
            cur = cur * q % n_prime
        degrees.append(size)
    return Xn1Structure(q, n, mult, tuple(sorted(degrees)))


def factor_xn_minus_1(tower: FieldTower) -> FactoredPoly:
    """Factorization of x^n - 1 over F_q, cross-checked against the coset structure."""
    base = tower.base
    p = tower.p
    mult = 1
    n_prime = tower.n
    while n_prime % p == 0:
        n_prime //= p
        mult *= p
    factored = factor_poly(Poly.xn_minus_1(base, n_prime))
    assert all(m == 1 for _, m in factored.factors)
    result = FactoredPoly(
        base, 1, tuple((P, mult) for P, _ in factored.factors)
    )
    structure = xn1_structure(tower.q, tower.n)
    assert tuple(sorted(P.degree for P, _ in result.factors)) == structure.degrees
    return result
