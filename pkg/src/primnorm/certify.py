"""Sufficient conditions, sieve criteria and decision rules for pairs (q, n).

A pair (q, n) is *proved in* the target set for caps (m1, m2) when every
admissible rational function over GF(q^n) is guaranteed a primitive
element alpha of GF(q^n), normal over GF(q), with f(alpha) primitive.  The
rules here either certify that guarantee (direct character-sum condition,
sieve refinement, counting arguments) or refute it (scarcity of
primitive normal elements, exhaustive search), and every decision carries a
certificate that replays to the same verdict.

All condition checks run in exact rational arithmetic: q^(n/2) >= X is
evaluated as q^n >= X^2 over fractions, so a certificate is never issued on
floating-point grace.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from . import ffpoly, freeness, ntheory, search
from .ffpoly import Poly, SizeCapError, Xn1Structure, xn1_structure
from .freeness import FreenessContext
from .ntheory import Certainty, FactoredInteger

__all__ = [
    "PairStatus",
    "SieveReport",
    "PairClassification",
    "nf_lower_bound",
    "corollary_condition",
    "sieve_condition",
    "sieve_identity_check",
    "threshold_q",
    "threshold_n",
    "decide_by_scarcity",
    "decide_by_abundance",
    "classify_pair",
    "replay_certificate",
    "scan_range",
    "DEFAULT_STRATEGY",
]


class PairStatus(Enum):
    PROVED_IN = "proved_in"
    PROVED_NOT_IN = "proved_not_in"
    UNRESOLVED = "unresolved"
    INDETERMINATE = "indeterminate"


# ---------------------------------------------------------------------------
# The direct bound and its corollary condition
# ---------------------------------------------------------------------------


def nf_lower_bound(
    q: int,
    n: int,
    m1: int,
    m2: int,
    e1: FactoredInteger,
    e2: FactoredInteger,
    g: ffpoly.FactoredPoly,
) -> tuple[float, bool]:
    """(lower bound on the freeness-constrained count, sufficient-condition flag).

    The bound is
        (phi(e1) phi(e2) Phi(g) / (e1 e2 N(g))) *
        (q^n - L - L q^(n/2) (W(e1) W(e2) W_q(g) - 1)),  L = m1 + m2 + 1,
    and positivity is guaranteed as soon as q^(n/2) >= L W(e1) W(e2) W_q(g)
    (checked exactly on squares).
    """
    L = m1 + m2 + 1
    big_w = e1.w * e2.w * g.w_q
    prefactor = (
        Fraction(e1.phi, e1.value) * Fraction(e2.phi, e2.value) * Fraction(g.phi_q, g.n_value)
    )
    order = q**n
    inner = order - L - L * math.sqrt(order) * (big_w - 1)
    sufficient = order >= (L * big_w) ** 2
    return float(prefactor) * inner, sufficient


def corollary_condition(
    q: int,
    n: int,
    m1: int,
    m2: int,
    fo: Optional[FactoredInteger] = None,
    xs: Optional[Xn1Structure] = None,
    budget_ms: float = 10_000.0,
) -> bool:
    """Exact check of q^(n/2) >= (m1+m2+1) W(q^n - 1)^2 W_q(x^n - 1)."""
    fo = fo if fo is not None else ntheory.cyclotomic_split(q, n, budget_ms)
    if fo.certainty is Certainty.INCOMPLETE:
        raise ntheory.IncompleteFactorizationError(
            "corollary condition needs the full factorization", fo.cofactor
        )
    xs = xs if xs is not None else xn1_structure(q, n)
    rhs = (m1 + m2 + 1) * fo.w**2 * xs.w_q
    return q**n >= rhs * rhs


# ---------------------------------------------------------------------------
# Recipes for the sieve parameters
# ---------------------------------------------------------------------------


def _resolve_ell(spec: Union[str, int], fo: FactoredInteger, q: int, n: int):
    """-> (description, ell value, tuple of ell primes)."""
    if isinstance(spec, int):
        value = spec
        desc = str(spec)
    else:
        s = spec.strip().lower()
        if s == "full":
            return "full", fo.value, fo.primes
        if s in ("one", "1"):
            return "one", 1, ()
        if s.startswith("gcd:"):
            m = int(s[4:])
            value = math.gcd(fo.value, m)
            desc = f"gcd:{m}"
        elif s == "gcd210":
            value = math.gcd(fo.value, 210)
            desc = "gcd:210"
        elif s == "q-1":
            value = q - 1
            desc = "q-1"
        elif s.startswith("primes:"):
            ps = [int(x) for x in s[7:].split(",") if x]
            value = 1
            for p in ps:
                value *= p
            desc = "primes:" + ",".join(str(x) for x in ps)
        else:
            value = int(s)
            desc = s
    if fo.value % value:
        raise ValueError(f"ell = {value} does not divide q^n - 1")
    primes = fo.divisor_part(value).primes
    return desc, value, primes


def _resolve_g(spec: str, xs: Xn1Structure, q: int, n: int):
    """-> (description, included degree list, excluded degree list)."""
    s = spec.strip().lower()
    degrees = list(xs.degrees)
    if s == "full":
        return "full", degrees, []
    if s in ("one", "1"):
        return "one", [], degrees
    if s == "linear":
        inc = [d for d in degrees if d == 1]
        exc = [d for d in degrees if d != 1]
        return "linear", inc, exc
    if s == "degcap":
        # factors of degree k with q^k <= 2n, to keep delta positive
        inc = [d for d in degrees if q**d <= 2 * n]
        exc = [d for d in degrees if q**d > 2 * n]
        return "degcap", inc, exc
    raise ValueError(f"unknown g recipe: {spec}")


@dataclass(frozen=True)
class SieveReport:
    """Everything the sieve inequality needs, plus the verdict.

    delta = 1 - 2 sum(1/p_i) - sum(1/q^deg(P_j)) over the r primes outside
    ell and the s irreducible factors outside g; Delta = (2r+s-1)/delta + 2.
    The verdict `holds` implies membership of (q, n) for the caps.
    """

    q: int
    n: int
    m1: int
    m2: int
    ell_spec: str
    g_spec: str
    ell: int
    excluded_primes: tuple
    r: int
    s: int
    w_ell: int
    wq_g: int
    delta: Fraction
    big_delta: Optional[Fraction]
    holds: bool
    indeterminate: bool = False

    @property
    def condition_lhs(self) -> float:
        return math.sqrt(float(self.q) ** self.n)

    @property
    def condition_rhs(self) -> float:
        if self.big_delta is None:
            return float("inf")
        return float(
            (self.m1 + self.m2 + 1) * self.w_ell**2 * self.wq_g * self.big_delta
        )

    def to_row(self) -> dict:
        return {
            "q": self.q,
            "n": self.n,
            "ell": self.ell_spec,
            "g": self.g_spec,
            "r": self.r,
            "s": self.s,
            "W_ell": self.w_ell,
            "Wq_g": self.wq_g,
            "delta": float(self.delta),
            "Delta": float(self.big_delta) if self.big_delta is not None else None,
            "holds": self.holds,
        }


def sieve_condition(
    q: int,
    n: int,
    m1: int,
    m2: int,
    ell_spec: Union[str, int] = "full",
    g_spec: str = "full",
    fo: Optional[FactoredInteger] = None,
    budget_ms: float = 10_000.0,
) -> SieveReport:
    """Evaluate the sieve criterion for the given ell/g recipes, exactly."""
    fo = fo if fo is not None else ntheory.cyclotomic_split(q, n, budget_ms)
    xs = xn1_structure(q, n)
    if fo.certainty is Certainty.INCOMPLETE:
        return SieveReport(
            q, n, m1, m2, str(ell_spec), g_spec, 0, (), 0, 0, 0, 0,
            Fraction(0), None, False, indeterminate=True,
        )
    ell_desc, ell_value, ell_primes = _resolve_ell(ell_spec, fo, q, n)
    g_desc, g_degrees, excluded_degrees = _resolve_g(g_spec, xs, q, n)
    excluded_primes = tuple(p for p in fo.primes if p not in set(ell_primes))
    r = len(excluded_primes)
    s = len(excluded_degrees)
    w_ell = 1 << len(ell_primes)
    wq_g = 1 << len(g_degrees)
    delta = (
        Fraction(1)
        - 2 * sum(Fraction(1, p) for p in excluded_primes)
        - sum(Fraction(1, q**d) for d in excluded_degrees)
    )
    if delta <= 0:
        return SieveReport(
            q, n, m1, m2, ell_desc, g_desc, ell_value, excluded_primes,
            r, s, w_ell, wq_g, delta, None, False,
        )
    big_delta = Fraction(2 * r + s - 1, 1) / delta + 2
    rhs = (m1 + m2 + 1) * w_ell**2 * wq_g * big_delta
    holds = Fraction(q**n) >= rhs * rhs
    return SieveReport(
        q, n, m1, m2, ell_desc, g_desc, ell_value, excluded_primes,
        r, s, w_ell, wq_g, delta, big_delta, bool(holds),
    )


def sieve_identity_check(
    ctx: FreenessContext, f, ell: int, g: Poly
) -> tuple[bool, dict]:
    """Exact-count verification of the sieve inequality on an enumerable field.

    N(Q-1, Q-1, x^n-1) >= sum_i N(p_i ell, ell, g) + sum_i N(ell, p_i ell, g)
                          + sum_j N(ell, ell, P_j g) - (2r+s-1) N(ell, ell, g).
    """
    fo = ctx.factored_order
    ell_primes = set(fo.divisor_part(ell).primes)
    excluded = [p for p in fo.primes if p not in ell_primes]
    gf = ctx.factor_xn1_divisor(g)
    g_keys = {P.coeffs for P, _ in gf.factors}
    outside = [P for P, _ in ctx.factored_xn1.factors if P.coeffs not in g_keys]
    r, s = len(excluded), len(outside)

    def count(a, b, gg):
        return search.count_nf_direct(ctx, f, a, b, gg).n_f

    full = count(ctx.order - 1, ctx.order - 1, ctx.xn1())
    base = count(ell, ell, g)
    rhs = -(2 * r + s - 1) * base
    for p in excluded:
        rhs += count(p * ell, ell, g)
        rhs += count(ell, p * ell, g)
    for P in outside:
        rhs += count(ell, ell, g.mul(P))
    details = {"lhs": full, "rhs": rhs, "r": r, "s": s, "base": base}
    return full >= rhs, details


# ---------------------------------------------------------------------------
# Closed-form thresholds
# ---------------------------------------------------------------------------


def threshold_q(
    n: int,
    m1: int,
    m2: int,
    t: float,
    regime: str = "generic",
    exclude_prime: Optional[int] = None,
) -> float:
    """Smallest real q whose direct condition holds with W-bounds at parameter t.

    generic solves q^(n/2) >= L A_t^2 q^(2n/t) 2^n (valid for t > 4); wq34
    replaces the 2^n cap on W_q(x^n - 1) by 2^(3n/4) (large-n factor-count
    bound).  Thresholds decrease in t on the validity region.
    """
    L = m1 + m2 + 1
    if t <= 4:
        raise ValueError("threshold in q needs t > 4")
    coeff = {"generic": 1.0, "wq34": 0.75}.get(regime)
    if coeff is None:
        raise ValueError(f"unknown regime for threshold_q: {regime}")
    a = ntheory.a_t_bound(t, exclude_prime).value
    log_val = (math.log(L) + 2 * math.log(a) + coeff * n * math.log(2)) * (
        2 * t / ((t - 4) * n)
    )
    return math.exp(log_val)


def threshold_n(
    q: int,
    m1: int,
    m2: int,
    t: float,
    regime: str = "generic",
    exclude_prime: Optional[int] = None,
) -> float:
    """Smallest real n whose direct condition holds at parameter t, for fixed q.

    generic uses W_q(x^n-1) <= 2^n; wq34 uses 2^(3n/4); the lenstra_q2/3/4
    regimes use the small-characteristic caps 2^((n+5)/4), 2^((n+4)/3),
    2^(n/3 + 2) and are only meaningful for q = 2, 3, 4 respectively.
    """
    L = m1 + m2 + 1
    a = ntheory.a_t_bound(t, exclude_prime).value
    log_la2 = math.log(L) + 2 * math.log(a)
    if regime in ("generic", "wq34"):
        wq_coeff = 1.0 if regime == "generic" else 0.75
        denom = ((t - 4) / (2 * t)) * math.log(q) - wq_coeff * math.log(2)
        if denom <= 0:
            raise ValueError("t outside the validity region for this q")
        return log_la2 / denom
    if regime == "lenstra_q2":
        if t <= 8:
            raise ValueError("the q=2 branch needs t > 8")
        return (4 * t / (t - 8)) * (log_la2 / math.log(2) + 5 / 4)
    if regime == "lenstra_q3":
        denom = ((t - 4) / (2 * t)) * math.log(3) - math.log(2) / 3
        if denom <= 0:
            raise ValueError("t outside the validity region for the q=3 branch")
        return (log_la2 + (4 / 3) * math.log(2)) / denom
    if regime == "lenstra_q4":
        if t <= 6:
            raise ValueError("the q=4 branch needs t > 6")
        return (3 * t / (t - 6)) * (log_la2 / math.log(4) + 1)
    raise ValueError(f"unknown regime for threshold_n: {regime}")


# ---------------------------------------------------------------------------
# Counting decision rules
# ---------------------------------------------------------------------------


def _context_for(q: int, n: int, enum_cap: int) -> FreenessContext:
    return freeness.context_for_q(q, n, enum_cap)


def decide_by_scarcity(
    q: int, n: int, m1: int, m2: int, enum_cap: int = ffpoly.DEFAULT_ENUM_CAP
) -> Optional["PairClassification"]:
    """Too few primitive normal elements: an interpolating function kills them all.

    Fires when the primitive normal count is at most m1 + m2 + 1 (n >= 3).
    """
    if n < 3:
        raise ValueError("the scarcity rule assumes n >= 3")
    ctx = _context_for(q, n, enum_cap)
    count = freeness.count_primitive_normal(ctx)
    if count <= m1 + m2 + 1:
        return PairClassification(
            q, n, m1, m2, PairStatus.PROVED_NOT_IN, "scarcity",
            {"rule": "scarcity", "pn_count": count, "cap": m1 + m2 + 1},
        )
    return None


def decide_by_abundance(
    q: int,
    n: int,
    m1: int,
    m2: int,
    enum_cap: int = ffpoly.DEFAULT_ENUM_CAP,
    allow_any_characteristic: bool = False,
) -> Optional["PairClassification"]:
    """Pigeonhole on image sizes: enough primitive normal elements force a hit.

    Fires when pn_count/m + phi(q^n - 1) > q^n + 1 with m = max(m1, m2); the
    rule is stated for characteristic 2, so other characteristics require the
    explicit unproven-hypothesis opt-in.
    """
    if n < 3:
        raise ValueError("the abundance rule assumes n >= 3")
    p, _ = ntheory.is_prime_power(q)
    if p != 2 and not allow_any_characteristic:
        return None
    ctx = _context_for(q, n, enum_cap)
    count = freeness.count_primitive_normal(ctx)
    m = max(m1, m2)
    phi = ctx.factored_order.phi
    if count + m * phi > m * (q**n + 1):
        return PairClassification(
            q, n, m1, m2, PairStatus.PROVED_IN, "abundance",
            {
                "rule": "abundance",
                "pn_count": count,
                "phi": phi,
                "m": m,
                "hypothesis_verified": p == 2,
            },
        )
    return None


# ---------------------------------------------------------------------------
# Pair classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairClassification:
    q: int
    n: int
    m1: int
    m2: int
    status: PairStatus
    rule: Optional[str]
    certificate: dict
    millis: float = 0.0

    def to_row(self) -> dict:
        cert = self.certificate or {}
        return {
            "q": self.q,
            "n": self.n,
            "m1": self.m1,
            "m2": self.m2,
            "status": self.status.value,
            "rule": self.rule,
            "delta": cert.get("delta"),
            "Delta": cert.get("Delta"),
            "r": cert.get("r"),
            "s": cert.get("s"),
            "W_ell": cert.get("W_ell"),
            "Wq_g": cert.get("Wq_g"),
            "certificate": cert,
            "millis": round(self.millis, 3),
        }


DEFAULT_STRATEGY: tuple = (
    ("corollary",),
    ("sieve", "gcd:210", "one"),
    ("sieve", "gcd:210", "linear"),
    ("scarcity",),
    ("abundance",),
    ("exhaustive",),
)


def _sieve_certificate(report: SieveReport) -> dict:
    return {
        "rule": "sieve",
        "ell": report.ell_spec,
        "g": report.g_spec,
        "r": report.r,
        "s": report.s,
        "W_ell": report.w_ell,
        "Wq_g": report.wq_g,
        "delta": str(report.delta),
        "Delta": str(report.big_delta) if report.big_delta is not None else None,
    }


def classify_pair(
    q: int,
    n: int,
    m1: int,
    m2: int,
    strategy: Sequence = DEFAULT_STRATEGY,
    enum_cap: int = 1 << 13,
    fn_space_cap: int = 6 * 10**6,
    budget_ms: float = 10_000.0,
) -> PairClassification:
    """Apply the rules in order; the first decisive one wins.

    Enumeration rules (scarcity, abundance, exhaustive) silently skip when the
    field or function space is beyond their caps.  A factorization-budget
    failure downgrades the final verdict to INDETERMINATE rather than
    UNRESOLVED, so budget exhaustion is never mistaken for a checked failure.
    """
    t0 = time.perf_counter()
    fo: Optional[FactoredInteger] = None
    saw_indeterminate = False

    def _elapsed() -> float:
        return (time.perf_counter() - t0) * 1000.0

    for rule in strategy:
        name = rule[0]
        if name == "corollary":
            if fo is None:
                fo = ntheory.cyclotomic_split(q, n, budget_ms)
            if fo.certainty is Certainty.INCOMPLETE:
                saw_indeterminate = True
                continue
            if corollary_condition(q, n, m1, m2, fo):
                return PairClassification(
                    q, n, m1, m2, PairStatus.PROVED_IN, "corollary",
                    {"rule": "corollary", "W": fo.w, "Wq": xn1_structure(q, n).w_q},
                    _elapsed(),
                )
        elif name == "sieve":
            ell_spec = rule[1] if len(rule) > 1 else "full"
            g_spec = rule[2] if len(rule) > 2 else "full"
            if fo is None:
                fo = ntheory.cyclotomic_split(q, n, budget_ms)
            report = sieve_condition(q, n, m1, m2, ell_spec, g_spec, fo)
            if report.indeterminate:
                saw_indeterminate = True
            elif report.holds:
                return PairClassification(
                    q, n, m1, m2, PairStatus.PROVED_IN, "sieve",
                    _sieve_certificate(report), _elapsed(),
                )
        elif name == "scarcity":
            if q**n > enum_cap or n < 3:
                continue
            result = decide_by_scarcity(q, n, m1, m2, enum_cap)
            if result is not None:
                return PairClassification(
                    q, n, m1, m2, result.status, result.rule, result.certificate,
                    _elapsed(),
                )
        elif name == "abundance":
            if q**n > enum_cap or n < 3:
                continue
            result = decide_by_abundance(q, n, m1, m2, enum_cap)
            if result is not None:
                return PairClassification(
                    q, n, m1, m2, result.status, result.rule, result.certificate,
                    _elapsed(),
                )
        elif name == "exhaustive":
            if q**n > enum_cap:
                continue
            ctx = _context_for(q, n, enum_cap)
            report = search.exhaustive_b_check(ctx, m1, m2, fn_space_cap)
            if report.status == "proved_in":
                return PairClassification(
                    q, n, m1, m2, PairStatus.PROVED_IN, "exhaustive",
                    {"rule": "exhaustive", "functions_checked": report.functions_checked},
                    _elapsed(),
                )
            if report.status == "proved_not_in":
                return PairClassification(
                    q, n, m1, m2, PairStatus.PROVED_NOT_IN, "exhaustive",
                    {
                        "rule": "exhaustive",
                        "functions_checked": report.functions_checked,
                        "failing": str(report.failing),
                    },
                    _elapsed(),
                )
        else:
            raise ValueError(f"unknown rule: {name}")
    status = PairStatus.INDETERMINATE if saw_indeterminate else PairStatus.UNRESOLVED
    return PairClassification(q, n, m1, m2, status, None, {}, _elapsed())


def replay_certificate(
    q: int, n: int, m1: int, m2: int, certificate: dict, budget_ms: float = 10_000.0
) -> PairClassification:
    """Re-derive the verdict a certificate claims, from scratch."""
    rule = certificate.get("rule")
    if rule == "corollary":
        ok = corollary_condition(q, n, m1, m2, budget_ms=budget_ms)
        status = PairStatus.PROVED_IN if ok else PairStatus.UNRESOLVED
        return PairClassification(q, n, m1, m2, status, rule, certificate)
    if rule == "sieve":
        report = sieve_condition(
            q, n, m1, m2, certificate["ell"], certificate["g"], budget_ms=budget_ms
        )
        status = PairStatus.PROVED_IN if report.holds else PairStatus.UNRESOLVED
        return PairClassification(q, n, m1, m2, status, rule, _sieve_certificate(report))
    if rule == "scarcity":
        result = decide_by_scarcity(q, n, m1, m2)
        if result is None:
            return PairClassification(q, n, m1, m2, PairStatus.UNRESOLVED, rule, certificate)
        return result
    if rule == "abundance":
        result = decide_by_abundance(q, n, m1, m2)
        if result is None:
            return PairClassification(q, n, m1, m2, PairStatus.UNRESOLVED, rule, certificate)
        return result
    if rule == "exhaustive":
        ctx = _context_for(q, n, 1 << 13)
        report = search.exhaustive_b_check(ctx, m1, m2)
        status = {
            "proved_in": PairStatus.PROVED_IN,
            "proved_not_in": PairStatus.PROVED_NOT_IN,
        }.get(report.status, PairStatus.UNRESOLVED)
        return PairClassification(
            q, n, m1, m2, status, rule,
            {"rule": "exhaustive", "functions_checked": report.functions_checked},
        )
    raise ValueError(f"cannot replay certificate with rule {rule!r}")


# ---------------------------------------------------------------------------
# Range scans
# ---------------------------------------------------------------------------


def _scan_worker(args) -> list[dict]:
    q, ns, m1, m2, ell_spec, g_spec, budget_ms = args
    rows = []
    for n in ns:
        t0 = time.perf_counter()
        fo = ntheory.cyclotomic_split(q, n, budget_ms)
        report = sieve_condition(q, n, m1, m2, ell_spec, g_spec, fo)
        millis = (time.perf_counter() - t0) * 1000.0
        if report.indeterminate:
            status = PairStatus.INDETERMINATE
        elif report.holds:
            status = PairStatus.PROVED_IN
        else:
            status = PairStatus.UNRESOLVED
        rows.append(
            {
                "q": q,
                "n": n,
                "status": status.value,
                "rule": "sieve",
                "delta": float(report.delta),
                "Delta": float(report.big_delta) if report.big_delta is not None else None,
                "r": report.r,
                "s": report.s,
                "W_ell": report.w_ell,
                "Wq_g": report.wq_g,
                "millis": round(millis, 3),
            }
        )
    return rows


def scan_range(
    n_values: Iterable[int],
    q_lo: int,
    q_hi: int,
    m1: int,
    m2: int,
    ell_spec: Union[str, int] = "gcd:210",
    g_spec: str = "one",
    workers: Optional[int] = None,
    budget_ms: float = 10_000.0,
) -> list[dict]:
    """Sieve every prime power q in [q_lo, q_hi] for each n; rows sorted by (q, n).

    Work is distributed over processes per q; the merge is deterministic, so
    the output is independent of the worker count.
    """
    ns = sorted(set(n_values))
    qs = [q for q, _, _ in ntheory.prime_powers_in(q_lo, q_hi)]
    tasks = [(q, ns, m1, m2, ell_spec, g_spec, budget_ms) for q in qs]
    rows: list[dict] = []
    if workers is None or workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for chunk in pool.map(_scan_worker, tasks, chunksize=8):
                rows.extend(chunk)
    else:
        for task in tasks:
            rows.extend(_scan_worker(task))
    rows.sort(key=lambda row: (row["q"], row["n"]))
    return rows
