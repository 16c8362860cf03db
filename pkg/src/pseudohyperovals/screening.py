"""Arithmetic screening of dimensions d = 3nf > 12 over GF(2).

A transitive action of degree 2^(d/3)+2 forces |G| to be divisible by the
primitive prime divisors of 2^e - 1 with e = 2d/3 - 2.  The inequalities
below involve 2^(d/2) for odd d, so comparisons run exactly in Q(sqrt 2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from sympy import divisors, factorint

MAX_D = 120
IMPRIMITIVE = {18: 10, 21: 12, 30: 18}
PRINTED_PRIME = {18: 11, 21: 13, 30: 17}
DEFERRED_THEOREMS = {
    18: "Jordan's theorem forces A_d or S_d; A_d has no subgroup of index 66 or 33",
    21: "Jordan's theorem forces A_d or S_d; A_d has no subgroup of index 130 or 65",
    30: "Jordan's theorem forces A_d or S_d; A_d has no subgroup of index 1026 or 513",
}


class ScreeningError(ValueError):
    pass


@dataclass(frozen=True)
class QSqrt2:
    """a + b*sqrt(2) with rational a, b."""

    a: Fraction
    b: Fraction = Fraction(0)

    @classmethod
    def two_power(cls, half_exponent: int) -> "QSqrt2":
        """2^(k/2)."""
        k = half_exponent
        if k % 2 == 0:
            return cls(Fraction(2) ** (k // 2))
        return cls(Fraction(0), Fraction(2) ** ((k - 1) // 2))

    def __add__(self, other: "QSqrt2 | int") -> "QSqrt2":
        o = _lift(other)
        return QSqrt2(self.a + o.a, self.b + o.b)

    def __sub__(self, other: "QSqrt2 | int") -> "QSqrt2":
        o = _lift(other)
        return QSqrt2(self.a - o.a, self.b - o.b)

    def __mul__(self, other: "QSqrt2 | int") -> "QSqrt2":
        o = _lift(other)
        return QSqrt2(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    def __truediv__(self, k: int) -> "QSqrt2":
        return QSqrt2(self.a / k, self.b / k)

    def sign(self) -> int:
        a, b = self.a, self.b
        sa, sb = (a > 0) - (a < 0), (b > 0) - (b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with 2 b^2
        c = a * a - 2 * b * b
        return sa if c > 0 else (sb if c < 0 else 0)

    def __gt__(self, other: "QSqrt2 | int") -> bool:
        return (self - _lift(other)).sign() > 0

    def __ge__(self, other: "QSqrt2 | int") -> bool:
        return (self - _lift(other)).sign() >= 0

    def __lt__(self, other: "QSqrt2 | int") -> bool:
        return (self - _lift(other)).sign() < 0

    def __str__(self) -> str:
        if not self.b:
            return str(self.a)
        return f"{self.a}+{self.b}*sqrt(2)"


def _lift(x) -> QSqrt2:
    return x if isinstance(x, QSqrt2) else QSqrt2(Fraction(x))


# ---------------------------------------------------------------- primitive prime divisors


def multiplicative_order(q: int, p: int) -> int:
    if gcd(q, p) != 1:
        raise ValueError("q and p must be coprime")
    k, x = 1, q % p
    while x != 1:
        x = x * q % p
        k += 1
    return k


def primitive_prime_divisors(q: int, e: int) -> tuple[list[int], int]:
    """Primes dividing q^e - 1 but no q^i - 1 with i < e, and their product with multiplicity."""
    if q < 2 or e < 1:
        raise ValueError("need q >= 2 and e >= 1")
    n = q**e - 1
    if n == 1:  # q = 2, e = 1
        return [], 1
    primes = []
    phi = 1
    for p, k in sorted(factorint(n).items()):
        if multiplicative_order(q, p) == e:
            primes.append(p)
            phi *= p**k
    return primes, phi


# ---------------------------------------------------------------- screening


@dataclass
class ExtensionCheck:
    b: int
    rhs: QSqrt2
    inequality_holds: bool
    b_is_gcd: bool


@dataclass
class BConstraintReport:
    d: int
    e: int
    g: int
    gcd_below_e: bool
    e_above_half_d: bool
    divisibility_tests: list[tuple[int, int, bool]] = field(default_factory=list)  # (b, x, divides)

    @property
    def ok(self) -> bool:
        return self.gcd_below_e and self.e_above_half_d and not any(t[2] for t in self.divisibility_tests)


@dataclass
class ScreenReport:
    d: int
    e: int
    target: int
    identity_holds: bool
    e_above_half_d: bool
    ppds: list[int]
    phi_star: int
    phi_star_divides_target: bool
    classical_bound: QSqrt2
    classical_bound_excludes: bool
    extension_checks: list[ExtensionCheck]
    b_constraints: BConstraintReport
    imprimitive_candidates: list[tuple[int, int]]
    target_factorisation: dict[int, int]
    computed_large_prime: int | None = None
    printed_prime: int | None = None
    deferred_to: str | None = None

    @property
    def survives(self) -> bool:
        """True would mean the arithmetic fails to exclude d."""
        return (not self.classical_bound_excludes) or any(c.inequality_holds for c in self.extension_checks)

    @property
    def consistent(self) -> bool:
        return (self.identity_holds and self.e_above_half_d and self.phi_star_divides_target
                and self.b_constraints.ok and not self.survives)


def _check_d(d: int) -> None:
    if d % 3 or d <= 12:
        raise ScreeningError(f"d must be a multiple of 3 greater than 12, got {d}")
    if d > MAX_D:
        raise ScreeningError(f"d = {d} exceeds the scanned budget {MAX_D}")


def check_b_constraints(d: int, e: int | None = None) -> BConstraintReport:
    _check_d(d)
    if e is None:
        e = 2 * d // 3 - 2
    if e != 2 * d // 3 - 2:
        raise ScreeningError("e must equal 2d/3 - 2")
    g = gcd(d, e)
    target = 2 ** (d // 3) + 2
    tests = []
    for b in divisors(g):
        if b < 2:
            continue
        for x in divisors(b):
            if target % x:
                continue  # the index (2^(d/3)+2)/x must be an integer
            tests.append((b, x, (2 * (2**b - 1)) % (target // x) == 0))
    return BConstraintReport(d, e, g, g < e, 2 * e > d, tests)


def screen_dimension(d: int) -> ScreenReport:
    _check_d(d)
    e = 2 * d // 3 - 2
    target = 2 ** (d // 3) + 2
    identity = e % 2 == 0 and target == 2 * (2 ** (e // 2) + 1)
    ppds, phi = primitive_prime_divisors(2, e)
    # (2^(d/2)+1)(2^(d/2-1)-1), with half-integer exponents when d is odd
    bound = (QSqrt2.two_power(d) + 1) * (QSqrt2.two_power(d - 2) - 1)
    excludes = not (_lift(target) > bound)
    g = gcd(d, e)
    ext = []
    for b in divisors(g):
        if b < 2:
            continue
        rhs = (QSqrt2.two_power(b * d) + 1) * (QSqrt2.two_power(b * (d - 2)) - 1) / (2**b - 1)
        ext.append(ExtensionCheck(b, rhs, _lift(target) > rhs, b == g))
    fact = factorint(target)
    report = ScreenReport(
        d=d,
        e=e,
        target=target,
        identity_holds=identity,
        e_above_half_d=2 * e > d,
        ppds=ppds,
        phi_star=phi,
        phi_star_divides_target=target % phi == 0,
        classical_bound=bound,
        classical_bound_excludes=excludes,
        extension_checks=ext,
        b_constraints=check_b_constraints(d, e),
        imprimitive_candidates=[(e, d)] if IMPRIMITIVE.get(d) == e else [],
        target_factorisation=dict(sorted(fact.items())),
    )
    if report.imprimitive_candidates:
        report.computed_large_prime = max(fact)
        report.printed_prime = PRINTED_PRIME[d]
        report.deferred_to = DEFERRED_THEOREMS[d]
    return report


def parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(".."))
    except ValueError:
        raise ScreeningError(f"range must look like LO..HI, got {text!r}") from None
    if lo > hi:
        raise ScreeningError("empty range")
    return lo, hi


def screen_range(lo: int = 13, hi: int = MAX_D) -> list[ScreenReport]:
    if hi > MAX_D:
        raise ScreeningError(f"upper end {hi} exceeds the budget {MAX_D}")
    return [screen_dimension(d) for d in range(max(lo, 13), hi + 1) if d % 3 == 0]
