"""Arithmetic in GF(2^f).

Elements are integers ``0 .. q-1``; bit ``j`` of an element is the
coefficient of ``x^j`` in its polynomial representative.  Fields are
interned: ``make_field(4) is make_field(4)``.
"""

from __future__ import annotations

from functools import lru_cache

MAX_DEGREE = 16


class FieldError(ValueError):
    pass


def poly_degree(p: int) -> int:
    return p.bit_length() - 1


def poly_mulmod(a: int, b: int, mod: int) -> int:
    deg = poly_degree(mod)
    top = 1 << deg
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= mod
    return r


def poly_mod(a: int, m: int) -> int:
    dm = poly_degree(m)
    while a and poly_degree(a) >= dm:
        a ^= m << (poly_degree(a) - dm)
    return a


def is_irreducible(p: int) -> bool:
    """Trial division by every polynomial of degree <= deg(p)/2."""
    deg = poly_degree(p)
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for cand in range(1 << d, 1 << (d + 1)):
            if poly_mod(p, cand) == 0:
                return False
    return True


def smallest_irreducible(f: int) -> int:
    for p in range(1 << f, 1 << (f + 1)):
        if is_irreducible(p):
            return p
    raise FieldError(f"no irreducible polynomial of degree {f}")  # pragma: no cover


class Field:
    """GF(2^f) with a fixed defining polynomial (bit mask)."""

    __slots__ = ("f", "poly", "q", "_exp", "_log", "_gen", "_table")

    def __init__(self, f: int, poly: int):
        self.f = f
        self.poly = poly
        self.q = 1 << f
        self._table = None
        if f == 1:
            self._gen = 1
            self._exp = [1, 1]
            self._log = [None, 0]
        else:
            self._gen, self._exp, self._log = self._find_generator()
        if self.q <= 256:
            self._table = [[self._slow_mul(a, b) for b in range(self.q)] for a in range(self.q)]

    def _find_generator(self):
        order = self.q - 1
        for g in range(2, self.q):
            exp = [1]
            x = 1
            for _ in range(order - 1):
                x = poly_mulmod(x, g, self.poly)
                if x == 1:
                    break
                exp.append(x)
            if len(exp) == order:
                log = [None] * self.q
                for k, v in enumerate(exp):
                    log[v] = k
                exp = exp + exp
                return g, exp, log
        raise FieldError("multiplicative group is not cyclic")  # pragma: no cover

    def __repr__(self) -> str:
        return f"GF(2^{self.f}, poly={bin(self.poly)})"

    def __reduce__(self):
        return make_field, (self.f, self.poly)

    @property
    def generator(self) -> int:
        """An element of multiplicative order q - 1."""
        return self._gen

    def elements(self) -> range:
        return range(self.q)

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    def _slow_mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.f == 1:
            return 1
        return self._exp[self._log[a] + self._log[b]]

    def mul(self, a: int, b: int) -> int:
        if self._table is not None:
            return self._table[a][b]
        return self._slow_mul(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        if self.f == 1:
            return 1
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k == 0:
                return 1
            if k < 0:
                raise ZeroDivisionError("0 has no inverse")
            return 0
        if self.f == 1:
            return 1
        return self._exp[(self._log[a] * k) % (self.q - 1)]

    def frobenius(self, a: int, k: int = 1) -> int:
        """a ↦ a^(2^k)."""
        return self.pow(a, 1 << (k % self.f))

    def order(self, a: int) -> int:
        """Multiplicative order of a nonzero element."""
        if a == 0:
            raise ValueError("0 has no multiplicative order")
        if self.f == 1:
            return 1
        from math import gcd

        return (self.q - 1) // gcd(self._log[a], self.q - 1)


@lru_cache(maxsize=None)
def _interned(f: int, poly: int) -> Field:
    return Field(f, poly)


def make_field(f: int, defining_poly: int | None = None) -> Field:
    """Return GF(2^f).

    Without ``defining_poly`` the numerically smallest irreducible mask of
    degree f is used, so encodings are reproducible.
    """
    if not isinstance(f, int) or f < 1:
        raise FieldError(f"extension degree must be a positive integer, got {f!r}")
    if f > MAX_DEGREE:
        raise FieldError(f"extension degree {f} exceeds the supported maximum {MAX_DEGREE}")
    if defining_poly is None:
        defining_poly = smallest_irreducible(f)
    if poly_degree(defining_poly) != f:
        raise FieldError(f"polynomial {bin(defining_poly)} does not have degree {f}")
    if not is_irreducible(defining_poly):
        raise FieldError(f"polynomial {bin(defining_poly)} is reducible over GF(2)")
    return _interned(f, defining_poly)


GF2 = make_field(1)
