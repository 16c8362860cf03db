"""Exact linear algebra over GF(2^f) on packed row vectors.

A vector of length ``n`` over a field with ``f`` bits per element is one
Python integer: coordinate ``c`` occupies bits ``[(n-1-c)*f, (n-c)*f)``.
Integer order is therefore lexicographic order on coordinate codes, and
vector addition is XOR in every characteristic-2 field.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Sequence

from .field import GF2, Field


class DimensionMismatch(ValueError):
    pass


# ---------------------------------------------------------------- packed vectors


def pack(coords: Sequence[int], field: Field) -> int:
    v = 0
    for c in coords:
        if not 0 <= c < field.q:
            raise ValueError(f"{c} is not an element of {field}")
        v = (v << field.f) | c
    return v


def unpack(v: int, n: int, field: Field) -> tuple[int, ...]:
    f, mask = field.f, field.q - 1
    return tuple((v >> ((n - 1 - c) * f)) & mask for c in range(n))


def coord(v: int, c: int, n: int, field: Field) -> int:
    return (v >> ((n - 1 - c) * field.f)) & (field.q - 1)


def scale(v: int, s: int, n: int, field: Field) -> int:
    """Multiply every coordinate of ``v`` by the scalar ``s``."""
    if s == 1 or v == 0:
        return v
    if s == 0:
        return 0
    f, mask = field.f, field.q - 1
    out = 0
    for c in range(n):
        shift = (n - 1 - c) * f
        x = (v >> shift) & mask
        if x:
            out |= field.mul(x, s) << shift
    return out


def leading(v: int, n: int, field: Field) -> tuple[int, int]:
    """(column, value) of the first nonzero coordinate of a nonzero vector."""
    f = field.f
    col = n - 1 - (v.bit_length() - 1) // f
    return col, coord(v, col, n, field)


def normalize(v: int, n: int, field: Field) -> int:
    """Scale so the first nonzero coordinate is 1."""
    _, lead = leading(v, n, field)
    return scale(v, field.inv(lead), n, field)


def frobenius_vec(v: int, k: int, n: int, field: Field) -> int:
    if k % field.f == 0:
        return v
    return pack([field.frobenius(x, k) for x in unpack(v, n, field)], field)


def vecmat(v: int, rows: Sequence[int], n: int, field: Field) -> int:
    """Row vector ``v`` (length len(rows)) times the matrix with packed ``rows``."""
    m = len(rows)
    out = 0
    if field.f == 1:
        for j in range(m):
            if (v >> (m - 1 - j)) & 1:
                out ^= rows[j]
        return out
    for j, x in enumerate(unpack(v, m, field)):
        if x:
            out ^= scale(rows[j], x, n, field)
    return out


def span_elements(basis: Sequence[int], n: int, field: Field) -> list[int]:
    """All vectors in the span of ``basis`` (q^k of them, including 0)."""
    vecs = [0]
    if field.f == 1:
        for b in basis:
            vecs += [x ^ b for x in vecs]
        return vecs
    for b in basis:
        multiples = [scale(b, s, n, field) for s in range(1, field.q)]
        vecs = vecs + [x ^ m for x in vecs for m in multiples]
    return vecs


# ---------------------------------------------------------------- echelon forms


def rref_rows(rows: Iterable[int], n: int, field: Field) -> tuple[int, ...]:
    """Canonical reduced row echelon form of the row space, zero rows dropped.

    Rows come out with strictly increasing pivot columns, which for packed
    integers means strictly decreasing values.
    """
    f = field.f
    pivots: dict[int, int] = {}
    if f == 1:
        for r in rows:
            for p, b in pivots.items():
                if (r >> (n - 1 - p)) & 1:
                    r ^= b
            if not r:
                continue
            p = n - r.bit_length()
            bit = n - 1 - p
            for q_, b in pivots.items():
                if (b >> bit) & 1:
                    pivots[q_] = b ^ r
            pivots[p] = r
        return tuple(sorted(pivots.values(), reverse=True))
    for r in rows:
        for p, b in pivots.items():
            x = coord(r, p, n, field)
            if x:
                r ^= scale(b, x, n, field)
        if not r:
            continue
        p, lead = leading(r, n, field)
        r = scale(r, field.inv(lead), n, field)
        for q_, b in pivots.items():
            x = coord(b, p, n, field)
            if x:
                pivots[q_] = b ^ scale(r, x, n, field)
        pivots[p] = r
    return tuple(sorted(pivots.values(), reverse=True))


def rank_rows(rows: Iterable[int], n: int, field: Field = GF2) -> int:
    if field.f == 1:
        return gf2_rank(rows)
    return len(rref_rows(rows, n, field))


def gf2_rank(rows: Iterable[int]) -> int:
    """Rank over GF(2) via an xor basis keyed by leading bit."""
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length()
            b = basis.get(top)
            if b is None:
                basis[top] = r
                break
            r ^= b
    return len(basis)


def gf2_nullspace(equations: Sequence[int], nvars: int) -> list[int]:
    """Basis of {x : popcount(e & x) even for every equation e}.

    Unknown ``j`` is bit ``nvars-1-j``; solutions use the same packing.
    """
    ech = rref_rows(equations, nvars, GF2)
    pivot_cols = [nvars - r.bit_length() for r in ech]
    pivot_set = set(pivot_cols)
    sols = []
    for free in range(nvars):
        if free in pivot_set:
            continue
        x = 1 << (nvars - 1 - free)
        for r, p in zip(ech, pivot_cols):
            if (r >> (nvars - 1 - free)) & 1:
                x |= 1 << (nvars - 1 - p)
        sols.append(x)
    return sols


# ---------------------------------------------------------------- matrices


@dataclass(frozen=True)
class MatrixGF:
    """Dense matrix over GF(2^f), one packed integer per row."""

    field: Field
    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise DimensionMismatch(f"expected {self.nrows} rows, got {len(self.rows)}")
        limit = 1 << (self.ncols * self.field.f)
        for r in self.rows:
            if not 0 <= r < limit:
                raise ValueError("row does not fit the declared column count")

    @classmethod
    def from_entries(cls, entries: Sequence[Sequence[int]], field: Field = GF2, ncols: int | None = None) -> "MatrixGF":
        entries = [list(r) for r in entries]
        if ncols is None:
            ncols = len(entries[0]) if entries else 0
        for r in entries:
            if len(r) != ncols:
                raise DimensionMismatch("ragged matrix")
        return cls(field, len(entries), ncols, tuple(pack(r, field) for r in entries))

    @classmethod
    def identity(cls, n: int, field: Field = GF2) -> "MatrixGF":
        return cls(field, n, n, tuple(1 << ((n - 1 - i) * field.f) for i in range(n)))

    @classmethod
    def zero(cls, nrows: int, ncols: int, field: Field = GF2) -> "MatrixGF":
        return cls(field, nrows, ncols, (0,) * nrows)

    def entries(self) -> list[list[int]]:
        return [list(unpack(r, self.ncols, self.field)) for r in self.rows]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return coord(self.rows[i], j, self.ncols, self.field)

    def __matmul__(self, other: "MatrixGF") -> "MatrixGF":
        if self.field is not other.field or self.ncols != other.nrows:
            raise DimensionMismatch("incompatible matrix product")
        rows = tuple(vecmat(r, other.rows, other.ncols, self.field) for r in self.rows)
        return MatrixGF(self.field, self.nrows, other.ncols, rows)

    def __add__(self, other: "MatrixGF") -> "MatrixGF":
        if (self.field, self.nrows, self.ncols) != (other.field, other.nrows, other.ncols):
            raise DimensionMismatch("incompatible matrix sum")
        return MatrixGF(self.field, self.nrows, self.ncols, tuple(a ^ b for a, b in zip(self.rows, other.rows)))

    def __pow__(self, k: int) -> "MatrixGF":
        if self.nrows != self.ncols:
            raise DimensionMismatch("power of a non-square matrix")
        if k < 0:
            return self.inverse() ** (-k)
        result = MatrixGF.identity(self.nrows, self.field)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def transpose(self) -> "MatrixGF":
        e = self.entries()
        return MatrixGF.from_entries([[e[i][j] for i in range(self.nrows)] for j in range(self.ncols)], self.field, self.nrows)

    def frobenius(self, k: int) -> "MatrixGF":
        """Apply x ↦ x^(2^k) entrywise."""
        return MatrixGF(self.field, self.nrows, self.ncols,
                        tuple(frobenius_vec(r, k, self.ncols, self.field) for r in self.rows))

    def rank(self) -> int:
        return rank_rows(self.rows, self.ncols, self.field)

    def is_invertible(self) -> bool:
        return self.nrows == self.ncols and self.rank() == self.nrows

    def inverse(self) -> "MatrixGF":
        n = self.nrows
        if n != self.ncols:
            raise DimensionMismatch("inverse of a non-square matrix")
        F = self.field
        # row-reduce [A | I]; columns of A sit in the high bits
        aug = [(r << (n * F.f)) | (1 << ((n - 1 - i) * F.f)) for i, r in enumerate(self.rows)]
        ech = rref_rows(aug, 2 * n, F)
        if len(ech) < n or any(leading(r, 2 * n, F)[0] >= n for r in ech[:n]):
            raise ZeroDivisionError("matrix is singular")
        mask = (1 << (n * F.f)) - 1
        return MatrixGF(F, n, n, tuple(r & mask for r in ech))

    def apply(self, v: int) -> int:
        """Row vector times this matrix."""
        return vecmat(v, self.rows, self.ncols, self.field)

    def __str__(self) -> str:
        return "\n".join(" ".join(str(x) for x in row) for row in self.entries())


def rref(m: MatrixGF) -> tuple[MatrixGF, int]:
    """Canonical RREF of ``m`` with zero rows removed, and the rank."""
    rows = rref_rows(m.rows, m.ncols, m.field)
    return MatrixGF(m.field, len(rows), m.ncols, rows), len(rows)


def companion_embed(b: int, e: int, field: Field | None = None) -> MatrixGF:
    """Matrix over GF(2) of multiplication by ``e`` on GF(2^b).

    Coordinates follow the packed convention: row ``j`` is the image of
    ``x^(b-1-j)``, so the row vector of an element is its own code and
    ``pack(code) @ M == code * e``.
    """
    from .field import make_field

    if field is None:
        field = make_field(b)
    if field.f != b:
        raise DimensionMismatch(f"field {field} does not have degree {b}")
    if not 0 <= e < field.q:
        raise ValueError(f"{e} is not an element of {field}")
    rows = tuple(field.mul(1 << (b - 1 - j), e) for j in range(b))
    return MatrixGF(GF2, b, b, rows)


# ---------------------------------------------------------------- subspaces


@dataclass(frozen=True)
class Subspace:
    """A subspace of F^n held as its canonical RREF basis.

    Value equality coincides with subspace equality.
    """

    field: Field
    ambient_dim: int
    basis: tuple[int, ...]

    @classmethod
    def span(cls, vectors: Iterable[int], ambient_dim: int, field: Field = GF2) -> "Subspace":
        return cls(field, ambient_dim, rref_rows(vectors, ambient_dim, field))

    @classmethod
    def from_matrix(cls, m: MatrixGF) -> "Subspace":
        return cls.span(m.rows, m.ncols, m.field)

    @classmethod
    def zero(cls, ambient_dim: int, field: Field = GF2) -> "Subspace":
        return cls(field, ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim: int, field: Field = GF2) -> "Subspace":
        return cls.from_matrix(MatrixGF.identity(ambient_dim, field))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def matrix(self) -> MatrixGF:
        return MatrixGF(self.field, self.dim, self.ambient_dim, self.basis)

    def _check(self, other: "Subspace") -> None:
        if self.field is not other.field or self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch(
                f"subspaces live in different spaces: {self.field}^{self.ambient_dim} vs {other.field}^{other.ambient_dim}")

    def __contains__(self, v: int) -> bool:
        return self.reduce(v) == 0

    def reduce(self, v: int) -> int:
        """Remainder of ``v`` modulo the canonical basis."""
        n, F = self.ambient_dim, self.field
        for b in self.basis:
            p, _ = leading(b, n, F)
            x = coord(v, p, n, F)
            if x:
                v ^= scale(b, x, n, F)
        return v

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.span(self.basis + other.basis, self.ambient_dim, self.field)

    def __le__(self, other: "Subspace") -> bool:
        self._check(other)
        return all(b in other for b in self.basis)

    def intersection_dim(self, other: "Subspace") -> int:
        self._check(other)
        return self.dim + other.dim - rank_rows(self.basis + other.basis, self.ambient_dim, self.field)

    def intersection(self, other: "Subspace") -> "Subspace":
        """Zassenhaus: row-reduce [[u, u], [v, 0]] and read off the tail rows."""
        self._check(other)
        n, F = self.ambient_dim, self.field
        shift = n * F.f
        rows = [(u << shift) | u for u in self.basis] + [v << shift for v in other.basis]
        ech = rref_rows(rows, 2 * n, F)
        low = (1 << shift) - 1
        return Subspace.span([r & low for r in ech if r >> shift == 0], n, F)

    def image(self, m: MatrixGF) -> "Subspace":
        if m.nrows != self.ambient_dim or m.field is not self.field:
            raise DimensionMismatch("matrix does not act on this space")
        return Subspace.span((m.apply(b) for b in self.basis), m.ncols, self.field)

    def elements(self) -> list[int]:
        return span_elements(self.basis, self.ambient_dim, self.field)

    def nonzero_count(self) -> int:
        return self.field.q ** self.dim - 1

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, q={self.field.q}, basis={[hex(b) for b in self.basis]})"


def subspace_sum(u: Subspace, v: Subspace) -> Subspace:
    return u + v


def intersection_dim(u: Subspace, v: Subspace) -> int:
    return u.intersection_dim(v)


def all_vectors(n: int, field: Field = GF2) -> range:
    """Every vector of F^n, in lexicographic (= integer) order."""
    return range(1 << (n * field.f))


def enumerate_subspaces(n: int, k: int, field: Field = GF2) -> Iterator[Subspace]:
    """Every k-dimensional subspace of F^n, once each, via RREF pivot patterns."""
    from itertools import combinations

    q = field.q
    for pivots in combinations(range(n), k):
        # free positions: for row i, columns > pivot_i that are not pivots
        free = [(i, c) for i, p in enumerate(pivots) for c in range(p + 1, n) if c not in pivots]
        for values in product(range(q), repeat=len(free)):
            ent = [[0] * n for _ in range(k)]
            for i, p in enumerate(pivots):
                ent[i][p] = 1
            for (i, c), x in zip(free, values):
                ent[i][c] = x
            yield Subspace(field, n, tuple(pack(r, field) for r in ent))


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


# ---------------------------------------------------------------- GF(2) matrix algebras
# A GF(2) matrix here is a tuple of row ints, column j at bit ncols-1-j.


def gf2_matmul(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    n = len(b)
    out = []
    for row in a:
        v = 0
        for j in range(n):
            if (row >> (n - 1 - j)) & 1:
                v ^= b[j]
        out.append(v)
    return tuple(out)


def gf2_identity(d: int) -> tuple[int, ...]:
    return tuple(1 << (d - 1 - i) for i in range(d))


def gf2_span_matrices(basis: Sequence[Sequence[int]], d: int) -> list[tuple[int, ...]]:
    out = [tuple([0] * d)]
    for b in basis:
        out += [tuple(x ^ y for x, y in zip(e, b)) for e in out]
    return out


def gf2_field_defect(basis: Sequence[Sequence[int]], d: int) -> str | None:
    """Why the span of ``basis`` (d x d matrices) is not a field, or None."""
    elems = gf2_span_matrices(basis, d)
    members = set(elems)
    if len(members) != len(elems):
        return "basis is linearly dependent"
    if gf2_identity(d) not in members:
        return "identity missing"
    zero = tuple([0] * d)
    for a in elems:
        if a != zero and gf2_rank(a) != d:
            return "a nonzero element is singular"
        for b in elems:
            ab = gf2_matmul(a, b)
            if ab not in members:
                return "not closed under multiplication"
            if ab != gf2_matmul(b, a):
                return "not commutative"
    return None
