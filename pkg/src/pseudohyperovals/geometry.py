"""Projective spaces PG(d-1, q) over binary fields."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .field import GF2, Field
from .linalg import (
    DimensionMismatch,
    MatrixGF,
    Subspace,
    frobenius_vec,
    leading,
    normalize,
    pack,
    rank_rows,
    scale,
    unpack,
)

DEFAULT_POINT_CAP = 10**6


class GuardExceeded(RuntimeError):
    """A desk-scale size guard would be exceeded."""


class NotAFrame(ValueError):
    pass


@dataclass(frozen=True, order=True)
class ProjectivePoint:
    """A point of PG(d-1, q); ``vec`` is the packed normalized coordinate vector."""

    vec: int
    d: int
    field: Field

    @classmethod
    def of(cls, coords: Sequence[int] | int, d: int | None = None, field: Field = GF2) -> "ProjectivePoint":
        if isinstance(coords, int):
            if d is None:
                raise ValueError("a packed vector needs its dimension")
            v = coords
        else:
            d = len(coords)
            v = pack(coords, field)
        if v == 0:
            raise ValueError("the zero vector is not a projective point")
        return cls(normalize(v, d, field), d, field)

    @property
    def coords(self) -> tuple[int, ...]:
        return unpack(self.vec, self.d, self.field)

    def subspace(self) -> Subspace:
        return Subspace(self.field, self.d, (self.vec,))

    def __repr__(self) -> str:
        return f"P{self.coords}"


def pg_points(d: int, field: Field, cap: int = DEFAULT_POINT_CAP) -> list[ProjectivePoint]:
    """All points of PG(d-1, q) in lexicographic order of normalized coordinates."""
    if d < 1:
        raise ValueError("d must be at least 1")
    q = field.q
    count = (q**d - 1) // (q - 1)
    if count > cap:
        raise GuardExceeded(f"PG({d - 1},{q}) has {count} points, above the cap {cap}")
    f = field.f
    pts = []
    for lead_col in range(d - 1, -1, -1):
        tail_len = d - 1 - lead_col
        head = 1 << (tail_len * f)
        for tail in range(q**tail_len):
            pts.append(ProjectivePoint(head | tail, d, field))
    return pts


def _same_space(points: Iterable[ProjectivePoint]) -> tuple[int, Field]:
    points = list(points)
    d, field = points[0].d, points[0].field
    for p in points[1:]:
        if p.d != d or p.field is not field:
            raise DimensionMismatch("points live in different projective spaces")
    return d, field


def collinear(p1: ProjectivePoint, p2: ProjectivePoint, p3: ProjectivePoint) -> bool:
    d, field = _same_space((p1, p2, p3))
    return rank_rows((p1.vec, p2.vec, p3.vec), d, field) <= 2


def in_general_position(points: Sequence[ProjectivePoint]) -> bool:
    """Every min(len, d) of the points are independent."""
    d, field = _same_space(points)
    k = min(len(points), d)
    return all(rank_rows([p.vec for p in sub], d, field) == k for sub in combinations(points, k))


# ---------------------------------------------------------------- field reduction


def reduce_vector(v: int, n: int, field: Field) -> int:
    """Coordinates of a vector of GF(2^b)^n over GF(2).

    Each coordinate becomes its b polynomial-basis coefficients, highest
    degree first.  With the packed encoding this is the identity on the
    integer, which is exactly why the encoding was chosen; the loop keeps the
    coordinate map explicit.
    """
    out = 0
    for x in unpack(v, n, field):
        out = (out << field.f) | x
    return out


def field_reduce(s: Subspace | ProjectivePoint, b: int | None = None) -> Subspace:
    """Image over GF(2) of a subspace of GF(2^b)^(r+1).

    The GF(2)-span of ``x^j * v`` for basis vectors ``v`` and ``j < b``.
    """
    if isinstance(s, ProjectivePoint):
        s = s.subspace()
    field, n = s.field, s.ambient_dim
    if b is None:
        b = field.f
    if b != field.f:
        raise DimensionMismatch(f"subspace is over GF(2^{field.f}), not GF(2^{b})")
    vecs = [reduce_vector(scale(v, 1 << j, n, field), n, field) for v in s.basis for j in range(b)]
    return Subspace.span(vecs, n * b, GF2)


# ---------------------------------------------------------------- collineations


def _canonical_matrix(m: MatrixGF) -> MatrixGF:
    """Scale so the first nonzero entry in row-major order is 1."""
    F = m.field
    for r in m.rows:
        if r:
            _, lead = leading(r, m.ncols, F)
            s = F.inv(lead)
            return MatrixGF(F, m.nrows, m.ncols, tuple(scale(x, s, m.ncols, F) for x in m.rows))
    raise ZeroDivisionError("zero matrix")


@dataclass(frozen=True)
class Collineation:
    """p ↦ (p^σ)·A with σ: x ↦ x^(2^k); the matrix is kept projectively canonical."""

    matrix: MatrixGF
    field_auto: int = 0

    def __post_init__(self):
        m = self.matrix
        if m.nrows != m.ncols:
            raise DimensionMismatch("collineation matrix must be square")
        object.__setattr__(self, "field_auto", self.field_auto % m.field.f)
        object.__setattr__(self, "matrix", _canonical_matrix(m))

    @property
    def field(self) -> Field:
        return self.matrix.field

    @property
    def d(self) -> int:
        return self.matrix.nrows

    def apply_vec(self, v: int) -> int:
        w = frobenius_vec(v, self.field_auto, self.d, self.field)
        return normalize(self.matrix.apply(w), self.d, self.field)

    def __call__(self, p: ProjectivePoint) -> ProjectivePoint:
        return ProjectivePoint(self.apply_vec(p.vec), self.d, self.field)

    def __mul__(self, other: "Collineation") -> "Collineation":
        """Apply self first, then other."""
        a = self.matrix.frobenius(other.field_auto)
        return Collineation(a @ other.matrix, self.field_auto + other.field_auto)

    def inverse(self) -> "Collineation":
        k = self.field_auto
        return Collineation(self.matrix.inverse().frobenius(-k), -k)

    @classmethod
    def identity(cls, d: int, field: Field) -> "Collineation":
        return cls(MatrixGF.identity(d, field), 0)


def _solve_combination(rows: Sequence[int], target: int, d: int, field: Field) -> list[int]:
    """Coefficients c with sum c_i rows_i = target (rows independent)."""
    basis = MatrixGF(field, d, d, tuple(rows))
    coeffs = MatrixGF(field, 1, d, (target,)) @ basis.inverse()
    return list(unpack(coeffs.rows[0], d, field))


def collineation_from_frames(src: Sequence[ProjectivePoint], dst: Sequence[ProjectivePoint], field_auto: int = 0) -> Collineation:
    """The unique collineation with automorphism ``field_auto`` taking src[i] to dst[i]."""
    d, field = _same_space(list(src) + list(dst))
    if len(src) != d + 1 or len(dst) != d + 1:
        raise NotAFrame(f"a frame of PG({d - 1},{field.q}) has {d + 1} points")
    for name, pts in (("source", src), ("target", dst)):
        if not in_general_position(pts):
            raise NotAFrame(f"{name} points are not in general position")
    k = field_auto % field.f
    s_rows = [frobenius_vec(p.vec, k, d, field) for p in src]
    t_rows = [p.vec for p in dst]
    lam = _solve_combination(s_rows[:d], s_rows[d], d, field)
    mu = _solve_combination(t_rows[:d], t_rows[d], d, field)
    if 0 in lam or 0 in mu:  # pragma: no cover - excluded by the frame check
        raise RuntimeError("frame normalization produced a zero scalar")
    left = MatrixGF(field, d, d, tuple(scale(r, c, d, field) for r, c in zip(s_rows[:d], lam)))
    right = MatrixGF(field, d, d, tuple(scale(r, c, d, field) for r, c in zip(t_rows[:d], mu)))
    col = Collineation(left.inverse() @ right, k)
    for p, q in zip(src, dst):
        if col(p) != q:  # pragma: no cover - internal consistency
            raise RuntimeError("frame solver produced a wrong collineation")
    return col


def standard_frame(d: int, field: Field) -> list[ProjectivePoint]:
    pts = [ProjectivePoint(1 << ((d - 1 - i) * field.f), d, field) for i in range(d)]
    pts.append(ProjectivePoint.of([1] * d, field=field))
    return pts
