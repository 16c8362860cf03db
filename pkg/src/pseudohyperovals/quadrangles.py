"""Generalised quadrangles T*_{r,m}(S) in the vector model.

Points are the vectors of V(r+1, q), stored as their packed integers, so
point ``v`` has index ``v``.  Lines are the cosets ``v + S_i``; a line is
named by its space index and its smallest vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .field import GF2, Field
from .geometry import GuardExceeded, ProjectivePoint, reduce_vector
from .hyperovals import Hyperoval, PseudoHyperoval, check_pseudo_hyperoval
from .linalg import (
    DimensionMismatch,
    MatrixGF,
    Subspace,
    gf2_field_defect,
    gf2_nullspace,
    gf2_span_matrices,
    scale,
)

DEFAULT_POINT_GUARD = 1 << 20


class GQAxiomError(ValueError):
    """An incidence structure failed a generalised-quadrangle axiom."""

    def __init__(self, axiom: str, witness: tuple, detail: str = ""):
        self.axiom = axiom
        self.witness = witness
        super().__init__(f"{axiom} fails at {witness}" + (f": {detail}" if detail else ""))


class KernelFieldError(ArithmeticError):
    """The stabilising algebra of the subspaces is not a field."""


class TheoremViolation(AssertionError):
    """Line-, flag- and element-transitivity disagreed."""


@dataclass(frozen=True)
class GqOrder:
    s: int
    t: int

    @property
    def thick(self) -> bool:
        return self.s >= 2 and self.t >= 2

    @property
    def points(self) -> int:
        return (self.s + 1) * (self.s * self.t + 1)

    @property
    def lines(self) -> int:
        return (self.t + 1) * (self.s * self.t + 1)


class IncidenceStructure:
    """Points ``0..npoints-1``; each line is a sorted array of point indices."""

    def __init__(self, npoints: int, lines: np.ndarray | Sequence[Sequence[int]]):
        self.npoints = npoints
        if isinstance(lines, np.ndarray):
            self.lines = [np.asarray(r, dtype=np.int64) for r in lines]
        else:
            self.lines = [np.sort(np.asarray(r, dtype=np.int64)) for r in lines]
        self._point_lines = None

    @property
    def nlines(self) -> int:
        return len(self.lines)

    @property
    def point_lines(self) -> list[np.ndarray]:
        if self._point_lines is None:
            acc: list[list[int]] = [[] for _ in range(self.npoints)]
            for i, pts in enumerate(self.lines):
                for p in pts.tolist():
                    acc[p].append(i)
            self._point_lines = [np.asarray(a, dtype=np.int64) for a in acc]
        return self._point_lines

    def without_line(self, index: int) -> "IncidenceStructure":
        return IncidenceStructure(self.npoints, [l for i, l in enumerate(self.lines) if i != index])

    def line_sizes(self) -> set[int]:
        return {len(l) for l in self.lines}

    def point_degrees(self) -> set[int]:
        return {len(pl) for pl in self.point_lines}


class GlrStructure(IncidenceStructure):
    """T*_{r,m}(S): vectors of V(r+1, q) and cosets of the spaces in S."""

    def __init__(self, field: Field, r: int, m: int, spaces: Sequence[Subspace], line_keys, line_array):
        super().__init__(field.q ** (r + 1), line_array)
        self.field = field
        self.r = r
        self.m = m
        self.spaces = tuple(spaces)
        self.line_keys = line_keys  # (space index, coset representative)
        self.line_array = line_array
        self.origin = 0

    @property
    def lines_through_origin(self) -> list[int]:
        return [i for i, (_, rep) in enumerate(self.line_keys) if rep == 0]

    def without_line(self, index: int) -> IncidenceStructure:
        return IncidenceStructure(self.npoints, np.delete(self.line_array, index, axis=0))


def build_glr(spaces: Sequence[Subspace], r: int, m: int, field: Field | None = None,
              guard: int = DEFAULT_POINT_GUARD) -> GlrStructure:
    spaces = list(spaces)
    if not spaces:
        raise ValueError("S must be nonempty")
    field = field or spaces[0].field
    for u in spaces:
        if u.field is not field or u.ambient_dim != r + 1:
            raise DimensionMismatch(f"every element must be a subspace of GF({field.q})^{r + 1}")
        if u.dim != m + 1:
            raise DimensionMismatch(f"element of dimension {u.dim}, expected {m + 1}")
    npts = field.q ** (r + 1)
    if npts > guard:
        raise GuardExceeded(f"{npts} points exceed the guard {guard}")
    for (i, u), (j, v) in combinations(enumerate(spaces), 2):
        if u.intersection_dim(v):
            raise ValueError(f"elements {i} and {j} of S intersect nontrivially")
    line_keys = []
    blocks = []
    for i, u in enumerate(spaces):
        elems = np.sort(np.asarray(u.elements(), dtype=np.int64))
        seen = np.zeros(npts, dtype=bool)
        for v in range(npts):
            if seen[v]:
                continue
            coset = np.sort(v ^ elems)
            seen[coset] = True
            line_keys.append((i, v))
            blocks.append(coset)
    return GlrStructure(field, r, m, spaces, line_keys, np.vstack(blocks))


def build_t2star(h: Hyperoval) -> GlrStructure:
    return build_glr([p.subspace() for p in h.points], 2, 0, h.field)


def build_glr_from_pseudo_hyperoval(o: PseudoHyperoval) -> GlrStructure:
    return build_glr(o.elements, 3 * o.n - 1, o.n - 1)


# ---------------------------------------------------------------- verification


def verify_gq(g: IncidenceStructure) -> GqOrder:
    """Check partial linear space, the GQ axiom on every anti-flag, then regularity.

    Returns the order (s, t); raises ``GQAxiomError`` with a witness.
    """
    lines = g.lines
    if not lines:
        raise GQAxiomError("nonempty", ())
    sizes = g.line_sizes()
    uniform = len(sizes) == 1
    point_lines = g.point_lines
    # partial linear space: the lines on p pairwise meet only in p
    for p in range(g.npoints):
        pl = point_lines[p]
        if len(pl) < 2:
            continue
        others = np.concatenate([lines[l] for l in pl])
        others = others[others != p]
        uniq, counts = np.unique(others, return_counts=True)
        if len(uniq) != len(others):
            x = int(uniq[np.argmax(counts > 1)])
            shared = [int(l) for l in pl if x in lines[l]]
            raise GQAxiomError("partial linear space", (p, x), f"points {p} and {x} share lines {shared}")
    for i, l in enumerate(lines):
        if len(l) < 2:
            raise GQAxiomError("partial linear space", (i,), "a line needs at least two points")
    # GQ axiom: each point off a line is collinear with exactly one of its points
    line_arr = np.vstack(lines) if uniform else None
    coll = np.zeros(g.npoints, dtype=bool)
    for p in range(g.npoints):
        coll[:] = False
        for l in point_lines[p]:
            coll[lines[l]] = True
        coll[p] = False
        if uniform:
            counts = coll[line_arr].sum(axis=1)
        else:
            counts = np.array([coll[l].sum() for l in lines])
        counts[point_lines[p]] = 1
        bad = np.flatnonzero(counts != 1)
        if len(bad):
            L = int(bad[0])
            kind = "existence" if counts[L] == 0 else "uniqueness"
            raise GQAxiomError(f"GQ axiom ({kind})", (p, L),
                               f"point {p} is collinear with {int(counts[L])} points of line {L}")
    if not uniform:
        raise GQAxiomError("constant line size", tuple(sorted(sizes)))
    degrees = g.point_degrees()
    if len(degrees) != 1:
        p = next(i for i, pl in enumerate(point_lines) if len(pl) != len(point_lines[0]))
        raise GQAxiomError("constant point degree", (p,), f"degrees {sorted(degrees)}")
    order = GqOrder(sizes.pop() - 1, degrees.pop() - 1)
    if order.points != g.npoints or order.lines != g.nlines:  # pragma: no cover - implied by the axioms
        raise GQAxiomError("counting identities", (g.npoints, g.nlines))
    return order


def gq_params_from_regular(p: int, d: int) -> GqOrder:
    """Order (p^(d/3) - 1, p^(d/3) + 1) of a GQ with a point-regular group of order p^d."""
    from sympy import isprime

    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if d < 3:
        raise ValueError("d must be at least 3")
    if d % 3:
        raise ValueError(f"d = {d} is not divisible by 3; no such quadrangle exists")
    k = p ** (d // 3)
    return GqOrder(k - 1, k + 1)


# ---------------------------------------------------------------- extraction


def extract_pseudo_hyperoval(g: GlrStructure) -> PseudoHyperoval:
    """Stabilisers in the translation group of the lines through the origin."""
    order = verify_gq(g)
    if not order.thick:
        raise GQAxiomError("thickness", (order.s, order.t))
    F = g.field
    d = g.r + 1
    elements = []
    for li in g.lines_through_origin:
        pts = g.lines[li]
        members = set(pts.tolist())
        stab = [v for v in pts.tolist() if all((x ^ v) in members for x in members)]
        if len(stab) != order.s + 1:
            raise RuntimeError(f"line {li}: stabiliser of size {len(stab)}, expected s+1 = {order.s + 1}")
        elements.append(Subspace.span(stab, d, F))
    if d % 3:
        raise DimensionMismatch("ambient dimension is not a multiple of 3")
    n = d // 3
    if len(elements) != order.t + 1:
        raise RuntimeError("origin does not lie on t+1 lines")
    verdict = check_pseudo_hyperoval(elements, n, F.f)
    if not verdict.ok:
        raise RuntimeError(f"extracted set is not a pseudo-hyperoval: {verdict.reason}")
    return PseudoHyperoval(n, F.f, tuple(elements))


def grid_check(o: PseudoHyperoval, i: int, j: int, k: int) -> bool:
    if len({i, j, k}) != 3:
        raise ValueError("grid_check needs three distinct indices")
    U = o.elements
    s = U[i] + U[j]
    return s.intersection_dim(U[k]) == 0 and (s + U[k]).dim == 3 * o.n


# ---------------------------------------------------------------- kernel field


@dataclass(frozen=True)
class KernelField:
    dim: int
    basis: tuple[tuple[int, ...], ...]  # d x d GF(2) matrices as row tuples
    order: int

    def elements(self) -> list[tuple[int, ...]]:
        return gf2_span_matrices(self.basis, self.dim)


def _mat_from_bits(x: int, d: int) -> tuple[int, ...]:
    mask = (1 << d) - 1
    return tuple((x >> ((d - 1 - r) * d)) & mask for r in range(d))


def kernel_field(spaces: Sequence[Subspace], d: int | None = None, guard_log2: int = 16) -> KernelField:
    """{g in End(GF(2)^d) : U_i g ⊆ U_i for all i}, checked to be a field."""
    spaces = list(spaces)
    if not spaces:
        raise ValueError("need at least one subspace")
    d = d or spaces[0].ambient_dim
    for u in spaces:
        if u.field is not GF2 or u.ambient_dim != d:
            raise DimensionMismatch("kernel_field expects subspaces of GF(2)^d")
    nv = d * d
    eqs = []
    for u in spaces:
        checks = gf2_nullspace(u.basis, d)  # h with u.h = 0 for u in U
        for vec in u.basis:
            urows = [r for r in range(d) if (vec >> (d - 1 - r)) & 1]
            for h in checks:
                hcols = [c for c in range(d) if (h >> (d - 1 - c)) & 1]
                e = 0
                for r in urows:
                    for c in hcols:
                        e |= 1 << (nv - 1 - (r * d + c))
                eqs.append(e)
    sols = gf2_nullspace(eqs, nv)
    if len(sols) > guard_log2:
        raise GuardExceeded(f"solution algebra has dimension {len(sols)} > {guard_log2}")
    basis = tuple(_mat_from_bits(x, d) for x in sols)
    k = KernelField(d, basis, 1 << len(basis))
    _check_field(k, d)
    return k


def _check_field(k: KernelField, d: int) -> None:
    defect = gf2_field_defect(k.basis, d)
    if defect:
        raise KernelFieldError(defect)


# ---------------------------------------------------------------- transitivity


@dataclass(frozen=True)
class TransitivityReport:
    o_transitive: bool
    line_transitive: bool
    flag_transitive: bool
    element_orbits: int
    line_orbits: int
    flag_orbits: int

    @property
    def consistent(self) -> bool:
        return self.o_transitive == self.line_transitive == self.flag_transitive


def _orbit_count(n: int, perms: Sequence[np.ndarray]) -> int:
    if not perms:
        return n
    src = np.concatenate([np.arange(n)] * len(perms))
    dst = np.concatenate(perms)
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    count, _ = connected_components(graph, directed=True, connection="weak")
    return int(count)


def point_permutation(rows: Sequence[int], d: int) -> np.ndarray:
    """v ↦ v·g on every vector of GF(2)^d."""
    vecs = np.arange(1 << d, dtype=np.int64)
    img = np.zeros_like(vecs)
    for j, row in enumerate(rows):
        img ^= ((vecs >> (d - 1 - j)) & 1) * row
    return img


def transitivity_report(o: PseudoHyperoval, generators: Sequence, guard: int = DEFAULT_POINT_GUARD) -> TransitivityReport:
    """Orbits of N ⋊ G on elements, lines and flags of T*(O).

    ``generators`` are d x d GF(2) matrices (MatrixGF or row tuples) acting
    on row vectors; they must permute the elements of ``o``.
    """
    if o.f != 1:
        raise DimensionMismatch("transitivity_report works over GF(2); field-reduce first")
    d = 3 * o.n
    gens = [tuple(g.rows) if isinstance(g, MatrixGF) else tuple(g) for g in generators]
    index = {u: i for i, u in enumerate(o.elements)}
    elem_perms = []
    for gi, g in enumerate(gens):
        perm = []
        for u in o.elements:
            img = Subspace.span((_vecmat2(b, g, d) for b in u.basis), d, GF2)
            if img not in index:
                raise ValueError(f"generator {gi} does not stabilise the pseudo-hyperoval")
            perm.append(index[img])
        elem_perms.append(np.asarray(perm))
    gq = build_glr(o.elements, d - 1, o.n - 1, GF2, guard=guard)
    lines = gq.line_array
    s1 = lines.shape[1]
    key_to_line = {(int(a), int(b)): i for i, (a, b) in enumerate(lines[:, :2])}
    point_perms = [np.arange(1 << d, dtype=np.int64) ^ (1 << j) for j in range(d)]
    point_perms += [point_permutation(g, d) for g in gens]
    line_perms, flag_perms = [], []
    for pp in point_perms:
        img = np.sort(pp[lines], axis=1)
        lp = np.fromiter((key_to_line.get((int(a), int(b)), -1) for a, b in img[:, :2]),
                         dtype=np.int64, count=len(img))
        if (lp < 0).any() or not np.array_equal(lines[lp], img):
            raise ValueError("a generator does not map lines to lines")
        line_perms.append(lp)
        # flag (L, pos) -> (lp[L], position of the image point in that line)
        flat_pts = pp[lines].reshape(-1)
        flat_lines = np.repeat(lp, s1)
        pos = (lines[flat_lines] == flat_pts[:, None]).argmax(axis=1)
        flag_perms.append(flat_lines * s1 + pos)
    e_orbits = _orbit_count(len(o.elements), elem_perms)
    l_orbits = _orbit_count(len(lines), line_perms)
    f_orbits = _orbit_count(lines.size, flag_perms)
    report = TransitivityReport(e_orbits == 1, l_orbits == 1, f_orbits == 1, e_orbits, l_orbits, f_orbits)
    if not report.consistent:
        raise TheoremViolation(f"transitivity disagreement: {report}")
    return report


def _vecmat2(v: int, rows: Sequence[int], d: int) -> int:
    out = 0
    for j in range(d):
        if (v >> (d - 1 - j)) & 1:
            out ^= rows[j]
    return out


# ---------------------------------------------------------------- T*_2 in PG(3,q)


def affine_t2star(h: Hyperoval) -> tuple[list[ProjectivePoint], list[frozenset[int]]]:
    """T*_2(H) as defined in PG(3,q): affine points and affine lines meeting H.

    Points are (x0, x1, x2, 1); the plane at infinity is x3 = 0.
    """
    F = h.field
    q = F.q
    points = [ProjectivePoint((v << F.f) | 1, 4, F) for v in range(q**3)]
    idx = {p.vec: i for i, p in enumerate(points)}
    lines = set()
    for p in points:
        base = p.vec
        for hp in h.points:
            direction = hp.vec << F.f  # (h, 0)
            members = frozenset(idx[base ^ scale(direction, lam, 4, F)] for lam in range(q))
            lines.add(members)
    return points, sorted(lines, key=lambda s: sorted(s))


def truncation_witness(h: Hyperoval) -> dict:
    """Check T*_2(H) ≅ T*_{3b-1,b-1}(field-reduced H) via an explicit point map.

    The map sends (x, 1) to x (truncation) and then to its GF(2)-coordinates.
    Every line of T*_2(H) must land exactly on a line of the target.
    """
    from .hyperovals import reduce_hyperoval

    F = h.field
    points, lines = affine_t2star(h)
    target = build_glr_from_pseudo_hyperoval(reduce_hyperoval(h))
    phi = [reduce_vector(p.vec >> F.f, 3, F) for p in points]
    bijective = sorted(phi) == list(range(target.npoints))
    target_lines = {frozenset(l.tolist()) for l in target.lines}
    mapped = [frozenset(phi[i] for i in line) for line in lines]
    lines_ok = all(m in target_lines for m in mapped) and len(set(mapped)) == len(lines) == len(target_lines)
    return {
        "source_points": len(points),
        "source_lines": len(lines),
        "target_points": target.npoints,
        "target_lines": target.nlines,
        "bijective": bijective,
        "lines_preserved": lines_ok,
        "isomorphic": bijective and lines_ok,
        "map": phi,
    }
