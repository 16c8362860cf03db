"""Hyperovals of PG(2,q) and pseudo-hyperovals of PG(3n-1,q)."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations, permutations, product
from typing import Iterable, Sequence

from .field import GF2, Field, make_field
from .geometry import (
    Collineation,
    GuardExceeded,
    ProjectivePoint,
    collinear,
    field_reduce,
    in_general_position,
)
from .linalg import (
    DimensionMismatch,
    MatrixGF,
    Subspace,
    frobenius_vec,
    gaussian_binomial,
    normalize,
    rank_rows,
    scale,
    unpack,
    vecmat,
)

DEFAULT_CANDIDATE_GUARD = 10**6


class CompletionError(RuntimeError):
    """A pseudo-oval did not have exactly one completion."""


@dataclass(frozen=True)
class Hyperoval:
    field: Field
    points: tuple[ProjectivePoint, ...]

    @property
    def q(self) -> int:
        return self.field.q

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class PseudoHyperoval:
    n: int
    f: int
    elements: tuple[Subspace, ...]

    @property
    def q(self) -> int:
        return 1 << self.f

    def __len__(self) -> int:
        return len(self.elements)

    def element_set(self) -> frozenset[Subspace]:
        return frozenset(self.elements)


@dataclass
class Verdict:
    ok: bool
    reason: str = "ok"
    witness: tuple = dc_field(default_factory=tuple)

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------- constructions


def regular_hyperoval(h: int) -> Hyperoval:
    """Conic x0*x2 = x1^2 with its nucleus (0,1,0), in PG(2, 2^h)."""
    F = make_field(h)
    pts = [ProjectivePoint.of((1, t, F.mul(t, t)), field=F) for t in F.elements()]
    pts += [ProjectivePoint.of((0, 1, 0), field=F), ProjectivePoint.of((0, 0, 1), field=F)]
    return Hyperoval(F, tuple(pts))


def lunelli_sce_opolynomial(t: int, F: Field | None = None) -> int:
    """t^12 + t^10 + η^11 t^8 + t^6 + η^2 t^4 + η^9 t^2, η = x mod x^4+x+1."""
    F = F or make_field(4, 0b10011)
    eta = 0b10
    terms = ((1, 12), (1, 10), (F.pow(eta, 11), 8), (1, 6), (F.pow(eta, 2), 4), (F.pow(eta, 9), 2))
    out = 0
    for c, k in terms:
        out ^= F.mul(c, F.pow(t, k))
    return out


def lunelli_sce() -> Hyperoval:
    F = make_field(4, 0b10011)
    pts = [ProjectivePoint.of((1, t, lunelli_sce_opolynomial(t, F)), field=F) for t in F.elements()]
    pts += [ProjectivePoint.of((0, 1, 0), field=F), ProjectivePoint.of((0, 0, 1), field=F)]
    return Hyperoval(F, tuple(pts))


def reduce_hyperoval(h: Hyperoval) -> PseudoHyperoval:
    """Field-reduced image in PG(3f-1, 2)."""
    return PseudoHyperoval(h.field.f, 1, tuple(field_reduce(p) for p in h.points))


def reduce_pseudo_hyperoval(o: PseudoHyperoval) -> PseudoHyperoval:
    """Field reduction PG(3n-1, 2^f) -> PG(3nf-1, 2)."""
    if o.f == 1:
        return o
    return PseudoHyperoval(o.n * o.f, 1, tuple(field_reduce(u) for u in o.elements))


# ---------------------------------------------------------------- verification


def check_hyperoval(points: Sequence[ProjectivePoint], q: int) -> Verdict:
    points = list(points)
    if len(points) != q + 2:
        return Verdict(False, f"cardinality {len(points)} != q+2 = {q + 2}")
    if len(set(points)) != len(points):
        dup = next(p for p in points if points.count(p) > 1)
        return Verdict(False, "repeated point", (dup,))
    for p in points:
        if p.d != 3 or p.field.q != q:
            raise DimensionMismatch(f"{p} is not a point of PG(2,{q})")
    for trip in combinations(points, 3):
        if collinear(*trip):
            return Verdict(False, "three collinear points", trip)
    return Verdict(True)


def is_hyperoval(points: Sequence[ProjectivePoint] | Hyperoval, q: int | None = None) -> bool:
    if isinstance(points, Hyperoval):
        q = points.q if q is None else q
        points = points.points
    return check_hyperoval(points, q).ok


def _check_elements(elements: Sequence[Subspace], n: int, f: int) -> None:
    for u in elements:
        if u.field.f != f or u.ambient_dim != 3 * n:
            raise DimensionMismatch(
                f"element lives in GF({u.field.q})^{u.ambient_dim}, expected GF({1 << f})^{3 * n}")


def check_pseudo_hyperoval(elements: Sequence[Subspace], n: int, f: int) -> Verdict:
    """Cardinality, element dimension and triple-span checks.

    Elements outside GF(2^f)^(3n) raise ``DimensionMismatch`` rather than
    returning a failed verdict.
    """
    elements = list(elements)
    _check_elements(elements, n, f)
    want = (1 << (n * f)) + 2
    if len(elements) != want:
        return Verdict(False, f"cardinality {len(elements)} != q^n+2 = {want}")
    for i, u in enumerate(elements):
        if u.dim != n:
            return Verdict(False, f"element {i} has dimension {u.dim}, expected {n}", (i,))
    if len(set(elements)) != len(elements):
        return Verdict(False, "repeated element")
    F = elements[0].field
    for i, j, k in combinations(range(len(elements)), 3):
        rows = elements[i].basis + elements[j].basis + elements[k].basis
        if rank_rows(rows, 3 * n, F) != 3 * n:
            return Verdict(False, "triple does not span", (i, j, k))
    return Verdict(True)


def is_pseudo_hyperoval(elements: Sequence[Subspace] | PseudoHyperoval, n: int | None = None, f: int | None = None) -> bool:
    if isinstance(elements, PseudoHyperoval):
        n = elements.n if n is None else n
        f = elements.f if f is None else f
        elements = elements.elements
    return check_pseudo_hyperoval(elements, n, f).ok


def pairwise_trivial(elements: Sequence[Subspace]) -> bool:
    return all(u.intersection_dim(v) == 0 for u, v in combinations(elements, 2))


def is_pseudo_oval(elements: Sequence[Subspace], n: int) -> bool:
    elements = list(elements)
    if not elements:
        return False
    F = elements[0].field
    if any(u.dim != n or u.ambient_dim != 3 * n or u.field is not F for u in elements):
        return False
    return all(rank_rows(a.basis + b.basis + c.basis, 3 * n, F) == 3 * n
               for a, b, c in combinations(elements, 3))


# ---------------------------------------------------------------- completion


def completions(partial: Sequence[Subspace], guard: int = DEFAULT_CANDIDATE_GUARD) -> list[Subspace]:
    """All n-dim U with dim(U + U_i + U_j) = 3n for every pair i < j.

    That condition is U ∩ (U_i + U_j) = 0, so U may only contain vectors
    avoiding every pairwise sum; the search runs over those vectors only.
    """
    partial = list(partial)
    if len(partial) < 2:
        raise ValueError("need at least two elements")
    F = partial[0].field
    d = partial[0].ambient_dim
    if d % 3:
        raise DimensionMismatch("ambient dimension must be 3n")
    n = d // 3
    if not is_pseudo_oval(partial, n):
        raise ValueError("input is not a pseudo-oval (some triple fails to span)")
    total = gaussian_binomial(d, n, F.q)
    if total > guard:
        raise GuardExceeded(f"{total} candidate {n}-subspaces exceed the guard {guard}")
    forbidden = bytearray(F.q ** d)
    for u, v in combinations(partial, 2):
        for x in (u + v).elements():
            forbidden[x] = 1
    good = [x for x in range(1, F.q ** d) if not forbidden[x] and normalize(x, d, F) == x]
    found: set[Subspace] = set()

    def extend(basis: list[int], members: set[int], start: int) -> None:
        if len(basis) == n:
            found.add(Subspace.span(basis, d, F))
            return
        for idx in range(start, len(good)):
            v = good[idx]
            if v in members:
                continue
            new = [m ^ scale(v, s, d, F) for m in members | {0} for s in range(1, F.q)]
            if all(not forbidden[w] for w in new):
                extend(basis + [v], members | set(new), idx + 1)

    extend([], set(), 0)
    return sorted(found, key=lambda s: s.basis)


def complete_pseudo_oval(partial: Sequence[Subspace], guard: int = DEFAULT_CANDIDATE_GUARD) -> PseudoHyperoval:
    partial = list(partial)
    F = partial[0].field
    n = partial[0].ambient_dim // 3
    if len(partial) != F.q**n + 1:
        raise ValueError(f"a pseudo-oval has q^n+1 = {F.q ** n + 1} elements, got {len(partial)}")
    found = completions(partial, guard)
    if len(found) != 1:
        raise CompletionError(f"expected exactly one completion, found {len(found)}")
    return PseudoHyperoval(n, F.f, tuple(partial) + (found[0],))


# ---------------------------------------------------------------- stabilisers


def _first_frame(points: Sequence[ProjectivePoint]) -> tuple[ProjectivePoint, ...]:
    for quad in combinations(points, 4):
        if in_general_position(quad):
            return quad
    raise RuntimeError("point set contains no frame")


def _inverse3(rows: Sequence[int], F: Field) -> tuple[int, ...] | None:
    m = MatrixGF(F, 3, 3, tuple(rows))
    try:
        return m.inverse().rows
    except ZeroDivisionError:
        return None


def pointset_stabilizer_pgammal3(points: Hyperoval | Sequence[ProjectivePoint], q: int | None = None):
    """Setwise stabiliser in PΓL(3,q) by frame enumeration.

    Returns ``(group, orbits)``: a list of collineations and a partition of
    the points into orbits, both in deterministic order.
    """
    if isinstance(points, Hyperoval):
        F = points.field
        points = points.points
    else:
        F = points[0].field
    if q is not None and q != F.q:
        raise DimensionMismatch(f"points are over GF({F.q}), not GF({q})")
    if F.q > 16:
        raise GuardExceeded("frame enumeration is limited to q <= 16")
    pts = sorted(points)
    vecs = [p.vec for p in pts]
    vset = set(vecs)
    index = {v: i for i, v in enumerate(vecs)}
    frame = _first_frame(pts)
    fvecs = [p.vec for p in frame]
    frame_idx = {index[v] for v in fvecs}
    check_order = [v for v in vecs if index[v] not in frame_idx]

    def combo(rows: Sequence[int], target: int, inv: Sequence[int]) -> list[int]:
        return list(unpack(vecmat(target, inv, 3, F), 3, F))

    # per automorphism: L^{-1} with L = diag(lambda) * frame^sigma
    left_inv = {}
    frob_pts = {}
    for k in range(F.f):
        s = [frobenius_vec(v, k, 3, F) for v in fvecs]
        sinv = _inverse3(s[:3], F)
        lam = combo(s[:3], s[3], sinv)
        left = [scale(r, c, 3, F) for r, c in zip(s[:3], lam)]
        left_inv[k] = _inverse3(left, F)
        frob_pts[k] = [frobenius_vec(v, k, 3, F) for v in check_order]

    group_mats: list[tuple[tuple[int, ...], int]] = []
    for trip in permutations(range(len(vecs)), 3):
        t = [vecs[i] for i in trip]
        tinv = _inverse3(t, F)
        if tinv is None:
            continue
        for i4 in range(len(vecs)):
            if i4 in trip:
                continue
            mu = combo(t, vecs[i4], tinv)
            if 0 in mu:
                continue
            right = [scale(r, c, 3, F) for r, c in zip(t, mu)]
            for k in range(F.f):
                a = [vecmat(r, right, 3, F) for r in left_inv[k]]
                ok = True
                for w in frob_pts[k]:
                    img = vecmat(w, a, 3, F)
                    if normalize(img, 3, F) not in vset:
                        ok = False
                        break
                if ok:
                    group_mats.append((tuple(a), k))
    group = [Collineation(MatrixGF(F, 3, 3, a), k) for a, k in group_mats]

    parent = list(range(len(vecs)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in group:
        for v in vecs:
            a, b = find(index[v]), find(index[g.apply_vec(v)])
            if a != b:
                parent[max(a, b)] = min(a, b)
    classes: dict[int, list[ProjectivePoint]] = {}
    for i, p in enumerate(pts):
        classes.setdefault(find(i), []).append(p)
    orbits = sorted(classes.values(), key=lambda o: o[0])
    return group, orbits


# ---------------------------------------------------------------- PG(5,2)


def _canonical_triple() -> tuple[Subspace, Subspace, Subspace]:
    e = [1 << (5 - i) for i in range(6)]
    return (Subspace.span(e[0:2], 6), Subspace.span(e[2:4], 6), Subspace.span(e[4:6], 6))


def _block_monomial_group() -> list[tuple[int, ...]]:
    """GL(2,2) wr S3 acting on GF(2)^6 = three 2-dim blocks; order 6^3 * 6."""
    gl2 = [m for m in product(range(1, 4), repeat=2) if rank_rows(m, 2) == 2]
    mats = []
    for perm in permutations(range(3)):
        for blocks in product(gl2, repeat=3):
            rows = [0] * 6
            for src in range(3):
                dst = perm[src]
                for r in range(2):
                    rows[2 * src + r] = blocks[src][r] << (2 * (2 - dst))
            mats.append(tuple(rows))
    return mats


def _image(u: Subspace, rows: Sequence[int]) -> Subspace:
    return Subspace.span((vecmat(b, rows, 6, GF2) for b in u.basis), 6, GF2)


def pg52_completions() -> list[frozenset[Subspace]]:
    """Pseudo-hyperovals of PG(5,2) containing the canonical triple."""
    triple = _canonical_triple()
    cands = completions(triple, guard=10**6)
    # the remaining three elements must also form spanning triples with each other
    ok_pair = {}
    for x, y in combinations(cands, 2):
        ok_pair[x, y] = all(rank_rows(x.basis + y.basis + t.basis, 6) == 6 for t in triple)
    out = []
    for x, y, z in combinations(cands, 3):
        if ok_pair[x, y] and ok_pair[x, z] and ok_pair[y, z] and rank_rows(x.basis + y.basis + z.basis, 6) == 6:
            out.append(frozenset(triple + (x, y, z)))
    return out


def normalize_to_canonical(elements: Iterable[Subspace], chosen: Sequence[Subspace]) -> frozenset[Subspace]:
    """Apply the g in GL(6,2) sending the chosen triple to the canonical one."""
    rows = [b for u in chosen for b in u.basis]
    inv = MatrixGF(GF2, 6, 6, tuple(rows)).inverse().rows
    return frozenset(_image(u, inv) for u in elements)


def pg52_classes() -> list[list[frozenset[Subspace]]]:
    """Completions of the canonical triple grouped into GL(6,2)-classes."""
    comps = pg52_completions()
    idx = {c: i for i, c in enumerate(comps)}
    parent = list(range(len(comps)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        a, b = find(a), find(b)
        if a != b:
            parent[max(a, b)] = min(a, b)

    stab = _block_monomial_group()
    for c in comps:
        i = idx[c]
        for g in stab:
            union(i, idx[frozenset(_image(u, g) for u in c)])
        # re-anchoring on another triple of the same set
        for t in combinations(sorted(c, key=lambda s: s.basis), 3):
            union(i, idx[normalize_to_canonical(c, t)])
    groups: dict[int, list[frozenset[Subspace]]] = {}
    for c in comps:
        groups.setdefault(find(idx[c]), []).append(c)
    return list(groups.values())


def classify_pseudo_hyperovals_pg52() -> int:
    return len(pg52_classes())

