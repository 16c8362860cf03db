"""Finite matrix groups over GF(2) acting on row vectors.

Elements are stored as tuples of row integers (column ``j`` at bit
``d-1-j``), and ``v·g`` is the xor of the rows of ``g`` selected by ``v``.
Everything beyond closure works on the index-based multiplication table.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass, field as dc_field
from functools import cached_property, reduce
from math import gcd
from typing import Iterable, Mapping, Sequence

import numpy as np

from .field import GF2
from .geometry import GuardExceeded
from .hyperovals import PseudoHyperoval
from .linalg import (
    DimensionMismatch,
    MatrixGF,
    Subspace,
    gf2_field_defect,
    gf2_identity,
    gf2_matmul,
    gf2_nullspace,
    gf2_rank,
    gf2_span_matrices,
    rref_rows,
)

Rows = tuple[int, ...]

DEFAULT_CAP = 10**5
TABLE_LIMIT = 4096
SUBGROUP_ORDER_GUARD = 5000
SPIN_DIM_GUARD = 20


class GroupError(ValueError):
    pass


class ModuleError(RuntimeError):
    """No invariant complement was found where one was needed."""


def _as_rows(g: MatrixGF | Sequence[int]) -> Rows:
    if isinstance(g, MatrixGF):
        if g.field is not GF2:
            raise GroupError("only GF(2) matrix groups are supported")
        if g.nrows != g.ncols:
            raise DimensionMismatch("generator is not square")
        return g.rows
    return tuple(int(r) for r in g)


def vec_times(v: int, rows: Sequence[int]) -> int:
    d = len(rows)
    out = 0
    for j in range(d):
        if (v >> (d - 1 - j)) & 1:
            out ^= rows[j]
    return out


class FiniteMatrixGroup:
    """A closed group of d x d GF(2) matrices; index 0 is the identity.

    ``parent[h]`` and ``parent_gen[h]`` record the BFS tree:
    ``elements[h] = elements[parent[h]] * generators[parent_gen[h]]``.
    """

    def __init__(self, generators: Sequence[Rows], dim: int, elements: list[Rows],
                 parent: list[int], parent_gen: list[int], right_gen: np.ndarray):
        self.generators = tuple(generators)
        self.dim = dim
        self.elements = elements
        self.index = {e: i for i, e in enumerate(elements)}
        self.parent = np.asarray(parent, dtype=np.int64)
        self.parent_gen = np.asarray(parent_gen, dtype=np.int64)
        self.right_gen = right_gen  # right_gen[s, x] = index of x * gen_s

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def matrix(self, i: int) -> MatrixGF:
        return MatrixGF(GF2, self.dim, self.dim, self.elements[i])

    def index_of(self, g: MatrixGF | Sequence[int]) -> int:
        try:
            return self.index[_as_rows(g)]
        except KeyError:
            raise GroupError("matrix is not an element of the group") from None

    @property
    def has_table(self) -> bool:
        return self.order <= TABLE_LIMIT

    @cached_property
    def table(self) -> np.ndarray:
        """table[x, h] = index of x*h, built column by column along the BFS tree."""
        n = self.order
        if n > TABLE_LIMIT:
            raise GuardExceeded(f"multiplication table needs |G| <= {TABLE_LIMIT}, got {n}")
        cols = np.empty((n, n), dtype=np.int32)
        cols[0] = np.arange(n)
        for h in range(1, n):
            cols[h] = self.right_gen[self.parent_gen[h]][cols[self.parent[h]]]
        return np.ascontiguousarray(cols.T)

    def mul(self, x: int, y: int) -> int:
        if self.has_table:
            return int(self.table[x, y])
        return self.index[gf2_matmul(self.elements[x], self.elements[y])]

    @cached_property
    def inverse(self) -> np.ndarray:
        return np.argmin(self.table, axis=1)  # the identity has index 0

    def inv(self, x: int) -> int:
        return int(self.inverse[x])

    def power(self, x: int, k: int) -> int:
        if k < 0:
            x, k = self.inv(x), -k
        out = 0
        base = x
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        idx = np.arange(n)
        orders = np.zeros(n, dtype=np.int64)
        cur = idx.copy()
        k = 1
        while (orders == 0).any():
            orders[(cur == 0) & (orders == 0)] = k
            cur = self.table[cur, idx]
            k += 1
        return orders

    @cached_property
    def conjugation(self) -> np.ndarray:
        """conjugation[g, x] = g^-1 x g."""
        t = self.table
        left = t[self.inverse]  # left[g, x] = g^-1 x
        return t[left, np.arange(self.order)[:, None]]

    def action(self, generator_perms: Sequence[Sequence[int]]) -> np.ndarray:
        """Permutation of every element, given the generators' permutations.

        Row ``h`` maps point ``i`` to ``i^h``; actions are on the right.
        """
        gp = [np.asarray(p, dtype=np.int64) for p in generator_perms]
        if len(gp) != len(self.generators):
            raise GroupError("one permutation per generator is required")
        m = len(gp[0]) if gp else 0
        perms = np.empty((self.order, m), dtype=np.int64)
        perms[0] = np.arange(m)
        for h in range(1, self.order):
            perms[h] = gp[self.parent_gen[h]][perms[self.parent[h]]]
        return perms

    def vector_tables(self, gens: Iterable[int]) -> list[list[int]]:
        """For each listed element g, the list v -> v·g over GF(2)^d."""
        d = self.dim
        vecs = np.arange(1 << d, dtype=np.int64)
        out = []
        for g in gens:
            img = np.zeros_like(vecs)
            for j, row in enumerate(self.elements[g]):
                img ^= ((vecs >> (d - 1 - j)) & 1) * row
            out.append(img.tolist())
        return out


def close_group(gens: Sequence[MatrixGF | Sequence[int]], cap: int = DEFAULT_CAP, dim: int | None = None) -> FiniteMatrixGroup:
    rows = [_as_rows(g) for g in gens]
    if not rows and dim is None:
        raise GroupError("an empty generator list needs an explicit dimension")
    d = dim if dim is not None else len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != d:
            raise DimensionMismatch(f"generator {i} is {len(r)}x?, expected {d}x{d}")
        if gf2_rank(r) != d:
            raise GroupError(f"generator {i} is singular")
    ident = gf2_identity(d)
    elements = [ident]
    index = {ident: 0}
    parent, parent_gen = [-1], [-1]
    right: list[list[int]] = [[] for _ in rows]
    i = 0
    while i < len(elements):
        x = elements[i]
        for s, g in enumerate(rows):
            y = gf2_matmul(x, g)
            j = index.get(y)
            if j is None:
                j = len(elements)
                if j >= cap:
                    raise GuardExceeded(f"group closure exceeded the cap of {cap} elements")
                index[y] = j
                elements.append(y)
                parent.append(i)
                parent_gen.append(s)
            right[s].append(j)
        i += 1
    right_gen = np.asarray(right, dtype=np.int64).reshape(len(rows), len(elements))
    return FiniteMatrixGroup(rows, d, elements, parent, parent_gen, right_gen)


# ---------------------------------------------------------------- subgroups


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: FiniteMatrixGroup
    mask: np.ndarray
    gens: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.mask[0]:
            raise GroupError("a subgroup must contain the identity")
        if self.parent.order % self.order:
            raise AssertionError(f"Lagrange violated: {self.order} does not divide {self.parent.order}")

    @cached_property
    def key(self) -> bytes:
        return np.packbits(self.mask).tobytes()

    @cached_property
    def members(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @property
    def order(self) -> int:
        return int(self.mask.sum())

    def __len__(self) -> int:
        return self.order

    def __contains__(self, x: int) -> bool:
        return bool(self.mask[x])

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and other.parent is self.parent and other.key == self.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __le__(self, other: "Subgroup") -> bool:
        return bool(np.all(other.mask[self.members]))

    def generator_matrices(self) -> list[MatrixGF]:
        return [self.parent.matrix(g) for g in self.gens]

    def is_closed(self) -> bool:
        m = self.members
        t = self.parent.table
        return bool(self.mask[t[np.ix_(m, m)]].all() and self.mask[self.parent.inverse[m]].all())

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, gens={list(self.gens)})"


def generate(G: FiniteMatrixGroup, gens: Iterable[int], base: Subgroup | None = None) -> Subgroup:
    """Subgroup generated by ``gens`` (plus ``base``, whose gens must be included)."""
    gens = tuple(int(g) for g in gens)
    t = G.table
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    if base is not None:
        mask |= base.mask
    frontier = np.flatnonzero(mask)
    if gens:
        g = np.asarray(gens)
        while frontier.size:
            nxt = t[np.ix_(frontier, g)].ravel()
            nxt = np.unique(nxt[~mask[nxt]])
            mask[nxt] = True
            frontier = nxt
    return Subgroup(G, mask, gens)


def trivial_subgroup(G: FiniteMatrixGroup) -> Subgroup:
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    return Subgroup(G, mask, ())


def whole_group(G: FiniteMatrixGroup) -> Subgroup:
    return Subgroup(G, np.ones(G.order, dtype=bool), _generator_indices(G))


def _generator_indices(G: FiniteMatrixGroup) -> tuple[int, ...]:
    return tuple(G.index[g] for g in G.generators)


def small_generating_set(G: FiniteMatrixGroup, elements: Iterable[int], base: Subgroup | None = None) -> Subgroup:
    """Greedy: add an element only when it lies outside what is generated so far."""
    cur = base or trivial_subgroup(G)
    for x in elements:
        if not cur.mask[x]:
            cur = generate(G, cur.gens + (int(x),), base=cur)
    return cur


def _is_prime_power(n: int) -> bool:
    if n == 1:
        return True
    p = next(k for k in range(2, n + 1) if n % k == 0)
    while n % p == 0:
        n //= p
    return n == 1


def cyclic_subgroups(G: FiniteMatrixGroup, prime_power_only: bool = False) -> list[Subgroup]:
    seen: dict[bytes, Subgroup] = {}
    orders = G.element_orders
    for x in range(G.order):
        if prime_power_only and not _is_prime_power(int(orders[x])):
            continue
        c = generate(G, (x,))
        seen.setdefault(c.key, c)
    return sorted(seen.values(), key=_sort_key)


def _sort_key(h: Subgroup):
    return (h.order, tuple(h.members.tolist()))


@dataclass
class SubgroupLattice:
    subgroups: list[Subgroup]
    class_of: dict[bytes, int]
    class_reps: list[Subgroup]

    @property
    def conjugacy_class_count(self) -> int:
        return len(self.class_reps)

    def __len__(self) -> int:
        return len(self.subgroups)

    def __iter__(self):
        return iter(self.subgroups)


def _conjugates(G: FiniteMatrixGroup, h: Subgroup) -> list[Subgroup]:
    cj = G.conjugation
    images = np.sort(cj[:, h.members], axis=1)
    _, first = np.unique(images, axis=0, return_index=True)
    out = []
    gens = np.asarray(h.gens, dtype=np.int64)
    for g in sorted(first.tolist()):
        mask = np.zeros(G.order, dtype=bool)
        mask[images[g]] = True
        out.append(Subgroup(G, mask, tuple(cj[g, gens].tolist()) if len(gens) else ()))
    return out


def all_subgroups(G: FiniteMatrixGroup, guard: int = SUBGROUP_ORDER_GUARD, count_cap: int = 10**5) -> SubgroupLattice:
    """Every subgroup of G (not up to conjugacy).

    Cyclic extension over conjugacy-class representatives: each rep H is
    joined with every cyclic subgroup of prime-power order outside H, and
    every newly found subgroup brings its whole conjugacy class.  A subgroup
    K > 1 is <H, g> for a maximal subgroup H of K and any prime-power-order
    g in K \\ H, so processing the reps in increasing order is exhaustive.
    """
    if G.order > guard:
        raise GuardExceeded(f"|G| = {G.order} exceeds the subgroup-lattice guard {guard}")
    cyclic = cyclic_subgroups(G, prime_power_only=True)
    found: dict[bytes, Subgroup] = {}
    class_of: dict[bytes, int] = {}
    reps: list[Subgroup] = []
    heap: list[tuple[int, int]] = []

    def add_class(k: Subgroup) -> None:
        cid = len(reps)
        reps.append(k)
        for c in _conjugates(G, k):
            found[c.key] = c
            class_of[c.key] = cid
        if len(found) > count_cap:
            raise GuardExceeded(f"more than {count_cap} subgroups")
        heapq.heappush(heap, (k.order, cid))

    add_class(trivial_subgroup(G))
    while heap:
        _, cid = heapq.heappop(heap)
        h = reps[cid]
        for c in cyclic:
            x = c.gens[0]
            if h.mask[x]:
                continue
            k = generate(G, h.gens + (x,), base=h)
            if k.key not in found:
                add_class(k)
    subs = sorted(found.values(), key=_sort_key)
    return SubgroupLattice(subs, class_of, reps)


# ---------------------------------------------------------------- actions on pseudo-hyperovals


def _image_subspace(u: Subspace, rows: Rows) -> Subspace:
    return Subspace.span((vec_times(b, rows) for b in u.basis), u.ambient_dim, GF2)


def pseudo_hyperoval_action(G: FiniteMatrixGroup, o: PseudoHyperoval | Sequence[Subspace]) -> np.ndarray:
    elements = list(o.elements if isinstance(o, PseudoHyperoval) else o)
    index = {u: i for i, u in enumerate(elements)}
    perms = []
    for s, g in enumerate(G.generators):
        perm = []
        for u in elements:
            img = _image_subspace(u, g)
            if img not in index:
                raise GroupError(f"generator {s} does not stabilise the element set")
            perm.append(index[img])
        perms.append(perm)
    return G.action(perms)


def orbits(perms: np.ndarray, gens: Sequence[int], npoints: int) -> list[list[int]]:
    seen = [False] * npoints
    out = []
    gp = [perms[g].tolist() for g in gens]
    for start in range(npoints):
        if seen[start]:
            continue
        orb = [start]
        seen[start] = True
        for p in orb:
            for perm in gp:
                y = perm[p]
                if not seen[y]:
                    seen[y] = True
                    orb.append(y)
        out.append(sorted(orb))
    return out


def is_transitive(perms: np.ndarray, h: Subgroup) -> bool:
    m = perms.shape[1]
    return len(orbits(perms, h.gens, m)) == 1


def transitive_subgroups(G: FiniteMatrixGroup, o, lattice: SubgroupLattice | None = None) -> list[Subgroup]:
    perms = pseudo_hyperoval_action(G, o)
    lattice = lattice or all_subgroups(G)
    out = [h for h in lattice if is_transitive(perms, h)]
    m = perms.shape[1]
    for h in out:
        if h.order % m:
            raise AssertionError("orbit-stabiliser violated")
    return out


def group_by_class(lattice: SubgroupLattice, subgroups: Iterable[Subgroup]) -> list[list[Subgroup]]:
    """Split a conjugation-closed list of subgroups into conjugacy classes."""
    classes: dict[int, list[Subgroup]] = {}
    for h in subgroups:
        classes.setdefault(lattice.class_of[h.key], []).append(h)
    return [classes[c] for c in sorted(classes, key=lambda c: _sort_key(classes[c][0]))]


# ---------------------------------------------------------------- spinning


def _insert(basis: dict[int, int], v: int) -> int:
    """Reduce v against an xor basis keyed by bit length; insert if new."""
    while v:
        top = v.bit_length()
        b = basis.get(top)
        if b is None:
            basis[top] = v
            return v
        v ^= b
    return 0


class _Spinner:
    def __init__(self, gen_rows: Sequence[Rows], d: int):
        if d > SPIN_DIM_GUARD:
            raise GuardExceeded(f"exhaustive spinning needs d <= {SPIN_DIM_GUARD}")
        self.d = d
        vecs = np.arange(1 << d, dtype=np.int64)
        self.tables = []
        for rows in gen_rows:
            img = np.zeros_like(vecs)
            for j, row in enumerate(rows):
                img ^= ((vecs >> (d - 1 - j)) & 1) * row
            self.tables.append(img.tolist())
        self._cache: dict[int, Subspace] = {}

    def __call__(self, v: int) -> Subspace:
        s = self._cache.get(v)
        if s is None:
            basis: dict[int, int] = {}
            queue = [v]
            _insert(basis, v)
            for w in queue:
                for tab in self.tables:
                    u = tab[w]
                    if _insert(basis, u):
                        queue.append(u)
            s = Subspace(GF2, self.d, rref_rows(basis.values(), self.d, GF2))
            self._cache[v] = s
        return s

    def all_spins(self, vectors: Iterable[int] | None = None) -> list[Subspace]:
        vectors = range(1, 1 << self.d) if vectors is None else vectors
        uniq = {self(v) for v in vectors if v}
        return sorted(uniq, key=lambda s: (s.dim, s.basis))


def _gen_rows(s: Subgroup | FiniteMatrixGroup) -> tuple[list[Rows], int]:
    if isinstance(s, FiniteMatrixGroup):
        return list(s.generators), s.dim
    G = s.parent
    return [G.elements[g] for g in s.gens], G.dim


def is_irreducible(s: Subgroup | FiniteMatrixGroup, d: int | None = None) -> tuple[bool, Subspace | None]:
    rows, dim = _gen_rows(s)
    if d is not None and d != dim:
        raise DimensionMismatch(f"group acts on dimension {dim}, not {d}")
    spinner = _Spinner(rows, dim)
    best = None
    for v in range(1, 1 << dim):
        w = spinner(v)
        if w.dim < dim and (best is None or (w.dim, w.basis) < (best.dim, best.basis)):
            best = w
    return best is None, best


def invariant_subspaces_of_dim(s: Subgroup | FiniteMatrixGroup, k: int, cap: int = 10**5,
                               vectors: Iterable[int] | None = None) -> list[Subspace]:
    """All k-dimensional invariant subspaces.

    Every invariant subspace is the sum of the spins of its vectors, so
    closing the spins of dimension <= k under sums (keeping dimension <= k)
    reaches all of them.
    """
    rows, dim = _gen_rows(s)
    if not 0 <= k <= dim:
        raise ValueError(f"k must lie in 0..{dim}")
    if k == 0:
        return [Subspace.zero(dim)]
    spinner = _Spinner(rows, dim)
    spins = [w for w in spinner.all_spins(vectors) if w.dim <= k]
    found = set(spins)
    queue = list(spins)
    for w in queue:
        if w.dim >= k:
            continue
        for sp in spins:
            if sp <= w:
                continue
            x = w + sp
            if x.dim <= k and x not in found:
                found.add(x)
                queue.append(x)
                if len(found) > cap:
                    raise GuardExceeded(f"more than {cap} invariant subspaces of dimension <= {k}")
    return sorted((w for w in found if w.dim == k), key=lambda w: w.basis)


# ---------------------------------------------------------------- structure


def center(G: FiniteMatrixGroup, h: Subgroup | None = None) -> Subgroup:
    t = G.table
    if h is None:
        mask = (t == t.T).all(axis=1)
    else:
        m = h.members
        sub = t[np.ix_(m, m)]
        mask = np.zeros(G.order, dtype=bool)
        mask[m[(sub == sub.T).all(axis=1)]] = True
    return small_generating_set(G, np.flatnonzero(mask))


def derived_subgroup(G: FiniteMatrixGroup, h: Subgroup | None = None) -> Subgroup:
    m = h.members if h is not None else np.arange(G.order)
    t, inv = G.table, G.inverse
    # [x, y] = x^-1 y^-1 x y
    xy = t[np.ix_(m, m)]
    comm = t[inv[xy], xy.T]
    return small_generating_set(G, np.unique(comm))


def exponent(G: FiniteMatrixGroup, h: Subgroup | None = None) -> int:
    orders = G.element_orders if h is None else G.element_orders[h.members]
    return reduce(lambda a, b: a * b // gcd(a, b), (int(o) for o in orders), 1)


def is_normal(G: FiniteMatrixGroup, h: Subgroup) -> bool:
    gens = _generator_indices(G)
    return all(h.mask[G.conjugation[g, h.members]].all() for g in gens)


def conjugacy_classes(G: FiniteMatrixGroup) -> list[np.ndarray]:
    cj = G.conjugation
    seen = np.zeros(G.order, dtype=bool)
    out = []
    for x in range(G.order):
        if not seen[x]:
            cls = np.unique(cj[:, x])
            seen[cls] = True
            out.append(cls)
    return out


def normal_subgroups(G: FiniteMatrixGroup) -> list[Subgroup]:
    """Normal closures of conjugacy classes, saturated under pairwise products."""
    found: dict[bytes, Subgroup] = {}
    for cls in conjugacy_classes(G):
        n = small_generating_set(G, cls)
        found.setdefault(n.key, n)
    queue = list(found.values())
    for a in queue:
        for b in list(found.values()):
            if b <= a or a <= b:
                continue
            j = generate(G, a.gens + b.gens, base=a)
            if j.key not in found:
                found[j.key] = j
                queue.append(j)
    triv = trivial_subgroup(G)
    found.setdefault(triv.key, triv)
    return sorted(found.values(), key=_sort_key)


def _prime_power(n: int) -> tuple[int, int] | None:
    if n < 2:
        return None
    p = next(k for k in range(2, n + 1) if n % k == 0)
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return (p, e) if n == 1 else None


@dataclass(frozen=True)
class ExtraspecialCheck:
    p_group: bool
    center_order: int
    derived_equals_center: bool
    frattini_quotient_elementary: bool

    @property
    def ok(self) -> bool:
        return (self.p_group and self.derived_equals_center and self.frattini_quotient_elementary
                and _prime_power(self.center_order) is not None and _prime_power(self.center_order)[1] == 1)


def extraspecial_check(G: FiniteMatrixGroup, h: Subgroup) -> ExtraspecialCheck:
    pp = _prime_power(h.order)
    z = center(G, h)
    dz = derived_subgroup(G, h)
    if pp is None:
        return ExtraspecialCheck(False, z.order, dz == z, False)
    p = pp[0]
    powers = np.asarray([G.power(int(x), p) for x in h.members])
    return ExtraspecialCheck(
        p_group=True,
        center_order=z.order,
        derived_equals_center=dz == z,
        frattini_quotient_elementary=bool(z.mask[powers].all()) and pp[1] >= 3,
    )


@dataclass
class StructureReport:
    order: int
    requested_order: int | None
    normal_subgroups: list[Subgroup]
    center_order: int
    exponent: int
    extraspecial: list[ExtraspecialCheck]
    exponents: list[int] = dc_field(default_factory=list)


def structure_report(G: FiniteMatrixGroup, order: int | None = None) -> StructureReport:
    normals = normal_subgroups(G)
    if order is not None:
        normals = [n for n in normals if n.order == order]
    return StructureReport(
        order=G.order,
        requested_order=order,
        normal_subgroups=normals,
        center_order=center(G).order,
        exponent=exponent(G),
        extraspecial=[extraspecial_check(G, n) for n in normals],
        exponents=[exponent(G, n) for n in normals],
    )


# ---------------------------------------------------------------- words


class WordError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z])|(?P<op>[()^])|(?P<int>[+-]?\d+))")


def parse_word(text: str) -> list:
    """Parse words like ``a^2c^3``, ``(aca)^2``, ``x^-1 y x``.

    Returns a nested list of (atom, exponent) pairs where an atom is a
    generator name or a nested list.
    """
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise WordError(f"unexpected character at {pos} in {text!r}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def seq(i: int, depth: int):
        out = []
        while i < len(tokens):
            kind, val = tokens[i]
            if kind == "op" and val == ")":
                if depth == 0:
                    raise WordError(f"unbalanced ')' in {text!r}")
                return out, i
            if kind == "name":
                atom, i = val, i + 1
            elif kind == "op" and val == "(":
                atom, i = seq(i + 1, depth + 1)
                if i >= len(tokens) or tokens[i] != ("op", ")"):
                    raise WordError(f"unbalanced '(' in {text!r}")
                i += 1
            else:
                raise WordError(f"unexpected {val!r} in {text!r}")
            exp = 1
            if i < len(tokens) and tokens[i] == ("op", "^"):
                if i + 1 >= len(tokens) or tokens[i + 1][0] != "int":
                    raise WordError(f"'^' must be followed by an integer in {text!r}")
                exp = int(tokens[i + 1][1])
                i += 2
            out.append((atom, exp))
        if depth:
            raise WordError(f"unbalanced '(' in {text!r}")
        return out, i

    if not tokens:
        raise WordError("empty word")
    word, _ = seq(0, 0)
    return word


def evaluate_word(G: FiniteMatrixGroup, word: str | list, names: Mapping[str, int]) -> int:
    parsed = parse_word(word) if isinstance(word, str) else word
    out = 0
    for atom, exp in parsed:
        if isinstance(atom, str):
            if atom not in names:
                raise WordError(f"unknown generator {atom!r}")
            x = names[atom]
        else:
            x = evaluate_word(G, atom, names)
        out = G.mul(out, G.power(x, exp))
    return out


# ---------------------------------------------------------------- quotient presentations

DEFAULT_RELATORS = (
    ("x^2", "x^2"),
    ("y^8", "y^8"),
    ("z^5", "z^5"),
    ("y^x=y", "x^-1 y x y^-1"),
    ("z^x=z^-1", "x^-1 z x z"),
    ("z^y=z^3", "y^-1 z y z^-3"),
)


@dataclass
class PresentationReport:
    relations: dict[str, bool]
    cosets_covered: int
    index: int

    @property
    def ok(self) -> bool:
        return all(self.relations.values()) and self.cosets_covered == self.index


def verify_quotient_presentation(G: FiniteMatrixGroup, m: Subgroup, words: Mapping[str, str],
                                 names: Mapping[str, int], relators=DEFAULT_RELATORS) -> PresentationReport:
    """Check relators modulo a normal subgroup m and that the images generate G/m."""
    if not is_normal(G, m):
        raise GroupError("M is not normal in G")
    vals = {k: evaluate_word(G, w, names) for k, w in words.items()}
    relations = {label: bool(m.mask[evaluate_word(G, rel, vals)]) for label, rel in relators}
    covered = generate(G, tuple(vals.values()) + m.gens, base=m)
    return PresentationReport(relations, covered.order // m.order, G.order // m.order)


# ---------------------------------------------------------------- module structure


def _coords(v: int, w: Subspace) -> int:
    """Coordinates of v in the RREF basis of w, packed like a vector of length dim w."""
    k = w.dim
    out = 0
    rem = v
    for i, b in enumerate(w.basis):
        pivot_bit = b.bit_length() - 1
        if (rem >> pivot_bit) & 1:
            out |= 1 << (k - 1 - i)
            rem ^= b
    if rem:
        raise ModuleError("vector is not in the subspace")
    return out


def restricted_action(w: Subspace, gen_rows: Sequence[Rows]) -> list[Rows]:
    """Matrices of the generators on an invariant subspace, in its RREF basis."""
    return [tuple(_coords(vec_times(b, g), w) for b in w.basis) for g in gen_rows]


def _intertwiners(r1: Sequence[Rows], r2: Sequence[Rows], k1: int, k2: int) -> list[Rows]:
    """Basis of {Y (k1 x k2) : A Y = Y B for paired generator matrices A in r1, B in r2}."""
    nv = k1 * k2
    eqs = []

    def bit(mat, i, j, ncols):
        return (mat[i] >> (ncols - 1 - j)) & 1

    for a, b in zip(r1, r2):
        for i in range(k1):
            for j in range(k2):
                e = 0
                for t in range(k1):  # (A Y)[i,j] = sum_t A[i,t] Y[t,j]
                    if bit(a, i, t, k1):
                        e ^= 1 << (nv - 1 - (t * k2 + j))
                for t in range(k2):  # (Y B)[i,j] = sum_t Y[i,t] B[t,j]
                    if bit(b, t, j, k2):
                        e ^= 1 << (nv - 1 - (i * k2 + t))
                if e:
                    eqs.append(e)
    sols = gf2_nullspace(eqs, nv)
    mask = (1 << k2) - 1
    return [tuple((x >> ((k1 - 1 - r) * k2)) & mask for r in range(k1)) for x in sols]


@dataclass
class ModuleReport:
    summands: list[Subspace]
    endo_dim: int
    endo_is_field: bool
    summands_isomorphic: bool | None

    @property
    def decomposition_dims(self) -> list[int]:
        return [w.dim for w in self.summands]

    @property
    def endo_order(self) -> int:
        return 1 << self.endo_dim


def _decompose(v: Subspace, spinner: _Spinner, cap: int) -> list[Subspace]:
    vecs = [x for x in v.elements() if x]
    spins = spinner.all_spins(vecs)
    w = spins[0]
    if w.dim == v.dim:
        return [v]
    target = v.dim - w.dim
    small = [s for s in spins if s.dim <= target]
    found = set(small)
    queue = list(small)
    for x in queue:
        if x.dim == target and x.intersection_dim(w) == 0:
            return [w] + _decompose(x, spinner, cap)
        if x.dim >= target:
            continue
        for s in small:
            if s <= x:
                continue
            y = x + s
            if y.dim <= target and y not in found and y.intersection_dim(w) == 0:
                found.add(y)
                queue.append(y)
                if len(found) > cap:
                    raise GuardExceeded("invariant-complement search exceeded its cap")
    raise ModuleError(f"no invariant complement to a {w.dim}-dimensional summand inside dimension {v.dim}")


def module_structure(s: Subgroup | FiniteMatrixGroup, d: int | None = None, cap: int = 10**5) -> ModuleReport:
    rows, dim = _gen_rows(s)
    if d is not None and d != dim:
        raise DimensionMismatch(f"group acts on dimension {dim}, not {d}")
    spinner = _Spinner(rows, dim)
    summands = _decompose(Subspace.full(dim), spinner, cap)
    first = restricted_action(summands[0], rows)
    k = summands[0].dim
    endo = _intertwiners(first, first, k, k)
    is_field = gf2_field_defect(endo, k) is None
    iso = None
    if len(summands) > 1:
        iso = True
        for other in summands[1:]:
            if other.dim != k:
                iso = False
                break
            r2 = restricted_action(other, rows)
            basis = _intertwiners(first, r2, k, k)
            if len(basis) > 16:
                raise GuardExceeded("intertwiner space too large to search")
            if not any(gf2_rank(y) == k for y in gf2_span_matrices(basis, k)):
                iso = False
                break
    return ModuleReport(summands, len(endo), is_field, iso)
