"""The 12-dimensional example: a pseudo-hyperoval of PG(11,2) and its stabiliser.

The two generators ship in ``data/appendix_a.mat``.  ``O`` is the orbit of
the row space of ``[I4 0 0]`` under ``G = <a, b>``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Callable, Sequence

from .field import GF2
from .geometry import GuardExceeded
from .groups import (
    FiniteMatrixGroup,
    Subgroup,
    SubgroupLattice,
    all_subgroups,
    close_group,
    evaluate_word,
    extraspecial_check,
    exponent,
    generate,
    group_by_class,
    invariant_subspaces_of_dim,
    is_irreducible,
    module_structure,
    pseudo_hyperoval_action,
    structure_report,
    transitive_subgroups,
    vec_times,
    verify_quotient_presentation,
)
from .hyperovals import PseudoHyperoval, check_pseudo_hyperoval
from .linalg import MatrixGF, Subspace
from .textio import parse_matrix_list

EXPECTED_ORDER = 2160
EXPECTED_TRANSITIVE = 14
EXPECTED_REDUCIBLE_ORDERS = (54, 54, 108, 108, 216, 216, 432)
QUOTIENT_WORDS = {"x": "aba^5b^2", "y": "a", "z": "b^12"}

# generator words for the reducible transitive subgroups, with c = b^5
TABLE1: tuple[tuple[int, tuple[str, ...]], ...] = (
    (54, ("a^2c^3", "a^2c^2a^2", "(aca)^2")),
    (54, ("a^2c", "(aca)^2")),
    (108, ("c", "(aca)^2")),
    (108, ("c^2", "a^2c", "(aca)^2")),
    (216, ("a^2", "ac")),
    (216, ("a^2", "c")),
    (432, ("a", "c")),
)

ORBIT_CAP = 10**4

def load_generators(text: str | None = None) -> tuple[MatrixGF, MatrixGF]:
    if text is None:
        text = resources.files(__package__).joinpath("data/appendix_a.mat").read_text()
    mats = parse_matrix_list(text)
    if len(mats) != 2:
        raise ValueError(f"expected two generator matrices, found {len(mats)}")
    for m in mats:
        if m.field is not GF2 or m.nrows != 12 or m.ncols != 12:
            raise ValueError("generators must be 12 x 12 over GF(2)")
    return mats[0], mats[1]

def representative() -> Subspace:
    return Subspace.span([1 << (11 - i) for i in range(4)], 12, GF2)

def subspace_orbit(start: Subspace, gens: Sequence[Sequence[int]], cap: int = ORBIT_CAP) -> list[Subspace]:
    seen = {start}
    orbit = [start]
    for u in orbit:
        for g in gens:
            img = Subspace.span((vec_times(b, g) for b in u.basis), u.ambient_dim, GF2)
            if img not in seen:
                seen.add(img)
                orbit.append(img)
                if len(orbit) > cap:
                    raise GuardExceeded(f"orbit exceeds {cap} subspaces")
    return sorted(orbit, key=lambda s: s.basis)

@lru_cache(maxsize=None)
def appendix_group() -> FiniteMatrixGroup:
    return close_group(load_generators())

@lru_cache(maxsize=None)
def appendix_o() -> PseudoHyperoval:
    a, b = load_generators()
    return PseudoHyperoval(4, 1, tuple(subspace_orbit(representative(), [a.rows, b.rows])))

def names(G: FiniteMatrixGroup) -> dict[str, int]:
    a, b = (G.index[g] for g in G.generators[:2])
    return {"a": a, "b": b, "c": G.power(b, 5)}

def table1_subgroups(G: FiniteMatrixGroup) -> list[tuple[int, Subgroup]]:
    nm = names(G)
    return [(order, generate(G, [evaluate_word(G, w, nm) for w in words])) for order, words in TABLE1]

# ---------------------------------------------------------------- claims pipeline

@dataclass
class ClaimResult:
    key: str
    ok: bool
    detail: str

class _Context:
    """Lazily computed shared state for the claims."""

    def __init__(self, gens: tuple[MatrixGF, MatrixGF]):
        self.gens = gens
        self._cache: dict[str, object] = {}

    def get(self, key: str, fn: Callable[[], object]):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def G(self) -> FiniteMatrixGroup:
        return self.get("G", lambda: close_group(self.gens))

    @property
    def O(self) -> PseudoHyperoval:
        return self.get("O", lambda: PseudoHyperoval(
            4, 1, tuple(subspace_orbit(representative(), [g.rows for g in self.gens]))))

    @property
    def M(self) -> Subgroup:
        def find():
            normals = structure_report(self.G, 27).normal_subgroups
            if len(normals) != 1:
                raise AssertionError(f"{len(normals)} normal subgroups of order 27")
            return normals[0]
        return self.get("M", find)

    @property
    def lattice(self) -> SubgroupLattice:
        return self.get("lattice", lambda: all_subgroups(self.G))

    @property
    def transitive(self) -> list[Subgroup]:
        return self.get("transitive", lambda: transitive_subgroups(self.G, self.O, self.lattice))

    @property
    def u_spaces(self) -> list[Subspace]:
        return self.get("u", lambda: invariant_subspaces_of_dim(self.M, 6))

    @property
    def reducible(self) -> list[Subgroup]:
        return self.get("reducible", lambda: [h for h in self.transitive if not is_irreducible(h)[0]])

def _fixed_count(h: Subgroup, spaces: Sequence[Subspace]) -> int:
    gens = [h.parent.elements[g] for g in h.gens]
    n = 0
    for u in spaces:
        if all(Subspace.span((vec_times(b, g) for b in u.basis), 12, GF2) == u for g in gens):
            n += 1
    return n

def _claim_stabilises(c: _Context) -> tuple[bool, str]:
    o = c.O
    v = check_pseudo_hyperoval(o.elements, 4, 1)
    pseudo_hyperoval_action(c.G, o)  # raises unless every generator permutes O
    return bool(v.ok) and len(o) == 18, f"|O|={len(o)} pseudo_hyperoval={v.ok} stabilised=True"

def _claim_order(c: _Context) -> tuple[bool, str]:
    n = c.G.order
    return n == EXPECTED_ORDER, f"|G|={n}"

def _claim_extraspecial(c: _Context) -> tuple[bool, str]:
    m = c.M
    chk = extraspecial_check(c.G, m)
    e = exponent(c.G, m)
    return chk.ok and e == 3, f"|M|={m.order} unique=True extraspecial={chk.ok} exponent={e}"

def _claim_presentation(c: _Context) -> tuple[bool, str]:
    rep = verify_quotient_presentation(c.G, c.M, QUOTIENT_WORDS, names(c.G))
    failed = [k for k, ok in rep.relations.items() if not ok]
    return rep.ok and rep.index == 80, f"index={rep.index} cosets_covered={rep.cosets_covered} failed={failed or 'none'}"

def _claim_module(c: _Context) -> tuple[bool, str]:
    rep = module_structure(c.M, 12)
    ok = rep.decomposition_dims == [6, 6] and rep.summands_isomorphic and rep.endo_is_field and rep.endo_order == 4
    return bool(ok), (f"dims={rep.decomposition_dims} isomorphic={rep.summands_isomorphic} "
                      f"endo_order={rep.endo_order} endo_field={rep.endo_is_field}")

def _claim_invariant(c: _Context) -> tuple[bool, str]:
    n = len(c.u_spaces)
    return n == 5, f"six_dim_M_invariant={n}"

def _claim_subgroups(c: _Context) -> tuple[bool, str]:
    t = c.transitive
    classes = group_by_class(c.lattice, t)
    return len(classes) == EXPECTED_TRANSITIVE, (
        f"subgroups={len(c.lattice)} subgroup_classes={c.lattice.conjugacy_class_count} "
        f"transitive_classes={len(classes)} transitive_subgroups={len(t)}")

def _claim_reducible(c: _Context) -> tuple[bool, str]:
    red = c.reducible
    classes = group_by_class(c.lattice, red)
    orders = tuple(sorted(cl[0].order for cl in classes))
    fixed = sorted({_fixed_count(h, c.u_spaces) for h in red})
    ok = orders == EXPECTED_REDUCIBLE_ORDERS and set(fixed) <= {1, 5}
    return ok, (f"reducible_classes={len(classes)} class_orders={list(orders)} "
                f"reducible_subgroups={len(red)} fixed_U_counts={fixed}")

def _claim_table1(c: _Context) -> tuple[bool, str]:
    red = {h.key for h in c.reducible}
    rows = table1_subgroups(c.G)
    matches = [h.order == order and h.key in red for order, h in rows]
    distinct = len({c.lattice.class_of[h.key] for _, h in rows}) == len(rows)
    return all(matches) and distinct, (f"rows_matched={sum(matches)}/{len(rows)} pairwise_nonconjugate={distinct} "
                                       f"orders={[h.order for _, h in rows]}")

CLAIMS: dict[str, Callable[[_Context], tuple[bool, str]]] = {
    "stabilises": _claim_stabilises,
    "order": _claim_order,
    "extraspecial": _claim_extraspecial,
    "presentation": _claim_presentation,
    "module": _claim_module,
    "invariant-subspaces": _claim_invariant,
    "subgroups": _claim_subgroups,
    "reducible": _claim_reducible,
    "table1": _claim_table1,
}

def run_claims(selected: Sequence[str] | None = None, generators: tuple[MatrixGF, MatrixGF] | None = None) -> list[ClaimResult]:
    keys = list(CLAIMS) if selected is None else list(selected)
    unknown = [k for k in keys if k not in CLAIMS]
    if unknown:
        raise KeyError(f"unknown claims: {', '.join(unknown)}")
    ctx = _Context(generators or load_generators())
    out = []
    for k in keys:
        try:
            ok, detail = CLAIMS[k](ctx)
        except (ArithmeticError, AssertionError, GuardExceeded, ValueError, RuntimeError) as exc:
            ok, detail = False, f"error: {exc}"
        out.append(ClaimResult(k, bool(ok), detail))
    return out

def reducible_order_multiset(subgroups: Sequence[Subgroup]) -> Counter:
    return Counter(h.order for h in subgroups if not is_irreducible(h)[0])
