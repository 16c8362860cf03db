import random
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pseudohyperovals.appendix import names
from pseudohyperovals.geometry import GuardExceeded
from pseudohyperovals.groups import (
    DEFAULT_RELATORS,
    GroupError,
    WordError,
    all_subgroups,
    center,
    close_group,
    conjugacy_classes,
    cyclic_subgroups,
    derived_subgroup,
    evaluate_word,
    exponent,
    extraspecial_check,
    generate,
    invariant_subspaces_of_dim,
    is_irreducible,
    is_normal,
    module_structure,
    normal_subgroups,
    parse_word,
    trivial_subgroup,
    vec_times,
    verify_quotient_presentation,
    whole_group,
)
from pseudohyperovals.linalg import DimensionMismatch, enumerate_subspaces, gf2_matmul

# GL(2,2) and GL(3,2) generators as row tuples
GL22 = [(0b01, 0b10), (0b11, 0b01)]
GL32 = [(0b010, 0b001, 0b100), (0b110, 0b010, 0b001)]
SINGER4 = (0b0100, 0b0010, 0b0001, 0b1100)  # companion of x^4 + x + 1
UNITRI = [(0b110, 0b010, 0b001), (0b100, 0b011, 0b001), (0b101, 0b010, 0b001)]


def naive_closure(table, gens):
    members = {0} | set(gens)
    frontier = list(members)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = table[x][g]
                if y not in members:
                    members.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(members)


def brute_invariant(rows, d):
    out = []
    for k in range(d + 1):
        for w in enumerate_subspaces(d, k):
            if all(vec_times(b, g) in w for g in rows for b in w.basis):
                out.append(w)
    return out


# ---------------------------------------------------------------- closure and tables


@pytest.mark.parametrize("gens,order", [(GL22, 6), (GL32, 168), ([SINGER4], 15), (UNITRI, 8)])
def test_group_orders(gens, order):
    assert close_group(gens).order == order


def test_table_matches_matrix_products():
    G = close_group(GL32)
    rng = random.Random(3)
    for _ in range(300):
        x, y = rng.randrange(168), rng.randrange(168)
        assert G.elements[G.mul(x, y)] == gf2_matmul(G.elements[x], G.elements[y])
        assert G.mul(x, G.inv(x)) == 0


@given(st.integers(0, 167), st.integers(-20, 20))
@settings(max_examples=80, deadline=None)
def test_power_and_order(x, k):
    G = close_group(GL32)
    o = int(G.element_orders[x])
    assert G.power(x, o) == 0
    assert G.power(x, k) == G.power(x, k % o)
    assert all(G.power(x, j) != 0 for j in range(1, o))


def test_closure_errors():
    with pytest.raises(GroupError):
        close_group([(0b11, 0b11)])
    with pytest.raises(GuardExceeded):
        close_group(GL32, cap=100)
    with pytest.raises(DimensionMismatch):
        close_group([GL22[0], GL32[0]])
    with pytest.raises(GroupError):
        close_group([])
    assert close_group([], dim=3).order == 1


def test_index_of_rejects_outsiders():
    G = close_group([SINGER4])
    with pytest.raises((KeyError, GroupError, ValueError)):
        G.index_of((0b1000, 0b0100, 0b0010, 0b0011))


# ---------------------------------------------------------------- lattice


def test_cyclic_group_of_order_six():
    # block diagonal of an order-3 and an order-2 matrix in GL(4,2)
    g = (0b0100, 0b1100, 0b0011, 0b0001)
    G = close_group([g])
    assert G.order == 6
    lat = all_subgroups(G)
    assert sorted(h.order for h in lat) == [1, 2, 3, 6]
    assert lat.conjugacy_class_count == 4


def test_s3():
    lat = all_subgroups(close_group(GL22))
    assert sorted(h.order for h in lat) == [1, 2, 2, 2, 3, 6]
    assert lat.conjugacy_class_count == 4


def test_gl32_lattice_against_naive_enumeration():
    G = close_group(GL32)
    lat = all_subgroups(G)
    assert (len(lat), lat.conjugacy_class_count) == (179, 15)
    table = G.table.tolist()
    naive = set()
    for x in range(168):
        for y in range(x, 168):
            naive.add(naive_closure(table, [x, y]))
    assert {frozenset(h.members.tolist()) for h in lat} == naive


def test_lattice_is_closed_and_conjugation_invariant(G, lattice):
    keys = {h.key for h in lattice}
    assert len(keys) == len(lattice)
    rng = random.Random(11)
    for h in rng.sample(lattice.subgroups, 40):
        assert h.is_closed()
        for g in G.generators:
            gi = G.index_of(g)
            mask = np.zeros(G.order, dtype=bool)
            mask[G.conjugation[gi, h.members]] = True
            assert np.packbits(mask).tobytes() in keys


def test_random_two_generated_subgroups_are_found(G, lattice):
    keys = {frozenset(h.members.tolist()) for h in lattice}
    table = G.table.tolist()
    rng = random.Random(5)
    for _ in range(60):
        x, y = rng.randrange(G.order), rng.randrange(G.order)
        assert naive_closure(table, [x, y]) in keys


def test_lattice_guard(G):
    with pytest.raises(GuardExceeded):
        all_subgroups(G, guard=1000)
    with pytest.raises(GuardExceeded):
        all_subgroups(G, count_cap=50)


def test_cyclic_subgroups_cover_every_element():
    G = close_group(GL32)
    cyc = cyclic_subgroups(G)
    covered = np.zeros(G.order, dtype=bool)
    for c in cyc:
        covered |= c.mask
    assert covered.all()
    assert all(c.order == int(G.element_orders[c.gens[0]]) for c in cyc)


def test_lagrange_and_generation():
    G = close_group(GL32)
    assert trivial_subgroup(G).order == 1
    assert whole_group(G).order == 168
    h = generate(G, [5])
    assert h.order == G.element_orders[5]
    assert trivial_subgroup(G) <= h <= whole_group(G)


# ---------------------------------------------------------------- irreducibility


@pytest.mark.parametrize("gens,d", [([SINGER4], 4), (GL32, 3), (UNITRI, 3), ([(0b0100, 0b1100, 0b0011, 0b0001)], 4)])
def test_irreducibility_matches_brute_force(gens, d):
    G = close_group(gens)
    irr, w = is_irreducible(G)
    brute = brute_invariant(G.generators, d)
    assert irr == (len(brute) == 2)
    if not irr:
        assert w in brute and 0 < w.dim < d


@pytest.mark.parametrize("gens,d", [(UNITRI, 3), ([(0b0100, 0b1100, 0b0011, 0b0001)], 4), ([(0b0100, 0b1000, 0b0001, 0b0010)], 4)])
def test_invariant_subspaces_match_brute_force(gens, d):
    G = close_group(gens)
    brute = brute_invariant(G.generators, d)
    for k in range(d + 1):
        assert set(invariant_subspaces_of_dim(G, k)) == {w for w in brute if w.dim == k}


def test_appendix_group_is_irreducible(G):
    assert is_irreducible(G)[0]


def test_order_432_subgroup_is_reducible(G):
    nm = names(G)
    h = generate(G, [nm["a"], nm["c"]])
    assert h.order == 432
    irr, w = is_irreducible(h)
    assert not irr and w.dim == 6
    for g in h.generator_matrices():
        assert all(vec_times(b, g.rows) in w for b in w.basis)


def test_irreducible_dimension_check(G):
    with pytest.raises(DimensionMismatch):
        is_irreducible(G, d=6)


# ---------------------------------------------------------------- structure


def test_normal_subgroups():
    assert sorted(n.order for n in normal_subgroups(close_group(GL22))) == [1, 3, 6]
    assert sorted(n.order for n in normal_subgroups(close_group(GL32))) == [1, 168]


def test_class_equation():
    G = close_group(GL32)
    sizes = sorted(len(c) for c in conjugacy_classes(G))
    assert sizes == [1, 21, 24, 24, 42, 56]


def test_center_and_derived():
    S3 = close_group(GL22)
    assert center(S3).order == 1
    assert derived_subgroup(S3).order == 3
    D8 = close_group(UNITRI)
    assert center(D8).order == 2 and derived_subgroup(D8).order == 2
    assert exponent(D8) == 4


def test_extraspecial_checks():
    D8 = close_group(UNITRI)
    assert extraspecial_check(D8, whole_group(D8)).ok
    C15 = close_group([SINGER4])
    assert not extraspecial_check(C15, whole_group(C15)).ok
    C4 = generate(D8, [int(np.argmax(D8.element_orders == 4))])
    assert not extraspecial_check(D8, C4).ok


def test_normal_subgroup_of_order_27(G):
    normals = [n for n in normal_subgroups(G) if n.order == 27]
    assert len(normals) == 1
    m = normals[0]
    assert is_normal(G, m) and extraspecial_check(G, m).ok and exponent(G, m) == 3


# ---------------------------------------------------------------- words


@pytest.mark.parametrize("text,parsed", [
    ("a", [("a", 1)]),
    ("a^2c^3", [("a", 2), ("c", 3)]),
    ("(aca)^2", [([("a", 1), ("c", 1), ("a", 1)], 2)]),
    ("x^-1 y x", [("x", -1), ("y", 1), ("x", 1)]),
])
def test_parse_word(text, parsed):
    assert parse_word(text) == parsed


@pytest.mark.parametrize("bad", ["", "a^", "(ab", "ab)", "a*b", "^2"])
def test_parse_word_errors(bad):
    with pytest.raises(WordError):
        parse_word(bad)


def test_evaluate_word():
    G = close_group(GL32)
    a, b = G.index_of(GL32[0]), G.index_of(GL32[1])
    nm = {"a": a, "b": b}
    assert evaluate_word(G, "(ab)^2", nm) == G.mul(G.mul(a, b), G.mul(a, b))
    assert evaluate_word(G, "a^-1 a", nm) == 0
    with pytest.raises(WordError):
        evaluate_word(G, "z", nm)


def test_presentation_negative_control(G):
    m = [n for n in normal_subgroups(G) if n.order == 27][0]
    rep = verify_quotient_presentation(G, m, {"x": "aba^5b^2", "y": "a", "z": "b"}, names(G))
    assert not rep.ok
    assert not all(rep.relations.values())
    assert len(rep.relations) == len(DEFAULT_RELATORS)


def test_presentation_rejects_non_normal(G):
    nm = names(G)
    with pytest.raises(GroupError):
        verify_quotient_presentation(G, generate(G, [nm["a"]]), {"x": "a"}, nm)


# ---------------------------------------------------------------- modules


def test_trivial_module():
    rep = module_structure(close_group([], dim=2))
    assert rep.decomposition_dims == [1, 1]
    assert rep.endo_order == 2 and rep.endo_is_field and rep.summands_isomorphic


def test_singer_cycle_module():
    # the centraliser of a Singer cycle is GF(16)
    rep = module_structure(close_group([SINGER4]))
    assert rep.decomposition_dims == [4]
    assert rep.endo_order == 16 and rep.endo_is_field


def test_module_of_normal_27(G):
    m = [n for n in normal_subgroups(G) if n.order == 27][0]
    rep = module_structure(m, 12)
    assert rep.decomposition_dims == [6, 6]
    assert rep.summands_isomorphic and rep.endo_order == 4
    assert len(invariant_subspaces_of_dim(m, 6)) == 5
