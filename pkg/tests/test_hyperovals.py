from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from pseudohyperovals.field import GF2, make_field
from pseudohyperovals.geometry import GuardExceeded, ProjectivePoint, field_reduce
from pseudohyperovals.hyperovals import (
    PseudoHyperoval,
    check_hyperoval,
    check_pseudo_hyperoval,
    complete_pseudo_oval,
    completions,
    is_hyperoval,
    is_pseudo_hyperoval,
    is_pseudo_oval,
    lunelli_sce,
    lunelli_sce_opolynomial,
    normalize_to_canonical,
    pairwise_trivial,
    pg52_classes,
    pg52_completions,
    pointset_stabilizer_pgammal3,
    reduce_hyperoval,
    reduce_pseudo_hyperoval,
    regular_hyperoval,
)
from pseudohyperovals.linalg import DimensionMismatch, Subspace

F16 = make_field(4, 0b10011)


def det3(F, a, b, c):
    m = F.mul
    return (m(a[0], m(b[1], c[2])) ^ m(a[0], m(b[2], c[1])) ^ m(a[1], m(b[0], c[2]))
            ^ m(a[1], m(b[2], c[0])) ^ m(a[2], m(b[0], c[1])) ^ m(a[2], m(b[1], c[0])))


def oracle_is_arc(points):
    F = points[0].field
    return all(det3(F, p.coords, q.coords, r.coords) for p, q, r in combinations(points, 3))


@pytest.mark.parametrize("h", [1, 2, 3, 4])
def test_regular_hyperoval(h):
    H = regular_hyperoval(h)
    assert len(H) == 2**h + 2
    assert is_hyperoval(H)
    assert oracle_is_arc(list(H.points))


def test_lunelli_sce_is_a_hyperoval():
    H = lunelli_sce()
    assert len(H) == 18
    assert is_hyperoval(H)
    assert oracle_is_arc(list(H.points))


def test_lunelli_sce_polynomial_is_a_permutation_with_zero_at_zero():
    values = [lunelli_sce_opolynomial(t) for t in range(16)]
    assert sorted(values) == list(range(16))
    assert values[0] == 0 and values[1] == 1


def test_extra_linear_term_breaks_the_arc():
    eta = 0b10
    pts = [ProjectivePoint.of((1, t, lunelli_sce_opolynomial(t) ^ F16.mul(eta, t)), field=F16) for t in range(16)]
    pts += [ProjectivePoint.of((0, 1, 0), field=F16), ProjectivePoint.of((0, 0, 1), field=F16)]
    v = check_hyperoval(pts, 16)
    assert not v.ok and v.reason
    assert not oracle_is_arc(pts)


def test_removing_a_point_reports_cardinality():
    H = regular_hyperoval(3)
    v = check_hyperoval(H.points[:-1], 8)
    assert not v.ok and "cardinality" in v.reason


def test_collinear_triple_is_witnessed():
    H = regular_hyperoval(2)
    F = H.field
    pts = list(H.points)
    # swap one point for a point on the line through the first two
    a, b = pts[0].coords, pts[1].coords
    pts[2] = ProjectivePoint.of(tuple(x ^ y for x, y in zip(a, b)), field=F)
    v = check_hyperoval(pts, 4)
    assert not v.ok
    assert v.witness


@pytest.mark.parametrize("h", [1, 2, 3])
def test_field_reduced_regular_hyperoval_is_pseudo(h):
    o = reduce_hyperoval(regular_hyperoval(h))
    assert (o.n, o.f, len(o)) == (h, 1, 2**h + 2)
    assert is_pseudo_hyperoval(o)
    assert pairwise_trivial(o.elements)


def test_field_reduced_lunelli_sce(pseudo_ls):
    assert (pseudo_ls.n, len(pseudo_ls)) == (4, 18)
    assert is_pseudo_hyperoval(pseudo_ls)


def test_reduction_of_a_pseudo_hyperoval_over_gf4():
    F4 = make_field(2)
    H = regular_hyperoval(2)
    # treat the hyperoval of PG(2,4) as a pseudo-hyperoval with n = 1, f = 2
    o = PseudoHyperoval(1, 2, tuple(Subspace.span([p.vec], 3, F4) for p in H.points))
    assert is_pseudo_hyperoval(o)
    r = reduce_pseudo_hyperoval(o)
    assert (r.n, r.f) == (2, 1)
    assert is_pseudo_hyperoval(r)
    assert reduce_pseudo_hyperoval(r) is r


def test_pseudo_checks_reject(pseudo_conic):
    els = list(pseudo_conic.elements)
    v = check_pseudo_hyperoval(els[:-1], 2, 1)
    assert not v.ok and "cardinality" in v.reason
    v = check_pseudo_hyperoval(els[:-1] + [els[0]], 2, 1)
    assert not v.ok
    bad = Subspace.span([els[0].basis[0], els[1].basis[0]], 6, GF2)
    v = check_pseudo_hyperoval(els[:-1] + [bad], 2, 1)
    assert not v.ok and len(v.witness) == 3
    with pytest.raises(DimensionMismatch):
        check_pseudo_hyperoval(els, 3, 1)


def test_completion_recovers_the_deleted_element(pseudo_conic):
    els = list(pseudo_conic.elements)
    for i in range(len(els)):
        partial = els[:i] + els[i + 1:]
        assert is_pseudo_oval(partial, 2)
        o = complete_pseudo_oval(partial)
        assert o.elements[-1] == els[i]


@pytest.mark.parametrize("drop", [0, 8], ids=["pointed-conic", "conic"])
def test_pg82_pseudo_conics_complete_to_the_pseudo_hyperconic(drop):
    # index 8 is the nucleus (0,1,0); index 0 is the conic point (1,0,0)
    H = regular_hyperoval(3)
    full = [field_reduce(p) for p in H.points]
    partial = full[:drop] + full[drop + 1:]
    o = complete_pseudo_oval(partial)
    assert o.elements[-1] == full[drop]
    assert set(o.elements) == set(full)


def test_pg11_completion_is_beyond_the_guard(pseudo_ls):
    with pytest.raises(GuardExceeded):
        complete_pseudo_oval(list(pseudo_ls.elements[1:]))


def test_completion_errors(pseudo_conic):
    els = list(pseudo_conic.elements)
    with pytest.raises(ValueError):
        completions(els[:1])
    with pytest.raises(ValueError):
        complete_pseudo_oval(els[:3])
    with pytest.raises(GuardExceeded):
        completions(els[:3], guard=10)


def test_three_elements_have_several_completions(pseudo_conic):
    # a pseudo-arc of size 3 is far from complete
    assert len(completions(list(pseudo_conic.elements[:3]))) > 1


@pytest.mark.parametrize("h,order,orbits", [(1, 24, [4]), (2, 720, [6]), (3, 1512, [1, 9])])
def test_regular_hyperoval_stabiliser(h, order, orbits):
    grp, orb = pointset_stabilizer_pgammal3(regular_hyperoval(h))
    assert len(grp) == order
    assert sorted(len(o) for o in orb) == orbits
    pts = set(regular_hyperoval(h).points)
    for c in grp[:20]:
        assert {c(p) for p in pts} == pts


def test_stabiliser_rejects_wrong_q():
    with pytest.raises(DimensionMismatch):
        pointset_stabilizer_pgammal3(regular_hyperoval(2), q=8)


def test_pg52_single_class(pseudo_conic):
    comps = pg52_completions()
    assert comps
    assert all(is_pseudo_hyperoval(list(c), 2, 1) for c in comps)
    classes = pg52_classes()
    assert len(classes) == 1
    # the field-reduced conic belongs to it after re-anchoring on any triple
    c0 = normalize_to_canonical(pseudo_conic.elements, pseudo_conic.elements[:3])
    assert c0 in set(comps)


@given(st.permutations(range(6)))
@settings(max_examples=20, deadline=None)
def test_verdict_is_order_independent(perm):
    o = reduce_hyperoval(regular_hyperoval(2))
    els = [o.elements[i] for i in perm]
    assert is_pseudo_hyperoval(els, 2, 1)
