from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from sandwichkit.category import Morphism, build_category, identity
from sandwichkit.errors import PreconditionError
from sandwichkit.sandwich import (SandwichSemigroup, compute_p_sets, green_transfer_check,
                                  invertibility_flags, invertibility_report, p_sets, regular_set,
                                  sandwich, subsemigroup_inheritance)
from sandwichkit.semigroup import full_transformation_monoid, is_isomorphism

import oracles as O
from conftest import CATALOG, catalog_sandwiches, category, instance_id, sandwiches


def brute(sw):
    c = sw.category
    return O.BruteCategory(c.kind, c.sizes), (sw.a.src, sw.a.dst, sw.a.payload)


def test_star_matches_oracle_on_catalog():
    for kind, sizes in CATALOG:
        bc = O.BruteCategory(kind, sizes)
        for sw in sandwiches(kind, sizes):
            els, table = O.sandwich_table(bc, sw.i, sw.j, (sw.a.src, sw.a.dst, sw.a.payload))
            assert [(m.src, m.dst, m.payload) for m in (sw.category.elements[g] for g in sw.elements)] == els
            assert sw.star.tolist() == table


def test_p_sets_match_oracle():
    for kind, sizes in [("partialmap", (2, 2)), ("fullmap", (2, 3))]:
        bc = O.BruteCategory(kind, sizes)
        for sw in sandwiches(kind, sizes):
            ps = compute_p_sets(sw)
            P1, P2, P3 = O.p_sets(bc, sw.i, sw.j, (sw.a.src, sw.a.dst, sw.a.payload))
            assert (set(ps.P1), set(ps.P2), set(ps.P3)) == (P1, P2, P3)
            assert ps.P == frozenset(P1 & P2)


def test_sandwich_green_matches_oracle():
    bc = O.BruteCategory("partialmap", (2, 2))
    for sw in sandwiches("partialmap", (2, 2)):
        _, table = O.sandwich_table(bc, sw.i, sw.j, (sw.a.src, sw.a.dst, sw.a.payload))
        want = O.semigroup_green(table)
        for k in "RLHDJ":
            assert {frozenset(c) for c in sw.green.classes[k]} == want[k]


@pytest.mark.parametrize("sw", catalog_sandwiches(), ids=instance_id)
def test_catalog_reports_clean(sw):
    ps, rep = p_sets(sw)
    assert rep.ok, rep.violations
    assert green_transfer_check(sw, ps).ok
    assert invertibility_report(sw, ps).ok
    direct, rr = regular_set(sw, ps)
    assert rr.ok
    reg = O.regular_elements(sw.star.tolist())
    assert direct == reg


def test_sandwich_examples():
    c, amb = category("fullmap", (2, 2))
    e = identity(c, 0)
    sw = sandwich(c, 0, 0, e, amb)
    assert np.array_equal(sw.star, c.table(0, 0, 0) - c.start(0, 0))
    swap = Morphism(1, 0, (2, 1))
    sw = sandwich(c, 0, 1, swap, amb)
    T2 = full_transformation_monoid(2)
    # x -> xa is an isomorphism S_01^a -> (S_00, ·) ≅ T2
    f = [T2.position(tuple(v - 1 for v in c.elements[int(g)].payload)) for g in sw.xa]
    assert is_isomorphism(np.array(f), sw.semigroup, T2)
    p, amb_p = category("partialmap", (2, 2))
    sw = sandwich(p, 0, 1, Morphism(1, 0, (0, 0)), amb_p)
    empty = sw.to_local(p.index[Morphism(0, 1, (0, 0))])
    assert (sw.star == empty).all()
    with pytest.raises(PreconditionError):
        SandwichSemigroup(c, 0, 1, Morphism(0, 1, (1, 1)))


def test_p_set_examples():
    c, amb = category("fullmap", (2, 2))
    sw = SandwichSemigroup(c, 0, 1, Morphism(1, 0, (2, 1)), amb)
    ps = compute_p_sets(sw)
    assert ps.P1 == ps.P2 == ps.P == frozenset(range(4))
    sw = SandwichSemigroup(c, 0, 0, identity(c, 0), amb)
    assert compute_p_sets(sw).P == frozenset(range(4))
    p, amb_p = category("partialmap", (2, 2))
    sw = SandwichSemigroup(p, 0, 1, Morphism(1, 0, (0, 0)), amb_p)
    ps, rep = p_sets(sw)
    empty = sw.to_local(p.index[Morphism(0, 1, (0, 0))])
    assert ps.P1 == ps.P2 == ps.P3 == frozenset({empty}) and rep.ok
    assert regular_set(sw, ps)[0] == {empty}


def test_invertibility_examples():
    c, amb = category("fullmap", (2, 2))
    flags = invertibility_flags(SandwichSemigroup(c, 0, 1, Morphism(1, 0, (2, 1)), amb))
    assert all(flags.values())
    flags = invertibility_flags(SandwichSemigroup(c, 0, 1, Morphism(1, 0, (1, 1)), amb))
    assert not flags["cancel_R"]
    p, amb_p = category("partialmap", (2, 2))
    flags = invertibility_flags(SandwichSemigroup(p, 0, 1, Morphism(1, 0, (0, 0)), amb_p))
    assert not any(flags.values())


def test_identity_sandwich_is_trivial_transfer():
    c, amb = category("matf2", (2, 2))
    sw = SandwichSemigroup(c, 1, 1, identity(c, 1), amb)
    g = sw.green
    for k in "RLHDJ":
        for x in range(len(sw)):
            ambient = {m - c.start(1, 1) for m in amb.cls(k, sw.to_global(x)) if c.elements[m].src == 1
                       and c.elements[m].dst == 1}
            assert set(g.cls(k, x)) == ambient


@pytest.mark.parametrize("kind", ["fullmap", "injpartial"])
def test_subsemigroup_inheritance(kind):
    pt = build_category("partialmap", [2, 2])
    keep = [pt.index[m] for m in build_category(kind, [2, 2]).elements]
    rep = subsemigroup_inheritance(pt, pt.restrict(keep))
    assert rep.ok, rep.violations[:3]
    assert subsemigroup_inheritance(pt, pt.restrict(range(len(pt)))).ok


def test_inheritance_on_nonregular_sub():
    pt = build_category("partialmap", [2, 2])
    gens = [pt.index[identity(pt, 0)], pt.index[Morphism(0, 1, (2, 0))], pt.index[Morphism(1, 0, (1, 0))]]
    sub = pt.generate(gens)
    rep = subsemigroup_inheritance(pt, sub)
    assert rep.ok and not rep.data["sub_regular"]
    with pytest.raises(PreconditionError):
        subsemigroup_inheritance(pt, build_category("partialmap", [2, 3]))


@given(st.sampled_from(CATALOG), st.data())
@settings(max_examples=25, deadline=None)
def test_p_set_ideal_properties(inst, data):
    kind, sizes = inst
    c, amb = category(kind, sizes)
    i, j = data.draw(st.integers(0, 1)), data.draw(st.integers(0, 1))
    a = data.draw(st.sampled_from(list(c.hom_range(j, i))))
    sw = SandwichSemigroup(c, i, j, a, ambient=amb)
    ps = compute_p_sets(sw)
    t = sw.star
    n = len(sw)
    assert all(t[u, x] in ps.P1 for x in ps.P1 for u in range(n))
    assert all(t[x, u] in ps.P2 for x in ps.P2 for u in range(n))
    assert sw.semigroup.is_closed(ps.P)
    assert sw.semigroup.is_associative()
