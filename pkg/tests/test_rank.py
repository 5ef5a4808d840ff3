from hypothesis import given, settings, strategies as st
import pytest

from sandwichkit.category import identity
from sandwichkit.errors import Unsupported
from sandwichkit.frame import RegularFrame
from sandwichkit.rank import (RankResult, RectGroupSpec, generated, idrank, rank, rank_formula_check,
                              rect_group_check, relative_idrank, relative_rank,
                              sandwich_rank_check, sandwich_rank_lower_bound)
from sandwichkit.sandwich import SandwichSemigroup
from sandwichkit.semigroup import (FiniteSemigroup, cyclic_group, full_transformation_monoid,
                                   rectangular_band, rectangular_group, symmetric_group,
                                   trivial_monoid)

import oracles as O
from conftest import category, sandwiches

T2 = full_transformation_monoid(2)
T3 = full_transformation_monoid(3)
RANK_T3 = 3        # frozen from oracles.naive_rank over all subsets of size <= 3


def small_subsemigroups():
    return st.lists(st.integers(0, 26), min_size=1, max_size=3).map(
        lambda g: T3.sub(T3.generated(g))).filter(lambda S: S.n <= 11)


def test_generated_examples():
    assert generated(T3, range(27)) == set(range(27))
    assert generated(T3, [T3.identity]) == {T3.identity}
    consts = [T2.position((0, 0)), T2.position((1, 1))]
    assert generated(T2, consts) == set(consts)


@given(small_subsemigroups(), st.data())
@settings(max_examples=40, deadline=None)
def test_generated_is_closure(S, data):
    A = set(data.draw(st.lists(st.integers(0, S.n - 1), max_size=3)))
    G = generated(S, A)
    assert A <= G == generated(S, G)
    assert G == O.generated(S.table.tolist(), A)


@given(small_subsemigroups())
@settings(max_examples=40, deadline=None)
def test_rank_matches_naive_oracle(S):
    t = S.table.tolist()
    res = rank(S)
    assert res.value == O.naive_rank(t)
    assert generated(S, res.witness) == set(range(S.n)) and len(res.witness) == res.value
    A = [0]
    assert relative_rank(S, A).value == O.naive_rank(t, A)
    E = O.idempotents(t)
    if O.generated(t, E) == set(range(S.n)):
        r = idrank(S)
        assert r.value == O.naive_rank(t, pool=E)
        assert all(S.table[w, w] == w for w in r.witness)
        assert relative_idrank(S, A if 0 in E else []).value == O.naive_rank(t, A if 0 in E else [], E)
    else:
        with pytest.raises(Unsupported):
            idrank(S)


def test_rank_examples():
    assert rank(cyclic_group(2)).value == 1
    assert rank(rectangular_band(2, 3)).value == 3
    assert rank(symmetric_group(3)).value == 2
    assert rank(T3).value == RANK_T3
    assert idrank(rectangular_band(3, 2)).value == 3
    assert idrank(trivial_monoid()).value == 1
    assert relative_rank(T3, range(27)).value == 0
    assert relative_rank(T3, []).value == rank(T3).value


def test_rank_t3_oracle():
    assert O.naive_rank(T3.table.tolist()) == RANK_T3


def test_idempotent_generated_monoid_lemma():
    # the idempotent-generated part of T3 together with the identity
    E = T3.idempotents()
    M = T3.sub(T3.generated(E))
    units = [M.identity]
    assert rank(M).value == 1 + relative_rank(M, units).value
    assert idrank(M).value == 1 + relative_idrank(M, units).value


def test_budget_is_reported():
    res = rank(T3, budget=2)
    assert res.exceeded and res.value is None
    assert res.to_json()["value"] == "budget"
    assert rank(T3).to_json()["value"] == 3


@pytest.mark.parametrize("r,l,G", [(2, 3, trivial_monoid()), (2, 2, cyclic_group(2)),
                                   (1, 1, symmetric_group(3)), (3, 1, cyclic_group(3))])
def test_rect_group_check(r, l, G):
    rep = rect_group_check(RectGroupSpec(r, l, G))
    assert rep.ok, rep.violations[:3]
    assert rep.data["rank"] == max(r, l, rep.data["rank_G"])


def test_rect_group_spec_requires_group():
    with pytest.raises(Unsupported):
        RectGroupSpec(2, 2, T2).build()


def test_rect_group_product():
    T = RectGroupSpec(2, 3, cyclic_group(3)).build()
    x, y = T.position((1, 2, 0)), T.position((0, 2, 2))
    assert T.elements[T.mul(x, y)] == (1, 1, 2)


@pytest.mark.parametrize("kind,sizes", [("fullmap", (3, 2)), ("injpartial", (2, 2)), ("partialmap", (2, 2))])
def test_rank_formulas(kind, sizes):
    for sw in sandwiches(kind, sizes):
        rep = rank_formula_check(RegularFrame(sw))
        assert rep.ok, rep.violations[:3]
        assert rep.data["ideal_hypothesis"] and not rep.data["budget"]
        if kind == "injpartial":
            assert rep.data["r"] == rep.data["l"] == 1


def test_identity_frame_rank_reduces():
    c, amb = category("fullmap", (2, 3))
    fr = RegularFrame(SandwichSemigroup(c, 1, 1, identity(c, 1), amb))
    rep = rank_formula_check(fr)
    assert rep.ok
    d = rep.data
    assert d["rank_P"]["value"] == RANK_T3 == d["rankU_rhs"]


def test_sandwich_rank_lower_bound():
    c, amb = category("fullmap", (2, 2))
    sw = SandwichSemigroup(c, 1, 1, identity(c, 1), amb)
    bound = sandwich_rank_lower_bound(sw)
    assert bound == 1 and rank(sw.semigroup).value == 2
    for sw in sandwiches("partialmap", (2, 2)):
        rep, res = sandwich_rank_check(sw)
        assert rep.ok and not res.exceeded
        assert rep.data["lower_bound"] <= res.value
        assert res.value == O.naive_rank(sw.star.tolist())


def test_single_maximal_class_bound():
    c, amb = category("fullmap", (3, 2))
    for sw in sandwiches("fullmap", (3, 2)):
        maxes = sw.ambient.maximal_j_classes(sw.elements.tolist())
        if len(maxes) == 1:
            J = maxes[0]
            assert sandwich_rank_lower_bound(sw) == max(len(sw.ambient.classes_within("R", J)),
                                                        len(sw.ambient.classes_within("L", J)))


def test_rank_result_json():
    r = RankResult(3, [0, 4, 7], 2, 10, 0.01)
    assert r.to_json() == {"value": 3, "witness": [0, 4, 7], "lower_bound": 2, "nodes_explored": 10,
                           "seconds": 0.01}
    assert "seconds" not in r.to_json(timing=False)
