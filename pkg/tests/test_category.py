from math import comb, factorial

from hypothesis import given, settings, strategies as st
import pytest

from sandwichkit.category import (Morphism, build_category, category_from_json, category_to_json,
                                  compose, homset_size, identity, inverses, is_regular,
                                  parse_morphism, regular_mask)
from sandwichkit.errors import BudgetError, DomainMismatch, PreconditionError

import oracles as O
from conftest import category

KIND_SIZES = st.sampled_from(["fullmap", "partialmap", "injpartial", "matf2"])


def test_homset_counts_examples():
    assert len(build_category("fullmap", [3, 2]).hom(0, 1)) == 8
    assert len(build_category("partialmap", [2, 2]).hom(0, 1)) == 9
    assert len(build_category("injpartial", [2, 2]).hom(0, 1)) == 7


@given(KIND_SIZES, st.integers(1, 3), st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_homset_closed_forms(kind, m, n):
    closed = {"fullmap": n ** m, "partialmap": (n + 1) ** m,
              "injpartial": sum(comb(m, k) * comb(n, k) * factorial(k) for k in range(min(m, n) + 1)),
              "matf2": 2 ** (m * n)}[kind]
    c = build_category(kind, [m, n])
    assert len(c.hom(0, 1)) == homset_size(kind, m, n) == closed
    assert [x.payload for x in c.hom(0, 1)] == sorted(O.homset(kind, m, n))


@pytest.mark.parametrize("kind,sizes", [("fullmap", (2, 3)), ("partialmap", (2, 2)),
                                        ("injpartial", (2, 2)), ("matf2", (2, 2))])
def test_composition_matches_oracle(kind, sizes):
    c, _ = category(kind, sizes)
    for x in c.elements:
        for y in c.elements:
            if x.dst != y.src:
                continue
            z = compose(c, x, y)
            assert (z.src, z.dst) == (x.src, y.dst)
            assert z.payload == O.compose(kind, sizes[x.src], sizes[x.dst], sizes[y.dst],
                                          x.payload, y.payload)


def test_associativity_exhaustive(pt22):
    c, _ = pt22
    els = c.elements
    for x in els:
        for y in els:
            if x.dst != y.src:
                continue
            xy = compose(c, x, y)
            for z in els:
                if y.dst == z.src:
                    assert compose(c, xy, z) == compose(c, x, compose(c, y, z))


@given(st.sampled_from(["fullmap", "partialmap", "injpartial"]), st.data())
@settings(max_examples=30, deadline=None)
def test_associativity_sampled_large(kind, data):
    c = build_category(kind, [3, 4])
    pick = lambda i, j: data.draw(st.sampled_from(c.hom(i, j)))
    x, y, z = pick(0, 1), pick(1, 0), pick(0, 1)
    assert compose(c, compose(c, x, y), z) == compose(c, x, compose(c, y, z))


def test_partial_map_example():
    c = build_category("partialmap", [2])
    assert compose(c, Morphism(0, 0, (1, 0)), Morphism(0, 0, (2, 1))).payload == (2, 0)


def test_identities():
    assert identity(build_category("fullmap", [3]), 0).payload == (1, 2, 3)
    assert identity(build_category("partialmap", [2]), 0).payload == (1, 2)
    assert identity(build_category("matf2", [2]), 0).payload == (1, 0, 0, 1)
    c, _ = category("matf2", (2, 2))
    for x in c.elements:
        assert compose(c, identity(c, x.src), x) == x == compose(c, x, identity(c, x.dst))


def test_domain_mismatch():
    c = build_category("fullmap", [2, 3])
    x = c.hom(0, 1)[0]
    with pytest.raises(DomainMismatch):
        compose(c, x, x)


def test_size_caps():
    with pytest.raises(BudgetError):
        build_category("fullmap", [5])
    with pytest.raises(BudgetError):
        build_category("matf2", [4])
    assert len(build_category("matf2", [4], unsafe_sizes=True).hom(0, 0)) == 2 ** 16
    with pytest.raises(PreconditionError):
        build_category("fullmap", [])


@pytest.mark.parametrize("kind,sizes", [("fullmap", (2, 3)), ("partialmap", (2, 2)),
                                        ("injpartial", (2, 2)), ("matf2", (2, 2))])
def test_inverses_match_oracle(kind, sizes):
    c, _ = category(kind, sizes)
    bc = O.BruteCategory(kind, sizes)
    for x in c.elements:
        want = {y for y in bc.hom(x.dst, x.src)
                if bc.mul(bc.mul((x.src, x.dst, x.payload), y), (x.src, x.dst, x.payload))
                == (x.src, x.dst, x.payload)
                and bc.mul(bc.mul(y, (x.src, x.dst, x.payload)), y) == y}
        got = {(y.src, y.dst, y.payload) for y in inverses(c, x)}
        assert got == want
        for y in inverses(c, x):
            assert x in inverses(c, y)
        assert is_regular(c, x) == bool(want)
        if kind == "injpartial":
            assert len(got) == 1


def test_identity_and_empty_inverses(pt22):
    c, _ = pt22
    e = identity(c, 0)
    assert e in inverses(c, e)
    empty = Morphism(0, 1, (0, 0))
    assert inverses(c, empty) == {Morphism(1, 0, (0, 0))}


def test_catalog_regular_and_synthetic_nonregular():
    for kind in ("fullmap", "partialmap", "injpartial", "matf2"):
        assert regular_mask(category(kind, (2, 2))[0]).all()
    c = build_category("partialmap", [2])
    sub = c.generate([c.index[identity(c, 0)], c.index[Morphism(0, 0, (2, 0))]])
    assert len(sub) == 3
    assert not is_regular(sub, Morphism(0, 0, (2, 0)))
    assert is_regular(sub, Morphism(0, 0, (0, 0)))


def test_json_roundtrip_and_parsing():
    c = build_category("injpartial", [2, 3])
    c2 = category_from_json(category_to_json(c))
    assert c2.elements == c.elements
    x = c.hom(0, 1)[5]
    assert Morphism.from_json(x.to_json()) == x
    assert parse_morphism(c, 0, 1, "5") == x
    assert parse_morphism(c, 0, 1, ",".join(map(str, x.payload))) == x
    with pytest.raises(PreconditionError):
        parse_morphism(c, 0, 1, "99")
    with pytest.raises(PreconditionError):
        parse_morphism(c, 0, 1, "3,3")


def test_restrict_rejects_unclosed():
    c = build_category("fullmap", [2])
    const = c.index[Morphism(0, 0, (1, 1))]
    swap = c.index[Morphism(0, 0, (2, 1))]
    with pytest.raises(PreconditionError):
        c.restrict([const, swap])
    assert len(c.generate([const, swap])) == 4      # swap squares to the identity
