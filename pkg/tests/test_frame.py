import json

import numpy as np
import pytest

from sandwichkit.category import Morphism, build_category, identity, inverse_indices
from sandwichkit.eggbox import render_dot, render_text
from sandwichkit.errors import PreconditionError
from sandwichkit.frame import (RegularFrame, build_frame, frame_eggboxes, frame_report, hat_analysis,
                               idempotent_fiber, inverse_case, is_sandwich_regular, mi_structure,
                               pullback_check)
from sandwichkit.report import _jsonable
from sandwichkit.sandwich import SandwichSemigroup

import oracles as O
from conftest import catalog_frames, category, instance_id, sandwiches


def brute_frame(fr):
    """Sizes of P^a, W, T1, T2 and the pullback pair count, from scratch."""
    sw = fr.sw
    c = sw.category
    bc = O.BruteCategory(c.kind, c.sizes)
    a = (sw.a.src, sw.a.dst, sw.a.payload)
    els, table = O.sandwich_table(bc, sw.i, sw.j, a)
    P = [els[x] for x in O.regular_elements(table)]
    W = {bc.mul(bc.mul(a, x), a) for x in els}
    def reg_part(items):
        items = sorted(items)
        pos = {x: k for k, x in enumerate(items)}
        tab = [[pos[bc.mul(x, y)] for y in items] for x in items]
        return {items[k] for k in O.regular_elements(tab)}
    T1 = reg_part({bc.mul(x, a) for x in els})
    T2 = reg_part({bc.mul(a, x) for x in els})
    pairs = sum(1 for g in T1 for h in T2 if bc.mul(a, g) == bc.mul(h, a))
    return len(P), len(W), len(T1), len(T2), pairs


@pytest.mark.parametrize("fr", catalog_frames(), ids=lambda f: instance_id(f.sw))
def test_frame_reports_clean(fr):
    out, reports = frame_report(fr)
    assert out["violations"] == []
    want = brute_frame(fr)
    assert (out["|P^a|"], out["|W|"], out["|T1|"], out["|T2|"]) == want[:4]
    assert reports[1].data["pair_count"] == want[4]
    assert out["r"] * out["l"] == out["|V(a)|"]
    assert out["mi_dominated"] is True
    json.dumps(_jsonable(out))


def test_all_b_choices_agree():
    c, amb = category("fullmap", (2, 3))
    for sw in sandwiches("fullmap", (2, 3)):
        base = RegularFrame(sw)
        hb = {base.Pa.elements[x] for x in hat_analysis(base)[0].hb}
        for b in base.V:
            fr, rep = build_frame(sw, b)
            assert rep.ok
            assert np.array_equal(fr.W.table, base.W.table)
            assert {fr.Pa.elements[x] for x in hat_analysis(fr)[0].hb} == hb


def test_identity_frame_is_trivial():
    c, amb = category("fullmap", (2, 3))
    sw = SandwichSemigroup(c, 1, 1, identity(c, 1), amb)
    fr = RegularFrame(sw)
    assert fr.Pa.n == fr.W.n == fr.T1.n == fr.T2.n == 27
    for f in (fr.psi1, fr.psi2, fr.phi1, fr.phi2, fr.phi):
        assert np.array_equal(f, np.arange(27))
    hat, rep = hat_analysis(fr)
    assert rep.ok and hat.r == hat.l == 1
    assert all(e["r"] == e["l"] == 1 for e in hat.hat_h)
    rep = pullback_check(fr)
    assert rep.data["pair_count"] == 27


def test_fullmap_32_image_two():
    c, amb = category("fullmap", (3, 2))
    for a in c.hom(1, 0):
        sw = SandwichSemigroup(c, 0, 1, a, amb)
        fr, rep = build_frame(sw)
        assert rep.ok
        if len(set(a.payload)) == 2:
            assert fr.W.n == 4
        hat, hrep = hat_analysis(fr)
        assert hrep.ok
        assert any(e["r"] * e["l"] > 1 and e.get("rect_group") for e in hat.hat_h)
        assert mi_structure(fr, hat).data["mi_dominated"]


def test_injpartial_inverse_case():
    for sw in sandwiches("injpartial", (2, 2)):
        fr = RegularFrame(sw)
        assert len(fr.V) == 1
        rep = inverse_case(fr)
        assert rep.ok and rep.data["uniquely_sandwich_regular"]
        assert fr.Pa.is_inverse()
    c, amb = category("injpartial", (2, 2))
    fr = RegularFrame(SandwichSemigroup(c, 0, 0, identity(c, 0), amb))
    assert fr.Pa.n == 7 and fr.Pa.is_inverse()


def test_fullmap_constant_not_uniquely_regular():
    c, amb = category("fullmap", (2, 2))
    fr = RegularFrame(SandwichSemigroup(c, 0, 1, Morphism(1, 0, (1, 1)), amb))
    assert len(fr.V) > 1
    assert not inverse_case(fr).data["uniquely_sandwich_regular"]


def test_null_sandwich_fiber():
    c, amb = category("partialmap", (2, 2))
    fr = RegularFrame(SandwichSemigroup(c, 0, 1, Morphism(1, 0, (0, 0)), amb))
    assert fr.W.n == 1 and fr.Pa.n == 1
    assert idempotent_fiber(fr).ok
    boxes = frame_eggboxes(fr)
    assert all(b.shape == (1, 1) for b in boxes)


def test_non_sandwich_regular_fixture():
    pt = build_category("partialmap", [2])
    nil = Morphism(0, 0, (2, 0))
    sub = pt.generate([pt.index[identity(pt, 0)], pt.index[nil]])
    for a in (nil, identity(sub, 0)):
        sw = SandwichSemigroup(sub, 0, 0, sub.index[a])
        assert not is_sandwich_regular(sw)
        with pytest.raises(PreconditionError):
            RegularFrame(sw)
    for sw in sandwiches("matf2", (2, 2)):
        assert is_sandwich_regular(sw)


def test_b_must_be_inverse():
    c, amb = category("fullmap", (2, 2))
    sw = SandwichSemigroup(c, 0, 1, Morphism(1, 0, (1, 1)), amb)
    bad = [p for p in c.hom_range(0, 1) if p not in inverse_indices(c, sw.a_index)][0]
    with pytest.raises(PreconditionError):
        RegularFrame(sw, bad)


def test_paired_eggboxes_have_hat_blocks():
    c, amb = category("fullmap", (3, 2))
    sw = SandwichSemigroup(c, 1, 0, Morphism(0, 1, (1, 1, 2)), amb)
    fr = RegularFrame(sw)
    hat = hat_analysis(fr)[0]
    left, right = frame_eggboxes(fr, None, hat)
    assert left.shape[0] * left.shape[1] >= right.shape[0] * right.shape[1]
    assert len(left.cells) == hat.r * right.shape[0] and len(left.cells[0]) == hat.l * right.shape[1]
    assert render_text(left) and "digraph" in render_dot([("P", left), ("W", right)])
