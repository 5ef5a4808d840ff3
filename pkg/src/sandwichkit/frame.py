"""The regular part of a sandwich semigroup and the monoid W.

For a sandwich-regular ``a`` in S_ji and ``b`` in V(a) the frame holds

* ``Pa`` - P^a = Reg(S_ij^a) under *a,
* ``W``  - aS_ija under x ⊛ y = x b y (a monoid with identity a),
* ``T1`` - Reg(S_ij a, ·) inside S_i, ``T2`` - Reg(a S_ij, ·) inside S_j,

and the epimorphisms between them as position arrays:
psi1 x -> xa, psi2 x -> ax, phi1 g -> ag, phi2 h -> ha, phi x -> axa.
"""

from dataclasses import dataclass, field
import random

import numpy as np

from .category import inverse_indices, regular_mask
from .eggbox import EggBox
from .errors import PreconditionError
from .green import (domination_report, green_semigroup, mid_identities, maximal_idempotents,
                    rectangular_group_test, regularity_preserving)
from .report import Report
from .sandwich import SandwichSemigroup, compute_p_sets, invertibility_flags
from .semigroup import FiniteSemigroup, is_homomorphism, is_isomorphism

ALL_B_LIMIT = 8


def is_sandwich_regular(sw):
    c = sw.category
    reg = regular_mask(c)
    if not reg[sw.a_index]:
        return False
    return all(reg[c.mul(int(ax), sw.a_index)] for ax in sw.ax)


def _product_semigroup(c, handles, op, name):
    handles = sorted(set(int(h) for h in handles))
    pos = {h: k for k, h in enumerate(handles)}
    table = [[pos[op(x, y)] for y in handles] for x in handles]
    return FiniteSemigroup(table, handles, name=name)


class RegularFrame:
    def __init__(self, sw, b=None):
        c = sw.category
        self.sw = sw
        self.category = c
        a = self.a = sw.a_index
        self.V = inverse_indices(c, a)
        if not is_sandwich_regular(sw):
            raise PreconditionError("sandwich element is not sandwich-regular")
        if b is None:
            b = min(self.V)
        b = b if isinstance(b, (int, np.integer)) else c.index[b]
        if b not in self.V:
            raise PreconditionError("b must be an inverse of a")
        self.b = int(b)
        self.ps = compute_p_sets(sw)
        P = sorted(self.ps.P)
        self.Pa = sw.semigroup.sub(P, name="P^a")
        mul = c.mul
        w_handles = {mul(int(ax), a) for ax in sw.ax}
        self.W = _product_semigroup(c, w_handles, lambda x, y: mul(mul(x, self.b), y), "W")
        self.SA = _product_semigroup(c, sw.xa, mul, "S_ij a")
        self.AS = _product_semigroup(c, sw.ax, mul, "a S_ij")
        self.T1 = self.SA.sub(np.flatnonzero(self.SA.regular_mask()), name="T1")
        self.T2 = self.AS.sub(np.flatnonzero(self.AS.regular_mask()), name="T2")
        pg = self.Pa.elements                                  # globals of P^a
        self.psi1 = np.array([self.T1.position(mul(x, a)) for x in pg], dtype=np.int64)
        self.psi2 = np.array([self.T2.position(mul(a, x)) for x in pg], dtype=np.int64)
        self.phi1 = np.array([self.W.position(mul(a, g)) for g in self.T1.elements], dtype=np.int64)
        self.phi2 = np.array([self.W.position(mul(h, a)) for h in self.T2.elements], dtype=np.int64)
        self.phi = np.array([self.W.position(mul(mul(a, x), a)) for x in pg], dtype=np.int64)
        self._green = {}

    def green(self, name):
        g = self._green.get(name)
        if g is None:
            g = self._green[name] = green_semigroup(getattr(self, name))
        return g

    @property
    def w_identity(self):
        return self.W.position(self.a)

    def b_position(self):
        return self.Pa.position(self.b)

    def summary(self):
        return {"|P^a|": self.Pa.n, "|W|": self.W.n, "|T1|": self.T1.n, "|T2|": self.T2.n,
                "|V(a)|": len(self.V)}


def build_frame(sw, b=None):
    """Construct the frame and verify the four structural identities, the
    b-independence of ⊛ and the local-monoid isomorphisms."""
    fr = RegularFrame(sw, b)
    c = fr.category
    mul = c.mul
    a = fr.a
    ps = fr.ps
    rep = Report("build_frame")
    pg = set(fr.Pa.elements)
    reg_sa = set(np.flatnonzero(sw.semigroup.regular_mask()).tolist())
    rep.check({sw.to_global(x) for x in reg_sa} == pg, "Reg(S_ij^a) = P^a")
    rep.check(fr.Pa.is_regular(), "P^a is regular")
    p2 = [sw.to_global(x) for x in ps.P2]
    p1 = [sw.to_global(x) for x in ps.P1]
    t1 = set(fr.T1.elements)
    t2 = set(fr.T2.elements)
    rep.check(t1 == {mul(x, a) for x in pg}, "Reg(S_ij a) = P^a a")
    rep.check(t1 == {mul(x, a) for x in p2}, "Reg(S_ij a) = P2^a a")
    rep.check(t2 == {mul(a, x) for x in pg}, "Reg(a S_ij) = a P^a")
    rep.check(t2 == {mul(a, x) for x in p1}, "Reg(a S_ij) = a P1^a")
    w = set(fr.W.elements)
    for name, src in (("P^a", pg), ("P1^a", p1), ("P2^a", p2)):
        rep.check(w == {mul(mul(a, x), a) for x in src}, f"aS_ija = a{name}a")
    rep.check(fr.W.is_regular(), "W is regular")
    rep.check(fr.W.identity == fr.w_identity, "W is a monoid with identity a")
    rep.check(fr.T1.is_regular() and fr.T2.is_regular(), "T1, T2 regular")
    # maps
    for name, f, src, dst in (("psi1", fr.psi1, fr.Pa, fr.T1), ("psi2", fr.psi2, fr.Pa, fr.T2),
                              ("phi1", fr.phi1, fr.T1, fr.W), ("phi2", fr.phi2, fr.T2, fr.W),
                              ("phi", fr.phi, fr.Pa, fr.W)):
        rep.check(is_homomorphism(f, src, dst), f"{name} is a homomorphism")
        rep.check(len(set(f.tolist())) == dst.n, f"{name} is surjective")
    rep.check(np.array_equal(fr.phi1[fr.psi1], fr.phi) and np.array_equal(fr.phi2[fr.psi2], fr.phi),
              "phi = psi1 phi1 = psi2 phi2")
    # b-independence of ⊛
    wel = fr.W.elements
    for b2 in fr.V:
        tab = [[fr.W.position(mul(mul(x, b2), y)) for y in wel] for x in wel]
        rep.check(np.array_equal(np.asarray(tab), fr.W.table), "⊛ independent of b", b=b2)
    # local monoids (ba S_i ba, ·) and (ab S_j ab, ·)
    b = fr.b
    ba, ab = mul(b, a), mul(a, b)
    for side, idem, obj, left in (("ba S_i ba", ba, sw.i, True), ("ab S_j ab", ab, sw.j, False)):
        local = _product_semigroup(c, {mul(mul(idem, s), idem) for s in c.hom_range(obj, obj)}, mul, side)
        img = [mul(b, x) if left else mul(x, b) for x in wel]
        try:
            f = np.array([local.position(v) for v in img])
            iso = is_isomorphism(f, fr.W, local)
        except KeyError:
            iso = False
        rep.check(iso, f"W ≅ {side}")
    # cancellative case: Phi on all of S_ij
    flags = invertibility_flags(sw)
    if flags["cancel_R"] and flags["cancel_L"]:
        Phi = np.array([fr.W.position(mul(mul(a, sw.to_global(x)), a)) for x in range(len(sw))])
        rep.check(is_isomorphism(Phi, sw.semigroup, fr.W), "(aR)+(aL) ⇒ Phi: S_ij^a ≅ W")
    rep.data.update(fr.summary())
    return fr, rep


def pullback_check(fr):
    rep = Report("pullback")
    pairs = list(zip(fr.psi1.tolist(), fr.psi2.tolist()))
    rep.check(len(set(pairs)) == fr.Pa.n, "psi injective")
    mul = fr.category.mul
    a = fr.a
    valid = {(g, h) for g in range(fr.T1.n) for h in range(fr.T2.n)
             if mul(a, fr.T1.elements[g]) == mul(fr.T2.elements[h], a)}
    valid_phi = {(g, h) for g in range(fr.T1.n) for h in range(fr.T2.n)
                 if fr.phi1[g] == fr.phi2[h]}
    rep.check(valid == valid_phi, "ag = ha iff g phi1 = h phi2")
    rep.check(set(pairs) == valid, "im(psi) = {(g,h) : ag = ha}")
    rep.data.update(p_size=fr.Pa.n, pair_count=len(valid))
    rep.check(fr.Pa.n == len(valid), "|P^a| = pair count")
    return rep


@dataclass
class HatData:
    classes: dict                       # K -> list of tuples of P^a positions
    class_of: dict
    hat_h: list = field(default_factory=list)   # per Ĥ-class summary
    r: int = 0                          # dimensions of Ĥ_b^a
    l: int = 0
    hb: tuple = ()


def _partition_by(keys):
    out, cls = {}, np.empty(len(keys), dtype=np.int64)
    order = []
    for x, k in enumerate(keys):
        if k not in out:
            out[k] = len(order)
            order.append([])
        order[out[k]].append(x)
        cls[x] = out[k]
    return [tuple(c) for c in order], cls


def hat_analysis(fr):
    gP = fr.green("Pa")
    gW = fr.green("W")
    sw = fr.sw
    gS = sw.green
    rep = Report("hat")
    phi = fr.phi
    n = fr.Pa.n
    loc = [sw.to_local(h) for h in fr.Pa.elements]       # P position -> S_ij local
    # Green's relations of P^a agree with those of S_ij^a (K != J)
    for k in "RLHD":
        rep.check(all(gP.related(k, x, y) == gS.related(k, loc[x], loc[y])
                      for x in range(n) for y in range(n)), f"{k}^(P^a) = {k}^a restricted")
    classes, class_of = {}, {}
    for k in "RLHDJ":
        classes[k], class_of[k] = _partition_by([int(gW.class_of[k][phi[x]]) for x in range(n)])

    def rel(k, hat, x, y):
        if hat:
            return class_of[k][x] == class_of[k][y]
        return gP.related(k, x, y)

    for k in "RLH":
        for x in range(n):
            for y in range(n):
                if rel(k, False, x, y):
                    rep.check(rel(k, True, x, y), f"{k}^a ⊆ {k}hat", x=x, y=y)
                if rel(k, True, x, y):
                    rep.check(gP.related("D", x, y), f"{k}hat ⊆ D^a", x=x, y=y)
    for x in range(n):
        for y in range(n):
            rep.check(rel("D", True, x, y) == gP.related("D", x, y), "Dhat = D^a", x=x, y=y)
            rep.check(rel("J", True, x, y) == gP.related("J", x, y), "Jhat = J^(P^a)", x=x, y=y)
            rep.check(bool(gP.leq["J"][x, y]) == bool(gW.leq["J"][phi[x], phi[y]]),
                      "J-order isomorphism", x=x, y=y)
    # H-classes of W inside S_ji^b
    swb = SandwichSemigroup(fr.category, sw.j, sw.i, fr.b, ambient=sw.ambient)
    gb = swb.green
    for w in range(fr.W.n):
        hw = {fr.W.elements[u] for u in gW.cls("H", w)}
        hb = {swb.to_global(u) for u in gb.cls("H", swb.to_local(fr.W.elements[w]))}
        rep.check(hw == hb, "H^⊛ = H^b", w=w)
    # phi on H^a classes
    for h in gP.classes["H"]:
        x = h[0]
        img = [int(phi[y]) for y in h]
        target = set(gW.cls("H", phi[x]))
        rep.check(len(set(img)) == len(h) and set(img) == target, "phi|H_x^a bijects onto H_xbar",
                  x=x)
        grp_p, grp_w = gP.is_group_h(x), gW.is_group_h(int(phi[x]))
        rep.check(grp_p == grp_w, "H_x^a group iff H_xbar group", x=x)
        if grp_p and grp_w:
            sub_p = fr.Pa.sub(h)
            sub_w = fr.W.sub(target)
            f = np.array([sub_w.position(fr.W.elements[phi[fr.Pa.position(e)]]) for e in sub_p.elements])
            rep.check(is_isomorphism(f, sub_p, sub_w), "group H-classes isomorphic via phi", x=x)
    # Ĥ classes
    hat_h = []
    for cl in classes["H"]:
        rows = {int(gP.class_of["R"][x]) for x in cl}
        cols = {int(gP.class_of["L"][x]) for x in cl}
        has_e = bool(fr.Pa.idempotent_mask()[list(cl)].any())
        entry = {"members": cl, "r": len(rows), "l": len(cols), "group": has_e}
        if has_e:
            test = rectangular_group_test(fr.Pa, cl)
            entry["rect_group"] = test["ok"]
            rep.check(test["ok"], "Ĥ over an idempotent is a rectangular group", cls=list(cl), **test)
            h_size = len(gP.cls("H", cl[0]))
            rep.check(len(cl) == len(rows) * len(cols) * h_size, "|Ĥ| = r l |H|", cls=list(cl))
            e = [x for x in cl if fr.Pa.table[x, x] == x]
            rep.check(len(e) == len(rows) * len(cols), "E(Ĥ) is an r×l rectangular band")
        hat_h.append(entry)
    bpos = fr.b_position()
    hb = classes["H"][class_of["H"][bpos]]
    r_b = len({int(gP.class_of["R"][x]) for x in hb})
    l_b = len({int(gP.class_of["L"][x]) for x in hb})
    data = HatData(classes, class_of, hat_h, r_b, l_b, hb)
    rep.data.update(r=r_b, l=l_b, hat_h_classes=len(classes["H"]),
                    max_rl=max((e["r"] * e["l"] for e in hat_h), default=0))
    return data, rep


def idempotent_fiber(fr, trials=20, seed=0):
    rep = Report("idempotent_fiber")
    phi = fr.phi
    Ea = set(fr.Pa.idempotents())
    Eb = set(fr.W.idempotents())
    pre = {x for x in range(fr.Pa.n) if int(phi[x]) in Eb}
    rep.check(Ea == pre, "E_a(P^a) = phi^-1(E_b(W))")
    sw = fr.sw
    Esa = {sw.to_global(x) for x in sw.semigroup.idempotents()}
    rep.check(Esa == {fr.Pa.elements[x] for x in Ea}, "E_a(S_ij^a) = E_a(P^a)")
    gen_a = fr.Pa.generated(Ea)
    gen_b = fr.W.generated(Eb)
    rep.check(gen_a == {x for x in range(fr.Pa.n) if int(phi[x]) in gen_b},
              "<E_a(P^a)> = phi^-1(<E_b(W)>)")
    rng = random.Random(seed)
    for _ in range(trials):
        k = rng.randint(1, min(3, fr.Pa.n))
        X = rng.sample(range(fr.Pa.n), k)
        img = fr.W.generated({int(phi[x]) for x in X})
        lhs = {x for x in range(fr.Pa.n) if int(phi[x]) in img}
        rhs = fr.Pa.generated(set(X) | Ea)
        rep.check(lhs <= rhs, "phi^-1(<Xbar>) ⊆ <X ∪ E_a(P^a)>", X=X)
    rep.data.update(E_a=len(Ea), E_b=len(Eb), gen_a=len(gen_a), gen_b=len(gen_b))
    return rep


def mi_structure(fr, hat=None):
    hat = hat or hat_analysis(fr)[0]
    rep = Report("mi_structure")
    Pa = fr.Pa
    V = {Pa.position(v) for v in fr.V}
    MI = mid_identities(Pa)
    hb = set(hat.hb)
    E_hb = {x for x in hb if Pa.table[x, x] == x}
    rep.check(MI == V, "MI(P^a) = V(a)", mi=sorted(MI), v=sorted(V))
    rep.check(V == E_hb, "V(a) = E_a(Ĥ_b^a)")
    rep.check(MI <= maximal_idempotents(Pa), "MI(P^a) ⊆ MaxE(P^a)")
    RP = regularity_preserving(Pa)
    rep.check(RP == hb, "RP(P^a) = Ĥ_b^a", rp=sorted(RP), hb=sorted(hb))
    phi = fr.phi
    W = fr.W
    covering = set()
    for e in V:
        we = {int(v) for v in Pa.table[Pa.table[e, :], e]}
        covering |= we
        f = np.array([int(phi[x]) for x in sorted(we)])
        sub = Pa.sub(we)
        rep.check(is_isomorphism(f, sub, W), "phi|W_e is an isomorphism onto W", e=e)
    gW = fr.green("W")
    gP = fr.green("Pa")
    ida = fr.w_identity
    rep.check(set(gW.cls("J", ida)) == set(gW.cls("H", ida)), "J_a = H_a in W")
    bpos = fr.b_position()
    rep.check(hb == set(gP.cls("D", bpos)) == set(gP.cls("J", bpos)), "Ĥ_b^a = D_b^a = J_b^(P^a)")
    dom = domination_report(Pa, gP)
    rep.merge(dom, "domination")
    mi_dom = dom.data["is_MI_dominated"]
    if mi_dom:
        rep.check(covering == set(range(Pa.n)), "MI-dominated ⇒ P^a = ∪ W_e")
    rep.data.update(mi_dominated=mi_dom, MI=len(MI), V=len(V), RP=len(RP))
    return rep


def inverse_case(fr):
    rep = Report("inverse_case")
    c = fr.category
    sw = fr.sw
    a = fr.a
    targets = {a} | {c.mul(int(ax), a) for ax in sw.ax}
    unique = all(len(inverse_indices(c, x)) == 1 for x in targets)
    rep.data["uniquely_sandwich_regular"] = unique
    if not unique:
        return rep
    b = fr.b
    Pa = fr.Pa
    rep.check(Pa.identity == Pa.position(b), "P^a is a monoid with identity b")
    for name in ("Pa", "T1", "T2", "W"):
        s = getattr(fr, name)
        rep.check(s.is_inverse() and s.identity is not None, f"{name} is an inverse monoid")
    for name in ("psi1", "psi2", "phi1", "phi2", "phi"):
        f = getattr(fr, name)
        rep.check(len(set(f.tolist())) == len(f), f"{name} bijective")
    rep.check(len(set(zip(fr.psi1.tolist(), fr.psi2.tolist()))) == Pa.n, "psi bijective onto its image")
    return rep


def frame_eggboxes(fr, x=None, hat=None):
    """Paired egg-boxes: the D^a-class of x in P^a with Ĥ blocks, and the
    corresponding D-class of W."""
    hat = hat or hat_analysis(fr)[0]
    gP, gW = fr.green("Pa"), fr.green("W")
    x = fr.b_position() if x is None else x
    left = EggBox.from_green(gP, x).with_blocks(lambda y: int(hat.class_of["R"][y]),
                                                 lambda y: int(hat.class_of["L"][y]))
    right = EggBox.from_green(gW, int(fr.phi[x]))
    return left, right


def frame_report(fr):
    """Everything for one frame, as JSON-ready dict plus violation list."""
    _, rb = build_frame(fr.sw, fr.b)
    hat, rh = hat_analysis(fr)
    reports = [rb, pullback_check(fr), rh, idempotent_fiber(fr), mi_structure(fr, hat), inverse_case(fr)]
    out = dict(fr.summary())
    out.update(r=hat.r, l=hat.l, mi_dominated=reports[4].data.get("mi_dominated"),
               inverse_case=reports[5].data.get("uniquely_sandwich_regular"))
    violations = [dict(v, report=r.name) for r in reports for v in r.violations]
    out["violations"] = violations
    return out, reports
