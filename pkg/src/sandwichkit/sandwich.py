"""Sandwich semigroups S_ij^a = (S_ij, x *a y = x a y) and their relation to
the ambient category: P-sets, transfer of Green's classes, invertibility and
cancellativity of the sandwich element, and the regular elements."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .category import regular_mask
from .errors import BudgetError, PreconditionError
from .green import green_category, green_semigroup, stability
from .report import Report
from .semigroup import FiniteSemigroup

STAR_TABLE_CAP = 2 ** 14


class SandwichSemigroup:
    """S_ij under x *a y = x a y, for a in S_ji.

    Positions of ``self.semigroup`` are local indices into ``c.hom(i, j)``;
    the semigroup's element handles are global morphism indices.
    """

    def __init__(self, c, i, j, a, ambient=None):
        p = a if isinstance(a, (int, np.integer)) else c.index.get(a)
        if p is None or c.elements[p].src != j or c.elements[p].dst != i:
            raise PreconditionError(f"sandwich element must lie in S_{j}{i}")
        self.category = c
        self.i, self.j = i, j
        self.a_index = int(p)
        self.a = c.elements[p]
        self.elements = c.hom_indices(i, j)
        n = len(self.elements)
        if n > STAR_TABLE_CAP:
            raise BudgetError(f"|S_ij| = {n} exceeds the star-table cap {STAR_TABLE_CAP}")
        if n == 0:
            raise PreconditionError(f"S_{i}{j} is empty")
        self._ambient = ambient
        a_loc = c.local(p)
        xa = c.table(i, j, i)[:, a_loc]                       # globals in S_ii
        self.xa = xa
        self.ax = c.table(j, i, j)[a_loc, :]                  # globals in S_jj
        star = c.table(i, i, j)[xa - c.start(i, i), :] - c.start(i, j)
        self.semigroup = FiniteSemigroup(star, list(self.elements.tolist()),
                                         name=f"S_{i}{j}^a")

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"SandwichSemigroup({self.category!r}, i={self.i}, j={self.j}, a={self.a.payload})"

    @property
    def star(self):
        return self.semigroup.table

    def to_global(self, x):
        return int(self.elements[x])

    def to_local(self, g):
        return int(g) - self.category.start(self.i, self.j)

    @property
    def ambient(self):
        if self._ambient is None:
            self._ambient = green_category(self.category)
        return self._ambient

    @cached_property
    def green(self):
        return green_semigroup(self.semigroup)

    def spec(self):
        return {"category": self.category.spec(), "i": self.i, "j": self.j,
                "a": self.a.to_json()}


def sandwich(c, i, j, a, ambient=None):
    sw = SandwichSemigroup(c, i, j, a, ambient=ambient)
    if len(sw) <= 32:
        assoc = sw.semigroup.is_associative()
    else:
        assoc = sw.semigroup.is_associative(samples=2000)
    if not assoc:
        raise PreconditionError("star product is not associative (category composition is broken)")
    return sw


@dataclass(frozen=True)
class PSets:
    P1: frozenset
    P2: frozenset
    P3: frozenset
    P: frozenset

    def sizes(self):
        return {"P1": len(self.P1), "P2": len(self.P2), "P3": len(self.P3), "P": len(self.P)}


def compute_p_sets(sw):
    """P-sets by their membership conditions (local indices)."""
    g = sw.ambient
    c = sw.category
    P1, P2, P3 = set(), set(), set()
    for x, gx in enumerate(sw.elements):
        gx = int(gx)
        xa = int(sw.xa[x])
        ax = int(sw.ax[x])
        if g.related("R", xa, gx):
            P1.add(x)
        if g.related("L", ax, gx):
            P2.add(x)
        axa = c.mul(ax, sw.a_index)
        if g.related("J", axa, gx):
            P3.add(x)
    return PSets(frozenset(P1), frozenset(P2), frozenset(P3), frozenset(P1 & P2))


def p_sets(sw):
    """P-sets plus a report on the chain Reg ⊆ P ⊆ P3, P = P3 (stability) and
    the ideal/subsemigroup properties."""
    ps = compute_p_sets(sw)
    rep = Report("p_sets")
    reg = set(np.flatnonzero(sw.semigroup.regular_mask()).tolist())
    rep.check(reg <= ps.P, "Reg(S_ij^a) ⊆ P", extra=sorted(reg - ps.P))
    rep.check(ps.P <= ps.P3, "P ⊆ P3")
    st = stability(sw.category, sw.a_index, sw.ambient).data
    if st["R_stable"]:
        rep.check(ps.P3 <= ps.P1, "R-stable ⇒ P3 ⊆ P1")
    if st["L_stable"]:
        rep.check(ps.P3 <= ps.P2, "L-stable ⇒ P3 ⊆ P2")
    rep.check(st["R_stable"] and st["L_stable"], "finite ⇒ a stable")
    rep.check(ps.P == ps.P3, "P = P3", P=sorted(ps.P), P3=sorted(ps.P3))
    t = sw.star
    n = len(sw)
    for x in ps.P1:
        rep.check(all(int(t[u, x]) in ps.P1 for u in range(n)), "P1 is a left ideal", x=x)
    for x in ps.P2:
        rep.check(all(int(t[x, u]) in ps.P2 for u in range(n)), "P2 is a right ideal", x=x)
    rep.check(sw.semigroup.is_closed(ps.P), "P is a subsemigroup")
    rep.data.update(ps.sizes())
    return ps, rep


def _ambient_class(sw, k, x):
    """K_x = {y in S_ij : x K y} in local indices."""
    g = sw.ambient
    lo = sw.category.start(sw.i, sw.j)
    hi = lo + len(sw)
    return {m - lo for m in g.cls(k, sw.to_global(x)) if lo <= m < hi}


def green_transfer_check(sw, ps=None):
    """Check the case split expressing each K^a-class of S_ij^a in terms of the
    ambient K-class and the P-sets, for every x."""
    ps = ps or compute_p_sets(sw)
    gs = sw.green
    rep = Report("green_transfer")
    for x in range(len(sw)):
        Ra = set(gs.cls("R", x))
        La = set(gs.cls("L", x))
        Ha = set(gs.cls("H", x))
        Da = set(gs.cls("D", x))
        Ja = set(gs.cls("J", x))
        R, L, H = (_ambient_class(sw, k, x) for k in "RLH")
        D, J = _ambient_class(sw, "D", x), _ambient_class(sw, "J", x)
        exp_R = R & ps.P1 if x in ps.P1 else {x}
        exp_L = L & ps.P2 if x in ps.P2 else {x}
        exp_H = H if x in ps.P else {x}
        if x in ps.P:
            exp_D = D & ps.P
        elif x in ps.P2:
            exp_D = La
        elif x in ps.P1:
            exp_D = Ra
        else:
            exp_D = {x}
        exp_J = J & ps.P3 if x in ps.P3 else Da
        rep.check(Ra == exp_R, "R^a case split", x=x, got=sorted(Ra), want=sorted(exp_R))
        rep.check(La == exp_L, "L^a case split", x=x, got=sorted(La), want=sorted(exp_L))
        rep.check(Ha == exp_H, "H^a case split", x=x, got=sorted(Ha), want=sorted(exp_H))
        rep.check(Da == exp_D, "D^a case split", x=x, got=sorted(Da), want=sorted(exp_D))
        rep.check(Ja == exp_J, "J^a case split", x=x, got=sorted(Ja), want=sorted(exp_J))
        if x not in ps.P:
            rep.check(Ha == {x} and not gs.is_group_h(x), "outside P: non-group singleton H^a", x=x)
    amb = sw.ambient
    if _same_partition(amb, "J", "D"):
        rep.check(_same_partition(gs, "J", "D"), "a stable and J = D ⇒ J^a = D^a")
    rep.data["green_class_counts"] = {k: gs.n_classes(k) for k in "RLHDJ"}
    return rep


def _same_partition(g, k1, k2):
    return sorted(g.classes[k1]) == sorted(g.classes[k2])


def invertibility_flags(sw):
    c = sw.category
    n = len(sw)
    i, j = sw.i, sw.j
    xs = np.arange(n)
    a_loc = c.local(sw.a_index)
    # right-invertible: some b in S_ij with x a b = x for all x in S_ij
    xa_loc = sw.xa - c.start(i, i)
    xab = c.table(i, i, j)[xa_loc, :] - c.start(i, j)          # [x, b]
    right_inv = bool((xab == xs[:, None]).all(axis=0).any())
    # left-invertible: some b with b a x = x
    ba = c.table(i, j, i)[:, a_loc] - c.start(i, i)            # b a, b in S_ij
    bax = c.table(i, i, j)[ba, :] - c.start(i, j)              # [b, x]
    left_inv = bool((bax == xs[None, :]).all(axis=1).any())
    cancel_r = len(set(sw.xa.tolist())) == n
    cancel_l = len(set(sw.ax.tolist())) == n
    cancel_rl = len(set(zip(sw.xa.tolist(), sw.ax.tolist()))) == n
    return {"right_inv": right_inv, "left_inv": left_inv, "cancel_R": cancel_r,
            "cancel_L": cancel_l, "cancel_RL": cancel_rl}


def invertibility_report(sw, ps=None):
    """Flags plus the implications stated for right/left invertibility."""
    flags = invertibility_flags(sw)
    ps = ps or compute_p_sets(sw)
    rep = Report("invertibility", data=dict(flags))
    gs = sw.green
    n = len(sw)
    if flags["right_inv"]:
        rep.check(ps.P1 == frozenset(range(n)), "right-invertible ⇒ P1 = S_ij")
        rep.check(ps.P == ps.P2, "right-invertible ⇒ P = P2")
        rep.check(all(set(gs.cls("R", x)) == _ambient_class(sw, "R", x) for x in range(n)),
                  "right-invertible ⇒ R^a = R")
    if flags["left_inv"]:
        rep.check(ps.P2 == frozenset(range(n)), "left-invertible ⇒ P2 = S_ij")
        rep.check(ps.P == ps.P1, "left-invertible ⇒ P = P1")
        rep.check(all(set(gs.cls("L", x)) == _ambient_class(sw, "L", x) for x in range(n)),
                  "left-invertible ⇒ L^a = L")
    if flags["right_inv"]:
        rep.check(flags["cancel_R"], "right-invertible ⇒ right cancellable")
    if flags["left_inv"]:
        rep.check(flags["cancel_L"], "left-invertible ⇒ left cancellable")
    if flags["cancel_R"] or flags["cancel_L"]:
        rep.check(flags["cancel_RL"], "one-sided cancellation ⇒ two-sided weak cancellation")
    return rep


def regular_set(sw, ps=None):
    """Reg(S_ij^a), computed directly and as P ∩ Reg(S); a mismatch is recorded."""
    ps = ps or compute_p_sets(sw)
    direct = set(np.flatnonzero(sw.semigroup.regular_mask()).tolist())
    amb_reg = regular_mask(sw.category)
    via = {x for x in ps.P if amb_reg[sw.to_global(x)]}
    rep = Report("regular_set")
    rep.check(direct == via, "Reg(S_ij^a) = P ∩ Reg(S)", direct=sorted(direct), via=sorted(via))
    rep.check((direct == set(ps.P)) == all(amb_reg[sw.to_global(x)] for x in ps.P),
              "Reg(S_ij^a) = P iff P ⊆ Reg(S)")
    rep.data["size"] = len(direct)
    return direct, rep


# -- partial subsemigroups --------------------------------------------------------

def subsemigroup_inheritance(c, sub):
    """Compare Green's structure, P-sets and sandwich classes of a partial
    subsemigroup ``sub`` (a restricted Category) with those of ``c``."""
    rep = Report("subsemigroup_inheritance")
    if sub.sizes != c.sizes or any(x not in c.index for x in sub.elements):
        raise PreconditionError("sub must be a partial subsemigroup on the same objects")
    if not sub.is_closed():
        raise PreconditionError("sub is not closed under composition")
    gS = green_category(c)
    gT = green_category(sub)
    emb = np.array([c.index[x] for x in sub.elements], dtype=np.int64)
    regT = regular_mask(sub)
    reg_idx = np.flatnonzero(regT)
    for k in "RLH":
        for y in reg_idx:
            for x in range(len(sub)):
                rep.check(gT.leq[k][x, y] == gS.leq[k][emb[x], emb[y]],
                          f"<=_{k}: T vs S for y regular", x=int(x), y=int(y))
    t_regular = bool(regT.all())
    checked = 0
    for i in range(c.n_objects):
        for j in range(c.n_objects):
            if not len(sub.hom(i, j)):
                continue
            for a in sub.hom(j, i):
                checked += 1
                _inherit_instance(rep, c, sub, gS, gT, emb, regT, i, j, a, t_regular)
    rep.data.update(sandwich_elements=checked, sub_regular=t_regular, sub_size=len(sub))
    return rep


def _inherit_instance(rep, c, sub, gS, gT, emb, regT, i, j, a, t_regular):
    swS = SandwichSemigroup(c, i, j, a, ambient=gS)
    swT = SandwichSemigroup(sub, i, j, a, ambient=gT)
    psS = compute_p_sets(swS)
    psT = compute_p_sets(swT)
    to_s = {x: swS.to_local(emb[swT.to_global(x)]) for x in range(len(swT))}

    def lift(s):
        return {to_s[x] for x in s}

    tij = set(range(len(swT)))
    reg_tij = all(regT[swT.to_global(x)] for x in tij)
    reg_ta = all(regT[int(v)] for v in swT.xa)
    reg_at = all(regT[int(v)] for v in swT.ax)
    image = set(to_s.values())
    for name, sT, sS, hyp in (
            ("P1", psT.P1, psS.P1, reg_tij and reg_ta),
            ("P2", psT.P2, psS.P2, reg_tij and reg_at),
            ("P", psT.P, psS.P, reg_tij and reg_ta and reg_at)):
        rep.check(lift(sT) <= (sS & image), f"{name}(T) ⊆ {name}(S) ∩ T", a=a.payload, i=i, j=j)
        if hyp:
            rep.check(lift(sT) == (sS & image), f"{name}(T) = {name}(S) ∩ T under regularity",
                      a=a.payload, i=i, j=j)
    rep.check(lift(psT.P3) <= (psS.P3 & image), "P3(T) ⊆ P3(S) ∩ T", a=a.payload)
    stS = stability(c, swS.a_index, gS).data
    if stS["R_stable"] and stS["L_stable"] and reg_tij and reg_ta and reg_at:
        rep.check(lift(psT.P3) == (psS.P3 & image), "P3(T) = P3(S) ∩ T (a stable, regular)",
                  a=a.payload)
    if t_regular:
        stT = stability(sub, swT.a_index, gT).data
        if stS["R_stable"]:
            rep.check(stT["R_stable"], "R-stability inherited by regular T", a=a.payload)
        if stS["L_stable"]:
            rep.check(stT["L_stable"], "L-stability inherited by regular T", a=a.payload)
    gaS, gaT = swS.green, swT.green
    for k, hyp in (("R", reg_tij and reg_ta), ("L", reg_tij and reg_at),
                   ("H", reg_tij and reg_ta and reg_at)):
        for x in tij:
            cT = lift(gaT.cls(k, x))
            cS = set(gaS.cls(k, to_s[x])) & image
            rep.check(cT <= cS, f"{k}^a(T) ⊆ {k}^a(S) ∩ (T×T)", a=a.payload, x=x)
            if hyp:
                rep.check(cT == cS, f"{k}^a(T) = {k}^a(S) ∩ (T×T) under regularity",
                          a=a.payload, x=x)
