"""Rank, idempotent rank and relative rank by exact search.

A set A generates a finite semigroup S iff for every J-class J,
J ⊆ <U_J ∪ (A ∩ J)> where U_J is everything strictly J-above J: every factor
of an element of J (and every partial product) lies in U_J ∪ J.  So the
rank splits as a sum over J-classes of independent minima, each found by a
breadth-first search over distinct closures.  Closures are taken inside the
up-set U_J ∪ J, which is exact because products leaving it never return.
"""

from dataclasses import dataclass, field
import time

import numpy as np

from .errors import BudgetError, Unsupported
from .green import green_semigroup, rectangular_group_test
from .report import Report
from .semigroup import FiniteSemigroup, rectangular_group

DEFAULT_NODES = 200_000


def generated(S, A):
    return S.generated(A)


@dataclass
class RankResult:
    value: int | None
    witness: list = field(default_factory=list)
    lower_bound_used: int = 0
    nodes_explored: int = 0
    seconds: float = 0.0
    exceeded: bool = False

    def to_json(self, timing=True):
        out = {"value": "budget" if self.exceeded else self.value,
               "witness": [int(w) for w in self.witness],
               "lower_bound": self.lower_bound_used, "nodes_explored": self.nodes_explored}
        if timing:
            out["seconds"] = round(self.seconds, 4)
        return out


class _Counter:
    def __init__(self, budget):
        self.budget = budget
        self.nodes = 0

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetError("rank search node budget exhausted")


def _close(t, have, allowed, new):
    """Extend the closed set ``have`` (bool mask, modified copy returned) by
    the elements ``new``; products outside ``allowed`` are dropped."""
    have = have.copy()
    frontier = [int(x) for x in new if not have[x]]
    have[frontier] = True
    while frontier:
        cur = np.flatnonzero(have)
        f = np.asarray(frontier)
        cand = np.concatenate((t[np.ix_(f, cur)].ravel(), t[np.ix_(cur, f)].ravel()))
        cand = np.unique(cand)
        cand = cand[allowed[cand] & ~have[cand]]
        have[cand] = True
        frontier = cand.tolist()
    return have


class _JSearch:
    """Minimum number of extra generators from ``cands`` needed to cover J."""

    def __init__(self, S, green, J, above, base, cands, counter, maximal):
        self.t = S.table
        self.J = np.asarray(J)
        self.jmask = np.zeros(S.n, dtype=bool)
        self.jmask[self.J] = True
        self.allowed = self.jmask.copy()
        self.allowed[list(above)] = True
        start = np.zeros(S.n, dtype=bool)
        self.start = _close(self.t, start, self.allowed, list(above) + list(base))
        self.cands = sorted(cands)
        self.counter = counter
        self.maximal = maximal
        if maximal:
            self.rcls = {x: int(green.class_of["R"][x]) for x in J}
            self.lcls = {x: int(green.class_of["L"][x]) for x in J}
            self.nr = len(set(self.rcls.values()))
            self.nl = len(set(self.lcls.values()))

    def covered(self, have):
        return bool(have[self.J].all())

    def deficit(self, have):
        """Lower bound on generators still needed (maximal classes only: each
        R- and L-class must contain a generator, and generated elements of J
        share the R-class of their first and the L-class of their last factor)."""
        if self.covered(have):
            return 0
        if not self.maximal:
            return 1
        inJ = self.J[have[self.J]]
        r = self.nr - len({self.rcls[int(x)] for x in inJ})
        l = self.nl - len({self.lcls[int(x)] for x in inJ})
        return max(r, l, 1)

    def greedy(self):
        have, chosen = self.start, []
        while not self.covered(have):
            best, best_have = None, None
            for g in self.cands:
                if have[g]:
                    continue
                self.counter.tick()
                h = _close(self.t, have, self.allowed, [g])
                if best_have is None or h.sum() > best_have.sum():
                    best, best_have = g, h
            if best is None:
                return None
            chosen.append(best)
            have = best_have
        return chosen

    def solve(self):
        """(minimum, witness, lower bound) or (None, [], lb) if J cannot be covered."""
        lb = self.deficit(self.start)
        if self.covered(self.start):
            return 0, [], 0
        ub = self.greedy()
        if ub is None:
            return None, [], lb
        if len(ub) <= lb:
            return len(ub), ub, lb
        level = {self.start.tobytes(): (self.start, [])}
        seen = set(level)
        for k in range(1, len(ub)):
            nxt = {}
            for have, chosen in level.values():
                for g in self.cands:
                    if have[g]:
                        continue
                    self.counter.tick()
                    h = _close(self.t, have, self.allowed, [g])
                    key = h.tobytes()
                    if key in seen:
                        continue
                    seen.add(key)
                    if self.covered(h):
                        return k, chosen + [g], lb
                    if k + self.deficit(h) < len(ub):
                        nxt[key] = (h, chosen + [g])
            level = nxt
            if not level:
                break
        return len(ub), ub, lb


def _search(S, A=(), idempotent=False, budget=DEFAULT_NODES, green=None):
    t0 = time.perf_counter()
    if S.n == 0:
        return RankResult(0, seconds=time.perf_counter() - t0)
    green = green or green_semigroup(S)
    A = set(int(x) for x in A)
    pool = set(S.idempotents()) if idempotent else set(range(S.n))
    if idempotent and S.generated(pool | A) != set(range(S.n)):
        raise Unsupported("semigroup is not generated by its idempotents (with A)")
    counter = _Counter(budget)
    leqJ = green.leq["J"]
    value, witness, lb_total = 0, [], 0
    try:
        for J in green.classes["J"]:
            x = J[0]
            above = [y for y in range(S.n) if leqJ[x, y] and not leqJ[y, x]]
            maximal = not above
            base = [y for y in J if y in A]
            cands = [y for y in J if y in pool and y not in A]
            k, wit, lb = _JSearch(S, green, J, above, base, cands, counter, maximal).solve()
            if k is None:
                raise Unsupported("no admissible generating set exists")
            value += k
            witness += wit
            lb_total += lb
    except BudgetError:
        return RankResult(None, [], lb_total, counter.nodes, time.perf_counter() - t0, True)
    return RankResult(value, sorted(witness), lb_total, counter.nodes, time.perf_counter() - t0)


def rank(S, budget=DEFAULT_NODES, green=None):
    return _search(S, budget=budget, green=green)


def idrank(S, budget=DEFAULT_NODES, green=None):
    return _search(S, idempotent=True, budget=budget, green=green)


def relative_rank(S, A, budget=DEFAULT_NODES, green=None):
    return _search(S, A, budget=budget, green=green)


def relative_idrank(S, A, budget=DEFAULT_NODES, green=None):
    return _search(S, A, idempotent=True, budget=budget, green=green)


# -- rectangular groups --------------------------------------------------------

@dataclass
class RectGroupSpec:
    r: int
    l: int
    G: FiniteSemigroup

    def build(self):
        if not self.G.is_group():
            raise Unsupported("G must be a group")
        return rectangular_group(self.r, self.l, self.G)


def _minimal_generating_sets(S, k, limit=2000):
    """Generating sets of size k (S small); stops after ``limit`` found."""
    import itertools
    full = set(range(S.n))
    out = []
    for B in itertools.combinations(range(S.n), k):
        if S.generated(B) == full:
            out.append(B)
            if len(out) >= limit:
                break
    return out


def rect_group_check(spec, budget=DEFAULT_NODES):
    rep = Report("rect_group")
    T = spec.build()
    rg = rank(spec.G, budget)
    rt = rank(T, budget)
    expected = max(spec.r, spec.l, rg.value)
    rep.check(rectangular_group_test(T, range(T.n))["ok"], "I×G×J is a rectangular group")
    rep.check(rt.value == expected, "rank = max(r, l, rank G)", rank=rt.value, expected=expected)
    rows = [e[0] for e in T.elements]
    cols = [e[2] for e in T.elements]
    sets = _minimal_generating_sets(T, rt.value)
    rep.check(bool(sets), "a minimum generating set exists")
    for B in sets:
        rep.check({rows[x] for x in B} == set(range(spec.r)), "generating set meets every R-class", B=B)
        rep.check({cols[x] for x in B} == set(range(spec.l)), "generating set meets every L-class", B=B)
    if rt.value == spec.r:
        rep.check(any(len({rows[x] for x in B}) == len(B) for B in sets),
                  "rank = r ⇒ an R-cross-section generates")
    if rt.value == spec.l:
        rep.check(any(len({cols[x] for x in B}) == len(B) for B in sets),
                  "rank = l ⇒ an L-cross-section generates")
    rep.data.update(r=spec.r, l=spec.l, group_order=spec.G.n, rank_G=rg.value, rank=rt.value,
                    minimum_sets=len(sets))
    return rep


# -- formulas over a regular frame ----------------------------------------------

def _monoid_checks(rep, M, label, budget):
    """Facts about an idempotent-generated monoid: trivial units, non-units an
    ideal, rank and idrank split off the identity."""
    g = green_semigroup(M)
    units = set(g.cls("H", M.identity))
    rep.check(units == {M.identity}, f"{label}: group of units trivial")
    rest = set(range(M.n)) - units
    rep.check(M.is_closed(rest) and _is_ideal(M, rest), f"{label}: non-units form an ideal")
    r, rr = rank(M, budget, g), relative_rank(M, units, budget, g)
    i, ir = idrank(M, budget, g), relative_idrank(M, units, budget, g)
    if not any(x.exceeded for x in (r, rr, i, ir)):
        rep.check(r.value == 1 + rr.value, f"{label}: rank = 1 + relative rank")
        rep.check(i.value == 1 + ir.value, f"{label}: idrank = 1 + relative idrank")
    return r, i


def _is_ideal(M, subset):
    subset = sorted(subset)
    if not subset:
        return True
    mask = np.zeros(M.n, dtype=bool)
    mask[subset] = True
    return bool(mask[M.table[subset, :]].all() and mask[M.table[:, subset]].all())


def rank_formula_check(fr, budget=DEFAULT_NODES, hat=None):
    from .frame import hat_analysis, mi_structure

    rep = Report("rank_formulas")
    hat = hat or hat_analysis(fr)[0]
    r, l = hat.r, hat.l
    mi_dom = mi_structure(fr, hat).data["mi_dominated"]
    W = fr.W
    gW = fr.green("W")
    G = sorted(gW.cls("H", fr.w_identity))
    ideal = _is_ideal(W, set(range(W.n)) - set(G))
    rep.data.update(r=r, l=l, mi_dominated=mi_dom, ideal_hypothesis=ideal, budget=False)

    def record(key, res):
        rep.data[key] = res.to_json(timing=False)
        if res.exceeded:
            rep.data["budget"] = True
        return res.value

    rank_P = record("rank_P", rank(fr.Pa, budget, fr.green("Pa")))
    rel_WG = record("rank_W_mod_G", relative_rank(W, G, budget, gW))
    rank_G = record("rank_G", rank(W.sub(G), budget))
    rep.check(ideal, "W ∖ G_W is an ideal of W")
    if ideal and None not in (rank_P, rel_WG, rank_G):
        rhs = rel_WG + max(r, l, rank_G)
        rep.data["rankU_rhs"] = rhs
        rep.check(rank_P >= rhs, "rank(P^a) ≥ rank(W:G_W) + max(r,l,rank G_W)", lhs=rank_P, rhs=rhs)
        if mi_dom:
            rep.check(rank_P == rhs, "MI-dominated ⇒ rank(P^a) = rank(W:G_W) + max(r,l,rank G_W)",
                      lhs=rank_P, rhs=rhs)
    Ea = fr.Pa.sub(fr.Pa.generated(fr.Pa.idempotents()), name="E_a")
    Eb = W.sub(W.generated(W.idempotents()), name="E_b(W)")
    rep.check(Eb.identity == Eb.position(fr.a), "E_b(W) is a monoid with identity a")
    rb, ib = _monoid_checks(rep, Eb, "E_b(W)", budget)
    ra = _search(Ea, budget=budget)
    ia = _search(Ea, idempotent=True, budget=budget)
    vals = [record(k, v) for k, v in (("rank_Eb", rb), ("idrank_Eb", ib), ("rank_Ea", ra), ("idrank_Ea", ia))]
    if None not in vals:
        rbv, ibv, rav, iav = vals
        m = max(r, l) - 1
        rep.check(rav >= rbv + m, "rank(E_a) ≥ rank(E_b W) + max(r,l) − 1", lhs=rav, rhs=rbv + m)
        rep.check(iav >= ibv + m, "idrank(E_a) ≥ idrank(E_b W) + max(r,l) − 1", lhs=iav, rhs=ibv + m)
        if mi_dom:
            rep.check(rav == rbv + m, "MI-dominated ⇒ rank(E_a) = rank(E_b W) + max(r,l) − 1",
                      lhs=rav, rhs=rbv + m)
            rep.check(iav == ibv + m, "MI-dominated ⇒ idrank(E_a) = idrank(E_b W) + max(r,l) − 1",
                      lhs=iav, rhs=ibv + m)
            rep.check((rbv == ibv) == (rav == iav), "rank = idrank transfers between E_b(W) and E_a")
    return rep


def sandwich_rank_lower_bound(sw):
    """Sum over maximal ambient J-classes meeting S_ij of max(#R, #L) traces."""
    amb = sw.ambient
    total = 0
    for J in amb.maximal_j_classes(sw.elements.tolist()):
        total += max(len(amb.classes_within("R", J)), len(amb.classes_within("L", J)))
    return total


def sandwich_rank_check(sw, budget=DEFAULT_NODES):
    rep = Report("sandwich_rank")
    bound = sandwich_rank_lower_bound(sw)
    res = rank(sw.semigroup, budget, sw.green)
    rep.data.update(lower_bound=bound, rank=res.to_json(timing=False))
    if not res.exceeded:
        rep.check(bound <= res.value, "lower bound ≤ rank(S_ij^a)", bound=bound, rank=res.value)
    return rep, res
