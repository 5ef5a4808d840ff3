"""Green's preorders and relations, plus the regular-semigroup predicates
built on them (natural order, mid-identities, regularity-preserving
elements, local monoids, domination, stability).

Preorders are stored as boolean matrices with ``leq[K][x, y]`` true iff
``x <=_K y``.  Everything is computed straight from the definitions over
S^1: ``x <=_R y`` iff ``x == y`` or ``x = y*s`` for some s.
"""

import numpy as np

from .errors import BudgetError, Unsupported
from .report import Report

RELATIONS = ("R", "L", "H", "D", "J")
DEFAULT_BUDGET = 20000
SCC_THRESHOLD = 5000


def _bool_compose(a, b):
    # (a o b)[x, z] = exists y: a[x, y] and b[y, z]
    return (a.astype(np.float32) @ b.astype(np.float32)) > 0


def _partition(eq):
    """Classes of an equivalence given as a boolean matrix, ordered by their
    minimal member."""
    n = eq.shape[0]
    class_of = np.full(n, -1, dtype=np.int64)
    classes = []
    for x in range(n):
        if class_of[x] < 0:
            members = np.flatnonzero(eq[x])
            class_of[members] = len(classes)
            classes.append(tuple(int(m) for m in members))
    return classes, class_of


def _partition_labels(labels):
    order = {}
    class_of = np.empty(len(labels), dtype=np.int64)
    classes = []
    for x, lab in enumerate(labels):
        k = order.get(lab)
        if k is None:
            k = order[lab] = len(classes)
            classes.append([])
        classes[k].append(x)
        class_of[x] = k
    return [tuple(c) for c in classes], class_of


class GreenData:
    """Green's structure of a finite (partial) semigroup on positions 0..n-1."""

    def __init__(self, leq_r, leq_l, idempotent, labels=None):
        self.n = len(idempotent)
        self.idempotent = np.asarray(idempotent, dtype=bool)
        self.leq = {}
        self.classes = {}
        self.class_of = {}
        if labels is None:
            leq_r = leq_r.copy()
            leq_l = leq_l.copy()
            np.fill_diagonal(leq_r, True)
            np.fill_diagonal(leq_l, True)
            leq_j = _bool_compose(leq_l, leq_r)
            self.leq = {"R": leq_r, "L": leq_l, "H": leq_r & leq_l, "J": leq_j}
            rel = {k: m & m.T for k, m in self.leq.items()}
            rel["D"] = _bool_compose(rel["R"], rel["L"])
            self.rel = rel
            for k in RELATIONS:
                self.classes[k], self.class_of[k] = _partition(rel[k])
        else:
            # scc path: class labels only, no preorders
            self.rel = None
            for k in RELATIONS:
                self.classes[k], self.class_of[k] = _partition_labels(labels[k])
        self.h_group = [bool(self.idempotent[list(h)].any()) for h in self.classes["H"]]

    # -- queries -------------------------------------------------------------
    def _need_preorders(self):
        if self.rel is None:
            raise Unsupported("preorders were not computed (SCC path)")

    def leq_(self, k, x, y):
        self._need_preorders()
        if k == "D":
            raise Unsupported("D is not induced by a preorder")
        return bool(self.leq[k][x, y])

    def related(self, k, x, y):
        return self.class_of[k][x] == self.class_of[k][y]

    def cls(self, k, x):
        return self.classes[k][self.class_of[k][x]]

    def n_classes(self, k):
        return len(self.classes[k])

    def is_group_h(self, x):
        return self.h_group[self.class_of["H"][x]]

    def classes_within(self, k, subset):
        """Nonempty traces K_x ∩ subset, ordered by minimal member."""
        subset = sorted(set(int(s) for s in subset))
        seen = {}
        for s in subset:
            seen.setdefault(int(self.class_of[k][s]), []).append(s)
        return sorted((tuple(v) for v in seen.values()), key=lambda c: c[0])

    def maximal_j_classes(self, subset=None):
        """J-classes (traced on ``subset``) not strictly below another such trace."""
        self._need_preorders()
        traces = self.classes_within("J", range(self.n) if subset is None else subset)
        reps = [t[0] for t in traces]
        out = []
        for t, x in zip(traces, reps):
            above = any(self.leq["J"][x, y] and not self.leq["J"][y, x] for y in reps)
            if not above:
                out.append(t)
        return out

    def eggbox(self, x):
        from .eggbox import EggBox
        return EggBox.from_green(self, x)

    def to_json(self):
        return {k: [list(c) for c in self.classes[k]] for k in RELATIONS} | {
            "h_group": list(self.h_group)}


# -- builders ------------------------------------------------------------------

def green_semigroup(S, budget=DEFAULT_BUDGET, use_scc=False):
    n = S.n
    if n > budget:
        raise BudgetError(f"|S| = {n} exceeds the Green budget {budget}")
    if n > SCC_THRESHOLD or use_scc:
        if not use_scc:
            raise BudgetError(f"|S| = {n} > {SCC_THRESHOLD}; enable the SCC path")
        return _green_scc(S)
    t = S.table
    leq_r = np.zeros((n, n), dtype=bool)
    leq_l = np.zeros((n, n), dtype=bool)
    cols = np.repeat(np.arange(n), n)
    leq_r[t.ravel(), cols] = True                # t[y, s] <=_R y
    leq_l[t.T.ravel(), cols] = True              # t[s, y] <=_L y
    return GreenData(leq_r, leq_l, S.idempotent_mask())


def _green_scc(S):
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    n = S.n
    t = S.table
    src = np.repeat(np.arange(n), n)

    def scc(rows, cols):
        g = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n)).tocsr()
        return connected_components(g, directed=True, connection="strong")[1]

    r = scc(src, t.ravel())
    l = scc(src, t.T.ravel())
    j = scc(np.concatenate((src, src)), np.concatenate((t.ravel(), t.T.ravel())))
    labels = {"R": r.tolist(), "L": l.tolist(), "J": j.tolist(), "D": j.tolist(),
              "H": list(zip(r.tolist(), l.tolist()))}
    return GreenData(None, None, S.idempotent_mask(), labels=labels)


def green_category(c, budget=DEFAULT_BUDGET):
    """Green's structure of a (possibly restricted) category over the global
    morphism indices of ``c``."""
    n = len(c)
    if n > budget:
        raise BudgetError(f"{n} morphisms exceed the Green budget {budget}")
    leq_r = np.zeros((n, n), dtype=bool)
    leq_l = np.zeros((n, n), dtype=bool)
    k = c.n_objects
    for i in range(k):
        for j in range(k):
            for l in range(k):
                a, b = len(c.hom(i, j)), len(c.hom(j, l))
                if not a or not b:
                    continue
                tab = c.table(i, j, l)
                xs, ys = c.hom_indices(i, j), c.hom_indices(j, l)
                leq_r[tab.ravel(), np.repeat(xs, b)] = True
                leq_l[tab.ravel(), np.tile(ys, a)] = True
    idem = np.zeros(n, dtype=bool)
    for i in range(k):
        hs = c.hom_indices(i, i)
        if len(hs):
            tab = c.table(i, i, i)
            loc = np.arange(len(hs))
            idem[hs] = tab[loc, loc] == hs
    return GreenData(leq_r, leq_l, idem)


# -- natural order, mid-identities, variants ------------------------------------

def _require_regular(S):
    if not S.is_regular():
        raise Unsupported("operation requires a regular semigroup")


def natural_leq(S, x, y):
    _require_regular(S)
    e = np.asarray(S.idempotents(), dtype=np.int64)
    t = S.table
    return bool((t[e, y] == x).any() and (t[y, e] == x).any())


def natural_leq_idempotents(S, e, f):
    """e ⪯ f for idempotents e, f, via e = f e f."""
    t = S.table
    return t[t[f, e], f] == e


def variant(S, u):
    return S.variant(u)


def local_monoid(S, e):
    return S.local_monoid(e)


def mid_identities(S):
    t = S.table
    return {u for u in range(S.n) if (t[t[:, u]] == t).all()}


def _variant_regular(S, u):
    t = S.table
    n = S.n
    xuy = t[t[:, u]]                              # [x, y] -> x u y
    xuyux = t[t[xuy, u], np.arange(n)[:, None]]   # [x, y] -> x u y u x
    return bool((xuyux == np.arange(n)[:, None]).any(axis=1).all())


def regularity_preserving(S):
    _require_regular(S)
    return {u for u in range(S.n) if _variant_regular(S, u)}


def maximal_idempotents(S):
    e = S.idempotents()
    t = S.table
    out = set()
    for x in e:
        above = [f for f in e if f != x and t[t[f, x], f] == x]
        if not above:
            out.add(x)
    return out


def is_rectangular_band(S, positions):
    pos = list(positions)
    t = S.table
    for u in pos:
        if t[u, u] != u:
            return False
        for v in pos:
            if t[t[u, v], u] != u:
                return False
    return True


def in_subgroup(S, x):
    """True iff x^(k+1) = x for some k >= 1, i.e. x lies in a subgroup."""
    seen = set()
    p = x
    while True:
        p = S.mul(p, x)
        if p == x:
            return True
        if p in seen:
            return False
        seen.add(p)


def rectangular_group_test(S, positions):
    """The three-part test: closed, a union of groups, idempotents form a
    rectangular band."""
    pos = sorted(set(positions))
    closed = S.is_closed(pos)
    union_of_groups = all(in_subgroup(S, x) for x in pos)
    idem = [x for x in pos if S.table[x, x] == x]
    band = bool(idem) and is_rectangular_band(S, idem)
    return {"closed": closed, "union_of_groups": union_of_groups, "idempotents_rectangular_band": band,
            "ok": closed and union_of_groups and band}


def domination_report(S, green=None):
    _require_regular(S)
    g = green or green_semigroup(S)
    t = S.table
    rep = Report("domination")
    E = S.idempotents()
    MI = mid_identities(S)
    RP = regularity_preserving(S)
    maxE = maximal_idempotents(S)

    def below(x, y):
        return bool((t[E, y] == x).any() and (t[y, E] == x).any())

    vacuous = not E
    mi_dom = all(any(t[t[u, e], u] == e for u in MI) for e in E)
    rp_dom = all(any(below(x, u) for u in RP) for x in range(S.n))
    covering = set()
    for e in MI:
        covering |= set(int(v) for v in t[t[e, :], e])
    rep.check(mi_dom == (covering == set(range(S.n))), "MI-dominated iff T = union of eTe over MI",
              mi_dominated=mi_dom)
    if MI:
        rep.check(not rp_dom or mi_dom, "RP-dominated implies MI-dominated")
        h_of_mi = set()
        for u in MI:
            h_of_mi |= set(g.cls("H", u))
        rep.check(RP == h_of_mi, "RP is the union of H-classes of mid-identities",
                  rp=sorted(RP), h_of_mi=sorted(h_of_mi))
        rep.check(rectangular_group_test(S, RP)["ok"], "RP is a rectangular group")
        rep.check(is_rectangular_band(S, MI), "MI is a rectangular band")
    rep.check(MI <= maxE, "MI is contained in MaxE")
    if mi_dom:
        rep.check(maxE == MI, "MI-dominated implies MaxE = MI", maxE=sorted(maxE), mi=sorted(MI))
    factorisable = None
    if S.identity is not None:
        units = list(g.cls("H", S.identity))
        eg = set(int(v) for v in t[np.ix_(E, units)].ravel())
        factorisable = eg == set(range(S.n))
        rep.check(factorisable == rp_dom, "a monoid is RP-dominated iff factorisable")
        rep.check(MI == {S.identity}, "a monoid has MI = {identity}")
        rep.check(RP == set(units), "a monoid has RP = group of units")
    rep.data.update(is_MI_dominated=mi_dom, is_RP_dominated=rp_dom, is_factorisable=factorisable,
                    vacuous=vacuous, MI=sorted(MI), RP=sorted(RP), MaxE=sorted(maxE))
    return rep


# -- stability ----------------------------------------------------------------

def stability(c, a, green=None):
    """R- and L-stability of the morphism ``a`` (given as Morphism or global
    index) in the ambient category.  Finite categories are periodic, so both
    must hold; a failure is recorded as a violation."""
    g = green or green_category(c)
    p = a if isinstance(a, (int, np.integer)) else c.index[a]
    x_a = c.elements[p]
    rep = Report("stability")
    r_stable = True
    for q in np.flatnonzero(c.dst == x_a.src):
        xa = c.mul(int(q), p)
        if g.related("J", xa, q) and not g.related("R", xa, q):
            r_stable = False
            rep.check(False, "R-stable", x=int(q))
    l_stable = True
    for q in np.flatnonzero(c.src == x_a.dst):
        ax = c.mul(p, int(q))
        if g.related("J", ax, q) and not g.related("L", ax, q):
            l_stable = False
            rep.check(False, "L-stable", x=int(q))
    rep.data.update(R_stable=r_stable, L_stable=l_stable)
    return rep
