"""Concrete finite categories of maps and F2 matrices.

A category here is the "arrows only" view: a finite list of objects, each
with an underlying size, and every hom-set enumerated eagerly in canonical
lexicographic order.  Composition is diagrammatic: ``compose(c, x, y)`` means
"apply x, then y", so ``x.dst`` must equal ``y.src``.

Payload encodings:

* ``fullmap``/``partialmap``/``injpartial``: a length-m tuple over
  ``{0, 1..n}`` where 0 stands for "undefined" (forbidden for full maps).
* ``matf2``: an m-by-n bit matrix stored row-major as a length m*n tuple.
"""

from dataclasses import dataclass
from itertools import product
from math import comb, factorial
import json

import numpy as np

from .errors import BudgetError, DomainMismatch, PreconditionError

KINDS = ("fullmap", "partialmap", "injpartial", "matf2")
MAP_SIZE_CAP = 4
MATRIX_SIZE_CAP = 3


@dataclass(frozen=True, order=True)
class Morphism:
    src: int
    dst: int
    payload: tuple

    def to_json(self):
        return {"src": self.src, "dst": self.dst, "payload": list(self.payload)}

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["src"]), int(obj["dst"]), tuple(int(v) for v in obj["payload"]))


def homset_size(kind, m, n):
    if kind == "fullmap":
        return n ** m
    if kind == "partialmap":
        return (n + 1) ** m
    if kind == "injpartial":
        return sum(comb(m, k) * comb(n, k) * factorial(k) for k in range(min(m, n) + 1))
    if kind == "matf2":
        return 2 ** (m * n)
    raise PreconditionError(f"unknown kind {kind!r}")


def _enumerate_payloads(kind, m, n):
    if kind == "fullmap":
        return list(product(range(1, n + 1), repeat=m))
    if kind == "partialmap":
        return list(product(range(n + 1), repeat=m))
    if kind == "injpartial":
        out = []
        for p in product(range(n + 1), repeat=m):
            vals = [v for v in p if v]
            if len(vals) == len(set(vals)):
                out.append(p)
        return out
    if kind == "matf2":
        return list(product((0, 1), repeat=m * n))
    raise PreconditionError(f"unknown kind {kind!r}")


def compose_payload(kind, m, n, p, x, y):
    """Payload of x then y, for x: m -> n and y: n -> p."""
    if kind == "matf2":
        out = []
        for r in range(m):
            row = x[r * n:(r + 1) * n]
            for col in range(p):
                s = 0
                for k in range(n):
                    s ^= row[k] & y[k * p + col]
                out.append(s)
        return tuple(out)
    return tuple(y[v - 1] if v else 0 for v in x)


def identity_payload(kind, m):
    if kind == "matf2":
        return tuple(1 if r == c else 0 for r in range(m) for c in range(m))
    return tuple(range(1, m + 1))


class Category:
    """A finite category with fully enumerated hom-sets.

    Morphisms are addressed by a global index (``c.elements[k]``); hom-set
    ``(i, j)`` occupies the contiguous index range ``c.hom_range(i, j)``.
    Instances are treated as immutable; composition tables are built lazily
    and cached.
    """

    def __init__(self, kind, sizes, homs, parent=None):
        self.kind = kind
        self.sizes = tuple(sizes)
        self.parent = parent
        self.elements = []
        self._start = {}
        self._homs = {}
        k = len(self.sizes)
        for i in range(k):
            for j in range(k):
                hs = list(homs[i, j])
                self._start[i, j] = len(self.elements)
                self._homs[i, j] = hs
                self.elements.extend(hs)
        self.index = {x: p for p, x in enumerate(self.elements)}
        self.src = np.array([x.src for x in self.elements], dtype=np.int64)
        self.dst = np.array([x.dst for x in self.elements], dtype=np.int64)
        self._tables = {}

    # -- structure ---------------------------------------------------------
    @property
    def n_objects(self):
        return len(self.sizes)

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        tag = "sub" if self.parent is not None else ""
        return f"Category({self.kind}{tag}, sizes={list(self.sizes)}, |S|={len(self)})"

    def hom(self, i, j):
        return self._homs[i, j]

    def hom_range(self, i, j):
        s = self._start[i, j]
        return range(s, s + len(self._homs[i, j]))

    def hom_indices(self, i, j):
        s = self._start[i, j]
        return np.arange(s, s + len(self._homs[i, j]))

    def start(self, i, j):
        return self._start[i, j]

    def local(self, p):
        x = self.elements[p]
        return p - self._start[x.src, x.dst]

    def spec(self):
        return {"kind": self.kind, "sizes": list(self.sizes)}

    # -- composition -------------------------------------------------------
    def compose(self, x, y):
        if x.dst != y.src:
            raise DomainMismatch(f"cannot compose {x} then {y}: {x.dst} != {y.src}")
        m, n, p = self.sizes[x.src], self.sizes[x.dst], self.sizes[y.dst]
        z = Morphism(x.src, y.dst, compose_payload(self.kind, m, n, p, x.payload, y.payload))
        if z not in self.index:
            raise PreconditionError(f"composite {z} lies outside the category")
        return z

    def table(self, i, j, k):
        """Global indices of composites: ``table(i,j,k)[x, y]`` for local x in
        S_ij and local y in S_jk."""
        key = (i, j, k)
        t = self._tables.get(key)
        if t is None:
            xs, ys = self._homs[i, j], self._homs[j, k]
            m, n, p = self.sizes[i], self.sizes[j], self.sizes[k]
            t = np.empty((len(xs), len(ys)), dtype=np.int64)
            for a, x in enumerate(xs):
                for b, y in enumerate(ys):
                    z = Morphism(i, k, compose_payload(self.kind, m, n, p, x.payload, y.payload))
                    try:
                        t[a, b] = self.index[z]
                    except KeyError:
                        raise PreconditionError(f"composite {z} lies outside the category") from None
            t.setflags(write=False)
            self._tables[key] = t
        return t

    def mul(self, p, q):
        """Composite of global indices p then q."""
        x, y = self.elements[p], self.elements[q]
        if x.dst != y.src:
            raise DomainMismatch(f"cannot compose {x} then {y}")
        t = self.table(x.src, x.dst, y.dst)
        return int(t[p - self._start[x.src, x.dst], q - self._start[y.src, y.dst]])

    def mul3(self, p, q, r):
        return self.mul(self.mul(p, q), r)

    def has_identity(self, i):
        return Morphism(i, i, identity_payload(self.kind, self.sizes[i])) in self.index

    # -- sub-structures ----------------------------------------------------
    def restrict(self, keep):
        """Partial subsemigroup on the morphisms whose global index is in
        ``keep``; raises if the subset is not closed under composition."""
        keep = set(int(p) for p in keep)
        homs = {(i, j): [x for x in self._homs[i, j] if self.index[x] in keep]
                for i in range(self.n_objects) for j in range(self.n_objects)}
        sub = Category(self.kind, self.sizes, homs, parent=self)
        if not sub.is_closed():
            raise PreconditionError("subset is not closed under composition")
        return sub

    def generate(self, gens):
        """Smallest partial subsemigroup containing the given global indices."""
        have = set(int(g) for g in gens)
        frontier = list(have)
        while frontier:
            new = []
            items = list(have)
            for p in frontier:
                for q in items:
                    for u, v in ((p, q), (q, p)):
                        if self.dst[u] == self.src[v]:
                            w = self.mul(u, v)
                            if w not in have:
                                have.add(w)
                                new.append(w)
            frontier = new
        return self.restrict(have)

    def embed(self, sub_index):
        """Global index in the parent of a morphism of this (sub)category."""
        return self.parent.index[self.elements[sub_index]]

    def is_closed(self):
        k = self.n_objects
        for i in range(k):
            for j in range(k):
                for l in range(k):
                    xs, ys = self._homs[i, j], self._homs[j, l]
                    if not xs or not ys:
                        continue
                    try:
                        self.table(i, j, l)
                    except PreconditionError:
                        return False
        return True


def build_category(kind, sizes, unsafe_sizes=False):
    if kind not in KINDS:
        raise PreconditionError(f"unknown kind {kind!r}; expected one of {KINDS}")
    sizes = [int(s) for s in sizes]
    if not sizes:
        raise PreconditionError("at least one object is required")
    if any(s < 1 for s in sizes):
        raise PreconditionError("object sizes must be positive")
    cap = MATRIX_SIZE_CAP if kind == "matf2" else MAP_SIZE_CAP
    if not unsafe_sizes and max(sizes) > cap:
        raise BudgetError(f"{kind} sizes are capped at {cap} (got {sizes}); pass unsafe_sizes to override")
    k = len(sizes)
    homs = {}
    for i in range(k):
        for j in range(k):
            homs[i, j] = [Morphism(i, j, p) for p in _enumerate_payloads(kind, sizes[i], sizes[j])]
    return Category(kind, sizes, homs)


def compose(c, x, y):
    return c.compose(x, y)


def identity(c, i):
    if not 0 <= i < c.n_objects:
        raise PreconditionError(f"object {i} out of range")
    e = Morphism(i, i, identity_payload(c.kind, c.sizes[i]))
    if e not in c.index:
        raise PreconditionError(f"object {i} has no identity in this subcategory")
    return e


def inverse_indices(c, p):
    """Global indices of V(x) = {y : xyx = x, yxy = y} for x = elements[p]."""
    x = c.elements[p]
    i, j = x.src, x.dst
    if not len(c.hom(j, i)):
        return []
    xl = c.local(p)
    xy = c.table(i, j, i)[xl, :]                         # x*y for every y in S_ji
    xyx = c.table(i, i, j)[xy - c.start(i, i), xl]
    yx = c.table(j, i, j)[:, xl]                         # y*x
    yxy = c.table(j, j, i)[yx - c.start(j, j), np.arange(len(c.hom(j, i)))]
    ys = c.hom_indices(j, i)
    return [int(y) for y, a, b in zip(ys, xyx, yxy) if a == p and b == y]


def inverses(c, x):
    return {c.elements[q] for q in inverse_indices(c, c.index[x])}


def regular_mask(c):
    """Boolean array over global indices: x is von Neumann regular."""
    out = np.zeros(len(c), dtype=bool)
    k = c.n_objects
    for i in range(k):
        for j in range(k):
            if not len(c.hom(i, j)) or not len(c.hom(j, i)):
                continue
            xy = c.table(i, j, i)                        # [x, y]
            xyx = c.table(i, i, j)[xy - c.start(i, i), np.arange(xy.shape[0])[:, None]]
            out[c.hom_indices(i, j)] = (xyx == c.hom_indices(i, j)[:, None]).any(axis=1)
    return out


def is_regular(c, x):
    p = c.index[x]
    x = c.elements[p]
    if not len(c.hom(x.dst, x.src)):
        return False
    xl = c.local(p)
    xy = c.table(x.src, x.dst, x.src)[xl, :]
    xyx = c.table(x.src, x.src, x.dst)[xy - c.start(x.src, x.src), xl]
    return bool((xyx == p).any())


def category_to_json(c):
    return json.dumps(c.spec())


def category_from_json(text, unsafe_sizes=False):
    obj = json.loads(text) if isinstance(text, str) else text
    return build_category(obj["kind"], obj["sizes"], unsafe_sizes=unsafe_sizes)


def parse_morphism(c, i, j, token):
    """Resolve a CLI-style reference: a local index into S_ij, or a
    comma-separated payload."""
    token = str(token).strip()
    if "," in token or token.startswith("["):
        vals = tuple(int(v) for v in token.strip("[]").split(",") if v.strip())
        x = Morphism(i, j, vals)
        if x not in c.index:
            raise PreconditionError(f"{x} is not a morphism {i}->{j}")
        return x
    k = int(token)
    hs = c.hom(i, j)
    if not 0 <= k < len(hs):
        raise PreconditionError(f"index {k} out of range for hom-set ({i},{j}) of size {len(hs)}")
    return hs[k]
