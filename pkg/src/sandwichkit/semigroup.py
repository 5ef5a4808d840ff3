"""Finite semigroups given by a multiplication table."""

import itertools
import random

import numpy as np

from .errors import PreconditionError


class FiniteSemigroup:
    """A finite semigroup on positions ``0..n-1``.

    ``table[x, y]`` is the position of the product x*y.  ``elements`` holds
    one opaque handle per position (for semigroups carved out of a category
    these are global morphism indices), so results can be mapped back.
    """

    def __init__(self, table, elements=None, identity="auto", name=None):
        table = np.asarray(table, dtype=np.int64)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise PreconditionError("multiplication table must be square")
        n = table.shape[0]
        if n and (table.min() < 0 or table.max() >= n):
            raise PreconditionError("multiplication table is not closed")
        table.setflags(write=False)
        self.table = table
        self.n = n
        self.elements = list(range(n)) if elements is None else list(elements)
        if len(self.elements) != n:
            raise PreconditionError("element list does not match table size")
        self._pos = None
        self.name = name
        self.identity = self.find_identity() if identity == "auto" else identity

    @classmethod
    def from_function(cls, elements, mul, **kw):
        elements = list(elements)
        pos = {x: k for k, x in enumerate(elements)}
        table = [[pos[mul(x, y)] for y in elements] for x in elements]
        return cls(table, elements, **kw)

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"FiniteSemigroup({self.name or ''} n={self.n})"

    def position(self, handle):
        if self._pos is None:
            self._pos = {h: k for k, h in enumerate(self.elements)}
        return self._pos[handle]

    def positions(self, handles):
        return [self.position(h) for h in handles]

    def mul(self, x, y):
        return int(self.table[x, y])

    def product(self, word):
        it = iter(word)
        acc = next(it)
        for w in it:
            acc = int(self.table[acc, w])
        return acc

    # -- basic predicates --------------------------------------------------
    def find_identity(self):
        r = np.arange(self.n)
        for e in range(self.n):
            if (self.table[e] == r).all() and (self.table[:, e] == r).all():
                return e
        return None

    def idempotent_mask(self):
        return self.table[np.arange(self.n), np.arange(self.n)] == np.arange(self.n)

    def idempotents(self):
        return [int(x) for x in np.flatnonzero(self.idempotent_mask())]

    def regular_mask(self):
        t = self.table
        xyx = t[t, np.arange(self.n)[:, None]]           # [x, y] -> x*y*x
        return (xyx == np.arange(self.n)[:, None]).any(axis=1)

    def is_regular(self):
        return bool(self.regular_mask().all())

    def inverses(self, x):
        t = self.table
        ys = np.arange(self.n)
        xyx = t[t[x, ys], x]
        yxy = t[t[ys, x], ys]
        return [int(y) for y in ys[(xyx == x) & (yxy == ys)]]

    def is_inverse(self):
        return all(len(self.inverses(x)) == 1 for x in range(self.n))

    def is_group(self):
        if self.n == 0 or self.identity is None:
            return False
        e = self.identity
        return all((self.table[x] == e).any() for x in range(self.n))

    def is_associative(self, samples=None, seed=0):
        t = self.table
        if samples is None:
            lhs = t[t[:, :, None], np.arange(self.n)[None, None, :]]   # (xy)z
            rhs = t[np.arange(self.n)[:, None, None], t[None, :, :]]   # x(yz)
            return bool((lhs == rhs).all())
        rng = random.Random(seed)
        for _ in range(samples):
            x, y, z = (rng.randrange(self.n) for _ in range(3))
            if t[t[x, y], z] != t[x, t[y, z]]:
                return False
        return True

    # -- substructures -----------------------------------------------------
    def is_closed(self, positions):
        pos = np.asarray(sorted(set(positions)), dtype=np.int64)
        if not len(pos):
            return True
        mask = np.zeros(self.n, dtype=bool)
        mask[pos] = True
        return bool(mask[self.table[np.ix_(pos, pos)]].all())

    def sub(self, positions, name=None):
        """The subsemigroup on the given positions (must be closed).  Handles
        are inherited from this semigroup."""
        pos = sorted(set(int(p) for p in positions))
        if not self.is_closed(pos):
            raise PreconditionError("subset is not closed under the product")
        remap = np.full(self.n, -1, dtype=np.int64)
        remap[pos] = np.arange(len(pos))
        table = remap[self.table[np.ix_(pos, pos)]] if pos else np.zeros((0, 0), dtype=np.int64)
        return FiniteSemigroup(table, [self.elements[p] for p in pos], name=name)

    def generated(self, gens):
        """Positions of the subsemigroup generated by ``gens``."""
        have = np.zeros(self.n, dtype=bool)
        gens = [int(g) for g in gens]
        have[gens] = True
        t = self.table
        frontier = sorted(set(gens))
        while frontier:
            cur = np.flatnonzero(have)
            f = np.asarray(frontier)
            cand = np.concatenate((t[np.ix_(f, cur)].ravel(), t[np.ix_(cur, f)].ravel()))
            cand = np.unique(cand)
            cand = cand[~have[cand]]
            have[cand] = True
            frontier = cand.tolist()
        return set(int(p) for p in np.flatnonzero(have))

    def variant(self, u):
        """The variant (S, *_u) with x *_u y = x u y."""
        t = self.table
        return FiniteSemigroup(t[t[:, u]], self.elements, name=f"{self.name}^{u}")

    def local_monoid(self, e):
        if self.table[e, e] != e:
            raise PreconditionError(f"{e} is not idempotent")
        pos = set(int(v) for v in self.table[self.table[e, :], e])
        return self.sub(pos, name=f"{e}S{e}")

    def adjoin_identity(self):
        """S^1 with a fresh identity at position n, even if S is a monoid."""
        n = self.n
        t = np.empty((n + 1, n + 1), dtype=np.int64)
        t[:n, :n] = self.table
        t[n, :] = np.arange(n + 1)
        t[:, n] = np.arange(n + 1)
        return FiniteSemigroup(t, self.elements + [None], identity=n)


def is_homomorphism(f, src, dst):
    """f: array of dst positions indexed by src positions."""
    f = np.asarray(f)
    return bool((f[src.table] == dst.table[np.ix_(f, f)]).all())


def is_isomorphism(f, src, dst):
    f = np.asarray(f)
    return src.n == dst.n and len(set(f.tolist())) == src.n and is_homomorphism(f, src, dst)


def isomorphic_tables(s, t):
    """Brute-force isomorphism test for small semigroups (n <= 8)."""
    if s.n != t.n:
        return False
    if s.n > 8:
        raise PreconditionError("brute-force isomorphism test limited to 8 elements")
    for perm in itertools.permutations(range(t.n)):
        if is_homomorphism(perm, s, t):
            return True
    return False


# -- small catalog of standard semigroups, used throughout the tests --------

def cyclic_group(n):
    return FiniteSemigroup([[(x + y) % n for y in range(n)] for x in range(n)], name=f"C{n}")


def symmetric_group(n):
    perms = list(itertools.permutations(range(n)))
    return FiniteSemigroup.from_function(perms, lambda p, q: tuple(q[p[k]] for k in range(n)),
                                         name=f"S{n}")


def trivial_monoid():
    return FiniteSemigroup([[0]], name="1")


def rectangular_band(r, l):
    elems = [(i, j) for i in range(r) for j in range(l)]
    return FiniteSemigroup.from_function(elems, lambda x, y: (x[0], y[1]), name=f"RB{r}x{l}")


def right_zero_band(n):
    return FiniteSemigroup([[y for y in range(n)] for _ in range(n)], name=f"RZ{n}")


def full_transformation_monoid(n):
    """T_n with maps composed left to right (apply x, then y)."""
    maps = list(itertools.product(range(n), repeat=n))
    return FiniteSemigroup.from_function(maps, lambda x, y: tuple(y[v] for v in x), name=f"T{n}")


def rectangular_group(r, l, group):
    """I x G x J with (i1,g,j1)(i2,h,j2) = (i1,gh,j2)."""
    elems = [(i, g, j) for i in range(r) for g in range(group.n) for j in range(l)]
    return FiniteSemigroup.from_function(
        elems, lambda x, y: (x[0], group.mul(x[1], y[1]), y[2]), name=f"RG{r}x{l}")
