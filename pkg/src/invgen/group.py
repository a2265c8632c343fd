"""Permutation groups: stabilizer chains, element tables, coset actions.

A :class:`PermGroup` is built from generators by deterministic Schreier-Sims
(base points chosen as the smallest moved point of the element that forces a
new level).  The element table, when requested, lists every element sorted by
image array; the identity is lexicographically least and therefore index 0.
Subgroups and classes are passed around as element masks: Python ints whose
bit ``i`` marks element index ``i``.
"""

from dataclasses import dataclass, field
from math import prod

import numpy as np

from .errors import CapExceeded, NotNormal, NotSubgroup
from .perm import Permutation, format_cycles

DEFAULT_ELEMENT_CAP = 100_000
# multiplication tables are N x N; beyond this they stop being desk-scale
MULT_TABLE_CAP = 5_000


def _mul(a, b):
    return tuple(b[x] for x in a)


def _inv(a):
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


class StabChain:
    """Base and strong generating set with orbit transversals.

    ``transversals[i][p]`` maps ``base[i]`` to ``p`` and fixes the earlier
    base points.  Orbit points are kept in discovery order, which makes the
    chain (and everything derived from it) reproducible.
    """

    def __init__(self, degree, generators):
        self.degree = degree
        ident = tuple(range(degree))
        self.identity = ident
        strong = []
        for g in generators:
            if g != ident and g not in strong:
                strong.append(g)
        base = []
        for s in strong:
            if all(s[b] == b for b in base):
                base.append(min(i for i in range(degree) if s[i] != i))
        self.base = base
        self.strong = strong
        self.transversals = [{b: ident} for b in base]
        self.inverse_transversals = [{b: ident} for b in base]
        self._build()

    def _gens_at(self, level):
        prefix = self.base[:level]
        return [(k, s) for k, s in enumerate(self.strong) if all(s[b] == b for b in prefix)]

    def _build(self):
        checked = [set() for _ in self.base]
        i = len(self.base) - 1
        while i >= 0:
            gens = self._gens_at(i)
            tr = self.transversals[i]
            itr = self.inverse_transversals[i]
            pts = list(tr)
            k = 0
            while k < len(pts):
                p = pts[k]
                k += 1
                for _, s in gens:
                    q = s[p]
                    if q not in tr:
                        tr[q] = _mul(tr[p], s)
                        itr[q] = _inv(tr[q])
                        pts.append(q)
            found = None
            for p in pts:
                for key, s in gens:
                    if (p, key) in checked[i]:
                        continue
                    checked[i].add((p, key))
                    h = _mul(_mul(tr[p], s), itr[s[p]])
                    res, level = self.sift(h, start=i + 1)
                    if res != self.identity:
                        found = (res, level)
                        break
                if found:
                    break
            if found is None:
                i -= 1
                continue
            res, level = found
            self.strong.append(res)
            if level == len(self.base):
                b = min(x for x in range(self.degree) if res[x] != x)
                self.base.append(b)
                self.transversals.append({b: self.identity})
                self.inverse_transversals.append({b: self.identity})
                checked.append(set())
            i = level

    def sift(self, g, start=0):
        """Strip ``g`` through the levels from ``start``; return (residue, level reached)."""
        for j in range(start, len(self.base)):
            x = g[self.base[j]]
            itr = self.inverse_transversals[j]
            if x not in itr:
                return g, j
            g = _mul(g, itr[x])
        return g, len(self.base)

    def contains(self, g):
        if len(g) != self.degree:
            return False
        res, _ = self.sift(tuple(g))
        return res == self.identity

    @property
    def orbit_lengths(self):
        return [len(t) for t in self.transversals]

    def order(self):
        return prod(self.orbit_lengths)

    def random_element(self, rng):
        g = self.identity
        for tr in reversed(self.transversals):
            pts = list(tr)
            g = _mul(g, tr[pts[rng.randrange(len(pts))]])
        return g

    def element_array(self):
        """All elements as an (order, degree) int array, unsorted."""
        E = np.array([self.identity], dtype=np.int32)
        for tr in reversed(self.transversals):
            U = np.array(list(tr.values()), dtype=np.int32)
            # h * u == u[h] for every pair
            E = U[np.arange(len(U))[:, None, None], E[None, :, :]].reshape(-1, self.degree)
        return E


class ElementTable:
    """Sorted element list of a group with index lookup and lazy tables."""

    def __init__(self, chain):
        self.chain = chain
        E = chain.element_array()
        order = np.lexsort(E.T[::-1])
        self.perms = np.ascontiguousarray(E[order])
        self.size = len(self.perms)
        self.degree = chain.degree
        self._prepare_rank()
        ranks = self._rank(self.perms[:, self._base])
        self._rank_to_index = np.empty(self.size, dtype=np.int64)
        self._rank_to_index[ranks] = np.arange(self.size)
        self._mult = None
        self._inv = None
        self._orders = None

    def _prepare_rank(self):
        ch = self.chain
        self._base = np.array(ch.base, dtype=np.int64)
        self._levels = []
        stride = 1
        strides = []
        for tr in reversed(ch.transversals):
            strides.append(stride)
            stride *= len(tr)
        strides.reverse()
        for j, itr in enumerate(ch.inverse_transversals):
            pts = list(itr)
            pos = np.full(self.degree, -1, dtype=np.int64)
            pos[pts] = np.arange(len(pts))
            V = np.array([itr[p] for p in pts], dtype=np.int64)
            self._levels.append((pos, V, strides[j]))

    def _rank(self, base_images):
        """Chain coordinates of elements given by their images of the base points.

        Returns -1 where the images are inconsistent with any group element.
        """
        imgs = np.array(base_images, dtype=np.int64, copy=True)
        M = len(imgs)
        rank = np.zeros(M, dtype=np.int64)
        bad = np.zeros(M, dtype=bool)
        for j, (pos, V, stride) in enumerate(self._levels):
            p = pos[imgs[:, j]]
            bad |= p < 0
            p = np.where(p < 0, 0, p)
            rank += p * stride
            if j + 1 < imgs.shape[1]:
                imgs[:, j + 1:] = V[p[:, None], imgs[:, j + 1:]]
        rank[bad] = -1
        return rank

    def indices_of(self, arr):
        """Element indices of the rows of ``arr``; -1 for rows outside the group."""
        arr = np.asarray(arr)
        if arr.ndim == 1:
            arr = arr[None, :]
        if len(self._base) == 0:
            ok = (arr == np.arange(self.degree)).all(axis=1)
            return np.where(ok, 0, -1)
        ranks = self._rank(arr[:, self._base])
        idx = np.where(ranks < 0, -1, self._rank_to_index[np.maximum(ranks, 0)])
        good = idx >= 0
        good[good] = (self.perms[idx[good]] == arr[good]).all(axis=1)
        return np.where(good, idx, -1)

    def index(self, p):
        images = p.images if isinstance(p, Permutation) else tuple(p)
        if len(images) != self.degree:
            raise ValueError(f"degree mismatch: {len(images)} vs {self.degree}")
        i = int(self.indices_of(np.array(images))[0])
        if i < 0:
            raise KeyError(f"{format_cycles(Permutation(images))} is not in the group")
        return i

    def perm(self, i):
        return Permutation(self.perms[i].tolist())

    @property
    def mult(self):
        """``mult[i, j]`` is the index of ``element i * element j``."""
        if self._mult is None:
            if self.size > MULT_TABLE_CAP:
                raise CapExceeded(f"multiplication table for order {self.size} exceeds {MULT_TABLE_CAP}")
            N = self.size
            # right multiplication by each strong generator, as index maps
            right = [self.indices_of(np.array(g)[self.perms]) for g in self.chain.strong]
            mult = np.empty((N, N), dtype=np.int32)
            mult[:, 0] = np.arange(N)
            seen = np.zeros(N, dtype=bool)
            seen[0] = True
            queue = [0]
            # walk a spanning tree of the Cayley graph: x * (y * s) = (x * y) * s
            for y in queue:
                for R in right:
                    z = R[y]
                    if not seen[z]:
                        seen[z] = True
                        mult[:, z] = R[mult[:, y]]
                        queue.append(int(z))
            self._mult = mult
        return self._mult

    @property
    def inv(self):
        if self._inv is None:
            inv_perms = np.empty_like(self.perms)
            rows = np.arange(self.size)[:, None]
            inv_perms[rows, self.perms] = np.arange(self.degree)[None, :]
            self._inv = self.indices_of(inv_perms)
        return self._inv

    @property
    def orders(self):
        if self._orders is None:
            mult = self.mult
            N = self.size
            orders = np.zeros(N, dtype=np.int64)
            cur = np.arange(N)
            k = 1
            while (orders == 0).any():
                orders[(cur == 0) & (orders == 0)] = k
                cur = mult[cur, np.arange(N)]
                k += 1
            self._orders = orders
        return self._orders

    def conjugate(self, x, g):
        """Index of ``x ^ g = g^-1 x g`` (vectorized over array arguments)."""
        mult = self.mult
        return mult[mult[self.inv[g], x], g]

    def generated(self, gens):
        """Boolean membership array of the subgroup generated by element indices."""
        mult = self.mult
        inside = np.zeros(self.size, dtype=bool)
        inside[0] = True
        gens = np.unique(np.asarray(gens, dtype=np.int64))
        if gens.size == 0:
            return inside
        frontier = np.array([0])
        while frontier.size:
            prods = mult[frontier][:, gens].ravel()
            new = np.unique(prods[~inside[prods]])
            inside[new] = True
            frontier = new
        return inside

    def is_subgroup(self, idx):
        idx = np.asarray(idx)
        inside = np.zeros(self.size, dtype=bool)
        inside[idx] = True
        return bool(inside[0]) and bool(inside[self.mult[np.ix_(idx, idx)]].all())


def mask_from_bools(b):
    return int.from_bytes(np.packbits(np.asarray(b, dtype=bool), bitorder="little").tobytes(), "little")


def mask_from_indices(idx, size):
    b = np.zeros(size, dtype=bool)
    b[np.asarray(idx, dtype=np.int64)] = True
    return mask_from_bools(b)


def bools_from_mask(mask, size):
    raw = np.frombuffer(mask.to_bytes((size + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:size].astype(bool)


def indices_from_mask(mask, size):
    return np.flatnonzero(bools_from_mask(mask, size))


class PermGroup:
    """A permutation group given by generators, with a cached stabilizer chain.

    Heavier caches (element table, classes, lattice, automorphisms) are filled
    on demand; call :meth:`finalize` before sharing an instance across threads.
    """

    def __init__(self, degree, generators, name=None):
        gens = [g if isinstance(g, Permutation) else Permutation(g) for g in generators]
        if not gens:
            raise ValueError("at least one generator is required")
        for g in gens:
            if g.degree != degree:
                raise ValueError(f"generator {format_cycles(g)} has degree {g.degree}, expected {degree}")
        self.degree = degree
        self.generators = gens
        self.name = name
        self.chain = StabChain(degree, [g.images for g in gens])
        self.order = self.chain.order()
        self._table = None
        self._cache = {}

    def __repr__(self):
        label = self.name or f"<{len(self.generators)} generators>"
        return f"PermGroup({label}, degree={self.degree}, order={self.order})"

    def contains(self, p):
        if p.degree != self.degree:
            raise ValueError(f"degree mismatch: {p.degree} vs {self.degree}")
        return self.chain.contains(p.images)

    def __contains__(self, p):
        return self.contains(p)

    def elements(self, cap=DEFAULT_ELEMENT_CAP):
        if self._table is None:
            if self.order > cap:
                raise CapExceeded(f"group order {self.order} exceeds element cap {cap}")
            self._table = ElementTable(self.chain)
        return self._table

    @property
    def table(self):
        return self.elements()

    def has_table(self):
        return self._table is not None

    def finalize(self, cap=DEFAULT_ELEMENT_CAP):
        if self.order <= cap:
            self.elements(cap)
        return self

    def random_element(self, rng):
        return Permutation(self.chain.random_element(rng))

    def generator_indices(self):
        t = self.table
        return [t.index(g) for g in self.generators]

    def is_transitive(self):
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for g in self.generators:
                y = g.images[x]
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.degree

    def generates(self, perms):
        """Whether ``perms`` generate the whole group (they must lie in it)."""
        if self.has_table() and self.order <= MULT_TABLE_CAP:
            t = self.table
            return bool(t.generated([t.index(p) for p in perms]).all())
        perms = list(perms) or [Permutation.identity(self.degree)]
        return StabChain(self.degree, [p.images for p in perms]).order() == self.order


def group_from_generators(degree, gens, name=None):
    return PermGroup(degree, gens, name=name)


def small_generating_set(table, mask):
    """Greedy generating set of the subgroup ``mask``: highest order first, ties by index."""
    idx = indices_from_mask(mask, table.size)
    target = len(idx)
    orders = table.orders[idx]
    ranked = idx[np.lexsort((idx, -orders))]
    gens = []
    inside = table.generated([])
    for x in ranked:
        if inside.sum() == target:
            break
        if not inside[x]:
            gens.append(int(x))
            inside = table.generated(gens)
    return gens


def subgroup(G, mask, name=None):
    """The subgroup of ``G`` with element mask ``mask`` as a standalone group."""
    t = G.table
    gens = small_generating_set(t, mask) or [0]
    return PermGroup(G.degree, [t.perm(i) for i in gens], name=name)


@dataclass
class GroupHom:
    """Homomorphism determined by generator images.

    ``element_images`` (when present) holds the image of every source element
    index as a row of target points, for desk-scale sources.
    """

    source: PermGroup
    target: PermGroup
    generator_images: list
    kernel_mask: int = None
    element_images: np.ndarray = field(default=None, repr=False)

    def image_of_index(self, i):
        return Permutation(self.element_images[i].tolist())

    def __call__(self, p):
        if self.element_images is None:
            raise ValueError("images are only tabulated for coset actions")
        return self.image_of_index(self.source.table.index(p))

    def is_homomorphism(self):
        """Exhaustively check img(x*y) == img(x)*img(y) over the element table."""
        E = self.element_images
        mult = self.source.table.mult
        for i in range(len(E)):
            lhs = E[mult[i]]
            # (img_i * img_j)(x) = img_j(img_i(x)) = E[j, E[i, x]]
            rhs = E[:, E[i]]
            if not (lhs == rhs).all():
                return False
        return True


def coset_action(G, H_mask):
    """Action of ``G`` on the right cosets ``Hx`` of the subgroup ``H_mask``."""
    t = G.table
    H = indices_from_mask(H_mask, t.size)
    if not t.is_subgroup(H):
        raise NotSubgroup("mask is not closed under composition")
    mult = t.mult
    coset_of = np.full(t.size, -1, dtype=np.int64)
    reps = []
    for x in range(t.size):
        if coset_of[x] < 0:
            coset_of[mult[H, x]] = len(reps)
            reps.append(x)
    reps = np.array(reps)
    images = coset_of[mult[reps]].T  # images[g, c] = coset of rep_c * g
    trivial = (images == np.arange(len(reps))).all(axis=1)
    gen_idx = G.generator_indices()
    gen_images = [Permutation(images[i].tolist()) for i in gen_idx]
    target = PermGroup(len(reps), gen_images)
    return GroupHom(G, target, gen_images, kernel_mask=mask_from_bools(trivial), element_images=images)


def is_normal(G, mask):
    t = G.table
    N = indices_from_mask(mask, t.size)
    if not t.is_subgroup(N):
        return False
    inside = bools_from_mask(mask, t.size)
    return all(inside[t.conjugate(N, g)].all() for g in G.generator_indices())


def quotient(G, N_mask):
    if not is_normal(G, N_mask):
        raise NotNormal("subgroup is not normal")
    hom = coset_action(G, N_mask)
    target = hom.target
    if G.name:
        target.name = f"{G.name}/N"
    return target


def embed(p, j, m):
    """Place ``p`` in block ``j`` of a degree ``m * p.degree`` permutation."""
    n = p.degree
    img = list(range(n * m))
    for x in range(n):
        img[j * n + x] = j * n + p.images[x]
    return Permutation(img)


def project(x, j, n):
    """Restriction of a block-preserving permutation to block ``j`` of size ``n``."""
    block = x.images[j * n:(j + 1) * n]
    if any(not j * n <= y < (j + 1) * n for y in block):
        raise ValueError(f"block {j} is not preserved")
    return Permutation([y - j * n for y in block])


def join_blocks(parts):
    """Concatenate per-block permutations into one element of a direct power."""
    n = parts[0].degree
    img = []
    for j, p in enumerate(parts):
        img.extend(j * n + y for y in p.images)
    return Permutation(img)


def direct_power(G, m):
    if m < 1:
        raise ValueError("exponent must be at least 1")
    if m == 1:
        return G
    gens = [embed(g, j, m) for j in range(m) for g in G.generators]
    name = f"{G.name}^{m}" if G.name else None
    return PermGroup(G.degree * m, gens, name=name)
