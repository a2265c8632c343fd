"""Conjugacy classes, subgroup lattices and automorphism groups by exhaustion.

Everything here works on the element table of a group and is meant for
desk-scale orders (full lattices up to a few thousand elements).
"""

from dataclasses import dataclass, field
from math import gcd

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import BudgetExceeded
from .group import (
    bools_from_mask,
    indices_from_mask,
    mask_from_bools,
    mask_from_indices,
    small_generating_set,
)
from .perm import format_cycles, parse_cycles

LATTICE_BUDGET = 2500
AUT_BUDGET = 1000

LATTICE_SCHEMA = "invgen.lattice/1"


@dataclass
class ConjClassTable:
    reps: list
    masks: list
    sizes: list
    class_of: np.ndarray
    members: list = field(repr=False)

    def __len__(self):
        return len(self.reps)


@dataclass
class SubgroupRecord:
    id: int
    mask: int
    order: int
    generators: list
    class_id: int
    maximal: bool = False


@dataclass
class SubgroupLattice:
    records: list
    classes: list  # record ids per conjugacy class of subgroups, class rep first
    maximal_ids: list

    def __len__(self):
        return len(self.records)

    def class_rep(self, class_id):
        return self.records[self.classes[class_id][0]]


@dataclass
class AutGroup:
    """Automorphisms as index maps on the base group's element table.

    ``maps[a, x]`` is the image of element ``x`` under automorphism ``a``; row 0
    is the identity map.  ``class_perms[a]`` is the induced permutation of
    conjugacy-class ids.
    """

    base: object
    maps: np.ndarray
    inner_ids: list
    class_perms: np.ndarray
    generator_indices: list

    @property
    def order(self):
        return len(self.maps)

    @property
    def inner_order(self):
        return len(self.inner_ids)

    @property
    def out_order(self):
        return self.order // self.inner_order


def _cached(G, key, compute):
    if key not in G._cache:
        G._cache[key] = compute()
    return G._cache[key]


def conjugation_maps(G):
    """Index maps ``x -> x ^ s`` for each generator ``s``; no multiplication table needed."""
    t = G.table
    maps = []
    for s in G.generators:
        img = np.array(s.images)
        inv = np.argsort(img)
        # (s^-1 x s)(p) = s(x(s^-1(p)))
        maps.append(t.indices_of(img[t.perms[:, inv]]))
    return maps


def conjugacy_classes(G):
    def compute():
        t = G.table
        N = t.size
        maps = conjugation_maps(G)
        rows = np.concatenate([np.arange(N)] * len(maps))
        cols = np.concatenate(maps)
        graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(N, N))
        _, labels = connected_components(graph, directed=True, connection="weak")
        # relabel by smallest member so class ids follow representative index
        first = np.full(labels.max() + 1, N, dtype=np.int64)
        np.minimum.at(first, labels, np.arange(N))
        order = np.argsort(first)
        relabel = np.empty_like(order)
        relabel[order] = np.arange(len(order))
        class_of = relabel[labels]
        members = [np.flatnonzero(class_of == c) for c in range(len(order))]
        return ConjClassTable(
            reps=[int(m[0]) for m in members],
            masks=[mask_from_indices(m, N) for m in members],
            sizes=[len(m) for m in members],
            class_of=class_of,
            members=members,
        )

    return _cached(G, "classes", compute)


def conjugation_table(G):
    """``C[g, x]`` is the index of ``x ^ g``."""

    def compute():
        t = G.table
        mult = t.mult
        left = mult[t.inv]  # left[g, x] = g^-1 * x
        return mult[left, np.arange(t.size)[:, None]]

    return _cached(G, "conj_table", compute)


def _unique_conjugates(C, idx, size):
    """Distinct conjugates of the subgroup with element indices ``idx``.

    Returns (mask, conjugator) pairs with the first conjugating element found.
    """
    rows = C[:, idx]
    B = np.zeros((size, size), dtype=bool)
    B[np.arange(size)[:, None], rows] = True
    packed = np.packbits(B, axis=1, bitorder="little")
    keys = np.ascontiguousarray(packed).view(np.dtype((np.void, packed.shape[1]))).ravel()
    _, first = np.unique(keys, return_index=True)
    first.sort()
    return [(int.from_bytes(packed[g].tobytes(), "little"), int(g)) for g in first]


def all_subgroups(G, budget=LATTICE_BUDGET):
    """Every subgroup of ``G``, grouped into conjugacy classes.

    Classes are found by extending a representative ``H`` of each known class
    by single elements, ``<H, g>``; every subgroup arises this way from one of
    its maximal subgroups, so the search is complete (including perfect
    subgroups that order-p extensions alone would miss).
    """
    # a lattice already computed under a larger budget is reused
    if "lattice" not in G._cache and G.order > budget:
        raise BudgetExceeded(f"subgroup lattice of order {G.order} exceeds budget {budget}")

    def compute():
        t = G.table
        N = t.size
        mult = t.mult
        C = conjugation_table(G)
        known = {}
        found = []  # (gens, conjugate list)
        queue = []

        def register(inside, gens):
            mask = mask_from_bools(inside)
            if mask in known:
                return
            conj = _unique_conjugates(C, np.flatnonzero(inside), N)
            for m, _ in conj:
                known[m] = len(found)
            found.append((list(gens), conj))
            queue.append(len(found) - 1)

        register(t.generated([]), [])
        for cid in queue:
            gens, conj = found[cid]
            H = indices_from_mask(conj[0][0], N)
            inside = bools_from_mask(conj[0][0], N)
            if len(H) == N:
                continue
            normalizer = np.flatnonzero(inside[C[:, H]].all(axis=1))
            done = inside.copy()
            for g in range(N):
                if done[g]:
                    continue
                register(t.generated(gens + [g]), gens + [g])
                o = int(t.orders[g])
                powers = [0]
                for _ in range(o - 1):
                    powers.append(int(mult[powers[-1], g]))
                powers = [powers[k] for k in range(1, o) if gcd(k, o) == 1] or [g]
                # <H, x> is conjugate to <H, g> for x in (H g^k)^n, n normalizing H
                same = mult[np.ix_(H, powers)].ravel()
                done[C[np.ix_(normalizer, same)].ravel()] = True

        # deterministic ordering: by order, then smallest member mask
        def rep_mask(entry):
            return min(m for m, _ in entry[1])

        ordered = sorted(found, key=lambda e: (bin(e[1][0][0]).count("1"), rep_mask(e)))
        records = []
        classes = []
        for class_id, (gens, conj) in enumerate(ordered):
            ids = []
            for m, g in sorted(conj):
                rec_gens = [int(x) for x in C[g, gens]] if gens else []
                records.append(SubgroupRecord(len(records), m, bin(m).count("1"), rec_gens, class_id))
                ids.append(len(records) - 1)
            classes.append(ids)
        maximal_ids = []
        full = (1 << N) - 1
        for ids in classes:
            rep = records[ids[0]]
            if rep.mask == full:
                continue
            if not any(r.order > rep.order and r.mask != full and r.mask & rep.mask == rep.mask for r in records):
                for i in ids:
                    records[i].maximal = True
                maximal_ids.extend(ids)
        return SubgroupLattice(records, classes, sorted(maximal_ids))

    return _cached(G, "lattice", compute)


def maximal_subgroups(G, budget=LATTICE_BUDGET):
    """One record per conjugacy class of maximal subgroups, largest order first."""
    lat = all_subgroups(G, budget)
    reps = [lat.class_rep(c) for c in range(len(lat.classes)) if lat.class_rep(c).maximal]
    return sorted(reps, key=lambda r: (-r.order, r.mask))


def maximal_class_members(G, budget=LATTICE_BUDGET):
    """Masks of all conjugates of each maximal class, aligned with :func:`maximal_subgroups`."""
    lat = all_subgroups(G, budget)
    return [[lat.records[i].mask for i in lat.classes[rec.class_id]] for rec in maximal_subgroups(G, budget)]


def frattini(G, budget=LATTICE_BUDGET):
    lat = all_subgroups(G, budget)
    mask = (1 << G.order) - 1
    for i in lat.maximal_ids:
        mask &= lat.records[i].mask
    return mask


def center(G):
    t = G.table
    mult = t.mult
    inside = np.ones(t.size, dtype=bool)
    for s in G.generator_indices():
        inside &= mult[:, s] == mult[s, :]
    return mask_from_bools(inside)


def normal_closure(G, idx):
    t = G.table
    C = conjugation_table(G)
    return mask_from_bools(t.generated(np.unique(C[:, np.asarray(idx)])))


def derived_subgroup(G):
    t = G.table
    mult, inv = t.mult, t.inv
    gens = G.generator_indices()
    comms = [int(mult[mult[inv[a], inv[b]], mult[a, b]]) for a in gens for b in gens]
    return normal_closure(G, comms)


def normal_subgroups(G, budget=LATTICE_BUDGET):
    """Masks of all normal subgroups, ascending by order then mask."""
    lat = all_subgroups(G, budget)
    return [lat.records[ids[0]].mask for ids in lat.classes if len(ids) == 1]


def is_simple(G):
    """Nonabelian simple: nonabelian and every nontrivial class normally generates G."""
    if G.order == 1:
        return False
    full = (1 << G.order) - 1
    if center(G) == full:
        return False
    cls = conjugacy_classes(G)
    return all(normal_closure(G, cls.members[c]) == full for c in range(1, len(cls)))


def extend_map(mult, src, dst, size):
    """Extend generator images to a map on <src>; None if inconsistent or not injective.

    ``mult`` is the multiplication table as nested lists.
    """
    phi = [-1] * size
    used = [False] * size
    phi[0] = 0
    used[0] = True
    queue = [0]
    pairs = list(zip(src, dst))
    for y in queue:
        row_y = mult[y]
        row_py = mult[phi[y]]
        for s, d in pairs:
            z = row_y[s]
            w = row_py[d]
            pz = phi[z]
            if pz < 0:
                if used[w]:
                    return None
                phi[z] = w
                used[w] = True
                queue.append(z)
            elif pz != w:
                return None
    return phi


_FILTER_WORDS = [
    lambda m, inv, a, b: m[a, b],
    lambda m, inv, a, b: m[a, inv[b]],
    lambda m, inv, a, b: m[m[a, a], b],
    lambda m, inv, a, b: m[a, m[b, b]],
    lambda m, inv, a, b: m[m[a, b], m[a, inv[b]]],
    lambda m, inv, a, b: m[m[m[a, b], b], a],
]


def is_automorphism(table, phi):
    phi = np.asarray(phi)
    if sorted(phi.tolist()) != list(range(table.size)):
        return False
    mult = table.mult
    return bool((phi[mult] == mult[phi[:, None], phi[None, :]]).all())


def automorphism_group(T, budget=AUT_BUDGET):
    """All automorphisms of ``T`` by backtracking over generator images.

    Candidate images keep element order and class size; a partial assignment
    survives only if it extends consistently to the subgroup generated so far,
    and complete maps are checked against the full multiplication table.
    """
    if "aut" not in T._cache and T.order > budget:
        raise BudgetExceeded(f"automorphism search on order {T.order} exceeds budget {budget}")

    def compute():
        t = T.table
        N = t.size
        mult = t.mult
        orders = t.orders
        cls = conjugacy_classes(T)
        csize = np.array(cls.sizes)[cls.class_of]
        gens = small_generating_set(t, (1 << N) - 1)
        cands = [np.flatnonzero((orders == orders[g]) & (csize == csize[g])) for g in gens]
        found = []
        mult_rows = mult.tolist()

        def search(imgs):
            j = len(imgs)
            pool = cands[j]
            # short words in an earlier generator and the new one must keep their orders
            for g, x in zip(gens[:j], imgs):
                for word in _FILTER_WORDS:
                    want = orders[word(mult, t.inv, g, gens[j])]
                    pool = pool[orders[word(mult, t.inv, x, pool)] == want]
            for x in pool.tolist():
                nxt = imgs + [x]
                phi = extend_map(mult_rows, gens[: j + 1], nxt, N)
                if phi is None:
                    continue
                if j + 1 < len(gens):
                    search(nxt)
                elif min(phi) >= 0 and is_automorphism(t, phi):
                    found.append(np.array(phi))

        if gens:
            search([])
            maps = np.array(sorted(found, key=lambda p: p.tolist()))
        else:
            maps = np.zeros((1, N), dtype=np.int64)
        C = conjugation_table(T)
        inner = {tuple(r) for r in C.tolist()}
        inner_ids = [a for a, row in enumerate(maps.tolist()) if tuple(row) in inner]
        class_perms = cls.class_of[maps[:, cls.reps]]
        return AutGroup(T, maps, inner_ids, class_perms, list(gens))

    return _cached(T, "aut", compute)


def tuple_orbit_canonical(aut, tup):
    """Lexicographically least image of ``tup`` under the diagonal automorphism action."""
    images = aut.maps[:, list(tup)]
    if images.shape[1] == 0:
        return ()
    best = np.lexsort(images.T[::-1])[0]
    return tuple(int(x) for x in images[best])


def find_automorphism(aut, src, dst):
    """Index of the first automorphism mapping tuple ``src`` onto ``dst`` entrywise, or None."""
    hits = np.flatnonzero((aut.maps[:, list(src)] == np.asarray(dst)).all(axis=1))
    return int(hits[0]) if len(hits) else None


def lattice_to_json(G, descriptor=None, budget=LATTICE_BUDGET):
    t = G.table
    cls = conjugacy_classes(G)
    lat = all_subgroups(G, budget)
    return {
        "schema": LATTICE_SCHEMA,
        "group": descriptor or G.name,
        "degree": G.degree,
        "order": G.order,
        "generators": [format_cycles(g) for g in G.generators],
        "element_order": "image arrays ascending, identity first; products applied left to right",
        "classes": [
            {"rep": format_cycles(t.perm(r)), "rep_index": r, "size": s, "mask": hex(m)}
            for r, s, m in zip(cls.reps, cls.sizes, cls.masks)
        ],
        "subgroups": [
            {
                "mask": hex(r.mask),
                "order": r.order,
                "class": r.class_id,
                "maximal": r.maximal,
                "generators": [format_cycles(t.perm(i)) for i in r.generators],
            }
            for r in lat.records
        ],
    }


def lattice_from_json(G, doc):
    """Install a serialized class table and lattice on ``G``'s caches."""
    if doc.get("schema") != LATTICE_SCHEMA:
        raise ValueError(f"unsupported schema {doc.get('schema')!r}")
    t = G.table
    if doc["order"] != G.order or doc["degree"] != G.degree:
        raise ValueError("lattice document does not match the group")
    N = t.size
    members = [indices_from_mask(int(c["mask"], 16), N) for c in doc["classes"]]
    class_of = np.empty(N, dtype=np.int64)
    for c, m in enumerate(members):
        class_of[m] = c
    G._cache["classes"] = ConjClassTable(
        reps=[c["rep_index"] for c in doc["classes"]],
        masks=[int(c["mask"], 16) for c in doc["classes"]],
        sizes=[c["size"] for c in doc["classes"]],
        class_of=class_of,
        members=members,
    )
    records = []
    classes = {}
    for i, s in enumerate(doc["subgroups"]):
        gens = [t.index(parse_cycles(c, G.degree)) for c in s["generators"]]
        records.append(SubgroupRecord(i, int(s["mask"], 16), s["order"], gens, s["class"], s["maximal"]))
        classes.setdefault(s["class"], []).append(i)
    G._cache["lattice"] = SubgroupLattice(
        records,
        [classes[c] for c in sorted(classes)],
        [r.id for r in records if r.maximal],
    )
    return G._cache["lattice"]
