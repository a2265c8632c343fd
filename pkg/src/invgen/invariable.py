"""Deciding invariable generation and computing d_I(G) exactly.

For a finite group, a subset S invariably generates G exactly when every
maximal subgroup class has some element of S whose conjugacy class misses it.
The verdict depends only on the conjugacy classes of S, so the search for
d_I(G) runs over class subsets.
"""

import random
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from math import floor, log2

import numpy as np

from .group import (
    PermGroup,
    StabChain,
    bools_from_mask,
    quotient,
    subgroup,
)
from .perm import Permutation, format_cycles, parse_cycles
from .structure import (
    LATTICE_BUDGET,
    conjugacy_classes,
    conjugation_maps,
    frattini,
    maximal_class_members,
    maximal_subgroups,
)

CERT_SCHEMA = "invgen.certificate/1"


@dataclass
class InvGenCertificate:
    """Proof or refutation that ``elements`` invariably generate ``group``.

    On yes, ``witnesses[i]`` is the position in ``elements`` of an element
    whose class avoids ``maximals[i]``.  On no, ``refuting`` is a maximal
    subgroup and ``conjugators[i]`` conjugates ``elements[i]`` into it.
    Elements and conjugators are element indices of the group's table.
    """

    verdict: bool
    group: PermGroup = field(repr=False)
    elements: list
    maximals: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    refuting: object = None
    conjugators: list = field(default_factory=list)

    def check(self):
        """Re-check against the group's class masks and element table."""
        G = self.group
        t = G.table
        cls = conjugacy_classes(G)
        if self.verdict:
            if len(self.witnesses) != len(self.maximals):
                return False
            for M, w in zip(self.maximals, self.witnesses):
                c = cls.class_of[self.elements[w]]
                if cls.masks[c] & M.mask:
                    return False
            return True
        M = self.refuting
        if M is None or M.order >= G.order or len(self.conjugators) != len(self.elements):
            return False
        inside = bools_from_mask(M.mask, t.size)
        return all(inside[t.conjugate(s, g)] for s, g in zip(self.elements, self.conjugators))


@dataclass
class DIResult:
    value: int
    witness: list  # class ids
    incidence: np.ndarray  # incidence[c, j]: class c meets maximal class j
    group: PermGroup = field(repr=False, default=None)

    def witness_elements(self):
        cls = conjugacy_classes(self.group)
        return [cls.reps[c] for c in self.witness]


def _as_indices(G, S):
    t = G.table
    out = []
    for s in S:
        if isinstance(s, Permutation):
            if not G.contains(s):
                raise ValueError(f"{format_cycles(s)} is not in the group")
            out.append(t.index(s))
        else:
            out.append(int(s))
    return out


def class_meets_subgroup(G, class_id, H_mask):
    """Whether the conjugacy class meets H, equivalently the union of H's conjugates."""
    return bool(conjugacy_classes(G).masks[class_id] & H_mask)


def incidence_matrix(G, budget=LATTICE_BUDGET):
    cls = conjugacy_classes(G)
    maxes = maximal_subgroups(G, budget)
    inc = np.zeros((len(cls), len(maxes)), dtype=bool)
    for j, M in enumerate(maxes):
        for c, cm in enumerate(cls.masks):
            inc[c, j] = bool(cm & M.mask)
    return inc


def find_conjugator(G, s, target_mask):
    """Breadth-first search over conjugation by generators for g with s^g in the mask.

    Returns the element index of g, or None when the class of s misses the mask.
    """
    t = G.table
    inside = bools_from_mask(target_mask, t.size)
    maps = conjugation_maps(G)
    gens = G.generator_indices()
    parent = {s: None}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        if inside[x]:
            path = []
            while parent[x] is not None:
                x, k = parent[x]
                path.append(gens[k])
            g = 0
            for k in reversed(path):
                g = int(t.mult[g, k])
            return g
        for k, m in enumerate(maps):
            y = int(m[x])
            if y not in parent:
                parent[y] = (x, k)
                queue.append(y)
    return None


def invariably_generates(G, S, budget=LATTICE_BUDGET):
    """Decide whether S invariably generates G; returns an :class:`InvGenCertificate`."""
    elems = _as_indices(G, S)
    cls = conjugacy_classes(G)
    maxes = maximal_subgroups(G, budget)
    witnesses = []
    for M in maxes:
        w = next((i for i, s in enumerate(elems) if not cls.masks[cls.class_of[s]] & M.mask), None)
        if w is None:
            conj = [find_conjugator(G, s, M.mask) for s in elems]
            return InvGenCertificate(False, G, elems, maxes, [], refuting=M, conjugators=conj)
        witnesses.append(w)
    return InvGenCertificate(True, G, elems, maxes, witnesses)


def fixed_point_free_exists(action, S):
    """Whether some element of S acts without fixed points on the action's points."""
    if not action.target.is_transitive():
        raise ValueError("action is not transitive")
    G = action.source
    rows = action.element_images[_as_indices(G, S)]
    return bool((rows != np.arange(action.target.degree)).all(axis=1).any())


def _min_cover(avoid, full):
    """Lexicographically first minimum set of ids whose masks OR to ``full``."""
    if full == 0:
        return []
    seen = set()
    cands = []
    for c, m in enumerate(avoid):
        if m and m not in seen:
            seen.add(m)
            cands.append(c)
    union = 0
    for c in cands:
        union |= avoid[c]
    if union != full:
        return None
    for r in range(1, len(cands) + 1):
        for combo in combinations(cands, r):
            acc = 0
            for c in combo:
                acc |= avoid[c]
            if acc == full:
                return list(combo)
    return None


def compute_dI(G, budget=LATTICE_BUDGET):
    """Exact d_I(G) with a minimal witness set of conjugacy classes."""
    if ("dI", budget) in G._cache:
        return G._cache[("dI", budget)]
    inc = incidence_matrix(G, budget)
    k, nmax = inc.shape
    full = (1 << nmax) - 1
    avoid = [sum(1 << j for j in range(nmax) if not inc[c, j]) for c in range(k)]
    witness = _min_cover(avoid, full)
    if witness is None:
        raise RuntimeError("no class set invariably generates; the lattice is inconsistent")
    result = DIResult(len(witness), witness, inc, G)
    G._cache[("dI", budget)] = result
    return result


def generator_rank(G, budget=LATTICE_BUDGET):
    """Minimal size of a generating set, by search over maximal-subgroup containment."""
    if G.order == 1:
        return 0
    t = G.table
    all_max = [m for members in maximal_class_members(G, budget) for m in members]
    cls = conjugacy_classes(G)
    contains = [bools_from_mask(m, t.size) for m in all_max]

    def feasible(alive, left, first):
        # alive: maximal subgroups containing every element chosen so far
        if not alive:
            return True
        if left == 0:
            return False
        pool = cls.reps if first else range(t.size)
        options = {}
        for x in pool:
            key = frozenset(i for i in alive if contains[i][x])
            options.setdefault(key, x)
        return any(feasible(key, left - 1, False) for key in sorted(options, key=len))

    r = 1
    while not feasible(frozenset(range(len(all_max))), r, True):
        r += 1
    return r


def log2_bound(G):
    return floor(log2(G.order)) if G.order > 1 else 0


def check_frattini_invariance(G, budget=LATTICE_BUDGET):
    phi = frattini(G, budget)
    phi_order = bin(phi).count("1")
    d = compute_dI(G, budget)
    Q = quotient(G, phi) if phi_order > 1 else G
    dq = compute_dI(Q, budget)
    return {
        "group": G.name,
        "order": G.order,
        "frattini_order": phi_order,
        "quotient_order": Q.order,
        "dI": d.value,
        "dI_quotient": dq.value,
        "witness": d.witness,
        "witness_quotient": dq.witness,
        "holds": d.value == dq.value,
    }


def check_subadditivity(G, N_mask, budget=LATTICE_BUDGET):
    N = subgroup(G, N_mask)
    Q = quotient(G, N_mask)
    d, dn, dq = (compute_dI(X, budget).value for X in (G, N, Q))
    return {
        "group": G.name,
        "normal_order": N.order,
        "dI": d,
        "dI_normal": dn,
        "dI_quotient": dq,
        "holds": d <= dn + dq,
    }


def sample_refute(G, S, trials, seed):
    """Search for conjugators (g(s)) with <s^g(s)> != G by seeded uniform sampling.

    Returns the first failing conjugator list (as permutations) or None.
    With an element table the draws are uniform element indices; otherwise
    uniform elements from the stabilizer chain.
    """
    rng = random.Random(seed)
    perms = [s if isinstance(s, Permutation) else G.table.perm(s) for s in S]
    if G.has_table() and G.order <= 5000:
        t = G.table
        elems = _as_indices(G, perms)
        for _ in range(trials):
            conj = [rng.randrange(t.size) for _ in elems]
            images = [int(t.conjugate(s, g)) for s, g in zip(elems, conj)]
            if not t.generated(images).all():
                return [t.perm(g) for g in conj]
        return None
    for _ in range(trials):
        conj = [G.random_element(rng) for _ in perms]
        images = [(s ^ g).images for s, g in zip(perms, conj)] or [tuple(range(G.degree))]
        if StabChain(G.degree, images).order() != G.order:
            return conj
    return None


def certificate_to_json(cert, descriptor=None):
    G = cert.group
    t = G.table

    def cyc(i):
        return format_cycles(t.perm(i))

    def sub(M):
        return {"order": M.order, "generators": [cyc(i) for i in M.generators]}

    doc = {
        "schema": CERT_SCHEMA,
        "group": descriptor or G.name,
        "degree": G.degree,
        "generators": [format_cycles(g) for g in G.generators],
        "elements": [cyc(s) for s in cert.elements],
        "verdict": "yes" if cert.verdict else "no",
    }
    if cert.verdict:
        doc["maximals"] = [sub(M) for M in cert.maximals]
        doc["witnesses"] = list(cert.witnesses)
    else:
        doc["refuting_maximal"] = sub(cert.refuting)
        doc["conjugators"] = [cyc(g) for g in cert.conjugators]
    return doc


def _class_of_perm(G, s):
    seen = {s}
    queue = [s]
    for x in queue:
        for g in G.generators:
            y = x ^ g
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return queue


def verify_certificate_json(doc):
    """Re-check a serialized certificate without computing any subgroup lattice.

    Returns a list of problems; empty means the certificate verifies.  A yes
    certificate is checked against the maximal subgroups it lists (each must
    be a proper subgroup avoided by the cited element's whole class); a no
    certificate is a complete definitional refutation.
    """
    problems = []
    if doc.get("schema") != CERT_SCHEMA:
        return [f"unsupported schema {doc.get('schema')!r}"]
    n = doc["degree"]
    try:
        G = PermGroup(n, [parse_cycles(c, n) for c in doc["generators"]])
        S = [parse_cycles(c, n) for c in doc["elements"]]
    except (ValueError, KeyError) as exc:
        return [f"malformed certificate: {exc}"]
    for s in S:
        if not G.contains(s):
            problems.append(f"element {format_cycles(s)} is not in the group")

    def build(sub):
        gens = [parse_cycles(c, n) for c in sub["generators"]] or [Permutation.identity(n)]
        M = PermGroup(n, gens)
        if any(not G.contains(g) for g in gens):
            problems.append("subgroup generator outside the group")
        if M.order >= G.order:
            problems.append(f"subgroup of order {M.order} is not proper")
        if M.order != sub["order"]:
            problems.append(f"subgroup order {M.order} differs from stated {sub['order']}")
        return M

    if doc["verdict"] == "yes":
        maxes = doc.get("maximals", [])
        wits = doc.get("witnesses", [])
        if len(maxes) != len(wits):
            problems.append("one witness per maximal subgroup is required")
        for sub, w in zip(maxes, wits):
            M = build(sub)
            if not 0 <= w < len(S):
                problems.append(f"witness index {w} out of range")
                continue
            if any(M.contains(x) for x in _class_of_perm(G, S[w])):
                problems.append(f"class of {format_cycles(S[w])} meets a maximal subgroup of order {M.order}")
    elif doc["verdict"] == "no":
        M = build(doc["refuting_maximal"])
        conj = [parse_cycles(c, n) for c in doc.get("conjugators", [])]
        if len(conj) != len(S):
            problems.append("one conjugator per element is required")
        for s, g in zip(S, conj):
            if not G.contains(g):
                problems.append(f"conjugator {format_cycles(g)} is not in the group")
            elif not M.contains(s ^ g):
                problems.append(f"{format_cycles(s)} conjugated by {format_cycles(g)} leaves the subgroup")
    else:
        problems.append(f"unknown verdict {doc['verdict']!r}")
    return problems
