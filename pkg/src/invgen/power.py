"""Invariable generation of direct powers T^m of a nonabelian simple group.

A set of r elements of T^m is written as an r x m matrix over T (row i is the
i-th element, column j its j-th coordinate).  Conjugating a row in T^m
conjugates each of its entries independently, so for invariable generation a
column only matters through its vector of conjugacy classes.  The rows
invariably generate T^m exactly when every column's entry set invariably
generates T and no two columns have class vectors in one Aut(T)-orbit
(equivalently one Out(T)-orbit, since inner automorphisms fix classes).
"""

from dataclasses import dataclass, field
from itertools import product
from math import floor, log

import numpy as np

from .errors import BudgetExceeded, NotSimple
from .group import PermGroup, direct_power, embed, join_blocks
from .invariable import (
    certificate_to_json,
    compute_dI,
    find_conjugator,
    invariably_generates,
    sample_refute,
    verify_certificate_json,
)
from .perm import Permutation, format_cycles, parse_cycles
from .structure import (
    automorphism_group,
    conjugacy_classes,
    extend_map,
    is_automorphism,
    is_simple,
    maximal_subgroups,
)

TUPLE_BUDGET = 10_000_000
POWER_SCHEMA = "invgen.power-certificate/1"
REPORT_SCHEMA = "invgen.mtr-report/1"


@dataclass
class GenMatrix:
    """r x m matrix of element indices of ``base``; entry (i, j) is coordinate j of row i."""

    base: PermGroup = field(repr=False)
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.int64)
        if self.entries.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
        N = self.base.table.size
        if self.entries.size and (self.entries.min() < 0 or self.entries.max() >= N):
            raise ValueError("entry outside the element table")
        if not is_simple(self.base):
            raise NotSimple(f"{self.base.name or 'base group'} is not nonabelian simple")

    @property
    def r(self):
        return self.entries.shape[0]

    @property
    def m(self):
        return self.entries.shape[1]

    def column(self, j):
        return [int(x) for x in self.entries[:, j]]

    def rows_as_elements(self):
        """Rows as permutations of the direct power acting on m blocks."""
        t = self.base.table
        return [join_blocks([t.perm(x) for x in row]) for row in self.entries.tolist()]

    def to_cycles(self):
        t = self.base.table
        return [[format_cycles(t.perm(x)) for x in row] for row in self.entries.tolist()]

    @classmethod
    def from_cycles(cls, base, rows):
        t = base.table
        return cls(base, [[t.index(parse_cycles(c, base.degree)) for c in row] for row in rows])

    @classmethod
    def from_text(cls, base, text):
        """One row per line, entries in cycle notation separated by semicolons."""
        rows = [line.split(";") for line in text.splitlines() if line.strip() and not line.startswith("#")]
        if len({len(r) for r in rows}) > 1:
            raise ValueError("rows have different lengths")
        return cls.from_cycles(base, rows)


@dataclass
class PowerCertificate:
    verdict: bool
    matrix: GenMatrix
    failed: str = None  # "a", "b" or None
    column: int = None
    column_certificate: object = None
    column_pair: tuple = None
    automorphism: int = None  # index into the Aut(T) maps
    row_conjugators: list = field(default_factory=list)  # h_i with t_ik^h_i = phi(t_ij)
    column_certificates: list = field(default_factory=list)
    canonical_forms: list = field(default_factory=list)

    def check(self):
        A = self.matrix
        aut = automorphism_group(A.base)
        if self.failed == "a":
            cert = self.column_certificate
            return (not cert.verdict) and cert.elements == A.column(self.column) and cert.check()
        t = A.base.table
        if self.failed == "b":
            j, k = self.column_pair
            phi = aut.maps[self.automorphism]
            if not is_automorphism(t, phi) or len(self.row_conjugators) != A.r:
                return False
            return all(int(t.conjugate(y, h)) == int(phi[x])
                       for x, y, h in zip(A.column(j), A.column(k), self.row_conjugators))
        if not self.verdict or len(self.column_certificates) != A.m:
            return False
        if not all(c.verdict and c.check() for c in self.column_certificates):
            return False
        forms = [class_vector_form(aut, A.column(j)) for j in range(A.m)]
        return forms == self.canonical_forms and len(set(forms)) == len(forms)


def class_vector_form(aut, column):
    """Least image of the column's class vector under the automorphisms' class permutations."""
    cls = conjugacy_classes(aut.base)
    vec = cls.class_of[list(column)]
    if len(vec) == 0:
        return ()
    images = np.unique(aut.class_perms, axis=0)[:, vec]
    best = np.lexsort(images.T[::-1])[0]
    return tuple(int(c) for c in images[best])


def _matching_automorphism(aut, src, dst):
    """First automorphism carrying the class vector of ``src`` onto that of ``dst``."""
    cls = conjugacy_classes(aut.base)
    a_vec, b_vec = cls.class_of[list(src)], cls.class_of[list(dst)]
    hits = np.flatnonzero((aut.class_perms[:, a_vec] == b_vec).all(axis=1))
    return int(hits[0]) if len(hits) else None


def lemma42_check(A):
    """Decide whether the rows of ``A`` invariably generate T^m."""
    T = A.base
    aut = automorphism_group(T)
    certs = []
    for j in range(A.m):
        cert = invariably_generates(T, A.column(j))
        if not cert.verdict:
            return PowerCertificate(False, A, failed="a", column=j, column_certificate=cert)
        certs.append(cert)
    forms = [class_vector_form(aut, A.column(j)) for j in range(A.m)]
    first = {}
    for k, f in enumerate(forms):
        if f in first:
            j = first[f]
            a = _matching_automorphism(aut, A.column(j), A.column(k))
            phi = aut.maps[a]
            conj = [find_conjugator(T, y, 1 << int(phi[x])) for x, y in zip(A.column(j), A.column(k))]
            return PowerCertificate(False, A, failed="b", column_pair=(j, k), automorphism=a, row_conjugators=conj)
        first[f] = k
    return PowerCertificate(True, A, column_certificates=certs, canonical_forms=forms)


def _automorphism_on_generators(aut, a):
    """Images of the base group's generators under automorphism ``a``."""
    T = aut.base
    t = T.table
    phi = aut.maps[a]
    return [t.perm(int(phi[t.index(g)])) for g in T.generators]


def witness_subgroup(cert):
    """Proper subgroup of T^m absorbing a conjugate of every row of a no-instance.

    Returns (subgroup, conjugators) where conjugators[i] conjugates row i into it.
    For a failed column j the subgroup replaces factor j by the refuting maximal
    subgroup; for columns j, k with phi-related class vectors it is the twisted
    diagonal {x : x_k = phi(x_j)}, and row i is moved into it by conjugating
    its k-th coordinate.
    """
    A = cert.matrix
    T = A.base
    t = T.table
    m, n = A.m, T.degree
    ident = Permutation.identity(n * m)
    if cert.failed == "a":
        j = cert.column
        M = cert.column_certificate.refuting
        gens = [embed(g, k, m) for k in range(m) if k != j for g in T.generators]
        gens += [embed(t.perm(x), j, m) for x in M.generators]
        conj = [embed(t.perm(g), j, m) for g in cert.column_certificate.conjugators]
        return PermGroup(n * m, gens or [ident]), conj
    if cert.failed == "b":
        j, k = cert.column_pair
        aut = automorphism_group(T)
        images = _automorphism_on_generators(aut, cert.automorphism)
        gens = [embed(g, j, m) * embed(h, k, m) for g, h in zip(T.generators, images)]
        gens += [embed(g, b, m) for b in range(m) if b not in (j, k) for g in T.generators]
        return PermGroup(n * m, gens), [embed(t.perm(h), k, m) for h in cert.row_conjugators]
    raise ValueError("certificate is not a refutation")


def direct_power_cross_check(A, trials=1000, seed=0):
    """Check a power-criterion verdict directly inside T^m built as a permutation group."""
    cert = lemma42_check(A)
    P = direct_power(A.base, A.m)
    rows = A.rows_as_elements()
    report = {"verdict": "yes" if cert.verdict else "no", "m": A.m, "r": A.r, "trials": trials, "seed": seed}
    if cert.verdict:
        counter = sample_refute(P, rows, trials, seed)
        report["counterexample"] = None if counter is None else [format_cycles(g) for g in counter]
        report["ok"] = counter is None
        return report
    W, conj = witness_subgroup(cert)
    absorbed = [W.contains(row ^ c) for row, c in zip(rows, conj)]
    report.update(
        failed=cert.failed,
        witness_order=W.order,
        witness_proper=W.order < P.order,
        witness_in_power=all(P.contains(g) for g in W.generators),
        rows_absorbed=absorbed,
        ok=all(absorbed) and W.order < P.order and all(P.contains(g) for g in W.generators),
    )
    return report


@dataclass
class MTRReport:
    group: str
    r: int
    m_exact: int
    k: int
    out: int
    lower: float
    upper: int
    class_tuple_count: int
    surviving_tuples: int
    element_tuple_orbits: int
    orbit_sizes_divide_aut: bool
    columns: list = field(repr=False)  # one column per orbit, as class representatives
    base: PermGroup = field(repr=False, default=None)
    extra: dict = field(default_factory=dict)

    @property
    def sandwich_holds(self):
        return self.lower < self.m_exact <= self.upper

    def witness_matrix(self):
        if not self.columns:
            return None
        return GenMatrix(self.base, np.array(self.columns).T)

    def to_json(self):
        W = self.witness_matrix()
        doc = {
            "schema": REPORT_SCHEMA,
            "group": self.group,
            "r": self.r,
            "m_exact": self.m_exact,
            "k": self.k,
            "out": self.out,
            "lower": self.lower,
            "upper": self.upper,
            "sandwich_holds": self.sandwich_holds if self.r >= 2 else None,
            "class_tuple_count": self.class_tuple_count,
            "surviving_tuples": self.surviving_tuples,
            "element_tuple_orbits": self.element_tuple_orbits,
            "orbit_sizes_divide_aut": self.orbit_sizes_divide_aut,
            "witness_matrix": W.to_cycles() if W is not None else [],
        }
        doc.update(self.extra)
        return doc


def _avoid_masks(T):
    cls = conjugacy_classes(T)
    maxes = maximal_subgroups(T)
    avoid = [sum(1 << j for j, M in enumerate(maxes) if not cm & M.mask) for cm in cls.masks]
    return avoid, (1 << len(maxes)) - 1


def m_exact(T, r, budget=TUPLE_BUDGET):
    """Largest m with d_I(T^m) <= r.

    Columns of a generating matrix are only defined up to entrywise
    conjugation, so m(T, r) is the number of Out(T)-orbits of class vectors of
    length r whose classes invariably generate T.  The surviving element
    tuples are also expanded and their Aut(T)-orbits counted; that count is
    reported as ``element_tuple_orbits`` and is not m(T, r).
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    t = T.table
    N = t.size
    if N**r > budget:
        raise BudgetExceeded(f"{N}^{r} tuples exceed budget {budget}")
    if not is_simple(T):
        raise NotSimple(f"{T.name or 'group'} is not nonabelian simple")
    cls = conjugacy_classes(T)
    aut = automorphism_group(T)
    avoid, full = _avoid_masks(T)
    k = len(cls)
    vectors = []
    for vec in product(range(k), repeat=r):
        acc = 0
        for c in vec:
            acc |= avoid[c]
        if acc == full:
            vectors.append(vec)
    radix = [N ** (r - 1 - i) for i in range(r)]
    chunks = []
    for vec in vectors:
        grids = np.meshgrid(*[cls.members[c] for c in vec], indexing="ij")
        chunks.append(sum(g.ravel().astype(np.int64) * w for g, w in zip(grids, radix)))
    codes = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)
    digits = [(codes // w) % N for w in radix]
    canon = codes.copy()
    for phi in aut.maps:
        image = sum(phi[d] * w for d, w in zip(digits, radix))
        np.minimum(canon, image, out=canon)
    forms, sizes = np.unique(canon, return_counts=True)

    # Inn(T) fixes every class, so Aut(T) acts on class ids through Out(T)
    class_perms = np.unique(aut.class_perms, axis=0)
    class_forms = sorted({min(tuple(int(p[c]) for c in vec) for p in class_perms) for vec in vectors})
    columns = [tuple(cls.reps[c] for c in vec) for vec in class_forms]

    out = aut.out_order
    return MTRReport(
        group=T.name,
        r=r,
        m_exact=len(class_forms),
        k=k,
        out=out,
        lower=k ** (r - 2) / out - 1,
        upper=k**r,
        class_tuple_count=len(class_forms),
        surviving_tuples=int(len(codes)),
        element_tuple_orbits=len(forms),
        orbit_sizes_divide_aut=bool((aut.order % sizes == 0).all()),
        columns=columns,
        base=T,
    )


def three_row_matrix(T, m):
    """Three-row matrix for T^m built from an invariably generating pair.

    Rows one and two repeat a and b; row three takes representatives of
    classes C with (A, B, C) in distinct Out(T)-orbits of class triples.
    Returns None if fewer than m such classes exist.
    """
    d = compute_dI(T)
    if d.value != 2:
        raise ValueError(f"expected d_I = 2, got {d.value}")
    cls = conjugacy_classes(T)
    aut = automorphism_group(T)
    a_cls, b_cls = d.witness
    class_perms = np.unique(aut.class_perms, axis=0)
    seen = set()
    picks = []
    for c in range(len(cls)):
        form = min((int(p[a_cls]), int(p[b_cls]), int(p[c])) for p in class_perms)
        if form not in seen:
            seen.add(form)
            picks.append(cls.reps[c])
    if len(picks) < m:
        return None
    a, b = cls.reps[a_cls], cls.reps[b_cls]
    return GenMatrix(T, [[a] * m, [b] * m, picks[:m]])


def bounds_report(T, r, budget=TUPLE_BUDGET, cross_check_trials=0, seed=0):
    """Exact m(T, r) with the sandwich bounds and the constructive three-row bound."""
    rep = m_exact(T, r, budget)
    limit = rep.k / rep.out
    constructions = []
    for m in range(1, floor(limit) + 1):
        A = three_row_matrix(T, m)
        entry = {"m": m, "matrix": A.to_cycles() if A is not None else None}
        if A is not None:
            cert = lemma42_check(A)
            entry["verdict"] = "yes" if cert.verdict else "no"
            entry["certificate_ok"] = cert.check()
            if cross_check_trials and m > 1:
                entry["cross_check"] = direct_power_cross_check(A, cross_check_trials, seed)
        constructions.append(entry)
    extra = {
        "k_over_out": limit,
        "out_le_log_order": rep.out <= log(T.order),
        "log_order": log(T.order),
        "three_row_constructions": constructions,
        "three_row_bound_holds": all(e.get("verdict") == "yes" for e in constructions),
    }
    if T.name and T.name.startswith("PSL(2,"):
        q = int(T.name[len("PSL(2,"):-1])
        extra["psl2_q"] = q
        extra["k2_over_out_over_q"] = rep.k**2 / rep.out / q
    rep.extra = extra
    return rep


def power_certificate_to_json(cert, descriptor=None):
    A = cert.matrix
    T = A.base
    doc = {
        "schema": POWER_SCHEMA,
        "group": descriptor or T.name,
        "degree": T.degree,
        "generators": [format_cycles(g) for g in T.generators],
        "matrix": A.to_cycles(),
        "verdict": "yes" if cert.verdict else "no",
    }
    if cert.failed == "a":
        doc["failed"] = "a"
        doc["column"] = cert.column
        doc["column_certificate"] = certificate_to_json(cert.column_certificate, descriptor)
    elif cert.failed == "b":
        aut = automorphism_group(T)
        doc["failed"] = "b"
        doc["columns"] = list(cert.column_pair)
        doc["automorphism"] = [format_cycles(p) for p in _automorphism_on_generators(aut, cert.automorphism)]
        doc["row_conjugators"] = [format_cycles(T.table.perm(h)) for h in cert.row_conjugators]
    else:
        doc["column_certificates"] = [certificate_to_json(c, descriptor) for c in cert.column_certificates]
    return doc


def verify_power_certificate_json(doc):
    """Re-check a serialized power certificate; returns a list of problems.

    Uses the automorphism group of T but never a subgroup lattice.
    """
    if doc.get("schema") != POWER_SCHEMA:
        return [f"unsupported schema {doc.get('schema')!r}"]
    n = doc["degree"]
    T = PermGroup(n, [parse_cycles(c, n) for c in doc["generators"]])
    t = T.table
    try:
        A = [[t.index(parse_cycles(c, n)) for c in row] for row in doc["matrix"]]
    except (KeyError, ValueError) as exc:
        return [f"matrix entry outside the group: {exc}"]
    cols = [list(c) for c in zip(*A)]
    problems = []
    if doc["verdict"] == "no" and doc.get("failed") == "a":
        sub = doc["column_certificate"]
        if sub.get("verdict") != "no":
            problems.append("column certificate is not a refutation")
        col = cols[doc["column"]]
        if [t.index(parse_cycles(c, n)) for c in sub["elements"]] != col:
            problems.append("column certificate does not match the column")
        problems += verify_certificate_json(sub)
    elif doc["verdict"] == "no" and doc.get("failed") == "b":
        j, k = doc["columns"]
        images = [t.index(parse_cycles(c, n)) for c in doc["automorphism"]]
        gens = [t.index(g) for g in T.generators]
        phi = extend_map(t.mult.tolist(), gens, images, t.size)
        if phi is None or min(phi) < 0 or not is_automorphism(t, phi):
            problems.append("generator images do not define an automorphism")
        else:
            conj = [t.index(parse_cycles(c, n)) for c in doc.get("row_conjugators", [])]
            if len(conj) != len(A):
                problems.append("one conjugator per row is required")
            for x, y, h in zip(cols[j], cols[k], conj):
                if int(t.conjugate(y, h)) != phi[x]:
                    problems.append("a conjugated entry of one column is not the image of the other")
                    break
    elif doc["verdict"] == "yes":
        subs = doc.get("column_certificates", [])
        if len(subs) != len(cols):
            problems.append("one certificate per column is required")
        for col, sub in zip(cols, subs):
            if sub.get("verdict") != "yes":
                problems.append("column certificate is not a proof")
            if [t.index(parse_cycles(c, n)) for c in sub["elements"]] != col:
                problems.append("column certificate does not match the column")
            problems += verify_certificate_json(sub)
        aut = automorphism_group(T)
        forms = [class_vector_form(aut, c) for c in cols]
        if len(set(forms)) != len(forms):
            problems.append("two columns have class vectors in one automorphism orbit")
    else:
        problems.append("unrecognized verdict or failure mode")
    return problems
