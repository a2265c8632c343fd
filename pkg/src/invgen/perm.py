"""Permutations of {0..n-1} stored as image tuples.

Products are applied left to right: ``(p * q)(x) == q(p(x))``.  Conjugation
follows the same rule, ``p ^ g == ~g * p * g``.  Cycle notation at the I/O
boundary is 1-based, e.g. ``"(1,2,3)(4,5)"``; the identity prints as ``"()"``.
"""

import re
from math import lcm


class Permutation:
    __slots__ = ("images", "_hash")

    def __init__(self, images):
        images = tuple(int(x) for x in images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation: {images!r}")
        if not images:
            raise ValueError("degree must be positive")
        self.images = images
        self._hash = hash(images)

    @classmethod
    def identity(cls, degree):
        return cls(range(degree))

    @classmethod
    def from_cycles(cls, degree, cycles):
        """Build from zero-based cycles, e.g. ``from_cycles(5, [(0, 1, 2)])``."""
        img = list(range(degree))
        seen = set()
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                if a in seen or not 0 <= a < degree:
                    raise ValueError(f"bad cycle {cyc!r} for degree {degree}")
                seen.add(a)
                img[a] = b
        return cls(img)

    @property
    def degree(self):
        return len(self.images)

    def __call__(self, x):
        return self.images[x]

    def __mul__(self, other):
        return compose(self, other)

    def __invert__(self):
        inv = [0] * len(self.images)
        for i, x in enumerate(self.images):
            inv[x] = i
        return Permutation(inv)

    def __pow__(self, k):
        result = Permutation.identity(self.degree)
        base = self if k >= 0 else ~self
        k = abs(k)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __xor__(self, g):
        return ~g * self * g

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __lt__(self, other):
        return self.images < other.images

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Permutation({format_cycles(self)!r}, degree={self.degree})"

    def is_identity(self):
        return all(i == x for i, x in enumerate(self.images))

    def cycles(self):
        """Nontrivial cycles, zero-based, each starting at its smallest point."""
        seen = set()
        out = []
        for i in range(len(self.images)):
            if i in seen or self.images[i] == i:
                continue
            cyc = [i]
            seen.add(i)
            j = self.images[i]
            while j != i:
                seen.add(j)
                cyc.append(j)
                j = self.images[j]
            out.append(tuple(cyc))
        return out

    def order(self):
        return lcm(*(len(c) for c in self.cycles())) if not self.is_identity() else 1

    def fixed_points(self):
        return [i for i, x in enumerate(self.images) if i == x]

    def sign(self):
        return -1 if sum(len(c) - 1 for c in self.cycles()) % 2 else 1


def compose(p, q):
    """Return the permutation x -> q(p(x))."""
    if p.degree != q.degree:
        raise ValueError(f"degree mismatch: {p.degree} vs {q.degree}")
    qi = q.images
    return Permutation(tuple(qi[x] for x in p.images))


def format_cycles(p):
    cycles = p.cycles()
    if not cycles:
        return "()"
    return "".join("(" + ",".join(str(x + 1) for x in c) + ")" for c in cycles)


_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text, degree=None):
    """Parse 1-based cycle notation; whitespace is ignored.

    Without ``degree`` the degree is the largest point mentioned.  Cycles are
    multiplied left to right, so non-disjoint input is accepted.
    """
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ValueError("empty permutation text")
    pos = 0
    cycles = []
    while pos < len(s):
        m = _CYCLE.match(s, pos)
        if not m:
            raise ValueError(f"cannot parse permutation {text!r} at position {pos}")
        body = m.group(1)
        if body:
            try:
                pts = [int(x) - 1 for x in body.split(",")]
            except ValueError:
                raise ValueError(f"bad cycle {m.group(0)!r} in {text!r}") from None
            if min(pts) < 0 or len(set(pts)) != len(pts):
                raise ValueError(f"bad cycle {m.group(0)!r} in {text!r}")
            cycles.append(pts)
        pos = m.end()
    top = max((max(c) for c in cycles), default=0) + 1
    if degree is None:
        degree = top
    elif top > degree:
        raise ValueError(f"point {top} exceeds degree {degree} in {text!r}")
    result = Permutation.identity(degree)
    for c in cycles:
        result = result * Permutation.from_cycles(degree, [c])
    return result
