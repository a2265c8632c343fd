"""Brute-force reference computations on tuples, independent of the package internals."""

from itertools import product


def mul(p, q):
    # apply p, then q
    return tuple(q[x] for x in p)


def inv(p):
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def conj(x, g):
    return mul(mul(inv(g), x), g)


def closure(gens, degree):
    e = tuple(range(degree))
    seen = {e}
    frontier = [e]
    gens = [tuple(g) for g in gens]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def classes(elements):
    left = set(elements)
    out = []
    while left:
        x = min(left)
        cl = frozenset(conj(x, g) for g in elements)
        out.append(cl)
        left -= cl
    return out


def subgroups(elements, degree):
    """All subgroups, by repeatedly adjoining one element to known subgroups."""
    e = tuple(range(degree))
    found = {frozenset([e])}
    frontier = list(found)
    while frontier:
        nxt = []
        for H in frontier:
            for g in elements:
                if g in H:
                    continue
                K = closure(list(H) + [g], degree)
                if K not in found:
                    found.add(K)
                    nxt.append(K)
        frontier = nxt
    return found


def maximal(subs, order):
    proper = [H for H in subs if len(H) < order]
    return [H for H in proper if not any(H < K for K in proper)]


def invariably_generates(elements, degree, S):
    """Definition: every choice of conjugates generates."""
    order = len(elements)
    choices = [sorted({conj(s, g) for g in elements}) for s in S]
    for pick in product(*choices):
        if len(closure(pick, degree)) != order:
            return False
    return True
