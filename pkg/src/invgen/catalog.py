"""Named groups and the descriptor grammar used by the CLI.

Grammar::

    S<n> | A<n> | C<n> | D<n> | Q8 | PSL(2,<q>) | <desc>^<m> | perm:<degree>:<gen>;<gen>;...

``D<n>`` is the dihedral group of *order* n (n even, n >= 6), acting on the
n/2 vertices of a polygon.  ``PSL(2,q)`` (q prime, q <= 31) acts on the q+1
points of the projective line, generated by x -> x+1 and x -> -1/x.  ``Q8``
is the regular representation on 8 points.  Explicit generators in ``perm:``
use 1-based cycle notation.
"""

import re
from dataclasses import dataclass
from math import factorial, gcd

from .errors import DescriptorError
from .group import PermGroup, direct_power
from .perm import Permutation, format_cycles, parse_cycles

MAX_PSL_PRIME = 31
GROUP_SCHEMA = "invgen.group/1"


@dataclass(frozen=True)
class GroupDescriptor:
    kind: str
    n: int = 0
    base: "GroupDescriptor" = None
    generators: tuple = ()

    def __str__(self):
        if self.kind == "symmetric":
            return f"S{self.n}"
        if self.kind == "alternating":
            return f"A{self.n}"
        if self.kind == "cyclic":
            return f"C{self.n}"
        if self.kind == "dihedral":
            return f"D{self.n}"
        if self.kind == "quaternion8":
            return "Q8"
        if self.kind == "psl2":
            return f"PSL(2,{self.n})"
        if self.kind == "direct-power":
            return f"{self.base}^{self.n}"
        return f"perm:{self.n}:" + ";".join(self.generators)

    def expected_order(self):
        """Order predicted by the family formula, or None for explicit groups."""
        n = self.n
        if self.kind == "symmetric":
            return factorial(n)
        if self.kind == "alternating":
            return max(1, factorial(n) // 2)
        if self.kind in ("cyclic", "dihedral"):
            return n
        if self.kind == "quaternion8":
            return 8
        if self.kind == "psl2":
            return n * (n * n - 1) // gcd(2, n - 1)
        if self.kind == "direct-power":
            base = self.base.expected_order()
            return None if base is None else base**n
        return None


def _is_prime(q):
    return q >= 2 and all(q % d for d in range(2, int(q**0.5) + 1))


_ATOMS = [
    (re.compile(r"S(\d+)$"), "symmetric"),
    (re.compile(r"A(\d+)$"), "alternating"),
    (re.compile(r"C(\d+)$"), "cyclic"),
    (re.compile(r"D(\d+)$"), "dihedral"),
    (re.compile(r"Q8$"), "quaternion8"),
    (re.compile(r"PSL\(2,(\d+)\)$"), "psl2"),
]


def parse_descriptor(text):
    s = re.sub(r"\s+", "", text)
    if not s:
        raise DescriptorError("empty descriptor", text, 0)
    if s.startswith("perm:"):
        return _parse_explicit(s, text)
    if "^" in s:
        head, _, tail = s.rpartition("^")
        if not tail.isdigit():
            raise DescriptorError("exponent must be a positive integer", text, len(head) + 1)
        m = int(tail)
        if m < 1:
            raise DescriptorError("exponent must be at least 1", text, len(head) + 1)
        return GroupDescriptor("direct-power", m, base=parse_descriptor(head))
    for pattern, kind in _ATOMS:
        match = pattern.match(s)
        if not match:
            continue
        n = int(match.group(1)) if match.groups() else 8
        _check_parameter(kind, n, s, text)
        return GroupDescriptor(kind, n)
    # find how far a known prefix gets us, for the error position
    pos = 0
    for prefix in ("PSL(2,", "S", "A", "C", "D", "Q"):
        if s.startswith(prefix):
            pos = len(prefix)
            while pos < len(s) and s[pos].isdigit():
                pos += 1
            break
    raise DescriptorError("unrecognized descriptor", text, pos)


def _check_parameter(kind, n, s, text):
    pos = len(s) - len(str(n)) - (1 if kind == "psl2" else 0)
    if kind in ("symmetric", "alternating", "cyclic") and n < 1:
        raise DescriptorError("parameter must be at least 1", text, pos)
    if kind == "dihedral" and (n % 2 or n < 6):
        raise DescriptorError("dihedral order must be even and at least 6", text, pos)
    if kind == "psl2" and not (_is_prime(n) and n <= MAX_PSL_PRIME):
        raise DescriptorError(f"PSL(2,q) needs q prime and at most {MAX_PSL_PRIME}", text, pos)


def _parse_explicit(s, text):
    parts = s.split(":", 2)
    if len(parts) != 3 or not parts[1].isdigit():
        raise DescriptorError("expected perm:<degree>:<gens>", text, len("perm:"))
    degree = int(parts[1])
    if degree < 1:
        raise DescriptorError("degree must be positive", text, len("perm:"))
    gens = []
    offset = len("perm:") + len(parts[1]) + 1
    for chunk in parts[2].split(";"):
        try:
            p = parse_cycles(chunk, degree)
        except ValueError as exc:
            raise DescriptorError(f"bad generator ({exc})", text, offset) from None
        gens.append(format_cycles(p))
        offset += len(chunk) + 1
    return GroupDescriptor("explicit", degree, generators=tuple(gens))


def _generators(desc):
    k, n = desc.kind, desc.n
    if k == "symmetric":
        if n <= 2:
            return n, [Permutation.from_cycles(n, [list(range(n))] if n == 2 else [])]
        return n, [Permutation.from_cycles(n, [list(range(n))]), Permutation.from_cycles(n, [[0, 1]])]
    if k == "alternating":
        if n <= 2:
            return n, [Permutation.identity(n)]
        gens = [Permutation.from_cycles(n, [[0, 1, 2]])]
        if n > 3:
            cyc = list(range(n)) if n % 2 else list(range(1, n))
            gens.append(Permutation.from_cycles(n, [cyc]))
        return n, gens
    if k == "cyclic":
        return n, [Permutation.from_cycles(n, [list(range(n))] if n > 1 else [])]
    if k == "dihedral":
        v = n // 2
        rot = Permutation.from_cycles(v, [list(range(v))])
        ref = Permutation([(-x) % v for x in range(v)])
        return v, [rot, ref]
    if k == "quaternion8":
        return 8, _q8_generators()
    if k == "psl2":
        q = n
        inf = q

        def mobius(f):
            return Permutation([f(x) for x in range(q + 1)])

        shift = mobius(lambda x: inf if x == inf else (x + 1) % q)
        invert = mobius(lambda x: 0 if x == inf else inf if x == 0 else (-pow(x, -1, q)) % q)
        return q + 1, [shift, invert]
    if k == "explicit":
        return n, [parse_cycles(g, n) for g in desc.generators]
    raise ValueError(f"cannot build generators for {desc}")


def _q8_generators():
    # points 2u + s encode (+/-) unit u in 1, i, j, k; products of units
    table = {
        (0, 0): (0, 0), (0, 1): (0, 1), (0, 2): (0, 2), (0, 3): (0, 3),
        (1, 0): (0, 1), (1, 1): (1, 0), (1, 2): (0, 3), (1, 3): (1, 2),
        (2, 0): (0, 2), (2, 1): (1, 3), (2, 2): (1, 0), (2, 3): (0, 1),
        (3, 0): (0, 3), (3, 1): (0, 2), (3, 2): (1, 1), (3, 3): (1, 0),
    }

    def right_mult(unit):
        img = []
        for p in range(8):
            u, sign = divmod(p, 2)
            s2, w = table[(u, unit)]
            img.append(2 * w + (sign ^ s2))
        return Permutation(img)

    return [right_mult(1), right_mult(2)]


def resolve(desc):
    if isinstance(desc, str):
        desc = parse_descriptor(desc)
    if desc.kind == "direct-power":
        G = direct_power(resolve(desc.base), desc.n)
        if desc.n == 1:
            G = PermGroup(G.degree, G.generators)
    else:
        degree, gens = _generators(desc)
        G = PermGroup(degree, gens)
    G.name = str(desc)
    expected = desc.expected_order()
    if expected is not None and G.order != expected:
        raise RuntimeError(f"internal error: {desc} has order {G.order}, expected {expected}")
    return G


def group_to_json(G):
    return {
        "schema": GROUP_SCHEMA,
        "name": G.name,
        "degree": G.degree,
        "generators": [format_cycles(g) for g in G.generators],
    }


def group_from_json(doc):
    gens = [parse_cycles(c, doc["degree"]) for c in doc["generators"]]
    return PermGroup(doc["degree"], gens, name=doc.get("name"))


CATALOG = [
    "C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "C12",
    "C2^2", "C2^3", "C3^2", "C4^2",
    "D6", "D8", "D10", "D12", "D16", "D18", "D20", "D24",
    "Q8", "Q8^2", "D8^2",
    "S3", "S4", "S5", "S6", "A4", "A5", "A6",
    "S3^2", "A4^2", "A5^2",
    "PSL(2,5)", "PSL(2,7)", "PSL(2,11)", "PSL(2,13)",
]


def catalog(max_order=None):
    """Catalog descriptors (as strings) with order at most ``max_order``."""
    out = []
    for text in CATALOG:
        order = parse_descriptor(text).expected_order()
        if max_order is None or order <= max_order:
            out.append(text)
    return out
