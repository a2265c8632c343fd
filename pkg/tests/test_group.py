import random

import numpy as np
import pytest

from invgen.catalog import catalog
from invgen.errors import CapExceeded, NotNormal, NotSubgroup
from invgen.group import (
    PermGroup,
    bools_from_mask,
    coset_action,
    direct_power,
    embed,
    indices_from_mask,
    is_normal,
    join_blocks,
    mask_from_indices,
    project,
    quotient,
    small_generating_set,
    subgroup,
)
from invgen.perm import Permutation, parse_cycles
from invgen.structure import center, maximal_subgroups

import oracles


def _closure(G):
    return oracles.closure([g.images for g in G.generators], G.degree)


@pytest.mark.parametrize("name", catalog(10_000))
def test_chain_order_matches_exhaustive_closure(group, name):
    G = group(name)
    elems = _closure(G)
    assert G.order == len(elems)
    # the sorted table holds exactly the closure
    assert {tuple(r) for r in G.table.perms.tolist()} == set(elems)
    assert G.table.perm(0).is_identity()


def test_s8_order_and_cap():
    S8 = PermGroup(8, [parse_cycles("(1,2,3,4,5,6,7,8)", 8), parse_cycles("(1,2)", 8)])
    assert S8.order == 40320
    with pytest.raises(CapExceeded):
        S8.elements(cap=10**4)


def test_membership_agrees_with_closure(group):
    G = group("S4")
    A4 = group("A4")
    inside = _closure(A4)
    for p in _closure(G):
        assert A4.contains(Permutation(p)) == (p in inside)


@pytest.mark.parametrize("name", ["A5", "D10", "Q8", "C3^2", "S4"])
def test_multiplication_inverse_and_orders(group, name):
    t = group(name).table
    rng = random.Random(1)
    for _ in range(200):
        i, j = rng.randrange(t.size), rng.randrange(t.size)
        assert t.perm(int(t.mult[i, j])) == t.perm(i) * t.perm(j)
    for i in range(t.size):
        assert t.index(t.perm(i)) == i
        assert t.perm(int(t.inv[i])) == ~t.perm(i)
        assert t.orders[i] == t.perm(i).order()


def test_index_rejects_non_members(group):
    t = group("A5").table
    with pytest.raises(KeyError):
        t.index(parse_cycles("(1,2)", 5))
    assert t.indices_of(np.array([list(parse_cycles("(1,2)", 5).images)]))[0] == -1


def test_generates(group):
    A5 = group("A5")
    assert A5.generates([parse_cycles("(1,2,3)", 5), parse_cycles("(1,2,3,4,5)", 5)])
    assert not A5.generates([parse_cycles("(1,2,3)", 5), parse_cycles("(1,2)(4,5)", 5)])


def test_small_generating_set(group):
    G = group("S4")
    full = (1 << G.order) - 1
    gens = small_generating_set(G.table, full)
    assert G.table.generated(gens).all()


@pytest.mark.parametrize("name", ["A5", "S4", "D12", "PSL(2,7)"])
def test_coset_action_order_times_core(group, name):
    G = group(name)
    t = G.table
    for M in maximal_subgroups(G):
        hom = coset_action(G, M.mask)
        assert hom.target.order * bin(hom.kernel_mask).count("1") == G.order
        assert hom.target.degree * M.order == G.order
        assert hom.is_homomorphism()
        # kernel is the core: intersection of all conjugates
        members = set(indices_from_mask(M.mask, t.size).tolist())
        core = [x for x in range(t.size) if all(int(t.conjugate(x, g)) in members for g in range(t.size))]
        assert mask_from_indices(core, t.size) == hom.kernel_mask


def test_coset_action_rejects_non_subgroup(group):
    G = group("S4")
    with pytest.raises(NotSubgroup):
        coset_action(G, 0b110)


def test_q8_mod_center(group):
    Q8 = group("Q8")
    Z = center(Q8)
    assert bin(Z).count("1") == 2
    Q = quotient(Q8, Z)
    assert Q.order == 4
    assert all(Q.table.orders <= 2)


def test_quotient_requires_normal(group):
    S3 = group("S3")
    t = S3.table
    H = mask_from_indices([0, t.index(parse_cycles("(1,2)", 3))], t.size)
    assert not is_normal(S3, H)
    with pytest.raises(NotNormal):
        quotient(S3, H)


def test_subgroup_from_mask(group):
    A5 = group("A5")
    M = maximal_subgroups(A5)[0]
    H = subgroup(A5, M.mask)
    assert H.order == M.order
    members = bools_from_mask(M.mask, A5.order)
    for g in H.generators:
        assert members[A5.table.index(g)]


def test_direct_power_and_blocks(group):
    A5 = group("A5")
    P = direct_power(A5, 2)
    assert (P.order, P.degree) == (3600, 10)
    assert direct_power(A5, 1) is A5
    a = parse_cycles("(1,2,3)", 5)
    b = parse_cycles("(1,2,3,4,5)", 5)
    x = join_blocks([a, b])
    assert P.contains(x)
    assert project(x, 0, 5) == a and project(x, 1, 5) == b
    assert embed(b, 1, 2) == join_blocks([Permutation.identity(5), b])
    with pytest.raises(ValueError):
        project(parse_cycles("(1,6)", 10), 0, 5)
