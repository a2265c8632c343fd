from math import gcd, prod

import numpy as np
import pytest

from invgen.catalog import catalog, resolve
from invgen.errors import BudgetExceeded
from invgen.group import indices_from_mask
from invgen.structure import (
    all_subgroups,
    automorphism_group,
    center,
    conjugacy_classes,
    derived_subgroup,
    find_automorphism,
    frattini,
    is_automorphism,
    is_simple,
    lattice_from_json,
    lattice_to_json,
    maximal_class_members,
    maximal_subgroups,
    normal_subgroups,
    tuple_orbit_canonical,
)

import oracles


def _elements(G):
    return [tuple(r) for r in G.table.perms.tolist()]


def _sets(G, masks):
    E = _elements(G)
    return {frozenset(E[i] for i in indices_from_mask(m, G.order)) for m in masks}


@pytest.mark.parametrize("name", catalog(200))
def test_classes_match_brute_force(group, name):
    G = group(name)
    cls = conjugacy_classes(G)
    assert _sets(G, cls.masks) == set(oracles.classes(_elements(G)))
    assert sum(cls.sizes) == G.order
    assert all(G.order % s == 0 for s in cls.sizes)
    assert cls.reps == sorted(cls.reps) and cls.reps[0] == 0


def test_known_class_sizes(group):
    assert conjugacy_classes(group("A5")).sizes == [1, 20, 15, 12, 12]
    assert sorted(conjugacy_classes(group("S4")).sizes) == [1, 3, 6, 6, 8]


@pytest.mark.parametrize("name", ["S3", "C2^3", "Q8", "D8", "D12", "A4", "S4", "C4^2", "D18"])
def test_lattice_matches_brute_force(group, name):
    G = group(name)
    lat = all_subgroups(G)
    subs = oracles.subgroups(_elements(G), G.degree)
    assert _sets(G, [r.mask for r in lat.records]) == subs
    maxes = oracles.maximal(subs, G.order)
    got = [m for members in maximal_class_members(G) for m in members]
    assert _sets(G, got) == set(maxes)


def test_a5_lattice_via_two_generator_closures(group):
    # every subgroup of A5 is generated by at most two elements
    A5 = group("A5")
    E = _elements(A5)
    subs = {oracles.closure([a, b], 5) for a in E for b in E}
    lat = all_subgroups(A5)
    assert len(subs) == len(lat) == 59
    assert _sets(A5, [r.mask for r in lat.records]) == subs
    assert len(lat.classes) == 9


@pytest.mark.parametrize("name,orders", [
    ("A5", [12, 10, 6]),
    ("S4", [12, 8, 6]),
    ("A6", [60, 60, 36, 24, 24]),
    ("PSL(2,7)", [24, 24, 21]),
    ("C6", [3, 2]),
])
def test_maximal_subgroup_orders(group, name, orders):
    assert [M.order for M in maximal_subgroups(group(name))] == orders


@pytest.mark.parametrize("name,order", [("Q8", 2), ("C4", 2), ("C12", 2), ("D8", 2), ("D16", 4), ("A5", 1),
                                        ("S4", 1), ("C2^3", 1), ("Q8^2", 4)])
def test_frattini_orders(group, name, order):
    phi = frattini(group(name))
    assert bin(phi).count("1") == order


def test_frattini_of_q8_is_center(group):
    Q8 = group("Q8")
    assert frattini(Q8) == center(Q8)


@pytest.mark.parametrize("name", catalog(200))
def test_frattini_is_normal_and_in_every_maximal(group, name):
    G = group(name)
    phi = frattini(G)
    for members in maximal_class_members(G):
        for m in members:
            assert phi & m == phi
    assert phi in normal_subgroups(G)


def test_center_and_derived(group):
    assert bin(center(group("D8"))).count("1") == 2
    assert bin(center(group("A5"))).count("1") == 1
    assert bin(derived_subgroup(group("S4"))).count("1") == 12
    assert bin(derived_subgroup(group("A4"))).count("1") == 4


@pytest.mark.parametrize("name,simple", [("A5", True), ("A6", True), ("PSL(2,7)", True), ("PSL(2,11)", True),
                                         ("A4", False), ("S5", False), ("C5", False), ("A5^2", False)])
def test_is_simple(group, name, simple):
    assert is_simple(group(name)) == simple


@pytest.mark.parametrize("name", catalog(200))
def test_conjugate_union_of_proper_subgroup_never_covers(group, name):
    G = group(name)
    full = (1 << G.order) - 1
    lat = all_subgroups(G)
    for ids in lat.classes:
        union = 0
        for i in ids:
            union |= lat.records[i].mask
        if lat.records[ids[0]].order < G.order:
            assert union != full


def _phi(n):
    return sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)


@pytest.mark.parametrize("name,order,out", [
    ("A5", 120, 2), ("S3", 6, 1), ("S4", 24, 1), ("Q8", 24, 6), ("D8", 8, 2),
    ("C5", _phi(5), _phi(5)), ("C12", _phi(12), _phi(12)),
    ("C2^3", prod(2**3 - 2**i for i in range(3)), None),
    ("A6", 1440, 4), ("PSL(2,7)", 336, 2),
])
def test_automorphism_group_orders(group, name, order, out):
    aut = automorphism_group(group(name))
    assert aut.order == order
    if out is not None:
        assert aut.out_order == out
    assert aut.maps[0].tolist() == list(range(group(name).order))


@pytest.mark.parametrize("name", ["A5", "S4", "D10", "Q8"])
def test_automorphisms_preserve_products(group, name):
    G = group(name)
    t = G.table
    aut = automorphism_group(G)
    assert len({tuple(r) for r in aut.maps.tolist()}) == aut.order
    for phi in aut.maps:
        assert is_automorphism(t, phi.tolist())
        assert (t.mult[np.ix_(phi, phi)] == phi[t.mult]).all()


def test_automorphism_budget():
    with pytest.raises(BudgetExceeded):
        automorphism_group(resolve("A5"), budget=50)


def test_lattice_budget():
    with pytest.raises(BudgetExceeded):
        all_subgroups(resolve("S5"), budget=100)


def test_tuple_orbits_of_a5_pairs_partition_everything(group):
    A5 = group("A5")
    aut = automorphism_group(A5)
    sizes = {}
    for x in range(60):
        for y in range(60):
            key = tuple_orbit_canonical(aut, (x, y))
            sizes[key] = sizes.get(key, 0) + 1
    assert sum(sizes.values()) == 3600
    assert all(aut.order % s == 0 for s in sizes.values())


def test_find_automorphism(group):
    A5 = group("A5")
    aut = automorphism_group(A5)
    src = (1, 2)
    a = 7
    dst = tuple(int(aut.maps[a, x]) for x in src)
    hit = find_automorphism(aut, src, dst)
    assert [int(aut.maps[hit, x]) for x in src] == list(dst)


def test_lattice_json_round_trip():
    G = resolve("S4")
    doc = lattice_to_json(G)
    H = resolve("S4")
    lattice_from_json(H, doc)
    assert [r.mask for r in all_subgroups(H).records] == [r.mask for r in all_subgroups(G).records]
    assert conjugacy_classes(H).sizes == conjugacy_classes(G).sizes
