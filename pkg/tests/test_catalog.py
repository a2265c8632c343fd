import pytest

from invgen.catalog import (
    CATALOG,
    catalog,
    group_from_json,
    group_to_json,
    parse_descriptor,
    resolve,
)
from invgen.errors import DescriptorError


@pytest.mark.parametrize("text,order,degree", [
    ("A5", 60, 5),
    ("PSL(2,7)", 168, 8),
    ("A5^2", 3600, 10),
    ("D8", 8, 4),
    ("Q8", 8, 8),
    ("C12", 12, 12),
    ("S3^2", 36, 6),
    ("PSL(2,13)", 1092, 14),
    ("perm:4:(1,2,3,4);(1,3)", 8, 4),
])
def test_resolve(text, order, degree):
    G = resolve(text)
    assert (G.order, G.degree) == (order, degree)


@pytest.mark.parametrize("text", CATALOG)
def test_catalog_round_trip_and_formula(text):
    desc = parse_descriptor(text)
    assert str(desc) == text
    assert str(parse_descriptor(str(desc))) == text
    assert resolve(desc).order == desc.expected_order()


@pytest.mark.parametrize("text,normal", [
    (" A 5 ", "A5"),
    ("PSL( 2 , 11 )", "PSL(2,11)"),
    ("perm:3:(1, 2,3) ; (1,2)", "perm:3:(1,2,3);(1,2)"),
])
def test_normalization(text, normal):
    assert str(parse_descriptor(text)) == normal


@pytest.mark.parametrize("text,pos", [
    ("", 0),
    ("D4", 1),
    ("D7", 1),
    ("PSL(2,4)", 6),
    ("PSL(2,37)", 6),
    ("X5", 0),
    ("A5^0", 3),
    ("A5^x", 3),
    ("perm:3:(1,4)", 7),
])
def test_descriptor_errors(text, pos):
    with pytest.raises(DescriptorError) as info:
        parse_descriptor(text)
    assert info.value.pos == pos
    assert "position" in str(info.value)


def test_catalog_filter():
    small = catalog(10)
    assert "A5" not in small and "C10" in small and "D10" in small
    assert catalog() == CATALOG


def test_psl_is_simple_on_projective_line():
    from invgen.structure import is_simple

    G = resolve("PSL(2,11)")
    assert G.is_transitive() and is_simple(G)


def test_group_json_round_trip():
    G = resolve("D10")
    H = group_from_json(group_to_json(G))
    assert H.order == 10 and H.name == "D10"
