import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from muhankel.ordered_group import (
    Dyadic,
    DyadicBounds,
    IntegerBounds,
    LexBounds,
    compare,
    cyclic_power,
    dyadic_line,
    dyadic_window,
    enumerate_window,
    first_positive,
    in_cyclic_cone,
    integer_line,
    integer_window,
    lex_lattice,
    lex_window,
    parse_dyadic,
)

Z, Z2, D = integer_line(), lex_lattice(2), dyadic_line()

ints = st.integers(-50, 50)
pairs = st.tuples(ints, ints)
dyadics = st.builds(Dyadic, st.integers(-200, 200), st.integers(0, 6))


def test_compare_examples():
    assert compare(3, 5) == -1
    assert compare((0, 7), (1, -100)) == -1
    assert compare(Dyadic(3, 2), Dyadic(1, 1)) == 1
    assert compare(Dyadic(2, 2), Dyadic(1, 1)) == 0


def test_compare_rejects_mixed_groups():
    with pytest.raises(TypeError):
        compare(1, (1, 0))
    with pytest.raises(TypeError):
        compare((1, 0), (1, 0, 0))
    with pytest.raises(TypeError):
        compare(Dyadic(1), 1)


def test_dyadic_is_canonical():
    assert Dyadic(6, 3) == Dyadic(3, 2)
    assert (Dyadic(6, 3).num, Dyadic(6, 3).exp) == (3, 2)
    assert (Dyadic(0, 5).num, Dyadic(0, 5).exp) == (0, 0)
    assert Dyadic(1, 1) + Dyadic(1, 1) == Dyadic(1)
    assert str(Dyadic(3, 2)) == "3/4"
    assert parse_dyadic("3/2^2") == parse_dyadic("3/4") == Dyadic(3, 2)
    with pytest.raises(ValueError):
        parse_dyadic("1/3")


@given(ints, ints, ints)
def test_integer_translation_invariance(x, y, z):
    assert compare(x, y) == compare(x + z, y + z)


@given(pairs, pairs, pairs)
def test_lex_translation_invariance(x, y, z):
    assert compare(x, y) == compare(Z2.add(x, z), Z2.add(y, z))


@given(dyadics, dyadics, dyadics)
def test_dyadic_translation_invariance(x, y, z):
    assert compare(x, y) == compare(x + z, y + z)


@given(dyadics, dyadics)
def test_dyadic_order_matches_reals(x, y):
    assert compare(x, y) == (float(x) > float(y)) - (float(x) < float(y))


@given(dyadics, st.integers(1, 20))
def test_torsion_free(x, n):
    if x != Dyadic(0):
        assert n * x != Dyadic(0)


def test_first_positive():
    assert first_positive(Z) == 1
    assert first_positive(D) is None
    # brute force: least strictly positive point in a box
    box = [(p, q) for p in range(-3, 4) for q in range(-3, 4)]
    assert min(x for x in box if compare(x, (0, 0)) > 0) == first_positive(Z2) == (0, 1)
    assert first_positive(lex_lattice(3)) == (0, 0, 1)


@pytest.mark.parametrize("w", [integer_window(6), lex_window([(0, 2), (-2, 2)]), dyadic_window(3, 1)])
def test_no_window_element_below_first_positive(w):
    p = first_positive(w.group)
    if p is None:
        # dyadic: a finer window always has a smaller positive element
        finer = dyadic_window(4, 1)
        assert finer.elements[1] < w.elements[1]
        return
    zero = w.group.zero
    assert not any(zero < x < p for x in w.elements)


def test_cyclic_cone():
    assert in_cyclic_cone((0, 5), Z2)
    assert not in_cyclic_cone((1, 0), Z2)
    assert all(in_cyclic_cone(k, Z) for k in range(20))
    assert cyclic_power((0, 5), Z2) == 5
    with pytest.raises(ValueError):
        in_cyclic_cone(Dyadic(1), D)


def test_enumerate_window_examples():
    assert integer_window(3).elements == (0, 1, 2, 3)
    box = [(0, 1), (-1, 1)]
    w = lex_window(box)
    brute = sorted(p for p in itertools.product(range(0, 2), range(-1, 2)) if p >= (0, 0))
    assert list(w.elements) == brute == [(0, 0), (0, 1), (1, -1), (1, 0), (1, 1)]
    assert dyadic_window(1, 1).elements == (Dyadic(0), Dyadic(1, 1), Dyadic(1))


def test_empty_bounds_give_identity_only():
    assert enumerate_window(Z, IntegerBounds(-1)).elements == (0,)
    assert enumerate_window(Z2, LexBounds(((1, 0), (0, 0)))).elements == ((0, 0),)
    assert enumerate_window(D, DyadicBounds(0, 0)).elements == (Dyadic(0),)


def test_enumeration_is_deterministic():
    b = LexBounds(((0, 3), (-4, 4)))
    assert enumerate_window(Z2, b).elements == enumerate_window(Z2, b).elements
    w = enumerate_window(Z2, b)
    assert all(x < y for x, y in zip(w.elements, w.elements[1:]))
    assert all(Z2.is_positive(x) for x in w.elements)


def test_ideal_property_exhaustive():
    w = lex_window([(0, 3), (-3, 3)])
    off = [x for x in w.elements if not in_cyclic_cone(x, Z2)]
    assert off
    for xi in w.elements:
        for chi in off:
            assert not in_cyclic_cone(Z2.add(xi, chi), Z2)


def test_labels_roundtrip():
    for g, x in [(Z, 7), (Z2, (1, -2)), (D, Dyadic(3, 2))]:
        assert g.parse(g.label(x)) == x
    assert Z2.label((1, -2)) == "(1,-2)"
