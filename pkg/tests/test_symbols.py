import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from muhankel.integral_examples import DiskMeasure, point_mass
from muhankel.operator_core import build_mu_nu_hankel
from muhankel.ordered_group import Dyadic, dyadic_window, integer_window, lex_lattice, lex_window
from muhankel.symbols import (
    MomentSequence,
    MomentSymbol,
    SparseSymbol,
    cyclic_supported,
    delta,
    dyadic_power,
    generator_powers,
    geometric,
    l2_norm_on_cone,
    moments,
)

Z2 = lex_lattice(2)


def test_eval_examples():
    assert geometric(0.5)(3) == pytest.approx(0.125, abs=0)
    mu = cyclic_supported(Z2, 0.5)
    assert mu((1, 0)) == 0
    assert mu((0, 2)) == 0.25
    assert geometric(0)(0) == 1


def test_semicharacter_rejects_negative_elements():
    with pytest.raises(ValueError):
        geometric(0.5)(-1)
    with pytest.raises(ValueError):
        generator_powers(Z2, (0.5, 0.5))((0, -1))


def test_zero_generators_must_be_a_prefix():
    mu = generator_powers(Z2, (0, 0.5))
    assert mu((1, -3)) == 0
    assert mu((0, 3)) == 0.125
    with pytest.raises(ValueError):
        generator_powers(Z2, (0.5, 0))


def test_dyadic_power_branch_cut():
    with pytest.raises(ValueError):
        dyadic_power(-2.0)
    mu = dyadic_power(4.0)
    assert mu(Dyadic(1, 1)) == pytest.approx(2.0, rel=1e-15)


WINDOWS = [integer_window(10), lex_window([(0, 2), (-3, 3)]), dyadic_window(2, 2)]
MUS = [
    [geometric(0.5), geometric(-0.8 + 0.3j), cyclic_supported(integer_window(1).group, 1.2)],
    [generator_powers(Z2, (0.7j, 1.3)), generator_powers(Z2, (0, 0.4)), cyclic_supported(Z2, -0.6)],
    [dyadic_power(0.5), dyadic_power(1.5 - 0.5j)],
]


@pytest.mark.parametrize("w,mus", list(zip(WINDOWS, MUS)))
def test_homomorphism_law(w, mus):
    g = w.group
    for mu in mus:
        assert mu(g.zero) == 1
        for x in w.elements:
            for y in w.elements:
                lhs, rhs = mu(g.add(x, y)), mu(x) * mu(y)
                assert abs(lhs - rhs) <= 1e-12 * (1 + abs(rhs))


def test_l2_norm_examples():
    mu = geometric(0.5)
    assert mu.l2_norm_closed_form() == pytest.approx(math.sqrt(4 / 3), rel=1e-15)
    assert l2_norm_on_cone(mu, integer_window(60)) == pytest.approx(math.sqrt(4 / 3), rel=1e-14)
    w = integer_window(5)
    assert l2_norm_on_cone(delta(w.group, 1), w) == 1
    assert l2_norm_on_cone(SparseSymbol(w.group, {}), w) == 0


def test_l2_norm_monotone_in_window():
    mu = geometric(0.9)
    norms = [l2_norm_on_cone(mu, integer_window(n)) for n in range(0, 30)]
    assert all(a <= b for a, b in zip(norms, norms[1:]))


def test_closed_form_divergence():
    assert math.isinf(geometric(1.0).l2_norm_closed_form())
    assert math.isinf(generator_powers(Z2, (0.5, 0.5)).l2_norm_closed_form())
    assert generator_powers(Z2, (0, 0.5)).l2_norm_closed_form() == pytest.approx(math.sqrt(4 / 3))
    assert math.isinf(dyadic_power(0.5).l2_norm_closed_form())
    assert geometric(0.5).l2_norm_closed_form(exclude_identity=True) == pytest.approx(math.sqrt(1 / 3))


def test_moment_examples():
    g = moments(point_mass(0.5), 10).values
    assert np.allclose(g, 0.5 ** np.arange(11), rtol=0, atol=1e-16)
    two = DiskMeasure(((0.3, 0.5), (-0.3, 0.5)))
    g = moments(two, 9).values
    # direct two-atom sum
    expect = [0.5 * 0.3 ** n + 0.5 * (-0.3) ** n for n in range(10)]
    assert np.allclose(g, expect, rtol=0, atol=1e-16)
    assert np.all(g[1::2] == 0)
    g = moments(point_mass(0.0, 2.5), 5).values
    assert list(g) == [2.5, 0, 0, 0, 0, 0]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 0.98), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3)),
                min_size=1, max_size=4))
def test_moment_bound(atoms):
    m = DiskMeasure(tuple((r * np.exp(1j * t), complex(a, b)) for r, t, a, b in atoms))
    g = moments(m, 40).values
    assert np.all(np.abs(g) <= m.total_variation * (1 + 1e-12))


def test_moment_sequence_extension_is_idempotent():
    m = DiskMeasure(((0.7, 1.0), (-0.2 + 0.5j, 0.3j)))
    seq = moments(m, 3)
    head = seq.values.copy()
    seq[50]
    assert np.array_equal(seq.values[:4], head)
    assert np.array_equal(seq.values[:51], moments(m, 50).values)


def test_moment_l2_closed_form_matches_sum():
    m = DiskMeasure(((0.7, 1.0), (-0.2 + 0.5j, 0.3j)))
    direct = np.sqrt(np.sum(np.abs(moments(m, 400).values) ** 2))
    assert m.moments(0).l2_norm() == pytest.approx(direct, rel=1e-12)
    assert math.isinf(DiskMeasure(((1.0, 1.0),), "closed").moments(0).l2_norm())


def test_moment_symbol_matches_atomic_sum():
    m = DiskMeasure(((0.6, 1.0), (0.1j, -2.0)))
    a = MomentSymbol(m.moments(0))
    for k in range(1, 15):
        assert a(k) == pytest.approx(sum(w * z ** (k - 1) for z, w in m.atoms), abs=1e-15)
    with pytest.raises(ValueError):
        a(0)


def test_explicit_moment_list_does_not_extend():
    seq = MomentSequence([1.0, 2.0])
    with pytest.raises(IndexError):
        seq[2]


def test_symbol_rejects_identity_and_negatives():
    a = delta(Z2, (0, 1))
    with pytest.raises(ValueError):
        a((0, 0))
    with pytest.raises(ValueError):
        a((0, -1))
    with pytest.raises(ValueError):
        SparseSymbol(Z2, {(0, 0): 1.0})


def test_remark1_first_column_norm():
    rng = np.random.default_rng(5)
    w = lex_window([(0, 2), (-2, 2)])
    entries = {x: complex(*rng.normal(size=2)) for x in w.positives[::2]}
    a = SparseSymbol(w.group, entries)
    A = build_mu_nu_hankel(generator_powers(w.group, (0.3, 1.1)), None, a, w)
    col0 = np.linalg.norm(A.matrix[:, 0])
    assert abs(col0 - l2_norm_on_cone(a, w)) <= 1e-12


def test_quotient_semicharacters():
    g = Z2
    mu, nu = generator_powers(g, (0.5, 2.0)), generator_powers(g, (1j, -0.5))
    r = mu / nu
    for x in lex_window([(0, 2), (-2, 2)]).elements:
        assert abs(r(x) - mu(x) / nu(x)) <= 1e-14 * (1 + abs(r(x)))
    with pytest.raises(ValueError):
        mu / cyclic_supported(g, 0.5)
