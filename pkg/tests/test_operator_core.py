import json

import numpy as np
import pytest

from muhankel.integral_examples import CauchySpec, matrix_of_A, point_mass
from muhankel.operator_core import (
    MINUS,
    PLUS,
    TruncatedOperator,
    WindowVector,
    adjoint,
    basis_vector,
    build_mu_nu_hankel,
    flip_reindex,
    identity,
    nuclear_norm,
    power_iteration_norm,
    rank_one,
    shift_matrix,
    singular_values,
    spectral_norm,
    trace,
)
from muhankel.ordered_group import Dyadic, dyadic_window, integer_window, lex_window
from muhankel.symbols import (
    MomentSymbol,
    SparseSymbol,
    delta,
    dyadic_power,
    generator_powers,
    geometric,
    moments,
)


def rand_vec(rng, w, side):
    index = w.elements if side == PLUS else w.positives
    c = rng.normal(size=len(index)) + 1j * rng.normal(size=len(index))
    return WindowVector(w.group, side, index, c)


def rand_op(rng, w, row_side, col_side):
    rows = w.elements if row_side == PLUS else w.positives
    cols = w.elements if col_side == PLUS else w.positives
    m = rng.normal(size=(len(rows), len(cols))) + 1j * rng.normal(size=(len(rows), len(cols)))
    return TruncatedOperator(w.group, rows, cols, m, row_side, col_side)


def test_single_entry_matrix():
    w = integer_window(4)
    A = build_mu_nu_hankel(geometric(0.5), None, delta(w.group, 1), w)
    expect = np.zeros((4, 5))
    expect[0, 0] = 1  # row ξ=1, column χ=0
    assert np.array_equal(A.matrix, expect)
    assert A.entry(1, 0) == 1


def test_zero_symbol_gives_zero_matrix():
    w = lex_window([(0, 2), (-2, 2)])
    A = build_mu_nu_hankel(generator_powers(w.group, (0.5, 2)), None, SparseSymbol(w.group, {}), w)
    assert not A.matrix.any()


def test_classical_hankel_pattern():
    w = integer_window(8)
    gam = moments(point_mass(0.7, 1.3), 0)
    A = build_mu_nu_hankel(None, None, MomentSymbol(gam), w)
    for i, j in enumerate(w.positives):
        for kk, k in enumerate(w.elements):
            assert A.matrix[i, kk] == pytest.approx(gam[k + j - 1], abs=1e-15)


def test_mu_nu_entries():
    w = dyadic_window(2, 1)
    mu, nu = dyadic_power(0.5), dyadic_power(1.5 + 0.5j)
    a = SparseSymbol(w.group, {x: 1 + 0.1j * i for i, x in enumerate(w.sumset())})
    A = build_mu_nu_hankel(mu, nu, a, w)
    g = w.group
    for i, xi in enumerate(w.positives):
        for j, chi in enumerate(w.elements):
            assert A.matrix[i, j] == mu(chi) * nu(xi) * a(g.add(chi, xi))


def test_shift_examples():
    w = integer_window(3)
    S = shift_matrix(1, PLUS, w)
    assert np.array_equal(S.matrix, np.eye(4, k=-1))
    P = shift_matrix(1, "compressed", w)
    e1 = basis_vector(w.group, MINUS, w.positives, 1)
    assert not (P @ e1).coeffs.any()
    wl = lex_window([(0, 1), (-1, 1)])
    P = shift_matrix((0, 1), "compressed", wl)
    out = P @ basis_vector(wl.group, MINUS, wl.positives, (1, 0))
    assert out.coeffs[wl.positives.index((1, -1))] == 1
    assert np.count_nonzero(out.coeffs) == 1
    with pytest.raises(ValueError):
        shift_matrix((0, -1), PLUS, wl)


def test_shift_adjoints_match_window_truncations():
    w = lex_window([(0, 2), (-2, 2)])
    chi = (0, 1)
    assert np.array_equal(adjoint(shift_matrix(chi, MINUS, w)).matrix,
                          shift_matrix(chi, "compressed", w).matrix)


@pytest.mark.parametrize("w", [integer_window(8), lex_window([(0, 2), (-3, 3)])])
def test_shift_identity_interior(w):
    g = w.group
    chi1 = (0, 1) if g.kind == "lex" else 1
    S = shift_matrix(chi1, PLUS, w)
    lhs = (S @ adjoint(S)).matrix
    e0 = basis_vector(g, PLUS, w.elements, g.zero)
    rhs = np.eye(len(w)) - rank_one(e0, e0).matrix
    # interior: labels η with η - χ₁ in X+ and still in the window
    inside = [i for i, x in enumerate(w.elements)
              if x == g.zero or (g.sub(x, chi1) in w)]
    blk = np.ix_(inside, inside)
    assert np.array_equal(lhs[blk], rhs[blk])


def test_rank_one_algebra_random():
    rng = np.random.default_rng(11)
    w = lex_window([(0, 1), (-2, 2)])
    for _ in range(20):
        f, y = rand_vec(rng, w, MINUS), rand_vec(rng, w, PLUS)
        A, B = rand_op(rng, w, MINUS, MINUS), rand_op(rng, w, PLUS, PLUS)
        lhs = A @ rank_one(f, y) @ B
        rhs = rank_one(A @ f, adjoint(B) @ y)
        assert np.max(np.abs(lhs.matrix - rhs.matrix)) <= 1e-12 * (1 + np.max(np.abs(lhs.matrix)))
        assert np.max(np.abs(adjoint(rank_one(f, y)).matrix - rank_one(y, f).matrix)) <= 1e-14
        assert spectral_norm(rank_one(f, y)) == pytest.approx(f.norm() * y.norm(), rel=1e-10)


def test_rank_one_elementary():
    w = integer_window(2)
    e = basis_vector(w.group, PLUS, w.elements, 1)
    E = rank_one(e, e).matrix
    assert E[1, 1] == 1 and np.count_nonzero(E) == 1


def test_norms_and_trace():
    w = integer_window(2)
    I = identity(w, PLUS)
    assert nuclear_norm(I) == pytest.approx(3)
    assert trace(I) == 3
    assert spectral_norm(I.with_matrix(np.zeros((3, 3)))) == 0
    A = build_mu_nu_hankel(None, None, delta(w.group, 1), w)
    with pytest.raises(ValueError):
        trace(A)


def test_rank_one_nuclear_equals_spectral():
    rng = np.random.default_rng(3)
    w = integer_window(6)
    f, y = rand_vec(rng, w, MINUS), rand_vec(rng, w, PLUS)
    R = rank_one(f, y)
    assert nuclear_norm(R) == pytest.approx(f.norm() * y.norm(), rel=1e-10)
    assert spectral_norm(R) == pytest.approx(f.norm() * y.norm(), rel=1e-10)


def test_norm_inequalities():
    rng = np.random.default_rng(9)
    w = integer_window(7)
    for _ in range(10):
        T = rand_op(rng, w, MINUS, PLUS)
        s = singular_values(T)
        rank = int(np.sum(s > 1e-12 * s[0]))
        sn, nn = spectral_norm(T), nuclear_norm(T)
        assert sn <= nn + 1e-12
        assert nn <= rank * sn + 1e-12
        assert np.all(np.diff(s) <= 0)


def test_example1_norm_closed_form():
    A = matrix_of_A(CauchySpec("A", 0.5, point_mass(0.5)), integer_window(64))
    expected = 1 / np.sqrt((1 - 0.25) * (1 - 0.0625))
    assert spectral_norm(A) == pytest.approx(expected, abs=1e-6)
    assert abs(spectral_norm(A) - 1.192570) <= 1e-6


def test_power_iteration_matches_svd():
    rng = np.random.default_rng(1)
    u = rng.normal(size=40) + 1j * rng.normal(size=40)
    v = rng.normal(size=30)
    m = np.outer(u, v) + 0.05 * rng.normal(size=(40, 30))
    assert power_iteration_norm(m, 1e-13) == pytest.approx(np.linalg.svd(m, compute_uv=False)[0], rel=1e-10)
    assert power_iteration_norm(np.zeros((3, 3))) == 0


def test_power_iteration_fallback_start():
    # the all-ones start is orthogonal to the dominant right singular vector (1, -1)
    m = np.diag([3.0, 0.0]) @ np.array([[1, -1], [1, 1]]) / np.sqrt(2)
    assert power_iteration_norm(m) == pytest.approx(3.0, rel=1e-10)


def test_large_matrices_use_power_iteration():
    w = integer_window(600)
    A = matrix_of_A(CauchySpec("A", 0.5, point_mass(0.5)), w)
    assert max(A.shape) > 512
    assert spectral_norm(A, 1e-13) == pytest.approx(1 / np.sqrt(0.75 * 0.9375), rel=1e-10)


def test_adjoint_is_involution():
    rng = np.random.default_rng(0)
    T = rand_op(rng, lex_window([(0, 1), (-1, 1)]), MINUS, PLUS)
    TT = adjoint(adjoint(T))
    assert np.array_equal(TT.matrix, T.matrix) and TT.rows == T.rows and TT.row_side == T.row_side


def test_flip_reindex():
    w = integer_window(10)
    q = 0.4 + 0.3j
    spec = CauchySpec("A", q, point_mass(0.6, 2.0))
    gam = moments(spec.measure, 30)
    JA = flip_reindex(matrix_of_A(spec, w))
    assert JA.rows == tuple(range(10)) and JA.row_side == PLUS
    for i, j in enumerate(JA.rows):
        for k in w.elements:
            assert JA.matrix[i, k] == pytest.approx(q ** k * gam[k + j], abs=1e-15)
    back = flip_reindex(JA)
    assert back.rows == w.positives and back.row_side == MINUS
    Z = flip_reindex(matrix_of_A(spec, w).with_matrix(np.zeros((10, 11))))
    assert not Z.matrix.any()
    with pytest.raises(ValueError):
        wl = lex_window([(0, 1), (0, 1)])
        flip_reindex(build_mu_nu_hankel(None, None, SparseSymbol(wl.group, {}), wl))


def test_exports():
    w = dyadic_window(1, 1)
    a = SparseSymbol(w.group, {Dyadic(1, 1): 1 + 2j, Dyadic(1): -0.5})
    A = build_mu_nu_hankel(None, None, a, w)
    d = json.loads(A.to_json())
    assert d["rows"] == ["1/2", "1"] and d["cols"] == ["0", "1/2", "1"]
    back = TruncatedOperator.from_json(A.to_json(), w.group)
    assert np.array_equal(back.matrix, A.matrix) and back.rows == A.rows
    lines = A.to_csv().splitlines()
    assert lines[0] == "row,col,re,im"
    assert lines[1] == "1/2,0,1.0,2.0"
    assert len(lines) == 1 + 6
