"""Truncated operator matrices between windows of H²(G) and H²₋(G).

Index conventions
-----------------
Every basis vector is labelled by a cone element.  On the ``plus`` side the
label χ ∈ X+ stands for the character χ itself; on the ``minus`` side the
label ξ ∈ X+ \\ {χ₀} stands for the conjugate character ξ̄ ∈ X₋.

Inner products are linear in the first slot and conjugate-linear in the
second, so ``M[ξ, χ] = <Aχ, ξ̄>`` is the coefficient of ξ̄ in Aχ.  The only
place this convention enters is :func:`rank_one`.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .ordered_group import ConeWindow, Element, GroupDescriptor
from .symbols import Semicharacter, SymbolFunction, trivial

LOGGER = logging.getLogger(__name__)

PLUS = "plus"
MINUS = "minus"

SVD_MAX_DIM = 512


@dataclass(frozen=True)
class WindowVector:
    group: GroupDescriptor
    side: str
    index: Tuple[Element, ...]
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape != (len(self.index),):
            raise ValueError("coefficient vector does not match its index list")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "index", tuple(self.index))

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


def basis_vector(group: GroupDescriptor, side: str, index: Sequence[Element], at: Element) -> WindowVector:
    c = np.zeros(len(index), dtype=complex)
    c[list(index).index(at)] = 1.0
    return WindowVector(group, side, tuple(index), c)


def side_index(w: ConeWindow, side: str) -> Tuple[Element, ...]:
    if side == PLUS:
        return w.elements
    if side == MINUS:
        return w.positives
    raise ValueError(f"unknown side {side!r}")


@dataclass(frozen=True)
class TruncatedOperator:
    """A complex matrix with explicit row and column labels.

    ``row_side``/``col_side`` record which Hardy space each index set lives in.
    """

    group: GroupDescriptor
    rows: Tuple[Element, ...]
    cols: Tuple[Element, ...]
    matrix: np.ndarray
    row_side: str = MINUS
    col_side: str = PLUS

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "cols", tuple(self.cols))
        if m.shape != (len(self.rows), len(self.cols)):
            raise ValueError(f"matrix shape {m.shape} does not match labels "
                             f"({len(self.rows)}, {len(self.cols)})")
        for labels in (self.rows, self.cols):
            for x, y in zip(labels, labels[1:]):
                if not x < y:
                    raise ValueError("index lists must be strictly increasing")
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self):
        return self.matrix.shape

    def entry(self, row: Element, col: Element) -> complex:
        return complex(self.matrix[self.rows.index(row), self.cols.index(col)])

    def column(self, col: Element) -> WindowVector:
        return WindowVector(self.group, self.row_side, self.rows, self.matrix[:, self.cols.index(col)])

    def __matmul__(self, other):
        if isinstance(other, WindowVector):
            if other.index != self.cols or other.side != self.col_side:
                raise ValueError("vector index does not match operator columns")
            return WindowVector(self.group, self.row_side, self.rows, self.matrix @ other.coeffs)
        if not isinstance(other, TruncatedOperator):
            return NotImplemented
        if self.cols != other.rows or self.col_side != other.row_side:
            raise ValueError("inner index lists do not match")
        return TruncatedOperator(self.group, self.rows, other.cols, self.matrix @ other.matrix,
                                 self.row_side, other.col_side)

    def _same_frame(self, other: "TruncatedOperator") -> None:
        if (self.rows, self.cols, self.row_side, self.col_side) != \
                (other.rows, other.cols, other.row_side, other.col_side):
            raise ValueError("operators act between different windows")

    def __add__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        self._same_frame(other)
        return self.with_matrix(self.matrix + other.matrix)

    def __sub__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        self._same_frame(other)
        return self.with_matrix(self.matrix - other.matrix)

    def __mul__(self, scalar) -> "TruncatedOperator":
        return self.with_matrix(self.matrix * complex(scalar))

    __rmul__ = __mul__

    def with_matrix(self, matrix) -> "TruncatedOperator":
        return TruncatedOperator(self.group, self.rows, self.cols, matrix, self.row_side, self.col_side)

    def restrict(self, rows=None, cols=None) -> "TruncatedOperator":
        rows = self.rows if rows is None else tuple(rows)
        cols = self.cols if cols is None else tuple(cols)
        ri = [self.rows.index(r) for r in rows]
        ci = [self.cols.index(c) for c in cols]
        return TruncatedOperator(self.group, rows, cols, self.matrix[np.ix_(ri, ci)],
                                 self.row_side, self.col_side)

    def to_json(self) -> str:
        g = self.group
        return json.dumps({
            "rows": [g.label(x) for x in self.rows],
            "cols": [g.label(x) for x in self.cols],
            "re": self.matrix.real.tolist(),
            "im": self.matrix.imag.tolist(),
        })

    def to_csv(self) -> str:
        g = self.group
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["row", "col", "re", "im"])
        for i, r in enumerate(self.rows):
            for j, c in enumerate(self.cols):
                z = self.matrix[i, j]
                writer.writerow([g.label(r), g.label(c), repr(float(z.real)), repr(float(z.imag))])
        return buf.getvalue()

    @classmethod
    def from_json(cls, text: str, group: GroupDescriptor, row_side=MINUS, col_side=PLUS):
        d = json.loads(text)
        m = np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)
        if m.size == 0:
            m = m.reshape(len(d["rows"]), len(d["cols"]))
        return cls(group, tuple(group.parse(x) for x in d["rows"]),
                   tuple(group.parse(x) for x in d["cols"]), m, row_side, col_side)


def build_mu_nu_hankel(mu: Optional[Semicharacter], nu: Optional[Semicharacter],
                       a: SymbolFunction, w: ConeWindow) -> TruncatedOperator:
    """Matrix ``M[ξ, χ] = μ(χ) ν(ξ) a(χ + ξ)`` over the window.

    ``None`` for ``mu`` or ``nu`` means the constant semicharacter 1.
    """
    g = w.group
    mu = trivial(g) if mu is None else mu
    nu = trivial(g) if nu is None else nu
    for obj in (mu, nu, a):
        if obj.group != g:
            raise ValueError(f"{obj!r} is defined on {obj.group}, window is on {g}")
    rows, cols = w.positives, w.elements
    mu_vals = mu.values(cols)
    nu_vals = nu.values(rows)
    m = np.zeros((len(rows), len(cols)), dtype=complex)
    for j, chi in enumerate(cols):
        if mu_vals[j] == 0:
            continue
        for i, xi in enumerate(rows):
            v = a(g.add(chi, xi))
            if v != 0:
                m[i, j] = mu_vals[j] * nu_vals[i] * v
    return TruncatedOperator(g, rows, cols, m, MINUS, PLUS)


def shift_matrix(chi: Element, side: str, w: ConeWindow) -> TruncatedOperator:
    """Window truncation of a shift by ``chi``.

    ``side``:
      ``"plus"``        S_χ on H²: η ↦ η + χ
      ``"compressed"``  P₋𝒮_χ on H²₋: ξ̄ ↦ (ξ - χ)‾ if ξ - χ > χ₀, else 0
      ``"minus"``       S_χ̄ on H²₋: ξ̄ ↦ (ξ + χ)‾

    Images that leave the window are dropped.
    """
    g = w.group
    g.validate(chi)
    if not g.is_positive(chi):
        raise ValueError(f"shift element must lie in the cone, got {g.label(chi)}")
    if side == PLUS:
        index, target, s = w.elements, (lambda x: g.add(x, chi)), PLUS
    elif side == "compressed":
        index, target, s = w.positives, (lambda x: g.sub(x, chi)), MINUS
    elif side == MINUS:
        index, target, s = w.positives, (lambda x: g.add(x, chi)), MINUS
    else:
        raise ValueError(f"unknown shift side {side!r}")
    pos = {x: i for i, x in enumerate(index)}
    m = np.zeros((len(index), len(index)), dtype=complex)
    for j, x in enumerate(index):
        i = pos.get(target(x))
        if i is not None:
            m[i, j] = 1.0
    return TruncatedOperator(g, index, index, m, s, s)


def identity(w: ConeWindow, side: str) -> TruncatedOperator:
    index = side_index(w, side)
    return TruncatedOperator(w.group, index, index, np.eye(len(index), dtype=complex), side, side)


def rank_one(f: WindowVector, y: WindowVector) -> TruncatedOperator:
    """``(f ⊗ y) x = <x, y> f``, i.e. the matrix f y*."""
    if f.group != y.group:
        raise ValueError("vectors on different groups")
    return TruncatedOperator(f.group, f.index, y.index, np.outer(f.coeffs, y.coeffs.conj()),
                             f.side, y.side)


def adjoint(T: TruncatedOperator) -> TruncatedOperator:
    return TruncatedOperator(T.group, T.cols, T.rows, T.matrix.conj().T, T.col_side, T.row_side)


def singular_values(T: TruncatedOperator) -> np.ndarray:
    if 0 in T.shape:
        return np.zeros(0)
    return np.linalg.svd(T.matrix, compute_uv=False)


def nuclear_norm(T: TruncatedOperator) -> float:
    return float(np.sum(singular_values(T)))


def trace(T: TruncatedOperator) -> complex:
    if T.rows != T.cols or T.row_side != T.col_side:
        raise ValueError("trace needs identical row and column index sets")
    return complex(np.trace(T.matrix))


def spectral_norm(T: TruncatedOperator, tol: float = 1e-12) -> float:
    """Largest singular value.

    Dense SVD up to 512 rows/columns; above that, power iteration on T*T.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if 0 in T.shape:
        return 0.0
    if max(T.shape) <= SVD_MAX_DIM:
        return float(np.linalg.svd(T.matrix, compute_uv=False)[0])
    return power_iteration_norm(T.matrix, tol)


def power_iteration_norm(m: np.ndarray, tol: float = 1e-12, max_iter: int = 100_000) -> float:
    """Largest singular value of ``m`` by power iteration on m*m.

    Starts from the normalized all-ones vector.  If that start is (numerically)
    orthogonal to the dominant singular space the iterate collapses; the first
    coordinate is then perturbed by 1e-3 and the iteration restarted once.
    """
    n = m.shape[1]
    if not np.any(m):
        return 0.0
    start = np.ones(n, dtype=complex) / np.sqrt(n)
    for attempt in range(2):
        v = start.copy()
        sigma = 0.0
        for _ in range(max_iter):
            u = m.conj().T @ (m @ v)
            lam = float(np.linalg.norm(u))
            if lam == 0.0:
                break
            v = u / lam
            new_sigma = np.sqrt(lam)
            if abs(new_sigma - sigma) <= tol * new_sigma:
                sigma = new_sigma
                break
            sigma = new_sigma
        else:
            LOGGER.warning("power iteration did not converge to tol=%g", tol)
        if sigma > 0.0:
            return float(sigma)
        start = start.copy()
        start[0] += 1e-3
        start /= np.linalg.norm(start)
    return 0.0


def flip_reindex(T: TruncatedOperator) -> TruncatedOperator:
    """Compose a plus→minus operator on the integer line with the flip J.

    J sends χ̄_j to χ_{j-1}, so the row labelled ξ = j becomes row j - 1.
    """
    if T.group.kind != "integer":
        raise ValueError("the flip operator is only defined on the integer line")
    if T.row_side == MINUS:
        return TruncatedOperator(T.group, tuple(r - 1 for r in T.rows), T.cols, T.matrix, PLUS, T.col_side)
    if T.row_side == PLUS:
        if T.rows and T.rows[0] < 0:
            raise ValueError("row labels out of range for the flip")
        return TruncatedOperator(T.group, tuple(r + 1 for r in T.rows), T.cols, T.matrix, MINUS, T.col_side)
    raise ValueError(f"unknown row side {T.row_side!r}")
