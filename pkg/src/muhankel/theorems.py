"""Residual checkers, norm-bound validators, series reconstructions and
Neumann-series solvers for μ-, ν- and (μ;ν)-Hankel operators.

All checks act on window truncations.  Shifts drop whatever leaves the
window, so identities are only asserted on *interior* entries, i.e. those
whose shifted indices stay inside the window.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from .operator_core import (
    MINUS,
    PLUS,
    TruncatedOperator,
    WindowVector,
    adjoint,
    build_mu_nu_hankel,
    nuclear_norm,
    rank_one,
    shift_matrix,
    spectral_norm,
)
from .ordered_group import ConeWindow, Element, cyclic_power, first_positive
from .symbols import Semicharacter, SymbolFunction, cyclic_supported, l2_norm_on_cone

LOGGER = logging.getLogger(__name__)

INTERIOR_WARNING = 0.5


class SupportError(ValueError):
    """The symbol violates the support condition forced by |μ(χ₁)| > 1."""


@dataclass
class ResidualReport:
    operation: str
    max_abs_residual: float
    num_entries_checked: int
    interior_fraction: float
    tolerance: float
    passed: bool
    params: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "operation": self.operation,
            "params": self.params,
            "max_abs_residual": self.max_abs_residual,
            "num_entries_checked": self.num_entries_checked,
            "interior_fraction": self.interior_fraction,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass
class BoundCheck:
    operation: str
    norm: float
    bound: float
    tolerance: float
    passed: bool
    note: str = ""
    params: Dict[str, Any] = field(default_factory=dict)

    def __iter__(self):
        # unpacks as (norm, bound, pass)
        return iter((self.norm, self.bound, self.passed))

    def to_dict(self) -> dict:
        return {
            "operation": self.operation,
            "params": self.params,
            "norm": self.norm,
            "bound": _json_float(self.bound),
            "tolerance": self.tolerance,
            "pass": self.passed,
            "note": self.note,
        }


def _json_float(x: float):
    return "inf" if math.isinf(x) else x


def _interior_report(operation, lhs, rhs, row_mask, col_mask, tol, params) -> ResidualReport:
    diff = np.abs(lhs - rhs)[np.ix_(row_mask, col_mask)]
    checked = int(diff.size)
    total = lhs.size
    frac = checked / total if total else 0.0
    if total and frac < INTERIOR_WARNING:
        LOGGER.warning("%s: only %.0f%% of entries are interior; window may be too small",
                       operation, 100 * frac)
    resid = float(diff.max()) if checked else 0.0
    return ResidualReport(operation, resid, checked, frac, tol, resid <= tol, params)


def _chi_label(w: ConeWindow, chi: Element) -> str:
    return w.group.label(chi)


def _check_frame(A: TruncatedOperator, w: ConeWindow) -> None:
    if A.rows != w.positives or A.cols != w.elements:
        raise ValueError("operator is not indexed by the given window")


def check_generalized_hankel_equation(A: TruncatedOperator, mu: Semicharacter, chi: Element,
                                      w: ConeWindow, tol: float = 1e-12) -> ResidualReport:
    """Residual of ``A S_χ - μ(χ) P₋𝒮_χ A`` on interior entries."""
    _check_frame(A, w)
    g = w.group
    S = shift_matrix(chi, PLUS, w)
    P = shift_matrix(chi, "compressed", w)
    lhs = (A @ S).matrix
    rhs = mu(chi) * (P @ A).matrix
    row_mask = np.array([g.add(x, chi) in w for x in w.positives], dtype=bool)
    col_mask = np.array([g.add(x, chi) in w for x in w.elements], dtype=bool)
    return _interior_report("generalized_hankel_equation", lhs, rhs, row_mask, col_mask, tol,
                            {"chi": _chi_label(w, chi), "group": str(g)})


def check_nu_equation(B: TruncatedOperator, nu: Semicharacter, chi: Element,
                      w: ConeWindow, tol: float = 1e-12) -> ResidualReport:
    """Residual of ``S_χ̄* B - ν(χ) B S_χ`` on interior entries."""
    _check_frame(B, w)
    g = w.group
    S = shift_matrix(chi, PLUS, w)
    # the adjoint of S_χ̄ on H²₋ is the compressed shift P₋𝒮_χ
    Sbar_adj = shift_matrix(chi, "compressed", w)
    lhs = (Sbar_adj @ B).matrix
    rhs = nu(chi) * (B @ S).matrix
    row_mask = np.array([g.add(x, chi) in w for x in w.positives], dtype=bool)
    col_mask = np.array([g.add(x, chi) in w for x in w.elements], dtype=bool)
    return _interior_report("nu_equation", lhs, rhs, row_mask, col_mask, tol,
                            {"chi": _chi_label(w, chi), "group": str(g)})


def semicharacter_norm(mu: Semicharacter, w: ConeWindow, exclude_identity: bool = False) -> float:
    """Full-cone ℓ² norm when it is finite in closed form, else the window norm."""
    closed = mu.l2_norm_closed_form(exclude_identity)
    if math.isfinite(closed):
        return closed
    return l2_norm_on_cone(mu, w, exclude_identity)


def _bound_check(operation, A, bound, tol, params) -> BoundCheck:
    norm = spectral_norm(A)
    note = "unbounded symbol" if math.isinf(bound) else ""
    return BoundCheck(operation, norm, bound, tol, norm <= bound + tol, note, params)


def check_boundedness_bound(mu: Semicharacter, a: SymbolFunction, w: ConeWindow,
                            tol: float = 1e-10) -> BoundCheck:
    """Truncated ‖A_{μ,a}‖ against ‖μ‖_{ℓ²(X+)} ‖a‖_{ℓ²(X+ \\ χ₀)}.

    The truncated operator only sees μ on the window columns, so the window
    norm of μ is a valid bound when no closed form exists; ``a`` is always
    measured on its full support.
    """
    A = build_mu_nu_hankel(mu, None, a, w)
    mu_norm = semicharacter_norm(mu, w)
    a_norm = a.l2_norm()
    bound = mu_norm * a_norm if a_norm else 0.0
    return _bound_check("boundedness_bound", A, bound, tol,
                        {"mu_norm": _json_float(mu_norm), "a_norm": _json_float(a_norm)})


def check_nu_bound(nu: Semicharacter, a: SymbolFunction, w: ConeWindow,
                   tol: float = 1e-10) -> BoundCheck:
    """Truncated ‖B_{ν,a}‖ against ‖ν‖_{ℓ²(X+ \\ χ₀)} ‖a‖_{ℓ²(X+ \\ χ₀)}."""
    if first_positive(w.group) is None:
        raise ValueError(f"{w.group} has no first positive element; the ν-bound does not apply")
    B = build_mu_nu_hankel(None, nu, a, w)
    nu_norm = semicharacter_norm(nu, w, exclude_identity=True)
    a_norm = a.l2_norm()
    bound = nu_norm * a_norm if a_norm else 0.0
    return _bound_check("nu_bound", B, bound, tol,
                        {"nu_norm": _json_float(nu_norm), "a_norm": _json_float(a_norm)})


@dataclass
class UnimodularFactorization:
    H: TruncatedOperator
    U: TruncatedOperator
    A: TruncatedOperator
    reconstruction_error: float
    unitarity_error: float

    def __iter__(self):
        return iter((self.H, self.U))


def factor_unimodular(mu: Semicharacter, a: SymbolFunction, w: ConeWindow,
                      tol: float = 1e-12) -> UnimodularFactorization:
    """Split A_{μ,a} = H U with H[ξ, χ] = a(χ + ξ) and U = diag(μ(χ))."""
    if not mu.is_unimodular_on(w.elements, tol):
        raise ValueError("semicharacter is not unimodular on the window")
    g = w.group
    H = build_mu_nu_hankel(None, None, a, w)
    U = TruncatedOperator(g, w.elements, w.elements, np.diag(mu.values(w.elements)), PLUS, PLUS)
    A = build_mu_nu_hankel(mu, None, a, w)
    rec = float(np.max(np.abs((H @ U).matrix - A.matrix), initial=0.0))
    UU = (adjoint(U) @ U).matrix
    uni = float(np.max(np.abs(UU - np.eye(len(w))), initial=0.0))
    return UnimodularFactorization(H, U, A, rec, uni)


def default_terms(ratio: float, norm0: float, tol: float) -> int:
    """Smallest N with ratio^N * norm0 / (1 - ratio) <= tol."""
    if norm0 == 0 or ratio == 0:
        return 0
    if not 0 < ratio < 1:
        raise ValueError("series ratio must lie in (0, 1)")
    n = math.ceil(math.log(tol * (1 - ratio) / norm0) / math.log(ratio))
    return max(n, 0)


@dataclass
class NeumannSolution:
    X: TruncatedOperator
    n_terms: int
    operator_norm: float
    tail_bound: float
    residual_norm: float
    report: ResidualReport

    @property
    def ok(self) -> bool:
        return self.residual_norm <= self.tail_bound + 1e-10


def _cyclic_positions(w: ConeWindow, side_index, n_max: int, offset: int = 0):
    """(n, position) for n = 0..n_max whose label (n + offset)·χ₁ is in ``side_index``."""
    g = w.group
    chi1 = first_positive(g)
    pos = {x: i for i, x in enumerate(side_index)}
    out = []
    for n in range(n_max + 1):
        i = pos.get(g.multiple(chi1, n + offset))
        if i is None:
            break
        out.append((n, i))
    return out


def solve_neumann_forward(Q: TruncatedOperator, phi0: WindowVector, w: ConeWindow,
                          n_terms: Optional[int] = None, tol: float = 1e-12) -> NeumannSolution:
    """Series solution X = Σ (Qⁿ φ₀) ⊗ χ₁ⁿ of Q X = X S_{χ₁}.

    ``Q`` acts on the minus side of the window and must have norm < 1.
    """
    g = w.group
    chi1 = first_positive(g)
    if chi1 is None:
        raise ValueError(f"{g} has no first positive element")
    if Q.rows != w.positives or Q.cols != w.positives or phi0.index != w.positives:
        raise ValueError("Q and phi0 must live on the minus side of the window")
    qn = spectral_norm(Q)
    if qn >= 1:
        raise ValueError(f"‖Q‖ = {qn:.6g} >= 1: the Neumann series does not apply")
    p0 = phi0.norm()
    if n_terms is None:
        n_terms = default_terms(qn, p0, tol)
    X = np.zeros((len(w.positives), len(w)), dtype=complex)
    v = phi0.coeffs.copy()
    for n, j in _cyclic_positions(w, w.elements, n_terms):
        if n:
            v = Q.matrix @ v
        X[:, j] = v
    Xop = TruncatedOperator(g, w.positives, w.elements, X, MINUS, PLUS)
    S = shift_matrix(chi1, PLUS, w)
    resid = (Q @ Xop).matrix - (Xop @ S).matrix
    col_mask = np.array([g.add(x, chi1) in w for x in w.elements], dtype=bool)
    row_mask = np.ones(len(w.positives), dtype=bool)
    tail = qn ** (n_terms + 1) * p0 / (1 - qn)
    rnorm = _block_norm(resid, row_mask, col_mask)
    report = _interior_report("neumann_forward", resid, np.zeros_like(resid), row_mask, col_mask,
                              tail + 1e-10, {"operator_norm": qn, "n_terms": n_terms})
    return NeumannSolution(Xop, n_terms, qn, tail, rnorm, report)


def solve_neumann_backward(R: TruncatedOperator, psi1: WindowVector, w: ConeWindow,
                           n_terms: Optional[int] = None, tol: float = 1e-12) -> NeumannSolution:
    """Series solution Y = Σ (Rⁿ ψ₁) ⊗ χ̄₁^{n+1} of R Y = Y S_{χ̄₁}.

    ``R`` acts on the plus side of the window and must have norm < 1.
    """
    g = w.group
    chi1 = first_positive(g)
    if chi1 is None:
        raise ValueError(f"{g} has no first positive element")
    if R.rows != w.elements or R.cols != w.elements or psi1.index != w.elements:
        raise ValueError("R and psi1 must live on the plus side of the window")
    rn = spectral_norm(R)
    if rn >= 1:
        raise ValueError(f"‖R‖ = {rn:.6g} >= 1: the Neumann series does not apply")
    p1 = psi1.norm()
    if n_terms is None:
        n_terms = default_terms(rn, p1, tol)
    Y = np.zeros((len(w), len(w.positives)), dtype=complex)
    v = psi1.coeffs.copy()
    for n, j in _cyclic_positions(w, w.positives, n_terms, offset=1):
        if n:
            v = R.matrix @ v
        Y[:, j] = v
    Yop = TruncatedOperator(g, w.elements, w.positives, Y, PLUS, MINUS)
    S = shift_matrix(chi1, MINUS, w)
    resid = (R @ Yop).matrix - (Yop @ S).matrix
    col_mask = np.array([g.add(x, chi1) in w for x in w.positives], dtype=bool)
    row_mask = np.ones(len(w), dtype=bool)
    tail = rn ** (n_terms + 1) * p1 / (1 - rn)
    rnorm = _block_norm(resid, row_mask, col_mask)
    report = _interior_report("neumann_backward", resid, np.zeros_like(resid), row_mask, col_mask,
                              tail + 1e-10, {"operator_norm": rn, "n_terms": n_terms})
    return NeumannSolution(Yop, n_terms, rn, tail, rnorm, report)


def _block_norm(m, row_mask, col_mask) -> float:
    block = m[np.ix_(row_mask, col_mask)]
    if block.size == 0:
        return 0.0
    return float(np.linalg.svd(block, compute_uv=False)[0])


def phi_vector(a: SymbolFunction, n: int, w: ConeWindow) -> WindowVector:
    """Coefficients <φ_n, ξ̄> = a(χ₁ⁿ ξ) over the minus side of the window."""
    g = w.group
    shift = g.multiple(first_positive(g), n)
    coeffs = [a(g.add(shift, xi)) for xi in w.positives]
    return WindowVector(g, MINUS, w.positives, np.array(coeffs, dtype=complex))


def psi_vector(mu: Semicharacter, a: SymbolFunction, n: int, w: ConeWindow) -> WindowVector:
    """Coefficients <ψ_n, χ> = conj(μ(χ₁^{n-1} χ) a(χ₁ⁿ χ)) over the plus side of the window."""
    g = w.group
    chi1 = first_positive(g)
    lo, hi = g.multiple(chi1, n - 1), g.multiple(chi1, n)
    coeffs = [(mu(g.add(lo, c)) * a(g.add(hi, c))).conjugate() for c in w.elements]
    return WindowVector(g, PLUS, w.elements, np.array(coeffs, dtype=complex))


def psi1_norm(mu: Semicharacter, a: SymbolFunction, elements=None) -> float:
    """Full-support ‖ψ₁‖ = (Σ_s |μ(s - χ₁)|² |a(s)|²)^{1/2} over the support of ``a``."""
    g = a.group
    chi1 = first_positive(g)
    support = a.support() if elements is None else elements
    if support is None:
        raise ValueError("infinite support: pass the elements to sum over")
    total = 0.0
    for s in support:
        if g.compare(s, chi1) >= 0:
            total += abs(mu(g.sub(s, chi1)) * a(s)) ** 2
    return math.sqrt(total)


def small_mu_bound(q: complex, a: SymbolFunction) -> float:
    """‖φ₀‖ / (1 - |q|) with ‖φ₀‖ = ‖a‖."""
    return a.l2_norm() / (1 - abs(q))


def large_mu_bound(mu: Semicharacter, a: SymbolFunction, elements=None) -> float:
    """|μ(χ₁)| ‖ψ₁‖ / (|μ(χ₁)| - 1)."""
    m1 = abs(mu(first_positive(mu.group)))
    return m1 * psi1_norm(mu, a, elements) / (m1 - 1)


def reconstruct_small_mu(q: complex, a: SymbolFunction, w: ConeWindow,
                         n_terms: Optional[int] = None, tol: float = 1e-12) -> TruncatedOperator:
    """Σ qⁿ φ_n ⊗ χ₁ⁿ, the rank-one series of a μ-Hankel operator with |μ(χ₁)| < 1.

    Agrees with ``build_mu_nu_hankel(cyclic_supported(q), None, a, w)``.
    """
    g = w.group
    if first_positive(g) is None:
        raise ValueError(f"{g} has no first positive element")
    q = complex(q)
    if abs(q) >= 1:
        raise ValueError(f"|q| = {abs(q):.6g} >= 1")
    if n_terms is None:
        n_terms = default_terms(abs(q), a.l2_norm(), tol)
    out = np.zeros((len(w.positives), len(w)), dtype=complex)
    for n, j in _cyclic_positions(w, w.elements, n_terms):
        e = np.zeros(len(w), dtype=complex)
        e[j] = 1.0
        term = rank_one(phi_vector(a, n, w), WindowVector(g, PLUS, w.elements, e))
        out += q ** n * term.matrix
    return TruncatedOperator(g, w.positives, w.elements, out, MINUS, PLUS)


def reconstruct_large_mu(mu: Semicharacter, a: SymbolFunction, w: ConeWindow,
                         n_terms: Optional[int] = None, tol: float = 1e-12) -> TruncatedOperator:
    """Σ_{n>=1} μ(χ₁)^{-(n-1)} χ̄₁ⁿ ⊗ ψ_n for |μ(χ₁)| > 1.

    ``a`` must vanish off the cyclic cone {χ₁ⁿ : n >= 1}; this is necessary
    for boundedness when |μ(χ₁)| > 1, so violations raise :class:`SupportError`.
    """
    g = w.group
    chi1 = first_positive(g)
    if chi1 is None:
        raise ValueError(f"{g} has no first positive element")
    m1 = mu(chi1)
    if abs(m1) <= 1:
        raise ValueError(f"|mu(chi_1)| = {abs(m1):.6g} <= 1")
    if not a.supported_in_cyclic_cone():
        bad = [g.label(x) for x in a.support() if cyclic_power(x, g) is None][:5]
        raise SupportError(
            "a bounded mu-Hankel operator with |mu(chi_1)| > 1 has its symbol supported on "
            f"the cyclic cone {{n*chi_1 : n >= 1}}; found support at {', '.join(bad)}")
    if n_terms is None:
        support = a.support()
        if support is None:
            support = w.sumset()
        norm1 = psi1_norm(mu, a, support)
        n_terms = max(default_terms(1 / abs(m1), norm1, tol), 1)
    out = np.zeros((len(w.positives), len(w)), dtype=complex)
    for k, i in _cyclic_positions(w, w.positives, n_terms - 1, offset=1):
        n = k + 1
        e = np.zeros(len(w.positives), dtype=complex)
        e[i] = 1.0
        term = rank_one(WindowVector(g, MINUS, w.positives, e), psi_vector(mu, a, n, w))
        out += m1 ** (-(n - 1)) * term.matrix
    return TruncatedOperator(g, w.positives, w.elements, out, MINUS, PLUS)


def check_duality(mu: Semicharacter, nu: Semicharacter, a: SymbolFunction, w: ConeWindow,
                  tol: float = 1e-12) -> ResidualReport:
    """A_{(μ;ν),a} against A_{(μ/ν;1),aν} for nowhere-vanishing ν."""
    lhs = build_mu_nu_hankel(mu, nu, a, w)
    rhs = build_mu_nu_hankel(mu / nu, None, a.scaled(nu, w.sumset()), w)
    rows = np.ones(len(w.positives), dtype=bool)
    cols = np.ones(len(w), dtype=bool)
    return _interior_report("duality", lhs.matrix, rhs.matrix, rows, cols, tol, {"group": str(w.group)})


def series_report(name: str, series: TruncatedOperator, direct: TruncatedOperator,
                  bound: float, tol: float = 1e-10) -> dict:
    err = float(np.max(np.abs(series.matrix - direct.matrix), initial=0.0))
    nn = nuclear_norm(series)
    sn = spectral_norm(series)
    return {
        "operation": name,
        "max_abs_residual": err,
        "spectral_norm": sn,
        "nuclear_norm": nn,
        "bound": bound,
        "pass": err <= tol and sn <= nn + 1e-12 and nn <= bound + 1e-8,
    }


def off_cyclic_columns(A: TruncatedOperator) -> np.ndarray:
    g = A.group
    idx = [j for j, c in enumerate(A.cols) if cyclic_power(c, g) is None]
    return A.matrix[:, idx]


def off_cyclic_rows(A: TruncatedOperator) -> np.ndarray:
    g = A.group
    idx = [i for i, r in enumerate(A.rows) if cyclic_power(r, g) is None]
    return A.matrix[idx, :]


def small_mu_direct(q: complex, a: SymbolFunction, w: ConeWindow) -> TruncatedOperator:
    return build_mu_nu_hankel(cyclic_supported(w.group, q), None, a, w)
