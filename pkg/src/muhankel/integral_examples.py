"""Cauchy-type integral operators on the circle group for atomic disk measures.

For an atomic measure σ = Σ w_i δ_{ζ_i} on the disk and a complex q:

* kind ``"A"``  (|q| <= 1):  𝐀f(z) = ∫ f(qζ) / (z - ζ) dσ(ζ)
* kind ``"B"``  (|q| > 1):   𝐁f(z) = ∫ f(ζ) / (qz - ζ) dτ(ζ)

Both have explicit matrices in the bases {χ_k}_{k>=0} and {χ̄_j}_{j>=1}
built from the moments γ_n = Σ w_i ζ_i^n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .operator_core import (
    MINUS,
    PLUS,
    TruncatedOperator,
    build_mu_nu_hankel,
    flip_reindex,
    spectral_norm,
    trace,
)
from .ordered_group import ConeWindow, INTEGER, integer_window
from .symbols import MomentSequence, MomentSymbol, geometric, moments

OPEN = "open"
CLOSED = "closed"

# slack for atoms placed exactly on the unit circle
_CIRCLE_SLACK = 1e-15


@dataclass(frozen=True)
class DiskMeasure:
    """A finite complex atomic measure Σ w_i δ_{ζ_i}."""

    atoms: Tuple[Tuple[complex, complex], ...]
    domain: str = OPEN

    def __post_init__(self):
        atoms = tuple((complex(z), complex(w)) for z, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if self.domain not in (OPEN, CLOSED):
            raise ValueError(f"unknown disk domain {self.domain!r}")
        for z, _ in atoms:
            if self.domain == OPEN and abs(z) >= 1:
                raise ValueError(f"atom {z} is not inside the open unit disk")
            if self.domain == CLOSED and abs(z) > 1 + _CIRCLE_SLACK:
                raise ValueError(f"atom {z} lies outside the closed unit disk")

    @property
    def total_variation(self) -> float:
        return sum(abs(w) for _, w in self.atoms)

    @property
    def margin(self) -> float:
        """Distance 1 - max|ζ_i| from the atoms to the unit circle."""
        if not self.atoms:
            return 1.0
        return 1.0 - max(abs(z) for z, _ in self.atoms)

    def carleson_sum(self) -> float:
        """Σ |w_i| / (1 - |ζ_i|), finite for every open-disk atomic measure."""
        return sum(abs(w) / (1 - abs(z)) for z, w in self.atoms)

    def is_positive_on_interval(self) -> bool:
        return all(z.imag == 0 and -1 < z.real < 1 and w.imag == 0 and w.real > 0
                   for z, w in self.atoms)

    def moments(self, n_max: int) -> MomentSequence:
        return moments(self, n_max)


def point_mass(zeta: complex, weight: complex = 1.0, domain: str = OPEN) -> DiskMeasure:
    return DiskMeasure(((zeta, weight),), domain)


@dataclass(frozen=True)
class CauchySpec:
    kind: str
    q: complex
    measure: DiskMeasure

    def __post_init__(self):
        object.__setattr__(self, "q", complex(self.q))
        if self.kind == "A":
            if abs(self.q) > 1:
                raise ValueError(f"kind A needs |q| <= 1, got |q| = {abs(self.q):.6g}")
            if self.measure.domain != OPEN:
                raise ValueError("kind A integrates over the open disk")
        elif self.kind == "B":
            if abs(self.q) <= 1:
                raise ValueError(f"kind B needs |q| > 1, got |q| = {abs(self.q):.6g}")
        else:
            raise ValueError(f"unknown Cauchy operator kind {self.kind!r}")

    @property
    def unimodular(self) -> bool:
        return self.kind == "A" and abs(abs(self.q) - 1) <= 1e-15


def _require_integer(w: ConeWindow) -> None:
    if w.group.kind != INTEGER:
        raise ValueError("Cauchy operators act on the circle group (integer dual)")


def moment_symbol(measure: DiskMeasure) -> MomentSymbol:
    return MomentSymbol(measure.moments(0))


def matrix_of_A(spec: CauchySpec, w: ConeWindow) -> TruncatedOperator:
    """M[j, k] = q^k γ_{k+j-1}; the μ-Hankel matrix with μ(k) = q^k, a(k) = γ_{k-1}."""
    if spec.kind != "A":
        raise ValueError("matrix_of_A needs a kind-A spec")
    _require_integer(w)
    return build_mu_nu_hankel(geometric(spec.q), None, moment_symbol(spec.measure), w)


def matrix_of_B(spec: CauchySpec, w: ConeWindow) -> TruncatedOperator:
    """M[j, k] = q^{-j} γ_{j+k-1}; the ν-Hankel matrix with ν(j) = q^{-j}."""
    if spec.kind != "B":
        raise ValueError("matrix_of_B needs a kind-B spec")
    _require_integer(w)
    return build_mu_nu_hankel(None, geometric(1 / spec.q), moment_symbol(spec.measure), w)


def norm_bound_A(spec: CauchySpec) -> float:
    """‖γ‖_{ℓ²} / sqrt(1 - |q|²)."""
    if abs(spec.q) >= 1:
        return math.inf
    return spec.measure.moments(0).l2_norm() / math.sqrt(1 - abs(spec.q) ** 2)


def norm_bound_B(spec: CauchySpec) -> float:
    """‖γ‖_{ℓ²} / sqrt(|q|² - 1)."""
    return spec.measure.moments(0).l2_norm() / math.sqrt(abs(spec.q) ** 2 - 1)


def oracle_fourier_sampling(spec: CauchySpec, k: int, n_coeffs: int, m_samples: Optional[int] = None,
                            min_margin: float = 0.05) -> np.ndarray:
    """Coefficients of χ̄_1..χ̄_{n_coeffs} in 𝐀χ_k, by sampling the kernel on the circle.

    𝐀χ_k(z) = Σ_i w_i (qζ_i)^k / (z - ζ_i) is evaluated at ``m_samples``
    equispaced points and transformed with the trapezoid-rule DFT.  The
    integrand is analytic outside |z| = 1 - δ, so aliasing decays like
    (1 - δ)^{m_samples - n_coeffs}.
    """
    if spec.kind != "A":
        raise ValueError("the sampling oracle targets kind-A operators")
    if spec.measure.margin < min_margin - 1e-12:
        raise ValueError(f"atoms within {spec.measure.margin:.3g} of the circle; "
                         f"the oracle needs a margin of at least {min_margin}")
    if m_samples is None:
        decay = 1.0 - spec.measure.margin
        alias = math.ceil(math.log(1e-14) / math.log(decay)) if decay > 0 else 0
        m_samples = max(4 * (n_coeffs + 1), n_coeffs + alias)
    if m_samples < 4 * n_coeffs:
        raise ValueError("need at least 4 samples per coefficient")
    t = 2 * np.pi * np.arange(m_samples) / m_samples
    z = np.exp(1j * t)
    f = np.zeros(m_samples, dtype=complex)
    for zeta, w in spec.measure.atoms:
        f += w * (spec.q * zeta) ** k / (z - zeta)
    # coefficient of z^{-j} is (1/M) Σ_m f(z_m) z_m^j
    c = np.fft.ifft(f)
    return c[1:n_coeffs + 1]


class TraceValues(NamedTuple):
    series: complex
    closed_form: complex
    matrix: Optional[complex] = None


def _geometric_series(term, ratio: float, scale: float, cutoff: float = 1e-14,
                      max_terms: int = 100_000) -> complex:
    """Sum term(k) until the term and its geometric majorant scale·ratio^k drop below ``cutoff``."""
    total = 0j
    for k in range(max_terms):
        t = term(k)
        total += t
        if abs(t) < cutoff and scale * ratio ** k < cutoff:
            break
    return total


def trace_JA(spec: CauchySpec, w: Optional[ConeWindow] = None) -> TraceValues:
    """tr(J𝐀) as Σ q^k γ_{2k}, as Σ w_i / (1 - q ζ_i²), and (optionally) from the flipped matrix."""
    if spec.kind != "A" or abs(spec.q) >= 1:
        raise ValueError("trace of J𝐀 needs a kind-A spec with |q| < 1")
    gam = spec.measure.moments(0)
    tv = spec.measure.total_variation
    r = abs(spec.q) * (1 - spec.measure.margin) ** 2
    series = _geometric_series(lambda k: spec.q ** k * gam[2 * k], r, tv)
    closed = sum(wi / (1 - spec.q * z * z) for z, wi in spec.measure.atoms)
    mat = None
    if w is not None:
        JA = flip_reindex(matrix_of_A(spec, w))
        mat = trace(JA.restrict(cols=JA.rows))
    return TraceValues(series, complex(closed), mat)


def trace_JB(spec: CauchySpec, w: Optional[ConeWindow] = None) -> TraceValues:
    """tr(J𝐁) as Σ q^{-(k+1)} γ_{2k} and as Σ w_i / (q - ζ_i²)."""
    if spec.kind != "B":
        raise ValueError("trace of J𝐁 needs a kind-B spec")
    gam = spec.measure.moments(0)
    tv = spec.measure.total_variation
    r = 1 / abs(spec.q)
    series = _geometric_series(lambda k: gam[2 * k] / spec.q ** (k + 1), r, tv)
    closed = sum(wi / (spec.q - z * z) for z, wi in spec.measure.atoms)
    mat = None
    if w is not None:
        JB = flip_reindex(matrix_of_B(spec, w))
        mat = trace(JB.restrict(cols=JB.rows))
    return TraceValues(series, complex(closed), mat)


def adjoint_decomposition(spec: CauchySpec, w: ConeWindow) -> Tuple[TruncatedOperator, TruncatedOperator]:
    """Matrices of the two parts of 𝐀* : H²₋ → H², computed from the moments.

    ``B_part[k, j] = conj(q^k γ_{k+j-1})`` for k >= 1 and 0 for k = 0;
    ``C_part`` lives on the χ₀ row only, with ``C_part[0, j] = conj(γ_{j-1})``.
    """
    if spec.kind != "A" or abs(spec.q) >= 1:
        raise ValueError("adjoint decomposition needs a kind-A spec with |q| < 1")
    _require_integer(w)
    rows, cols = w.elements, w.positives
    gam = spec.measure.moments(0)
    q = spec.q
    B = np.zeros((len(rows), len(cols)), dtype=complex)
    C = np.zeros((len(rows), len(cols)), dtype=complex)
    for i, k in enumerate(rows):
        for jj, j in enumerate(cols):
            if k >= 1:
                B[i, jj] = (q ** k * gam[k + j - 1]).conjugate()
            else:
                C[i, jj] = gam[j - 1].conjugate()
    g = w.group
    return (TruncatedOperator(g, rows, cols, B, PLUS, MINUS),
            TruncatedOperator(g, rows, cols, C, PLUS, MINUS))


def unimodular_route_error(spec: CauchySpec, w: ConeWindow) -> float:
    """max |matrix_of_A(q, σ) - matrix_of_A(1, σ) diag(q^k)| for |q| = 1."""
    if not spec.unimodular:
        raise ValueError("the Hankel factorization route needs |q| = 1")
    A = matrix_of_A(spec, w)
    H = matrix_of_A(CauchySpec("A", 1.0, spec.measure), w)
    U = np.diag([spec.q ** k for k in w.elements])
    return float(np.max(np.abs(H.matrix @ U - A.matrix), initial=0.0))


@dataclass
class WidomReport:
    applicable: bool
    b_star: float
    argmax: int
    table: List[Tuple[int, float]]
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "applicable": self.applicable,
            "b_star": self.b_star,
            "argmax": self.argmax,
            "growth_table": [{"window": n, "spectral_norm": v} for n, v in self.table],
            "note": self.note,
        }


def widom_diagnostic(gam: MomentSequence, n_max: int,
                     window_sizes: Sequence[int] = (8, 16, 32, 64)) -> WidomReport:
    """Report b* = max_n γ_n (n + 1) and truncated norms of the Hankel matrix (γ_{j+k-1}).

    The growth criterion only characterizes boundedness for positive measures
    on (-1, 1); otherwise the value is reported without a verdict.
    """
    src = gam.source
    applicable = src is not None and src.is_positive_on_interval()
    note = "" if applicable else "criterion not applicable, Carleson sufficiency out of scope"
    scaled = [(gam[n] * (n + 1)).real if applicable else abs(gam[n]) * (n + 1) for n in range(n_max + 1)]
    argmax = int(np.argmax(scaled))
    table = []
    for n in window_sizes:
        w = integer_window(n)
        H = build_mu_nu_hankel(None, None, MomentSymbol(gam), w)
        table.append((n, spectral_norm(H)))
    return WidomReport(applicable, float(scaled[argmax]), argmax, table, note)
