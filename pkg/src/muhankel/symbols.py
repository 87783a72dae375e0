"""Semicharacters, symbol functions and moment sequences on the positive cone."""

from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Dict, Iterable, Mapping, Optional, Tuple, Union

import numpy as np

from .ordered_group import (
    DYADIC,
    INTEGER,
    LEX,
    ConeWindow,
    Element,
    GroupDescriptor,
    cyclic_power,
    first_positive,
)

if TYPE_CHECKING:
    from .integral_examples import DiskMeasure

GENERATOR_POWERS = "generator_powers"
GEOMETRIC = "geometric"
CYCLIC = "cyclic"
DYADIC_POWER = "dyadic_power"

FORMS = (GENERATOR_POWERS, GEOMETRIC, CYCLIC, DYADIC_POWER)


@dataclass(frozen=True)
class Semicharacter:
    """A non-null multiplicative map from the cone X+ into C.

    ``params`` holds one complex number per lattice generator for
    ``generator_powers`` and a single base ``q`` for the other forms.
    """

    group: GroupDescriptor
    form: str
    params: Tuple[complex, ...]

    def __post_init__(self):
        params = tuple(complex(p) for p in self.params)
        object.__setattr__(self, "params", params)
        g = self.group
        if self.form not in FORMS:
            raise ValueError(f"unknown semicharacter form {self.form!r}")
        if self.form == GENERATOR_POWERS:
            if g.kind not in (INTEGER, LEX):
                raise ValueError("generator_powers needs an integer lattice")
            if len(params) != g.dim:
                raise ValueError(f"expected {g.dim} generator values, got {len(params)}")
            # zero generators must form a prefix, otherwise q_j**x_j with x_j < 0 is undefined
            seen_nonzero = False
            for p in params:
                if p != 0:
                    seen_nonzero = True
                elif seen_nonzero:
                    raise ValueError("zero generator values must precede all non-zero ones")
            return
        if len(params) != 1:
            raise ValueError(f"{self.form} takes a single parameter q")
        q = params[0]
        if self.form == GEOMETRIC and g.kind != INTEGER:
            raise ValueError("geometric semicharacters live on the integer line")
        if self.form == CYCLIC and first_positive(g) is None:
            raise ValueError(f"{g} has no first positive element")
        if self.form == DYADIC_POWER:
            if g.kind != DYADIC:
                raise ValueError("dyadic_power semicharacters live on the dyadic line")
            if q.imag == 0 and q.real <= 0:
                raise ValueError("q must avoid the branch cut (-inf, 0]")

    @property
    def q(self) -> complex:
        return self.params[-1]

    def __call__(self, x: Element) -> complex:
        g = self.group
        g.validate(x)
        if not g.is_positive(x):
            raise ValueError(f"semicharacters are defined on the cone only, got {g.label(x)}")
        if self.form == GEOMETRIC:
            return self.q ** x
        if self.form == CYCLIC:
            n = cyclic_power(x, g)
            return 0j if n is None else self.q ** n
        if self.form == DYADIC_POWER:
            if x.num == 0:
                return 1 + 0j
            return cmath.exp(float(x) * cmath.log(self.q))
        coords = (x,) if g.kind == INTEGER else x
        value = 1 + 0j
        for p, m in zip(self.params, coords):
            if m == 0:
                continue
            if p == 0:
                # leading coordinate lands in the vanishing ideal
                return 0j
            value *= p ** m
        return value

    def values(self, elements: Iterable[Element]) -> np.ndarray:
        return np.array([self(x) for x in elements], dtype=complex)

    def is_unimodular_on(self, elements: Iterable[Element], tol: float = 1e-12) -> bool:
        return all(abs(abs(self(x)) - 1.0) <= tol for x in elements)

    def l2_norm_closed_form(self, exclude_identity: bool = False) -> float:
        """ℓ² norm over the whole cone; ``math.inf`` when the series diverges."""
        g = self.group
        if self.form in (GEOMETRIC, CYCLIC):
            r = abs(self.q)
        elif self.form == DYADIC_POWER:
            return math.inf
        else:
            lead = next((i for i, p in enumerate(self.params) if p != 0), None)
            if lead is None:
                return 0.0 if exclude_identity else 1.0
            if lead < len(self.params) - 1:
                return math.inf
            r = abs(self.params[-1])
        if r >= 1:
            return math.inf
        total = 1.0 / (1.0 - r * r)
        return math.sqrt(total - 1.0 if exclude_identity else total)

    def __truediv__(self, other: "Semicharacter") -> "Semicharacter":
        """Pointwise quotient ``mu / nu`` for a nowhere-vanishing ``other``."""
        if self.group != other.group:
            raise ValueError("semicharacters on different groups")
        g = self.group
        if other.form == CYCLIC or (other.form == GENERATOR_POWERS and 0 in other.params):
            raise ValueError("divisor must not vanish on the cone")
        if self.form == other.form and self.form in (GEOMETRIC, GENERATOR_POWERS):
            return Semicharacter(g, self.form, tuple(a / b for a, b in zip(self.params, other.params)))
        if self.form == DYADIC_POWER and other.form == DYADIC_POWER:
            q = self.q / other.q
            if abs(cmath.log(q) - (cmath.log(self.q) - cmath.log(other.q))) > 1e-12:
                raise ValueError("quotient crosses the principal branch")
            return Semicharacter(g, DYADIC_POWER, (q,))
        if self.form == CYCLIC:
            chi1 = first_positive(g)
            return Semicharacter(g, CYCLIC, (self.q / other(chi1),))
        raise ValueError(f"cannot divide {self.form} by {other.form}")


def geometric(q: complex) -> Semicharacter:
    from .ordered_group import integer_line
    return Semicharacter(integer_line(), GEOMETRIC, (q,))


def generator_powers(g: GroupDescriptor, qs) -> Semicharacter:
    return Semicharacter(g, GENERATOR_POWERS, tuple(qs))


def cyclic_supported(g: GroupDescriptor, q: complex) -> Semicharacter:
    return Semicharacter(g, CYCLIC, (q,))


def dyadic_power(q: complex) -> Semicharacter:
    from .ordered_group import dyadic_line
    return Semicharacter(dyadic_line(), DYADIC_POWER, (q,))


def trivial(g: GroupDescriptor) -> Semicharacter:
    """The constant semicharacter 1."""
    if g.kind == DYADIC:
        return dyadic_power(1.0)
    return generator_powers(g, (1.0,) * g.dim)


def moments(measure: "DiskMeasure", n_max: int) -> "MomentSequence":
    """Moments γ_n = Σ w_i ζ_i^n, n = 0..n_max, of an atomic measure."""
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    return MomentSequence(_atomic_moments(measure.atoms, n_max), source=measure)


def _atomic_moments(atoms, n_max: int) -> np.ndarray:
    out = np.zeros(n_max + 1, dtype=complex)
    for zeta, w in atoms:
        p = complex(w)
        z = complex(zeta)
        for n in range(n_max + 1):
            out[n] += p
            p *= z
    return out


class MomentSequence:
    """Moments of a disk measure, or an explicit finite list.

    With a source measure the sequence extends itself on demand; the extension
    recomputes from index 0 so earlier values never change.
    """

    def __init__(self, values, source: Optional["DiskMeasure"] = None):
        self._values = np.asarray(values, dtype=complex)
        self.source = source
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._values)

    @property
    def values(self) -> np.ndarray:
        return self._values.copy()

    def ensure(self, n: int) -> None:
        if n < len(self._values):
            return
        if self.source is None:
            raise IndexError(f"explicit moment list has no entry {n}")
        with self._lock:
            if n >= len(self._values):
                self._values = _atomic_moments(self.source.atoms, max(n, 2 * len(self._values)))

    def __getitem__(self, n: int) -> complex:
        if n < 0:
            raise IndexError("moments are indexed by n >= 0")
        self.ensure(n)
        return complex(self._values[n])

    def l2_norm(self) -> float:
        """ℓ²(Z+) norm of the full sequence.

        For measures on the open disk this is the closed form
        Σ_ij w_i conj(w_j) / (1 - ζ_i conj(ζ_j)); a non-zero atom on the
        circle makes the sequence non-summable.
        """
        if self.source is None:
            return float(np.sqrt(np.sum(np.abs(self._values) ** 2)))
        atoms = [(complex(z), complex(w)) for z, w in self.source.atoms if w != 0]
        if any(abs(z) >= 1 for z, _ in atoms):
            return math.inf
        total = 0j
        for zi, wi in atoms:
            for zj, wj in atoms:
                total += wi * wj.conjugate() / (1 - zi * zj.conjugate())
        return math.sqrt(max(total.real, 0.0))


class SymbolFunction:
    """A function a on X+ minus the identity."""

    group: GroupDescriptor

    def _check(self, x: Element) -> None:
        g = self.group
        g.validate(x)
        if not g.is_strictly_positive(x):
            raise ValueError(f"symbols are defined on strictly positive elements, got {g.label(x)}")

    def __call__(self, x: Element) -> complex:
        raise NotImplementedError

    def support(self) -> Optional[Tuple[Element, ...]]:
        """Sorted support, or ``None`` when it is not finite."""
        return None

    def l2_norm(self) -> float:
        raise NotImplementedError

    def l2_norm_window(self, elements: Iterable[Element]) -> float:
        vals = [abs(self(x)) ** 2 for x in elements if self.group.is_strictly_positive(x)]
        return math.sqrt(sum(vals))

    def supported_in_cyclic_cone(self) -> bool:
        raise NotImplementedError

    def materialize(self, elements: Iterable[Element]) -> "SparseSymbol":
        g = self.group
        entries = {}
        for x in elements:
            if g.is_strictly_positive(x):
                v = self(x)
                if v != 0:
                    entries[x] = v
        return SparseSymbol(g, entries)

    def scaled(self, nu: Semicharacter, elements: Optional[Iterable[Element]] = None) -> "SparseSymbol":
        """The symbol ξ ↦ a(ξ)·ν(ξ), materialized on ``elements`` (default: the support)."""
        if elements is None:
            elements = self.support()
            if elements is None:
                raise ValueError("infinite support: pass the elements to materialize")
        g = self.group
        entries = {}
        for x in elements:
            if g.is_strictly_positive(x):
                v = self(x) * nu(x)
                if v != 0:
                    entries[x] = v
        return SparseSymbol(g, entries)


class SparseSymbol(SymbolFunction):
    def __init__(self, group: GroupDescriptor, entries: Mapping[Element, complex]):
        self.group = group
        clean: Dict[Element, complex] = {}
        for x, v in entries.items():
            self._check(x)
            v = complex(v)
            if v != 0:
                clean[x] = v
        self.entries = clean

    def __call__(self, x: Element) -> complex:
        self._check(x)
        return self.entries.get(x, 0j)

    def support(self):
        return tuple(sorted(self.entries))

    def l2_norm(self) -> float:
        return math.sqrt(sum(abs(self.entries[x]) ** 2 for x in self.support()))

    def supported_in_cyclic_cone(self) -> bool:
        return all(cyclic_power(x, self.group) is not None for x in self.entries)

    def __repr__(self):
        return f"SparseSymbol({self.group}, {len(self.entries)} entries)"


class MomentSymbol(SymbolFunction):
    """a(k) = γ_{k-1} on the integer line."""

    def __init__(self, moments: MomentSequence):
        from .ordered_group import integer_line
        self.group = integer_line()
        self.moments = moments

    def __call__(self, x: Element) -> complex:
        self._check(x)
        return self.moments[x - 1]

    def support(self):
        if self.moments.source is not None:
            return None
        return tuple(k + 1 for k, v in enumerate(self.moments.values) if v != 0)

    def l2_norm(self) -> float:
        return self.moments.l2_norm()

    def supported_in_cyclic_cone(self) -> bool:
        return True


def sparse(group: GroupDescriptor, entries: Mapping[Element, complex]) -> SparseSymbol:
    return SparseSymbol(group, entries)


def delta(group: GroupDescriptor, x: Element, value: complex = 1.0) -> SparseSymbol:
    return SparseSymbol(group, {x: value})


def from_function(group: GroupDescriptor, f: Callable[[Element], complex],
                  elements: Iterable[Element]) -> SparseSymbol:
    return SparseSymbol(group, {x: f(x) for x in elements if group.is_strictly_positive(x)})


def l2_norm_on_cone(f: Union[Semicharacter, SymbolFunction], w: ConeWindow,
                    exclude_identity: bool = False) -> float:
    """Windowed ℓ² norm, summed in window order."""
    elems = w.positives if exclude_identity or isinstance(f, SymbolFunction) else w.elements
    total = 0.0
    for x in elems:
        total += abs(f(x)) ** 2
    return math.sqrt(total)
