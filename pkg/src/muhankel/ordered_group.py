"""Exact arithmetic on the ordered dual groups supported by the package.

Three discrete, torsion-free, totally ordered groups are available:

``IntegerLine``
    X = Z with the usual order.  Elements are plain ``int``.
``LexLattice(d)``
    X = Z^d ordered lexicographically, coordinate 1 compared first.
    Elements are ``tuple`` of ``d`` ints.
``DyadicLine``
    X = Z[1/2] with the order of the reals.  Elements are :class:`Dyadic`.

The group law is written additively here: the product of two characters is
the sum of their labels, and complex conjugation is negation.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Iterable, Optional, Sequence, Tuple, Union

INTEGER = "integer"
LEX = "lex"
DYADIC = "dyadic"

GROUP_KINDS = (INTEGER, LEX, DYADIC)


@total_ordering
@dataclass(frozen=True)
class Dyadic:
    """The dyadic rational ``num / 2**exp`` in lowest terms."""

    num: int
    exp: int = 0

    def __post_init__(self):
        if self.exp < 0:
            raise ValueError("dyadic exponent must be non-negative")
        num, exp = self.num, self.exp
        if num == 0:
            exp = 0
        while exp > 0 and num % 2 == 0:
            num //= 2
            exp -= 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    def _aligned(self, other: "Dyadic") -> Tuple[int, int, int]:
        e = max(self.exp, other.exp)
        return self.num << (e - self.exp), other.num << (e - other.exp), e

    def __add__(self, other):
        if not isinstance(other, Dyadic):
            return NotImplemented
        a, b, e = self._aligned(other)
        return Dyadic(a + b, e)

    def __sub__(self, other):
        if not isinstance(other, Dyadic):
            return NotImplemented
        a, b, e = self._aligned(other)
        return Dyadic(a - b, e)

    def __neg__(self):
        return Dyadic(-self.num, self.exp)

    def __mul__(self, k):
        # scalar multiple by an integer (repeated group addition)
        if isinstance(k, bool) or not isinstance(k, int):
            return NotImplemented
        return Dyadic(self.num * k, self.exp)

    __rmul__ = __mul__

    def __lt__(self, other):
        if not isinstance(other, Dyadic):
            return NotImplemented
        a, b, _ = self._aligned(other)
        return a < b

    def __float__(self):
        return self.num / (1 << self.exp)

    def __str__(self):
        if self.exp == 0:
            return str(self.num)
        return f"{self.num}/{1 << self.exp}"

    __repr__ = __str__


Element = Union[int, Tuple[int, ...], Dyadic]

_DYADIC_RE = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(?:2\s*\^\s*(\d+)|(\d+)))?\s*$")


def parse_dyadic(text: str) -> Dyadic:
    """Parse ``"3/4"``, ``"3/2^2"`` or ``"5"`` into a :class:`Dyadic`."""
    m = _DYADIC_RE.match(text)
    if m is None:
        raise ValueError(f"not a dyadic rational: {text!r}")
    num = int(m.group(1))
    if m.group(2) is not None:
        return Dyadic(num, int(m.group(2)))
    if m.group(3) is not None:
        den = int(m.group(3))
        if den <= 0 or den & (den - 1):
            raise ValueError(f"denominator {den} is not a power of two")
        return Dyadic(num, den.bit_length() - 1)
    return Dyadic(num, 0)


@dataclass(frozen=True)
class GroupDescriptor:
    """One of the supported ordered groups.

    ``dim`` is only meaningful for the lexicographic lattice.
    """

    kind: str
    dim: int = 1

    def __post_init__(self):
        if self.kind not in GROUP_KINDS:
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.kind == LEX and self.dim < 1:
            raise ValueError("lexicographic lattice needs dim >= 1")
        if self.kind != LEX and self.dim != 1:
            raise ValueError(f"dim is fixed to 1 for {self.kind}")

    @property
    def zero(self) -> Element:
        if self.kind == INTEGER:
            return 0
        if self.kind == LEX:
            return (0,) * self.dim
        return Dyadic(0)

    def validate(self, x) -> Element:
        """Return ``x`` if it is an element of this group, else raise TypeError."""
        if self.kind == INTEGER:
            ok = isinstance(x, int) and not isinstance(x, bool)
        elif self.kind == LEX:
            ok = (isinstance(x, tuple) and len(x) == self.dim
                  and all(isinstance(c, int) and not isinstance(c, bool) for c in x))
        else:
            ok = isinstance(x, Dyadic)
        if not ok:
            raise TypeError(f"{x!r} is not an element of {self}")
        return x

    def add(self, x: Element, y: Element) -> Element:
        if self.kind == LEX:
            return tuple(a + b for a, b in zip(x, y))
        return x + y

    def neg(self, x: Element) -> Element:
        if self.kind == LEX:
            return tuple(-a for a in x)
        return -x

    def sub(self, x: Element, y: Element) -> Element:
        return self.add(x, self.neg(y))

    def multiple(self, x: Element, n: int) -> Element:
        if self.kind == LEX:
            return tuple(n * a for a in x)
        return n * x

    def compare(self, x: Element, y: Element) -> int:
        self.validate(x)
        self.validate(y)
        return (x > y) - (x < y)

    def is_positive(self, x: Element) -> bool:
        """Membership in the positive cone X+ (identity included)."""
        return self.compare(x, self.zero) >= 0

    def is_strictly_positive(self, x: Element) -> bool:
        return self.compare(x, self.zero) > 0

    def label(self, x: Element) -> str:
        if self.kind == LEX:
            return "(" + ",".join(str(c) for c in x) + ")"
        return str(x)

    def parse(self, value) -> Element:
        """Inverse of :meth:`label`; also accepts JSON ints and int lists."""
        if self.kind == INTEGER:
            if isinstance(value, str):
                value = int(value)
            return self.validate(value)
        if self.kind == LEX:
            if isinstance(value, str):
                value = [int(c) for c in value.strip().strip("()").split(",")]
            return self.validate(tuple(int(c) for c in value))
        if isinstance(value, int) and not isinstance(value, bool):
            return Dyadic(value)
        if isinstance(value, str):
            return parse_dyadic(value)
        raise TypeError(f"cannot read {value!r} as a dyadic rational")

    def __str__(self):
        if self.kind == LEX:
            return f"LexLattice({self.dim})"
        return {INTEGER: "IntegerLine", DYADIC: "DyadicLine"}[self.kind]


def integer_line() -> GroupDescriptor:
    return GroupDescriptor(INTEGER)


def lex_lattice(dim: int = 2) -> GroupDescriptor:
    return GroupDescriptor(LEX, dim)


def dyadic_line() -> GroupDescriptor:
    return GroupDescriptor(DYADIC)


def group_of(x) -> GroupDescriptor:
    if isinstance(x, bool):
        raise TypeError("booleans are not group elements")
    if isinstance(x, int):
        return integer_line()
    if isinstance(x, tuple):
        return lex_lattice(len(x))
    if isinstance(x, Dyadic):
        return dyadic_line()
    raise TypeError(f"{x!r} is not a group element")


def compare(x: Element, y: Element) -> int:
    """Three-way comparison: -1, 0 or 1.  Mixing groups raises TypeError."""
    g = group_of(x)
    if group_of(y) != g:
        raise TypeError(f"cannot compare elements of different groups: {x!r}, {y!r}")
    return g.compare(x, y)


def first_positive(g: GroupDescriptor) -> Optional[Element]:
    """Least element of X+ minus the identity, or ``None`` when there is none."""
    if g.kind == INTEGER:
        return 1
    if g.kind == LEX:
        return (0,) * (g.dim - 1) + (1,)
    return None


def cyclic_power(x: Element, g: GroupDescriptor) -> Optional[int]:
    """Return ``n`` with ``x = n * chi_1`` (n >= 0), or ``None`` if x is off the cyclic cone."""
    p = first_positive(g)
    if p is None:
        raise ValueError(f"{g} has no first positive element")
    g.validate(x)
    if g.kind == INTEGER:
        return x if x >= 0 else None
    if any(x[:-1]) or x[-1] < 0:
        return None
    return x[-1]


def in_cyclic_cone(x: Element, g: GroupDescriptor) -> bool:
    return cyclic_power(x, g) is not None


@dataclass(frozen=True)
class IntegerBounds:
    n_max: int


@dataclass(frozen=True)
class LexBounds:
    box: Tuple[Tuple[int, int], ...]


@dataclass(frozen=True)
class DyadicBounds:
    max_exponent: int
    max_value: int


Bounds = Union[IntegerBounds, LexBounds, DyadicBounds]


@dataclass(frozen=True)
class ConeWindow:
    """A finite, sorted piece of the positive cone, starting at the identity."""

    group: GroupDescriptor
    elements: Tuple[Element, ...]
    bounds: Optional[Bounds] = None
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        elems = tuple(self.elements)
        object.__setattr__(self, "elements", elems)
        if not elems or elems[0] != self.group.zero:
            raise ValueError("a cone window must start at the identity")
        for x, y in zip(elems, elems[1:]):
            if not x < y:
                raise ValueError("window elements must be strictly increasing")
        object.__setattr__(self, "_index", {x: i for i, x in enumerate(elems)})

    @property
    def positives(self) -> Tuple[Element, ...]:
        """Window elements other than the identity (row labels on the minus side)."""
        return self.elements[1:]

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return x in self._index

    def index(self, x: Element) -> int:
        return self._index[x]

    def sumset(self) -> Tuple[Element, ...]:
        """All sums chi + xi with chi in the window and xi a positive window element."""
        g = self.group
        out = {g.add(c, x) for c in self.elements for x in self.positives}
        return tuple(sorted(out))


def enumerate_window(g: GroupDescriptor, bounds: Bounds) -> ConeWindow:
    """Deterministically list the cone elements inside ``bounds``.

    The identity is always present, so empty bounds give a one-element window.
    """
    if g.kind == INTEGER:
        if not isinstance(bounds, IntegerBounds):
            raise TypeError("IntegerLine windows take IntegerBounds")
        elems = list(range(0, max(bounds.n_max, 0) + 1))
    elif g.kind == LEX:
        if not isinstance(bounds, LexBounds):
            raise TypeError("LexLattice windows take LexBounds")
        if len(bounds.box) != g.dim:
            raise ValueError(f"box has {len(bounds.box)} ranges for a rank-{g.dim} lattice")
        ranges = [range(lo, hi + 1) for lo, hi in bounds.box]
        pts = {p for p in itertools.product(*ranges) if p >= g.zero}
        pts.add(g.zero)
        elems = sorted(pts)
    else:
        if not isinstance(bounds, DyadicBounds):
            raise TypeError("DyadicLine windows take DyadicBounds")
        d = max(bounds.max_exponent, 0)
        top = max(bounds.max_value, 0) << d
        elems = [Dyadic(k, d) for k in range(0, top + 1)]
    return ConeWindow(g, tuple(elems), bounds)


def integer_window(n_max: int) -> ConeWindow:
    return enumerate_window(integer_line(), IntegerBounds(n_max))


def lex_window(box: Sequence[Tuple[int, int]]) -> ConeWindow:
    box = tuple((int(lo), int(hi)) for lo, hi in box)
    return enumerate_window(lex_lattice(len(box)), LexBounds(box))


def dyadic_window(max_exponent: int, max_value: int) -> ConeWindow:
    return enumerate_window(dyadic_line(), DyadicBounds(max_exponent, max_value))


def window_from_elements(g: GroupDescriptor, elements: Iterable[Element]) -> ConeWindow:
    pts = {g.validate(x) for x in elements if g.is_positive(x)}
    pts.add(g.zero)
    return ConeWindow(g, tuple(sorted(pts)))
