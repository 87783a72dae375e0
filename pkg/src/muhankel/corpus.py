"""Deterministic test corpora shared by the acceptance suite and the CLI."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from .integral_examples import DiskMeasure, moment_symbol
from .operator_core import MINUS, PLUS, TruncatedOperator
from .ordered_group import ConeWindow, dyadic_window, first_positive, integer_window, lex_window
from .symbols import (
    Semicharacter,
    SparseSymbol,
    SymbolFunction,
    cyclic_supported,
    delta,
    dyadic_power,
    generator_powers,
    geometric,
    trivial,
)


@dataclass
class Case:
    name: str
    window: ConeWindow
    mu: Semicharacter
    a: SymbolFunction


def standard_windows():
    return {
        "integer": integer_window(12),
        "lex": lex_window([(0, 3), (-3, 3)]),
        "dyadic": dyadic_window(2, 3),
    }


def random_sparse_symbol(w: ConeWindow, rng: np.random.Generator, density: float = 0.3,
                         cyclic_only: bool = False) -> SparseSymbol:
    """Random complex values on a random subset of the window sumset."""
    g = w.group
    pool = w.sumset()
    if cyclic_only:
        from .ordered_group import cyclic_power
        pool = tuple(x for x in pool if cyclic_power(x, g) is not None)
    entries = {}
    for x in pool:
        if rng.random() < density:
            entries[x] = complex(rng.normal(), rng.normal())
    if not entries:
        x = pool[int(rng.integers(len(pool)))]
        entries[x] = 1.0
    return SparseSymbol(g, entries)


def random_semicharacter(w: ConeWindow, rng: np.random.Generator) -> Semicharacter:
    g = w.group

    def rq(lo=0.2, hi=1.3):
        r = rng.uniform(lo, hi)
        t = rng.uniform(-np.pi, np.pi)
        return complex(r * np.cos(t), r * np.sin(t))

    if g.kind == "integer":
        return geometric(rq()) if rng.random() < 0.7 else cyclic_supported(g, rq())
    if g.kind == "lex":
        if rng.random() < 0.3:
            return cyclic_supported(g, rq())
        qs = [rq(0.6, 1.4) for _ in range(g.dim)]
        if rng.random() < 0.2:
            qs[0] = 0
        return generator_powers(g, qs)
    # keep q off the branch cut
    r = rng.uniform(0.2, 1.6)
    t = rng.uniform(-0.9 * np.pi, 0.9 * np.pi)
    return dyadic_power(complex(r * np.cos(t), r * np.sin(t)))


def hankel_equation_corpus(seed: int = 20240101) -> List[Case]:
    """At least 20 (group, μ, a) cases over the integer line, the lex plane and the dyadic line."""
    rng = np.random.default_rng(seed)
    ws = standard_windows()
    wz, wl, wd = ws["integer"], ws["lex"], ws["dyadic"]
    gz, gl, gd = wz.group, wl.group, wd.group
    sigma = DiskMeasure(((0.5, 1.0), (-0.3 + 0.2j, 0.5j)))
    cases = [
        Case("Z geometric 0.5, delta", wz, geometric(0.5), delta(gz, 1)),
        Case("Z geometric -0.7+0.2i, random", wz, geometric(-0.7 + 0.2j), random_sparse_symbol(wz, rng)),
        Case("Z geometric 1.1, random", wz, geometric(1.1), random_sparse_symbol(wz, rng)),
        Case("Z unimodular i, random", wz, geometric(1j), random_sparse_symbol(wz, rng)),
        Case("Z geometric 0, random", wz, geometric(0.0), random_sparse_symbol(wz, rng)),
        Case("Z cyclic 0.3, moments", wz, cyclic_supported(gz, 0.3), moment_symbol(sigma)),
        Case("Z geometric 0.5, moments", wz, geometric(0.5), moment_symbol(sigma)),
        Case("Z trivial, moments", wz, trivial(gz), moment_symbol(sigma)),
        Case("Z2 generators (0.5,0.9), random", wl, generator_powers(gl, (0.5, 0.9)), random_sparse_symbol(wl, rng)),
        Case("Z2 generators (i,-1), random", wl, generator_powers(gl, (1j, -1)), random_sparse_symbol(wl, rng)),
        Case("Z2 generators (0,0.5), random", wl, generator_powers(gl, (0, 0.5)), random_sparse_symbol(wl, rng)),
        Case("Z2 generators (1.2,0.7), random", wl, generator_powers(gl, (1.2, 0.7)), random_sparse_symbol(wl, rng)),
        Case("Z2 cyclic 0.5, random", wl, cyclic_supported(gl, 0.5), random_sparse_symbol(wl, rng)),
        Case("Z2 cyclic 2, cyclic symbol", wl, cyclic_supported(gl, 2.0), random_sparse_symbol(wl, rng, 0.6, True)),
        Case("Z2 trivial, delta", wl, trivial(gl), delta(gl, (1, -2))),
        Case("D power 0.5, random", wd, dyadic_power(0.5), random_sparse_symbol(wd, rng)),
        Case("D power 2, random", wd, dyadic_power(2.0), random_sparse_symbol(wd, rng)),
        Case("D power 0.3+0.4i, random", wd, dyadic_power(0.3 + 0.4j), random_sparse_symbol(wd, rng)),
        Case("D power i, random", wd, dyadic_power(1j), random_sparse_symbol(wd, rng)),
        Case("D trivial, random", wd, trivial(gd), random_sparse_symbol(wd, rng)),
        Case("D power 0.8, delta", wd, dyadic_power(0.8), delta(gd, wd.elements[1])),
    ]
    for _ in range(3):
        w = [wz, wl, wd][int(rng.integers(3))]
        cases.append(Case(f"{w.group} random", w, random_semicharacter(w, rng), random_sparse_symbol(w, rng)))
    return cases


def shift_elements(w: ConeWindow, count: int = 4):
    """χ₀, the least positive window element and a few more, for equation checks."""
    picks = [w.elements[0]]
    step = max(1, (len(w) - 1) // count)
    picks += list(w.elements[1::step][:count])
    return picks


def smallest_shift(w: ConeWindow):
    chi1 = first_positive(w.group)
    return chi1 if chi1 is not None else w.elements[1]


def random_operator(w: ConeWindow, rng: np.random.Generator) -> TruncatedOperator:
    m = rng.normal(size=(len(w.positives), len(w))) + 1j * rng.normal(size=(len(w.positives), len(w)))
    return TruncatedOperator(w.group, w.positives, w.elements, m, MINUS, PLUS)


def oracle_measures() -> List[DiskMeasure]:
    """Five open-disk measures with margin at least 0.05."""
    return [
        DiskMeasure(((0.5, 1.0),)),
        DiskMeasure(((0.3, 0.5), (-0.3, 0.5))),
        DiskMeasure(((0.0, 2.0), (0.6j, -1.0))),
        DiskMeasure(((0.9, 0.25), (-0.5 + 0.5j, 1 - 1j), (0.1 - 0.2j, 0.3))),
        DiskMeasure(tuple((0.95 * np.exp(2j * np.pi * k / 7), 1 / 7) for k in range(7))),
    ]
