"""(μ;ν)-Hankel operators on Hardy spaces of compact connected abelian groups,
realized as truncated matrices over windows of the positive cone."""

from .ordered_group import (
    ConeWindow,
    Dyadic,
    GroupDescriptor,
    compare,
    dyadic_line,
    dyadic_window,
    enumerate_window,
    first_positive,
    in_cyclic_cone,
    integer_line,
    integer_window,
    lex_lattice,
    lex_window,
)
from .symbols import (
    MomentSequence,
    MomentSymbol,
    Semicharacter,
    SparseSymbol,
    SymbolFunction,
    cyclic_supported,
    dyadic_power,
    generator_powers,
    geometric,
    l2_norm_on_cone,
    moments,
)
from .operator_core import (
    TruncatedOperator,
    WindowVector,
    adjoint,
    build_mu_nu_hankel,
    flip_reindex,
    nuclear_norm,
    rank_one,
    shift_matrix,
    singular_values,
    spectral_norm,
    trace,
)
from .integral_examples import CauchySpec, DiskMeasure

__version__ = "0.1.0"
