"""tfab: exact computation with finite-rank torsion-free abelian groups.

Groups are presented as finite essential extensions of completely
decomposable groups with finite-support characteristics.  The package
provides exact membership, heights, types, pure closures, socles,
splitting functionals, main decompositions, Stein-style socle splittings,
and builders/verifiers for the three classical example families together
with the CRT-based summand-splitting engine.
"""

from .arith import INF, Congruence, crt_solve, lattice_saturate, mod_inverse, p_valuation
from .groups import (
    Group,
    block_sum,
    direct_sum,
    equal_subgroups,
    validate,
)
from .typesys import Characteristic, TypeClass, char_compare, char_inf, type_le, type_of_char

__version__ = "0.1.0"

__all__ = [
    "INF",
    "Congruence",
    "crt_solve",
    "mod_inverse",
    "p_valuation",
    "lattice_saturate",
    "Characteristic",
    "TypeClass",
    "char_compare",
    "char_inf",
    "type_of_char",
    "type_le",
    "Group",
    "validate",
    "direct_sum",
    "block_sum",
    "equal_subgroups",
    "__version__",
]
