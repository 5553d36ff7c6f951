"""Cokernels with pairing of random symmetric and alternating integer matrices.

Class keys, limiting laws, seeded samplers, exposure-process experiments and
non-sparsity audits. Heavy elimination runs in compiled kernels.
"""

from .cokernel import GroupType, PairedClassKey, PairingGram, alt_type, group_type, paired_iso, quasi_class
from .errors import (
    BudgetExceeded,
    CoklabError,
    DomainError,
    Indeterminate,
    InsufficientPrecision,
    NonUnit,
    NotApplicable,
    PivotError,
    PrecisionExceeded,
    Singular,
    StructureError,
)
from .limits import DistributionTable, l_distance, mu_inf_sym, nu_inf_sym, product_sym
from .matrices import ALTERNATING, GENERAL, SYMMETRIC, ModMatrix
from .sampling import EntryDistribution, epsilon_of

__version__ = "0.1.0"

__all__ = [
    "ALTERNATING",
    "GENERAL",
    "SYMMETRIC",
    "BudgetExceeded",
    "CoklabError",
    "DistributionTable",
    "DomainError",
    "EntryDistribution",
    "GroupType",
    "Indeterminate",
    "InsufficientPrecision",
    "ModMatrix",
    "NonUnit",
    "NotApplicable",
    "PairedClassKey",
    "PairingGram",
    "PivotError",
    "PrecisionExceeded",
    "Singular",
    "StructureError",
    "alt_type",
    "epsilon_of",
    "group_type",
    "l_distance",
    "mu_inf_sym",
    "nu_inf_sym",
    "paired_iso",
    "product_sym",
    "quasi_class",
]
