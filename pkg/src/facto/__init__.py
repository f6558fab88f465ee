"""Finite category toolkit: factorization systems, algebras, presheaf toposes."""

from .errors import *  # noqa: F401,F403
from .fincat import (FinCategory, validate_category, is_mono, is_epi, is_iso, opposite,  # noqa: F401
                     terminal_category, walking_arrow, finset, chain_category, poset_category,
                     monoid_category, discrete_category, full_subcategory, same_tables, max_mor)
from .report import ValidationReport, Violation  # noqa: F401

__version__ = "0.1.0"
