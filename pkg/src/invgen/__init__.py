"""Invariable generation in finite permutation groups."""

__version__ = "0.1.0"

from .catalog import catalog, parse_descriptor, resolve
from .errors import BudgetExceeded, CapExceeded, DescriptorError, NotNormal, NotSimple, NotSubgroup
from .group import PermGroup, coset_action, direct_power, quotient, subgroup
from .invariable import (
    compute_dI,
    invariably_generates,
    sample_refute,
    verify_certificate_json,
)
from .perm import Permutation, format_cycles, parse_cycles
from .power import GenMatrix, bounds_report, lemma42_check, m_exact, verify_power_certificate_json
from .structure import all_subgroups, automorphism_group, conjugacy_classes, frattini, maximal_subgroups

__all__ = [
    "BudgetExceeded",
    "CapExceeded",
    "DescriptorError",
    "GenMatrix",
    "NotNormal",
    "NotSimple",
    "NotSubgroup",
    "PermGroup",
    "Permutation",
    "all_subgroups",
    "automorphism_group",
    "bounds_report",
    "catalog",
    "compute_dI",
    "conjugacy_classes",
    "coset_action",
    "direct_power",
    "format_cycles",
    "frattini",
    "invariably_generates",
    "lemma42_check",
    "m_exact",
    "maximal_subgroups",
    "parse_cycles",
    "parse_descriptor",
    "quotient",
    "resolve",
    "sample_refute",
    "subgroup",
    "verify_certificate_json",
    "verify_power_certificate_json",
]
