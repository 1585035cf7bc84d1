"""Tableau reasoner for the supported OWL fragment."""

from .core import (
    PROBE_NS, ClassNode, ClassProfile, Clock, ConsistencyVerdict, Reasoner, check_consistency, classify,
    entailed_property_assertions, entails, instances_of, is_satisfiable,
)
from .kb import KB
from .tableau import DEFAULT_MAX_NODES, Tableau, TableauResult

__all__ = [
    "PROBE_NS", "ClassNode", "ClassProfile", "Clock", "ConsistencyVerdict", "Reasoner", "check_consistency",
    "classify", "entailed_property_assertions", "entails", "instances_of", "is_satisfiable",
    "KB", "DEFAULT_MAX_NODES", "Tableau", "TableauResult",
]
