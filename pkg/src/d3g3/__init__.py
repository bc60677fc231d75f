"""Degree-driven dynamic geometric graphs on the unit torus."""

__version__ = "0.1.0"

from .degree_sets import DegreeSet, Regime, classify, parse_degree_set
from .generator import GeneratorConfig, GraphSnapshot, run, step
from .mean_field import (
    SegmentParams,
    fixed_points,
    isolated_limit,
    relationship,
    relationship_profile,
    survival_probability,
)
from .metrics import edge_nervousness, sustainability_verdict, vertex_nervousness

__all__ = [
    "DegreeSet",
    "GeneratorConfig",
    "GraphSnapshot",
    "Regime",
    "SegmentParams",
    "classify",
    "edge_nervousness",
    "fixed_points",
    "isolated_limit",
    "parse_degree_set",
    "relationship",
    "relationship_profile",
    "run",
    "step",
    "survival_probability",
    "sustainability_verdict",
    "vertex_nervousness",
]
