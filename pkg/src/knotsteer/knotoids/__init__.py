"""Knotoid diagrams: extraction, invariants, moves and classification."""

from .bracket import Laurent, fingerprint, normalized_bracket, raw_bracket
from .diagram import Crossing, GaussDiagram, empty_diagram, extract_diagram, find_crossings
from .moves import deep_simplify, forbidden_deletions, insert_r1, insert_r2, perform_r3, simplify
from .planar_map import PlanarMap, is_realizable
from .table import KnotoidTable, KnotoidType, bundled_table, classify, read_table, write_table
from .unravel import brute_force_unravel, greedy_unravel, unravel_bound

__all__ = [
    "Crossing", "GaussDiagram", "empty_diagram", "extract_diagram", "find_crossings",
    "Laurent", "fingerprint", "normalized_bracket", "raw_bracket",
    "deep_simplify", "forbidden_deletions", "insert_r1", "insert_r2",
    "perform_r3", "simplify",
    "PlanarMap", "is_realizable",
    "KnotoidTable", "KnotoidType", "bundled_table", "classify",
    "read_table", "write_table",
    "brute_force_unravel", "greedy_unravel", "unravel_bound",
]
