"""Spherical embeddings of symmetric association schemes.

The pipeline runs validate -> idempotents -> embedding -> classification; the
catalog module generates the seven solids on S^2 and negative controls.
"""

from .catalog import Polyhedron, generate, generate_negative, polyhedron_spec
from .classifier import ClassificationResult, RejectReason, classify_m1_3
from .embedding import embed, max_inner_relation, nearest_neighbor_graph
from .fileio import parse_scheme_file, read_scheme, serialize_scheme
from .scheme import RelationMatrix, intersection_numbers, validate_scheme
from .spectral import compute_idempotents, eigenmatrices, is_q_polynomial_for

__version__ = "0.1.0"

__all__ = [
    "Polyhedron",
    "generate",
    "generate_negative",
    "polyhedron_spec",
    "ClassificationResult",
    "RejectReason",
    "classify_m1_3",
    "embed",
    "max_inner_relation",
    "nearest_neighbor_graph",
    "parse_scheme_file",
    "read_scheme",
    "serialize_scheme",
    "RelationMatrix",
    "intersection_numbers",
    "validate_scheme",
    "compute_idempotents",
    "eigenmatrices",
    "is_q_polynomial_for",
]
