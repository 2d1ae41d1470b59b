"""Finite quantum sets: binary relations, functions, block *-algebra
duality, predicates, and quantum graph-coloring certificates."""

from . import coloring, laws, linalg, opalg, pred, qfun, qrel, qset, randgen
from .errors import PreconditionError, QsetsError, SchemaError
from .linalg import DEFAULT_TOL, OperatorSubspace, Tolerance
from .qset import Atom, QuantumSet
from .qrel import Relation

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "QuantumSet",
    "Relation",
    "OperatorSubspace",
    "Tolerance",
    "DEFAULT_TOL",
    "QsetsError",
    "SchemaError",
    "PreconditionError",
    "linalg",
    "qset",
    "qrel",
    "qfun",
    "opalg",
    "pred",
    "coloring",
    "laws",
    "randgen",
]
