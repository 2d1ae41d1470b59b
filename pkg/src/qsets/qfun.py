"""Function-hood and morphism classification inside the relation category.

A relation F is a function when F^dagger o F >= I on the source and
F o F^dagger <= I on the target; the first condition alone is
cosurjectivity, the second coinjectivity (partial functions).  Injectivity
and surjectivity are the order-reversed conditions.  ``check_axioms``
measures all four numerically and reports residuals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg, opalg, qrel
from .errors import PreconditionError
from .linalg import DEFAULT_TOL, Tolerance
from .qset import (
    QuantumSet,
    classical_embed,
    disjoint_union,
    unit_set,
)
from .qrel import Relation

__all__ = [
    "FunctionWitness",
    "check_axioms",
    "invertible_decompose",
    "inclusion",
    "canonical_surjection",
    "terminal",
    "projections",
    "compatible",
    "is_classical",
    "classify_classical",
    "classify_subobject",
]


@dataclass(frozen=True)
class FunctionWitness:
    """Outcome of the four relation axioms, with residual magnitudes."""

    relation: Relation
    is_coinjective: bool
    is_cosurjective: bool
    is_injective: bool
    is_surjective: bool
    residuals: dict = field(default_factory=dict)

    @property
    def is_function(self) -> bool:
        return self.is_coinjective and self.is_cosurjective

    @property
    def is_partial_function(self) -> bool:
        return self.is_coinjective

    @property
    def is_invertible_function(self) -> bool:
        return self.is_function and self.is_injective and self.is_surjective

    def to_json(self) -> dict:
        return {
            "function": self.is_function,
            "partial_function": self.is_partial_function,
            "coinjective": self.is_coinjective,
            "cosurjective": self.is_cosurjective,
            "injective": self.is_injective,
            "surjective": self.is_surjective,
            "residuals": {k: float(v) for k, v in sorted(self.residuals.items())},
        }


def _below_identity_residual(c: Relation) -> float:
    """How far a relation X -> X sits above the pattern 'zero off the
    diagonal, at most C.1 on it'.  Off-diagonal blocks score the norm of
    their unit basis vectors (1.0 when genuinely nonzero); diagonal blocks
    score the leq residual into the scalar line."""
    worst = 0.0
    for (xl, yl), v in c.blocks.items():
        if xl != yl:
            worst = max(worst, max(float(np.linalg.norm(b)) for b in v.basis))
        else:
            worst = max(worst, linalg.leq_residual(
                v, linalg.scaled_identity_space(c.source.dim(xl))))
    return worst


def _above_identity_residual(c: Relation) -> float:
    """How far the diagonal blocks are from containing the identity."""
    worst = 0.0
    for a in c.source.atoms:
        worst = max(worst, linalg.leq_residual(
            linalg.scaled_identity_space(a.dim), c.block(a.label, a.label)))
    return worst


def check_axioms(r: Relation, tol: Tolerance = DEFAULT_TOL) -> FunctionWitness:
    """Compute F^dagger o F and F o F^dagger and test the four axioms."""
    rd = qrel.dagger(r)
    ffd = qrel.compose(r, rd, tol)   # target -> target
    fdf = qrel.compose(rd, r, tol)   # source -> source
    residuals = {
        "coinjective": _below_identity_residual(ffd),
        "cosurjective": _above_identity_residual(fdf),
        "injective": _below_identity_residual(fdf),
        "surjective": _above_identity_residual(ffd),
    }
    return FunctionWitness(
        relation=r,
        is_coinjective=residuals["coinjective"] < tol.eq_tol,
        is_cosurjective=residuals["cosurjective"] < tol.eq_tol,
        is_injective=residuals["injective"] < tol.eq_tol,
        is_surjective=residuals["surjective"] < tol.eq_tol,
        residuals=residuals,
    )


def invertible_decompose(f: Relation, tol: Tolerance = DEFAULT_TOL):
    """For an invertible function, the atom bijection and the spanning
    unitaries u_X with F(X, f(X)) = C.u_X; None when not invertible."""
    witness = check_axioms(f, tol)
    if not witness.is_function:
        raise PreconditionError("invertible_decompose requires a function")
    if not (witness.is_injective and witness.is_surjective):
        return None
    bijection = {}
    unitaries = {}
    hit = set()
    for a in f.source.atoms:
        row = [(yl, v) for (xl, yl), v in f.blocks.items() if xl == a.label]
        if len(row) != 1 or row[0][1].dim != 1:
            return None
        yl, v = row[0]
        u = v.basis[0] * np.sqrt(a.dim)
        if np.linalg.norm(u.conj().T @ u - np.eye(a.dim)) > tol.eq_tol:
            return None
        bijection[a.label] = yl
        unitaries[a.label] = u
        hit.add(yl)
    if hit != set(f.target.labels()):
        return None
    return bijection, unitaries


def inclusion(x_sub: QuantumSet, y: QuantumSet) -> Relation:
    """The inclusion of a subset: diagonal C.1 blocks."""
    if not x_sub.is_subset_of(y):
        raise PreconditionError("inclusion requires the atoms of the subset to "
                                "appear in the superset (by label and dimension)")
    blocks = {
        (a.label, a.label): linalg.scaled_identity_space(a.dim) for a in x_sub.atoms
    }
    return Relation(x_sub, y, blocks)


def canonical_surjection(x: QuantumSet) -> Relation:
    """The quotient contracting each atom to a point: Q(X, C_X) = L(X, C)."""
    target = classical_embed(x.labels())
    blocks = {
        (a.label, a.label): linalg.full_space(a.dim, 1) for a in x.atoms
    }
    return Relation(x, target, blocks)


def terminal(x: QuantumSet) -> Relation:
    """The unique function to the monoidal unit; its block on each atom is
    the full row-vector space L(X, C)."""
    one = unit_set()
    blocks = {
        (a.label, one.atoms[0].label): linalg.full_space(a.dim, 1) for a in x.atoms
    }
    return Relation(x, one, blocks)


def projections(x: QuantumSet, y: QuantumSet, tol: Tolerance = DEFAULT_TOL):
    """The canonical projections of the product, P1 = U o (I x !) and
    P2 = U o (! x I)."""
    p1 = qrel.compose(qrel.unitor_right(x),
                      qrel.times(qrel.identity(x), terminal(y)), tol)
    p2 = qrel.compose(qrel.unitor_left(y),
                      qrel.times(terminal(x), qrel.identity(y)), tol)
    return p1, p2


def _commutator_defect(f1: Relation, f2: Relation, tol: Tolerance) -> float:
    worst = 0.0
    t1 = opalg.hom_from_function(f1, tol, checked=False)
    t2 = opalg.hom_from_function(f2, tol, checked=False)
    for a in f1.source.atoms:
        imgs1 = [t1.images[yb.label][a.label][k, l]
                 for yb in f1.target.atoms
                 for k in range(yb.dim) for l in range(yb.dim)]
        imgs2 = [t2.images[yb.label][a.label][k, l]
                 for yb in f2.target.atoms
                 for k in range(yb.dim) for l in range(yb.dim)]
        for m1 in imgs1:
            for m2 in imgs2:
                worst = max(worst, float(np.linalg.norm(m1 @ m2 - m2 @ m1)))
    return worst


def compatible(f1: Relation, f2: Relation, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether two functions with a common source are jointly realizable,
    tested as commutation of their star-map images on all generators."""
    if f1.source != f2.source:
        raise PreconditionError("compatible requires a common source")
    for f in (f1, f2):
        if not check_axioms(f, tol).is_function:
            raise PreconditionError("compatible requires functions")
    return _commutator_defect(f1, f2, tol) < tol.eq_tol


def is_classical(f: Relation, tol: Tolerance = DEFAULT_TOL) -> bool:
    """A function is classical when every star-map image is scalar on each
    source atom (equivalently, compatible with the identity)."""
    if not check_axioms(f, tol).is_function:
        raise PreconditionError("is_classical requires a function")
    table = opalg.hom_from_function(f, tol, checked=False)
    for yb in f.target.atoms:
        for a in f.source.atoms:
            t = table.images[yb.label][a.label]
            for k in range(yb.dim):
                for l in range(yb.dim):
                    m = t[k, l]
                    scalar = np.trace(m) / a.dim
                    if np.linalg.norm(m - scalar * np.eye(a.dim)) > tol.eq_tol:
                        return False
    return True


def classify_classical(f: Relation, tol: Tolerance = DEFAULT_TOL):
    """The ordinary map behind a classical function: atom labels of the
    source to labels of one-dimensional atoms of the target, realizing
    F = J o `f o Q.  None when F is not classical."""
    if not is_classical(f, tol):
        return None
    mapping = {}
    for a in f.source.atoms:
        row = [(yl, v) for (xl, yl), v in f.blocks.items() if xl == a.label]
        if len(row) != 1:
            return None
        yl, v = row[0]
        if f.target.dim(yl) != 1:
            return None
        if not linalg.eq(v, linalg.full_space(a.dim, 1), tol):
            return None
        mapping[a.label] = yl
    return mapping


def classify_subobject(j: Relation, tol: Tolerance = DEFAULT_TOL) -> Relation:
    """The unique classical function X -> 1 (+) 1 whose pullback along the
    second summand recovers the given injective function: it sends exactly
    the atoms in the image of J to the second summand."""
    witness = check_axioms(j, tol)
    if not (witness.is_function and witness.is_injective):
        raise PreconditionError("classify_subobject requires an injective function")
    x = j.target
    omega = disjoint_union(unit_set(), unit_set())
    inside = {yl for (_, yl) in j.blocks}
    lbl_false, lbl_true = omega.labels()  # 'l(1)', 'r(1)'
    blocks = {}
    for a in x.atoms:
        tgt = lbl_true if a.label in inside else lbl_false
        blocks[(a.label, tgt)] = linalg.full_space(a.dim, 1)
    return Relation(x, omega, blocks)
