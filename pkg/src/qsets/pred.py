"""Predicates on quantum sets, images, coranges, and the four-way dictionary.

A predicate assigns to each atom a subspace of its column space.  The same
data appears in three other guises, all order-isomorphic:

  * a relation into the one-point set (row-vector blocks, via the canonical
    antiunitary x -> <x|.|, concretely the conjugate transpose),
  * a projection in the block algebra,
  * a function into the truth-values set `{0,1} (the block over atom "1"
    holds the rows supported on the predicate, the block over "0" the rows
    annihilating it).

The twelve converters below implement the explicit formulas; all triangles
between them commute.
"""

from __future__ import annotations

import numpy as np

from . import linalg, opalg, qfun, qrel
from .errors import PreconditionError, SchemaError, SetMismatchError
from .linalg import DEFAULT_TOL, Tolerance
from .qset import QuantumSet, bool_set, unit_set, qset_from_json, qset_to_json
from .qset import Atom
from .qrel import Relation
from .opalg import BlockOperator

__all__ = [
    "Predicate",
    "top_predicate",
    "bottom_predicate",
    "p_meet",
    "p_join",
    "p_neg",
    "p_leq",
    "p_eq",
    "disjoint",
    "direct_image",
    "inverse_image",
    "corange",
    "corange_factor",
    "pred_to_rel1",
    "rel1_to_pred",
    "pred_to_proj",
    "proj_to_pred",
    "pred_to_funB",
    "funB_to_pred",
    "rel1_to_proj",
    "proj_to_rel1",
    "rel1_to_funB",
    "funB_to_rel1",
    "proj_to_funB",
    "funB_to_proj",
]


def _orthonormal_columns(cols, dim, tol: Tolerance) -> np.ndarray:
    """An orthonormal basis (as columns) of the span of the given columns.

    The rows of Vh lie in the complex row space of the input, so the plain
    transpose (no conjugation) carries them back to the column span.  Every
    caller feeds unit-scale columns, so the rank cut floors the reference
    scale at 1 (pure rounding noise never registers as a dimension).
    """
    if cols.size == 0:
        return np.zeros((dim, 0), dtype=complex)
    _, s, vh = np.linalg.svd(cols.T, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((dim, 0), dtype=complex)
    rank = int(np.sum(s > tol.rank_cut * max(s[0], 1.0)))
    return vh[:rank].T


class Predicate:
    """Per-atom column subspaces, held as orthonormal column bases."""

    __slots__ = ("carrier", "spaces")

    def __init__(self, carrier: QuantumSet, spaces, tol: Tolerance = DEFAULT_TOL):
        full = {}
        for a in carrier.atoms:
            m = spaces.get(a.label)
            if m is None:
                m = np.zeros((a.dim, 0), dtype=complex)
            else:
                m = np.asarray(m, dtype=complex)
                if m.ndim != 2 or m.shape[0] != a.dim:
                    raise SchemaError(
                        f"space at {a.label!r} must have {a.dim} rows, got {m.shape}"
                    )
                if m.shape[1]:
                    gram = m.conj().T @ m
                    if np.max(np.abs(gram - np.eye(m.shape[1]))) > 1e-6:
                        raise SchemaError(f"space at {a.label!r} is not orthonormal")
            full[a.label] = m
        extra = set(spaces) - set(carrier.labels())
        if extra:
            raise SchemaError(f"spaces reference unknown atoms: {sorted(extra)}")
        object.__setattr__(self, "carrier", carrier)
        object.__setattr__(self, "spaces", full)

    def __setattr__(self, name, value):
        raise AttributeError("Predicate is immutable")

    def space(self, label) -> np.ndarray:
        return self.spaces[label]

    def rank(self, label) -> int:
        return self.spaces[label].shape[1]

    def projector(self, label) -> np.ndarray:
        u = self.spaces[label]
        return u @ u.conj().T

    def __repr__(self):
        ranks = ", ".join(f"{l}:{m.shape[1]}" for l, m in sorted(self.spaces.items()))
        return f"Predicate({{{ranks}}})"


def top_predicate(x: QuantumSet) -> Predicate:
    return Predicate(x, {a.label: np.eye(a.dim, dtype=complex) for a in x.atoms})


def bottom_predicate(x: QuantumSet) -> Predicate:
    return Predicate(x, {})


def _check_carrier(p: Predicate, q: Predicate):
    if p.carrier != q.carrier:
        raise SetMismatchError("predicates live on different carriers")


def p_join(p: Predicate, q: Predicate, tol: Tolerance = DEFAULT_TOL) -> Predicate:
    _check_carrier(p, q)
    spaces = {}
    for a in p.carrier.atoms:
        cols = np.hstack([p.spaces[a.label], q.spaces[a.label]])
        spaces[a.label] = _orthonormal_columns(cols, a.dim, tol)
    return Predicate(p.carrier, spaces)


def p_neg(p: Predicate, tol: Tolerance = DEFAULT_TOL) -> Predicate:
    spaces = {}
    for a in p.carrier.atoms:
        u = p.spaces[a.label]
        if u.shape[1] == 0:
            spaces[a.label] = np.eye(a.dim, dtype=complex)
            continue
        # the trailing rows of Vh are Hermitian-orthogonal to the leading
        # ones, and plain transposition preserves that
        _, s, vh = np.linalg.svd(u.T, full_matrices=True)
        rank = int(np.sum(s > tol.rank_cut * s[0])) if s.size and s[0] > 0 else 0
        spaces[a.label] = vh[rank:].T
    return Predicate(p.carrier, spaces)


def p_meet(p: Predicate, q: Predicate, tol: Tolerance = DEFAULT_TOL) -> Predicate:
    return p_neg(p_join(p_neg(p, tol), p_neg(q, tol), tol), tol)


def p_leq_residual(p: Predicate, q: Predicate) -> float:
    _check_carrier(p, q)
    worst = 0.0
    for a in p.carrier.atoms:
        u, proj = p.spaces[a.label], q.projector(a.label)
        for i in range(u.shape[1]):
            v = u[:, i]
            worst = max(worst, float(np.linalg.norm(v - proj @ v)))
    return worst


def p_leq(p: Predicate, q: Predicate, tol: Tolerance = DEFAULT_TOL) -> bool:
    return p_leq_residual(p, q) < tol.eq_tol


def p_eq_residual(p: Predicate, q: Predicate) -> float:
    _check_carrier(p, q)
    worst = 0.0
    for a in p.carrier.atoms:
        worst = max(worst, float(np.linalg.norm(
            p.projector(a.label) - q.projector(a.label))))
    return worst


def p_eq(p: Predicate, q: Predicate, tol: Tolerance = DEFAULT_TOL) -> bool:
    return p_eq_residual(p, q) < tol.eq_tol


def disjoint(p: Predicate, q: Predicate, tol: Tolerance = DEFAULT_TOL) -> bool:
    """P <= Q^perp: all cross inner products of basis columns vanish."""
    _check_carrier(p, q)
    for a in p.carrier.atoms:
        overlap = p.spaces[a.label].conj().T @ q.spaces[a.label]
        if overlap.size and np.max(np.abs(overlap)) > tol.eq_tol:
            return False
    return True


# -- images -------------------------------------------------------------------


def direct_image(r: Relation, p: Predicate, tol: Tolerance = DEFAULT_TOL) -> Predicate:
    """R_*(P)(Y) = span { r x | r in R(X, Y), x in P(X) }."""
    if p.carrier != r.source:
        raise SetMismatchError("predicate must live on the source of the relation")
    cols = {b.label: [] for b in r.target.atoms}
    for (xl, yl), space in r.blocks.items():
        u = p.spaces[xl]
        if u.shape[1] == 0:
            continue
        for mat in space.basis:
            cols[yl].append(mat @ u)
    spaces = {}
    for b in r.target.atoms:
        if cols[b.label]:
            stacked = np.hstack(cols[b.label])
            spaces[b.label] = _orthonormal_columns(stacked, b.dim, tol)
    return Predicate(r.target, spaces)


def inverse_image(r: Relation, p: Predicate, tol: Tolerance = DEFAULT_TOL) -> Predicate:
    """R^*(P) = (R^dagger)_*(P)."""
    return direct_image(qrel.dagger(r), p, tol)


# -- corange ------------------------------------------------------------------


def corange(g: Relation, tol: Tolerance = DEFAULT_TOL) -> Predicate:
    """The inverse image of the top predicate: the domain of definition of
    a partial function."""
    witness = qfun.check_axioms(g, tol)
    if not witness.is_coinjective:
        raise PreconditionError("corange requires a partial function (coinjective)")
    return inverse_image(g, top_predicate(g.target), tol)


def corange_factor(g: Relation, tol: Tolerance = DEFAULT_TOL):
    """The canonical factorization G = F o K_P through the compression onto
    the corange P: K_P(X, P(X)) = C.u_X^dagger with u_X the inclusion
    isometry of P(X), and F the unique function with F o K_P = G.

    The carrier of the compressed set reuses the source atom labels, so
    equal subspaces under different atoms never collide.  Returns (K_P, F).
    """
    p = corange(g, tol)
    atoms = []
    isometries = {}
    for a in g.source.atoms:
        u = p.spaces[a.label]
        if u.shape[1] == 0:
            continue
        atoms.append(Atom(a.label, u.shape[1]))
        isometries[a.label] = u
    compressed = QuantumSet(atoms)
    kp_blocks = {}
    f_blocks = {}
    for label, u in isometries.items():
        kp_blocks[(label, label)] = linalg.line(u.conj().T)
        for (xl, yl), space in g.blocks.items():
            if xl != label:
                continue
            mats = [b @ u for b in space.basis]
            spanned = linalg.span(mats, tol, floor=1.0)
            if not spanned.is_zero:
                f_blocks[(label, yl)] = spanned
    kp = Relation(g.source, compressed, kp_blocks)
    f = Relation(compressed, g.target, f_blocks)
    recomposed = qrel.compose(f, kp, tol)
    if not qrel.rel_eq(recomposed, g, tol):
        raise PreconditionError("corange factorization failed to recompose")
    return kp, f


# -- the twelve converters ------------------------------------------------------

_ONE = unit_set().atoms[0].label
_FALSE, _TRUE = "0", "1"


def _rows_of(u: np.ndarray):
    """Row-vector matrices <x_i|. for the columns x_i (the antiunitary)."""
    return [u[:, i].conj().reshape(1, -1) for i in range(u.shape[1])]


def pred_to_rel1(p: Predicate) -> Relation:
    blocks = {}
    for a in p.carrier.atoms:
        rows = _rows_of(p.spaces[a.label])
        if rows:
            blocks[(a.label, _ONE)] = linalg.span(rows, floor=1.0)
    return Relation(p.carrier, unit_set(), blocks)


def rel1_to_pred(r: Relation, tol: Tolerance = DEFAULT_TOL) -> Predicate:
    if r.target != unit_set():
        raise PreconditionError("expected a relation into the one-point set")
    spaces = {}
    for a in r.source.atoms:
        space = r.block(a.label, _ONE)
        if space.dim:
            cols = np.hstack([b.conj().T for b in space.basis])
            spaces[a.label] = _orthonormal_columns(cols, a.dim, tol)
    return Predicate(r.source, spaces)


def pred_to_proj(p: Predicate) -> BlockOperator:
    return BlockOperator(
        p.carrier, {a.label: p.projector(a.label) for a in p.carrier.atoms}
    )


def _require_projection(b: BlockOperator, tol: Tolerance):
    if not b.is_projection(tol):
        raise PreconditionError("block operator is not a projection")


def proj_to_pred(b: BlockOperator, tol: Tolerance = DEFAULT_TOL) -> Predicate:
    _require_projection(b, tol)
    spaces = {}
    for a in b.carrier.atoms:
        m = b.blocks[a.label]
        spaces[a.label] = _orthonormal_columns(m, a.dim, tol)
    return Predicate(b.carrier, spaces)


def pred_to_funB(p: Predicate, tol: Tolerance = DEFAULT_TOL) -> Relation:
    """F(X, C_1) holds the rows supported on P(X); F(X, C_0) the rows
    annihilating it (the polar P(X)^0)."""
    blocks = {}
    for a in p.carrier.atoms:
        rows_true = _rows_of(p.spaces[a.label])
        rows_false = _rows_of(p_neg(p, tol).spaces[a.label])
        if rows_true:
            blocks[(a.label, _TRUE)] = linalg.span(rows_true, tol, floor=1.0)
        if rows_false:
            blocks[(a.label, _FALSE)] = linalg.span(rows_false, tol, floor=1.0)
    return Relation(p.carrier, bool_set(), blocks)


def funB_to_pred(f: Relation, tol: Tolerance = DEFAULT_TOL) -> Predicate:
    """P(X) = F(X, C_0)^0, the common null space of the 'false' rows."""
    if f.target != bool_set():
        raise PreconditionError("expected a function into `{0,1}")
    spaces = {}
    for a in f.source.atoms:
        space = f.block(a.label, _FALSE)
        if space.is_zero:
            spaces[a.label] = np.eye(a.dim, dtype=complex)
            continue
        rows = np.vstack([b for b in space.basis])
        _, s, vh = np.linalg.svd(rows, full_matrices=True)
        rank = int(np.sum(s > tol.rank_cut * s[0])) if s.size and s[0] > 0 else 0
        spaces[a.label] = vh[rank:].conj().T
    return Predicate(f.source, spaces)


def rel1_to_proj(r: Relation, tol: Tolerance = DEFAULT_TOL) -> BlockOperator:
    """p = R^*(1), through the star map of the partial function R."""
    if r.target != unit_set():
        raise PreconditionError("expected a relation into the one-point set")
    return opalg.star_map(r, opalg.identity_op(unit_set()), tol)


def proj_to_rel1(b: BlockOperator, tol: Tolerance = DEFAULT_TOL) -> Relation:
    """R(X, C) = { v | v p = v }: the rows fixed by the projection."""
    _require_projection(b, tol)
    blocks = {}
    for a in b.carrier.atoms:
        u = _orthonormal_columns(b.blocks[a.label], a.dim, tol)
        rows = _rows_of(u)
        if rows:
            blocks[(a.label, _ONE)] = linalg.span(rows, tol, floor=1.0)
    return Relation(b.carrier, unit_set(), blocks)


def rel1_to_funB(r: Relation, tol: Tolerance = DEFAULT_TOL) -> Relation:
    """F = [R^dagger, not R^dagger]^dagger: the 'true' block is R itself,
    the 'false' block its atomwise row-space complement."""
    if r.target != unit_set():
        raise PreconditionError("expected a relation into the one-point set")
    blocks = {}
    for a in r.source.atoms:
        space = r.block(a.label, _ONE)
        if not space.is_zero:
            blocks[(a.label, _TRUE)] = space
        comp = linalg.complement(space, tol)
        if not comp.is_zero:
            blocks[(a.label, _FALSE)] = comp
    return Relation(r.source, bool_set(), blocks)


def funB_to_rel1(f: Relation) -> Relation:
    """R = J_1^dagger o F: keep the 'true' block."""
    if f.target != bool_set():
        raise PreconditionError("expected a function into `{0,1}")
    blocks = {}
    for a in f.source.atoms:
        space = f.block(a.label, _TRUE)
        if not space.is_zero:
            blocks[(a.label, _ONE)] = space
    return Relation(f.source, unit_set(), blocks)


def proj_to_funB(b: BlockOperator, tol: Tolerance = DEFAULT_TOL) -> Relation:
    """F(X, C_1) = { v | v p = v },  F(X, C_0) = { v | v p = 0 }."""
    _require_projection(b, tol)
    blocks = {}
    for a in b.carrier.atoms:
        p = b.blocks[a.label]
        u_true = _orthonormal_columns(p, a.dim, tol)
        u_false = _orthonormal_columns(np.eye(a.dim) - p, a.dim, tol)
        if u_true.shape[1]:
            blocks[(a.label, _TRUE)] = linalg.span(_rows_of(u_true), tol, floor=1.0)
        if u_false.shape[1]:
            blocks[(a.label, _FALSE)] = linalg.span(_rows_of(u_false), tol, floor=1.0)
    return Relation(b.carrier, bool_set(), blocks)


def funB_to_proj(f: Relation, tol: Tolerance = DEFAULT_TOL) -> BlockOperator:
    """p = F^*(t), where t is the indicator of the atom '1'."""
    if f.target != bool_set():
        raise PreconditionError("expected a function into `{0,1}")
    t = BlockOperator(bool_set(), {_TRUE: np.ones((1, 1), dtype=complex)})
    return opalg.star_map(f, t, tol)


# -- JSON encoding --------------------------------------------------------------
#
# {"carrier": <qset>, "spaces": {"label": [column, ...], ...}}
# with each column a list of [re, im] pairs.


def predicate_to_json(p: Predicate) -> dict:
    spaces = {}
    for label, u in sorted(p.spaces.items()):
        spaces[label] = [
            [[float(z.real), float(z.imag)] for z in u[:, i]] for i in range(u.shape[1])
        ]
    return {"carrier": qset_to_json(p.carrier), "spaces": spaces}


def predicate_from_json(obj, path="predicate", tol: Tolerance = DEFAULT_TOL) -> Predicate:
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", path)
    carrier = qset_from_json(obj.get("carrier"), f"{path}.carrier")
    raw = obj.get("spaces")
    if not isinstance(raw, dict):
        raise SchemaError("spaces must be an object", f"{path}.spaces")
    spaces = {}
    for label, cols in raw.items():
        p = f"{path}.spaces[{label}]"
        if label not in carrier:
            raise SchemaError(f"unknown atom {label!r}", p)
        d = carrier.dim(label)
        if not isinstance(cols, list):
            raise SchemaError("expected a list of columns", p)
        if not cols:
            continue
        try:
            arr = np.array(
                [[complex(re, im) for re, im in col] for col in cols], dtype=complex
            ).T
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"bad column data: {exc}", p) from exc
        if arr.shape[0] != d:
            raise SchemaError(f"columns must have length {d}", p)
        spaces[label] = _orthonormal_columns(arr, d, tol)
    return Predicate(carrier, spaces)
