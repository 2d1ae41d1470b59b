"""Binary relations between quantum sets and the dagger compact structure.

A relation R from X to Y assigns an operator subspace R(X, Y) <= L(X, Y) to
every pair of atoms.  Blocks are stored sparsely: a missing key is the zero
subspace of the correct shape.  Composition is the spanwise product, joined
over the middle atom; together with the Cartesian product, the dagger, and
the unit/counit below, this makes quantum sets and relations a dagger
compact category.

Monoidal unitors, associators, and the braiding are realized as explicit
relations, so coherence equations (e.g. the snake identities) are testable
as strict block equalities after relabeling.
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .errors import PreconditionError, SchemaError, SetMismatchError
from .linalg import DEFAULT_TOL, OperatorSubspace, Tolerance
from .qset import (
    Atom,
    QuantumSet,
    cartesian_product,
    disjoint_union,
    dual_set,
    left_label,
    pair_label,
    right_label,
    unit_set,
    qset_from_json,
    qset_to_json,
)

__all__ = [
    "Relation",
    "identity",
    "zero_relation",
    "full_relation",
    "compose",
    "dagger",
    "dual",
    "times",
    "rel_join",
    "rel_meet",
    "rel_neg",
    "rel_leq",
    "rel_perp",
    "rel_eq",
    "rel_eq_residual",
    "unit",
    "counit",
    "braiding",
    "associator",
    "unitor_left",
    "unitor_right",
    "relabel",
    "inj_left",
    "inj_right",
    "copair",
    "embed_classical",
    "extract_classical",
    "diagonal_embed",
]


class Relation:
    """A binary relation: source and target quantum sets plus a sparse map
    (source label, target label) -> OperatorSubspace."""

    __slots__ = ("source", "target", "blocks")

    def __init__(self, source: QuantumSet, target: QuantumSet, blocks):
        norm = {}
        for (xl, yl), space in blocks.items():
            if xl not in source:
                raise SchemaError(f"block source {xl!r} is not an atom of the source")
            if yl not in target:
                raise SchemaError(f"block target {yl!r} is not an atom of the target")
            if not isinstance(space, OperatorSubspace):
                raise SchemaError(f"block ({xl!r}, {yl!r}) is not an OperatorSubspace")
            if space.domain_dim != source.dim(xl) or space.codomain_dim != target.dim(yl):
                raise SchemaError(
                    f"block ({xl!r}, {yl!r}) has shape {space.shape}, expected "
                    f"({target.dim(yl)}, {source.dim(xl)})"
                )
            if not space.is_zero:
                norm[(xl, yl)] = space
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "blocks", dict(norm))

    def __setattr__(self, name, value):
        raise AttributeError("Relation is immutable")

    def block(self, xl, yl) -> OperatorSubspace:
        """The block at (xl, yl); zero subspace of the right shape if absent."""
        try:
            return self.blocks[(xl, yl)]
        except KeyError:
            return linalg.zero_space(self.source.dim(xl), self.target.dim(yl))

    def keys(self):
        return sorted(self.blocks.keys())

    def __repr__(self):
        return (
            f"Relation({self.source!r} -> {self.target!r}, "
            f"{len(self.blocks)} nonzero blocks)"
        )


def zero_relation(x: QuantumSet, y: QuantumSet) -> Relation:
    return Relation(x, y, {})


def full_relation(x: QuantumSet, y: QuantumSet) -> Relation:
    blocks = {
        (a.label, b.label): linalg.full_space(a.dim, b.dim)
        for a in x.atoms
        for b in y.atoms
    }
    return Relation(x, y, blocks)


def identity(x: QuantumSet) -> Relation:
    """Diagonal blocks spanned by the identity operator on each atom."""
    blocks = {
        (a.label, a.label): linalg.scaled_identity_space(a.dim) for a in x.atoms
    }
    return Relation(x, x, blocks)


def compose(s: Relation, r: Relation, tol: Tolerance = DEFAULT_TOL) -> Relation:
    """(s o r)(X, Z) = span { s' r' | exists Y: s' in s(Y,Z), r' in r(X,Y) }."""
    if r.target != s.source:
        raise SetMismatchError("compose: target of the inner relation must equal "
                               "source of the outer relation")
    pieces = {}
    for (xl, yl), rv in r.blocks.items():
        for (yl2, zl), sv in s.blocks.items():
            if yl2 != yl:
                continue
            prods = [wb @ vb for wb in sv.basis for vb in rv.basis]
            pieces.setdefault((xl, zl), []).extend(prods)
    blocks = {}
    for key, mats in pieces.items():
        space = linalg.span(mats, tol, floor=1.0)
        if not space.is_zero:
            blocks[key] = space
    return Relation(r.source, s.target, blocks)


def dagger(r: Relation) -> Relation:
    """Swap source and target, daggering each block."""
    blocks = {
        (yl, xl): linalg.subspace_dagger(v) for (xl, yl), v in r.blocks.items()
    }
    return Relation(r.target, r.source, blocks)


def dual(r: Relation) -> Relation:
    """The Banach dual: a relation from target* to source*, transposing blocks."""
    blocks = {
        (yl, xl): linalg.subspace_transpose_dual(v)
        for (xl, yl), v in r.blocks.items()
    }
    return Relation(dual_set(r.target), dual_set(r.source), blocks)


def times(r1: Relation, r2: Relation) -> Relation:
    """Cartesian product of relations: blockwise Kronecker spans."""
    source = cartesian_product(r1.source, r2.source)
    target = cartesian_product(r1.target, r2.target)
    blocks = {}
    for (x1, y1), v1 in r1.blocks.items():
        a1, b1 = r1.source.atom(x1), r1.target.atom(y1)
        for (x2, y2), v2 in r2.blocks.items():
            a2, b2 = r2.source.atom(x2), r2.target.atom(y2)
            key = (pair_label(a1, a2), pair_label(b1, b2))
            blocks[key] = linalg.subspace_tensor(v1, v2)
    return Relation(source, target, blocks)


# -- lattice structure (atomwise) -------------------------------------------


def _check_parallel(r: Relation, s: Relation):
    if r.source != s.source or r.target != s.target:
        raise SetMismatchError("relations must share source and target")


def rel_join(r: Relation, s: Relation, tol: Tolerance = DEFAULT_TOL) -> Relation:
    _check_parallel(r, s)
    blocks = dict(r.blocks)
    for key, v in s.blocks.items():
        blocks[key] = linalg.join(blocks[key], v, tol) if key in blocks else v
    return Relation(r.source, r.target, blocks)


def rel_meet(r: Relation, s: Relation, tol: Tolerance = DEFAULT_TOL) -> Relation:
    _check_parallel(r, s)
    blocks = {}
    for key in set(r.blocks) & set(s.blocks):
        m = linalg.meet(r.blocks[key], s.blocks[key], tol)
        if not m.is_zero:
            blocks[key] = m
    return Relation(r.source, r.target, blocks)


def rel_neg(r: Relation, tol: Tolerance = DEFAULT_TOL) -> Relation:
    """Atomwise HS-orthocomplement; absent blocks complement to full."""
    blocks = {}
    for a in r.source.atoms:
        for b in r.target.atoms:
            c = linalg.complement(r.block(a.label, b.label), tol)
            if not c.is_zero:
                blocks[(a.label, b.label)] = c
    return Relation(r.source, r.target, blocks)


def rel_leq(r: Relation, s: Relation, tol: Tolerance = DEFAULT_TOL) -> bool:
    _check_parallel(r, s)
    return all(
        linalg.leq(v, s.block(xl, yl), tol) for (xl, yl), v in r.blocks.items()
    )


def rel_perp(r: Relation, s: Relation, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Atomwise orthogonality of blocks under the HS inner product."""
    _check_parallel(r, s)
    for key, v in r.blocks.items():
        w = s.blocks.get(key)
        if w is None:
            continue
        overlap = np.array([[np.vdot(a, b) for b in w.basis] for a in v.basis])
        if overlap.size and np.max(np.abs(overlap)) > tol.eq_tol:
            return False
    return True


def rel_eq_residual(r: Relation, s: Relation) -> float:
    _check_parallel(r, s)
    worst = 0.0
    for xl, yl in set(r.blocks) | set(s.blocks):
        worst = max(worst, linalg.eq_residual(r.block(xl, yl), s.block(xl, yl)))
    return worst


def rel_eq(r: Relation, s: Relation, tol: Tolerance = DEFAULT_TOL) -> bool:
    return rel_eq_residual(r, s) < tol.eq_tol


# -- compact structure -------------------------------------------------------


def _eta_vector(n: int) -> np.ndarray:
    """The maximally entangled vector sum_i e_i (x) e_i as a column in the
    Kronecker coordinates of X (x) X*, under the self-dual convention."""
    v = np.zeros((n * n, 1), dtype=complex)
    for i in range(n):
        v[i * n + i, 0] = 1.0
    return v


def unit(x: QuantumSet) -> Relation:
    """The compact-closed unit: 1 -> X x X*, spanning eta_X atomwise."""
    target = cartesian_product(x, dual_set(x))
    blocks = {}
    for a in x.atoms:
        key = (unit_set().atoms[0].label, pair_label(a, Atom(a.label, a.dim, not a.dual)))
        blocks[key] = linalg.line(_eta_vector(a.dim))
    return Relation(unit_set(), target, blocks)


def counit(x: QuantumSet) -> Relation:
    """The compact-closed counit: X* x X -> 1, spanning epsilon_X atomwise."""
    source = cartesian_product(dual_set(x), x)
    blocks = {}
    for a in x.atoms:
        key = (pair_label(Atom(a.label, a.dim, not a.dual), a), unit_set().atoms[0].label)
        blocks[key] = linalg.line(_eta_vector(a.dim).conj().T)
    return Relation(source, unit_set(), blocks)


def _swap_matrix(m: int, n: int) -> np.ndarray:
    """Kronecker commutation matrix: e_a (x) e_b -> e_b (x) e_a."""
    k = np.zeros((m * n, m * n), dtype=complex)
    for a in range(m):
        for b in range(n):
            k[b * m + a, a * n + b] = 1.0
    return k


def braiding(x: QuantumSet, y: QuantumSet) -> Relation:
    """The symmetry X x Y -> Y x X, spanned by the tensor-factor swap."""
    source = cartesian_product(x, y)
    target = cartesian_product(y, x)
    blocks = {}
    for a in x.atoms:
        for b in y.atoms:
            key = (pair_label(a, b), pair_label(b, a))
            blocks[key] = linalg.line(_swap_matrix(a.dim, b.dim))
    return Relation(source, target, blocks)


def relabel(x: QuantumSet, y: QuantumSet, label_map) -> Relation:
    """The invertible relation realizing a dimension-preserving relabeling
    bijection of atoms (blocks C.1)."""
    if sorted(label_map.keys()) != sorted(x.labels()):
        raise PreconditionError("label_map must cover exactly the source atoms")
    if sorted(label_map.values()) != sorted(y.labels()):
        raise PreconditionError("label_map must hit exactly the target atoms")
    blocks = {}
    for a in x.atoms:
        tgt = label_map[a.label]
        if y.dim(tgt) != a.dim:
            raise PreconditionError(
                f"relabeling {a.label!r} -> {tgt!r} does not preserve dimension"
            )
        blocks[(a.label, tgt)] = linalg.scaled_identity_space(a.dim)
    return Relation(x, y, blocks)


def associator(x: QuantumSet, y: QuantumSet, z: QuantumSet) -> Relation:
    """(X x Y) x Z -> X x (Y x Z) as a relabeling relation."""
    src = cartesian_product(cartesian_product(x, y), z)
    tgt = cartesian_product(x, cartesian_product(y, z))
    mapping = {}
    for a in x.atoms:
        for b in y.atoms:
            ab = Atom(pair_label(a, b), a.dim * b.dim)
            for c in z.atoms:
                bc = Atom(pair_label(b, c), b.dim * c.dim)
                mapping[pair_label(ab, c)] = pair_label(a, bc)
    return relabel(src, tgt, mapping)


def unitor_left(x: QuantumSet) -> Relation:
    """1 x X -> X."""
    src = cartesian_product(unit_set(), x)
    one = unit_set().atoms[0]
    return relabel(src, x, {pair_label(one, a): a.label for a in x.atoms})


def unitor_right(x: QuantumSet) -> Relation:
    """X x 1 -> X."""
    src = cartesian_product(x, unit_set())
    one = unit_set().atoms[0]
    return relabel(src, x, {pair_label(a, one): a.label for a in x.atoms})


# -- coproduct ----------------------------------------------------------------


def inj_left(x: QuantumSet, y: QuantumSet) -> Relation:
    union = disjoint_union(x, y)
    blocks = {
        (a.label, left_label(a.label)): linalg.scaled_identity_space(a.dim)
        for a in x.atoms
    }
    return Relation(x, union, blocks)


def inj_right(x: QuantumSet, y: QuantumSet) -> Relation:
    union = disjoint_union(x, y)
    blocks = {
        (a.label, right_label(a.label)): linalg.scaled_identity_space(a.dim)
        for a in y.atoms
    }
    return Relation(y, union, blocks)


def copair(r: Relation, s: Relation) -> Relation:
    """[r, s]: X (+) Y -> Z; blocks inherited from r on the left-tagged atoms
    and from s on the right-tagged ones."""
    if r.target != s.target:
        raise SetMismatchError("copair requires a shared target")
    source = disjoint_union(r.source, s.source)
    blocks = {}
    for (xl, zl), v in r.blocks.items():
        blocks[(left_label(xl), zl)] = v
    for (yl, zl), v in s.blocks.items():
        blocks[(right_label(yl), zl)] = v
    return Relation(source, r.target, blocks)


# -- the classical embedding --------------------------------------------------


def embed_classical(pairs, s_labels, t_labels) -> Relation:
    """`r for an ordinary relation r, given as a set of label pairs."""
    from .qset import classical_embed

    source = classical_embed(s_labels)
    target = classical_embed(t_labels)
    one = np.ones((1, 1), dtype=complex)
    blocks = {}
    for sl, tl in pairs:
        if sl not in source or tl not in target:
            raise PreconditionError(f"pair ({sl!r}, {tl!r}) not in the given sets")
        blocks[(sl, tl)] = linalg.line(one)
    return Relation(source, target, blocks)


def extract_classical(r: Relation) -> set:
    """Inverse of the classical embedding (both sets must be classical)."""
    if not (r.source.is_classical() and r.target.is_classical()):
        raise PreconditionError("relation is not between classical sets")
    return set(r.blocks.keys())


def diagonal_embed(s_labels) -> Relation:
    """The classical diagonal `S -> `S x `S (used to tuple functions)."""
    from .qset import classical_embed

    source = classical_embed(s_labels)
    target = cartesian_product(source, source)
    one = np.ones((1, 1), dtype=complex)
    blocks = {}
    for a in source.atoms:
        blocks[(a.label, pair_label(a, a))] = linalg.line(one)
    return Relation(source, target, blocks)


# -- JSON encoding ------------------------------------------------------------
#
# {"source": <qset>, "target": <qset>,
#  "blocks": [{"from": "x", "to": "y", "space": <subspace>}, ...]}


def relation_to_json(r: Relation) -> dict:
    return {
        "source": qset_to_json(r.source),
        "target": qset_to_json(r.target),
        "blocks": [
            {"from": xl, "to": yl, "space": linalg.subspace_to_json(v)}
            for (xl, yl), v in sorted(r.blocks.items())
        ],
    }


def relation_from_json(obj, path="relation") -> Relation:
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", path)
    source = qset_from_json(obj.get("source"), f"{path}.source")
    target = qset_from_json(obj.get("target"), f"{path}.target")
    raw = obj.get("blocks")
    if not isinstance(raw, list):
        raise SchemaError("blocks must be a list", f"{path}.blocks")
    blocks = {}
    for i, entry in enumerate(raw):
        p = f"{path}.blocks[{i}]"
        if not isinstance(entry, dict) or "from" not in entry or "to" not in entry:
            raise SchemaError("expected {'from', 'to', 'space'}", p)
        space = linalg.subspace_from_json(entry.get("space"), f"{p}.space")
        blocks[(entry["from"], entry["to"])] = space
    try:
        return Relation(source, target, blocks)
    except SchemaError as exc:
        raise SchemaError(str(exc), path) from exc
