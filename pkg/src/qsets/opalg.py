"""Block operators, star maps, fissions, and the three-way correspondence.

The block *-algebra of a quantum set X holds one square matrix per atom.
Every partial function F: X -> Y induces a *-homomorphism F* from the block
algebra of Y to the block algebra of X, computed on HS-orthonormal block
bases as

    F*(b)(X) = sum_Y sum_w dim(Y) . w^dagger b(Y) w .

The same data is equivalently a fission: a family of coisometries
f_X^Y: X -> Y (x) H_X^Y with orthogonal cross-target products.  The three
constructions (function -> fission -> homomorphism -> function) compose to
the identity in each cyclic order; homomorphisms are represented
extensionally by their images on matrix units (``HomTable``).
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .errors import PreconditionError, SchemaError, SetMismatchError
from .linalg import DEFAULT_TOL, Tolerance
from .qset import QuantumSet, cartesian_product, classical_embed, pair_label
from .qset import qset_from_json, qset_to_json
from .qrel import Relation

__all__ = [
    "BlockOperator",
    "Fission",
    "HomTable",
    "identity_op",
    "zero_op",
    "matrix_unit_op",
    "star_map",
    "star_is_homomorphism",
    "fission_from_function",
    "function_from_fission",
    "hom_from_function",
    "function_from_homomorphism",
    "fission_compose",
    "fission_tensor",
    "identity_fission",
    "fission_star",
    "is_unital",
    "star_injective",
    "star_surjective",
    "spectral_function",
]


class BlockOperator:
    """An element of the block algebra: one square matrix per atom."""

    __slots__ = ("carrier", "blocks")

    def __init__(self, carrier: QuantumSet, blocks):
        full = {}
        for a in carrier.atoms:
            m = blocks.get(a.label)
            if m is None:
                m = np.zeros((a.dim, a.dim), dtype=complex)
            else:
                m = linalg.as_matrix(m)
                if m.shape != (a.dim, a.dim):
                    raise SchemaError(
                        f"block {a.label!r} has shape {m.shape}, expected ({a.dim}, {a.dim})"
                    )
            full[a.label] = m
        extra = set(blocks) - set(carrier.labels())
        if extra:
            raise SchemaError(f"blocks reference unknown atoms: {sorted(extra)}")
        object.__setattr__(self, "carrier", carrier)
        object.__setattr__(self, "blocks", full)

    def __setattr__(self, name, value):
        raise AttributeError("BlockOperator is immutable")

    def block(self, label) -> np.ndarray:
        return self.blocks[label]

    def _binary(self, other, op):
        if not isinstance(other, BlockOperator) or other.carrier != self.carrier:
            raise SetMismatchError("block operators live on different carriers")
        return BlockOperator(
            self.carrier,
            {l: op(self.blocks[l], other.blocks[l]) for l in self.blocks},
        )

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __matmul__(self, other):
        return self._binary(other, lambda a, b: a @ b)

    def __mul__(self, scalar):
        return BlockOperator(self.carrier, {l: scalar * m for l, m in self.blocks.items()})

    __rmul__ = __mul__

    def adjoint(self) -> BlockOperator:
        return BlockOperator(self.carrier, {l: m.conj().T for l, m in self.blocks.items()})

    def norm(self) -> float:
        """Frobenius norm over all blocks."""
        return float(np.sqrt(sum(np.linalg.norm(m) ** 2 for m in self.blocks.values())))

    def is_projection(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return all(
            np.linalg.norm(m @ m - m) < tol.eq_tol
            and np.linalg.norm(m - m.conj().T) < tol.eq_tol
            for m in self.blocks.values()
        )

    def __repr__(self):
        return f"BlockOperator(on {self.carrier!r})"


def identity_op(x: QuantumSet) -> BlockOperator:
    return BlockOperator(x, {a.label: np.eye(a.dim, dtype=complex) for a in x.atoms})


def zero_op(x: QuantumSet) -> BlockOperator:
    return BlockOperator(x, {})


def matrix_unit_op(x: QuantumSet, label, k, l) -> BlockOperator:
    """The generator supported on one atom, with e_kl there and 0 elsewhere."""
    d = x.dim(label)
    m = np.zeros((d, d), dtype=complex)
    m[k, l] = 1.0
    return BlockOperator(x, {label: m})


class Fission:
    """A family of coisometries f_X^Y: X -> Y (x) H_X^Y (absent entry means
    a zero-dimensional coefficient space).  Entry matrices have shape
    (dim(Y) . h, dim(X)); coefficient spaces are canonical coordinate
    spaces, so unitary-equivalence classes are compared through the induced
    star maps, never through raw coisometries."""

    __slots__ = ("source", "target", "entries")

    def __init__(self, source: QuantumSet, target: QuantumSet, entries,
                 tol: Tolerance = DEFAULT_TOL, validate=True):
        norm = {}
        for (xl, yl), (h, mat) in entries.items():
            if xl not in source or yl not in target:
                raise SchemaError(f"entry ({xl!r}, {yl!r}) references unknown atoms")
            h = int(h)
            if h == 0:
                continue
            mat = linalg.as_matrix(mat)
            dx, dy = source.dim(xl), target.dim(yl)
            if mat.shape != (dy * h, dx):
                raise SchemaError(
                    f"entry ({xl!r}, {yl!r}) has shape {mat.shape}, expected ({dy * h}, {dx})"
                )
            norm[(xl, yl)] = (h, mat)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "entries", norm)
        if validate:
            self._validate(tol)

    def __setattr__(self, name, value):
        raise AttributeError("Fission is immutable")

    def _validate(self, tol: Tolerance):
        for xl in self.source.labels():
            row = [(yl, mat) for (xl2, yl), (_, mat) in self.entries.items() if xl2 == xl]
            for yl, mat in row:
                gram = mat @ mat.conj().T
                if np.linalg.norm(gram - np.eye(gram.shape[0])) > tol.eq_tol:
                    raise PreconditionError(
                        f"entry ({xl!r}, {yl!r}) is not a coisometry"
                    )
            for i, (y1, m1) in enumerate(row):
                for y2, m2 in row[i + 1:]:
                    if y1 != y2 and np.linalg.norm(m1 @ m2.conj().T) > tol.eq_tol:
                        raise PreconditionError(
                            f"entries ({xl!r}, {y1!r}) and ({xl!r}, {y2!r}) "
                            "are not cross-orthogonal"
                        )

    def coefficient_dim(self, xl, yl) -> int:
        entry = self.entries.get((xl, yl))
        return entry[0] if entry else 0

    def support_defect(self, xl) -> float:
        """|| sum_Y f^dagger f - 1 || on the given source atom; zero exactly
        for fissions of (total) functions."""
        d = self.source.dim(xl)
        acc = np.zeros((d, d), dtype=complex)
        for (xl2, _), (_, mat) in self.entries.items():
            if xl2 == xl:
                acc += mat.conj().T @ mat
        return float(np.linalg.norm(acc - np.eye(d)))

    def is_total(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return all(self.support_defect(xl) < tol.eq_tol for xl in self.source.labels())

    def __repr__(self):
        return f"Fission({self.source!r} -> {self.target!r}, {len(self.entries)} entries)"


class HomTable:
    """A *-homomorphism from the block algebra of ``dom`` to the block
    algebra of ``cod``, given extensionally: ``images[ylabel]`` is a 4-index
    array T with T[k, l] = the cod-block-matrix image of the matrix unit
    e_kl supported on atom ylabel, restricted to one cod atom — stored as
    ``images[ylabel][xlabel]`` of shape (dY, dY, dX, dX)."""

    __slots__ = ("dom", "cod", "images")

    def __init__(self, dom: QuantumSet, cod: QuantumSet, images):
        store = {}
        for b in dom.atoms:
            per_y = images.get(b.label, {})
            store[b.label] = {}
            for a in cod.atoms:
                t = per_y.get(a.label)
                if t is None:
                    t = np.zeros((b.dim, b.dim, a.dim, a.dim), dtype=complex)
                else:
                    t = np.asarray(t, dtype=complex)
                    if t.shape != (b.dim, b.dim, a.dim, a.dim):
                        raise SchemaError(
                            f"image table ({b.label!r}, {a.label!r}) has shape "
                            f"{t.shape}, expected {(b.dim, b.dim, a.dim, a.dim)}"
                        )
                store[b.label][a.label] = t
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        object.__setattr__(self, "images", store)

    def __setattr__(self, name, value):
        raise AttributeError("HomTable is immutable")

    def apply(self, b: BlockOperator) -> BlockOperator:
        """Evaluate the homomorphism on a block operator by linearity."""
        if b.carrier != self.dom:
            raise SetMismatchError("operator lives on the wrong carrier")
        out = {a.label: np.zeros((a.dim, a.dim), dtype=complex) for a in self.cod.atoms}
        for yb in self.dom.atoms:
            coeffs = b.blocks[yb.label]
            for a in self.cod.atoms:
                t = self.images[yb.label][a.label]
                out[a.label] += np.einsum("kl,klij->ij", coeffs, t)
        return BlockOperator(self.cod, out)

    def validate(self, tol: Tolerance = DEFAULT_TOL) -> float:
        """Max violation of multiplicativity, adjoint-preservation, and
        cross-target annihilation on matrix-unit generators."""
        worst = 0.0
        for yb in self.dom.atoms:
            d = yb.dim
            for a in self.cod.atoms:
                t = self.images[yb.label][a.label]
                for k in range(d):
                    for l in range(d):
                        worst = max(worst, float(np.linalg.norm(
                            t[k, l].conj().T - t[l, k])))
                        for m in range(d):
                            for n in range(d):
                                expected = t[k, n] if l == m else 0.0
                                worst = max(worst, float(np.linalg.norm(
                                    t[k, l] @ t[m, n] - expected)))
        # cross-target products must vanish
        for i, y1 in enumerate(self.dom.atoms):
            for y2 in self.dom.atoms[i + 1:]:
                for a in self.cod.atoms:
                    p1 = np.einsum("kkij->ij", self.images[y1.label][a.label])
                    p2 = np.einsum("kkij->ij", self.images[y2.label][a.label])
                    worst = max(worst, float(np.linalg.norm(p1 @ p2)))
        return worst


# -- the three constructions --------------------------------------------------


def _require_partial_function(f: Relation, tol: Tolerance):
    from . import qfun

    witness = qfun.check_axioms(f, tol)
    if not witness.is_coinjective:
        raise PreconditionError(
            f"relation is not a partial function (coinjectivity residual "
            f"{witness.residuals['coinjective']:.3g})"
        )
    return witness


def star_map(f: Relation, b: BlockOperator, tol: Tolerance = DEFAULT_TOL,
             *, checked=True) -> BlockOperator:
    """F*(b)(X) = sum_Y sum_w dim(Y) . w^dagger b(Y) w over the stored
    HS-orthonormal block bases."""
    if b.carrier != f.target:
        raise SetMismatchError("operator must live on the target of the relation")
    if checked:
        _require_partial_function(f, tol)
    out = {}
    for a in f.source.atoms:
        acc = np.zeros((a.dim, a.dim), dtype=complex)
        for (xl, yl), space in f.blocks.items():
            if xl != a.label:
                continue
            dy = f.target.dim(yl)
            by = b.blocks[yl]
            for w in space.basis:
                acc += dy * (w.conj().T @ by @ w)
        out[a.label] = acc
    return BlockOperator(f.source, out)


def star_is_homomorphism(f: Relation, tol: Tolerance = DEFAULT_TOL) -> float:
    """Max residual of multiplicativity, adjoint-preservation, and
    cross-target annihilation of F* on matrix-unit generators.  Zero for
    genuine partial functions; deliberately corrupted relations report a
    nonzero residual instead of raising."""
    table = hom_from_function(f, tol, checked=False)
    return table.validate(tol)


def hom_from_function(f: Relation, tol: Tolerance = DEFAULT_TOL, *, checked=True) -> HomTable:
    """Tabulate F* on matrix units (one evaluation per generator)."""
    if checked:
        _require_partial_function(f, tol)
    images = {}
    for yb in f.target.atoms:
        per_x = {
            a.label: np.zeros((yb.dim, yb.dim, a.dim, a.dim), dtype=complex)
            for a in f.source.atoms
        }
        for k in range(yb.dim):
            for l in range(yb.dim):
                img = star_map(f, matrix_unit_op(f.target, yb.label, k, l),
                               tol, checked=False)
                for a in f.source.atoms:
                    per_x[a.label][k, l] = img.blocks[a.label]
        images[yb.label] = per_x
    return HomTable(f.target, f.source, images)


def fission_from_function(f: Relation, tol: Tolerance = DEFAULT_TOL) -> Fission:
    """Coisometries f_X^Y(x) = sum_v v(x) (x) v^dagger over a basis of
    F(X, Y) orthonormal for (v | v') 1_Y = v' . v^dagger; the stored
    HS-orthonormal basis rescales by sqrt(dim Y)."""
    _require_partial_function(f, tol)
    entries = {}
    for (xl, yl), space in f.blocks.items():
        dy = f.target.dim(yl)
        h = space.dim
        rows = []
        for w in space.basis:
            v = np.sqrt(dy) * w
            rows.append(v)
        # f = sum_i kron(v_i, e_i): X -> Y (x) C^h, laid out so the
        # coefficient index varies fastest.
        mat = np.zeros((dy * h, f.source.dim(xl)), dtype=complex)
        for i, v in enumerate(rows):
            for r in range(dy):
                mat[r * h + i, :] = v[r, :]
        entries[(xl, yl)] = (h, mat)
    return Fission(f.source, f.target, entries, tol)


def function_from_fission(fi: Fission, tol: Tolerance = DEFAULT_TOL) -> Relation:
    """Recover the relation: F(X, Y) is spanned by the coefficient slices
    (1 (x) e_i^dagger) f_X^Y."""
    blocks = {}
    for (xl, yl), (h, mat) in fi.entries.items():
        dy = fi.target.dim(yl)
        dx = fi.source.dim(xl)
        slices = []
        for i in range(h):
            v = np.zeros((dy, dx), dtype=complex)
            for r in range(dy):
                v[r, :] = mat[r * h + i, :]
            slices.append(v)
        space = linalg.span(slices, tol, floor=1.0)
        if not space.is_zero:
            blocks[(xl, yl)] = space
    return Relation(fi.source, fi.target, blocks)


def identity_fission(x: QuantumSet) -> Fission:
    entries = {
        (a.label, a.label): (1, np.eye(a.dim, dtype=complex)) for a in x.atoms
    }
    return Fission(x, x, entries)


def fission_star(fi: Fission, b: BlockOperator) -> BlockOperator:
    """phi(b)(X) = sum_Y f^dagger (b(Y) (x) 1) f; the induced star map,
    invariant under unitary equivalence of coefficient spaces."""
    if b.carrier != fi.target:
        raise SetMismatchError("operator must live on the fission target")
    out = {}
    for a in fi.source.atoms:
        acc = np.zeros((a.dim, a.dim), dtype=complex)
        for (xl, yl), (h, mat) in fi.entries.items():
            if xl != a.label:
                continue
            big = np.kron(b.blocks[yl], np.eye(h))
            acc += mat.conj().T @ big @ mat
        out[a.label] = acc
    return BlockOperator(fi.source, out)


def function_from_homomorphism(table: HomTable, tol: Tolerance = DEFAULT_TOL) -> Relation:
    """F(X, Y) = the intertwiner space { v | b v = v phi(b) for all matrix
    units b of L(Y) }, solved as a null space; the table must validate as a
    homomorphism first."""
    defect = table.validate(tol)
    if defect > max(tol.eq_tol, 1e-7):
        raise PreconditionError(
            f"generator-image table is not a *-homomorphism (residual {defect:.3g})"
        )
    y_set, x_set = table.dom, table.cod
    blocks = {}
    for xb in x_set.atoms:
        for yb in y_set.atoms:
            dx, dy = xb.dim, yb.dim
            t = table.images[yb.label][xb.label]
            rows = []
            for k in range(dy):
                for l in range(dy):
                    e = np.zeros((dy, dy), dtype=complex)
                    e[k, l] = 1.0
                    # (e_kl v - v phi(e_kl)) as a linear map on vec_r(v)
                    rows.append(np.kron(e, np.eye(dx)) - np.kron(np.eye(dy), t[k, l].T))
            system = np.vstack(rows)
            _, s, vh = np.linalg.svd(system)
            # constraint rows have unit natural scale; don't let pure noise
            # masquerade as rank
            rank = int(np.sum(s > max(tol.rank_cut, 1e-9) * max(s[0], 1.0))) if s.size else 0
            null_dim = dy * dx - rank
            if null_dim:
                mats = [vh[rank + i].conj().reshape(dy, dx) for i in range(null_dim)]
                blocks[(xb.label, yb.label)] = linalg.span(mats, tol, floor=1.0)
    return Relation(x_set, y_set, blocks)


def fission_compose(g: Fission, f: Fission, tol: Tolerance = DEFAULT_TOL) -> Fission:
    """(g o f)_X^Z = sum_Y (g_Y^Z (x) 1) f_X^Y, with coefficient space the
    direct sum over Y of K_Y^Z (x) H_X^Y."""
    if f.target != g.source:
        raise SetMismatchError("fission composition needs matching middle set")
    entries = {}
    for xb in f.source.atoms:
        for zb in g.target.atoms:
            pieces = []
            total_h = 0
            for yb in f.target.atoms:
                fe = f.entries.get((xb.label, yb.label))
                ge = g.entries.get((yb.label, zb.label))
                if fe is None or ge is None:
                    continue
                hf, fm = fe
                hg, gm = ge
                term = np.kron(gm, np.eye(hf)) @ fm  # X -> Z (x) K (x) H
                pieces.append((hg * hf, term))
                total_h += hg * hf
            if not total_h:
                continue
            dz, dx = zb.dim, xb.dim
            mat = np.zeros((dz * total_h, dx), dtype=complex)
            offset = 0
            for h, term in pieces:
                t = term.reshape(dz, h, dx)
                mat.reshape(dz, total_h, dx)[:, offset:offset + h, :] = t
                offset += h
            entries[(xb.label, zb.label)] = (total_h, mat)
    return Fission(f.source, g.target, entries, tol)


def fission_tensor(f1: Fission, f2: Fission, tol: Tolerance = DEFAULT_TOL) -> Fission:
    """Per-entry Kronecker products with the middle-factor swap, giving
    coisometries X1 (x) X2 -> Y1 (x) Y2 (x) H1 (x) H2."""
    source = cartesian_product(f1.source, f2.source)
    target = cartesian_product(f1.target, f2.target)
    entries = {}
    for (x1, y1), (h1, m1) in f1.entries.items():
        a1, b1 = f1.source.atom(x1), f1.target.atom(y1)
        for (x2, y2), (h2, m2) in f2.entries.items():
            a2, b2 = f2.source.atom(x2), f2.target.atom(y2)
            d1, d2 = b1.dim, b2.dim
            raw = np.kron(m1, m2)  # (Y1 H1 Y2 H2) x (X1 X2)
            t = raw.reshape(d1, h1, d2, h2, a1.dim * a2.dim)
            t = t.transpose(0, 2, 1, 3, 4)  # -> (Y1 Y2 H1 H2)
            mat = t.reshape(d1 * d2 * h1 * h2, a1.dim * a2.dim)
            entries[(pair_label(a1, a2), pair_label(b1, b2))] = (h1 * h2, mat)
    return Fission(source, target, entries, tol)


# -- duality probes ------------------------------------------------------------


def is_unital(f: Relation, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether F*(1) = 1 (equivalent to F being a total function)."""
    img = star_map(f, identity_op(f.target), tol)
    return (img - identity_op(f.source)).norm() < tol.eq_tol


def star_injective(f: Relation, tol: Tolerance = DEFAULT_TOL) -> bool:
    """F* is injective iff its kernel central projection vanishes, i.e.
    every target atom supports some nonzero block."""
    _require_partial_function(f, tol)
    reached = {yl for (_, yl) in f.blocks}
    return reached == set(f.target.labels())


def star_surjective(f: Relation, tol: Tolerance = DEFAULT_TOL) -> bool:
    """F* is surjective iff the images of the matrix units span the whole
    block algebra of the source (dimension sum dim(X)^2)."""
    _require_partial_function(f, tol)
    total = f.source.square_dim_sum()
    vecs = []
    for yb in f.target.atoms:
        for k in range(yb.dim):
            for l in range(yb.dim):
                img = star_map(f, matrix_unit_op(f.target, yb.label, k, l),
                               tol, checked=False)
                vecs.append(np.concatenate([img.blocks[a.label].ravel()
                                            for a in f.source.atoms]))
    if not vecs:
        return total == 0
    rank = np.linalg.matrix_rank(np.array(vecs), tol=1e-9)
    return int(rank) == total


def spectral_function(a: BlockOperator, tol: Tolerance = DEFAULT_TOL):
    """Spectral correspondence for a self-adjoint block operator with finite
    spectrum: returns (clustered eigenvalues ascending, F) where F is the
    function from the carrier to the classical set of eigenvalue labels
    with F(X, C_alpha) the row-vector space of the alpha-eigenspace.

    Eigenvalues are clustered by single linkage with gap eq_tol; labels are
    ``ev0``, ``ev1``, ... in ascending order.
    """
    defect = (a - a.adjoint()).norm()
    if defect > tol.eq_tol:
        raise PreconditionError(f"operator is not self-adjoint (residual {defect:.3g})")
    eigs = {}
    all_vals = []
    for label, m in a.blocks.items():
        w, v = np.linalg.eigh((m + m.conj().T) / 2.0)
        eigs[label] = (w, v)
        all_vals.extend(w.tolist())
    all_vals.sort()
    clusters = []  # list of [lo, hi]
    for val in all_vals:
        if clusters and val - clusters[-1][1] < tol.eq_tol:
            clusters[-1][1] = val
        else:
            clusters.append([val, val])
    reps = [float((lo + hi) / 2.0) for lo, hi in clusters]
    labels = [f"ev{i}" for i in range(len(reps))]
    target = classical_embed(labels)

    def cluster_of(val):
        for i, (lo, hi) in enumerate(clusters):
            if lo - tol.eq_tol < val < hi + tol.eq_tol:
                return i
        raise AssertionError("eigenvalue fell outside all clusters")

    blocks = {}
    for atom in a.carrier.atoms:
        w, v = eigs[atom.label]
        for i in range(len(reps)):
            cols = [v[:, j] for j in range(len(w)) if cluster_of(w[j]) == i]
            if not cols:
                continue
            rows = [c.conj().reshape(1, -1) for c in cols]
            blocks[(atom.label, labels[i])] = linalg.span(rows, tol, floor=1.0)
    return reps, Relation(a.carrier, target, blocks)


# -- JSON encoding ------------------------------------------------------------
#
# BlockOperator: {"carrier": <qset>, "blocks": {"label": <matrix>, ...}}
# HomTable:      {"dom": <qset>, "cod": <qset>,
#                 "images": {ylabel: {xlabel: [<matrix for e_00>, e_01, ...]}}}


def blockop_to_json(b: BlockOperator) -> dict:
    return {
        "carrier": qset_to_json(b.carrier),
        "blocks": {l: linalg.matrix_to_json(m) for l, m in sorted(b.blocks.items())},
    }


def blockop_from_json(obj, path="blockop") -> BlockOperator:
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", path)
    carrier = qset_from_json(obj.get("carrier"), f"{path}.carrier")
    raw = obj.get("blocks")
    if not isinstance(raw, dict):
        raise SchemaError("blocks must be an object", f"{path}.blocks")
    blocks = {
        l: linalg.matrix_from_json(m, f"{path}.blocks[{l}]") for l, m in raw.items()
    }
    try:
        return BlockOperator(carrier, blocks)
    except SchemaError as exc:
        raise SchemaError(str(exc), path) from exc


def hom_to_json(t: HomTable) -> dict:
    images = {}
    for yl, per_x in sorted(t.images.items()):
        dy = t.dom.dim(yl)
        flat = []
        for k in range(dy):
            for l in range(dy):
                flat.append(
                    {xl: linalg.matrix_to_json(per_x[xl][k, l]) for xl in sorted(per_x)}
                )
        images[yl] = flat
    return {"dom": qset_to_json(t.dom), "cod": qset_to_json(t.cod), "images": images}


def hom_from_json(obj, path="hom") -> HomTable:
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", path)
    dom = qset_from_json(obj.get("dom"), f"{path}.dom")
    cod = qset_from_json(obj.get("cod"), f"{path}.cod")
    raw = obj.get("images")
    if not isinstance(raw, dict):
        raise SchemaError("images must be an object", f"{path}.images")
    images = {}
    for yl, flat in raw.items():
        if yl not in dom:
            raise SchemaError(f"unknown dom atom {yl!r}", f"{path}.images")
        dy = dom.dim(yl)
        if not isinstance(flat, list) or len(flat) != dy * dy:
            raise SchemaError(f"need {dy * dy} generator images", f"{path}.images[{yl}]")
        per_x = {
            a.label: np.zeros((dy, dy, a.dim, a.dim), dtype=complex) for a in cod.atoms
        }
        for idx, entry in enumerate(flat):
            k, l = divmod(idx, dy)
            if not isinstance(entry, dict):
                raise SchemaError("expected an object", f"{path}.images[{yl}][{idx}]")
            for xl, mj in entry.items():
                if xl not in cod:
                    raise SchemaError(f"unknown cod atom {xl!r}",
                                      f"{path}.images[{yl}][{idx}]")
                per_x[xl][k, l] = linalg.matrix_from_json(
                    mj, f"{path}.images[{yl}][{idx}][{xl}]"
                )
        images[yl] = per_x
    return HomTable(dom, cod, images)


def fission_to_json(fi: Fission) -> dict:
    return {
        "source": qset_to_json(fi.source),
        "target": qset_to_json(fi.target),
        "entries": [
            {"from": xl, "to": yl, "h": h, "matrix": linalg.matrix_to_json(m)}
            for (xl, yl), (h, m) in sorted(fi.entries.items())
        ],
    }
