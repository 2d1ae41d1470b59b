"""Dense complex matrices and tolerance-controlled operator subspaces.

An operator subspace is a linear subspace V <= L(X, Y) of complex matrices,
represented by a basis that is orthonormal for the Hilbert-Schmidt inner
product <A, B> = trace(A^dagger B).  Bases are never compared directly;
subspace identity always goes through orthogonal projectors, which are
basis-independent.

All values are immutable after construction and all operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SchemaError, ShapeMismatchError

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "OperatorSubspace",
    "as_matrix",
    "span",
    "zero_space",
    "full_space",
    "line",
    "scaled_identity_space",
    "subspace_product",
    "subspace_dagger",
    "subspace_transpose_dual",
    "subspace_tensor",
    "complement",
    "meet",
    "join",
    "leq",
    "eq",
    "leq_residual",
    "eq_residual",
    "contains",
    "matrix_to_json",
    "matrix_from_json",
]


@dataclass(frozen=True)
class Tolerance:
    """Numeric thresholds: ``rank_cut`` is the relative singular-value
    cutoff used when spanning; ``eq_tol`` is the Frobenius threshold for
    projector comparisons and membership residuals."""

    rank_cut: float = 1e-10
    eq_tol: float = 1e-8

    def __post_init__(self):
        if not (0.0 < self.rank_cut < 1.0):
            raise SchemaError(f"rank_cut must be in (0, 1), got {self.rank_cut}")
        if not (0.0 < self.eq_tol < 1.0):
            raise SchemaError(f"eq_tol must be in (0, 1), got {self.eq_tol}")


DEFAULT_TOL = Tolerance()


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite 2-d complex array, rejecting NaN/Inf entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ShapeMismatchError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise SchemaError("matrix has non-finite entries")
    return a


class OperatorSubspace:
    """A subspace of L(X, Y), held as an HS-orthonormal basis of matrices.

    ``domain_dim`` is dim(X), ``codomain_dim`` is dim(Y); every basis element
    has shape (codomain_dim, domain_dim).  The zero subspace carries shape
    metadata explicitly, so empty bases remain well-typed.
    """

    __slots__ = ("domain_dim", "codomain_dim", "basis", "_projector")

    def __init__(self, domain_dim, codomain_dim, basis, *, _trusted=False):
        domain_dim = int(domain_dim)
        codomain_dim = int(codomain_dim)
        if domain_dim < 1 or codomain_dim < 1:
            raise ShapeMismatchError(
                f"subspace shape must be positive, got {codomain_dim}x{domain_dim}"
            )
        mats = tuple(as_matrix(b) for b in basis)
        for b in mats:
            if b.shape != (codomain_dim, domain_dim):
                raise ShapeMismatchError(
                    f"basis element shape {b.shape} != ({codomain_dim}, {domain_dim})"
                )
        if len(mats) > domain_dim * codomain_dim:
            raise ShapeMismatchError("basis longer than dim L(X, Y)")
        if mats and not _trusted:
            vecs = np.array([b.ravel() for b in mats])
            gram = vecs.conj() @ vecs.T
            if np.max(np.abs(gram - np.eye(len(mats)))) > 1e-6:
                raise SchemaError("basis is not HS-orthonormal")
        object.__setattr__(self, "domain_dim", domain_dim)
        object.__setattr__(self, "codomain_dim", codomain_dim)
        object.__setattr__(self, "basis", mats)
        object.__setattr__(self, "_projector", None)

    def __setattr__(self, name, value):
        raise AttributeError("OperatorSubspace is immutable")

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def is_zero(self) -> bool:
        return not self.basis

    @property
    def shape(self):
        return (self.codomain_dim, self.domain_dim)

    def projector(self) -> np.ndarray:
        """Orthogonal projector onto the subspace, acting on vectorized
        matrices (shape nm x nm).  Cached; this is the canonical identity
        of the subspace."""
        if self._projector is None:
            n = self.domain_dim * self.codomain_dim
            if self.basis:
                vecs = np.array([b.ravel() for b in self.basis])
                proj = vecs.T @ vecs.conj()
            else:
                proj = np.zeros((n, n), dtype=complex)
            object.__setattr__(self, "_projector", proj)
        return self._projector

    def project(self, mat) -> np.ndarray:
        """Orthogonal projection of a matrix onto the subspace."""
        m = as_matrix(mat)
        if m.shape != self.shape:
            raise ShapeMismatchError(f"matrix shape {m.shape} != {self.shape}")
        out = np.zeros(self.shape, dtype=complex)
        for b in self.basis:
            out += np.vdot(b, m) * b
        return out

    def __repr__(self):
        return (
            f"OperatorSubspace({self.codomain_dim}x{self.domain_dim}, "
            f"dim={self.dim})"
        )


def zero_space(domain_dim, codomain_dim) -> OperatorSubspace:
    return OperatorSubspace(domain_dim, codomain_dim, (), _trusted=True)


def full_space(domain_dim, codomain_dim) -> OperatorSubspace:
    """All of L(X, Y); the matrix units are an HS-orthonormal basis."""
    basis = []
    for i in range(codomain_dim):
        for j in range(domain_dim):
            b = np.zeros((codomain_dim, domain_dim), dtype=complex)
            b[i, j] = 1.0
            basis.append(b)
    return OperatorSubspace(domain_dim, codomain_dim, basis, _trusted=True)


def line(mat) -> OperatorSubspace:
    """The one-dimensional subspace spanned by a single nonzero matrix."""
    m = as_matrix(mat)
    nrm = np.linalg.norm(m)
    if nrm == 0.0:
        raise ShapeMismatchError("cannot span a line on the zero matrix")
    return OperatorSubspace(m.shape[1], m.shape[0], (m / nrm,), _trusted=True)


def scaled_identity_space(n) -> OperatorSubspace:
    """The line C.1_n, with the HS-normalized identity as basis."""
    return line(np.eye(n))


def span(mats, tol: Tolerance = DEFAULT_TOL, floor: float = 0.0) -> OperatorSubspace:
    """HS-orthonormal basis of the linear span of the given matrices.

    The rank is decided by the singular values of the stacked vectorized
    matrices, cutting at ``tol.rank_cut`` relative to the largest one.
    The input must be nonempty (pass an explicit zero matrix to fix the
    shape of a zero span).

    ``floor`` sets a minimum scale for the relative cut: internal callers
    that span products of unit-norm basis matrices pass 1.0, so pure
    rounding noise (which would otherwise be the largest singular value)
    never registers as a dimension.
    """
    mats = [as_matrix(m) for m in mats]
    if not mats:
        raise ShapeMismatchError("span of an empty list has no shape; pass a zero matrix")
    shape = mats[0].shape
    for m in mats[1:]:
        if m.shape != shape:
            raise ShapeMismatchError(f"mixed shapes in span: {shape} vs {m.shape}")
    cod, dom = shape
    if len(mats) == 1:
        nrm = np.linalg.norm(mats[0])
        if nrm <= tol.rank_cut * floor or nrm == 0.0:
            return zero_space(dom, cod)
        return OperatorSubspace(dom, cod, (mats[0] / nrm,), _trusted=True)
    stack = np.array([m.ravel() for m in mats])
    _, s, vh = np.linalg.svd(stack, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return zero_space(dom, cod)
    rank = int(np.sum(s > tol.rank_cut * max(s[0], floor)))
    basis = tuple(vh[i].reshape(cod, dom) for i in range(rank))
    return OperatorSubspace(dom, cod, basis, _trusted=True)


def _check_same_shape(v: OperatorSubspace, w: OperatorSubspace):
    if (v.domain_dim, v.codomain_dim) != (w.domain_dim, w.codomain_dim):
        raise ShapeMismatchError(
            f"subspace shapes differ: {v.shape} vs {w.shape}"
        )


def subspace_product(w: OperatorSubspace, v: OperatorSubspace,
                     tol: Tolerance = DEFAULT_TOL) -> OperatorSubspace:
    """Span of all products w_i . v_j  (W <= L(Y, Z), V <= L(X, Y))."""
    if v.codomain_dim != w.domain_dim:
        raise ShapeMismatchError(
            f"cannot multiply: W domain {w.domain_dim} != V codomain {v.codomain_dim}"
        )
    if v.is_zero or w.is_zero:
        return zero_space(v.domain_dim, w.codomain_dim)
    prods = [wb @ vb for wb in w.basis for vb in v.basis]
    return span(prods, tol, floor=1.0)


def subspace_dagger(v: OperatorSubspace) -> OperatorSubspace:
    """Hermitian adjoint, elementwise; preserves HS-orthonormality."""
    basis = tuple(b.conj().T for b in v.basis)
    return OperatorSubspace(v.codomain_dim, v.domain_dim, basis, _trusted=True)


def subspace_transpose_dual(v: OperatorSubspace) -> OperatorSubspace:
    """Banach adjoint in the self-dual basis convention: plain transpose."""
    basis = tuple(b.T for b in v.basis)
    return OperatorSubspace(v.codomain_dim, v.domain_dim, basis, _trusted=True)


def subspace_tensor(v: OperatorSubspace, w: OperatorSubspace) -> OperatorSubspace:
    """Kronecker products of basis pairs; orthonormality is preserved, so
    no re-orthonormalization is performed."""
    if v.is_zero or w.is_zero:
        return zero_space(v.domain_dim * w.domain_dim,
                          v.codomain_dim * w.codomain_dim)
    basis = tuple(np.kron(a, b) for a in v.basis for b in w.basis)
    return OperatorSubspace(v.domain_dim * w.domain_dim,
                            v.codomain_dim * w.codomain_dim, basis,
                            _trusted=True)


def complement(v: OperatorSubspace, tol: Tolerance = DEFAULT_TOL) -> OperatorSubspace:
    """HS-orthogonal complement inside L(X, Y)."""
    n = v.domain_dim * v.codomain_dim
    if v.is_zero:
        return full_space(v.domain_dim, v.codomain_dim)
    stack = np.array([b.ravel() for b in v.basis])
    _, s, vh = np.linalg.svd(stack, full_matrices=True)
    rank = int(np.sum(s > tol.rank_cut * s[0])) if s.size and s[0] > 0 else 0
    basis = tuple(vh[i].reshape(v.codomain_dim, v.domain_dim)
                  for i in range(rank, n))
    return OperatorSubspace(v.domain_dim, v.codomain_dim, basis, _trusted=True)


def join(v: OperatorSubspace, w: OperatorSubspace,
         tol: Tolerance = DEFAULT_TOL) -> OperatorSubspace:
    """Span of the union of the two subspaces."""
    _check_same_shape(v, w)
    if v.is_zero:
        return w
    if w.is_zero:
        return v
    return span(list(v.basis) + list(w.basis), tol)


def meet(v: OperatorSubspace, w: OperatorSubspace,
         tol: Tolerance = DEFAULT_TOL) -> OperatorSubspace:
    """Intersection, via De Morgan: (V' v W')'."""
    _check_same_shape(v, w)
    return complement(join(complement(v, tol), complement(w, tol), tol), tol)


def leq_residual(v: OperatorSubspace, w: OperatorSubspace) -> float:
    """Largest distance of a V basis vector from W (0 when V <= W)."""
    _check_same_shape(v, w)
    if v.is_zero:
        return 0.0
    proj = w.projector()
    worst = 0.0
    for b in v.basis:
        vec = b.ravel()
        worst = max(worst, float(np.linalg.norm(vec - proj @ vec)))
    return worst


def leq(v: OperatorSubspace, w: OperatorSubspace,
        tol: Tolerance = DEFAULT_TOL) -> bool:
    return leq_residual(v, w) < tol.eq_tol


def eq_residual(v: OperatorSubspace, w: OperatorSubspace) -> float:
    """Frobenius distance of the orthogonal projectors."""
    _check_same_shape(v, w)
    return float(np.linalg.norm(v.projector() - w.projector()))


def eq(v: OperatorSubspace, w: OperatorSubspace,
       tol: Tolerance = DEFAULT_TOL) -> bool:
    return eq_residual(v, w) < tol.eq_tol


def contains(v: OperatorSubspace, mat, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether a single matrix lies in the subspace (up to eq_tol,
    relative to the matrix norm)."""
    m = as_matrix(mat)
    nrm = np.linalg.norm(m)
    if nrm == 0.0:
        return True
    return bool(np.linalg.norm(m - v.project(m)) < tol.eq_tol * max(1.0, nrm))


# -- JSON encoding ----------------------------------------------------------
#
# Matrix:   {"rows": n, "cols": m, "data": [[re, im], ...]}   (row-major)
# Subspace: {"dom": n, "cod": m, "basis": [matrix, ...]}


def matrix_to_json(m) -> dict:
    a = as_matrix(m)
    data = [[float(x.real), float(x.imag)] for x in a.ravel()]
    return {"rows": int(a.shape[0]), "cols": int(a.shape[1]), "data": data}


def matrix_from_json(obj, path="matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", path)
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"missing or bad field: {exc}", path) from exc
    if rows < 1 or cols < 1:
        raise SchemaError("rows and cols must be >= 1", path)
    if not isinstance(data, list) or len(data) != rows * cols:
        raise SchemaError(f"data must hold {rows * cols} entries", f"{path}.data")
    try:
        flat = [complex(re, im) for re, im in data]
    except (TypeError, ValueError) as exc:
        raise SchemaError("entries must be [re, im] pairs", f"{path}.data") from exc
    a = np.array(flat, dtype=complex).reshape(rows, cols)
    if not np.all(np.isfinite(a)):
        raise SchemaError("non-finite entry", f"{path}.data")
    return a


def subspace_to_json(v: OperatorSubspace) -> dict:
    return {
        "dom": v.domain_dim,
        "cod": v.codomain_dim,
        "basis": [matrix_to_json(b) for b in v.basis],
    }


def subspace_from_json(obj, path="subspace") -> OperatorSubspace:
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", path)
    try:
        dom, cod, basis = int(obj["dom"]), int(obj["cod"]), obj["basis"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"missing or bad field: {exc}", path) from exc
    if not isinstance(basis, list):
        raise SchemaError("basis must be a list", f"{path}.basis")
    mats = [matrix_from_json(b, f"{path}.basis[{i}]") for i, b in enumerate(basis)]
    try:
        return OperatorSubspace(dom, cod, mats)
    except ShapeMismatchError as exc:
        raise SchemaError(str(exc), path) from exc
