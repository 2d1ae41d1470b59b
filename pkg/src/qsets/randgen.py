"""Seeded random instances for the law suite and the tests.

All generators take an explicit numpy Generator; the law runner derives one
per trial from (seed, trial index) so any counterexample replays exactly.
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .linalg import DEFAULT_TOL
from .qset import Atom, QuantumSet
from .qrel import Relation

__all__ = [
    "rng_for",
    "random_unitary",
    "random_qset",
    "random_subspace",
    "random_relation",
    "random_partial_function",
    "random_function",
    "random_predicate",
    "random_hermitian_blockop",
    "random_classical_relation",
]


def rng_for(seed, index) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def random_unitary(rng, n) -> np.ndarray:
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_qset(rng, max_atoms, max_dim, min_atoms=1, prefix="q") -> QuantumSet:
    n = int(rng.integers(min_atoms, max_atoms + 1))
    return QuantumSet(
        Atom(f"{prefix}{i}", int(rng.integers(1, max_dim + 1))) for i in range(n)
    )


def random_subspace(rng, dom, cod, dim=None) -> linalg.OperatorSubspace:
    if dim is None:
        dim = int(rng.integers(0, dom * cod + 1))
    if dim == 0:
        return linalg.zero_space(dom, cod)
    mats = [rng.normal(size=(cod, dom)) + 1j * rng.normal(size=(cod, dom))
            for _ in range(dim)]
    return linalg.span(mats, DEFAULT_TOL)


def random_relation(rng, x: QuantumSet, y: QuantumSet, density=0.5) -> Relation:
    blocks = {}
    for a in x.atoms:
        for b in y.atoms:
            if rng.random() >= density:
                continue
            dim = int(rng.integers(1, a.dim * b.dim + 1))
            space = random_subspace(rng, a.dim, b.dim, dim)
            if not space.is_zero:
                blocks[(a.label, b.label)] = space
    return Relation(x, y, blocks)


def _split_function_blocks(rng, x_dim, y_atoms, counts):
    """Slice a Haar-random unitary on C^x_dim into per-target chunks: the
    rows become the coisometry pieces, so the resulting block subspaces
    satisfy the partial-function axioms exactly."""
    u = random_unitary(rng, x_dim)
    blocks = {}
    row = 0
    for atom, h in counts:
        if h == 0:
            continue
        slices = []
        for _ in range(h):
            slices.append(u[row:row + atom.dim, :])
            row += atom.dim
        blocks[atom.label] = linalg.span(slices, DEFAULT_TOL)
    return blocks


def _random_multiplicity(rng, y: QuantumSet, max_dim, total=None):
    """Random multiset of target atoms whose weighted dimension sum is
    nonzero and at most max_dim (exactly ``total`` when given)."""
    atoms = list(y.atoms)
    for _ in range(64):
        counts = [(a, 0) for a in atoms]
        budget = total if total is not None else int(rng.integers(1, max_dim + 1))
        remaining = budget
        order = rng.permutation(len(atoms))
        for idx in order:
            a = atoms[idx]
            if a.dim > remaining:
                continue
            h = int(rng.integers(0, remaining // a.dim + 1))
            counts[idx] = (a, h)
            remaining -= h * a.dim
        used = budget - remaining
        if used == 0:
            continue
        if total is not None and used != total:
            continue
        return counts, used
    # fall back: a single copy of the smallest atom
    smallest = min(atoms, key=lambda a: a.dim)
    if total is not None and total != smallest.dim:
        return None, 0
    return [(a, 1 if a is smallest else 0) for a in atoms], smallest.dim


def random_partial_function(rng, max_atoms=3, max_dim=3, y: QuantumSet | None = None,
                            total=False, n_source=None) -> Relation:
    """A random partial function onto a (possibly given) target.  With
    ``total`` the support projections fill each source atom, so the result
    is a function."""
    if y is None:
        y = random_qset(rng, max_atoms, max_dim, prefix="y")
    n_source = int(rng.integers(1, max_atoms + 1)) if n_source is None else n_source
    blocks = {}
    x_atoms = []
    for i in range(n_source):
        counts, used = _random_multiplicity(rng, y, max_dim)
        slack = 0 if (total or used >= max_dim) else int(rng.integers(0, 2))
        x_dim = used + slack
        label = f"x{i}"
        x_atoms.append(Atom(label, x_dim))
        for tgt_label, space in _split_function_blocks(rng, x_dim, y.atoms, counts).items():
            blocks[(label, tgt_label)] = space
    x = QuantumSet(x_atoms)
    return Relation(x, y, blocks)


def random_function(rng, max_atoms=3, max_dim=3, y: QuantumSet | None = None,
                    n_source=None) -> Relation:
    return random_partial_function(rng, max_atoms, max_dim, y=y, total=True,
                                   n_source=n_source)


def random_predicate(rng, x: QuantumSet):
    from .pred import Predicate

    spaces = {}
    for a in x.atoms:
        rank = int(rng.integers(0, a.dim + 1))
        if rank:
            spaces[a.label] = random_unitary(rng, a.dim)[:, :rank]
    return Predicate(x, spaces)


def random_hermitian_blockop(rng, x: QuantumSet, spectrum=None):
    from .opalg import BlockOperator

    blocks = {}
    for a in x.atoms:
        if spectrum is None:
            g = rng.normal(size=(a.dim, a.dim)) + 1j * rng.normal(size=(a.dim, a.dim))
            blocks[a.label] = (g + g.conj().T) / 2.0
        else:
            u = random_unitary(rng, a.dim)
            d = np.diag(rng.choice(spectrum, size=a.dim).astype(complex))
            blocks[a.label] = u @ d @ u.conj().T
    return BlockOperator(x, blocks)


def random_classical_relation(rng, s_labels, t_labels, density=0.5) -> set:
    return {
        (s, t) for s in s_labels for t in t_labels if rng.random() < density
    }
