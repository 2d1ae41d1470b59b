"""Quantum sets: finite labeled collections of atoms.

An atom is a nonzero finite-dimensional Hilbert space, identified here by an
opaque label, its dimension, and a dual flag (the self-dual convention makes
the dual of an n-dimensional atom another n-dimensional atom, marked).
A quantum set is a finite family of atoms with distinct labels, kept in
canonical (label-sorted) order so serialization and block indexing are
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PreconditionError, SchemaError

__all__ = [
    "Atom",
    "QuantumSet",
    "classical_embed",
    "unit_set",
    "bool_set",
    "cartesian_product",
    "disjoint_union",
    "dual_set",
    "isomorphic",
    "pair_label",
    "left_label",
    "right_label",
]

UNIT_LABEL = "1"


@dataclass(frozen=True)
class Atom:
    label: str
    dim: int
    dual: bool = False

    def __post_init__(self):
        if not isinstance(self.label, str) or not self.label:
            raise SchemaError(f"atom label must be a nonempty string, got {self.label!r}")
        if not isinstance(self.dim, int) or self.dim < 1:
            raise SchemaError(f"atom dimension must be a positive integer, got {self.dim!r}")

    def pair_key(self) -> str:
        """How this atom is rendered inside a product label; the dual flag
        becomes a trailing ``*`` so X x X* and X* x X stay distinct."""
        return self.label + "*" if self.dual else self.label


class QuantumSet:
    """Immutable finite quantum set; atoms sorted by label."""

    __slots__ = ("atoms", "_by_label")

    def __init__(self, atoms):
        atoms = tuple(sorted(atoms, key=lambda a: a.label))
        by_label = {}
        for a in atoms:
            if not isinstance(a, Atom):
                raise SchemaError(f"expected Atom, got {type(a).__name__}")
            if a.label in by_label:
                raise SchemaError(f"duplicate atom label {a.label!r}")
            by_label[a.label] = a
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "_by_label", by_label)

    def __setattr__(self, name, value):
        raise AttributeError("QuantumSet is immutable")

    def __iter__(self):
        return iter(self.atoms)

    def __len__(self):
        return len(self.atoms)

    def __contains__(self, label):
        return label in self._by_label

    def __eq__(self, other):
        return isinstance(other, QuantumSet) and self.atoms == other.atoms

    def __hash__(self):
        return hash(self.atoms)

    def __repr__(self):
        inner = ", ".join(f"{a.pair_key()}:{a.dim}" for a in self.atoms)
        return f"QuantumSet({{{inner}}})"

    @property
    def is_empty(self) -> bool:
        return not self.atoms

    def labels(self):
        return tuple(a.label for a in self.atoms)

    def atom(self, label) -> Atom:
        try:
            return self._by_label[label]
        except KeyError:
            raise PreconditionError(f"no atom labeled {label!r}") from None

    def dim(self, label) -> int:
        return self.atom(label).dim

    def square_dim_sum(self) -> int:
        """Total squared dimension; additive under disjoint union and
        multiplicative under the Cartesian product."""
        return sum(a.dim ** 2 for a in self.atoms)

    def is_classical(self) -> bool:
        return all(a.dim == 1 for a in self.atoms)

    def is_subset_of(self, other: QuantumSet) -> bool:
        return all(
            a.label in other
            and other.atom(a.label).dim == a.dim
            and other.atom(a.label).dual == a.dual
            for a in self.atoms
        )


def classical_embed(labels) -> QuantumSet:
    """The quantum set `S of an ordinary set: one 1-dim atom per element."""
    labels = list(labels)
    if len(set(labels)) != len(labels):
        raise SchemaError("duplicate labels in classical set")
    return QuantumSet(Atom(lbl, 1) for lbl in labels)


def unit_set() -> QuantumSet:
    """The monoidal unit: a single one-dimensional atom."""
    return QuantumSet([Atom(UNIT_LABEL, 1)])


def bool_set() -> QuantumSet:
    """The truth-values set `{0,1}."""
    return classical_embed(["0", "1"])


def pair_label(a: Atom, b: Atom) -> str:
    return f"({a.pair_key()}|{b.pair_key()})"


def cartesian_product(x: QuantumSet, y: QuantumSet) -> QuantumSet:
    """One atom per ordered pair; dimensions multiply."""
    return QuantumSet(
        Atom(pair_label(a, b), a.dim * b.dim) for a in x.atoms for b in y.atoms
    )


def left_label(label: str) -> str:
    return f"l({label})"


def right_label(label: str) -> str:
    return f"r({label})"


def disjoint_union(x: QuantumSet, y: QuantumSet) -> QuantumSet:
    """Coproduct carrier: atoms of x tagged left, atoms of y tagged right."""
    atoms = [Atom(left_label(a.label), a.dim, a.dual) for a in x.atoms]
    atoms += [Atom(right_label(a.label), a.dim, a.dual) for a in y.atoms]
    return QuantumSet(atoms)


def dual_set(x: QuantumSet) -> QuantumSet:
    """Same dimensions, dual flag toggled on every atom."""
    return QuantumSet(Atom(a.label, a.dim, not a.dual) for a in x.atoms)


def isomorphic(x: QuantumSet, y: QuantumSet):
    """A dimension-preserving bijection of atom labels, or None.

    Greedy matching on the dimension multiset; any match works since atoms
    of equal dimension are interchangeable.
    """
    if len(x) != len(y):
        return None
    xs = sorted(x.atoms, key=lambda a: (a.dim, a.label))
    ys = sorted(y.atoms, key=lambda a: (a.dim, a.label))
    mapping = {}
    for a, b in zip(xs, ys):
        if a.dim != b.dim:
            return None
        mapping[a.label] = b.label
    return mapping


# -- JSON encoding ----------------------------------------------------------
#
# {"atoms": [{"label": "q0", "dim": 2, "dual": false}, ...]}


def qset_to_json(x: QuantumSet) -> dict:
    return {
        "atoms": [
            {"label": a.label, "dim": a.dim, "dual": a.dual} for a in x.atoms
        ]
    }


def qset_from_json(obj, path="qset") -> QuantumSet:
    if not isinstance(obj, dict) or not isinstance(obj.get("atoms"), list):
        raise SchemaError("expected {'atoms': [...]}", path)
    atoms = []
    for i, entry in enumerate(obj["atoms"]):
        p = f"{path}.atoms[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError("expected an object", p)
        try:
            atoms.append(
                Atom(entry["label"], int(entry["dim"]), bool(entry.get("dual", False)))
            )
        except (KeyError, TypeError, ValueError, SchemaError) as exc:
            raise SchemaError(f"bad atom: {exc}", p) from exc
    try:
        return QuantumSet(atoms)
    except SchemaError as exc:
        raise SchemaError(str(exc), path) from exc
