"""Quantum families of graph colorings: verifier and heuristic searcher.

A family of colorings of a graph G, indexed by a single d-dimensional atom,
is the same data as a family of projections p[g, t] (vertex g, color t)
with sum_t p[g, t] = 1 for every vertex.  The family is a proper quantum
coloring when p[g1, t] . p[g2, t] = 0 for every edge (g1, g2) and every
color t.  The verifier checks this directly and, independently, through the
predicate dictionary: it rebuilds the corresponding function
`G x H -> `T and checks that inverse images of each color along adjacent
vertices are disjoint.

The searcher is a see-saw: per vertex, holding the neighbors fixed, it
re-solves that vertex's projective measurement to reduce the total edge
penalty sum ||p1 p2||_F^2, via eigendecompositions of 2x2 compressions of
the neighbor-penalty operators; random restarts on top.  A returned family
always re-verifies; None is not a proof of nonexistence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg, pred, qfun
from .errors import PreconditionError, SchemaError
from .linalg import DEFAULT_TOL, Tolerance
from .qset import Atom, QuantumSet, cartesian_product, classical_embed
from .qrel import Relation

__all__ = [
    "Graph",
    "ColoringFamily",
    "VerifyReport",
    "verify",
    "from_function",
    "to_function",
    "search",
    "latin_square_family",
    "classical_family",
]

INDEX_ATOM_LABEL = "h"


@dataclass(frozen=True)
class Graph:
    vertices: tuple
    edges: frozenset

    @staticmethod
    def make(vertices, edges) -> "Graph":
        vertices = tuple(vertices)
        if len(set(vertices)) != len(vertices):
            raise SchemaError("duplicate vertex labels")
        norm = set()
        for e in edges:
            a, b = e
            if a == b:
                raise SchemaError(f"loop at vertex {a!r}")
            if a not in vertices or b not in vertices:
                raise SchemaError(f"edge ({a!r}, {b!r}) references unknown vertices")
            norm.add(frozenset((a, b)))
        return Graph(vertices, frozenset(norm))

    def edge_list(self):
        return sorted(tuple(sorted(e)) for e in self.edges)

    def neighbors(self, v):
        return sorted(b for e in self.edges for b in e if v in e and b != v)

    @staticmethod
    def complete(n, prefix="v") -> "Graph":
        vs = [f"{prefix}{i}" for i in range(n)]
        return Graph.make(vs, [(vs[i], vs[j]) for i in range(n) for j in range(i + 1, n)])

    @staticmethod
    def cycle(n, prefix="v") -> "Graph":
        vs = [f"{prefix}{i}" for i in range(n)]
        return Graph.make(vs, [(vs[i], vs[(i + 1) % n]) for i in range(n)])


class ColoringFamily:
    """Projections p[g, t] of one common dimension, per (vertex, color)."""

    __slots__ = ("dim", "colors", "projections")

    def __init__(self, dim, colors, projections):
        dim = int(dim)
        if dim < 1:
            raise SchemaError("family dimension must be >= 1")
        colors = tuple(colors)
        if len(set(colors)) != len(colors) or not colors:
            raise SchemaError("colors must be nonempty and distinct")
        store = {}
        for (g, t), m in projections.items():
            if t not in colors:
                raise SchemaError(f"unknown color {t!r}")
            m = linalg.as_matrix(m)
            if m.shape != (dim, dim):
                raise SchemaError(f"projection ({g!r}, {t!r}) must be {dim}x{dim}")
            store[(g, t)] = m
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "colors", colors)
        object.__setattr__(self, "projections", store)

    def __setattr__(self, name, value):
        raise AttributeError("ColoringFamily is immutable")

    def vertices(self):
        return sorted({g for g, _ in self.projections})

    def projection(self, g, t) -> np.ndarray:
        m = self.projections.get((g, t))
        if m is None:
            return np.zeros((self.dim, self.dim), dtype=complex)
        return m

    def invariant_defect(self) -> float:
        """Largest violation of projection-hood or of the per-vertex
        resolution of the identity."""
        worst = 0.0
        for (g, t), m in self.projections.items():
            worst = max(worst, float(np.linalg.norm(m @ m - m)))
            worst = max(worst, float(np.linalg.norm(m - m.conj().T)))
        for g in self.vertices():
            acc = sum(self.projection(g, t) for t in self.colors)
            worst = max(worst, float(np.linalg.norm(acc - np.eye(self.dim))))
        return worst

    def check_invariants(self, tol: Tolerance = DEFAULT_TOL):
        defect = self.invariant_defect()
        if defect > tol.eq_tol:
            raise PreconditionError(
                f"family violates the projection/resolution invariants "
                f"(defect {defect:.3g})"
            )


@dataclass(frozen=True)
class VerifyReport:
    passed: bool
    max_violation: float
    projection_route: bool
    predicate_route: bool | None = None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "passed": self.passed,
            "max_violation": float(self.max_violation),
            "projection_route": self.projection_route,
        }
        if self.predicate_route is not None:
            out["predicate_route"] = self.predicate_route
        return out


def _color_predicate(target: QuantumSet, color) -> pred.Predicate:
    return pred.Predicate(target, {color: np.eye(1, dtype=complex)})


def _vertex_function(f: Relation, index_set: QuantumSet, g) -> Relation:
    """Restrict a function `G x H -> `T to one vertex: H -> `T."""
    h_atom = index_set.atoms[0]
    src_label = f"({g}|{h_atom.pair_key()})"
    blocks = {}
    for (xl, yl), space in f.blocks.items():
        if xl == src_label:
            blocks[(h_atom.label, yl)] = space
    return Relation(index_set, f.target, blocks)


def verify(graph: Graph, fam: ColoringFamily, tol: Tolerance = DEFAULT_TOL,
           cross_validate=True) -> VerifyReport:
    """Check a family against a graph.

    The projection route checks ||p[g1,t] p[g2,t]||_F < eq_tol on every
    edge and color.  With ``cross_validate`` the family is also rebuilt as
    a function and re-checked through inverse-image predicate disjointness;
    the two routes must agree.
    """
    fam.check_invariants(tol)
    missing = [g for g in graph.vertices if g not in set(fam.vertices())]
    if missing:
        raise PreconditionError(f"family has no projections for vertices {missing}")
    worst = 0.0
    for g1, g2 in graph.edge_list():
        for t in fam.colors:
            worst = max(worst, float(np.linalg.norm(
                fam.projection(g1, t) @ fam.projection(g2, t))))
    projection_ok = worst < tol.eq_tol

    predicate_ok = None
    if cross_validate:
        f = to_function(fam, graph.vertices)
        index_set = QuantumSet([Atom(INDEX_ATOM_LABEL, fam.dim)])
        per_vertex = {
            g: _vertex_function(f, index_set, g) for g in graph.vertices
        }
        preds = {
            (g, t): pred.inverse_image(per_vertex[g], _color_predicate(f.target, t), tol)
            for g in graph.vertices
            for t in fam.colors
        }
        predicate_ok = all(
            pred.disjoint(preds[(g1, t)], preds[(g2, t)], tol)
            for g1, g2 in graph.edge_list()
            for t in fam.colors
        )
    passed = projection_ok and (predicate_ok is not False)
    return VerifyReport(passed, worst, projection_ok, predicate_ok)


def to_function(fam: ColoringFamily, vertices) -> Relation:
    """The function `G x H -> `T behind the family: the block at
    ((g|h), t) is the row space of p[g, t]."""
    vertices = list(vertices)
    index_set = QuantumSet([Atom(INDEX_ATOM_LABEL, fam.dim)])
    source = cartesian_product(classical_embed(vertices), index_set)
    target = classical_embed(fam.colors)
    h_atom = index_set.atoms[0]
    blocks = {}
    for g in vertices:
        for t in fam.colors:
            p = fam.projection(g, t)
            cols = pred._orthonormal_columns(p, fam.dim, DEFAULT_TOL)
            if cols.shape[1] == 0:
                continue
            rows = [cols[:, i].conj().reshape(1, -1) for i in range(cols.shape[1])]
            blocks[(f"({g}|{h_atom.pair_key()})", t)] = linalg.span(rows, floor=1.0)
    return Relation(source, target, blocks)


def from_function(f: Relation, tol: Tolerance = DEFAULT_TOL) -> ColoringFamily:
    """Extract the projections p[g, t] = F_g^*(delta_t) from a function
    `G x H -> `T (classical target, product source with one index atom)."""
    if not f.target.is_classical():
        raise PreconditionError("target must be a classical set of colors")
    witness = qfun.check_axioms(f, tol)
    if not witness.is_function:
        raise PreconditionError("relation is not a function")
    parsed = []
    for a in f.source.atoms:
        lbl = a.label
        if not (lbl.startswith("(") and lbl.endswith(")")) or "|" not in lbl:
            raise PreconditionError(f"source atom {lbl!r} is not a product pair")
        g, h = lbl[1:-1].rsplit("|", 1)
        parsed.append((g, h, a.dim))
    hs = {h for _, h, _ in parsed}
    dims = {d for _, _, d in parsed}
    if len(hs) != 1 or len(dims) != 1:
        raise PreconditionError("source must be `G x H with a single index atom")
    dim = dims.pop()
    colors = f.target.labels()
    projections = {}
    for (g, _, _), atom in zip(parsed, f.source.atoms):
        for t in colors:
            space = f.block(atom.label, t)
            p = np.zeros((dim, dim), dtype=complex)
            for w in space.basis:
                p += w.conj().T @ w
            projections[(g, t)] = p
    return ColoringFamily(dim, colors, projections)


def classical_family(assignment, colors) -> ColoringFamily:
    """A dim-1 family from an ordinary color assignment (vertex -> color)."""
    projections = {}
    for g, c in assignment.items():
        for t in colors:
            projections[(g, t)] = np.array([[1.0 if t == c else 0.0]], dtype=complex)
    return ColoringFamily(1, colors, projections)


def latin_square_family(d, vertices=None, prefix="c") -> ColoringFamily:
    """The shift family p[g_i, c_t] = e_{(i+t) mod d}: a quantum d-coloring
    of the complete graph K_d at dimension d."""
    if vertices is None:
        vertices = [f"v{i}" for i in range(d)]
    colors = [f"{prefix}{t}" for t in range(d)]
    projections = {}
    for i, g in enumerate(vertices):
        for t in range(d):
            m = np.zeros((d, d), dtype=complex)
            m[(i + t) % d, (i + t) % d] = 1.0
            projections[(g, colors[t])] = m
    return ColoringFamily(d, colors, projections)


# -- see-saw search -----------------------------------------------------------


def _family_from_state(vertices, colors, basis, assign) -> ColoringFamily:
    dim = next(iter(basis.values())).shape[0]
    projections = {}
    for g in vertices:
        u = basis[g]
        for ti, t in enumerate(colors):
            cols = u[:, assign[g] == ti]
            projections[(g, t)] = cols @ cols.conj().T
    return ColoringFamily(dim, colors, projections)


def _edge_penalty(fam: ColoringFamily, graph: Graph) -> float:
    total = 0.0
    for g1, g2 in graph.edge_list():
        for t in fam.colors:
            total += float(np.linalg.norm(fam.projection(g1, t) @ fam.projection(g2, t)) ** 2)
    return total


def _update_vertex(u, assign, penalties, inner_rounds=4):
    """Minimize sum_i <u_i | A_{assign[i]} | u_i> by alternating greedy
    recoloring with 2x2 Jacobi rotations between differently colored
    directions; both steps are monotone."""
    dim = u.shape[0]
    k = len(penalties)
    for _ in range(inner_rounds):
        changed = False
        # greedy reassignment of each direction to its cheapest color
        costs = np.empty((dim, k))
        for t in range(k):
            costs[:, t] = np.real(np.einsum("ij,jk,ik->i", u.conj().T, penalties[t], u))
        best = np.argmin(costs, axis=1)
        if np.any(best != assign):
            assign = best
            changed = True
        # Jacobi sweep: rotate pairs of directions with different colors
        for i in range(dim):
            for j in range(i + 1, dim):
                if assign[i] == assign[j]:
                    continue
                b = penalties[assign[i]] - penalties[assign[j]]
                pair = u[:, [i, j]]
                comp = pair.conj().T @ b @ pair
                comp = (comp + comp.conj().T) / 2.0
                w, v = np.linalg.eigh(comp)
                if w[0] < np.real(comp[0, 0]) - 1e-14:
                    rot = pair @ v  # first column: min eigenvector
                    u[:, i] = rot[:, 0]
                    u[:, j] = rot[:, 1]
                    changed = True
        if not changed:
            break
    return u, assign


def search(graph: Graph, colors, dim, seed=0, restarts=200, sweeps=500,
           tol: Tolerance = DEFAULT_TOL):
    """Look for a quantum coloring of the given color count and dimension.

    Alternating per-vertex PVM optimization with random restarts; restart r
    is deterministic given (seed, r).  Returns a verified ColoringFamily or
    None (which is not a proof that none exists).
    """
    colors = int(colors)
    dim = int(dim)
    if colors < 1 or dim < 1:
        raise PreconditionError("colors and dim must be >= 1")
    color_labels = [f"c{t}" for t in range(colors)]
    vertices = list(graph.vertices)
    order = sorted(vertices)
    for restart in range(int(restarts)):
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), restart]))
        basis = {}
        assign = {}
        for g in vertices:
            ginibre = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            q, r = np.linalg.qr(ginibre)
            basis[g] = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
            assign[g] = rng.integers(0, colors, size=dim)
        prev = np.inf
        stall = 0
        for _ in range(int(sweeps)):
            for g in order:
                nbrs = graph.neighbors(g)
                penalties = []
                for t in range(colors):
                    a = np.zeros((dim, dim), dtype=complex)
                    for n in nbrs:
                        un = basis[n]
                        cols = un[:, assign[n] == t]
                        a += cols @ cols.conj().T
                    penalties.append(a)
                basis[g], assign[g] = _update_vertex(basis[g], assign[g], penalties)
            fam = _family_from_state(vertices, color_labels, basis, assign)
            worst = max(
                (
                    float(np.linalg.norm(fam.projection(g1, t) @ fam.projection(g2, t)))
                    for g1, g2 in graph.edge_list()
                    for t in fam.colors
                ),
                default=0.0,
            )
            if worst < 1e-7:
                # polish: re-orthonormalize every frame and rebuild
                for g in vertices:
                    q, r = np.linalg.qr(basis[g])
                    basis[g] = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
                fam = _family_from_state(vertices, color_labels, basis, assign)
                report = verify(graph, fam, tol)
                if report.passed:
                    return fam
            total = _edge_penalty(fam, graph)
            if total > prev - 1e-12:
                stall += 1
                if stall >= 3:
                    break
            else:
                stall = 0
            prev = total
    return None


# -- JSON encoding -------------------------------------------------------------
#
# Graph:  {"vertices": [...], "edges": [["a", "b"], ...]}
# Family: {"dim": d, "colors": [...], "projections": {"g|t": <matrix>, ...}}


def graph_to_json(g: Graph) -> dict:
    return {"vertices": list(g.vertices), "edges": [list(e) for e in g.edge_list()]}


def graph_from_json(obj, path="graph") -> Graph:
    if not isinstance(obj, dict) or not isinstance(obj.get("vertices"), list):
        raise SchemaError("expected {'vertices': [...], 'edges': [...]}", path)
    edges = obj.get("edges", [])
    if not isinstance(edges, list):
        raise SchemaError("edges must be a list", f"{path}.edges")
    pairs = []
    for i, e in enumerate(edges):
        if not isinstance(e, list) or len(e) != 2:
            raise SchemaError("each edge must be a pair", f"{path}.edges[{i}]")
        pairs.append((e[0], e[1]))
    try:
        return Graph.make(obj["vertices"], pairs)
    except SchemaError as exc:
        raise SchemaError(str(exc), path) from exc


def family_to_json(fam: ColoringFamily) -> dict:
    return {
        "dim": fam.dim,
        "colors": list(fam.colors),
        "projections": {
            f"{g}|{t}": linalg.matrix_to_json(m)
            for (g, t), m in sorted(fam.projections.items())
        },
    }


def family_from_json(obj, path="family") -> ColoringFamily:
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", path)
    try:
        dim = int(obj["dim"])
        colors = list(obj["colors"])
        raw = obj["projections"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"missing or bad field: {exc}", path) from exc
    if not isinstance(raw, dict):
        raise SchemaError("projections must be an object", f"{path}.projections")
    projections = {}
    for key, mj in raw.items():
        if "|" not in key:
            raise SchemaError(f"key {key!r} is not of the form 'g|t'",
                              f"{path}.projections")
        g, t = key.rsplit("|", 1)
        projections[(g, t)] = linalg.matrix_from_json(mj, f"{path}.projections[{key}]")
    try:
        return ColoringFamily(dim, colors, projections)
    except SchemaError as exc:
        raise SchemaError(str(exc), path) from exc
