"""Randomized law suite: the category, duality, and dictionary equations.

Each law draws fresh instances from a per-trial generator, evaluates both
sides of its equation, and reports a residual (projector or Frobenius
distance).  The suite powers the CLI verb ``laws`` and the acceptance
tests.  A fault can be injected (``fault="dagger"`` drops the complex
conjugation from the adjoint) as a negative control: the suite must then
fail and expose a counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg, opalg, pred, qfun, qrel, randgen
from .errors import PreconditionError
from .linalg import DEFAULT_TOL, Tolerance
from .qset import QuantumSet
from .qrel import Relation, relation_to_json

__all__ = ["LawReport", "run_laws", "LAW_NAMES"]


@dataclass
class LawReport:
    seed: int
    trials: int
    laws: dict = field(default_factory=dict)  # name -> max residual
    failures: dict = field(default_factory=dict)  # name -> counterexample

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        out = {
            "seed": self.seed,
            "trials": self.trials,
            "passed": self.passed,
            "laws": [
                {"name": name, "max_residual": float(res), "ok": name not in self.failures}
                for name, res in sorted(self.laws.items())
            ],
        }
        if self.failures:
            name = sorted(self.failures)[0]
            out["counterexample"] = {"law": name, **self.failures[name]}
        return out


def _transpose_only(r: Relation) -> Relation:
    """The faulty adjoint used as a negative control: transpose without
    conjugation."""
    blocks = {
        (yl, xl): linalg.subspace_transpose_dual(v)
        for (xl, yl), v in r.blocks.items()
    }
    return Relation(r.target, r.source, blocks)


class _Ctx:
    def __init__(self, max_atoms, max_dim, tol: Tolerance, fault=None):
        self.max_atoms = max_atoms
        self.max_dim = max_dim
        self.tol = tol
        self.dagger = _transpose_only if fault == "dagger" else qrel.dagger


# -- individual laws ------------------------------------------------------------
# Each returns (residual, counterexample-or-None).


def _law_compose_assoc(rng, ctx):
    x = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="a")
    y = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="b")
    z = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="c")
    w = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="d")
    r = randgen.random_relation(rng, x, y)
    s = randgen.random_relation(rng, y, z)
    t = randgen.random_relation(rng, z, w)
    lhs = qrel.compose(t, qrel.compose(s, r, ctx.tol), ctx.tol)
    rhs = qrel.compose(qrel.compose(t, s, ctx.tol), r, ctx.tol)
    res = qrel.rel_eq_residual(lhs, rhs)
    return res, {"R": relation_to_json(r), "S": relation_to_json(s),
                 "T": relation_to_json(t)}


def _law_identity(rng, ctx):
    x = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="a")
    y = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="b")
    r = randgen.random_relation(rng, x, y)
    res = max(
        qrel.rel_eq_residual(qrel.compose(r, qrel.identity(x), ctx.tol), r),
        qrel.rel_eq_residual(qrel.compose(qrel.identity(y), r, ctx.tol), r),
    )
    return res, {"R": relation_to_json(r)}


def _law_dagger_contravariant(rng, ctx):
    x = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="a")
    y = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="b")
    z = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="c")
    r = randgen.random_relation(rng, x, y)
    s = randgen.random_relation(rng, y, z)
    lhs = ctx.dagger(qrel.compose(s, r, ctx.tol))
    rhs = qrel.compose(ctx.dagger(r), ctx.dagger(s), ctx.tol)
    res = qrel.rel_eq_residual(lhs, rhs)
    return res, {"R": relation_to_json(r), "S": relation_to_json(s)}


def _law_dagger_involution(rng, ctx):
    x = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="a")
    y = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="b")
    r = randgen.random_relation(rng, x, y)
    res = qrel.rel_eq_residual(ctx.dagger(ctx.dagger(r)), r)
    res = max(res, qrel.rel_eq_residual(qrel.dual(qrel.dual(r)), r))
    return res, {"R": relation_to_json(r)}


def _law_interchange(rng, ctx):
    sets = [randgen.random_qset(rng, 2, ctx.max_dim, prefix=p)
            for p in ("a", "b", "c", "d", "e", "f")]
    r1 = randgen.random_relation(rng, sets[0], sets[1])
    s1 = randgen.random_relation(rng, sets[1], sets[2])
    r2 = randgen.random_relation(rng, sets[3], sets[4])
    s2 = randgen.random_relation(rng, sets[4], sets[5])
    lhs = qrel.times(qrel.compose(s1, r1, ctx.tol), qrel.compose(s2, r2, ctx.tol))
    rhs = qrel.compose(qrel.times(s1, s2), qrel.times(r1, r2), ctx.tol)
    res = qrel.rel_eq_residual(lhs, rhs)
    return res, {"R1": relation_to_json(r1), "S1": relation_to_json(s1),
                 "R2": relation_to_json(r2), "S2": relation_to_json(s2)}


def _law_snake(rng, ctx):
    x = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="a")
    from .qset import dual_set

    xd = dual_set(x)
    eta, eps = qrel.unit(x), qrel.counit(x)
    ix, ixd = qrel.identity(x), qrel.identity(xd)
    # X -> 1xX -> (XxX*)xX -> Xx(X*xX) -> Xx1 -> X
    chain1 = qrel.compose(
        qrel.unitor_right(x),
        qrel.compose(
            qrel.times(ix, eps),
            qrel.compose(
                qrel.associator(x, xd, x),
                qrel.compose(qrel.times(eta, ix),
                             qrel.dagger(qrel.unitor_left(x)), ctx.tol),
                ctx.tol),
            ctx.tol),
        ctx.tol)
    # X* -> X*x1 -> X*x(XxX*) -> (X*xX)xX* -> 1xX* -> X*
    chain2 = qrel.compose(
        qrel.unitor_left(xd),
        qrel.compose(
            qrel.times(eps, ixd),
            qrel.compose(
                qrel.dagger(qrel.associator(xd, x, xd)),
                qrel.compose(qrel.times(ixd, eta),
                             qrel.dagger(qrel.unitor_right(xd)), ctx.tol),
                ctx.tol),
            ctx.tol),
        ctx.tol)
    res = max(qrel.rel_eq_residual(chain1, ix), qrel.rel_eq_residual(chain2, ixd))
    return res, {"X": [a.dim for a in x.atoms]}


def _law_braiding_natural(rng, ctx):
    x1 = randgen.random_qset(rng, 2, ctx.max_dim, prefix="a")
    x2 = randgen.random_qset(rng, 2, ctx.max_dim, prefix="b")
    y1 = randgen.random_qset(rng, 2, ctx.max_dim, prefix="c")
    y2 = randgen.random_qset(rng, 2, ctx.max_dim, prefix="d")
    r1 = randgen.random_relation(rng, x1, y1)
    r2 = randgen.random_relation(rng, x2, y2)
    lhs = qrel.compose(qrel.braiding(y1, y2), qrel.times(r1, r2), ctx.tol)
    rhs = qrel.compose(qrel.times(r2, r1), qrel.braiding(x1, x2), ctx.tol)
    res = qrel.rel_eq_residual(lhs, rhs)
    return res, {"R1": relation_to_json(r1), "R2": relation_to_json(r2)}


def _classical_compose(r_pairs, s_pairs):
    return {(a, c) for a, b in r_pairs for b2, c in s_pairs if b == b2}


def _law_classical_embedding(rng, ctx):
    s = [f"s{i}" for i in range(int(rng.integers(1, 5)))]
    t = [f"t{i}" for i in range(int(rng.integers(1, 5)))]
    u = [f"u{i}" for i in range(int(rng.integers(1, 5)))]
    r = randgen.random_classical_relation(rng, s, t)
    q = randgen.random_classical_relation(rng, t, u)
    er = qrel.embed_classical(r, s, t)
    eq_ = qrel.embed_classical(q, t, u)
    comp = qrel.compose(eq_, er, ctx.tol)
    res = qrel.rel_eq_residual(
        comp, qrel.embed_classical(_classical_compose(r, q), s, u))
    # dagger matches transpose
    res = max(res, qrel.rel_eq_residual(
        ctx.dagger(er), qrel.embed_classical({(b, a) for a, b in r}, t, s)))
    # product matches the classical product through the pair relabeling
    prod = qrel.times(er, eq_)
    pairs = {(f"({a}|{c})", f"({b}|{d})") for a, b in r for c, d in q}
    srcs = [f"({a}|{c})" for a in s for c in t]
    tgts = [f"({b}|{d})" for b in t for d in u]
    res = max(res, qrel.rel_eq_residual(prod, qrel.embed_classical(pairs, srcs, tgts)))
    return res, {"r": sorted(r), "q": sorted(q)}


def _law_join_distributive(rng, ctx):
    x = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="a")
    y = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="b")
    z = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="c")
    r1 = randgen.random_relation(rng, x, y)
    r2 = randgen.random_relation(rng, x, y)
    s = randgen.random_relation(rng, y, z)
    lhs = qrel.compose(s, qrel.rel_join(r1, r2, ctx.tol), ctx.tol)
    rhs = qrel.rel_join(qrel.compose(s, r1, ctx.tol), qrel.compose(s, r2, ctx.tol),
                        ctx.tol)
    res = qrel.rel_eq_residual(lhs, rhs)
    return res, {"R1": relation_to_json(r1), "R2": relation_to_json(r2),
                 "S": relation_to_json(s)}


def _law_lattice(rng, ctx):
    x = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="a")
    y = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="b")
    r = randgen.random_relation(rng, x, y)
    s = randgen.random_relation(rng, x, y)
    res = qrel.rel_eq_residual(qrel.rel_neg(qrel.rel_neg(r, ctx.tol), ctx.tol), r)
    # De Morgan
    res = max(res, qrel.rel_eq_residual(
        qrel.rel_neg(qrel.rel_join(r, s, ctx.tol), ctx.tol),
        qrel.rel_meet(qrel.rel_neg(r, ctx.tol), qrel.rel_neg(s, ctx.tol), ctx.tol)))
    # orthomodularity: r <= j := r v s, then r v (r' ^ j) = j
    j = qrel.rel_join(r, s, ctx.tol)
    res = max(res, qrel.rel_eq_residual(
        qrel.rel_join(r, qrel.rel_meet(qrel.rel_neg(r, ctx.tol), j, ctx.tol), ctx.tol),
        j))
    return res, {"R": relation_to_json(r), "S": relation_to_json(s)}


def _law_function_closure(rng, ctx):
    y = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="y")
    f = randgen.random_function(rng, ctx.max_atoms, ctx.max_dim, y=y)
    g = randgen.random_function(rng, ctx.max_atoms, ctx.max_dim, y=f.source)
    comp = qrel.compose(f, g, ctx.tol)
    w = qfun.check_axioms(comp, ctx.tol)
    res = max(w.residuals["coinjective"], w.residuals["cosurjective"])
    return res, {"F": relation_to_json(f), "G": relation_to_json(g)}


def _law_invertible_inverse(rng, ctx):
    x = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="x")
    # build an invertible function: relabel + per-atom unitaries
    blocks = {}
    labels = list(x.labels())
    perm = rng.permutation(len(labels))
    target_atoms = []
    for i, lbl in enumerate(labels):
        d = x.dim(lbl)
        tgt = f"z{perm[i]}"
        target_atoms.append((tgt, d))
        blocks[(lbl, tgt)] = linalg.line(randgen.random_unitary(rng, d))
    from .qset import Atom

    y = QuantumSet(Atom(t, d) for t, d in target_atoms)
    f = Relation(x, y, blocks)
    # the adjoint must invert a unitary block; a conjugation-dropping
    # fault breaks exactly this
    fd = ctx.dagger(f)
    res = max(
        qrel.rel_eq_residual(qrel.compose(fd, f, ctx.tol), qrel.identity(x)),
        qrel.rel_eq_residual(qrel.compose(f, fd, ctx.tol), qrel.identity(y)),
    )
    decomp = qfun.invertible_decompose(f, ctx.tol)
    if decomp is None:
        res = max(res, 1.0)
    return res, {"F": relation_to_json(f)}


def _law_star_functorial(rng, ctx):
    z = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="z")
    g = randgen.random_partial_function(rng, ctx.max_atoms, ctx.max_dim, y=z)
    f = randgen.random_partial_function(rng, ctx.max_atoms, ctx.max_dim, y=g.source)
    comp = qrel.compose(g, f, ctx.tol)
    c = randgen.random_hermitian_blockop(rng, z)
    lhs = opalg.star_map(comp, c, ctx.tol, checked=False)
    rhs = opalg.star_map(f, opalg.star_map(g, c, ctx.tol, checked=False),
                         ctx.tol, checked=False)
    res = (lhs - rhs).norm()
    return res, {"F": relation_to_json(f), "G": relation_to_json(g)}


def _law_star_monoidal(rng, ctx):
    f1 = randgen.random_partial_function(rng, 2, ctx.max_dim)
    f2 = randgen.random_partial_function(rng, 2, ctx.max_dim)
    prod = qrel.times(f1, f2)
    b1 = randgen.random_hermitian_blockop(rng, f1.target)
    b2 = randgen.random_hermitian_blockop(rng, f2.target)
    from .opalg import BlockOperator
    from .qset import cartesian_product, pair_label

    big = BlockOperator(
        cartesian_product(f1.target, f2.target),
        {
            pair_label(a, b): np.kron(b1.blocks[a.label], b2.blocks[b.label])
            for a in f1.target.atoms
            for b in f2.target.atoms
        },
    )
    lhs = opalg.star_map(prod, big, ctx.tol, checked=False)
    s1 = opalg.star_map(f1, b1, ctx.tol, checked=False)
    s2 = opalg.star_map(f2, b2, ctx.tol, checked=False)
    res = 0.0
    for a in f1.source.atoms:
        for b in f2.source.atoms:
            expect = np.kron(s1.blocks[a.label], s2.blocks[b.label])
            res = max(res, float(np.linalg.norm(
                lhs.blocks[pair_label(a, b)] - expect)))
    return res, {"F1": relation_to_json(f1), "F2": relation_to_json(f2)}


def _law_three_constructions(rng, ctx):
    f = randgen.random_partial_function(rng, ctx.max_atoms, ctx.max_dim)
    fi = opalg.fission_from_function(f, ctx.tol)
    back = opalg.function_from_fission(fi, ctx.tol)
    res = qrel.rel_eq_residual(back, f)
    table = opalg.hom_from_function(f, ctx.tol, checked=False)
    back2 = opalg.function_from_homomorphism(table, ctx.tol)
    res = max(res, qrel.rel_eq_residual(back2, f))
    return res, {"F": relation_to_json(f)}


def _law_unitality(rng, ctx):
    f = randgen.random_partial_function(rng, ctx.max_atoms, ctx.max_dim)
    fi = opalg.fission_from_function(f, ctx.tol)
    route_fission = fi.is_total(ctx.tol)
    route_star = opalg.is_unital(f, ctx.tol)
    route_axiom = qfun.check_axioms(f, ctx.tol).is_cosurjective
    agree = route_fission == route_star == route_axiom
    return (0.0 if agree else 1.0), {"F": relation_to_json(f)}


def _law_basis_independence(rng, ctx):
    f = randgen.random_partial_function(rng, ctx.max_atoms, ctx.max_dim)
    b = randgen.random_hermitian_blockop(rng, f.target)
    base = opalg.star_map(f, b, ctx.tol, checked=False)
    res = 0.0
    blocks = {}
    for key, space in f.blocks.items():
        if space.dim == 0:
            blocks[key] = space
            continue
        u = randgen.random_unitary(rng, space.dim)
        mixed = [sum(u[i, j] * space.basis[j] for j in range(space.dim))
                 for i in range(space.dim)]
        blocks[key] = linalg.OperatorSubspace(
            space.domain_dim, space.codomain_dim, mixed)
    g = Relation(f.source, f.target, blocks)
    res = max(res, (opalg.star_map(g, b, ctx.tol, checked=False) - base).norm())
    return res, {"F": relation_to_json(f)}


def _law_epi_mono_duality(rng, ctx):
    f = randgen.random_function(rng, ctx.max_atoms, ctx.max_dim)
    w = qfun.check_axioms(f, ctx.tol)
    ok = (w.is_surjective == opalg.star_injective(f, ctx.tol)) and (
        w.is_injective == opalg.star_surjective(f, ctx.tol))
    return (0.0 if ok else 1.0), {"F": relation_to_json(f)}


def _law_four_functor(rng, ctx):
    x = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="x")
    p = randgen.random_predicate(rng, x)
    r1 = pred.pred_to_rel1(p)
    pj = pred.pred_to_proj(p)
    fb = pred.pred_to_funB(p, ctx.tol)
    res = pred.p_eq_residual(pred.rel1_to_pred(r1, ctx.tol), p)
    res = max(res, pred.p_eq_residual(pred.proj_to_pred(pj, ctx.tol), p))
    res = max(res, pred.p_eq_residual(pred.funB_to_pred(fb, ctx.tol), p))
    # triangles through the other corners
    res = max(res, (pred.rel1_to_proj(r1, ctx.tol) - pj).norm())
    res = max(res, (pred.funB_to_proj(fb, ctx.tol) - pj).norm())
    res = max(res, qrel.rel_eq_residual(pred.proj_to_rel1(pj, ctx.tol), r1))
    res = max(res, qrel.rel_eq_residual(pred.funB_to_rel1(fb), r1))
    res = max(res, qrel.rel_eq_residual(pred.rel1_to_funB(r1, ctx.tol), fb))
    res = max(res, qrel.rel_eq_residual(pred.proj_to_funB(pj, ctx.tol), fb))
    from .pred import predicate_to_json

    return res, {"P": predicate_to_json(p)}


def _law_inverse_image_ortholattice(rng, ctx):
    y = randgen.random_qset(rng, ctx.max_atoms, ctx.max_dim, prefix="y")
    f = randgen.random_function(rng, ctx.max_atoms, ctx.max_dim, y=y)
    p = randgen.random_predicate(rng, y)
    q = randgen.random_predicate(rng, y)
    inv = lambda pr: pred.inverse_image(f, pr, ctx.tol)
    res = pred.p_eq_residual(inv(pred.p_join(p, q, ctx.tol)),
                             pred.p_join(inv(p), inv(q), ctx.tol))
    res = max(res, pred.p_eq_residual(inv(pred.p_meet(p, q, ctx.tol)),
                                      pred.p_meet(inv(p), inv(q), ctx.tol)))
    res = max(res, pred.p_eq_residual(inv(pred.p_neg(p, ctx.tol)),
                                      pred.p_neg(inv(p), ctx.tol)))
    res = max(res, pred.p_eq_residual(inv(pred.top_predicate(y)),
                                      pred.top_predicate(f.source)))
    res = max(res, pred.p_eq_residual(inv(pred.bottom_predicate(y)),
                                      pred.bottom_predicate(f.source)))
    return res, {"F": relation_to_json(f)}


def _law_corange(rng, ctx):
    g = randgen.random_partial_function(rng, ctx.max_atoms, ctx.max_dim)
    h = _function_with_source(rng, g.target, ctx)
    cor_g = pred.corange(g, ctx.tol)
    cor_hg = pred.corange(qrel.compose(h, g, ctx.tol), ctx.tol)
    res = pred.p_eq_residual(cor_g, cor_hg)
    kp, f = pred.corange_factor(g, ctx.tol)
    res = max(res, qrel.rel_eq_residual(qrel.compose(f, kp, ctx.tol), g))
    return res, {"G": relation_to_json(g)}


def _function_with_source(rng, x: QuantumSet, ctx) -> Relation:
    """A random function out of a prescribed source: split every atom onto
    a classical target plus one extra q-dim atom when needed."""
    from .qset import Atom

    blocks = {}
    tgt_atoms = {}
    for a in x.atoms:
        counts = []
        remaining = a.dim
        while remaining > 0:
            d = int(rng.integers(1, remaining + 1))
            counts.append(d)
            remaining -= d
        u = randgen.random_unitary(rng, a.dim)
        row = 0
        for j, d in enumerate(counts):
            lbl = f"t{d}"
            tgt_atoms[lbl] = d
            chunk = u[row:row + d, :]
            row += d
            key = (a.label, lbl)
            if key in blocks:
                blocks[key].append(chunk)
            else:
                blocks[key] = [chunk]
    y = QuantumSet(Atom(l, d) for l, d in tgt_atoms.items())
    rel_blocks = {}
    for key, mats in blocks.items():
        rel_blocks[key] = linalg.span(mats, ctx.tol)
    return Relation(x, y, rel_blocks)


LAWS = {
    "compose-associativity": _law_compose_assoc,
    "identity-laws": _law_identity,
    "dagger-contravariance": _law_dagger_contravariant,
    "dagger-involution": _law_dagger_involution,
    "times-interchange": _law_interchange,
    "snake-equations": _law_snake,
    "braiding-naturality": _law_braiding_natural,
    "classical-embedding": _law_classical_embedding,
    "compose-join-distributivity": _law_join_distributive,
    "block-lattice": _law_lattice,
    "function-closure": _law_function_closure,
    "invertible-dagger-inverse": _law_invertible_inverse,
    "star-contravariant-functoriality": _law_star_functorial,
    "star-monoidality": _law_star_monoidal,
    "three-constructions-cycle": _law_three_constructions,
    "unitality-equivalence": _law_unitality,
    "star-basis-independence": _law_basis_independence,
    "epi-mono-duality": _law_epi_mono_duality,
    "four-functor-roundtrips": _law_four_functor,
    "inverse-image-ortholattice": _law_inverse_image_ortholattice,
    "corange-factorization": _law_corange,
}

LAW_NAMES = sorted(LAWS)


def run_laws(seed=0, trials=20, max_atoms=3, max_dim=3, tol: Tolerance = DEFAULT_TOL,
             fault=None, law_names=None) -> LawReport:
    """Run every law on `trials` independent random instances.

    Trial t of law i uses the generator seeded by (seed, i * trials + t),
    so failures replay deterministically.
    """
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    if fault not in (None, "dagger"):
        raise PreconditionError(f"unknown fault {fault!r}")
    ctx = _Ctx(max_atoms, max_dim, tol, fault)
    names = law_names if law_names is not None else LAW_NAMES
    report = LawReport(seed=seed, trials=trials)
    for i, name in enumerate(names):
        fn = LAWS[name]
        worst = 0.0
        for t in range(trials):
            rng = randgen.rng_for(seed, i * trials + t)
            res, witness = fn(rng, ctx)
            if res > worst:
                worst = res
                if res >= tol.eq_tol and name not in report.failures:
                    report.failures[name] = {"trial": t, "residual": float(res),
                                             "witness": witness}
        report.laws[name] = worst
    return report
