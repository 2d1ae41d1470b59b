import numpy as np
import pytest

from qsets import linalg, qrel
from qsets.errors import SchemaError, SetMismatchError
from qsets.qset import Atom, QuantumSet, bool_set, classical_embed, dual_set
from qsets.qrel import (
    Relation,
    braiding,
    compose,
    copair,
    counit,
    dagger,
    dual,
    embed_classical,
    extract_classical,
    identity,
    inj_left,
    inj_right,
    rel_eq,
    rel_join,
    rel_leq,
    rel_meet,
    rel_neg,
    relation_from_json,
    relation_to_json,
    times,
    unit,
)
from qsets.randgen import random_classical_relation, random_relation, random_qset, rng_for

H2 = QuantumSet([Atom("q", 2)])


def measurement():
    """The computational-basis measurement H2 -> `{0,1}."""
    return Relation(H2, bool_set(), {
        ("q", "0"): linalg.line(np.array([[1.0, 0.0]])),
        ("q", "1"): linalg.line(np.array([[0.0, 1.0]])),
    })


# -- classical oracles --------------------------------------------------------


def oracle_compose(r, s):
    return {(a, c) for (a, b) in r for (b2, c) in s if b == b2}


def oracle_product(r, s):
    return {(f"({a}|{c})", f"({b}|{d})") for (a, b) in r for (c, d) in s}


class TestClassicalEmbedding:
    def test_composition_matches_oracle(self):
        rng = rng_for(21, 0)
        s_lab = ["s0", "s1"]
        t_lab = ["t0", "t1", "t2"]
        u_lab = ["u0", "u1"]
        for _ in range(50):
            r = random_classical_relation(rng, s_lab, t_lab)
            s = random_classical_relation(rng, t_lab, u_lab)
            lhs = compose(embed_classical(s, t_lab, u_lab), embed_classical(r, s_lab, t_lab))
            assert extract_classical(lhs) == oracle_compose(r, s)

    def test_product_matches_oracle(self):
        rng = rng_for(21, 1)
        s_lab, t_lab = ["a", "b"], ["x", "y"]
        for _ in range(25):
            r = random_classical_relation(rng, s_lab, t_lab)
            s = random_classical_relation(rng, s_lab, t_lab)
            prod = times(embed_classical(r, s_lab, t_lab), embed_classical(s, s_lab, t_lab))
            assert extract_classical(prod) == oracle_product(r, s)

    def test_dagger_is_transpose(self):
        r = {("a", "x"), ("b", "x")}
        er = embed_classical(r, ["a", "b"], ["x", "y"])
        assert extract_classical(dagger(er)) == {("x", "a"), ("x", "b")}

    def test_embedding_faithful(self):
        rng = rng_for(21, 2)
        for _ in range(25):
            r = random_classical_relation(rng, ["a", "b", "c"], ["x", "y"])
            assert extract_classical(embed_classical(r, ["a", "b", "c"], ["x", "y"])) == r


class TestCompose:
    def test_identity_laws(self):
        rng = rng_for(22, 0)
        x = random_qset(rng, 3, 3, prefix="a")
        y = random_qset(rng, 3, 3, prefix="b")
        r = random_relation(rng, x, y)
        assert rel_eq(compose(r, identity(x)), r)
        assert rel_eq(compose(identity(y), r), r)

    def test_measurement_times_dagger_is_identity(self):
        m = measurement()
        assert rel_eq(compose(m, dagger(m)), identity(bool_set()))

    def test_set_mismatch(self):
        m = measurement()
        with pytest.raises(SetMismatchError):
            compose(m, m)

    def test_associativity_random(self):
        rng = rng_for(22, 1)
        for _ in range(10):
            x, y, z, w = (random_qset(rng, 2, 3, prefix=p) for p in "abcd")
            r = random_relation(rng, x, y)
            s = random_relation(rng, y, z)
            t = random_relation(rng, z, w)
            assert rel_eq(compose(t, compose(s, r)), compose(compose(t, s), r))

    def test_dagger_contravariance(self):
        rng = rng_for(22, 2)
        for _ in range(10):
            x, y, z = (random_qset(rng, 2, 3, prefix=p) for p in "abc")
            r = random_relation(rng, x, y)
            s = random_relation(rng, y, z)
            assert rel_eq(dagger(compose(s, r)), compose(dagger(r), dagger(s)))

    def test_dual_involution(self):
        rng = rng_for(22, 3)
        r = random_relation(rng, random_qset(rng, 2, 3), random_qset(rng, 2, 3, prefix="b"))
        assert rel_eq(dual(dual(r)), r)
        assert dual(r).source == dual_set(r.target)


class TestLattice:
    def test_double_negation(self):
        rng = rng_for(23, 0)
        x, y = random_qset(rng, 2, 2), random_qset(rng, 2, 2, prefix="b")
        r = random_relation(rng, x, y)
        assert rel_eq(rel_neg(rel_neg(r)), r)

    def test_join_upper_bound(self):
        rng = rng_for(23, 1)
        x, y = random_qset(rng, 2, 2), random_qset(rng, 2, 2, prefix="b")
        r = random_relation(rng, x, y)
        s = random_relation(rng, x, y)
        assert rel_leq(r, rel_join(r, s))
        assert rel_leq(rel_meet(r, s), r)

    def test_compose_distributes_over_join(self):
        rng = rng_for(23, 2)
        for _ in range(10):
            x, y, z = (random_qset(rng, 2, 2, prefix=p) for p in "abc")
            r1 = random_relation(rng, x, y)
            r2 = random_relation(rng, x, y)
            s = random_relation(rng, y, z)
            assert rel_eq(compose(s, rel_join(r1, r2)),
                          rel_join(compose(s, r1), compose(s, r2)))


class TestCompactStructure:
    def test_snake_oracle_per_atom(self):
        # oracle: the explicit contraction (1 (x) eps)(eta (x) 1) x = x on
        # raw Kronecker coordinates, for each atom dimension
        for n in (1, 2, 3):
            eta = np.zeros((n * n, 1), dtype=complex)
            for i in range(n):
                eta[i * n + i] = 1.0
            eps = eta.conj().T
            chain = np.kron(np.eye(n), eps) @ np.kron(eta, np.eye(n))
            assert np.allclose(chain, np.eye(n))

    def test_snake_relations(self):
        for x in (H2, classical_embed(["a", "b"]), QuantumSet([Atom("p", 3), Atom("r", 1)])):
            xd = dual_set(x)
            eta, eps = unit(x), counit(x)
            ix, ixd = identity(x), identity(xd)
            chain1 = compose(qrel.unitor_right(x), compose(
                times(ix, eps), compose(
                    qrel.associator(x, xd, x),
                    compose(times(eta, ix), dagger(qrel.unitor_left(x))))))
            assert rel_eq(chain1, ix)
            chain2 = compose(qrel.unitor_left(xd), compose(
                times(eps, ixd), compose(
                    dagger(qrel.associator(xd, x, xd)),
                    compose(times(ixd, eta), dagger(qrel.unitor_right(xd))))))
            assert rel_eq(chain2, ixd)

    def test_unit_of_singleton(self):
        eta = unit(classical_embed(["a"]))
        blocks = list(eta.blocks.values())
        assert len(blocks) == 1 and blocks[0].dim == 1
        assert np.allclose(np.abs(blocks[0].basis[0]), [[1.0]])

    def test_braided_unit_compatibility(self):
        # dagger(counit) equals braiding o unit, atom by atom
        for x in (H2, QuantumSet([Atom("p", 3), Atom("r", 2)])):
            lhs = dagger(counit(x))
            rhs = compose(braiding(x, dual_set(x)), unit(x))
            assert rel_eq(lhs, rhs)

    def test_braiding_naturality(self):
        rng = rng_for(24, 0)
        for _ in range(10):
            x1, x2 = random_qset(rng, 2, 2, prefix="a"), random_qset(rng, 2, 2, prefix="b")
            y1, y2 = random_qset(rng, 2, 2, prefix="c"), random_qset(rng, 2, 2, prefix="d")
            r1 = random_relation(rng, x1, y1)
            r2 = random_relation(rng, x2, y2)
            assert rel_eq(compose(braiding(y1, y2), times(r1, r2)),
                          compose(times(r2, r1), braiding(x1, x2)))

    def test_times_of_identities(self):
        from qsets.qset import cartesian_product

        x, y = H2, classical_embed(["a", "b"])
        assert rel_eq(times(identity(x), identity(y)),
                      identity(cartesian_product(x, y)))

    def test_interchange(self):
        rng = rng_for(24, 1)
        for _ in range(10):
            sets = [random_qset(rng, 2, 2, prefix=p) for p in "abcdef"]
            r1 = random_relation(rng, sets[0], sets[1])
            s1 = random_relation(rng, sets[1], sets[2])
            r2 = random_relation(rng, sets[3], sets[4])
            s2 = random_relation(rng, sets[4], sets[5])
            assert rel_eq(times(compose(s1, r1), compose(s2, r2)),
                          compose(times(s1, s2), times(r1, r2)))


class TestCoproduct:
    def test_copair_laws(self):
        rng = rng_for(25, 0)
        x, y, z = (random_qset(rng, 2, 2, prefix=p) for p in "abc")
        r = random_relation(rng, x, z)
        s = random_relation(rng, y, z)
        cp = copair(r, s)
        assert rel_eq(compose(cp, inj_left(x, y)), r)
        assert rel_eq(compose(cp, inj_right(x, y)), s)

    def test_copair_of_injections_is_identity(self):
        x, y = H2, classical_embed(["a"])
        cp = copair(inj_left(x, y), inj_right(x, y))
        from qsets.qset import disjoint_union
        assert rel_eq(cp, identity(disjoint_union(x, y)))

    def test_classical_copairing(self):
        r = embed_classical({("a", "x")}, ["a"], ["x", "y"])
        s = embed_classical({("b", "y")}, ["b"], ["x", "y"])
        cp = copair(r, s)
        assert extract_classical(cp) == {("l(a)", "x"), ("r(b)", "y")}

    def test_target_mismatch(self):
        r = embed_classical(set(), ["a"], ["x"])
        s = embed_classical(set(), ["b"], ["y"])
        with pytest.raises(SetMismatchError):
            copair(r, s)


class TestOrthogonality:
    def test_perp_iff_meet_zero_on_lines(self):
        r = Relation(H2, H2, {("q", "q"): linalg.line(np.array([[1, 0], [0, 0]]))})
        s = Relation(H2, H2, {("q", "q"): linalg.line(np.array([[0, 0], [0, 1]]))})
        assert qrel.rel_perp(r, s)
        assert not qrel.rel_perp(r, r)

    def test_neg_is_perp(self):
        rng = rng_for(27, 0)
        x, y = random_qset(rng, 2, 2), random_qset(rng, 2, 2, prefix="b")
        r = random_relation(rng, x, y)
        assert qrel.rel_perp(r, rel_neg(r))


def test_identity_of_empty_set():
    empty = QuantumSet([])
    i = identity(empty)
    assert i.source.is_empty and not i.blocks


class TestJson:
    def test_roundtrip(self):
        rng = rng_for(26, 0)
        r = random_relation(rng, random_qset(rng, 3, 3), random_qset(rng, 3, 3, prefix="b"))
        back = relation_from_json(relation_to_json(r))
        assert rel_eq(back, r) and back.source == r.source and back.target == r.target

    def test_bad_block_shape(self):
        obj = relation_to_json(measurement())
        obj["blocks"][0]["space"]["dom"] = 3
        with pytest.raises(SchemaError):
            relation_from_json(obj)

    def test_unknown_atom(self):
        obj = relation_to_json(measurement())
        obj["blocks"][0]["from"] = "nope"
        with pytest.raises(SchemaError):
            relation_from_json(obj)
