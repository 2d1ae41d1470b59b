import numpy as np
import pytest

from qsets import linalg, opalg, qfun
from qsets.errors import PreconditionError, SchemaError
from qsets.opalg import (
    BlockOperator,
    Fission,
    blockop_from_json,
    blockop_to_json,
    fission_compose,
    fission_from_function,
    fission_star,
    fission_tensor,
    function_from_fission,
    function_from_homomorphism,
    hom_from_function,
    hom_from_json,
    hom_to_json,
    identity_fission,
    identity_op,
    is_unital,
    spectral_function,
    star_injective,
    star_is_homomorphism,
    star_map,
    star_surjective,
)
from qsets.qset import Atom, QuantumSet, bool_set, classical_embed
from qsets.qrel import Relation, compose, identity, rel_eq, times
from qsets.randgen import (
    random_function,
    random_hermitian_blockop,
    random_partial_function,
    random_qset,
    random_unitary,
    rng_for,
)

H2 = QuantumSet([Atom("q", 2)])


def measurement():
    return Relation(H2, bool_set(), {
        ("q", "0"): linalg.line(np.array([[1.0, 0.0]])),
        ("q", "1"): linalg.line(np.array([[0.0, 1.0]])),
    })


def drop_one_block(f):
    """Make a partial function non-total by removing one block."""
    key = sorted(f.blocks)[0]
    blocks = {k: v for k, v in f.blocks.items() if k != key}
    return Relation(f.source, f.target, blocks)


class TestStarMap:
    def test_inclusion_restricts(self):
        sub = QuantumSet([Atom("a", 2)])
        sup = QuantumSet([Atom("a", 2), Atom("b", 3)])
        j = qfun.inclusion(sub, sup)
        rng = rng_for(41, 0)
        b = random_hermitian_blockop(rng, sup)
        img = star_map(j, b)
        assert np.allclose(img.blocks["a"], b.blocks["a"])

    def test_measurement_formula(self):
        # oracle: direct evaluation with basis {<e0|, <e1|}, dim(Y) = 1
        b = BlockOperator(bool_set(), {"0": [[2.0]], "1": [[-3.0]]})
        img = star_map(measurement(), b)
        expect = 2.0 * np.diag([1.0, 0.0]) - 3.0 * np.diag([0.0, 1.0])
        assert np.allclose(img.blocks["q"], expect)

    def test_unit_preserved_for_functions(self):
        rng = rng_for(41, 1)
        for _ in range(10):
            f = random_function(rng, 3, 3)
            img = star_map(f, identity_op(f.target))
            assert (img - identity_op(f.source)).norm() < 1e-10

    def test_rejects_non_partial_function(self):
        bad = Relation(H2, H2, {("q", "q"): linalg.line(np.array([[1.0, 1.0], [0.0, 1.0]]))})
        with pytest.raises(PreconditionError):
            star_map(bad, identity_op(H2))


class TestStarHomomorphism:
    def test_identity_residual_zero(self):
        assert star_is_homomorphism(identity(H2)) < 1e-12

    def test_random_functions_within_tolerance(self):
        rng = rng_for(42, 0)
        for _ in range(10):
            f = random_partial_function(rng, 3, 3)
            assert star_is_homomorphism(f) < 1e-8

    def test_corrupted_relation_reports_large_residual(self):
        bad = Relation(H2, H2, {("q", "q"): linalg.line(np.array([[1.0, 1.0], [0.0, 1.0]]))})
        assert star_is_homomorphism(bad) > 1e-4


class TestFissionFromFunction:
    def test_identity(self):
        fi = fission_from_function(identity(H2))
        h, mat = fi.entries[("q", "q")]
        assert h == 1
        assert np.allclose(mat.conj().T @ mat, np.eye(2))

    def test_measurement_has_two_rank_one_coisometries(self):
        fi = fission_from_function(measurement())
        assert fi.coefficient_dim("q", "0") == 1
        assert fi.coefficient_dim("q", "1") == 1
        assert fi.is_total()
        acc = sum(m.conj().T @ m for _, m in fi.entries.values())
        assert np.allclose(acc, np.eye(2))

    def test_quotient_has_coefficient_dim_two(self):
        q = qfun.canonical_surjection(H2)
        fi = fission_from_function(q)
        h, mat = fi.entries[("q", "q")]
        assert h == 2  # dim(X) = dim(Y) . h with dim(Y) = 1
        assert np.allclose(mat @ mat.conj().T, np.eye(2))

    def test_invariants_validated(self):
        with pytest.raises(PreconditionError):
            Fission(H2, H2, {("q", "q"): (1, np.array([[1.0, 1.0], [0.0, 1.0]]))})


class TestThreeConstructions:
    def test_fission_roundtrip_random(self):
        rng = rng_for(43, 0)
        for _ in range(20):
            f = random_partial_function(rng, 3, 3)
            assert rel_eq(function_from_fission(fission_from_function(f)), f)

    def test_identity_homomorphism_gives_identity(self):
        table = hom_from_function(identity(H2))
        back = function_from_homomorphism(table)
        assert rel_eq(back, identity(H2))

    def test_measurement_from_diagonal_homomorphism(self):
        # oracle: the intertwiner null space for phi(delta_b) = e_bb is the
        # pair of basis row vectors, i.e. the measurement relation
        images = {
            "0": {"q": np.array([[np.diag([1.0, 0.0])]], dtype=complex)},
            "1": {"q": np.array([[np.diag([0.0, 1.0])]], dtype=complex)},
        }
        table = opalg.HomTable(bool_set(), H2, images)
        back = function_from_homomorphism(table)
        assert rel_eq(back, measurement())

    def test_hom_roundtrip_random(self):
        rng = rng_for(43, 1)
        for _ in range(20):
            f = random_partial_function(rng, 3, 3)
            back = function_from_homomorphism(hom_from_function(f, checked=False))
            assert rel_eq(back, f)

    def test_inconsistent_generator_images_rejected(self):
        images = {
            "0": {"q": np.array([[np.diag([1.0, 0.0])]], dtype=complex)},
            "1": {"q": np.array([[np.diag([1.0, 1.0])]], dtype=complex)},  # overlaps
        }
        table = opalg.HomTable(bool_set(), H2, images)
        with pytest.raises(PreconditionError):
            function_from_homomorphism(table)


class TestFissionCompose:
    def test_compose_with_identity(self):
        rng = rng_for(44, 0)
        f = random_partial_function(rng, 3, 3)
        fi = fission_from_function(f)
        composed = fission_compose(fi, identity_fission(f.source))
        # unitary-equivalence classes are compared through the star maps
        b = random_hermitian_blockop(rng, f.target)
        assert (fission_star(composed, b) - fission_star(fi, b)).norm() < 1e-10

    def test_matches_fission_of_composition(self):
        rng = rng_for(44, 1)
        for _ in range(10):
            g = random_partial_function(rng, 3, 3)
            f = random_partial_function(rng, 3, 3, y=g.source)
            fi_comp = fission_compose(fission_from_function(g), fission_from_function(f))
            direct = fission_from_function(compose(g, f))
            c = random_hermitian_blockop(rng, g.target)
            assert (fission_star(fi_comp, c) - fission_star(direct, c)).norm() < 1e-8

    def test_dim_bookkeeping(self):
        rng = rng_for(44, 2)
        g = random_partial_function(rng, 3, 3)
        f = random_partial_function(rng, 3, 3, y=g.source)
        fi_g, fi_f = fission_from_function(g), fission_from_function(f)
        composed = fission_compose(fi_g, fi_f)
        for xb in f.source.atoms:
            for zb in g.target.atoms:
                expect = sum(
                    fi_g.coefficient_dim(yb.label, zb.label)
                    * fi_f.coefficient_dim(xb.label, yb.label)
                    for yb in g.source.atoms
                )
                assert composed.coefficient_dim(xb.label, zb.label) == expect


class TestFissionTensor:
    def test_identity_tensor_identity(self):
        fi = fission_tensor(identity_fission(H2), identity_fission(H2))
        rel = function_from_fission(fi)
        from qsets.qset import cartesian_product

        assert rel_eq(rel, identity(cartesian_product(H2, H2)))

    def test_star_map_of_product_is_tensor(self):
        rng = rng_for(45, 0)
        for _ in range(10):
            f1 = random_partial_function(rng, 2, 3)
            f2 = random_partial_function(rng, 2, 3)
            fi = fission_tensor(fission_from_function(f1), fission_from_function(f2))
            rel = function_from_fission(fi)
            assert rel_eq(rel, times(f1, f2))

    def test_measurement_pair_gives_four_outcomes(self):
        fi = fission_tensor(fission_from_function(measurement()),
                            fission_from_function(measurement()))
        assert len(fi.entries) == 4
        assert all(h == 1 and m.shape == (1, 4) for h, m in fi.entries.values())


class TestDualityProbes:
    def test_function_iff_unital(self):
        rng = rng_for(46, 0)
        for _ in range(15):
            f = random_partial_function(rng, 3, 3)
            assert is_unital(f) == qfun.check_axioms(f).is_cosurjective

    def test_forced_non_unital(self):
        rng = rng_for(46, 1)
        f = random_function(rng, 3, 3)
        partial = drop_one_block(f)
        assert not is_unital(partial)
        fi = fission_from_function(partial)
        assert not fi.is_total()

    def test_surjective_iff_star_injective(self):
        rng = rng_for(46, 2)
        for _ in range(15):
            f = random_function(rng, 3, 3)
            assert qfun.check_axioms(f).is_surjective == star_injective(f)

    def test_injective_iff_star_surjective(self):
        rng = rng_for(46, 3)
        for _ in range(15):
            f = random_function(rng, 3, 3)
            assert qfun.check_axioms(f).is_injective == star_surjective(f)

    def test_engineered_cases(self):
        sub = QuantumSet([Atom("a", 2)])
        sup = QuantumSet([Atom("a", 2), Atom("b", 1)])
        j = qfun.inclusion(sub, sup)  # injective, not surjective
        assert star_surjective(j) and not star_injective(j)
        m = measurement()  # surjective, not injective
        assert star_injective(m) and not star_surjective(m)


class TestSpectral:
    def test_diagonal_roundtrip(self):
        a = BlockOperator(H2, {"q": np.diag([1.0, 2.0])})
        values, f = spectral_function(a)
        assert values == [1.0, 2.0]
        assert qfun.check_axioms(f).is_function
        # inverse direction: F*(r) with r(ev_i) = value_i reproduces a
        r = BlockOperator(f.target, {
            lbl: np.array([[v]]) for lbl, v in zip(f.target.labels(), values)
        })
        back = star_map(f, r)
        assert (back - a).norm() < 1e-10

    def test_identity_gives_single_label(self):
        a = identity_op(QuantumSet([Atom("p", 2), Atom("r", 3)]))
        values, f = spectral_function(a)
        assert values == [1.0]
        assert len(f.target) == 1

    def test_classical_operator_is_ordinary_function(self):
        s = classical_embed(["a", "b", "c"])
        a = BlockOperator(s, {"a": [[2.0]], "b": [[7.0]], "c": [[2.0]]})
        values, f = spectral_function(a)
        assert values == [2.0, 7.0]
        assert qfun.classify_classical(f) == {"a": "ev0", "b": "ev1", "c": "ev0"}

    def test_random_hermitian_roundtrip(self):
        rng = rng_for(47, 0)
        for _ in range(10):
            x = random_qset(rng, 2, 3)
            a = random_hermitian_blockop(rng, x)
            values, f = spectral_function(a)
            r = BlockOperator(f.target, {
                lbl: np.array([[v]]) for lbl, v in zip(f.target.labels(), values)
            })
            assert (star_map(f, r) - a).norm() < 1e-8

    def test_non_selfadjoint_rejected(self):
        a = BlockOperator(H2, {"q": np.array([[0.0, 1.0], [0.0, 0.0]])})
        with pytest.raises(PreconditionError):
            spectral_function(a)


class TestBasisIndependence:
    def test_star_map_invariant_under_basis_mixing(self):
        rng = rng_for(48, 0)
        for _ in range(10):
            f = random_partial_function(rng, 3, 3)
            b = random_hermitian_blockop(rng, f.target)
            base = star_map(f, b)
            blocks = {}
            for key, space in f.blocks.items():
                u = random_unitary(rng, space.dim)
                mixed = [sum(u[i, j] * space.basis[j] for j in range(space.dim))
                         for i in range(space.dim)]
                blocks[key] = linalg.OperatorSubspace(
                    space.domain_dim, space.codomain_dim, mixed)
            g = Relation(f.source, f.target, blocks)
            assert (star_map(g, b) - base).norm() < 1e-8


class TestContravariance:
    def test_functoriality(self):
        rng = rng_for(49, 0)
        for _ in range(10):
            g = random_partial_function(rng, 3, 3)
            f = random_partial_function(rng, 3, 3, y=g.source)
            c = random_hermitian_blockop(rng, g.target)
            lhs = star_map(compose(g, f), c)
            rhs = star_map(f, star_map(g, c))
            assert (lhs - rhs).norm() < 1e-8


class TestJson:
    def test_blockop_roundtrip(self):
        rng = rng_for(50, 0)
        x = random_qset(rng, 3, 3)
        b = random_hermitian_blockop(rng, x)
        back = blockop_from_json(blockop_to_json(b))
        assert (back - b).norm() < 1e-12

    def test_blockop_bad_shape(self):
        obj = blockop_to_json(identity_op(H2))
        obj["blocks"]["q"]["rows"] = 3
        with pytest.raises(SchemaError):
            blockop_from_json(obj)

    def test_hom_table_roundtrip(self):
        rng = rng_for(50, 1)
        f = random_partial_function(rng, 2, 2)
        table = hom_from_function(f, checked=False)
        back = hom_from_json(hom_to_json(table))
        rel = function_from_homomorphism(back)
        assert rel_eq(rel, f)
