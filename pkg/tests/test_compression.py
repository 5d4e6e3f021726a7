import numpy as np
import pytest

from spectral_ous import ContractError, MatrixModel, NormOracle, SpinModel, order_leq, order_unit_norm
from spectral_ous.compression import (J, T, base_identity_residual, bicommutant, block_and_cblock,
                                      commute_residual, commutes, complementarity_residuals,
                                      eq7_residual, extended_commute, least_projection_decomposition,
                                      mackey_compatible, neutral_cone_witness,
                                      orthogonal_decomposition, principal_residual,
                                      projection_cover, rickart_biconditional, rickart_map,
                                      t_condition_residual, verify_bicommutant,
                                      verify_compression_axioms)
from spectral_ous.matrix import operator_commute
from spectral_ous.rng import ShiftRegisterRNG


def M(ctx, m):
    return ctx.from_matrix(np.asarray(m, dtype=float))


def P(ctx, m):
    return ctx.as_projection(M(ctx, m))


def close(a, b, tol=1e-12):
    b = b.coords if hasattr(b, "coords") else a.ctx.from_matrix(np.asarray(b, dtype=float)).coords
    np.testing.assert_allclose(a.coords, b, atol=tol)


def effects(ctx, seed, k):
    rng = ShiftRegisterRNG(seed)
    return [ctx.random_effect(rng) for _ in range(k)]


class TestAxioms:
    def test_unit_focus(self, m3):
        rep = verify_compression_axioms(m3.proj_one(), effects(m3, 0, 20))
        assert rep.verdict == "pass"
        assert rep.max_residual == pytest.approx(0.0, abs=1e-14)

    def test_matrix_diag(self, m3):
        rep = verify_compression_axioms(P(m3, np.diag([1, 1, 0])), effects(m3, 0, 200))
        assert rep.verdict == "pass"

    def test_spin_l2(self, l2):
        rep = verify_compression_axioms(l2.atom([0.6, 0.8]), effects(l2, 0, 200))
        assert rep.verdict == "pass"

    def test_matrix_and_spin_random(self):
        for ctx in (MatrixModel(5), SpinModel(NormOracle.lp(5, 4))):
            for t in range(20):
                rng = ShiftRegisterRNG.for_trial(12, t)
                p = ctx.random_projection(rng)
                assert verify_compression_axioms(p, [ctx.random_effect(rng) for _ in range(10)]).verdict == "pass"

    def test_T_from_J(self, m3, rng):
        p, a = m3.random_projection(rng), m3.random_element(rng)
        close(T(p, a), 0.5 * (p.element.matrix @ a.matrix + a.matrix @ p.element.matrix), 1e-12)


class TestBaseIdentity:
    def test_complementary(self, m3, rng):
        p = m3.random_projection(rng, rank=1)
        samples = [m3.random_element(rng) for _ in range(20)]
        res = base_identity_residual(p, m3.complement(p), m3.proj_zero(), samples)
        assert res <= 1e-9

    def test_diagonal_triple(self, m3, rng):
        p, q, r = (P(m3, np.diag(d)) for d in ([1, 0, 0], [0, 1, 0], [0, 0, 1]))
        samples = [m3.random_element(rng) for _ in range(20)]
        assert base_identity_residual(p, q, r, samples) <= 1e-9

    def test_idempotent(self, l3, rng):
        r = l3.random_projection(rng)
        zero = l3.proj_zero()
        samples = [l3.random_element(rng) for _ in range(20)]
        assert base_identity_residual(zero, zero, r, samples) <= 1e-9

    def test_rejects_overlap(self, m2):
        p = P(m2, np.diag([1, 0]))
        with pytest.raises(ContractError):
            base_identity_residual(p, p, m2.proj_zero(), [m2.unit()])


class TestCommutes:
    def test_unit(self, m3, rng):
        assert commutes(m3.random_element(rng), m3.proj_one())

    def test_matrix(self, m2):
        p = P(m2, np.diag([1, 0]))
        assert commutes(M(m2, np.diag([1, 2])), p)
        assert not commutes(M(m2, [[0, 1], [1, 0]]), p)

    def test_spin_l2(self, l2):
        # J_p(a) = 0 and J_{1-p}(a) = 0, so a is not recovered
        a = l2.pair(0.0, [0.0, 1.0])
        p = l2.atom([1.0, 0.0])
        assert commute_residual(a, p) == pytest.approx(1.0)
        assert not commutes(a, p)

    def test_effect_commuting_is_meet(self, m3):
        # for commuting effect and projection, J_p(e) is below both
        e = M(m3, np.diag([0.3, 0.7, 0.9]))
        p = P(m3, np.diag([1, 0, 1]))
        assert commutes(e, p)
        je = J(p, e)
        assert order_leq(je, e) and order_leq(je, p.element)


class TestComplementarity:
    @pytest.mark.parametrize("ctx", [MatrixModel(4), SpinModel(NormOracle.lp(3, 3))], ids=["matrix", "spin"])
    def test_both_ways(self, ctx):
        rng = ShiftRegisterRNG(13)
        for _ in range(20):
            p = ctx.random_projection(rng)
            pc = ctx.complement(p)
            pos = [ctx.random_positive(rng) for _ in range(5)]
            ker = [J(pc, b) for b in pos]
            img, kern = complementarity_residuals(p, pos, ker)
            assert img <= 1e-9 and kern <= 1e-9

    def test_principal(self, m3):
        rng = ShiftRegisterRNG(14)
        p = m3.random_projection(rng, rank=2)
        assert principal_residual(p, effects(m3, 15, 40)) <= 1e-9


class TestMackey:
    def test_ordered(self, m2):
        assert mackey_compatible(M(m2, np.diag([0.1, 0.2])), M(m2, np.diag([0.3, 0.5]))) == (True, "order")

    def test_commuting_diagonal(self, m3):
        v = mackey_compatible(M(m3, np.diag([0.9, 0.1, 0.5])), M(m3, np.diag([0.2, 0.8, 0.6])))
        assert v.verdict is True

    def test_noncommuting_projections(self, m2):
        v = mackey_compatible(M(m2, np.diag([1, 0])), M(m2, 0.5 * np.ones((2, 2))))
        assert v == (False, "projection-commutation")

    def test_unknown(self, m2):
        e = M(m2, np.diag([0.7, 0.2]))
        f = M(m2, [[0.5, 0.3], [0.3, 0.5]])
        assert mackey_compatible(e, f).verdict is None

    def test_not_effects(self, m2):
        with pytest.raises(ContractError):
            mackey_compatible(M(m2, np.diag([2, 0.5])), M(m2, [[0.5, 0.1], [0.1, 0.5]]))


class TestDecomposition:
    def test_positive(self, m3, rng):
        a = m3.random_positive(rng)
        d = orthogonal_decomposition(a)
        close(d.a_plus, a, 1e-10)
        assert order_unit_norm(d.a_minus) == 0.0

    def test_diag(self, m2):
        d = orthogonal_decomposition(M(m2, np.diag([2, -3])))
        close(d.a_plus, np.diag([2, 0]))
        close(d.a_minus, np.diag([0, 3]))
        close(d.p.element, np.diag([1, 0]))
        close(d.abs, np.diag([2, 3]))

    def test_spin(self, l2):
        d = orthogonal_decomposition(l2.pair(0.0, [1.0, 0.0]))
        assert d.p.tag == "atom"
        np.testing.assert_allclose(d.p.y, [1, 0])
        np.testing.assert_allclose(d.a_plus.coords, [0.5, 0.5, 0])
        np.testing.assert_allclose(d.a_minus.coords, [0.5, -0.5, 0])

    @pytest.mark.parametrize("ctx", [MatrixModel(4), SpinModel(NormOracle.lp(1.5, 3))], ids=["matrix", "spin"])
    def test_invariants_and_uniqueness(self, ctx):
        for t in range(50):
            a = ctx.random_element(ShiftRegisterRNG.for_trial(16, t))
            d = orthogonal_decomposition(a)
            s = order_unit_norm(a)
            assert order_unit_norm(a - d.a_plus + d.a_minus) <= 1e-9 * (1 + s)
            assert order_unit_norm(J(d.p, d.a_plus) - d.a_plus) <= 1e-9 * (1 + s)
            assert order_unit_norm(J(d.p, d.a_minus)) <= 1e-9 * (1 + s)
            assert order_unit_norm(ctx.jordan(d.a_plus, d.a_minus)) <= 1e-9 * (1 + s) ** 2
            e = least_projection_decomposition(a)
            assert order_unit_norm(d.a_plus - e.a_plus) <= 1e-9 * (1 + s)
            assert order_unit_norm(d.p.element - e.p.element) <= 1e-9


class TestRickart:
    def test_zero_and_unit(self, m3):
        close(rickart_map(m3.zero()).element, np.eye(3))
        close(rickart_map(m3.unit()).element, np.zeros((3, 3)))

    def test_rank_one(self, m2):
        close(rickart_map(M(m2, np.ones((2, 2)))).element, 0.5 * np.array([[1, -1], [-1, 1]]), 1e-12)

    def test_biconditional(self):
        ctx = MatrixModel(4)
        v = ShiftRegisterRNG(17).orthonormal_frame(4)
        a = ctx.from_matrix(v @ np.diag([2.0, -1.0, 0.0, 0.0]) @ v.T)
        extra = neutral_cone_witness(a)
        assert extra
        rep = rickart_biconditional(a, extra)
        assert rep.verdict == "pass"
        assert rep.details["commutation_clause_witnesses"] >= 1

    def test_semidefinite_has_no_neutral_witness(self, m3, rng):
        assert neutral_cone_witness(m3.random_positive(rng)) == []

    def test_spin(self, l3):
        a = l3.pair(1.0, [1.0, 0.0])  # spectrum {0, 2}
        star = rickart_map(a)
        assert star.tag == "atom"
        np.testing.assert_allclose(star.y, [-1.0, 0.0])
        assert rickart_biconditional(a).verdict == "pass"


class TestCover:
    def test_projection(self, m3, rng):
        p = m3.random_projection(rng, rank=2)
        close(projection_cover(p.element).element, p.element.matrix, 1e-10)

    def test_half_unit(self, m3):
        close(projection_cover(0.5 * m3.unit()).element, np.eye(3))

    def test_diag(self, m2):
        close(projection_cover(M(m2, np.diag([0.5, 0]))).element, np.diag([1, 0]))

    def test_minimal_over_P(self, m3):
        e = M(m3, np.diag([0.5, 0.25, 0]))
        cover = projection_cover(e)
        for q in bicommutant(e).projections:
            if order_leq(e, q.element):
                assert order_leq(cover.element, q.element)

    def test_not_effect(self, m2):
        with pytest.raises(ContractError):
            projection_cover(M(m2, np.diag([2, 0])))


class TestBicommutant:
    def test_unit(self, m3):
        assert len(bicommutant(m3.unit()).projections) == 2

    def test_two_clusters(self, m3):
        q = bicommutant(M(m3, np.diag([1, 1, 2])))
        assert len(q.projections) == 4
        assert verify_bicommutant(q).verdict == "pass"

    def test_spin_atoms(self, l3):
        q = bicommutant(l3.pair(0.3, [0.5, -0.2]))
        assert len(q.projections) == 4
        assert verify_bicommutant(q).verdict == "pass"

    def test_cap(self):
        ctx = MatrixModel(21)
        with pytest.raises(ContractError):
            bicommutant(ctx.from_matrix(np.diag(np.arange(21.0))))


class TestExtendedCommute:
    def test_polynomial(self, m3, rng):
        a = m3.random_element(rng)
        b = 3.0 * m3.jordan(a, a) - a + m3.unit()
        assert extended_commute(a, b) is True

    def test_noncommuting(self, m2):
        assert extended_commute(M(m2, np.diag([1, 2])), M(m2, [[0, 1], [1, 0]])) is False

    def test_unit(self, l3, rng):
        assert extended_commute(l3.random_element(rng), l3.unit()) is True

    def test_matches_operator_commute(self):
        ctx = MatrixModel(3)
        for t in range(100):
            rng = ShiftRegisterRNG.for_trial(18, t)
            a = ctx.random_element(rng)
            b = (ctx.jordan(a, a) if t % 2 else ctx.random_element(rng))
            assert extended_commute(a, b) == operator_commute(a, b)


class TestBlocks:
    def test_trivial(self, m3):
        rep = block_and_cblock([m3.proj_zero(), m3.proj_one()])
        assert rep.details["block_size"] == 2
        # {0, 1} is not maximal: everything commutes with it, so the span check fails
        assert rep.details["commutant_dim"] == 6
        assert rep.verdict == "fail"

    def test_diagonal(self, m3):
        rep = block_and_cblock([P(m3, np.diag([1, 0, 0])), P(m3, np.diag([0, 1, 0]))])
        assert rep.details["block_size"] == 8
        assert rep.details["cblock_span_dim"] == 3
        assert rep.verdict == "pass"

    def test_spin_atom(self, l3):
        rep = block_and_cblock([l3.atom([1.0, 0.0])])
        assert rep.details["block_size"] == 4
        assert rep.details["cblock_span_dim"] == 2
        assert rep.verdict == "pass"

    def test_pool_extension(self, m3):
        pool = [P(m3, np.diag([0, 1, 0])), P(m3, 0.5 * np.array([[1, 1, 0], [1, 1, 0], [0, 0, 0]]))]
        rep = block_and_cblock([P(m3, np.diag([1, 0, 0]))], pool=pool)
        assert rep.details["pool_used"] == 1
        assert rep.details["block_size"] == 8

    def test_incompatible(self, m2):
        with pytest.raises(ContractError):
            block_and_cblock([P(m2, np.diag([1, 0])), P(m2, 0.5 * np.ones((2, 2)))])


class TestJBCondition:
    def test_matrix(self):
        ctx = MatrixModel(4)
        for t in range(100):
            rng = ShiftRegisterRNG.for_trial(19, t)
            p, q = ctx.random_projection(rng), ctx.random_projection(rng)
            assert eq7_residual(p, q) <= 1e-9
            assert t_condition_residual(p, q) <= 1e-9

    def test_l3_witness(self, l3):
        c = 2 ** (-2 / 3)
        p, q = l3.atom([c, c]), l3.atom([1.0, 0.0])
        assert eq7_residual(p, q) == pytest.approx(abs(2 ** (-1 / 3) - c) / 2, abs=1e-12)
        assert t_condition_residual(p, q) > 0.01
