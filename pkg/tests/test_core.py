import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spectral_ous import (ContractError, MatrixModel, NormOracle, SpinModel, bisection_norm,
                          cone_contains, is_effect, order_leq, order_unit_norm, parse_element)
from spectral_ous.core import format_element, spectral_bounds_by_bisection
from spectral_ous.rng import ShiftRegisterRNG

from conftest import eig2x2

finite = st.floats(-10, 10, allow_nan=False)


class TestContext:
    def test_bad_dimension(self):
        with pytest.raises(ContractError):
            MatrixModel(0)

    @pytest.mark.parametrize("eps", [0.0, -1e-9, 1e-3, 1.0])
    def test_bad_tolerance(self, eps):
        with pytest.raises(ContractError):
            MatrixModel(2, eps_cone=eps)

    def test_coordinate_length(self, m2):
        with pytest.raises(ContractError):
            m2.element([1.0, 2.0])

    def test_nonfinite(self, m2):
        with pytest.raises(ContractError):
            m2.element([1.0, np.nan, 0.0])

    def test_context_mismatch(self, m2, m3):
        with pytest.raises(ContractError):
            m2.unit() + m3.unit()
        with pytest.raises(ContractError):
            order_leq(m2.unit(), m3.unit())

    def test_symmetric_layout(self, m3):
        a = m3.from_matrix([[1, 2, 3], [0, 4, 5], [0, 0, 6]])
        # symmetrized on input, upper triangle row-major
        np.testing.assert_allclose(a.coords, [1, 1, 1.5, 4, 2.5, 6])
        np.testing.assert_allclose(a.matrix, a.matrix.T)


class TestCone:
    def test_unit_positive(self, m3, l2):
        assert cone_contains(m3, m3.unit())
        assert cone_contains(l2, l2.unit())

    def test_spin_boundary(self, l2):
        assert cone_contains(l2, l2.pair(1.0, [0.6, 0.8]))

    def test_matrix_rank_one(self, m2):
        a = m2.from_matrix([[1, 1], [1, 1]])
        lo, hi = eig2x2(a.matrix)
        assert lo == pytest.approx(0.0) and hi == pytest.approx(2.0)
        assert cone_contains(m2, a)
        assert not cone_contains(m2, a - 2.1 * m2.unit())

    def test_spin_order(self, l2):
        x = l2.pair(0.0, [1.0, 0.0])
        assert order_leq(x, l2.unit())
        assert not order_leq(x, 0.9 * l2.unit())

    def test_zero_leq_unit_and_reflexive(self, m3, rng):
        assert order_leq(m3.zero(), m3.unit())
        a = m3.random_element(rng)
        assert order_leq(a, a)

    def test_dimension_mismatch(self, m2, m3):
        with pytest.raises(ContractError):
            cone_contains(m2, m3.unit())


class TestNorm:
    def test_unit(self, m3, l2):
        assert order_unit_norm(m3.unit()) == pytest.approx(1.0)
        assert order_unit_norm(l2.unit()) == 1.0

    def test_spin_value(self, l2):
        a = l2.pair(2.0, [-3.0, 0.0])
        assert order_unit_norm(a) == 5.0
        assert bisection_norm(a) == pytest.approx(5.0, abs=1e-12)

    def test_matrix_value(self, m2):
        a = m2.from_matrix(np.diag([2.0, -3.0]))
        assert order_unit_norm(a) == pytest.approx(3.0, abs=1e-15)
        assert bisection_norm(a) == pytest.approx(3.0, abs=1e-12)

    @pytest.mark.parametrize("model", [MatrixModel(4), SpinModel(NormOracle.lp(3, 3))],
                             ids=["matrix", "spin"])
    def test_bisection_agrees_closed_form(self, model):
        worst = 0.0
        for t in range(1000):
            a = model.random_element(ShiftRegisterRNG.for_trial(11, t))
            worst = max(worst, abs(bisection_norm(a) - order_unit_norm(a)))
        assert worst <= 1e-8

    @settings(max_examples=60, deadline=None)
    @given(st.lists(finite, min_size=6, max_size=6), st.lists(finite, min_size=6, max_size=6), finite)
    def test_norm_axioms_matrix(self, x, y, lam):
        ctx = MatrixModel(3)
        a, b = ctx.element(x), ctx.element(y)
        assert order_unit_norm(a + b) <= order_unit_norm(a) + order_unit_norm(b) + 1e-9
        assert order_unit_norm(lam * a) == pytest.approx(abs(lam) * order_unit_norm(a), abs=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(finite, min_size=3, max_size=3), st.lists(finite, min_size=3, max_size=3), finite,
           st.sampled_from([1.5, 2.0, 3.0, 5.0]))
    def test_norm_axioms_spin(self, x, y, lam, p):
        ctx = SpinModel(NormOracle.lp(p, 2))
        a, b = ctx.element(x), ctx.element(y)
        assert order_unit_norm(a + b) <= order_unit_norm(a) + order_unit_norm(b) + 1e-9
        assert order_unit_norm(lam * a) == pytest.approx(abs(lam) * order_unit_norm(a), abs=1e-9)

    def test_bounds_by_bisection(self, m2):
        a = m2.from_matrix(np.diag([2.0, -3.0]))
        lo, hi = spectral_bounds_by_bisection(a)
        assert lo == pytest.approx(-3.0, abs=1e-12) and hi == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize("model", [MatrixModel(3), SpinModel(NormOracle.lp(5, 3))], ids=["matrix", "spin"])
def test_cone_closed_under_sum_and_scaling(model):
    for t in range(200):
        rng = ShiftRegisterRNG.for_trial(5, t)
        a, b = model.random_positive(rng), model.random_positive(rng)
        s = rng.uniform() * 10
        assert cone_contains(model, a + b)
        assert cone_contains(model, s * a)


class TestEffects:
    def test_half_unit(self, m3):
        assert is_effect(0.5 * m3.unit())

    def test_negative(self, m3):
        assert not is_effect(-0.01 * m3.unit())

    def test_spin_atom_is_effect(self, l2):
        assert is_effect(0.5 * l2.pair(1.0, [1.0, 0.0]))


class TestTextFormat:
    def test_matrix_roundtrip(self, m3, rng):
        a = m3.random_element(rng)
        b = parse_element(format_element(a))
        np.testing.assert_array_equal(a.coords, b.coords)

    def test_spin_roundtrip(self):
        ctx = SpinModel(NormOracle.lp(3, 3))
        a = ctx.pair(0.25, [1 / 3, -2.5, 1e-17])
        b = parse_element(str(a))
        assert b.ctx == ctx
        np.testing.assert_array_equal(a.coords, b.coords)

    def test_parse_symmetrizes(self):
        a = parse_element("matrix n 2 rowmajor 1 2 0 3")
        np.testing.assert_allclose(a.matrix, [[1, 1], [1, 3]])

    @pytest.mark.parametrize("bad", ["", "matrix n 2 rowmajor 1 2 3", "spin p 2 alpha 1 y",
                                     "cube n 2", "matrix n x rowmajor 1", "spin q 2 alpha 1 y 0"])
    def test_malformed(self, bad):
        with pytest.raises(ContractError):
            parse_element(bad)
