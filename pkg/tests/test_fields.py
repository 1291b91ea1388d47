import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nullwave.errors import NotRankOne, OutOfDomain, ZeroMatrix
from nullwave.fields import (
    Box,
    ScalarField,
    Scheme,
    SpinorFieldPair,
    closedness_check,
    constant_pair,
    factorize_gradient,
    one_form_from_pair,
    pair_from_gradient,
    pair_from_upper_components,
    semiconformality_residual,
    spinor_gradient,
    spinor_pde_residuals,
    wave_residual,
)
from nullwave.spinor import SQRT2, MinkVec, Role, SpinMat, Spinor, Variance, outer_lower

finite_complex = st.complex_numbers(
    min_magnitude=0.0, max_magnitude=5.0, allow_nan=False, allow_infinity=False
)

X0 = MinkVec(0.3, -0.4, 0.2, 0.1)


def field_u():
    return ScalarField("u", lambda x: complex(x.t - x.x1),
                       analytic_gradient=lambda x: (1, -1, 0, 0))


def field_q():
    return ScalarField("q", lambda x: complex(x.x2, x.x3),
                       analytic_gradient=lambda x: (0, 0, 1, 1j))


def field_t():
    return ScalarField("t", lambda x: complex(x.t),
                       analytic_gradient=lambda x: (1, 0, 0, 0))


class TestSpinorGradient:
    @pytest.mark.parametrize("scheme", [Scheme.analytic(), Scheme.central()])
    def test_u_gradient(self, scheme):
        m = spinor_gradient(field_u(), X0, scheme).m
        np.testing.assert_allclose(m, [[0, 0], [0, SQRT2]], atol=1e-9)

    @pytest.mark.parametrize("scheme", [Scheme.analytic(), Scheme.central()])
    def test_q_gradient(self, scheme):
        m = spinor_gradient(field_q(), X0, scheme).m
        np.testing.assert_allclose(m, [[0, SQRT2], [0, 0]], atol=1e-9)

    def test_constant_gradient(self):
        f = ScalarField("const", lambda x: 2.5 + 1j)
        m = spinor_gradient(f, X0, Scheme.central()).m
        np.testing.assert_allclose(m, np.zeros((2, 2)), atol=1e-12)

    def test_out_of_domain(self):
        f = ScalarField("small", lambda x: complex(x.t), domain=Box.cube(0.5))
        with pytest.raises(OutOfDomain):
            spinor_gradient(f, MinkVec(0.5, 0, 0, 0), Scheme.central())

    def test_fd_second_order_convergence(self):
        f = ScalarField(
            "smooth",
            lambda x: complex(math.sin(x.t + 0.5 * x.x1), math.cos(x.x2 - 2 * x.x3)),
        )
        exact = np.array(
            [
                math.cos(X0.t + 0.5 * X0.x1),
                0.5 * math.cos(X0.t + 0.5 * X0.x1),
                -1j * math.sin(X0.x2 - 2 * X0.x3),
                2j * math.sin(X0.x2 - 2 * X0.x3),
            ],
            dtype=complex,
        )
        from nullwave.fields import gradient4

        errs = []
        for h in (2e-2, 1e-2, 5e-3):
            got = gradient4(f, X0, Scheme.central(h))
            errs.append(float(np.max(np.abs(got - exact))))
        for coarse, fine in zip(errs, errs[1:]):
            assert 3.0 <= coarse / fine <= 5.0


class TestResiduals:
    def test_semiconformality_of_null_fields(self):
        assert abs(semiconformality_residual(field_q(), X0)) <= 1e-15
        assert abs(semiconformality_residual(field_u(), X0)) <= 1e-15

    def test_semiconformality_of_t(self):
        assert semiconformality_residual(field_t(), X0) == pytest.approx(0.5, abs=1e-12)

    def test_wave_linear_fields(self):
        assert abs(wave_residual(field_q(), X0)) <= 1e-9

    def test_wave_cancellation(self):
        f = ScalarField("tsq+x1sq", lambda x: complex(x.t**2 + x.x1**2))
        assert abs(wave_residual(f, X0, Scheme.central())) <= 1e-6

    def test_wave_of_t_squared(self):
        f = ScalarField("tsq", lambda x: complex(x.t**2))
        assert wave_residual(f, X0, Scheme.central()) == pytest.approx(2.0, abs=1e-6)


class TestFactorize:
    def test_u_gradient_factorization(self):
        xi, eta = factorize_gradient(SpinMat([[0, 0], [0, SQRT2]], Role.GRADIENT))
        assert xi.components == pytest.approx((0, 1), abs=1e-14)
        assert eta.components == pytest.approx((0, SQRT2), abs=1e-14)

    def test_q_gradient_factorization(self):
        xi, eta = factorize_gradient(SpinMat([[0, SQRT2], [0, 0]], Role.GRADIENT))
        assert xi.components == pytest.approx((1, 0), abs=1e-14)
        assert eta.components == pytest.approx((0, SQRT2), abs=1e-14)

    def test_full_rank_rejected(self):
        with pytest.raises(NotRankOne):
            factorize_gradient(SpinMat(np.eye(2), Role.GRADIENT))

    def test_zero_rejected(self):
        with pytest.raises(ZeroMatrix):
            factorize_gradient(SpinMat(np.zeros((2, 2)), Role.GRADIENT))

    @given(finite_complex, finite_complex, finite_complex, finite_complex)
    @settings(max_examples=300)
    def test_roundtrip_up_to_gauge(self, a, b, c, d):
        xi = Spinor(a, b, Variance.LOWER_UNPRIMED)
        eta = Spinor(c, d, Variance.LOWER_PRIMED)
        if xi.norm() < 1e-3 or eta.norm() < 1e-3:
            return
        M = outer_lower(xi, eta)
        xi2, eta2 = factorize_gradient(M)
        M2 = outer_lower(xi2, eta2)
        assert np.linalg.norm(M2.m - M.m) <= 1e-10 * max(1.0, M.frobenius())


class TestPairTransportEquations:
    def test_constant_pair_vanishes(self):
        pair = constant_pair(
            Spinor(1, 0, Variance.LOWER_UNPRIMED), Spinor(0, 1, Variance.LOWER_PRIMED)
        )
        res = spinor_pde_residuals(pair, X0)
        assert max(abs(v) for v in res) == 0.0

    def test_linear_pair_known_residuals(self):
        # Upper components xi^A = (t, 1), eta^{A'} = (0, 1): only the
        # equations pairing eta^1' with the derivative of xi^0 survive.
        pair = pair_from_upper_components(
            lambda x: complex(x.t), lambda x: 1 + 0j, lambda x: 0j, lambda x: 1 + 0j
        )
        res = spinor_pde_residuals(pair, X0, Scheme.central(1e-5))
        expected = [0, 0, 1 / SQRT2, 0, 0, 1 / SQRT2, 0, 0]
        for got, want in zip(res, expected):
            assert abs(got) == pytest.approx(want, abs=1e-8)

    def test_kerr_pair_satisfies_equations(self):
        from nullwave.kerr import kerr_pair_field
        from nullwave.registry import KERR_BASIC_SEED, get_builtin, kerr_basic_triple

        b = get_builtin("kerr-basic")
        pair = kerr_pair_field(kerr_basic_triple(), b.field.domain, KERR_BASIC_SEED)
        for x in (MinkVec(0.5, 0.05, 1.0, -0.05), MinkVec(0.45, -0.1, 1.1, 0.1)):
            res = spinor_pde_residuals(pair, x, Scheme.central(1e-5))
            assert max(abs(v) for v in res) <= 1e-6

    def test_gauge_invariance_of_residuals(self):
        # The eight residuals depend only on the product xi^A eta^{A'}.
        def c(x):
            return 1.0 + 0.3 * x.t - 0.2j * x.x2

        base = pair_from_upper_components(
            lambda x: complex(x.t + 0.2 * x.x1), lambda x: 1 + 0j,
            lambda x: complex(0.1 * x.x2), lambda x: 1 + 0.5j,
        )
        gauged = pair_from_upper_components(
            lambda x: c(x) * complex(x.t + 0.2 * x.x1), lambda x: c(x) * (1 + 0j),
            lambda x: complex(0.1 * x.x2) / c(x), lambda x: (1 + 0.5j) / c(x),
        )
        r1 = spinor_pde_residuals(base, X0, Scheme.central(1e-4))
        r2 = spinor_pde_residuals(gauged, X0, Scheme.central(1e-4))
        for a, b in zip(r1, r2):
            assert a == pytest.approx(b, abs=1e-8)


class TestClosedness:
    def test_constant_form(self):
        curl, div = closedness_check(lambda x: (1, -1, 0, 0), X0)
        assert max(abs(v) for v in curl) == 0.0
        assert div == 0.0

    def test_swap_form_closed_and_divergence_free(self):
        curl, div = closedness_check(lambda x: (x.x1, x.t, 0, 0), X0)
        assert max(abs(v) for v in curl) <= 1e-10
        assert abs(div) <= 1e-10

    def test_single_partial(self):
        curl, div = closedness_check(lambda x: (x.x1, 0, 0, 0), X0)
        assert curl[0] == pytest.approx(1.0, abs=1e-10)
        assert max(abs(v) for v in curl[1:]) <= 1e-10

    def test_one_form_of_gradient_pair_is_partials(self):
        # For a pair factoring nabla f the coefficients are the partials of f.
        pair = pair_from_gradient(field_q(), X0)
        w = one_form_from_pair(pair)(X0)
        np.testing.assert_allclose(w, [0, 0, 1, 1j], atol=1e-12)


def random_polynomial_pair(rng) -> SpinorFieldPair:
    def poly():
        c = rng.normal(size=5) + 1j * rng.normal(size=5)

        def f(x: MinkVec) -> complex:
            return complex(
                c[0] + c[1] * x.t + c[2] * x.x1 + c[3] * x.x2 + c[4] * x.x3
            )

        return f

    return pair_from_upper_components(poly(), poly(), poly(), poly())


def gauge_transformed_solution_pair(rng) -> SpinorFieldPair:
    # Random smooth gauge transform of a pair factoring the gradient of
    # x2 + i x3; the transport residuals are gauge-invariant, hence zero.
    c = rng.normal(size=4) * 0.2

    def gauge(x: MinkVec) -> complex:
        return complex(1.0 + c[0] * x.t + c[1] * x.x1, c[2] * x.x2 + c[3] * x.x3)

    return pair_from_upper_components(
        lambda x: 0j,
        lambda x: -gauge(x),
        lambda x: SQRT2 * 1 / gauge(x),
        lambda x: 0j,
    )


class TestTransportClosednessEquivalence:
    def test_equivalence_on_random_pairs(self):
        # Max of the eight transport residuals is small iff the curl and
        # divergence of the product 1-form are small, both directions.
        rng = np.random.default_rng(20260810)
        tol = 1e-6
        checked_true = checked_false = 0
        for k in range(100):
            if k % 2 == 0:
                pair = random_polynomial_pair(rng)
            else:
                pair = gauge_transformed_solution_pair(rng)
            transport = max(
                abs(v) for v in spinor_pde_residuals(pair, X0, Scheme.central(1e-4))
            )
            curl, div = closedness_check(one_form_from_pair(pair), X0, h=1e-4)
            closed = max([abs(v) for v in curl] + [abs(div)])
            assert (transport <= tol) == (closed <= tol), (
                f"case {k}: transport={transport:.3e} closed={closed:.3e}"
            )
            if transport <= tol:
                checked_true += 1
            else:
                # Guard band: negatives must sit well above the tolerance.
                assert transport >= 10 * tol and closed >= 10 * tol
                checked_false += 1
        assert checked_true >= 40 and checked_false >= 40
