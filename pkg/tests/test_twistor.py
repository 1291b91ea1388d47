import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nullwave.errors import (
    EtaDenominatorZero,
    NotNull,
    SingularBracket,
    SingularChart,
    ZeroPoint,
    ZeroTwistor,
)
from nullwave.fields import Box, Scheme, wave_residual
from nullwave.registry import surface_basic_surface
from nullwave.spinor import MinkVec
from nullwave.twistor import (
    CallableSurface,
    Poly2D,
    Quaternion,
    Twistor,
    TwistorSurface,
    check_prop_condition,
    conj_twistor,
    gradient_from_uvq,
    hopf,
    in_N5,
    incidence_partials,
    incidence_residual,
    inner,
    is_null,
    normalize_chart,
    projectively_equal,
    ray_through,
    solve_incidence,
    surface_field,
    uvq,
)

finite_complex = st.complex_numbers(
    min_magnitude=0.0, max_magnitude=5.0, allow_nan=False, allow_infinity=False
)
twistors = st.tuples(finite_complex, finite_complex, finite_complex, finite_complex).map(
    lambda c: Twistor(*c)
)


class TestConjugation:
    def test_index_swap(self):
        assert tuple(conj_twistor(Twistor(1, 0, 0, 0)).coords) == (0, 0, 1, 0)
        assert tuple(conj_twistor(Twistor(0, 0, 1, 0)).coords) == (1, 0, 0, 0)

    def test_conjugates_entries(self):
        assert tuple(conj_twistor(Twistor(1j, 0, 0, 0)).coords) == (0, 0, -1j, 0)

    @given(twistors)
    @settings(max_examples=200)
    def test_involution(self, X):
        back = conj_twistor(Twistor(*conj_twistor(X).coords))
        assert tuple(back.coords) == tuple(X.coords)


class TestInnerProduct:
    def test_real_positive(self):
        assert inner(Twistor(1, 0, 1, 0), Twistor(1, 0, 1, 0)) == 2

    def test_null_example(self):
        assert inner(Twistor(1j, 0, 1, 0), Twistor(1j, 0, 1, 0)) == 0

    @given(twistors)
    @settings(max_examples=200)
    def test_diagonal_is_real(self, X):
        value = inner(X, X)
        assert abs(value.imag) <= 1e-12 * max(1.0, abs(value))

    @given(twistors)
    @settings(max_examples=200)
    def test_diagonal_expansion(self, X):
        expected = 2 * (X.xi0 * np.conj(X.eta0) + X.xi1 * np.conj(X.eta1)).real
        assert inner(X, X) == pytest.approx(expected, abs=1e-12)


class TestIsNull:
    def test_examples(self):
        assert is_null(Twistor(1j, 0, 1, 0)) is True
        assert is_null(Twistor(1, 0, 1, 0)) is False
        assert is_null(Twistor(0.3 + 1j, -2, 0, 0)) is True  # zero primed part

    def test_zero_rejected(self):
        with pytest.raises(ZeroTwistor):
            is_null(Twistor(0, 0, 0, 0))

    @given(twistors)
    @settings(max_examples=500)
    def test_matches_hypersurface_condition(self, X):
        if X.is_zero():
            return
        assert is_null(X) == in_N5(tuple(X.coords))


class TestHopf:
    def test_examples(self):
        q1, q2 = hopf([1, 0, 0, 1])
        assert (q1.z, q1.w, q2.z, q2.w) == (1, 0, 0, 1)
        q1, q2 = hopf([0, 1, 0, 0])
        assert (q1.z, q1.w, q2.z, q2.w) == (0, 1, 0, 0)
        q1, q2 = hopf([1, 0, 1, 0])
        assert (q1.z, q1.w, q2.z, q2.w) == (1, 0, 1, 0)

    def test_zero_rejected(self):
        with pytest.raises(ZeroPoint):
            hopf([0, 0, 0, 0])
        with pytest.raises(ZeroPoint):
            in_N5([0, 0, 0, 0])

    def test_right_scale_invariance(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            p = rng.normal(size=4) + 1j * rng.normal(size=4)
            s = Quaternion(complex(*rng.normal(size=2)), complex(*rng.normal(size=2)))
            q1, q2 = hopf(p)
            # right-multiplying both slots by s gives the same projective point
            r1, r2 = q1 * s, q2 * s
            if q2.norm_sq() > 1e-6 and r2.norm_sq() > 1e-6:
                a = q1 * q2.inverse()
                b = r1 * r2.inverse()
                assert a.z == pytest.approx(b.z, abs=1e-9)
                assert a.w == pytest.approx(b.w, abs=1e-9)

    def test_quaternion_algebra(self):
        i = Quaternion(1j, 0)
        j = Quaternion(0, 1)
        ij = i * j
        ji = j * i
        assert (ij.z, ij.w) == (0, 1j)      # ij = k
        assert (ji.z, ji.w) == (0, -1j)     # ji = -k
        assert (j * j).z == -1              # j^2 = -1


class TestIncidence:
    def test_origin_annihilates_eta_only_twistors(self):
        assert incidence_residual(Twistor(0, 0, 0.3, -1j), MinkVec(0, 0, 0, 0)) == (0, 0)

    def test_surface_point_example(self):
        X = Twistor(2j, 0, 1, 1)
        assert incidence_residual(X, MinkVec(0, 1, 1, 0)) == (0, 0)

    def test_origin_with_xi(self):
        assert incidence_residual(Twistor(1, 0, 0, 1), MinkVec(0, 0, 0, 0)) == (1j, 0)

    @given(
        st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2),
        finite_complex, finite_complex,
    )
    @settings(max_examples=300)
    def test_point_twistors_are_null(self, t, x1, x2, x3, e0, e1):
        # Solving the incidence for xi at a real point produces a null twistor.
        if abs(e0) + abs(e1) < 1e-3:
            return
        x = MinkVec(t, x1, x2, x3)
        u, v, q = uvq(x)
        xi0 = 1j * (u * e0 + q * e1)
        xi1 = 1j * (np.conj(q) * e0 + v * e1)
        X = Twistor(xi0, xi1, e0, e1)
        assert incidence_residual(X, x) == pytest.approx((0, 0), abs=1e-12)
        assert is_null(X)


class TestRayThrough:
    def test_eta_basis_ray(self):
        # Incident set of (0, 0, 1, 0) is u = 0, conj(q) = 0: the ray
        # (t, -t, 0, 0), solved directly from r = s = 0.
        point, direction = ray_through(Twistor(0, 0, 1, 0))
        assert incidence_residual(Twistor(0, 0, 1, 0), point) == pytest.approx((0, 0), abs=1e-12)
        n = direction.euclid_sq() ** 0.5
        assert (direction.t / n, direction.x1 / n) == pytest.approx(
            (1 / np.sqrt(2), -1 / np.sqrt(2)), abs=1e-12
        )

    def test_known_ray(self):
        # Incident set of (2i, 0, 1, 1) is u + q = 2, conj(q) + v = 0:
        # the line (t, 1, 1 - t, 0) with direction (1, 0, -1, 0).
        X = Twistor(2j, 0, 1, 1)
        point, direction = ray_through(X)
        assert incidence_residual(X, point) == pytest.approx((0, 0), abs=1e-10)
        n = direction.euclid_sq() ** 0.5
        assert (direction.t / n, direction.x1 / n, direction.x2 / n, direction.x3 / n) == \
            pytest.approx((1 / np.sqrt(2), 0, -1 / np.sqrt(2), 0), abs=1e-12)

    def test_invariance_along_ray(self):
        X = Twistor(2j, 0, 1, 1)
        point, direction = ray_through(X)
        for s in (-2.0, -1.0, 1.0, 2.0, 3.0):
            shifted = point + direction.scaled(s)
            r, sres = incidence_residual(X, shifted)
            assert max(abs(r), abs(sres)) <= 1e-10

    def test_non_null_rejected(self):
        with pytest.raises(NotNull):
            ray_through(Twistor(1, 0, 1, 0))


class TestSurfacesAndCharts:
    def test_poly2d_eval_and_derivatives(self):
        p = Poly2D([[1, 2], [3, 4]])  # 1 + 2w + 3z + 4zw
        assert p(2, 3) == 1 + 6 + 6 + 24
        assert p.dz()(2, 3) == 3 + 4 * 3
        assert p.dw()(2, 3) == 2 + 4 * 2

    def test_regularity(self):
        S = surface_basic_surface()
        assert S.regular_at(0.3, -0.7)
        flat = TwistorSurface(
            (Poly2D.constant(1), Poly2D.constant(1), Poly2D.z(), Poly2D.constant(1))
        )
        assert not flat.regular_at(0.3, -0.7)

    def test_prop_condition_examples(self):
        samples = [(0.3 + 0.1j, -0.5), (1.0, 0.7j), (-0.2, 0.4)]
        normal = surface_basic_surface()
        assert check_prop_condition(normal, samples) is True
        bad = TwistorSurface(
            (Poly2D.z(), Poly2D.constant(0), Poly2D.w(), Poly2D.constant(1))
        )
        assert check_prop_condition(bad, samples) is False
        # eta0'/eta1' = zw/w = z is w-independent wherever w != 0
        ratio_surface = TwistorSurface(
            (Poly2D.z(), Poly2D.constant(0), Poly2D.z() * Poly2D.w(), Poly2D.w())
        )
        assert check_prop_condition(ratio_surface, samples) is True

    def test_prop_condition_zero_denominator(self):
        surface = TwistorSurface(
            (Poly2D.z(), Poly2D.constant(0), Poly2D.z(), Poly2D.w())
        )
        with pytest.raises(EtaDenominatorZero):
            check_prop_condition(surface, [(0.3, 0.0)])

    def test_normalize_chart_identity(self):
        chart = normalize_chart(surface_basic_surface(), base=(0.2, 0.1))
        X, z, w = chart.evaluate(0.4 + 0.2j, -0.3j)
        assert z == pytest.approx(0.4 + 0.2j, abs=1e-12)
        assert w == pytest.approx(-0.3j, abs=1e-12)
        assert X.eta0 == pytest.approx(0.4 + 0.2j, abs=1e-12)
        assert X.eta1 == pytest.approx(1.0, abs=1e-12)

    def test_normalize_chart_newton_inversion(self):
        # [w, z, z + w, 1]: new parameters are (z + w, w).
        S = TwistorSurface(
            (Poly2D.w(), Poly2D.z(), Poly2D([[0, 1], [1, 0]]), Poly2D.constant(1))
        )
        chart = normalize_chart(S, base=(0.0, 0.0))
        X, z, w = chart.evaluate(1.0, 0.0)
        assert (z, w) == pytest.approx((1.0, 0.0), abs=1e-10)
        np.testing.assert_allclose(X.coords, [0, 1, 1, 1], atol=1e-10)
        assert projectively_equal(X, S.point(z, w))

    def test_normalize_chart_singular(self):
        flat = TwistorSurface(
            (Poly2D.constant(1), Poly2D.constant(1), Poly2D.z(), Poly2D.constant(1))
        )
        with pytest.raises(SingularChart):
            normalize_chart(flat, base=(0.0, 0.0))

    def test_callable_surface_matches_polynomial(self):
        S = surface_basic_surface()
        C = CallableSurface(
            (
                lambda z, w: w,
                lambda z, w: 0j,
                lambda z, w: z,
                lambda z, w: 1 + 0j,
            )
        )
        dz_p, dw_p = S.partials(0.3, -0.2j)
        dz_c, dw_c = C.partials(0.3, -0.2j)
        np.testing.assert_allclose(dz_p, dz_c, atol=1e-9)
        np.testing.assert_allclose(dw_p, dw_c, atol=1e-9)


class TestSolveIncidence:
    def test_closed_form_point(self):
        root = solve_incidence(surface_basic_surface(), MinkVec(0, 1, 1, 0), seed=(0, 0))
        assert root.z == pytest.approx(1.0, abs=1e-12)
        assert root.w == pytest.approx(2j, abs=1e-12)

    def test_generic_closed_form(self):
        rng = np.random.default_rng(11)
        S = surface_basic_surface()
        for _ in range(20):
            x = MinkVec(*rng.uniform(-1, 1, size=4))
            u, v, q = uvq(x)
            if abs(q) < 0.2:
                continue
            root = solve_incidence(S, x, seed=(0, 0))
            assert root.z == pytest.approx(-v / np.conj(q), abs=1e-10)

    def test_singular_bracket(self):
        S = TwistorSurface(
            (Poly2D.w(), Poly2D.z() * Poly2D.w(), Poly2D.z(), Poly2D.constant(1)),
            normal_form=True,
        )
        with pytest.raises(SingularBracket):
            solve_incidence(S, MinkVec(0, 0, 1, 0))


class TestIncidencePartials:
    def test_closed_form(self):
        S = surface_basic_surface()
        x = MinkVec(0, 1, 1, 0)
        root = solve_incidence(S, x, seed=(0, 0))
        zu, zv, zq, zqb = incidence_partials(S, root.z, root.w, x)
        u, v, q = uvq(x)
        assert zu == pytest.approx(0, abs=1e-12)
        assert zv == pytest.approx(-1 / np.conj(q), abs=1e-12)
        assert zq == pytest.approx(0, abs=1e-12)
        assert zqb == pytest.approx(v / np.conj(q) ** 2, abs=1e-12)

    def test_product_identity(self):
        rng = np.random.default_rng(5)
        S = TwistorSurface(
            (Poly2D.w(), Poly2D([[0, 0], [0, 1]]), Poly2D.z(), Poly2D.constant(1)),
            normal_form=True,
        )
        for _ in range(20):
            x = MinkVec(*(rng.uniform(0.2, 0.8, size=4)))
            try:
                root = solve_incidence(S, x)
            except SingularBracket:
                continue
            zu, zv, zq, zqb = incidence_partials(S, root.z, root.w, x)
            scale = max(1.0, abs(zu * zv), abs(zq * zqb))
            assert abs(zu * zv - zq * zqb) <= 1e-10 * scale

    def test_matches_finite_differences(self):
        S = surface_basic_surface()
        domain = Box((-0.5, -0.5, 0.5, -0.5), (0.5, 0.5, 1.5, 0.5))
        f = surface_field(S, "s", domain, seed=(0, 0))
        rng = np.random.default_rng(17)
        for _ in range(10):
            x = MinkVec(
                rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3),
                rng.uniform(0.8, 1.2), rng.uniform(-0.3, 0.3),
            )
            root = solve_incidence(S, x, seed=(0, 0))
            closed = np.array(incidence_partials(S, root.z, root.w, x))
            h = 1e-5
            fd = np.empty(4, dtype=complex)
            for a in range(4):
                fd[a] = (f.evaluate(x.offset(a, h)) - f.evaluate(x.offset(a, -h))) / (2 * h)
            fd_uvq = np.array(
                [
                    (fd[0] + fd[1]) / 2,
                    (fd[0] - fd[1]) / 2,
                    (fd[2] - 1j * fd[3]) / 2,
                    (fd[2] + 1j * fd[3]) / 2,
                ]
            )
            assert np.max(np.abs(closed - fd_uvq)) <= 1e-6 * max(1.0, np.max(np.abs(closed)))


class TestGeneratedSolutions:
    def test_normal_form_surfaces_solve_wave_equation(self):
        domain = Box((0.1, 0.2, 0.8, 0.0), (0.5, 0.6, 1.2, 0.4))
        surfaces = [
            surface_basic_surface(),
            TwistorSurface(
                (Poly2D.w(), Poly2D([[0, 0], [0, 1]]), Poly2D.z(), Poly2D.constant(1)),
                normal_form=True,
            ),
        ]
        rng = np.random.default_rng(23)
        for S in surfaces:
            f = surface_field(S, "gen", domain.padded(0.1), seed=None)
            for _ in range(5):
                x = MinkVec(
                    rng.uniform(0.15, 0.45), rng.uniform(0.25, 0.55),
                    rng.uniform(0.85, 1.15), rng.uniform(0.05, 0.35),
                )
                assert abs(wave_residual(f, x)) <= 1e-6
                from nullwave.fields import semiconformality_residual

                assert abs(semiconformality_residual(f, x)) <= 1e-9

    def test_condition_violating_surface_fails_wave_equation(self):
        bad = TwistorSurface(
            (Poly2D.z(), Poly2D.constant(0), Poly2D.w(), Poly2D.constant(1))
        )
        domain = Box((-0.5, -0.5, 0.5, -0.5), (0.5, 0.5, 1.5, 0.5))
        f = surface_field(bad, "bad", domain, seed=(0, 0))
        x = MinkVec(0.1, 0.2, 1.0, 0.1)
        # closed form: z = i(q - u v / conj(q)); wave residual is -4i/conj(q)
        u, v, q = uvq(x)
        assert f.evaluate(x) == pytest.approx(1j * (q - u * v / np.conj(q)), abs=1e-10)
        assert abs(wave_residual(f, x)) == pytest.approx(4 / abs(q), rel=1e-4)
