import math

import numpy as np
import pytest

from oscrenorm import (
    DilationFamily,
    DivergentIntegral,
    FieldFunction,
    GlElement,
    MonotonicityViolated,
    NonPositiveScale,
    NotPositiveDefinite,
    PropagatorFamily,
    RenormStep,
    Sym2Tensor,
    Theory,
    cgrl_apply,
    cgrl_compose,
    coarse_grain,
    heat_kernel_base,
    propagator_at,
    renorm_step,
    rescale,
    w_full,
    wtilde,
)
from oscrenorm.oscgroup import sd_mul, ur
from oscrenorm.renorm import project_polynomial
from conftest import random_gl_pos, random_spd


def quadratic_interaction(a, dim=1):
    """- a x^2 / 2, which flows in closed form."""
    terms = [(tuple(2 if i == j else 0 for i in range(dim)), -0.5 * a) for j in range(dim)]
    return FieldFunction.polynomial(terms, dim)


def wtilde_quadratic(p, a, x):
    """Closed form of wtilde(p, -a x^2/2) at x."""
    return -0.5 * math.log(1.0 + a * p) - 0.5 * a * x * x / (1.0 + a * p)


def quadratic_coefficient(f, h=0.25):
    """Recover a from f(x) = const - a x^2 / 2 by a second difference."""
    second = f([h]) + f([-h]) - 2.0 * f([0.0])
    return -second / (h * h)


class TestDilationFamily:
    def test_default_is_inverse_sqrt(self):
        fam = DilationFamily.default(2)
        np.testing.assert_allclose(
            fam.transform(4.0).matrix, 0.5 * np.eye(2), rtol=1e-12
        )

    def test_identity_at_one(self):
        fam = DilationFamily([[0.3, 0.1], [0.0, -0.2]])
        np.testing.assert_allclose(fam.transform(1.0).matrix, np.eye(2), atol=1e-15)

    def test_one_parameter_law(self):
        fam = DilationFamily([[0.3, 0.1], [0.0, -0.2]])
        lhs = fam.transform(2.0) @ fam.transform(3.0)
        np.testing.assert_allclose(
            lhs.matrix, fam.transform(6.0).matrix, rtol=1e-12
        )

    def test_rejects_nonpositive_scale(self):
        with pytest.raises(NonPositiveScale):
            DilationFamily.default(1).transform(0.0)


class TestPropagatorFamily:
    def test_default_scaling(self):
        fam = PropagatorFamily.with_default_dilation(
            Sym2Tensor([[3.0]]), fiducial_scale=2.0
        )
        # T_{L/L0} = (L/L0)^{-1/2}, so P(L) = 3 * L0 / L
        np.testing.assert_allclose(
            propagator_at(fam, 6.0).matrix, [[1.0]], rtol=1e-12
        )

    def test_base_recovered_at_fiducial(self, rng):
        base = random_spd(rng, 2)
        fam = PropagatorFamily.with_default_dilation(base, fiducial_scale=1.7)
        np.testing.assert_allclose(
            propagator_at(fam, 1.7).matrix, base.matrix, atol=1e-13
        )

    def test_rejects_indefinite_base(self):
        with pytest.raises(NotPositiveDefinite):
            PropagatorFamily.with_default_dilation(
                Sym2Tensor([[2.0, 3.0], [3.0, 2.0]])
            )

    def test_rejects_nonpositive_scale(self):
        fam = PropagatorFamily.with_default_dilation(Sym2Tensor([[1.0]]))
        with pytest.raises(NonPositiveScale):
            propagator_at(fam, -1.0)


class TestRenormStep:
    def test_matches_ur_lift(self):
        fam = PropagatorFamily.with_default_dilation(Sym2Tensor.diagonal([1.0, 2.0]))
        step = RenormStep.for_family(fam, 4.0)
        lifted = ur(fam.base, fam.dilation.transform(4.0))
        np.testing.assert_allclose(step.transform.matrix, lifted.m.matrix)
        np.testing.assert_allclose(step.step_tensor.matrix, lifted.p.matrix)
        np.testing.assert_allclose(step.step_tensor.matrix, np.diag([0.75, 1.5]))

    def test_rejects_c_below_one(self):
        fam = PropagatorFamily.with_default_dilation(Sym2Tensor([[1.0]]))
        with pytest.raises(ValueError):
            RenormStep.for_family(fam, 0.5)

    def test_expanding_generator_is_not_monotone(self):
        fam = PropagatorFamily(
            Sym2Tensor([[1.0]]), DilationFamily([[0.5]])
        )
        with pytest.raises(MonotonicityViolated):
            RenormStep.for_family(fam, 2.0)


class TestHeatKernel:
    def test_3d_diagonal_closed_form(self):
        L0 = 1.3
        C = heat_kernel_base(3, [[0.0, 0.0, 0.0]], L0)
        expected = 2.0 * (4.0 * math.pi) ** (-1.5) / math.sqrt(L0)
        assert C.matrix[0, 0] == pytest.approx(expected, rel=1e-9)

    def test_massless_low_dimension_diverges(self):
        with pytest.raises(DivergentIntegral):
            heat_kernel_base(2, [[0.0, 0.0]], 1.0)

    def test_massive_2d_converges(self):
        C = heat_kernel_base(2, [[0.0, 0.0]], 1.0, mass=1.0)
        assert C.matrix[0, 0] > 0.0

    def test_off_diagonal_decay(self):
        sites = [[float(i), 0.0, 0.0] for i in range(4)]
        C = heat_kernel_base(3, sites, 1.0)
        row = C.matrix[0]
        assert row[0] > row[1] > row[2] > row[3] > 0.0

    def test_translation_invariance(self):
        sites = [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]]
        shifted = [[5.0, 1.0, -1.0], [7.0, 1.0, -1.0]]
        C1 = heat_kernel_base(3, sites, 1.0)
        C2 = heat_kernel_base(3, shifted, 1.0)
        np.testing.assert_allclose(C1.matrix, C2.matrix, rtol=1e-10)


class TestWtilde:
    def test_quadratic_closed_form(self):
        p, a = 0.8, 1.1
        out = wtilde(Sym2Tensor([[p]]), quadratic_interaction(a))
        for x in (-1.0, 0.0, 0.6, 2.0):
            assert out([x]) == pytest.approx(wtilde_quadratic(p, a, x), rel=1e-9)

    def test_zero_covariance_is_identity(self):
        I = quadratic_interaction(0.7)
        out = wtilde(Sym2Tensor.zero(1), I)
        assert out is I

    def test_zero_interaction_gives_zero(self):
        out = wtilde(Sym2Tensor([[1.0]]), FieldFunction.zero(1))
        assert out([0.9]) == pytest.approx(0.0, abs=1e-12)

    def test_w_full_quadratic(self):
        p, a = 0.5, 0.8
        I = quadratic_interaction(a)
        for J in (-1.0, 0.0, 1.5):
            expected = 0.5 * p * J * J + wtilde_quadratic(p, a, p * J)
            assert w_full(Sym2Tensor([[p]]), I, [J]) == pytest.approx(
                expected, rel=1e-9
            )


class TestCoarseGrain:
    def test_composition_law(self):
        # wtilde(P1, wtilde(P2, I)) == wtilde(P1 + P2, I) pointwise
        P1, P2 = Sym2Tensor([[0.4]]), Sym2Tensor([[0.3]])
        I = FieldFunction.polynomial([((4,), -0.2)], dim=1)
        staged = wtilde(P1, coarse_grain(P1, P2, I))
        direct = wtilde(P1 + P2, I)
        for x in (-1.0, 0.0, 0.7):
            assert staged([x]) == pytest.approx(direct([x]), abs=1e-6)

    def test_zero_second_factor(self):
        I = quadratic_interaction(0.5)
        out = coarse_grain(Sym2Tensor([[1.0]]), Sym2Tensor.zero(1), I)
        assert out is I

    def test_rejects_indefinite(self):
        I = quadratic_interaction(0.5, dim=2)
        bad = Sym2Tensor([[2.0, 3.0], [3.0, 2.0]])
        with pytest.raises(NotPositiveDefinite):
            coarse_grain(bad, Sym2Tensor.identity(2), I)


class TestRescale:
    def test_covariance_pullback(self, rng):
        M = random_gl_pos(rng, 2)
        P = random_spd(rng, 2)
        I = quadratic_interaction(0.3, dim=2)
        P2, _ = rescale(M, P, I)
        np.testing.assert_allclose(
            P2.matrix,
            np.linalg.inv(M.matrix) @ P.matrix @ np.linalg.inv(M.matrix).T,
            rtol=1e-9,
        )

    def test_wtilde_equivariance(self):
        # wtilde(P, I)(M x) == wtilde(M^{-1} P M^{-T}, I o M)(x)
        M = GlElement([[0.7]])
        P = Sym2Tensor([[0.6]])
        I = FieldFunction.polynomial([((4,), -0.15), ((2,), -0.1)], dim=1)
        P2, I2 = rescale(M, P, I)
        lhs = wtilde(P, I)
        rhs = wtilde(P2, I2)
        for x in (-0.8, 0.0, 1.1):
            assert lhs([0.7 * x]) == pytest.approx(rhs([x]), rel=1e-8, abs=1e-10)


class TestRenormStepFlow:
    def test_identity_at_one(self):
        fam = PropagatorFamily.with_default_dilation(Sym2Tensor([[1.0]]))
        I = quadratic_interaction(0.4)
        assert renorm_step(fam, 1.0, I) is I

    def test_quadratic_coefficient_map(self):
        p, a, c = 1.0, 0.6, 2.0
        fam = PropagatorFamily.with_default_dilation(Sym2Tensor([[p]]))
        out = renorm_step(fam, c, quadratic_interaction(a))
        expected = (a / c) / (1.0 + a * p * (1.0 - 1.0 / c))
        assert quadratic_coefficient(out) == pytest.approx(expected, rel=1e-8)

    def test_semigroup_property(self):
        fam = PropagatorFamily.with_default_dilation(Sym2Tensor([[1.0]]))
        I = FieldFunction.polynomial([((4,), -0.1), ((2,), -0.2)], dim=1)
        c1, c2 = 1.5, 2.0
        staged_fn = renorm_step(fam, c2, renorm_step(fam, c1, I))
        direct_fn = renorm_step(fam, c1 * c2, I)
        for x in (-0.6, 0.0, 0.9):
            assert staged_fn([x]) == pytest.approx(direct_fn([x]), abs=1e-6)

    def test_matches_cgrl_compose_of_lift(self):
        fam = PropagatorFamily.with_default_dilation(Sym2Tensor([[0.9]]))
        I = quadratic_interaction(0.5)
        c = 3.0
        lifted = ur(fam.base, fam.dilation.transform(c))
        via_action = cgrl_compose(lifted.m, lifted.p, I)
        stepped = renorm_step(fam, c, I)
        for x in (-1.0, 0.2):
            assert stepped([x]) == pytest.approx(via_action([x]), rel=1e-10)


class TestCgrl:
    def test_apply_carries_determinant(self):
        M = GlElement([[2.0]])
        P = Sym2Tensor([[0.5]])
        I = quadratic_interaction(0.3)
        base = wtilde(P, I)
        out = cgrl_apply(M, P, I)
        for x in (0.0, 0.4):
            assert out([x]) == pytest.approx(2.0 * base([2.0 * x]), rel=1e-10)

    def test_compose_right_action_law(self):
        # cgrl(g1 * g2) == cgrl(g2) after cgrl(g1) for the semidirect lift
        C = Sym2Tensor([[1.0]])
        fam = DilationFamily.default(1)
        g1 = ur(C, fam.transform(2.0))
        g2 = ur(C, fam.transform(1.5))
        g12 = sd_mul(g1, g2)
        I = FieldFunction.polynomial([((4,), -0.2)], dim=1)
        staged = cgrl_compose(g2.m, g2.p, cgrl_compose(g1.m, g1.p, I))
        direct = cgrl_compose(g12.m, g12.p, I)
        for x in (-0.5, 0.0, 0.8):
            assert staged([x]) == pytest.approx(direct([x]), abs=1e-6)

    def test_zero_covariance_is_plain_composition(self):
        I = quadratic_interaction(0.4)
        out = cgrl_compose(GlElement([[0.5]]), Sym2Tensor.zero(1), I)
        assert out([1.0]) == pytest.approx(I([0.5]))


class TestTheory:
    def test_valid_construction(self):
        Theory(Sym2Tensor([[1.0]]), quadratic_interaction(0.3))
        Theory(Sym2Tensor.zero(1), quadratic_interaction(0.3))

    def test_rejects_nonintegrable_interaction(self):
        bad = FieldFunction.polynomial([((3,), 1.0)], dim=1)
        with pytest.raises(ValueError):
            Theory(Sym2Tensor([[1.0]]), bad)


class TestProjectPolynomial:
    def test_exact_recovery(self):
        I = FieldFunction.polynomial([((4,), -0.3), ((2,), 0.7), ((0,), 1.1)], dim=1)
        pts = [[x] for x in np.linspace(-2.0, 2.0, 21)]
        fitted, residual = project_polynomial(I, pts, degree=4)
        assert residual == pytest.approx(0.0, abs=1e-10)
        coeffs = dict(fitted.terms)
        assert coeffs[(4,)] == pytest.approx(-0.3, abs=1e-9)
        assert coeffs[(2,)] == pytest.approx(0.7, abs=1e-9)

    def test_residual_reported_for_nonpolynomial(self):
        f = FieldFunction(
            evaluator=lambda x: math.sin(float(x[0])), dim=1,
            kind="composite", integrable=False,
        )
        pts = [[x] for x in np.linspace(-3.0, 3.0, 31)]
        _, residual = project_polynomial(f, pts, degree=1)
        assert residual > 1e-3
