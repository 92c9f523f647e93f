import numpy as np
import pytest

from levyliouville.growth import exp_weight, poly_weight
from levyliouville.jumps import Atom, JumpMeasure
from levyliouville.levy import (GeneralizedKappa, LevyTriplet,
                                PreconditionError, brownian_triplet,
                                closed_form_symbol, drift_diffusion_triplet,
                                poisson_triplet, stable_like_triplet,
                                symbol_from_kappa, symbol_from_triplet)
from levyliouville.verdicts import (SearchParams, coupling_verdict,
                                    liouville_verdict,
                                    polynomial_liouville_verdict,
                                    strong_liouville_verdict)

TWO_PI = 2.0 * np.pi
SEARCH = SearchParams(box_radius=10.0)


class TestLiouville:
    def test_brownian_holds(self):
        v = liouville_verdict(symbol_from_triplet(brownian_triplet(1)), SEARCH)
        assert v.holds is True
        assert v.witness is None
        assert any("certified" in a for a in v.assumptions)

    def test_lattice_symbol_fails_with_witness(self):
        v = liouville_verdict(closed_form_symbol("one-minus-exp"), SEARCH)
        assert v.holds is False
        assert v.witness.kind == "complex-exponential"
        gamma = float(v.witness.gamma[0])
        assert abs(gamma - TWO_PI) < 1e-4
        # witness certified: |psi(gamma)| <= tol
        s = closed_form_symbol("one-minus-exp")
        assert abs(s.evaluate(v.witness.gamma)) <= SEARCH.tol

    def test_empty_zero_set_annotated(self):
        v = liouville_verdict(closed_form_symbol("one-plus-square"), SEARCH)
        assert v.holds is True
        assert "only constant solution" in v.extra["annotation"]

    def test_fractional_power_holds(self):
        v = liouville_verdict(closed_form_symbol("abs-power", alpha=1.5),
                              SEARCH)
        assert v.holds is True

    def test_l1_flag_checked(self):
        s = closed_form_symbol("abs-power", alpha=1.0, maps_into_l1=False)
        with pytest.raises(PreconditionError):
            liouville_verdict(s, SEARCH)


class TestPolynomialLiouville:
    def test_biharmonic_degree_two(self):
        k = GeneralizedKappa(2, 2, {(4, 0): 24.0, (2, 2): 8.0, (0, 4): 24.0})
        v = polynomial_liouville_verdict(symbol_from_kappa(k), 2.0,
                                         SearchParams(box_radius=6.0))
        assert v.holds is True
        assert v.extra["degree_cap"] == 2

    def test_1d_exponent_cap_tightened(self):
        v = polynomial_liouville_verdict(
            symbol_from_triplet(brownian_triplet(1)), 2.0, SEARCH)
        assert v.holds is True
        assert v.extra["degree_cap"] == 1

    def test_lattice_fails_beta_zero(self):
        v = polynomial_liouville_verdict(closed_form_symbol("one-minus-exp"),
                                         0.0, SEARCH)
        assert v.holds is False
        assert abs(float(v.witness.gamma[0]) - TWO_PI) < 1e-4

    def test_moment_precondition_enforced(self):
        s = symbol_from_triplet(stable_like_triplet(1.5))
        with pytest.raises(PreconditionError, match="moment"):
            polynomial_liouville_verdict(s, 2.0, SEARCH)

    def test_agrees_with_liouville_when_moment_ok(self):
        for sym in (symbol_from_triplet(brownian_triplet(1)),
                    closed_form_symbol("one-minus-exp"),
                    closed_form_symbol("abs-power", alpha=1.5)):
            a = liouville_verdict(sym, SEARCH)
            b = polynomial_liouville_verdict(sym, 1.0, SEARCH)
            assert a.holds == b.holds


class TestStrongLiouville:
    def drift_diffusion(self):
        return drift_diffusion_triplet(np.array([1.0, 0.0]), np.eye(2))

    def test_brownian_any_weight(self):
        t = brownian_triplet(2)
        v = strong_liouville_verdict(t, exp_weight(1.0, dim=2),
                                     SearchParams(box_radius=6.0))
        assert v.holds is True

    def test_drift_diffusion_exponential_weight_fails(self):
        # tau = -2 b.c / c.Qc = -2; theta = (-2, 0) lies in the |eta| <= 2 ball
        t = self.drift_diffusion()
        v = strong_liouville_verdict(t, exp_weight(2.0, dim=2),
                                     SearchParams(box_radius=6.0))
        assert v.holds is False
        assert v.witness.kind == "real-exponential"
        theta = v.witness.theta
        assert np.linalg.norm(theta - np.array([-2.0, 0.0])) < 1e-6

    def test_drift_diffusion_polynomial_weight_holds(self):
        t = self.drift_diffusion()
        v = strong_liouville_verdict(t, poly_weight(3.0, dim=2),
                                     SearchParams(box_radius=6.0))
        assert v.holds is True

    def test_moment_precondition(self):
        t = stable_like_triplet(1.5, dim=1)
        with pytest.raises(PreconditionError, match="moment"):
            strong_liouville_verdict(t, exp_weight(1.0, dim=1), SEARCH)

    def test_1d_drift_diffusion(self):
        t = drift_diffusion_triplet(np.array([0.5]), np.array([[1.0]]))
        # tau = -2*0.5/1 = -1; weight alpha >= 1 catches theta = -1
        v = strong_liouville_verdict(t, exp_weight(1.0, dim=1),
                                     SearchParams(box_radius=6.0))
        assert v.holds is False
        assert abs(float(v.witness.theta[0]) + 1.0) < 1e-6


class TestCoupling:
    def test_brownian_declared(self):
        v = coupling_verdict(brownian_triplet(1), True, SEARCH)
        assert v.holds is True
        assert v.extra["condition_holds"]

    def test_pure_drift_fails_regardless(self):
        t = LevyTriplet(np.array([1.0]), np.zeros((1, 1)))
        for declared in (True, False):
            v = coupling_verdict(t, declared, SEARCH)
            assert v.holds is False

    def test_lattice_exponent_condition_fails(self):
        v = coupling_verdict(poisson_triplet(), False, SEARCH)
        assert v.holds is False
        assert not v.extra["condition_holds"]
        assert abs(float(v.witness.gamma[0]) - TWO_PI) < 1e-3

    def test_conditional_without_declaration(self):
        v = coupling_verdict(brownian_triplet(1), False, SEARCH)
        assert v.holds == "conditional"
        assert v.extra["condition_holds"]

    def test_re_zero_set_contains_zero_set(self):
        # coupling condition is stronger: zeros of psi are zeros of Re psi
        t = poisson_triplet()
        lv = liouville_verdict(symbol_from_triplet(t), SEARCH)
        cv = coupling_verdict(t, True, SEARCH)
        for p, _ in lv.report.zeros:
            d = min(np.linalg.norm(p - q) for q, _ in cv.report.zeros)
            assert d < SEARCH.step(1)


class TestCompositeJumpMeasures:
    def test_gaussian_plus_lattice_jumps_holds(self):
        nu = JumpMeasure([Atom(np.array([1.0]), 1.0)], [], 1)
        t = LevyTriplet(np.zeros(1), np.array([[1.0]]), nu)
        v = liouville_verdict(symbol_from_triplet(t), SEARCH)
        assert v.holds is True  # Gaussian part kills the lattice zeros

    def test_truncated_stable_holds(self):
        t = stable_like_triplet(1.5, c=1.0, eps=1e-3)
        v = liouville_verdict(symbol_from_triplet(t),
                              SearchParams(box_radius=6.0))
        assert v.holds is True
