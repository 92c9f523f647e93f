import numpy as np
import pytest

from levyliouville.fields import (AliasingWarning, GridField, MarginError,
                                  apply_multiplier, export_field_binary,
                                  export_field_csv, grid_axes,
                                  load_field_binary, make_witness, mollifier,
                                  truncated_gaussian, verify_harmonicity,
                                  weak_residual)
from levyliouville.levy import (brownian_triplet, closed_form_symbol,
                                symbol_from_triplet)
from levyliouville.verdicts import WitnessSpec

TWO_PI = 2.0 * np.pi
HALF_LAPLACE = symbol_from_triplet(brownian_triplet(1))


def constant_field(value=1.0, n=256, box=8.0, dim=1):
    return GridField(dim, n, box, np.full((n,) * dim, value, dtype=complex),
                     tag="real")


def cosine_field(freq=TWO_PI, n=1024, box=8.0):
    x = grid_axes(n, box)
    return GridField(1, n, box, np.cos(freq * x) + 0j, tag="real")


class TestApplyMultiplier:
    def test_eigenfunction(self):
        f = make_witness(WitnessSpec("complex-exponential",
                                     gamma=np.array([1.0])),
                         n_points=256, box=12.0)
        assert f.box == pytest.approx(4 * np.pi)
        out = apply_multiplier(HALF_LAPLACE, f)
        np.testing.assert_allclose(out.samples, 0.5 * f.samples, atol=1e-10)

    def test_constant_killed_by_vanishing_symbol(self):
        f = constant_field()
        out = apply_multiplier(closed_form_symbol("one-minus-exp"), f)
        assert np.max(np.abs(out.samples)) < 1e-12

    def test_cosine_killed_by_lattice_symbol(self):
        f = cosine_field()
        out = apply_multiplier(closed_form_symbol("one-minus-exp"), f)
        assert np.max(np.abs(out.samples)) < 1e-8

    def test_linearity(self):
        rng = np.random.default_rng(5)
        n, box = 256, 8.0
        x = grid_axes(n, box)
        f = GridField(1, n, box, np.exp(1j * np.pi / box * 4 * x))
        g = GridField(1, n, box, np.cos(np.pi / box * 8 * x) + 0j)
        m = closed_form_symbol("abs-power", alpha=1.5)
        a, b = rng.normal(size=2)
        combo = GridField(1, n, box, a * f.samples + b * g.samples)
        lhs = apply_multiplier(m, combo).samples
        rhs = (a * apply_multiplier(m, f).samples
               + b * apply_multiplier(m, g).samples)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_constant_maps_to_symbol_at_zero(self):
        f = constant_field(3.0)
        m = closed_form_symbol("one-plus-square")
        out = apply_multiplier(m, f)
        np.testing.assert_allclose(out.samples, 3.0 + 0j, atol=1e-12)

    def test_real_field_round_trip_stays_real(self):
        f = cosine_field()
        back = np.fft.ifft(np.fft.fft(f.samples))
        assert np.max(np.abs(back.imag)) < 1e-12
        out = apply_multiplier(HALF_LAPLACE, f)
        scale = np.max(np.abs(out.samples))
        assert np.max(np.abs(out.samples.imag)) < 1e-12 * max(1.0, scale)

    def test_aliasing_warning(self):
        n, box = 64, 8.0
        x = grid_axes(n, box)
        near_nyquist = np.pi / box * (n // 2 - 1)
        f = GridField(1, n, box, np.exp(1j * near_nyquist * x))
        with pytest.warns(AliasingWarning):
            apply_multiplier(HALF_LAPLACE, f)

    def test_adjoint_identity(self):
        rng = np.random.default_rng(42)
        n, box = 256, 8.0
        x = grid_axes(n, box)
        zoo = [HALF_LAPLACE,
               closed_form_symbol("one-minus-exp"),
               closed_form_symbol("abs-power", alpha=1.2),
               closed_form_symbol("drift", b=[0.7]),
               closed_form_symbol("one-plus-square")]
        for m in zoo:
            k1, k2 = rng.integers(1, 20, size=2)
            f = GridField(1, n, box, np.exp(1j * np.pi / box * k1 * x))
            g = GridField(1, n, box, np.cos(np.pi / box * k2 * x) + 0j)
            mt = apply_multiplier(m, g, reflect=True)
            lhs = apply_multiplier(m, f).integral(g.samples)
            rhs = f.integral(mt.samples)
            assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-10)


class TestWeakResidual:
    def test_constant_annihilated(self):
        f = constant_field()
        phi = mollifier(scale=1.5)
        r = weak_residual(f, closed_form_symbol("one-minus-exp"), phi)
        assert abs(r) < 1e-9

    def test_bounded_lattice_witness(self):
        f = cosine_field()
        phi = mollifier(scale=1.5)
        r = weak_residual(f, closed_form_symbol("one-minus-exp"), phi)
        phi_l1 = float(np.sum(np.abs(phi.sample(f.points()))) * f.spacing)
        assert abs(r) < 1e-6 * phi_l1

    def test_quadratic_against_half_laplacian(self):
        spec = WitnessSpec("polynomial", coefficients=(0.0, 0.0, 1.0))
        f = make_witness(spec, n_points=1024, box=8.0)
        phi = mollifier(scale=1.5)
        r = weak_residual(f, HALF_LAPLACE, phi)
        phi_int = float(np.sum(phi.sample(f.points())) * f.spacing)
        assert r.real == pytest.approx(-phi_int, abs=1e-6)
        assert abs(r.imag) < 1e-9

    def test_margin_enforced(self):
        f = constant_field(box=4.0)
        phi = mollifier(center=2.0, scale=1.5)
        with pytest.raises(MarginError):
            weak_residual(f, HALF_LAPLACE, phi)

    def test_non_periodic_needs_wide_margin(self):
        spec = WitnessSpec("real-exponential", theta=np.array([0.5]))
        f = make_witness(spec, n_points=1024, box=8.0)
        assert not f.periodic
        with pytest.raises(MarginError):
            weak_residual(f, HALF_LAPLACE, mollifier(scale=5.0))
        weak_residual(f, HALF_LAPLACE, mollifier(scale=2.0))  # fits L/2


class TestMakeWitness:
    def test_complex_exponential_unit_box(self):
        f = make_witness(WitnessSpec("complex-exponential",
                                     gamma=np.array([TWO_PI])),
                         n_points=256, box=1.0)
        assert f.box == pytest.approx(1.0)
        x = f.axes()
        np.testing.assert_allclose(f.samples, np.exp(1j * TWO_PI * x),
                                   atol=1e-12)

    def test_polynomial_square(self):
        f = make_witness(WitnessSpec("polynomial",
                                     coefficients=(0.0, 0.0, 1.0)),
                         n_points=256, box=4.0)
        np.testing.assert_allclose(f.samples.real, f.axes() ** 2, atol=1e-12)
        assert not f.periodic

    def test_cosine_average(self):
        f = make_witness(WitnessSpec("cosine-average",
                                     gamma=np.array([TWO_PI])),
                         n_points=256, box=1.0)
        x = f.axes()
        np.testing.assert_allclose(f.samples.real,
                                   0.5 * (1 + np.cos(TWO_PI * x)), atol=1e-12)
        assert f.tag == "real"

    def test_box_adjustment_reported(self):
        f = make_witness(WitnessSpec("complex-exponential",
                                     gamma=np.array([1.0])),
                         n_points=256, box=10.0)
        assert "box_adjusted_from" in f.meta
        k = f.meta["box_adjusted_from"]
        assert k == 10.0
        assert f.box == pytest.approx(3 * np.pi)

    def test_2d_radial_square(self):
        spec = WitnessSpec("polynomial",
                           coefficients={(2, 0): 1.0, (0, 2): 1.0})
        f = make_witness(spec, dim=2, n_points=64, box=4.0)
        pts = f.points()
        np.testing.assert_allclose(
            f.samples.real, pts[..., 0] ** 2 + pts[..., 1] ** 2, atol=1e-12)


class TestVerifyHarmonicity:
    def test_biharmonic_square(self):
        k2 = closed_form_symbol("abs-power", alpha=4.0, dim=2)
        spec = WitnessSpec("polynomial",
                           coefficients={(2, 0): 1.0, (0, 2): 1.0})
        phis = [mollifier(dim=2, scale=1.5),
                truncated_gaussian(dim=2, sigma=0.4, radius=1.8)]
        rep = verify_harmonicity(spec, k2, phis, threshold=1e-6,
                                 n_points=256, box=4.0)
        assert rep.passed

    def test_linear_function_harmonic(self):
        spec = WitnessSpec("polynomial", coefficients=(0.0, 1.0))
        rep = verify_harmonicity(spec, HALF_LAPLACE,
                                 [mollifier(scale=1.5)], threshold=1e-6,
                                 n_points=1024, box=8.0)
        assert rep.passed

    def test_inhomogeneous_mode(self):
        spec = WitnessSpec("polynomial", coefficients=(0.0, 0.0, 1.0))
        rep = verify_harmonicity(spec, HALF_LAPLACE,
                                 [mollifier(scale=1.5),
                                  mollifier(center=1.0, scale=1.2)],
                                 rhs_polynomial=(-1.0,), threshold=1e-6,
                                 n_points=1024, box=8.0)
        assert rep.passed

    def test_failing_witness_detected(self):
        # x^2 is NOT harmonic for the half-Laplacian without the rhs
        spec = WitnessSpec("polynomial", coefficients=(0.0, 0.0, 1.0))
        rep = verify_harmonicity(spec, HALF_LAPLACE,
                                 [mollifier(scale=1.5)], threshold=1e-6,
                                 n_points=1024, box=8.0)
        assert not rep.passed

    def test_truncation_bound_reported(self):
        spec = WitnessSpec("real-exponential", theta=np.array([-0.5]))
        rep = verify_harmonicity(
            spec, symbol_from_triplet(
                brownian_triplet(1)),
            [mollifier(scale=2.0)], threshold=1.0, n_points=1024, box=8.0)
        assert "truncation_bound" in rep.rows[0]


class TestExport:
    def test_csv_and_binary_round_trip(self, tmp_path):
        f = cosine_field(n=64 * 2, box=2.0)
        p1 = tmp_path / "field.csv"
        export_field_csv(f, p1)
        lines = p1.read_text().splitlines()
        assert lines[0].startswith("#")
        assert len(lines) == 1 + f.n_points

        p2 = tmp_path / "field.bin"
        export_field_binary(f, p2)
        g = load_field_binary(p2)
        assert g.dim == f.dim and g.box == f.box
        np.testing.assert_array_equal(g.samples, f.samples)

    def test_bit_exact_across_runs(self, tmp_path):
        f = cosine_field(n=128, box=2.0)
        pa, pb = tmp_path / "a.bin", tmp_path / "b.bin"
        export_field_binary(f, pa)
        export_field_binary(f, pb)
        assert pa.read_bytes() == pb.read_bytes()
        ca, cb = tmp_path / "a.csv", tmp_path / "b.csv"
        export_field_csv(f, ca)
        export_field_csv(f, cb)
        assert ca.read_bytes() == cb.read_bytes()

    def test_power_of_two_validation(self):
        with pytest.raises(ValueError, match="power of two"):
            GridField(1, 100, 4.0, np.zeros(100, dtype=complex))
