"""Kernel measure algebra: symbols, masses, moments, bounds, scaling."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from nlwave.errors import MassNotOne, NegativeSymbol, NonpositiveEpsilon, PositivityViolation
from nlwave.kernels import (
    ContinuousDensity,
    DiracAtom,
    KernelMeasure,
    deviation_constant,
    dirac,
    dispersion,
    exponential_density,
    gaussian_density,
    perturb_identity,
    scale_kernel,
    second_moment,
    symbol,
    symbol_deviation,
    three_point_measure,
    total_mass,
    triangular_density,
    verify_bounds,
)


def delta_plus_exponential():
    return KernelMeasure(atoms=(DiracAtom(0.0, 1.0),), densities=(exponential_density(),))


class TestSymbol:
    def test_three_point_at_zero(self):
        assert symbol(three_point_measure(), 0.0) == pytest.approx(1.0, abs=1e-15)

    def test_three_point_at_pi(self):
        # (3 + 2 cos pi)/5 = 1/5
        assert symbol(three_point_measure(), np.pi) == pytest.approx(0.2, abs=1e-14)

    def test_identity_kernel_everywhere(self):
        xi = np.linspace(-30.0, 30.0, 101)
        assert np.all(symbol(dirac(), xi) == 1.0)

    def test_delta_plus_exponential_at_zero(self):
        assert symbol(delta_plus_exponential(), 0.0) == pytest.approx(2.0, abs=1e-15)

    def test_delta_plus_exponential_closed_form(self):
        # symbol is (2 + xi^2)/(1 + xi^2)
        k = delta_plus_exponential()
        xi = np.linspace(0.0, 10.0, 100)
        diff = symbol(k, xi) - (2.0 + xi**2) / (1.0 + xi**2)
        assert np.max(np.abs(diff)) <= 1e-14

    def test_evenness_exact(self):
        k = KernelMeasure(
            atoms=(DiracAtom(0.7, 0.3),),
            densities=(triangular_density(1.3, 0.4), gaussian_density(0.9, 0.3)),
        )
        xi = np.linspace(0.1, 20.0, 57)
        assert np.array_equal(symbol(k, xi), symbol(k, -xi))

    def test_scalar_and_array_agree(self):
        k = three_point_measure()
        assert symbol(k, 1.7) == symbol(k, np.array([1.7]))[0]


class TestDensitySymbolsAgainstQuadrature:
    """Closed-form symbols cross-checked against direct oscillatory
    quadrature of the densities at sampled frequencies."""

    XIS = np.linspace(0.3, 12.0, 20)

    @staticmethod
    def _quad_symbol(f, upper, xi):
        val, _ = quad(f, 0.0, upper, weight="cos", wvar=xi, epsabs=1e-13, epsrel=1e-13)
        return 2.0 * val

    def test_exponential(self):
        d = exponential_density(scale=1.0)
        for xi in self.XIS:
            ref = self._quad_symbol(lambda x: 0.5 * np.exp(-x), 80.0, xi)
            assert d.shape_symbol(xi) == pytest.approx(ref, rel=1e-8)

    def test_exponential_rescaled(self):
        d = exponential_density(scale=1.7)
        for xi in self.XIS:
            ref = self._quad_symbol(lambda x: np.exp(-x / 1.7) / (2 * 1.7), 140.0, xi)
            assert d.shape_symbol(xi) == pytest.approx(ref, rel=1e-8)

    def test_triangular(self):
        h = 1.4
        d = triangular_density(h)
        for xi in self.XIS:
            ref = self._quad_symbol(lambda x: (1.0 - x / h) / h, h, xi)
            assert d.shape_symbol(xi) == pytest.approx(ref, rel=1e-8, abs=1e-12)

    def test_gaussian(self):
        sig = 0.8
        d = gaussian_density(sig)
        dens = lambda x: np.exp(-0.5 * (x / sig) ** 2) / (sig * np.sqrt(2 * np.pi))
        for xi in self.XIS:
            ref = self._quad_symbol(dens, 30.0 * sig, xi)
            assert d.shape_symbol(xi) == pytest.approx(ref, rel=1e-8)


class TestMassAndMoment:
    def test_dirac_mass(self):
        assert total_mass(dirac()) == 1.0

    def test_three_point_mass(self):
        assert total_mass(three_point_measure()) == pytest.approx(1.0, abs=1e-15)

    def test_mixture_mass(self):
        k = KernelMeasure(
            atoms=(DiracAtom(0.0, 1.0),), densities=(exponential_density(weight=0.1),)
        )
        assert total_mass(k) == pytest.approx(1.1, abs=1e-15)

    def test_dirac_second_moment(self):
        assert second_moment(dirac()) == 0.0

    def test_three_point_second_moment(self):
        # direct sum: 0.2 * 1 + 0.6 * 0 + 0.2 * 1
        assert second_moment(three_point_measure()) == pytest.approx(0.4, abs=1e-15)

    def test_triangular_second_moment_closed_form(self):
        # 2/h * int_0^h x^2 (1 - x/h) dx = h^2/6
        h = 1.0
        assert second_moment(KernelMeasure(densities=(triangular_density(h),))) == pytest.approx(
            1.0 / 6.0, abs=1e-15
        )

    def test_second_moments_against_quadrature(self):
        for d, dens, upper in [
            (exponential_density(scale=1.3), lambda x: np.exp(-x / 1.3) / 2.6, 120.0),
            (triangular_density(2.1), lambda x: (1 - x / 2.1) / 2.1, 2.1),
            (
                gaussian_density(0.7),
                lambda x: np.exp(-0.5 * (x / 0.7) ** 2) / (0.7 * np.sqrt(2 * np.pi)),
                25.0,
            ),
        ]:
            ref, _ = quad(lambda x: 2.0 * x * x * dens(x), 0.0, upper, epsabs=1e-13)
            assert d.shape_second_moment() == pytest.approx(ref, rel=1e-10)


class TestVerifyBounds:
    def test_three_point_bounds(self):
        b = verify_bounds(three_point_measure(), xi_max=10.0, n_samples=1000)
        assert 0.2 <= b.c1 <= 0.2 + 1e-4
        assert b.c2 == pytest.approx(1.0, abs=1e-15)
        assert b.xi_max == 10.0 and b.n_samples == 1000

    def test_dirac_degenerate(self):
        b = verify_bounds(dirac(), xi_max=5.0, n_samples=100)
        assert b.c1 == b.c2 == 1.0

    def test_sign_changing_symbol_rejected(self):
        bad = KernelMeasure(
            atoms=(DiracAtom(0.0, 1.0),), densities=(exponential_density(weight=-2.0),)
        )
        with pytest.raises(PositivityViolation):
            verify_bounds(bad, xi_max=5.0, n_samples=200)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            verify_bounds(dirac(), xi_max=-1.0, n_samples=10)
        with pytest.raises(ValueError):
            verify_bounds(dirac(), xi_max=1.0, n_samples=1)


class TestScaleKernel:
    def test_unit_scale_is_identity(self):
        k = three_point_measure()
        xi = np.linspace(0.0, 20.0, 41)
        assert np.array_equal(symbol(scale_kernel(k, 1.0), xi), symbol(k, xi))

    def test_three_point_scaled_symbol(self):
        # shifts become 0.5, so at xi = 2 pi the symbol is (3 + 2 cos pi)/5
        k = scale_kernel(three_point_measure(), 0.25)
        assert k.atoms[1].shift == pytest.approx(0.5)
        assert symbol(k, 2.0 * np.pi) == pytest.approx(0.2, abs=1e-14)

    def test_dirac_is_fixed_point(self):
        k = scale_kernel(dirac(), 0.01)
        xi = np.linspace(0.0, 50.0, 23)
        assert np.all(symbol(k, xi) == 1.0)

    def test_mass_preserved(self):
        k = KernelMeasure(
            atoms=(DiracAtom(1.0, 0.25),),
            densities=(gaussian_density(2.0, 0.75),),
        )
        assert total_mass(scale_kernel(k, 0.3)) == pytest.approx(total_mass(k), abs=1e-15)

    def test_nonpositive_eps_rejected(self):
        with pytest.raises(NonpositiveEpsilon):
            scale_kernel(dirac(), 0.0)
        with pytest.raises(NonpositiveEpsilon):
            scale_kernel(dirac(), -0.5)


class TestPerturbIdentity:
    def test_zero_eps_is_identity(self):
        k = perturb_identity(exponential_density(), 0.0)
        xi = np.linspace(0.0, 30.0, 31)
        assert np.all(symbol(k, xi) == 1.0)

    def test_exponential_unit_eps(self):
        k = perturb_identity(exponential_density(), 1.0)
        xi = np.linspace(0.0, 10.0, 50)
        assert np.allclose(symbol(k, xi), 1.0 + 1.0 / (1.0 + xi**2), atol=1e-15)

    def test_triangular_at_zero(self):
        k = perturb_identity(triangular_density(1.0), 0.5)
        assert symbol(k, 0.0) == pytest.approx(1.5, abs=1e-15)

    def test_negative_eps_rejected(self):
        with pytest.raises(ValueError):
            perturb_identity(exponential_density(), -0.1)


class TestDispersion:
    def test_identity_kernel(self):
        assert dispersion(dirac(), 3.0) == pytest.approx(9.0, abs=1e-14)

    def test_three_point_at_pi(self):
        assert dispersion(three_point_measure(), np.pi) == pytest.approx(
            np.pi**2 / 5.0, abs=1e-13
        )

    def test_delta_plus_exponential(self):
        assert dispersion(delta_plus_exponential(), 1.0) == pytest.approx(1.5, abs=1e-14)

    def test_negative_symbol_rejected(self):
        bad = KernelMeasure(
            atoms=(DiracAtom(0.0, 1.0),), densities=(exponential_density(weight=-2.0),)
        )
        with pytest.raises(NegativeSymbol):
            dispersion(bad, 0.0)


class TestDeviationConstant:
    def test_identity_kernel_zero(self):
        assert deviation_constant(dirac(), 10.0, 500) == 0.0

    def test_three_point_limit(self):
        # |symbol''(0)|/2 = (2/5)/2 = 1/5, attained in the xi -> 0 limit
        c = deviation_constant(three_point_measure(), 50.0, 2000)
        assert 0.0 < c <= 0.2 + 1e-12
        assert c == pytest.approx(0.2, abs=1e-9)

    def test_gaussian_limit(self):
        c = deviation_constant(KernelMeasure(densities=(gaussian_density(1.0),)), 5.0, 500)
        assert c == pytest.approx(0.5, abs=1e-9)

    def test_mass_not_one_rejected(self):
        with pytest.raises(MassNotOne):
            deviation_constant(delta_plus_exponential(), 10.0, 100)


class TestStableDeviation:
    def test_matches_symbol_minus_mass(self):
        k = KernelMeasure(
            atoms=(DiracAtom(0.3, 0.5),),
            densities=(triangular_density(0.8, 0.2), exponential_density(0.3, 1.1)),
        )
        xi = np.linspace(0.05, 20.0, 200)
        direct = symbol(k, xi) - total_mass(k)
        assert np.allclose(symbol_deviation(k, xi), direct, atol=1e-12)

    def test_accurate_at_tiny_frequencies(self):
        # near 0 the direct difference cancels catastrophically; the stable
        # path must match the quadratic Taylor term -m2/2 * xi^2
        k = three_point_measure()
        xi = np.array([1e-8, 1e-6, 1e-4])
        expected = -0.5 * second_moment(k) * xi**2
        assert np.allclose(symbol_deviation(k, xi), expected, rtol=1e-6)


@settings(max_examples=150, deadline=None)
@given(
    shift=st.floats(0.0, 5.0),
    weight=st.floats(0.01, 3.0),
    xi=st.floats(-50.0, 50.0),
)
def test_atom_symbol_even_property(shift, weight, xi):
    k = KernelMeasure(atoms=(DiracAtom(shift, weight),))
    assert symbol(k, xi) == symbol(k, -xi)


@settings(max_examples=100, deadline=None)
@given(
    weight=st.floats(0.05, 2.0),
    param=st.floats(0.1, 4.0),
    kind=st.sampled_from(["exponential", "triangular", "gaussian"]),
)
def test_mass_equals_symbol_at_zero_property(weight, param, kind):
    k = KernelMeasure(
        atoms=(DiracAtom(1.2, 0.4),), densities=(ContinuousDensity(kind, param, weight),)
    )
    assert symbol(k, 0.0) == pytest.approx(total_mass(k), rel=1e-14)


@settings(max_examples=100, deadline=None)
@given(
    eps=st.floats(1e-4, 10.0),
    xi=st.floats(-30.0, 30.0),
    shift=st.floats(0.0, 3.0),
)
def test_scaling_identity_property(eps, xi, shift):
    k = KernelMeasure(
        atoms=(DiracAtom(shift, 0.5),), densities=(gaussian_density(1.0, 0.5),)
    )
    lhs = symbol(scale_kernel(k, eps), xi)
    rhs = symbol(k, np.sqrt(eps) * xi)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(eps=st.floats(1e-3, 1.0))
def test_deviation_bound_property(eps):
    # |symbol(scaled, xi) - 1| <= deviation_constant * eps * xi^2 on samples
    k = three_point_measure()
    c = deviation_constant(k, 60.0, 4000)
    xi = np.linspace(0.05, 60.0, 300)
    lhs = np.abs(symbol_deviation(scale_kernel(k, eps), xi))
    assert np.all(lhs <= c * eps * xi**2 + 1e-12)
