"""Special-function and quadrature contracts.

Reference values are frozen from the independent oracles defined at the
top of this module (plain quadrature of the defining integrals, finite
sums), which the tests also re-run so drift in either side is caught.
"""

import math

import mpmath
import numpy as np
import pytest
import scipy.integrate

from relaysec.specfun import (
    ConvergenceError,
    QuadratureSpec,
    bessel_k1,
    chi2_2k_cdf_complement,
    exp_integral_ei,
    exp_scaled_e1,
    integrate_semi_infinite,
)


def ei_oracle(x: float) -> float:
    """Ei(x) for x < 0 by quadrature of the defining integral.

    Ei(-y) = -int_1^inf e^(-y*u)/u du, mapped to (0, 1).
    """
    y = -x

    def f(u):
        w = 1.0 - u
        s = 1.0 + u / w
        return math.exp(-y * s) / s / (w * w)

    val = scipy.integrate.quad(f, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    return -val


def k1_oracle(x: float) -> float:
    """K1(x) by quadrature of int_0^inf e^(-x*cosh u) * cosh u du."""

    def f(u):
        return math.exp(-x * math.cosh(u)) * math.cosh(u)

    return scipy.integrate.quad(f, 0.0, 60.0, epsabs=1e-14, epsrel=1e-13, limit=200)[0]


EI_MINUS_ONE = -0.21938393439552027  # ei_oracle(-1.0)
K1_ONE = 0.6019072301972346          # k1_oracle(1.0)


class TestExponentialIntegral:
    def test_reference_value(self):
        assert ei_oracle(-1.0) == pytest.approx(EI_MINUS_ONE, abs=1e-12)
        assert exp_integral_ei(-1.0) == pytest.approx(EI_MINUS_ONE, rel=1e-10)
        assert f"{exp_integral_ei(-1.0):.6f}" == "-0.219384"

    def test_oracle_agreement_on_grid(self):
        for x in (-0.01, -0.3, -2.0, -7.5, -30.0):
            assert exp_integral_ei(x) == pytest.approx(ei_oracle(x), rel=1e-10)

    def test_log_divergence_near_zero(self):
        # Ei(x) ~ euler_gamma + ln|x| for small |x|.
        assert exp_integral_ei(-1e-8) < -17.0

    def test_x_ei_vanishes_at_zero(self):
        assert abs(1e-9 * exp_integral_ei(-1e-9)) < 1e-7

    def test_domain_error(self):
        with pytest.raises(ValueError):
            exp_integral_ei(0.0)
        with pytest.raises(ValueError):
            exp_integral_ei(1.0)

    def test_negative_and_decreasing(self):
        # The derivative e^x / x is negative on x < 0, so Ei falls from
        # 0- toward -inf as x approaches zero from below.
        xs = np.linspace(-20.0, -1e-3, 400)
        vals = [exp_integral_ei(x) for x in xs]
        assert all(v < 0 for v in vals)
        assert all(b < a for a, b in zip(vals, vals[1:]))


class TestExpScaledE1:
    def test_matches_mpmath(self):
        for y in (1e-3, 0.1, 1.0, 10.0, 499.0, 501.0, 700.0, 1e4, 1e6):
            with mpmath.workdps(30):
                ref = float(mpmath.exp(y) * mpmath.e1(y))
            assert exp_scaled_e1(y) == pytest.approx(ref, rel=1e-12)

    def test_consistent_with_ei(self):
        y = 2.5
        assert exp_scaled_e1(y) == pytest.approx(-math.exp(y) * exp_integral_ei(-y), rel=1e-12)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            exp_scaled_e1(0.0)


class TestBesselK1:
    def test_reference_value(self):
        assert k1_oracle(1.0) == pytest.approx(K1_ONE, abs=1e-12)
        assert bessel_k1(1.0) == pytest.approx(K1_ONE, rel=1e-10)

    def test_small_argument_limit(self):
        # x*K1(x) -> 1 as x -> 0+
        assert abs(0.001 * bessel_k1(0.001) - 1.0) < 1e-5

    def test_monotone_decrease(self):
        assert bessel_k1(10.0) < bessel_k1(1.0)

    def test_x_k1_bounded_and_decreasing(self):
        xs = np.linspace(0.01, 20.0, 200)
        vals = [x * bessel_k1(x) for x in xs]
        assert all(0.0 < v <= 1.0 for v in vals)
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_domain_error(self):
        with pytest.raises(ValueError):
            bessel_k1(0.0)
        with pytest.raises(ValueError):
            bessel_k1(-1.0)


class TestErlangSurvival:
    def test_at_zero(self):
        for k in (1, 2, 5, 17):
            assert chi2_2k_cdf_complement(0.0, k) == 1.0

    def test_tail_vanishes(self):
        assert chi2_2k_cdf_complement(1e4, 3) < 1e-12

    def test_small_case(self):
        assert chi2_2k_cdf_complement(2.0, 2) == pytest.approx(3.0 * math.exp(-2.0), rel=1e-12)

    def test_matches_finite_sum(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            v = float(rng.uniform(0.0, 30.0))
            k = int(rng.integers(1, 12))
            direct = math.fsum(v**n * math.exp(-v) / math.factorial(n) for n in range(k))
            assert chi2_2k_cdf_complement(v, k) == pytest.approx(direct, rel=1e-12, abs=1e-300)

    def test_monotonicity(self):
        vs = np.linspace(0.0, 12.0, 40)
        for k in (1, 3, 8):
            vals = [chi2_2k_cdf_complement(v, k) for v in vs]
            assert all(0.0 <= x <= 1.0 for x in vals)
            assert all(b <= a for a, b in zip(vals, vals[1:]))
        for v in (0.5, 4.0):
            by_k = [chi2_2k_cdf_complement(v, k) for k in range(1, 10)]
            assert all(b >= a for a, b in zip(by_k, by_k[1:]))

    def test_validation(self):
        with pytest.raises(ValueError):
            chi2_2k_cdf_complement(-1.0, 2)
        with pytest.raises(ValueError):
            chi2_2k_cdf_complement(1.0, 0)


class TestSemiInfiniteQuadrature:
    def test_unit_exponential(self):
        assert integrate_semi_infinite(lambda z: math.exp(-z), 0.0) == pytest.approx(1.0, abs=1e-10)

    def test_gamma_two(self):
        assert integrate_semi_infinite(lambda z: z * math.exp(-z), 0.0) == pytest.approx(1.0, abs=1e-10)

    def test_shifted_exponential_family(self):
        # Closed-form antiderivative on randomized (scale, lower) pairs.
        rng = np.random.default_rng(11)
        spec = QuadratureSpec()
        for _ in range(100):
            gamma = float(10.0 ** rng.uniform(-2.0, 4.0))
            lower = float(rng.uniform(0.0, 5.0 * gamma))
            got = integrate_semi_infinite(lambda z: math.exp(-z / gamma), lower, spec)
            expected = gamma * math.exp(-lower / gamma)
            assert got == pytest.approx(expected, rel=spec.rel_tol * 50)

    def test_focus_points_pass_through(self):
        got = integrate_semi_infinite(lambda z: math.exp(-z), 0.0, focus=[0.3, 2.0, math.inf])
        assert got == pytest.approx(1.0, abs=1e-10)

    def test_convergence_error(self):
        spec = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-12, max_subdivisions=1)
        with pytest.raises(ConvergenceError):
            integrate_semi_infinite(lambda z: math.exp(-z / 1000.0) * math.sin(z) ** 2, 0.0, spec)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            QuadratureSpec(abs_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureSpec(rel_tol=-1.0)
        with pytest.raises(ValueError):
            QuadratureSpec(max_subdivisions=0)
