"""Closed-form outage expressions: identities, reductions, limits, oracles.

Expected values that are not algebraically trivial come from independent
oracles: a Beta-function resummation of the order-statistics sum, a
single-expectation form of the multi-antenna AF outage, and light Monte
Carlo cross-checks (the full-budget calibration lives in the acceptance
suite).
"""

import math

import numpy as np
import pytest
import scipy.integrate
import scipy.special

from relaysec import LinkGains, McConfig, SchemeId, SystemParams, db_to_linear
from relaysec import analytic
from relaysec.analytic import UnsupportedAnalytic
from relaysec.model import Scheme, SelectionMode
from relaysec.montecarlo import estimate_sop


def dt_select_beta_oracle(gains, params):
    """Resummation of the best-antenna outage via the Beta function."""
    k = params.k_antennas
    two_r = 2.0 ** params.rate
    a = two_r * gains.gamma_ar / gains.gamma_ab
    expo = math.exp(-(two_r - 1.0) / (params.rho * gains.gamma_ab))
    return 1.0 - k * expo * scipy.special.beta(a + 1.0, k)


def af_multi_single_integral_oracle(gains, params):
    """Multi-antenna AF outage as one expectation over the beamforming fraction."""
    k = params.k_antennas
    rho = params.rho
    two2r = 2.0 ** (2.0 * params.rate)
    c = two2r - 1.0
    kappa = k * (gains.gamma_ar + 1.0 / rho)
    lognorm = -k * math.log(gains.gamma_rb) - math.lgamma(k)

    def integrand(s):
        v = s / (s + kappa)
        logpdf = lognorm + (k - 1) * math.log(s) - s / gains.gamma_rb
        return math.exp(logpdf) * (1.0 + (two2r - v) * gains.gamma_ar / gains.gamma_ab) ** (-k)

    ev = scipy.integrate.quad(
        lambda u: integrand(u / (1.0 - u)) / (1.0 - u) ** 2,
        0.0, 1.0, epsabs=1e-12, epsrel=1e-10, limit=200,
    )[0]
    return 1.0 - math.exp(-c / (rho * gains.gamma_ab)) * ev


def random_settings(n, seed, k_max=1):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        gains = LinkGains(*(db_to_linear(v) for v in rng.uniform(-10.0, 10.0, 3)))
        rho = db_to_linear(rng.uniform(0.0, 30.0))
        k = int(rng.integers(1, k_max + 1))
        yield gains, SystemParams(rho=rho, rate=0.1, k_antennas=k)


class TestPositiveSecrecyDirect:
    def test_symmetric_gains(self):
        assert analytic.p_pos_dt(LinkGains(1.0, 1.0, 1.0)) == pytest.approx(0.5)

    def test_three_to_one(self):
        assert analytic.p_pos_dt(LinkGains(3.0, 1.0, 1.0)) == pytest.approx(0.75)

    def test_strong_eavesdropper_kills_secrecy(self):
        assert analytic.p_pos_dt(LinkGains(1.0, 1e12, 1.0)) < 1e-11


class TestDirectTransmission:
    def test_zero_rate_complement(self):
        for gains, params in random_settings(20, seed=1):
            p0 = SystemParams(rho=params.rho, rate=0.0)
            assert analytic.sop_dt_single(gains, p0) == pytest.approx(
                1.0 - analytic.p_pos_dt(gains), abs=1e-9
            )

    def test_high_snr_limit(self, fig1_gains):
        params = SystemParams(rho=db_to_linear(80.0), rate=0.1)
        assert analytic.sop_dt_single(fig1_gains, params) == pytest.approx(
            analytic.limits(fig1_gains, params, "dt_high_snr"), abs=1e-6
        )

    def test_gain_monotonicity(self):
        base = LinkGains(1.0, 1.0, 1.0)
        params = SystemParams(rho=10.0, rate=0.1)
        up_ar = LinkGains(1.0, 2.0, 1.0)
        up_ab = LinkGains(2.0, 1.0, 1.0)
        v = analytic.sop_dt_single(base, params)
        assert analytic.sop_dt_single(up_ar, params) > v
        assert analytic.sop_dt_single(up_ab, params) < v


class TestAmplifyForwardSingle:
    def test_zero_rate_complement(self):
        for gains, params in random_settings(20, seed=2):
            p0 = SystemParams(rho=params.rho, rate=0.0)
            assert analytic.sop_af_single(gains, p0) == pytest.approx(
                1.0 - analytic.p_pos_af(gains, p0), abs=1e-9
            )

    def test_p_pos_perfect_relay_link(self):
        gains = LinkGains(1.0, 1.0, 1e9)
        assert analytic.p_pos_af(gains, SystemParams(rho=10.0)) == pytest.approx(1.0, abs=1e-6)

    def test_strong_second_hop_limit(self):
        gains = LinkGains(2.0, 1.0, 1e7)
        params = SystemParams(rho=db_to_linear(15.0), rate=0.1)
        assert analytic.sop_af_single(gains, params) == pytest.approx(
            analytic.limits(gains, params, "af_strong_second_hop"), abs=1e-5
        )


class TestCooperativeJammingSingle:
    def test_p_pos_high_snr(self):
        gains = LinkGains(1.0, 1.0, 2.0)
        assert analytic.p_pos_cj(gains, SystemParams(rho=1e12)) == pytest.approx(1.0, abs=1e-5)

    def test_p_pos_dead_second_hop(self):
        gains = LinkGains(1.0, 1.0, 1e-9)
        assert analytic.p_pos_cj(gains, SystemParams(rho=10.0)) < 1e-12

    def test_p_pos_monotone_in_second_hop(self):
        params = SystemParams(rho=10.0)
        vals = [
            analytic.p_pos_cj(LinkGains(1.0, 1.0, g), params) for g in (0.5, 2.0, 8.0)
        ]
        assert vals[0] < vals[1] < vals[2]

    def test_zero_rate_complement(self):
        for gains, params in random_settings(20, seed=3):
            p0 = SystemParams(rho=params.rho, rate=0.0)
            assert analytic.sop_cj_single(gains, p0) == pytest.approx(
                1.0 - analytic.p_pos_cj(gains, p0), abs=1e-9
            )

    def test_uncorrected_threshold_breaks_complement(self, fig1_gains):
        p0 = SystemParams(rho=db_to_linear(10.0), rate=0.0)
        wrong = analytic.sop_cj_single(fig1_gains, p0, paper_printed_t=True)
        assert abs(wrong - (1.0 - analytic.p_pos_cj(fig1_gains, p0))) > 0.01

    def test_dead_first_hop_outage(self):
        gains = LinkGains(1.0, 1e-9, 2.0)
        assert analytic.sop_cj_single(gains, SystemParams(rho=100.0, rate=0.1)) > 0.999


class TestMultiAntennaDirect:
    def test_single_antenna_reduction(self):
        for gains, params in random_settings(10, seed=4):
            assert analytic.sop_dt_multi(gains, params) == pytest.approx(
                analytic.sop_dt_single(gains, params), abs=1e-12
            )

    def test_large_array_saturates(self, fig6_gains):
        params = SystemParams(rho=db_to_linear(30.0), rate=0.1, k_antennas=100)
        assert analytic.sop_dt_multi(fig6_gains, params) > 1.0 - 1e-6

    def test_monotone_in_k(self, fig6_gains):
        vals = [
            analytic.sop_dt_multi(fig6_gains, SystemParams(rho=1000.0, rate=0.1, k_antennas=k))
            for k in range(1, 9)
        ]
        assert all(b > a for a, b in zip(vals, vals[1:]))


class TestMultiAntennaAmplifyForward:
    def test_single_antenna_reduction(self):
        for gains, params in random_settings(6, seed=5):
            assert analytic.sop_af_multi(gains, params) == pytest.approx(
                analytic.sop_af_single(gains, params), abs=1e-6
            )

    def test_grows_with_array_size(self, fig6_gains):
        params2 = SystemParams(rho=db_to_linear(30.0), rate=0.1, k_antennas=2)
        params16 = SystemParams(rho=db_to_linear(30.0), rate=0.1, k_antennas=16)
        assert analytic.sop_af_multi(fig6_gains, params16) >= analytic.sop_af_multi(
            fig6_gains, params2
        )

    def test_single_integral_oracle(self):
        rng = np.random.default_rng(6)
        for _ in range(8):
            gains = LinkGains(*(db_to_linear(v) for v in rng.uniform(-8.0, 8.0, 3)))
            params = SystemParams(
                rho=db_to_linear(rng.uniform(0.0, 30.0)),
                rate=float(rng.uniform(0.0, 1.0)),
                k_antennas=int(rng.integers(1, 9)),
            )
            assert analytic.sop_af_multi(gains, params) == pytest.approx(
                af_multi_single_integral_oracle(gains, params), abs=1e-9
            )


class TestSelectionDirect:
    def test_single_antenna_reduction(self):
        for gains, params in random_settings(10, seed=7):
            assert analytic.sop_dt_select(gains, params) == pytest.approx(
                analytic.sop_dt_single(gains, params), abs=1e-12
            )

    def test_beta_function_oracle(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            gains = LinkGains(*(db_to_linear(v) for v in rng.uniform(-10.0, 10.0, 3)))
            params = SystemParams(
                rho=db_to_linear(rng.uniform(0.0, 30.0)),
                rate=float(rng.uniform(0.0, 1.5)),
                k_antennas=int(rng.integers(1, 9)),
            )
            assert analytic.sop_dt_select(gains, params) == pytest.approx(
                dt_select_beta_oracle(gains, params), abs=1e-12
            )

    def test_nondecreasing_in_k(self, fig7_gains):
        vals = [
            analytic.sop_dt_select(fig7_gains, SystemParams(rho=100.0, rate=0.1, k_antennas=k))
            for k in (1, 2, 4, 8)
        ]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_extended_precision_path_continuous(self, fig7_gains):
        # The big-float branch starts above K=20; neighbours must line up.
        v20 = analytic.sop_dt_select(fig7_gains, SystemParams(rho=100.0, rate=0.1, k_antennas=20))
        v21 = analytic.sop_dt_select(fig7_gains, SystemParams(rho=100.0, rate=0.1, k_antennas=21))
        assert 0.0 <= v20 <= v21 <= 1.0
        assert v21 - v20 < 0.02


class TestSelectionAmplifyForward:
    def test_single_antenna_reductions(self):
        for gains, params in random_settings(10, seed=9):
            af1 = analytic.sop_af_single(gains, params)
            assert analytic.sop_af_select_csi(gains, params) == pytest.approx(af1, abs=1e-9)
            assert analytic.sop_af_select_nocsi(gains, params) == pytest.approx(af1, abs=1e-9)

    def test_missing_csi_never_helps(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            gains = LinkGains(*(db_to_linear(v) for v in rng.uniform(-8.0, 8.0, 3)))
            params = SystemParams(
                rho=db_to_linear(rng.uniform(0.0, 30.0)),
                rate=float(rng.uniform(0.0, 1.0)),
                k_antennas=int(rng.integers(2, 9)),
            )
            with_csi = analytic.sop_af_select_csi(gains, params)
            without = analytic.sop_af_select_nocsi(gains, params)
            assert without >= with_csi - 1e-9

    def test_extended_precision_path_against_montecarlo(self, fig6_gains):
        params = SystemParams(
            rho=db_to_linear(10.0), rate=0.1, k_antennas=24,
            scheme=SchemeId(Scheme.AF, SelectionMode.SELECT_CSI),
        )
        closed = analytic.sop_af_select_csi(fig6_gains, params)
        sim = estimate_sop(fig6_gains, params, McConfig(trials=150_000, seed=77))
        assert abs(closed - sim.value) < max(4.0 * sim.stderr, 0.005)


class TestSelectionCooperativeJamming:
    def test_single_antenna_reduction(self):
        for gains, params in random_settings(10, seed=11):
            assert analytic.sop_cj_select_nocsi(gains, params) == pytest.approx(
                analytic.sop_cj_single(gains, params), abs=1e-9
            )

    def test_large_k_floor(self, fig6_gains):
        params = SystemParams(rho=db_to_linear(30.0), rate=0.1, k_antennas=64)
        floor = analytic.limits(fig6_gains, params, "cj_select_nocsi_large_k")
        assert abs(analytic.sop_cj_select_nocsi(fig6_gains, params) - floor) < 0.01

    def test_nonincreasing_in_k(self, fig6_gains):
        vals = [
            analytic.sop_cj_select_nocsi(
                fig6_gains, SystemParams(rho=db_to_linear(30.0), rate=0.1, k_antennas=k)
            )
            for k in (1, 2, 4, 8, 16)
        ]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


class TestAntennaCountRefusal:
    def test_sums_refuse_beyond_64(self, fig7_gains):
        params = SystemParams(rho=100.0, rate=0.1, k_antennas=65)
        for fn in (
            analytic.sop_dt_select,
            analytic.sop_af_select_csi,
            analytic.sop_af_select_nocsi,
            analytic.sop_cj_select_nocsi,
        ):
            with pytest.raises(ValueError):
                fn(fig7_gains, params)


class TestLimits:
    def test_cj_high_snr_is_zero(self, fig1_gains):
        assert analytic.limits(fig1_gains, SystemParams(rho=1.0), "cj_high_snr") == 0.0

    def test_af_high_snr_matches_exact(self, fig1_gains):
        params = SystemParams(rho=db_to_linear(80.0), rate=0.1)
        lim = analytic.limits(fig1_gains, params, "af_high_snr")
        assert analytic.sop_af_single(fig1_gains, params) == pytest.approx(lim, abs=1e-5)

    def test_af_high_snr_printed_variant_differs(self, fig1_gains):
        params = SystemParams(rho=db_to_linear(50.0), rate=0.1)
        lim = analytic.limits(fig1_gains, params, "af_high_snr")
        printed = analytic.limits(fig1_gains, params, "af_high_snr_printed")
        assert abs(printed - lim) > 0.01  # the as-printed coefficient is inconsistent

    def test_strong_second_hop_bessel(self):
        gains_far = LinkGains(db_to_linear(5.0), 1.0, db_to_linear(40.0))
        params = SystemParams(rho=db_to_linear(15.0), rate=0.1)
        lim = analytic.limits(gains_far, params, "cj_strong_second_hop")
        assert abs(analytic.sop_cj_single(gains_far, params) - lim) < 0.01

    def test_weak_first_hop_ordering(self):
        gains = LinkGains(1.0, 1e-6, db_to_linear(5.0))
        for rate in (0.05, 0.1, 0.5, 1.0):
            params = SystemParams(rho=db_to_linear(20.0), rate=rate)
            dt = analytic.limits(gains, params, "dt_weak_first_hop")
            af = analytic.limits(gains, params, "af_weak_first_hop")
            assert dt <= af

    def test_degenerate_limits(self, fig1_gains):
        params = SystemParams(rho=10.0, rate=0.1)
        assert analytic.limits(fig1_gains, params, "cj_weak_second_hop") == 1.0
        assert analytic.limits(fig1_gains, params, "cj_weak_first_hop") == 1.0

    def test_unknown_selector(self, fig1_gains):
        with pytest.raises(ValueError):
            analytic.limits(fig1_gains, SystemParams(rho=1.0), "nonsense")

    def test_cj_multi_high_snr_needs_mc(self, fig6_gains):
        params = SystemParams(rho=1.0, rate=0.1, k_antennas=2)
        with pytest.raises(ValueError):
            analytic.limits(fig6_gains, params, "cj_multi_high_snr")
        with pytest.raises(ValueError):
            analytic.limits(fig6_gains, SystemParams(rho=1.0, k_antennas=2), "cj_high_snr")

    def test_cj_multi_high_snr_matches_exact_at_large_snr(self, fig6_gains):
        mc = McConfig(trials=150_000, seed=13)
        params = SystemParams(
            rho=db_to_linear(60.0), rate=0.1, k_antennas=2, scheme=SchemeId(Scheme.CJ)
        )
        const = analytic.limits(fig6_gains, params, "cj_multi_high_snr", mc=mc)
        exact = estimate_sop(fig6_gains, params, mc)
        assert abs(const - exact.value) < max(6.0 * exact.stderr, 0.005)


class TestDispatch:
    def test_analytic_dispatch_matches_direct_calls(self, fig7_gains):
        params = SystemParams(
            rho=db_to_linear(10.0), rate=0.1, k_antennas=4,
            scheme=SchemeId(Scheme.AF, SelectionMode.SELECT_CSI),
        )
        assert analytic.analytic_sop(fig7_gains, params) == pytest.approx(
            analytic.sop_af_select_csi(fig7_gains, params)
        )

    def test_montecarlo_only_variants_refuse(self, fig6_gains):
        for scheme in (
            SchemeId(Scheme.CJ, SelectionMode.FULL_ARRAY),
            SchemeId(Scheme.CJ, SelectionMode.SELECT_CSI),
        ):
            params = SystemParams(rho=10.0, rate=0.1, k_antennas=4, scheme=scheme)
            with pytest.raises(UnsupportedAnalytic):
                analytic.analytic_sop(fig6_gains, params)
