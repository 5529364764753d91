"""Closed-form secrecy outage probabilities and their asymptotic limits.

Each transmission policy (direct, amplify-and-forward, cooperative jamming)
has an exact outage expression for the single-antenna relay; the
multi-antenna beamforming and antenna-selection variants generalize them
where a closed form exists.  Two variants are Monte Carlo only by design:
cooperative jamming with a full beamforming array (K > 1) and cooperative
jamming with CSI-aided antenna selection.

Alternating binomial sums from the order-statistics densities are
accumulated in float64 (exact summation) up to K = 20 and in 40-digit
arithmetic up to K = 64; beyond that the cancellation exceeds what either
route can absorb and the functions refuse.
"""

from __future__ import annotations

import math
from typing import Callable

import mpmath
import numpy as np
import scipy.special

from . import specfun
from .model import (
    LinkGains,
    Scheme,
    SelectionMode,
    SystemParams,
    derived_coefficients,
    threshold_t,
)


class UnsupportedAnalytic(ValueError):
    """Requested a closed form for a variant that is Monte Carlo only."""


_MAX_K_EXACT = 20      # float64 alternating sums are safe up to here
_MAX_K_EXTENDED = 64   # beyond this even 40-digit accumulation is refused
_MP_DPS = 40

_LIMIT_SELECTORS = (
    "dt_high_snr",
    "af_high_snr",
    "af_high_snr_printed",
    "cj_high_snr",
    "af_strong_second_hop",
    "cj_strong_second_hop",
    "af_weak_second_hop",
    "cj_weak_second_hop",
    "dt_weak_first_hop",
    "af_weak_first_hop",
    "cj_weak_first_hop",
    "cj_multi_high_snr",
    "cj_select_nocsi_large_k",
)


def _check_k(k: int) -> None:
    if k > _MAX_K_EXTENDED:
        raise ValueError(
            f"antenna counts above {_MAX_K_EXTENDED} make the alternating "
            f"binomial sums numerically meaningless; got K={k}"
        )


def _ei_bracket(mu: float, beta: float, m_plus_1: int = 1) -> float:
    """mu*(beta-1)*e^(mu*beta*q)*Ei(-mu*beta*q) + 1/q with q = m_plus_1.

    Uses the exponentially scaled E1 so large mu*beta does not overflow.
    """
    q = float(m_plus_1)
    x = mu * beta * q
    return 1.0 / q - mu * (beta - 1.0) * specfun.exp_scaled_e1(x)


def _ei_bracket_mp(mu, beta, m_plus_1: int = 1):
    q = mpmath.mpf(m_plus_1)
    x = mu * beta * q
    return 1 / q + mu * (beta - 1) * mpmath.exp(x) * mpmath.ei(-x)


def p_pos_dt(gains: LinkGains) -> float:
    """Probability of a positive secrecy rate under direct transmission (K = 1)."""
    return gains.gamma_ab / (gains.gamma_ar + gains.gamma_ab)


def sop_dt_single(gains: LinkGains, params: SystemParams) -> float:
    """Secrecy outage probability of direct transmission, single-antenna relay."""
    two_r = 2.0 ** params.rate
    return 1.0 - gains.gamma_ab / (two_r * gains.gamma_ar + gains.gamma_ab) * math.exp(
        -(two_r - 1.0) / (params.rho * gains.gamma_ab)
    )


def p_pos_af(gains: LinkGains, params: SystemParams) -> float:
    """Probability of a positive secrecy rate under AF relaying (K = 1)."""
    coef = derived_coefficients(gains, params)
    return _ei_bracket(coef.mu1, coef.beta1)


def sop_af_single(gains: LinkGains, params: SystemParams) -> float:
    """Secrecy outage probability of AF relaying, single-antenna relay."""
    coef = derived_coefficients(gains, params)
    c = 2.0 ** (2.0 * params.rate) - 1.0
    prefactor = gains.gamma_ab / (c * gains.gamma_ar + gains.gamma_ab) * math.exp(
        -c / (params.rho * gains.gamma_ab)
    )
    return 1.0 - prefactor * _ei_bracket(coef.mu1, coef.beta2)


def p_pos_cj(gains: LinkGains, params: SystemParams) -> float:
    """Probability of a positive secrecy rate under cooperative jamming (K = 1)."""
    s = gains.gamma_ar + gains.gamma_rb + 1.0 / params.rho
    return math.exp(-math.sqrt(s / params.rho) / gains.gamma_rb)


def _cj_integrand(gains: LinkGains, params: SystemParams) -> Callable[[float], float]:
    coef = derived_coefficients(gains, params)
    c = 2.0 ** (2.0 * params.rate) - 1.0
    gar = gains.gamma_ar
    grb = gains.gamma_rb

    def integrand(z: float) -> float:
        # At zero rate the jamming-gain function drops out of the exponent
        # exactly, leaving the bare second-hop density (this is what makes
        # a wrong integration threshold visible as a complement failure).
        if c == 0.0:
            return math.exp(-z / grb)
        phi = coef.phi(z)
        if phi <= 0.0:
            return 0.0
        return math.exp(-c / (gar * phi) - z / grb)

    return integrand


def sop_cj_single(
    gains: LinkGains,
    params: SystemParams,
    quad: specfun.QuadratureSpec | None = None,
    paper_printed_t: bool = False,
) -> float:
    """Secrecy outage probability of cooperative jamming, single-antenna relay.

    ``paper_printed_t`` switches the integration threshold to the
    uncorrected root constant; it exists only so the validation suite can
    demonstrate that the uncorrected threshold breaks the zero-rate
    complement identity.
    """
    t = threshold_t(gains, params, paper_printed=paper_printed_t)
    integral = specfun.integrate_semi_infinite(_cj_integrand(gains, params), t, quad)
    return min(1.0, max(0.0, 1.0 - integral / gains.gamma_rb))


def sop_dt_multi(gains: LinkGains, params: SystemParams) -> float:
    """Direct-transmission outage with a K-antenna MRC eavesdropping relay."""
    two_r = 2.0 ** params.rate
    ratio = gains.gamma_ab / (two_r * gains.gamma_ar + gains.gamma_ab)
    return 1.0 - ratio ** params.k_antennas * math.exp(
        -(two_r - 1.0) / (params.rho * gains.gamma_ab)
    )


def _gauss_legendre_panels(
    f_vec: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rel_tol: float = 1e-9,
    max_doublings: int = 12,
) -> float:
    """Panel-doubling 20-point Gauss-Legendre for smooth vectorizable integrands."""
    nodes, weights = np.polynomial.legendre.leggauss(20)
    previous = None
    panels = 1
    for _ in range(max_doublings):
        edges = np.linspace(a, b, panels + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1:] - edges[:-1])
        x = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
        w = (half[:, None] * weights[None, :]).ravel()
        value = float(np.dot(w, f_vec(x)))
        if previous is not None and abs(value - previous) <= rel_tol * max(abs(value), 1e-300) + 1e-15:
            return value
        previous = value
        panels *= 2
    return previous


def sop_af_multi(
    gains: LinkGains,
    params: SystemParams,
    quad: specfun.QuadratureSpec | None = None,
) -> float:
    """AF outage with a K-antenna MRC/MRT relay.

    Closed leading terms plus a double integral: the outer variable is the
    relay's combined first-hop gain (semi-infinite, transformed), the inner
    one the direct-link gain over the finite window where the second-hop
    beamforming fraction can still decide the outcome.  Combined quadrature
    budget is ~1e-6.
    """
    _check_k(params.k_antennas)
    k = params.k_antennas
    rho = params.rho
    two2r = 2.0 ** (2.0 * params.rate)
    c = two2r - 1.0
    gab, gar, grb = gains.gamma_ab, gains.gamma_ar, gains.gamma_rb

    closed = (1.0 + gar * c / gab) ** (-k) * math.exp(-c / (rho * gab))
    kappa = k * (gar + 1.0 / rho) / grb
    log_norm = -k * math.log(gar) - math.lgamma(k)

    def fv(v: np.ndarray) -> np.ndarray:
        # Survival sum of the beamforming fraction; v in [0, 1).
        out = np.ones_like(v)
        inside = v < 1.0
        w = kappa * v[inside] / (1.0 - v[inside])
        out[inside] = 1.0 - scipy.special.gammaincc(k, w)
        return out

    def inner(y: float) -> float:
        x_l = (1.0 + rho * y) * c / rho
        x_u = two2r * y + c / rho

        def g(x: np.ndarray) -> np.ndarray:
            v = two2r + (c - rho * x) / (rho * y)
            return fv(v) * np.exp(-x / gab) / gab

        return _gauss_legendre_panels(g, x_l, x_u)

    def outer(y: float) -> float:
        if y <= 0.0:
            return 0.0
        log_py = log_norm + (k - 1) * math.log(y) - y / gar
        if log_py < -700.0:
            return 0.0
        return math.exp(log_py) * inner(y)

    if quad is None:
        quad = specfun.QuadratureSpec(abs_tol=1e-9, rel_tol=1e-7)
    double_integral = specfun.integrate_semi_infinite(outer, 0.0, quad)
    return min(1.0, max(0.0, 1.0 - closed + double_integral))


def _alt_sum_exact(terms: list[float]) -> float:
    return math.fsum(terms)


def sop_dt_select(gains: LinkGains, params: SystemParams) -> float:
    """Direct-transmission outage when the relay eavesdrops on its best antenna."""
    _check_k(params.k_antennas)
    k = params.k_antennas
    two_r = 2.0 ** params.rate
    expo = math.exp(-(two_r - 1.0) / (params.rho * gains.gamma_ab))
    if k <= _MAX_K_EXACT:
        total = _alt_sum_exact(
            [
                math.comb(k - 1, n) * (-1.0) ** n
                * gains.gamma_ab / (two_r * gains.gamma_ar + gains.gamma_ab * (n + 1))
                for n in range(k)
            ]
        )
        return 1.0 - k * expo * total
    with mpmath.workdps(_MP_DPS):
        gab, gar = mpmath.mpf(gains.gamma_ab), mpmath.mpf(gains.gamma_ar)
        total = mpmath.fsum(
            mpmath.binomial(k - 1, n) * (-1) ** n * gab / (two_r * gar + gab * (n + 1))
            for n in range(k)
        )
        return float(1 - k * expo * total)


def sop_af_select_csi(gains: LinkGains, params: SystemParams) -> float:
    """AF outage with best-antenna selection on both hops.

    Double alternating sum over the two order-statistics expansions; both
    indices run 0..K-1 so the K = 1 case collapses to the single-antenna
    expression (the 1-based range sometimes quoted for this sum drops the
    leading term and contradicts that reduction).
    """
    _check_k(params.k_antennas)
    k = params.k_antennas
    coef = derived_coefficients(gains, params)
    c = 2.0 ** (2.0 * params.rate) - 1.0
    expo = math.exp(-c / (params.rho * gains.gamma_ab))
    if k <= _MAX_K_EXACT:
        terms = []
        for n in range(k):
            weight_n = (
                math.comb(k - 1, n) * (-1.0) ** n
                * gains.gamma_ab / (c * gains.gamma_ar + gains.gamma_ab * (n + 1))
            )
            for m in range(k):
                weight_m = math.comb(k - 1, m) * (-1.0) ** m
                terms.append(weight_n * weight_m * _ei_bracket(coef.mu, coef.beta_n[n], m + 1))
        return 1.0 - k * k * expo * _alt_sum_exact(terms)
    with mpmath.workdps(_MP_DPS):
        gab, gar = mpmath.mpf(gains.gamma_ab), mpmath.mpf(gains.gamma_ar)
        mu = mpmath.mpf(coef.mu)
        total = mpmath.mpf(0)
        for n in range(k):
            beta_n = mpmath.mpf(coef.beta_n[n])
            weight_n = mpmath.binomial(k - 1, n) * (-1) ** n * gab / (c * gar + gab * (n + 1))
            inner = mpmath.fsum(
                mpmath.binomial(k - 1, m) * (-1) ** m * _ei_bracket_mp(mu, beta_n, m + 1)
                for m in range(k)
            )
            total += weight_n * inner
        return float(1 - k * k * expo * total)


def sop_af_select_nocsi(gains: LinkGains, params: SystemParams) -> float:
    """AF outage with best receive antenna and a random transmit antenna."""
    _check_k(params.k_antennas)
    k = params.k_antennas
    coef = derived_coefficients(gains, params)
    c = 2.0 ** (2.0 * params.rate) - 1.0
    expo = math.exp(-c / (params.rho * gains.gamma_ab))
    if k <= _MAX_K_EXACT:
        total = _alt_sum_exact(
            [
                math.comb(k - 1, n) * (-1.0) ** n
                * gains.gamma_ab * _ei_bracket(coef.mu, coef.beta_n[n])
                / (c * gains.gamma_ar + gains.gamma_ab * (n + 1))
                for n in range(k)
            ]
        )
        return 1.0 - k * expo * total
    with mpmath.workdps(_MP_DPS):
        gab, gar = mpmath.mpf(gains.gamma_ab), mpmath.mpf(gains.gamma_ar)
        mu = mpmath.mpf(coef.mu)
        total = mpmath.fsum(
            mpmath.binomial(k - 1, n) * (-1) ** n
            * gab * _ei_bracket_mp(mu, mpmath.mpf(coef.beta_n[n]))
            / (c * gar + gab * (n + 1))
            for n in range(k)
        )
        return float(1 - k * expo * total)


def _one_minus_exp_pow(k: int, x: float) -> float:
    """(1 - e^{-x})^K via its alternating binomial expansion.

    Evaluated pointwise inside the selection integrals.  The cancellation
    scale is C(K, K/2) while the result can be as small as x^K, so the
    accumulation precision is chosen from the result's magnitude: exact
    float64 summation where that suffices, otherwise big-float summation
    with just enough digits.  Results below the double-precision range
    are returned as zero.
    """
    if x == math.inf:
        return 1.0
    if x <= 0.0:
        return 0.0
    log10_val = k * math.log1p(-math.exp(-x)) / math.log(10.0) if x > 1e-16 else k * math.log10(x)
    if log10_val < -300.0:
        return 0.0
    if k <= _MAX_K_EXACT and log10_val > -10.0:
        return _alt_sum_exact([math.comb(k, n) * (-1.0) ** n * math.exp(-n * x) for n in range(k + 1)])
    digits = int(0.302 * k - log10_val) + 15
    with mpmath.workdps(digits):
        u = mpmath.exp(-mpmath.mpf(x))
        return float(
            mpmath.fsum(mpmath.binomial(k, n) * (-1) ** n * u ** n for n in range(k + 1))
        )


def _phi_level_crossing(coef, gains: LinkGains, c: float, target_x: float) -> float:
    """z > t where c / (gamma_ar * phi(z)) drops to ``target_x``.

    The exponent argument is strictly decreasing in z, so bisection on an
    expanding bracket is safe; used to seed quadrature break points at the
    transition layer of the antenna-selection integrand.
    """
    t = coef.t

    def x_of(z: float) -> float:
        phi = coef.phi(z)
        return math.inf if phi <= 0.0 else c / (gains.gamma_ar * phi)

    hi = t + max(t, 1.0)
    for _ in range(80):
        if x_of(hi) < target_x:
            break
        hi *= 2.0
    else:
        return math.inf  # exponent never drops that far; no layer to mark
    lo = t
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if x_of(mid) > target_x:
            lo = mid
        else:
            hi = mid
    return hi


def sop_cj_select_nocsi(
    gains: LinkGains,
    params: SystemParams,
    quad: specfun.QuadratureSpec | None = None,
    paper_printed_t: bool = False,
) -> float:
    """Cooperative-jamming outage with best-receive-antenna selection and no
    second-hop CSI at the relay (transmit antenna reused, equivalent to random)."""
    _check_k(params.k_antennas)
    k = params.k_antennas
    coef = derived_coefficients(gains, params)
    c = 2.0 ** (2.0 * params.rate) - 1.0
    gar, grb = gains.gamma_ar, gains.gamma_rb
    t = threshold_t(gains, params, paper_printed=paper_printed_t)

    def integrand(z: float) -> float:
        phi = coef.phi(z)
        if phi <= 0.0:
            return 0.0
        x = c / (gar * phi) if c > 0.0 else 0.0
        return _one_minus_exp_pow(k, x) * math.exp(-z / grb)

    focus = None
    if c > 0.0 and k > 1:
        # The K-th power turns on over a narrow layer above t; anchor
        # subdivision where the exponent argument passes ~log K and ~1.
        focus = [
            _phi_level_crossing(coef, gains, c, 4.0 * (1.0 + math.log(k))),
            _phi_level_crossing(coef, gains, c, 1.0),
            _phi_level_crossing(coef, gains, c, 0.05),
        ]
    integral = specfun.integrate_semi_infinite(integrand, t, quad, focus=focus)
    head = 1.0 - math.exp(-t / grb)
    return min(1.0, max(0.0, head + integral / grb))


def limits(gains: LinkGains, params: SystemParams, which: str, mc=None) -> float:
    """Closed-form asymptotic outage values.

    Selectors describe the regime: ``*_high_snr`` (rho to infinity),
    ``*_strong_second_hop`` / ``*_weak_second_hop`` (gamma_rb limits),
    ``*_weak_first_hop`` (gamma_ar to zero), ``cj_select_nocsi_large_k``
    (antenna-selection floor), and ``cj_multi_high_snr``, which has no
    closed form and is evaluated by Monte Carlo over the SNR-free limiting
    event (pass an ``McConfig``).

    ``af_high_snr`` is the actual high-SNR limit of the exact AF outage;
    ``af_high_snr_printed`` keeps the variant that reuses the
    positive-secrecy beta coefficient inside the bracket, retained only so
    the validation suite can report how far it sits from the true limit.
    """
    rho = params.rho
    two_r = 2.0 ** params.rate
    two2r = 2.0 ** (2.0 * params.rate)
    c = two2r - 1.0
    gab, gar, grb = gains.gamma_ab, gains.gamma_ar, gains.gamma_rb

    if which == "dt_high_snr":
        return 1.0 - gab / (two_r * gar + gab)
    if which in ("af_high_snr", "af_high_snr_printed"):
        mu1p = gar / grb
        coef = derived_coefficients(gains, params)
        beta = coef.beta1 if which == "af_high_snr_printed" else coef.beta2
        return 1.0 - gab / (c * gar + gab) * _ei_bracket(mu1p, beta)
    if which == "cj_high_snr":
        if params.k_antennas > 1:
            raise ValueError("cooperative jamming with K > 1 needs selector 'cj_multi_high_snr'")
        return 0.0
    if which == "af_strong_second_hop":
        return 1.0 - gab / (c * gar + gab) * math.exp(-c / (rho * gab))
    if which == "cj_strong_second_hop":
        x = math.sqrt(4.0 * c / (rho * gar))
        return 1.0 - math.exp(-c / (rho * gar)) * x * specfun.bessel_k1(x)
    if which == "af_weak_second_hop":
        # Relay path useless; half pre-log makes this direct transmission at doubled rate.
        return 1.0 - gab / (two2r * gar + gab) * math.exp(-c / (rho * gab))
    if which == "cj_weak_second_hop":
        return 1.0
    if which == "dt_weak_first_hop":
        return 1.0 - math.exp(-(two_r - 1.0) / (rho * gab))
    if which == "af_weak_first_hop":
        return 1.0 - math.exp(-c / (rho * gab))
    if which == "cj_weak_first_hop":
        return 1.0
    if which == "cj_select_nocsi_large_k":
        return 1.0 - math.exp(-threshold_t(gains, params) / grb)
    if which == "cj_multi_high_snr":
        if mc is None:
            raise ValueError("cj_multi_high_snr is Monte Carlo only; pass an McConfig")
        from . import montecarlo

        return montecarlo.cj_full_array_high_snr_constant(gains, params, mc).value
    raise ValueError(f"unsupported limit selector {which!r}; known: {', '.join(_LIMIT_SELECTORS)}")


def analytic_sop(gains: LinkGains, params: SystemParams) -> float:
    """Dispatch to the closed form matching ``params.scheme``.

    Raises ``UnsupportedAnalytic`` for the two Monte-Carlo-only variants.
    """
    scheme, mode, k = params.scheme.scheme, params.scheme.mode, params.k_antennas
    if k == 1:
        if scheme is Scheme.DT:
            return sop_dt_single(gains, params)
        if scheme is Scheme.AF:
            return sop_af_single(gains, params)
        return sop_cj_single(gains, params)
    if scheme is Scheme.DT:
        if mode is SelectionMode.FULL_ARRAY:
            return sop_dt_multi(gains, params)
        return sop_dt_select(gains, params)
    if scheme is Scheme.AF:
        if mode is SelectionMode.FULL_ARRAY:
            return sop_af_multi(gains, params)
        if mode is SelectionMode.SELECT_CSI:
            return sop_af_select_csi(gains, params)
        return sop_af_select_nocsi(gains, params)
    if mode is SelectionMode.SELECT_NOCSI:
        return sop_cj_select_nocsi(gains, params)
    raise UnsupportedAnalytic(
        f"no closed form exists for {params.scheme} with K={k}; use the Monte Carlo estimator"
    )
