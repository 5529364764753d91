"""Monte Carlo estimation of secrecy outage probabilities.

The simulator samples fading realizations, evaluates the per-scheme mutual
information expressions directly from the signal model (independently of
the closed forms), and counts outage events.  Trials are processed in
fixed-size chunks whose random streams are keyed by (seed, chunk index),
so an estimate is a pure function of (seed, trials, chunk_size) no matter
how many workers execute the chunks.  Within one sweep point all schemes
consume identical fading draws (common random numbers), which sharpens
scheme comparisons.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .model import (
    ChannelBlock,
    ChannelDraw,
    LinkGains,
    Scheme,
    SchemeId,
    SelectionMode,
    SopEstimate,
    SystemParams,
    db_to_linear,
    sample_channel_block,
)

SWEEP_AXES = ("rho_db", "gab_db", "gar_db", "grb_db", "gab_and_grb_db", "k_antennas")


@dataclass(frozen=True)
class McConfig:
    """Trial budget, random seed, chunking, and worker count for one run."""

    trials: int = 1_000_000
    seed: int = 20260810
    chunk_size: int = 1 << 16
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.chunk_size < 1:
            raise ValueError(f"chunk_size must be >= 1, got {self.chunk_size}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


def rate_margins_block(
    block: ChannelBlock,
    gains: LinkGains,
    params: SystemParams,
    cj_nocsi_random_tx: bool = False,
) -> np.ndarray:
    """Unclipped secrecy-rate margins I_B - I_R for a block of fading draws.

    The margin (which may be negative) drives the outage count, so that a
    zero target rate recovers the complement of the positive-secrecy
    probability; the achievable rate itself is the margin clipped at zero.
    Two-phase schemes (AF, CJ) carry the 1/2 pre-log; direct transmission
    does not.  Node power fractions scale the respective transmit powers,
    with the relay's statistical normalization tracking the actual
    received power (signal, jamming, noise).

    ``cj_nocsi_random_tx`` switches the CJ no-CSI variant from reusing the
    receive antenna to an independent uniform pick; the forwarding gain is
    identically distributed either way (no transmit diversity), which a
    test asserts, but the joint outage law is the reuse variant's.
    """
    k = params.k_antennas
    rho = params.rho
    a = params.power.frac_alice
    r = params.power.frac_relay
    j = params.power.frac_bob_jam
    scheme, mode = params.scheme.scheme, params.scheme.mode
    if block.h_ar.shape[1] != k:
        raise ValueError(f"block has {block.h_ar.shape[1]} antennas, params expect {k}")

    g_ab = np.abs(block.h_ab) ** 2
    g_ar = np.abs(block.h_ar) ** 2
    g_rb = np.abs(block.h_rb) ** 2
    rows = np.arange(block.h_ab.shape[0])

    if scheme is Scheme.DT:
        if mode is SelectionMode.FULL_ARRAY:
            relay_gain = g_ar.sum(axis=1)
        else:
            relay_gain = g_ar.max(axis=1)
        i_b = np.log2(1.0 + a * rho * g_ab)
        i_r = np.log2(1.0 + a * rho * relay_gain)
        return i_b - i_r

    if scheme is Scheme.AF:
        if mode is SelectionMode.FULL_ARRAY:
            sum_a = g_ar.sum(axis=1)
            sum_b = g_rb.sum(axis=1)
            if r > 0.0:
                den = sum_b + (a / r) * k * gains.gamma_ar + k / (r * rho)
                relay_snr = a * rho * sum_b * sum_a / den
            else:
                relay_snr = np.zeros_like(sum_a)
            eav_gain = sum_a
        else:
            m_star = np.argmax(g_ar, axis=1)
            if mode is SelectionMode.SELECT_CSI:
                n_star = np.argmax(g_rb, axis=1)
            else:
                n_star = block.tx_pick
            best_a = g_ar[rows, m_star]
            hop2 = g_rb[rows, n_star]
            if r > 0.0:
                den = hop2 + (a / r) * gains.gamma_ar + 1.0 / (r * rho)
                relay_snr = a * rho * hop2 * best_a / den
            else:
                relay_snr = np.zeros_like(best_a)
            eav_gain = best_a
        i_b = 0.5 * np.log2(1.0 + a * rho * g_ab + relay_snr)
        i_r = 0.5 * np.log2(1.0 + a * rho * eav_gain)
        return i_b - i_r

    # Cooperative jamming: the destination forfeits the direct link and jams
    # during the first phase, then cancels its own interference.
    if mode is SelectionMode.FULL_ARRAY:
        sum_a = g_ar.sum(axis=1)
        sum_b = g_rb.sum(axis=1)
        if r > 0.0:
            den = sum_b + (a / r) * k * gains.gamma_ar + (j / r) * k * gains.gamma_rb + k / (r * rho)
            bob_snr = a * rho * sum_b * sum_a / den
        else:
            bob_snr = np.zeros_like(sum_a)
        cross = np.abs(np.einsum("ij,ij->i", np.conj(block.h_rb), block.h_ar)) ** 2
        sinr = a * rho * sum_a - (a * rho) * (j * rho) * cross / (1.0 + j * rho * sum_b)
    else:
        if mode is SelectionMode.SELECT_CSI:
            m_star = np.argmax(g_ar / g_rb, axis=1)
            n_star = np.argmax(g_rb, axis=1)
        else:
            m_star = np.argmax(g_ar, axis=1)
            n_star = block.tx_pick if cj_nocsi_random_tx else m_star
        best_a = g_ar[rows, m_star]
        hop2 = g_rb[rows, n_star]
        jam = g_rb[rows, m_star]
        if r > 0.0:
            den = hop2 + (a / r) * gains.gamma_ar + (j / r) * gains.gamma_rb + 1.0 / (r * rho)
            bob_snr = a * rho * hop2 * best_a / den
        else:
            bob_snr = np.zeros_like(best_a)
        sinr = a * best_a / (j * jam + 1.0 / rho)
    i_b = 0.5 * np.log2(1.0 + bob_snr)
    i_r = 0.5 * np.log2(1.0 + sinr)
    return i_b - i_r


def secrecy_rate(
    draw: ChannelDraw,
    gains: LinkGains,
    params: SystemParams,
    tx_antenna: int | None = None,
) -> float:
    """Achievable secrecy rate of a single fading realization.

    ``tx_antenna`` supplies the random second-hop antenna required by the
    AF no-CSI variant (the chunked estimator draws it from the trial's own
    random stream).
    """
    needs_pick = (
        params.scheme.scheme is Scheme.AF
        and params.scheme.mode is SelectionMode.SELECT_NOCSI
    )
    if needs_pick and tx_antenna is None:
        if draw.k == 1:
            tx_antenna = 0
        else:
            raise ValueError("AF selection without CSI needs tx_antenna for a single draw")
    block = ChannelBlock(
        h_ab=np.array([draw.h_ab]),
        h_ar=draw.h_ar[None, :],
        h_rb=draw.h_rb[None, :],
        tx_pick=np.array([tx_antenna if tx_antenna is not None else 0]),
    )
    return float(max(rate_margins_block(block, gains, params)[0], 0.0))


def _chunk_plan(trials: int, chunk_size: int) -> list[tuple[int, int]]:
    return [
        (idx, min(chunk_size, trials - start))
        for idx, start in enumerate(range(0, trials, chunk_size))
    ]


def _count_many(
    gains: LinkGains,
    params_list: Sequence[SystemParams],
    mc: McConfig,
    positive: bool = False,
    cj_nocsi_random_tx: bool = False,
) -> list[int]:
    """Outage (or positive-secrecy) counts for several schemes on shared draws."""
    k = params_list[0].k_antennas
    if any(p.k_antennas != k for p in params_list):
        raise ValueError("shared-draw evaluation requires a common antenna count")

    def run_chunk(job: tuple[int, int]) -> list[int]:
        idx, n = job
        block = sample_channel_block(gains, k, mc.seed, idx, n)
        counts = []
        for params in params_list:
            margins = rate_margins_block(block, gains, params, cj_nocsi_random_tx)
            if positive:
                counts.append(int(np.count_nonzero(margins > 0.0)))
            else:
                counts.append(int(np.count_nonzero(margins < params.rate)))
        return counts

    plan = _chunk_plan(mc.trials, mc.chunk_size)
    if mc.workers == 1:
        per_chunk = [run_chunk(job) for job in plan]
    else:
        with ThreadPoolExecutor(max_workers=mc.workers) as pool:
            per_chunk = list(pool.map(run_chunk, plan))
    return [sum(chunk[i] for chunk in per_chunk) for i in range(len(params_list))]


def _to_estimate(count: int, trials: int) -> SopEstimate:
    p = count / trials
    stderr = math.sqrt(p * (1.0 - p) / trials)
    return SopEstimate(value=p, stderr=stderr, trials=trials, method="montecarlo")


def estimate_sop(
    gains: LinkGains,
    params: SystemParams,
    mc: McConfig,
    cj_nocsi_random_tx: bool = False,
) -> SopEstimate:
    """Fraction of fading draws whose secrecy rate falls below the target rate."""
    count = _count_many(gains, [params], mc, cj_nocsi_random_tx=cj_nocsi_random_tx)[0]
    return _to_estimate(count, mc.trials)


def positive_secrecy_probability(
    gains: LinkGains, params: SystemParams, mc: McConfig
) -> SopEstimate:
    """Fraction of fading draws with a strictly positive secrecy rate."""
    count = _count_many(gains, [params], mc, positive=True)[0]
    return _to_estimate(count, mc.trials)


def estimate_sop_many(
    gains: LinkGains, params_list: Sequence[SystemParams], mc: McConfig
) -> list[SopEstimate]:
    """Outage estimates for several schemes sharing identical fading draws."""
    counts = _count_many(gains, params_list, mc)
    return [_to_estimate(c, mc.trials) for c in counts]


def _apply_axis(
    axis: str, point: float, gains: LinkGains, params: SystemParams
) -> tuple[LinkGains, SystemParams]:
    if axis == "rho_db":
        return gains, replace(params, rho=db_to_linear(point))
    if axis == "gab_db":
        return replace(gains, gamma_ab=db_to_linear(point)), params
    if axis == "gar_db":
        return replace(gains, gamma_ar=db_to_linear(point)), params
    if axis == "grb_db":
        return replace(gains, gamma_rb=db_to_linear(point)), params
    if axis == "gab_and_grb_db":
        lin = db_to_linear(point)
        return replace(gains, gamma_ab=lin, gamma_rb=lin), params
    if axis == "k_antennas":
        return gains, replace(params, k_antennas=int(point))
    raise ValueError(f"unknown sweep axis {axis!r}; known: {', '.join(SWEEP_AXES)}")


def sweep(
    axis: str,
    points: Iterable[float],
    base_gains: LinkGains,
    base_params: SystemParams,
    mc: McConfig,
    schemes: Sequence[SchemeId] | None = None,
) -> list[tuple[float, dict[SchemeId, SopEstimate]]]:
    """Outage estimates along one parameter axis, one per (point, scheme).

    At every point the schemes are evaluated on identical fading draws;
    since draws are built from gain-independent standard normals, the
    underlying randomness is also common across points of a gain sweep.
    """
    if schemes is None:
        schemes = [base_params.scheme]
    results = []
    for point in points:
        gains, params = _apply_axis(axis, float(point), base_gains, base_params)
        params_list = [replace(params, scheme=s) for s in schemes]
        estimates = estimate_sop_many(gains, params_list, mc)
        results.append((float(point), dict(zip(schemes, estimates))))
    return results


def cj_full_array_high_snr_constant(
    gains: LinkGains, params: SystemParams, mc: McConfig
) -> SopEstimate:
    """High-SNR outage floor of full-array cooperative jamming (K > 1).

    In the limit the relay's max-SINR receiver nulls the jamming, leaving
    the SNR-free event  S_B * S_A / ((S_B + K*(gar+grb)) * ||P_perp h_ar||^2)
    < 2^(2R), where P_perp projects off the jamming direction.  No closed
    form exists; estimated by Monte Carlo.
    """
    k = params.k_antennas
    two2r = 2.0 ** (2.0 * params.rate)
    shift = k * (gains.gamma_ar + gains.gamma_rb)

    def run_chunk(job: tuple[int, int]) -> int:
        idx, n = job
        block = sample_channel_block(gains, k, mc.seed, idx, n)
        g_ar = np.abs(block.h_ar) ** 2
        g_rb = np.abs(block.h_rb) ** 2
        sum_a = g_ar.sum(axis=1)
        sum_b = g_rb.sum(axis=1)
        cross = np.abs(np.einsum("ij,ij->i", np.conj(block.h_rb), block.h_ar)) ** 2
        perp = np.maximum(sum_a - cross / sum_b, 0.0)
        numer = sum_b * sum_a
        outage = numer < two2r * (sum_b + shift) * perp
        return int(np.count_nonzero(outage))

    plan = _chunk_plan(mc.trials, mc.chunk_size)
    if mc.workers == 1:
        counts = [run_chunk(job) for job in plan]
    else:
        with ThreadPoolExecutor(max_workers=mc.workers) as pool:
            counts = list(pool.map(run_chunk, plan))
    return _to_estimate(sum(counts), mc.trials)
