"""Deterministic Monte Carlo BER engine.

Blocks are grouped into fixed-size batches.  Every random quantity of batch
``b`` at antenna count ``M`` comes from the stream ``(seed, role, M, b)``,
so a batch can be regenerated in isolation and results do not depend on how
batches are spread over workers.  The same keys are used by every scheme,
which gives common random numbers (placements, shadowing, fading) when two
schemes are run with the same seed.

Early stopping is evaluated after each batch in index order: the sweep stops
at the first batch whose cumulative error count reaches the target.  The BER
estimate divides by the bits actually simulated.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import binomtest

from .. import baselines, modem
from ..channel import ChannelRealization, apply_channel, complex_normal, draw_large_scale, noise_power, stream
from ..linkdesign import closed_form_distance, closed_form_powers
from ..udcg import QPSK_UNIT, build_sub_constellations, decompose_indices, indices_to_bits, sub_energies
from .config import BITS_PER_SLOT_PER_USER

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BerRecord:
    scheme: str
    K: int
    M: int
    placement: str  # "disk" (uniform in cell) or "fixed"
    radius_m: float
    trials: int
    bit_errors: int
    ber: float
    wilson_ci_95: tuple
    seed: int
    bits_per_slot_per_user: float


def bits_per_block(scheme, K):
    return {"proposed": 2 * K, "med": K, "zf-train": 6 * K}[scheme]


def wilson_interval(errors, n, confidence=0.95):
    if n == 0:
        return (0.0, 1.0)
    ci = binomtest(int(errors), int(n)).proportion_ci(confidence_level=confidence, method="wilson")
    return (float(ci.low), float(ci.high))


def _large_scale(cfg, M, b, n):
    beta = draw_large_scale(cfg.K, cfg.placement, cfg.radio,
                            stream(cfg.seed, "placement", M, b),
                            shadow_rng=stream(cfg.seed, "shadowing", M, b), batch=(n,))
    G = complex_normal(stream(cfg.seed, "fading", M, b), (n, M, cfg.K))
    return ChannelRealization(G=G, beta=beta)


def _sorted_view(pb):
    order = np.argsort(pb, axis=1, kind="stable")
    return order, np.take_along_axis(pb, order, axis=1)


def _to_user_order(x_sorted, order):
    """Scatter rows indexed by sorted position back to user order (axis 1)."""
    out = np.empty_like(x_sorted)
    idx = np.broadcast_to(order.reshape(order.shape + (1,) * (x_sorted.ndim - 2)), x_sorted.shape)
    np.put_along_axis(out, idx, x_sorted, axis=1)
    return out


def _proposed_batch(cfg, M, b, n, sigma2):
    K = cfg.K
    real = _large_scale(cfg, M, b, n)
    order, pb = _sorted_view(cfg.powers * real.beta)
    beta_sorted = np.take_along_axis(real.beta, order, axis=1)
    d = closed_form_distance(pb)
    p = closed_form_powers(d, K)  # identity assignment: sorted user j -> level j
    data = stream(cfg.seed, "data", M, b).integers(0, 4, size=(n, K))
    sym = np.take_along_axis(data, order, axis=1)
    s = QPSK_UNIT[sym] * (2.0 ** np.arange(K)) * d[:, None]
    X_sorted = np.stack([1.0 / np.sqrt(p * beta_sorted), np.sqrt(p / beta_sorted) * s], axis=-1)
    X = _to_user_order(X_sorted, order)
    noise = complex_normal(stream(cfg.seed, "noise", M, b), (n, M, 2))
    Y = apply_channel(X, real, sigma2, noise=noise)
    a = np.sum(1.0 / p, axis=1) + sigma2
    bb = np.sum(p * sub_energies(K), axis=1) * d ** 2 + sigma2
    n1, n2, r = modem.receive_statistics(Y[..., 0], Y[..., 1])
    q_unit = build_sub_constellations(K, 1.0).sum_points
    obj = modem.ncml_objective(n1, n2, r, a, bb, q_unit[None, :] * d[:, None], M)
    c_hat = q_unit[np.argmin(obj, axis=1)]
    sym_hat = decompose_indices(c_hat, K, 1.0)
    return int(np.sum(indices_to_bits(sym_hat) != indices_to_bits(sym)))


def _med_batch(cfg, M, b, n, sigma2):
    K = cfg.K
    real = _large_scale(cfg, M, b, n)
    order, pb = _sorted_view(cfg.powers * real.beta)
    beta_sorted = np.take_along_axis(real.beta, order, axis=1)
    delta = baselines.med_spacing(pb)
    amp = np.sqrt(2.0 ** np.arange(K) * delta[:, None] / beta_sorted)
    bits = stream(cfg.seed, "data", M, b).integers(0, 2, size=(n, K))
    bits_sorted = np.take_along_axis(bits, order, axis=1)
    X = _to_user_order((bits_sorted * amp)[..., None], order)
    noise = complex_normal(stream(cfg.seed, "noise", M, b), (n, M, 1))
    y = apply_channel(X, real, sigma2, noise=noise)[..., 0]
    t = np.sum((y.conj() * y).real, axis=-1) / M - sigma2
    bits_hat = baselines.level_bits(baselines.med_quantize(t, delta, K), K)
    return int(np.sum(bits_hat != bits_sorted))


def _zf_batch(cfg, M, b, n, sigma2):
    K = cfg.K
    zcfg = baselines.ZfBaselineConfig(K=K)
    real = _large_scale(cfg, M, b, n)
    bits = stream(cfg.seed, "data", M, b).integers(0, 2, size=(n, K, 6))
    X = baselines.zf_transmit(bits, zcfg, cfg.powers)
    noise = complex_normal(stream(cfg.seed, "noise", M, b), (n, M, zcfg.block_len))
    Y = apply_channel(X, real, sigma2, noise=noise)
    bits_hat = baselines.zf_train_detect(Y, zcfg, cfg.powers, sigma2)
    return int(np.sum(bits_hat != bits))


_BATCH = {"proposed": _proposed_batch, "med": _med_batch, "zf-train": _zf_batch}


def simulate_batch(cfg, M, b):
    """Bit errors and bits simulated in batch ``b`` at ``M`` antennas."""
    n = min(cfg.batch_size, cfg.trials - b * cfg.batch_size)
    if n <= 0:
        return 0, 0, 0
    errors = _BATCH[cfg.scheme](cfg, M, b, n, noise_power(cfg.radio))
    return n, errors, n * bits_per_block(cfg.scheme, cfg.K)


def _simulate_batch_args(args):
    return simulate_batch(*args)


def _run_point(cfg, M, pool, workers):
    n_batches = -(-cfg.trials // cfg.batch_size)
    trials = errors = bits = 0
    b = 0
    while b < n_batches:
        chunk = list(range(b, min(n_batches, b + workers)))
        if pool is None:
            results = [simulate_batch(cfg, M, i) for i in chunk]
        else:
            results = list(pool.map(_simulate_batch_args, [(cfg, M, i) for i in chunk]))
        for n, e, nb in results:
            trials += n
            errors += e
            bits += nb
            b += 1
            if cfg.error_target is not None and errors >= cfg.error_target:
                return trials, errors, bits
    return trials, errors, bits


def run_ber_sweep(cfg, workers=1):
    """Run the configured scheme for every ``M`` and return one record per ``M``."""
    records = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for M in cfg.M_list:
            trials, errors, bits = _run_point(cfg, M, pool, max(1, workers))
            ber = errors / bits
            log.info("%s K=%d M=%d: %d errors / %d bits, BER %.3e", cfg.scheme, cfg.K, M, errors, bits, ber)
            records.append(BerRecord(
                scheme=cfg.scheme, K=cfg.K, M=int(M),
                placement="fixed" if cfg.distance_m is not None else "disk",
                radius_m=float(cfg.distance_m if cfg.distance_m is not None else cfg.radius_m),
                trials=trials, bit_errors=errors, ber=ber,
                wilson_ci_95=wilson_interval(errors, bits), seed=cfg.seed,
                bits_per_slot_per_user=BITS_PER_SLOT_PER_USER[cfg.scheme]))
    finally:
        if pool is not None:
            pool.shutdown()
    return records
