"""Comparison schemes: one-slot energy detection and coherent ZF with LS training.

The energy-detection baseline uses on-off keying per user ("2-PAM" in
amplitude): user ``k`` (sorted order, 0-based) lands on receive energy
``2**k * delta`` when on, so the sum energies tile ``{0, delta, ...,
(2**K - 1) delta}``.  The ZF baseline sends ``K`` orthogonal pilot slots and
one 64-QAM data slot per coherence block.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DetectionFailure
from .linkdesign import budgets


@dataclass(frozen=True)
class MedDesign:
    delta: float
    levels: np.ndarray  # (2**K,)
    amplitudes: np.ndarray  # on-amplitude per sorted user
    beta: np.ndarray

    @property
    def K(self):
        return len(self.amplitudes)


def med_design(profiles):
    """Max-min spacing of receive-energy levels under the average-power budget."""
    pb = budgets(profiles)
    if np.any(np.diff(pb) < 0):
        raise ValueError("profiles must be sorted by P*beta")
    K = len(pb)
    weights = 2.0 ** np.arange(K)
    delta = float(med_spacing(pb))
    beta = np.array([u.beta for u in profiles], dtype=float)
    amplitudes = np.sqrt(weights * delta / beta)
    levels = delta * np.arange(2 ** K)
    return MedDesign(delta=delta, levels=levels, amplitudes=amplitudes, beta=beta)


def med_spacing(pb_sorted):
    """Largest level spacing ``min_k 2 P_k beta_k / 2**k`` (sorted budgets, last axis)."""
    pb_sorted = np.asarray(pb_sorted, dtype=float)
    return np.min(2.0 * pb_sorted / 2.0 ** np.arange(pb_sorted.shape[-1]), axis=-1)


def med_transmit(bits, design):
    """Per-user transmit symbol for on-off bits (1 = on)."""
    bits = np.asarray(bits)
    return bits * design.amplitudes


def med_quantize(t, delta, K):
    """Nearest level index of a receive-energy estimate; midpoints round down."""
    m = np.ceil(np.asarray(t) / delta - 0.5)
    return np.clip(m, 0, 2 ** K - 1).astype(np.int64)


def level_bits(m, K):
    return ((np.asarray(m)[..., None] >> np.arange(K)) & 1).astype(np.int8)


def med_detect(y, design, sigma2, M=None):
    """Energy detector for one slot; returns ``K`` bits in sorted-user order."""
    y = np.asarray(y)
    if M is None:
        M = y.shape[-1]
    t = np.sum((y.conj() * y).real, axis=-1) / M - sigma2
    return level_bits(med_quantize(t, design.delta, design.K), design.K)


# 64-QAM with per-axis Gray labels; bits (b0 b1 b2) real axis MSB first, (b3 b4 b5) imaginary
QAM64_SCALE = np.sqrt(42.0)


def _gray_to_index(g):
    n = g.copy()
    shift = g >> 1
    while np.any(shift):
        n ^= shift
        shift >>= 1
    return n


def qam64_map(bits):
    """Unit-energy 64-QAM symbols for bit arrays ``(..., 6)``."""
    bits = np.asarray(bits, dtype=np.int64)
    w = np.array([4, 2, 1])
    g_re = bits[..., 0:3] @ w
    g_im = bits[..., 3:6] @ w
    re = 2 * _gray_to_index(g_re) - 7
    im = 2 * _gray_to_index(g_im) - 7
    return (re + 1j * im) / QAM64_SCALE


def qam64_slice(z):
    """Hard decision back to ``(..., 6)`` bits."""
    z = np.asarray(z) * QAM64_SCALE
    out = []
    for axis in (z.real, z.imag):
        n = np.clip(np.round((axis + 7.0) / 2.0), 0, 7).astype(np.int64)
        g = n ^ (n >> 1)
        out.append((g[..., None] >> np.array([2, 1, 0])) & 1)
    return np.concatenate(out, axis=-1).astype(np.int8)


@dataclass(frozen=True)
class ZfBaselineConfig:
    K: int = 3

    @property
    def pilot_slots(self):
        return self.K

    @property
    def block_len(self):
        return self.K + 1

    bits_per_user = 6


def _powers(profiles):
    """Per-user budgets from profiles or from a plain array of powers (watts)."""
    if len(profiles) and hasattr(profiles[0], "P"):
        return np.array([u.P for u in profiles], dtype=float)
    return np.asarray(profiles, dtype=float)


def pilot_matrix(profiles):
    """Scaled DFT pilots; row ``k`` has per-slot power exactly ``P_k``."""
    P = _powers(profiles)
    n = np.arange(len(P))
    F = np.exp(-2j * np.pi * np.outer(n, n) / len(P))
    return np.sqrt(P)[:, None] * F


def zf_transmit(bits, cfg, profiles):
    """``K x (K+1)`` block: pilots then one 64-QAM data slot at power ``P_k``."""
    bits = np.asarray(bits)
    if bits.shape[-2:] != (cfg.K, 6):
        raise ValueError(f"expected bits of shape (..., {cfg.K}, 6)")
    P = _powers(profiles)
    Xp = pilot_matrix(profiles)
    data = np.sqrt(P) * qam64_map(bits)
    Xp = np.broadcast_to(Xp, data.shape[:-1] + Xp.shape)
    return np.concatenate([Xp, data[..., None]], axis=-1)


def ls_estimate(Yp, Xp):
    """``H_hat = Yp Xp^H (Xp Xp^H)^-1``."""
    gram = Xp @ Xp.conj().T
    return Yp @ Xp.conj().T @ np.linalg.inv(gram)


def zf_train_detect(Y, cfg, profiles, sigma2=None):
    """LS channel estimate from the pilot slots, ZF equalization of the data slot.

    ``Y`` is ``(..., M, K+1)``; returns bits ``(..., K, 6)``.  ``sigma2`` is
    accepted for interface symmetry; neither LS nor ZF uses it.
    """
    Y = np.asarray(Y)
    K = cfg.K
    if Y.shape[-1] != cfg.block_len:
        raise ValueError(f"expected {cfg.block_len} slots, got {Y.shape[-1]}")
    Xp = pilot_matrix(profiles)
    H_hat = ls_estimate(Y[..., :K], Xp)
    HhH = np.swapaxes(H_hat.conj(), -1, -2)
    try:
        x_hat = np.linalg.solve(HhH @ H_hat, HhH @ Y[..., K:])[..., 0]
    except np.linalg.LinAlgError as exc:
        raise DetectionFailure("rank-deficient channel estimate") from exc
    P = _powers(profiles)
    return qam64_slice(x_hat / np.sqrt(P))
