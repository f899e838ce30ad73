"""Multilevel 4-QAM sub-constellations and their uniquely decomposable sum.

User ``k`` (0-based here) draws from ``{(+-1/2 +- j/2) * 2**k * d}``.  Adding
one point per user gives every point of the square ``4**K``-QAM with minimum
distance ``d``, and each sum point has exactly one such decomposition.

Indexing used throughout the package:

* a per-user symbol index ``i in {0, 1, 2, 3}`` equals ``2*b_re + b_im`` where
  bit 0 selects the positive sign on that axis;
* a sum-point index is ``j = sum_k i_k * 4**k`` (user 0 least significant), so
  the bits of ``j`` read as the concatenated bit word.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import NotAConstellationPoint

# row i <-> bits (b_re, b_im) = divmod(i, 2), bit 0 -> positive sign
QPSK_UNIT = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / 2

GRID_RTOL = 1e-9


def sub_energies(K):
    """Per-point energy of each sub-constellation in units of ``d**2``."""
    k = np.arange(1, K + 1)
    return 2.0 ** (2 * k - 3)


@dataclass(frozen=True)
class SubConstellationSet:
    """The ``K`` scaled 4-QAM alphabets and their ``4**K``-point sum."""

    K: int
    d: float
    subsets: np.ndarray = field(repr=False)
    sum_points: np.ndarray = field(repr=False)

    @property
    def size(self):
        return 4 ** self.K

    @property
    def energies(self):
        return sub_energies(self.K) * self.d ** 2


def build_sub_constellations(K, d):
    """Build the multilevel 4-QAM group for ``K`` users at minimum distance ``d``."""
    if int(K) != K or K < 1:
        raise ValueError(f"K must be a positive integer, got {K!r}")
    if not d > 0 or not np.isfinite(d):
        raise ValueError(f"d must be a positive finite real, got {d!r}")
    K = int(K)
    d = float(d)
    scales = 2.0 ** np.arange(K) * d
    subsets = QPSK_UNIT[None, :] * scales[:, None]
    digits = sum_index_digits(np.arange(4 ** K), K)
    sum_points = subsets[np.arange(K)[None, :], digits].sum(axis=1)
    subsets.setflags(write=False)
    sum_points.setflags(write=False)
    return SubConstellationSet(K=K, d=d, subsets=subsets, sum_points=sum_points)


def sum_index_digits(j, K):
    """Split sum-point indices into per-user symbol indices, shape ``(..., K)``."""
    j = np.asarray(j, dtype=np.int64)
    shifts = 2 * np.arange(K)
    return (j[..., None] >> shifts) & 3


def sum_index_from_digits(idx):
    idx = np.asarray(idx, dtype=np.int64)
    K = idx.shape[-1]
    return np.sum(idx << (2 * np.arange(K)), axis=-1)


def grid_coordinates(points, d):
    """Integer coordinates ``2*x/d`` (odd integers for on-grid points).

    Raises NotAConstellationPoint if any coordinate is farther than
    ``GRID_RTOL * d`` from an odd multiple of ``d/2``.
    """
    pts = np.asarray(points, dtype=complex)
    out = []
    for axis in (pts.real, pts.imag):
        u = 2.0 * axis / d
        nearest = 2.0 * np.round((u - 1.0) / 2.0) + 1.0
        if np.any(np.abs(u - nearest) > 2 * GRID_RTOL) or not np.all(np.isfinite(u)):
            raise NotAConstellationPoint(f"{points!r} is not on the odd-multiple-of-d/2 grid")
        out.append(nearest.astype(np.int64))
    return out[0], out[1]


def decompose_indices(points, K, d):
    """Vectorized decomposition: symbol index of each user, shape ``(..., K)``.

    Works by successive extraction from the top level down; the sign of the
    residual on each axis picks that level's quadrant.
    """
    re, im = grid_coordinates(points, d)
    limit = 2 ** K - 1
    if np.any(np.abs(re) > limit) or np.any(np.abs(im) > limit):
        raise NotAConstellationPoint(f"point outside the {4 ** K}-QAM support")
    idx = np.empty(re.shape + (K,), dtype=np.int64)
    for k in range(K - 1, -1, -1):
        step = 2 ** k  # half-side of level k in units of d/2
        b_re = re < 0
        b_im = im < 0
        idx[..., k] = 2 * b_re + b_im
        re = re - np.where(b_re, -step, step)
        im = im - np.where(b_im, -step, step)
    return idx


def decompose(point, ucset):
    """Return the unique per-user points that sum to ``point``."""
    idx = decompose_indices(np.asarray(point, dtype=complex), ucset.K, ucset.d)
    return ucset.subsets[np.arange(ucset.K), idx]


def decompose_by_enumeration(point, ucset):
    """Brute-force decomposition over all ``4**K`` tuples (test oracle)."""
    hits = np.flatnonzero(np.abs(ucset.sum_points - point) <= GRID_RTOL * ucset.d)
    if hits.size != 1:
        raise NotAConstellationPoint(f"{point!r} matches {hits.size} sum points")
    return ucset.subsets[np.arange(ucset.K), sum_index_digits(hits[0], ucset.K)]


def bits_to_indices(bits):
    """``(..., 2K)`` bit array -> ``(..., K)`` symbol indices."""
    bits = np.asarray(bits, dtype=np.int64)
    return 2 * bits[..., 0::2] + bits[..., 1::2]


def indices_to_bits(idx):
    idx = np.asarray(idx, dtype=np.int64)
    out = np.empty(idx.shape[:-1] + (2 * idx.shape[-1],), dtype=np.int8)
    out[..., 0::2] = idx >> 1
    out[..., 1::2] = idx & 1
    return out


def check_word(word, K):
    word = np.asarray(word)
    if word.ndim != 1 or word.size != 2 * K:
        raise ValueError(f"bit word must have length {2 * K}, got shape {word.shape}")
    if not np.all((word == 0) | (word == 1)):
        raise ValueError("bit word entries must be 0 or 1")
    return word.astype(np.int64)


def map_bits(word, ucset):
    """Map a ``2K``-bit word to one point per sub-constellation."""
    word = check_word(word, ucset.K)
    return ucset.subsets[np.arange(ucset.K), bits_to_indices(word)]


def demap_bits(points, ucset):
    """Inverse of :func:`map_bits`."""
    points = np.asarray(points, dtype=complex)
    if points.shape != (ucset.K,):
        raise ValueError(f"expected {ucset.K} points, got shape {points.shape}")
    dist = np.abs(ucset.subsets - points[:, None])
    idx = np.argmin(dist, axis=1)
    if np.any(dist[np.arange(ucset.K), idx] > GRID_RTOL * ucset.d):
        raise NotAConstellationPoint(f"{points!r} not in the sub-constellations")
    return indices_to_bits(idx)


def min_distance(points):
    """Smallest pairwise Euclidean distance of a point set (exhaustive scan)."""
    pts = np.asarray(points, dtype=complex).ravel()
    diff = np.abs(pts[:, None] - pts[None, :])
    diff[np.diag_indices_from(diff)] = np.inf
    return diff.min()
