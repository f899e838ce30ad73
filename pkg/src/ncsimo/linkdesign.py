"""Power allocation and sub-constellation assignment for max-min KL distance.

Users are indexed in sorted order (``P*beta`` nondecreasing).  A permutation
``perm`` maps user ``k`` to sub-constellation ``perm[k]``; the power vector
``p`` is indexed by sub-constellation, so user ``k`` transmits with
``p[perm[k]]``.  All indices are 0-based.
"""
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedSize
from .udcg import build_sub_constellations, sub_energies


@dataclass(frozen=True)
class UserProfile:
    P: float  # average power budget, watts
    beta: float  # large-scale gain, linear

    def __post_init__(self):
        if not (self.P > 0 and self.beta > 0):
            raise ValueError(f"P and beta must be positive, got P={self.P!r}, beta={self.beta!r}")

    @property
    def budget(self):
        return self.P * self.beta


@dataclass(frozen=True)
class DesignSolution:
    d: float
    p: np.ndarray
    perm: tuple
    energies: np.ndarray

    @property
    def K(self):
        return len(self.p)

    def constellation(self):
        return build_sub_constellations(self.K, self.d)


@dataclass(frozen=True)
class GramStats:
    """Diagonal entries of the 2x2 receive Gram matrix (identical for every codeword)."""

    a: float
    b: float


def budgets(profiles):
    return np.array([u.P * u.beta for u in profiles], dtype=float)


def sort_users(profiles):
    """Stable ordering that sorts users by ``P*beta`` ascending."""
    if len(profiles) == 0:
        raise ValueError("need at least one user profile")
    return np.argsort(budgets(profiles), kind="stable")


def _require_sorted(profiles):
    pb = budgets(profiles)
    if np.any(pb <= 0):
        raise ValueError("every P*beta must be positive")
    if np.any(np.diff(pb) < 0):
        raise ValueError("profiles must be sorted by P*beta (see sort_users)")
    return pb


def max_distance(pb, perm, energies=None):
    """Largest feasible ``d`` when user ``k`` gets sub-constellation ``perm[k]``."""
    pb = np.asarray(pb, dtype=float)
    if energies is None:
        energies = sub_energies(len(pb))
    return float(np.min(pb / np.sqrt(energies[np.asarray(perm)])))


def optimal_design(profiles, sigma2=0.0):
    """Closed-form max-min KL design.

    ``d = min_k P_k beta_k / sqrt(E_k)``, ``p_k = 1/(sqrt(E_k) d)`` and the
    identity assignment.  ``sigma2`` does not change the optimizer; it is
    accepted so callers can pass the same arguments as to the grid oracle.
    """
    if sigma2 < 0:
        raise ValueError("sigma2 must be nonnegative")
    pb = _require_sorted(profiles)
    K = len(pb)
    d = float(closed_form_distance(pb))
    return DesignSolution(d=d, p=closed_form_powers(d, K), perm=tuple(range(K)),
                          energies=sub_energies(K))


def closed_form_distance(pb_sorted):
    """``min_k P_k beta_k / sqrt(E_k)`` along the last axis (sorted budgets)."""
    pb_sorted = np.asarray(pb_sorted, dtype=float)
    return np.min(pb_sorted / np.sqrt(sub_energies(pb_sorted.shape[-1])), axis=-1)


def closed_form_powers(d, K):
    """``p_k = 1/(sqrt(E_k) d)``; broadcasts over an array of distances."""
    return 1.0 / (np.sqrt(sub_energies(K)) * np.asarray(d, dtype=float)[..., None])


def gram_stats(design, sigma2):
    a = float(np.sum(1.0 / design.p) + sigma2)
    b = float(np.sum(design.p * design.energies) * design.d ** 2 + sigma2)
    return GramStats(a=a, b=b)


def design_objective(p, d, sigma2, energies=None):
    """``ab/d**2 = (sum 1/p + sigma2)(sum p E + sigma2/d**2)``; smaller is better."""
    p = np.asarray(p, dtype=float)
    if energies is None:
        energies = sub_energies(p.shape[-1])
    return (np.sum(1.0 / p, axis=-1) + sigma2) * (np.sum(p * energies, axis=-1) + sigma2 / d ** 2)


def min_kl_closed_form(design, sigma2):
    """Minimum single-antenna KL distance of a design: ``1/(ab/d**2 - 1/2)``."""
    return 1.0 / (design_objective(design.p, design.d, sigma2, design.energies) - 0.5)


def power_bounds(pb, perm, d, energies=None):
    """Feasible interval ``[lo, hi]`` of ``p`` per sub-constellation."""
    pb = np.asarray(pb, dtype=float)
    K = len(pb)
    if energies is None:
        energies = sub_energies(K)
    owner = np.empty(K, dtype=int)
    owner[np.asarray(perm)] = np.arange(K)  # owner[j] = user on sub-constellation j
    lo = 1.0 / pb[owner]
    hi = pb[owner] / (energies * d ** 2)
    return lo, hi


def is_feasible(design, profiles, rtol=1e-12):
    lo, hi = power_bounds(budgets(profiles), design.perm, design.d, design.energies)
    p = design.p
    return bool(np.all(p >= lo * (1 - rtol)) and np.all(p <= hi * (1 + rtol)))


GRID_MAX_K = 3


def _log_grid(lo, hi, n):
    hi = max(hi, lo)
    if hi <= lo * (1 + 1e-12):
        return np.array([lo])
    return np.geomspace(lo, hi, n)


def _grid_minimum(axes, sigma2, d, energies):
    mesh = np.meshgrid(*axes, indexing="ij")
    inv = sum(1.0 / m for m in mesh) + sigma2
    lin = sum(e * m for e, m in zip(energies, mesh)) + sigma2 / d ** 2
    obj = inv * lin
    flat = int(np.argmin(obj))
    where = np.unravel_index(flat, obj.shape)
    return float(obj[where]), np.array([ax[i] for ax, i in zip(axes, where)])


def grid_search_design(profiles, sigma2, grid_resolution=200, refine_rounds=3,
                       refine_resolution=41, tie_rtol=1e-7):
    """Brute-force oracle for the design problem.

    For every assignment the distance is fixed at its largest feasible value
    and the objective is minimized over a logarithmic grid of each feasible
    power interval, followed by a few rounds of local zooming (the objective
    is log-convex in ``log p`` so zooming cannot leave the global basin).
    Assignments whose objective is within ``tie_rtol`` of the best are
    treated as ties and the first in lexicographic order is returned.
    """
    pb = budgets(profiles)
    K = len(pb)
    if K > GRID_MAX_K:
        raise UnsupportedSize(f"grid search supports K <= {GRID_MAX_K}, got {K}")
    if np.any(pb <= 0):
        raise ValueError("every P*beta must be positive")
    energies = sub_energies(K)
    results = []
    for perm in itertools.permutations(range(K)):
        d = max_distance(pb, perm, energies)
        lo, hi = power_bounds(pb, perm, d, energies)
        hi = np.maximum(hi, lo)
        axes = [_log_grid(l, h, grid_resolution) for l, h in zip(lo, hi)]
        best, p = _grid_minimum(axes, sigma2, d, energies)
        log_lo, log_hi = np.log(lo), np.log(hi)
        step = np.array([np.log(h / l) / (grid_resolution - 1) for l, h in zip(lo, hi)])
        for _ in range(refine_rounds):
            centre = np.log(p)
            a = np.maximum(centre - 2 * step, log_lo)
            b = np.minimum(centre + 2 * step, log_hi)
            axes = [np.exp(np.linspace(x, y, refine_resolution)) if y > x else np.array([math.exp(x)])
                    for x, y in zip(a, b)]
            val, cand = _grid_minimum(axes, sigma2, d, energies)
            if val <= best:
                best, p = val, cand
            step = step * 4.0 / (refine_resolution - 1)
        results.append((best, perm, d, p))
    floor = min(r[0] for r in results)
    for best, perm, d, p in results:
        if best <= floor * (1 + tie_rtol):
            return DesignSolution(d=d, p=p, perm=tuple(perm), energies=energies)
    raise AssertionError("unreachable")


def assignment_order_check(a_seq, b_seq):
    """Exhaustively maximize ``min_k a_k / b_perm(k)`` over permutations.

    Returns ``(perm, value)``; ties go to the lexicographically first
    permutation, so sorted inputs return the identity.
    """
    a = np.asarray(a_seq, dtype=float)
    b = np.asarray(b_seq, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("sequences must be one-dimensional and of equal length")
    if np.any(a <= 0) or np.any(b <= 0):
        raise ValueError("sequences must be positive")
    best_perm, best_val = None, -np.inf
    for perm in itertools.permutations(range(len(a))):
        val = float(np.min(a / b[list(perm)]))
        if val > best_val:
            best_perm, best_val = perm, val
    return best_perm, best_val
