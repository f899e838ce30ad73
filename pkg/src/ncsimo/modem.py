"""Two-slot noncoherent transmission: codewords, ML detection, KL distances.

A codeword is the ``K x 2`` matrix ``X = D^(-1/2) Pi S`` whose first column is
a fixed reference ``1/sqrt(p)`` and whose second column carries
``sqrt(p) * s`` with ``s`` drawn from the multilevel 4-QAM group.  At the
receiver only the Gram matrix ``[[a, c], [conj(c), b]]`` of ``X^H D X +
sigma2 I`` matters; ``a`` and ``b`` are common to all codewords and ``c`` is
the sum point.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InternalConsistencyError, UnsupportedSize
from .linkdesign import budgets, gram_stats, is_feasible
from .udcg import (decompose_indices, indices_to_bits, bits_to_indices,
                   sum_index_digits, check_word)


@dataclass(frozen=True)
class TxBlock:
    X: np.ndarray  # (K, 2)
    word: np.ndarray  # (2K,) bits, user order


@dataclass(frozen=True)
class RxBlock:
    y1: np.ndarray
    y2: np.ndarray

    @classmethod
    def from_matrix(cls, Y):
        Y = np.asarray(Y)
        return cls(y1=Y[:, 0], y2=Y[:, 1])


@dataclass(frozen=True)
class KlPair:
    value: float
    value_M: float
    M: int = 1


def _betas(profiles):
    return np.array([u.beta for u in profiles], dtype=float)


def _sub_of_user(design):
    return np.asarray(design.perm, dtype=int)


def codeword_matrix(sub_idx, design, beta, ucset):
    """Codeword(s) for per-sub-constellation symbol indices ``(..., K)``."""
    sub_idx = np.asarray(sub_idx)
    K = design.K
    perm = _sub_of_user(design)
    s = ucset.subsets[np.arange(K), sub_idx]  # (..., K) indexed by sub-constellation
    p = design.p
    s_user = s[..., perm]
    p_user = p[perm]
    sb = np.sqrt(np.asarray(beta, dtype=float))
    x1 = np.broadcast_to(1.0 / (np.sqrt(p_user) * sb), s_user.shape)
    x2 = np.sqrt(p_user) * s_user / sb
    return np.stack([x1, x2], axis=-1)


def assemble_codeword(word, design, profiles, ucset=None):
    """Build the transmitted block for a ``2K``-bit word (bits in user order)."""
    if ucset is None:
        ucset = design.constellation()
    if not is_feasible(design, profiles, rtol=1e-9):
        raise ValueError("design violates the per-user power constraints")
    if np.any(np.diff(budgets(profiles)) < 0):
        raise ValueError("profiles must be sorted by P*beta")
    word = check_word(word, design.K)
    user_idx = bits_to_indices(word)
    sub_idx = np.empty_like(user_idx)
    sub_idx[_sub_of_user(design)] = user_idx
    X = codeword_matrix(sub_idx, design, _betas(profiles), ucset)
    return TxBlock(X=X, word=word.astype(np.int8))


def codebook(design, profiles, ucset=None):
    """All ``4**K`` codewords ordered by sum-point index."""
    if ucset is None:
        ucset = design.constellation()
    idx = sum_index_digits(np.arange(ucset.size), design.K)
    return codeword_matrix(idx, design, _betas(profiles), ucset)


def gram_entries(X, beta, sigma2):
    """``(a, b, c)`` of ``X^H D X + sigma2 I`` for codewords ``(..., K, 2)``."""
    X = np.asarray(X)
    beta = np.asarray(beta, dtype=float)
    x1, x2 = X[..., 0], X[..., 1]
    a = np.sum(beta * (x1.conj() * x1).real, axis=-1) + sigma2
    b = np.sum(beta * (x2.conj() * x2).real, axis=-1) + sigma2
    c = np.sum(beta * x1.conj() * x2, axis=-1)
    return a, b, c


def receive_statistics(y1, y2):
    """``(||y1||^2, ||y2||^2, y2^H y1)`` along the last axis."""
    n1 = np.sum((y1.conj() * y1).real, axis=-1)
    n2 = np.sum((y2.conj() * y2).real, axis=-1)
    r = np.sum(y2.conj() * y1, axis=-1)
    return n1, n2, r


def ncml_objective(n1, n2, r, a, b, candidates, M):
    """Two-slot ML metric for every candidate ``c``; shape ``(..., n_cand)``."""
    n1, n2, r, a, b = (np.asarray(v)[..., None] for v in (n1, n2, r, a, b))
    cand = np.asarray(candidates)
    det = a * b - (cand.conj() * cand).real
    if np.any(det <= 0):
        raise InternalConsistencyError("ab - |c|^2 <= 0 for some candidate; corrupted design")
    return (a * n2 + b * n1 - 2.0 * (cand * r).real) / det + M * np.log(det)


def detect_ncml(rx, design, profiles, ucset, sigma2, M=None):
    """Noncoherent ML decision over the sum constellation.

    Returns ``(c_hat, word_hat)`` with ``word_hat`` in user order.  Ties go
    to the lowest sum-point index.
    """
    y1 = np.asarray(rx.y1)
    y2 = np.asarray(rx.y2)
    if M is None:
        M = y1.shape[-1]
    if y1.shape != (M,) or y2.shape != (M,):
        raise ValueError(f"received vectors must have length M={M}")
    g = gram_stats(design, sigma2)
    n1, n2, r = receive_statistics(y1, y2)
    obj = ncml_objective(n1, n2, r, g.a, g.b, ucset.sum_points, M)
    c_hat = ucset.sum_points[int(np.argmin(obj))]
    sub_idx = decompose_indices(c_hat, ucset.K, ucset.d)
    word = indices_to_bits(sub_idx[_sub_of_user(design)])
    return complex(c_hat), word


def detect_ncml_general(Y, codebook, beta, sigma2):
    """Generic noncoherent ML detector over an arbitrary ``K x T`` codebook.

    Minimizes ``y^H R^-1 y + ln det R`` with ``R = I_M kron (X^H D X +
    sigma2 I)``; the Kronecker structure is exploited as
    ``sum_m conj(Y_m)^H A^-1 conj(Y_m) = tr(A^-1 Y^H Y)``.
    """
    Y = np.asarray(Y)
    if Y.ndim != 2:
        raise ValueError("Y must be an M x T matrix")
    M, T = Y.shape
    beta = np.asarray(beta, dtype=float)
    if beta.ndim == 2:
        beta = np.diag(beta)
    codebook = list(codebook)
    if not codebook:
        raise ValueError("codebook is empty")
    S = Y.conj().T @ Y
    best, best_val = 0, np.inf
    for i, X in enumerate(codebook):
        X = np.asarray(X)
        if X.shape[1] != T:
            raise ValueError(f"codeword {i} has {X.shape[1]} slots, Y has {T}")
        A = X.conj().T @ (beta[:, None] * X) + sigma2 * np.eye(T)
        try:
            L = np.linalg.cholesky(A)
        except np.linalg.LinAlgError as exc:
            raise InternalConsistencyError(f"candidate {i} Gram matrix is singular") from exc
        logdet = 2.0 * np.sum(np.log(np.diag(L).real))
        quad = np.trace(np.linalg.solve(A, S)).real
        val = quad + M * logdet
        if val < best_val:
            best, best_val = i, val
    return best


def kl_from_gram(a, b, c, at, bt, ct):
    """Single-antenna KL distance between zero-mean Gaussians with 2x2
    covariances ``[[a, c], [c*, b]]`` (true) and ``[[at, ct], [ct*, bt]]``."""
    det = a * b - (c * np.conj(c)).real
    det_t = at * bt - (ct * np.conj(ct)).real
    trace = (a * bt + b * at - 2.0 * (c * np.conj(ct)).real) / det_t
    return trace - np.log(det / det_t) - 2.0


def kl_distance(X, Xt, beta, sigma2, M=1):
    """KL distance between the receptions induced by ``X`` and ``Xt``."""
    X = np.asarray(X)
    Xt = np.asarray(Xt)
    beta = np.asarray(beta, dtype=float)
    if beta.ndim == 2:
        beta = np.diag(beta)
    if X.shape != Xt.shape or X.ndim != 2 or X.shape[1] != 2 or X.shape[0] != beta.size:
        raise ValueError(f"inconsistent shapes X {X.shape}, Xt {Xt.shape}, beta {beta.shape}")
    value = float(kl_from_gram(*gram_entries(X, beta, sigma2), *gram_entries(Xt, beta, sigma2)))
    return KlPair(value=value, value_M=M * value, M=M)


MIN_KL_MAX_K = 6


def pairwise_kl(design, profiles, sigma2, ucset=None):
    """Full ``4**K x 4**K`` table; entry ``[i, j]`` is KL(codeword i || codeword j)."""
    if ucset is None:
        ucset = design.constellation()
    a, b, c = gram_entries(codebook(design, profiles, ucset), _betas(profiles), sigma2)
    return kl_from_gram(a[:, None], b[:, None], c[:, None], a[None, :], b[None, :], c[None, :]), c


def min_kl_over_codebook(design, profiles, sigma2, ucset=None):
    """Exhaustive minimum KL over ordered pairs of distinct codewords.

    Returns ``(value, (c, c_tilde))``.
    """
    if design.K > MIN_KL_MAX_K:
        raise UnsupportedSize(f"exhaustive KL scan supports K <= {MIN_KL_MAX_K}")
    if ucset is None:
        ucset = design.constellation()
    a, b, c = gram_entries(codebook(design, profiles, ucset), _betas(profiles), sigma2)
    n = c.size
    best, pair = np.inf, None
    chunk = max(1, 2 ** 22 // n)
    for start in range(0, n, chunk):
        rows = slice(start, min(n, start + chunk))
        table = kl_from_gram(a[rows, None], b[rows, None], c[rows, None],
                             a[None, :], b[None, :], c[None, :])
        local = np.arange(rows.start, rows.stop)
        table[local - start, local] = np.inf
        flat = int(np.argmin(table))
        i, j = divmod(flat, n)
        if table[i, j] < best:
            best, pair = float(table[i, j]), (complex(c[start + i]), complex(c[j]))
    return best, pair
