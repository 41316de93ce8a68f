"""Reputation index built from popularity counts.

Counts (upvotes, thanks, favorites) are log10(x+1)-transformed, factored by
rank-1 non-negative matrix factorization, and the user-side factor is
min-max scaled to [0, 100].  The factorization uses multiplicative updates
for the Frobenius loss initialized from the leading singular pair estimate,
which makes the rank-1 result deterministic and near-optimal: for a
non-negative matrix the best rank-1 approximation is itself non-negative,
so the achieved error can be checked against an SVD oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

_EPS = 1e-12


@dataclass(frozen=True)
class PopularityRecord:
    """Per-user non-negative popularity counts."""

    user: int
    upvotes: int
    thanks: int
    favorites: int

    def __post_init__(self):
        if min(self.upvotes, self.thanks, self.favorites) < 0:
            raise ValueError(f"negative count for user {self.user}")


@dataclass(frozen=True)
class NmfResult:
    W: np.ndarray
    H: np.ndarray
    reconstruction_error: float
    iterations: int
    error_trace: tuple[float, ...] = ()


def log_transform(x: float) -> float:
    """log10(x + 1); the +1 keeps zero counts finite."""
    if x < 0:
        raise ValueError("counts must be non-negative")
    return math.log10(x + 1)


def build_matrix(records: Sequence[PopularityRecord]) -> np.ndarray:
    """n-by-3 log-transformed count matrix, rows in input order."""
    V = np.empty((len(records), 3), dtype=np.float64)
    for i, r in enumerate(records):
        V[i, 0] = log_transform(r.upvotes)
        V[i, 1] = log_transform(r.thanks)
        V[i, 2] = log_transform(r.favorites)
    return V


def _leading_pair(V: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Leading singular triple (u, v, sigma) by power iteration on V^T V.

    For non-negative V the leading pair can be taken entrywise
    non-negative, so it doubles as a feasible rank-1 NMF starting point.
    """
    m = V.shape[1]
    G = V.T @ V
    v = np.full(m, 1.0 / math.sqrt(m))
    for _ in range(200):
        w = G @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return np.zeros(V.shape[0]), np.zeros(m), 0.0
        w /= norm
        if np.linalg.norm(w - v) < 1e-15:
            v = w
            break
        v = w
    v = np.abs(v)
    sigma = math.sqrt(max(float(v @ (G @ v)), 0.0))
    if sigma == 0.0:
        return np.zeros(V.shape[0]), v, 0.0
    u = (V @ v) / sigma
    u = np.abs(u)
    return u, v, sigma


def nmf(V: np.ndarray, r: int = 1, tol: float = 1e-10, max_iter: int = 10_000) -> NmfResult:
    """Non-negative factorization V ~ W @ H minimizing Frobenius error.

    Stops when the relative error improvement drops below ``tol`` or after
    ``max_iter`` multiplicative updates.  An all-zero input returns zero
    factors immediately.  Only r=1 carries the near-optimality guarantee
    (higher ranks run the same updates from a deterministic perturbed
    start, without any optimality claim).
    """
    V = np.asarray(V, dtype=np.float64)
    if V.ndim != 2:
        raise ValueError("V must be a 2-d matrix")
    if r < 1:
        raise ValueError("r must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if V.size and V.min() < 0:
        raise ValueError("V must be non-negative")
    n, m = V.shape

    if not V.any():
        return NmfResult(
            W=np.zeros((n, r)),
            H=np.zeros((r, m)),
            reconstruction_error=0.0,
            iterations=0,
            error_trace=(),
        )

    u, v, sigma = _leading_pair(V)
    s = math.sqrt(sigma)
    W = np.tile((u * s)[:, None], (1, r))
    H = np.tile((v * s)[None, :], (r, 1))
    if r > 1:
        # deterministic symmetry breaking between components
        scale = 1.0 + np.arange(r) / (2.0 * r)
        W = W / scale[None, :]
        H = H * scale[:, None]
        H *= 1.0 / r

    def frob_error() -> float:
        return float(np.linalg.norm(V - W @ H))

    # relative guard keeps the update map equivariant under V -> c*V
    eps = _EPS * float(V.max())
    err = frob_error()
    trace = [err]
    it = 0
    for it in range(1, max_iter + 1):
        W *= (V @ H.T) / (W @ (H @ H.T) + eps)
        H *= (W.T @ V) / ((W.T @ W) @ H + eps)
        new_err = frob_error()
        trace.append(new_err)
        improvement = err - new_err
        if improvement < tol * max(err, _EPS):
            err = min(err, new_err)
            break
        err = new_err
    return NmfResult(
        W=W,
        H=H,
        reconstruction_error=frob_error(),
        iterations=it,
        error_trace=tuple(trace),
    )


def index_from_matrix(V: np.ndarray, tol: float = 1e-10, max_iter: int = 10_000) -> np.ndarray:
    """[0, 100]-scaled user factor of the rank-1 factorization of ``V``.

    A constant factor column (including the all-zero case) maps to all
    zeros rather than dividing by zero.
    """
    res = nmf(V, r=1, tol=tol, max_iter=max_iter)
    w = res.W[:, 0]
    lo = float(w.min())
    hi = float(w.max())
    if hi == lo:
        return np.zeros(len(w))
    return 100.0 * ((w - lo) / (hi - lo))


def social_reputation_index(records: Sequence[PopularityRecord]) -> np.ndarray:
    """Full pipeline: log counts -> rank-1 factor -> [0, 100] scaling."""
    if not records:
        raise ValueError("need at least one record")
    return index_from_matrix(build_matrix(records))


def ensemble_popularity(records: Sequence[PopularityRecord]) -> np.ndarray:
    """Per-user mean of the three log-transformed counts."""
    if not records:
        raise ValueError("need at least one record")
    return build_matrix(records).mean(axis=1)
