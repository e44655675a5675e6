"""Dense real linear algebra used by the Hankel and synthesis code.

Matrices and vectors are plain float64 ``numpy`` arrays.  The SVD is a
one-sided (Hestenes) Jacobi iteration, which is accurate to working
precision on the small matrices the synthesis step produces; blocks wider
than ``JACOBI_MAX_DIM`` columns go to LAPACK instead.
"""
from __future__ import annotations

import numpy as np

from .errors import InputError, InsufficientTerms, NotInSpan, NotRankOne, ZeroMatrix

DEFAULT_RANK_TOL = 1e-9
JACOBI_MAX_DIM = 48
_EPS = np.finfo(float).eps


def as_matrix(m) -> np.ndarray:
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise InputError(f"expected a non-empty 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix has non-finite entries")
    return a


def as_vector(v) -> np.ndarray:
    a = np.array(v, dtype=float)
    if a.ndim != 1 or a.shape[0] == 0:
        raise InputError(f"expected a non-empty vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError("vector has non-finite entries")
    return a


def _complete_basis(u: np.ndarray, k: int) -> np.ndarray:
    """Replace the columns of ``u`` from ``k`` on by an orthonormal completion."""
    m = u.shape[0]
    basis = [u[:, i] for i in range(k)]
    for e in np.eye(m):
        if len(basis) == u.shape[1]:
            break
        v = e.copy()
        for _ in range(2):  # re-orthogonalize once for stability
            for b in basis:
                v -= (b @ v) * b
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            basis.append(v / norm)
    return np.column_stack(basis)


def _jacobi(a: np.ndarray, max_sweeps: int = 60):
    """One-sided Jacobi on a tall matrix (rows >= cols)."""
    a = a.copy()
    n = a.shape[1]
    v = np.eye(n)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                ap = a[:, p]
                aq = a[:, q]
                alpha = ap @ ap
                beta = aq @ aq
                gamma = ap @ aq
                if alpha == 0.0 or beta == 0.0 or abs(gamma) <= _EPS * np.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.hypot(1.0, t)
                s = c * t
                a[:, [p, q]] = np.column_stack((c * ap - s * aq, s * ap + c * aq))
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
        if not rotated:
            break
    sigma = np.linalg.norm(a, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    a = a[:, order]
    v = v[:, order]
    live = sigma > (sigma[0] if sigma.size else 0.0) * _EPS * a.shape[0]
    k = int(np.count_nonzero(live))
    u = np.zeros_like(a)
    u[:, :k] = a[:, :k] / sigma[:k]
    if k < n:
        u = _complete_basis(u, k)
    return u, sigma, v


def svd(m, method: str = "auto"):
    """Thin SVD ``m = U @ diag(sigma) @ V.T`` with sigma sorted descending.

    ``method`` is ``"jacobi"``, ``"lapack"`` or ``"auto"`` (Jacobi up to
    ``JACOBI_MAX_DIM`` columns of the reduced problem).
    """
    a = as_matrix(m)
    if not np.any(a):
        raise ZeroMatrix()
    rows, cols = a.shape
    if method == "auto":
        method = "jacobi" if min(rows, cols) <= JACOBI_MAX_DIM else "lapack"
    if method == "lapack":
        u, sigma, vt = np.linalg.svd(a, full_matrices=False)
        return u, sigma, vt.T
    if method != "jacobi":
        raise InputError(f"unknown SVD method {method!r}")
    if rows < cols:
        v, sigma, u = svd(a.T, method="jacobi")
        return u, sigma, v
    if rows > cols:
        # R keeps the singular values; Jacobi then works on a square problem
        q, r = np.linalg.qr(a)
        ur, sigma, v = _jacobi(r)
        return q @ ur, sigma, v
    return _jacobi(a)


def singular_values(m) -> np.ndarray:
    a = as_matrix(m)
    if not np.any(a):
        return np.zeros(min(a.shape))
    return svd(a)[1]


def numerical_rank(m, rel_tol: float = DEFAULT_RANK_TOL) -> int:
    """Number of singular values above ``rel_tol * sigma_1``."""
    if rel_tol <= 0:
        raise InputError("rel_tol must be positive")
    sigma = singular_values(m)
    if sigma[0] == 0.0:
        return 0
    return int(np.count_nonzero(sigma > rel_tol * sigma[0]))


def rank1_factor(m, rel_tol: float = DEFAULT_RANK_TOL):
    """Return ``(x, y)`` with ``m == outer(x, y)`` for a rank-one ``m``."""
    a = as_matrix(m)
    rank = numerical_rank(a, rel_tol)
    if rank != 1:
        raise NotRankOne(rank)
    u, sigma, v = svd(a)
    x = np.sqrt(sigma[0]) * u[:, 0]
    y = np.sqrt(sigma[0]) * v[:, 0]
    if x[np.argmax(np.abs(x))] < 0:
        x, y = -x, -y
    return x, y


def svd_expansion(m, terms: int, rel_tol: float = DEFAULT_RANK_TOL):
    """Split ``m`` into ``terms`` outer products ``p_k q_k^T``.

    Each singular value is shared evenly: ``p_k = sqrt(s_k) u_k`` and
    ``q_k = sqrt(s_k) v_k``.  Terms past ``min(m.shape)`` are zero vectors.
    """
    a = as_matrix(m)
    if terms < 1:
        raise InputError("terms must be positive")
    rank = numerical_rank(a, rel_tol)
    if terms < rank:
        raise InsufficientTerms(terms, rank)
    rows, cols = a.shape
    pairs = []
    if rank == 0:
        return [(np.zeros(rows), np.zeros(cols)) for _ in range(terms)]
    u, sigma, v = svd(a)
    for k in range(terms):
        if k < sigma.size:
            root = np.sqrt(sigma[k])
            pairs.append((root * u[:, k], root * v[:, k]))
        else:
            pairs.append((np.zeros(rows), np.zeros(cols)))
    return pairs


def solve_in_span(basis_rows, target, rel_tol: float = 1e-8, label=None) -> np.ndarray:
    """Minimum-norm ``z`` with ``sum_k z[k] * basis_rows[k] == target``.

    Raises NotInSpan when the least-squares residual exceeds
    ``rel_tol * (1 + max|target|)`` in the max norm.
    """
    b = as_matrix(basis_rows)
    t = np.asarray(target, dtype=float)
    if t.shape != (b.shape[1],):
        raise InputError(f"target has shape {t.shape}, basis rows have length {b.shape[1]}")
    z, *_ = np.linalg.lstsq(b.T, t, rcond=None)
    residual = float(np.max(np.abs(b.T @ z - t))) if t.size else 0.0
    if residual > rel_tol * (1.0 + float(np.max(np.abs(t), initial=0.0))):
        raise NotInSpan(residual, label)
    return z


def unit_matrix(n: int, i: int, j: int) -> np.ndarray:
    """The n-by-n matrix with a single 1 at 0-based entry ``(i, j)``."""
    a = np.zeros((n, n))
    a[i, j] = 1.0
    return a
