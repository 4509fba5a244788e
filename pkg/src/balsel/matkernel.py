"""Dense linear-algebra kernels over complex scalars.

All routines treat real matrices as complex with zero imaginary part, so a
single code path covers both fields and the adjoint is always the conjugate
transpose.  The column-pivoted QR is implemented from scratch because the
pivot sequence itself is the product the rest of the package consumes; SVD
and Schur are thin wrappers around LAPACK with the conventions used here.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import DimensionError, NumericError, SingularMatrixError

try:  # jit-compiled pivoting kernel; pure-numpy fallback below
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    _HAVE_NUMBA = False

__all__ = [
    "PivotedQR",
    "pivoted_qr",
    "svd",
    "schur",
    "logdet_abs",
    "matrix_exponential_apply",
]

# Relative threshold below which a downdated column norm is recomputed
# from scratch (classical downdating loses accuracy through cancellation).
_DOWNDATE_TOL = 1e-7


def as_complex(a):
    """Return `a` as a 2-D complex128 ndarray (copy only if needed)."""
    a = np.asarray(a)
    if a.ndim != 2:
        a = np.atleast_2d(a)
    return a.astype(np.complex128, copy=False)


@dataclass
class PivotedQR:
    """Result of a column-pivoted QR factorization V P = Q R.

    pivot_order is the full column permutation (pivoted columns first, in
    the order they were chosen); r_diagonal holds |R_ii| for the performed
    elimination steps and is non-increasing.
    """

    q_factor: np.ndarray
    r_factor: np.ndarray
    pivot_order: np.ndarray
    r_diagonal: np.ndarray
    n_steps: int = field(default=0)

    @property
    def permutation_matrix(self):
        n = self.pivot_order.size
        p = np.zeros((n, n))
        p[self.pivot_order, np.arange(n)] = 1.0
        return p


def _factor_loop_numpy(r, q, perm, allowed, norms2, ref2, steps, rdiag, tol):
    """Vectorized-numpy pivoting loop (fallback when numba is absent)."""
    m, n = r.shape
    nd = 0

    def swap(k, j):
        if j != k:
            for arr in (perm, norms2, ref2):
                arr[k], arr[j] = arr[j], arr[k]
            tmp = r[:, k].copy()
            r[:, k] = r[:, j]
            r[:, j] = tmp

    for k in range(steps):
        cand = np.nonzero(allowed[perm[k:]])[0]
        if cand.size == 0:
            break
        if k >= m:
            # rows exhausted: remaining residuals are exactly zero, so the
            # pivot order continues by the lowest-index rule alone
            swap(k, k + int(cand[np.argmin(perm[k + cand])]))
            rdiag[nd] = 0.0
            nd += 1
            continue
        cnorms = norms2[k + cand]
        best = cnorms.max()
        ties = cand[cnorms == best]
        swap(k, k + int(ties[np.argmin(perm[k + ties])]))

        x = r[k:, k]
        nx = np.sqrt(np.vdot(x, x).real)
        rdiag[nd] = nx
        nd += 1
        if nx > 0.0:
            phase = x[0] / abs(x[0]) if x[0] != 0.0 else 1.0
            beta = -phase * nx
            w = x.copy()
            w[0] -= beta
            tau = 2.0 / np.vdot(w, w).real
            wc = w.conj()
            # reflector is Hermitian: apply to R rows k.., accumulate into Q
            rblock = r[:, k:]
            rblock[k:] -= np.multiply.outer(tau * w, wc @ rblock[k:])
            q[:, k:] -= np.multiply.outer(q[:, k:] @ (tau * w), wc)
            # normalize the diagonal entry to be real nonnegative
            dphase = np.conj(beta) / nx
            r[k, k:] *= dphase
            q[:, k] *= np.conj(dphase)
            r[k, k] = nx

        if k + 1 < n:
            row = r[k, k + 1 :]
            norms2[k + 1 :] -= row.real**2 + row.imag**2
            tail_norms = norms2[k + 1 :]
            np.maximum(tail_norms, 0.0, out=tail_norms)
            stale = tail_norms <= tol * ref2[k + 1 :]
            if stale.any():
                cols = k + 1 + np.nonzero(stale)[0]
                blk = r[k + 1 :, cols]
                fresh = np.einsum("ij,ij->j", blk.real, blk.real) + np.einsum(
                    "ij,ij->j", blk.imag, blk.imag
                )
                norms2[cols] = fresh
                ref2[cols] = fresh
    return nd


if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _factor_loop_jit(r, q, perm, allowed, norms2, ref2, steps, rdiag, tol):
        m, n = r.shape
        nd = 0
        w = np.empty(m, np.complex128)
        for k in range(steps):
            # pivot: max residual norm among allowed, ties by lowest index
            j = -1
            best = -1.0
            for t in range(k, n):
                if not allowed[perm[t]]:
                    continue
                val = norms2[t] if k < m else 0.0
                if j < 0 or val > best or (val == best and perm[t] < perm[j]):
                    best = val
                    j = t
            if j < 0:
                break
            if j != k:
                perm[k], perm[j] = perm[j], perm[k]
                norms2[k], norms2[j] = norms2[j], norms2[k]
                ref2[k], ref2[j] = ref2[j], ref2[k]
                for i in range(m):
                    tmp = r[i, k]
                    r[i, k] = r[i, j]
                    r[i, j] = tmp
            if k >= m:
                rdiag[nd] = 0.0
                nd += 1
                continue

            acc = 0.0
            for i in range(k, m):
                z = r[i, k]
                acc += z.real * z.real + z.imag * z.imag
            nx = np.sqrt(acc)
            rdiag[nd] = nx
            nd += 1
            if nx > 0.0:
                x0 = r[k, k]
                phase = x0 / abs(x0) if x0 != 0.0 else complex(1.0)
                beta = -phase * nx
                wnorm2 = 0.0
                for i in range(k, m):
                    w[i] = r[i, k]
                w[k] -= beta
                for i in range(k, m):
                    wnorm2 += w[i].real * w[i].real + w[i].imag * w[i].imag
                tau = 2.0 / wnorm2
                # reflector is Hermitian: update R rows k.., fold into Q
                for col in range(k, n):
                    dot = complex(0.0)
                    for i in range(k, m):
                        dot += np.conj(w[i]) * r[i, col]
                    dot *= tau
                    for i in range(k, m):
                        r[i, col] -= w[i] * dot
                for row in range(m):
                    dot = complex(0.0)
                    for i in range(k, m):
                        dot += q[row, i] * w[i]
                    dot *= tau
                    for i in range(k, m):
                        q[row, i] -= dot * np.conj(w[i])
                # normalize the diagonal entry to be real nonnegative
                dphase = np.conj(beta) / nx
                for col in range(k, n):
                    r[k, col] *= dphase
                for row in range(m):
                    q[row, k] *= np.conj(dphase)
                r[k, k] = complex(nx)

            if k + 1 < m:
                for col in range(k + 1, n):
                    z = r[k, col]
                    upd = norms2[col] - (z.real * z.real + z.imag * z.imag)
                    if upd < 0.0:
                        upd = 0.0
                    if upd <= tol * ref2[col]:
                        acc = 0.0
                        for i in range(k + 1, m):
                            zz = r[i, col]
                            acc += zz.real * zz.real + zz.imag * zz.imag
                        upd = acc
                        ref2[col] = acc
                    norms2[col] = upd
            else:
                for col in range(k + 1, n):
                    norms2[col] = 0.0
        return nd


def pivoted_qr(v, forbidden=(), max_pivots=None):
    """Businger-Golub column-pivoted QR factorization of `v`.

    At each step the pivot is the residual column of largest 2-norm among
    the not-yet-chosen columns (exact float ties broken by lowest original
    column index).  Columns listed in `forbidden` (original indices) are
    never chosen as pivots but are still orthogonalized against the chosen
    ones, so the factorization V P = Q R remains exact.

    Parameters
    ----------
    v : (m, n) array_like
    forbidden : iterable of int, optional
        Original column indices excluded from pivoting.
    max_pivots : int, optional
        Choose at most this many pivots (default: as many as possible).
        The factorization is still completed with unpivoted reflections
        afterwards, so V P = Q R always holds with triangular R; only the
        first `n_steps` columns carry pivot semantics.

    Returns
    -------
    PivotedQR
    """
    v = as_complex(v)
    m, n = v.shape
    if m == 0 or n == 0:
        raise DimensionError("pivoted_qr requires a nonempty matrix")

    r = np.ascontiguousarray(v, dtype=np.complex128).copy()
    q = np.eye(m, dtype=np.complex128)
    perm = np.arange(n)
    allowed = np.ones(n, dtype=bool)
    for j in forbidden:
        allowed[j] = False

    norms2 = np.einsum("ij,ij->j", r.real, r.real) + np.einsum(
        "ij,ij->j", r.imag, r.imag
    )
    ref2 = norms2.copy()

    steps = n if max_pivots is None else min(max_pivots, n)
    rdiag = np.zeros(steps)
    loop = _factor_loop_jit if _HAVE_NUMBA else _factor_loop_numpy
    nd = loop(r, q, perm, allowed, norms2, ref2, steps, rdiag, _DOWNDATE_TOL)

    # the pivoted prefix may stop early (max_pivots, or allowed columns
    # exhausted); the remaining columns still need unpivoted reflections so
    # that V P = Q R holds with a triangular R
    for k in range(int(nd), min(m, n)):
        _reflect_column(r, q, k)

    return PivotedQR(
        q_factor=q,
        r_factor=np.triu(r),
        pivot_order=perm,
        r_diagonal=rdiag[:nd],
        n_steps=int(nd),
    )


def _reflect_column(r, q, k):
    """Apply one unpivoted Householder step at column k (updates r and q)."""
    m = r.shape[0]
    x = r[k:, k]
    nx = np.sqrt(np.vdot(x, x).real)
    if nx == 0.0:
        return
    phase = x[0] / abs(x[0]) if x[0] != 0.0 else 1.0
    beta = -phase * nx
    w = x.copy()
    w[0] -= beta
    tau = 2.0 / np.vdot(w, w).real
    wc = w.conj()
    r[k:, k:] -= np.multiply.outer(tau * w, wc @ r[k:, k:])
    q[:, k:] -= np.multiply.outer(q[:, k:] @ (tau * w), wc)
    dphase = np.conj(beta) / nx
    r[k, k:] *= dphase
    q[:, k] *= np.conj(dphase)
    r[k, k] = nx


def svd(a):
    """Singular value decomposition a = u @ diag(s) @ v*.

    Returns (u, s, v) with `v` (not its adjoint), s non-increasing.
    """
    a = as_complex(a)
    u, s, vh = np.linalg.svd(a, full_matrices=True)
    return u, s, vh.conj().T


def schur(a):
    """Complex Schur decomposition a = u @ t @ u* with t upper triangular."""
    a = as_complex(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError("schur requires a square matrix")
    try:
        t, u = sla.schur(a, output="complex")
    except sla.LinAlgError as exc:  # QR iteration failed to converge
        raise NumericError(f"schur iteration did not converge: {exc}") from exc
    return u, t


def eigvals(a):
    """Eigenvalues of a square matrix, via the complex Schur form."""
    _, t = schur(a)
    return np.diag(t)


def logdet_abs(a):
    """log|det(a)| via the diagonal of an (unpivoted) QR factorization."""
    a = as_complex(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError("logdet_abs requires a square matrix")
    rdiag = np.abs(np.diag(np.linalg.qr(a, mode="r")))
    if rdiag[0] == 0.0 or np.any(rdiag < 1e-14 * rdiag[0]):
        raise SingularMatrixError("matrix is singular to working precision")
    return float(np.sum(np.log(rdiag)))


def matrix_exponential_apply(a, t, x):
    """Evaluate e^{a t} x (scaling-and-squaring Pade expm, then apply)."""
    a = as_complex(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError("matrix exponential requires a square matrix")
    x = np.asarray(x, dtype=np.complex128)
    return sla.expm(a * t) @ x
