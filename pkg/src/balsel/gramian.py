"""Exact and empirical gramians; Lyapunov, Stein and Riccati solvers.

The matrix-equation solvers reduce to complex Schur form and back-substitute
column by column (Bartels-Stewart), so one triangular code path serves real
and complex systems alike.  The Riccati solver is Laub's ordered-Schur
method on the Hamiltonian matrix with one Newton refinement step when the
residual warrants it.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import matkernel, statespace
from .errors import (
    DimensionError,
    HorizonError,
    IllPosedError,
    SynthesisError,
    UnstableSystemError,
)

__all__ = [
    "GramianPair",
    "solve_lyapunov_continuous",
    "solve_stein",
    "compute_gramians",
    "empirical_gramians",
    "solve_care",
    "lyapunov_residual",
    "stein_residual",
    "care_residual",
]


@dataclass
class GramianPair:
    """Controllability/observability gramians with solver residuals."""

    w_c: np.ndarray
    w_o: np.ndarray
    residual_c: float
    residual_o: float
    source_tag: str = "exact"


def _hermitize(w):
    return 0.5 * (w + w.conj().T)


def _check_square_pair(a, m):
    a = matkernel.as_complex(a)
    m = matkernel.as_complex(m)
    n = a.shape[0]
    if a.shape[1] != n or m.shape != (n, n):
        raise DimensionError("coefficient and right-hand side must be square, same size")
    return a, m


def _real_if_real_inputs(w, *inputs):
    """Strip pure-roundoff imaginary parts when every input was real."""
    if any(np.any(x.imag) for x in inputs):
        return w
    return w.real.astype(np.complex128)


def solve_lyapunov_continuous(a, m):
    """Solve A W + W A* + M = 0 for Hurwitz A and Hermitian M."""
    a, m = _check_square_pair(a, m)
    n = a.shape[0]
    u, t = matkernel.schur(a)
    lam = np.diag(t)
    if np.max(lam.real) >= 0.0:
        raise UnstableSystemError("continuous Lyapunov equation needs Hurwitz A")
    pairs = lam[:, None] + lam.conj()[None, :]
    if np.min(np.abs(pairs)) <= 1e-12 * max(np.abs(lam).max(), 1.0):
        raise IllPosedError("eigenvalue pair lambda_i + conj(lambda_j) ~ 0")
    mt = -(u.conj().T @ m @ u)
    w = np.zeros((n, n), dtype=np.complex128)
    eye = np.eye(n)
    for k in range(n - 1, -1, -1):
        rhs = mt[:, k]
        if k + 1 < n:
            rhs = rhs - w[:, k + 1 :] @ t[k, k + 1 :].conj()
        w[:, k] = sla.solve_triangular(t + np.conj(t[k, k]) * eye, rhs)
    return _real_if_real_inputs(_hermitize(u @ w @ u.conj().T), a, m)


def solve_stein(a, m):
    """Solve A W A* - W + M = 0 for Schur-stable A and Hermitian M."""
    a, m = _check_square_pair(a, m)
    n = a.shape[0]
    u, t = matkernel.schur(a)
    lam = np.diag(t)
    if np.max(np.abs(lam)) >= 1.0:
        raise UnstableSystemError("Stein equation needs spectral radius < 1")
    prods = lam[:, None] * lam.conj()[None, :]
    if np.min(np.abs(1.0 - prods)) <= 1e-12:
        raise IllPosedError("eigenvalue product lambda_i * conj(lambda_j) ~ 1")
    mt = u.conj().T @ m @ u
    w = np.zeros((n, n), dtype=np.complex128)
    eye = np.eye(n)
    for k in range(n - 1, -1, -1):
        rhs = -mt[:, k]
        if k + 1 < n:
            rhs = rhs - t @ (w[:, k + 1 :] @ t[k, k + 1 :].conj())
        w[:, k] = sla.solve_triangular(np.conj(t[k, k]) * t - eye, rhs)
    return _real_if_real_inputs(_hermitize(u @ w @ u.conj().T), a, m)


def lyapunov_residual(a, w, m):
    num = np.linalg.norm(a @ w + w @ a.conj().T + m)
    den = max(np.linalg.norm(m), 1e-300)
    return float(num / den)


def stein_residual(a, w, m):
    num = np.linalg.norm(a @ w @ a.conj().T - w + m)
    den = max(np.linalg.norm(m), 1e-300)
    return float(num / den)


def compute_gramians(m):
    """Exact controllability and observability gramians of a stable model."""
    if not statespace.is_stable(m):
        raise UnstableSystemError("gramians are defined for stable systems only")
    bb = m.b @ m.b.conj().T
    cc = m.c.conj().T @ m.c
    if m.time_domain == statespace.CONTINUOUS:
        w_c = solve_lyapunov_continuous(m.a, bb)
        w_o = solve_lyapunov_continuous(m.a.conj().T, cc)
        res_c = lyapunov_residual(m.a, w_c, bb)
        res_o = lyapunov_residual(m.a.conj().T, w_o, cc)
    else:
        w_c = solve_stein(m.a, bb)
        w_o = solve_stein(m.a.conj().T, cc)
        res_c = stein_residual(m.a, w_c, bb)
        res_o = stein_residual(m.a.conj().T, w_o, cc)
    return GramianPair(w_c, w_o, res_c, res_o, source_tag="exact")


def empirical_gramians(direct, adjoint, weights, decay_tol=1e-6, decay_hard=1e-3):
    """Quadrature gramians from impulse-response snapshot blocks.

    The snapshot blocks come from `statespace.impulse_snapshots`.  The final
    block must have decayed relative to the initial one: below `decay_hard`
    relative norm is required (HorizonError otherwise), below `decay_tol`
    is expected (a warning is emitted in between).
    """
    direct = matkernel.as_complex(direct)
    adjoint = matkernel.as_complex(adjoint)
    weights = np.asarray(weights, dtype=float)
    steps = weights.size
    if direct.shape[1] % steps or adjoint.shape[1] % steps:
        raise DimensionError("snapshot count inconsistent with weights")
    q = direct.shape[1] // steps
    p = adjoint.shape[1] // steps

    for name, x, width in (("direct", direct, q), ("adjoint", adjoint, p)):
        first = np.linalg.norm(x[:, :width])
        last = np.linalg.norm(x[:, -width:])
        if first > 0 and last > decay_hard * first:
            raise HorizonError(
                f"{name} snapshots decayed only to {last / first:.2e} of the "
                f"initial norm; lengthen the horizon"
            )
        if first > 0 and last > decay_tol * first:
            warnings.warn(
                f"{name} snapshot horizon is marginal "
                f"(relative final norm {last / first:.2e})",
                stacklevel=2,
            )

    w_c = (direct * np.repeat(weights, q)) @ direct.conj().T
    w_o = (adjoint * np.repeat(weights, p)) @ adjoint.conj().T
    return GramianPair(
        _hermitize(w_c), _hermitize(w_o), np.nan, np.nan, source_tag="empirical"
    )


def care_residual(a, b, q, r, x):
    """Relative residual of the continuous algebraic Riccati equation."""
    gx = b @ np.linalg.solve(r, b.conj().T @ x)
    res = a.conj().T @ x + x @ a - x @ gx + q
    den = max(
        np.linalg.norm(q),
        2.0 * np.linalg.norm(a.conj().T @ x),
        np.linalg.norm(x @ gx),
        1e-300,
    )
    return float(np.linalg.norm(res) / den)


def solve_care(a, b, q_weight, r_weight, refine_tol=1e-8):
    """Stabilizing solution of A* X + X A - X B R^{-1} B* X + Q = 0.

    Uses the ordered complex Schur form of the Hamiltonian matrix (stable
    eigenvalues first); if the relative residual exceeds `refine_tol`, one
    Newton step (a Lyapunov solve on the closed loop) refines the iterate.
    """
    a = matkernel.as_complex(a)
    b = matkernel.as_complex(b)
    q_weight = matkernel.as_complex(q_weight)
    r_weight = matkernel.as_complex(r_weight)
    n = a.shape[0]
    if b.shape[0] != n or q_weight.shape != (n, n):
        raise DimensionError("incompatible Riccati dimensions")

    g = b @ np.linalg.solve(r_weight, b.conj().T)
    ham = np.block([[a, -g], [-q_weight, -a.conj().T]])
    t, u, sdim = sla.schur(ham, output="complex", sort=lambda z: z.real < 0.0)
    if sdim != n:
        raise SynthesisError(
            f"Hamiltonian has {sdim} stable eigenvalues, expected {n}: "
            "no stabilizing solution"
        )
    u11 = u[:n, :n]
    u21 = u[n:, :n]
    try:
        x = np.linalg.solve(u11.T, u21.T).T
    except np.linalg.LinAlgError as exc:
        raise SynthesisError("ordered-Schur basis is singular") from exc
    x = _hermitize(x)

    if care_residual(a, b, q_weight, r_weight, x) > refine_tol:
        gx = b @ np.linalg.solve(r_weight, b.conj().T @ x)
        a_cl = a - gx
        res = a.conj().T @ x + x @ a - x @ gx + q_weight
        try:
            delta = solve_lyapunov_continuous(a_cl.conj().T, res)
            x = _hermitize(x + delta)
        except (UnstableSystemError, IllPosedError):
            pass  # keep the unrefined iterate

    a_cl = a - b @ np.linalg.solve(r_weight, b.conj().T @ x)
    if np.max(matkernel.eigvals(a_cl).real) >= 0.0:
        raise SynthesisError("Riccati closed loop is not stable")
    return _real_if_real_inputs(x, a, b, q_weight, r_weight)
