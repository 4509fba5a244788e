"""State-space models, stability, norms and responses.

Models are (A, B, C) triples with no feedthrough, tagged continuous or
discrete.  Transfer functions are evaluated by linear solves, never by
forming an explicit inverse; discrete models are evaluated on the unit
circle z = e^{j theta}.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import matkernel
from .errors import DimensionError, NumericError, SingularMatrixError, UnstableSystemError

__all__ = [
    "StateSpaceModel",
    "FrequencyGrid",
    "log_grid",
    "default_grid",
    "is_stable",
    "transfer_eval",
    "h2_norm_gramian",
    "h2_norm_frequency",
    "hinf_estimate",
    "impulse_snapshots",
    "adjoint_model",
    "difference_model",
]

CONTINUOUS = "continuous"
DISCRETE = "discrete"


@dataclass
class StateSpaceModel:
    """LTI system  dx = A x + B u,  y = C x  (continuous or discrete)."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    time_domain: str = CONTINUOUS

    def __post_init__(self):
        self.a = matkernel.as_complex(self.a)
        self.b = matkernel.as_complex(self.b)
        self.c = matkernel.as_complex(self.c)
        n = self.a.shape[0]
        if self.a.shape[1] != n:
            raise DimensionError("state matrix must be square")
        if self.b.shape[0] != n:
            raise DimensionError(f"input matrix must have {n} rows")
        if self.c.shape[1] != n:
            raise DimensionError(f"output matrix must have {n} columns")
        if self.time_domain not in (CONTINUOUS, DISCRETE):
            raise ValueError(f"unknown time domain {self.time_domain!r}")

    @property
    def n(self):
        return self.a.shape[0]

    @property
    def q(self):
        return self.b.shape[1]

    @property
    def p(self):
        return self.c.shape[0]

    @property
    def is_real(self):
        return not (
            np.any(self.a.imag) or np.any(self.b.imag) or np.any(self.c.imag)
        )


@dataclass
class FrequencyGrid:
    """Strictly increasing positive radian frequencies."""

    points: np.ndarray
    spacing_tag: str = "log"

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 1 or self.points.size == 0:
            raise DimensionError("frequency grid must be a nonempty vector")
        if np.any(self.points <= 0) or np.any(np.diff(self.points) <= 0):
            raise ValueError("frequencies must be positive and strictly increasing")


def log_grid(lo=1e-3, hi=1e3, count=400):
    return FrequencyGrid(np.logspace(np.log10(lo), np.log10(hi), count), "log")


def default_grid():
    """400 log-spaced points in [1e-3, 1e3] rad/s."""
    return log_grid()


def is_stable(m):
    """Hurwitz test (continuous) or spectral-radius test (discrete)."""
    lam = matkernel.eigvals(m.a)
    if m.time_domain == CONTINUOUS:
        return bool(np.max(lam.real) < 0.0)
    return bool(np.max(np.abs(lam)) < 1.0)


def transfer_eval(m, s):
    """Evaluate G(s) = C (sI - A)^{-1} B by linear solve."""
    shifted = s * np.eye(m.n, dtype=np.complex128) - m.a
    try:
        x = np.linalg.solve(shifted, m.b)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"s={s} is an eigenvalue of A") from exc
    g = m.c @ x
    if not np.all(np.isfinite(g)):
        raise SingularMatrixError(f"s={s} is numerically an eigenvalue of A")
    return g


def _eval_points(m, grid):
    """Evaluation points on the imaginary axis / unit circle for `grid`."""
    if m.time_domain == CONTINUOUS:
        return 1j * grid.points
    theta = grid.points[grid.points <= np.pi]
    if theta.size == 0:
        raise ValueError("discrete-time grid has no points in (0, pi]")
    return np.exp(1j * theta)


def _transfer_batch(m, s_values):
    """Stack of G(s) over the 1-D array `s_values` (batched solve)."""
    s = np.asarray(s_values, dtype=np.complex128)
    eye = np.eye(m.n, dtype=np.complex128)
    shifted = s[:, None, None] * eye - m.a
    x = np.linalg.solve(shifted, np.broadcast_to(m.b, (s.size, m.n, m.q)))
    return m.c @ x


def h2_norm_gramian(m, w, rel_tol=1e-8):
    """H2 norm from gramians: sqrt(tr(C Wc C*)).

    Cross-checks the dual form sqrt(tr(B* Wo B)) and raises if the two
    disagree by more than `rel_tol` relatively.
    """
    if not is_stable(m):
        raise UnstableSystemError("H2 norm undefined for unstable systems")
    from_c = np.trace(m.c @ w.w_c @ m.c.conj().T).real
    from_b = np.trace(m.b.conj().T @ w.w_o @ m.b).real
    scale = max(abs(from_c), abs(from_b), 1e-300)
    if abs(from_c - from_b) > rel_tol * scale:
        raise NumericError(
            f"gramian H2 formulas disagree: {from_c} vs {from_b}"
        )
    return float(np.sqrt(max(from_c, 0.0)))


def h2_norm_frequency(m, grid=None):
    """H2 norm by trapezoidal quadrature of the frequency-domain integral.

    Continuous systems integrate (1/2 pi) tr(G(jw)* G(jw)) over the real
    line; real-coefficient systems use conjugate symmetry and integrate the
    positive half twice.  Discrete systems integrate over the unit circle.
    """
    if not is_stable(m):
        raise UnstableSystemError("H2 norm undefined for unstable systems")
    if grid is None:
        grid = default_grid()

    if m.time_domain == CONTINUOUS:
        omega = grid.points
        if m.is_real:
            nodes = np.concatenate(([0.0], omega))
            sym = 2.0
        else:
            nodes = np.concatenate((-omega[::-1], [0.0], omega))
            sym = 1.0
        g = _transfer_batch(m, 1j * nodes)
        integrand = np.sum(np.abs(g) ** 2, axis=(1, 2))
        val = sym * np.trapezoid(integrand, nodes) / (2.0 * np.pi)
    else:
        theta = grid.points[grid.points <= np.pi]
        if m.is_real:
            nodes = np.concatenate(([0.0], theta, [np.pi] if theta[-1] < np.pi else []))
            sym = 2.0
        else:
            pos = np.concatenate(([0.0], theta))
            nodes = np.concatenate((-pos[:0:-1], pos))
            sym = 1.0
        g = _transfer_batch(m, np.exp(1j * nodes))
        integrand = np.sum(np.abs(g) ** 2, axis=(1, 2))
        val = sym * np.trapezoid(integrand, nodes) / (2.0 * np.pi)
    return float(np.sqrt(max(val, 0.0)))


def hinf_estimate(m, grid=None):
    """Grid estimate of the H-infinity norm (a lower bound on the truth).

    Takes the maximum over the grid of the largest singular value of G; for
    complex-coefficient systems negative frequencies are scanned as well.
    """
    if grid is None:
        grid = default_grid()
    if m.time_domain == CONTINUOUS:
        omega = grid.points
        if not m.is_real:
            omega = np.concatenate((-omega[::-1], [0.0], omega))
        else:
            omega = np.concatenate(([0.0], omega))
        pts = 1j * omega
    else:
        theta = grid.points[grid.points <= np.pi]
        theta = np.concatenate(([0.0], theta))
        if not m.is_real:
            theta = np.concatenate((-theta[:0:-1], theta))
        pts = np.exp(1j * theta)
    g = _transfer_batch(m, pts)
    return float(np.linalg.svd(g, compute_uv=False)[:, 0].max())


def impulse_snapshots(m, dt, steps):
    """Impulse-response snapshots of the direct and adjoint systems.

    Direct snapshots are e^{A k dt} B, adjoint snapshots e^{A* k dt} C*,
    for k = 0..steps-1, returned as n x (q*steps) and n x (p*steps) block
    matrices together with trapezoidal quadrature weights.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if steps < 1:
        raise ValueError("need at least one snapshot")
    if not is_stable(m):
        raise UnstableSystemError("impulse snapshots require a stable system")
    prop = sla.expm(m.a * dt)
    direct = np.empty((m.n, m.q * steps), dtype=np.complex128)
    adjoint = np.empty((m.n, m.p * steps), dtype=np.complex128)
    xd = m.b.copy()
    xa = m.c.conj().T.copy()
    for k in range(steps):
        direct[:, k * m.q : (k + 1) * m.q] = xd
        adjoint[:, k * m.p : (k + 1) * m.p] = xa
        if k + 1 < steps:
            xd = prop @ xd
            xa = prop.conj().T @ xa
    weights = np.full(steps, dt)
    if steps > 1:
        weights[0] = weights[-1] = 0.5 * dt
    else:
        weights[:] = dt
    return direct, adjoint, weights


def adjoint_model(m):
    """Adjoint realization (A*, C*, B*); swaps the roles of B and C."""
    return StateSpaceModel(
        m.a.conj().T, m.c.conj().T, m.b.conj().T, time_domain=m.time_domain
    )


def difference_model(m1, m2):
    """Parallel interconnection realizing G1(s) - G2(s)."""
    if m1.p != m2.p or m1.q != m2.q or m1.time_domain != m2.time_domain:
        raise DimensionError("models must share I/O dimensions and time domain")
    a = sla.block_diag(m1.a, m2.a)
    b = np.vstack([m1.b, m2.b])
    c = np.hstack([m1.c, -m2.c])
    return StateSpaceModel(a, b, c, time_domain=m1.time_domain)
