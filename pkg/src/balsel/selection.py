"""Greedy sensor/actuator subset selection on balanced modes.

Sensors are the first r pivots of a column-pivoted QR of (C Psi_r)*, and
actuators the first r pivots of a pivoted QR of Phi_r* B; both greedily
maximize the volume of the selected submatrix.  The bound evaluators give
a priori guarantees for the resulting interpolation error and log-det
objective in terms of the discarded Hankel singular values.
"""

from dataclasses import dataclass

import numpy as np

from . import matkernel
from .errors import (
    DimensionError,
    FeasibilityError,
    NumericError,
    RankError,
    SingularMatrixError,
)

__all__ = [
    "SelectionResult",
    "ProjectionOperator",
    "select_sensors",
    "select_actuators",
    "select_noncollocated",
    "select_subsets",
    "sensor_projection",
    "actuator_projection",
    "project_state",
    "pivot_inverse_norm_bound",
    "sensor_state_error_bound",
    "actuator_state_error_bound",
    "sensor_logdet_lower_bound",
    "actuator_logdet_lower_bound",
]


@dataclass
class SelectionResult:
    """Ordered sensor/actuator index sets with pivot diagnostics.

    gamma/beta are in greedy pivot order (most important first); the
    r_diag_* sequences hold |T_ii| from the two factorizations.
    """

    gamma: np.ndarray
    beta: np.ndarray
    r_diag_sensors: np.ndarray
    r_diag_actuators: np.ndarray
    collocation_forbidden: bool = False


@dataclass
class ProjectionOperator:
    """Oblique interpolation projector basis (sampled_rows)^{-1} sampler."""

    basis: np.ndarray
    sampler: np.ndarray
    sampled_rows: np.ndarray
    side_tag: str

    @property
    def condition(self):
        return float(np.linalg.cond(self.sampled_rows))


def _check_rank(mat, r, what):
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv.size < r or sv[r - 1] <= 1e-12 * max(sv[0], 1e-300):
        raise RankError(f"{what} has numerical rank below {r}")


def select_sensors(c, psi_r):
    """Greedy sensor rows: first r pivots of the pivoted QR of (C Psi_r)*.

    Returns (gamma, r_diag) with gamma in pivot order.
    """
    c = matkernel.as_complex(c)
    psi_r = matkernel.as_complex(psi_r)
    p = c.shape[0]
    r = psi_r.shape[1]
    if p < r:
        raise DimensionError(f"need at least r={r} candidate sensors, have {p}")
    cp = c @ psi_r
    _check_rank(cp, r, "C Psi_r")
    fac = matkernel.pivoted_qr(cp.conj().T, max_pivots=r)
    return fac.pivot_order[:r].copy(), fac.r_diagonal[:r].copy()


def select_actuators(b, phi_r):
    """Greedy actuator columns: first r pivots of the pivoted QR of Phi_r* B."""
    b = matkernel.as_complex(b)
    phi_r = matkernel.as_complex(phi_r)
    q = b.shape[1]
    r = phi_r.shape[1]
    if q < r:
        raise DimensionError(f"need at least r={r} candidate actuators, have {q}")
    pb = phi_r.conj().T @ b
    _check_rank(pb, r, "Phi_r* B")
    fac = matkernel.pivoted_qr(pb, max_pivots=r)
    return fac.pivot_order[:r].copy(), fac.r_diagonal[:r].copy()


def select_noncollocated(
    c, b, psi_r, phi_r, sensor_locations=None, actuator_locations=None
):
    """Select actuators first, then sensors excluding actuator locations.

    Location maps translate actuator/sensor indices to shared spatial
    location ids (identity by default, covering the pointwise B = C = I
    case).  Sensor candidates whose location coincides with a chosen
    actuator are skipped by the pivoting but still orthogonalized, so the
    sensor factorization stays valid.
    """
    c = matkernel.as_complex(c)
    b = matkernel.as_complex(b)
    psi_r = matkernel.as_complex(psi_r)
    phi_r = matkernel.as_complex(phi_r)
    r = psi_r.shape[1]
    p = c.shape[0]
    if sensor_locations is None:
        sensor_locations = np.arange(p)
    if actuator_locations is None:
        actuator_locations = np.arange(b.shape[1])
    sensor_locations = np.asarray(sensor_locations)
    actuator_locations = np.asarray(actuator_locations)

    beta, r_diag_b = select_actuators(b, phi_r)
    taken = set(actuator_locations[beta].tolist())
    forbidden = [j for j in range(p) if sensor_locations[j] in taken]
    if p - len(forbidden) < r:
        raise FeasibilityError(
            f"only {p - len(forbidden)} sensor candidates remain after "
            f"excluding {len(forbidden)} collocated ones; need {r}"
        )

    cp = c @ psi_r
    _check_rank(cp, r, "C Psi_r")
    fac = matkernel.pivoted_qr(cp.conj().T, forbidden=forbidden, max_pivots=r)
    if fac.n_steps < r:
        raise FeasibilityError("exclusion left fewer than r usable sensor pivots")
    gamma = fac.pivot_order[:r].copy()
    if sensor_locations[gamma].size and np.intersect1d(
        sensor_locations[gamma], actuator_locations[beta]
    ).size:
        raise FeasibilityError("collocation exclusion failed")  # defensive
    return SelectionResult(
        gamma=gamma,
        beta=beta,
        r_diag_sensors=fac.r_diagonal[:r].copy(),
        r_diag_actuators=r_diag_b,
        collocation_forbidden=True,
    )


def select_subsets(c, b, psi_r, phi_r, no_collocate=False, **location_maps):
    """Select both index sets; dispatches on the collocation flag."""
    if no_collocate:
        return select_noncollocated(c, b, psi_r, phi_r, **location_maps)
    gamma, rd_s = select_sensors(c, psi_r)
    beta, rd_a = select_actuators(b, phi_r)
    return SelectionResult(
        gamma=gamma,
        beta=beta,
        r_diag_sensors=rd_s,
        r_diag_actuators=rd_a,
        collocation_forbidden=False,
    )


def sensor_projection(c, psi_r, gamma):
    """Interpolation projector Psi_r (C_hat Psi_r)^{-1} C_hat onto span(Psi_r)."""
    c = matkernel.as_complex(c)
    psi_r = matkernel.as_complex(psi_r)
    sampler = c[np.asarray(gamma), :]
    return ProjectionOperator(
        basis=psi_r,
        sampler=sampler,
        sampled_rows=sampler @ psi_r,
        side_tag="sensor",
    )


def actuator_projection(b, phi_r, beta):
    """Dual projector Phi_r (B_hat* Phi_r)^{-1} B_hat* onto span(Phi_r)."""
    b = matkernel.as_complex(b)
    phi_r = matkernel.as_complex(phi_r)
    sampler = b[:, np.asarray(beta)].conj().T
    return ProjectionOperator(
        basis=phi_r,
        sampler=sampler,
        sampled_rows=sampler @ phi_r,
        side_tag="actuator",
    )


def project_state(op, x):
    """Apply the interpolation projector to a state vector."""
    x = np.asarray(x, dtype=np.complex128)
    try:
        coeffs = np.linalg.solve(op.sampled_rows, op.sampler @ x)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError("sampled interpolation block is singular") from exc
    return op.basis @ coeffs


def _growth_factor(n_candidates, r):
    """sqrt(n-r+1) * sqrt(4^r + 6r - 1) / 3 pivot growth constant."""
    return np.sqrt(n_candidates - r + 1.0) * np.sqrt(4.0**r + 6.0 * r - 1.0) / 3.0


def pivot_inverse_norm_bound(u_matrix):
    """Upper bound on ||(S U)^{-1}||_2 over QR-pivot row selections S of U."""
    u_matrix = matkernel.as_complex(u_matrix)
    p, r = u_matrix.shape
    smin = np.linalg.svd(u_matrix, compute_uv=False)[-1]
    if smin == 0.0:
        raise RankError("bound undefined for rank-deficient input")
    return float(_growth_factor(p, r) / smin)


def sensor_state_error_bound(c, psi_r, hankel, form="explicit"):
    """A priori bound on ||x - P_C x||_2 for QR-selected sensors.

    `form="explicit"` uses the sqrt(p-r+1) pivot-growth constant;
    `form="sqrt_p"` the looser sqrt(p) * 2^r restatement.
    """
    c = matkernel.as_complex(c)
    psi_r = matkernel.as_complex(psi_r)
    p = c.shape[0]
    r = psi_r.shape[1]
    hankel = np.asarray(hankel, dtype=float)
    tail = 2.0 * np.sum(hankel[r:])
    sv = np.linalg.svd(c @ psi_r, compute_uv=False)
    smin = sv[-1]
    if smin == 0.0:
        raise RankError("bound undefined for rank-deficient C Psi_r")
    norm_c = np.linalg.norm(c, 2)
    norm_psi = np.linalg.norm(psi_r, 2)
    if form == "explicit":
        growth = _growth_factor(p, r)
    elif form == "sqrt_p":
        growth = np.sqrt(float(p)) * 2.0**r
    else:
        raise ValueError(f"unknown bound form {form!r}")
    return float(norm_c * norm_psi / smin * growth * tail)


def actuator_state_error_bound(b, phi_r, hankel, form="explicit"):
    """Dual bound on ||z - P_B z||_2 for QR-selected actuators."""
    b = matkernel.as_complex(b)
    return sensor_state_error_bound(b.conj().T, phi_r, hankel, form=form)


def _logdet_lower_bound(u_matrix, hankel, n_candidates):
    u_matrix = matkernel.as_complex(u_matrix)
    r = u_matrix.shape[1]
    hankel = np.asarray(hankel, dtype=float)
    smin = np.linalg.svd(u_matrix, compute_uv=False)[-1]
    if smin == 0.0:
        raise RankError("bound undefined for rank-deficient input")
    const = 9.0 * smin**2 / ((n_candidates - r + 1.0) * (4.0**r + 6.0 * r - 1.0))
    return float(r * np.log(const) + np.sum(np.log(hankel[:r])))


def sensor_logdet_lower_bound(c, psi_r, hankel, gamma=None, check=True):
    """Guaranteed lower bound on the rank-r log-det sensor objective.

    The objective is log|C_hat W_hat_c C_hat*| with W_hat_c the rank-r
    balanced approximation Psi_r diag(sigma) Psi_r*.  When `gamma` is given
    and `check` is true, the achieved objective is computed and the bound
    asserted against it.
    """
    c = matkernel.as_complex(c)
    psi_r = matkernel.as_complex(psi_r)
    bound = _logdet_lower_bound(c @ psi_r, hankel, c.shape[0])
    if gamma is not None and check:
        achieved = achieved_rank_r_logdet(c, psi_r, hankel, gamma, side="sensor")
        if bound > achieved + 1e-9 * max(1.0, abs(achieved)):
            raise NumericError(
                f"log-det lower bound {bound} exceeds achieved {achieved}"
            )
    return bound


def actuator_logdet_lower_bound(b, phi_r, hankel, beta=None, check=True):
    """Dual guaranteed lower bound for the actuator log-det objective."""
    b = matkernel.as_complex(b)
    phi_r = matkernel.as_complex(phi_r)
    bound = _logdet_lower_bound(b.conj().T @ phi_r, hankel, b.shape[1])
    if beta is not None and check:
        achieved = achieved_rank_r_logdet(b, phi_r, hankel, beta, side="actuator")
        if bound > achieved + 1e-9 * max(1.0, abs(achieved)):
            raise NumericError(
                f"log-det lower bound {bound} exceeds achieved {achieved}"
            )
    return bound


def achieved_rank_r_logdet(mat, modes, hankel, indices, side="sensor"):
    """log-det objective achieved on the rank-r balanced gramian.

    side="sensor": log|C_hat (Psi S Psi*) C_hat*| for C_hat = mat[indices];
    side="actuator": log|B_hat* (Phi S Phi*) B_hat| for B_hat = mat[:, indices].
    """
    mat = matkernel.as_complex(mat)
    modes = matkernel.as_complex(modes)
    r = modes.shape[1]
    sig = np.asarray(hankel, dtype=float)[:r]
    if side == "sensor":
        hat = mat[np.asarray(indices), :] @ modes
    else:
        hat = (modes.conj().T @ mat[:, np.asarray(indices)]).conj().T
    core = (hat * sig) @ hat.conj().T
    return matkernel.logdet_abs(core)
