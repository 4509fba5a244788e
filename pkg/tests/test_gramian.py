import numpy as np
import pytest

from balsel import gramian, statespace
from balsel.errors import HorizonError, IllPosedError, SynthesisError, UnstableSystemError
from balsel.models import random_stable_system
from balsel.statespace import StateSpaceModel


class TestLyapunovContinuous:
    def test_scalar(self):
        w = gramian.solve_lyapunov_continuous([[-1.0]], [[1.0]])
        np.testing.assert_allclose(w, [[0.5]])

    def test_diagonal_closed_form(self):
        # for diagonal A the solution is M_ij / (|l_i| + |l_j|)
        w = gramian.solve_lyapunov_continuous(np.diag([-1.0, -2.0]), np.ones((2, 2)))
        np.testing.assert_allclose(w, [[0.5, 1 / 3], [1 / 3, 0.25]], rtol=1e-12)

    def test_seeded_residual(self):
        m = random_stable_system(30, 1, 1, seed=21)
        rhs = np.ones((30, 30))
        w = gramian.solve_lyapunov_continuous(m.a, rhs)
        assert gramian.lyapunov_residual(m.a, w, rhs.astype(complex)) <= 1e-9

    def test_unstable_rejected(self):
        with pytest.raises(UnstableSystemError):
            gramian.solve_lyapunov_continuous([[1.0]], [[1.0]])

    def test_near_marginal_ill_posed(self):
        a = np.diag([-1e-16 + 1j, -1e-16 - 1j])
        with pytest.raises(IllPosedError):
            gramian.solve_lyapunov_continuous(a, np.eye(2))


class TestStein:
    def test_scalar(self):
        w = gramian.solve_stein([[0.5]], [[1.0]])
        np.testing.assert_allclose(w, [[4.0 / 3.0]], rtol=1e-12)

    def test_zero_dynamics(self):
        m = np.array([[2.0, 0.3], [0.3, 1.0]])
        w = gramian.solve_stein(np.zeros((2, 2)), m)
        np.testing.assert_allclose(w, m, atol=1e-14)

    def test_seeded_residual(self):
        m = random_stable_system(25, 1, 1, seed=22, time_domain="discrete")
        rhs = np.eye(25) + 0.1 * np.ones((25, 25))
        w = gramian.solve_stein(m.a, rhs)
        assert gramian.stein_residual(m.a, w, rhs.astype(complex)) <= 1e-9

    def test_unstable_rejected(self):
        with pytest.raises(UnstableSystemError):
            gramian.solve_stein([[1.5]], [[1.0]])


class TestComputeGramians:
    def test_scalar(self):
        m = StateSpaceModel([[-1.0]], [[1.0]], [[1.0]])
        g = gramian.compute_gramians(m)
        np.testing.assert_allclose(g.w_c, [[0.5]])
        np.testing.assert_allclose(g.w_o, [[0.5]])
        assert g.source_tag == "exact"

    def test_zero_input(self):
        m = StateSpaceModel([[-1.0]], [[0.0]], [[1.0]])
        g = gramian.compute_gramians(m)
        np.testing.assert_allclose(g.w_c, 0.0)

    def test_discrete_psd_and_residuals(self):
        m = random_stable_system(25, 25, 25, seed=0, time_domain="discrete")
        g = gramian.compute_gramians(m)
        for w in (g.w_c, g.w_o):
            lam = np.linalg.eigvalsh(w)
            assert lam.min() >= -1e-10 * max(abs(lam).max(), 1e-300)
            assert np.linalg.norm(w - w.conj().T) <= 1e-10 * np.linalg.norm(w)
        assert g.residual_c <= 1e-9
        assert g.residual_o <= 1e-9

    def test_duality_with_adjoint_realization(self):
        m = random_stable_system(8, 3, 2, seed=30)
        g = gramian.compute_gramians(m)
        g_adj = gramian.compute_gramians(statespace.adjoint_model(m))
        np.testing.assert_allclose(g.w_o, g_adj.w_c, atol=1e-10)

    def test_trace_formula_identity(self):
        for seed in range(15):
            m = random_stable_system(int(seed % 6) + 3, 2, 3, seed=seed)
            g = gramian.compute_gramians(m)
            t1 = np.trace(m.c @ g.w_c @ m.c.conj().T).real
            t2 = np.trace(m.b.conj().T @ g.w_o @ m.b).real
            assert t1 == pytest.approx(t2, rel=1e-8)


class TestEmpiricalGramians:
    def test_scalar_value_with_marginal_horizon_warning(self):
        m = StateSpaceModel([[-1.0]], [[1.0]], [[1.0]])
        snaps = statespace.impulse_snapshots(m, 0.01, 1001)  # decay e^-10 ~ 4.5e-5
        with pytest.warns(UserWarning):
            g = gramian.empirical_gramians(*snaps)
        assert g.w_c[0, 0].real == pytest.approx(0.5, abs=1e-3)
        assert g.source_tag == "empirical"

    def test_zero_input_gives_zero(self):
        m = StateSpaceModel([[-1.0]], [[0.0]], [[1.0]])
        snaps = statespace.impulse_snapshots(m, 0.01, 2000)
        g = gramian.empirical_gramians(*snaps)
        np.testing.assert_allclose(g.w_c, 0.0)

    def test_matches_exact_gramian(self):
        m = StateSpaceModel(np.diag([-1.0, -2.0]), [[1.0], [1.0]], [[1.0, 1.0]])
        snaps = statespace.impulse_snapshots(m, 0.01, 2000)
        g_emp = gramian.empirical_gramians(*snaps)
        g = gramian.compute_gramians(m)
        np.testing.assert_allclose(g_emp.w_c, g.w_c, atol=1e-3)
        np.testing.assert_allclose(g_emp.w_o, g.w_o, atol=1e-3)

    def test_insufficient_decay_raises(self):
        m = StateSpaceModel([[-1.0]], [[1.0]], [[1.0]])
        snaps = statespace.impulse_snapshots(m, 0.01, 200)  # horizon T = 2
        with pytest.raises(HorizonError):
            gramian.empirical_gramians(*snaps)


class TestCARE:
    def test_scalar_closed_form(self):
        x = gramian.solve_care([[-1.0]], [[1.0]], [[1.0]], [[1.0]])
        assert x[0, 0].real == pytest.approx(np.sqrt(2.0) - 1.0, rel=1e-12)

    def test_zero_state_weight(self):
        x = gramian.solve_care([[-2.0]], [[1.0]], [[0.0]], [[1.0]])
        np.testing.assert_allclose(x, 0.0, atol=1e-14)

    def test_seeded_residual_and_stability(self):
        m = random_stable_system(10, 3, 3, seed=40)
        q = np.eye(10)
        r = np.eye(3)
        b = m.b
        x = gramian.solve_care(m.a, b, q, r)
        assert gramian.care_residual(
            m.a, b.astype(complex), q.astype(complex), r.astype(complex), x
        ) <= 1e-8
        a_cl = m.a - b @ np.linalg.solve(r, b.conj().T @ x)
        assert np.linalg.eigvals(a_cl).real.max() < 0

    def test_synthesis_error_when_unstabilizable(self):
        with pytest.raises(SynthesisError):
            gramian.solve_care([[1.0]], [[0.0]], [[1.0]], [[1.0]])
