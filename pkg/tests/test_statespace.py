import numpy as np
import pytest

from balsel import gramian, statespace
from balsel.errors import DimensionError, SingularMatrixError, UnstableSystemError
from balsel.models import random_stable_system
from balsel.statespace import StateSpaceModel


def scalar_model():
    return StateSpaceModel([[-1.0]], [[1.0]], [[1.0]])


def two_state_model():
    return StateSpaceModel(np.diag([-1.0, -2.0]), [[1.0], [1.0]], [[1.0, 1.0]])


class TestModel:
    def test_dimension_validation(self):
        with pytest.raises(DimensionError):
            StateSpaceModel(np.zeros((2, 3)), np.zeros((2, 1)), np.zeros((1, 2)))
        with pytest.raises(DimensionError):
            StateSpaceModel(np.eye(2), np.zeros((3, 1)), np.zeros((1, 2)))
        with pytest.raises(DimensionError):
            StateSpaceModel(np.eye(2), np.zeros((2, 1)), np.zeros((1, 3)))

    def test_shapes(self):
        m = StateSpaceModel(np.eye(3) * -1, np.ones((3, 2)), np.ones((4, 3)))
        assert (m.n, m.q, m.p) == (3, 2, 4)
        assert m.is_real


class TestIsStable:
    def test_scalar_continuous(self):
        assert statespace.is_stable(scalar_model())

    def test_marginal_rotation(self):
        m = StateSpaceModel([[0.0, 1.0], [-1.0, 0.0]], np.eye(2), np.eye(2))
        assert not statespace.is_stable(m)

    def test_scalar_discrete(self):
        m = StateSpaceModel([[0.5]], [[1.0]], [[1.0]], time_domain="discrete")
        assert statespace.is_stable(m)


class TestTransferEval:
    def test_scalar_dc(self):
        np.testing.assert_allclose(statespace.transfer_eval(scalar_model(), 0.0), [[1.0]])

    def test_scalar_imaginary(self):
        g = statespace.transfer_eval(scalar_model(), 1j)
        np.testing.assert_allclose(g, [[0.5 - 0.5j]], rtol=1e-12)

    def test_mimo_diag(self):
        m = StateSpaceModel(np.diag([-1.0, -2.0]), np.eye(2), np.eye(2))
        np.testing.assert_allclose(
            statespace.transfer_eval(m, 0.0), np.diag([1.0, 0.5]), atol=1e-14
        )

    def test_eigenvalue_singularity(self):
        with pytest.raises(SingularMatrixError):
            statespace.transfer_eval(scalar_model(), -1.0)

    def test_conjugate_symmetry_real_model(self):
        m = random_stable_system(6, 2, 3, seed=2)
        s = 0.3 + 1.7j
        g1 = statespace.transfer_eval(m, s)
        g2 = statespace.transfer_eval(m, np.conj(s))
        np.testing.assert_allclose(g1, np.conj(g2), rtol=1e-10)


class TestH2Norms:
    def test_scalar_gramian(self):
        m = scalar_model()
        w = gramian.compute_gramians(m)
        assert statespace.h2_norm_gramian(m, w) == pytest.approx(np.sqrt(0.5), rel=1e-12)

    def test_zero_input(self):
        m = StateSpaceModel([[-1.0]], [[0.0]], [[1.0]])
        w = gramian.compute_gramians(m)
        assert statespace.h2_norm_gramian(m, w) == 0.0

    def test_two_state_value(self):
        # trace(C Wc C*) = sum of [[1/2,1/3],[1/3,1/4]] = 17/12
        m = two_state_model()
        w = gramian.compute_gramians(m)
        assert statespace.h2_norm_gramian(m, w) == pytest.approx(
            np.sqrt(17.0 / 12.0), rel=1e-12
        )

    def test_unstable_rejected(self):
        m = StateSpaceModel([[1.0]], [[1.0]], [[1.0]])
        with pytest.raises(UnstableSystemError):
            statespace.h2_norm_frequency(m)

    def test_scalar_frequency_quadrature(self):
        m = scalar_model()
        val = statespace.h2_norm_frequency(m, statespace.log_grid(1e-3, 1e3, 2000))
        assert val == pytest.approx(np.sqrt(0.5), abs=1e-3)

    def test_zero_output(self):
        m = StateSpaceModel([[-1.0]], [[1.0]], [[0.0]])
        assert statespace.h2_norm_frequency(m) == 0.0

    def test_frequency_matches_gramian_two_state(self):
        m = two_state_model()
        w = gramian.compute_gramians(m)
        ref = statespace.h2_norm_gramian(m, w)
        val = statespace.h2_norm_frequency(m, statespace.log_grid(1e-4, 1e4, 4000))
        assert val == pytest.approx(ref, rel=1e-3)

    def test_frequency_quadrature_converges(self):
        m = random_stable_system(6, 2, 2, seed=5)
        w = gramian.compute_gramians(m)
        ref = statespace.h2_norm_gramian(m, w)
        errs = [
            abs(statespace.h2_norm_frequency(m, statespace.log_grid(1e-4, 1e4, c)) - ref)
            for c in (500, 2000)
        ]
        assert errs[1] < errs[0]
        assert errs[1] < 1e-3 * ref

    def test_discrete_frequency_matches_gramian(self):
        m = random_stable_system(5, 2, 2, seed=8, time_domain="discrete")
        w = gramian.compute_gramians(m)
        ref = statespace.h2_norm_gramian(m, w)
        val = statespace.h2_norm_frequency(
            m, statespace.FrequencyGrid(np.linspace(1e-4, np.pi, 4000), "linear")
        )
        assert val == pytest.approx(ref, rel=1e-3)

    def test_complex_discrete_frequency_matches_gramian(self):
        base = random_stable_system(5, 2, 2, seed=9, time_domain="discrete")
        m = StateSpaceModel(
            base.a * np.exp(0.3j), base.b, base.c * (1 + 1j), time_domain="discrete"
        )
        assert not m.is_real
        w = gramian.compute_gramians(m)
        ref = statespace.h2_norm_gramian(m, w)
        val = statespace.h2_norm_frequency(
            m, statespace.FrequencyGrid(np.linspace(1e-4, np.pi, 4000), "linear")
        )
        assert val == pytest.approx(ref, rel=1e-3)

    def test_complex_continuous_frequency_matches_gramian(self):
        base = random_stable_system(5, 2, 2, seed=10)
        m = StateSpaceModel(base.a + 0.3j * np.eye(5), base.b, base.c)
        assert not m.is_real
        w = gramian.compute_gramians(m)
        ref = statespace.h2_norm_gramian(m, w)
        val = statespace.h2_norm_frequency(m, statespace.log_grid(1e-4, 1e4, 4000))
        assert val == pytest.approx(ref, rel=1e-3)


class TestHinfEstimate:
    def test_scalar_peak_at_dc(self):
        assert statespace.hinf_estimate(scalar_model()) == pytest.approx(1.0, rel=1e-4)

    def test_gain_scaling(self):
        m = StateSpaceModel([[-1.0]], [[1.0]], [[3.0]])
        assert statespace.hinf_estimate(m) == pytest.approx(3.0, rel=1e-4)

    def test_lower_bound_property(self):
        # the grid maximum can only be below the true supremum
        m = random_stable_system(8, 2, 2, seed=13)
        coarse = statespace.hinf_estimate(m, statespace.log_grid(1e-2, 1e2, 20))
        fine = statespace.hinf_estimate(m, statespace.log_grid(1e-3, 1e3, 800))
        assert coarse <= fine + 1e-12


class TestImpulseSnapshots:
    def test_scalar_decay_snapshot(self):
        m = scalar_model()
        direct, adjoint, w = statespace.impulse_snapshots(m, 1.0, 3)
        assert direct[0, 1] == pytest.approx(np.exp(-1.0), rel=1e-9)
        assert adjoint[0, 1] == pytest.approx(np.exp(-1.0), rel=1e-9)
        np.testing.assert_allclose(w, [0.5, 1.0, 0.5])

    def test_single_step_is_b_and_cstar(self):
        m = two_state_model()
        direct, adjoint, w = statespace.impulse_snapshots(m, 0.7, 1)
        np.testing.assert_allclose(direct, m.b)
        np.testing.assert_allclose(adjoint, m.c.conj().T)
        np.testing.assert_allclose(w, [0.7])

    def test_empirical_integral_value(self):
        m = scalar_model()
        direct, adjoint, w = statespace.impulse_snapshots(m, 0.01, 2000)
        wc = (direct * w) @ direct.conj().T
        assert wc[0, 0].real == pytest.approx(0.5, abs=1e-3)


class TestDifferenceModel:
    def test_self_difference_vanishes(self):
        m = two_state_model()
        diff = statespace.difference_model(m, m)
        assert statespace.hinf_estimate(diff) < 1e-12

    def test_io_mismatch(self):
        mimo = StateSpaceModel(np.diag([-1.0, -2.0]), np.eye(2), np.eye(2))
        with pytest.raises(DimensionError):
            statespace.difference_model(scalar_model(), mimo)
