"""
Tests for the convex-roof optimizer and the qubit closed form.
"""

import numpy as np
import numpy.testing as npt
import pytest

from roofcoh.analysis.roof import (binary_entropy, ensemble_objective, qubit_formation_closed_form, roof_value)
from roofcoh.exceptions import ContractViolation
from roofcoh.models.functionals import FORMATION, HALF, c_f_pure
from roofcoh.models.parameters import RoofConfig
from roofcoh.models.states import DensityMatrix, PureState, mix, projector
from roofcoh.utils.sampling import ginibre_mixed, haar_pure, random_diagonal_state

FAST = RoofConfig(restarts=8, max_iters=1000)


def brute_force_qubit(rho, f, steps=200):
    """Grid over size-2 decompositions pushed forward by 2x2 unitaries"""
    values, vectors = np.linalg.eigh(rho.matrix)
    w = vectors * np.sqrt(np.clip(values, 0, None))
    best = np.inf
    for theta in np.linspace(0, np.pi / 2, steps):
        for phi in np.linspace(0, 2 * np.pi, 2 * steps, endpoint=False):
            u = np.array([[np.cos(theta), -np.exp(-1j * phi) * np.sin(theta)],
                          [np.exp(1j * phi) * np.sin(theta), np.cos(theta)]])
            rows = np.abs(u @ w.T) ** 2
            best = min(best, float(np.sum(f.homogeneous(rows))))
    return best


class TestEnsembleObjective:
    def test_examples(self, plus, zero):
        assert ensemble_objective([(1.0, plus)], FORMATION) == pytest.approx(1.0)
        assert ensemble_objective([(0.5, plus), (0.5, zero)], FORMATION) == pytest.approx(0.5)
        basis = [(0.25, PureState.basis(i, [4])) for i in range(4)]
        assert ensemble_objective(basis, HALF) == pytest.approx(0.0)


class TestQubitClosedForm:
    def test_values(self, plus, qubit_quarter):
        assert qubit_formation_closed_form(projector(plus)) == pytest.approx(1.0)
        assert qubit_formation_closed_form(DensityMatrix.maximally_mixed([2])) == pytest.approx(0.0)
        assert qubit_formation_closed_form(qubit_quarter) == pytest.approx(0.3546, abs=1e-4)
        assert binary_entropy(0.5) == pytest.approx(1.0)

    def test_matches_brute_force(self, qubit_quarter):
        assert brute_force_qubit(qubit_quarter, FORMATION) == pytest.approx(
            qubit_formation_closed_form(qubit_quarter), abs=1e-4)

    def test_non_qubit_rejected(self, bell):
        with pytest.raises(ContractViolation):
            qubit_formation_closed_form(projector(bell))


class TestRoofValue:
    def test_pure_input(self):
        psi = haar_pure([3], seed=2)
        result = roof_value(projector(psi), HALF, FAST)
        assert result.value == pytest.approx(c_f_pure(HALF, psi), abs=1e-9)
        assert len(result.ensemble) == 1
        assert result.converged

    def test_incoherent_input(self):
        result = roof_value(random_diagonal_state([2, 2], seed=3), FORMATION, FAST)
        assert result.value == pytest.approx(0.0, abs=1e-12)
        assert all(np.count_nonzero(np.abs(s.amplitudes) > 0) == 1 for _, s in result.ensemble)

    def test_qubit_example(self, qubit_quarter):
        result = roof_value(qubit_quarter, FORMATION, FAST)
        assert result.value == pytest.approx(0.3546, abs=1e-4)

    @pytest.mark.parametrize("stream", range(10))
    def test_agrees_with_closed_form(self, stream):
        rho = ginibre_mixed(2, 2, seed=13, stream=stream)
        result = roof_value(rho, FORMATION, FAST)
        assert result.value == pytest.approx(qubit_formation_closed_form(rho), abs=1e-4)

    def test_result_invariants(self):
        rho = ginibre_mixed([2, 2], 2, seed=4)
        result = roof_value(rho, HALF, FAST)
        npt.assert_allclose(result.reconstruct(), rho.matrix, atol=1e-8)
        assert result.value == pytest.approx(ensemble_objective(result.ensemble, HALF), abs=1e-10)
        assert result.value <= result.eigen_objective + 1e-10
        assert len(result.ensemble) <= result.ensemble_size == 4
        assert len(result.per_restart_values) == FAST.restarts

    def test_upper_bound_against_pushforwards(self):
        rho = ginibre_mixed(3, 2, seed=5)
        result = roof_value(rho, FORMATION, FAST)
        values, vectors = np.linalg.eigh(rho.matrix)
        w = vectors[:, -2:] * np.sqrt(values[-2:])
        rng = np.random.default_rng(0)
        for _ in range(5):
            g = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
            v, _ = np.linalg.qr(g)
            rows = np.abs(v @ w.T) ** 2
            assert result.value <= float(np.sum(FORMATION.homogeneous(rows))) + 1e-9

    def test_deterministic(self):
        rho = ginibre_mixed(3, 3, seed=6)
        a = roof_value(rho, FORMATION, FAST)
        b = roof_value(rho, FORMATION, FAST)
        assert a.per_restart_values == b.per_restart_values
        assert a.value == b.value

    def test_candidate_caps_value(self, plus, zero):
        rho = mix([projector(plus), projector(zero)], [0.5, 0.5])
        candidate = [(0.5, plus), (0.5, zero)]
        result = roof_value(rho, FORMATION, RoofConfig(restarts=1, max_iters=1), candidates=[candidate])
        assert result.value <= 0.5 + 1e-12

    def test_candidate_must_decompose(self, plus, zero, qubit_quarter):
        with pytest.raises(ContractViolation):
            roof_value(qubit_quarter, FORMATION, FAST, candidates=[[(1.0, zero)]])

    def test_non_convergence_flagged(self):
        rho = ginibre_mixed(4, 3, seed=8)
        result = roof_value(rho, FORMATION, RoofConfig(restarts=2, max_iters=1))
        assert not result.converged
        assert result.value <= result.eigen_objective + 1e-10

    def test_ensemble_size_below_rank(self):
        with pytest.raises(ContractViolation):
            roof_value(ginibre_mixed(3, 3, seed=1), FORMATION, RoofConfig(ensemble_size=2))

    @pytest.mark.parametrize("t", [0.25, 0.5, 0.75])
    def test_convexity(self, t):
        rho1, rho2 = ginibre_mixed(2, 2, seed=9), ginibre_mixed(2, 2, seed=9, stream=1)
        mixture = roof_value(mix([rho1, rho2], [t, 1 - t]), FORMATION, FAST).value
        parts = t * roof_value(rho1, FORMATION, FAST).value + (1 - t) * roof_value(rho2, FORMATION, FAST).value
        assert mixture <= parts + 1e-4


@pytest.mark.slow
class TestRoofAcceptance:
    def test_ginibre_qubits(self):
        cfg = RoofConfig(restarts=32)
        for stream in range(200):
            rho = ginibre_mixed(2, 2, seed=2024, stream=stream)
            assert roof_value(rho, FORMATION, cfg).value == pytest.approx(qubit_formation_closed_form(rho), abs=1e-4)

    def test_pure_and_diagonal(self):
        for stream in range(50):
            psi = haar_pure([2, 2], seed=31, stream=stream)
            assert roof_value(projector(psi), FORMATION).value == pytest.approx(c_f_pure(FORMATION, psi), abs=1e-9)
            assert roof_value(random_diagonal_state([2, 2], seed=32, stream=stream), FORMATION).value <= 1e-8
