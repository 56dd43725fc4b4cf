"""
Unit tests for induced ensembles and conditional sums.
"""

import numpy as np
import numpy.testing as npt
import pytest

from roofcoh.exceptions import ContractViolation
from roofcoh.models.functionals import FORMATION, HALF, c_f_pure
from roofcoh.models.marginals import (ENSEMBLE_READING, conditional_sum, dephased_weight_state, induced_ensemble,
                                      rhs_conditional_sum)
from roofcoh.models.states import PureState, partial_trace, projector, tensor_product
from roofcoh.utils.sampling import haar_pure


class TestInducedEnsemble:
    def test_bell_members_are_basis_states(self, bell):
        ensemble = induced_ensemble(bell, 0)
        assert [m.label for m in ensemble.members] == [(0,), (1,)]
        npt.assert_allclose(ensemble.weights, [0.5, 0.5])
        npt.assert_allclose(np.abs(ensemble.members[1].state.amplitudes), [0, 1])
        assert ensemble.objective(FORMATION) == pytest.approx(0.0)

    @pytest.mark.parametrize("dims,party", [([2, 3], 0), ([2, 3], 1), ([2, 3, 2], 1)])
    def test_reconstructs_reduced_state(self, dims, party):
        psi = haar_pure(dims, seed=11)
        ensemble = induced_ensemble(psi, party)
        reduced = partial_trace(projector(psi), [party])
        npt.assert_allclose(ensemble.density_matrix().matrix, reduced.matrix, atol=1e-12)
        assert ensemble.weights.sum() == pytest.approx(1.0)

    def test_zero_weight_labels_dropped(self, zero, plus):
        psi = tensor_product(zero, plus)
        assert len(induced_ensemble(psi, 1).members) == 1
        assert len(induced_ensemble(psi, 0).members) == 2

    def test_labels_use_complementary_indices(self, ghz):
        ensemble = induced_ensemble(ghz, 1)
        assert ENSEMBLE_READING == "complementary-index"
        assert [m.label for m in ensemble.members] == [(0, 0), (1, 1)]

    def test_w_state_party_zero(self, w_state):
        ensemble = induced_ensemble(w_state, 0)
        assert [m.label for m in ensemble.members] == [(0, 0), (0, 1), (1, 0)]
        npt.assert_allclose(ensemble.weights, [1 / 3, 1 / 3, 1 / 3])
        npt.assert_allclose(np.abs(ensemble.members[0].state.amplitudes), [0, 1], atol=1e-15)
        npt.assert_allclose(np.abs(ensemble.members[1].state.amplitudes), [1, 0], atol=1e-15)
        npt.assert_allclose(np.abs(ensemble.members[2].state.amplitudes), [1, 0], atol=1e-15)
        npt.assert_allclose(ensemble.density_matrix().matrix, np.diag([2 / 3, 1 / 3]), atol=1e-15)
        assert ensemble.objective(FORMATION) == pytest.approx(0.0)

    @pytest.mark.slow
    @pytest.mark.parametrize("dims", [[2, 2], [2, 2, 2], [2, 3, 2], [2, 2, 2, 2]])
    def test_reconstruction_over_many_states(self, dims):
        for stream in range(250):
            psi = haar_pure(dims, seed=17, stream=stream)
            rho = projector(psi)
            for party in range(len(dims)):
                ensemble = induced_ensemble(psi, party)
                reduced = partial_trace(rho, [party])
                npt.assert_allclose(ensemble.density_matrix().matrix, reduced.matrix, atol=1e-12)

    def test_single_party_rejected(self, plus):
        with pytest.raises(ContractViolation):
            induced_ensemble(plus, 0)

    def test_records(self, bell):
        records = induced_ensemble(bell, 1).to_records()
        assert records[0]["label"] == [0]
        assert records[0]["weight"] == pytest.approx(0.5)
        assert len(records[0]["amplitudes"]) == 2


class TestConditionalSums:
    def test_weight_state(self, bell):
        weight_state = dephased_weight_state(bell, 0)
        npt.assert_allclose(weight_state.amplitudes, [2 ** -0.5, 2 ** -0.5])
        assert c_f_pure(HALF, weight_state) == pytest.approx(1.0)

    def test_product_state_conditionals(self, plus):
        psi = tensor_product(tensor_product(plus, plus), plus)
        npt.assert_allclose(rhs_conditional_sum(psi, FORMATION), [1.0, 1.0, 1.0])

    def test_chain_rule_for_formation(self):
        psi = haar_pure([3, 2], seed=3)
        lhs = c_f_pure(FORMATION, psi)
        rhs = c_f_pure(FORMATION, dephased_weight_state(psi, 0)) + conditional_sum(psi, 1, FORMATION)
        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_basis_state(self):
        psi = PureState.basis(5, [2, 3])
        npt.assert_allclose(rhs_conditional_sum(psi, HALF), [0.0, 0.0], atol=1e-15)
