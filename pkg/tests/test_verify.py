"""
Tests for the inequality checks and their verdicts.
"""

import numpy as np
import pytest

from roofcoh.analysis.verify import (FAIL, FINDING, INDETERMINATE, NOT_APPLICABLE, PASS, VerificationReport,
                                     check_bipartite_alternative, check_bipartite_sufficient,
                                     check_conditional_vs_marginal, check_decomposition_chain,
                                     check_mixed_superadditivity, check_npartite, check_product_additivity,
                                     check_pure_chain, check_superadditivity_reduced, check_tripartite,
                                     input_digest, judge, run_check)
from roofcoh.exceptions import ContractViolation
from roofcoh.models.functionals import FORMATION, HALF, register_functional
from roofcoh.models.parameters import RoofConfig, Tolerances
from roofcoh.models.states import PureState, kron_density, mix, projector, tensor_product_all
from roofcoh.utils.sampling import ginibre_mixed, haar_pure, random_diagonal_state, random_product_pure

SMALL_ROOF = RoofConfig(restarts=4, max_iters=500)


def gap_matches_terms(report: VerificationReport):
    return abs(report.gap - (report.lhs - sum(t.value for t in report.rhs_terms))) <= 1e-12


class TestJudge:
    def test_verdicts(self):
        assert judge(0.0, 1e-9, FORMATION) == PASS
        assert judge(-1e-10, 1e-9, FORMATION) == PASS
        assert judge(-1.0, 1e-9, FORMATION) == FAIL
        assert judge(-1.0, 1e-9, HALF) == FINDING
        assert judge(-1.0, 1e-9, FORMATION, one_sided=True) == INDETERMINATE

    def test_digest(self, bell, ghz):
        assert input_digest(bell) == input_digest(PureState.from_amplitudes([1, 0, 0, 1], [2, 2], normalize=True))
        assert input_digest(bell) != input_digest(ghz)
        assert input_digest(bell) != input_digest(projector(bell))


class TestBipartite:
    def test_bell_formation(self, bell):
        report = check_bipartite_sufficient(bell, FORMATION)
        assert report.lhs == pytest.approx(1.0)
        assert [t.value for t in report.rhs_terms] == pytest.approx([1.0, 0.0])
        assert report.gap == pytest.approx(0.0, abs=1e-12)
        assert report.verdict == PASS
        assert report.extras["ensemble_reading"] == "complementary-index"

    def test_bell_half(self, bell):
        report = check_bipartite_sufficient(bell, HALF)
        assert report.lhs == pytest.approx(1.0)
        assert [t.value for t in report.rhs_terms] == pytest.approx([1.0, 0.0], abs=1e-12)

    @pytest.mark.parametrize("dims", [[2, 2], [2, 3], [3, 3]])
    def test_formation_identity(self, dims):
        for stream in range(25):
            report = check_bipartite_sufficient(haar_pure(dims, seed=1, stream=stream), FORMATION, seed=1)
            assert abs(report.gap) <= 1e-10
            assert gap_matches_terms(report)

    def test_alternative(self, bell, plus):
        product = tensor_product_all([plus, plus])
        report = check_bipartite_alternative(product, FORMATION)
        assert report.lhs == pytest.approx(2.0)
        assert report.gap == pytest.approx(0.0, abs=1e-12)
        assert check_bipartite_alternative(bell, FORMATION).gap == pytest.approx(1.0)
        for stream in range(25):
            assert check_bipartite_alternative(haar_pure([2, 3], seed=2, stream=stream), FORMATION).gap >= -1e-10

    def test_arity(self, ghz):
        with pytest.raises(ContractViolation):
            check_bipartite_sufficient(ghz, FORMATION)


class TestMultipartite:
    def test_ghz(self, ghz):
        report = check_tripartite(ghz, FORMATION)
        assert report.lhs == pytest.approx(1.0)
        assert [t.value for t in report.rhs_terms] == pytest.approx([0.0, 0.0, 0.0], abs=1e-12)
        assert report.gap == pytest.approx(1.0)
        assert report.inequality_id == "tripartite"

    def test_w(self, w_state):
        report = check_tripartite(w_state, FORMATION)
        assert report.gap == pytest.approx(np.log2(3), abs=1e-5)

    def test_product(self, plus):
        report = check_tripartite(tensor_product_all([plus, plus, plus]), FORMATION)
        assert report.lhs == pytest.approx(3.0)
        assert [t.value for t in report.rhs_terms] == pytest.approx([1.0, 1.0, 1.0])
        assert report.gap == pytest.approx(0.0, abs=1e-12)

    def test_ghz4(self, ghz4):
        report = check_npartite(ghz4, FORMATION)
        assert report.gap == pytest.approx(1.0)
        assert len(report.rhs_terms) == 4

    def test_random_four_qubits(self):
        for stream in range(25):
            assert check_npartite(haar_pure([2, 2, 2, 2], seed=3, stream=stream), FORMATION).verdict == PASS

    def test_tripartite_arity(self, bell):
        with pytest.raises(ContractViolation):
            check_tripartite(bell, FORMATION)


class TestReducedSuperadditivity:
    def test_ghz_closed_form(self, ghz):
        report = check_superadditivity_reduced(ghz, FORMATION, marginal_method="closed-form")
        assert report.gap == pytest.approx(1.0)
        assert report.verdict == PASS
        assert report.tol == Tolerances().pure

    def test_bell_closed_form(self, bell):
        report = check_superadditivity_reduced(bell, FORMATION, marginal_method="closed-form")
        assert [t.value for t in report.rhs_terms] == pytest.approx([0.0, 0.0], abs=1e-12)
        assert report.gap == pytest.approx(1.0)

    def test_closed_form_needs_formation_and_qubits(self, bell):
        with pytest.raises(ContractViolation):
            check_superadditivity_reduced(bell, HALF, marginal_method="closed-form")
        with pytest.raises(ContractViolation):
            check_superadditivity_reduced(haar_pure([2, 3], seed=1), FORMATION, marginal_method="closed-form")

    def test_random_three_qubits(self):
        for stream in range(20):
            report = check_superadditivity_reduced(haar_pure([2, 2, 2], seed=4, stream=stream), FORMATION)
            assert report.gap >= -1e-9

    def test_roof_marginals_are_conservative(self):
        psi = haar_pure([2, 3], seed=5)
        report = check_superadditivity_reduced(psi, HALF, marginal_method="roof", roof_cfg=SMALL_ROOF)
        assert report.tol == Tolerances().roof
        assert "upper bounds" in report.direction_notes
        assert report.verdict in (PASS, INDETERMINATE)

    def test_conditional_vs_marginal(self, bell):
        report = check_conditional_vs_marginal(bell, FORMATION)
        assert report.gap == pytest.approx(0.0, abs=1e-12)
        for stream in range(10):
            report = check_conditional_vs_marginal(haar_pure([2, 2, 2], seed=6, stream=stream), FORMATION)
            assert report.gap >= -1e-9

    def test_roof_marginals_below_conditional_sums(self):
        psi = haar_pure([3, 2], seed=7)
        report = check_conditional_vs_marginal(psi, FORMATION, marginal_method="roof", roof_cfg=SMALL_ROOF)
        assert report.gap >= -1e-12

    def test_pure_chain(self):
        first, second = check_pure_chain(haar_pure([2, 2, 2], seed=8), FORMATION)
        assert first.inequality_id == "npartite"
        assert second.inequality_id == "conditional-vs-marginal"
        assert first.lhs >= second.lhs - 1e-9 >= second.rhs_total - 2e-9


class TestMixed:
    def test_incoherent_product(self):
        rho = kron_density(random_diagonal_state([2], seed=1), random_diagonal_state([2], seed=2))
        report = check_mixed_superadditivity(rho, FORMATION, SMALL_ROOF)
        assert report.lhs == pytest.approx(0.0, abs=1e-12)
        assert report.gap == pytest.approx(0.0, abs=1e-12)
        assert report.verdict == PASS

    def test_rank_one_matches_pure(self, bell):
        mixed = check_mixed_superadditivity(projector(bell), FORMATION, SMALL_ROOF)
        pure = check_superadditivity_reduced(bell, FORMATION)
        assert mixed.gap == pytest.approx(pure.gap, abs=1e-9)
        assert mixed.verdict == PASS

    def test_ghz_mixture(self, ghz):
        rho = mix([projector(ghz), projector(PureState.basis(0, [2, 2, 2]))], [0.5, 0.5])
        report = check_mixed_superadditivity(rho, FORMATION, SMALL_ROOF)
        assert report.gap >= -1e-4
        assert report.verdict == PASS
        assert "roof" in report.extras

    def test_decomposition_chain(self):
        rho = ginibre_mixed([2, 2, 2], 2, seed=9)
        report = check_decomposition_chain(rho, FORMATION, RoofConfig(restarts=2, max_iters=200))
        assert report.verdict == PASS
        assert report.gap >= -1e-9
        assert gap_matches_terms(report)


class TestProductAdditivity:
    def test_plus_pair(self, plus):
        report = check_product_additivity([plus, plus], FORMATION)
        assert report.lhs == pytest.approx(2.0)
        assert report.verdict == PASS

    def test_half_qubit_qutrit(self, plus):
        qutrit = PureState.from_amplitudes(np.ones(3), [3], normalize=True)
        report = check_product_additivity([plus, qutrit], HALF)
        assert report.lhs == pytest.approx(1 + np.log2(3))
        assert report.rhs_total == pytest.approx(1 + np.log2(3))
        assert abs(report.gap) <= 1e-10

    def test_five_qubits(self):
        _, parts = random_product_pure([2] * 5, seed=10)
        for f in (FORMATION, HALF):
            assert abs(check_product_additivity(parts, f).gap) <= 1e-10

    def test_not_applicable(self, plus):
        f = register_functional("linear-entropy", lambda p: 1.0 - np.sum(np.asarray(p) ** 2, axis=-1),
                                multiplicative=False)
        assert check_product_additivity([plus, plus], f).verdict == NOT_APPLICABLE

    def test_needs_two_parts(self, plus):
        with pytest.raises(ContractViolation):
            check_product_additivity([plus], FORMATION)


class TestRunCheck:
    def test_dispatch(self, ghz):
        report = run_check("tripartite", ghz, FORMATION, seed=3)
        assert report.gap == pytest.approx(1.0)
        assert report.seed == 3
        assert report.to_row()["dims"] == "2x2x2"

    def test_product_ids_need_parts(self, bell):
        with pytest.raises(ContractViolation):
            run_check("product-additivity", bell, FORMATION)

    def test_mult_separability(self):
        _, parts = random_product_pure([2, 3], seed=4)
        report = run_check("mult-separability", parts, HALF)
        assert report.verdict == PASS
        assert abs(report.gap) <= 1e-12

    def test_mixed_ids_promote_pure_input(self, bell):
        report = run_check("mixed-superadditivity", bell, FORMATION, roof_cfg=SMALL_ROOF)
        assert report.gap == pytest.approx(1.0, abs=1e-9)

    def test_tolerance_set(self, bell):
        report = run_check("npartite", bell, FORMATION, tol=Tolerances(pure=1e-6))
        assert report.tol == 1e-6

    def test_unknown_id(self, bell):
        with pytest.raises(ContractViolation):
            run_check("nope", bell, FORMATION)

    def test_report_dict(self, bell):
        record = run_check("bipartite-sufficient", bell, FORMATION).to_dict()
        assert record["dims"] == [2, 2]
        assert {t["label"] for t in record["rhs_terms"]} == {"weight state party 0", "conditional sum party 1"}


@pytest.mark.slow
class TestMixedThreeQubitSweep:
    def test_rank_two_states_pass(self):
        cfg = RoofConfig(restarts=64)
        for stream in range(100):
            rho = ginibre_mixed([2, 2, 2], 2, seed=18, stream=stream)
            report = check_mixed_superadditivity(rho, FORMATION, cfg)
            assert all(m["method"] == "closed-form" for m in report.extras["marginals"])
            assert report.verdict == PASS
