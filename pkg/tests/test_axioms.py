"""
Tests for the randomized axiom suite.
"""

import pytest

from roofcoh.analysis.axioms import FORWARD_ONLY_NOTE, check_axioms
from roofcoh.analysis.verify import INDETERMINATE, PASS
from roofcoh.models.functionals import FORMATION, HALF
from roofcoh.models.parameters import AxiomConfig, RoofConfig, Tolerances

QUICK = AxiomConfig(roof=RoofConfig(restarts=2, max_iters=200), convexity_weights=[0.5])


class TestAxioms:
    @pytest.fixture(scope="class")
    def reports(self):
        return {r.inequality_id: r for r in check_axioms(FORMATION, 2, samples=4, seed=11, cfg=QUICK)}

    def test_report_ids(self, reports):
        assert set(reports) == {"axiom-positivity", "axiom-monotonicity", "axiom-selective", "axiom-convexity"}

    def test_positivity(self, reports):
        report = reports["axiom-positivity"]
        assert report.verdict == PASS
        assert report.extras["max_incoherent"] == pytest.approx(0.0, abs=1e-12)
        assert report.extras["min_coherent"] >= 0

    def test_monotonicity_and_selective(self, reports):
        assert reports["axiom-monotonicity"].verdict == PASS
        assert reports["axiom-selective"].verdict == PASS
        assert reports["axiom-monotonicity"].tol == Tolerances().roof
        assert reports["axiom-selective"].tol == Tolerances().pure

    def test_monotonicity_covers_mixed_inputs(self, reports):
        extras = reports["axiom-monotonicity"].extras
        assert extras["input_kinds"] == ["pure"] * 4 + ["mixed"] * 4
        assert len(extras["sample_gaps"]) == 8
        assert min(extras["sample_gaps"][4:]) >= -Tolerances().roof

    def test_convexity_never_fails(self, reports):
        assert reports["axiom-convexity"].verdict in (PASS, INDETERMINATE)
        assert len(reports["axiom-convexity"].extras["sample_gaps"]) == 4

    def test_worst_sample_reported(self, reports):
        for report in reports.values():
            assert report.gap == pytest.approx(min(report.extras["sample_gaps"]))
            assert report.direction_notes.endswith(FORWARD_ONLY_NOTE)
            assert report.dims == (2,)

    def test_deterministic(self, reports):
        again = check_axioms(FORMATION, 2, samples=4, seed=11, cfg=QUICK)
        for report in again:
            assert report.to_row() == reports[report.inequality_id].to_row()

    def test_explicit_tolerance(self):
        reports = check_axioms(FORMATION, 2, samples=1, seed=1, tol=1e-3, cfg=QUICK)
        assert all(r.tol == 1e-3 for r in reports)


@pytest.mark.slow
class TestAxiomsAcceptance:
    @pytest.mark.parametrize("dim", [2, 3, 4])
    def test_formation(self, dim):
        reports = check_axioms(FORMATION, dim, samples=100, seed=7)
        for report in reports:
            if report.inequality_id == "axiom-convexity":
                assert report.verdict in (PASS, INDETERMINATE)
            else:
                assert report.verdict == PASS

    def test_half_positivity_and_convexity(self):
        reports = {r.inequality_id: r for r in check_axioms(HALF, 3, samples=100, seed=7)}
        assert reports["axiom-positivity"].verdict == PASS
        assert reports["axiom-convexity"].verdict in (PASS, INDETERMINATE)
