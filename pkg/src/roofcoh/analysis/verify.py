"""
Superadditivity and additivity checks with structured verdicts.

Every check returns a VerificationReport whose gap is lhs - sum(rhs). Sides
produced by the roof optimizer are upper bounds on the true roof; each report
records which sides those are, and the verdict is only as strong as that
direction allows.
"""

import hashlib
import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import ContractViolation
from ..models.functionals import (CoherenceFunctional, c_f_pure, check_mult_separability,
                                  satisfies_mult_separability)
from ..models.marginals import ENSEMBLE_READING, dephased_weight_state, induced_ensemble
from ..models.parameters import RoofConfig, Tolerances
from ..models.states import DensityMatrix, PureState, partial_trace, projector, tensor_product_all
from .roof import Ensemble, qubit_formation_closed_form, roof_value

logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
INDETERMINATE = "indeterminate"
NOT_APPLICABLE = "not-applicable"
FINDING = "finding"
VERDICTS = (PASS, FAIL, INDETERMINATE, NOT_APPLICABLE, FINDING)

EXACT_NOTE = "all sides evaluated exactly"
MARGINAL_UPPER_NOTE = ("marginal roof values {parties} are optimizer upper bounds: the true rhs is no larger, "
                       "so a pass is conservative and a negative gap is indeterminate")
LHS_UPPER_NOTE = "lhs is a roof optimizer upper bound"

_DEFAULT_TOLERANCES = Tolerances()

StateLike = Union[PureState, DensityMatrix]
TolLike = Union[float, Tolerances, None]


@dataclass
class RhsTerm:
    label: str
    value: float


@dataclass
class VerificationReport:
    """Outcome of one inequality on one input"""
    inequality_id: str
    lhs: float
    rhs_terms: List[RhsTerm]
    gap: float
    tol: float
    verdict: str
    direction_notes: str
    input_digest: str
    seed: Optional[int] = None
    dims: Tuple[int, ...] = ()
    measure: str = ""
    extras: Dict[str, Any] = field(default_factory=dict)

    @property
    def rhs_total(self) -> float:
        return float(sum(t.value for t in self.rhs_terms))

    @property
    def is_violation(self) -> bool:
        return self.verdict in (FAIL, FINDING)

    def to_row(self) -> Dict[str, Any]:
        """Flat record with the CSV report columns"""
        return {
            "inequality_id": self.inequality_id,
            "dims": "x".join(str(d) for d in self.dims),
            "measure": self.measure,
            "lhs": self.lhs,
            "rhs_total": self.rhs_total,
            "gap": self.gap,
            "tol": self.tol,
            "verdict": self.verdict,
            "seed": self.seed,
            "input_digest": self.input_digest,
        }

    def to_dict(self) -> Dict[str, Any]:
        record = self.to_row()
        record["dims"] = list(self.dims)
        record["rhs_terms"] = [{"label": t.label, "value": t.value} for t in self.rhs_terms]
        record["direction_notes"] = self.direction_notes
        record["extras"] = self.extras
        return record


def input_digest(*states: StateLike) -> str:
    """sha256 over party dims and the complex128 entries of each input"""
    h = hashlib.sha256()
    for state in states:
        h.update(np.asarray(state.shape.dims, dtype="<i8").tobytes())
        data = state.amplitudes if isinstance(state, PureState) else state.matrix
        h.update(np.ascontiguousarray(data, dtype="<c16").tobytes())
    return h.hexdigest()


def judge(gap: float, tol: float, f: CoherenceFunctional, one_sided: bool = False) -> str:
    """pass iff gap >= -tol; a negative gap is a fail for certified measures, a
    finding otherwise, and indeterminate when an upper-bound side could hide it"""
    if gap >= -tol:
        return PASS
    if one_sided:
        return INDETERMINATE
    return FAIL if f.certified else FINDING


def _report(inequality_id: str, lhs: float, terms: List[RhsTerm], tol: float, verdict: str, notes: str,
            states: Sequence[StateLike], f: CoherenceFunctional, seed: Optional[int],
            extras: Optional[Dict[str, Any]] = None) -> VerificationReport:
    gap = float(lhs - sum(t.value for t in terms))
    report = VerificationReport(
        inequality_id=inequality_id, lhs=float(lhs), rhs_terms=terms, gap=gap, tol=tol,
        verdict=verdict, direction_notes=notes, input_digest=input_digest(*states), seed=seed,
        dims=states[0].shape.dims if len(states) == 1 else tuple(d for s in states for d in s.shape.dims),
        measure=f.name, extras=extras or {})
    if report.verdict == FINDING:
        logger.warning("finding: %s on %s with measure %s has gap %.3e (tol %.1e)",
                       inequality_id, report.dims, f.name, gap, tol)
    return report


def _tol(tol: "TolLike", roof_involved: bool) -> float:
    """An explicit float wins; otherwise the pure or roof entry of the tolerance set"""
    if tol is None:
        tol = _DEFAULT_TOLERANCES
    if isinstance(tol, Tolerances):
        return tol.roof if roof_involved else tol.pure
    return float(tol)


def _require_parties(psi: StateLike, expected: Optional[int] = None, minimum: int = 2):
    n = psi.shape.n_parties
    if expected is not None and n != expected:
        raise ContractViolation(f"this check needs exactly {expected} parties, got {n}")
    if n < minimum:
        raise ContractViolation(f"this check needs at least {minimum} parties, got {n}")


def _conditional_extras(psi: PureState) -> Dict[str, Any]:
    return {
        "ensemble_reading": ENSEMBLE_READING,
        "conditional_ensembles": {
            str(party): induced_ensemble(psi, party).to_records() for party in range(psi.shape.n_parties)
        },
    }


def _conditional_terms(psi: PureState, f: CoherenceFunctional) -> List[RhsTerm]:
    return [RhsTerm(f"conditional sum party {party}", induced_ensemble(psi, party).objective(f))
            for party in range(psi.shape.n_parties)]


def check_bipartite_sufficient(psi: PureState, f: CoherenceFunctional, tol: TolLike = None,
                               seed: Optional[int] = None) -> VerificationReport:
    """C_f(psi_AB) >= C_f(sum_i sqrt(q_i)|i>_A) + sum_i q_i C_f(phi_i,B)"""
    _require_parties(psi, expected=2)
    tol = _tol(tol, False)
    lhs = c_f_pure(f, psi)
    terms = [
        RhsTerm("weight state party 0", c_f_pure(f, dephased_weight_state(psi, 0))),
        RhsTerm("conditional sum party 1", induced_ensemble(psi, 1).objective(f)),
    ]
    gap = lhs - sum(t.value for t in terms)
    return _report("bipartite-sufficient", lhs, terms, tol, judge(gap, tol, f), EXACT_NOTE, [psi], f, seed,
                   _conditional_extras(psi))


def check_bipartite_alternative(psi: PureState, f: CoherenceFunctional, tol: TolLike = None,
                                seed: Optional[int] = None) -> VerificationReport:
    """C_f(psi_AB) >= sum_j p_j C_f(phi_j,A) + sum_i q_i C_f(phi_i,B)"""
    _require_parties(psi, expected=2)
    tol = _tol(tol, False)
    lhs = c_f_pure(f, psi)
    terms = _conditional_terms(psi, f)
    gap = lhs - sum(t.value for t in terms)
    return _report("bipartite-alternative", lhs, terms, tol, judge(gap, tol, f), EXACT_NOTE, [psi], f, seed,
                   _conditional_extras(psi))


def check_npartite(psi: PureState, f: CoherenceFunctional, tol: TolLike = None,
                   seed: Optional[int] = None, inequality_id: str = "npartite") -> VerificationReport:
    """C_f(psi) >= sum over parties of the conditional sums of their induced ensembles"""
    _require_parties(psi)
    tol = _tol(tol, False)
    lhs = c_f_pure(f, psi)
    terms = _conditional_terms(psi, f)
    gap = lhs - sum(t.value for t in terms)
    return _report(inequality_id, lhs, terms, tol, judge(gap, tol, f), EXACT_NOTE, [psi], f, seed,
                   _conditional_extras(psi))


def check_tripartite(psi: PureState, f: CoherenceFunctional, tol: TolLike = None,
                     seed: Optional[int] = None) -> VerificationReport:
    _require_parties(psi, expected=3)
    return check_npartite(psi, f, tol, seed, inequality_id="tripartite")


@dataclass
class MarginalValue:
    party: int
    value: float
    exact: bool
    method: str
    roof: Optional[Dict[str, Any]] = None


def marginal_value(rho_j: DensityMatrix, party: int, f: CoherenceFunctional, method: str = "auto",
                   roof_cfg: Optional[RoofConfig] = None,
                   candidates: Optional[Sequence[Ensemble]] = None) -> MarginalValue:
    """C_f of a single-party reduced state by qubit closed form or by the roof optimizer"""
    closed_form_ok = rho_j.shape.total_dim == 2 and f.name == "formation"
    if method == "closed-form":
        if not closed_form_ok:
            raise ContractViolation(
                f"closed-form marginals need qubit marginals and the formation measure "
                f"(party {party} has dimension {rho_j.shape.total_dim}, measure {f.name})")
        return MarginalValue(party, qubit_formation_closed_form(rho_j), True, "closed-form")
    if method == "auto" and closed_form_ok:
        return MarginalValue(party, qubit_formation_closed_form(rho_j), True, "closed-form")
    if method not in ("auto", "roof"):
        raise ContractViolation(f"unknown marginal method {method!r}")

    result = roof_value(rho_j, f, roof_cfg, candidates=candidates)
    # rank-one and incoherent marginals have exact roofs
    exact = result.source in ("rank-one", "incoherent")
    return MarginalValue(party, result.value, exact, "roof", result.to_dict())


def _marginal_terms(marginals: Sequence[MarginalValue]) -> Tuple[List[RhsTerm], List[int]]:
    terms = [RhsTerm(f"marginal party {m.party} ({m.method})", m.value) for m in marginals]
    upper = [m.party for m in marginals if not m.exact]
    return terms, upper


def _pure_marginals(psi: PureState, f: CoherenceFunctional, method: str,
                    roof_cfg: Optional[RoofConfig]) -> List[MarginalValue]:
    rho = projector(psi)
    marginals = []
    for party in range(psi.shape.n_parties):
        ensemble = induced_ensemble(psi, party)
        candidate = [(m.weight, m.state) for m in ensemble.members]
        marginals.append(marginal_value(partial_trace(rho, [party]), party, f, method, roof_cfg, [candidate]))
    return marginals


def _marginal_notes(upper: List[int]) -> str:
    return MARGINAL_UPPER_NOTE.format(parties=upper) if upper else EXACT_NOTE


def check_superadditivity_reduced(psi: PureState, f: CoherenceFunctional, tol: TolLike = None,
                                  marginal_method: str = "auto", roof_cfg: Optional[RoofConfig] = None,
                                  seed: Optional[int] = None) -> VerificationReport:
    """C_f(psi) >= sum_j C_f(rho_j) with rho_j the single-party reduced states"""
    _require_parties(psi)
    marginals = _pure_marginals(psi, f, marginal_method, roof_cfg)
    terms, upper = _marginal_terms(marginals)
    tol = _tol(tol, bool(upper))
    lhs = c_f_pure(f, psi)
    gap = lhs - sum(t.value for t in terms)
    extras = {"marginals": [asdict(m) for m in marginals]}
    return _report("reduced-superadditivity", lhs, terms, tol, judge(gap, tol, f, one_sided=bool(upper)),
                   _marginal_notes(upper), [psi], f, seed, extras)


def check_conditional_vs_marginal(psi: PureState, f: CoherenceFunctional, tol: TolLike = None,
                                  marginal_method: str = "auto", roof_cfg: Optional[RoofConfig] = None,
                                  seed: Optional[int] = None) -> VerificationReport:
    """Sum of conditional sums >= sum of marginal roofs

    Roof marginals are seeded with the induced ensemble as a candidate, so each
    reported marginal never exceeds its party's conditional sum.
    """
    _require_parties(psi)
    marginals = _pure_marginals(psi, f, marginal_method, roof_cfg)
    terms, upper = _marginal_terms(marginals)
    tol = _tol(tol, bool(upper))
    lhs = sum(t.value for t in _conditional_terms(psi, f))
    gap = lhs - sum(t.value for t in terms)
    extras = dict(_conditional_extras(psi), marginals=[asdict(m) for m in marginals])
    return _report("conditional-vs-marginal", lhs, terms, tol, judge(gap, tol, f, one_sided=bool(upper)),
                   _marginal_notes(upper), [psi], f, seed, extras)


def check_pure_chain(psi: PureState, f: CoherenceFunctional, tol: TolLike = None,
                     marginal_method: str = "auto", roof_cfg: Optional[RoofConfig] = None,
                     seed: Optional[int] = None) -> Tuple[VerificationReport, VerificationReport]:
    """C_f(psi) >= sum of conditional sums >= sum of marginal roofs, as two reports"""
    first = check_npartite(psi, f, tol, seed)
    second = check_conditional_vs_marginal(psi, f, tol, marginal_method, roof_cfg, seed)
    return first, second


def check_mixed_superadditivity(rho: DensityMatrix, f: CoherenceFunctional, roof_cfg: Optional[RoofConfig] = None,
                                tol: TolLike = None, marginal_method: str = "auto",
                                seed: Optional[int] = None) -> VerificationReport:
    """C_f(rho) >= sum_j C_f(rho_j) for a mixed multipartite state

    Passes only when every marginal is exact. A negative gap against exact
    marginals is a genuine violation because the lhs can only overestimate.
    """
    _require_parties(rho)
    roof_cfg = roof_cfg or RoofConfig()
    whole = roof_value(rho, f, roof_cfg)
    lhs_exact = whole.source in ("rank-one", "incoherent")

    marginals = []
    for party in range(rho.shape.n_parties):
        # pushing the lhs decomposition through each member's induced ensemble decomposes rho_j
        candidate = [(q * m.weight, m.state) for q, psi_k in whole.ensemble
                     for m in induced_ensemble(psi_k, party).members]
        marginals.append(marginal_value(partial_trace(rho, [party]), party, f, marginal_method,
                                        roof_cfg, [candidate]))
    terms, upper = _marginal_terms(marginals)
    tol = _tol(tol, True)
    gap = whole.value - sum(t.value for t in terms)

    if gap >= -tol:
        verdict = PASS if not upper else INDETERMINATE
    elif not upper:
        verdict = judge(gap, tol, f)
    else:
        verdict = INDETERMINATE

    notes = [] if lhs_exact else [LHS_UPPER_NOTE]
    if upper:
        notes.append(MARGINAL_UPPER_NOTE.format(parties=upper))
    extras = {"roof": whole.to_dict(), "marginals": [asdict(m) for m in marginals]}
    return _report("mixed-superadditivity", whole.value, terms, tol, verdict, "; ".join(notes) or EXACT_NOTE,
                   [rho], f, seed if seed is not None else roof_cfg.seed, extras)


def check_decomposition_chain(rho: DensityMatrix, f: CoherenceFunctional, roof_cfg: Optional[RoofConfig] = None,
                              tol: TolLike = None, seed: Optional[int] = None) -> VerificationReport:
    """sum_k q_k C_f(psi_k) >= sum_j sum_k q_k sum_m w_m C_f(alpha_m^(k)) on the roof's own decomposition"""
    _require_parties(rho)
    roof_cfg = roof_cfg or RoofConfig()
    whole = roof_value(rho, f, roof_cfg)
    tol = _tol(tol, False)
    terms = [
        RhsTerm(f"conditional sum party {party}",
                float(sum(q * induced_ensemble(psi_k, party).objective(f) for q, psi_k in whole.ensemble)))
        for party in range(rho.shape.n_parties)
    ]
    gap = whole.value - sum(t.value for t in terms)
    extras = {"ensemble_reading": ENSEMBLE_READING, "roof": whole.to_dict()}
    return _report("decomposition-chain", whole.value, terms, tol, judge(gap, tol, f),
                   "both sides evaluated on one explicit decomposition", [rho], f,
                   seed if seed is not None else roof_cfg.seed, extras)


def check_product_additivity(parts: Sequence[PureState], f: CoherenceFunctional, tol: TolLike = None,
                             seed: Optional[int] = None) -> VerificationReport:
    """C_f(psi_1 x ... x psi_n) == sum_i C_f(psi_i); passes iff |gap| <= tol"""
    if len(parts) < 2:
        raise ContractViolation(f"product additivity needs at least 2 parts, got {len(parts)}")
    tol = _tol(tol, False)
    composite = tensor_product_all(parts)
    lhs = c_f_pure(f, composite)
    terms = [RhsTerm(f"part {i}", c_f_pure(f, p)) for i, p in enumerate(parts)]
    gap = lhs - sum(t.value for t in terms)

    if not satisfies_mult_separability(f):
        logger.warning("measure %s is not multiplicatively separable: product additivity not applicable", f.name)
        verdict = NOT_APPLICABLE
    else:
        verdict = PASS if abs(gap) <= tol else FAIL
    return _report("product-additivity", lhs, terms, tol, verdict, "equality check, both directions",
                   [composite], f, seed, {"part_dims": [list(p.dims) for p in parts]})


def check_mult_separability_pair(x: np.ndarray, y: np.ndarray, f: CoherenceFunctional,
                                 tol: TolLike = None, seed: Optional[int] = None,
                                 digest_state: Optional[StateLike] = None) -> VerificationReport:
    """f(x) + f(y) == f(x kron y) as a report"""
    if tol is None:
        tol = _DEFAULT_TOLERANCES
    tol = tol.separability if isinstance(tol, Tolerances) else float(tol)
    sep = check_mult_separability(f, x, y, tol)
    terms = [RhsTerm("f(x kron y)", float(sep.rhs))]
    gap = float(sep.lhs - sep.rhs)
    if sep.passed:
        verdict = PASS
    else:
        verdict = FAIL if f.multiplicative else FINDING
    states = [digest_state] if digest_state is not None else []
    report = VerificationReport(
        inequality_id="mult-separability", lhs=float(sep.lhs), rhs_terms=terms, gap=gap, tol=tol,
        verdict=verdict, direction_notes="equality check, both directions",
        input_digest=input_digest(*states) if states else hashlib.sha256(
            np.concatenate([x, y]).astype("<f8").tobytes()).hexdigest(),
        seed=seed, dims=(len(x), len(y)), measure=f.name,
        extras={"x": list(map(float, x)), "y": list(map(float, y))})
    return report


def run_check(inequality_id: str, state: Union[StateLike, Sequence[PureState]], f: CoherenceFunctional,
              tol: TolLike = None, roof_cfg: Optional[RoofConfig] = None,
              marginal_method: str = "auto", seed: Optional[int] = None) -> VerificationReport:
    """Dispatch one inequality id on one input

    Product checks take a list of parts; mixed checks take a DensityMatrix and
    promote pure inputs to projectors.
    """
    if inequality_id == "product-additivity":
        parts = list(state) if isinstance(state, (list, tuple)) else None
        if parts is None:
            raise ContractViolation("product-additivity needs a list of pure parts")
        return check_product_additivity(parts, f, tol, seed)
    if inequality_id == "mult-separability":
        parts = list(state) if isinstance(state, (list, tuple)) else []
        if len(parts) < 2:
            raise ContractViolation("mult-separability needs at least two pure parts")
        probs = [np.abs(p.amplitudes) ** 2 for p in parts[:2]]
        return check_mult_separability_pair(probs[0], probs[1], f, tol, seed, tensor_product_all(parts[:2]))

    if inequality_id in ("mixed-superadditivity", "decomposition-chain"):
        rho = projector(state) if isinstance(state, PureState) else state
        if inequality_id == "mixed-superadditivity":
            return check_mixed_superadditivity(rho, f, roof_cfg, tol, marginal_method, seed)
        return check_decomposition_chain(rho, f, roof_cfg, tol, seed)

    if not isinstance(state, PureState):
        raise ContractViolation(f"{inequality_id} needs a pure state")
    if inequality_id == "bipartite-sufficient":
        return check_bipartite_sufficient(state, f, tol, seed)
    if inequality_id == "bipartite-alternative":
        return check_bipartite_alternative(state, f, tol, seed)
    if inequality_id == "tripartite":
        return check_tripartite(state, f, tol, seed)
    if inequality_id == "npartite":
        return check_npartite(state, f, tol, seed)
    if inequality_id == "reduced-superadditivity":
        return check_superadditivity_reduced(state, f, tol, marginal_method, roof_cfg, seed)
    if inequality_id == "conditional-vs-marginal":
        return check_conditional_vs_marginal(state, f, tol, marginal_method, roof_cfg, seed)
    raise ContractViolation(f"unknown inequality id {inequality_id!r}")
