"""
Ensembles and reduced states induced on single parties by a multipartite pure state.

Grouping the amplitudes c(i_t, m) of a pure state by the multi-index m of all
parties other than t gives, for every m with weight w_m = sum_i |c(i, m)|^2 > 0,
the conditional state |alpha_m> = w_m^{-1/2} sum_i c(i, m) |i>. The weighted
projectors sum exactly to the reduced state of party t.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

import numpy as np

from ..exceptions import ContractViolation
from .functionals import CoherenceFunctional
from .states import DensityMatrix, PureState, SubsystemShape

logger = logging.getLogger(__name__)

ZERO_WEIGHT_CUTOFF = 1e-14
ENSEMBLE_READING = "complementary-index"


@dataclass(frozen=True)
class EnsembleMember:
    label: Tuple[int, ...]
    weight: float
    state: PureState


@dataclass(frozen=True)
class IndexedEnsemble:
    """Weighted single-party pure states labeled by complementary multi-indices"""
    party: int
    members: Tuple[EnsembleMember, ...]

    @property
    def weights(self) -> np.ndarray:
        return np.array([m.weight for m in self.members])

    def probability_rows(self) -> np.ndarray:
        return np.array([np.abs(m.state.amplitudes) ** 2 for m in self.members])

    def density_matrix(self) -> DensityMatrix:
        """sum_m w_m |alpha_m><alpha_m|"""
        amps = np.array([m.state.amplitudes for m in self.members])
        matrix = (amps.T * self.weights) @ amps.conj()
        return DensityMatrix.from_unnormalized(matrix, self.members[0].state.shape)

    def objective(self, f: CoherenceFunctional) -> float:
        """sum_m w_m C_f(alpha_m)"""
        rows = self.probability_rows()
        rows = rows / rows.sum(axis=1, keepdims=True)
        return float(np.dot(self.weights, np.atleast_1d(f(rows))))

    def to_records(self) -> List[Dict[str, Any]]:
        return [
            {
                "label": list(m.label),
                "weight": m.weight,
                "amplitudes": [[float(a.real), float(a.imag)] for a in m.state.amplitudes],
            }
            for m in self.members
        ]


def _check_multipartite(psi: PureState, party: int):
    if psi.shape.n_parties < 2:
        raise ContractViolation("induced ensembles need a state with at least two parties")
    psi.shape.check_party(party)


def induced_ensemble(psi: PureState, party: int) -> IndexedEnsemble:
    """Conditional ensemble on ``party`` grouped by the other parties' basis indices"""
    _check_multipartite(psi, party)
    dims = psi.shape.dims
    other_dims = tuple(d for p, d in enumerate(dims) if p != party)
    rows = np.moveaxis(psi.tensor(), party, -1).reshape(-1, dims[party])
    weights = np.sum(np.abs(rows) ** 2, axis=1)
    kept = np.flatnonzero(weights > ZERO_WEIGHT_CUTOFF)
    total = weights[kept].sum()
    target_shape = SubsystemShape((dims[party],))

    members = []
    for idx in kept:
        label = tuple(int(i) for i in np.unravel_index(idx, other_dims))
        state = PureState(rows[idx] / np.sqrt(weights[idx]), target_shape)
        members.append(EnsembleMember(label, float(weights[idx] / total), state))
    return IndexedEnsemble(party, tuple(members))


def dephased_weight_state(psi: PureState, party: int) -> PureState:
    """sum_i sqrt(q_i) |i> with q the diagonal of the reduced state of ``party``"""
    _check_multipartite(psi, party)
    others = tuple(p for p in range(psi.shape.n_parties) if p != party)
    probs = np.sum(np.abs(psi.tensor()) ** 2, axis=others)
    probs = probs / probs.sum()
    return PureState(np.sqrt(probs).astype(complex), SubsystemShape((psi.shape.dims[party],)))


def conditional_sum(psi: PureState, party: int, f: CoherenceFunctional) -> float:
    return induced_ensemble(psi, party).objective(f)


def rhs_conditional_sum(psi: PureState, f: CoherenceFunctional) -> np.ndarray:
    """Per-party sum_m w_m C_f(alpha_m) over the induced ensembles"""
    if psi.shape.n_parties < 2:
        raise ContractViolation("conditional sums need a state with at least two parties")
    return np.array([conditional_sum(psi, party, f) for party in range(psi.shape.n_parties)])
