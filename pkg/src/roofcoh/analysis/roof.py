"""
Convex-roof extension C_f(rho) = inf sum_i p_i C_f(phi_i) over decompositions of rho.

With rho = sum_k lambda_k |e_k><e_k| on its rank-r support, every size-m
ensemble is sqrt(p_i) |phi_i> = sum_k V_ik sqrt(lambda_k) |e_k> for an m x r
isometry V (V^H V = I). The objective is minimized over V by steepest descent
on the complex Stiefel manifold with polar retraction, restarted from seeded
random isometries. The result is an attained decomposition, hence an upper
bound on the infimum.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from ..exceptions import ContractViolation
from ..models.functionals import CoherenceFunctional
from ..models.parameters import RoofConfig
from ..models.states import (DensityMatrix, ProbabilityVector, PureState, SubsystemShape, eig_psd,
                             is_incoherent, numerical_rank, shannon_entropy)
from ..utils.sampling import complex_gaussian, make_rng

logger = logging.getLogger(__name__)

Ensemble = List[Tuple[float, PureState]]

MEMBER_CUTOFF = 1e-15
RECONSTRUCTION_TOL = 1e-8
INITIAL_STEP = 0.1
MIN_STEP = 1e-14
MAX_STEP = 1.0
STALL_WINDOW = 10


@dataclass
class RoofResult:
    value: float
    ensemble: Ensemble
    per_restart_values: Tuple[float, ...]
    converged: bool
    rank: int = 1
    ensemble_size: int = 1
    eigen_objective: float = 0.0
    iterations: int = 0
    source: str = "descent"
    notes: List[str] = field(default_factory=list)

    def reconstruct(self) -> np.ndarray:
        return sum(w * np.outer(s.amplitudes, s.amplitudes.conj()) for w, s in self.ensemble)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "converged": self.converged,
            "rank": self.rank,
            "ensemble_size": self.ensemble_size,
            "eigen_objective": self.eigen_objective,
            "iterations": self.iterations,
            "source": self.source,
            "per_restart_values": list(self.per_restart_values),
            "ensemble": [
                {"weight": w, "amplitudes": [[float(a.real), float(a.imag)] for a in s.amplitudes]}
                for w, s in self.ensemble
            ],
            "notes": list(self.notes),
        }


def ensemble_objective(ensemble: Sequence[Tuple[float, PureState]], f: CoherenceFunctional) -> float:
    """sum_i p_i C_f(phi_i)"""
    weights = ProbabilityVector(np.array([w for w, _ in ensemble], dtype=float)).probs
    rows = np.array([np.abs(s.amplitudes) ** 2 for _, s in ensemble])
    rows = rows / rows.sum(axis=1, keepdims=True)
    return float(np.dot(weights, np.atleast_1d(f(rows))))


def binary_entropy(x: float) -> float:
    return float(shannon_entropy(np.array([x, 1.0 - x])))


def qubit_formation_closed_form(rho: DensityMatrix) -> float:
    """Coherence of formation of a qubit: h((1 + sqrt(1 - 4|rho_01|^2)) / 2)"""
    if rho.shape.total_dim != 2:
        raise ContractViolation(f"closed form needs a qubit, got total dimension {rho.shape.total_dim}")
    c = abs(rho.matrix[0, 1])
    return binary_entropy(0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - 4.0 * c * c))))


def _retract(z: np.ndarray) -> np.ndarray:
    return linalg.polar(z)[0]


def _objective(v: np.ndarray, w: np.ndarray, f: CoherenceFunctional) -> float:
    psi = v @ w.T
    return float(np.sum(f.homogeneous(np.abs(psi) ** 2)))


def _riemannian_gradient(v: np.ndarray, w: np.ndarray, f: CoherenceFunctional) -> np.ndarray:
    psi = v @ w.T
    g = f.homogeneous_gradient(np.abs(psi) ** 2)
    euclidean = 2.0 * (g * psi) @ w.conj()
    inner = v.conj().T @ euclidean
    return euclidean - v @ (0.5 * (inner + inner.conj().T))


def _descend(v: np.ndarray, w: np.ndarray, f: CoherenceFunctional, cfg: RoofConfig) -> Tuple[np.ndarray, float, int, bool]:
    """Normalized steepest descent with adaptive step and polar retraction"""
    value = _objective(v, w, f)
    step = INITIAL_STEP
    history = [value]
    for iteration in range(1, cfg.max_iters + 1):
        grad = _riemannian_gradient(v, w, f)
        norm = np.linalg.norm(grad)
        if not np.isfinite(norm) or norm < 1e-12:
            return v, value, iteration, True
        direction = -grad / norm

        while step > MIN_STEP:
            candidate = _retract(v + step * direction)
            candidate_value = _objective(candidate, w, f)
            if candidate_value < value:
                break
            step *= 0.5
        else:
            # no decrease at any resolvable step: numerically stationary
            return v, value, iteration, True

        v, value = candidate, candidate_value
        step = min(2.0 * step, MAX_STEP)
        history.append(value)
        if len(history) > STALL_WINDOW and history[-STALL_WINDOW - 1] - value < cfg.obj_tol:
            return v, value, iteration, True
    return v, value, cfg.max_iters, False


def _ensemble_from_isometry(v: np.ndarray, w: np.ndarray, shape: SubsystemShape) -> Ensemble:
    psi = v @ w.T
    weights = np.sum(np.abs(psi) ** 2, axis=1)
    total = weights.sum()
    ensemble = []
    for row, p in zip(psi, weights):
        if p > MEMBER_CUTOFF:
            ensemble.append((float(p / total), PureState(row / np.sqrt(p), shape)))
    return ensemble


def _check_decomposes(ensemble: Ensemble, rho: DensityMatrix):
    matrix = sum(p * np.outer(s.amplitudes, s.amplitudes.conj()) for p, s in ensemble)
    error = np.max(np.abs(matrix - rho.matrix))
    if error > RECONSTRUCTION_TOL:
        raise ContractViolation(f"candidate ensemble does not decompose rho (max error {error:.3e})")


def roof_value(rho: DensityMatrix, f: CoherenceFunctional, cfg: Optional[RoofConfig] = None,
               candidates: Optional[Sequence[Ensemble]] = None) -> RoofResult:
    """Upper bound on C_f(rho) attained by an explicit decomposition

    ``candidates`` are extra decompositions of rho; the returned value never
    exceeds the best of them, nor the eigendecomposition's objective.
    """
    cfg = cfg or RoofConfig()
    values, vectors = eig_psd(rho)
    rank = numerical_rank(values)

    if rank == 1:
        psi = PureState(vectors[:, 0] / np.linalg.norm(vectors[:, 0]), rho.shape)
        ensemble = [(1.0, psi)]
        value = ensemble_objective(ensemble, f)
        return RoofResult(value, ensemble, (value,), True, rank=1, ensemble_size=1,
                          eigen_objective=value, source="rank-one")

    if is_incoherent(rho):
        diagonal = rho.diagonal()
        ensemble = [
            (float(p), PureState.basis(i, rho.shape.dims))
            for i, p in enumerate(diagonal / diagonal.sum()) if p > MEMBER_CUTOFF
        ]
        value = ensemble_objective(ensemble, f)
        return RoofResult(value, ensemble, (value,), True, rank=rank, ensemble_size=len(ensemble),
                          eigen_objective=value, source="incoherent")

    m = cfg.resolve_ensemble_size(rank)
    w = vectors[:, :rank] * np.sqrt(values[:rank])
    eigen_isometry = np.eye(m, rank, dtype=complex)
    eigen_objective = _objective(eigen_isometry, w, f)

    best_v, best_value, best_iters, best_converged, best_source = eigen_isometry, eigen_objective, 0, True, "eigen"
    per_restart = []
    for restart in range(cfg.restarts):
        if restart == 0:
            start = eigen_isometry
        else:
            start = _retract(complex_gaussian(make_rng(cfg.seed, restart), (m, rank)))
        v, value, iterations, converged = _descend(start, w, f, cfg)
        per_restart.append(value)
        logger.debug("roof restart %d: value %.12g after %d iterations", restart, value, iterations)
        if value < best_value or restart == 0:
            best_v, best_value, best_iters, best_converged = v, value, iterations, converged
            best_source = f"restart-{restart}"

    ensemble = _ensemble_from_isometry(best_v, w, rho.shape)
    value = ensemble_objective(ensemble, f)
    source = best_source

    for index, candidate in enumerate(candidates or []):
        _check_decomposes(candidate, rho)
        candidate_value = ensemble_objective(candidate, f)
        if candidate_value < value:
            ensemble, value, source = list(candidate), candidate_value, f"candidate-{index}"

    if not best_converged:
        logger.warning("roof optimizer hit max_iters=%d without converging; value %.6g is still an upper bound",
                       cfg.max_iters, value)
    logger.debug("roof value %.12g (rank %d, %d members, source %s)", value, rank, m, source)
    return RoofResult(value, ensemble, tuple(per_restart), best_converged, rank=rank, ensemble_size=m,
                      eigen_objective=eigen_objective, iterations=best_iters, source=source)
