"""
Multipartite pure and mixed states and the linear-algebra primitives on them.

Flat basis index convention: row-major over the party multi-index with party 0
varying slowest, i.e. ``flat = np.ravel_multi_index(multi, dims)``.
"""

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence, Tuple

import numpy as np
from scipy import linalg
from scipy.special import entr

from ..exceptions import ContractViolation, StateValidationError

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGEN_CLIP_TOL = 1e-10
# negative eigenvalues above -ROUNDOFF_EIGEN_TOL are round-off and left in place
ROUNDOFF_EIGEN_TOL = 1e-14
RANK_TOL = 1e-12
ENTROPY_CUTOFF = 1e-15


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class SubsystemShape:
    """Ordered party dimensions of a multipartite system"""
    dims: Tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise StateValidationError("a shape needs at least one party")
        if any(d < 2 for d in dims):
            raise StateValidationError(f"every party dimension must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    def to_multi_index(self, flat: int) -> Tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(flat, self.dims))

    def to_flat(self, multi: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(multi), self.dims))

    def restrict(self, keep: Iterable[int]) -> "SubsystemShape":
        return SubsystemShape(tuple(self.dims[p] for p in sorted(keep)))

    def concat(self, other: "SubsystemShape") -> "SubsystemShape":
        return SubsystemShape(self.dims + other.dims)

    def check_party(self, party: int):
        if not 0 <= party < self.n_parties:
            raise ContractViolation(f"party {party} out of range for {self.n_parties} parties")


@dataclass(frozen=True)
class ProbabilityVector:
    """Nonnegative real vector summing to one"""
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise StateValidationError("a probability vector must be a nonempty 1-D array")
        if not np.all(np.isfinite(probs)):
            raise StateValidationError("probabilities must be finite")
        if np.any(probs < 0):
            raise StateValidationError(f"negative probability {probs.min():.3e}")
        if abs(probs.sum() - 1.0) > NORM_TOL:
            raise StateValidationError(f"probabilities sum to {probs.sum():.15f}, expected 1")
        object.__setattr__(self, "probs", _frozen(probs))

    @classmethod
    def normalized(cls, weights: Sequence[float]) -> "ProbabilityVector":
        weights = np.asarray(weights, dtype=float)
        return cls(weights / weights.sum())

    def __len__(self) -> int:
        return self.probs.size

    def kron(self, other: "ProbabilityVector") -> "ProbabilityVector":
        return ProbabilityVector.normalized(np.kron(self.probs, other.probs))

    def is_deterministic(self, atol: float = NORM_TOL) -> bool:
        return bool(self.probs.max() >= 1.0 - atol)


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit-norm amplitude vector over a multipartite computational basis"""
    amplitudes: np.ndarray
    shape: SubsystemShape

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.shape.total_dim:
            raise StateValidationError(
                f"{amps.size} amplitudes do not match dims {self.shape.dims}")
        if not np.all(np.isfinite(amps)):
            raise StateValidationError("amplitudes must be finite")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise StateValidationError(f"state norm is {norm:.15f}, expected 1")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex], dims: Sequence[int],
                        normalize: bool = False) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise StateValidationError("cannot normalize the zero vector")
            amps = amps / norm
        return cls(amps, SubsystemShape(tuple(dims)))

    @classmethod
    def basis(cls, index: int, dims: Sequence[int]) -> "PureState":
        shape = SubsystemShape(tuple(dims))
        amps = np.zeros(shape.total_dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps, shape)

    @property
    def dims(self) -> Tuple[int, ...]:
        return self.shape.dims

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per party"""
        return self.amplitudes.reshape(self.shape.dims)

    def projector(self) -> "DensityMatrix":
        return projector(self)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive-semidefinite, unit-trace matrix"""
    matrix: np.ndarray
    shape: SubsystemShape

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = self.shape.total_dim
        if m.shape != (d, d):
            raise StateValidationError(f"matrix shape {m.shape} does not match dims {self.shape.dims}")
        if not np.all(np.isfinite(m)):
            raise StateValidationError("matrix entries must be finite")
        asym = np.max(np.abs(m - m.conj().T))
        if asym > HERMITIAN_TOL:
            raise StateValidationError(f"matrix is not Hermitian (max |M - M^H| = {asym:.3e})")
        trace = np.trace(m).real
        if abs(trace - 1.0) > TRACE_TOL:
            raise StateValidationError(f"trace is {trace:.15f}, expected 1")
        m = 0.5 * (m + m.conj().T)
        evals = linalg.eigh(m, eigvals_only=True)
        if evals[0] < -EIGEN_CLIP_TOL:
            raise StateValidationError(f"matrix is not positive semidefinite (min eigenvalue {evals[0]:.3e})")
        if evals[0] < -ROUNDOFF_EIGEN_TOL:
            # clip small negative eigenvalues
            values, vectors = linalg.eigh(m)
            values = np.clip(values, 0.0, None)
            m = (vectors * values) @ vectors.conj().T
            m = 0.5 * (m + m.conj().T) / np.trace(m).real
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, dims: Sequence[int]) -> "DensityMatrix":
        return cls(np.asarray(matrix, dtype=complex), SubsystemShape(tuple(dims)))

    @classmethod
    def from_unnormalized(cls, matrix: np.ndarray, shape: SubsystemShape) -> "DensityMatrix":
        """Hermitize and divide by the trace before validating"""
        m = np.asarray(matrix, dtype=complex)
        m = 0.5 * (m + m.conj().T)
        trace = np.trace(m).real
        if trace <= 0:
            raise StateValidationError(f"cannot normalize a matrix with trace {trace:.3e}")
        return cls(m / trace, shape)

    @classmethod
    def maximally_mixed(cls, dims: Sequence[int]) -> "DensityMatrix":
        shape = SubsystemShape(tuple(dims))
        return cls(np.eye(shape.total_dim, dtype=complex) / shape.total_dim, shape)

    @property
    def dims(self) -> Tuple[int, ...]:
        return self.shape.dims

    def diagonal(self) -> np.ndarray:
        return np.clip(np.diag(self.matrix).real, 0.0, None)


def projector(psi: PureState) -> DensityMatrix:
    """|psi><psi| as a density matrix"""
    amps = psi.amplitudes
    return DensityMatrix.from_unnormalized(np.outer(amps, amps.conj()), psi.shape)


def tensor_product(a: PureState, b: PureState) -> PureState:
    """Kronecker product of two pure states; party lists are concatenated"""
    amps = np.kron(a.amplitudes, b.amplitudes)
    return PureState(amps / np.linalg.norm(amps), a.shape.concat(b.shape))


def tensor_product_all(parts: Sequence[PureState]) -> PureState:
    if not parts:
        raise ContractViolation("tensor product of an empty list")
    return reduce(tensor_product, parts)


def kron_density(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    return DensityMatrix.from_unnormalized(np.kron(a.matrix, b.matrix), a.shape.concat(b.shape))


def mix(states: Sequence[DensityMatrix], weights: Sequence[float]) -> DensityMatrix:
    """Convex combination of density matrices sharing a shape"""
    if len(states) != len(weights) or not states:
        raise ContractViolation("mix needs one weight per state and at least one state")
    shape = states[0].shape
    if any(s.shape != shape for s in states):
        raise ContractViolation("all mixed states must share one shape")
    weights = ProbabilityVector.normalized(weights).probs
    matrix = sum(w * s.matrix for w, s in zip(weights, states))
    return DensityMatrix.from_unnormalized(matrix, shape)


_EINSUM_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the parties in ``keep`` (party order preserved)"""
    keep = sorted(set(int(p) for p in keep))
    n = rho.shape.n_parties
    if not keep or len(keep) == n:
        raise ContractViolation(f"keep must be a nonempty proper subset of {n} parties, got {keep}")
    for p in keep:
        rho.shape.check_party(p)
    if 2 * n > len(_EINSUM_LETTERS):
        raise ContractViolation(f"too many parties ({n}) for partial_trace")

    rows = _EINSUM_LETTERS[:n]
    cols = "".join(rows[p] if p not in keep else _EINSUM_LETTERS[n + p] for p in range(n))
    out = "".join(rows[p] for p in keep) + "".join(cols[p] for p in keep)
    tensor = rho.matrix.reshape(rho.shape.dims + rho.shape.dims)
    reduced = np.einsum(f"{rows}{cols}->{out}", tensor)

    shape = rho.shape.restrict(keep)
    d = shape.total_dim
    return DensityMatrix.from_unnormalized(reduced.reshape(d, d), shape)


def dephase(rho: DensityMatrix) -> DensityMatrix:
    """Zero every off-diagonal entry in the computational basis"""
    return DensityMatrix(np.diag(np.diag(rho.matrix)), rho.shape)


def is_incoherent(rho: DensityMatrix, atol: float = 1e-12) -> bool:
    off_diagonal = rho.matrix - np.diag(np.diag(rho.matrix))
    return bool(np.max(np.abs(off_diagonal)) <= atol)


def shannon_entropy(probs: np.ndarray) -> np.ndarray:
    """Shannon entropy in bits along the last axis; 0 log 0 := 0"""
    return entr(np.asarray(probs, dtype=float)).sum(axis=-1) / np.log(2)


def vn_entropy(rho: DensityMatrix) -> float:
    """Von Neumann entropy in bits"""
    evals = linalg.eigh(rho.matrix, eigvals_only=True)
    evals = np.where(evals < ENTROPY_CUTOFF, 0.0, evals)
    return float(shannon_entropy(evals))


def diag_probs(psi: PureState) -> ProbabilityVector:
    """Squared moduli of the amplitudes"""
    return ProbabilityVector.normalized(np.abs(psi.amplitudes) ** 2)


def eig_psd(rho: DensityMatrix) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending, clipped at 0) and phase-fixed orthonormal eigenvectors

    Each eigenvector's largest-modulus component is made real positive so that
    degenerate spectra still give reproducible bases.
    """
    values, vectors = linalg.eigh(rho.matrix)
    order = np.argsort(values)[::-1]
    values = np.clip(values[order], 0.0, None)
    vectors = vectors[:, order]
    pivots = np.argmax(np.abs(vectors), axis=0)
    phases = vectors[pivots, np.arange(vectors.shape[1])]
    vectors = vectors * (np.abs(phases) / phases)
    return values, vectors


def numerical_rank(values: np.ndarray) -> int:
    """Rank of a clipped spectrum with threshold RANK_TOL * trace"""
    return int(np.count_nonzero(values > RANK_TOL * values.sum()))
