"""
Incoherent quantum channels in Kraus form.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from ..exceptions import ContractViolation, StateValidationError
from .states import DensityMatrix, PureState

COMPLETENESS_TOL = 1e-10
NONZERO_TOL = 1e-14
BRANCH_CUTOFF = 1e-14


@dataclass(frozen=True, eq=False)
class IncoherentChannel:
    """Trace-preserving map whose Kraus operators keep incoherent states incoherent"""
    kraus: Tuple[np.ndarray, ...]
    name: str = "random"

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.kraus)
        if not ops:
            raise StateValidationError("a channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        if any(k.shape != (dim, dim) for k in ops):
            raise StateValidationError("Kraus operators must all be square and of one size")
        completeness = sum(k.conj().T @ k for k in ops)
        deviation = np.max(np.abs(completeness - np.eye(dim)))
        if deviation > COMPLETENESS_TOL:
            raise StateValidationError(f"sum K^H K deviates from identity by {deviation:.3e}")
        for n, k in enumerate(ops):
            per_column = np.count_nonzero(np.abs(k) > NONZERO_TOL, axis=0)
            if np.any(per_column > 1):
                raise StateValidationError(f"Kraus operator {n} has a column with more than one nonzero entry")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ops)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def _check_dim(self, total_dim: int):
        if total_dim != self.dim:
            raise ContractViolation(f"channel of dimension {self.dim} applied to a state of dimension {total_dim}")


def apply_channel(channel: IncoherentChannel, rho: DensityMatrix) -> DensityMatrix:
    """Lambda(rho) = sum_n K_n rho K_n^H"""
    channel._check_dim(rho.shape.total_dim)
    out = sum(k @ rho.matrix @ k.conj().T for k in channel.kraus)
    return DensityMatrix.from_unnormalized(out, rho.shape)


def selective_branches(channel: IncoherentChannel, rho: DensityMatrix) -> List[Tuple[float, DensityMatrix]]:
    """Selective-measurement outcomes (p_n, K_n rho K_n^H / p_n); null branches dropped"""
    channel._check_dim(rho.shape.total_dim)
    branches = []
    for k in channel.kraus:
        unnormalized = k @ rho.matrix @ k.conj().T
        p = float(np.trace(unnormalized).real)
        if p > BRANCH_CUTOFF:
            branches.append((p, DensityMatrix.from_unnormalized(unnormalized, rho.shape)))
    return branches


def pure_branches(channel: IncoherentChannel, psi: PureState) -> List[Tuple[float, PureState]]:
    """Selective outcomes of a pure input, each still pure: (p_n, K_n psi / sqrt(p_n))"""
    channel._check_dim(psi.shape.total_dim)
    branches = []
    for k in channel.kraus:
        out = k @ psi.amplitudes
        p = float(np.vdot(out, out).real)
        if p > BRANCH_CUTOFF:
            branches.append((p, PureState(out / np.sqrt(p), psi.shape)))
    return branches


def full_dephasing_channel(dim: int) -> IncoherentChannel:
    """Kraus operators |i><i|"""
    ops = []
    for i in range(dim):
        k = np.zeros((dim, dim), dtype=complex)
        k[i, i] = 1.0
        ops.append(k)
    return IncoherentChannel(tuple(ops), name="full-dephasing")


def permutation_channel(perm: Sequence[int]) -> IncoherentChannel:
    """Single Kraus operator relabeling basis state c as perm[c]"""
    perm = list(perm)
    if sorted(perm) != list(range(len(perm))):
        raise ContractViolation(f"{perm} is not a permutation")
    k = np.zeros((len(perm), len(perm)), dtype=complex)
    k[perm, np.arange(len(perm))] = 1.0
    return IncoherentChannel((k,), name="permutation")
