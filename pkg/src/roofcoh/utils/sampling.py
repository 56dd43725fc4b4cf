"""
Seeded generators for random states, probability vectors and incoherent channels.

Every generator is a pure function of its parameters, a 64-bit ``seed`` and a
``stream`` id. Streams are derived with numpy's ``SeedSequence(seed,
spawn_key=(stream,))`` feeding a ``PCG64`` bit generator, so parallel sweeps
that hand out disjoint stream ids never share random numbers.
"""

import logging
from typing import List, Sequence, Tuple, Union

import numpy as np

from ..exceptions import ContractViolation
from ..models.channels import IncoherentChannel
from ..models.states import (DensityMatrix, ProbabilityVector, PureState, SubsystemShape,
                             tensor_product_all)

logger = logging.getLogger(__name__)

PRNG_ALGORITHM = "numpy-PCG64/SeedSequence-v1"
_MAX_CHANNEL_ATTEMPTS = 1000

ShapeLike = Union[SubsystemShape, Sequence[int], int]


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for (seed, stream)"""
    sequence = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(sequence))


def as_shape(shape: ShapeLike) -> SubsystemShape:
    if isinstance(shape, SubsystemShape):
        return shape
    if isinstance(shape, (int, np.integer)):
        return SubsystemShape((int(shape),))
    return SubsystemShape(tuple(shape))


def complex_gaussian(rng: np.random.Generator, size) -> np.ndarray:
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def haar_pure(shape: ShapeLike, seed: int, stream: int = 0) -> PureState:
    """Haar-random pure state: normalized standard complex Gaussian amplitudes"""
    shape = as_shape(shape)
    amps = complex_gaussian(make_rng(seed, stream), shape.total_dim)
    return PureState(amps / np.linalg.norm(amps), shape)


def ginibre_mixed(dim: ShapeLike, rank: int, seed: int, stream: int = 0) -> DensityMatrix:
    """rho = G G^H / Tr(G G^H) with G a dim x rank complex Gaussian matrix"""
    shape = as_shape(dim)
    if not 1 <= rank <= shape.total_dim:
        raise ContractViolation(f"rank must lie in [1, {shape.total_dim}], got {rank}")
    g = complex_gaussian(make_rng(seed, stream), (shape.total_dim, rank))
    return DensityMatrix.from_unnormalized(g @ g.conj().T, shape)


def random_product_pure(shape: ShapeLike, seed: int, stream: int = 0) -> Tuple[PureState, List[PureState]]:
    """Haar-random single-party factors and their tensor product"""
    shape = as_shape(shape)
    rng = make_rng(seed, stream)
    parts = []
    for d in shape.dims:
        amps = complex_gaussian(rng, d)
        parts.append(PureState(amps / np.linalg.norm(amps), SubsystemShape((d,))))
    return tensor_product_all(parts), parts


def random_probability_vector(dim: int, seed: int, stream: int = 0) -> ProbabilityVector:
    """Uniform draw from the probability simplex"""
    return ProbabilityVector.normalized(make_rng(seed, stream).dirichlet(np.ones(dim)))


def random_diagonal_state(shape: ShapeLike, seed: int, stream: int = 0) -> DensityMatrix:
    shape = as_shape(shape)
    probs = random_probability_vector(shape.total_dim, seed, stream).probs
    return DensityMatrix(np.diag(probs).astype(complex), shape)


def random_incoherent_channel(dim: int, n_kraus: int, seed: int, stream: int = 0) -> IncoherentChannel:
    """Random incoherent channel with ``n_kraus`` Kraus operators

    Each operator sends a random subset of columns to uniformly drawn rows with
    complex Gaussian amplitudes. Several columns may land on the same row, so
    operators need not be injective on the basis. Amplitudes are then
    rescaled per column across the whole Kraus set so that
    sum_n K_n^H K_n = I. Draws that leave a column unused by every operator
    are regenerated.
    """
    if n_kraus < 1:
        raise ContractViolation(f"n_kraus must be >= 1, got {n_kraus}")
    rng = make_rng(seed, stream)
    for attempt in range(_MAX_CHANNEL_ATTEMPTS):
        amplitudes = np.zeros((n_kraus, dim), dtype=complex)
        rows = np.zeros((n_kraus, dim), dtype=int)
        for n in range(n_kraus):
            active = rng.random(dim) < 0.75
            rows[n] = rng.integers(0, dim, size=dim)
            amplitudes[n, active] = complex_gaussian(rng, int(active.sum()))
        column_norms = np.sum(np.abs(amplitudes) ** 2, axis=0)
        if np.all(column_norms > 0):
            break
        logger.debug("Regenerating channel draw %d: a column was never used", attempt)
    else:
        raise ContractViolation("could not draw a valid incoherent channel")

    amplitudes = amplitudes / np.sqrt(column_norms)
    ops = []
    for n in range(n_kraus):
        k = np.zeros((dim, dim), dtype=complex)
        k[rows[n], np.arange(dim)] = amplitudes[n]
        ops.append(k)
    return IncoherentChannel(tuple(ops))
