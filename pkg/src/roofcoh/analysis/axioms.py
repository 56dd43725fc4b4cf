"""
Randomized checks of the four coherence-measure conditions.

Only the forward directions are exercised: incoherent inputs must score zero,
but coherent inputs scoring zero, or channels preserving the value, are not
treated as violations.
"""

import logging
from typing import List, Optional

import numpy as np

from ..models.channels import apply_channel, pure_branches
from ..models.functionals import CoherenceFunctional, c_f_pure
from ..models.parameters import AxiomConfig, Tolerances
from ..models.states import SubsystemShape, mix, projector
from ..utils.sampling import ginibre_mixed, haar_pure, make_rng, random_diagonal_state, random_incoherent_channel
from .roof import roof_value
from .verify import RhsTerm, TolLike, VerificationReport, input_digest, judge

logger = logging.getLogger(__name__)

FORWARD_ONLY_NOTE = "forward directions only; the reverse (only-if) directions are not tested"
# disjoint PRNG streams per sample
_STREAMS_PER_SAMPLE = 8


def _stream(sample: int, slot: int) -> int:
    return sample * _STREAMS_PER_SAMPLE + slot


def _worst(gaps: List[float]) -> int:
    return int(np.argmin(gaps))


def _aggregate(inequality_id: str, lhs: List[float], rhs: List[float], rhs_label: str, tol: float, verdict: str,
               notes: str, states, f: CoherenceFunctional, seed: int, dim: int, extras=None) -> VerificationReport:
    """Report the worst sample; every per-sample gap goes into extras"""
    gaps = [a - b for a, b in zip(lhs, rhs)]
    worst = _worst(gaps)
    record = {"sample_gaps": gaps, "worst_sample": worst, "samples": len(gaps)}
    record.update(extras or {})
    return VerificationReport(
        inequality_id=inequality_id, lhs=float(lhs[worst]), rhs_terms=[RhsTerm(rhs_label, float(rhs[worst]))],
        gap=float(gaps[worst]), tol=tol, verdict=verdict, direction_notes=f"{notes}; {FORWARD_ONLY_NOTE}",
        input_digest=input_digest(*states), seed=seed, dims=(dim,), measure=f.name, extras=record)


def check_axioms(f: CoherenceFunctional, dim: int, samples: int, seed: int, tol: TolLike = None,
                 cfg: Optional[AxiomConfig] = None) -> List[VerificationReport]:
    """Positivity, monotonicity, selective-measurement monotonicity and convexity

    Returns one report per condition, each carrying its worst sample.
    Monotonicity runs on pure and on mixed inputs. The selective branches of
    every member of an input decomposition are pure and decompose the channel
    output, so they seed the output roof with a value no larger than the
    input's.
    """
    cfg = cfg or AxiomConfig()
    tolerances = tol if isinstance(tol, Tolerances) else Tolerances()
    explicit = tol is not None and not isinstance(tol, Tolerances)
    pure_tol = float(tol) if explicit else tolerances.pure
    roof_tol = float(tol) if explicit else tolerances.roof
    shape = SubsystemShape((dim,))
    rng = make_rng(seed, 0)
    logger.info("Checking axioms for %s in dimension %d over %d samples", f.name, dim, samples)

    pure_states = [haar_pure(shape, seed, _stream(i, 1)) for i in range(samples)]
    diagonal_states = [random_diagonal_state(shape, seed, _stream(i, 2)) for i in range(samples)]
    n_kraus = rng.integers(cfg.min_kraus, cfg.max_kraus + 1, size=samples)
    channels = [random_incoherent_channel(dim, int(n_kraus[i]), seed, _stream(i, 3)) for i in range(samples)]

    # positivity: coherent values nonnegative, incoherent values zero
    coherent = [c_f_pure(f, psi) for psi in pure_states]
    incoherent = [roof_value(rho, f, cfg.roof).value for rho in diagonal_states]
    positivity_lhs = [min(c, -abs(z)) for c, z in zip(coherent, incoherent)]
    zeros = [0.0] * samples
    gap = min(positivity_lhs)
    positivity = _aggregate(
        "axiom-positivity", positivity_lhs, zeros, "zero", pure_tol, judge(gap, pure_tol, f),
        "lhs is min(C(pure sample), -|C(incoherent sample)|), exact", pure_states + diagonal_states, f, seed, dim,
        {"min_coherent": float(min(coherent)), "max_incoherent": float(max(abs(z) for z in incoherent))})

    before, after, averaged = [], [], []
    for psi, channel in zip(pure_states, channels):
        branches = pure_branches(channel, psi)
        value = c_f_pure(f, psi)
        before.append(value)
        averaged.append(float(sum(p * c_f_pure(f, b) for p, b in branches)))
        output = apply_channel(channel, projector(psi))
        after.append(roof_value(output, f, cfg.roof, candidates=[branches]).value)

    rank = min(cfg.mixed_rank, dim)
    monotone_before, monotone_after, mixed_monotone_inputs = list(before), list(after), []
    for i, channel in enumerate(channels):
        rho = ginibre_mixed(shape, rank, seed, _stream(i, 6))
        whole = roof_value(rho, f, cfg.roof)
        pushed = [(q * p, branch) for q, psi_k in whole.ensemble for p, branch in pure_branches(channel, psi_k)]
        monotone_before.append(whole.value)
        monotone_after.append(roof_value(apply_channel(channel, rho), f, cfg.roof, candidates=[pushed]).value)
        mixed_monotone_inputs.append(rho)

    gap = min(a - b for a, b in zip(monotone_before, monotone_after))
    monotonicity = _aggregate(
        "axiom-monotonicity", monotone_before, monotone_after, "roof of channel output", roof_tol,
        judge(gap, roof_tol, f, one_sided=True),
        "both sides are roof optimizer upper bounds; the rhs is seeded with the selective branches of the lhs "
        "decomposition, so a pass is conservative",
        pure_states + mixed_monotone_inputs, f, seed, dim,
        {"n_kraus": [int(k) for k in n_kraus], "input_kinds": ["pure"] * samples + ["mixed"] * samples})

    gap = min(a - b for a, b in zip(before, averaged))
    selective = _aggregate(
        "axiom-selective", before, averaged, "average over selective outcomes", pure_tol, judge(gap, pure_tol, f),
        "pure branches evaluated exactly", pure_states, f, seed, dim, {"n_kraus": [int(k) for k in n_kraus]})

    mixtures_lhs, mixtures_rhs, mixed_inputs, weights_used = [], [], [], []
    for i in range(samples):
        rho1 = ginibre_mixed(shape, rank, seed, _stream(i, 4))
        rho2 = ginibre_mixed(shape, rank, seed, _stream(i, 5))
        c1 = roof_value(rho1, f, cfg.roof).value
        c2 = roof_value(rho2, f, cfg.roof).value
        for t in cfg.convexity_weights:
            mixtures_lhs.append(t * c1 + (1.0 - t) * c2)
            mixtures_rhs.append(roof_value(mix([rho1, rho2], [t, 1.0 - t]), f, cfg.roof).value)
            weights_used.append(t)
        mixed_inputs.extend([rho1, rho2])

    gap = min(a - b for a, b in zip(mixtures_lhs, mixtures_rhs))
    convexity = _aggregate(
        "axiom-convexity", mixtures_lhs, mixtures_rhs, "roof of the mixture", roof_tol,
        judge(gap, roof_tol, f, one_sided=True),
        "both sides are roof optimizer upper bounds; a negative gap beyond tol points at under-optimization",
        mixed_inputs, f, seed, dim, {"weights": weights_used})

    reports = [positivity, monotonicity, selective, convexity]
    for report in reports:
        logger.info("%s: verdict %s, worst gap %.3e", report.inequality_id, report.verdict, report.gap)
    return reports
