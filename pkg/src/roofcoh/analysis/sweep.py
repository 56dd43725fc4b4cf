"""
Randomized sweeps: sample states, run inequality checks, collect reports in order.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from ..exceptions import ContractViolation
from ..models.functionals import get_functional
from ..models.parameters import SweepSpec, Tolerances, resolve_workers
from ..models.states import SubsystemShape, projector
from ..utils.sampling import PRNG_ALGORITHM, ginibre_mixed, haar_pure, random_product_pure
from .verify import VerificationReport, run_check

logger = logging.getLogger(__name__)

PRODUCT_IDS = ("product-additivity", "mult-separability")
MIXED_IDS = ("mixed-superadditivity", "decomposition-chain")


@dataclass
class SweepResult:
    spec: SweepSpec
    reports: List[VerificationReport] = field(default_factory=list)

    @property
    def violations(self) -> List[VerificationReport]:
        return [r for r in self.reports if r.is_violation]

    def config(self) -> Dict[str, Any]:
        return {"sweep": self.spec.to_dict(), "prng": PRNG_ALGORITHM}


def _kind_for(inequality_id: str, requested: str) -> str:
    if requested != "auto":
        return requested
    if inequality_id in PRODUCT_IDS:
        return "product"
    if inequality_id in MIXED_IDS:
        return "mixed"
    return "pure"


def sample_input(inequality_id: str, spec: SweepSpec, index: int):
    """The input state of row ``index``; stream id = row index"""
    shape = SubsystemShape(tuple(spec.dims))
    kind = _kind_for(inequality_id, spec.kind)
    if kind == "product":
        composite, parts = random_product_pure(shape, spec.seed, index)
        if inequality_id in PRODUCT_IDS:
            return parts
        return composite if inequality_id not in MIXED_IDS else projector(composite)
    if kind == "mixed":
        if inequality_id not in MIXED_IDS:
            raise ContractViolation(f"{inequality_id} needs pure inputs; use kind pure or product")
        return ginibre_mixed(shape, min(spec.mixed_rank, shape.total_dim), spec.seed, index)
    psi = haar_pure(shape, spec.seed, index)
    if inequality_id in PRODUCT_IDS:
        raise ContractViolation(f"{inequality_id} needs product inputs; use kind product")
    return psi


def _run_task(task: Tuple[Dict[str, Any], Optional[Dict[str, Any]], int]) -> List[VerificationReport]:
    """Worker entry point: every check of one sweep row"""
    spec_dict, tolerances_dict, index = task
    spec = SweepSpec.from_dict(spec_dict)
    f = get_functional(spec.measure)
    if spec.tol is not None:
        tol = spec.tol
    else:
        tol = Tolerances(**tolerances_dict) if tolerances_dict else None
    return [
        run_check(inequality_id, sample_input(inequality_id, spec, index), f, tol, spec.roof,
                  spec.marginal_method, spec.seed)
        for inequality_id in spec.inequalities
    ]


def run_sweep(spec: SweepSpec, workers: Optional[int] = None,
              tolerances: Optional[Tolerances] = None) -> SweepResult:
    """Run every inequality of ``spec`` on ``spec.count`` sampled inputs

    Rows come back in index order whatever the pool's completion order, so the
    report depends only on the spec.
    """
    get_functional(spec.measure)
    n_workers = min(resolve_workers(workers), spec.count)
    tasks = [(spec.to_dict(), tolerances.__dict__ if tolerances else None, i) for i in range(spec.count)]
    logger.info("Sweep of %d %s states over %s with %d worker(s)", spec.count, spec.dims, spec.inequalities,
                n_workers)

    result = SweepResult(spec)
    step = max(1, spec.count // 10)
    if n_workers == 1:
        rows = map(_run_task, tasks)
        for done, reports in enumerate(rows, start=1):
            result.reports.extend(reports)
            if done % step == 0:
                logger.info("Sweep progress: %d/%d rows", done, spec.count)
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as executor:
            for done, reports in enumerate(executor.map(_run_task, tasks, chunksize=max(1, step // n_workers)),
                                           start=1):
                result.reports.extend(reports)
                if done % step == 0:
                    logger.info("Sweep progress: %d/%d rows", done, spec.count)

    if result.violations:
        logger.warning("Sweep finished with %d fail/finding rows", len(result.violations))
    return result
