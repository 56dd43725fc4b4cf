"""
Parameter classes for roof optimization, tolerances and sweep configuration.
"""

import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from ..exceptions import ConfigurationError, ContractViolation

THREADS_ENV_VAR = "ROOFCOH_THREADS"
MAX_AUTO_ENSEMBLE_SIZE = 16

INEQUALITY_IDS = (
    "bipartite-sufficient",
    "bipartite-alternative",
    "tripartite",
    "npartite",
    "reduced-superadditivity",
    "conditional-vs-marginal",
    "mixed-superadditivity",
    "decomposition-chain",
    "product-additivity",
    "mult-separability",
)

MARGINAL_METHODS = ("auto", "closed-form", "roof")
SAMPLE_KINDS = ("auto", "pure", "mixed", "product")


@dataclass
class RoofConfig:
    """Budget and seeding for the convex-roof optimizer"""
    # None selects r**2 members capped at MAX_AUTO_ENSEMBLE_SIZE (never below r)
    ensemble_size: Optional[int] = None
    restarts: int = 32
    max_iters: int = 2000
    obj_tol: float = 1e-8
    seed: int = 7

    def __post_init__(self):
        if self.restarts < 1:
            raise ConfigurationError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_iters < 1:
            raise ConfigurationError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.obj_tol > 0:
            raise ConfigurationError(f"obj_tol must be > 0, got {self.obj_tol}")
        if self.ensemble_size is not None and self.ensemble_size < 1:
            raise ConfigurationError(f"ensemble_size must be >= 1, got {self.ensemble_size}")

    def resolve_ensemble_size(self, rank: int) -> int:
        """Number of ensemble members used for a state of the given numerical rank"""
        if self.ensemble_size is None:
            return max(rank, min(rank * rank, MAX_AUTO_ENSEMBLE_SIZE))
        if self.ensemble_size < rank:
            raise ContractViolation(
                f"ensemble_size={self.ensemble_size} is below the state rank {rank}")
        return self.ensemble_size

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class Tolerances:
    """Pass tolerances by kind of check"""
    pure: float = 1e-9
    roof: float = 1e-4
    separability: float = 1e-12


@dataclass
class AxiomConfig:
    """Settings of the coherence-measure axiom suite"""
    # Reduced roof budget: every monotonicity sample carries its own candidate decomposition
    roof: RoofConfig = field(default_factory=lambda: RoofConfig(restarts=4, max_iters=300))
    min_kraus: int = 1
    max_kraus: int = 4
    convexity_weights: List[float] = field(default_factory=lambda: [0.25, 0.5, 0.75])
    mixed_rank: int = 2


@dataclass
class SweepSpec:
    """Everything needed to reproduce a randomized sweep"""
    dims: List[int] = field(default_factory=lambda: [2, 2])
    count: int = 100
    measure: str = "formation"
    inequalities: List[str] = field(default_factory=lambda: ["bipartite-sufficient"])
    seed: int = 7
    # None picks Tolerances.pure or Tolerances.roof depending on the check
    tol: Optional[float] = None
    output: Optional[str] = None
    roof: RoofConfig = field(default_factory=RoofConfig)
    marginal_method: str = "auto"
    # auto: product parts for additivity ids, Ginibre states for mixed ids, Haar states otherwise
    kind: str = "auto"
    mixed_rank: int = 2
    emit_plot: bool = False

    def __post_init__(self):
        if isinstance(self.roof, dict):
            self.roof = RoofConfig(**self.roof)
        self.dims = [int(d) for d in self.dims]
        if any(d < 2 for d in self.dims):
            raise ConfigurationError(f"every party dimension must be >= 2, got {self.dims}")
        if self.count < 1:
            raise ConfigurationError(f"count must be >= 1, got {self.count}")
        unknown = [i for i in self.inequalities if i not in INEQUALITY_IDS]
        if unknown:
            raise ConfigurationError(f"unknown inequality ids {unknown}; choose from {list(INEQUALITY_IDS)}")
        if self.marginal_method not in MARGINAL_METHODS:
            raise ConfigurationError(f"marginal_method must be one of {MARGINAL_METHODS}")
        if self.kind not in SAMPLE_KINDS:
            raise ConfigurationError(f"kind must be one of {SAMPLE_KINDS}, got {self.kind!r}")
        if self.mixed_rank < 1:
            raise ConfigurationError(f"mixed_rank must be >= 1, got {self.mixed_rank}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SweepSpec":
        _reject_unknown_keys(cls, data, "sweep spec")
        return cls(**data)

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "SweepSpec":
        return cls.from_dict(_read_json(path))


def _read_json(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read parameter file {path}: {exc}") from exc


def _reject_unknown_keys(cls, data: Dict[str, Any], what: str):
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigurationError(f"unknown {what} keys: {unknown}")


def load_parameters(path: Union[str, Path]) -> Dict[str, Any]:
    """Build parameter objects from a JSON file shaped like data/parameters/default_params.json"""
    raw = _read_json(path)
    sections = {
        "roof_parameters": RoofConfig,
        "tolerances": Tolerances,
    }
    unknown = sorted(set(raw) - set(sections) - {"axiom_parameters"})
    if unknown:
        raise ConfigurationError(f"unknown parameter sections: {unknown}")

    params: Dict[str, Any] = {}
    for key, cls in sections.items():
        section = raw.get(key, {})
        _reject_unknown_keys(cls, section, key)
        params[key] = cls(**section)

    axiom_section = dict(raw.get("axiom_parameters", {}))
    _reject_unknown_keys(AxiomConfig, axiom_section, "axiom_parameters")
    if "roof" in axiom_section:
        axiom_section["roof"] = RoofConfig(**axiom_section["roof"])
    params["axiom_parameters"] = AxiomConfig(**axiom_section)
    return params


def resolve_workers(requested: Optional[int] = None) -> int:
    """Worker pool size: the request (default: CPU count) capped by ROOFCOH_THREADS"""
    workers = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get(THREADS_ENV_VAR)
    if cap:
        try:
            cap_value = int(cap)
        except ValueError as exc:
            raise ConfigurationError(f"{THREADS_ENV_VAR} must be an integer, got {cap!r}") from exc
        if cap_value < 1:
            raise ConfigurationError(f"{THREADS_ENV_VAR} must be >= 1, got {cap_value}")
        workers = min(workers, cap_value)
    return max(1, workers)
