"""
roofcoh: convex-roof coherence measures

Pure-state coherence functionals, their convex-roof extension to mixed states,
and numerical checks of superadditivity, additivity and the coherence-measure
axioms on multipartite states.
"""

__version__ = "1.0.0"
__author__ = "roofcoh developers"

from .exceptions import (ConfigurationError, ContractViolation, FunctionalError, RoofcohError,
                         StateFileError, StateValidationError)
from .models.functionals import FORMATION, HALF, CoherenceFunctional, c_f_pure, get_functional, register_functional
from .models.parameters import AxiomConfig, RoofConfig, SweepSpec, Tolerances
from .models.states import DensityMatrix, ProbabilityVector, PureState, SubsystemShape
from .analysis.roof import RoofResult, roof_value
from .analysis.verify import VerificationReport, run_check
from .analysis.axioms import check_axioms
from .analysis.sweep import run_sweep

__all__ = [
    'RoofcohError', 'ContractViolation', 'StateValidationError', 'StateFileError', 'FunctionalError',
    'ConfigurationError',
    'CoherenceFunctional', 'FORMATION', 'HALF', 'c_f_pure', 'get_functional', 'register_functional',
    'RoofConfig', 'Tolerances', 'AxiomConfig', 'SweepSpec',
    'SubsystemShape', 'ProbabilityVector', 'PureState', 'DensityMatrix',
    'RoofResult', 'roof_value', 'VerificationReport', 'run_check', 'check_axioms', 'run_sweep',
]
