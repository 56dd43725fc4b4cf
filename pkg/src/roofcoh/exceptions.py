"""
Error hierarchy for roofcoh.

Every error also derives from ``ValueError`` so callers that only know about
the builtin keep working.
"""

from typing import List, Optional


class RoofcohError(Exception):
    """Base class for all package errors"""


class ContractViolation(RoofcohError, ValueError):
    """An operation was called outside its precondition (arity, keep set, rank...)"""


class StateValidationError(RoofcohError, ValueError):
    """A state failed normalization, Hermiticity, positivity or trace checks"""


class StateFileError(StateValidationError):
    """A JSON state file does not follow the state schema"""

    def __init__(self, message: str, diagnostics: Optional[List[str]] = None):
        self.diagnostics = list(diagnostics or [])
        if self.diagnostics:
            message = f"{message}: " + "; ".join(self.diagnostics)
        super().__init__(message)


class FunctionalError(RoofcohError, ValueError):
    """Unknown measure name or a plug-in functional that failed its spot-checks"""


class ConfigurationError(RoofcohError, ValueError):
    """Bad parameter file, sweep spec or environment setting"""
