"""
Exception hierarchy for the subspace-witness package.

Every error raised by the package derives from WitnessException.
The CLI maps configuration/validation errors to exit 1 and runtime errors to exit 2.
"""


class WitnessException(Exception):
    """Base exception"""

    def __init__(self, message: str, error_code: str | None = None, details: dict | None = None):
        self.message = message
        self.error_code = error_code or self.__class__.__name__
        self.details = details or {}
        super().__init__(self.message)

    def to_dict(self) -> dict:
        """Dictionary form for reports"""
        return {
            "error": self.message,
            "error_code": self.error_code,
            "details": self.details,
            "status": "failed",
        }


class ConfigurationException(WitnessException):
    """Configuration error"""
    pass


class ValidationException(WitnessException):
    """Input validation error"""
    pass


class OutOfRange(ValidationException):
    """Parameter outside its allowed range"""
    pass


class InvalidExcitation(ValidationException):
    """Dicke excitation count violates 0 < k < n"""
    pass


class InvalidSubspace(ValidationException):
    """Malformed subspace (labels or amplitudes)"""
    pass


class LinearAlgebraException(WitnessException):
    """Linear algebra precondition failed"""
    pass


class NonUnitary(LinearAlgebraException):
    pass


class NonHermitian(LinearAlgebraException):
    pass


class NonHermitianObservable(NonHermitian):
    pass


class DimensionMismatch(LinearAlgebraException):
    pass


class NotPositive(LinearAlgebraException):
    """Smallest eigenvalue below the PSD floor"""
    pass


class NotNormalized(LinearAlgebraException):
    """Trace or norm differs from 1"""
    pass


class NumericalException(WitnessException):
    """Optimisation or fit failure"""
    pass


class OptimizerDidNotConverge(NumericalException):
    pass


class FitDidNotConverge(NumericalException):
    pass


class ReconstructionException(WitnessException):
    """Coherence reconstruction error"""
    pass


class Infeasible(ReconstructionException):
    pass


class LengthMismatch(ReconstructionException):
    pass


class RankDeficient(ReconstructionException):
    pass


class IncompleteReconstruction(ReconstructionException):
    pass


class WorkflowException(WitnessException):
    """Workflow execution error"""
    pass


# exit code 1; any other WitnessException exits with 2
USER_ERRORS = (ConfigurationException, ValidationException)
