"""Exception hierarchy.

Validation problems (bad parameters, bad partitions, bad indices) derive from
``ValueError``; the CLI maps them to exit code 2. Everything else is a
computational failure (exit code 1).
"""


class GvbsError(Exception):
    """Base class for all package errors."""


class ValidationError(GvbsError, ValueError):
    """Inputs rejected before any computation."""


class DimensionError(ValidationError):
    pass


class PartitionError(ValidationError):
    pass


class PhysicalityError(ValidationError):
    """Parameters violate the bona fide bounds of the building block."""


class SymmetryError(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class NumericalError(GvbsError):
    pass


class ConversionError(GvbsError):
    pass


class ConditioningError(NumericalError):
    def __init__(self, message: str, condition: float):
        super().__init__(f"{message} (condition estimate {condition:.3e})")
        self.condition = condition


class ConvergenceError(NumericalError):
    pass


class BracketError(GvbsError):
    def __init__(self, message: str, scanned: tuple[float, float]):
        super().__init__(f"{message}; scanned s in [{scanned[0]:.6g}, {scanned[1]:.6g}]")
        self.scanned = scanned


class RootSelectionError(GvbsError):
    pass


class OptimizationError(GvbsError):
    def __init__(self, message: str, best_fidelity: float, best_params):
        super().__init__(f"{message} (best fidelity so far {best_fidelity:.12f})")
        self.best_fidelity = best_fidelity
        self.best_params = best_params
