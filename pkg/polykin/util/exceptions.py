"Errors raised by the solver."

from typing import Any, Dict, List, Optional


class ArgumentError(ValueError):
    "Malformed arguments: dimension mismatch, parameter outside its range, asymmetric input."


class PositivityError(ValueError):
    "A temperature or tensor that must stay positive did not."


class DegenerateStateError(ValueError):
    "Zero density, or a quantity that needs internal degrees of freedom where there are none."


class CoverageError(ValueError):
    "The phase grid does not see the Gaussian it is asked to represent."


class FactorizationError(ValueError):
    "A velocity covariance could not be factorized."


class ClosureError(ValueError):
    "A cross attractor parameter broke an identity the closure guarantees."


class ConfigError(ValueError):
    "Every violation found while reading a run configuration."

    def __init__(self, violations: List[str]):
        super().__init__('invalid configuration:\n  ' + '\n  '.join(violations))
        self.violations = violations


class IntegrationError(RuntimeError):
    "The time integrator produced a state it cannot continue from."

    def __init__(self, message: str, dump: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.dump = {} if dump is None else dump


class CoverageWarning(UserWarning):
    "A Gaussian reaches past the edge of the phase grid."
