from polykin.util.exceptions import (ArgumentError, PositivityError, DegenerateStateError,
                                     CoverageError, FactorizationError, ClosureError,
                                     ConfigError, IntegrationError, CoverageWarning)
from polykin.util.util import step_schedule, save_arrays, load_arrays
