from .reduce import (ReducedPair, ReducedSpace, ReducedSpec, ReducedAttractors, reduce,
                     reduce_spec, reduced_attractors, reduced_space, to_reduced)
from .transport import (SpatialField1D, advect, advection_dt, field_from_states, field_moments,
                        minmod, step_transport)
from .compare import ComparisonReport, full_vs_reduced_check, to_reduced_state
