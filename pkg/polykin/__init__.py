"Two-species polyatomic ES-BGK mixtures: closure, attractors, relaxation and reduced transport."

from polykin.closure import (SpeciesParams, MixtureCoupling, MacroMoments, InterspeciesState,
                             interspecies_state, gamma_bound, delta_admissible_interval)
from polykin.attractors import GaussianSpec, TensorTemps, AttractorSet, build_attractor_set
from polykin.phase_grid import (VelocityGrid, InternalGrid, KineticSpace, DiscreteDistribution,
                                compute_moments, project_attractor)
from polykin.dynamics import SystemState, StepReport, RelaxationSolver
from polykin.config import RunConfig, parse_config, print_config, read_config
from polykin.run_all import run
