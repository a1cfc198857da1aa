"""Sample the closure of a configuration and report how well it keeps its promises."""

import logging
from typing import NamedTuple, Optional, Tuple
from warnings import warn

from numpy import inf
from numpy.linalg import norm
from numpy.random import Generator, default_rng

from polykin.closure import (GammaBound, RelaxedState, delta_admissible_interval,
                             energy_constraint_residual, exchange_fluxes, gamma_bound,
                             interspecies_state, log_temperature_gap)
from polykin.config import RunConfig, initial_moments
from polykin.dynamics import PreconditionFlags, validate_htheorem_preconditions
from polykin.util.constants import DEFAULT_SAMPLES
from polykin.util.exceptions import PositivityError

logger = logging.getLogger(__name__)

TEMPERATURE_RANGE = (0.2, 5.)
DENSITY_RANGE = (0.1, 10.)


class ClosureReport(NamedTuple):
    delta_interval: Tuple[float, float]
    gamma_bound: GammaBound
    gamma: float
    samples: int
    max_energy_residual: float
    max_flux_sum: float
    min_temperature: float
    min_log_gap: float
    positivity_violations: int
    preconditions: PreconditionFlags
    physical_dimension: bool


def _sample_state(rng: Generator, d: int, dof_internal: int) -> RelaxedState:
    Lambda = rng.uniform(*TEMPERATURE_RANGE)
    return RelaxedState(rng.uniform(*DENSITY_RANGE), rng.normal(size=d), Lambda,
                        rng.uniform(*TEMPERATURE_RANGE) if dof_internal > 0 else Lambda)


def validate_closure_cmd(config: RunConfig,
                         samples: int = DEFAULT_SAMPLES,
                         seed: Optional[int] = None) -> ClosureReport:
    "Check the closure of a configuration on random admissible states."
    species1, species2 = config.species
    coupling = config.coupling
    d = config.grid.dof_translational
    if coupling.alpha == 1:
        warn('alpha = 1: the cross attractors of species 1 carry no exchange of momentum and '
             'energy through the temperature.')
    # Cross frequencies in the ratio epsilon.
    balanced = (species1._replace(nu_cross=coupling.epsilon), species2._replace(nu_cross=1.))
    rng = default_rng(config.seed if seed is None else seed)
    max_residual, max_flux_sum, min_temperature, min_gap = 0., 0., inf, inf
    positivity_violations = 0
    for _ in range(samples):
        state1 = _sample_state(rng, d, species1.dof_internal)
        state2 = _sample_state(rng, d, species2.dof_internal)
        try:
            inter = interspecies_state(state1, state2, coupling, species1, species2)
        except PositivityError as error:
            positivity_violations += 1
            logger.debug('closure sample rejected: %s', error)
            continue
        max_residual = max(max_residual, energy_constraint_residual(
            inter, state1, state2, coupling, species1, species2))
        fluxes = exchange_fluxes(state1, state2, coupling, *balanced)
        energy_scale = max(abs(fluxes.energy_12), abs(fluxes.energy_21))
        momentum_scale = max(norm(fluxes.momentum_12), norm(fluxes.momentum_21))
        if energy_scale > 0:
            max_flux_sum = max(max_flux_sum,
                               abs(fluxes.energy_12 + fluxes.energy_21) / energy_scale)
        if momentum_scale > 0:
            max_flux_sum = max(max_flux_sum, float(
                norm(fluxes.momentum_12 + fluxes.momentum_21) / momentum_scale))
        min_temperature = min(min_temperature, inter.Lambda12, inter.Lambda21, inter.Theta12,
                              inter.Theta21)
        min_gap = min(min_gap, log_temperature_gap(inter, state1, state2, coupling, species1,
                                                   species2))
    moments = tuple(initial_moments(initial, species.dof_internal)
                    for initial, species in zip(config.initial, config.species))
    thetas = (config.initial[0].initial_theta, config.initial[1].initial_theta)
    flags = validate_htheorem_preconditions(moments, config.species, coupling, thetas)
    bound = gamma_bound(species1.mass, species2.mass, coupling.epsilon, coupling.delta, d)
    if d != 3:
        logger.info('gamma bound applied with d = %d', d)
    return ClosureReport(delta_admissible_interval(species1.mass, species2.mass, coupling.epsilon),
                         bound, coupling.gamma, samples, max_residual, max_flux_sum,
                         float(min_temperature), float(min_gap), positivity_violations, flags,
                         d == 3)


def print_closure_report(report: ClosureReport) -> None:
    low, high = report.delta_interval
    print(f'admissible delta interval: ({low:.6g}, {high:.6g})')
    print(f'gamma bound: {report.gamma_bound.value:.6g} (delta admissible: '
          f'{report.gamma_bound.admissible}), gamma = {report.gamma:.6g}')
    print(f'samples: {report.samples}')
    print(f'max energy constraint residual: {report.max_energy_residual:.3e}')
    print(f'max exchange flux sum: {report.max_flux_sum:.3e}')
    print(f'min closure temperature: {report.min_temperature:.6g}')
    print(f'min log temperature gap: {report.min_log_gap:.3e}')
    print(f'samples with a non-positive closure temperature: {report.positivity_violations}')
    for name, value in report.preconditions._asdict().items():
        print(f'{name}: {value}')
    print(f'H-theorem preconditions passed: {report.preconditions.passed}')
    if not report.physical_dimension:
        print('note: gamma bound applied with a velocity dimension other than 3')
