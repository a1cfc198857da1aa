"Execute a configured scenario and write its artifacts."

import logging
from os import makedirs
from os.path import join
from time import perf_counter
from typing import Any, Dict, List, Tuple

from numpy import arange, dot, inf, isfinite, sqrt
from numpy.linalg import eigvalsh, norm
from tqdm import tqdm

from polykin.closure import (MacroMoments, gamma_bound, mixture_velocity_12,
                             mixture_velocity_21)
from polykin.config import InitialCondition, RunConfig
from polykin.dynamics import (ConservedTotals, RelaxationSolver, SystemState, conserved_totals,
                              equilibrium_residual, initial_distribution,
                              initial_lambda_ten, validate_htheorem_preconditions)
from polykin.output import CsvRow, MomentsWriter, plot_moments, species_row, write_profile, \
    write_summary
from polykin.phase_grid import (KineticSpace, PhaseSpace, compute_moments, internal_bound,
                                internal_grid, velocity_bounds, velocity_grid)
from polykin.transport import (ReducedSpace, SpatialField1D, advection_dt, field_from_states,
                               field_moments, full_vs_reduced_check, step_transport)
from polykin.util.constants import (COMPARE_TOLERANCE, CONSERVATION_TOLERANCE,
                                    ENTROPY_TOLERANCE, MASS_TOLERANCE, MODES, MOMENTS_FILE,
                                    STATE_FILE)
from polykin.util.exceptions import (ArgumentError, ClosureError, CoverageError,
                                     FactorizationError, IntegrationError, PositivityError)
from polykin.util.util import save_arrays, step_schedule

logger = logging.getLogger(__name__)

FAILURES = (IntegrationError, PositivityError, FactorizationError, CoverageError, ClosureError)
STATUS_OK, STATUS_INVARIANT, STATUS_FAILURE = 0, 1, 2


def _initial_sets(config: RunConfig) -> List[Tuple[InitialCondition, InitialCondition]]:
    if config.initial_right is None:
        return [config.initial]
    return [config.initial, config.initial_right]


def max_temperature(config: RunConfig) -> float:
    "Hottest temperature any attractor of the run can reach."
    temperatures, velocity_gap = [], 0.
    for pair in _initial_sets(config):
        for initial in pair:
            temperatures += [initial.translational_temperature,
                             float(eigvalsh(initial.pressure_per_particle()).max())]
            temperatures += [value for value in (initial.rotational_temperature, initial.theta)
                             if value is not None]
    for first in (pair[0] for pair in _initial_sets(config)):
        for second in (pair[1] for pair in _initial_sets(config)):
            velocity_gap = max(velocity_gap, float(norm(
                [a - b for a, b in zip(first.velocity, second.velocity)])))
    coupling, (species1, species2) = config.coupling, config.species
    bound = gamma_bound(species1.mass, species2.mass, coupling.epsilon, coupling.delta,
                        config.grid.dof_translational)
    excess = max(coupling.gamma, coupling.epsilon * max(bound.value - coupling.gamma, 0.))
    return max(temperatures) + excess * velocity_gap ** 2


def candidate_means(config: RunConfig) -> List[Tuple[float, ...]]:
    "Every initial velocity and every cross velocity built from them."
    coupling, (species1, species2) = config.coupling, config.species
    means = [initial.velocity for pair in _initial_sets(config) for initial in pair]
    for first in (pair[0] for pair in _initial_sets(config)):
        for second in (pair[1] for pair in _initial_sets(config)):
            means.append(tuple(mixture_velocity_12(first.velocity, second.velocity,
                                                   coupling.delta)))
            means.append(tuple(mixture_velocity_21(first.velocity, second.velocity,
                                                   coupling.delta, coupling.epsilon,
                                                   species1.mass, species2.mass)))
    return means


def build_spaces(config: RunConfig, reduced: bool = False) -> Tuple[PhaseSpace, PhaseSpace]:
    "Phase spaces of both species sized to cover every attractor of the run."
    grid = config.grid
    hottest = max_temperature(config)
    means = candidate_means(config)
    spaces: List[PhaseSpace] = []
    for species in config.species:
        lower, upper = velocity_bounds(means, hottest, species.mass, grid.width)
        velocity = velocity_grid(lower, upper, (grid.velocity_points,) * grid.dof_translational)
        if reduced:
            spaces.append(ReducedSpace(velocity, species.mass, species.dof_internal))
            continue
        internal = internal_grid(species.dof_internal,
                                 internal_bound(hottest, species.mass, grid.width),
                                 grid.internal_points)
        spaces.append(KineticSpace(velocity, internal, species.mass))
    return spaces[0], spaces[1]


def initial_state(spaces: Tuple[PhaseSpace, PhaseSpace],
                  initial: Tuple[InitialCondition, InitialCondition]) -> SystemState:
    "Gaussian initial distributions and tensors that reproduce the configured Theta."
    distributions, tensors = [], []
    for index, (condition, space) in enumerate(zip(initial, spaces), start=1):
        f = initial_distribution(space, condition.density, condition.velocity,
                                 condition.pressure_per_particle(),
                                 condition.rotational_temperature, index)
        moments = compute_moments(f)
        if space.dof_internal == 0:
            tensors.append(moments.pressure_per_particle)
        else:
            tensors.append(initial_lambda_ten(moments.pressure_per_particle, moments.T_tr,
                                              moments.T_rot, condition.initial_theta,
                                              space.dof_internal))
        distributions.append(f)
    return SystemState(distributions[0], distributions[1], tensors[0], tensors[1], 0.)


class DriftTracker:
    "Conservation drift of the totals against their initial values."

    def __init__(self, initial: ConservedTotals, moments: Tuple[MacroMoments, MacroMoments],
                 masses: Tuple[float, float]) -> None:
        self.initial = initial
        self.momentum_scale = sum(mass * moment.n * (norm(moment.u) + sqrt(moment.T_tr / mass))
                                  for moment, mass in zip(moments, masses))
        self.max_mass = 0.
        self.max_drift = 0.

    def residuals(self, totals: ConservedTotals) -> Tuple[Tuple[float, float], float, float]:
        mass = tuple(abs(new - old) / old for new, old in zip(totals.mass, self.initial.mass))
        momentum = float(norm(totals.momentum - self.initial.momentum) / self.momentum_scale)
        energy = abs(totals.energy - self.initial.energy) / abs(self.initial.energy)
        self.max_mass = max(self.max_mass, *mass)
        self.max_drift = max(self.max_drift, *mass, momentum, energy)
        return (mass[0], mass[1]), momentum, energy


class EntropyTracker:
    "Largest entropy change and the steps that broke monotonicity."

    def __init__(self) -> None:
        self.max_change = -inf
        self.violations = 0

    def record(self, entropy_value: float, change: float) -> bool:
        self.max_change = max(self.max_change, change)
        violated = change > ENTROPY_TOLERANCE * abs(entropy_value)
        if violated:
            self.violations += 1
            logger.warning('entropy increased by %g', change)
        return violated


def _homogeneous_row(solver: RelaxationSolver,
                     state: SystemState,
                     entropy_value: float,
                     change: float,
                     drift: DriftTracker,
                     clipped_mass: float) -> CsvRow:
    snapshot = solver.evaluate(state)
    spaces = (state.f1.space, state.f2.space)
    mass, momentum, energy = drift.residuals(conserved_totals(snapshot.moments, spaces))
    rows = tuple(species_row(moment, temp.Lambda_scalar, temp.Theta)
                 for moment, temp in zip(snapshot.moments, snapshot.temps))
    return CsvRow(state.time, rows, entropy_value, change, mass, momentum, energy, clipped_mass)


def run_relax(config: RunConfig,
              out_directory: str,
              strict_h: bool = False,
              progress: bool = True) -> Dict[str, Any]:
    "Space-homogeneous relaxation."
    spaces = build_spaces(config)
    state = initial_state(spaces, config.initial)
    solver = RelaxationSolver(config.species, config.coupling, config.time.cfl_relax)
    snapshot = solver.evaluate(state)
    moments = snapshot.moments
    flags = validate_htheorem_preconditions(moments, config.species, config.coupling,
                                            (snapshot.temps[0].Theta, snapshot.temps[1].Theta))
    drift = DriftTracker(conserved_totals(moments, spaces), moments,
                         (spaces[0].mass, spaces[1].mass))
    entropies = EntropyTracker()
    writer = MomentsWriter(join(out_directory, MOMENTS_FILE), config.grid.dof_translational)
    current = solver.entropy(state)
    writer.append(_homogeneous_row(solver, state, current, 0., drift, 0.))
    schedule = step_schedule(config.time.t_end, solver.stable_dt(state))
    summary: Dict[str, Any] = {'steps': 0, 'failure': None, 'strict_h_abort': False}
    min_ratio = inf
    for step, dt in enumerate(tqdm(schedule, disable=not progress), start=1):
        is_last = step == len(schedule)
        try:
            state, report = solver.step_rk2(state, dt)
        except FAILURES as error:
            summary['failure'] = f'{type(error).__name__}: {error}'
            if isinstance(error, IntegrationError):
                summary['dump'] = error.dump
            logger.error('integration failed at t = %g: %s', state.time, error)
            break
        summary['steps'] = step
        if report.rotational_ratio is not None:
            min_ratio = min(min_ratio, report.rotational_ratio)
        violated = entropies.record(report.entropy, report.entropy_change)
        if is_last or step % config.time.output_stride == 0 or violated:
            writer.append(_homogeneous_row(solver, state, report.entropy, report.entropy_change,
                                           drift, report.clipped_mass))
        if violated and strict_h:
            summary['strict_h_abort'] = True
            break
    if summary['failure'] is None:
        summary['equilibrium_residual'] = equilibrium_residual(state)
    save_arrays(out_directory, STATE_FILE, {'f1': state.f1.values, 'f2': state.f2.values,
                                            'lambda_ten_1': state.lambda_ten_1,
                                            'lambda_ten_2': state.lambda_ten_2})
    summary['time'] = state.time
    summary.update({'preconditions': flags._asdict(), 'preconditions_passed': flags.passed,
                    'min_rotational_ratio': None if min_ratio == inf else min_ratio})
    return _finish(summary, drift, entropies)


def _field_entropy(field: SpatialField1D, solver: RelaxationSolver) -> float:
    return sum(solver.entropy(field.cell_state(index)) for index in range(field.cells)) * field.dx


def _field_totals(field: SpatialField1D,
                  cells: List[Tuple[MacroMoments, MacroMoments]]) -> ConservedTotals:
    masses = tuple(sum(cell[k].n for cell in cells) * field.dx for k in range(2))
    momentum = sum(space.mass * moment.n * moment.u * field.dx
                   for cell in cells for moment, space in zip(cell, field.spaces))
    energy = sum(moment.n * field.dx * (space.mass / 2 * dot(moment.u, moment.u)
                                        + space.dof_translational / 2 * moment.T_tr
                                        + space.dof_internal / 2 * (moment.T_rot or 0.))
                 for cell in cells for moment, space in zip(cell, field.spaces))
    return ConservedTotals((masses[0], masses[1]), momentum, float(energy))


def _domain_average(field: SpatialField1D,
                    cells: List[Tuple[MacroMoments, MacroMoments]],
                    k: int) -> Tuple[MacroMoments, float, float]:
    "Mass-weighted averages of the moments of species k, with Lambda and Theta."
    space = field.spaces[k]
    column = [cell[k] for cell in cells]
    weights = [moment.n for moment in column]
    n_total = sum(weights)

    def average(values: List[Any]) -> Any:
        return sum(weight * value for weight, value in zip(weights, values)) / n_total

    T_tr = average([moment.T_tr for moment in column])
    Lambda = average([float(tensor.trace()) / space.dof_translational
                      for tensor in field.lambda_ten[k]])
    T_rot, Theta = None, Lambda
    if space.dof_internal > 0:
        T_rot = average([moment.T_rot for moment in column])
        Theta = T_rot + space.dof_translational / space.dof_internal * (T_tr - Lambda)
    moments = MacroMoments(n_total / field.cells, average([moment.u for moment in column]),
                           T_tr, T_rot, sum(moment.P for moment in column) / field.cells,
                           column[0].eta_mean)
    return moments, Lambda, Theta


def _field_row(field: SpatialField1D,
               cells: List[Tuple[MacroMoments, MacroMoments]],
               entropy_value: float,
               change: float,
               drift: DriftTracker,
               clipped_mass: float) -> CsvRow:
    mass, momentum, energy = drift.residuals(_field_totals(field, cells))
    rows = tuple(species_row(*_domain_average(field, cells, k)) for k in range(2))
    return CsvRow(field.time, (rows[0], rows[1]), entropy_value, change, mass, momentum, energy,
                  clipped_mass)


def run_transport(config: RunConfig,
                  out_directory: str,
                  threads: int = 1,
                  second_order: bool = False,
                  strict_h: bool = False,
                  progress: bool = True) -> Dict[str, Any]:
    "Chu-reduced transport in one space dimension with relaxation in every cell."
    grid = config.grid
    spaces = build_spaces(config, reduced=True)
    left = initial_state(spaces, config.initial)
    right = left if config.initial_right is None else initial_state(spaces, config.initial_right)
    dx = grid.length / grid.cells
    centers = (arange(grid.cells) + 0.5) * dx
    field = field_from_states([left if x < grid.length / 2 else right for x in centers], dx,
                              grid.boundary)
    solver = RelaxationSolver(config.species, config.coupling, config.time.cfl_relax)
    snapshot = solver.evaluate(left)
    flags = validate_htheorem_preconditions(snapshot.moments, config.species, config.coupling,
                                            (snapshot.temps[0].Theta, snapshot.temps[1].Theta))
    cells = field_moments(field)
    averages = (_domain_average(field, cells, 0)[0], _domain_average(field, cells, 1)[0])
    drift = DriftTracker(_field_totals(field, cells), averages, (spaces[0].mass, spaces[1].mass))
    entropies = EntropyTracker()
    writer = MomentsWriter(join(out_directory, MOMENTS_FILE), grid.dof_translational)
    current = _field_entropy(field, solver)
    writer.append(_field_row(field, cells, current, 0., drift, 0.))
    dt = advection_dt(field, config.time.cfl_advection)
    schedule = step_schedule(config.time.t_end, dt)
    summary: Dict[str, Any] = {'steps': 0, 'failure': None, 'strict_h_abort': False}
    min_ratio = inf
    for step, dt in enumerate(tqdm(schedule, disable=not progress), start=1):
        is_last = step == len(schedule)
        try:
            field, reports = step_transport(field, dt, solver, config.time.cfl_advection,
                                            second_order, threads)
        except FAILURES as error:
            summary['failure'] = f'{type(error).__name__}: {error}'
            logger.error('transport failed at t = %g: %s', field.time, error)
            break
        summary['steps'] = step
        ratios = [report.rotational_ratio for report in reports
                  if report.rotational_ratio is not None]
        min_ratio = min([min_ratio] + ratios)
        updated = _field_entropy(field, solver)
        change, current = updated - current, updated
        violated = entropies.record(current, change)
        if is_last or step % config.time.output_stride == 0 or violated:
            clipped = sum(report.clipped_mass for report in reports) * dx
            writer.append(_field_row(field, field_moments(field), current, change, drift,
                                     clipped))
        if violated and strict_h:
            summary['strict_h_abort'] = True
            break
    cells = field_moments(field)
    write_profile(out_directory, centers, cells)
    save_arrays(out_directory, STATE_FILE, {'f1': field.values[0], 'f2': field.values[1],
                                            'lambda_ten_1': field.lambda_ten[0],
                                            'lambda_ten_2': field.lambda_ten[1]})
    if summary['failure'] is None:
        summary['equilibrium_residual'] = max(equilibrium_residual(field.cell_state(index))
                                              for index in range(field.cells))
    summary.update({'time': field.time, 'boundary': grid.boundary})
    summary.update({'preconditions': flags._asdict(), 'preconditions_passed': flags.passed,
                    'min_rotational_ratio': None if min_ratio == inf else min_ratio})
    return _finish(summary, drift, entropies)


def _finish(summary: Dict[str, Any], drift: DriftTracker, entropies: EntropyTracker
            ) -> Dict[str, Any]:
    summary.update({'max_dH': None if entropies.max_change == -inf else entropies.max_change,
                    'dH_violations': entropies.violations,
                    'max_conservation_drift': drift.max_drift,
                    'max_mass_drift': drift.max_mass})
    return summary


def run_compare(config: RunConfig, progress: bool = True) -> Dict[str, Any]:
    "Relax the full and the reduced representation side by side."
    spaces = build_spaces(config)
    state = initial_state(spaces, config.initial)
    solver = RelaxationSolver(config.species, config.coupling, config.time.cfl_relax)
    summary: Dict[str, Any] = {'failure': None}
    try:
        report = full_vs_reduced_check(state, solver, config.time.t_end, progress)
    except FAILURES as error:
        summary['failure'] = f'{type(error).__name__}: {error}'
        return summary
    print(f'max moment discrepancy: {report.max_discrepancy:.3e} over {report.steps} steps')
    summary.update({'max_discrepancy': report.max_discrepancy,
                    'final_discrepancy': report.final_discrepancy, 'steps': report.steps})
    return summary


def exit_status(summary: Dict[str, Any], mode: str) -> int:
    "0 when no invariant tripped, 1 for a broken invariant, 2 for a failed integration."
    if summary.get('failure') is not None:
        return STATUS_FAILURE
    if mode == 'chu-compare':
        return STATUS_OK if summary['max_discrepancy'] <= COMPARE_TOLERANCE else STATUS_INVARIANT
    if summary['strict_h_abort'] or not isfinite(summary['equilibrium_residual']):
        return STATUS_INVARIANT
    if summary.get('boundary') == 'outflow':
        # Mass, energy and entropy cross the ends of the domain.
        return STATUS_OK
    # Entropy may rise outside the hypotheses of the H-theorem.
    if summary['preconditions_passed'] and summary['dH_violations'] > 0:
        return STATUS_INVARIANT
    if summary['max_mass_drift'] > MASS_TOLERANCE:
        return STATUS_INVARIANT
    if not summary['max_conservation_drift'] <= CONSERVATION_TOLERANCE * max(summary['time'], 1.):
        return STATUS_INVARIANT
    return STATUS_OK


def run(config: RunConfig,
        mode: str,
        out_directory: str,
        threads: int = 1,
        second_order: bool = False,
        strict_h: bool = False,
        plot: bool = False,
        progress: bool = True) -> int:
    """Execute a scenario, write its artifacts and return the exit status.

    Args:
        config (RunConfig): Validated run configuration.
        mode (str): One of relax, transport1d and chu-compare.
        out_directory (str): Directory that receives moments.csv, summary.json and state.h5.
        threads (int): Worker threads for the per-cell relaxation of transport runs.
        second_order (bool): Minmod-limited second-order advection.
        strict_h (bool): Stop at the first step that increases the entropy.
        plot (bool): Also write moments.png.
        progress (bool): Show a progress bar.

    Returns:
        int: 0 if every invariant held, 1 if one tripped, 2 if the integration failed.
    """
    if mode not in MODES:
        raise ArgumentError(f'mode must be one of {MODES}, got {mode}.')
    if threads < 1:
        raise ArgumentError(f'threads must be positive, got {threads}.')
    makedirs(out_directory, exist_ok=True)
    start = perf_counter()
    if mode == 'relax':
        summary = run_relax(config, out_directory, strict_h, progress)
    elif mode == 'transport1d':
        summary = run_transport(config, out_directory, threads, second_order, strict_h, progress)
    else:
        summary = run_compare(config, progress)
    status = exit_status(summary, mode)
    summary.update({'mode': mode,
                    'scenario': config.scenario,
                    'status': status,
                    'wall_time': perf_counter() - start,
                    'gamma_bound_dimension_flag': config.grid.dof_translational != 3})
    write_summary(out_directory, summary)
    if plot and mode != 'chu-compare':
        plot_moments(join(out_directory, MOMENTS_FILE), out_directory)
    logger.info('%s finished with status %d', mode, status)
    return status
