"""
Run configuration: a flat INI file with one section per parameter block.

    [run]          scenario, seed
    [species1]     mass, dof_internal, nu_self, nu_cross, es_parameter, z_rot
    [species2]     same keys as species1
    [coupling]     epsilon (optional, nu_cross1 / nu_cross2 by default), delta, alpha,
                   gamma (a number or max)
    [grid]         dof_translational, velocity_points, internal_points, cells, width, length,
                   boundary
    [time]         t_end, cfl_relax, cfl_advection, output_stride
    [initial1]     density, velocity, translational_temperature, rotational_temperature,
                   theta, anisotropy
    [initial2]     same keys as initial1

Optional [initial1.right] and [initial2.right] sections give the state on the right half of the
domain for transport runs. Vectors are comma separated. The anisotropy lists the upper triangle
of a traceless symmetric matrix, row by row, that is added to T^t I to make P / n.
"""

from configparser import ConfigParser, Error as ParserError
from io import StringIO
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Tuple

from numpy import asarray, eye, ndarray, triu_indices, zeros

from polykin.attractors import spd_check
from polykin.closure import (MacroMoments, MixtureCoupling, SpeciesParams, coupling_violations,
                             gamma_bound, species_violations)
from polykin.phase_grid import MIN_POINTS, lambda_from_theta
from polykin.util.constants import (BOUNDARIES, DEFAULT_GRID_PARAMETERS, DEFAULT_SEED,
                                    DEFAULT_TIME_PARAMETERS, SCENARIOS)
from polykin.util.exceptions import ArgumentError, ConfigError, PositivityError

GAMMA_MAX_TOKEN = 'max'
SPECIES_KEYS = ('mass', 'dof_internal', 'nu_self', 'nu_cross', 'es_parameter', 'z_rot')
INITIAL_KEYS = ('density', 'velocity', 'translational_temperature', 'rotational_temperature',
                'theta', 'anisotropy')
SECTION_KEYS = {
    'run': ('scenario', 'seed'),
    'species1': SPECIES_KEYS,
    'species2': SPECIES_KEYS,
    'coupling': ('epsilon', 'delta', 'alpha', 'gamma'),
    'grid': tuple(DEFAULT_GRID_PARAMETERS),
    'time': tuple(DEFAULT_TIME_PARAMETERS),
    'initial1': INITIAL_KEYS,
    'initial2': INITIAL_KEYS,
    'initial1.right': INITIAL_KEYS,
    'initial2.right': INITIAL_KEYS,
}
REQUIRED_SECTIONS = ('run', 'species1', 'species2', 'coupling', 'initial1', 'initial2')
_REQUIRED = object()


class GridConfig(NamedTuple):
    dof_translational: int
    velocity_points: int
    internal_points: int
    cells: int
    width: float
    length: float
    boundary: str


class TimeConfig(NamedTuple):
    t_end: float
    cfl_relax: float
    cfl_advection: float
    output_stride: int


class InitialCondition(NamedTuple):
    "Gaussian initial state of one species."
    density: float
    velocity: Tuple[float, ...]
    translational_temperature: float
    rotational_temperature: Optional[float]
    theta: Optional[float]
    anisotropy: Tuple[float, ...]

    @property
    def initial_theta(self) -> Optional[float]:
        return self.rotational_temperature if self.theta is None else self.theta

    def pressure_per_particle(self) -> ndarray:
        d = len(self.velocity)
        tensor = self.translational_temperature * eye(d)
        if len(self.anisotropy) > 0:
            perturbation = zeros((d, d))
            perturbation[triu_indices(d)] = self.anisotropy
            tensor += perturbation + perturbation.T - eye(d) * perturbation.diagonal()
        return tensor


class RunConfig(NamedTuple):
    "A fully validated run configuration."
    scenario: str
    seed: int
    species: Tuple[SpeciesParams, SpeciesParams]
    coupling: MixtureCoupling
    gamma_is_max: bool
    grid: GridConfig
    time: TimeConfig
    initial: Tuple[InitialCondition, InitialCondition]
    initial_right: Optional[Tuple[InitialCondition, InitialCondition]]


def initial_moments(initial: InitialCondition, dof_internal: int) -> MacroMoments:
    "Exact moments of a Gaussian initial state."
    P_over_n = initial.pressure_per_particle()
    return MacroMoments(initial.density, asarray(initial.velocity, dtype=float),
                        initial.translational_temperature,
                        initial.rotational_temperature if dof_internal > 0 else None,
                        initial.density * P_over_n, zeros(dof_internal))


def float_vector(token: str) -> Tuple[float, ...]:
    return tuple(float(item) for item in token.split(',') if item.strip() != '')


class _Reader:
    "Typed access to a parsed file that records every problem instead of stopping."

    def __init__(self, parser: ConfigParser, violations: List[str]) -> None:
        self.parser = parser
        self.violations = violations

    def get(self,
            section: str,
            key: str,
            kind: Callable[[str], Any],
            default: Any = _REQUIRED) -> Any:
        if not self.parser.has_option(section, key):
            if default is _REQUIRED:
                self.violations.append(f'[{section}] missing required key {key}.')
            return None if default is _REQUIRED else default
        token = self.parser.get(section, key)
        try:
            return kind(token)
        except ValueError:
            self.violations.append(f'[{section}] {key} = {token!r} is not a valid '
                                   f'{kind.__name__}.')
            return None


def _read_species(reader: _Reader, section: str, d: int) -> Optional[SpeciesParams]:
    values = [reader.get(section, 'mass', float),
              reader.get(section, 'dof_internal', int),
              d,
              reader.get(section, 'nu_self', float),
              reader.get(section, 'nu_cross', float),
              reader.get(section, 'es_parameter', float, 0.),
              reader.get(section, 'z_rot', float, 1.)]
    if any(value is None for value in values):
        return None
    species = SpeciesParams(*values)
    reader.violations.extend(f'[{section}] {violation}'
                             for violation in species_violations(species))
    return species


def _read_initial(reader: _Reader,
                  section: str,
                  d: int,
                  dof_internal: Optional[int]) -> Optional[InitialCondition]:
    internal = dof_internal is not None and dof_internal > 0
    rotational = reader.get(section, 'rotational_temperature', float,
                            _REQUIRED if internal else None)
    initial = InitialCondition(reader.get(section, 'density', float),
                               reader.get(section, 'velocity', float_vector),
                               reader.get(section, 'translational_temperature', float),
                               rotational,
                               reader.get(section, 'theta', float, None),
                               reader.get(section, 'anisotropy', float_vector, ()))
    if any(value is None for value in initial[:3] + (initial.anisotropy,)) \
            or (internal and rotational is None):
        return None
    problems = []
    if initial.density <= 0:
        problems.append(f'density must be positive, got {initial.density}.')
    if len(initial.velocity) != d:
        problems.append(f'velocity needs {d} components, got {len(initial.velocity)}.')
    if initial.translational_temperature <= 0:
        problems.append('translational_temperature must be positive.')
    if dof_internal == 0 and (rotational is not None or initial.theta is not None):
        problems.append('rotational_temperature and theta need internal degrees of freedom.')
    if internal and (rotational <= 0 or (initial.theta is not None and initial.theta <= 0)):
        problems.append('rotational_temperature and theta must be positive.')
    anisotropy = initial.anisotropy
    if len(anisotropy) not in (0, d * (d + 1) // 2):
        problems.append(f'anisotropy needs {d * (d + 1) // 2} entries, got {len(anisotropy)}.')
    elif len(anisotropy) > 0:
        diagonal = [anisotropy[i * d - i * (i - 1) // 2] for i in range(d)]
        if abs(sum(diagonal)) > 1e-12 * initial.translational_temperature:
            problems.append('the diagonal of anisotropy must sum to zero.')
    if len(problems) == 0:
        try:
            if not spd_check(initial.pressure_per_particle()).is_spd:
                problems.append('the pressure tensor is not positive definite.')
            if internal:
                lambda_from_theta(initial.translational_temperature, rotational,
                                  initial.initial_theta, d, dof_internal)
        except (ArgumentError, PositivityError) as error:
            problems.append(str(error))
    reader.violations.extend(f'[{section}] {problem}' for problem in problems)
    return initial


def _check_ranges(grid: GridConfig, time: TimeConfig, violations: List[str]) -> None:
    if grid.dof_translational < 1:
        violations.append('[grid] dof_translational must be positive.')
    if grid.velocity_points < MIN_POINTS:
        violations.append(f'[grid] velocity_points must be at least {MIN_POINTS}.')
    if grid.internal_points < MIN_POINTS or grid.internal_points % 2 != 0:
        violations.append(f'[grid] internal_points must be even and at least {MIN_POINTS}.')
    if grid.cells < 4:
        violations.append('[grid] cells must be at least 4.')
    if grid.width <= 0 or grid.length <= 0:
        violations.append('[grid] width and length must be positive.')
    if grid.boundary not in BOUNDARIES:
        violations.append(f'[grid] boundary must be one of {BOUNDARIES}.')
    if time.t_end <= 0:
        violations.append('[time] t_end must be positive.')
    for key in ('cfl_relax', 'cfl_advection'):
        if not 0 < getattr(time, key) <= 1:
            violations.append(f'[time] {key} must lie in (0, 1].')
    if time.output_stride < 1:
        violations.append('[time] output_stride must be at least 1.')


def parse_config(text: str, check_closure: bool = True) -> RunConfig:
    "Parse and validate a configuration, raising a ConfigError that lists every violation."
    parser = ConfigParser(inline_comment_prefixes=('#',), interpolation=None)
    parser.optionxform = str  # type: ignore
    try:
        parser.read_string(text)
    except ParserError as error:
        raise ConfigError([str(error)]) from error
    violations: List[str] = []
    for section in parser.sections():
        if section not in SECTION_KEYS:
            violations.append(f'unknown section [{section}].')
            continue
        violations.extend(f'[{section}] unknown key {key}.' for key in parser.options(section)
                          if key not in SECTION_KEYS[section])
    for section in REQUIRED_SECTIONS:
        if not parser.has_section(section):
            violations.append(f'missing section [{section}].')
    for section in SECTION_KEYS:
        if not parser.has_section(section):
            parser.add_section(section)
    reader = _Reader(parser, violations)

    scenario = reader.get('run', 'scenario', str)
    if scenario is not None and scenario not in SCENARIOS:
        violations.append(f'[run] scenario must be one of {SCENARIOS}, got {scenario}.')
    seed = reader.get('run', 'seed', int, DEFAULT_SEED)
    grid = GridConfig(*(reader.get('grid', key, type(default), default)
                        for key, default in DEFAULT_GRID_PARAMETERS.items()))
    time = TimeConfig(*(reader.get('time', key, type(default), default)
                        for key, default in DEFAULT_TIME_PARAMETERS.items()))
    if any(value is None for value in grid + time):
        raise ConfigError(violations)
    _check_ranges(grid, time, violations)
    d = grid.dof_translational

    species1 = _read_species(reader, 'species1', d)
    species2 = _read_species(reader, 'species2', d)
    dofs = (None if species1 is None else species1.dof_internal,
            None if species2 is None else species2.dof_internal)
    initial = tuple(_read_initial(reader, f'initial{k}', d, dofs[k - 1]) for k in (1, 2))
    right_sections = [parser.has_option(f'initial{k}.right', 'density') for k in (1, 2)]
    initial_right = None
    if any(right_sections):
        initial_right = tuple(_read_initial(reader, f'initial{k}.right', d, dofs[k - 1])
                              for k in (1, 2))

    delta = reader.get('coupling', 'delta', float)
    alpha = reader.get('coupling', 'alpha', float)
    epsilon = reader.get('coupling', 'epsilon', float, None)
    gamma_token = reader.get('coupling', 'gamma', str)
    coupling, gamma_is_max = None, gamma_token == GAMMA_MAX_TOKEN
    if species1 is not None and species2 is not None:
        ratio = species1.nu_cross / species2.nu_cross if species2.nu_cross > 0 else None
        if epsilon is None:
            if ratio is None:
                violations.append('[coupling] epsilon is required when nu_cross of species2 '
                                  'is zero.')
            epsilon = ratio
        elif ratio is not None and abs(epsilon - ratio) > 1e-12 * epsilon:
            violations.append(f'[coupling] epsilon = {epsilon} must equal nu_cross1 / nu_cross2 '
                              f'= {ratio}.')
    if None not in (species1, species2, delta, alpha, epsilon, gamma_token):
        gamma = None
        if gamma_is_max:
            gamma = gamma_bound(species1.mass, species2.mass, epsilon, delta, d).value
        else:
            try:
                gamma = float(gamma_token)
            except ValueError:
                violations.append(f'[coupling] gamma must be a number or {GAMMA_MAX_TOKEN!r}.')
        if gamma is not None:
            coupling = MixtureCoupling(epsilon, delta, alpha, gamma)
            if check_closure:
                violations.extend(f'[coupling] {violation}' for violation in
                                  coupling_violations(coupling, species1, species2))

    if len(violations) > 0:
        raise ConfigError(violations)
    return RunConfig(scenario, seed, (species1, species2), coupling, gamma_is_max, grid, time,
                     initial, initial_right)


def read_config(path: str, check_closure: bool = True) -> RunConfig:
    with open(path, encoding='utf-8') as config_file:
        return parse_config(config_file.read(), check_closure)


def _initial_section(initial: InitialCondition) -> Dict[str, str]:
    section = {'density': repr(initial.density),
               'velocity': ', '.join(repr(value) for value in initial.velocity),
               'translational_temperature': repr(initial.translational_temperature)}
    if initial.rotational_temperature is not None:
        section['rotational_temperature'] = repr(initial.rotational_temperature)
    if initial.theta is not None:
        section['theta'] = repr(initial.theta)
    if len(initial.anisotropy) > 0:
        section['anisotropy'] = ', '.join(repr(value) for value in initial.anisotropy)
    return section


def print_config(config: RunConfig) -> str:
    "Configuration text that parses back to an equal RunConfig."
    parser = ConfigParser(interpolation=None)
    parser.optionxform = str  # type: ignore
    parser['run'] = {'scenario': config.scenario, 'seed': str(config.seed)}
    for index, species in enumerate(config.species, start=1):
        parser[f'species{index}'] = {key: repr(getattr(species, key)) for key in SPECIES_KEYS}
    coupling = config.coupling
    parser['coupling'] = {
        'epsilon': repr(coupling.epsilon),
        'delta': repr(coupling.delta),
        'alpha': repr(coupling.alpha),
        'gamma': GAMMA_MAX_TOKEN if config.gamma_is_max else repr(coupling.gamma)}
    parser['grid'] = {key: repr(value) if isinstance(value, float) else str(value)
                      for key, value in config.grid._asdict().items()}
    parser['time'] = {key: repr(value) if isinstance(value, float) else str(value)
                      for key, value in config.time._asdict().items()}
    for index, initial in enumerate(config.initial, start=1):
        parser[f'initial{index}'] = _initial_section(initial)
    if config.initial_right is not None:
        for index, initial in enumerate(config.initial_right, start=1):
            parser[f'initial{index}.right'] = _initial_section(initial)
    output = StringIO()
    parser.write(output)
    return output.getvalue()
