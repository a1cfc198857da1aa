"""
Space-homogeneous relaxation of the two-species ES-BGK system.

The state carries both distributions and both per-particle tensors Lambda^ten. Theta is never
integrated: it is recovered from conservation of internal energy at every evaluation. Species
without internal degrees of freedom carry no independent tensor; theirs is the pressure tensor
per particle.
"""

import logging
from typing import List, NamedTuple, Optional, Tuple

from numpy import asarray, dot, eye, isfinite, maximum, minimum, ndarray, sqrt, trace, zeros
from numpy.linalg import norm

from polykin.attractors import (AttractorSet, GaussianSpec, TensorTemps, build_attractor_set,
                                gaussian_entropy, isotropic_spec, lambda_es, spd_check, t_tensor)
from polykin.closure import (InterspeciesState, MacroMoments, MixtureCoupling, RelaxedState,
                             SpeciesParams, coupling_violations, interspecies_state,
                             species_violations)
from polykin.phase_grid import (DiscreteDistribution, PhaseSpace, compute_moments,
                                lambda_from_theta, project_attractor, theta_from_lambda)
from polykin.util.constants import CLIP_ABORT_FRACTION, DEFAULT_TIME_PARAMETERS, THETA_TOLERANCE
from polykin.util.exceptions import (ArgumentError, ClosureError, CoverageError,
                                     FactorizationError, IntegrationError, PositivityError)

logger = logging.getLogger(__name__)

STAGE_FAILURES = (PositivityError, FactorizationError, CoverageError, ClosureError)


class SystemState(NamedTuple):
    "Both distributions, both per-particle tensors and the time."
    f1: DiscreteDistribution
    f2: DiscreteDistribution
    lambda_ten_1: ndarray
    lambda_ten_2: ndarray
    time: float

    @property
    def distributions(self) -> Tuple[DiscreteDistribution, DiscreteDistribution]:
        return self.f1, self.f2

    @property
    def tensors(self) -> Tuple[ndarray, ndarray]:
        return self.lambda_ten_1, self.lambda_ten_2


class Derivative(NamedTuple):
    df1: ndarray
    df2: ndarray
    dlambda_ten_1: ndarray
    dlambda_ten_2: ndarray


class Snapshot(NamedTuple):
    "Everything the closure derives from a state."
    moments: Tuple[MacroMoments, MacroMoments]
    temps: Tuple[TensorTemps, TensorTemps]
    interspecies: InterspeciesState
    attractors: AttractorSet


class ConservedTotals(NamedTuple):
    mass: Tuple[float, float]
    momentum: ndarray
    energy: float


class StepReport(NamedTuple):
    "Diagnostics of one integrator step."
    dt: float
    mass_residual: Tuple[float, float]
    momentum_residual: float
    energy_residual: float
    entropy: float
    entropy_change: float
    min_value: float
    clipped_mass: float
    min_temperature: float
    min_eigenvalue: float
    rotational_ratio: Optional[float]


class PreconditionFlags(NamedTuple):
    "Hypotheses under which the entropy must not increase."
    self_dominant_1: bool
    self_dominant_2: bool
    alpha_below_one: bool
    delta_below_one: bool
    positive: bool
    # Theta starts at T^r for every species with internal degrees of freedom.
    theta_consistent: bool

    @property
    def passed(self) -> bool:
        return all(self)


def relaxed_temperatures(moments: MacroMoments,
                         lambda_ten: ndarray,
                         dof_internal: int) -> Tuple[ndarray, float, float]:
    "The tensor Lambda^ten in use, Lambda and Theta."
    d = len(moments.u)
    if dof_internal == 0:
        return moments.pressure_per_particle, moments.T_tr, moments.T_tr
    Lambda = float(trace(lambda_ten) / d)
    if Lambda <= 0:
        raise PositivityError(f'Lambda = {Lambda} is not positive.')
    return lambda_ten, Lambda, theta_from_lambda(moments.T_tr, moments.T_rot, Lambda, d,
                                                 dof_internal)


def tensor_temperatures(moments: MacroMoments,
                        lambda_ten: ndarray,
                        species: SpeciesParams) -> TensorTemps:
    "Tensor temperatures of one species."
    d, l = species.dof_translational, species.dof_internal
    tensor, Lambda, Theta = relaxed_temperatures(moments, lambda_ten, l)
    T_equ = (d * Lambda + l * Theta) / (d + l)
    return TensorTemps(tensor, Lambda, Theta, lambda_es(Lambda, tensor, species.es_parameter),
                       T_equ, t_tensor(T_equ, moments.pressure_per_particle, d, l))


def extended_spec(moments: MacroMoments, lambda_ten: ndarray, space: PhaseSpace) -> GaussianSpec:
    "The Gaussian G^ built from Lambda^ten and the rotational temperature."
    tensor, _, _ = relaxed_temperatures(moments, lambda_ten, space.dof_internal)
    return GaussianSpec(moments.n, moments.u, tensor / space.mass,
                        moments.T_rot if space.dof_internal > 0 else None, space.dof_internal,
                        space.mass)


def initial_lambda_ten(P_over_n: ndarray,
                       T_tr: float,
                       T_rot: Optional[float],
                       Theta: float,
                       dof_internal: int) -> ndarray:
    "Lambda^ten with the pressure tensor's anisotropy and trace d Lambda."
    P_over_n = asarray(P_over_n, dtype=float)
    d = P_over_n.shape[0]
    Lambda = lambda_from_theta(T_tr, T_rot, Theta, d, dof_internal)
    return P_over_n + (Lambda - T_tr) * eye(d)


def initial_distribution(space: PhaseSpace,
                         density: float,
                         velocity: ndarray,
                         P_over_n: ndarray,
                         T_rot: Optional[float],
                         species: int = 1) -> DiscreteDistribution:
    "Gaussian with the given pressure tensor per particle and rotational temperature."
    l = space.dof_internal
    spec = GaussianSpec(density, asarray(velocity, dtype=float),
                        asarray(P_over_n, dtype=float) / space.mass, T_rot if l > 0 else None, l,
                        space.mass)
    return project_attractor(spec, space, species)


def conserved_totals(moments: Tuple[MacroMoments, MacroMoments],
                     spaces: Tuple[PhaseSpace, PhaseSpace]) -> ConservedTotals:
    "Particle numbers, total momentum and total energy."
    momentum = sum(space.mass * moment.n * moment.u for moment, space in zip(moments, spaces))
    energy = 0.
    for moment, space in zip(moments, spaces):
        energy += moment.n * (space.mass / 2 * dot(moment.u, moment.u)
                              + space.dof_translational / 2 * moment.T_tr)
        if space.dof_internal > 0:
            energy += moment.n * space.dof_internal / 2 * moment.T_rot
    return ConservedTotals((moments[0].n, moments[1].n), asarray(momentum), float(energy))


def entropy(state: SystemState, z1: float, z2: float) -> float:
    "H = sum over species of the integral of f ln f plus 3 z times the integral of G^ ln G^."
    total = 0.
    for f, lambda_ten, z in zip(state.distributions, state.tensors, (z1, z2)):
        moments = compute_moments(f)
        total += f.space.entropy_integral(f.values) \
            + 3 * z * gaussian_entropy(extended_spec(moments, lambda_ten, f.space))
    return total


def equilibrium_residual(state: SystemState) -> float:
    "Scale-free distance from the global Maxwellian with common velocity and temperature."
    spaces = [f.space for f in state.distributions]
    moments = [compute_moments(f) for f in state.distributions]
    relaxed = [relaxed_temperatures(moment, lambda_ten, space.dof_internal)
               for moment, lambda_ten, space in zip(moments, state.tensors, spaces)]
    mass_density = sum(space.mass * moment.n for moment, space in zip(moments, spaces))
    u_common = sum(space.mass * moment.n * moment.u
                   for moment, space in zip(moments, spaces)) / mass_density
    internal_energy, dof_count = 0., 0.
    temperatures: List[float] = []
    for moment, space, (_, Lambda, Theta) in zip(moments, spaces, relaxed):
        d, l = space.dof_translational, space.dof_internal
        offset = moment.u - u_common
        internal_energy += moment.n * d * moment.T_tr + space.mass * moment.n * dot(offset, offset)
        temperatures += [moment.T_tr, Lambda, Theta]
        if l > 0:
            internal_energy += moment.n * l * moment.T_rot
            temperatures.append(moment.T_rot)
        dof_count += moment.n * (d + l)
    T_common = internal_energy / dof_count
    velocity_scale = sqrt(T_common / min(space.mass for space in spaces))
    parts = [norm(moments[0].u - moments[1].u) / velocity_scale,
             (max(temperatures) - min(temperatures)) / T_common]
    for f, moment, (tensor, _, _) in zip(state.distributions, moments, relaxed):
        d = f.space.dof_translational
        parts.append(norm(moment.pressure_per_particle - T_common * eye(d), 2) / T_common)
        parts.append(norm(tensor - T_common * eye(d), 2) / T_common)
        reference = f.space.project(isotropic_spec(moment.n, u_common, T_common,
                                                   f.space.dof_internal, f.space.mass))
        parts.append(f.space.density(abs(f.values - reference)) / moment.n)
    return float(max(parts))


def _finite(state: SystemState) -> bool:
    return all(isfinite(array).all() for array in
               (state.f1.values, state.f2.values) + state.tensors)


def validate_htheorem_preconditions(moments: Tuple[MacroMoments, MacroMoments],
                                    species: Tuple[SpeciesParams, SpeciesParams],
                                    coupling: MixtureCoupling,
                                    thetas: Tuple[Optional[float], Optional[float]] = (None, None)
                                    ) -> PreconditionFlags:
    """Check the hypotheses of the H-theorem for the given moments.

    thetas are the relaxed temperatures Theta of both species; None stands for Theta = T^r.
    Polyatomic species are only covered when T^r stays above a fixed multiple of Theta, which
    is checked at the start where Theta must coincide with T^r.
    """
    (moments1, moments2), (species1, species2) = moments, species
    positive = all(moment.n > 0 and moment.T_tr > 0
                   and (params.dof_internal == 0 or (moment.T_rot or 0) > 0)
                   for moment, params in zip(moments, species))
    theta_consistent = all(
        params.dof_internal == 0 or theta is None
        or abs(theta - (moment.T_rot or 0.)) <= THETA_TOLERANCE * abs(moment.T_rot or 0.)
        for moment, params, theta in zip(moments, species, thetas))
    return PreconditionFlags(
        species1.nu_self * moments1.n >= species1.nu_cross * moments2.n,
        species2.nu_self * moments2.n >= species2.nu_cross * moments1.n,
        coupling.alpha != 1,
        coupling.delta != 1,
        positive,
        theta_consistent)


class RelaxationSolver:
    "Explicit Heun integrator for the coupled relaxation system."

    def __init__(self,
                 species: Tuple[SpeciesParams, SpeciesParams],
                 coupling: MixtureCoupling,
                 cfl: float = DEFAULT_TIME_PARAMETERS['cfl_relax'],
                 clip_abort_fraction: float = CLIP_ABORT_FRACTION) -> None:
        violations = species_violations(species[0]) + species_violations(species[1]) \
            + coupling_violations(coupling, species[0], species[1])
        if len(violations) > 0:
            raise ArgumentError(' '.join(violations))
        if not 0 < cfl <= 1:
            raise ArgumentError(f'cfl must lie in (0, 1], got {cfl}.')
        self.species = species
        self.coupling = coupling
        self.cfl = cfl
        self.clip_abort_fraction = clip_abort_fraction

    def evaluate(self, state: SystemState) -> Snapshot:
        "Moments, temperatures, closure and attractors of a state."
        moments = (compute_moments(state.f1), compute_moments(state.f2))
        temps = (tensor_temperatures(moments[0], state.lambda_ten_1, self.species[0]),
                 tensor_temperatures(moments[1], state.lambda_ten_2, self.species[1]))
        relaxed = [RelaxedState(moment.n, moment.u, temp.Lambda_scalar, temp.Theta)
                   for moment, temp in zip(moments, temps)]
        inter = interspecies_state(relaxed[0], relaxed[1], self.coupling, *self.species)
        if self.species[0].dof_internal == 0 < self.species[1].dof_internal:
            if inter.Theta21 != temps[1].Theta:
                raise ClosureError(f'Theta_21 = {inter.Theta21} differs from Theta_2 = '
                                   f'{temps[1].Theta} although species 1 is monatomic.')
        return Snapshot(moments, temps, inter,
                        build_attractor_set(moments, temps, inter, self.species))

    def rates(self, densities: Tuple[float, float]) -> Tuple[Tuple[float, float], ...]:
        "(nu_kk n_k, nu_kj n_j) for both species."
        return ((self.species[0].nu_self * densities[0], self.species[0].nu_cross * densities[1]),
                (self.species[1].nu_self * densities[1], self.species[1].nu_cross * densities[0]))

    def _rhs(self, state: SystemState) -> Tuple[Derivative, Snapshot]:
        snapshot = self.evaluate(state)
        rates = self.rates((snapshot.moments[0].n, snapshot.moments[1].n))
        Theta_cross = (snapshot.interspecies.Theta12, snapshot.interspecies.Theta21)
        distribution_terms, tensor_terms = [], []
        for k in range(2):
            f, params = state.distributions[k], self.species[k]
            attractors = snapshot.attractors.species[k]
            moment, temp = snapshot.moments[k], snapshot.temps[k]
            self_rate, cross_rate = rates[k]
            G = f.space.project(attractors.es_gaussian)
            M = f.space.project(attractors.cross)
            distribution_terms.append(self_rate * (G - f.values) + cross_rate * (M - f.values))
            d, l = params.dof_translational, params.dof_internal
            if l == 0:
                tensor_terms.append(zeros((d, d)))
                continue
            tensor_terms.append(
                self_rate / params.z_rot * (d + l) / d * (temp.T_ten - temp.Lambda_ten)
                + self_rate * (temp.Lambda_ES - moment.pressure_per_particle)
                + cross_rate * (Theta_cross[k] - moment.T_rot) * eye(d))
        return Derivative(distribution_terms[0], distribution_terms[1],
                          tensor_terms[0], tensor_terms[1]), snapshot

    def rhs(self, state: SystemState) -> Derivative:
        "Time derivative of the distributions and of the tensors."
        return self._rhs(state)[0]

    def stable_dt(self, state: SystemState) -> float:
        "CFL times the fastest relaxation time."
        densities = (state.f1.space.density(state.f1.values),
                     state.f2.space.density(state.f2.values))
        fastest = 0.
        for (self_rate, cross_rate), params in zip(self.rates(densities), self.species):
            d, l = params.dof_translational, params.dof_internal
            fastest = max(fastest, self_rate + cross_rate, self_rate / params.z_rot * (d + l) / d)
        return self.cfl / fastest

    def entropy(self, state: SystemState) -> float:
        return entropy(state, self.species[0].z_weight, self.species[1].z_weight)

    def _advance(self,
                 state: SystemState,
                 derivative: Derivative,
                 dt: float) -> SystemState:
        return SystemState(state.f1._replace(values=state.f1.values + dt * derivative.df1),
                           state.f2._replace(values=state.f2.values + dt * derivative.df2),
                           state.lambda_ten_1 + dt * derivative.dlambda_ten_1,
                           state.lambda_ten_2 + dt * derivative.dlambda_ten_2,
                           state.time + dt)

    def _slaved(self, state: SystemState) -> SystemState:
        "Refresh the tensors of monatomic species from their pressure tensors."
        tensors = list(state.tensors)
        for k, (f, params) in enumerate(zip(state.distributions, self.species)):
            if params.dof_internal == 0:
                tensors[k] = compute_moments(f).pressure_per_particle
        return state._replace(lambda_ten_1=tensors[0], lambda_ten_2=tensors[1])

    def _dump(self, state: SystemState, dt: float) -> dict:
        return {'time': state.time,
                'dt': dt,
                'min_values': [float(f.values.min()) for f in state.distributions],
                'lambda_ten': [tensor.tolist() for tensor in state.tensors]}

    def step_rk2(self,
                 state: SystemState,
                 dt: Optional[float] = None) -> Tuple[SystemState, StepReport]:
        "One Heun step, clipping negative values afterwards."
        if not _finite(state):
            raise IntegrationError(f'non-finite state at t = {state.time}.', self._dump(state, 0.))
        if dt is None:
            dt = self.stable_dt(state)
        try:
            k1, snapshot = self._rhs(state)
        except STAGE_FAILURES as error:
            raise IntegrationError(f'first stage failed at t = {state.time}: {error}',
                                   self._dump(state, dt)) from error
        predictor = self._advance(state, k1, dt)
        try:
            k2, _ = self._rhs(predictor)
        except STAGE_FAILURES as error:
            raise IntegrationError(f'predictor stage failed: {error}',
                                   self._dump(predictor, dt)) from error
        averaged = Derivative(*((first + second) / 2 for first, second in zip(k1, k2)))
        advanced = self._advance(state, averaged, dt)
        if not _finite(advanced):
            raise IntegrationError(f'non-finite state at t = {advanced.time}.',
                                   self._dump(advanced, dt))

        clipped_mass, clipped = 0., []
        for f in advanced.distributions:
            negative = minimum(f.values, 0.)
            lost = -f.space.density(negative)
            if lost > 0:
                clipped_mass += lost
                f = f._replace(values=maximum(f.values, 0.))
            clipped.append(f)
        total_mass = sum(moment.n for moment in snapshot.moments)
        if clipped_mass > self.clip_abort_fraction * total_mass:
            raise IntegrationError(f'clipped mass {clipped_mass} exceeds '
                                   f'{self.clip_abort_fraction} of the total mass.',
                                   self._dump(advanced, dt))
        if clipped_mass > 0:
            logger.info('clipped mass %g at t = %g', clipped_mass, advanced.time)
        advanced = self._slaved(advanced._replace(f1=clipped[0], f2=clipped[1]))

        try:
            new_snapshot = self.evaluate(advanced)
        except STAGE_FAILURES as error:
            raise IntegrationError(f'state left the model validity at t = {advanced.time}: '
                                   f'{error}', self._dump(advanced, dt)) from error
        return advanced, self._report(state, advanced, snapshot, new_snapshot, dt, clipped_mass)

    def _report(self,
                before: SystemState,
                after: SystemState,
                snapshot: Snapshot,
                new_snapshot: Snapshot,
                dt: float,
                clipped_mass: float) -> StepReport:
        spaces = (before.f1.space, before.f2.space)
        old = conserved_totals(snapshot.moments, spaces)
        new = conserved_totals(new_snapshot.moments, spaces)
        momentum_scale = sum(space.mass * moment.n * (norm(moment.u)
                                                      + sqrt(moment.T_tr / space.mass))
                             for moment, space in zip(snapshot.moments, spaces))
        entropy_before, entropy_after = self.entropy(before), self.entropy(after)
        temperatures, eigenvalues, ratios = [], [], []
        for moment, temp, params in zip(new_snapshot.moments, new_snapshot.temps, self.species):
            temperatures += [moment.T_tr, temp.Lambda_scalar, temp.Theta, temp.T_equ]
            eigenvalues += [spd_check(temp.Lambda_ES).min_eigenvalue,
                            spd_check(temp.T_ten).min_eigenvalue]
            if params.dof_internal > 0:
                temperatures.append(moment.T_rot)
                ratios.append(moment.T_rot / temp.Theta)
        return StepReport(
            dt=dt,
            mass_residual=(abs(new.mass[0] - old.mass[0]) / old.mass[0],
                           abs(new.mass[1] - old.mass[1]) / old.mass[1]),
            momentum_residual=float(norm(new.momentum - old.momentum) / momentum_scale),
            energy_residual=abs(new.energy - old.energy) / abs(old.energy),
            entropy=entropy_after,
            entropy_change=entropy_after - entropy_before,
            min_value=float(min(f.values.min() for f in after.distributions)),
            clipped_mass=clipped_mass,
            min_temperature=float(min(temperatures)),
            min_eigenvalue=float(min(eigenvalues)),
            rotational_ratio=float(min(ratios)) if len(ratios) > 0 else None)


def rhs(state: SystemState,
        species: Tuple[SpeciesParams, SpeciesParams],
        coupling: MixtureCoupling) -> Derivative:
    "Time derivative of a state under the given species and closure."
    return RelaxationSolver(species, coupling).rhs(state)
