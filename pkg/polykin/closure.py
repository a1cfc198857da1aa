"""
Interspecies closure of the two-species ES-BGK mixture.

The cross attractors M_12 and M_21 carry mixture velocities u_12, u_21 and mixture temperatures
Lambda_12, Theta_12, Lambda_21, Theta_21. Momentum and energy conservation leave three free
parameters (delta, alpha, gamma) plus the collision frequency ratio epsilon = nu_12 / nu_21. The
second species' temperatures use the symmetric split, which satisfies the energy constraint
identically.
"""

from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

from numpy import asarray, atleast_1d, dot, log, ndarray

from polykin.util.exceptions import ArgumentError, DegenerateStateError, PositivityError

Vector = Union[Sequence[float], ndarray]


class SpeciesParams(NamedTuple):
    "Per-species constants."
    mass: float
    dof_internal: int
    dof_translational: int
    nu_self: float
    nu_cross: float
    es_parameter: float
    z_rot: float

    @property
    def z_weight(self) -> float:
        "z_k, defined through 1/z_k = (1/Z_r)(d + l)/d."
        d = self.dof_translational
        return self.z_rot * d / (d + self.dof_internal)

    @property
    def total_dof(self) -> int:
        return self.dof_translational + self.dof_internal


class MixtureCoupling(NamedTuple):
    "Free parameters of the interspecies closure."
    epsilon: float
    delta: float
    alpha: float
    gamma: float


class MacroMoments(NamedTuple):
    "Macroscopic moments of one species."
    n: float
    u: ndarray
    T_tr: float
    T_rot: Optional[float]
    P: ndarray
    eta_mean: ndarray

    @property
    def pressure_per_particle(self) -> ndarray:
        return self.P / self.n


class RelaxedState(NamedTuple):
    "Density, velocity and relaxed temperatures Lambda, Theta of one species."
    n: float
    u: ndarray
    Lambda: float
    Theta: float


class InterspeciesState(NamedTuple):
    "Parameters of the cross attractors M_12 and M_21."
    n12: float
    n21: float
    u12: ndarray
    u21: ndarray
    Lambda12: float
    Lambda21: float
    Theta12: float
    Theta21: float


class GammaBound(NamedTuple):
    "Largest gamma keeping every closure temperature positive."
    value: float
    admissible: bool


class ExchangeFluxes(NamedTuple):
    "Energy and momentum exchanged between the species per unit time."
    energy_12: float
    energy_21: float
    momentum_12: ndarray
    momentum_21: ndarray


def _vector_pair(u1: Vector, u2: Vector) -> Tuple[ndarray, ndarray]:
    u1 = atleast_1d(asarray(u1, dtype=float))
    u2 = atleast_1d(asarray(u2, dtype=float))
    if u1.shape != u2.shape:
        raise ArgumentError(f'velocity dimensions differ: {u1.shape} and {u2.shape}.')
    return u1, u2


def species_violations(species: SpeciesParams, allow_decoupled: bool = True) -> List[str]:
    "Reasons a species parameter set is invalid, empty if none."
    violations: List[str] = []
    d = species.dof_translational
    if species.mass <= 0:
        violations.append(f'mass must be positive, got {species.mass}.')
    if species.dof_internal < 0:
        violations.append(f'dof_internal must be non-negative, got {species.dof_internal}.')
    if d < 1:
        violations.append(f'dof_translational must be positive, got {d}.')
    if species.nu_self <= 0:
        violations.append(f'nu_self must be positive, got {species.nu_self}.')
    if species.nu_cross < 0 or (species.nu_cross == 0 and not allow_decoupled):
        violations.append(f'nu_cross must be positive, got {species.nu_cross}.')
    if species.z_rot <= 0:
        violations.append(f'z_rot must be positive, got {species.z_rot}.')
    if d > 1 and not -1 / (d - 1) <= species.es_parameter <= 1:
        violations.append(f'es_parameter must lie in [{-1 / (d - 1)}, 1] for d = {d}, got '
                          f'{species.es_parameter}.')
    return violations


def coupling_violations(coupling: MixtureCoupling,
                        species1: SpeciesParams,
                        species2: SpeciesParams) -> List[str]:
    "Reasons a closure parameter set is inadmissible, empty if none."
    violations: List[str] = []
    if species1.dof_translational != species2.dof_translational:
        violations.append('both species must share dof_translational.')
    if coupling.epsilon <= 0:
        violations.append(f'epsilon must be positive, got {coupling.epsilon}.')
        return violations
    l1, l2 = species1.dof_internal, species2.dof_internal
    if l1 + l2 > 0 and coupling.epsilon * l1 / (l1 + l2) > 1:
        violations.append('epsilon * l1 / (l1 + l2) must not exceed 1, got '
                          f'{coupling.epsilon * l1 / (l1 + l2)}.')
    if not 0 <= coupling.alpha <= 1:
        violations.append(f'alpha must lie in [0, 1], got {coupling.alpha}.')
    low, high = delta_admissible_interval(species1.mass, species2.mass, coupling.epsilon)
    if not low <= coupling.delta <= high:
        violations.append(f'delta = {coupling.delta} lies outside the admissible delta interval '
                          f'[{low}, {high}] of the gamma positivity condition.')
    bound = gamma_bound(species1.mass, species2.mass, coupling.epsilon, coupling.delta,
                        species1.dof_translational)
    if coupling.gamma < 0:
        violations.append(f'gamma must be non-negative, got {coupling.gamma}.')
    elif coupling.gamma > bound.value * (1 + 1e-14):
        violations.append(f'gamma = {coupling.gamma} exceeds the gamma positivity bound '
                          f'{bound.value}.')
    return violations


def mixture_velocity_12(u1: Vector, u2: Vector, delta: float) -> ndarray:
    "u_12 = delta u_1 + (1 - delta) u_2."
    u1, u2 = _vector_pair(u1, u2)
    return delta * u1 + (1 - delta) * u2


def mixture_velocity_21(u1: Vector,
                        u2: Vector,
                        delta: float,
                        epsilon: float,
                        m1: float,
                        m2: float) -> ndarray:
    "u_21 fixed by conservation of total momentum."
    if m1 <= 0 or m2 <= 0:
        raise ArgumentError(f'masses must be positive, got {m1} and {m2}.')
    u1, u2 = _vector_pair(u1, u2)
    return u2 - (m1 / m2) * epsilon * (1 - delta) * (u2 - u1)


def _lambda_12(Lambda1: float, Lambda2: float, du_sq: float, coupling: MixtureCoupling) -> float:
    return coupling.alpha * Lambda1 + (1 - coupling.alpha) * Lambda2 + coupling.gamma * du_sq


def _lambda_21(Lambda1: float,
               Lambda2: float,
               du_sq: float,
               coupling: MixtureCoupling,
               m1: float,
               m2: float,
               d: int) -> float:
    epsilon, delta = coupling.epsilon, coupling.delta
    weight = epsilon * (1 - coupling.alpha)
    shift = epsilon * m1 * (1 - delta) * ((m1 / m2) * epsilon * (delta - 1) + delta + 1) / d
    return weight * Lambda1 + (1 - weight) * Lambda2 + (shift - epsilon * coupling.gamma) * du_sq


def mixture_temperatures_12(Lambda1: float,
                            Lambda2: float,
                            Theta1: float,
                            Theta2: float,
                            du_sq: float,
                            coupling: MixtureCoupling,
                            l1: int,
                            l2: int) -> Tuple[float, float]:
    "Lambda_12 and Theta_12 of the attractor M_12."
    if l1 + l2 == 0:
        raise DegenerateStateError('Theta_12 is undefined when neither species has internal '
                                   'degrees of freedom.')
    Theta12 = (l1 * Theta1 + l2 * Theta2) / (l1 + l2)
    return _lambda_12(Lambda1, Lambda2, du_sq, coupling), Theta12


def mixture_temperatures_21(Lambda1: float,
                            Lambda2: float,
                            Theta1: float,
                            Theta2: float,
                            du_sq: float,
                            coupling: MixtureCoupling,
                            species1: SpeciesParams,
                            species2: SpeciesParams) -> Tuple[float, float]:
    "Lambda_21 and Theta_21 of the attractor M_21, split symmetrically."
    Lambda21 = _lambda_21(Lambda1, Lambda2, du_sq, coupling, species1.mass, species2.mass,
                          species1.dof_translational)
    if Lambda21 <= 0:
        raise PositivityError(f'Lambda_21 = {Lambda21} is not positive; gamma = {coupling.gamma} '
                              'violates the gamma positivity bound.')
    l1, l2 = species1.dof_internal, species2.dof_internal
    if l1 == 0 and l2 == 0:
        return Lambda21, Lambda21
    if l1 == 0:
        return Lambda21, Theta2
    share = coupling.epsilon * l1 / (l1 + l2)
    return Lambda21, (1 - share) * Theta2 + share * Theta1


def gamma_bound(m1: float, m2: float, epsilon: float, delta: float, d: int) -> GammaBound:
    "Upper bound on gamma for positive Lambda_21, flagged when delta is outside its interval."
    ratio = (m1 / m2) * epsilon
    value = (m1 / d) * (1 - delta) * ((1 + ratio) * delta + 1 - ratio)
    low, high = delta_admissible_interval(m1, m2, epsilon)
    return GammaBound(value, low <= delta <= high)


def delta_admissible_interval(m1: float, m2: float, epsilon: float) -> Tuple[float, float]:
    "Interval of delta on which the gamma bound is non-negative."
    ratio = m1 * epsilon / m2
    return (ratio - 1) / (1 + ratio), 1.


def interspecies_state(state1: RelaxedState,
                       state2: RelaxedState,
                       coupling: MixtureCoupling,
                       species1: SpeciesParams,
                       species2: SpeciesParams) -> InterspeciesState:
    "Evaluate every cross attractor parameter."
    m1, m2 = species1.mass, species2.mass
    l1, l2 = species1.dof_internal, species2.dof_internal
    u12 = mixture_velocity_12(state1.u, state2.u, coupling.delta)
    u21 = mixture_velocity_21(state1.u, state2.u, coupling.delta, coupling.epsilon, m1, m2)
    du = state1.u - state2.u
    du_sq = float(dot(du, du))
    if l1 + l2 == 0:
        Lambda12 = _lambda_12(state1.Lambda, state2.Lambda, du_sq, coupling)
        Theta12 = Lambda12
    else:
        Lambda12, Theta12 = mixture_temperatures_12(state1.Lambda, state2.Lambda, state1.Theta,
                                                    state2.Theta, du_sq, coupling, l1, l2)
    Lambda21, Theta21 = mixture_temperatures_21(state1.Lambda, state2.Lambda, state1.Theta,
                                                state2.Theta, du_sq, coupling, species1, species2)
    if Lambda12 <= 0:
        raise PositivityError(f'Lambda_12 = {Lambda12} is not positive.')
    return InterspeciesState(state1.n, state2.n, u12, u21, Lambda12, Lambda21, Theta12, Theta21)


def energy_constraint_residual(interspecies: InterspeciesState,
                               state1: RelaxedState,
                               state2: RelaxedState,
                               coupling: MixtureCoupling,
                               species1: SpeciesParams,
                               species2: SpeciesParams,
                               relative: bool = True) -> float:
    "Mismatch of Lambda_21 + (l2/d) Theta_21 against what energy conservation demands."
    d = species1.dof_translational
    m1, m2 = species1.mass, species2.mass
    l1, l2 = species1.dof_internal, species2.dof_internal
    epsilon = coupling.epsilon
    lhs_terms = [interspecies.Lambda21, l2 / d * interspecies.Theta21]
    rhs_terms = [state2.Lambda,
                 l2 / d * state2.Theta,
                 -m2 / d * float(dot(interspecies.u21, interspecies.u21)),
                 m2 / d * float(dot(state2.u, state2.u)),
                 -epsilon * m1 / d * float(dot(interspecies.u12, interspecies.u12)),
                 epsilon * m1 / d * float(dot(state1.u, state1.u)),
                 -epsilon * interspecies.Lambda12,
                 epsilon * state1.Lambda,
                 -epsilon * l1 / d * interspecies.Theta12,
                 epsilon * l1 / d * state1.Theta]
    residual = abs(sum(lhs_terms) - sum(rhs_terms))
    if not relative:
        return residual
    scale = max(abs(term) for term in lhs_terms + rhs_terms)
    return residual / scale if scale > 0 else residual


def exchange_fluxes(state1: RelaxedState,
                    state2: RelaxedState,
                    coupling: MixtureCoupling,
                    species1: SpeciesParams,
                    species2: SpeciesParams) -> ExchangeFluxes:
    "Energy and momentum each species receives from the other."
    inter = interspecies_state(state1, state2, coupling, species1, species2)
    d = species1.dof_translational
    m1, m2 = species1.mass, species2.mass
    l1, l2 = species1.dof_internal, species2.dof_internal
    rate12 = species1.nu_cross * state2.n * state1.n
    rate21 = species2.nu_cross * state1.n * state2.n
    energy12 = rate12 * (m1 / 2 * (dot(inter.u12, inter.u12) - dot(state1.u, state1.u))
                         + d / 2 * (inter.Lambda12 - state1.Lambda)
                         + l1 / 2 * (inter.Theta12 - state1.Theta))
    energy21 = rate21 * (m2 / 2 * (dot(inter.u21, inter.u21) - dot(state2.u, state2.u))
                         + d / 2 * (inter.Lambda21 - state2.Lambda)
                         + l2 / 2 * (inter.Theta21 - state2.Theta))
    return ExchangeFluxes(float(energy12),
                          float(energy21),
                          rate12 * m1 * (inter.u12 - state1.u),
                          rate21 * m2 * (inter.u21 - state2.u))


def log_temperature_gap(interspecies: InterspeciesState,
                        state1: RelaxedState,
                        state2: RelaxedState,
                        coupling: MixtureCoupling,
                        species1: SpeciesParams,
                        species2: SpeciesParams) -> float:
    "Left minus right side of the logarithmic temperature inequality behind the H-theorem."
    d = species1.dof_translational
    l1, l2 = species1.dof_internal, species2.dof_internal
    epsilon = coupling.epsilon
    gap = epsilon * d / 2 * (log(interspecies.Lambda12) - log(state1.Lambda)) \
        + d / 2 * (log(interspecies.Lambda21) - log(state2.Lambda))
    if l1 > 0:
        gap += epsilon * l1 / 2 * (log(interspecies.Theta12) - log(state1.Theta))
    if l2 > 0:
        gap += l2 / 2 * (log(interspecies.Theta21) - log(state2.Theta))
    return float(gap)


def relaxed_state(moments: MacroMoments, Lambda: float, Theta: float) -> RelaxedState:
    return RelaxedState(moments.n, moments.u, Lambda, Theta)
