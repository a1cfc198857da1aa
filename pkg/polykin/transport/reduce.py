"""
Chu reduction: contract the internal variable into g = int f deta and h = int |eta|^2 f deta.

A Gaussian in eta with temperature theta integrates to |eta|^2 moment l theta / m, so every
reduced attractor is its velocity Gaussian paired with that Gaussian scaled by l theta / m.
"""

from typing import NamedTuple, Tuple

from numpy import log, ndarray, pi, stack, sum as np_sum, take, where, zeros

from polykin.attractors import AttractorSet, GaussianSpec, eval_gaussian
from polykin.phase_grid import (DiscreteDistribution, KineticSpace, PhaseSpace, VelocityGrid,
                                xlogx_sum)
from polykin.util.constants import ENTROPY_FLOOR
from polykin.util.exceptions import ArgumentError


class ReducedPair(NamedTuple):
    "Reduced distributions of one species on the velocity grid."
    g: ndarray
    h: ndarray
    species: int


class ReducedSpec(NamedTuple):
    "A reduced attractor: h equals h_factor times the velocity Gaussian."
    velocity: GaussianSpec
    h_factor: float


class ReducedAttractors(NamedTuple):
    maxwellian: ReducedSpec
    es_gaussian: ReducedSpec
    cross: ReducedSpec
    extended: ReducedSpec
    equilibrium: ReducedSpec
    total_maxwellian: ReducedSpec


def reduce_spec(spec: GaussianSpec) -> ReducedSpec:
    "Velocity part of an attractor and its factor l theta / m."
    velocity = spec._replace(internal_temp=None, dof_internal=0)
    if spec.dof_internal == 0:
        return ReducedSpec(velocity, 0.)
    return ReducedSpec(velocity, spec.dof_internal * spec.internal_temp / spec.mass)


def reduced_attractors(attractors: AttractorSet) -> Tuple[ReducedAttractors, ReducedAttractors]:
    "Reduced form of every attractor of both species."
    return tuple(ReducedAttractors(*(reduce_spec(spec) for spec in species))
                 for species in attractors.species)


class ReducedSpace(PhaseSpace):
    "Velocity grid carrying the stacked pair (g, h); values have shape (2, *velocity shape)."

    def __init__(self, velocity: VelocityGrid, mass: float, dof_internal: int) -> None:
        super().__init__(velocity, mass, dof_internal)
        self._pair_axis = -(velocity.dims + 1)

    @property
    def value_shape(self) -> Tuple[int, ...]:
        return (2,) + self.velocity.shape

    def marginals(self, values: ndarray) -> Tuple[ndarray, ndarray]:
        return take(values, 0, axis=self._pair_axis), take(values, 1, axis=self._pair_axis)

    def eta_mean(self, values: ndarray, density: float) -> ndarray:
        "The reduced pair only represents distributions even in eta."
        return zeros(self.dof_internal)

    def project(self, spec: GaussianSpec) -> ndarray:
        self.check_coverage(spec)
        reduced = reduce_spec(spec)
        g = eval_gaussian(reduced.velocity, self._velocity_mesh)
        return self._renormalize(stack((g, reduced.h_factor * g)), spec)

    def entropy_integral(self, values: ndarray) -> float:
        "Entropy of the minimum-entropy distribution with the given g and h."
        g, h = self.marginals(values)
        total = xlogx_sum(g)
        l = self.dof_internal
        if l > 0:
            resolved = (g > ENTROPY_FLOOR) & (h > ENTROPY_FLOOR)
            safe_g = where(resolved, g, 1.)
            local_theta = self.mass * where(resolved, h, 1.) / (l * safe_g)
            total -= l / 2 * float(np_sum(where(
                resolved, g * (log(2 * pi * local_theta / self.mass) + 1), 0.)))
        return total * self.velocity.cell_volume


def reduce(f: DiscreteDistribution) -> ReducedPair:
    "Reduced pair of a distribution on the full (v, eta) lattice."
    if not isinstance(f.space, KineticSpace):
        raise ArgumentError('reduction needs a distribution on the full (v, eta) lattice.')
    g, h = f.space.marginals(f.values)
    return ReducedPair(g, h, f.species)


def reduced_space(space: KineticSpace) -> ReducedSpace:
    return ReducedSpace(space.velocity, space.mass, space.dof_internal)


def to_reduced(f: DiscreteDistribution, space: ReducedSpace) -> DiscreteDistribution:
    "The same distribution in the reduced representation."
    pair = reduce(f)
    if space.velocity.shape != f.space.velocity.shape or space.mass != f.space.mass:
        raise ArgumentError('reduced space must share the velocity grid and mass.')
    return DiscreteDistribution(stack((pair.g, pair.h)), space, f.species)
