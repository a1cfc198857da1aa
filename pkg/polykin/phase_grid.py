"""
Discrete phase space of one species.

Velocities live on a tensor-product midpoint lattice. The internal variable eta lives on a lattice
mirrored about zero, so sums of eta against eta-even functions cancel exactly in pairs.
"""

from abc import ABC, abstractmethod
from typing import NamedTuple, Optional, Sequence, Tuple
from warnings import warn

from numpy import (arange, concatenate, flip, isfinite, meshgrid, ndarray, prod,
                   sqrt, stack, sum as np_sum, take, trace, where, zeros)
from scipy.special import xlogy

from polykin.attractors import GaussianSpec, eval_gaussian
from polykin.closure import MacroMoments
from polykin.util.constants import COVERAGE_SIGMAS, ENTROPY_FLOOR
from polykin.util.exceptions import (ArgumentError, CoverageError, CoverageWarning,
                                     DegenerateStateError, PositivityError)

MIN_POINTS = 8


class VelocityGrid(NamedTuple):
    "Midpoint lattice over a box in R^d."
    axes: Tuple[ndarray, ...]
    spacing: Tuple[float, ...]

    @property
    def dims(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(len(axis) for axis in self.axes)

    @property
    def cell_volume(self) -> float:
        return float(prod(self.spacing))

    @property
    def bounds(self) -> Tuple[Tuple[float, float], ...]:
        return tuple((float(axis[0] - h / 2), float(axis[-1] + h / 2))
                     for axis, h in zip(self.axes, self.spacing))

    def mesh(self) -> ndarray:
        "Node coordinates, shape (*shape, d)."
        return stack(meshgrid(*self.axes, indexing='ij'), axis=-1)


class InternalGrid(NamedTuple):
    "Midpoint lattice over [-bound, bound]^l, mirrored about zero."
    dims: int
    positive_nodes: ndarray
    spacing: float

    @property
    def nodes(self) -> ndarray:
        return concatenate((-self.positive_nodes[::-1], self.positive_nodes))

    @property
    def shape(self) -> Tuple[int, ...]:
        return (2 * len(self.positive_nodes),) * self.dims

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.dims

    @property
    def bound(self) -> float:
        return float(self.positive_nodes[-1] + self.spacing / 2) if self.dims > 0 else 0.

    def mesh(self) -> ndarray:
        "Node coordinates, shape (*shape, l)."
        if self.dims == 0:
            return zeros((0,))
        return stack(meshgrid(*((self.nodes,) * self.dims), indexing='ij'), axis=-1)


def velocity_grid(lower: Sequence[float],
                  upper: Sequence[float],
                  points: Sequence[int]) -> VelocityGrid:
    "Midpoint lattice with the given per-axis bounds and point counts."
    if not len(lower) == len(upper) == len(points):
        raise ArgumentError('bounds and point counts must have one entry per axis.')
    axes, spacing = [], []
    for low, high, count in zip(lower, upper, points):
        if count < MIN_POINTS:
            raise ArgumentError(f'need at least {MIN_POINTS} points per axis, got {count}.')
        if not (isfinite(low) and isfinite(high) and low < high):
            raise ArgumentError(f'invalid velocity bounds [{low}, {high}].')
        h = (high - low) / count
        axes.append(low + (arange(count) + 0.5) * h)
        spacing.append(h)
    return VelocityGrid(tuple(axes), tuple(spacing))


def internal_grid(dims: int, bound: float, points: int) -> InternalGrid:
    "Mirrored midpoint lattice; an empty lattice when dims is 0."
    if dims == 0:
        return InternalGrid(0, zeros(0), 1.)
    if points < MIN_POINTS or points % 2 != 0:
        raise ArgumentError(f'internal point count must be even and at least {MIN_POINTS}, '
                            f'got {points}.')
    if not (isfinite(bound) and bound > 0):
        raise ArgumentError(f'invalid internal bound {bound}.')
    h = 2 * bound / points
    return InternalGrid(dims, (arange(points // 2) + 0.5) * h, h)


def velocity_bounds(means: Sequence[Sequence[float]],
                    max_temperature: float,
                    mass: float,
                    width: float) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
    "Box covering every mean by width thermal speeds of the hottest state."
    spread = width * sqrt(max_temperature / mass)
    columns = list(zip(*means))
    return (tuple(float(min(column) - spread) for column in columns),
            tuple(float(max(column) + spread) for column in columns))


def internal_bound(max_temperature: float, mass: float, width: float) -> float:
    return float(width * sqrt(max_temperature / mass))


def lambda_from_theta(T_tr: float, T_rot: Optional[float], Theta: float, d: int, l: int) -> float:
    "Lambda from conservation of internal energy, d Lambda + l Theta = d T^t + l T^r."
    if l == 0:
        return T_tr
    Lambda = T_tr + l / d * (T_rot - Theta)
    if Lambda <= 0:
        raise PositivityError(f'Lambda = {Lambda} is not positive.')
    return Lambda


def theta_from_lambda(T_tr: float, T_rot: Optional[float], Lambda: float, d: int, l: int) -> float:
    "Theta from conservation of internal energy; equal to Lambda without internal freedom."
    if l == 0:
        return Lambda
    Theta = T_rot + d / l * (T_tr - Lambda)
    if Theta <= 0:
        raise PositivityError(f'Theta = {Theta} is not positive.')
    return Theta


def xlogx_sum(values: ndarray) -> float:
    "Sum of x ln x with every x at or below the floor contributing nothing."
    return float(np_sum(xlogy(values, where(values > ENTROPY_FLOOR, values, 1.))))


class PhaseSpace(ABC):
    "Discrete phase space of one species: quadrature, moments and attractor projection."

    def __init__(self, velocity: VelocityGrid, mass: float, dof_internal: int) -> None:
        if mass <= 0:
            raise ArgumentError(f'mass must be positive, got {mass}.')
        self.velocity = velocity
        self.mass = mass
        self.dof_internal = dof_internal
        self._velocity_mesh = velocity.mesh()

    @property
    def dof_translational(self) -> int:
        return self.velocity.dims

    @property
    @abstractmethod
    def value_shape(self) -> Tuple[int, ...]:
        "Shape of the value array of a distribution."

    @abstractmethod
    def marginals(self, values: ndarray) -> Tuple[ndarray, ndarray]:
        "g = integral of f over eta and h = integral of |eta|^2 f over eta, on the velocity grid."

    @abstractmethod
    def eta_mean(self, values: ndarray, density: float) -> ndarray:
        "Mean of eta."

    @abstractmethod
    def project(self, spec: GaussianSpec) -> ndarray:
        "Values of the Gaussian on the grid, rescaled to its exact density."

    @abstractmethod
    def entropy_integral(self, values: ndarray) -> float:
        "Integral of f ln f."

    @property
    def streaming_velocity(self) -> ndarray:
        "First velocity component, broadcastable against value arrays."
        return self._velocity_mesh[..., 0]

    def densities(self, values: ndarray) -> ndarray:
        "Densities of value arrays stacked along leading axes."
        g, _ = self.marginals(values)
        return np_sum(g, axis=tuple(range(-self.dof_translational, 0))) \
            * self.velocity.cell_volume

    def density(self, values: ndarray) -> float:
        return float(self.densities(values))

    def moments(self, values: ndarray) -> MacroMoments:
        "Macroscopic moments by midpoint quadrature."
        g, h = self.marginals(values)
        weight = self.velocity.cell_volume
        n = float(np_sum(g) * weight)
        if not n > 0:
            raise DegenerateStateError(f'discrete density {n} is not positive.')
        d = self.dof_translational
        points = self._velocity_mesh.reshape(-1, d)
        column = g.reshape(-1)
        u = points.T @ column * weight / n
        offset = points - u
        P = self.mass * offset.T @ (offset * column[:, None]) * weight
        P = (P + P.T) / 2
        T_tr = float(trace(P) / (d * n))
        T_rot = None
        if self.dof_internal > 0:
            T_rot = float(self.mass * np_sum(h) * weight / (self.dof_internal * n))
        return MacroMoments(n, u, T_tr, T_rot, P, self.eta_mean(values, n))

    def check_coverage(self, spec: GaussianSpec, internal_reach: float = 0.) -> None:
        "Warn when the grid ends closer than six standard deviations to the Gaussian's mean."
        for axis, ((low, high), mean, variance) in enumerate(
                zip(self.velocity.bounds, spec.mean, spec.velocity_cov.diagonal())):
            reach = COVERAGE_SIGMAS * sqrt(variance)
            if mean - reach < low or mean + reach > high:
                warn(f'velocity grid axis {axis} covers less than {COVERAGE_SIGMAS:g} standard '
                     'deviations of an attractor.', CoverageWarning)
        if spec.dof_internal > 0 and internal_reach > 0:
            if COVERAGE_SIGMAS * sqrt(spec.internal_temp / spec.mass) > internal_reach:
                warn(f'internal grid covers less than {COVERAGE_SIGMAS:g} standard deviations of '
                     'an attractor.', CoverageWarning)

    def _renormalize(self, values: ndarray, spec: GaussianSpec) -> ndarray:
        if spec.density == 0:
            return values
        discrete = self.density(values)
        if not (isfinite(discrete) and discrete > 0):
            raise CoverageError('the phase grid misses the attractor: its discrete density is '
                                f'{discrete}.')
        return values * (spec.density / discrete)


class KineticSpace(PhaseSpace):
    "Full (v, eta) product lattice."

    def __init__(self, velocity: VelocityGrid, internal: InternalGrid, mass: float) -> None:
        super().__init__(velocity, mass, internal.dims)
        self.internal = internal
        d, l = velocity.dims, internal.dims
        self._internal_axes = tuple(range(-l, 0))
        self._points = self._velocity_mesh.reshape(velocity.shape + (1,) * l + (d,))
        if l > 0:
            eta = internal.mesh()
            self._eta = eta.reshape((1,) * d + internal.shape + (l,))
            self._eta_sq = np_sum(eta ** 2, axis=-1)
        else:
            self._eta = None
            self._eta_sq = None

    @property
    def value_shape(self) -> Tuple[int, ...]:
        return self.velocity.shape + self.internal.shape

    @property
    def streaming_velocity(self) -> ndarray:
        return super().streaming_velocity.reshape(self.velocity.shape + (1,) * self.dof_internal)

    def marginals(self, values: ndarray) -> Tuple[ndarray, ndarray]:
        if self.dof_internal == 0:
            return values, zeros(values.shape)
        weight = self.internal.cell_volume
        g = np_sum(values, axis=self._internal_axes) * weight
        h = np_sum(values * self._eta_sq, axis=self._internal_axes) * weight
        return g, h

    def eta_mean(self, values: ndarray, density: float) -> ndarray:
        "Paired sums over mirrored nodes, exactly zero for eta-even values."
        l = self.dof_internal
        mean = zeros(l)
        if l == 0:
            return mean
        half = len(self.internal.positive_nodes)
        positive = arange(half, 2 * half)
        node_shape = [1] * values.ndim
        for axis_index, axis in enumerate(self._internal_axes):
            difference = take(values - flip(values, axis=axis), positive, axis=axis)
            node_shape[axis] = half
            nodes = self.internal.positive_nodes.reshape(node_shape)
            node_shape[axis] = 1
            mean[axis_index] = np_sum(nodes * difference) * self.velocity.cell_volume \
                * self.internal.cell_volume / density
        return mean

    def project(self, spec: GaussianSpec) -> ndarray:
        self.check_coverage(spec, self.internal.bound)
        return self._renormalize(eval_gaussian(spec, self._points, self._eta), spec)

    def entropy_integral(self, values: ndarray) -> float:
        return xlogx_sum(values) * self.velocity.cell_volume * self.internal.cell_volume


class DiscreteDistribution(NamedTuple):
    "Non-negative grid function of one species."
    values: ndarray
    space: PhaseSpace
    species: int


def compute_moments(f: DiscreteDistribution) -> MacroMoments:
    "Moments of a discrete distribution, using the mass of its phase space."
    return f.space.moments(f.values)


def project_attractor(spec: GaussianSpec,
                      space: PhaseSpace,
                      species: int = 1) -> DiscreteDistribution:
    "Discrete realization of an attractor with exact particle number."
    return DiscreteDistribution(space.project(spec), space, species)
