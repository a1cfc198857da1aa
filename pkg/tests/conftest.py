"Shared species, couplings and small phase spaces."

from typing import Callable, Optional, Sequence

import pytest
from numpy import asarray, eye

from polykin.attractors import GaussianSpec
from polykin.closure import MixtureCoupling, SpeciesParams
from polykin.dynamics import SystemState, initial_distribution, initial_lambda_ten
from polykin.phase_grid import (KineticSpace, PhaseSpace, compute_moments, internal_grid,
                                velocity_grid)


@pytest.fixture
def make_species() -> Callable[..., SpeciesParams]:
    def make(mass: float = 1.,
             dof_internal: int = 0,
             d: int = 1,
             nu_self: float = 1.,
             nu_cross: float = 1.,
             es_parameter: float = 0.,
             z_rot: float = 1.) -> SpeciesParams:
        return SpeciesParams(mass, dof_internal, d, nu_self, nu_cross, es_parameter, z_rot)
    return make


@pytest.fixture
def coupling() -> MixtureCoupling:
    return MixtureCoupling(epsilon=1., delta=.5, alpha=.5, gamma=.1)


@pytest.fixture
def make_space() -> Callable[..., KineticSpace]:
    "Phase space centered at zero, covering width thermal speeds at the given temperature."
    def make(d: int = 1,
             dof_internal: int = 0,
             mass: float = 1.,
             points: int = 32,
             internal_points: int = 32,
             temperature: float = 1.,
             width: float = 8.) -> KineticSpace:
        spread = width * (temperature / mass) ** .5
        velocity = velocity_grid((-spread,) * d, (spread,) * d, (points,) * d)
        return KineticSpace(velocity, internal_grid(dof_internal, spread, internal_points), mass)
    return make


@pytest.fixture
def make_state() -> Callable[..., SystemState]:
    "Gaussian state of two species with Theta equal to the rotational temperature."
    def make(spaces: Sequence[PhaseSpace],
             densities: Sequence[float] = (1., 1.),
             velocities: Optional[Sequence[Sequence[float]]] = None,
             temperatures: Sequence[float] = (1., 1.),
             rotational: Sequence[float] = (1., 1.),
             pressures: Optional[Sequence[Sequence[Sequence[float]]]] = None) -> SystemState:
        distributions, tensors = [], []
        for k, space in enumerate(spaces):
            d = space.dof_translational
            u = velocities[k] if velocities is not None else (0.,) * d
            P_over_n = asarray(pressures[k]) if pressures is not None \
                else temperatures[k] * eye(d)
            f = initial_distribution(space, densities[k], asarray(u, dtype=float), P_over_n,
                                     rotational[k], k + 1)
            moments = compute_moments(f)
            if space.dof_internal == 0:
                tensors.append(moments.pressure_per_particle)
            else:
                tensors.append(initial_lambda_ten(moments.pressure_per_particle, moments.T_tr,
                                                  moments.T_rot, moments.T_rot,
                                                  space.dof_internal))
            distributions.append(f)
        return SystemState(distributions[0], distributions[1], tensors[0], tensors[1], 0.)
    return make


def gaussian(density: float,
             mean: Sequence[float],
             cov: Sequence[Sequence[float]],
             theta: Optional[float] = None,
             dof_internal: int = 0,
             mass: float = 1.) -> GaussianSpec:
    return GaussianSpec(density, asarray(mean, dtype=float), asarray(cov, dtype=float),
                        theta, dof_internal, mass)


@pytest.fixture
def make_gaussian() -> Callable[..., GaussianSpec]:
    return gaussian
