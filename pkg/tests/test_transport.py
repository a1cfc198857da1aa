"Finite-volume free streaming, relaxation per cell and the splitting step."

import pytest
from numpy import abs as np_abs, arange, array, array_equal, cos, eye, pi, stack
from numpy.linalg import eigvalsh
from numpy.random import default_rng
from numpy.testing import assert_allclose

from polykin.closure import MixtureCoupling
from polykin.dynamics import RelaxationSolver
from polykin.phase_grid import KineticSpace, internal_grid, velocity_grid
from polykin.transport import (SpatialField1D, advect, advection_dt, field_from_states,
                               field_moments, minmod, step_transport, to_reduced_state)
from polykin.util.exceptions import ArgumentError
from polykin.util.util import step_schedule

COUPLING = MixtureCoupling(1., .5, .5, .1)


def test_minmod():
    assert_allclose(minmod(array([1., -2., 1., 0.]), array([3., -1., -1., 5.])),
                    [1., -1., 0., 0.])


def _sine_averages(cells: int, shift):
    "Cell averages of 1 + sin(2 pi (x - shift)) / 2 over [0, 1)."
    dx = 1. / cells
    left = (arange(cells) * dx)[:, None] - shift
    return 1 + .5 * (cos(2 * pi * left) - cos(2 * pi * (left + dx))) / (2 * pi * dx)


def _streaming_space() -> KineticSpace:
    "Monatomic gas whose speeds are all positive."
    return KineticSpace(velocity_grid((.5,), (1.5,), (8,)), internal_grid(0, 1., 8), 1.)


def _streaming_error(cells: int, second_order: bool) -> float:
    space = _streaming_space()
    speeds = space.velocity.axes[0]
    values = _sine_averages(cells, 0. * speeds)
    tensors = stack([eye(1)] * cells)
    field = SpatialField1D((values, values.copy()), (tensors, tensors.copy()), (space, space),
                           1. / cells, 'periodic', 0.)
    for dt in step_schedule(1., advection_dt(field, .5)):
        field, reports = step_transport(field, dt, second_order=second_order)
        assert reports == []
    assert_allclose(field.time, 1.)
    return float(np_abs(field.values[0] - _sine_averages(cells, speeds * field.time)).mean())


def test_first_order_upwind_convergence():
    ratio = _streaming_error(64, False) / _streaming_error(128, False)
    assert 1.6 < ratio < 2.2


def test_minmod_convergence():
    ratio = _streaming_error(64, True) / _streaming_error(128, True)
    assert ratio > 2.5


def _random_field(d: int, cells: int, boundary: str, seed: int = 0) -> SpatialField1D:
    rng = default_rng(seed)
    space = KineticSpace(velocity_grid((-2.,) * d, (2.,) * d, (8,) * d), internal_grid(0, 1., 8),
                         1.)
    values, tensors = [], []
    for _ in range(2):
        values.append(rng.uniform(.1, 1., size=(cells,) + space.value_shape))
        a = rng.normal(size=(cells, d, d))
        tensors.append(a @ a.transpose(0, 2, 1) + .1 * eye(d))
    return SpatialField1D(tuple(values), tuple(tensors), (space, space), 1. / cells, boundary,
                          0.)


@pytest.mark.parametrize('boundary', ['periodic', 'outflow'])
def test_uniform_field_is_unchanged(make_space, make_state, boundary):
    spaces = [make_space(1, 1, points=8, internal_points=8) for _ in range(2)]
    state = make_state(spaces, velocities=((.3,), (-.3,)))
    field = field_from_states([state] * 6, 1. / 6, boundary)
    advected = advect(field, advection_dt(field, 1.))
    for before, after in zip(field.values, advected.values):
        assert_allclose(after, before, rtol=1e-14)
    for before, after in zip(field.lambda_ten, advected.lambda_ten):
        assert_allclose(after, before, rtol=1e-14)


@pytest.mark.parametrize('second_order', [False, True])
def test_periodic_advection_conserves_mass(second_order):
    field = _random_field(1, 12, 'periodic')
    advected = advect(field, advection_dt(field, .5), second_order=second_order)
    assert_allclose(advected.masses(), field.masses(), rtol=1e-13)
    assert min(values.min() for values in advected.values) >= 0.


@pytest.mark.parametrize('second_order', [False, True])
def test_advected_tensors_stay_positive_definite(second_order):
    field = _random_field(2, 10, 'periodic', seed=3)
    advected = advect(field, advection_dt(field, .5), .5, second_order)
    for tensors in advected.lambda_ten:
        assert eigvalsh(tensors).min() > 0


def test_courant_number_is_enforced():
    field = _random_field(1, 8, 'periodic')
    with pytest.raises(ArgumentError):
        advect(field, 2 * advection_dt(field, 1.))
    with pytest.raises(ArgumentError):
        advect(field, advection_dt(field, 1.), cfl=.5)


def test_field_validation(make_space, make_state):
    state = make_state([make_space(1, 0, points=8), make_space(1, 0, points=8)])
    with pytest.raises(ArgumentError):
        field_from_states([state] * 6, .1, 'reflecting')
    with pytest.raises(ArgumentError):
        field_from_states([state] * 3, .1, 'periodic')
    with pytest.raises(ArgumentError):
        field_from_states([state] * 6, 0., 'periodic')


def _jump_field(make_species, make_space, make_state, reduced: bool):
    species = (make_species(dof_internal=0, nu_self=5., nu_cross=2.),
               make_species(dof_internal=2, nu_self=5., nu_cross=2.))
    spaces = [make_space(1, 0, points=16, temperature=1.5),
              make_space(1, 2, points=16, internal_points=16, temperature=1.5)]
    left = make_state(spaces)
    right = make_state(spaces, densities=(.125, .125), temperatures=(.8, .8),
                       rotational=(.8, .8))
    if reduced:
        left, right = to_reduced_state(left), to_reduced_state(right)
    field = field_from_states([left] * 4 + [right] * 4, 1. / 8, 'periodic')
    return RelaxationSolver(species, COUPLING._replace(gamma=.5)), field


@pytest.mark.parametrize('reduced', [False, True])
def test_transport_step_conserves_mass(make_species, make_space, make_state, reduced):
    solver, field = _jump_field(make_species, make_space, make_state, reduced)
    masses = field.masses()
    dt = advection_dt(field, .5)
    for _ in range(3):
        field, reports = step_transport(field, dt, solver, .5)
        assert len(reports) >= field.cells
    assert_allclose(field.masses(), masses, rtol=1e-12)
    assert_allclose(field.time, 3 * dt)
    assert all(moments[1].T_rot > 0 for moments in field_moments(field))


def test_threads_do_not_change_the_result(make_species, make_space, make_state):
    solver, field = _jump_field(make_species, make_space, make_state, True)
    dt = advection_dt(field, .5)
    serial, _ = step_transport(field, dt, solver, .5, threads=1)
    threaded, _ = step_transport(field, dt, solver, .5, threads=3)
    for first, second in zip(serial.values + serial.lambda_ten,
                             threaded.values + threaded.lambda_ten):
        assert array_equal(first, second)
