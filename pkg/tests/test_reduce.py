"Reduction of the internal variable and the reduced representation."

import pytest
from numpy import array
from numpy.testing import assert_allclose

from polykin.attractors import gaussian_entropy, isotropic_spec
from polykin.closure import MixtureCoupling
from polykin.dynamics import RelaxationSolver
from polykin.phase_grid import compute_moments, project_attractor
from polykin.transport import (ReducedSpace, full_vs_reduced_check, reduce, reduce_spec,
                               reduced_attractors, reduced_space, to_reduced, to_reduced_state)
from polykin.util.exceptions import ArgumentError


def test_h_factor():
    spec = isotropic_spec(1., [0.], 2., 2, 1.)
    assert_allclose(reduce_spec(spec).h_factor, 4.)
    assert reduce_spec(isotropic_spec(1., [0.], 2., 0, 1.)).h_factor == 0.
    assert reduce_spec(spec).velocity.dof_internal == 0


def test_reduced_maxwellian(make_space):
    space = make_space(1, 2, mass=1.5, points=32, internal_points=32, temperature=1.2)
    f = project_attractor(isotropic_spec(1., [.2], 1.2, 2, 1.5), space)
    pair = reduce(f)
    assert_allclose(pair.h, 2 * 1.2 / 1.5 * pair.g, rtol=1e-10, atol=1e-300)
    assert pair.species == 1


def test_monatomic_reduction_is_the_distribution(make_space):
    space = make_space(1, 0, points=16)
    f = project_attractor(isotropic_spec(1., [0.], 1., 0, 1.), space)
    pair = reduce(f)
    assert (pair.g == f.values).all()
    assert (pair.h == 0.).all()


def test_reduction_needs_the_full_lattice(make_space):
    space = make_space(1, 1, points=16, internal_points=16)
    f = project_attractor(isotropic_spec(1., [0.], 1., 1, 1.), space)
    reduced = to_reduced(f, reduced_space(space))
    with pytest.raises(ArgumentError):
        reduce(reduced)


@pytest.mark.parametrize('dof_internal', [0, 1, 3])
def test_reduced_moments_agree(make_space, dof_internal):
    space = make_space(1, dof_internal, mass=1.3, points=32, internal_points=16,
                       temperature=1.1)
    spec = isotropic_spec(.9, [-.1], 1.1, dof_internal, 1.3)
    f = project_attractor(spec, space)
    reduced = to_reduced(f, reduced_space(space))
    assert reduced.values.shape == (2, 32)
    full_moments, reduced_moments = compute_moments(f), compute_moments(reduced)
    assert_allclose(reduced_moments.n, full_moments.n, rtol=1e-13)
    assert_allclose(reduced_moments.u, full_moments.u, atol=1e-13)
    assert_allclose(reduced_moments.T_tr, full_moments.T_tr, rtol=1e-13)
    if dof_internal > 0:
        assert_allclose(reduced_moments.T_rot, full_moments.T_rot, rtol=1e-13)
        assert (reduced_moments.eta_mean == 0.).all()


def test_reduced_projection(make_space):
    full = make_space(1, 2, points=32, internal_points=32, temperature=1.5)
    reduced = reduced_space(full)
    spec = isotropic_spec(1.1, [.3], 1.5, 2, 1.)
    moments = reduced.moments(reduced.project(spec))
    assert_allclose(moments.n, 1.1, rtol=1e-14)
    assert_allclose(moments.T_tr, 1.5, rtol=1e-10)
    assert_allclose(moments.T_rot, 1.5, rtol=1e-10)


def test_reduced_entropy_of_a_maxwellian(make_space):
    space = make_space(1, 2, points=32, internal_points=32, temperature=.9)
    spec = isotropic_spec(1.2, [0.], .9, 2, 1.)
    f = project_attractor(spec, space)
    reduced = to_reduced(f, reduced_space(space))
    assert_allclose(reduced.space.entropy_integral(reduced.values), gaussian_entropy(spec),
                    rtol=1e-9)
    assert_allclose(space.entropy_integral(f.values), gaussian_entropy(spec), rtol=1e-9)


def test_reduced_space_values(make_space):
    reduced = ReducedSpace(make_space(2, 0, points=8).velocity, 1., 2)
    assert reduced.value_shape == (2, 8, 8)
    assert reduced.streaming_velocity.shape == (8, 8)


def test_reduced_attractors(make_species, make_space, make_state):
    species = (make_species(dof_internal=2), make_species(dof_internal=2))
    spaces = [make_space(1, 2, points=16, internal_points=16, temperature=2.) for _ in species]
    state = make_state(spaces, temperatures=(1.2, 1.), rotational=(1., 1.3))
    snapshot = RelaxationSolver(species, MixtureCoupling(1., .5, .5, .1)).evaluate(state)
    first, second = reduced_attractors(snapshot.attractors)
    assert_allclose(second.cross.h_factor, 2 * snapshot.interspecies.Theta21)
    assert_allclose(first.es_gaussian.h_factor, 2 * snapshot.temps[0].Theta)


def test_full_and_reduced_relaxation_agree(make_species, make_space, make_state):
    species = (make_species(mass=1., dof_internal=2), make_species(mass=1.5, dof_internal=1))
    spaces = [make_space(1, params.dof_internal, mass=params.mass, points=32,
                         internal_points=32, temperature=2.) for params in species]
    state = make_state(spaces, densities=(1., .7), velocities=((.2,), (-.3,)),
                       temperatures=(1.4, .9), rotational=(.8, 1.2))
    solver = RelaxationSolver(species, MixtureCoupling(1., .5, .5, .1))
    report = full_vs_reduced_check(state, solver, 1.)
    assert report.max_discrepancy <= 1e-8
    assert_allclose(report.time, 1.)


def test_equilibrium_paths_agree(make_species, make_space, make_state):
    species = (make_species(dof_internal=0), make_species(dof_internal=2))
    spaces = [make_space(1, 0, points=32), make_space(1, 2, points=32, internal_points=32)]
    state = make_state(spaces)
    solver = RelaxationSolver(species, MixtureCoupling(1., .5, .5, .1))
    reduced = to_reduced_state(state)
    assert reduced.f1.values.shape == (2, 32)
    assert full_vs_reduced_check(state, solver, .5).max_discrepancy <= 1e-10


def test_comparison_needs_the_full_lattice(make_species, make_space, make_state):
    species = (make_species(dof_internal=1), make_species(dof_internal=1))
    spaces = [make_space(1, 1, points=16, internal_points=16) for _ in species]
    state = to_reduced_state(make_state(spaces))
    with pytest.raises(ArgumentError):
        full_vs_reduced_check(state, RelaxationSolver(species, MixtureCoupling(1., .5, .5, 0.)),
                              1.)


def test_reduced_pair_stack(make_space):
    space = make_space(1, 1, points=16, internal_points=16)
    f = project_attractor(isotropic_spec(1., [0.], 1., 1, 1.), space)
    reduced = to_reduced(f, reduced_space(space))
    assert_allclose(reduced.values, array([reduce(f).g, reduce(f).h]))
