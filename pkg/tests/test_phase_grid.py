"Grids, discrete moments and projection of attractors."

import pytest
from numpy import array, eye, ones, trace, zeros
from numpy.testing import assert_allclose

from polykin.attractors import gaussian_entropy, isotropic_spec
from polykin.phase_grid import (KineticSpace, compute_moments, internal_grid, lambda_from_theta,
                                project_attractor, theta_from_lambda, velocity_bounds,
                                velocity_grid, xlogx_sum)
from polykin.util.exceptions import (ArgumentError, CoverageError, CoverageWarning,
                                     DegenerateStateError, PositivityError)


def test_velocity_grid():
    grid = velocity_grid((-1., 0.), (1., 4.), (8, 10))
    assert grid.shape == (8, 10)
    assert_allclose(grid.spacing, (.25, .4))
    assert_allclose(grid.axes[0][0], -.875)
    assert_allclose(grid.bounds, ((-1., 1.), (0., 4.)))
    assert grid.mesh().shape == (8, 10, 2)
    with pytest.raises(ArgumentError):
        velocity_grid((-1.,), (1.,), (7,))
    with pytest.raises(ArgumentError):
        velocity_grid((1.,), (-1.,), (8,))
    with pytest.raises(ArgumentError):
        velocity_grid((-1., 0.), (1.,), (8,))


def test_internal_grid_is_mirrored():
    grid = internal_grid(2, 3., 12)
    assert grid.shape == (12, 12)
    assert (grid.nodes == -grid.nodes[::-1]).all()
    assert_allclose(grid.bound, 3.)
    assert internal_grid(0, 3., 12).shape == ()
    with pytest.raises(ArgumentError):
        internal_grid(1, 3., 9)
    with pytest.raises(ArgumentError):
        internal_grid(1, 3., 6)


def test_velocity_bounds():
    lower, upper = velocity_bounds([(0., 1.), (2., -1.)], 4., 1., 3.)
    assert_allclose(lower, (-6., -7.))
    assert_allclose(upper, (8., 7.))


def test_temperature_conversions():
    assert_allclose(lambda_from_theta(1.2, .9, 1., 1, 2), 1.2 + 2 * (.9 - 1.))
    assert lambda_from_theta(1.2, None, 5., 3, 0) == 1.2
    Lambda = lambda_from_theta(1.2, .9, 1.1, 2, 3)
    assert_allclose(theta_from_lambda(1.2, .9, Lambda, 2, 3), 1.1)
    assert theta_from_lambda(1.2, None, 1.2, 3, 0) == 1.2
    with pytest.raises(PositivityError):
        lambda_from_theta(.1, 1., 2., 1, 2)
    with pytest.raises(PositivityError):
        theta_from_lambda(1., .1, 2., 2, 2)


def test_xlogx_sum_ignores_zeros():
    assert_allclose(xlogx_sum(array([0., 1., 2.])), 2 * 0.6931471805599453)
    assert xlogx_sum(zeros(3)) == 0.


@pytest.mark.parametrize('d,dof_internal', [(1, 0), (1, 2), (2, 1), (3, 0)])
def test_projection_reproduces_moments(make_space, d, dof_internal):
    points = 32 if d < 3 else 24
    space = make_space(d, dof_internal, mass=1.5, points=points, internal_points=24,
                       temperature=1.)
    u = array([.3, -.2, .1][:d])
    spec = isotropic_spec(.7, u, .8, dof_internal, 1.5)
    f = project_attractor(spec, space)
    moments = space.moments(f.values)
    assert_allclose(moments.n, .7, rtol=1e-14)
    assert_allclose(moments.u, u, atol=1e-10)
    assert_allclose(moments.T_tr, .8, rtol=1e-10)
    assert_allclose(moments.P, .7 * .8 * eye(d), atol=1e-10)
    assert_allclose(trace(moments.P), d * moments.n * moments.T_tr, rtol=1e-13)
    if dof_internal > 0:
        assert_allclose(moments.T_rot, .8, rtol=1e-10)
        assert (moments.eta_mean == 0.).all()
    else:
        assert moments.T_rot is None

def test_compute_moments_of_anisotropic_gaussian(make_space, make_gaussian):
    space = make_space(2, 1, mass=2., points=32, internal_points=24)
    tensor = array([[1.1, .25], [.25, .8]])
    f = project_attractor(make_gaussian(.9, [.2, -.1], tensor / 2., .9, 1, 2.), space, 2)
    moments = compute_moments(f)
    assert_allclose(moments.n, .9, rtol=1e-14)
    assert_allclose(moments.u, [.2, -.1], atol=1e-10)
    assert_allclose(moments.P, .9 * tensor, atol=1e-10)
    assert_allclose(moments.pressure_per_particle, tensor, atol=1e-10)
    assert_allclose(moments.T_tr, .95, rtol=1e-10)
    assert_allclose(moments.T_rot, .9, rtol=1e-10)
    assert (moments.P == moments.P.T).all()


def test_projection_error_shrinks_under_refinement(make_space):
    counts = (10, 14, 20)
    errors = []
    for points in counts:
        space = make_space(1, 0, points=points, temperature=1.5)
        f = project_attractor(isotropic_spec(1., [0.], 1., 0, 1.), space)
        errors.append(abs(compute_moments(f).T_tr - 1.))
    assert errors[0] > 1e-6
    for coarse, fine, (n_coarse, n_fine) in zip(errors, errors[1:], zip(counts, counts[1:])):
        assert fine <= coarse * (n_coarse / n_fine) ** 2 + 1e-15



def test_anisotropic_projection(make_space, make_gaussian):
    space = make_space(2, 0, points=32)
    cov = array([[1.2, .3], [.3, .7]])
    f = project_attractor(make_gaussian(1., [0., 0.], cov), space)
    assert_allclose(space.moments(f.values).P, cov, atol=1e-10)


def test_marginals(make_space):
    space = make_space(1, 2, mass=2., points=32, internal_points=32, temperature=1.3)
    f = project_attractor(isotropic_spec(1., [0.], 1.3, 2, 2.), space)
    g, h = space.marginals(f.values)
    assert g.shape == h.shape == space.velocity.shape
    assert_allclose(h, 2 * 1.3 / 2. * g, rtol=1e-10, atol=1e-300)


def test_densities_over_leading_axes(make_space):
    space = make_space(1, 1, points=16, internal_points=16)
    f = project_attractor(isotropic_spec(1., [0.], 1., 1, 1.), space)
    stacked = array([f.values, 2 * f.values, 3 * f.values])
    assert_allclose(space.densities(stacked), [1., 2., 3.], rtol=1e-14)


def test_narrow_grid_warns(make_space):
    space = make_space(1, 0, points=16, width=4.)
    with pytest.warns(CoverageWarning):
        project_attractor(isotropic_spec(1., [0.], 1., 0, 1.), space)


def test_missed_attractor_is_an_error(make_space):
    space = make_space(1, 0, points=16)
    with pytest.warns(CoverageWarning), pytest.raises(CoverageError):
        project_attractor(isotropic_spec(1., [1000.], 1., 0, 1.), space)


def test_empty_distribution_has_no_moments(make_space):
    space = make_space(1, 0, points=16)
    with pytest.raises(DegenerateStateError):
        space.moments(zeros(space.value_shape))


def test_streaming_velocity_broadcasts(make_space):
    space = make_space(2, 2, points=8, internal_points=8)
    assert space.streaming_velocity.shape == (8, 8, 1, 1)
    values = ones((3,) + space.value_shape)
    assert (space.streaming_velocity * values).shape == values.shape


def test_entropy_integral(make_space):
    space = make_space(1, 1, mass=1., points=32, internal_points=32)
    spec = isotropic_spec(1.2, [0.], .9, 1, 1.)
    f = project_attractor(spec, space)
    assert_allclose(space.entropy_integral(f.values), gaussian_entropy(spec), rtol=1e-10)


def test_mass_is_validated():
    with pytest.raises(ArgumentError):
        KineticSpace(velocity_grid((-1.,), (1.,), (8,)), internal_grid(0, 1., 8), 0.)
