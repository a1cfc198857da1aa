"""
Gaussian attractors of the ES-BGK mixture and their tensor temperatures.

Every attractor is a Gaussian in the velocity v and an isotropic Gaussian in the internal
variable eta:

    n / sqrt(det(2 pi Sigma)) (2 pi theta / m)^(-l/2)
        exp(-1/2 (v - u) . Sigma^-1 . (v - u) - m |eta|^2 / (2 theta))

with Sigma = (temperature tensor) / m. Per species we build the BGK Maxwellian M_k, the ES
Gaussian G_k, the cross Maxwellian M_kj, the extended Gaussian G^_k, the equilibrium Gaussian
G~_k and the total equilibrium Maxwellian M~_k.
"""

from typing import NamedTuple, Optional, Sequence, Tuple, Union

from numpy import (asarray, diag, eye, exp, fill_diagonal, full, log, ndarray, pi,
                   shape, sum as np_sum, trace, zeros)
from numpy.linalg import LinAlgError, slogdet
from scipy.linalg import cholesky, eigvalsh, solve_triangular

from polykin.closure import InterspeciesState, MacroMoments, SpeciesParams
from polykin.util.constants import PIVOT_TOLERANCE, SYMMETRY_TOLERANCE
from polykin.util.exceptions import ArgumentError, FactorizationError, PositivityError


class GaussianSpec(NamedTuple):
    "Parameters of a Gaussian in (v, eta)."
    density: float
    mean: ndarray
    velocity_cov: ndarray
    internal_temp: Optional[float]
    dof_internal: int
    mass: float

    @property
    def dof_translational(self) -> int:
        return len(self.mean)


class TensorTemps(NamedTuple):
    "Relaxed and equilibrium temperatures of one species."
    Lambda_ten: ndarray
    Lambda_scalar: float
    Theta: float
    Lambda_ES: ndarray
    T_equ: float
    T_ten: ndarray


class SpdReport(NamedTuple):
    is_spd: bool
    min_eigenvalue: float


class SpeciesAttractors(NamedTuple):
    "All attractors of one species."
    maxwellian: GaussianSpec
    es_gaussian: GaussianSpec
    cross: GaussianSpec
    extended: GaussianSpec
    equilibrium: GaussianSpec
    total_maxwellian: GaussianSpec


class AttractorSet(NamedTuple):
    species: Tuple[SpeciesAttractors, SpeciesAttractors]
    interspecies: InterspeciesState


class DeterminantGaps(NamedTuple):
    "Slack in the determinant inequalities that order the attractor entropies."
    trace_gap: float
    tensor_gap: float


def spd_check(matrix: Union[Sequence[Sequence[float]], ndarray]) -> SpdReport:
    "Symmetric eigenvalue test for positive definiteness."
    matrix = asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ArgumentError(f'expected a square matrix, got shape {matrix.shape}.')
    scale = max(float(abs(matrix).max()), 1.)
    if abs(matrix - matrix.T).max() > SYMMETRY_TOLERANCE * scale:
        raise ArgumentError('matrix is not symmetric.')
    min_eigenvalue = float(eigvalsh(matrix)[0])
    return SpdReport(min_eigenvalue > 0, min_eigenvalue)


def lambda_es(Lambda_scalar: float, Lambda_ten: ndarray, mu: float) -> ndarray:
    "Lambda^ES = (1 - mu) Lambda I + mu Lambda^ten."
    Lambda_ten = asarray(Lambda_ten, dtype=float)
    d = Lambda_ten.shape[0]
    if d > 1 and not -1 / (d - 1) <= mu <= 1:
        raise ArgumentError(f'mu = {mu} lies outside [{-1 / (d - 1)}, 1].')
    if not spd_check(Lambda_ten).is_spd:
        raise PositivityError('Lambda^ten is not positive definite.')
    if abs(trace(Lambda_ten) - d * Lambda_scalar) > 1e-10 * d * abs(Lambda_scalar):
        raise ArgumentError('trace of Lambda^ten must equal d Lambda.')
    return (1 - mu) * Lambda_scalar * eye(d) + mu * Lambda_ten


def t_tensor(T_equ: float, P_over_n: ndarray, d: int, l: int) -> ndarray:
    "Equilibrium temperature on the diagonal, scaled pressure tensor off it."
    tensor = d / (d + l) * asarray(P_over_n, dtype=float)
    fill_diagonal(tensor, T_equ)
    return tensor


def _factor(cov: ndarray) -> ndarray:
    "Lower Cholesky factor, rejecting pivots below the trace-relative threshold."
    try:
        chol = cholesky(cov, lower=True)
    except (LinAlgError, ValueError) as error:
        raise FactorizationError(f'velocity covariance is not positive definite: {error}') \
            from error
    if diag(chol).min() ** 2 < PIVOT_TOLERANCE * trace(cov):
        raise FactorizationError('velocity covariance is numerically singular.')
    return chol


def _log_normalization(spec: GaussianSpec, chol: ndarray) -> float:
    d = spec.dof_translational
    value = log(spec.density) - d / 2 * log(2 * pi) - np_sum(log(diag(chol)))
    if spec.dof_internal > 0:
        value -= spec.dof_internal / 2 * log(2 * pi * spec.internal_temp / spec.mass)
    return float(value)


def eval_gaussian(spec: GaussianSpec,
                  v: ndarray,
                  eta: Optional[ndarray] = None) -> ndarray:
    """Evaluate a Gaussian attractor.

    Args:
        spec (GaussianSpec): The attractor.
        v (ndarray): Velocities with trailing axis of length d.
        eta (Optional[ndarray]): Internal variables with trailing axis of length l,
            broadcastable against v. Ignored when the spec has no internal degrees of freedom.

    Returns:
        ndarray: Non-negative values with the broadcast shape of v and eta without the trailing
            axes.
    """
    chol = _factor(asarray(spec.velocity_cov, dtype=float))
    offset = asarray(v, dtype=float) - spec.mean
    d = spec.dof_translational
    if offset.shape[-1] != d:
        raise ArgumentError(f'velocities must have trailing length {d}, got {offset.shape}.')
    whitened = solve_triangular(chol, offset.reshape(-1, d).T, lower=True)
    exponent = -0.5 * np_sum(whitened ** 2, axis=0).reshape(offset.shape[:-1])
    if spec.dof_internal > 0:
        if eta is None:
            raise ArgumentError('internal variables are required for l > 0.')
        exponent = exponent - spec.mass * np_sum(asarray(eta) ** 2, axis=-1) \
            / (2 * spec.internal_temp)
    if spec.density == 0:
        return zeros(shape(exponent))
    return exp(_log_normalization(spec, chol) + exponent)


def gaussian_entropy(spec: GaussianSpec) -> float:
    "Closed form of the integral of G ln G."
    if spec.density == 0:
        return 0.
    chol = _factor(asarray(spec.velocity_cov, dtype=float))
    total_dof = spec.dof_translational + spec.dof_internal
    return spec.density * (_log_normalization(spec, chol) - total_dof / 2)


def build_attractor_set(moments: Tuple[MacroMoments, MacroMoments],
                        temps: Tuple[TensorTemps, TensorTemps],
                        interspecies: InterspeciesState,
                        species: Tuple[SpeciesParams, SpeciesParams]) -> AttractorSet:
    "Assemble the attractors of both species from an already validated closure."
    cross_parameters = ((interspecies.u12, interspecies.Lambda12, interspecies.Theta12),
                        (interspecies.u21, interspecies.Lambda21, interspecies.Theta21))
    built = []
    for moment, temp, params, (u_cross, Lambda_cross, Theta_cross) in zip(
            moments, temps, species, cross_parameters):
        m, l, d = params.mass, params.dof_internal, params.dof_translational

        def gaussian(mean: ndarray, tensor: ndarray, internal: float) -> GaussianSpec:
            return GaussianSpec(moment.n, mean, tensor / m, internal if l > 0 else None, l, m)

        for name, tensor in (('Lambda^ES', temp.Lambda_ES), ('T^ten', temp.T_ten)):
            if not spd_check(tensor).is_spd:
                raise PositivityError(f'{name} is not positive definite.')
        built.append(SpeciesAttractors(
            maxwellian=gaussian(moment.u, temp.Lambda_scalar * eye(d), temp.Theta),
            es_gaussian=gaussian(moment.u, temp.Lambda_ES, temp.Theta),
            cross=gaussian(u_cross, Lambda_cross * eye(d), Theta_cross),
            extended=gaussian(moment.u, temp.Lambda_ten,
                              moment.T_rot if moment.T_rot is not None else temp.Theta),
            equilibrium=gaussian(moment.u, temp.T_ten, temp.T_equ),
            total_maxwellian=gaussian(moment.u, temp.T_equ * eye(d), temp.T_equ)))
    return AttractorSet((built[0], built[1]), interspecies)


def determinant_gaps(moments: MacroMoments,
                     temps: TensorTemps,
                     dof_internal: int) -> DeterminantGaps:
    "Both gaps are non-negative for admissible states."
    d = len(moments.u)
    l = dof_internal
    _, logdet_es = slogdet(temps.Lambda_ES)
    _, logdet_ten = slogdet(temps.T_ten)
    _, logdet_p = slogdet(moments.pressure_per_particle)
    tensor_gap = logdet_ten - logdet_p
    if l > 0:
        tensor_gap += l * (log(temps.T_equ) - log(moments.T_rot))
    return DeterminantGaps(float(d * log(temps.Lambda_scalar) - logdet_es), float(tensor_gap))


def isotropic_spec(density: float,
                   mean: ndarray,
                   temperature: float,
                   dof_internal: int,
                   mass: float) -> GaussianSpec:
    "Maxwellian with one temperature in every direction of v and eta."
    mean = asarray(mean, dtype=float)
    cov = full(len(mean), temperature / mass)
    return GaussianSpec(density, mean, diag(cov), temperature if dof_internal > 0 else None,
                        dof_internal, mass)
