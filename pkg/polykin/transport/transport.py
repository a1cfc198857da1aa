"""
One-dimensional finite-volume transport with relaxation per cell.

The streaming term v_x df/dx is discretized in flux form with upwind splitting of the velocity,
first order by default and minmod-limited second order with SSP-RK2 on request. Each step
advects, then relaxes every cell with the homogeneous solver (Lie splitting). The tensors
n Lambda^ten travel with the upwind mass flux, so every new Lambda^ten is a convex combination
of neighbouring ones.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from math import ceil
from typing import List, NamedTuple, Optional, Tuple

from numpy import abs as np_abs, concatenate, maximum, minimum, ndarray, repeat, sign, stack, where

from polykin.closure import MacroMoments
from polykin.dynamics import RelaxationSolver, StepReport, SystemState
from polykin.phase_grid import DiscreteDistribution, PhaseSpace
from polykin.util.constants import BOUNDARIES
from polykin.util.exceptions import ArgumentError

logger = logging.getLogger(__name__)

GHOST_CELLS = 2


class SpatialField1D(NamedTuple):
    "Cell averages of both species on a uniform 1D mesh."
    values: Tuple[ndarray, ndarray]
    lambda_ten: Tuple[ndarray, ndarray]
    spaces: Tuple[PhaseSpace, PhaseSpace]
    dx: float
    boundary: str
    time: float

    @property
    def cells(self) -> int:
        return self.values[0].shape[0]

    def cell_state(self, index: int) -> SystemState:
        return SystemState(DiscreteDistribution(self.values[0][index], self.spaces[0], 1),
                           DiscreteDistribution(self.values[1][index], self.spaces[1], 2),
                           self.lambda_ten[0][index], self.lambda_ten[1][index], self.time)

    def masses(self) -> Tuple[float, float]:
        "Total particle number of each species."
        return tuple(float(space.densities(values).sum() * self.dx)
                     for values, space in zip(self.values, self.spaces))


def field_from_states(states: List[SystemState], dx: float, boundary: str) -> SpatialField1D:
    "Assemble a field from one homogeneous state per cell."
    if boundary not in BOUNDARIES:
        raise ArgumentError(f'boundary must be one of {BOUNDARIES}, got {boundary}.')
    if len(states) < 2 * GHOST_CELLS:
        raise ArgumentError(f'need at least {2 * GHOST_CELLS} cells, got {len(states)}.')
    if not dx > 0:
        raise ArgumentError(f'cell width must be positive, got {dx}.')
    first = states[0]
    return SpatialField1D(
        (stack([state.f1.values for state in states]),
         stack([state.f2.values for state in states])),
        (stack([state.lambda_ten_1 for state in states]),
         stack([state.lambda_ten_2 for state in states])),
        (first.f1.space, first.f2.space), dx, boundary, first.time)


def field_moments(field: SpatialField1D) -> List[Tuple[MacroMoments, MacroMoments]]:
    "Moments of both species in every cell."
    moments = []
    for index in range(field.cells):
        state = field.cell_state(index)
        moments.append((state.f1.space.moments(state.f1.values),
                        state.f2.space.moments(state.f2.values)))
    return moments


def minmod(a: ndarray, b: ndarray) -> ndarray:
    "Smaller of the two slopes when they agree in sign, zero otherwise."
    return where(a * b > 0, sign(a) * minimum(np_abs(a), np_abs(b)), 0.)


def _pad(array: ndarray, boundary: str) -> ndarray:
    "Two ghost cells on each side: periodic images or copies of the edge cells."
    if boundary == 'periodic':
        return concatenate((array[-GHOST_CELLS:], array, array[:GHOST_CELLS]))
    return concatenate((repeat(array[:1], GHOST_CELLS, axis=0), array,
                        repeat(array[-1:], GHOST_CELLS, axis=0)))


def _interface_states(padded: ndarray, second_order: bool) -> Tuple[ndarray, ndarray]:
    "Left and right states at the cells' interfaces, the first ghost interface included."
    if not second_order:
        return padded[1:-2], padded[2:-1]
    slopes = minmod(padded[1:-1] - padded[:-2], padded[2:] - padded[1:-1])
    return padded[1:-2] + slopes[:-1] / 2, padded[2:-1] - slopes[1:] / 2


def max_speed(spaces: Tuple[PhaseSpace, PhaseSpace]) -> float:
    return float(max(np_abs(space.streaming_velocity).max() for space in spaces))


def advection_dt(field: SpatialField1D, cfl: float) -> float:
    "Largest stable advection step for the given Courant number."
    return cfl * field.dx / max_speed(field.spaces)


def _advection_rate(values: ndarray,
                    lambda_ten: ndarray,
                    space: PhaseSpace,
                    dx: float,
                    boundary: str,
                    second_order: bool) -> Tuple[ndarray, ndarray]:
    "Time derivatives of f and of n Lambda^ten under free streaming."
    left, right = _interface_states(_pad(values, boundary), second_order)
    speed = space.streaming_velocity
    forward, backward = maximum(speed, 0.), minimum(speed, 0.)
    flux = forward * left + backward * right
    forward_mass, backward_mass = space.densities(forward * left), space.densities(backward * right)
    padded_tensor = _pad(lambda_ten, boundary)
    tensor_flux = forward_mass[:, None, None] * padded_tensor[1:-2] \
        + backward_mass[:, None, None] * padded_tensor[2:-1]
    return -(flux[1:] - flux[:-1]) / dx, -(tensor_flux[1:] - tensor_flux[:-1]) / dx


def advect(field: SpatialField1D,
           dt: float,
           cfl: float = 1.,
           second_order: bool = False) -> SpatialField1D:
    """Free streaming over one step.

    Args:
        field (SpatialField1D): Cell averages before the step.
        dt (float): Time step.
        cfl (float): Largest admissible Courant number.
        second_order (bool): Use minmod reconstruction and SSP-RK2 instead of first-order upwind.

    Returns:
        SpatialField1D: Cell averages after the step, the time advanced by dt.
    """
    courant = dt * max_speed(field.spaces) / field.dx
    if courant > cfl * (1 + 1e-12):
        raise ArgumentError(f'advection Courant number {courant} exceeds {cfl}.')
    values, tensors = [], []
    for values_k, tensor_k, space in zip(field.values, field.lambda_ten, field.spaces):
        density = space.densities(values_k)
        weighted = density[:, None, None] * tensor_k

        def rate(f: ndarray, n_tensor: ndarray) -> Tuple[ndarray, ndarray]:
            current = n_tensor / space.densities(f)[:, None, None]
            return _advection_rate(f, current, space, field.dx, field.boundary, second_order)

        df, dn_tensor = rate(values_k, weighted)
        stage_f, stage_tensor = values_k + dt * df, weighted + dt * dn_tensor
        if second_order:
            df, dn_tensor = rate(stage_f, stage_tensor)
            stage_f = (values_k + stage_f + dt * df) / 2
            stage_tensor = (weighted + stage_tensor + dt * dn_tensor) / 2
        values.append(stage_f)
        tensors.append(stage_tensor / space.densities(stage_f)[:, None, None])
    return field._replace(values=(values[0], values[1]), lambda_ten=(tensors[0], tensors[1]),
                          time=field.time + dt)


def relax_cell(solver: RelaxationSolver,
               state: SystemState,
               dt: float) -> Tuple[SystemState, List[StepReport]]:
    "Relax one cell over dt, subcycling at the solver's stable step."
    substeps = max(1, ceil(dt / solver.stable_dt(state)))
    reports = []
    for _ in range(substeps):
        state, report = solver.step_rk2(state, dt / substeps)
        reports.append(report)
    return state, reports


def step_transport(field: SpatialField1D,
                   dt: float,
                   solver: Optional[RelaxationSolver] = None,
                   cfl: float = 1.,
                   second_order: bool = False,
                   threads: int = 1) -> Tuple[SpatialField1D, List[StepReport]]:
    "Advect, then relax every cell. Without a solver the gas streams freely."
    advected = advect(field, dt, cfl, second_order)
    if solver is None:
        return advected, []
    states = [advected.cell_state(index)._replace(time=field.time) for index in range(field.cells)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(lambda state: relax_cell(solver, state, dt), states))
    else:
        results = [relax_cell(solver, state, dt) for state in states]
    reports = [report for _, cell_reports in results for report in cell_reports]
    logger.debug('t = %g: %d relaxation substeps over %d cells', field.time, len(reports),
                 field.cells)
    relaxed = field_from_states([state for state, _ in results], field.dx, field.boundary)
    return relaxed._replace(time=field.time + dt), reports
