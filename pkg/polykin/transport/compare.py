"""Integrate the full and the reduced representation side by side."""

import logging
from typing import NamedTuple, Tuple

from numpy import sqrt
from numpy.linalg import norm
from tqdm import tqdm

from polykin.closure import MacroMoments
from polykin.dynamics import RelaxationSolver, SystemState
from polykin.phase_grid import KineticSpace, compute_moments
from polykin.transport.reduce import reduced_space, to_reduced
from polykin.util.exceptions import ArgumentError
from polykin.util.util import step_schedule

logger = logging.getLogger(__name__)


class ComparisonReport(NamedTuple):
    "Largest relative moment discrepancy between the two representations."
    max_discrepancy: float
    final_discrepancy: float
    steps: int
    time: float


def moment_discrepancy(full: Tuple[MacroMoments, MacroMoments],
                       reduced: Tuple[MacroMoments, MacroMoments],
                       masses: Tuple[float, float]) -> float:
    "Scale-free distance between the (n, u, T^t, T^r) of both species."
    parts = []
    for first, second, mass in zip(full, reduced, masses):
        parts += [abs(first.n - second.n) / first.n,
                  norm(first.u - second.u) / sqrt(first.T_tr / mass),
                  abs(first.T_tr - second.T_tr) / first.T_tr]
        if first.T_rot is not None:
            parts.append(abs(first.T_rot - second.T_rot) / first.T_rot)
    return float(max(parts))


def to_reduced_state(state: SystemState) -> SystemState:
    "The same state with both distributions on reduced spaces."
    return state._replace(f1=to_reduced(state.f1, reduced_space(state.f1.space)),
                          f2=to_reduced(state.f2, reduced_space(state.f2.space)))


def full_vs_reduced_check(state: SystemState,
                          solver: RelaxationSolver,
                          t_end: float,
                          progress: bool = False) -> ComparisonReport:
    "Evolve both representations with the full path's time step and track their moments."
    if not all(isinstance(f.space, KineticSpace) for f in state.distributions):
        raise ArgumentError('the comparison starts from distributions on the full lattice.')
    masses = (state.f1.space.mass, state.f2.space.mass)
    reduced = to_reduced_state(state)

    def discrepancy() -> float:
        return moment_discrepancy(tuple(compute_moments(f) for f in state.distributions),
                                  tuple(compute_moments(f) for f in reduced.distributions),
                                  masses)

    worst = current = discrepancy()
    schedule = step_schedule(t_end, solver.stable_dt(state))
    for dt in tqdm(schedule, disable=not progress):
        state, _ = solver.step_rk2(state, dt)
        reduced, _ = solver.step_rk2(reduced, dt)
        current = discrepancy()
        worst = max(worst, current)
    logger.info('full and reduced paths differ by at most %g over %d steps', worst,
                len(schedule))
    return ComparisonReport(worst, current, len(schedule), state.time)
