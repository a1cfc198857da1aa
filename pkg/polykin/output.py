"""Run artifacts: the moments time series, the summary, spatial profiles and the moment plot."""

from json import dump
from os.path import join
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

from numpy import diag, nan, ndarray
from numpy.linalg import norm
from pandas import DataFrame, read_csv
from matplotlib import use
from matplotlib.pyplot import clf, legend, plot, savefig, subplot, xlabel

from polykin.closure import MacroMoments
from polykin.util.constants import CSV_VERSION, PLOT_FILE, PROFILE_FILE, SUMMARY_FILE

use('Agg')


class SpeciesRow(NamedTuple):
    n: float
    u: ndarray
    T_tr: float
    T_rot: Optional[float]
    Lambda: float
    Theta: float
    P_offdiagonal: float


class CsvRow(NamedTuple):
    "One line of the moments time series."
    time: float
    species: Tuple[SpeciesRow, SpeciesRow]
    entropy: float
    entropy_change: float
    mass_residual: Tuple[float, float]
    momentum_residual: float
    energy_residual: float
    clipped_mass: float

    def as_dict(self) -> Dict[str, float]:
        row = {'time': self.time}
        for index, species in enumerate(self.species, start=1):
            row[f'n{index}'] = species.n
            for axis, component in enumerate(species.u):
                row[f'u{index}_{axis}'] = float(component)
            row[f'Tt{index}'] = species.T_tr
            row[f'Tr{index}'] = nan if species.T_rot is None else species.T_rot
            row[f'Lambda{index}'] = species.Lambda
            row[f'Theta{index}'] = species.Theta
            row[f'Poff{index}'] = species.P_offdiagonal
        row.update({'H': self.entropy,
                    'dH': self.entropy_change,
                    'mass_residual1': self.mass_residual[0],
                    'mass_residual2': self.mass_residual[1],
                    'momentum_residual': self.momentum_residual,
                    'energy_residual': self.energy_residual,
                    'clipped_mass': self.clipped_mass})
        return row


def csv_columns(d: int) -> List[str]:
    "Fixed column order of moments.csv for velocity dimension d."
    columns = ['time']
    for index in (1, 2):
        columns += [f'n{index}'] + [f'u{index}_{axis}' for axis in range(d)]
        columns += [f'{name}{index}' for name in ('Tt', 'Tr', 'Lambda', 'Theta', 'Poff')]
    return columns + ['H', 'dH', 'mass_residual1', 'mass_residual2', 'momentum_residual',
                      'energy_residual', 'clipped_mass']


def species_row(moments: MacroMoments, Lambda: float, Theta: float) -> SpeciesRow:
    off_diagonal = moments.P - diag(diag(moments.P))
    return SpeciesRow(moments.n, moments.u, moments.T_tr, moments.T_rot, Lambda, Theta,
                      float(norm(off_diagonal)))


class MomentsWriter:
    "Append-only writer of moments.csv; every row reaches the file when it is appended."

    def __init__(self, path: str, d: int) -> None:
        self.path = path
        self.columns = csv_columns(d)
        DataFrame(columns=self.columns).to_csv(self.path, index=False)

    def append(self, row: CsvRow) -> None:
        DataFrame([row.as_dict()], columns=self.columns).to_csv(
            self.path, mode='a', header=False, index=False, na_rep='', float_format='%.17g')


def write_summary(out_directory: str, summary: Dict[str, Any]) -> str:
    path = join(out_directory, SUMMARY_FILE)
    with open(path, 'w', encoding='utf-8') as summary_file:
        dump({'csv_version': CSV_VERSION, **summary}, summary_file, indent=2)
    return path


def write_profile(out_directory: str,
                  centers: ndarray,
                  moments: List[Tuple[MacroMoments, MacroMoments]]) -> str:
    "Per-cell moments of a spatial field."
    rows = []
    for x, cell in zip(centers, moments):
        row = {'x': float(x)}
        for index, moment in enumerate(cell, start=1):
            row[f'n{index}'] = moment.n
            for axis, component in enumerate(moment.u):
                row[f'u{index}_{axis}'] = float(component)
            row[f'Tt{index}'] = moment.T_tr
            row[f'Tr{index}'] = nan if moment.T_rot is None else moment.T_rot
        rows.append(row)
    path = join(out_directory, PROFILE_FILE)
    DataFrame(rows).to_csv(path, index=False, na_rep='', float_format='%.17g')
    return path


def plot_moments(csv_path: str, out_directory: str) -> str:
    "Temperatures and entropy against time."
    df = read_csv(csv_path)
    subplot(2, 1, 1)
    for column in ('Tt1', 'Tr1', 'Tt2', 'Tr2'):
        if df[column].notna().any():
            plot(df['time'], df[column], label=column)
    legend()
    subplot(2, 1, 2)
    plot(df['time'], df['H'], label='H')
    xlabel('t')
    legend()
    path = join(out_directory, PLOT_FILE)
    savefig(path)
    clf()
    return path
