"""Small helpers shared by the solver and the command line tool."""
from os.path import join
from typing import Dict, List

import h5py
from numpy import asarray, ndarray


def step_schedule(t_end: float, dt: float) -> List[float]:
    "Time steps of size dt covering [0, t_end], the last one shortened to land on t_end."
    if dt <= 0:
        raise ValueError('dt must be positive.')
    steps = int(t_end // dt)
    schedule = [dt] * steps
    remainder = t_end - steps * dt
    if remainder > 1e-12 * max(t_end, dt):
        schedule.append(remainder)
    if len(schedule) == 0:
        schedule.append(t_end)
    return schedule


def save_arrays(out_directory: str, filename: str, arrays: Dict[str, ndarray]) -> str:
    "Write named arrays to a gzip-compressed HDF5 file."
    path = join(out_directory, filename)
    with h5py.File(path, 'w') as output_file:
        for name, array in arrays.items():
            output_file.create_dataset(name, data=asarray(array), compression='gzip')
    return path


def load_arrays(path: str) -> Dict[str, ndarray]:
    "Read every dataset of an HDF5 file written by save_arrays."
    with h5py.File(path, 'r') as input_file:
        return {name: input_file[name][()] for name in input_file.keys()}
