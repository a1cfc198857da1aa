"Consistent names and default values."

SCENARIOS = ('relax-homogeneous', 'mono-diatomic', 'two-diatomic')
MODES = ('relax', 'transport1d', 'chu-compare')
BOUNDARIES = ('periodic', 'outflow')

CSV_VERSION = 1
MOMENTS_FILE = 'moments.csv'
PROFILE_FILE = 'profile.csv'
SUMMARY_FILE = 'summary.json'
STATE_FILE = 'state.h5'
PLOT_FILE = 'moments.png'
LOG_ENVIRONMENT_VARIABLE = 'POLYKIN_LOG'

# Closure and quadrature tolerances.
RESIDUAL_TOLERANCE = 1e-12
SYMMETRY_TOLERANCE = 1e-12
PIVOT_TOLERANCE = 1e-13
ENTROPY_FLOOR = 1e-300
ENTROPY_TOLERANCE = 1e-10
CLIP_ABORT_FRACTION = 1e-6
MASS_TOLERANCE = 1e-12
# Conservation drift per unit of simulated time, and full against reduced moments.
CONSERVATION_TOLERANCE = 1e-8
COMPARE_TOLERANCE = 1e-8
THETA_TOLERANCE = 1e-8
COVERAGE_SIGMAS = 6.

DEFAULT_GRID_PARAMETERS = {
    'dof_translational': 1,
    'velocity_points': 48,
    'internal_points': 24,
    'cells': 64,
    'width': 6.,
    'length': 1.,
    'boundary': 'periodic'
}
DEFAULT_TIME_PARAMETERS = {
    't_end': 1.,
    'cfl_relax': .5,
    'cfl_advection': .5,
    'output_stride': 1
}
DEFAULT_SEED = 0
DEFAULT_SAMPLES = 1000
