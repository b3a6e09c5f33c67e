PYPI_NAMES = {
    "numpy": "numpy",
    "scipy": "scipy",
    "pandas": "pandas",
    "yaml": "pyyaml",
    "matplotlib": "matplotlib",
    "matplotlib.figure": "matplotlib",
    "google.cloud.logging": "google-cloud-logging",
    "google.cloud.logging.handlers": "google-cloud-logging",
}
DEFAULT_ARGS = {
    "regime": "bcs",
    "geometry": "cigar",
    "lambda": 1.0,
    "n_eq": 1.0,
    "n_min": 1e-4,
    "n_max": 1e4,
    "n_points": 200,
    "k": 0.5,
    "epsilon": 1e-3,
    "steps": 2000,
    "points": 2048,
    "box_length": 100.0,
    "pulse_width": 5.0,
    "width_mode": "frozen",
    "init": "wave",
    "record_every": 10,
}
# Environment keys attached to structured log payloads
LOG_ENV_KEYS = ["PLATFORM"]
CONFIG_ENV_VAR = "POLYTROPE_SOUND_CONFIG"
ENV_PREFIX = "POLYSOUND_"
EXIT_CODES = {
    "success": 0,
    "usage": 2,
    "convergence": 3,
    "instability": 4,
}
CSV_SCHEMAS = {
    "sweep": ["n_eq", "width", "cs_numeric", "cs_lowdim", "cs_3d"],
    "dispersion": ["k", "omega"],
    "simulate": ["t", "mass", "mode_re", "mode_im", "peak_z"],
    "width": ["n_eq", "width", "residual", "iterations"],
}
# Width root finding
WIDTH_XTOL = 1e-14
WIDTH_MAXITER = 200
