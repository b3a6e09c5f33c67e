"""
Command-line front end.

Examples:
    polysound sweep --regime=bec --nu=1 --geometry=cigar --out=bec_cigar.csv
    polysound width --regime=bcs --n-eq=0,1,10
    polysound simulate --regime=bec --nu=1 --n-eq=40 --k=0.5 --steps=4000
    polysound plot --csv=bec_cigar.csv --x=n_eq --y=cs_numeric,cs_lowdim,cs_3d --log-x
"""

import os
import sys
import math
import time
import argparse
from dataclasses import dataclass, field

import numpy as np

from polysound.config import CONFIG_ENV_VAR, DEFAULT_ARGS
from polysound.exceptions import PolysoundError, UsageError
from polysound.output import Table, RunManifest, config_hash, render_svg_plot
from polysound.polytrope import Regime, TrapGeometry, regime_params
from polysound.sound import (
    default_density_grid,
    dispersion_curve,
    sound_velocity,
    sweep_sound_curve,
)
from polysound.utils import YAML, get_default_arg, log
from polysound.widths import solve_width
from polysound import hydrosim


SUBCOMMANDS = ["width", "sound", "sweep", "dispersion", "simulate", "plot"]
# Keys that are never read from a config file
NOT_CONFIGURABLE = {"subcommand", "config"}
DEFAULT_PLOT_COLUMNS = ["cs_numeric", "cs_lowdim", "cs_3d"]


class ArgumentParser(argparse.ArgumentParser):
    """
    ArgumentParser raising `UsageError` instead of exiting.
    """

    def error(self, message):
        raise UsageError(message)


def _finite_float(value):
    try:
        number = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid float value: {value!r}") from None
    if not math.isfinite(number):
        raise argparse.ArgumentTypeError(f"value must be finite: {value!r}")
    return number


def _float_list(value):
    return [_finite_float(v) for v in str(value).split(",") if v.strip()]


def _name_list(value):
    return [v.strip() for v in str(value).split(",") if v.strip()]


def build_parser():
    parser = ArgumentParser(
        prog="polysound",
        description="Widths and sound velocities of polytropic superfluid gases in cigar and disk traps.",
        argument_default=argparse.SUPPRESS,
        allow_abbrev=False,
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--regime", choices=["bcs", "bec", "custom"])
    parser.add_argument("--nu", type=_finite_float, help="BEC coupling a_s N")
    parser.add_argument("--gamma", type=_finite_float)
    parser.add_argument("--alpha", type=_finite_float)
    parser.add_argument("--lambda", type=_finite_float, help="Gradient-correction strength")
    parser.add_argument("--geometry", choices=["cigar", "disk"])
    parser.add_argument("--n-eq", type=_float_list, help="Density, or comma-separated densities")
    parser.add_argument("--n-min", type=_finite_float)
    parser.add_argument("--n-max", type=_finite_float)
    parser.add_argument("--n-points", type=int)
    parser.add_argument("--k", type=_finite_float)
    parser.add_argument("--epsilon", type=_finite_float)
    parser.add_argument("--dt", type=_finite_float)
    parser.add_argument("--steps", type=int)
    parser.add_argument("--points", type=int)
    parser.add_argument("--box-length", type=_finite_float)
    parser.add_argument("--width-mode", choices=["frozen", "local"])
    parser.add_argument("--init", choices=["wave", "pulse"])
    parser.add_argument("--pulse-width", type=_finite_float)
    parser.add_argument("--potential", help="Two-column (z, V) text table")
    parser.add_argument("--record-every", type=int)
    parser.add_argument("--csv", help="Input CSV for plot")
    parser.add_argument("--x", help="x column for plot")
    parser.add_argument("--y", type=_name_list, help="Comma-separated y columns for plot")
    parser.add_argument("--log-x", action="store_true")
    parser.add_argument("--config", help=f"key=value config file (default: ${CONFIG_ENV_VAR})")
    parser.add_argument("--out")
    return parser


def config_keys(parser=None):
    parser = parser or build_parser()
    return {a.dest for a in parser._actions if a.dest != "help"} - NOT_CONFIGURABLE


def parse_config_text(config_text):
    """
    Parse flat key=value text (`#` comments) into a dict with normalized keys.
    """
    config = {}
    for number, raw in enumerate((config_text or "").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"Config line {number} is not key=value: {raw.strip()!r}", key=line)
        key, value = line.split("=", 1)
        config[key.strip().lower().replace("-", "_")] = value.strip()
    return config


def _config_tokens(config, parser):
    allowed = config_keys(parser)
    tokens = []
    for key, value in config.items():
        if key not in allowed:
            raise UsageError(f"Unknown config key: {key!r}", key=key)
        flag = "--" + key.replace("_", "-")
        if key == "log_x":
            if str(value).strip().lower() in ["1", "true", "yes", "on"]:
                tokens.append(flag)
        else:
            tokens.append(f"{flag}={value}")
    return tokens


def _load_config(path):
    """
    Returns:
    - tuple: (raw text, flat dict of string values).
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise UsageError(f"Cannot read config file {path}: {e}", key="config") from e
    if path.endswith((".yaml", ".yml")):
        try:
            reader = YAML(path)
        except ImportError as e:
            raise UsageError(f"YAML config {path} needs pyyaml: {e}", key="config") from e
        try:
            data = reader.load()
        except reader.yaml.YAMLError as e:
            raise UsageError(f"Cannot parse config file {path}: {e}", key="config") from e
        if not isinstance(data, dict):
            raise UsageError(f"Config file {path} must hold a mapping", key="config")
        return text, {str(k).lower().replace("-", "_"): str(v) for k, v in data.items()}
    return text, parse_config_text(text)


@dataclass
class Invocation:
    subcommand: str
    regime: Regime
    geometry: TrapGeometry
    lambda_qp: float
    densities: list = None
    n_min: float = None
    n_max: float = None
    n_points: int = None
    k: float = None
    epsilon: float = None
    dt: float = None
    steps: int = None
    points: int = None
    box_length: float = None
    width_mode: str = "frozen"
    init: str = "wave"
    pulse_width: float = None
    potential: str = None
    record_every: int = None
    csv: str = None
    x: str = None
    y: list = None
    log_x: bool = False
    out: str = None
    config_text: str = ""
    parameters: dict = field(default_factory=dict)

    @property
    def params(self):
        return regime_params(self.regime, self.lambda_qp)

    @property
    def n_eq(self):
        return self.densities[0] if self.densities else get_default_arg("n_eq")


def _require(condition, message, key):
    if not condition:
        raise UsageError(message, key=key)


def parse_invocation(argv, config_text=None):
    """
    Resolve command-line flags, a config file and defaults into an `Invocation`.

    Precedence: defaults < POLYSOUND_<NAME> environment variables < config file < flags.

    Args:
    - argv (list): Arguments without the program name.
    - config_text (str): Config contents. If None, read from --config or $POLYTROPE_SOUND_CONFIG.

    Returns:
    - Invocation: Validated invocation.

    Raises:
    - UsageError: Unknown flag or key, malformed or out-of-range value. `err.key` names it.
    """
    parser = build_parser()
    flags = vars(parser.parse_args(list(argv)))

    config = {}
    if config_text is not None:
        config = parse_config_text(config_text)
    else:
        path = flags.get("config") or os.environ.get(CONFIG_ENV_VAR)
        if path:
            config_text, config = _load_config(path)
    tokens = _config_tokens(config, parser)
    from_config = vars(parser.parse_args([flags["subcommand"]] + tokens))

    def resolve(key, default=None):
        if key in flags:
            return flags[key]
        elif key in from_config:
            return from_config[key]
        elif key in DEFAULT_ARGS:
            return get_default_arg(key)
        return default

    explicit_densities = "n_eq" in flags or "n_eq" in from_config
    values = {key: resolve(key) for key in config_keys(parser)}
    if not explicit_densities:
        values["n_eq"] = None

    regime_kind = values["regime"]
    nu, gamma, alpha = values["nu"], values["gamma"], values["alpha"]
    _require(nu is None or nu > 0, f"nu must be > 0 (got {nu!r})", "nu")
    if regime_kind == "bec":
        _require(nu is not None, "--regime=bec requires --nu", "nu")
        regime = Regime.bec(nu)
    elif regime_kind == "custom":
        _require(gamma is not None, "--regime=custom requires --gamma", "gamma")
        _require(alpha is not None, "--regime=custom requires --alpha", "alpha")
        _require(gamma > 1, f"gamma must be > 1 (got {gamma!r})", "gamma")
        _require(alpha > 0, f"alpha must be > 0 (got {alpha!r})", "alpha")
        regime = Regime.custom(gamma, alpha)
    else:
        regime = Regime.bcs()

    lambda_qp = values["lambda"]
    _require(lambda_qp >= 0, f"lambda must be >= 0 (got {lambda_qp!r})", "lambda")
    densities = values["n_eq"]
    if densities is not None:
        _require(len(densities) > 0, "n_eq must list at least one density", "n_eq")
        _require(all(n >= 0 for n in densities), f"n_eq must be >= 0 (got {densities!r})", "n_eq")
    n_min, n_max, n_points = values["n_min"], values["n_max"], values["n_points"]
    _require(n_min > 0, f"n_min must be > 0 (got {n_min!r})", "n_min")
    _require(n_max > n_min, f"n_max must exceed n_min (got {n_max!r})", "n_max")
    _require(n_points >= 1, f"n_points must be >= 1 (got {n_points!r})", "n_points")
    for key in ["k", "pulse_width"]:
        _require(values[key] > 0, f"{key} must be > 0 (got {values[key]!r})", key)
    _require(values["epsilon"] >= 0, f"epsilon must be >= 0 (got {values['epsilon']!r})", "epsilon")
    for key in ["steps", "points", "record_every"]:
        _require(values[key] > 0, f"{key} must be > 0 (got {values[key]!r})", key)
    for key in ["dt", "box_length"]:
        if values[key] is not None:
            _require(values[key] > 0, f"{key} must be > 0 (got {values[key]!r})", key)

    subcommand = flags["subcommand"]
    out = values["out"] or ("plot.svg" if subcommand == "plot" else f"{subcommand}.csv")
    parameters = {k: v for k, v in sorted(values.items()) if v is not None}
    parameters.update({"subcommand": subcommand, "out": out})

    return Invocation(
        subcommand=subcommand,
        regime=regime,
        geometry=TrapGeometry(values["geometry"]),
        lambda_qp=lambda_qp,
        densities=densities,
        n_min=n_min,
        n_max=n_max,
        n_points=n_points,
        k=values["k"],
        epsilon=values["epsilon"],
        dt=values["dt"],
        steps=values["steps"],
        points=values["points"],
        box_length=values["box_length"],
        width_mode=values["width_mode"],
        init=values["init"],
        pulse_width=values["pulse_width"],
        potential=values["potential"],
        record_every=values["record_every"],
        csv=values["csv"],
        x=values["x"],
        y=values["y"],
        log_x=bool(values["log_x"]),
        out=out,
        config_text=config_text or "",
        parameters=parameters,
    )


def _run_width(inv):
    densities = inv.densities or default_density_grid(inv.n_min, inv.n_max, inv.n_points)
    rows = []
    for n_eq in densities:
        solution = solve_width(inv.params, inv.geometry, float(n_eq))
        rows.append(
            {
                "n_eq": float(n_eq),
                "width": solution.width,
                "residual": solution.residual,
                "iterations": solution.iterations,
            }
        )
    return Table(inv.out).write(rows, "width")


def _run_sound(inv):
    densities = inv.densities or [get_default_arg("n_eq")]
    rows = sweep_sound_curve(inv.params, inv.geometry, densities)
    return Table(inv.out).write(rows, "sweep")


def _run_sweep(inv):
    densities = inv.densities or default_density_grid(inv.n_min, inv.n_max, inv.n_points)
    rows = sweep_sound_curve(inv.params, inv.geometry, densities)
    return Table(inv.out).write(rows, "sweep")


def _run_dispersion(inv):
    params = inv.params
    width = solve_width(params, inv.geometry, inv.n_eq).width
    c_s = sound_velocity(params, inv.geometry, inv.n_eq, width)
    ks = np.linspace(0.0, inv.k, inv.n_points)
    return Table(inv.out).write(dispersion_curve(c_s, params.lambda_qp, ks), "dispersion")


def _simulation_state(inv):
    if inv.init == "pulse":
        box = inv.box_length or get_default_arg("box_length")
        return hydrosim.init_gaussian_pulse(
            inv.n_eq, inv.epsilon, box / 2.0, inv.pulse_width, inv.points, box
        )
    box = inv.box_length or hydrosim.commensurate_box(inv.k, get_default_arg("box_length"))
    return hydrosim.init_standing_wave(inv.n_eq, inv.epsilon, inv.k, inv.points, box)


def _run_simulate(inv):
    params = inv.params
    state = _simulation_state(inv)
    potential = None
    if inv.potential:
        potential = hydrosim.load_potential_table(inv.potential, state.grid_length, state.points)
    dt = inv.dt or hydrosim.time_step_cap(state, params, inv.geometry)
    settings = hydrosim.SimSettings(
        dt=dt,
        steps=inv.steps,
        width_mode=inv.width_mode,
        record_every=inv.record_every,
        external_potential=potential,
    )
    series = hydrosim.integrate_run(state, params, inv.geometry, settings, probe_k=inv.k)
    return Table(inv.out).write(series.to_rows(), "simulate")


def _run_plot(inv):
    if not inv.csv:
        raise UsageError("plot requires --csv", key="csv")
    return render_svg_plot(
        inv.csv,
        inv.x or "n_eq",
        inv.y or DEFAULT_PLOT_COLUMNS,
        out_path=inv.out,
        log_x=inv.log_x,
    )


RUNNERS = {
    "width": _run_width,
    "sound": _run_sound,
    "sweep": _run_sweep,
    "dispersion": _run_dispersion,
    "simulate": _run_simulate,
    "plot": _run_plot,
}


def _report(err):
    key = getattr(err, "key", None)
    suffix = f" [{key}]" if key else ""
    print(f"polysound: {type(err).__name__}: {err}{suffix}", file=sys.stderr)


def run_command(inv):
    """
    Run an invocation and write its output plus `<out>.manifest.json`.

    Returns:
    - int: 0 success, 2 usage or domain error, 3 convergence failure, 4 simulation instability.
    """
    from polysound import __version__

    start = time.perf_counter()
    log(f"CLI - Running {inv.subcommand} with {inv.regime!r}, {inv.geometry.kind.value}")
    try:
        output = RUNNERS[inv.subcommand](inv)
    except PolysoundError as e:
        _report(e)
        return e.exit_code
    manifest = RunManifest(
        version=__version__,
        subcommand=inv.subcommand,
        parameters=inv.parameters,
        config_hash=config_hash(inv.config_text),
        outputs=[output],
        duration_seconds=time.perf_counter() - start,
    )
    manifest.write(RunManifest.path_for(output))
    return 0


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        inv = parse_invocation(argv)
    except PolysoundError as e:
        _report(e)
        return e.exit_code
    return run_command(inv)


if __name__ == "__main__":
    sys.exit(main())
