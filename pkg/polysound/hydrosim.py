"""
Method-of-lines integrator for the reduced superfluid hydrodynamic equations on a periodic line.

    dn/dt = -d/dz (n v)
    dv/dt = -d/dz (v^2/2 + V + mu(n, width)) + lambda n'''/(4n) - lambda n' n''/(2n^2) + lambda n'^3/(4n^3)

Spatial derivatives use 4th-order central stencils, time stepping is classic RK4. The disk
geometry runs with planar symmetry, i.e. the same 1D equations with the disk chemical potential.
"""

import math
from enum import Enum
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import curve_fit

from polysound.exceptions import (
    DomainError,
    UsageError,
    CFLViolation,
    InsufficientData,
    InvalidWindow,
    SimulationInstability,
    DensityFloorViolation,
)
from polysound.polytrope import chemical_potential
from polysound.sound import sound_velocity
from polysound.utils import log
from polysound.widths import solve_width, solve_width_field


CFL_SAFETY = 0.2
BLOWUP_FACTOR = 10.0
# Pulse tails must be this small at the box edges
EDGE_TAIL = 1e-12


class WidthMode(str, Enum):
    FROZEN = "frozen"
    LOCAL = "local"


@dataclass
class HydroState:
    """
    Density and velocity sampled at z_j = j * dz, j = 0 .. points-1, on the periodic box [0, grid_length).

    `n_ref` is the equilibrium background density (defaults to the mean density).
    """

    grid_length: float
    points: int
    n1: np.ndarray
    v: np.ndarray
    time: float = 0.0
    n_ref: float = None

    def __post_init__(self):
        if not math.isfinite(self.grid_length) or self.grid_length <= 0:
            raise DomainError(f"grid_length must be > 0 (got {self.grid_length!r})")
        if int(self.points) != self.points or self.points < 7:
            raise DomainError(f"points must be an integer >= 7 (got {self.points!r})")
        self.points = int(self.points)
        self.n1 = np.asarray(self.n1, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if self.n1.shape != (self.points,) or self.v.shape != (self.points,):
            raise DomainError(f"n1 and v must both have shape ({self.points},)")
        if self.n_ref is None:
            self.n_ref = float(np.mean(self.n1))

    @property
    def dz(self):
        return self.grid_length / self.points

    @property
    def positions(self):
        return np.arange(self.points) * self.dz

    @property
    def mass(self):
        return float(np.sum(self.n1) * self.dz)

    def copy(self):
        return HydroState(
            self.grid_length, self.points, self.n1.copy(), self.v.copy(), self.time, self.n_ref
        )


@dataclass(frozen=True)
class SimSettings:
    dt: float
    steps: int
    width_mode: WidthMode = WidthMode.FROZEN
    record_every: int = 10
    external_potential: np.ndarray = None
    window_start: float = None

    def __post_init__(self):
        object.__setattr__(self, "width_mode", WidthMode(self.width_mode))
        if not math.isfinite(self.dt) or self.dt <= 0:
            raise UsageError(f"dt must be > 0 (got {self.dt!r})", key="dt")
        if int(self.steps) != self.steps or self.steps <= 0:
            raise UsageError(f"steps must be a positive integer (got {self.steps!r})", key="steps")
        if int(self.record_every) != self.record_every or self.record_every <= 0:
            raise UsageError(
                f"record_every must be a positive integer (got {self.record_every!r})",
                key="record_every",
            )
        object.__setattr__(self, "steps", int(self.steps))
        object.__setattr__(self, "record_every", int(self.record_every))


@dataclass
class ProbeSeries:
    times: np.ndarray
    mass: np.ndarray
    mode_amplitude: np.ndarray
    peak_position: np.ndarray
    final_state: HydroState = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.mass = np.asarray(self.mass, dtype=float)
        self.mode_amplitude = np.asarray(self.mode_amplitude, dtype=complex)
        self.peak_position = np.asarray(self.peak_position, dtype=float)
        lengths = {len(self.times), len(self.mass), len(self.mode_amplitude), len(self.peak_position)}
        if len(lengths) != 1:
            raise DomainError("Probe series must all have the same length")

    def __len__(self):
        return len(self.times)

    def to_rows(self):
        return [
            {
                "t": float(t),
                "mass": float(m),
                "mode_re": float(a.real),
                "mode_im": float(a.imag),
                "peak_z": float(z),
            }
            for t, m, a, z in zip(self.times, self.mass, self.mode_amplitude, self.peak_position)
        ]


@dataclass(frozen=True)
class ModeFit:
    omega: float
    amplitude: float
    phase: float
    residual: float


# Periodic 4th-order central differences


def d1(f, dz):
    return (8.0 * (np.roll(f, -1) - np.roll(f, 1)) - (np.roll(f, -2) - np.roll(f, 2))) / (12.0 * dz)


def d2(f, dz):
    return (
        16.0 * (np.roll(f, -1) + np.roll(f, 1)) - (np.roll(f, -2) + np.roll(f, 2)) - 30.0 * f
    ) / (12.0 * dz**2)


def d3(f, dz):
    return (
        -(np.roll(f, -3) - np.roll(f, 3))
        + 8.0 * (np.roll(f, -2) - np.roll(f, 2))
        - 13.0 * (np.roll(f, -1) - np.roll(f, 1))
    ) / (8.0 * dz**3)


def _check_density_floor(n):
    if not np.all(np.isfinite(n)):
        raise SimulationInstability("Non-finite density encountered")
    if np.any(n <= 0):
        j = int(np.argmin(n))
        raise DensityFloorViolation(f"Nonpositive density n1={n[j]!r} at grid point {j}")


def gradient_force(n, dz, lambda_qp):
    """
    Quantum-pressure force as three explicit terms, lambda n'''/(4n) - lambda n' n''/(2n^2) + lambda n'^3/(4n^3).
    """
    n = np.asarray(n, dtype=float)
    _check_density_floor(n)
    n_1, n_2, n_3 = d1(n, dz), d2(n, dz), d3(n, dz)
    return lambda_qp * (n_3 / (4.0 * n) - n_1 * n_2 / (2.0 * n**2) + n_1**3 / (4.0 * n**3))


def bohm_force(n, dz, lambda_qp):
    """
    Quantum-pressure force in Bohm form, (lambda/2) d/dz [ (d^2 sqrt(n) / dz^2) / sqrt(n) ].

    Args:
    - n (np.ndarray): Periodic density samples (> 0).
    - dz (float): Grid spacing.
    - lambda_qp (float): Gradient-correction strength.

    Returns:
    - np.ndarray: The force per grid point.
    """
    n = np.asarray(n, dtype=float)
    _check_density_floor(n)
    root = np.sqrt(n)
    return 0.5 * lambda_qp * d1(d2(root, dz) / root, dz)


class _WidthClosure:
    """
    Width entering the chemical potential: frozen at the reference density or re-solved pointwise.
    """

    def __init__(self, params, geom, width_mode, n_ref):
        self.params = params
        self.geom = geom
        self.width_mode = WidthMode(width_mode)
        self.frozen = solve_width(params, geom, n_ref).width

    def __call__(self, n):
        if self.width_mode == WidthMode.FROZEN:
            return self.frozen
        return solve_width_field(self.params, self.geom, n)


def _potential(settings, points):
    if settings.external_potential is None:
        return None
    potential = np.asarray(settings.external_potential, dtype=float)
    if potential.shape != (points,):
        raise UsageError(
            f"external_potential must have {points} samples (got {potential.shape})",
            key="potential",
        )
    return potential


def _rhs(n, v, dz, params, geom, closure, potential):
    _check_density_floor(n)
    dn = -d1(n * v, dz)
    head = 0.5 * v**2 + chemical_potential(params, geom, n, closure(n))
    if potential is not None:
        head = head + potential
    dv = -d1(head, dz) + gradient_force(n, dz, params.lambda_qp)
    return dn, dv


def rhs_eval(state, params, geom, settings, n_eq_ref=None):
    """
    Time derivatives of density and velocity.

    Args:
    - state (HydroState): The current fields.
    - params (PolytropeParams): The equation of state.
    - geom (TrapGeometry): Cigar or disk (planar mode).
    - settings (SimSettings): Width closure and external potential.
    - n_eq_ref (float): Density at which the frozen width is evaluated. Defaults to `state.n_ref`.

    Returns:
    - tuple: (dn1/dt, dv/dt) arrays.
    """
    n_ref = state.n_ref if n_eq_ref is None else n_eq_ref
    closure = _WidthClosure(params, geom, settings.width_mode, n_ref)
    return _rhs(
        state.n1, state.v, state.dz, params, geom, closure, _potential(settings, state.points)
    )


def cfl_cap(dx, lambda_qp, c_max):
    """
    Largest stable time step, 0.2 min(dx / c_max, 2 dx^2 / sqrt(lambda)).
    """
    if not dx > 0:
        raise DomainError(f"dx must be > 0 (got {dx!r})")
    limits = []
    if c_max > 0:
        limits.append(dx / c_max)
    if lambda_qp > 0:
        limits.append(2.0 * dx**2 / math.sqrt(lambda_qp))
    if not limits:
        raise DomainError("No signal speed: c_max=0 and lambda_qp=0")
    return CFL_SAFETY * min(limits)


def time_step_cap(state, params, geom, width=None):
    """
    `cfl_cap` for a state, with c_max the sound velocity at the densest point plus the largest flow speed.

    Args:
    - width (float): Width used for the sound velocity. Defaults to the width at `state.n_ref`.
    """
    if width is None:
        width = solve_width(params, geom, state.n_ref).width
    c_max = sound_velocity(params, geom, float(np.max(state.n1)), width)
    c_max += float(np.max(np.abs(state.v)))
    return cfl_cap(state.dz, params.lambda_qp, c_max)


def _check_epsilon(epsilon, upper=None):
    if epsilon is None or not math.isfinite(epsilon) or epsilon < 0:
        raise DomainError(f"epsilon must be >= 0 (got {epsilon!r})")
    if upper is not None and epsilon > upper:
        raise DomainError(f"epsilon must be <= {upper} (got {epsilon!r})")


def init_standing_wave(n_eq, epsilon, k, points, grid_length):
    """
    Standing wave n1 = n_eq (1 + epsilon cos(k z)), v = 0.

    Raises:
    - DomainError: k L / 2 pi is not an integer, or epsilon outside [0, 1e-2].
    """
    if not n_eq > 0:
        raise DomainError(f"n_eq must be > 0 (got {n_eq!r})")
    _check_epsilon(epsilon, upper=1e-2)
    if not k > 0:
        raise DomainError(f"k must be > 0 (got {k!r})")
    periods = k * grid_length / (2.0 * math.pi)
    if round(periods) < 1 or abs(periods - round(periods)) > 1e-9 * max(1.0, periods):
        raise DomainError(
            f"k={k!r} is not commensurate with the box L={grid_length!r} "
            f"(k L / 2 pi = {periods!r})"
        )
    z = np.arange(points) * (grid_length / points)
    n1 = n_eq * (1.0 + epsilon * np.cos(k * z))
    return HydroState(grid_length, points, n1, np.zeros(points), 0.0, n_eq)


def init_gaussian_pulse(n_eq, epsilon, z0, w, points, grid_length):
    """
    Gaussian pulse n1 = n_eq (1 + epsilon exp(-(z - z0)^2 / w^2)), v = 0.

    Raises:
    - DomainError: w < 5 dz, or the pulse tail at the nearest box edge is not below 1e-12.
    """
    if not n_eq > 0:
        raise DomainError(f"n_eq must be > 0 (got {n_eq!r})")
    _check_epsilon(epsilon)
    dz = grid_length / points
    if not w >= 5.0 * dz:
        raise DomainError(f"Pulse width w={w!r} is under-resolved (needs >= 5 dz = {5 * dz!r})")
    edge = min(z0, grid_length - z0)
    if edge <= 0 or math.exp(-(edge**2) / w**2) >= EDGE_TAIL:
        raise DomainError(f"Pulse at z0={z0!r} with w={w!r} touches the box edges")
    z = np.arange(points) * dz
    n1 = n_eq * (1.0 + epsilon * np.exp(-((z - z0) ** 2) / w**2))
    return HydroState(grid_length, points, n1, np.zeros(points), 0.0, n_eq)


def commensurate_box(k, min_length):
    """
    Box length holding a whole number (>= 1) of wavelengths 2 pi / k, as close as possible to min_length.
    """
    if not k > 0:
        raise DomainError(f"k must be > 0 (got {k!r})")
    wavelength = 2.0 * math.pi / k
    return max(1, round(min_length / wavelength)) * wavelength


def load_potential_table(path, grid_length, points):
    """
    Read a two-column (position, value) text table and interpolate it periodically onto the grid.

    Returns:
    - np.ndarray: V(z_j) for the `points` grid positions.
    """
    try:
        table = np.loadtxt(path, comments="#", ndmin=2)
    except OSError as e:
        raise UsageError(f"Cannot read potential table {path}: {e}", key="potential") from e
    except ValueError as e:
        raise UsageError(f"Malformed potential table {path}: {e}", key="potential") from e
    if table.shape[1] != 2 or table.shape[0] < 2:
        raise UsageError(
            f"Potential table {path} must have two columns and at least two rows",
            key="potential",
        )
    order = np.argsort(table[:, 0])
    z = np.arange(points) * (grid_length / points)
    return np.interp(z, table[order, 0], table[order, 1], period=grid_length)


class _Probes:
    def __init__(self, state, probe_k, window_start):
        self.dz = state.dz
        self.z = state.positions
        self.n_ref = state.n_ref
        self.phase = np.exp(-1j * probe_k * self.z)
        self.start = state.grid_length / 2.0 if window_start is None else window_start
        stop = self.start + state.grid_length / 2.0
        self.window = (self.z > self.start) & (self.z < stop)

    def mode(self, n):
        return complex(np.mean(n * self.phase))

    def peak(self, n):
        excess = (n - self.n_ref)[self.window]
        weight = float(np.sum(excess))
        if abs(weight) <= 1e-12 * self.n_ref * max(1, excess.size):
            return self.start
        return float(np.sum(self.z[self.window] * excess) / weight)


def integrate_run(state, params, geom, settings, probe_k=None):
    """
    Integrate the hydrodynamic equations with RK4 and record probes every `record_every` steps.

    Args:
    - state (HydroState): Initial fields (not modified).
    - params (PolytropeParams): The equation of state.
    - geom (TrapGeometry): Cigar or disk (planar mode).
    - settings (SimSettings): Time step, step count, width closure, potential, probe window.
    - probe_k (float): Wave number of the Fourier probe. Defaults to 2 pi / L.

    Returns:
    - ProbeSeries: Probes at t0, t0 + record_every dt, ...; `final_state` holds the last fields.

    Raises:
    - CFLViolation: dt above `time_step_cap` (checked before stepping).
    - SimulationInstability: non-finite fields or 10x growth of mass or mode amplitude.
    """
    closure = _WidthClosure(params, geom, settings.width_mode, state.n_ref)
    cap = time_step_cap(state, params, geom, closure.frozen)
    if settings.dt > cap * (1 + 1e-12):
        raise CFLViolation(f"dt={settings.dt!r} exceeds the CFL cap {cap!r}", key="dt")

    potential = _potential(settings, state.points)
    probe_k = 2.0 * math.pi / state.grid_length if probe_k is None else probe_k
    probes = _Probes(state, probe_k, settings.window_start)
    dz, dt = state.dz, settings.dt
    n, v = state.n1.copy(), state.v.copy()

    def f(n, v):
        return _rhs(n, v, dz, params, geom, closure, potential)

    times, mass, modes, peaks = [], [], [], []

    def record(step):
        times.append(state.time + step * dt)
        mass.append(float(np.sum(n) * dz))
        modes.append(probes.mode(n))
        peaks.append(probes.peak(n))

    record(0)
    mass_limit = BLOWUP_FACTOR * abs(mass[0])
    mode_limit = BLOWUP_FACTOR * max(abs(modes[0]), 1e-12 * state.n_ref)
    log(
        f"HydroSim - Starting run: {state.points} points, L={state.grid_length}, "
        f"dt={dt}, steps={settings.steps}, width_mode={settings.width_mode.value}"
    )

    for step in range(1, settings.steps + 1):
        k1n, k1v = f(n, v)
        k2n, k2v = f(n + 0.5 * dt * k1n, v + 0.5 * dt * k1v)
        k3n, k3v = f(n + 0.5 * dt * k2n, v + 0.5 * dt * k2v)
        k4n, k4v = f(n + dt * k3n, v + dt * k3v)
        n = n + dt / 6.0 * (k1n + 2.0 * k2n + 2.0 * k3n + k4n)
        v = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)

        if step % settings.record_every == 0:
            if not (np.all(np.isfinite(n)) and np.all(np.isfinite(v))):
                raise SimulationInstability(f"Non-finite fields at step {step}")
            record(step)
            if abs(mass[-1]) > mass_limit or abs(modes[-1]) > mode_limit:
                raise SimulationInstability(
                    f"Blow-up at step {step}: mass={mass[-1]!r}, |mode|={abs(modes[-1])!r}"
                )

    final = HydroState(
        state.grid_length, state.points, n, v, state.time + settings.steps * dt, state.n_ref
    )
    drift = abs(final.mass - mass[0]) / abs(mass[0])
    log(f"HydroSim - Finished run at t={final.time:.6g}, relative mass drift {drift:.3e}")
    return ProbeSeries(times, mass, modes, peaks, final_state=final)


def _mode_signal(series):
    times = np.asarray(series.times, dtype=float)
    signal = np.real(np.asarray(series.mode_amplitude))
    if times.size < 4:
        raise InsufficientData(f"Need at least 4 samples (got {times.size})")
    scale = max(1.0, float(np.max(np.abs(signal))))
    if float(np.ptp(signal)) <= 1e-14 * scale:
        raise InsufficientData("Mode amplitude is constant")
    return times, signal


def _guess_frequency(times, signal):
    """
    Peak of the zero-padded spectrum of the uniformly sampled signal.
    """
    dt = float(np.mean(np.diff(times)))
    centred = signal - np.mean(signal)
    size = 8 * len(centred)
    spectrum = np.abs(np.fft.rfft(centred, n=size))
    spectrum[0] = 0.0
    return 2.0 * math.pi * np.fft.rfftfreq(size, d=dt)[int(np.argmax(spectrum))]


def fit_mode(series):
    """
    Least-squares fit of the real mode amplitude to A cos(omega t + phi).

    Returns:
    - ModeFit: omega (> 0), amplitude, phase and the RMS fit residual.

    Raises:
    - InsufficientData: constant series, or fewer than 3 oscillation periods.
    """
    times, signal = _mode_signal(series)
    omega0 = _guess_frequency(times, signal)
    span = times[-1] - times[0]
    if omega0 <= 0 or omega0 * span / (2.0 * math.pi) < 3.0:
        raise InsufficientData(
            f"Series spans fewer than 3 periods (span={span!r}, omega~{omega0!r})"
        )

    # Linear least squares at the guessed frequency seeds amplitude and phase
    basis = np.column_stack([np.cos(omega0 * times), np.sin(omega0 * times)])
    (a, b), *_ = np.linalg.lstsq(basis, signal, rcond=None)
    p0 = [math.hypot(a, b), omega0, math.atan2(-b, a)]

    def model(t, amplitude, omega, phase):
        return amplitude * np.cos(omega * t + phase)

    try:
        popt, _ = curve_fit(model, times, signal, p0=p0, maxfev=10000)
    except RuntimeError as e:
        raise InsufficientData(f"Mode fit did not converge: {e}") from e
    amplitude, omega, phase = (float(p) for p in popt)
    if omega < 0:
        omega, phase = -omega, -phase
    if amplitude < 0:
        amplitude, phase = -amplitude, phase + math.pi
    phase = math.remainder(phase, 2.0 * math.pi)
    residual = float(np.sqrt(np.mean((model(times, *popt) - signal) ** 2)))

    span_periods = omega * span / (2.0 * math.pi)
    if span_periods < 3.0:
        raise InsufficientData(f"Series spans {span_periods:.2f} periods, need >= 3")
    return ModeFit(omega, amplitude, phase, residual)


def measure_mode_frequency(series):
    return fit_mode(series).omega


def measure_pulse_speed(series, t_min=None):
    """
    Speed of the right-moving pulse: slope of a linear fit of the probed position against time.

    Args:
    - series (ProbeSeries): Probes of a pulse run.
    - t_min (float): Start of the fit window. Defaults to one third into the run.

    Raises:
    - InsufficientData: fewer than 2 samples in the window.
    - InvalidWindow: the trajectory is not monotone (pulse wrapped or reflected).
    """
    times = np.asarray(series.times, dtype=float)
    peaks = np.asarray(series.peak_position, dtype=float)
    if times.size == 0:
        raise InsufficientData("Empty probe series")
    if t_min is None:
        t_min = times[0] + (times[-1] - times[0]) / 3.0
    mask = times >= t_min
    if np.sum(mask) < 2:
        raise InsufficientData(f"Fewer than 2 samples after t_min={t_min!r}")
    t, z = times[mask], peaks[mask]
    steps = np.diff(z)
    tolerance = 1e-9 * max(1.0, float(np.max(np.abs(z))))
    if not (np.all(steps >= -tolerance) or np.all(steps <= tolerance)):
        raise InvalidWindow("Pulse trajectory is not monotone over the fit window")
    slope, _ = np.polyfit(t, z, 1)
    return float(slope)
