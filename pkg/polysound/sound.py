"""
Sound velocities of the uniform, cigar and disk configurations and the gradient-corrected dispersion.
"""

import math
from dataclasses import dataclass, asdict
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from polysound.exceptions import DomainError, SubcriticalWidth, PolysoundError
from polysound.polytrope import Geometry, fermi_scales
from polysound.utils import log, get_default_arg
from polysound.widths import solve_width, asymptotic_width_3d


@dataclass(frozen=True)
class SweepRow:
    """
    One density of a sound-velocity sweep.

    - cs_numeric: velocity at the solved width.
    - cs_lowdim: width frozen at the harmonic length (1D / 2D regime).
    - cs_3d: width from the large-density asymptote (3D regime).
    """

    n_eq: float
    width: float
    cs_numeric: float
    cs_lowdim: float
    cs_3d: float

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class DispersionPoint:
    k: float
    omega: float
    free_particle: bool = False

    def to_dict(self):
        return {"k": self.k, "omega": self.omega}


def _check_nonnegative(value, name):
    if value is None or not math.isfinite(value) or value < 0:
        raise DomainError(f"{name} must be finite and >= 0 (got {value!r})")


def _check_positive(value, name):
    if value is None or not math.isfinite(value) or value <= 0:
        raise DomainError(f"{name} must be > 0 (got {value!r})")


def sound_uniform_3d(params, n3d):
    """
    Sound velocity of the uniform 3D gas, c_s = sqrt(alpha (gamma-1) n^(gamma-1)).
    """
    _check_nonnegative(n3d, "n3d")
    return math.sqrt(params.alpha * (params.gamma - 1) * n3d ** (params.gamma - 1))


def sound_cigar(params, n_eq, sigma):
    """
    Sound velocity along a cigar of radial width sigma.

    Args:
    - params (PolytropeParams): The equation of state.
    - n_eq (float): Equilibrium linear density (>= 0).
    - sigma (float): Radial width (> 0).

    Returns:
    - float: sqrt(alpha (gamma-1) / gamma) (n_eq / (pi sigma^2))^((gamma-1)/2).
    """
    _check_nonnegative(n_eq, "n_eq")
    _check_positive(sigma, "sigma")
    gamma = params.gamma
    prefactor = math.sqrt(params.alpha * (gamma - 1) / gamma)
    return prefactor * (n_eq / (math.pi * sigma**2)) ** ((gamma - 1) / 2.0)


def sound_disk(params, n_eq, eta):
    """
    Sound velocity in the plane of a disk of axial width eta.

    Returns:
    - float: sqrt(alpha (gamma-1) / sqrt(gamma)) (n_eq / (sqrt(pi) eta))^((gamma-1)/2).
    """
    _check_nonnegative(n_eq, "n_eq")
    _check_positive(eta, "eta")
    gamma = params.gamma
    prefactor = math.sqrt(params.alpha * (gamma - 1) / math.sqrt(gamma))
    return prefactor * (n_eq / (math.sqrt(math.pi) * eta)) ** ((gamma - 1) / 2.0)


def sound_velocity(params, geom, n_eq, width):
    if geom.kind == Geometry.CIGAR:
        return sound_cigar(params, n_eq, width)
    return sound_disk(params, n_eq, width)


def sound_from_width(geom, gamma, lambda_qp, width):
    """
    Sound velocity from the measured width alone, c_s = omega sqrt(gamma (w^4 - lambda a^4) / (2 w^2)).

    Args:
    - geom (TrapGeometry): Supplies omega_tight and the harmonic length a.
    - gamma (float): Polytropic index.
    - lambda_qp (float): Gradient-correction strength.
    - width (float): sigma (cigar) or eta (disk).

    Raises:
    - SubcriticalWidth: width^4 < lambda a^4.
    """
    _check_positive(width, "width")
    quantum = lambda_qp * geom.char_length**4
    excess = width**4 - quantum
    if excess < 0:
        # Rounding of a root sitting on lambda^(1/4) a
        if excess >= -4 * np.finfo(float).eps * quantum:
            excess = 0.0
        else:
            raise SubcriticalWidth(
                f"width={width!r} lies below lambda^(1/4) a = {quantum**0.25!r}"
            )
    return geom.omega_tight * math.sqrt(gamma * excess / (2.0 * width**2))


def dispersion_omega(c_s, lambda_qp, k):
    """
    Gradient-corrected dispersion omega = c_s k sqrt(1 + lambda k^2 / (4 c_s^2)).

    With c_s = 0 and lambda > 0 the free-particle branch sqrt(lambda) k^2 / 2 is returned.
    """
    return dispersion_point(c_s, lambda_qp, k).omega


def dispersion_point(c_s, lambda_qp, k):
    """
    Evaluate the dispersion relation at one wave number.

    Returns:
    - DispersionPoint: `free_particle` is True when c_s = 0 and the k^2 branch was used.
    """
    _check_nonnegative(c_s, "c_s")
    _check_nonnegative(lambda_qp, "lambda_qp")
    _check_nonnegative(k, "k")
    if c_s == 0:
        if lambda_qp == 0:
            raise DomainError("c_s=0 with lambda_qp=0 has no dispersion")
        log(f"Sound - c_s=0, using the free-particle branch at k={k}")
        return DispersionPoint(k, math.sqrt(lambda_qp) * k**2 / 2.0, free_particle=True)
    omega = math.sqrt(c_s**2 * k**2 + lambda_qp * k**4 / 4.0)
    return DispersionPoint(k, omega)


def dispersion_curve(c_s, lambda_qp, ks):
    """
    Dispersion points over a grid of wave numbers.
    """
    return [dispersion_point(c_s, lambda_qp, float(k)) for k in ks]


def default_density_grid(n_min=None, n_max=None, n_points=None):
    """
    Log-spaced density grid, 200 points in [1e-4, 1e4] unless overridden.

    Returns:
    - np.ndarray: Strictly increasing densities.
    """
    n_min = get_default_arg("n_min") if n_min is None else n_min
    n_max = get_default_arg("n_max") if n_max is None else n_max
    n_points = get_default_arg("n_points") if n_points is None else n_points
    _check_positive(n_min, "n_min")
    _check_positive(n_max, "n_max")
    if int(n_points) != n_points or n_points < 1:
        raise DomainError(f"n_points must be a positive integer (got {n_points!r})")
    if n_points > 1 and n_max <= n_min:
        raise DomainError(f"n_max={n_max!r} must exceed n_min={n_min!r}")
    return np.geomspace(n_min, n_max, int(n_points))


def sound_over_fermi_velocity(params, n3d):
    """
    Ratio c_s / v_F of the uniform gas (1/sqrt(5) for the BCS limit).
    """
    _, v_F = fermi_scales(n3d)
    return sound_uniform_3d(params, n3d) / v_F


def _sweep_row(params, geom, n_eq):
    width = solve_width(params, geom, n_eq).width
    return SweepRow(
        n_eq=n_eq,
        width=width,
        cs_numeric=sound_velocity(params, geom, n_eq, width),
        cs_lowdim=sound_velocity(params, geom, n_eq, geom.char_length),
        cs_3d=sound_velocity(params, geom, n_eq, asymptotic_width_3d(params, geom, n_eq)),
    )


def sweep_sound_curve(params, geom, densities, errors="raise", max_workers=None):
    """
    Sound velocity curves over a density grid.

    Args:
    - params (PolytropeParams): The equation of state.
    - geom (TrapGeometry): Cigar or disk.
    - densities (list): Strictly increasing densities (> 0).
    - errors (str): "raise" (default) re-raises with the offending density attached;
      "ignore" logs and skips failing points.
    - max_workers (int): Thread pool size.

    Returns:
    - list: SweepRow per density, in input order.
    """
    densities = [float(n) for n in densities]
    if not densities:
        return []
    array = np.asarray(densities)
    if np.any(~np.isfinite(array)) or np.any(array <= 0):
        raise DomainError("Densities must be finite and > 0")
    if np.any(np.diff(array) <= 0):
        raise DomainError("Densities must be strictly increasing")

    def compute(n_eq):
        try:
            return _sweep_row(params, geom, n_eq)
        except PolysoundError as e:
            if errors == "raise":
                if e.n_eq is not None:
                    raise
                raise e.at_density(n_eq) from e
            log(f"Sound - Skipping n_eq={n_eq}: {e}")
            return None

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        rows = list(executor.map(compute, densities))
    return [row for row in rows if row is not None]
