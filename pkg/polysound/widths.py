"""
Transverse (cigar) and axial (disk) widths of the Gaussian ansatz.

Both geometries reduce to the same algebraic constraint in the width u:

    f(u) = u^p - lambda a^4 u^(p-4) - C x = 0

with p = 2 gamma (cigar) or gamma + 1 (disk), x = n_eq^(gamma-1) (or the moment ratio
I_gamma / I_1 for the variational form) and C the geometry-dependent coefficient.
For lambda > 0, f < 0 below lambda^(1/4) a and f increases monotonically above it, so the
positive root is unique on [lambda^(1/4) a, inf).
"""

import math
import warnings
from enum import Enum
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.integrate import trapezoid

from polysound.config import WIDTH_XTOL, WIDTH_MAXITER
from polysound.exceptions import (
    DomainError,
    DegenerateInput,
    SubcriticalWidth,
    ConvergenceFailure,
)
from polysound.polytrope import Geometry
from polysound.utils import log


MAX_BRACKET_DOUBLINGS = 200


class Branch(str, Enum):
    FULL = "full"
    ASYMPTOTIC_3D = "asymptotic_3d"
    LOW_DIM_LIMIT = "low_dim_limit"


@dataclass(frozen=True)
class WidthSolution:
    width: float
    residual: float
    iterations: int
    branch: Branch = Branch.FULL

    def to_dict(self):
        return {
            "width": self.width,
            "residual": self.residual,
            "iterations": self.iterations,
            "branch": self.branch.value,
        }


@dataclass(frozen=True)
class DensityProfile:
    """
    Density sampled on a uniform grid.

    Args:
    - positions (np.ndarray): Strictly increasing, uniformly spaced coordinates.
    - values (np.ndarray): Densities (>= 0).
    - spacing (float): Grid step. Inferred from `positions` if None.
    """

    positions: np.ndarray
    values: np.ndarray
    spacing: float = None

    def __post_init__(self):
        positions = np.asarray(self.positions, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if positions.ndim != 1 or positions.shape != values.shape or positions.size < 2:
            raise DomainError("positions and values must be 1D arrays of equal length >= 2")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise DomainError("Profile densities must be finite and >= 0")
        steps = np.diff(positions)
        spacing = float(steps[0]) if self.spacing is None else float(self.spacing)
        if spacing <= 0 or np.any(steps <= 0):
            raise DomainError("Profile positions must be strictly increasing")
        atol = 1e-12 * max(1.0, float(np.max(np.abs(positions))))
        if np.any(np.abs(steps - spacing) > atol):
            raise DomainError(f"Profile grid is not uniform with spacing {spacing!r}")
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "spacing", spacing)


@dataclass(frozen=True)
class WidthConstraint:
    """
    The width constraint f(u) = u^lead - quantum u^(lead-4) - coefficient x of one geometry.
    """

    lead: float
    coefficient: float
    quantum: float

    @classmethod
    def of(cls, params, geom):
        gamma, alpha = params.gamma, params.alpha
        omega2 = geom.omega_tight**2
        if geom.kind == Geometry.CIGAR:
            lead = 2.0 * gamma
            coefficient = 2.0 * alpha * (gamma - 1) / (gamma**2 * math.pi ** (gamma - 1) * omega2)
        else:
            lead = gamma + 1.0
            coefficient = (
                2.0 * alpha * (gamma - 1)
                / (gamma**1.5 * math.pi ** ((gamma - 1) / 2.0) * omega2)
            )
        return cls(lead, coefficient, params.lambda_qp * geom.char_length**4)

    @property
    def lower(self):
        """Lower end of the physical branch, lambda^(1/4) a."""
        return self.quantum**0.25

    def residual(self, u, x):
        return u**self.lead - self.quantum * u ** (self.lead - 4) - self.coefficient * x

    def derivative(self, u):
        return self.lead * u ** (self.lead - 1) - (self.lead - 4) * self.quantum * u ** (
            self.lead - 5
        )

    def asymptote(self, x):
        """Root with the gradient term dropped."""
        return (self.coefficient * x) ** (1.0 / self.lead)

    def forcing(self, u):
        """Inverse map: the x for which u is the root."""
        return (u**self.lead - self.quantum * u ** (self.lead - 4)) / self.coefficient


def _check_density(n_eq, name="n_eq"):
    if n_eq is None or not math.isfinite(n_eq) or n_eq < 0:
        raise DomainError(f"{name} must be finite and >= 0 (got {n_eq!r})", n_eq=n_eq)


def _polish(constraint, u, x, lower):
    """
    Safeguarded Newton steps: accepted only while |f| decreases and u stays on the branch.
    """
    f = constraint.residual(u, x)
    steps = 0
    for _ in range(8):
        if f == 0:
            break
        candidate = u - f / constraint.derivative(u)
        if not candidate >= lower:
            break
        f_candidate = constraint.residual(candidate, x)
        if abs(f_candidate) >= abs(f):
            break
        u, f = candidate, f_candidate
        steps += 1
    return u, f, steps


def _solve(params, geom, x):
    """
    Root of the width constraint for forcing x >= 0.
    """
    constraint = WidthConstraint.of(params, geom)
    lower = constraint.lower

    if constraint.quantum == 0:
        if x == 0:
            raise DegenerateInput("No positive width exists for lambda_qp=0 at zero density")
        width = constraint.asymptote(x)
        return WidthSolution(width, constraint.residual(width, x), 0, Branch.ASYMPTOTIC_3D)

    if x == 0:
        return WidthSolution(lower, constraint.residual(lower, x), 0, Branch.LOW_DIM_LIMIT)

    upper = 2.0 * max(lower, constraint.asymptote(x))
    doublings = 0
    while constraint.residual(upper, x) <= 0:
        upper *= 2.0
        doublings += 1
        if doublings > MAX_BRACKET_DOUBLINGS:
            raise ConvergenceFailure(f"Could not bracket the width root (x={x!r})")

    try:
        root, info = optimize.brentq(
            constraint.residual,
            lower,
            upper,
            args=(x,),
            xtol=WIDTH_XTOL,
            maxiter=WIDTH_MAXITER,
            full_output=True,
            disp=False,
        )
    except (ValueError, RuntimeError) as e:
        raise ConvergenceFailure(f"Width root finding failed (x={x!r}): {e}") from e
    if not info.converged:
        raise ConvergenceFailure(
            f"Width root finding did not converge after {info.iterations} iterations (x={x!r})"
        )

    width, residual, steps = _polish(constraint, root, x, lower)
    return WidthSolution(width, residual, info.iterations + steps, Branch.FULL)


def cigar_width_residual(params, geom, sigma, n_eq):
    """
    Value of the cigar width constraint at sigma.

    Args:
    - params (PolytropeParams): The equation of state.
    - geom (TrapGeometry): Must be a cigar geometry.
    - sigma (float): Radial width (> 0).
    - n_eq (float): Linear density (>= 0).

    Returns:
    - float: sigma^(2 gamma) - lambda a^4 sigma^(2 gamma - 4) - C n_eq^(gamma - 1).
    """
    if geom.kind != Geometry.CIGAR:
        raise DomainError(f"cigar_width_residual requires a cigar geometry (got {geom.kind.value})")
    if not sigma > 0:
        raise DomainError(f"sigma must be > 0 (got {sigma!r})")
    _check_density(n_eq)
    constraint = WidthConstraint.of(params, geom)
    return constraint.residual(sigma, n_eq ** (params.gamma - 1))


def _solve_geometry(params, geom, n_eq, kind):
    if geom.kind != kind:
        raise DomainError(f"Expected a {kind.value} geometry (got {geom.kind.value})")
    _check_density(n_eq)
    try:
        return _solve(params, geom, n_eq ** (params.gamma - 1))
    except (DegenerateInput, ConvergenceFailure) as e:
        raise e.at_density(n_eq) from e


def solve_cigar_width(params, geom, n_eq):
    """
    Radial width sigma(n_eq) of the cigar configuration.

    Returns:
    - WidthSolution: `Branch.LOW_DIM_LIMIT` at zero density, `Branch.ASYMPTOTIC_3D` when lambda_qp = 0.

    Raises:
    - DegenerateInput: lambda_qp = 0 and n_eq = 0.
    - ConvergenceFailure: the root finder hit its iteration cap.
    """
    return _solve_geometry(params, geom, n_eq, Geometry.CIGAR)


def solve_disk_width(params, geom, n_eq):
    """
    Axial width eta(n_eq) of the disk configuration. Same contract as `solve_cigar_width`.
    """
    return _solve_geometry(params, geom, n_eq, Geometry.DISK)


def solve_width(params, geom, n_eq):
    if geom.kind == Geometry.CIGAR:
        return solve_cigar_width(params, geom, n_eq)
    return solve_disk_width(params, geom, n_eq)


def asymptotic_width_3d(params, geom, n_eq):
    """
    Large-density width with the gradient term dropped: sigma^(2 gamma) = C n^(gamma-1), eta^(gamma+1) = C n^(gamma-1).
    """
    if n_eq is None or not math.isfinite(n_eq) or n_eq <= 0:
        raise DomainError(f"n_eq must be > 0 for the 3D asymptote (got {n_eq!r})", n_eq=n_eq)
    return WidthConstraint.of(params, geom).asymptote(n_eq ** (params.gamma - 1))


def profile_moment_ratio(profile, gamma):
    """
    Ratio of the density moments I_gamma / I_1 of a sampled profile (composite trapezoid).

    Args:
    - profile (DensityProfile): The sampled density.
    - gamma (float): Polytropic index (> 1).

    Returns:
    - float: integral of n^gamma divided by integral of n.
    """
    if not gamma > 1:
        raise DomainError(f"gamma must be > 1 (got {gamma!r})")
    first = trapezoid(profile.values, dx=profile.spacing)
    if first == 0:
        raise DegenerateInput("Profile carries no particles (I_1 = 0)")
    return float(trapezoid(profile.values**gamma, dx=profile.spacing) / first)


def variational_width(params, geom, moment_ratio):
    """
    Width from the action-minimizing constraint, with n_eq^(gamma-1) replaced by I_gamma / I_1.

    Args:
    - params (PolytropeParams): The equation of state.
    - geom (TrapGeometry): Cigar or disk.
    - moment_ratio (float): I_gamma / I_1 (>= 0), see `profile_moment_ratio`.
    """
    if moment_ratio is None or not math.isfinite(moment_ratio) or moment_ratio < 0:
        raise DomainError(f"moment_ratio must be >= 0 (got {moment_ratio!r})")
    return _solve(params, geom, moment_ratio)


def reduced_energy(params, geom, width, n_eq):
    """
    Energy of the Gaussian ansatz per unit length (cigar) or area (disk), width derivatives neglected.

    Args:
    - params (PolytropeParams): The equation of state.
    - geom (TrapGeometry): Cigar or disk.
    - width (float | np.ndarray): sigma or eta (> 0).
    - n_eq (float): Linear or areal density (>= 0).

    Returns:
    - float | np.ndarray: Trap, interaction and gradient energy.
    """
    width = np.asarray(width, dtype=float)
    if np.any(width <= 0):
        raise DomainError("width must be > 0")
    _check_density(n_eq)
    gamma, alpha, lam = params.gamma, params.alpha, params.lambda_qp
    omega2 = geom.omega_tight**2
    if geom.kind == Geometry.CIGAR:
        energy = (
            n_eq * omega2 * width**2 / 2.0
            + alpha * n_eq**gamma / (gamma**2 * math.pi ** (gamma - 1) * width ** (2 * gamma - 2))
            + lam * n_eq / (2.0 * width**2)
        )
    else:
        energy = (
            n_eq * omega2 * width**2 / 4.0
            + alpha * n_eq**gamma
            / (gamma**1.5 * math.pi ** ((gamma - 1) / 2.0) * width ** (gamma - 1))
            + lam * n_eq / (4.0 * width**2)
        )
    return float(energy) if np.ndim(energy) == 0 else energy


def minimize_reduced_energy(params, geom, n_eq):
    """
    Width minimizing `reduced_energy` at fixed density, an independent route to `solve_width`.

    Returns:
    - WidthSolution: The minimizer with the constraint residual evaluated there.
    """
    _check_density(n_eq)
    if n_eq == 0:
        raise DegenerateInput("The reduced energy vanishes identically at zero density", n_eq=n_eq)
    constraint = WidthConstraint.of(params, geom)
    x = n_eq ** (params.gamma - 1)
    scale = max(constraint.lower, constraint.asymptote(x))
    res = optimize.minimize_scalar(
        lambda u: reduced_energy(params, geom, u, n_eq) / n_eq,
        bounds=(0.25 * scale, 4.0 * scale),
        method="bounded",
        options={"xatol": 1e-12 * scale, "maxiter": 500},
    )
    if not res.success:
        raise ConvergenceFailure(f"Energy minimization failed: {res.message}", n_eq=n_eq)
    width = float(res.x)
    return WidthSolution(width, constraint.residual(width, x), int(res.nfev), Branch.FULL)


def density_from_width(params, geom, width):
    """
    Closed-form inverse of the width constraint, n_eq(sigma) or n_eq(eta).

    Raises:
    - SubcriticalWidth: width^4 < lambda a^4, where no density produces that width.
    """
    if width is None or not math.isfinite(width) or width <= 0:
        raise DomainError(f"width must be > 0 (got {width!r})")
    constraint = WidthConstraint.of(params, geom)
    if width**4 < constraint.quantum:
        raise SubcriticalWidth(
            f"width={width!r} lies below lambda^(1/4) a = {constraint.lower!r}"
        )
    x = max(constraint.forcing(width), 0.0)
    return x ** (1.0 / (params.gamma - 1))


def solve_width_field(params, geom, n1, guess=None):
    """
    Widths for every density of an array, as used by the local adiabatic closure.

    Args:
    - params (PolytropeParams): The equation of state.
    - geom (TrapGeometry): Cigar or disk.
    - n1 (np.ndarray): Densities (>= 0).
    - guess (float | np.ndarray): Starting widths. Defaults to a point right of every root.

    Returns:
    - np.ndarray: The widths.
    """
    n1 = np.asarray(n1, dtype=float)
    if np.any(n1 < 0) or not np.all(np.isfinite(n1)):
        raise DomainError("Densities must be finite and >= 0")
    constraint = WidthConstraint.of(params, geom)
    x = n1 ** (params.gamma - 1)
    lower = constraint.lower
    if constraint.quantum == 0 and np.any(x == 0):
        raise DegenerateInput("No positive width exists for lambda_qp=0 at zero density")

    start = 2.0 * np.maximum(lower, constraint.asymptote(x))
    if guess is not None:
        start = np.maximum(np.broadcast_to(np.asarray(guess, dtype=float), x.shape), lower)
        start = np.where(start > 0, start, 2.0 * np.maximum(lower, constraint.asymptote(x)))

    start = np.atleast_1d(start).astype(float)
    try:
        with np.errstate(invalid="ignore", divide="ignore"), warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            widths, converged, _ = optimize.newton(
                constraint.residual,
                start,
                fprime=lambda u, x: constraint.derivative(u),
                args=(np.atleast_1d(x),),
                tol=1e-12,
                maxiter=WIDTH_MAXITER,
                full_output=True,
                disp=False,
            )
        widths = np.array(widths, dtype=float)
        bad = ~np.asarray(converged, dtype=bool) | ~np.isfinite(widths) | (widths < lower)
    except RuntimeError:
        widths = start.copy()
        bad = np.ones(start.shape, dtype=bool)
    widths = widths.reshape(x.shape)
    bad = bad.reshape(x.shape)
    # Points where the array iteration wandered off the branch are re-solved one by one
    if np.any(bad):
        log(f"Widths - Re-solving {int(np.sum(bad))} point(s) with the bracketed solver")
        for i in np.flatnonzero(bad):
            try:
                widths.flat[i] = _solve(params, geom, float(x.flat[i])).width
            except ConvergenceFailure as e:
                raise e.at_density(float(n1.flat[i])) from e
    return widths
