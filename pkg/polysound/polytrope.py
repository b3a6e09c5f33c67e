"""
Polytropic equation of state of a superfluid Fermi gas across the BCS-BEC crossover.

Units: trap units hbar = m = 1. With the default tight-trap frequency omega = 1 the
characteristic harmonic length is a = 1, linear (cigar) densities are in 1/a, areal
(disk) densities in 1/a^2 and velocities in omega*a.
"""

import math
from enum import Enum
from dataclasses import dataclass, field

import numpy as np

from polysound.exceptions import DomainError, ResonanceError


class Geometry(str, Enum):
    CIGAR = "cigar"
    DISK = "disk"


@dataclass(frozen=True)
class PolytropeParams:
    """
    Internal energy per particle (alpha/gamma) n^(gamma-1) plus a gradient correction of strength lambda_qp.
    """

    gamma: float
    alpha: float
    lambda_qp: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.gamma) or self.gamma <= 1:
            raise DomainError(f"gamma must be > 1 (got {self.gamma!r})")
        if not math.isfinite(self.alpha) or self.alpha <= 0:
            raise DomainError(f"alpha must be > 0 (got {self.alpha!r})")
        if not math.isfinite(self.lambda_qp) or self.lambda_qp < 0:
            raise DomainError(f"lambda_qp must be >= 0 (got {self.lambda_qp!r})")

    def to_dict(self):
        return {"gamma": self.gamma, "alpha": self.alpha, "lambda_qp": self.lambda_qp}


@dataclass(frozen=True)
class TrapGeometry:
    """
    Tight harmonic confinement: transverse plane for a cigar, axial direction for a disk.

    `char_length` defaults to omega_tight^(-1/2), the oscillator length in trap units.
    """

    kind: Geometry = Geometry.CIGAR
    omega_tight: float = 1.0
    char_length: float = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "kind", Geometry(self.kind))
        if not math.isfinite(self.omega_tight) or self.omega_tight <= 0:
            raise DomainError(f"omega_tight must be > 0 (got {self.omega_tight!r})")
        expected = self.omega_tight**-0.5
        if self.char_length is None:
            object.__setattr__(self, "char_length", expected)
        if self.char_length <= 0:
            raise DomainError(f"char_length must be > 0 (got {self.char_length!r})")
        if abs(self.char_length - expected) > 1e-12 * max(1.0, expected):
            raise DomainError(
                f"char_length={self.char_length!r} is inconsistent with "
                f"omega_tight={self.omega_tight!r} (expected {expected!r})"
            )

    @property
    def is_cigar(self):
        return self.kind == Geometry.CIGAR

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "omega_tight": self.omega_tight,
            "char_length": self.char_length,
        }


@dataclass(frozen=True)
class Regime:
    """
    Point of the crossover: the BCS limit, the BEC limit with coupling nu = a_s N, or a custom (gamma, alpha).

    Examples:
    - `Regime.bcs()`
    - `Regime.bec(nu=1.0)`
    - `Regime.custom(gamma=1.8, alpha=1.0)`
    """

    kind: str = "bcs"
    nu: float = None
    gamma: float = None
    alpha: float = None

    def __post_init__(self):
        kind = str(self.kind).lower()
        object.__setattr__(self, "kind", kind)
        if kind == "bec":
            if self.nu is None or not math.isfinite(self.nu) or self.nu <= 0:
                raise DomainError(f"BEC regime requires nu > 0 (got {self.nu!r})")
        elif kind == "custom":
            if self.gamma is None or self.alpha is None:
                raise DomainError("Custom regime requires both gamma and alpha")
            if not math.isfinite(self.gamma) or self.gamma <= 1:
                raise DomainError(f"Custom regime requires gamma > 1 (got {self.gamma!r})")
        elif kind != "bcs":
            raise DomainError(f"Unknown regime: {self.kind!r}")

    @classmethod
    def bcs(cls):
        return cls("bcs")

    @classmethod
    def bec(cls, nu):
        return cls("bec", nu=nu)

    @classmethod
    def custom(cls, gamma, alpha):
        return cls("custom", gamma=gamma, alpha=alpha)

    def __repr__(self):
        if self.kind == "bec":
            return f"Regime(BEC, nu={self.nu})"
        elif self.kind == "custom":
            return f"Regime(Custom, gamma={self.gamma}, alpha={self.alpha})"
        return "Regime(BCS)"


BCS_GAMMA = 5.0 / 3.0
BCS_ALPHA = 0.6 * 0.5 * (3.0 * math.pi**2) ** (2.0 / 3.0)
BEC_GAMMA = 2.0


def regime_params(regime, lambda_qp=1.0):
    """
    Polytropic parameters of a crossover regime in trap units.

    Args:
    - regime (Regime): The regime.
    - lambda_qp (float): Strength of the gradient correction.

    Returns:
    - PolytropeParams: BCS gives gamma=5/3, alpha=(3/5)(1/2)(3 pi^2)^(2/3);
      BEC gives gamma=2, alpha=4 pi nu; Custom echoes its values.
    """
    if regime.kind == "bcs":
        return PolytropeParams(BCS_GAMMA, BCS_ALPHA, lambda_qp)
    elif regime.kind == "bec":
        return PolytropeParams(BEC_GAMMA, 4.0 * math.pi * regime.nu, lambda_qp)
    return PolytropeParams(regime.gamma, regime.alpha, lambda_qp)


def _as_density(n, name="density"):
    n = np.asarray(n, dtype=float)
    if np.any(n < 0) or not np.all(np.isfinite(n)):
        raise DomainError(f"{name} must be finite and >= 0")
    return n


def _as_output(x):
    return float(x) if np.ndim(x) == 0 else x


def _positive_width(width, name):
    width = np.asarray(width, dtype=float)
    if np.any(width <= 0) or not np.all(np.isfinite(width)):
        raise DomainError(f"{name} must be > 0 (got {width!r})")
    return width


def energy_per_particle(params, n3d):
    """
    Bulk polytropic energy per particle (alpha/gamma) n^(gamma-1).

    Args:
    - params (PolytropeParams): The equation of state.
    - n3d (float | np.ndarray): 3D number density (>= 0).

    Returns:
    - float | np.ndarray: Energy per particle, 0 at zero density.
    """
    n3d = _as_density(n3d, "n3d")
    return _as_output(params.alpha / params.gamma * np.power(n3d, params.gamma - 1))


def cigar_effective_density(n1, sigma):
    return n1 / (math.pi * sigma**2)


def disk_effective_density(n1, eta):
    return n1 / (math.sqrt(math.pi) * eta)


def chemical_potential_cigar(params, n1, sigma):
    """
    Chemical potential of the cigar reduction, mu = (alpha/gamma) (n1 / (pi sigma^2))^(gamma-1).

    Args:
    - params (PolytropeParams): The equation of state.
    - n1 (float | np.ndarray): Linear density.
    - sigma (float | np.ndarray): Radial width (> 0).
    """
    n1 = _as_density(n1, "n1")
    sigma = _positive_width(sigma, "sigma")
    x = cigar_effective_density(n1, sigma)
    return _as_output(params.alpha / params.gamma * np.power(x, params.gamma - 1))


def chemical_potential_disk(params, n1, eta):
    """
    Chemical potential of the disk reduction, mu = (alpha/sqrt(gamma)) (n1 / (sqrt(pi) eta))^(gamma-1).

    Args:
    - params (PolytropeParams): The equation of state.
    - n1 (float | np.ndarray): Areal density.
    - eta (float | np.ndarray): Axial width (> 0).
    """
    n1 = _as_density(n1, "n1")
    eta = _positive_width(eta, "eta")
    x = disk_effective_density(n1, eta)
    return _as_output(params.alpha / math.sqrt(params.gamma) * np.power(x, params.gamma - 1))


def chemical_potential(params, geom, n1, width):
    """
    Geometry dispatch between `chemical_potential_cigar` and `chemical_potential_disk`.
    """
    if geom.is_cigar:
        return chemical_potential_cigar(params, n1, width)
    return chemical_potential_disk(params, n1, width)


def feshbach_scattering_length(a_bg, delta, B0, B):
    """
    Scattering length near a magnetic Feshbach resonance, a_s = a_bg (1 - delta / (B - B0)).

    Negative values (BCS side) are returned as they are.

    Raises:
    - ResonanceError: if B == B0 (divergent scattering length).
    """
    if B == B0:
        raise ResonanceError(f"B={B!r} sits on the resonance B0={B0!r}")
    return a_bg * (1.0 - delta / (B - B0))


def fermi_scales(n3d):
    """
    Fermi wave vector and velocity of a two-component gas of 3D density n3d.

    Returns:
    - tuple: (k_F, v_F) with k_F = (3 pi^2 n)^(1/3) and v_F = k_F in trap units.
    """
    if not math.isfinite(n3d) or n3d <= 0:
        raise DomainError(f"n3d must be > 0 (got {n3d!r})")
    k_F = (3.0 * math.pi**2 * n3d) ** (1.0 / 3.0)
    return k_F, k_F
