import math

import numpy as np
import pytest

from polysound.exceptions import DomainError, ResonanceError
from polysound.polytrope import (
    Geometry,
    PolytropeParams,
    TrapGeometry,
    Regime,
    regime_params,
    energy_per_particle,
    chemical_potential_cigar,
    chemical_potential_disk,
    chemical_potential,
    feshbach_scattering_length,
    fermi_scales,
)


BEC = PolytropeParams(2.0, 4 * math.pi, 1.0)
BCS = regime_params(Regime.bcs(), 1.0)


def test_regime_params():
    success = {}
    success[0] = math.isclose(BCS.gamma, 5 / 3, rel_tol=1e-15)
    success[1] = math.isclose(BCS.alpha, 2.8712340, rel_tol=1e-7)
    bec = regime_params(Regime.bec(nu=1.0), 1.0)
    success[2] = bec.gamma == 2.0
    success[3] = math.isclose(bec.alpha, 12.56637, rel_tol=1e-6)
    custom = regime_params(Regime.custom(gamma=1.8, alpha=1.0), 0.0)
    success[4] = (custom.gamma, custom.alpha, custom.lambda_qp) == (1.8, 1.0, 0.0)
    success[5] = regime_params(Regime.bec(nu=2.0)).alpha == 8 * math.pi

    failed = [k for k, v in success.items() if not v]

    assert not failed


@pytest.mark.parametrize(
    "make",
    [
        lambda: Regime.bec(nu=0.0),
        lambda: Regime.bec(nu=-1.0),
        lambda: Regime.custom(gamma=1.0, alpha=1.0),
        lambda: Regime("unitary"),
        lambda: PolytropeParams(2.0, -1.0),
        lambda: PolytropeParams(2.0, 1.0, -0.5),
    ],
)
def test_invalid_regimes(make):
    with pytest.raises(DomainError):
        make()


def test_trap_geometry():
    success = {}
    geom = TrapGeometry(Geometry.CIGAR)
    success[0] = geom.char_length == 1.0
    success[1] = geom.is_cigar
    disk = TrapGeometry("disk", omega_tight=4.0)
    success[2] = disk.kind == Geometry.DISK
    success[3] = math.isclose(disk.char_length, 0.5, rel_tol=1e-15)
    success[4] = not disk.is_cigar
    success[5] = TrapGeometry("cigar", 4.0, 0.5).char_length == 0.5
    success[6] = disk.to_dict() == {"kind": "disk", "omega_tight": 4.0, "char_length": 0.5}

    failed = [k for k, v in success.items() if not v]

    assert not failed

    with pytest.raises(DomainError):
        TrapGeometry("cigar", omega_tight=1.0, char_length=2.0)
    with pytest.raises(DomainError):
        TrapGeometry("cigar", omega_tight=0.0)
    with pytest.raises(ValueError):
        TrapGeometry("sphere")


def test_energy_per_particle():
    success = {}
    success[0] = math.isclose(energy_per_particle(BEC, 1.0), 2 * math.pi, rel_tol=1e-14)
    success[1] = energy_per_particle(BEC, 0.0) == 0.0
    success[2] = energy_per_particle(BCS, 0.0) == 0.0
    success[3] = math.isclose(energy_per_particle(BCS, 1.0), 1.7227404, rel_tol=1e-7)
    success[4] = math.isclose(energy_per_particle(BCS, 1.0), BCS.alpha * 3 / 5, rel_tol=1e-14)
    values = energy_per_particle(BEC, np.array([0.0, 1.0, 2.0]))
    success[5] = np.allclose(values, [0.0, 2 * math.pi, 4 * math.pi], rtol=1e-14)

    failed = [k for k, v in success.items() if not v]

    assert not failed

    with pytest.raises(DomainError):
        energy_per_particle(BEC, -1.0)


def test_chemical_potential_cigar():
    success = {}
    success[0] = math.isclose(chemical_potential_cigar(BEC, 1.0, 1.0), 2.0, rel_tol=1e-14)
    success[1] = chemical_potential_cigar(BEC, 0.0, 1.0) == 0.0
    success[2] = math.isclose(chemical_potential_cigar(BEC, 1.0, math.sqrt(2)), 1.0, rel_tol=1e-14)
    densities = np.linspace(0.0, 10.0, 11)
    mu = chemical_potential_cigar(BCS, densities, 1.3)
    success[3] = bool(np.all(np.diff(mu) >= 0))
    n1, sigma = 2.5, 1.7
    mu = chemical_potential_cigar(BCS, n1, sigma)
    success[4] = math.isclose(
        mu, energy_per_particle(BCS, n1 / (math.pi * sigma**2)), rel_tol=1e-15
    )
    success[5] = chemical_potential(BCS, TrapGeometry("cigar"), n1, sigma) == mu

    failed = [k for k, v in success.items() if not v]

    assert not failed

    with pytest.raises(DomainError):
        chemical_potential_cigar(BEC, 1.0, 0.0)
    with pytest.raises(DomainError):
        chemical_potential_cigar(BEC, 1.0, -1.0)


def test_chemical_potential_disk():
    success = {}
    mu_1 = chemical_potential_disk(BEC, 1.0, 1.0)
    success[0] = math.isclose(mu_1, math.sqrt(8 * math.pi), rel_tol=1e-14)
    success[1] = math.isclose(mu_1, 5.01326, rel_tol=1e-5)
    success[2] = chemical_potential_disk(BEC, 0.0, 1.0) == 0.0
    success[3] = math.isclose(chemical_potential_disk(BEC, 2.0, 1.0), 2 * mu_1, rel_tol=1e-14)
    n1, eta = 3.0, 1.4
    x = n1 / (math.sqrt(math.pi) * eta)
    expected = BCS.alpha / math.sqrt(BCS.gamma) * x ** (BCS.gamma - 1)
    success[4] = math.isclose(chemical_potential_disk(BCS, n1, eta), expected, rel_tol=1e-14)
    success[5] = chemical_potential(BCS, TrapGeometry("disk"), n1, eta) == chemical_potential_disk(
        BCS, n1, eta
    )

    failed = [k for k, v in success.items() if not v]

    assert not failed

    with pytest.raises(DomainError):
        chemical_potential_disk(BEC, 1.0, 0.0)


@pytest.mark.parametrize("params", [BEC, BCS, PolytropeParams(1.8, 1.0, 0.0)])
def test_chemical_potential_homogeneity(params):
    rng = np.random.default_rng(7)
    n = rng.uniform(0.01, 100.0, size=20)
    c = rng.uniform(0.1, 10.0, size=20)
    width = 1.3
    for mu in [chemical_potential_cigar, chemical_potential_disk]:
        lhs = mu(params, c * n, width)
        rhs = c ** (params.gamma - 1) * mu(params, n, width)
        assert np.allclose(lhs, rhs, rtol=1e-12, atol=0)
    lhs = energy_per_particle(params, c * n)
    assert np.allclose(lhs, c ** (params.gamma - 1) * energy_per_particle(params, n), rtol=1e-12)


def test_feshbach_scattering_length():
    success = {}
    success[0] = math.isclose(feshbach_scattering_length(1.0, 1.0, 0.0, 1e12), 1.0, rel_tol=1e-10)
    success[1] = feshbach_scattering_length(1.0, 1.0, 0.0, 1.0) == 0.0
    success[2] = feshbach_scattering_length(1.0, 1.0, 0.0, 0.5) < 0
    for delta in [0.1, 0.7, 3.0, 42.0]:
        a_plus = feshbach_scattering_length(2.0, 0.8, 10.0, 10.0 + delta)
        a_minus = feshbach_scattering_length(2.0, 0.8, 10.0, 10.0 - delta)
        success[f"sym_{delta}"] = math.isclose(a_plus + a_minus, 4.0, rel_tol=1e-12)

    failed = [k for k, v in success.items() if not v]

    assert not failed

    with pytest.raises(ResonanceError):
        feshbach_scattering_length(1.0, 1.0, 0.0, 0.0)


def test_fermi_scales():
    success = {}
    k_F, v_F = fermi_scales(1.0)
    success[0] = math.isclose(k_F, 3.09367, rel_tol=1e-5)
    success[1] = k_F == v_F
    success[2] = math.isclose(fermi_scales(1 / (3 * math.pi**2))[0], 1.0, rel_tol=1e-14)
    success[3] = math.isclose(fermi_scales(8 / (3 * math.pi**2))[0], 2.0, rel_tol=1e-14)

    failed = [k for k, v in success.items() if not v]

    assert not failed

    with pytest.raises(DomainError):
        fermi_scales(0.0)
    with pytest.raises(DomainError):
        fermi_scales(-1.0)
