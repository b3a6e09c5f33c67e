import math

import numpy as np
import pytest

from polysound import sound
from polysound.exceptions import DomainError, SubcriticalWidth, ConvergenceFailure
from polysound.polytrope import TrapGeometry, Regime, regime_params
from polysound.sound import (
    SweepRow,
    sound_uniform_3d,
    sound_cigar,
    sound_disk,
    sound_velocity,
    sound_from_width,
    dispersion_omega,
    dispersion_point,
    dispersion_curve,
    default_density_grid,
    sound_over_fermi_velocity,
    sweep_sound_curve,
)
from polysound.widths import solve_width


CIGAR = TrapGeometry("cigar")
DISK = TrapGeometry("disk")
BEC = regime_params(Regime.bec(nu=1.0), 1.0)
BCS = regime_params(Regime.bcs(), 1.0)


def test_sound_uniform_3d():
    success = {}
    success[0] = math.isclose(sound_uniform_3d(BCS, 1.0), 1.3835303, rel_tol=1e-7)
    success[1] = sound_uniform_3d(BCS, 0.0) == 0.0
    for n in [0.01, 1.0, 100.0]:
        success[n] = math.isclose(sound_over_fermi_velocity(BCS, n), 5**-0.5, rel_tol=1e-10)

    failed = [k for k, v in success.items() if not v]

    assert not failed


def test_sound_cigar():
    success = {}
    success[0] = math.isclose(sound_cigar(BEC, 40.0, 3.0), math.sqrt(80) / 3, rel_tol=1e-14)
    success[1] = sound_cigar(BEC, 0.0, 3.0) == 0.0
    # sqrt(3) (3 pi)^(1/3) / 5
    expected = math.sqrt(3) * (3 * math.pi) ** (1 / 3) / 5
    success[2] = math.isclose(sound_cigar(BCS, 1.0, 1.0), expected, rel_tol=1e-12)
    success[3] = math.isclose(sound_cigar(BCS, 1.0, 1.0), 0.7317246, rel_tol=1e-7)
    success[4] = sound_velocity(BEC, CIGAR, 40.0, 3.0) == sound_cigar(BEC, 40.0, 3.0)

    failed = [k for k, v in success.items() if not v]

    assert not failed

    with pytest.raises(DomainError):
        sound_cigar(BEC, 1.0, 0.0)


def test_sound_disk():
    success = {}
    success[0] = math.isclose(
        sound_disk(BEC, 1.0, 1.0), 2**0.75 * math.pi**0.25, rel_tol=1e-12
    )
    success[1] = math.isclose(sound_disk(BEC, 1.0, 1.0), 2.2390303, rel_tol=1e-7)
    success[2] = sound_disk(BCS, 0.0, 1.0) == 0.0
    expected = math.sqrt(math.pi) * 3 ** (7 / 12) / 5**0.75
    success[3] = math.isclose(sound_disk(BCS, 1.0, 1.0), expected, rel_tol=1e-12)
    success[4] = math.isclose(sound_disk(BCS, 1.0, 1.0), 1.0061626, rel_tol=1e-7)
    success[5] = sound_velocity(BCS, DISK, 1.0, 1.0) == sound_disk(BCS, 1.0, 1.0)

    failed = [k for k, v in success.items() if not v]

    assert not failed

    with pytest.raises(DomainError):
        sound_disk(BEC, 1.0, -1.0)


def test_sound_from_width():
    success = {}
    success[0] = math.isclose(sound_from_width(CIGAR, 2.0, 1.0, 3.0), math.sqrt(80 / 9), rel_tol=1e-14)
    success[1] = sound_from_width(CIGAR, 5 / 3, 1.0, 1.0) == 0.0
    success[2] = math.isclose(sound_from_width(DISK, 2.0, 1.0, math.sqrt(2)), math.sqrt(1.5), rel_tol=1e-12)
    success[3] = math.isclose(
        sound_from_width(CIGAR, 2.0, 1.0, 3.0), sound_cigar(BEC, 40.0, 3.0), rel_tol=1e-14
    )

    failed = [k for k, v in success.items() if not v]

    assert not failed

    with pytest.raises(SubcriticalWidth):
        sound_from_width(CIGAR, 2.0, 1.0, 0.9)


@pytest.mark.parametrize("params", [BEC, BCS])
@pytest.mark.parametrize("geom", [CIGAR, DISK])
def test_cross_formula_identity(params, geom):
    for n in default_density_grid():
        width = solve_width(params, geom, n).width
        from_density = sound_velocity(params, geom, n, width)
        from_width = sound_from_width(geom, params.gamma, params.lambda_qp, width)
        assert math.isclose(from_density, from_width, rel_tol=1e-10)


def test_dispersion_omega():
    success = {}
    success[0] = math.isclose(dispersion_omega(1.7, 0.0, 0.3), 1.7 * 0.3, rel_tol=1e-15)
    success[1] = math.isclose(dispersion_omega(1.0, 1.0, 2.0), 2 * math.sqrt(2), rel_tol=1e-14)
    success[2] = dispersion_omega(1.0, 1.0, 0.0) == 0.0
    point = dispersion_point(0.0, 1.0, 2.0)
    success[3] = point.free_particle and point.omega == 2.0
    success[4] = not dispersion_point(1.0, 1.0, 2.0).free_particle
    ks = np.linspace(0.01, 5.0, 100)
    points = dispersion_curve(0.8, 1.0, ks)
    ratios = np.array([p.omega / p.k for p in points])
    success[5] = bool(np.all(np.diff(ratios) >= 0))
    success[6] = all(p.omega >= 0.8 * p.k for p in points)
    success[7] = [p.k for p in points] == list(ks)

    failed = [k for k, v in success.items() if not v]

    assert not failed

    with pytest.raises(DomainError):
        dispersion_omega(0.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        dispersion_omega(1.0, 1.0, -1.0)


def test_default_density_grid(monkeypatch):
    success = {}
    grid = default_density_grid()
    success[0] = len(grid) == 200
    success[1] = grid[0] == 1e-4 and grid[-1] == 1e4
    success[2] = bool(np.all(np.diff(grid) > 0))
    success[3] = len(default_density_grid(1.0, 10.0, 5)) == 5
    monkeypatch.setenv("POLYSOUND_N_POINTS", "17")
    success[4] = len(default_density_grid()) == 17

    failed = [k for k, v in success.items() if not v]

    assert not failed

    with pytest.raises(DomainError):
        default_density_grid(10.0, 1.0, 5)
    with pytest.raises(DomainError):
        default_density_grid(0.0, 1.0, 5)


def test_sweep_bec_cigar_row():
    success = {}
    (row,) = sweep_sound_curve(BEC, CIGAR, [40.0])
    success[0] = isinstance(row, SweepRow)
    success[1] = math.isclose(row.width, 3.0, rel_tol=1e-14)
    success[2] = math.isclose(row.cs_numeric, math.sqrt(80) / 3, rel_tol=1e-12)
    success[3] = math.isclose(row.cs_lowdim, math.sqrt(80), rel_tol=1e-12)
    success[4] = math.isclose(row.cs_3d, 80**0.25, rel_tol=1e-12)
    success[5] = row.cs_numeric <= min(row.cs_lowdim, row.cs_3d)
    success[6] = list(row.to_dict()) == ["n_eq", "width", "cs_numeric", "cs_lowdim", "cs_3d"]
    success[7] = sweep_sound_curve(BEC, CIGAR, []) == []

    failed = [k for k, v in success.items() if not v]

    assert not failed


@pytest.mark.parametrize("params", [BEC, BCS])
@pytest.mark.parametrize("geom", [CIGAR, DISK])
def test_sweep_structure(params, geom):
    densities = list(default_density_grid())
    rows = sweep_sound_curve(params, geom, densities)
    numeric = np.array([r.cs_numeric for r in rows])
    success = {}
    success[0] = [r.n_eq for r in rows] == densities
    success[1] = all(r.cs_numeric <= min(r.cs_lowdim, r.cs_3d) for r in rows)
    success[2] = bool(np.all(np.diff(numeric) > 0))
    (low,) = sweep_sound_curve(params, geom, [1e-3])
    success[3] = 0.99 <= low.cs_numeric / low.cs_lowdim <= 1.01
    (high,) = sweep_sound_curve(params, geom, [1e8])
    success[4] = 0.99 <= high.cs_numeric / high.cs_3d <= 1.01
    (tiny,) = sweep_sound_curve(params, geom, [1e-8])
    success[5] = abs(tiny.cs_numeric / tiny.cs_lowdim - 1) < 1e-6

    failed = [k for k, v in success.items() if not v]

    assert not failed


def test_sweep_errors(monkeypatch):
    with pytest.raises(DomainError):
        sweep_sound_curve(BEC, CIGAR, [1.0, 0.5])
    with pytest.raises(DomainError):
        sweep_sound_curve(BEC, CIGAR, [0.0, 1.0])

    real_solve = sound.solve_width

    def flaky_solve(params, geom, n_eq):
        if n_eq == 2.0:
            raise ConvergenceFailure("Width root finding did not converge")
        return real_solve(params, geom, n_eq)

    monkeypatch.setattr(sound, "solve_width", flaky_solve)

    with pytest.raises(ConvergenceFailure) as e:
        sweep_sound_curve(BEC, CIGAR, [1.0, 2.0, 3.0])
    assert e.value.n_eq == 2.0
    assert "n_eq=2.0" in str(e.value)

    rows = sweep_sound_curve(BEC, CIGAR, [1.0, 2.0, 3.0], errors="ignore")
    assert [r.n_eq for r in rows] == [1.0, 3.0]
