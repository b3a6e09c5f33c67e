__version__ = "0.1.0"

from polysound.polytrope import (
    Geometry,
    PolytropeParams,
    TrapGeometry,
    Regime,
    regime_params,
    energy_per_particle,
    chemical_potential_cigar,
    chemical_potential_disk,
    feshbach_scattering_length,
    fermi_scales,
)
from polysound.widths import (
    Branch,
    WidthSolution,
    DensityProfile,
    cigar_width_residual,
    solve_cigar_width,
    solve_disk_width,
    solve_width,
    asymptotic_width_3d,
    profile_moment_ratio,
    variational_width,
    reduced_energy,
    minimize_reduced_energy,
    density_from_width,
)
from polysound.sound import (
    SweepRow,
    DispersionPoint,
    sound_uniform_3d,
    sound_cigar,
    sound_disk,
    sound_from_width,
    dispersion_omega,
    sweep_sound_curve,
)
from polysound.hydrosim import (
    HydroState,
    SimSettings,
    WidthMode,
    ProbeSeries,
    integrate_run,
    measure_mode_frequency,
    measure_pulse_speed,
)
