"""kvnbox: classical mechanics as unitary evolution in Hilbert space.

A phase-space wavefunction psi(q, p) with |psi|^2 equal to the Liouville
density evolves along classical characteristics.  The package provides the
two standard representations and the transform between them, exact transport
backends (free, uniform field, elastic box with its image-sum propagator),
elastic-wall diagnostics, the band spectrum of the confined flow with its
quantum contrast, the kappa-scaled quantum dial, and a brute-force trajectory
oracle every wave backend is validated against.
"""
__version__ = "0.1.0"

from .grids import GridSpec, Representation, UnitSystem
from .states import (
    KvnState,
    MadelungFields,
    expectation_hamiltonian,
    expectation_momentum,
    expectation_position,
    inner,
    madelung_split,
    make_gaussian_state,
    norm,
    to_dual,
    to_momentum,
)
from .evolution import (
    BoxBackend,
    ImageSumPolicy,
    PotentialSpec,
    evolve_box,
    evolve_box_dual,
    evolve_free_spectral,
    evolve_gravity,
    evolve_splitstep,
    fold_triangle,
    harmonic_potential,
    kernel_box,
    kernel_free,
    linear_potential,
    quartic_potential,
)
from .boundary import (
    WallReport,
    boundary_form,
    continuity_residual,
    currents,
    qparity_check,
    reflect_specular,
)
from .spectral import (
    BandMode,
    QuantumLevel,
    apply_generator,
    band_energy,
    band_mode,
    dispersion,
    energy_sweep,
    generator_residual,
    quantum_box_levels,
    quantum_box_levels_fd,
)
from .oracle import (
    BoxScenario,
    ClassicalEnsemble,
    DensityComparison,
    DensityEstimate,
    FreeScenario,
    GravityScenario,
    PotentialScenario,
    compare_densities,
    density_estimate,
    integrate_hamilton,
    liouville_density_characteristics,
    monte_carlo_l1_budget,
    sample_ensemble,
)
from .kappa import (
    ContractionResult,
    Grid1D,
    PhaseSpaceGaussian,
    TwoSlitReport,
    WaveFunction1D,
    WignerField,
    contraction_experiment,
    evolve_schrodinger_kappa,
    matched_gaussian_packet,
    two_point_residual,
    two_slit_compare,
    wigner_kappa,
    wigner_momentum_grid,
)
from .runner import ConfigError, RunReport, ScenarioConfig, parse_config, run_scenario
