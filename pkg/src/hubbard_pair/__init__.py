"""Two bosons in the one-dimensional Hubbard model: closed forms and an ED oracle."""

__version__ = "0.1.0"

from .core import (
    LatticeParams,
    QuasiMomentum,
    collective_hopping,
    fold_to_zone,
    single_particle_effective_mass,
    single_particle_energy,
)
from .dimer import (
    DimerState,
    binding_energy,
    dimer_alpha,
    dimer_effective_mass,
    dimer_energy,
    dimer_state,
    dimer_wavefunction,
    effective_pair_hopping,
    strong_coupling_energy,
)
from .errors import (
    ConvergenceError,
    FlatBandError,
    HubbardPairError,
    MemoryBudgetError,
    NonSymmetricError,
    OutsideBandError,
    SingularRelativeMomentumError,
    ZeroInteractionError,
)
from .oracle import (
    OracleReport,
    build_full_hamiltonian,
    build_relative_hamiltonian,
    classify_spectrum,
    compare_with_analytic,
    diagonalize_symmetric,
)
from .scattering import (
    RelativeWavefunction,
    ScatteringState,
    band_edges,
    density_of_states,
    phase_shift,
    scattering_energy,
    scattering_length,
    scattering_state,
    scattering_wavefunction,
)
