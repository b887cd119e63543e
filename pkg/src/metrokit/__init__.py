"""su(2) completion of gapped qubit Hamiltonians, probe states, and dephased QFI numerics."""

__version__ = "0.1.0"

from .errors import MetrokitError
from .operators import (
    HermitianOperator,
    PauliString,
    SpectralDecomposition,
    build_hamiltonian,
    check_homogeneous_gap,
    nn_spectrum_formula,
    spectral_decompose,
)
from .su2 import (
    LadderPair,
    Su2Generators,
    check_multiplicity_conditions,
    construct_generators,
    construct_generators_blockdiag,
    ladder_pair,
    nn_alternative_generators,
    verify_su2,
)
from .states import (
    QuantumState,
    ground_state,
    nn_ground_superposition,
    pg_variance_closed_form,
    pretty_good_state,
    reference_state,
    variance,
)
from .channels import (
    DephasingChannel,
    KrausSet,
    apply_channel_kraus,
    apply_dephasing,
    dephasing_kraus,
    evolve_unitary,
)
from .qfi import QfiResult, qfi_dephased_spectral, qfi_mixed_sld, qfi_pure, sld
from .bounds import (
    BoundReport,
    cq_closed_form,
    cq_from_kraus,
    cq_min_dephasing,
    reference_frequency_bounds,
    xi_omega,
)
