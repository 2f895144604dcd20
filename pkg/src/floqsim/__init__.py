"""floqsim: quasienergy spectra and observables of periodically driven spin systems.

The package builds block-structured extended Hamiltonians of time-periodic
drives as sparse Pauli sums, prepares their eigenstates with an adaptive
variational statevector loop, extracts central-zone quasienergy spectra by
sweeping the cost shift, and evaluates time-dependent observables with a
fixed-depth protocol, all cross-checked against a Trotterized
exact-diagonalization oracle.
"""

__version__ = "0.1.0"

from .auxiliary import AuxSpec, a_asym, a_diagonal, a_observable, a_shift, a_symmetric
from .adapt import (
    AdaptConfig,
    AdaptResult,
    OperatorPool,
    build_mixed_pool,
    build_mixed_product_pool,
    build_pool,
    build_two_local_total_pool,
    default_lambda_grid,
    distinct_quasienergies,
    pool_gradients,
    run_adapt,
    run_deflation,
    spectrum_sweep,
    vqe_optimize,
)
from .config import ExperimentConfig, parse_config
from .drives import DriveSpec, XYZParams, driven_xyz, single_qubit_example
from .hamiltonian import (
    ExtendedFloquetHamiltonian,
    RegisterLayout,
    build_extended,
    shifted_squared,
)
from .observables import (
    apply_aux_z_rotations,
    expectation_in_time,
    stroboscopic_expectation,
    time_crystal_expectation,
)
from .oracle import (
    TrotterConfig,
    dense_extended_spectrum,
    exact_quasienergies,
    fold_quasienergy,
    trotter_propagator,
)
from .pauli import PauliString, PauliSum, commutator, tensor, to_dense, trace_decompose
from .statevector import (
    Ansatz,
    StateVector,
    apply_exp,
    expectation,
    init_reference,
    inner,
)

__all__ = [
    "AdaptConfig",
    "AdaptResult",
    "Ansatz",
    "AuxSpec",
    "DriveSpec",
    "ExperimentConfig",
    "ExtendedFloquetHamiltonian",
    "OperatorPool",
    "PauliString",
    "PauliSum",
    "RegisterLayout",
    "StateVector",
    "TrotterConfig",
    "XYZParams",
    "a_asym",
    "a_diagonal",
    "a_observable",
    "a_shift",
    "a_symmetric",
    "apply_aux_z_rotations",
    "apply_exp",
    "build_extended",
    "build_mixed_pool",
    "build_mixed_product_pool",
    "build_pool",
    "build_two_local_total_pool",
    "commutator",
    "default_lambda_grid",
    "dense_extended_spectrum",
    "distinct_quasienergies",
    "driven_xyz",
    "exact_quasienergies",
    "expectation",
    "expectation_in_time",
    "fold_quasienergy",
    "init_reference",
    "inner",
    "parse_config",
    "pool_gradients",
    "run_adapt",
    "run_deflation",
    "shifted_squared",
    "single_qubit_example",
    "spectrum_sweep",
    "stroboscopic_expectation",
    "tensor",
    "time_crystal_expectation",
    "to_dense",
    "trace_decompose",
    "trotter_propagator",
    "vqe_optimize",
]
