"""Optimal and low-entanglement strategies for XOR games, with rigidity
diagnostics for the CHSH(n) family."""

__version__ = "0.1.0"

from .errors import CapacityError, ContractError, SchemaError, SolverError, XorRigidError
from .matcore import (
    BipartiteState,
    herm_eig,
    kron,
    max_entangled,
    op_abs_signum,
    partial_trace,
    product_state,
    svd,
)
from .game import (
    BiasValue,
    QuantumStrategy,
    XorGame,
    bias_of,
    chsh_n,
    chsh_pairs,
    simulate_rounds,
)
from .sdpsolve import VectorStrategy, certify_upper, solve_bias
from .clifford import (
    CliffordBasis,
    clifford_generators,
    detuned_slofstra,
    slofstra_strategy,
    tsirelson_lift,
)
from .rounding import (
    RoundingOutcome,
    reduce,
    reduce_to_quantum,
    reduce_trials,
    sample_sech,
    strategy_vectors,
)
from .rigidity import (
    EntropyCertificate,
    QubitPairs,
    RigidityReport,
    balance_pad,
    build_qubit_pairs,
    certify_entropy,
    embedded_chsh_report,
    entanglement_entropy,
    exact_anticommute_repair,
    fannes_lower_bound,
    select_good_subset,
    tilde_observables,
)
