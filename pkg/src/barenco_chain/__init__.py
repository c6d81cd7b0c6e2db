"""Barenco-type controlled gates from driven two- and three-qubit spin chains."""

from barenco_chain.errors import (
    BarencoChainError,
    BudgetExceededError,
    DimensionMismatchError,
    DivisionByZeroError,
    ImaginaryCouplingError,
    NoConvergenceError,
    NotHermitianError,
    NotUnitaryError,
    UnsupportedSizeError,
    WrongSizeError,
)
from barenco_chain.evolve import (
    PropagatorResult,
    effective_block3_propagator,
    effective_lower_propagator,
    effective_upper_propagator,
    h2_input_block,
    propagate,
    refine_until_converged,
    rotating_frame_2q,
    rwa_discrepancy,
    scoring_frame,
)
from barenco_chain.experiments import (
    AngleGrid,
    DisorderMode,
    DisorderScenario,
    SweepResult,
    angle_grid,
    average_fidelity_trace,
    delta_j_sensitivity,
    disorder_campaign,
    disorder_sweep,
    find_resonant_triples,
)
from barenco_chain.fidelity import FidelityTrace, fidelity_trace, operator_fidelity
from barenco_chain.linalg import EigenDecomposition, expm_i, herm_eig, kron
from barenco_chain.model import (
    CNOT_ANGLES,
    GATE_TIME,
    TOFFOLI_ANGLES,
    ChainParams,
    EffectiveParams,
    GateAngles,
    basis_labels,
    build_three_qubit_hamiltonian,
    build_two_qubit_hamiltonian,
    build_xxz_hamiltonian,
    validate_rwa,
)
from barenco_chain.targets import TargetGate, barenco, cnot, controlled_phase, toffoli

__version__ = "0.1.0"

__all__ = [
    "AngleGrid",
    "BarencoChainError",
    "BudgetExceededError",
    "CNOT_ANGLES",
    "ChainParams",
    "DimensionMismatchError",
    "DisorderMode",
    "DisorderScenario",
    "DivisionByZeroError",
    "EffectiveParams",
    "EigenDecomposition",
    "FidelityTrace",
    "GATE_TIME",
    "GateAngles",
    "ImaginaryCouplingError",
    "NoConvergenceError",
    "NotHermitianError",
    "NotUnitaryError",
    "PropagatorResult",
    "SweepResult",
    "TOFFOLI_ANGLES",
    "TargetGate",
    "UnsupportedSizeError",
    "WrongSizeError",
    "angle_grid",
    "average_fidelity_trace",
    "barenco",
    "basis_labels",
    "build_three_qubit_hamiltonian",
    "build_two_qubit_hamiltonian",
    "build_xxz_hamiltonian",
    "cnot",
    "controlled_phase",
    "delta_j_sensitivity",
    "disorder_campaign",
    "disorder_sweep",
    "effective_block3_propagator",
    "effective_lower_propagator",
    "effective_upper_propagator",
    "expm_i",
    "fidelity_trace",
    "find_resonant_triples",
    "h2_input_block",
    "herm_eig",
    "kron",
    "operator_fidelity",
    "propagate",
    "refine_until_converged",
    "rotating_frame_2q",
    "rwa_discrepancy",
    "scoring_frame",
    "toffoli",
    "validate_rwa",
]
