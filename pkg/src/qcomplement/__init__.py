"""Entanglement, disturbance and information gain for weak two-qubit measurements."""
from .complementarity import (
    AuditReport,
    ComplementarityPoint,
    average_entanglement,
    average_entanglement_closed,
    conditional_entanglement_closed,
    ed_point,
    eg_point,
    evaluate_batch,
    evaluate_point,
    h_hat,
    mixed_audit,
    proof_identity_audit,
    theorem_sweep,
)
from .discrimination import DiscriminationProblem, HelstromSolution, optimal_povm, solve
from .eavesdrop import ProtocolConfig, ProtocolReport, chsh_exact, eve_channel, run_protocol
from .linalg import eig_hermitian, partial_trace_alice, partial_trace_bob, polar_decompose, trace_norm
from .measurement import (
    MeasurementPair,
    PovmParams,
    apply_measurement,
    build_povm,
    disturbance,
    hermitize,
    pointer_equivalence_check,
    quality,
    von_neumann_nonselective,
)
from .states import (
    JointDensity,
    PureState,
    ReducedState,
    concurrence_mixed,
    entanglement_pure,
    eof_generalized,
    schmidt_decompose,
)

__version__ = "0.1.0"
