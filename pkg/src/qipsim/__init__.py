"""Exact simulator for a sumcheck proof system on quantified Boolean
formulas over GF(2^k), together with a 2-round quantum verification protocol
for the same statements and the analytic bounds governing both."""

from __future__ import annotations

__version__ = "0.1.0"

from ._kernels import backend_name
from .bounds import (
    BoundParams,
    CoordinateHit,
    MixtureBoundCheck,
    SoundnessBound,
    check_mixture_bound,
    choose_params,
    coordinate_hit_probability,
    enumerate_coordinate_hits,
    soundness_bound,
    uniform_fidelity,
)
from .gf2k import Field, UniPoly, poly_degree, poly_trim
from .qbf import (
    BoolExpr,
    PrenexQbf,
    QbfSyntaxError,
    arith_eval,
    degree_profile,
    eval_qbf,
    parse_qbf,
    to_text,
)
from .quantum import (
    BasisState,
    BiasedSupportProver,
    EventQuery,
    HonestProver,
    LookaheadProver,
    QuantumProtocol,
    QuantumRunReport,
    RegisterLayout,
    SparseShapeError,
    SparseState,
    apply_hadamard,
    build_layout,
    dense_oracle,
    full_lookahead,
    run_quantum,
)
from .sumcheck import (
    Operator,
    ProtocolSizeError,
    RoundSchedule,
    Transcript,
    TranscriptOracle,
    build_schedule,
    check_transcript,
    correct_polynomial,
    honest_always_accepts,
    honest_policy,
    optimal_cheater,
    partial_value,
    run_protocol,
    run_with_randomness,
    transcript_valid,
)

__all__ = [
    "__version__",
    "backend_name",
    "Field",
    "UniPoly",
    "poly_degree",
    "poly_trim",
    "BoolExpr",
    "PrenexQbf",
    "QbfSyntaxError",
    "arith_eval",
    "degree_profile",
    "eval_qbf",
    "parse_qbf",
    "to_text",
    "Operator",
    "ProtocolSizeError",
    "RoundSchedule",
    "Transcript",
    "TranscriptOracle",
    "build_schedule",
    "check_transcript",
    "correct_polynomial",
    "honest_always_accepts",
    "honest_policy",
    "optimal_cheater",
    "partial_value",
    "run_protocol",
    "run_with_randomness",
    "transcript_valid",
    "BasisState",
    "BiasedSupportProver",
    "EventQuery",
    "HonestProver",
    "LookaheadProver",
    "QuantumProtocol",
    "QuantumRunReport",
    "RegisterLayout",
    "SparseShapeError",
    "SparseState",
    "apply_hadamard",
    "build_layout",
    "dense_oracle",
    "full_lookahead",
    "run_quantum",
    "BoundParams",
    "CoordinateHit",
    "MixtureBoundCheck",
    "SoundnessBound",
    "check_mixture_bound",
    "choose_params",
    "coordinate_hit_probability",
    "enumerate_coordinate_hits",
    "soundness_bound",
    "uniform_fidelity",
]
