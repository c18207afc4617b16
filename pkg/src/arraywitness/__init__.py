"""Witness-pair abstraction of 1-D array loop programs.

Parses a small C subset, rewrites it into a loop-free, array-free harness
(each array becomes a witness variable plus a nondeterministically fixed
witness index), classifies assertions for which the rewrite is exact, and
differentially validates both claims with an exhaustive bounded interpreter.
"""

from .analysis import (
    ArrayInfo,
    BoundKind,
    IndexRange,
    LoopSummary,
    analyze_program,
    collect_arrays,
    full_array_access,
    lastof,
    loop_bound,
    loop_defs,
)
from .emit import EmitConfig, emit_report, emit_verifiable, strip_scaffolding
from .gen import GenConfig, generate_program
from .grammar import ConformanceReport, validate_output_grammar
from .oracle import (
    OracleConfig,
    Trace,
    Verdict,
    collect_final_states,
    differential_check,
    enumerate_runs,
    replay_trace,
)
from .parser import ParseError, parse
from .precision import (
    PrecisionVerdict,
    classify,
    classify_all,
    classify_program,
    dependence_closure,
)
from .printer import print_program
from .transform import TransformResult, transform_program, transform_with_info

__all__ = [
    "ArrayInfo",
    "BoundKind",
    "ConformanceReport",
    "EmitConfig",
    "GenConfig",
    "IndexRange",
    "LoopSummary",
    "OracleConfig",
    "ParseError",
    "PrecisionVerdict",
    "Trace",
    "TransformResult",
    "Verdict",
    "analyze_program",
    "classify",
    "classify_all",
    "classify_program",
    "collect_arrays",
    "collect_final_states",
    "dependence_closure",
    "differential_check",
    "emit_report",
    "emit_verifiable",
    "enumerate_runs",
    "full_array_access",
    "generate_program",
    "lastof",
    "loop_bound",
    "loop_defs",
    "parse",
    "print_program",
    "replay_trace",
    "strip_scaffolding",
    "transform_program",
    "transform_with_info",
    "validate_output_grammar",
]
