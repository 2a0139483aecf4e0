"""Resource and critical-path estimation for FHE operator circuits."""

from .cost import (
    ConfigError,
    CostTable,
    FabricConfig,
    PAPER_DEFAULT_PROFILE,
    ResourceCost,
    ResourceReport,
    estimate,
    load_config,
    load_profile,
    paper_default,
)
from .critical_path import (
    CriticalPathResult,
    Method,
    ThroughputResult,
    approximate_cp,
    compute,
    longest_path_cp,
    paper_exact_cp,
    throughput,
    topological_sort,
)
from .fixtures import (
    FixtureError,
    fixture_names,
    generate_fixture,
    generate_from_spec,
    parse_fixture_spec,
)
from .ir import (
    CircuitGraph,
    EvaluationError,
    GraphBuilder,
    OpKind,
    Operator,
    OpTag,
    ValueType,
    Violation,
    evaluate,
    validate,
)
from .report import RunManifest, emit_report, render_json, render_text
from .syntax import Diagnostic, ParseError, SourceSpan, parse, print_circuit
from .transforms import (
    SectionPlan,
    TransformError,
    canonicalize,
    lower_gates,
    sectionize,
)

__all__ = [
    "CircuitGraph",
    "ConfigError",
    "CostTable",
    "CriticalPathResult",
    "Diagnostic",
    "EvaluationError",
    "FabricConfig",
    "FixtureError",
    "GraphBuilder",
    "Method",
    "OpKind",
    "OpTag",
    "Operator",
    "PAPER_DEFAULT_PROFILE",
    "ParseError",
    "ResourceCost",
    "ResourceReport",
    "RunManifest",
    "SectionPlan",
    "SourceSpan",
    "ThroughputResult",
    "TransformError",
    "ValueType",
    "Violation",
    "approximate_cp",
    "canonicalize",
    "compute",
    "emit_report",
    "estimate",
    "evaluate",
    "fixture_names",
    "generate_fixture",
    "generate_from_spec",
    "load_config",
    "load_profile",
    "longest_path_cp",
    "lower_gates",
    "paper_default",
    "paper_exact_cp",
    "parse",
    "parse_fixture_spec",
    "print_circuit",
    "render_json",
    "render_text",
    "sectionize",
    "throughput",
    "topological_sort",
    "validate",
]

__version__ = "0.1.0"
