"""pidlint: rule-based checking and autocorrection for P&ID graphs."""

from .engine import (
    CorrectionRecord,
    EngineConfig,
    EngineResult,
    GraphDiff,
    apply_match,
    detect_rule,
    diff,
    is_suppressed,
    run_all,
    run_rule,
)
from .errors import (
    ConvergenceError,
    GraphError,
    ParseError,
    PatternError,
    PidlintError,
    RuleValidationError,
    StaleMatchError,
    TaxonomyError,
)
from .ingest import (
    build_demo_fixture,
    load_graph,
    load_rule,
    parse_graph,
    parse_rule,
    save_graph,
    serialize_graph,
    serialize_rule,
)
from .matching import (
    Condition,
    Match,
    Pattern,
    PatternEdge,
    PatternNode,
    eval_condition,
    find_matches,
    node_compatible,
)
from .model import (
    DEFAULT_TAXONOMY,
    DEFAULT_TAXONOMY_TREE,
    PidEdge,
    PidGraph,
    PidNode,
    Taxonomy,
)
from .report import RunReport, export_dot, render_json, render_text
from .rules import (
    RuleEdge,
    RuleGraph,
    RuleMeta,
    RuleNode,
    builtin_rules,
    corrected_pattern,
    erroneous_pattern,
    load_rules_dir,
    validate_rule,
)

__version__ = "0.1.0"

__all__ = [
    "Condition",
    "ConvergenceError",
    "CorrectionRecord",
    "DEFAULT_TAXONOMY",
    "DEFAULT_TAXONOMY_TREE",
    "EngineConfig",
    "EngineResult",
    "GraphDiff",
    "GraphError",
    "Match",
    "ParseError",
    "Pattern",
    "PatternEdge",
    "PatternError",
    "PatternNode",
    "PidEdge",
    "PidGraph",
    "PidNode",
    "PidlintError",
    "RuleEdge",
    "RuleGraph",
    "RuleMeta",
    "RuleNode",
    "RuleValidationError",
    "RunReport",
    "StaleMatchError",
    "Taxonomy",
    "TaxonomyError",
    "apply_match",
    "build_demo_fixture",
    "builtin_rules",
    "corrected_pattern",
    "detect_rule",
    "diff",
    "erroneous_pattern",
    "eval_condition",
    "export_dot",
    "find_matches",
    "is_suppressed",
    "load_graph",
    "load_rule",
    "load_rules_dir",
    "node_compatible",
    "parse_graph",
    "parse_rule",
    "render_json",
    "render_text",
    "run_all",
    "run_rule",
    "save_graph",
    "serialize_graph",
    "serialize_rule",
    "validate_rule",
]
