"""tracelens: layered natural-language explanations from logical proof traces."""

from .abstraction import (
    AbstractionRule,
    DEFAULT_CHAIN,
    FilterPolicy,
    InvalidCombo,
    LayeredExplanation,
    NOFR_CHAIN,
    PreservationReport,
    VALID_COMBOS,
    apply_combo,
    combo_label,
    filter_knowledge,
    flatten_logic,
    flatten_rules,
    generate_layers,
    parse_combo,
    preserves_conclusion,
)
from .complexity import ComplexityScore, Ordering, compare_layers, node_simplicity
from .graph import (
    ExplanationGraph,
    InvalidTrace,
    Node,
    NodeKind,
    UnknownNode,
    build_graph,
    reaches,
    root_causes,
    topological_order,
)
from .render import (
    RenderedExplanation,
    TemplateArity,
    TemplateSet,
    explanation_text,
    export_layers,
    render_layer,
)
from .study import (
    AnalysisRow,
    Assignment,
    MoreInfo,
    PairType,
    RatingRecord,
    StudyPage,
    analyze,
    assign_pages,
    build_pages,
    enumerate_pair_types,
    friedman_test,
    kendalls_w,
)
from .trace_model import (
    CanonicalForm,
    CycleError,
    DanglingReference,
    MissingConclusion,
    Predicate,
    ProofTrace,
    RuleApplication,
    Statement,
    TraceError,
    TraceSyntaxError,
    ValidationReport,
    canonicalize,
    parse_trace,
    serialize_trace,
    validate_trace,
)

__version__ = "0.1.0"
