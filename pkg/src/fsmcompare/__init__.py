"""Multi-level behavioral comparison of systems modeled as finite state machines."""

__version__ = "0.1.0"

from .automata import (
    CanonicalDfa,
    EnumerationCapExceeded,
    Nfa,
    Trace,
    accepts,
    bounded_language,
    determinize,
    has_behavior,
    hide_events,
    intersection,
    language_equivalent,
    language_included,
    minimize,
    union,
    with_alphabet,
)
from .ingest import (
    HidingConfig,
    NfaParseError,
    WorkspaceLoadError,
    build_pta,
    load_workspace,
    parse_log,
    parse_nfa,
    write_nfa,
)
from .levels import (
    DiffMatrix,
    Lattice,
    LatticeCapExceeded,
    LatticeEdge,
    LatticeNode,
    VariantClass,
    VariantPartition,
    level1,
    level2,
    level3,
    level4,
    level5,
    level6,
    variant_letters,
)
from .ltsdiff import (
    Change,
    DiffMachine,
    DiffParams,
    DiffState,
    DiffStats,
    DiffTransition,
    Matching,
    ScoreTable,
    build_diff,
    compute_matching,
    diff,
    diff_stats,
    global_scores,
    local_scores,
    select_landmarks,
)
from .model_sets import (
    ModelSet,
    Workspace,
    complete_mapping,
    diff_entity_counts,
    model_set_equivalent,
    model_set_included,
    model_set_intersection,
    model_set_union,
)
from .report import ReportBundle, build_bundle, to_csv, to_dot, to_json

__all__ = [
    "CanonicalDfa",
    "Change",
    "DiffMachine",
    "DiffMatrix",
    "DiffParams",
    "DiffState",
    "DiffStats",
    "DiffTransition",
    "EnumerationCapExceeded",
    "HidingConfig",
    "Lattice",
    "LatticeCapExceeded",
    "LatticeEdge",
    "LatticeNode",
    "Matching",
    "ModelSet",
    "Nfa",
    "NfaParseError",
    "ReportBundle",
    "ScoreTable",
    "Trace",
    "VariantClass",
    "VariantPartition",
    "Workspace",
    "WorkspaceLoadError",
    "accepts",
    "bounded_language",
    "build_bundle",
    "build_diff",
    "build_pta",
    "complete_mapping",
    "compute_matching",
    "determinize",
    "diff",
    "diff_entity_counts",
    "diff_stats",
    "global_scores",
    "has_behavior",
    "hide_events",
    "intersection",
    "language_equivalent",
    "language_included",
    "level1",
    "level2",
    "level3",
    "level4",
    "level5",
    "level6",
    "load_workspace",
    "local_scores",
    "minimize",
    "model_set_equivalent",
    "model_set_included",
    "model_set_intersection",
    "model_set_union",
    "parse_log",
    "parse_nfa",
    "select_landmarks",
    "to_csv",
    "to_dot",
    "to_json",
    "union",
    "variant_letters",
    "with_alphabet",
    "write_nfa",
]
