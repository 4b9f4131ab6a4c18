"""Challenge-set generation and consistency evaluation for extractive MRC."""

from .errors import (
    AllSentencesRemoved,
    CapacityExceeded,
    DepthExceeded,
    EmptyBasis,
    EmptySet,
    ExhaustedRetries,
    MissingExpansion,
    NoQualifyingEvent,
    SamError,
    TooShort,
    UnsatisfiablePlan,
    VerbFormUnavailable,
)
from .evaluator import (
    EvalConfig,
    EvalResult,
    baseline_informed,
    baseline_random,
    dice,
    error_analysis,
    fisher_compare,
    fisher_exact,
    rem_k,
)
from .generator import (
    ChallengeSet,
    GenerationConfig,
    corpus_statistics,
    generate_set,
    load_challenge,
    write_set,
)
from .oracle import oracle_answer, oracle_select
from .planner import ContentPlan, build_plan, instantiate, unique_type_orders
from .quality import lexical_similarity, naturality, quality_report, scan_corpus
from .types import (
    AlignedTriple,
    Event,
    MRCInstance,
    PlayerRef,
    QuestionSpec,
    SamCategory,
    SamEntry,
    VerbLexeme,
)

__version__ = "0.1.0"
