"""Toolchain for Java test-assertion generation experiments.

Pairs tests with focal methods, filters and abstracts them into model-ready
samples, runs pluggable predictors, scores predictions, and classifies
generated assertions against buggy/fixed code revisions.
"""

from .abstraction import (
    AbstractionConfig,
    AbstractionDictionary,
    abstract,
    abstract_truth,
    deabstract,
    truncate_input,
)
from .assertions import (
    AssertionKind,
    AssertionSite,
    check_syntax,
    find_assertions,
    is_acceptable_assertion,
    mask_assertion,
)
from .corpus import (
    CorpusStats,
    FocalDetection,
    SplitSpec,
    TestFocalPair,
    explode_assertions,
    filter_pairs,
    match_focal_class,
    match_focal_method,
    pair_classes,
    split_corpus,
)
from .dataset import (
    DatasetSample,
    export_prompts,
    export_samples,
    import_samples,
)
from .lexer import ACTIVE_CORE, tokenize
from .metrics import EvalReport, bleu, evaluate, exact_match, top_k_accuracy
from .parser import ClassUnit, CompilationUnit, MethodUnit, parse_methods, parse_source
from .predictor import (
    AdapterClient,
    Prediction,
    RetrievalIndex,
    external_predict,
    predict_top_k,
    retrieval_similarity,
)
from .tokens import SourceToken, TokenKind

__version__ = "0.1.0"
