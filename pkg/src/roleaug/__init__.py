"""Role-aware selective text augmentation for low-resource text classification.

Words are scored per class on two axes, statistical correlation (weighted
log-likelihood ratio) and semantic similarity (cosine to the class label
vector), then split into Gold / Venture / Bonus / Trivial roles that steer
which tokens each augmentation operation may touch.
"""

__version__ = "0.1.0"

from .augment import (
    ALL_OPS,
    DEFAULT_OPS,
    STRENGTH_GRID,
    AugmentConfig,
    AugmentedDoc,
    Edit,
    apply_edits,
    augment_corpus,
    derive_seed,
    positive_selection,
    random_edit,
    selective_deletion,
    selective_insertion,
    selective_replacement,
    write_augmented_jsonl,
)
from .corpus import (
    ClassCounts,
    Document,
    LabeledCorpus,
    Token,
    TokenKind,
    build_corpus,
    class_stats,
    detokenize,
    load_corpus,
    tokenize,
)
from .embeddings import (
    EmbeddingTable,
    Neighbor,
    cosine_similarity,
    label_vector,
    load_embeddings,
    nearest_neighbors,
)
from .errors import ConfigError, DataError, RoleaugError
from .evalkit import (
    ExperimentReport,
    NbModel,
    evaluate,
    predict,
    run_experiment,
    train_nb,
)
from .roles import (
    DocRoles,
    Role,
    RoleAssignment,
    ScoreTable,
    Thresholds,
    assign_corpus_roles,
    assign_roles,
    build_score_table,
    compute_thresholds_global,
    compute_thresholds_local,
    role_report,
    similarity_score,
    wllr_score,
)
