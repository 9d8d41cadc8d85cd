"""Semi-supervised ontology instance population from word-vector embeddings.

Five candidate membership models (distance, dissimilar exclusion, set
expansion, k-means, hierarchical clustering) plus an F1-weighted
ensemble, with parsers for word2vec-format embedding files, an ontology
and taxonomy store, and a full evaluation harness.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .embeddings import (
    EmbeddingStore,
    cosine,
    load_binary_model,
    load_model,
    load_text_model,
    save_binary_model,
    save_text_model,
)
from .ensemble import EnsembleWeights, assign, compute_weights, membership_matrix, score
from .errors import (
    ConfigError,
    DegenerateVectorError,
    DerivationError,
    FormatError,
    OntologyError,
    OntopopError,
    TaxonomyError,
)
from .evaluation import class_precision_recall, evaluate_models, f1, split_corpus
from .models import (
    MODEL_TAGS,
    ModelOutput,
    agglomerative_cut,
    assign_clusters,
    exclusion,
    kmeans,
    m1_assign,
    m2_memberships,
    m3_expand,
    m4_assign,
    m5_assign,
)
from .ontology import (
    ClassVector,
    Ontology,
    OntologyClass,
    derive_class_vector,
    load_gold,
    load_ontology,
    save_population,
)
from .taxonomy import (
    VIRTUAL_ROOT,
    TaxonomyStore,
    load_taxonomy,
    lowest_common_ancestor,
    senses_of,
    subtree_lemmas,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "MODEL_TAGS",
    "VIRTUAL_ROOT",
    "ClassVector",
    "ConfigError",
    "DegenerateVectorError",
    "DerivationError",
    "EmbeddingStore",
    "EnsembleWeights",
    "FormatError",
    "ModelOutput",
    "Ontology",
    "OntologyClass",
    "OntologyError",
    "OntopopError",
    "TaxonomyError",
    "TaxonomyStore",
    "agglomerative_cut",
    "assign",
    "assign_clusters",
    "class_precision_recall",
    "compute_weights",
    "cosine",
    "derive_class_vector",
    "evaluate_models",
    "exclusion",
    "f1",
    "kmeans",
    "load_binary_model",
    "load_gold",
    "load_model",
    "load_ontology",
    "load_taxonomy",
    "load_text_model",
    "lowest_common_ancestor",
    "m1_assign",
    "m2_memberships",
    "m3_expand",
    "m4_assign",
    "m5_assign",
    "membership_matrix",
    "save_binary_model",
    "save_population",
    "save_text_model",
    "score",
    "senses_of",
    "split_corpus",
    "subtree_lemmas",
    "__version__",
]
