"""The five candidate membership models.

M1  membership by distance: argmax cosine against representative class
    vectors.
M2  membership by dissimilar exclusion: the instance joins a class's seed
    set; if the element whose removal most improves cohesion is a seed
    (not the instance), the instance belongs.
M3  set expansion: seed senses are located in the taxonomy, a common
    rooted subtree is chosen, and its gazetteer (minus seeds,
    intersected with the candidate pool) becomes the class's words.
M4  semi-supervised spherical k-means over seeds + candidates, clusters
    mapped to classes by seed voting with similarity-based resolution.
M5  as M4 with an average-linkage hierarchical cut instead of k-means.

All models are deterministic; every argmax/argmin tie-break is pinned
(lexicographic token/class id, lowest index).  M1/M2/M3 are pure
per-instance functions; M4/M5 clustering runs in the `_kernels` backend.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .embeddings import EmbeddingStore, cosine, unit_rows
from .errors import DegenerateVectorError
from .ontology import ClassVector, Ontology
from .taxonomy import (
    VIRTUAL_ROOT,
    TaxonomyStore,
    lowest_common_ancestor,
    senses_of,
    subtree_lemmas,
)

log = logging.getLogger(__name__)

MODEL_TAGS = ("M1", "M2", "M3", "M4", "M5")
ENSEMBLE_TAG = "ensemble"


@dataclass
class ModelOutput:
    """Per-model memberships: instance token -> {class id: confidence}."""

    model_tag: str
    memberships: dict[str, dict[str, float]] = field(default_factory=dict)

    def add(self, instance: str, class_id: str, confidence: float) -> None:
        self.memberships.setdefault(instance, {})[class_id] = float(confidence)

    def classes_for(self, instance: str) -> dict[str, float]:
        return self.memberships.get(instance, {})

    def words_for_class(self, class_id: str) -> set[str]:
        return {
            inst for inst, classes in self.memberships.items() if class_id in classes
        }


@dataclass
class ClusterAssignment:
    clusters: list[set[str]]
    cluster_to_class: dict[int, str]


# ---------------------------------------------------------------------------
# M1: membership by distance


def m1_assign(
    instance: str, class_vectors: Sequence[ClassVector], store: EmbeddingStore
) -> tuple[str, float] | None:
    """Closest class by cosine; None signals an out-of-vocabulary instance.

    Ties break to the lexicographically smaller class id.
    """
    vec = store.get(instance)
    if vec is None:
        return None
    if not class_vectors:
        raise ValueError("at least one class vector is required")
    best_id = None
    best_sim = -np.inf
    for cv in sorted(class_vectors, key=lambda c: c.class_id):
        sim = cosine(vec, cv.vector)
        if sim > best_sim:
            best_sim = sim
            best_id = cv.class_id
    return best_id, float(best_sim)


def run_m1(
    instances: Iterable[str],
    class_vectors: Sequence[ClassVector],
    store: EmbeddingStore,
) -> ModelOutput:
    out = ModelOutput("M1")
    for instance in instances:
        hit = m1_assign(instance, class_vectors, store)
        if hit is not None:
            out.add(instance, hit[0], hit[1])
    return out


# ---------------------------------------------------------------------------
# M2: membership by dissimilar exclusion


def _exclusion_scores(
    members: Sequence[tuple[str, np.ndarray]]
) -> tuple[str, dict[str, float]]:
    """Excluded member plus every member's similarity to the set mean."""
    if len(members) < 3:
        raise ValueError(f"exclusion needs at least 3 members, got {len(members)}")
    mat = np.vstack([vec for _, vec in members]).astype(np.float64)
    mean = mat.mean(axis=0)
    if np.all(mean == 0.0):
        raise DegenerateVectorError("member mean is the zero vector")
    sims = {tok: cosine(vec, mean) for tok, vec in members}
    excluded = min(sims, key=lambda tok: (sims[tok], tok))
    return excluded, sims


def exclusion(members: Sequence[tuple[str, np.ndarray]]) -> str:
    """The member whose removal most increases set cohesion: the one with
    the lowest cosine similarity to the member mean (lexicographic
    tie-break).  Requires at least 3 members."""
    excluded, _ = _exclusion_scores(members)
    return excluded


def m2_memberships(
    instance: str,
    onto: Ontology,
    store: EmbeddingStore,
    min_seeds: int = 2,
    _skip_warned: set[str] | None = None,
) -> dict[str, float] | None:
    """Classes whose seed set keeps its cohesion better with the instance
    inside than one of its own seeds; None signals an OOV instance.

    Confidence is the margin by which the instance avoids exclusion:
    its similarity to the augmented-set mean minus the excluded seed's,
    clamped to [0, 1].
    """
    vec = store.get(instance)
    if vec is None:
        return None
    result: dict[str, float] = {}
    for cid in onto.class_ids():
        seeds = [
            (s, sv)
            for s in sorted(onto.classes[cid].seeds)
            if (sv := store.get(s)) is not None
        ]
        if len(seeds) < min_seeds:
            if _skip_warned is None or cid not in _skip_warned:
                log.warning(
                    "M2: class %r has %d usable seeds (< %d), skipped",
                    cid,
                    len(seeds),
                    min_seeds,
                )
                if _skip_warned is not None:
                    _skip_warned.add(cid)
            continue
        excluded, sims = _exclusion_scores(seeds + [(instance, vec)])
        if excluded != instance:
            margin = sims[instance] - sims[excluded]
            result[cid] = float(np.clip(margin, 0.0, 1.0))
    return result


def run_m2(
    instances: Iterable[str],
    onto: Ontology,
    store: EmbeddingStore,
    min_seeds: int = 2,
) -> ModelOutput:
    out = ModelOutput("M2")
    warned: set[str] = set()
    for instance in instances:
        classes = m2_memberships(instance, onto, store, min_seeds, _skip_warned=warned)
        if classes:
            for cid, conf in classes.items():
                out.add(instance, cid, conf)
    return out


# ---------------------------------------------------------------------------
# M3: set expansion over the taxonomy


def _lca_depth(tax: TaxonomyStore, a: str, b: str) -> int:
    lca = lowest_common_ancestor(tax, a, b)
    return -1 if lca == VIRTUAL_ROOT else tax.depth[lca]


def _choose_sense(tax: TaxonomyStore, word: str, others: list[list[str]]) -> str:
    """The sense of `word` whose LCAs with the other words' best senses are
    deepest on average (lexicographic sense-id tie-break)."""
    best_sense = None
    best_score = -np.inf
    for sense in senses_of(tax, word):
        total = 0.0
        for other_senses in others:
            total += max(_lca_depth(tax, sense, o) for o in other_senses)
        score = total / len(others) if others else 0.0
        if score > best_score:
            best_score = score
            best_sense = sense
    assert best_sense is not None
    return best_sense


def m3_expand(
    onto: Ontology,
    tax: TaxonomyStore,
    candidates: Sequence[str],
) -> dict[str, set[str]]:
    """Per class: the gazetteer of the rooted subtree shared by the seeds'
    chosen senses, minus the seeds, intersected with the candidates.

    Classes with fewer than 2 synset-bearing seeds are skipped; a class
    whose root degenerates to the virtual super-root (disjoint
    components) yields the empty set with a warning.
    """
    candidate_set = set(candidates)
    result: dict[str, set[str]] = {}
    for cid in onto.class_ids():
        seeds = sorted(onto.classes[cid].seeds)
        with_senses = []
        for seed in seeds:
            if senses_of(tax, seed):
                with_senses.append(seed)
            else:
                log.warning("M3: seed %r of class %r has no synset, skipped", seed, cid)
        if len(with_senses) < 2:
            log.warning(
                "M3: class %r has %d synset-bearing seeds (< 2), skipped",
                cid,
                len(with_senses),
            )
            continue
        chosen: list[str] = []
        for word in with_senses:
            others = [senses_of(tax, w) for w in with_senses if w != word]
            chosen.append(_choose_sense(tax, word, others))
        root = chosen[0]
        for sense in chosen[1:]:
            root = lowest_common_ancestor(tax, root, sense)
        if root == VIRTUAL_ROOT:
            log.warning(
                "M3: class %r expansion degenerated (seed senses share no ancestor)",
                cid,
            )
            result[cid] = set()
            continue
        gazetteer = subtree_lemmas(tax, root)
        result[cid] = (gazetteer - onto.classes[cid].seeds) & candidate_set
    return result


def run_m3(
    candidates: Sequence[str],
    onto: Ontology,
    tax: TaxonomyStore,
) -> ModelOutput:
    out = ModelOutput("M3")
    for cid, words in m3_expand(onto, tax, candidates).items():
        for word in words:
            out.add(word, cid, 1.0)
    return out


# ---------------------------------------------------------------------------
# Clustering (M4, M5)


def _kmeans_plusplus(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding with squared chordal distance 2(1 - cos)."""
    n = points.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = 2.0 * (1.0 - points @ points[chosen[0]])
    d2 = np.maximum(d2, 0.0)
    while len(chosen) < k:
        total = float(d2.sum())
        if total <= 0.0:
            # all remaining points coincide with a centroid
            nxt = next(i for i in range(n) if i not in set(chosen))
        else:
            nxt = int(rng.choice(n, p=d2 / total))
        chosen.append(nxt)
        d2 = np.minimum(d2, np.maximum(2.0 * (1.0 - points @ points[nxt]), 0.0))
    return points[chosen].copy()


def kmeans(
    vectors: Sequence[np.ndarray] | np.ndarray,
    k: int,
    rng_seed: int,
    max_iters: int = 300,
) -> list[int]:
    """Spherical k-means (Lloyd's algorithm on length-normalized vectors),
    k-means++ initialization, deterministic for a given seed."""
    points = unit_rows(np.vstack(vectors) if not isinstance(vectors, np.ndarray) else vectors)
    n = points.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for {n} vectors")
    rng = np.random.default_rng(rng_seed)
    centroids = _kmeans_plusplus(points, k, rng)
    labels, _ = _kernels.lloyd(points, centroids, max_iters)
    return [int(x) for x in labels]


def agglomerative_cut(
    vectors: Sequence[np.ndarray] | np.ndarray, k: int
) -> list[int]:
    """Average-linkage agglomerative clustering under cosine distance,
    merged until exactly k clusters remain."""
    points = unit_rows(np.vstack(vectors) if not isinstance(vectors, np.ndarray) else vectors)
    n = points.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for {n} vectors")
    dist = 1.0 - points @ points.T
    labels = _kernels.average_linkage(dist, k)
    return [int(x) for x in labels]


def _cluster_class_similarity(
    cluster: set[str], class_vec: ClassVector, store: EmbeddingStore
) -> float:
    """Aggregate similarity of a whole cluster (seeds and candidates alike)
    to one class vector."""
    total = 0.0
    for token in sorted(cluster):
        vec = store.get(token)
        if vec is not None:
            total += cosine(vec, class_vec.vector)
    return total


def assign_clusters(
    clusters: list[set[str]],
    onto: Ontology,
    class_vectors: dict[str, ClassVector],
    store: EmbeddingStore,
) -> ClusterAssignment:
    """Deterministic bijection cluster -> class.

    1. Each cluster claims the strict-majority winner of its seed votes.
    2. A tied vote is resolved by aggregate similarity over the tied,
       still-unassigned classes.
    3. A class claimed by several clusters goes to the claimant with the
       highest aggregate similarity; losers revert to unassigned.
    4. 2-3 repeat until an iteration assigns nothing new.
    5. Leftover clusters (including seedless ones) are matched to leftover
       classes greedily by descending aggregate similarity, ties by
       (cluster index, class id) ascending.
    """
    class_ids = onto.class_ids()
    n = len(clusters)
    if n != len(class_ids):
        raise ValueError(f"{n} clusters vs {len(class_ids)} classes: need a bijection")
    for cid in class_ids:
        if not onto.classes[cid].seeds:
            raise ValueError(f"class {cid!r} has no seeds to vote with")

    votes: list[dict[str, int]] = []
    for cluster in clusters:
        v = {
            cid: len(cluster & onto.classes[cid].seeds)
            for cid in class_ids
            if cluster & onto.classes[cid].seeds
        }
        votes.append(v)
    # argmax vote classes per cluster; empty when no seeds voted
    vote_winners: list[list[str]] = []
    for v in votes:
        if not v:
            vote_winners.append([])
        else:
            top = max(v.values())
            vote_winners.append(sorted(c for c, cnt in v.items() if cnt == top))

    simsum: dict[tuple[int, str], float] = {}

    def sim(i: int, cid: str) -> float:
        key = (i, cid)
        if key not in simsum:
            simsum[key] = _cluster_class_similarity(clusters[i], class_vectors[cid], store)
        return simsum[key]

    assignment: dict[int, str] = {}
    assigned_classes: set[str] = set()
    max_rounds = 2 * len(class_ids) + 1
    for _ in range(max_rounds):
        unassigned = [i for i in range(n) if i not in assignment]
        open_classes = [c for c in class_ids if c not in assigned_classes]
        if not unassigned:
            break
        # steps 1-2: current claims
        claims: dict[int, str] = {}
        for i in unassigned:
            winners = vote_winners[i]
            if not winners:
                continue
            if len(winners) == 1:
                if winners[0] not in assigned_classes:
                    claims[i] = winners[0]
            else:
                pool = [c for c in winners if c not in assigned_classes]
                if pool:
                    claims[i] = min(pool, key=lambda c: (-sim(i, c), c))
        # step 3: resolve contests, finalize the round's claims
        new_assignments = 0
        for cid in open_classes:
            claimants = sorted(i for i, c in claims.items() if c == cid)
            if not claimants:
                continue
            winner = min(claimants, key=lambda i: (-sim(i, cid), i))
            assignment[winner] = cid
            assigned_classes.add(cid)
            new_assignments += 1
        if new_assignments == 0:
            break
    # step 5: greedy matching of the remainder
    remaining_clusters = [i for i in range(n) if i not in assignment]
    remaining_classes = [c for c in class_ids if c not in assigned_classes]
    pairs = sorted(
        ((i, c) for i in remaining_clusters for c in remaining_classes),
        key=lambda ic: (-sim(ic[0], ic[1]), ic[0], ic[1]),
    )
    for i, cid in pairs:
        if i not in assignment and cid not in assigned_classes:
            assignment[i] = cid
            assigned_classes.add(cid)
    assert len(assignment) == n and len(assigned_classes) == n
    return ClusterAssignment(clusters=clusters, cluster_to_class=assignment)


def _clustered_output(
    tag: str,
    labels: list[int],
    pool: list[str],
    candidates: set[str],
    onto: Ontology,
    class_vectors: dict[str, ClassVector],
    store: EmbeddingStore,
) -> ModelOutput:
    k = len(onto.class_ids())
    clusters: list[set[str]] = [set() for _ in range(k)]
    for token, label in zip(pool, labels):
        clusters[label].add(token)
    if any(not c for c in clusters):
        raise RuntimeError(f"{tag}: clustering left an empty cluster, need {k} non-empty")
    assignment = assign_clusters(clusters, onto, class_vectors, store)
    out = ModelOutput(tag)
    for idx, cluster in enumerate(assignment.clusters):
        cid = assignment.cluster_to_class[idx]
        for token in sorted(cluster):
            if token in candidates:
                vec = store.get(token)
                out.add(token, cid, cosine(vec, class_vectors[cid].vector))
    return out


def _clustering_pool(
    candidates: Sequence[str], onto: Ontology, store: EmbeddingStore, tag: str
) -> tuple[list[str], set[str]] | None:
    """Seeds mixed with candidates, deduplicated, in a deterministic order.

    Seeds join the clustered pool but are never re-emitted as instances.
    """
    usable = [c for c in candidates if c in store]
    if not usable:
        log.warning("%s: no in-vocabulary candidates, empty output", tag)
        return None
    pool = list(usable)
    present = set(pool)
    for seed in sorted(onto.all_seeds()):
        if seed in store and seed not in present:
            pool.append(seed)
            present.add(seed)
    k = len(onto.class_ids())
    if len(pool) < k:
        log.warning("%s: pool of %d is smaller than %d classes, empty output", tag, len(pool), k)
        return None
    return pool, set(usable)


def m4_assign(
    onto: Ontology,
    store: EmbeddingStore,
    candidates: Sequence[str],
    class_vectors: dict[str, ClassVector],
    rng_seed: int = 42,
    max_iters: int = 300,
) -> ModelOutput:
    """Semi-supervised k-means population (k = number of classes)."""
    prep = _clustering_pool(candidates, onto, store, "M4")
    if prep is None:
        return ModelOutput("M4")
    pool, candidate_set = prep
    labels = kmeans(store.rows_for(pool), len(onto.class_ids()), rng_seed, max_iters)
    return _clustered_output("M4", labels, pool, candidate_set, onto, class_vectors, store)


def m5_assign(
    onto: Ontology,
    store: EmbeddingStore,
    candidates: Sequence[str],
    class_vectors: dict[str, ClassVector],
) -> ModelOutput:
    """Semi-supervised hierarchical-clustering population (cut at k classes)."""
    prep = _clustering_pool(candidates, onto, store, "M5")
    if prep is None:
        return ModelOutput("M5")
    pool, candidate_set = prep
    labels = agglomerative_cut(store.rows_for(pool), len(onto.class_ids()))
    return _clustered_output("M5", labels, pool, candidate_set, onto, class_vectors, store)
