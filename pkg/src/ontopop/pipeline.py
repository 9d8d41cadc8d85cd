"""End-to-end drivers behind the CLI commands.

populate: load artifacts -> extract candidates -> class vectors ->
M1..M5 (M3 only when a taxonomy is configured) -> weights (explicit, or
derived from validation-split F1 when a gold standard is present) ->
ensemble assignment over the test/candidate pool -> write the populated
ontology, per-model TSVs and, when gold is present, the score report.

All randomness is seeded through the config, and every output file is
canonically ordered, so identical configs produce byte-identical runs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import ensemble as ens
from .config import RunConfig
from .corpus import InstanceCorpus, extract_candidates, read_corpus_dir
from .embeddings import EmbeddingStore, load_model
from .ensemble import EnsembleWeights
from .errors import ConfigError
from .evaluation import (
    EvalReport,
    evaluate_models,
    format_table,
    restrict_gold,
    split_corpus,
)
from .models import (
    ENSEMBLE_TAG,
    MODEL_TAGS,
    ModelOutput,
    m4_assign,
    m5_assign,
    run_m1,
    run_m2,
    run_m3,
)
from .ontology import (
    ClassVector,
    Ontology,
    derive_all_class_vectors,
    load_gold,
    load_ontology,
    save_population,
)
from .taxonomy import TaxonomyStore, load_taxonomy

log = logging.getLogger(__name__)


@dataclass
class LoadedInputs:
    store: EmbeddingStore
    onto: Ontology
    class_vectors: dict[str, ClassVector]
    corpus: InstanceCorpus
    taxonomy: TaxonomyStore | None
    gold: dict[str, set[str]] | None


@dataclass
class RunResult:
    onto: Ontology
    outputs: list[ModelOutput]
    assignments: dict[str, tuple[str, float, list[str]]]
    pool: list[str]
    report: EvalReport | None
    written: list[Path]


def load_inputs(cfg: RunConfig) -> LoadedInputs:
    cfg.require_inputs("embedding_path", "ontology_path", "corpus_dir")
    store = load_model(cfg.embedding_path, cfg.embedding_format)
    onto = load_ontology(cfg.ontology_path, strict=cfg.strict)
    class_vectors = derive_all_class_vectors(onto, store, cfg.class_vector_method)
    corpus = extract_candidates(
        read_corpus_dir(cfg.corpus_dir, cfg.lowercase),
        store,
        onto,
        min_count=cfg.min_count,
        lowercase=cfg.lowercase,
    )
    taxonomy = None
    if cfg.taxonomy_path is not None:
        cfg.require_inputs("taxonomy_path")
        taxonomy = load_taxonomy(cfg.taxonomy_path)
    gold = None
    if cfg.gold_path is not None:
        cfg.require_inputs("gold_path")
        gold = load_gold(cfg.gold_path)
    return LoadedInputs(store, onto, class_vectors, corpus, taxonomy, gold)


def run_models(
    pool: list[str],
    inputs: LoadedInputs,
    cfg: RunConfig,
) -> list[ModelOutput]:
    """All five model outputs over one candidate pool, fixed M1..M5 order.

    Without a taxonomy, M3 contributes an empty output (all-zero rows in
    the membership matrices).
    """
    vectors = [inputs.class_vectors[cid] for cid in inputs.onto.class_ids()]
    outputs = [
        run_m1(pool, vectors, inputs.store),
        run_m2(pool, inputs.onto, inputs.store, cfg.exclusion_min_seeds),
    ]
    if inputs.taxonomy is not None:
        outputs.append(run_m3(pool, inputs.onto, inputs.taxonomy))
    else:
        log.warning("no taxonomy configured: M3 skipped (empty output)")
        outputs.append(ModelOutput("M3"))
    outputs.append(
        m4_assign(
            inputs.onto,
            inputs.store,
            pool,
            inputs.class_vectors,
            rng_seed=cfg.kmeans_seed,
            max_iters=cfg.kmeans_max_iters,
        )
    )
    outputs.append(m5_assign(inputs.onto, inputs.store, pool, inputs.class_vectors))
    return outputs


def derive_weights(
    inputs: LoadedInputs, cfg: RunConfig, validation_pool: list[str]
) -> tuple[EnsembleWeights, str, list[float]]:
    """Explicit weights when configured, else weights from validation F1."""
    if cfg.weights is not None:
        weights = EnsembleWeights(
            weights=np.asarray(cfg.weights), model_tags=MODEL_TAGS
        )
        return weights, "explicit", [float(x) for x in weights.weights]
    if inputs.gold is None:
        raise ConfigError(
            "no weight source: supply explicit weights in the config or a gold "
            "standard so weights can be derived from the validation split"
        )
    outputs = run_models(validation_pool, inputs, cfg)
    report = evaluate_models(outputs, restrict_gold(inputs.gold, validation_pool), inputs.onto)
    f1s = [report.per_model[tag].f1 for tag in MODEL_TAGS]
    log.info("validation F1 per model: %s", ", ".join(f"{tag}={v:.3f}" for tag, v in zip(MODEL_TAGS, f1s)))
    weights = ens.compute_weights(f1s, MODEL_TAGS)
    return weights, "validation", [float(x) for x in weights.weights]


def ensemble_assignments(
    pool: list[str],
    outputs: list[ModelOutput],
    weights: EnsembleWeights,
    class_ids: list[str],
    threshold: float,
) -> dict[str, tuple[str, float, list[str]]]:
    """Instance -> (winning class, ensemble score, models that voted for it)."""
    assignments: dict[str, tuple[str, float, list[str]]] = {}
    for instance in pool:
        matrix = ens.membership_matrix(instance, outputs, class_ids)
        decision = ens.assign(ens.score(weights, matrix), class_ids, threshold)
        if decision is None:
            continue
        cid, sc = decision
        voters = [o.model_tag for o in outputs if cid in o.classes_for(instance)]
        assignments[instance] = (cid, sc, voters)
    return assignments


def _write_tsv(path: Path, output: ModelOutput) -> None:
    lines = []
    for instance in sorted(output.memberships):
        for cid in sorted(output.memberships[instance]):
            lines.append(f"{instance}\t{cid}\t{output.memberships[instance][cid]:.6f}")
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def _ensemble_output(assignments: dict[str, tuple[str, float, list[str]]]) -> ModelOutput:
    out = ModelOutput(ENSEMBLE_TAG)
    for instance, (cid, sc, _) in assignments.items():
        out.add(instance, cid, sc)
    return out


def run_pipeline(cfg: RunConfig, populate: bool) -> RunResult:
    """Shared engine for the populate and evaluate commands."""
    inputs = load_inputs(cfg)
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    candidates = inputs.corpus.candidates

    if not candidates:
        log.warning("no candidates extracted: population is empty")
        if populate:
            path = out_dir / "populated.json"
            save_population(inputs.onto, path)
            written.append(path)
            for tag in MODEL_TAGS + (ENSEMBLE_TAG,):
                path = out_dir / f"{tag.lower()}.tsv"
                _write_tsv(path, ModelOutput(tag))
                written.append(path)
        return RunResult(inputs.onto, [], {}, [], None, written)

    split_sizes = None
    if inputs.gold is not None:
        train, validation, test = split_corpus(
            candidates, rng_seed=cfg.split_seed
        )
        split_sizes = (len(train), len(validation), len(test))
        pool = test
    else:
        validation = []
        pool = list(candidates)

    weights, weights_source, weight_values = derive_weights(inputs, cfg, validation)

    outputs = run_models(pool, inputs, cfg)
    class_ids = inputs.onto.class_ids()
    assignments = ensemble_assignments(pool, outputs, weights, class_ids, cfg.threshold)

    report = None
    if inputs.gold is not None:
        rows = outputs + [_ensemble_output(assignments)]
        report = evaluate_models(rows, restrict_gold(inputs.gold, pool), inputs.onto)
        report.split_sizes = split_sizes
        report.weights = weight_values
        report.weights_source = weights_source

    if populate:
        already = {
            p.instance for cls in inputs.onto.classes.values() for p in cls.populated
        }
        for instance in sorted(assignments):
            cid, sc, voters = assignments[instance]
            if instance not in already:
                inputs.onto.add_instance(cid, instance, voters, sc)
        path = out_dir / "populated.json"
        save_population(inputs.onto, path)
        written.append(path)
        for output in outputs + [_ensemble_output(assignments)]:
            path = out_dir / f"{output.model_tag.lower()}.tsv"
            _write_tsv(path, output)
            written.append(path)

    if report is not None:
        path = out_dir / "report.json"
        path.write_text(report.to_json(), encoding="utf-8")
        written.append(path)
        path = out_dir / "report.txt"
        path.write_text(format_table(report), encoding="utf-8")
        written.append(path)

    return RunResult(inputs.onto, outputs, assignments, pool, report, written)
