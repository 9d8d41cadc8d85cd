"""Command-line driver.

Subcommands: inspect, populate, evaluate, gen-fixture.  Options come
from a JSON config file (--config) with flag overrides on top.  Exit
codes: 0 success, 1 runtime failure, 2 usage/configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import RunConfig, load_config
from .errors import ConfigError, OntopopError
from .evaluation import format_table
from .fixtures import generate_fixture
from .ontology import load_ontology
from .pipeline import run_pipeline
from .embeddings import load_model

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _add_common_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its keys")
    p.add_argument("--embedding", help="embedding model path")
    p.add_argument(
        "--format",
        dest="embedding_format",
        choices=("text", "binary", "auto"),
        help="embedding file format (default: auto-sniff)",
    )
    p.add_argument("--ontology", help="ontology JSON path")
    p.add_argument("--corpus", help="directory of UTF-8 .txt documents")
    p.add_argument("--taxonomy", help="taxonomy JSON path (enables M3)")
    p.add_argument("--gold", help="gold-standard JSON path")
    p.add_argument("--output", help="output directory")
    p.add_argument("--min-count", type=int, dest="min_count")
    p.add_argument("--kmeans-seed", type=int, dest="kmeans_seed")
    p.add_argument("--split-seed", type=int, dest="split_seed")
    p.add_argument("--threshold", type=float)
    p.add_argument(
        "--weights",
        help="explicit comma-separated 5-vector of model weights",
    )
    p.add_argument(
        "--class-vector-method",
        dest="class_vector_method",
        choices=("centroid", "median"),
    )
    p.add_argument("--strict", action="store_true", default=None)


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    weights = None
    if args.weights is not None:
        try:
            weights = [float(x) for x in args.weights.split(",")]
        except ValueError:
            raise ConfigError(f"--weights must be comma-separated numbers, got {args.weights!r}")
    cfg = cfg.merged(
        embedding_path=args.embedding,
        embedding_format=args.embedding_format,
        ontology_path=args.ontology,
        corpus_dir=args.corpus,
        taxonomy_path=args.taxonomy,
        gold_path=args.gold,
        output_dir=args.output,
        min_count=args.min_count,
        kmeans_seed=args.kmeans_seed,
        split_seed=args.split_seed,
        threshold=args.threshold,
        weights=weights,
        class_vector_method=args.class_vector_method,
        strict=args.strict,
    )
    return cfg.finalize()


def cmd_inspect(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    cfg.require_inputs("embedding_path", "ontology_path")
    store = load_model(cfg.embedding_path, cfg.embedding_format)
    onto = load_ontology(cfg.ontology_path, strict=cfg.strict)
    print(f"dim={store.dimension} vocab={len(store)}")
    for cid in onto.class_ids():
        seeds = sorted(onto.classes[cid].seeds)
        oov = [s for s in seeds if s not in store]
        print(f"class {cid}: seeds={len(seeds)} oov={len(oov)}")
        if oov:
            print(f"warning: class {cid} has out-of-vocabulary seeds: {', '.join(oov)}")
    return EXIT_OK


def cmd_populate(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    result = run_pipeline(cfg, populate=True)
    populated = sum(len(c.populated) for c in result.onto.classes.values())
    print(f"pool={len(result.pool)} populated={populated}")
    for cid in result.onto.class_ids():
        print(f"class {cid}: +{len(result.onto.classes[cid].populated)}")
    for path in result.written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    if cfg.gold_path is None:
        raise ConfigError("evaluate requires a gold standard (--gold or config key)")
    result = run_pipeline(cfg, populate=False)
    if result.report is None:
        raise ConfigError("nothing to evaluate: the corpus yielded no candidates")
    print(format_table(result.report), end="")
    for path in result.written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_gen_fixture(args: argparse.Namespace) -> int:
    paths = generate_fixture(
        args.out_dir,
        n_classes=args.classes,
        per_class=args.per_class,
        noise=args.noise,
        seed=args.seed,
        dim=args.dim,
        vocab_size=args.vocab,
    )
    print(f"fixture written to {paths.root}")
    print(f"config: {paths.config}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ontopop",
        description="Semi-supervised ontology instance population from word embeddings",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", help="report on the embedding model and ontology")
    _add_common_options(p)
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("populate", help="run the full population pipeline")
    _add_common_options(p)
    p.set_defaults(func=cmd_populate)

    p = sub.add_parser("evaluate", help="score the models against a gold standard")
    _add_common_options(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gen-fixture", help="generate a synthetic, self-consistent fixture set")
    p.add_argument("out_dir", help="directory to write the fixture into")
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--per-class", type=int, dest="per_class", default=50)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--dim", type=int, default=200)
    p.add_argument("--vocab", type=int, default=1000)
    p.set_defaults(func=cmd_gen_fixture)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s"
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OntopopError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
