import numpy as np
import pytest

from ontopop.embeddings import EmbeddingStore
from ontopop.ontology import Ontology, OntologyClass
from ontopop.taxonomy import Synset, build_taxonomy


def make_store(table: dict[str, list[float]]) -> EmbeddingStore:
    tokens = list(table)
    return EmbeddingStore.from_rows(tokens, np.array([table[t] for t in tokens], dtype=float))


def make_ontology(seed_table: dict[str, list[str]]) -> Ontology:
    classes = {
        cid: OntologyClass(id=cid, label=cid, parent=None, seeds=set(seeds))
        for cid, seeds in seed_table.items()
    }
    return Ontology(classes=classes)


def make_taxonomy(edges: dict[str, tuple[list[str], list[str]]]):
    """edges: id -> (lemmas, hypernyms)."""
    return build_taxonomy(
        {
            sid: Synset(id=sid, lemmas=frozenset(lemmas), hypernyms=frozenset(hypers))
            for sid, (lemmas, hypers) in edges.items()
        }
    )


@pytest.fixture
def toy_taxonomy():
    """Eight synsets: entity > (animal > mammal > dog/cat/wolf, furniture > chair)."""
    return make_taxonomy(
        {
            "syn-entity": (["entity"], []),
            "syn-animal": (["animal"], ["syn-entity"]),
            "syn-mammal": (["mammal"], ["syn-animal"]),
            "syn-dog": (["dog"], ["syn-mammal"]),
            "syn-cat": (["cat"], ["syn-mammal"]),
            "syn-wolf": (["wolf"], ["syn-mammal"]),
            "syn-furniture": (["furniture"], ["syn-entity"]),
            "syn-chair": (["chair"], ["syn-furniture"]),
        }
    )


def random_unit_rows(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    rows = rng.standard_normal((n, dim))
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


@pytest.fixture(scope="session")
def default_fixture(tmp_path_factory):
    """The generator's default-parameter fixture set (3 classes, 50 per
    class, noise 0.1, seed 7, dim 200, vocab 1000), built once."""
    from ontopop.fixtures import generate_fixture

    root = tmp_path_factory.mktemp("fixture-default")
    return generate_fixture(root, n_classes=3, per_class=50, noise=0.1, seed=7)


@pytest.fixture(scope="session")
def small_fixture(tmp_path_factory):
    """A fast, scaled-down fixture set for CLI plumbing tests."""
    from ontopop.fixtures import generate_fixture

    root = tmp_path_factory.mktemp("fixture-small")
    return generate_fixture(
        root, n_classes=3, per_class=8, noise=0.05, seed=5, dim=16, vocab_size=150
    )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for status in ("passed", "failed"):
        for report in terminalreporter.stats.get(status, []):
            if "test_acceptance" not in report.nodeid:
                continue
            name = report.nodeid.split("::")[-1]
            lines.append((name, status.upper()))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, status in sorted(lines):
            terminalreporter.write_line(f"{status:<6} {name}")
