import json

import numpy as np
import pytest

from ontopop.errors import DerivationError, OntologyError
from ontopop.ontology import (
    Ontology,
    OntologyClass,
    PopulatedInstance,
    derive_class_vector,
    load_gold,
    load_ontology,
    save_population,
)

from conftest import make_store


def write_ontology(path, classes):
    path.write_text(json.dumps({"classes": classes}), encoding="utf-8")


def cls_entry(cid, seeds, parent=None, populated=()):
    return {
        "id": cid,
        "label": cid.title(),
        "parent": parent,
        "seeds": seeds,
        "populated": list(populated),
    }


class TestLoad:
    def test_three_class_fixture(self, tmp_path):
        p = tmp_path / "o.json"
        write_ontology(
            p,
            [
                cls_entry("a", ["s1", "s2", "s3", "s4"]),
                cls_entry("b", ["t1", "t2", "t3", "t4"]),
                cls_entry("c", ["u1", "u2", "u3", "u4"], parent="a"),
            ],
        )
        onto = load_ontology(p)
        assert onto.class_ids() == ["a", "b", "c"]
        assert onto.classes["c"].parent == "a"
        assert len(onto.classes["a"].seeds) == 4

    def test_parent_cycle_named(self, tmp_path):
        p = tmp_path / "o.json"
        write_ontology(
            p,
            [
                cls_entry("a", ["x"], parent="b"),
                cls_entry("b", ["y"], parent="a"),
            ],
        )
        with pytest.raises(OntologyError, match="cycle") as exc:
            load_ontology(p)
        assert "a" in str(exc.value) and "b" in str(exc.value)

    def test_duplicate_class_id(self, tmp_path):
        p = tmp_path / "o.json"
        write_ontology(p, [cls_entry("a", ["x"]), cls_entry("a", ["y"])])
        with pytest.raises(OntologyError, match="duplicate"):
            load_ontology(p)

    def test_dangling_parent(self, tmp_path):
        p = tmp_path / "o.json"
        write_ontology(p, [cls_entry("a", ["x"], parent="ghost")])
        with pytest.raises(OntologyError, match="missing parent"):
            load_ontology(p)

    def test_seed_overlap_warns_but_loads(self, tmp_path, caplog):
        p = tmp_path / "o.json"
        write_ontology(p, [cls_entry("a", ["shared"]), cls_entry("b", ["shared"])])
        with caplog.at_level("WARNING"):
            onto = load_ontology(p)
        assert len(onto.classes) == 2
        assert any("overlap" in r.message for r in caplog.records)

    def test_empty_seeds_warn_then_strict_error(self, tmp_path, caplog):
        p = tmp_path / "o.json"
        write_ontology(p, [cls_entry("a", [])])
        with caplog.at_level("WARNING"):
            load_ontology(p)
        assert any("empty seed set" in r.message for r in caplog.records)
        with pytest.raises(OntologyError, match="empty seed"):
            load_ontology(p, strict=True)

    def test_populated_duplicating_seed_rejected(self, tmp_path):
        p = tmp_path / "o.json"
        write_ontology(
            p,
            [
                cls_entry(
                    "a",
                    ["x"],
                    populated=[{"instance": "x", "models": ["M1"], "score": 0.5}],
                )
            ],
        )
        with pytest.raises(OntologyError, match="duplicate seeds"):
            load_ontology(p)

    def test_gold_file(self, tmp_path):
        p = tmp_path / "g.json"
        p.write_text(json.dumps({"classes": {"a": ["w1", "w2"], "b": []}}))
        gold = load_gold(p)
        assert gold == {"a": {"w1", "w2"}, "b": set()}


class TestClassVectors:
    def test_centroid_of_two_axes(self):
        store = make_store({"s1": [1, 0], "s2": [0, 1]})
        cls = OntologyClass("a", "A", None, {"s1", "s2"})
        cv = derive_class_vector(cls, store, "centroid")
        np.testing.assert_allclose(cv.vector, [0.5, 0.5])

    def test_single_seed_identity_both_methods(self):
        store = make_store({"s1": [0.3, -0.4, 0.5]})
        cls = OntologyClass("a", "A", None, {"s1"})
        for method in ("centroid", "median"):
            cv = derive_class_vector(cls, store, method)
            np.testing.assert_allclose(cv.vector, [0.3, -0.4, 0.5])

    def test_median_against_sort_oracle(self):
        rng = np.random.default_rng(9)
        rows = rng.standard_normal((5, 7))
        store = make_store({f"s{i}": rows[i].tolist() for i in range(5)})
        cls = OntologyClass("a", "A", None, {f"s{i}" for i in range(5)})
        cv = derive_class_vector(cls, store, "median")
        # brute force: per component, sort and take the middle element
        expected = np.array([sorted(rows[:, c])[2] for c in range(7)])
        np.testing.assert_allclose(cv.vector, expected)

    def test_centroid_permutation_invariant(self):
        rng = np.random.default_rng(10)
        rows = rng.standard_normal((6, 4))
        names = [f"s{i}" for i in range(6)]
        store = make_store(dict(zip(names, rows.tolist())))
        base = derive_class_vector(
            OntologyClass("a", "A", None, set(names)), store, "centroid"
        )
        shuffled = derive_class_vector(
            OntologyClass("a", "A", None, set(reversed(names))), store, "centroid"
        )
        np.testing.assert_array_equal(base.vector, shuffled.vector)

    def test_centroid_of_identical_vectors_is_exact(self):
        store = make_store({"s1": [0.25, 0.75], "s2": [0.25, 0.75], "s3": [0.25, 0.75]})
        cls = OntologyClass("a", "A", None, {"s1", "s2", "s3"})
        cv = derive_class_vector(cls, store, "centroid")
        np.testing.assert_array_equal(cv.vector, [0.25, 0.75])

    def test_oov_seed_skipped_with_warning(self, caplog):
        store = make_store({"s1": [1, 0]})
        cls = OntologyClass("a", "A", None, {"s1", "missing"})
        with caplog.at_level("WARNING"):
            cv = derive_class_vector(cls, store, "centroid")
        np.testing.assert_allclose(cv.vector, [1, 0])
        assert any("out of vocabulary" in r.message for r in caplog.records)

    def test_all_seeds_oov_fails(self):
        store = make_store({"other": [1, 0]})
        cls = OntologyClass("a", "A", None, {"missing1", "missing2"})
        with pytest.raises(DerivationError):
            derive_class_vector(cls, store, "centroid")


def random_ontology(rng) -> Ontology:
    n = int(rng.integers(1, 6))
    classes = {}
    ids = [f"c{i}" for i in range(n)]
    for i, cid in enumerate(ids):
        seeds = {f"{cid}-seed{j}" for j in range(rng.integers(1, 5))}
        populated = [
            PopulatedInstance(
                f"{cid}-pop{j}",
                sorted(rng.choice(["M1", "M2", "M3", "M4", "M5"], size=2, replace=False)),
                float(np.round(rng.uniform(), 6)),
            )
            for j in range(rng.integers(0, 4))
        ]
        populated.sort(key=lambda p: p.instance)
        parent = ids[rng.integers(0, i)] if i > 0 and rng.random() < 0.5 else None
        classes[cid] = OntologyClass(cid, cid.upper(), parent, seeds, populated)
    return Ontology(classes=classes)


class TestRoundTrip:
    def test_empty_population_round_trips(self, tmp_path):
        onto = Ontology(
            classes={"a": OntologyClass("a", "A", None, {"s1"}, [])}
        )
        p = tmp_path / "o.json"
        save_population(onto, p)
        assert load_ontology(p) == onto

    def test_populated_round_trip_and_digits(self, tmp_path):
        onto = Ontology(classes={"a": OntologyClass("a", "A", None, {"s1"}, [])})
        onto.add_instance("a", "w1", ["M1", "M5"], 0.561)
        onto.add_instance("a", "w2", ["M2"], 0.125)
        onto.add_instance("a", "w3", ["ensemble"], 0.333333)
        p = tmp_path / "o.json"
        save_population(onto, p)
        assert "0.561" in p.read_text()
        assert load_ontology(p) == onto

    def test_randomized_round_trips(self, tmp_path):
        rng = np.random.default_rng(17)
        for case in range(20):
            onto = random_ontology(rng)
            p = tmp_path / f"o{case}.json"
            save_population(onto, p)
            assert load_ontology(p) == onto

    def test_add_instance_refuses_seed(self):
        onto = Ontology(classes={"a": OntologyClass("a", "A", None, {"s1"}, [])})
        with pytest.raises(OntologyError):
            onto.add_instance("a", "s1", ["M1"], 0.9)
