import json

import numpy as np
import pytest

from ontopop.errors import FormatError, TaxonomyError
from ontopop.taxonomy import (
    VIRTUAL_ROOT,
    load_taxonomy,
    lowest_common_ancestor,
    senses_of,
    subtree_lemmas,
)

from conftest import make_taxonomy


def write_taxonomy(path, synsets):
    path.write_text(json.dumps({"synsets": synsets}), encoding="utf-8")


class TestLoad:
    def test_chain_depths(self, tmp_path):
        p = tmp_path / "t.json"
        write_taxonomy(
            p,
            [
                {"id": "animal", "lemmas": ["animal"], "hypernyms": []},
                {"id": "mammal", "lemmas": ["mammal"], "hypernyms": ["animal"]},
                {"id": "dog", "lemmas": ["dog"], "hypernyms": ["mammal"]},
                {"id": "cat", "lemmas": ["cat"], "hypernyms": ["mammal"]},
                {"id": "pug", "lemmas": ["pug"], "hypernyms": ["dog"]},
            ],
        )
        store = load_taxonomy(p)
        assert store.depth["animal"] == 0
        assert store.depth["dog"] == 2
        assert store.depth["pug"] == 3
        assert store.roots == ["animal"]

    def test_dangling_hypernym(self, tmp_path):
        p = tmp_path / "t.json"
        write_taxonomy(p, [{"id": "a", "lemmas": ["a"], "hypernyms": ["ghost"]}])
        with pytest.raises(TaxonomyError, match="missing hypernym"):
            load_taxonomy(p)

    def test_cycle_reports_witness(self, tmp_path):
        p = tmp_path / "t.json"
        write_taxonomy(
            p,
            [
                {"id": "a", "lemmas": ["a"], "hypernyms": ["b"]},
                {"id": "b", "lemmas": ["b"], "hypernyms": ["c"]},
                {"id": "c", "lemmas": ["c"], "hypernyms": ["a"]},
            ],
        )
        with pytest.raises(TaxonomyError, match="cycle") as exc:
            load_taxonomy(p)
        for node in ("a", "b", "c"):
            assert node in str(exc.value)

    def test_diamond_depth_is_shorter_path(self):
        # root -> left -> mid1 -> mid2 -> leaf  and  root -> leaf's other parent
        store = make_taxonomy(
            {
                "root": (["root"], []),
                "left": (["left"], ["root"]),
                "mid1": (["mid1"], ["left"]),
                "mid2": (["mid2"], ["mid1"]),
                "short": (["short"], ["root"]),
                "leaf": (["leaf"], ["mid2", "short"]),
            }
        )
        assert store.depth["leaf"] == 2  # via short, not the length-4 path

    def test_empty_lemmas_rejected(self, tmp_path):
        p = tmp_path / "t.json"
        write_taxonomy(p, [{"id": "a", "lemmas": [], "hypernyms": []}])
        with pytest.raises(FormatError, match="no lemmas"):
            load_taxonomy(p)


class TestSenses:
    def test_single_sense(self, toy_taxonomy):
        assert senses_of(toy_taxonomy, "dog") == ["syn-dog"]

    def test_absent_token(self, toy_taxonomy):
        assert senses_of(toy_taxonomy, "unicorn") == []

    def test_polysemous_ordered_by_id(self):
        store = make_taxonomy(
            {
                "z-sense": (["bank"], []),
                "a-sense": (["bank", "shore"], []),
            }
        )
        assert senses_of(store, "bank") == ["a-sense", "z-sense"]


class TestLCA:
    def test_ancestor_of_other(self, toy_taxonomy):
        assert lowest_common_ancestor(toy_taxonomy, "syn-animal", "syn-dog") == "syn-animal"

    def test_siblings(self, toy_taxonomy):
        assert lowest_common_ancestor(toy_taxonomy, "syn-dog", "syn-cat") == "syn-mammal"

    def test_cross_branch(self, toy_taxonomy):
        assert lowest_common_ancestor(toy_taxonomy, "syn-dog", "syn-chair") == "syn-entity"

    def test_symmetric(self, toy_taxonomy):
        ids = list(toy_taxonomy.synsets)
        for a in ids:
            for b in ids:
                assert lowest_common_ancestor(toy_taxonomy, a, b) == lowest_common_ancestor(
                    toy_taxonomy, b, a
                )

    def test_disjoint_components_meet_at_virtual_root(self):
        store = make_taxonomy(
            {
                "r1": (["r1"], []),
                "a": (["a"], ["r1"]),
                "r2": (["r2"], []),
                "b": (["b"], ["r2"]),
            }
        )
        assert lowest_common_ancestor(store, "a", "b") == VIRTUAL_ROOT

    def test_random_dags_match_bruteforce_oracle(self):
        rng = np.random.default_rng(23)
        for _ in range(30):
            n = 10
            ids = [f"n{i}" for i in range(n)]
            edges = {}
            for i, sid in enumerate(ids):
                # hypernyms only point at earlier nodes, guaranteeing a DAG
                pool = ids[:i]
                count = int(rng.integers(0, min(3, i) + 1)) if i else 0
                hypers = sorted(rng.choice(pool, size=count, replace=False)) if count else []
                edges[sid] = ([sid], list(hypers))
            store = make_taxonomy(edges)

            def ancestors(x):
                acc = set()
                stack = [x]
                while stack:
                    cur = stack.pop()
                    if cur in acc:
                        continue
                    acc.add(cur)
                    stack.extend(edges[cur][1])
                return acc

            for a in ids:
                for b in ids:
                    common = ancestors(a) & ancestors(b)
                    if not common:
                        expected = VIRTUAL_ROOT
                    else:
                        expected = min(common, key=lambda s: (-store.depth[s], s))
                    assert lowest_common_ancestor(store, a, b) == expected


class TestSubtreeLemmas:
    def test_leaf(self, toy_taxonomy):
        assert subtree_lemmas(toy_taxonomy, "syn-chair") == {"chair"}

    def test_chain_root_collects_all(self, toy_taxonomy):
        assert subtree_lemmas(toy_taxonomy, "syn-mammal") == {"mammal", "dog", "cat", "wolf"}

    def test_whole_taxonomy(self, toy_taxonomy):
        assert subtree_lemmas(toy_taxonomy, "syn-entity") == toy_taxonomy.all_lemmas()
        assert subtree_lemmas(toy_taxonomy, VIRTUAL_ROOT) == toy_taxonomy.all_lemmas()

    def test_diamond_counts_once(self):
        store = make_taxonomy(
            {
                "top": (["top"], []),
                "l": (["l"], ["top"]),
                "r": (["r"], ["top"]),
                "bottom": (["shared"], ["l", "r"]),
            }
        )
        assert subtree_lemmas(store, "top") == {"top", "l", "r", "shared"}

    def test_lemmas_subset_of_ancestor_subtree(self, toy_taxonomy):
        for sid, syn in toy_taxonomy.synsets.items():
            for anc in toy_taxonomy.ancestors(sid):
                assert syn.lemmas <= subtree_lemmas(toy_taxonomy, anc)
