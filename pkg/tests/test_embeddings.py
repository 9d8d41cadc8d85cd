import math
import struct

import numpy as np
import pytest

from ontopop.embeddings import (
    EmbeddingStore,
    cosine,
    load_binary_model,
    load_model,
    load_text_model,
    save_binary_model,
    save_text_model,
    sniff_format,
)
from ontopop.errors import DegenerateVectorError, FormatError

from conftest import make_store, random_unit_rows


def write_text(path, header, lines):
    path.write_text("\n".join([header] + lines) + "\n", encoding="utf-8")


def encode_binary(entries, dim):
    """Independent binary encoder used as the round-trip oracle."""
    blob = f"{len(entries)} {dim}\n".encode("ascii")
    for token, values in entries:
        blob += token.encode("utf-8") + b" "
        blob += struct.pack(f"<{dim}f", *values)
        blob += b"\n"
    return blob


class TestTextLoad:
    def test_minimal_wellformed(self, tmp_path):
        p = tmp_path / "m.txt"
        write_text(p, "2 3", ["a 1 0 0", "b 0 1 0"])
        store = load_text_model(p)
        assert len(store) == 2
        assert store.dimension == 3
        np.testing.assert_allclose(store["a"], [1, 0, 0])
        np.testing.assert_allclose(store["b"], [0, 1, 0])

    def test_arity_error_reports_line(self, tmp_path):
        p = tmp_path / "m.txt"
        write_text(p, "2 3", ["a 1 0"])
        with pytest.raises(FormatError) as exc:
            load_text_model(p)
        assert exc.value.line == 2

    def test_duplicate_token(self, tmp_path):
        p = tmp_path / "m.txt"
        write_text(p, "2 2", ["a 1 0", "a 0 1"])
        with pytest.raises(FormatError, match="duplicate"):
            load_text_model(p)

    def test_non_numeric_field(self, tmp_path):
        p = tmp_path / "m.txt"
        write_text(p, "1 2", ["a 1 x"])
        with pytest.raises(FormatError, match="non-numeric") as exc:
            load_text_model(p)
        assert exc.value.line == 2

    def test_malformed_header(self, tmp_path):
        p = tmp_path / "m.txt"
        write_text(p, "not a header at all", ["a 1 0"])
        with pytest.raises(FormatError) as exc:
            load_text_model(p)
        assert exc.value.line == 1

    def test_count_mismatch(self, tmp_path):
        p = tmp_path / "m.txt"
        write_text(p, "3 2", ["a 1 0", "b 0 1"])
        with pytest.raises(FormatError, match="declares 3"):
            load_text_model(p)

    def test_zero_vector_dropped_with_warning(self, tmp_path, caplog):
        p = tmp_path / "m.txt"
        write_text(p, "2 2", ["a 0 0", "b 0 1"])
        with caplog.at_level("WARNING"):
            store = load_text_model(p)
        assert "a" not in store
        assert "b" in store
        assert any("zero-vector" in r.message for r in caplog.records)

    def test_large_fixture_loads_and_is_total(self, tmp_path):
        # written line by line here, independently of save_text_model
        rng = np.random.default_rng(11)
        dim, n = 200, 1000
        tokens = [f"tok{i:04d}" for i in range(n)]
        rows = random_unit_rows(rng, n, dim)
        lines = [
            tokens[i] + " " + " ".join(f"{x:.8f}" for x in rows[i]) for i in range(n)
        ]
        p = tmp_path / "big.txt"
        write_text(p, f"{n} {dim}", lines)
        store = load_text_model(p)
        assert len(store) == n and store.dimension == dim
        for tok in store.vocabulary:
            vec = store.get(tok)
            assert vec is not None and vec.shape == (dim,)
        assert abs(cosine(store["tok0500"], store["tok0500"]) - 1.0) < 1e-6


class TestBinaryLoad:
    def test_matches_text_equivalent(self, tmp_path):
        entries = [("a", [1.0, 0.0, 0.0]), ("b", [0.25, 1.5, -3.125])]
        pb = tmp_path / "m.bin"
        pb.write_bytes(encode_binary(entries, 3))
        pt = tmp_path / "m.txt"
        write_text(pt, "2 3", ["a 1 0 0", "b 0.25 1.5 -3.125"])
        sb = load_binary_model(pb)
        st = load_text_model(pt)
        assert sb.vocabulary == st.vocabulary
        np.testing.assert_allclose(sb.vectors, st.vectors, atol=1e-6)

    def test_truncated_names_entry(self, tmp_path):
        blob = encode_binary([("a", [1.0, 2.0]), ("b", [3.0, 4.0])], 2)
        p = tmp_path / "m.bin"
        p.write_bytes(blob[:-5])
        with pytest.raises(FormatError, match="entry 1"):
            load_binary_model(p)

    def test_empty_file(self, tmp_path):
        p = tmp_path / "m.bin"
        p.write_bytes(b"")
        with pytest.raises(FormatError, match="header"):
            load_binary_model(p)

    def test_trailing_garbage(self, tmp_path):
        blob = encode_binary([("a", [1.0, 2.0])], 2) + b"extra"
        p = tmp_path / "m.bin"
        p.write_bytes(blob)
        with pytest.raises(FormatError, match="trailing"):
            load_binary_model(p)

    def test_duplicate_token(self, tmp_path):
        blob = encode_binary([("a", [1.0, 2.0]), ("a", [3.0, 4.0])], 2)
        p = tmp_path / "m.bin"
        p.write_bytes(blob)
        with pytest.raises(FormatError, match="duplicate"):
            load_binary_model(p)


class TestCosine:
    def test_orthogonal(self):
        assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0

    def test_scale_invariant_parallel(self):
        assert abs(cosine(np.array([2.0, 0.0]), np.array([5.0, 0.0])) - 1.0) < 1e-12

    def test_hand_computed(self):
        # dot = 32, norms sqrt(14) and sqrt(77)
        got = cosine(np.array([1.0, 2.0, 3.0]), np.array([4.0, 5.0, 6.0]))
        assert abs(got - 0.9746318461970762) < 1e-12
        assert abs(got - 32 / math.sqrt(14 * 77)) < 1e-12

    def test_zero_vector_rejected(self):
        with pytest.raises(DegenerateVectorError):
            cosine(np.zeros(3), np.array([1.0, 0.0, 0.0]))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            cosine(np.ones(2), np.ones(3))

    def test_self_and_negation_properties(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            v = rng.standard_normal(rng.integers(2, 30))
            if np.linalg.norm(v) == 0:
                continue
            assert abs(cosine(v, v) - 1.0) < 1e-9
            assert abs(cosine(v, -v) + 1.0) < 1e-9

    def test_positive_scaling_property(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            dim = int(rng.integers(2, 20))
            v = rng.standard_normal(dim)
            w = rng.standard_normal(dim)
            alpha = float(rng.uniform(1e-3, 1e3))
            assert abs(cosine(alpha * v, w) - cosine(v, w)) < 1e-9


class TestLookup:
    def test_known_token(self):
        store = make_store({"dog": [1, 0], "cat": [0, 1]})
        np.testing.assert_allclose(store.get("dog"), [1, 0])

    def test_unknown_token_signals_oov(self):
        store = make_store({"dog": [1, 0]})
        assert store.get("fish") is None

    def test_lookup_is_case_sensitive(self):
        store = make_store({"dog": [1, 0]})
        assert store.get("Dog") is None

    def test_getitem_raises(self):
        store = make_store({"dog": [1, 0]})
        with pytest.raises(KeyError):
            store["Dog"]


class TestRoundTrips:
    def test_text_binary_text_preserves_components(self, tmp_path):
        rng = np.random.default_rng(21)
        for case in range(20):
            n = int(rng.integers(1, 12))
            dim = int(rng.integers(2, 16))
            tokens = [f"w{case}_{i}" for i in range(n)]
            rows = rng.uniform(-4, 4, size=(n, dim))
            rows[np.all(rows == 0.0, axis=1)] += 1.0
            store = EmbeddingStore.from_rows(tokens, rows)
            t1 = tmp_path / f"{case}.txt"
            b1 = tmp_path / f"{case}.bin"
            t2 = tmp_path / f"{case}.2.txt"
            save_text_model(store, t1)
            s1 = load_text_model(t1)
            save_binary_model(s1, b1)
            s2 = load_binary_model(b1)
            save_text_model(s2, t2)
            s3 = load_text_model(t2)
            assert s3.vocabulary == store.vocabulary
            np.testing.assert_allclose(s3.vectors, store.vectors, rtol=1e-6, atol=1e-7)

    def test_auto_sniffing(self, tmp_path):
        store = make_store({"alpha": [0.3, -0.7, 0.2], "beta": [1.5, 0.1, -0.4]})
        pt = tmp_path / "m.txt"
        pb = tmp_path / "m.bin"
        save_text_model(store, pt)
        save_binary_model(store, pb)
        assert sniff_format(pt) == "text"
        assert sniff_format(pb) == "binary"
        np.testing.assert_allclose(
            load_model(pt, "auto").vectors, load_model(pb, "auto").vectors, atol=1e-6
        )
