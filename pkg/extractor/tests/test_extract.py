import json
import struct

import numpy as np
import pytest
from transformers import AutoTokenizer

from mlmdump import ExtractionError, ExtractorConfig, extract, load_examples, load_schemas
from mlmdump.encoding import build_plan, masked_variant
from mlmdump.inputs import Example, SchemaItems


def parse_records(blob: bytes):
    """Independent parse of the dump bytes (magic, header JSON, f32 payload)."""
    records = []
    offset = 0
    while offset < len(blob):
        assert blob[offset : offset + 4] == b"PRBD"
        version, header_len = struct.unpack("<II", blob[offset + 4 : offset + 12])
        assert version == 1
        header = json.loads(blob[offset + 12 : offset + 12 + header_len])
        n_q, n_s, dim = (
            header["num_question_tokens"],
            header["num_schema_items"],
            header["dim"],
        )
        payload_len = 4 * dim * (n_s + n_q * n_s)
        start = offset + 12 + header_len
        payload = np.frombuffer(blob[start : start + payload_len], dtype="<f4")
        records.append((header, payload))
        offset = start + payload_len
    assert offset == len(blob)
    return records


@pytest.fixture(scope="module")
def corpus(corpus_dir):
    schemas = load_schemas(corpus_dir / "tables.json")
    return load_examples(corpus_dir / "examples.jsonl", schemas)


def run_extract(examples, tiny_model_dir, out, **overrides):
    config = ExtractorConfig(model=str(tiny_model_dir), output=out, **overrides)
    return extract(examples, config)


class TestInputs:
    def test_star_dropped_and_names_split(self, corpus):
        schema = corpus[0].schema
        assert schema.items == (("pets",), ("pettype",), ("pet", "age"), ("weight",))

    def test_unknown_db_id(self, corpus_dir, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text(json.dumps({"example_id": "x", "db_id": "ghost", "question_tokens": ["a"]}))
        schemas = load_schemas(corpus_dir / "tables.json")
        with pytest.raises(Exception, match="ghost"):
            load_examples(bad, schemas)


class TestEncodingPlan:
    def test_spans_cover_all_words_and_items(self, corpus, tiny_model_dir):
        tokenizer = AutoTokenizer.from_pretrained(str(tiny_model_dir))
        example = corpus[0]
        plan = build_plan(tokenizer, example)
        assert len(plan.question_spans) == len(example.question_tokens)
        assert len(plan.item_spans) == len(example.schema.items)
        # multi-piece item: "pettype" splits into two wordpieces
        start, stop = plan.item_spans[1]
        assert stop - start == 2

    def test_masked_variant_replaces_every_piece(self, corpus, tiny_model_dir):
        tokenizer = AutoTokenizer.from_pretrained(str(tiny_model_dir))
        plan = build_plan(tokenizer, corpus[0])
        for i, (start, stop) in enumerate(plan.question_spans):
            ids = masked_variant(plan, i)
            assert ids[start:stop] == tuple([plan.mask_id] * (stop - start))
            assert len(ids) == len(plan.input_ids)
            # everything outside the span is untouched
            assert ids[:start] == plan.input_ids[:start]
            assert ids[stop:] == plan.input_ids[stop:]


class TestExtract:
    def test_payload_length_arithmetic(self, corpus, tiny_model_dir, tmp_path):
        out = tmp_path / "dump.bin"
        run_extract(corpus, tiny_model_dir, out)
        records = parse_records(out.read_bytes())
        assert len(records) == len(corpus)
        for (header, payload), example in zip(records, corpus):
            n_q = len(example.question_tokens)
            n_s = len(example.schema.items)
            assert header["num_question_tokens"] == n_q
            assert header["num_schema_items"] == n_s
            assert payload.size == header["dim"] * (n_s + n_q * n_s)
            assert np.all(np.isfinite(payload))

    def test_pass_count_is_q_plus_one(self, corpus, tiny_model_dir, tmp_path):
        counts = run_extract(corpus, tiny_model_dir, tmp_path / "dump.bin")
        assert counts == [len(ex.question_tokens) + 1 for ex in corpus]

    def test_rerun_is_byte_identical(self, corpus, tiny_model_dir, tmp_path):
        a, b = tmp_path / "a.bin", tmp_path / "b.bin"
        run_extract(corpus, tiny_model_dir, a)
        run_extract(corpus, tiny_model_dir, b)
        assert a.read_bytes() == b.read_bytes()

    def test_masking_changes_some_vectors(self, corpus, tiny_model_dir, tmp_path):
        out = tmp_path / "dump.bin"
        run_extract(corpus, tiny_model_dir, out)
        (header, payload), *_ = parse_records(out.read_bytes())
        dim, n_s = header["dim"], header["num_schema_items"]
        baseline = payload[: n_s * dim].reshape(n_s, dim)
        masked = payload[n_s * dim :].reshape(header["num_question_tokens"], n_s, dim)
        assert np.any(masked != baseline[None])

    def test_pooling_modes_differ(self, corpus, tiny_model_dir, tmp_path):
        mean_out = tmp_path / "mean.bin"
        first_out = tmp_path / "first.bin"
        run_extract(corpus, tiny_model_dir, mean_out, pooling="mean")
        run_extract(corpus, tiny_model_dir, first_out, pooling="first-subtoken")
        (h_mean, p_mean), *_ = parse_records(mean_out.read_bytes())
        (h_first, p_first), *_ = parse_records(first_out.read_bytes())
        assert h_mean["meta"]["pooling"] == "mean"
        assert h_first["meta"]["pooling"] == "first-subtoken"
        assert not np.array_equal(p_mean, p_first)

    def test_layer_selection_recorded_and_effective(self, corpus, tiny_model_dir, tmp_path):
        last = tmp_path / "last.bin"
        embeddings = tmp_path / "embeddings.bin"
        run_extract(corpus, tiny_model_dir, last, layer=-1)
        run_extract(corpus, tiny_model_dir, embeddings, layer=0)
        (h_last, p_last), *_ = parse_records(last.read_bytes())
        (h_emb, p_emb), *_ = parse_records(embeddings.read_bytes())
        assert h_last["meta"]["layer"] == -1
        assert h_emb["meta"]["layer"] == 0
        assert not np.array_equal(p_last, p_emb)

    def test_bad_layer_index(self, corpus, tiny_model_dir, tmp_path):
        with pytest.raises(ExtractionError, match="layer"):
            run_extract(corpus, tiny_model_dir, tmp_path / "x.bin", layer=40)

    def test_batch_size_does_not_change_output(self, corpus, tiny_model_dir, tmp_path):
        one, eight = tmp_path / "one.bin", tmp_path / "eight.bin"
        run_extract(corpus, tiny_model_dir, one, batch_size=1)
        run_extract(corpus, tiny_model_dir, eight, batch_size=8)
        assert one.read_bytes() == eight.read_bytes()

    def test_id_suffix_namespaces_records(self, corpus, tiny_model_dir, tmp_path):
        out = tmp_path / "dump.bin"
        run_extract(corpus, tiny_model_dir, out, id_suffix="@tiny#last")
        headers = [h for h, _ in parse_records(out.read_bytes())]
        assert headers[0]["example_id"] == "pets-syn-0@tiny#last"


class TestErrors:
    def test_zero_subtoken_item_names_item(self, corpus, tiny_model_dir, tmp_path):
        schema = SchemaItems(db_id="weird", items=(("pets",), ("​",)))
        example = Example("weird-0", ("what",), schema)
        with pytest.raises(ExtractionError, match="schema item 1"):
            run_extract([example], tiny_model_dir, tmp_path / "x.bin")

    def test_zero_subtoken_question_word_named(self, corpus, tiny_model_dir, tmp_path):
        schema = corpus[0].schema
        example = Example("weird-1", ("what", "​"), schema)
        with pytest.raises(ExtractionError, match="question word"):
            run_extract([example], tiny_model_dir, tmp_path / "x.bin")

    def test_overflow_advises_no_truncation(self, corpus, tiny_model_dir, tmp_path):
        schema = corpus[0].schema
        example = Example("long-0", tuple(["what"] * 60), schema)
        with pytest.raises(ExtractionError, match="truncation is unsupported"):
            run_extract([example], tiny_model_dir, tmp_path / "x.bin")

    def test_bad_pooling_rejected(self, tmp_path):
        with pytest.raises(Exception, match="pooling"):
            ExtractorConfig(model="x", output=tmp_path / "y.bin", pooling="max")
