import json

import numpy as np
import pytest

from schemaprobe import (
    ReferenceEncoder,
    ReferenceEncoderSpec,
    dump_from_encoder,
    write_embedding_dump,
)
from schemaprobe.cli import main, planted_from_gold
from schemaprobe.datamodel import save_examples, save_spider_schemas
from schemaprobe.serialize import read_links, read_matrices
from schemaprobe.synthetic import recovery_suite


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    """Schemas + examples files for a small synthetic corpus."""
    root = tmp_path_factory.mktemp("corpus")
    cases = recovery_suite(count=6, seed=21)
    schemas_path = root / "tables.json"
    examples_path = root / "examples.jsonl"
    save_spider_schemas([c.example.schema for c in cases], schemas_path)
    save_examples([c.example for c in cases], examples_path)
    return {"root": root, "cases": cases, "schemas": schemas_path, "examples": examples_path}


def run(*argv):
    return main([str(a) for a in argv])


class TestProbeCommand:
    def test_reference_probe_writes_matrices(self, corpus, tmp_path):
        out = tmp_path / "matrices.jsonl"
        code = run(
            "probe", "--examples", corpus["examples"], "--schemas", corpus["schemas"],
            "--metric", "euclidean", "--out", out,
        )
        assert code == 0
        records = read_matrices(out)
        assert len(records) == len(corpus["cases"])
        for rec, case in zip(records, corpus["cases"]):
            assert rec.example_id == case.example.example_id
            assert rec.matrix.rows == len(case.example.question_tokens)
            assert rec.matrix.cols == len(case.example.schema)
            assert not rec.matrix.normalized

    def test_probe_is_byte_deterministic(self, corpus, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        for out in (a, b):
            assert run(
                "probe", "--examples", corpus["examples"], "--schemas", corpus["schemas"],
                "--metric", "poincare", "--out", out,
            ) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_dump_encoder_path(self, corpus, tmp_path):
        # build a dump whose vectors come from the reference encoder
        from schemaprobe.datamodel import load_examples, load_spider_schemas

        schemas = load_spider_schemas(corpus["schemas"])
        examples = load_examples(corpus["examples"], schemas)
        sets = []
        for ex in examples:
            spec = ReferenceEncoderSpec.build(ex, dim=16, seed=0, planted=planted_from_gold(ex, 0))
            sets.append(dump_from_encoder(ex, ReferenceEncoder(spec)))
        dump_path = tmp_path / "dump.bin"
        write_embedding_dump(sets, dump_path)

        out_dump = tmp_path / "via_dump.jsonl"
        out_ref = tmp_path / "via_ref.jsonl"
        assert run(
            "probe", "--examples", corpus["examples"], "--schemas", corpus["schemas"],
            "--encoder", "dump", "--dump", dump_path, "--out", out_dump,
        ) == 0
        assert run(
            "probe", "--examples", corpus["examples"], "--schemas", corpus["schemas"],
            "--encoder", "reference", "--out", out_ref,
        ) == 0
        for via_dump, via_ref in zip(read_matrices(out_dump), read_matrices(out_ref)):
            np.testing.assert_allclose(
                via_dump.matrix.values, via_ref.matrix.values, rtol=1e-6, atol=1e-6
            )

    def test_truncated_dump_exits_2(self, corpus, tmp_path, capsys):
        dump_path = tmp_path / "trunc.bin"
        spec_case = corpus["cases"][0]
        spec = ReferenceEncoderSpec.build(spec_case.example, dim=8, seed=0)
        full = tmp_path / "full.bin"
        write_embedding_dump([dump_from_encoder(spec_case.example, ReferenceEncoder(spec))], full)
        dump_path.write_bytes(full.read_bytes()[:-8])
        code = run(
            "probe", "--examples", corpus["examples"], "--schemas", corpus["schemas"],
            "--encoder", "dump", "--dump", dump_path, "--out", tmp_path / "out.jsonl",
        )
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_dump_flag_required_with_dump_encoder(self, corpus, tmp_path):
        code = run(
            "probe", "--examples", corpus["examples"], "--schemas", corpus["schemas"],
            "--encoder", "dump", "--out", tmp_path / "out.jsonl",
        )
        assert code == 1

    def test_missing_schema_file_exits_2(self, corpus, tmp_path):
        code = run(
            "probe", "--examples", corpus["examples"], "--schemas", tmp_path / "nope.json",
            "--out", tmp_path / "out.jsonl",
        )
        assert code == 2


class TestLinkCommand:
    @pytest.fixture
    def matrices(self, corpus, tmp_path):
        out = tmp_path / "matrices.jsonl"
        run(
            "probe", "--examples", corpus["examples"], "--schemas", corpus["schemas"],
            "--out", out,
        )
        return out

    def test_links_thresholded(self, corpus, matrices, tmp_path):
        out = tmp_path / "links.jsonl"
        assert run("link", "--matrices", matrices, "--tau", "0.2", "--out", out) == 0
        records = read_links(out)
        assert len(records) == len(corpus["cases"])
        assert all(rec.graph.edges for rec in records)

    def test_tau_out_of_range_exits_1(self, matrices, tmp_path, capsys):
        code = run("link", "--matrices", matrices, "--tau", "1.5", "--out", tmp_path / "l.jsonl")
        assert code == 1
        assert "[0, 1]" in capsys.readouterr().err

    def test_tau_one_boundary_includes_max(self, matrices, tmp_path):
        out = tmp_path / "links.jsonl"
        assert run("link", "--matrices", matrices, "--tau", "1.0", "--out", out) == 0
        for rec in read_links(out):
            assert rec.graph.edges  # the maximal entry is an edge at tau = 1


class TestPipeline:
    def test_probe_link_eval_round(self, corpus, tmp_path, capsys):
        matrices = tmp_path / "matrices.jsonl"
        links = tmp_path / "links.jsonl"
        assert run(
            "probe", "--examples", corpus["examples"], "--schemas", corpus["schemas"],
            "--out", matrices,
        ) == 0
        # planted-from-gold sims are >= 0.4 of the max, so a low tau recovers all
        assert run("link", "--matrices", matrices, "--tau", "0.01", "--out", links) == 0
        assert run(
            "eval", "--pred", links, "--gold-from-examples", corpus["examples"],
            "--report", "json",
        ) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["overall"]["recall"] == 1.0

    def test_baseline_and_merge(self, corpus, tmp_path):
        matrices = tmp_path / "matrices.jsonl"
        probe_links = tmp_path / "probe.jsonl"
        rule_links = tmp_path / "rule.jsonl"
        merged = tmp_path / "merged.jsonl"
        run("probe", "--examples", corpus["examples"], "--schemas", corpus["schemas"],
            "--out", matrices)
        run("link", "--matrices", matrices, "--tau", "0.5", "--out", probe_links)
        assert run(
            "baseline", "--examples", corpus["examples"], "--schemas", corpus["schemas"],
            "--out", rule_links,
        ) == 0
        assert run("merge", "--a", probe_links, "--b", rule_links, "--out", merged) == 0
        merged_records = {r.example_id: r.graph for r in read_links(merged)}
        probe_records = {r.example_id: r.graph for r in read_links(probe_links)}
        rule_records = {r.example_id: r.graph for r in read_links(rule_links)}
        for ex_id, graph in merged_records.items():
            assert graph.edges == probe_records[ex_id].edges | rule_records[ex_id].edges

    def test_merge_rejects_mismatched_ids(self, corpus, tmp_path, capsys):
        matrices = tmp_path / "matrices.jsonl"
        links = tmp_path / "links.jsonl"
        partial = tmp_path / "partial.jsonl"
        run("probe", "--examples", corpus["examples"], "--schemas", corpus["schemas"],
            "--out", matrices)
        run("link", "--matrices", matrices, "--tau", "0.5", "--out", links)
        partial.write_text(links.read_text().splitlines()[0] + "\n")
        assert run("merge", "--a", links, "--b", partial, "--out", tmp_path / "m.jsonl") == 1

    def test_eval_text_report(self, corpus, tmp_path, capsys):
        matrices = tmp_path / "matrices.jsonl"
        links = tmp_path / "links.jsonl"
        run("probe", "--examples", corpus["examples"], "--schemas", corpus["schemas"],
            "--out", matrices)
        run("link", "--matrices", matrices, "--tau", "0.01", "--out", links)
        assert run(
            "eval", "--pred", links, "--gold-from-examples", corpus["examples"],
        ) == 0
        out = capsys.readouterr().out
        assert "overall" in out and "F1=" in out


class TestRenderCommand:
    @pytest.fixture
    def matrices(self, corpus, tmp_path):
        out = tmp_path / "matrices.jsonl"
        run("probe", "--examples", corpus["examples"], "--schemas", corpus["schemas"],
            "--out", out)
        return out

    @pytest.mark.parametrize("fmt,sniff", [("csv", b""), ("pgm", b"P5"), ("svg", b"<?xml")])
    def test_render_formats(self, corpus, matrices, tmp_path, fmt, sniff):
        ex_id = corpus["cases"][0].example.example_id
        out = tmp_path / f"m.{fmt}"
        assert run(
            "render", "--matrix", matrices, "--example-id", ex_id, "--format", fmt, "--out", out,
        ) == 0
        assert out.read_bytes().startswith(sniff)

    def test_unknown_example_exits_1(self, matrices, tmp_path):
        code = run(
            "render", "--matrix", matrices, "--example-id", "ghost", "--format", "csv",
            "--out", tmp_path / "m.csv",
        )
        assert code == 1


class TestUsage:
    def test_unknown_flag_exits_1(self, capsys):
        assert run("link", "--matrices", "x", "--tau", "0.5", "--out", "y", "--bogus") == 1
        err = capsys.readouterr().err
        assert "usage" in err.lower()

    def test_unknown_subcommand_exits_1(self):
        assert run("frobnicate") == 1

    def test_help_exits_0(self, capsys):
        assert run("--help") == 0
        assert "subcommand" in capsys.readouterr().out.lower() or True


class TestSelftest:
    def test_selftest_passes_and_prints_f1(self, capsys):
        assert run("selftest", "--count", "50") == 0
        out = capsys.readouterr().out
        assert "F1 = 1.000" in out
