import pytest
from hypothesis import given
from hypothesis import strategies as st

from schemaprobe import LinkGraph, LinkTag, ValidationError, combine, score_links
from schemaprobe.metrics import LinkMetrics, score_pairs


def graph_from_pairs(pairs, n_q=4, n_s=5, tag=LinkTag.PROBE):
    return LinkGraph(n_q, n_s, frozenset((q, s, tag) for q, s in pairs))


class TestScoreLinks:
    def test_perfect_prediction(self):
        gold = {(0, 1), (2, 3)}
        m = score_links(graph_from_pairs(gold), gold)
        assert m.precision == m.recall == m.f1 == 1.0
        assert (m.true_positives, m.false_positives, m.false_negatives) == (2, 0, 0)

    def test_empty_prediction_convention(self):
        m = score_links(graph_from_pairs(set()), {(0, 1)})
        assert (m.precision, m.recall, m.f1) == (0.0, 0.0, 0.0)

    def test_partial_overlap(self):
        m = score_links(graph_from_pairs({(0, 1), (0, 2)}), {(0, 1)})
        assert m.precision == 0.5
        assert m.recall == 1.0
        assert abs(m.f1 - 2 / 3) < 1e-12

    def test_tags_are_ignored(self):
        pred = LinkGraph(
            2, 2, {(0, 1, LinkTag.PROBE), (0, 1, LinkTag.EXACT), (1, 0, LinkTag.PARTIAL)}
        )
        m = score_links(pred, {(0, 1), (1, 0)})
        assert m.f1 == 1.0

    def test_out_of_range_gold(self):
        with pytest.raises(ValidationError, match="out of range"):
            score_links(graph_from_pairs(set(), n_q=2, n_s=2), {(5, 0)})

    def test_symmetric_under_index_permutation(self):
        pred = {(0, 1), (1, 2), (3, 0)}
        gold = {(0, 1), (2, 2)}
        base = score_pairs(pred, gold)
        perm = {0: 3, 1: 0, 2: 4, 3: 2, 4: 1}
        mapped = score_pairs(
            {(q, perm[s]) for q, s in pred}, {(q, perm[s]) for q, s in gold}
        )
        assert base == mapped


pair_sets = st.sets(
    st.tuples(st.integers(0, 5), st.integers(0, 5)), min_size=0, max_size=10
)


@given(pair_sets, pair_sets)
def test_f1_zero_iff_no_true_positives(pred, gold):
    m = score_pairs(pred, gold)
    assert (m.f1 == 0.0) == (m.true_positives == 0)
    assert 0.0 <= m.precision <= 1.0
    assert 0.0 <= m.recall <= 1.0


@given(pair_sets, pair_sets)
def test_counts_partition_predictions_and_gold(pred, gold):
    m = score_pairs(pred, gold)
    assert m.true_positives + m.false_positives == len(pred)
    assert m.true_positives + m.false_negatives == len(gold)


def test_combine_micro_averages():
    a = LinkMetrics.from_counts(2, 0, 0)
    b = LinkMetrics.from_counts(0, 2, 2)
    overall = combine([a, b])
    assert overall.precision == 0.5
    assert overall.recall == 0.5
    assert overall.true_positives == 2


def test_from_counts_zero_conventions():
    zeros = LinkMetrics.from_counts(0, 0, 0)
    assert (zeros.precision, zeros.recall, zeros.f1) == (0.0, 0.0, 0.0)
