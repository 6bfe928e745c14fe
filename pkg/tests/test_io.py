import json
import logging

import pytest

from fbaskit import Fbas, QuorumSet, analyze, node_set
from fbaskit.io import (
    emit_nodes_document,
    emit_result,
    parse_as_rel,
    parse_nodes,
    parse_organizations,
    result_to_dict,
)
from fbaskit.oracle import brute_quorums


THREE_NODE_DOC = json.dumps([
    {"publicKey": "0", "quorumSet": {"threshold": 1, "validators": ["1", "2"],
                                     "innerQuorumSets": []}},
    {"publicKey": "1", "quorumSet": {"threshold": 2, "validators": ["0", "2"]}},
    {"publicKey": "2", "quorumSet": {"threshold": 2,
                                     "validators": ["0", "1", "2"]}},
])


class TestParseNodes:
    def test_three_node_document(self):
        fbas = parse_nodes(THREE_NODE_DOC)
        assert fbas.names == ("0", "1", "2")
        assert {frozenset(q) for q in brute_quorums(fbas)} == {
            frozenset({0, 2}), frozenset({0, 1, 2})}

    def test_empty_array(self):
        fbas = parse_nodes("[]")
        assert fbas.n == 0

    def test_unknown_reference_becomes_placeholder(self):
        doc = json.dumps([
            {"publicKey": "a",
             "quorumSet": {"threshold": 1, "validators": ["a", "X"]}},
        ])
        fbas = parse_nodes(doc)
        assert fbas.n == 2
        assert fbas.names == ("a", "X")
        # the placeholder can never be satisfied
        assert not analyze(fbas).minimal_quorums or all(
            not mask >> 1 & 1 for mask in analyze(fbas).minimal_quorums)

    def test_duplicate_public_key_rejected(self):
        doc = json.dumps([{"publicKey": "a"}, {"publicKey": "a"}])
        with pytest.raises(ValueError):
            parse_nodes(doc)

    def test_malformed_json_rejected(self):
        with pytest.raises(json.JSONDecodeError):
            parse_nodes("{not json")

    def test_missing_quorum_set_is_unsatisfiable(self):
        fbas = parse_nodes(json.dumps([{"publicKey": "a"}]))
        assert analyze(fbas).minimal_quorums == ()

    def test_threshold_zero_warns(self, caplog):
        doc = json.dumps([{"publicKey": "a",
                           "quorumSet": {"threshold": 0, "validators": ["a"]}}])
        with caplog.at_level(logging.WARNING, logger="fbaskit.io"):
            parse_nodes(doc)
        assert any("threshold 0" in message for message in caplog.messages)

    def test_unknown_fields_ignored(self):
        doc = json.dumps([{"publicKey": "a", "ip": "1.2.3.4", "active": True,
                           "quorumSet": {"threshold": 1, "validators": ["a"],
                                         "hash": "xyz"}}])
        fbas = parse_nodes(doc)
        assert fbas.quorum_sets[0] == QuorumSet([0], (), 1)

    def test_nested_inner_sets(self):
        doc = json.dumps([
            {"publicKey": "a", "quorumSet": {
                "threshold": 1, "validators": [],
                "innerQuorumSets": [
                    {"threshold": 2, "validators": ["a", "b"]},
                ]}},
            {"publicKey": "b", "quorumSet": {"threshold": 1, "validators": ["a"]}},
        ])
        fbas = parse_nodes(doc)
        assert fbas.quorum_sets[0].inner_sets[0] == QuorumSet([0, 1], (), 2)


class TestParseOrganizations:
    def test_basic(self):
        fbas = parse_nodes(THREE_NODE_DOC)
        groupings = parse_organizations(json.dumps([
            {"id": "orgA", "name": "Org A", "validators": ["0", "1"]},
            {"id": "orgB", "name": "Org B", "validators": ["2"]},
        ]), fbas)
        assert [g.name for g in groupings] == ["Org A", "Org B"]
        assert groupings[0].members == node_set({0, 1})

    def test_overlap_rejected(self):
        fbas = parse_nodes(THREE_NODE_DOC)
        with pytest.raises(ValueError):
            parse_organizations(json.dumps([
                {"id": "a", "validators": ["0", "1"]},
                {"id": "b", "validators": ["1", "2"]},
            ]), fbas)

    def test_unknown_validators_ignored(self):
        fbas = parse_nodes(THREE_NODE_DOC)
        groupings = parse_organizations(json.dumps([
            {"id": "a", "validators": ["0", "nope"]},
            {"id": "ghost", "validators": ["missing"]},
        ]), fbas)
        assert len(groupings) == 1
        assert groupings[0].members == node_set({0})


class TestParseAsRel:
    def test_peering_is_bidirectional(self):
        graph = parse_as_rel("1|2|0\n")
        assert graph.edges == frozenset({(0, 1), (1, 0)})
        assert graph.names == ("1", "2")

    def test_comments_skipped(self):
        graph = parse_as_rel("# header\n# more\n1|2|0\n")
        assert graph.node_count == 2

    def test_provider_link_default_both_directions(self):
        graph = parse_as_rel("3|4|-1\n")
        assert graph.edges == frozenset({(0, 1), (1, 0)})

    def test_customer_to_provider_rule(self):
        graph = parse_as_rel("3|4|-1\n", direction_rule="customer-to-provider")
        # 3 provides for 4, so only the customer (4) trusts the provider (3)
        assert graph.edges == frozenset({(1, 0)})

    def test_malformed_line_reports_number(self):
        with pytest.raises(ValueError, match="line 2"):
            parse_as_rel("1|2|0\n1|2\n")

    def test_unknown_relation_rejected(self):
        with pytest.raises(ValueError, match="line 1"):
            parse_as_rel("1|2|7\n")

    def test_extra_columns_tolerated(self):
        graph = parse_as_rel("1|2|0|bgp\n")
        assert graph.node_count == 2


class TestEmitResult:
    def test_five_node_json(self, five_node):
        report = json.loads(emit_result(analyze(five_node), "json"))
        assert report["minimal_splitting_sets"]["sets"] == [["0"]]
        assert report["top_tier"] == ["0", "1", "2", "3", "4"]
        assert report["has_quorum_intersection"] is True
        assert report["minimal_blocking_sets"]["histogram"] == {"1": 1, "2": 4}

    def test_seven_node_csv_has_singleton_blocking_row(self, seven_node_cascade):
        text = emit_result(analyze(seven_node_cascade), "csv")
        lines = text.splitlines()
        assert lines[0] == "family,cardinality,count"
        assert "blocking,1,1" in lines
        assert "splitting,3,11" in lines

    def test_empty_population_flagged(self):
        report = result_to_dict(analyze(Fbas([])))
        assert report["has_quorum_intersection"] is True
        assert report["no_quorums_warning"] is True
        assert report["minimal_quorums"]["sets"] == []

    def test_unknown_format_rejected(self, five_node):
        with pytest.raises(ValueError):
            emit_result(analyze(five_node), "xml")

    def test_output_is_deterministic(self, seven_node_cascade):
        result = analyze(seven_node_cascade)
        for fmt in ("json", "csv", "text"):
            assert emit_result(result, fmt) == emit_result(result, fmt)

    def test_csv_row_counts_equal_family_sizes(self, five_node):
        result = analyze(five_node)
        text = emit_result(result, "csv")
        rows = [line.split(",") for line in text.splitlines()[1:]]
        for label, family in (("quorum", result.minimal_quorums),
                              ("blocking", result.minimal_blocking_sets),
                              ("splitting", result.minimal_splitting_sets)):
            total = sum(int(count) for fam_name, _, count in rows
                        if fam_name == label)
            assert total == len(family)


class TestRoundTrip:
    def test_parse_emit_parse(self, five_node, seven_node_cascade):
        for fbas in (five_node, seven_node_cascade):
            again = parse_nodes(emit_nodes_document(fbas))
            assert again == fbas

    def test_round_trip_with_nested_sets(self):
        inner = QuorumSet([0, 1, 2], (), 2)
        fbas = Fbas([QuorumSet([3], [inner, inner], 2)] * 4,
                    names=["a", "b", "c", "d"])
        assert parse_nodes(emit_nodes_document(fbas)) == fbas
