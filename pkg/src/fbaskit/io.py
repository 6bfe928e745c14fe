"""Ingestion of node/organization documents and trust graphs; report output.

Node documents follow the stellarbeat wire format: a JSON array of records
with ``publicKey`` and a recursive ``quorumSet`` of ``threshold``,
``validators`` and ``innerQuorumSets``.  Unknown fields are ignored.
Validators referencing identifiers missing from the document become
unsatisfiable placeholder nodes so that indices stay dense and analyses
stay sound.

Trust graphs are read from the pipe-separated AS-relationship format:
``A|B|-1`` meaning A is a provider of B, ``A|B|0`` meaning A and B peer.
"""

from __future__ import annotations

import csv
import io as _stdio
import json
import logging
from typing import Any

from .analysis import AnalysisResult, FamilyStats
from .core import Fbas, Grouping, NodeSet, QuorumSet, iter_members
from .qsc import TrustGraph

log = logging.getLogger(__name__)

DIRECTION_BOTH = "both"
DIRECTION_CUSTOMER_TO_PROVIDER = "customer-to-provider"

FORMATS = ("json", "csv", "text")


def _parse_quorum_set(raw: Any, resolve) -> QuorumSet:
    if not isinstance(raw, dict):
        raise ValueError("quorum set must be an object")
    threshold = raw.get("threshold", 0)
    if not isinstance(threshold, int) or threshold < 0:
        raise ValueError(f"bad threshold: {threshold!r}")
    if threshold == 0:
        log.warning("quorum set with threshold 0 is always satisfied")
    validators = [resolve(key) for key in raw.get("validators", ())]
    inner = [_parse_quorum_set(entry, resolve)
             for entry in raw.get("innerQuorumSets", ())]
    return QuorumSet(validators, inner, threshold)


_UNSATISFIABLE = QuorumSet((), (), 1)


def parse_nodes(document: str | bytes | list) -> Fbas:
    """Build an FBAS from a stellarbeat-style nodes document.

    Accepts JSON text or the already-parsed array.  Node indices follow
    document order; referenced-but-missing identifiers are appended as
    placeholder nodes that can never be satisfied.  A record without a
    quorum set gets the same placeholder quorum set.
    """
    if isinstance(document, (str, bytes)):
        document = json.loads(document)
    if not isinstance(document, list):
        raise ValueError("nodes document must be a JSON array")

    ids: dict[str, int] = {}
    for record in document:
        if not isinstance(record, dict) or "publicKey" not in record:
            raise ValueError("node record without a publicKey")
        key = record["publicKey"]
        if not isinstance(key, str):
            raise ValueError("publicKey must be a string")
        if key in ids:
            raise ValueError(f"duplicate public identifier: {key}")
        ids[key] = len(ids)

    names = list(ids)
    placeholders: list[str] = []

    def resolve(key: Any) -> int:
        if not isinstance(key, str):
            raise ValueError(f"validator reference must be a string: {key!r}")
        if key not in ids:
            log.info("unknown validator %s becomes an unsatisfiable placeholder", key)
            ids[key] = len(ids)
            names.append(key)
            placeholders.append(key)
        return ids[key]

    qsets = []
    for record in document:
        raw = record.get("quorumSet")
        qsets.append(_UNSATISFIABLE if raw is None
                     else _parse_quorum_set(raw, resolve))
    qsets.extend(_UNSATISFIABLE for _ in placeholders)
    return Fbas(qsets, names)


def parse_organizations(document: str | bytes | list, fbas: Fbas) -> list[Grouping]:
    """Groupings from an organizations document ``[{id, name, validators}]``.

    A validator claimed by two organizations is rejected; validators not in
    the FBAS are ignored.  Organizations with no members present are
    dropped.
    """
    if isinstance(document, (str, bytes)):
        document = json.loads(document)
    if not isinstance(document, list):
        raise ValueError("organizations document must be a JSON array")
    index = {name: v for v, name in enumerate(fbas.names)}
    claimed: dict[str, str] = {}
    groupings = []
    for record in document:
        org_id = record.get("id", "")
        name = record.get("name") or org_id
        if not name:
            raise ValueError("organization without id or name")
        mask = 0
        for key in record.get("validators", ()):
            if key in claimed:
                raise ValueError(
                    f"validator {key} claimed by both {claimed[key]} and {name}")
            claimed[key] = name
            if key in index:
                mask |= 1 << index[key]
        if mask:
            groupings.append(Grouping(name, mask))
    return groupings


def parse_as_rel(text: str,
                 direction_rule: str = DIRECTION_BOTH) -> TrustGraph:
    """Trust graph from AS-relationship lines.

    Peering links become edges in both directions.  Provider/customer links
    become edges in both directions under the default rule (the business
    relationship cuts both ways), or a single customer-to-provider edge
    under the ``customer-to-provider`` rule.
    """
    if direction_rule not in (DIRECTION_BOTH, DIRECTION_CUSTOMER_TO_PROVIDER):
        raise ValueError(f"unknown direction rule: {direction_rule}")
    ids: dict[str, int] = {}

    def intern(token: str) -> int:
        if token not in ids:
            ids[token] = len(ids)
        return ids[token]

    edges: set[tuple[int, int]] = set()
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("|")
        if len(parts) < 3:
            raise ValueError(f"line {line_no}: expected A|B|relation")
        a_token, b_token, rel = parts[0], parts[1], parts[2]
        if rel not in ("-1", "0"):
            raise ValueError(f"line {line_no}: unknown relation {rel!r}")
        a, b = intern(a_token), intern(b_token)
        if a == b:
            continue
        if rel == "0" or direction_rule == DIRECTION_BOTH:
            edges.add((a, b))
            edges.add((b, a))
        else:
            # a provides for b: the customer trusts its provider.
            edges.add((b, a))
    return TrustGraph.from_edges(len(ids), edges, list(ids))


def _family_lists(family: tuple[NodeSet, ...], names: tuple[str, ...]) -> list[list[str]]:
    return [[names[v] for v in iter_members(mask)] for mask in family]


def _stats_dict(stats: FamilyStats) -> dict[str, Any]:
    return {
        "count": stats.count,
        "histogram": {str(size): n for size, n in sorted(stats.histogram.items())},
        "min_cardinality": stats.min_cardinality,
        "max_cardinality": stats.max_cardinality,
        "mean_cardinality": stats.mean_cardinality,
    }


def result_to_dict(result: AnalysisResult) -> dict[str, Any]:
    """JSON-ready dictionary with full families (as public identifiers) and
    per-family statistics."""
    names = result.names
    return {
        "has_quorum_intersection": result.has_quorum_intersection,
        "no_quorums_warning": not result.has_quorums,
        "top_tier": [names[v] for v in iter_members(result.top_tier)],
        "top_tier_size": result.top_tier.bit_count(),
        "minimal_quorums": {
            "sets": _family_lists(result.minimal_quorums, names),
            **_stats_dict(result.quorum_stats),
        },
        "minimal_blocking_sets": {
            "sets": _family_lists(result.minimal_blocking_sets, names),
            **_stats_dict(result.blocking_stats),
        },
        "minimal_splitting_sets": {
            "sets": _family_lists(result.minimal_splitting_sets, names),
            **_stats_dict(result.splitting_stats),
        },
    }


_CSV_FAMILIES = (
    ("quorum", "minimal_quorums"),
    ("blocking", "minimal_blocking_sets"),
    ("splitting", "minimal_splitting_sets"),
)

_TEXT_LABELS = (
    ("minimal quorums", "minimal_quorums"),
    ("minimal blocking sets", "minimal_blocking_sets"),
    ("minimal splitting sets", "minimal_splitting_sets"),
)


def render_report(report: dict[str, Any], fmt: str) -> str:
    """Deterministic text for a result dictionary in one of the supported
    formats.  The CSV format carries the per-cardinality histograms, one
    ``family,cardinality,count`` row each."""
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    if fmt == "csv":
        buffer = _stdio.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["family", "cardinality", "count"])
        for label, key in _CSV_FAMILIES:
            histogram = report[key]["histogram"]
            for size in sorted(histogram, key=int):
                writer.writerow([label, size, histogram[size]])
        return buffer.getvalue()
    if fmt == "text":
        lines = [
            f"top tier ({report['top_tier_size']}): "
            + (", ".join(report["top_tier"]) or "-"),
            "quorum intersection: "
            + ("yes" if report["has_quorum_intersection"] else "NO"),
        ]
        if report["no_quorums_warning"]:
            lines.append("warning: the FBAS contains no quorums at all")
        for label, key in _TEXT_LABELS:
            stats = report[key]
            if stats["count"] == 0:
                lines.append(f"{label}: none")
                continue
            lines.append(
                f"{label}: {stats['count']} "
                f"(cardinalities {stats['min_cardinality']}.."
                f"{stats['max_cardinality']}, mean {stats['mean_cardinality']:.2f})")
        blocking_sets = report["minimal_blocking_sets"]["sets"]
        if blocking_sets:
            smallest = min(blocking_sets, key=len)
            lines.append("smallest blocking set: {" + ", ".join(smallest) + "}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format: {fmt}")


def emit_result(result: AnalysisResult, fmt: str = "json") -> str:
    """Serialize an analysis result; deterministic for fixed input."""
    return render_report(result_to_dict(result), fmt)


def _quorum_set_to_dict(qset: QuorumSet, names: tuple[str, ...]) -> dict[str, Any]:
    return {
        "threshold": qset.threshold,
        "validators": [names[v] for v in qset.validators],
        "innerQuorumSets": [_quorum_set_to_dict(inner, names)
                            for inner in qset.inner_sets],
    }


def nodes_document_records(fbas: Fbas) -> list[dict[str, Any]]:
    return [{"publicKey": fbas.names[v],
             "quorumSet": _quorum_set_to_dict(fbas.quorum_sets[v], fbas.names)}
            for v in range(fbas.n)]


def emit_nodes_document(fbas: Fbas) -> str:
    """Serialize an FBAS back into the nodes-document format; parsing the
    output reproduces the FBAS structurally."""
    return json.dumps(nodes_document_records(fbas), indent=2) + "\n"
