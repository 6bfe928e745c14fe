"""Quorum-set configuration policies: bootstrapping FBASs from trust graphs.

A policy is applied per node and derives that node's quorum set from local
graph knowledge (its out-neighbourhood, optionally weighted by a PageRank
tierness estimate).  Also contains the synthetic topology generators used
by the scaling study: flat BFT-style systems and organization-structured
ones with 2-of-3 inner quorum sets.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from .analysis import AnalysisResult, analyze
from .core import Fbas, QuorumSet, delete_for_liveness, node_set, satisfies
from .preprocess import page_rank

SUPER_SAFE = "super-safe"
IDEAL_OPEN = "ideal-open"
ALL_NEIGHBORS = "all-neighbors"
HIGHER_TIER_NEIGHBORS = "higher-tier"

POLICY_KINDS = (SUPER_SAFE, IDEAL_OPEN, ALL_NEIGHBORS, HIGHER_TIER_NEIGHBORS)


@dataclass(frozen=True)
class TrustGraph:
    """Directed graph over prospective FBAS nodes; no self-loops stored."""

    node_count: int
    edges: frozenset[tuple[int, int]]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        for source, target in self.edges:
            if source == target:
                raise ValueError(f"self-loop on node {source}")
            if not (0 <= source < self.node_count and 0 <= target < self.node_count):
                raise ValueError(f"edge ({source}, {target}) out of range")
        if not self.names:
            object.__setattr__(
                self, "names", tuple(f"n{i}" for i in range(self.node_count)))
        elif len(self.names) != self.node_count:
            raise ValueError("names and node count differ")

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[tuple[int, int]],
                   names: Iterable[str] | None = None) -> "TrustGraph":
        return cls(node_count, frozenset(edges),
                   tuple(names) if names is not None else ())

    @classmethod
    def complete(cls, node_count: int) -> "TrustGraph":
        return cls(node_count, frozenset(
            (v, w) for v in range(node_count) for w in range(node_count) if v != w))

    def out_neighbors(self) -> list[tuple[int, ...]]:
        adjacency: list[list[int]] = [[] for _ in range(self.node_count)]
        for source, target in sorted(self.edges):
            adjacency[source].append(target)
        return [tuple(targets) for targets in adjacency]


@dataclass(frozen=True)
class QscPolicy:
    """A policy kind plus its parameters (tier ratio for the tierness
    heuristic: a neighbour counts as higher tier when its score is at least
    ``tier_ratio`` times one's own)."""

    kind: str
    tier_ratio: float = 2.0

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy kind: {self.kind}")
        if self.tier_ratio <= 1.0:
            raise ValueError("tier ratio must be greater than 1")


def relaxed_bft_threshold(n: int) -> int:
    """Smallest threshold tolerating strictly-less-than-a-third failures:
    n - floor((n-1)/3); equals 2f+1 for n = 3f+1."""
    if n < 1:
        raise ValueError("need at least one node")
    return n - (n - 1) // 3


def apply_policy(graph: TrustGraph, policy: QscPolicy) -> Fbas:
    """Derive one quorum set per graph node according to the policy."""
    if graph.node_count < 1:
        raise ValueError("graph is empty")
    n = graph.node_count
    everyone = tuple(range(n))
    if policy.kind == SUPER_SAFE:
        qsets = [QuorumSet(everyone, (), n) for _ in range(n)]
    elif policy.kind == IDEAL_OPEN:
        threshold = relaxed_bft_threshold(n)
        qsets = [QuorumSet(everyone, (), threshold) for _ in range(n)]
    elif policy.kind == ALL_NEIGHBORS:
        adjacency = graph.out_neighbors()
        qsets = []
        for v in range(n):
            validators = {v, *adjacency[v]}
            qsets.append(QuorumSet(validators, (),
                                   relaxed_bft_threshold(len(validators))))
    else:  # HIGHER_TIER_NEIGHBORS
        adjacency = graph.out_neighbors()
        # Tierness proxy: PageRank without damping.
        scores = page_rank([tuple(t) for t in adjacency], damping=1.0)
        ratio = policy.tier_ratio
        qsets = []
        for v in range(n):
            higher = [w for w in adjacency[v] if scores[w] >= ratio * scores[v]]
            peers = [w for w in adjacency[v]
                     if scores[v] / ratio < scores[w] < ratio * scores[v]]
            validators = {v, *(higher if higher else peers)}
            qsets.append(QuorumSet(validators, (),
                                   relaxed_bft_threshold(len(validators))))
    return Fbas(qsets, graph.names)


def generate_flat_topology(m: int) -> Fbas:
    """m nodes, each requiring relaxed_bft_threshold(m) out of everyone."""
    if m < 1:
        raise ValueError("need at least one node")
    everyone = tuple(range(m))
    threshold = relaxed_bft_threshold(m)
    return Fbas([QuorumSet(everyone, (), threshold) for _ in range(m)])


def generate_stellar_like_topology(orgs: int) -> Fbas:
    """3 nodes per organization in 2-of-3 inner quorum sets; every node
    requires relaxed_bft_threshold(orgs) organizations."""
    if orgs < 1:
        raise ValueError("need at least one organization")
    inner = tuple(QuorumSet((3 * i, 3 * i + 1, 3 * i + 2), (), 2)
                  for i in range(orgs))
    threshold = relaxed_bft_threshold(orgs)
    qsets = [QuorumSet((), inner, threshold) for _ in range(3 * orgs)]
    names = [f"org{i}-{j}" for i in range(orgs) for j in range(3)]
    return Fbas(qsets, names)


def filter_one_node_quorums(fbas: Fbas) -> Fbas:
    """Drop nodes whose quorum set makes them a one-node quorum while no
    other node references them — almost certainly misconfigurations.  A
    referenced one-node quorum is kept: it genuinely breaks intersection."""
    referenced = 0
    for v, qset in enumerate(fbas.quorum_sets):
        referenced |= qset.mentioned_mask & ~(1 << v)
    drop = 0
    for v, qset in enumerate(fbas.quorum_sets):
        if not referenced >> v & 1 and satisfies(node_set([v]), qset):
            drop |= 1 << v
    if drop == 0:
        return fbas
    return delete_for_liveness(fbas, drop)


def simulate_and_analyze(graph: TrustGraph, policy: QscPolicy, *,
                         intersection_algo: str = "complement",
                         symmetric_shortcuts: bool = True,
                         abort_above: int | None = None) -> AnalysisResult:
    """Apply a policy, filter out unreferenced one-node quorums, then run
    the full analysis."""
    fbas = filter_one_node_quorums(apply_policy(graph, policy))
    return analyze(fbas,
                   intersection_algo=intersection_algo,
                   symmetric_shortcuts=symmetric_shortcuts,
                   abort_above=abort_above)
