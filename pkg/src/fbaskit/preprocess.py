"""Polynomial-time reductions applied before the exponential searches.

The FBAS is approximated by a directed "dependency" graph with an edge
(v, w) whenever w is mentioned anywhere in v's quorum set.  Strongly
connected components of that graph confine all minimal quorums, PageRank
over it orders the branch-and-bound searches, and structural grouping of
quorum sets detects symmetric clusters that admit closed-form analysis.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Fbas, NodeSet, QuorumSet, contains_quorum, members


@dataclass(frozen=True)
class RankedNodes:
    """Nodes ordered by descending score, ties broken by ascending index."""

    order: tuple[int, ...]
    scores: tuple[float, ...]


@dataclass(frozen=True)
class SymmetricCluster:
    """Nodes sharing one quorum set that mentions exactly those nodes."""

    members: NodeSet
    shared_quorum_set: QuorumSet


def dependency_adjacency(fbas: Fbas) -> list[tuple[int, ...]]:
    """Out-neighbour lists of the dependency graph (self-loops dropped)."""
    return [members(fbas.quorum_sets[v].mentioned_mask & ~(1 << v))
            for v in range(fbas.n)]


def strongly_connected_components(fbas: Fbas) -> list[NodeSet]:
    """Tarjan's algorithm over the dependency graph, iterative so that large
    ingested populations do not hit the recursion limit.  Components come out
    in reverse topological order of the condensation (sinks first)."""
    n = fbas.n
    adj = dependency_adjacency(fbas)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    components: list[NodeSet] = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        work: list[list[int]] = [[root, 0]]
        while work:
            frame = work[-1]
            v, edge_i = frame
            if edge_i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            descended = False
            neighbours = adj[v]
            while frame[1] < len(neighbours):
                w = neighbours[frame[1]]
                frame[1] += 1
                if index[w] == -1:
                    work.append([w, 0])
                    descended = True
                    break
                if on_stack[w]:
                    if index[w] < low[v]:
                        low[v] = index[w]
            if descended:
                continue
            work.pop()
            if low[v] == index[v]:
                component = 0
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    component |= 1 << w
                    if w == v:
                        break
                components.append(component)
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
    return components


def page_rank(out_edges: list[tuple[int, ...]], damping: float,
              tolerance: float = 1e-12, max_rounds: int = 1000) -> list[float]:
    """Power-iteration PageRank.  Dangling nodes redistribute their mass
    uniformly; iteration stops once the largest per-node delta drops below
    the tolerance or after ``max_rounds`` rounds."""
    n = len(out_edges)
    if n == 0:
        return []
    in_edges: list[list[int]] = [[] for _ in range(n)]
    out_degree = [len(out_edges[v]) for v in range(n)]
    for v, targets in enumerate(out_edges):
        for w in targets:
            in_edges[w].append(v)
    dangling = [v for v in range(n) if out_degree[v] == 0]

    scores = [1.0 / n] * n
    base = (1.0 - damping) / n
    for _ in range(max_rounds):
        spread = sum(scores[v] for v in dangling) / n
        new = [base + damping * (spread + sum(scores[v] / out_degree[v]
                                              for v in in_edges[w]))
               for w in range(n)]
        delta = max(abs(new[w] - scores[w]) for w in range(n))
        scores = new
        if delta < tolerance:
            break
    return scores


def rank_nodes(fbas: Fbas, damping: float = 0.85) -> RankedNodes:
    """PageRank over the dependency graph; used only to order the searches,
    so any damping produces correct analyses."""
    if fbas.n < 1:
        raise ValueError("cannot rank an empty population")
    scores = page_rank(dependency_adjacency(fbas), damping)
    order = sorted(range(fbas.n), key=lambda v: (-scores[v], v))
    return RankedNodes(tuple(order), tuple(scores))


def find_symmetric_clusters(fbas: Fbas) -> list[SymmetricCluster]:
    """Group nodes by structurally equal quorum sets and keep each group
    whose shared quorum set mentions exactly the group's members."""
    groups: dict[QuorumSet, NodeSet] = {}
    for v, qset in enumerate(fbas.quorum_sets):
        groups[qset] = groups.get(qset, 0) | (1 << v)
    clusters = [SymmetricCluster(mask, qset)
                for qset, mask in groups.items()
                if qset.mentioned_mask == mask]
    clusters.sort(key=lambda c: members(c.members))
    return clusters


def reduce_to_relevant(fbas: Fbas) -> NodeSet:
    """Union of the strongly connected components that contain a quorum.
    Every minimal quorum (and therefore every minimal blocking or splitting
    set) lives inside this set, so the searches branch only over it."""
    relevant = 0
    for component in strongly_connected_components(fbas):
        if contains_quorum(component, fbas):
            relevant |= component
    return relevant
