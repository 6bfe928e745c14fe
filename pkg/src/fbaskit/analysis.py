"""Exact enumeration of minimal quorums, blocking sets and splitting sets.

All three enumerations are NP-hard, so they run as branch-and-bound searches
over the relevant nodes (see :func:`fbaskit.preprocess.reduce_to_relevant`),
visiting nodes in descending PageRank order.  Families of node sets are
tuples of bitmasks in a canonical order (lexicographic by sorted member
list), which keeps every report byte-identical across runs.

Splitting sets are enumerated against pairs of minimal quorums, including a
quorum paired with itself: a fully faulty quorum can diverge from the rest
of the system on its own, so a set containing a whole quorum is a safety
threat even when no second disjoint-ish quorum exists.  This also makes the
flat closed forms (cardinality ``2t - m``) hold without vacuity.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator
from dataclasses import dataclass

from .core import (
    Fbas,
    Grouping,
    NodeSet,
    QuorumSet,
    _satisfies,
    contains_quorum,
    greatest_quorum,
    iter_members,
    members,
    node_set,
)
from .preprocess import (
    SymmetricCluster,
    find_symmetric_clusters,
    rank_nodes,
    reduce_to_relevant,
)


class AnalysisAborted(RuntimeError):
    """Raised when the relevant-node count exceeds the configured limit."""

    def __init__(self, relevant_count: int, limit: int):
        super().__init__(
            f"analysis aborted: {relevant_count} relevant nodes exceed the "
            f"limit of {limit}")
        self.relevant_count = relevant_count
        self.limit = limit


def canonical_family(sets: Iterable[NodeSet]) -> tuple[NodeSet, ...]:
    """Deduplicate and order a family lexicographically by member list."""
    return tuple(sorted(set(sets), key=members))


def reduce_to_minimal_sets(family: Iterable[NodeSet]) -> tuple[NodeSet, ...]:
    """Keep exactly the sets that have no proper subset in the family."""
    unique = sorted(set(family), key=lambda m: m.bit_count())
    kept: list[NodeSet] = []
    for mask in unique:
        if not any(small & mask == small for small in kept):
            kept.append(mask)
    return canonical_family(kept)


def _branch_order(fbas: Fbas, restrict_to: NodeSet) -> list[int]:
    if restrict_to == 0:
        return []
    ranked = rank_nodes(fbas)
    return [v for v in ranked.order if restrict_to >> v & 1]


def _suffix_masks(order: list[int]) -> list[NodeSet]:
    suffix = [0] * (len(order) + 1)
    for i in range(len(order) - 1, -1, -1):
        suffix[i] = suffix[i + 1] | (1 << order[i])
    return suffix


def iter_minimal_quorums(fbas: Fbas) -> Iterator[NodeSet]:
    """Yield every minimal quorum once, in search order.

    Streaming form of :func:`find_minimal_quorums`; the complement-based
    intersection check consumes this without materializing the family.
    """
    relevant = reduce_to_relevant(fbas)
    if relevant == 0:
        return
    order = _branch_order(fbas, relevant)
    suffix = _suffix_masks(order)
    qsets = fbas.quorum_sets
    depth = len(order)

    def sat_all(pool: NodeSet, of: NodeSet) -> bool:
        rest = of
        while rest:
            low = rest & -rest
            if not _satisfies(pool, qsets[low.bit_length() - 1]):
                return False
            rest ^= low
        return True

    def is_minimal(quorum: NodeSet) -> bool:
        rest = quorum
        while rest:
            low = rest & -rest
            if greatest_quorum(quorum ^ low, fbas):
                return False
            rest ^= low
        return True

    def step(candidate: NodeSet, i: int) -> Iterator[NodeSet]:
        if candidate and sat_all(candidate, candidate):
            if is_minimal(candidate):
                yield candidate
            return
        if i == depth:
            return
        if not sat_all(candidate | suffix[i], candidate):
            return
        v = order[i]
        yield from step(candidate | (1 << v), i + 1)
        yield from step(candidate, i + 1)

    yield from step(0, 0)


def find_minimal_quorums(fbas: Fbas) -> tuple[NodeSet, ...]:
    """All quorums with no proper quorum subset, canonically ordered."""
    return canonical_family(iter_minimal_quorums(fbas))


def top_tier(minimal_quorums: Iterable[NodeSet]) -> NodeSet:
    """Union of all minimal quorums: the nodes that matter for liveness and
    safety buffers."""
    tier = 0
    for quorum in minimal_quorums:
        tier |= quorum
    return tier


def _pairwise_intersecting(family: tuple[NodeSet, ...]) -> bool:
    for i, a in enumerate(family):
        for b in family[i + 1:]:
            if a & b == 0:
                return False
    return True


def has_quorum_intersection_pairwise(
        fbas: Fbas,
        minimal_quorums: tuple[NodeSet, ...] | None = None) -> bool:
    """Quorum intersection via pairwise checks over all minimal quorums
    (minimal quorums intersecting pairwise is equivalent to all quorums
    intersecting pairwise)."""
    if minimal_quorums is None:
        minimal_quorums = find_minimal_quorums(fbas)
    return _pairwise_intersecting(minimal_quorums)


def has_quorum_intersection_complement(
        fbas: Fbas,
        minimal_quorums: tuple[NodeSet, ...] | None = None) -> bool:
    """Quorum intersection via complement checks: intersection holds iff no
    minimal quorum's complement contains a quorum.  Without a precomputed
    family this streams minimal quorums, keeping space linear.  With one, a
    cardinality pre-check (every minimal quorum larger than half the top
    tier) often settles the answer without any complement search."""
    if minimal_quorums is not None:
        tier_size = top_tier(minimal_quorums).bit_count()
        if all(2 * q.bit_count() > tier_size for q in minimal_quorums):
            return True
        quorums: Iterable[NodeSet] = minimal_quorums
    else:
        quorums = iter_minimal_quorums(fbas)
    for quorum in quorums:
        if contains_quorum(fbas.all_mask & ~quorum, fbas):
            return False
    return True


def find_minimal_blocking_sets(fbas: Fbas) -> tuple[NodeSet, ...]:
    """All minimal sets that intersect every quorum.

    A candidate blocks iff no quorum survives inside the relevant nodes
    minus the candidate; cascading unsatisfiability falls out of the
    greatest-quorum fixed point.  A branch is pruned unless candidate plus
    all remaining nodes would still block.
    """
    relevant = reduce_to_relevant(fbas)
    order = _branch_order(fbas, relevant)
    suffix = _suffix_masks(order)
    depth = len(order)
    found: list[NodeSet] = []

    def is_blocking(candidate: NodeSet) -> bool:
        return greatest_quorum(relevant & ~candidate, fbas) == 0

    def is_minimal(candidate: NodeSet) -> bool:
        rest = candidate
        while rest:
            low = rest & -rest
            if is_blocking(candidate ^ low):
                return False
            rest ^= low
        return True

    def step(candidate: NodeSet, i: int) -> None:
        if is_blocking(candidate):
            if is_minimal(candidate):
                found.append(candidate)
            return
        if i == depth or not is_blocking(candidate | suffix[i]):
            return
        v = order[i]
        step(candidate | (1 << v), i + 1)
        step(candidate, i + 1)

    step(0, 0)
    return canonical_family(found)


def _can_split(qset: QuorumSet, within: NodeSet, population: NodeSet) -> bool:
    # Over-approximates "two slices exist whose intersection fits `within`":
    # nodes inside `within` count for both slices, every other node for at
    # most one.  Inner sets are treated as splittable independently, which
    # is optimistic when they share validators; the acceptance check stays
    # exact regardless.
    both = (within & qset.validators_mask).bit_count()
    pending = []
    for inner in qset.inner_sets:
        if _satisfies(within, inner):
            both += 1
        else:
            pending.append(inner)
    need = qset.threshold - both
    if need <= 0:
        return True
    capacity = (qset.validators_mask & population & ~within).bit_count()
    if capacity >= 2 * need:
        return True
    for inner in pending:
        if _can_split(inner, within, population):
            capacity += 2
        elif _satisfies(population, inner):
            capacity += 1
        if capacity >= 2 * need:
            return True
    return False


def find_minimal_splitting_sets(
        fbas: Fbas,
        minimal_quorums: tuple[NodeSet, ...] | None = None) -> tuple[NodeSet, ...]:
    """All minimal sets equal to an intersection of two (not necessarily
    distinct) quorums.

    Returns ``({},)`` — the family holding only the empty set — when quorum
    intersection fails, and the empty family when the FBAS has no quorums at
    all.  During the search the candidate is checked against the minimal
    quorums that contain it; a candidate is accepted once two of them
    intersect in exactly the candidate.  Branches die early when some member
    cannot have two slices intersecting inside candidate plus remainder.
    """
    if minimal_quorums is None:
        minimal_quorums = find_minimal_quorums(fbas)
    if not _pairwise_intersecting(minimal_quorums):
        return (0,)
    if not minimal_quorums:
        return ()
    tier = top_tier(minimal_quorums)
    order = _branch_order(fbas, tier)
    suffix = _suffix_masks(order)
    depth = len(order)
    qsets = fbas.quorum_sets
    population = fbas.all_mask
    found: list[NodeSet] = []

    def has_potential(candidate: NodeSet, within: NodeSet) -> bool:
        rest = candidate
        while rest:
            low = rest & -rest
            if not _can_split(qsets[low.bit_length() - 1], within, population):
                return False
            rest ^= low
        return True

    def accepted(candidate: NodeSet, quorums: list[NodeSet]) -> bool:
        # Every quorum here contains the candidate, so an intersection that
        # is a subset of the candidate is the candidate itself.
        for i, a in enumerate(quorums):
            if a == candidate:
                return True
            for b in quorums[i + 1:]:
                if a & b == candidate:
                    return True
        return False

    def step(candidate: NodeSet, i: int, quorums: list[NodeSet]) -> None:
        if not quorums:
            return
        if (candidate
                and has_potential(candidate, candidate)
                and accepted(candidate, quorums)):
            found.append(candidate)
            return
        if i == depth or not has_potential(candidate, candidate | suffix[i]):
            return
        v = order[i]
        bit = 1 << v
        step(candidate | bit, i + 1, [q for q in quorums if q & bit])
        reachable = candidate | suffix[i + 1]
        step(candidate, i + 1, [q for q in quorums if q & reachable])

    step(0, 0, list(minimal_quorums))
    return reduce_to_minimal_sets(found)


@dataclass(frozen=True)
class FamilyStats:
    """Cardinality statistics of one node-set family."""

    count: int
    histogram: dict[int, int]
    min_cardinality: int | None
    max_cardinality: int | None
    mean_cardinality: float | None


def family_stats(family: tuple[NodeSet, ...]) -> FamilyStats:
    sizes = sorted(mask.bit_count() for mask in family)
    histogram: dict[int, int] = {}
    for size in sizes:
        histogram[size] = histogram.get(size, 0) + 1
    if not sizes:
        return FamilyStats(0, {}, None, None, None)
    return FamilyStats(len(sizes), histogram, sizes[0], sizes[-1],
                       sum(sizes) / len(sizes))


@dataclass(frozen=True)
class AnalysisResult:
    """Families plus derived quantities for one FBAS (or merged view).

    ``names`` labels the index space the families live in: node public
    identifiers for a plain analysis, organization names after merging.
    """

    names: tuple[str, ...]
    minimal_quorums: tuple[NodeSet, ...]
    has_quorum_intersection: bool
    minimal_blocking_sets: tuple[NodeSet, ...]
    minimal_splitting_sets: tuple[NodeSet, ...]
    top_tier: NodeSet

    @property
    def has_quorums(self) -> bool:
        return bool(self.minimal_quorums)

    @property
    def quorum_stats(self) -> FamilyStats:
        return family_stats(self.minimal_quorums)

    @property
    def blocking_stats(self) -> FamilyStats:
        return family_stats(self.minimal_blocking_sets)

    @property
    def splitting_stats(self) -> FamilyStats:
        return family_stats(self.minimal_splitting_sets)


def _thresholds_positive(qset: QuorumSet) -> bool:
    return qset.threshold >= 1 and all(_thresholds_positive(i)
                                       for i in qset.inner_sets)


def _units_sat_families(qset: QuorumSet) -> list[tuple[NodeSet, ...]]:
    families = [(1 << v,) for v in qset.validators]
    families += [_minimal_satisfying_sets(inner) for inner in qset.inner_sets]
    return families


def _cross_union(families: list[tuple[NodeSet, ...]]) -> Iterator[NodeSet]:
    for choice in itertools.product(*families):
        combined = 0
        for mask in choice:
            combined |= mask
        yield combined


def _minimal_satisfying_sets(qset: QuorumSet) -> tuple[NodeSet, ...]:
    if qset.threshold == 0:
        return (0,)
    units = [f for f in _units_sat_families(qset) if f]
    if qset.threshold > len(units):
        return ()
    sets: set[NodeSet] = set()
    for combo in itertools.combinations(units, qset.threshold):
        sets.update(_cross_union(list(combo)))
    return reduce_to_minimal_sets(sets)


def _minimal_unsatisfying_sets(qset: QuorumSet) -> tuple[NodeSet, ...]:
    # Minimal node sets whose failure leaves the quorum set unsatisfiable.
    # Units that can never be satisfied are already dead and drop out.
    kill_units: list[tuple[NodeSet, ...]] = [(1 << v,) for v in qset.validators]
    for inner in qset.inner_sets:
        if _minimal_satisfying_sets(inner):
            kill_units.append(_minimal_unsatisfying_sets(inner))
    if qset.threshold > len(kill_units):
        return (0,)
    to_kill = len(kill_units) - qset.threshold + 1
    sets: set[NodeSet] = set()
    for combo in itertools.combinations(kill_units, to_kill):
        sets.update(_cross_union(list(combo)))
    return reduce_to_minimal_sets(sets)


def _units_mention_disjoint(qset: QuorumSet) -> bool:
    seen = 0
    for v in qset.validators:
        if seen >> v & 1:
            return False
        seen |= 1 << v
    for inner in qset.inner_sets:
        if seen & inner.mentioned_mask or not _units_mention_disjoint(inner):
            return False
        seen |= inner.mentioned_mask
    return True


def _minimal_pair_intersections(qset: QuorumSet) -> tuple[NodeSet, ...]:
    # Minimal intersections of two minimal satisfying sets.  Valid only
    # when no node is mentioned by two different units (checked by
    # _units_mention_disjoint); the caller falls back to pairing the
    # enumerated minimal quorums otherwise.
    if not qset.inner_sets:
        m = len(qset.validators)
        t = qset.threshold
        if t > m:
            return ()
        overlap = 2 * t - m
        if overlap <= 0:
            return (0,)
        return canonical_family(
            node_set(c) for c in itertools.combinations(qset.validators, overlap))
    pair_units: list[tuple[NodeSet, ...]] = [(1 << v,) for v in qset.validators]
    for inner in qset.inner_sets:
        if _minimal_satisfying_sets(inner):
            pair_units.append(_minimal_pair_intersections(inner))
    u = len(pair_units)
    t = qset.threshold
    if t > u:
        return ()
    sets: set[NodeSet] = set()
    combos = list(itertools.combinations(range(u), t))
    for ai, combo_a in enumerate(combos):
        set_a = set(combo_a)
        for combo_b in combos[ai:]:
            shared = sorted(set_a.intersection(combo_b))
            if not shared:
                sets.add(0)
                continue
            sets.update(_cross_union([pair_units[i] for i in shared]))
    return reduce_to_minimal_sets(sets)


def symmetric_top_tier_analysis(cluster: SymmetricCluster,
                                fbas: Fbas) -> AnalysisResult:
    """Closed-form analysis of an FBAS whose top tier is a symmetric cluster.

    For a flat shared quorum set with threshold t over m nodes this yields
    the textbook families (all t-subsets as minimal quorums, all
    (m-t+1)-subsets as minimal blocking sets, all (2t-m)-subsets as minimal
    splitting sets); nested quorum sets are handled by recursively listing
    unit combinations and taking Cartesian products.  The result matches
    the general enumeration algorithms exactly.
    """
    outside = fbas.all_mask & ~cluster.members
    if contains_quorum(outside, fbas):
        raise ValueError("cluster is not the top tier: a quorum exists outside it")
    shared = cluster.shared_quorum_set
    if not _thresholds_positive(shared):
        raise ValueError("symmetric shortcut requires positive thresholds")

    minimal_quorums = _minimal_satisfying_sets(shared)
    blocking = _minimal_unsatisfying_sets(shared)
    if _units_mention_disjoint(shared):
        splitting = _minimal_pair_intersections(shared)
    else:
        splitting = reduce_to_minimal_sets(
            a & b
            for i, a in enumerate(minimal_quorums)
            for b in minimal_quorums[i:])
    intersection = splitting != (0,)
    return AnalysisResult(
        names=fbas.names,
        minimal_quorums=minimal_quorums,
        has_quorum_intersection=intersection,
        minimal_blocking_sets=blocking,
        minimal_splitting_sets=splitting,
        top_tier=top_tier(minimal_quorums),
    )


def _symmetric_top_tier_cluster(fbas: Fbas) -> SymmetricCluster | None:
    clusters = find_symmetric_clusters(fbas)
    if len(clusters) != 1:
        return None
    cluster = clusters[0]
    if not _thresholds_positive(cluster.shared_quorum_set):
        return None
    if contains_quorum(fbas.all_mask & ~cluster.members, fbas):
        return None
    return cluster


def analyze(fbas: Fbas, *,
            intersection_algo: str = "complement",
            symmetric_shortcuts: bool = True,
            abort_above: int | None = None) -> AnalysisResult:
    """Run the full analysis pipeline and collect an :class:`AnalysisResult`.

    ``abort_above`` caps the number of relevant nodes before the
    exponential searches are attempted; crossing it raises
    :class:`AnalysisAborted`.  With ``symmetric_shortcuts`` enabled, an FBAS
    whose top tier forms a symmetric cluster is analyzed in closed form.
    """
    if intersection_algo not in ("pairwise", "complement"):
        raise ValueError(f"unknown intersection algorithm: {intersection_algo}")
    if fbas.n == 0:
        return AnalysisResult(fbas.names, (), True, (), (), 0)
    relevant = reduce_to_relevant(fbas)
    if abort_above is not None and relevant.bit_count() > abort_above:
        raise AnalysisAborted(relevant.bit_count(), abort_above)
    if symmetric_shortcuts:
        cluster = _symmetric_top_tier_cluster(fbas)
        if cluster is not None:
            return symmetric_top_tier_analysis(cluster, fbas)
    minimal_quorums = find_minimal_quorums(fbas)
    if intersection_algo == "pairwise":
        intersection = has_quorum_intersection_pairwise(fbas, minimal_quorums)
    else:
        intersection = has_quorum_intersection_complement(fbas, minimal_quorums)
    blocking = find_minimal_blocking_sets(fbas)
    splitting = find_minimal_splitting_sets(fbas, minimal_quorums)
    return AnalysisResult(
        names=fbas.names,
        minimal_quorums=minimal_quorums,
        has_quorum_intersection=intersection,
        minimal_blocking_sets=blocking,
        minimal_splitting_sets=splitting,
        top_tier=top_tier(minimal_quorums),
    )


def merge_families_by_group(result: AnalysisResult,
                            groupings: list[Grouping]) -> AnalysisResult:
    """Collapse every family member-wise onto groupings (e.g. organizations)
    and re-reduce each family to minimal sets.

    Grouped nodes map to their grouping, ungrouped nodes to themselves; the
    merged result lives in a fresh index space whose names are grouping
    names followed by the surviving node names.
    """
    taken = 0
    for group in groupings:
        if group.members & taken:
            raise ValueError("groupings overlap")
        taken |= group.members
    n = len(result.names)
    mapping: dict[int, int] = {}
    merged_names: list[str] = []
    for idx, group in enumerate(groupings):
        merged_names.append(group.name)
        for v in iter_members(group.members):
            if v >= n:
                raise ValueError(f"grouping references unknown node {v}")
            mapping[v] = idx
    for v in range(n):
        if v not in mapping:
            mapping[v] = len(merged_names)
            merged_names.append(result.names[v])

    def remap(family: tuple[NodeSet, ...]) -> tuple[NodeSet, ...]:
        mapped = {node_set(mapping[v] for v in iter_members(mask))
                  for mask in family}
        return reduce_to_minimal_sets(mapped)

    merged_quorums = remap(result.minimal_quorums)
    return AnalysisResult(
        names=tuple(merged_names),
        minimal_quorums=merged_quorums,
        has_quorum_intersection=result.has_quorum_intersection,
        minimal_blocking_sets=remap(result.minimal_blocking_sets),
        minimal_splitting_sets=remap(result.minimal_splitting_sets),
        top_tier=top_tier(merged_quorums),
    )
