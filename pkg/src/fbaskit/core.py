"""FBAS data model and quorum-set satisfaction semantics.

A federated Byzantine agreement system is a population of nodes where every
node declares, via a recursive *quorum set*, which groups of other nodes it
requires agreement from.  This module holds the immutable data model
(:class:`QuorumSet`, :class:`Fbas`) and the primitive predicates everything
else is built on: satisfaction, slice membership, quorum-ness and the
greatest-quorum fixed point.

Node sets are represented as int bitmasks (bit ``v`` set means node ``v`` is
a member).  All predicates also accept any iterable of node indices and
coerce it; hot loops inside the enumeration algorithms pass masks directly.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

NodeSet = int  # bitmask over node indices


def node_set(members: Iterable[int]) -> NodeSet:
    """Build a bitmask from an iterable of node indices."""
    mask = 0
    for v in members:
        if v < 0:
            raise ValueError(f"negative node index: {v}")
        mask |= 1 << v
    return mask


def as_node_set(value: NodeSet | Iterable[int]) -> NodeSet:
    if isinstance(value, int):
        if value < 0:
            raise ValueError("node set mask must be non-negative")
        return value
    return node_set(value)


def members(mask: NodeSet) -> tuple[int, ...]:
    """Node indices contained in a mask, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def iter_members(mask: NodeSet):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class QuorumSet:
    """Recursive (validators, inner quorum sets, threshold) triple.

    Validators are deduplicated and sorted at construction; inner quorum
    sets are kept as given, duplicates included, because satisfaction counts
    inner sets individually.  A threshold larger than the number of
    validators plus inner sets is allowed but can never be satisfied.
    """

    __slots__ = ("validators", "inner_sets", "threshold",
                 "validators_mask", "mentioned_mask", "_hash")

    def __init__(self, validators: Iterable[int],
                 inner_sets: Iterable["QuorumSet"] = (),
                 threshold: int = 0):
        if threshold < 0:
            raise ValueError("threshold must be non-negative")
        vmask = node_set(validators)
        self.validators = members(vmask)
        self.inner_sets = tuple(inner_sets)
        self.threshold = threshold
        self.validators_mask = vmask
        mentioned = vmask
        for inner in self.inner_sets:
            mentioned |= inner.mentioned_mask
        self.mentioned_mask = mentioned
        self._hash = hash((self.validators, self.inner_sets, threshold))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuorumSet):
            return NotImplemented
        return (self.threshold == other.threshold
                and self.validators == other.validators
                and self.inner_sets == other.inner_sets)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return (f"QuorumSet({list(self.validators)}, "
                f"{list(self.inner_sets)}, {self.threshold})")


class Fbas:
    """A node population plus one quorum set per node.

    Node indices are dense, 0..n-1, assigned by position.  Every node index
    referenced anywhere inside a quorum set must belong to the population;
    ingestion of raw documents (which may reference unknown identifiers) is
    handled by :mod:`fbaskit.io`, which adds unsatisfiable placeholder nodes
    before constructing an :class:`Fbas`.
    """

    __slots__ = ("quorum_sets", "names", "n", "all_mask")

    def __init__(self, quorum_sets: Iterable[QuorumSet],
                 names: Iterable[str] | None = None):
        self.quorum_sets = tuple(quorum_sets)
        self.n = len(self.quorum_sets)
        self.all_mask = (1 << self.n) - 1
        if names is None:
            self.names = tuple(f"n{i}" for i in range(self.n))
        else:
            self.names = tuple(names)
            if len(self.names) != self.n:
                raise ValueError("names and quorum sets differ in length")
        for qset in self.quorum_sets:
            if qset.mentioned_mask & ~self.all_mask:
                bad = members(qset.mentioned_mask & ~self.all_mask)
                raise ValueError(f"quorum set references unknown nodes {bad}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Fbas):
            return NotImplemented
        return self.names == other.names and self.quorum_sets == other.quorum_sets

    def __hash__(self) -> int:
        return hash((self.names, self.quorum_sets))

    def __repr__(self) -> str:
        return f"Fbas(n={self.n})"


@dataclass(frozen=True)
class Grouping:
    """A named group of nodes, e.g. the validators run by one organization."""

    name: str
    members: NodeSet


def satisfies(candidate: NodeSet | Iterable[int], quorum_set: QuorumSet) -> bool:
    """True iff the candidate's validators plus recursively satisfied inner
    sets reach the threshold.  Total function; a zero threshold is always
    satisfied, an excessive one never."""
    return _satisfies(as_node_set(candidate), quorum_set)


def _satisfies(cand: NodeSet, qset: QuorumSet) -> bool:
    need = qset.threshold - (cand & qset.validators_mask).bit_count()
    if need <= 0:
        return True
    inners = qset.inner_sets
    left = len(inners)
    if need > left:
        return False
    for inner in inners:
        if _satisfies(cand, inner):
            need -= 1
            if need == 0:
                return True
        left -= 1
        if need > left:
            return False
    return False


def is_slice_for(candidate: NodeSet | Iterable[int], node: int, fbas: Fbas) -> bool:
    """True iff the candidate is a quorum slice for ``node``: it contains the
    node itself and satisfies the node's quorum set."""
    cand = as_node_set(candidate)
    return bool(cand >> node & 1) and _satisfies(cand, fbas.quorum_sets[node])


def is_quorum(candidate: NodeSet | Iterable[int], fbas: Fbas) -> bool:
    """True iff the candidate is non-empty and contains a slice for each of
    its members."""
    cand = as_node_set(candidate)
    if cand == 0:
        return False
    qsets = fbas.quorum_sets
    rest = cand
    while rest:
        low = rest & -rest
        if not _satisfies(cand, qsets[low.bit_length() - 1]):
            return False
        rest ^= low
    return True


def is_satisfiable(partial: NodeSet | Iterable[int],
                   available: NodeSet | Iterable[int], fbas: Fbas) -> bool:
    """True iff every member of ``partial`` has a slice within
    ``partial | available`` — i.e. the partial set can still grow into a
    quorum using only the available nodes."""
    part = as_node_set(partial)
    pool = part | as_node_set(available)
    qsets = fbas.quorum_sets
    rest = part
    while rest:
        low = rest & -rest
        if not _satisfies(pool, qsets[low.bit_length() - 1]):
            return False
        rest ^= low
    return True


def greatest_quorum(candidate: NodeSet | Iterable[int], fbas: Fbas) -> NodeSet:
    """Fixed point of deleting members whose quorum set the remaining set no
    longer satisfies.  The result is the greatest quorum contained in the
    candidate, or 0 if there is none."""
    cur = as_node_set(candidate)
    qsets = fbas.quorum_sets
    while cur:
        keep = cur
        rest = cur
        while rest:
            low = rest & -rest
            if not _satisfies(cur, qsets[low.bit_length() - 1]):
                keep ^= low
            rest ^= low
        if keep == cur:
            return cur
        cur = keep
    return 0


def contains_quorum(candidate: NodeSet | Iterable[int], fbas: Fbas) -> bool:
    """True iff some subset of the candidate is a quorum."""
    return greatest_quorum(candidate, fbas) != 0


def _transform_qset(qset: QuorumSet, removed: NodeSet, remap: dict[int, int],
                    reduce_threshold: bool) -> QuorumSet:
    kept = [remap[v] for v in qset.validators if not removed >> v & 1]
    dropped = len(qset.validators) - len(kept)
    inners = tuple(_transform_qset(i, removed, remap, reduce_threshold)
                   for i in qset.inner_sets)
    threshold = qset.threshold - dropped if reduce_threshold else qset.threshold
    return QuorumSet(kept, inners, max(threshold, 0))


def _delete_nodes(fbas: Fbas, nodes: NodeSet | Iterable[int],
                  reduce_threshold: bool) -> Fbas:
    removed = as_node_set(nodes)
    kept_ids = [v for v in range(fbas.n) if not removed >> v & 1]
    remap = {v: i for i, v in enumerate(kept_ids)}
    qsets = [_transform_qset(fbas.quorum_sets[v], removed, remap, reduce_threshold)
             for v in kept_ids]
    return Fbas(qsets, [fbas.names[v] for v in kept_ids])


def delete_for_safety(fbas: Fbas, nodes: NodeSet | Iterable[int]) -> Fbas:
    """Remove nodes as for a safety analysis: the deleted nodes are assumed
    to cooperate with everyone, so they disappear from validator lists and
    thresholds drop accordingly.  Quorum intersection of the result is
    quorum intersection of the original despite the deleted nodes being
    faulty."""
    return _delete_nodes(fbas, nodes, reduce_threshold=True)


def delete_for_liveness(fbas: Fbas, nodes: NodeSet | Iterable[int]) -> Fbas:
    """Remove nodes as for a liveness analysis: the deleted nodes satisfy no
    one, so they disappear from validator lists with thresholds unchanged.
    Quorums of the result are the original quorums that avoid the deleted
    nodes."""
    return _delete_nodes(fbas, nodes, reduce_threshold=False)
