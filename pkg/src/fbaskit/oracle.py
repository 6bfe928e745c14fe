"""Brute-force reference implementations for validating the enumerations.

Everything here works by exhausting all 2^n subsets, so it is only usable
for small populations (hard guard at 20 nodes).  The set logic is written
independently of the search algorithms — plain frozensets and itertools —
sharing only the quorum-set satisfaction primitive, so that a bug in the
branch-and-bound machinery cannot hide behind an identical bug here.
"""

from __future__ import annotations

import itertools

from .core import Fbas, satisfies

MAX_NODES = 20

Family = set[frozenset[int]]


def _guard(fbas: Fbas) -> None:
    if fbas.n > MAX_NODES:
        raise ValueError(
            f"population of {fbas.n} exceeds the brute-force limit of {MAX_NODES}")


def _subsets(universe: range, smallest: int = 0):
    for size in range(smallest, len(universe) + 1):
        yield from (frozenset(c) for c in itertools.combinations(universe, size))


def _minimal(family: Family) -> Family:
    return {candidate for candidate in family
            if not any(other < candidate for other in family)}


def brute_quorums(fbas: Fbas) -> Family:
    """Every quorum: non-empty subsets satisfying each member's quorum set."""
    _guard(fbas)
    quorums: Family = set()
    for candidate in _subsets(range(fbas.n), smallest=1):
        if all(satisfies(candidate, fbas.quorum_sets[v]) for v in candidate):
            quorums.add(candidate)
    return quorums


def brute_minimal_quorums(fbas: Fbas) -> Family:
    return _minimal(brute_quorums(fbas))


def brute_blocking_sets(fbas: Fbas) -> Family:
    """Minimal sets intersecting every quorum."""
    _guard(fbas)
    quorums = brute_quorums(fbas)
    blocking: Family = set()
    for candidate in _subsets(range(fbas.n)):
        if all(candidate & quorum for quorum in quorums):
            blocking.add(candidate)
    return _minimal(blocking)


def brute_splitting_sets(fbas: Fbas) -> Family:
    """Minimal sets containing a pairwise quorum intersection.

    Pairs include a quorum with itself, matching the analysis semantics:
    a set covering an entire quorum threatens safety by itself.  A disjoint
    quorum pair therefore produces the family holding only the empty set.
    """
    _guard(fbas)
    quorums = sorted(brute_quorums(fbas), key=sorted)
    intersections: Family = set()
    for i, a in enumerate(quorums):
        for b in quorums[i:]:
            intersections.add(a & b)
    return _minimal(intersections)


def brute_has_quorum_intersection(fbas: Fbas) -> bool:
    quorums = list(brute_quorums(fbas))
    return all(a & b for i, a in enumerate(quorums) for b in quorums[i + 1:])
