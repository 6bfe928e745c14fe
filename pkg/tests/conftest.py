import random

import pytest

from fbaskit import Fbas, QuorumSet, canonical_family, members, node_set


def fam(*sets) -> tuple[int, ...]:
    """Canonical family from iterables of node indices."""
    return canonical_family(node_set(s) for s in sets)


def to_sets(family) -> list[set[int]]:
    return [set(members(mask)) for mask in family]


@pytest.fixture
def three_node() -> Fbas:
    # Node 0 needs one of {1, 2}; node 1 needs both 0 and 2; node 2 needs
    # two of everyone.  Quorums: {0,2} and {0,1,2}.
    return Fbas([
        QuorumSet([1, 2], (), 1),
        QuorumSet([0, 2], (), 2),
        QuorumSet([0, 1, 2], (), 2),
    ], names=["0", "1", "2"])


@pytest.fixture
def five_node() -> Fbas:
    # Hub-and-two-cliques: node 0 bridges {1,2} and {3,4}; every minimal
    # quorum needs node 0.
    return Fbas([
        QuorumSet([0, 1, 2, 3, 4], (), 3),
        QuorumSet([0, 1, 2], (), 3),
        QuorumSet([0, 1, 2], (), 3),
        QuorumSet([0, 3, 4], (), 3),
        QuorumSet([0, 3, 4], (), 3),
    ], names=["0", "1", "2", "3", "4"])


FIVE_NODE_MIN_QUORUMS = fam({0, 1, 2}, {0, 3, 4})
FIVE_NODE_BLOCKING = fam({0}, {1, 3}, {1, 4}, {2, 3}, {2, 4})
FIVE_NODE_SPLITTING = fam({0})


@pytest.fixture
def seven_node_cascade() -> Fbas:
    # Nodes 0 and 1 have weak quorum sets, so a failure of node 2 cascades
    # through them and dissolves every quorum.
    everyone = [0, 1, 2, 3, 4, 5, 6]
    return Fbas([
        QuorumSet([0, 1, 2], (), 3),
        QuorumSet([0, 1, 2, 3], (), 3),
        QuorumSet(everyone, (), 5),
        QuorumSet(everyone, (), 5),
        QuorumSet(everyone, (), 5),
        QuorumSet(everyone, (), 5),
        QuorumSet(everyone, (), 5),
    ], names=[str(i) for i in range(7)])


SEVEN_NODE_BLOCKING = fam(
    {2}, {1, 3}, {1, 4}, {1, 5}, {1, 6}, {0, 3},
    {3, 4, 5}, {3, 4, 6}, {3, 5, 6}, {0, 4, 5}, {0, 4, 6}, {0, 5, 6}, {4, 5, 6})
SEVEN_NODE_SPLITTING = fam(
    {0, 1, 2}, {1, 2, 3}, {1, 2, 4}, {1, 2, 5}, {1, 2, 6},
    {2, 3, 4}, {2, 3, 5}, {2, 3, 6}, {2, 4, 5}, {2, 4, 6}, {2, 5, 6})


@pytest.fixture
def disjoint_pair() -> Fbas:
    # Two nodes, each a quorum by itself: no quorum intersection.
    return Fbas([QuorumSet([0], (), 1), QuorumSet([1], (), 1)])


def random_flat_qset(rng: random.Random, n: int) -> QuorumSet:
    size = rng.randint(1, n)
    validators = rng.sample(range(n), size)
    threshold = rng.randint(1, size)
    return QuorumSet(validators, (), threshold)


def random_fbas(rng: random.Random, n: int) -> Fbas:
    """Random population mixing flat and nested quorum sets, including the
    odd unsatisfiable threshold and (rarely) an always-satisfied one."""
    qsets = []
    for _ in range(n):
        roll = rng.random()
        if roll < 0.55:
            size = rng.randint(0, n)
            validators = rng.sample(range(n), size)
            extra = rng.choice([0, 0, 0, 1])
            threshold = rng.randint(0 if rng.random() < 0.05 else 1,
                                    max(size, 1)) + extra
            qsets.append(QuorumSet(validators, (), threshold))
        else:
            inner = [random_flat_qset(rng, n)
                     for _ in range(rng.randint(1, 3))]
            validators = rng.sample(range(n), rng.randint(0, max(n // 2, 1)))
            units = len(validators) + len(inner)
            threshold = rng.randint(1, units + rng.choice([0, 1]))
            qsets.append(QuorumSet(validators, inner, threshold))
    return Fbas(qsets)
