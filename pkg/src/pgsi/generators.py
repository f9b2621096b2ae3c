"""Seeded game generators: clustered random games plus tiny analytic fixtures.

The clustered model splits the nodes into random clusters, wires each
cluster densely enough to be total, and adds a few edges from every cluster
back to earlier ones. The cluster graph is then a DAG, which gives the games
a non-trivial SCC structure without letting them collapse into one big SCC.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .game import ParityGame


@dataclass
class ClusterParams:
    """Knobs for gen_clustered; defaults give mid-size layered games."""

    total_nodes: int
    cluster_size_range: tuple[int, int] = (10, 100)
    intra_out_degree_range: tuple[int, int] = (1, 4)
    inter_edges_per_cluster: int = 2
    priority_range: tuple[int, int] | None = None
    owner_bias: float = 0.5
    seed: int = 0


def _check_range(name: str, rng: tuple[int, int], low: int) -> None:
    if rng[0] > rng[1] or rng[0] < low:
        raise ValueError(f"{name} {rng} is infeasible")


def gen_clustered(params: ClusterParams) -> ParityGame:
    """Generate a clustered random game; deterministic per seed.

    Cluster sizes are drawn uniformly from the size range (the last cluster
    takes the remainder). Every node gets a uniformly drawn number of
    distinct successors inside its own cluster, so the game is total, and
    each cluster after the first sends a few extra edges to uniformly chosen
    nodes of earlier clusters. Priorities default to uniform over
    [0, min(total_nodes, 20)].
    """
    if params.total_nodes < 1:
        raise ValueError("total_nodes must be at least 1")
    if not 0 <= params.owner_bias <= 1:
        raise ValueError("owner_bias must lie in [0, 1]")
    _check_range("cluster_size_range", params.cluster_size_range, 1)
    _check_range("intra_out_degree_range", params.intra_out_degree_range, 1)
    if params.inter_edges_per_cluster < 0:
        raise ValueError("inter_edges_per_cluster must not be negative")
    pr_range = params.priority_range
    if pr_range is None:
        pr_range = (0, min(params.total_nodes, 20))
    _check_range("priority_range", pr_range, 0)

    rng = random.Random(params.seed)
    clusters: list[range] = []
    base = 0
    while base < params.total_nodes:
        size = rng.randint(*params.cluster_size_range)
        size = min(size, params.total_nodes - base)
        clusters.append(range(base, base + size))
        base += size

    succ: list[list[int]] = [[] for _ in range(params.total_nodes)]
    for cluster in clusters:
        members = list(cluster)
        for v in cluster:
            degree = rng.randint(*params.intra_out_degree_range)
            succ[v] = rng.sample(members, min(degree, len(members)))
    for index, cluster in enumerate(clusters[1:], start=1):
        earlier = list(range(clusters[index - 1].stop))
        for _ in range(params.inter_edges_per_cluster):
            src = rng.choice(list(cluster))
            succ[src].append(rng.choice(earlier))

    owner = [0 if rng.random() < params.owner_bias else 1 for _ in range(params.total_nodes)]
    priority = [rng.randint(*pr_range) for _ in range(params.total_nodes)]
    return ParityGame(owner=owner, priority=priority, succ=succ)


def gen_cycle_pair() -> ParityGame:
    """Two nodes forming one cycle whose top priority is even: player 0 wins."""
    return ParityGame.from_nodes([(0, 2, [1]), (1, 1, [0])])


def gen_two_cycle_choice() -> ParityGame:
    """A player-0 node choosing between two return nodes of priorities 2 and 3."""
    return ParityGame.from_nodes([(0, 1, [1, 2]), (1, 2, [0]), (1, 3, [0])])


def gen_sink(priority: int = 5, owner: int = 0) -> ParityGame:
    """A single sink; the owner is stuck, so the other player wins it."""
    return ParityGame.from_nodes([(owner, priority, [])])


def gen_chained_clusters_for_locality(n: int, seed: int = 0) -> tuple[ParityGame, int]:
    """A game whose start is decided inside a tiny head region.

    The head is a dominant even cycle (nodes 0 and 1) plus a few filler
    nodes feeding it; a long tail of n-ish nodes chains into the head but is
    unreachable from it, so a local solve starting at node 0 decides the
    start after visiting only head nodes while a global solve must process
    everything. Player 0 wins node 0 by construction. Returns (game, start).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = random.Random(seed)
    head = min(8, n)
    nodes: list[tuple[int, int, list[int]]] = [(0, 2, [1]), (1, 1, [0])]
    for _v in range(2, head):
        nodes.append((rng.randint(0, 1), 0, [rng.randint(0, 1)]))
    for v in range(head, n):
        back = rng.randint(0, v - 1)
        nodes.append((rng.randint(0, 1), rng.randint(0, 5), [back]))
    return ParityGame.from_nodes(nodes), 0
