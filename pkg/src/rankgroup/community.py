"""Decomposing criterion networks into groups of universities."""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from typing import IO, Optional, Sequence

from rankgroup.netbuild import StatNetwork, weighted_adjacency

_EPS = 1e-12
DEFAULT_STARTS = 5


@dataclass(frozen=True)
class Classification:
    labels: tuple[int, ...]  # dense group ids 1..G, one per vertex
    q: float
    method: str  # "components", "louvain" or "external"
    seed: Optional[int] = None
    name: Optional[str] = None

    @property
    def n_groups(self) -> int:
        return max(self.labels, default=0)

    def groups(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for node, g in enumerate(self.labels):
            out.setdefault(g, []).append(node)
        return out


def dense_labels(labels: Sequence) -> tuple[int, ...]:
    """Renumber arbitrary group ids to 1..G in order of first appearance."""
    mapping: dict = {}
    return tuple(mapping.setdefault(g, len(mapping) + 1) for g in labels)


def _modularity_adj(adj: list[dict[int, float]], labels: Sequence, resolution: float = 1.0) -> float:
    two_m = sum(sum(nbrs.values()) for nbrs in adj)
    if two_m == 0:
        return 0.0
    internal: dict = {}
    strength: dict = {}
    for i, nbrs in enumerate(adj):
        ci = labels[i]
        strength[ci] = strength.get(ci, 0.0) + sum(nbrs.values())
        for j, w in nbrs.items():
            if labels[j] == ci:
                internal[ci] = internal.get(ci, 0.0) + w
    return sum(internal.values()) / two_m - resolution * sum((s / two_m) ** 2 for s in strength.values())


def modularity(network: StatNetwork, labels: Sequence, weights: str = "binary", resolution: float = 1.0) -> float:
    """Newman-Girvan modularity of a partition; 0 for a network without edges."""
    if len(labels) != network.n:
        raise ValueError(f"{len(labels)} labels for {network.n} vertices")
    return _modularity_adj(weighted_adjacency(network, weights), labels, resolution)


def weak_components(network: StatNetwork, weights: str = "binary") -> Classification:
    parent = list(range(network.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j, _ in network.edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    labels = dense_labels([find(i) for i in range(network.n)])
    return Classification(labels, modularity(network, labels, weights), "components")


def isolates(network: StatNetwork) -> list[str]:
    return [label for label, d in zip(network.nodes, network.degrees()) if d == 0]


class _Graph:
    """Weighted graph with explicit self-loop weights, as produced by aggregation."""

    def __init__(self, nbrs: list[dict[int, float]], loops: list[float]):
        self.nbrs = nbrs
        self.loops = loops
        self.strength = [sum(nb.values()) + 2.0 * lp for nb, lp in zip(nbrs, loops)]
        self.two_m = sum(self.strength)

    def __len__(self):
        return len(self.nbrs)


def _move_nodes(g: _Graph, rng: random.Random, resolution: float) -> tuple[list[int], bool]:
    n = len(g)
    comm = list(range(n))
    tot = list(g.strength)
    scale = resolution / g.two_m
    moved_any = False
    while True:
        moved = False
        order = list(range(n))
        rng.shuffle(order)
        for i in order:
            ci, ki = comm[i], g.strength[i]
            links: dict[int, float] = {}
            for j, w in g.nbrs[i].items():
                links[comm[j]] = links.get(comm[j], 0.0) + w
            tot[ci] -= ki
            gains = {c: links.get(c, 0.0) - tot[c] * ki * scale for c in links.keys() | {ci}}
            top = max(gains.values())
            if gains[ci] >= top - _EPS:
                best = ci
            else:
                best = min(c for c, gain in gains.items() if gain >= top - _EPS)
            tot[best] += ki
            if best != ci:
                comm[i] = best
                moved = moved_any = True
        if not moved:
            return comm, moved_any


def _aggregate(g: _Graph, comm: list[int]) -> tuple[_Graph, list[int]]:
    renumber = dense_labels(comm)
    k = max(renumber)
    nbrs: list[dict[int, float]] = [{} for _ in range(k)]
    loops = [0.0] * k
    for i in range(len(g)):
        ci = renumber[i] - 1
        loops[ci] += g.loops[i]
        for j, w in g.nbrs[i].items():
            cj = renumber[j] - 1
            if ci == cj:
                loops[ci] += w / 2.0  # each internal edge is seen from both ends
            else:
                nbrs[ci][cj] = nbrs[ci].get(cj, 0.0) + w
    return _Graph(nbrs, loops), [c - 1 for c in renumber]


def _louvain_run(adj: list[dict[int, float]], rng: random.Random, resolution: float) -> list[int]:
    membership = list(range(len(adj)))
    g = _Graph([dict(nb) for nb in adj], [0.0] * len(adj))
    if g.two_m == 0:
        return membership
    while True:
        comm, moved = _move_nodes(g, rng, resolution)
        if not moved:
            return membership
        g, mapping = _aggregate(g, comm)
        membership = [mapping[c] for c in membership]


def louvain(
    network: StatNetwork,
    seed: int = 0,
    resolution: float = 1.0,
    weights: str = "binary",
    starts: int = DEFAULT_STARTS,
) -> Classification:
    """Two-phase Louvain: local moves from singletons, then aggregation, until no gain.

    Vertex visit order is shuffled with a seeded ``random.Random``; among
    equally good target communities the lowest id wins, and a vertex only
    leaves its community for a strictly positive gain. The first of ``starts``
    runs uses ``seed`` itself, later runs derived seeds; the partition with
    the highest modularity is kept (earliest on ties).
    """
    if starts < 1:
        raise ValueError(f"starts must be at least 1, got {starts}")
    adj = weighted_adjacency(network, weights)
    if not any(adj):
        starts = 1  # nothing to randomize
    best_labels, best_q = None, -float("inf")
    for k in range(starts):
        rng = random.Random(seed if k == 0 else f"{seed}:{k}")
        labels = dense_labels(_louvain_run(adj, rng, resolution))
        q = _modularity_adj(adj, labels, resolution)
        if q > best_q + _EPS:
            best_labels, best_q = labels, q
    return Classification(best_labels, best_q, "louvain", seed)


def external(labels: Sequence, network: Optional[StatNetwork] = None, name: Optional[str] = None) -> Classification:
    """Wrap a partition from elsewhere (e.g. a .clu file) as a Classification."""
    dense = dense_labels(labels)
    q = modularity(network, dense) if network is not None else float("nan")
    return Classification(dense, q, "external", name=name)


CLASSIFICATION_CSV_FIELDS = ("university", "group", "q", "method", "seed", "name")


def write_classifications_csv(nodes: Sequence[str], classifications: Sequence[Classification], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CLASSIFICATION_CSV_FIELDS)
    for c in classifications:
        for label, g in zip(nodes, c.labels):
            writer.writerow([label, g, f"{c.q:.6f}", c.method, "" if c.seed is None else c.seed, c.name or ""])


def read_classifications_csv(stream: IO[str]) -> tuple[list[str], list[Classification]]:
    """Inverse of :func:`write_classifications_csv`; classifications keyed by name (or method)."""
    nodes: list[str] = []
    by_name: dict[str, dict] = {}
    for row in csv.DictReader(stream):
        key = row.get("name") or row["method"]
        entry = by_name.setdefault(key, {"labels": {}, "row": row})
        entry["labels"][row["university"]] = int(row["group"])
        if row["university"] not in nodes:
            nodes.append(row["university"])
    out = []
    for key, entry in by_name.items():
        missing = [u for u in nodes if u not in entry["labels"]]
        if missing:
            raise ValueError(f"classification {key!r} lacks {len(missing)} universities, e.g. {missing[0]!r}")
        row = entry["row"]
        out.append(Classification(
            labels=dense_labels([entry["labels"][u] for u in nodes]),
            q=float(row["q"]) if row.get("q") else float("nan"),
            method=row["method"],
            seed=int(row["seed"]) if row.get("seed") else None,
            name=key,
        ))
    return nodes, out
