"""Criterion networks: who is statistically indistinguishable from whom.

Vertices follow the record order of the dataset slice. Edges are stored
0-based with ``i < j``; Pajek files shift them to 1-based ids on export.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from rankgroup.errors import MissingBounds
from rankgroup.pairstats import Z_01, OverlapClass, PairResult, z_baseline

CRITERIA = ("z", "w", "overlap", "external")


@dataclass(frozen=True)
class StatNetwork:
    nodes: tuple[str, ...]
    edges: tuple[tuple[int, int, float], ...]
    criterion: str
    baseline_vec: Optional[tuple[float, ...]] = None
    sign_partition: Optional[tuple[int, ...]] = None
    threshold: Optional[float] = None

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise ValueError(f"unknown criterion {self.criterion!r}")

    @property
    def n(self) -> int:
        return len(self.nodes)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(i, j) for i, j, _ in self.edges}

    def edge_values(self) -> dict[tuple[int, int], float]:
        return {(i, j): v for i, j, v in self.edges}

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for i, j, _ in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg


def make_network(nodes, edges, criterion="external", **kwargs) -> StatNetwork:
    """Build a network from possibly unordered edges, normalizing to sorted ``i < j``."""
    canonical = {}
    for i, j, value in edges:
        if i == j:
            raise ValueError(f"self-loop on vertex {i}")
        key = (min(i, j), max(i, j))
        if key in canonical:
            raise ValueError(f"duplicate edge {key}")
        canonical[key] = float(value)
    ordered = tuple((i, j, v) for (i, j), v in sorted(canonical.items()))
    return StatNetwork(tuple(nodes), ordered, criterion, **kwargs)


def baseline_annotations(records) -> tuple[list[float], list[int]]:
    """z against the 10% expectation, clamped at zero, and its sign partition (2 above, 1 otherwise)."""
    vec, clu = [], []
    for r in records:
        z = z_baseline(r.p, r.pp_top10) if r.p > 0 else 0.0
        vec.append(max(0.0, z))
        clu.append(2 if z > 0 else 1)
    return vec, clu


def _index_pairs(pairs: Sequence[PairResult], records):
    index = {r.university: k for k, r in enumerate(records)}
    for pr in pairs:
        if not pr.ok:
            continue
        i, j = index[pr.u], index[pr.v]
        yield min(i, j), max(i, j), pr


def _assemble(records, edges, criterion, threshold=None) -> StatNetwork:
    records = list(records)
    vec, clu = baseline_annotations(records)
    return StatNetwork(
        nodes=tuple(r.university for r in records),
        edges=tuple(sorted(edges)),
        criterion=criterion,
        baseline_vec=tuple(vec),
        sign_partition=tuple(clu),
        threshold=threshold,
    )


def build_z_network(pairs, records, z_max: float = Z_01) -> StatNetwork:
    """Link pairs whose difference is not significant: ``|z| < z_max``, valued ``|z|``."""
    records = list(records)
    edges = [(i, j, pr.z_abs) for i, j, pr in _index_pairs(pairs, records) if pr.z_abs < z_max]
    return _assemble(records, edges, "z", z_max)


def build_w_network(pairs, records) -> StatNetwork:
    records = list(records)
    edges = [(i, j, pr.w) for i, j, pr in _index_pairs(pairs, records)]
    return _assemble(records, edges, "w")


def build_overlap_network(pairs, records) -> StatNetwork:
    """Value 1 for intersecting stability intervals, 2 when one contains the other."""
    records = list(records)
    lacking = [r.university for r in records if not r.has_bounds]
    if lacking:
        raise MissingBounds(f"{len(lacking)} record(s) lack stability bounds, e.g. {lacking[0]!r}")
    value = {OverlapClass.WEAK: 1.0, OverlapClass.STRONG: 2.0}
    edges = [
        (i, j, value[pr.overlap])
        for i, j, pr in _index_pairs(pairs, records)
        if pr.overlap in value
    ]
    return _assemble(records, edges, "overlap")


def filter_edges(network: StatNetwork, max_value: float) -> StatNetwork:
    """Drop edges valued above ``max_value``; vertices and annotations are kept."""
    kept = tuple(e for e in network.edges if not e[2] > max_value)
    threshold = max_value if network.threshold is None else min(network.threshold, max_value)
    return replace(network, edges=kept, threshold=threshold)


def weighted_adjacency(network: StatNetwork, mode: str = "binary") -> list[dict[int, float]]:
    """Neighbor maps for clustering; ``binary`` gives every edge weight 1."""
    if mode not in ("binary", "raw"):
        raise ValueError(f"edge-weight mode must be 'binary' or 'raw', got {mode!r}")
    adj: list[dict[int, float]] = [{} for _ in range(network.n)]
    for i, j, v in network.edges:
        w = 1.0 if mode == "binary" else v
        if w == 0 or math.isnan(w):
            continue
        adj[i][j] = w
        adj[j][i] = w
    return adj
