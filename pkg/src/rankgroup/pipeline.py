"""Per-scope analysis: pairs, the three criterion networks, and the method battery."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from typing import Optional

from scipy import stats

from rankgroup import bootstrap
from rankgroup.community import Classification, isolates, louvain, weak_components
from rankgroup.concordance import concordance_matrix, top_group
from rankgroup.ingest import Dataset
from rankgroup.netbuild import (
    StatNetwork,
    build_overlap_network,
    build_w_network,
    build_z_network,
    filter_edges,
)
from rankgroup.pairstats import Z_01, Z_05, all_pairs, bonferroni, pair_count

log = logging.getLogger(__name__)

WORLD = "world"


@dataclass
class RunConfig:
    input: Optional[str] = None
    countries: list[str] = field(default_factory=list)
    world: bool = False
    criteria: tuple[str, ...] = ("z", "w", "overlap")
    z_thresholds: tuple[float, ...] = (Z_01, Z_05)
    w_thresholds: tuple[float, ...] = (0.1, 0.3)
    bonferroni: bool = False
    replicates: int = 1000
    coverage: float = 0.95
    edge_weights: str = "binary"
    seed: int = 0
    out: str = "."
    slugify: bool = False
    field: Optional[str] = None
    period: Optional[str] = None
    counting: Optional[str] = None

    def __post_init__(self):
        if any(t <= 0 for t in (*self.z_thresholds, *self.w_thresholds)):
            raise ValueError("thresholds must be positive")
        if self.edge_weights not in ("binary", "raw"):
            raise ValueError(f"edge weights must be 'binary' or 'raw', got {self.edge_weights!r}")


def z_from_alpha(alpha: float) -> float:
    """Two-sided critical |z| for significance level ``alpha``."""
    return float(stats.norm.isf(alpha / 2.0))


def alpha_from_z(z: float) -> float:
    return float(2.0 * stats.norm.sf(z))


def effective_z_thresholds(config: RunConfig, n_pairs: int) -> list[float]:
    """Configured z cutoffs, rescaled through alpha / m when Bonferroni is on."""
    cutoffs = sorted(set(config.z_thresholds), reverse=True)
    if config.bonferroni and n_pairs > 1:
        cutoffs = [z_from_alpha(bonferroni(alpha_from_z(z), n_pairs)) for z in cutoffs]
    return cutoffs


def scopes(dataset: Dataset, config: RunConfig) -> list[tuple[str, Dataset]]:
    """(scope name, slice) pairs; all countries plus the world set when none are named."""
    if config.countries:
        names = list(config.countries)
        with_world = config.world
    else:
        names = dataset.countries()
        with_world = True
    out = [(c, dataset.filter(country=c)) for c in names]
    if with_world:
        out.append((WORLD, dataset))
    return out


def _fmt_threshold(t: float) -> str:
    return f"{t:.6g}"


@dataclass
class ScopeResult:
    scope: str
    dataset: Dataset
    pairs: list
    networks: dict[str, StatNetwork]
    # method name -> thresholded network used for grouping
    method_networks: dict[str, StatNetwork]
    louvain: dict[str, Classification]
    components: dict[str, Classification]
    warnings: list[str] = field(default_factory=list)

    def report(self) -> dict:
        records = self.dataset.records
        methods = {}
        for name, net in self.method_networks.items():
            lv, comp = self.louvain[name], self.components[name]
            methods[name] = {
                "edges": len(net.edges),
                "louvain_groups": lv.n_groups,
                "louvain_q": round(lv.q, 6),
                "components": comp.n_groups,
                "components_q": round(comp.q, 6),
                "isolates": isolates(net),
                "top_group": top_group(lv, records),
            }
        flagged = sum(1 for p in self.pairs if not p.ok)
        out = {
            "scope": self.scope,
            "universities": len(records),
            "pairs": len(self.pairs),
            "flagged_pairs": flagged,
            "methods": methods,
            "top_group_rule": "weighted-mean",
            "warnings": list(self.warnings),
        }
        if len(records) < 2:
            out["warnings"].append("insufficient pairs")
        if len(self.louvain) >= 2 and len(records) >= 2:
            cm = concordance_matrix(list(self.louvain.values()), list(self.louvain))
            out["concordance"] = {
                a: {b: round(float(cm.v[i, j]), 6) for j, b in enumerate(cm.methods)}
                for i, a in enumerate(cm.methods)
            }
        if "bootstrap" in self.dataset.metadata:
            out["bootstrap"] = self.dataset.metadata["bootstrap"]
        return out


def analyze_scope(scope: str, data: Dataset, config: RunConfig) -> ScopeResult:
    labels = data.labels
    if len(set(labels)) != len(labels):
        raise ValueError(
            f"scope {scope!r} has duplicate university labels; narrow the input with --field/--period/--counting"
        )
    warnings = []
    if "overlap" in config.criteria and not all(r.has_bounds for r in data.records):
        data = bootstrap.fill_missing_bounds(data, config.replicates, config.coverage, config.seed)
        unresolved = [r.university for r in data.records if not r.has_bounds]
        if unresolved:
            warnings.append(f"no stability bounds for {len(unresolved)} record(s); overlap criterion skipped")

    records = list(data.records)
    pairs = all_pairs(records)
    networks: dict[str, StatNetwork] = {}
    method_networks: dict[str, StatNetwork] = {}

    if "overlap" in config.criteria and all(r.has_bounds for r in records):
        networks["overlap"] = build_overlap_network(pairs, records)
        method_networks["overlap"] = networks["overlap"]
    if "z" in config.criteria:
        cutoffs = effective_z_thresholds(config, pair_count(len(records)))
        networks["z"] = build_z_network(pairs, records, cutoffs[0])
        for t in cutoffs:
            method_networks[f"z<{_fmt_threshold(t)}"] = build_z_network(pairs, records, t)
    if "w" in config.criteria:
        networks["w"] = build_w_network(pairs, records)
        for t in sorted(set(config.w_thresholds)):
            method_networks[f"w<={_fmt_threshold(t)}"] = filter_edges(networks["w"], t)

    louvains, comps = {}, {}
    for name, net in method_networks.items():
        lv = louvain(net, seed=config.seed, weights=config.edge_weights)
        louvains[name] = Classification(lv.labels, lv.q, lv.method, lv.seed, name)
        comp = weak_components(net, weights=config.edge_weights)
        comps[name] = Classification(comp.labels, comp.q, comp.method, None, name)
    return ScopeResult(scope, data, pairs, networks, method_networks, louvains, comps, warnings)


def output_root(scope: str, config: RunConfig) -> str:
    root = scope.replace(" ", "_") if config.slugify else scope
    return os.path.join(config.out, root)
