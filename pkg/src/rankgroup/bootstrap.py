"""Stability intervals for PP_top10% from aggregate counts.

Only the aggregate counts of a university are known, so the publication set
is modeled as ``round(n)`` papers of which ``round(p * n)`` are in the top
10%. Drawing ``round(n)`` papers with replacement from that set gives a
binomial number of top papers, which is what gets sampled here.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, replace

import numpy as np

from rankgroup.errors import TooFewPapers

RNG_ALGORITHM = "numpy.random.Philox (SeedSequence keyed by seed and university label)"
PROVENANCE = "bootstrap-binomial"


@dataclass(frozen=True)
class StabilityInterval:
    lower: float
    upper: float
    replicates: int
    coverage: float
    seed: int

    def __iter__(self):
        return iter((self.lower, self.upper))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _nearest_rank(sorted_values: np.ndarray, q: float) -> float:
    # ceil(q*B)-th order statistic, 1-based; q*B computed with a small guard
    # so that e.g. 0.975*1000 does not round up to 976
    b = len(sorted_values)
    rank = max(1, math.ceil(q * b - 1e-9))
    return float(sorted_values[min(rank, b) - 1])


def _generator(seed: int, key: tuple[int, ...] = ()) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def resample_proportions(n: float, p: float, replicates: int, rng: np.random.Generator) -> np.ndarray:
    papers = _round_half_up(n)
    if papers < 1:
        raise TooFewPapers(f"need at least one paper to resample, got n={n}")
    top = min(papers, max(0, _round_half_up(p * n)))
    return rng.binomial(papers, top / papers, size=replicates) / papers


def stability_interval(
    n: float,
    p: float,
    replicates: int = 1000,
    coverage: float = 0.95,
    seed: int = 0,
    *,
    _key: tuple[int, ...] = (),
) -> StabilityInterval:
    """Percentile bootstrap interval for the top-10% share of ``n`` papers."""
    if replicates < 100:
        raise ValueError(f"replicates must be at least 100, got {replicates}")
    if not 0.0 < coverage < 1.0:
        raise ValueError(f"coverage must lie in (0, 1), got {coverage}")
    draws = np.sort(resample_proportions(n, p, replicates, _generator(seed, _key)))
    tail = (1.0 - coverage) / 2.0
    return StabilityInterval(
        lower=_nearest_rank(draws, tail),
        upper=_nearest_rank(draws, 1.0 - tail),
        replicates=replicates,
        coverage=coverage,
        seed=seed,
    )


def label_key(label: str) -> tuple[int]:
    """Stream key for one university, independent of record order and worker count."""
    return (zlib.crc32(label.encode("utf-8")),)


def fill_missing_bounds(dataset, replicates: int = 1000, coverage: float = 0.95, seed: int = 0):
    """Return ``dataset`` with bootstrap bounds for every record lacking them.

    Records that already carry bounds are passed through untouched. Records
    that cannot be resampled keep empty bounds and get an error provenance.
    """
    records = []
    for r in dataset.records:
        if r.has_bounds:
            records.append(r)
            continue
        try:
            si = stability_interval(r.p, r.pp_top10, replicates, coverage, seed, _key=label_key(r.university))
        except TooFewPapers:
            records.append(replace(r, bounds_source="error: too few papers"))
            continue
        records.append(replace(r, ci_lower=si.lower, ci_upper=si.upper, bounds_source=PROVENANCE))
    if all(a is b for a, b in zip(records, dataset.records)):
        return dataset
    metadata = dict(dataset.metadata)
    metadata["bootstrap"] = {
        "rng": RNG_ALGORITHM,
        "seed": seed,
        "replicates": replicates,
        "coverage": coverage,
        "percentile": "nearest-rank",
    }
    return replace(dataset, records=tuple(records), metadata=metadata)
