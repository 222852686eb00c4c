"""Agreement between classifications and distribution of effect sizes."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np
from scipy import stats

from rankgroup.community import Classification

TOP_GROUP_RULE = "weighted-mean"


@dataclass(frozen=True)
class CramersV:
    v: float
    chi2: float
    df: int
    p: float
    flag: str | None = None


@dataclass(frozen=True)
class ConcordanceMatrix:
    methods: tuple[str, ...]
    v: np.ndarray
    pvalue: np.ndarray
    n: int


def joint_table(a: Sequence[int], b: Sequence[int]) -> np.ndarray:
    if len(a) != len(b):
        raise ValueError(f"classifications cover different node counts: {len(a)} vs {len(b)}")
    rows = {g: k for k, g in enumerate(sorted(set(a)))}
    cols = {g: k for k, g in enumerate(sorted(set(b)))}
    table = np.zeros((len(rows), len(cols)))
    for x, y in zip(a, b):
        table[rows[x], cols[y]] += 1
    return table


def _labels(c) -> Sequence[int]:
    return c.labels if isinstance(c, Classification) else c


def cramers_v(a, b) -> CramersV:
    """Cramér's V of the joint group memberships of two partitions.

    A partition with a single group makes V undefined; that case is returned
    flagged with V = 0 and p = 1 rather than raised.
    """
    table = joint_table(_labels(a), _labels(b))
    n = table.sum()
    ga, gb = table.shape
    df = (ga - 1) * (gb - 1)
    if min(ga, gb) < 2:
        return CramersV(0.0, 0.0, df, 1.0, flag="degenerate classification")
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / n
    chi2 = float(((table - expected) ** 2 / expected).sum())
    v = math.sqrt(chi2 / (n * (min(ga, gb) - 1)))
    return CramersV(min(v, 1.0), chi2, df, float(stats.chi2.sf(chi2, df)))


def stars(p: float) -> str:
    return "***" if p < 0.001 else ""


def concordance_matrix(classifications: Sequence[Classification], names: Sequence[str] | None = None) -> ConcordanceMatrix:
    if len(classifications) < 2:
        raise ValueError("need at least two classifications to compare")
    names = tuple(names or [c.name or c.method for c in classifications])
    k = len(classifications)
    v = np.eye(k)
    pv = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            res = cramers_v(classifications[i], classifications[j])
            v[i, j] = v[j, i] = res.v
            pv[i, j] = pv[j, i] = res.p
    return ConcordanceMatrix(names, v, pv, len(classifications[0].labels))


def write_concordance_csv(matrix: ConcordanceMatrix, stream: IO[str]) -> None:
    """Lower-triangular table of V with *** for p < .001, as in a printed report."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["cramers_v", *matrix.methods])
    for i, name in enumerate(matrix.methods):
        row = [name]
        for j in range(len(matrix.methods)):
            if j < i:
                row.append(f"{matrix.v[i, j]:.3f}{stars(matrix.pvalue[i, j])}")
            elif j == i:
                row.append("1.000")
            else:
                row.append("")
        writer.writerow(row)


def top_group(classification: Classification, records) -> list[str]:
    """Members of the group with the highest publication-weighted mean PP_top10%."""
    records = list(records)
    best, best_mean = None, -math.inf
    for g, members in sorted(classification.groups().items()):
        weight = sum(records[i].p for i in members)
        if weight > 0:
            mean = sum(records[i].p * records[i].pp_top10 for i in members) / weight
        else:
            mean = sum(records[i].pp_top10 for i in members) / len(members)
        if mean > best_mean:
            best, best_mean = g, mean
    if best is None:
        return []
    return sorted(records[i].university for i in classification.groups()[best])


def w_distribution(pairs) -> list[tuple[int, float]]:
    """Pairwise w values in decreasing order, ranked from 1."""
    valid = [pr for pr in pairs if pr.ok]
    ordered = sorted(valid, key=lambda pr: (-pr.w, pr.u, pr.v))
    return [(rank, pr.w) for rank, pr in enumerate(ordered, start=1)]


def proportion_at_most(pairs, w_cut: float) -> float:
    values = [pr.w for pr in pairs if pr.ok]
    if not values:
        raise ValueError("no evaluable pairs")
    return sum(1 for w in values if w <= w_cut) / len(values)


def write_distribution_csv(curve: Sequence[tuple[int, float]], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["rank", "w"])
    for rank, w in curve:
        writer.writerow([rank, f"{w:.6f}"])
