"""Two-proportion statistics between universities.

All counts stay real-valued: under fractional counting a university can
have 878.784 top-10% papers, and the tables below are built from exactly
those numbers. No continuity correction is applied anywhere.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from typing import IO, Optional, Sequence

import numpy as np

from rankgroup.errors import (
    DegenerateTable,
    DegenerateVariance,
    InvalidInterval,
    NonPositiveSize,
)

BASELINE = 0.1  # expected share of top-10% papers

Z_05 = 1.96
Z_01 = 2.576
Z_001 = 3.29


class OverlapClass(str, Enum):
    NONE = "none"
    WEAK = "weak"
    STRONG = "strong"


@dataclass(frozen=True)
class ContingencyTable2x2:
    """Rows are the two universities; columns are (top-10%, non-top)."""

    cells: tuple[tuple[float, float], tuple[float, float]]

    @property
    def row_totals(self) -> tuple[float, float]:
        return (self.cells[0][0] + self.cells[0][1], self.cells[1][0] + self.cells[1][1])

    @property
    def col_totals(self) -> tuple[float, float]:
        return (self.cells[0][0] + self.cells[1][0], self.cells[0][1] + self.cells[1][1])

    @property
    def total(self) -> float:
        return sum(self.row_totals)

    def expected(self) -> tuple[tuple[float, float], tuple[float, float]]:
        rows, cols, n = self.row_totals, self.col_totals, self.total
        return tuple(tuple(rows[i] * cols[j] / n for j in range(2)) for i in range(2))


@dataclass(frozen=True)
class PairResult:
    u: str
    v: str
    z_signed: float
    chi2: float
    w: float
    overlap: Optional[OverlapClass]
    pooled_p: float
    flag: Optional[str] = None  # set when the pair could not be evaluated

    @property
    def z_abs(self) -> float:
        return abs(self.z_signed)

    @property
    def ok(self) -> bool:
        return self.flag is None


def _check_sizes(n1: float, n2: float) -> None:
    if not n1 > 0 or not n2 > 0:
        raise NonPositiveSize(f"publication counts must be positive, got n1={n1}, n2={n2}")


def pooled_proportion(n1: float, p1: float, n2: float, p2: float) -> float:
    """Combined top-10% rate of two universities: (t1 + t2) / (n1 + n2)."""
    _check_sizes(n1, n2)
    return (n1 * p1 + n2 * p2) / (n1 + n2)


def z_pair(n1: float, p1: float, n2: float, p2: float) -> float:
    """Pooled two-proportion z statistic, positive when ``p1 > p2``."""
    pooled = pooled_proportion(n1, p1, n2, p2)
    if p1 == p2:
        return 0.0
    variance = pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2)
    if variance <= 0.0:
        raise DegenerateVariance(f"pooled proportion {pooled} leaves no variance but p1 != p2")
    return (p1 - p2) / math.sqrt(variance)


def z_baseline(n: float, p: float, p0: float = BASELINE) -> float:
    """z of one university's proportion against the expected ``p0`` (same size on both sides)."""
    return z_pair(n, p, n, p0)


def contingency(n1: float, p1: float, n2: float, p2: float) -> ContingencyTable2x2:
    _check_sizes(n1, n2)
    t1, t2 = p1 * n1, p2 * n2
    return ContingencyTable2x2(((t1, n1 - t1), (t2, n2 - t2)))


def chi_square(table: ContingencyTable2x2) -> float:
    """Pearson chi-square of a 2x2 table, without Yates correction."""
    if min(table.row_totals) <= 0 or min(table.col_totals) <= 0:
        raise DegenerateTable(f"table has an empty margin: {table.cells}")
    expected = table.expected()
    return sum(
        (table.cells[i][j] - expected[i][j]) ** 2 / expected[i][j]
        for i in range(2)
        for j in range(2)
    )


def cohen_w(table: ContingencyTable2x2) -> float:
    """Cohen's w from cell proportions of observed vs. expected counts.

    Equal to ``sqrt(chi_square(table) / table.total)``.
    """
    n = table.total
    if min(table.row_totals) <= 0 or min(table.col_totals) <= 0:
        raise DegenerateTable(f"table has an empty margin: {table.cells}")
    expected = table.expected()
    total = 0.0
    for i in range(2):
        for j in range(2):
            p1 = table.cells[i][j] / n
            p0 = expected[i][j] / n
            total += (p1 - p0) ** 2 / p0
    return math.sqrt(total)


def effect_label(w: float) -> str:
    if w < 0.1:
        return "negligible"
    if w < 0.3:
        return "small"
    if w < 0.5:
        return "medium"
    return "large"


def overlap_class(a: Sequence[float], b: Sequence[float]) -> OverlapClass:
    """Classify two closed intervals as disjoint, intersecting, or nested."""
    (alo, ahi), (blo, bhi) = a, b
    if alo > ahi or blo > bhi:
        raise InvalidInterval(f"lower bound above upper bound: {tuple(a)}, {tuple(b)}")
    if (blo <= alo and ahi <= bhi) or (alo <= blo and bhi <= ahi):
        return OverlapClass.STRONG
    if alo <= bhi and blo <= ahi:
        return OverlapClass.WEAK
    return OverlapClass.NONE


def bonferroni(alpha: float, m: int) -> float:
    return alpha / m


def pair_count(k: int) -> int:
    return k * (k - 1) // 2


def compare(a, b) -> PairResult:
    """All pairwise statistics for two records, z signed as ``a - b``."""
    n1, p1, n2, p2 = a.p, a.pp_top10, b.p, b.pp_top10
    ov = overlap_class(a.interval, b.interval) if a.has_bounds and b.has_bounds else None
    pooled = pooled_proportion(n1, p1, n2, p2)
    z = z_pair(n1, p1, n2, p2)
    if p1 == p2:
        chi2, w = 0.0, 0.0
    else:
        table = contingency(n1, p1, n2, p2)
        chi2, w = chi_square(table), cohen_w(table)
    return PairResult(a.university, b.university, z, chi2, w, ov, pooled)


def _ordered(records):
    return sorted(records, key=lambda r: r.university)


def all_pairs(records) -> list[PairResult]:
    """Every unordered pair, ordered lexicographically by (u, v) with u < v.

    Pairs that cannot be evaluated (e.g. a university without publications)
    are returned with NaN statistics and ``flag`` set instead of aborting.
    """
    recs = _ordered(records.records if hasattr(records, "records") else records)
    k = len(recs)
    if k < 2:
        return []

    n = np.array([r.p for r in recs], dtype=float)
    p = np.array([r.pp_top10 for r in recs], dtype=float)
    iu, ju = np.triu_indices(k, 1)
    stats = _pair_arrays(n[iu], p[iu], n[ju], p[ju])

    results = []
    for idx, (i, j) in enumerate(zip(iu.tolist(), ju.tolist())):
        a, b = recs[i], recs[j]
        ov = overlap_class(a.interval, b.interval) if a.has_bounds and b.has_bounds else None
        flag = stats["flag"][idx]
        results.append(PairResult(
            a.university, b.university,
            float(stats["z"][idx]), float(stats["chi2"][idx]), float(stats["w"][idx]),
            ov, float(stats["pooled"][idx]), flag,
        ))
    return results


def _pair_arrays(n1, p1, n2, p2) -> dict:
    """Vectorized counterpart of :func:`compare` used for large batches."""
    with np.errstate(divide="ignore", invalid="ignore"):
        bad_size = ~((n1 > 0) & (n2 > 0))
        pooled = (n1 * p1 + n2 * p2) / (n1 + n2)
        equal = p1 == p2
        var = pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2)
        z = np.where(equal, 0.0, (p1 - p2) / np.sqrt(var))

        t1, t2 = p1 * n1, p2 * n2
        cells = np.stack([t1, n1 - t1, t2, n2 - t2])
        rows = np.stack([n1, n1, n2, n2])
        c_top, c_non = t1 + t2, (n1 - t1) + (n2 - t2)
        cols = np.stack([c_top, c_non, c_top, c_non])
        total = n1 + n2
        expected = rows * cols / total
        chi2 = np.where(equal, 0.0, ((cells - expected) ** 2 / expected).sum(axis=0))
        w = np.where(
            equal, 0.0,
            np.sqrt(((cells / total - expected / total) ** 2 / (expected / total)).sum(axis=0)),
        )
        degenerate = ~equal & ((var <= 0) | (c_top <= 0) | (c_non <= 0))

    flags = np.full(len(n1), None, dtype=object)
    flags[degenerate] = "degenerate variance"
    flags[bad_size] = "non-positive publication count"
    bad = bad_size | degenerate
    for arr in (z, chi2, w):
        arr[bad] = np.nan
    pooled = np.where(bad_size, np.nan, pooled)
    return {"z": z, "chi2": chi2, "w": w, "pooled": pooled, "flag": flags.tolist()}


PAIR_CSV_FIELDS = ("u", "v", "z", "chi2", "w", "effect", "overlap", "pooled_p", "flag")


def write_pairs_csv(pairs: Sequence[PairResult], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(PAIR_CSV_FIELDS)
    for r in pairs:
        writer.writerow([
            r.u, r.v, f"{r.z_signed:.6f}", f"{r.chi2:.6f}", f"{r.w:.6f}",
            effect_label(r.w) if r.ok else "",
            r.overlap.value if r.overlap is not None else "",
            f"{r.pooled_p:.6f}", r.flag or "",
        ])
