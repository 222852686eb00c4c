"""Statistical grouping of research universities from ranking-indicator tables.

Universities that cannot be told apart under a criterion (overlapping
stability intervals, a non-significant two-proportion z-test, or a small
Cohen's w) are linked; the resulting networks are decomposed into groups
with Louvain modularity optimization and exported as Pajek files.
"""

from rankgroup.ingest import Dataset, UniversityRecord, filter_dataset, parse_csv, validate
from rankgroup.pairstats import (
    PairResult,
    all_pairs,
    chi_square,
    cohen_w,
    contingency,
    overlap_class,
    pooled_proportion,
    z_baseline,
    z_pair,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "PairResult",
    "UniversityRecord",
    "all_pairs",
    "chi_square",
    "cohen_w",
    "contingency",
    "filter_dataset",
    "overlap_class",
    "parse_csv",
    "pooled_proportion",
    "validate",
    "z_baseline",
    "z_pair",
]
