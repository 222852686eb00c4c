"""Reading, validating and slicing ranking-indicator CSV tables."""

from __future__ import annotations

import csv
import io
import os
import re
from dataclasses import dataclass, field, replace
from typing import IO, Iterable, Optional, Union

from rankgroup.errors import InconsistentScale, MalformedRow, MissingColumn

COUNTING_MODES = ("fractional", "full")

# canonical name -> accepted header spellings (after normalization)
_ALIASES = {
    "university": ("university", "university_name", "name"),
    "country": ("country",),
    "field": ("field",),
    "period": ("period", "years"),
    "counting": ("counting", "fractional", "fractional_counting"),
    "p": ("p",),
    "p_top10": ("p_top10", "p_top_10"),
    "pp_top10": ("pp_top10", "pp_top_10"),
    "ci_lower": ("ci_lower", "pp_top10_lb", "pp_top10_lower", "pp_top_10_lb", "lower", "lower_bound", "lb"),
    "ci_upper": ("ci_upper", "pp_top10_ub", "pp_top10_upper", "pp_top_10_ub", "upper", "upper_bound", "ub"),
}
REQUIRED = ("university", "country", "field", "period", "counting", "p", "pp_top10")
CANONICAL_ORDER = (
    "university", "country", "field", "period", "counting",
    "p", "p_top10", "pp_top10", "ci_lower", "ci_upper",
)


@dataclass(frozen=True)
class UniversityRecord:
    university: str
    country: str
    field: str
    period: str
    counting: str
    p: float
    p_top10: float
    pp_top10: float
    ci_lower: Optional[float] = None
    ci_upper: Optional[float] = None
    # "published" for bounds read from the input, "bootstrap-binomial" when
    # estimated by fill_missing_bounds, None when absent
    bounds_source: Optional[str] = None

    @property
    def has_bounds(self) -> bool:
        return self.ci_lower is not None and self.ci_upper is not None

    @property
    def interval(self) -> tuple[float, float]:
        return (self.ci_lower, self.ci_upper)

    def slice_key(self) -> tuple[str, str, str, str]:
        return (self.country, self.field, self.period, self.counting)


@dataclass(frozen=True)
class Dataset:
    records: tuple[UniversityRecord, ...] = ()
    source: str = "<memory>"
    metadata: dict = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def labels(self) -> list[str]:
        return [r.university for r in self.records]

    def countries(self) -> list[str]:
        """Distinct countries in first-appearance order."""
        return list(dict.fromkeys(r.country for r in self.records))

    def filter(self, country=None, field=None, period=None, counting=None) -> "Dataset":
        return filter_dataset(self, country=country, field=field, period=period, counting=counting)


@dataclass(frozen=True)
class Violation:
    university: str
    rule: str
    observed: dict

    def __str__(self) -> str:
        vals = ", ".join(f"{k}={v}" for k, v in self.observed.items())
        return f"{self.university}: {self.rule} ({vals})"


def _normalize_header(name: str) -> str:
    name = name.strip().lstrip("﻿").lower()
    name = re.sub(r"[\s\-%]+", "_", name)
    return name.strip("_")


def _resolve_columns(header: list[str]) -> dict[str, int]:
    normalized = [_normalize_header(h) for h in header]
    columns = {}
    for canonical, aliases in _ALIASES.items():
        for alias in aliases:
            if alias in normalized:
                columns[canonical] = normalized.index(alias)
                break
    missing = [c for c in REQUIRED if c not in columns]
    if missing:
        raise MissingColumn(f"header lacks required column(s): {', '.join(missing)}")
    return columns


def _number(text: str, row: int, name: str) -> float:
    cleaned = text.strip().replace(",", "").replace(" ", "")
    try:
        return float(cleaned)
    except ValueError:
        raise MalformedRow(row, f"{name} is not numeric: {text!r}") from None


def _optional_number(text: Optional[str], row: int, name: str) -> Optional[float]:
    if text is None or not text.strip():
        return None
    return _number(text, row, name)


def _counting(text: str, row: int) -> str:
    value = text.strip().lower()
    if value in ("1", "1.0", "true", "yes", "fractional", "frac"):
        return "fractional"
    if value in ("0", "0.0", "false", "no", "full", "whole"):
        return "full"
    raise MalformedRow(row, f"counting mode not recognized: {text!r}")


def _normalize_scale(pp: float, lower: Optional[float], upper: Optional[float], row: int):
    """Return the (pp, lower, upper) triple as proportions.

    The triple is treated as percentages when any member exceeds 1. A mixed
    triple (some members above 1, some not) is accepted only if reading every
    member as a percentage leaves the bounds bracketing pp.
    """
    triple = [v for v in (pp, lower, upper) if v is not None]
    if not any(v > 1.0 for v in triple):
        return pp, lower, upper
    pp, lower, upper = (None if v is None else v / 100.0 for v in (pp, lower, upper))
    mixed = any(v <= 1.0 for v in triple)
    if mixed and lower is not None and upper is not None and not (lower <= pp <= upper):
        raise InconsistentScale(row, "pp_top10 and its bounds disagree on percent vs fraction scale")
    return pp, lower, upper


def _row_to_record(cells: list[str], columns: dict[str, int], row: int) -> UniversityRecord:
    def cell(name):
        idx = columns.get(name)
        if idx is None or idx >= len(cells):
            return None
        return cells[idx]

    for name in REQUIRED:
        if cell(name) is None:
            raise MalformedRow(row, f"missing value for {name}")

    p = _number(cell("p"), row, "p")
    pp = _number(cell("pp_top10"), row, "pp_top10")
    lower = _optional_number(cell("ci_lower"), row, "ci_lower")
    upper = _optional_number(cell("ci_upper"), row, "ci_upper")
    if (lower is None) != (upper is None):
        raise MalformedRow(row, "only one of the two stability bounds is given")
    pp, lower, upper = _normalize_scale(pp, lower, upper, row)

    p_top10 = _optional_number(cell("p_top10"), row, "p_top10")
    if p_top10 is None:
        p_top10 = pp * p

    return UniversityRecord(
        university=cell("university").strip(),
        country=cell("country").strip(),
        field=cell("field").strip(),
        period=cell("period").strip(),
        counting=_counting(cell("counting"), row),
        p=p,
        p_top10=p_top10,
        pp_top10=pp,
        ci_lower=lower,
        ci_upper=upper,
        bounds_source=None if lower is None else "published",
    )


def parse_csv(source: Union[str, bytes, IO, os.PathLike], name: Optional[str] = None) -> Dataset:
    """Parse a comma-delimited UTF-8 indicator table.

    ``source`` may be a path, raw bytes, or an open binary/text stream.
    Header matching is case-insensitive and treats spaces, hyphens and
    underscores alike. Row numbers in errors are 1-based data rows.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            data = fh.read()
        name = name or str(source)
    elif isinstance(source, bytes):
        data = source
    else:
        data = source.read()
    text = data.decode("utf-8-sig") if isinstance(data, bytes) else data.lstrip("﻿")

    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise MissingColumn("input is empty; expected a header row") from None
    columns = _resolve_columns(header)

    records = []
    for row, cells in enumerate(reader, start=1):
        if not cells or all(not c.strip() for c in cells):
            continue
        records.append(_row_to_record(cells, columns, row))
    return Dataset(tuple(records), source=name or "<stream>")


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def write_csv(dataset: Dataset, stream: IO[str]) -> None:
    """Write ``dataset`` in canonical form (fraction scale, full float precision)."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CANONICAL_ORDER)
    for r in dataset.records:
        writer.writerow([
            r.university, r.country, r.field, r.period, r.counting,
            _fmt(r.p), _fmt(r.p_top10), _fmt(r.pp_top10), _fmt(r.ci_lower), _fmt(r.ci_upper),
        ])


def to_csv_string(dataset: Dataset) -> str:
    buf = io.StringIO()
    write_csv(dataset, buf)
    return buf.getvalue()


def filter_dataset(dataset: Dataset, country=None, field=None, period=None, counting=None) -> Dataset:
    """Keep records matching every given predicate; ``None`` matches everything."""
    wanted = {"country": country, "field": field, "period": period, "counting": counting}
    wanted = {k: v for k, v in wanted.items() if v is not None}
    kept = tuple(r for r in dataset.records if all(getattr(r, k) == v for k, v in wanted.items()))
    return replace(dataset, records=kept)


def validate(dataset: Union[Dataset, Iterable[UniversityRecord]]) -> list[Violation]:
    """Check the soft record invariants and return every violation found."""
    records = dataset.records if isinstance(dataset, Dataset) else tuple(dataset)
    report = []
    for r in records:
        if r.p < 0:
            report.append(Violation(r.university, "p >= 0", {"p": r.p}))
        if r.p_top10 < 0 or r.p_top10 > r.p:
            report.append(Violation(r.university, "0 <= p_top10 <= p", {"p_top10": r.p_top10, "p": r.p}))
        if not 0.0 <= r.pp_top10 <= 1.0:
            report.append(Violation(r.university, "0 <= pp_top10 <= 1", {"pp_top10": r.pp_top10}))
        if r.has_bounds and not (0.0 <= r.ci_lower <= r.ci_upper <= 1.0):
            report.append(Violation(
                r.university, "0 <= ci_lower <= ci_upper <= 1",
                {"ci_lower": r.ci_lower, "ci_upper": r.ci_upper},
            ))
        if abs(r.p_top10 - r.pp_top10 * r.p) > 0.5 + 1e-6 * r.p:
            report.append(Violation(
                r.university, "|p_top10 - pp_top10*p| <= 0.5 + 1e-6*p",
                {"p_top10": r.p_top10, "pp_top10": r.pp_top10, "p": r.p},
            ))

    seen = set()
    for r in records:
        key = (r.slice_key(), r.university)
        if key in seen:
            report.append(Violation(r.university, "unique label within slice", {"slice": "/".join(r.slice_key())}))
        seen.add(key)
    return report
