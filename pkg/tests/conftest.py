import csv
import io
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rankgroup.ingest import parse_csv  # noqa: E402

DATA = Path(__file__).parent / "data"


@pytest.fixture
def pair_fixture_path():
    return DATA / "leiden_amsterdam.csv"


@pytest.fixture
def pair_fixture(pair_fixture_path):
    return parse_csv(pair_fixture_path)


def synthetic_csv(seed=7, countries=(("Atlantis", 6), ("Borduria", 5), ("Syldavia", 1)), with_bounds=True) -> str:
    """Small fake ranking table with plausible counts and published-style percent bounds."""
    rng = np.random.default_rng(seed)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    header = ["University", "Country", "Field", "Period", "Fractional", "P", "P_top10", "PP_top10"]
    if with_bounds:
        header += ["PP_top10_LB", "PP_top10_UB"]
    writer.writerow(header)
    for country, k in countries:
        for i in range(k):
            p = float(rng.integers(800, 9000))
            pp = float(np.round(rng.uniform(0.06, 0.20), 3))
            half = 1.96 * (pp * (1 - pp) / p) ** 0.5
            row = [f"Université {country} {i + 1}", country, "All sciences", "2012-2015", "1",
                   f"{p:.0f}", f"{pp * p:.3f}", f"{100 * pp:.1f}"]
            if with_bounds:
                row += [f"{100 * (pp - half):.2f}", f"{100 * (pp + half):.2f}"]
            writer.writerow(row)
    return out.getvalue()


@pytest.fixture
def synthetic_path(tmp_path):
    path = tmp_path / "synthetic.csv"
    path.write_text(synthetic_csv(), encoding="utf-8")
    return path


@pytest.fixture
def synthetic(synthetic_path):
    return parse_csv(synthetic_path)
