import io
import math

import pytest
from hypothesis import assume, given, strategies as st

from oracles import pearson_chi2
from rankgroup.errors import DegenerateTable, InvalidInterval, NonPositiveSize
from rankgroup.ingest import UniversityRecord
from rankgroup.pairstats import (
    ContingencyTable2x2,
    OverlapClass,
    all_pairs,
    bonferroni,
    chi_square,
    cohen_w,
    compare,
    contingency,
    effect_label,
    overlap_class,
    pooled_proportion,
    write_pairs_csv,
    z_baseline,
    z_pair,
)

LEIDEN = (6368, 0.138)
AMSTERDAM = (8519, 0.145)


def test_pooled_proportion():
    assert pooled_proportion(*LEIDEN, *AMSTERDAM) == pytest.approx(0.1420, abs=1e-4)
    assert pooled_proportion(250, 0.3, 250, 0.3) == pytest.approx(0.3)
    assert pooled_proportion(100, 0.0, 300, 0.2) == pytest.approx(0.15)
    with pytest.raises(NonPositiveSize):
        pooled_proportion(0, 0.1, 10, 0.1)


def test_z_pair():
    assert abs(z_pair(*LEIDEN, *AMSTERDAM)) == pytest.approx(1.211, abs=1e-3)
    assert z_pair(*LEIDEN, *AMSTERDAM) < 0
    assert z_pair(100, 0.3, 7000, 0.3) == 0.0
    assert z_pair(10, 0.0, 20, 0.0) == 0.0
    assert z_pair(10, 1.0, 20, 1.0) == 0.0


def test_z_baseline():
    assert z_baseline(5000, 0.1) == 0.0
    assert z_baseline(6368, 0.138) == z_pair(6368, 0.138, 6368, 0.100)
    # hand evaluation: pooled 0.125, se = sqrt(0.125 * 0.875 * 2 / 1000)
    assert z_baseline(1000, 0.15) == pytest.approx(0.05 / math.sqrt(0.125 * 0.875 * 0.002), rel=1e-12)
    assert z_baseline(1000, 0.15) == pytest.approx(3.3806, abs=1e-4)
    assert z_baseline(1000, 0.05) < 0


def test_contingency():
    t = contingency(*LEIDEN, *AMSTERDAM)
    assert t.cells[0] == pytest.approx((878.784, 5489.216))
    assert t.cells[1] == pytest.approx((1235.255, 7283.745))
    assert contingency(10, 0, 10, 0).cells == ((0, 10), (0, 10))
    assert contingency(50, 1.0, 50, 0.5).cells == ((50, 0), (25, 25))
    with pytest.raises(NonPositiveSize):
        contingency(-1, 0.1, 10, 0.1)


def test_leiden_amsterdam_expected_counts():
    e = contingency(*LEIDEN, *AMSTERDAM).expected()
    assert e[0] == pytest.approx((904.2924, 5463.708), abs=1e-3)
    assert e[1] == pytest.approx((1209.747, 7309.253), abs=1e-3)


def test_chi_square():
    t = contingency(*LEIDEN, *AMSTERDAM)
    assert chi_square(t) == pytest.approx(1.465, abs=1e-3)
    assert chi_square(contingency(300, 0.2, 900, 0.2)) == pytest.approx(0.0, abs=1e-12)
    assert chi_square(ContingencyTable2x2(((20, 80), (10, 90)))) == pytest.approx(3.9216, abs=1e-4)
    with pytest.raises(DegenerateTable):
        chi_square(contingency(10, 0, 10, 0))


def test_cohen_w():
    t = contingency(*LEIDEN, *AMSTERDAM)
    # the summed cell contributions are 0.000098; its square root is 0.0099
    assert cohen_w(t) ** 2 == pytest.approx(0.000098, abs=1e-6)
    assert cohen_w(t) == pytest.approx(0.009922, abs=1e-6)
    assert cohen_w(t) == pytest.approx(math.sqrt(1.465 / 14887), abs=1e-5)
    assert cohen_w(contingency(300, 0.2, 900, 0.2)) == pytest.approx(0.0, abs=1e-9)
    assert cohen_w(ContingencyTable2x2(((20, 80), (10, 90)))) == pytest.approx(0.1400, abs=1e-4)


@pytest.mark.parametrize("w,label", [
    (0.0, "negligible"), (0.099, "negligible"), (0.1, "small"), (0.29, "small"),
    (0.30, "medium"), (0.41, "medium"), (0.5, "large"), (3.0, "large"),
])
def test_effect_label(w, label):
    assert effect_label(w) == label


def test_overlap_class():
    assert overlap_class((0.1310, 0.1450), (0.1390, 0.1510)) is OverlapClass.WEAK
    assert overlap_class((0.10, 0.20), (0.12, 0.18)) is OverlapClass.STRONG
    assert overlap_class((0.12, 0.18), (0.10, 0.20)) is OverlapClass.STRONG
    assert overlap_class((0.10, 0.12), (0.13, 0.15)) is OverlapClass.NONE
    assert overlap_class((0.10, 0.12), (0.12, 0.15)) is OverlapClass.WEAK  # touching
    with pytest.raises(InvalidInterval):
        overlap_class((0.2, 0.1), (0.1, 0.3))


def test_bonferroni():
    assert bonferroni(0.05, 1) == 0.05
    assert bonferroni(0.05, 902 * 901 // 2) == pytest.approx(1.2304e-7, rel=1e-4)
    assert bonferroni(0.01, 47 * 46 // 2) == pytest.approx(9.25e-6, rel=1e-3)


def _rec(name, p, pp, lo=None, hi=None):
    return UniversityRecord(name, "C", "All sciences", "2012-2015", "fractional", p, p * pp, pp, lo, hi)


def test_all_pairs_counts_and_order():
    recs = [_rec(f"U{k:03d}", 1000 + 10 * k, 0.05 + k / 400) for k in range(47)]
    pairs = all_pairs(list(reversed(recs)))
    assert len(pairs) == 1081
    keys = [(p.u, p.v) for p in pairs]
    assert keys == sorted(keys)
    assert all(p.u < p.v for p in pairs)
    assert len(all_pairs(recs[:2])) == 1
    assert all_pairs(recs[:1]) == []


def test_all_pairs_matches_scalar_route(pair_fixture):
    (pr,) = all_pairs(pair_fixture)
    ref = compare(*sorted(pair_fixture.records, key=lambda r: r.university))
    assert pr.u == "Leiden University" and pr.v == "University of Amsterdam"
    assert pr.z_signed == pytest.approx(ref.z_signed, rel=1e-12)
    assert pr.chi2 == pytest.approx(ref.chi2, rel=1e-12)
    assert pr.w == pytest.approx(ref.w, rel=1e-12)
    assert pr.pooled_p == pytest.approx(ref.pooled_p, rel=1e-12)
    assert pr.overlap is OverlapClass.WEAK


def test_all_pairs_flags_bad_records():
    pairs = all_pairs([_rec("A", 1000, 0.1), _rec("B", 0, 0.0), _rec("C", 500, 0.2)])
    flagged = [p for p in pairs if not p.ok]
    assert {(p.u, p.v) for p in flagged} == {("A", "B"), ("B", "C")}
    assert all(math.isnan(p.w) for p in flagged)
    good = [p for p in pairs if p.ok]
    assert len(good) == 1 and good[0].w > 0


def test_pairs_csv():
    buf = io.StringIO()
    write_pairs_csv(all_pairs([_rec("A", 1000, 0.1, 0.08, 0.12), _rec("B", 2000, 0.15, 0.13, 0.17)]), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "u,v,z,chi2,w,effect,overlap,pooled_p,flag"
    assert lines[1].startswith("A,B,-")
    assert ",none," in lines[1]


# -- properties -----------------------------------------------------------

sizes = st.floats(1.0, 1e5)
# proportions realizable by counts: exact 0/1 or at least 1e-9 away from them
props = st.one_of(st.just(0.0), st.just(1.0), st.floats(1e-9, 1 - 1e-9))


@given(sizes, props, sizes, props)
def test_z_squared_is_chi_square(n1, p1, n2, p2):
    assume(abs(p1 - p2) > 1e-6)
    pooled = pooled_proportion(n1, p1, n2, p2)
    assume(0 < pooled < 1)
    t = contingency(n1, p1, n2, p2)
    assert z_pair(n1, p1, n2, p2) ** 2 == pytest.approx(chi_square(t), rel=1e-8)
    assert cohen_w(t) == pytest.approx(math.sqrt(chi_square(t) / t.total), abs=1e-12)
    assert 0 <= cohen_w(t) <= 1 + 1e-12


@given(st.integers(1, 5000), st.integers(1, 5000), st.data())
def test_chi_square_matches_scipy_on_integer_tables(n1, n2, data):
    t1 = data.draw(st.integers(0, n1))
    t2 = data.draw(st.integers(0, n2))
    assume(0 < t1 + t2 < n1 + n2)
    t = ContingencyTable2x2(((t1, n1 - t1), (t2, n2 - t2)))
    assert chi_square(t) == pytest.approx(pearson_chi2(t.cells), rel=1e-9, abs=1e-12)


@given(sizes, props, sizes, props)
def test_antisymmetry(n1, p1, n2, p2):
    assume(0 < pooled_proportion(n1, p1, n2, p2) < 1 or p1 == p2)
    assert z_pair(n1, p1, n2, p2) == pytest.approx(-z_pair(n2, p2, n1, p1), rel=1e-12)


@given(sizes, props, sizes, props, st.floats(1.5, 100))
def test_scale_changes_z_not_w(n1, p1, n2, p2, c):
    assume(abs(p1 - p2) > 1e-6 and 0 < pooled_proportion(n1, p1, n2, p2) < 1)
    z, zc = z_pair(n1, p1, n2, p2), z_pair(c * n1, p1, c * n2, p2)
    assert zc == pytest.approx(z * math.sqrt(c), rel=1e-9)
    w = cohen_w(contingency(n1, p1, n2, p2))
    assert cohen_w(contingency(c * n1, p1, c * n2, p2)) == pytest.approx(w, rel=1e-9)


intervals = st.tuples(props, props).map(sorted)


@given(intervals, intervals)
def test_overlap_symmetric_and_nested(a, b):
    ab, ba = overlap_class(a, b), overlap_class(b, a)
    assert ab is ba
    if ab is OverlapClass.STRONG:
        assert a[0] <= b[1] and b[0] <= a[1]
