import math

import pytest

from rankgroup.errors import MissingBounds
from rankgroup.ingest import UniversityRecord
from rankgroup.netbuild import (
    baseline_annotations,
    build_overlap_network,
    build_w_network,
    build_z_network,
    filter_edges,
    make_network,
    weighted_adjacency,
)
from rankgroup.pairstats import Z_01, Z_05, all_pairs


def _rec(name, p, pp, lo=None, hi=None):
    return UniversityRecord(name, "C", "All sciences", "2012-2015", "fractional", p, p * pp, pp, lo, hi)


def test_leiden_amsterdam_networks(pair_fixture):
    recs = list(pair_fixture)
    pairs = all_pairs(recs)
    z = build_z_network(pairs, recs, Z_01)
    assert z.nodes == ("Leiden University", "University of Amsterdam")
    ((i, j, v),) = z.edges
    assert (i, j) == (0, 1) and v == pytest.approx(1.211, abs=1e-3)
    (w_edge,) = build_w_network(pairs, recs).edges
    assert w_edge[2] == pytest.approx(math.sqrt(1.4655153 / 14887), rel=1e-6)
    assert build_overlap_network(pairs, recs).edges == ((0, 1, 1.0),)


def test_significant_pair_has_no_edge():
    # sizes chosen so that |z| lands near 4.25, well beyond both cutoffs
    recs = [_rec("K", 1500, 0.155), _rec("B", 1630, 0.10)]
    pairs = all_pairs(recs)
    assert abs(pairs[0].z_signed) > 4
    assert build_z_network(pairs, recs, Z_01).edges == ()
    assert build_z_network(pairs, recs, Z_05).edges == ()


def test_single_record():
    recs = [_rec("A", 100, 0.1, 0.05, 0.15)]
    for net in (build_z_network([], recs), build_w_network([], recs), build_overlap_network([], recs)):
        assert net.n == 1 and net.edges == ()


def test_w_network_is_complete(synthetic):
    recs = list(synthetic.filter(country="Atlantis"))
    net = build_w_network(all_pairs(recs), recs)
    assert len(net.edges) == 6 * 5 // 2
    assert build_z_network(all_pairs(recs), recs, math.inf).edge_set() == net.edge_set()


def test_overlap_values():
    recs = [_rec("A", 100, 0.15, 0.10, 0.20), _rec("B", 100, 0.15, 0.12, 0.18), _rec("C", 100, 0.3, 0.25, 0.35)]
    net = build_overlap_network(all_pairs(recs), recs)
    assert net.edges == ((0, 1, 2.0),)
    with pytest.raises(MissingBounds):
        build_overlap_network([], [_rec("A", 100, 0.1)])


def test_vertex_order_follows_records(synthetic):
    recs = list(reversed(synthetic.records))
    net = build_z_network(all_pairs(recs), recs)
    assert net.nodes == tuple(r.university for r in recs)
    assert all(i < j for i, j, _ in net.edges)


def test_filter_edges(synthetic):
    recs = list(synthetic)
    pairs = all_pairs(recs)
    wide = build_z_network(pairs, recs, Z_01)
    assert filter_edges(wide, Z_05).edge_set() == build_z_network(pairs, recs, math.nextafter(Z_05, 3)).edge_set()
    w = build_w_network(pairs, recs)
    assert filter_edges(filter_edges(w, 0.1), 0.3).edges == filter_edges(w, 0.1).edges
    assert filter_edges(filter_edges(w, 0.3), 0.05).edges == filter_edges(w, 0.05).edges
    f = filter_edges(w, 0.05)
    assert (f.nodes, f.baseline_vec, f.sign_partition) == (w.nodes, w.baseline_vec, w.sign_partition)


def test_baseline_annotations():
    vec, clu = baseline_annotations([_rec("at", 4000, 0.10), _rec("hi", 3000, 0.312), _rec("lo", 3000, 0.05)])
    assert vec[0] == 0.0 and clu[0] == 1
    assert vec[1] > 0 and clu[1] == 2
    assert vec[2] == 0.0 and clu[2] == 1


def test_make_network_normalizes():
    net = make_network("abc", [(2, 0, 1.5), (1, 0, 0.5)])
    assert net.edges == ((0, 1, 0.5), (0, 2, 1.5))
    with pytest.raises(ValueError):
        make_network("ab", [(0, 1, 1), (1, 0, 2)])
    with pytest.raises(ValueError):
        make_network("ab", [(1, 1, 1)])


def test_weighted_adjacency_modes():
    net = make_network("abc", [(0, 1, 0.25), (1, 2, 2.0)])
    assert weighted_adjacency(net, "binary")[1] == {0: 1.0, 2: 1.0}
    assert weighted_adjacency(net, "raw")[1] == {0: 0.25, 2: 2.0}
    with pytest.raises(ValueError):
        weighted_adjacency(net, "log")
