from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gldpc.codes import hamming_code, rs_code
from gldpc.ensemble import (EnsembleParams, GraphFormatError, TannerGraph, nominal_rate,
                            parse_graph, sample_graph, sample_simple_graph, serialize_graph,
                            simplify_graph)


def test_sample_degrees_and_determinism():
    g = sample_graph((30, 4, 30), 7)
    assert g.J == 4
    vd, cd = g.degrees()
    assert (vd == 4).all() and (cd == 30).all()
    assert g == sample_graph((30, 4, 30), 7)
    assert g != sample_graph((30, 4, 30), 8)


def test_divisibility():
    with pytest.raises(ValueError):
        sample_graph((10, 3, 4), 0)
    with pytest.raises(ValueError):
        EnsembleParams(10, 3, 4, 2)


def test_params_checks():
    code = rs_code(30, 24, 31)
    p = EnsembleParams.for_code(30, 4, code, 3)
    assert p.J == 4 and p.t == 3
    with pytest.raises(ValueError):
        EnsembleParams.for_code(30, 4, code, 2)   # q > 2 needs c1 > c/2
    with pytest.raises(ValueError):
        EnsembleParams(30, 4, 30, 5)


@pytest.mark.parametrize("c,d,k,val", [
    (9, 127, 120, Fraction(64, 127)), (4, 30, 24, Fraction(1, 5))])
def test_nominal_rate(c, d, k, val):
    assert nominal_rate(c, d, k) == val


def test_nominal_rate_family():
    rates = [nominal_rate(c, (1 << m) - 1, hamming_code(m).k)
             for m, c in zip(range(7, 12), [9, 16, 28, 51, 93])]
    assert [round(float(r), 4) for r in rates] == [0.5039, 0.4980, 0.5068, 0.5015, 0.5002]
    assert nominal_rate(1, 7, 4) == Fraction(4, 7)


@settings(max_examples=50, deadline=None)
@given(N=st.integers(1, 40), c=st.integers(1, 5), seed=st.integers(0, 2**63))
def test_regular_and_round_trip(N, c, seed):
    d = c   # N*c divisible by d
    g = sample_graph((N, c, d), seed)
    vd, cd = g.degrees()
    assert (vd == c).all() and (cd == d).all()
    assert sorted(g.perm.tolist()) == list(range(N * c))
    h = parse_graph(serialize_graph(g))
    assert h == g
    # multiplicities survive the round trip
    assert np.array_equal(np.sort(h.var_checks, axis=1), np.sort(g.var_checks, axis=1))


def test_neighbor_lists_consistent():
    g = sample_graph((12, 3, 4), 3)
    for j in range(g.J):
        for i in g.check_neighbors(j):
            assert j in g.var_neighbors(i)
    # multiset check: edge (i, j) counted the same from both sides
    for i in range(g.N):
        for j in set(g.var_neighbors(i).tolist()):
            assert (g.var_neighbors(i) == j).sum() == (g.check_neighbors(j) == i).sum()


def test_parse_errors():
    data = serialize_graph(sample_graph((6, 2, 4), 1)).decode()
    with pytest.raises(GraphFormatError):
        parse_graph(data[: len(data) // 2])
    lines = data.splitlines()
    with pytest.raises(GraphFormatError):
        parse_graph("\n".join(["GLDPC-GRAPH v2"] + lines[1:]))
    with pytest.raises(GraphFormatError):
        parse_graph("\n".join(lines[:3] + ["00000000"]))
    # Nc != Jd: rebuild a consistent checksum so that validation, not CRC, fails
    import zlib
    body = f"{lines[0]}\n6 2 5\n{lines[2]}\n"
    bad = body + f"{zlib.crc32(body.encode()):08x}\n"
    with pytest.raises(GraphFormatError):
        parse_graph(bad)


def test_not_a_permutation():
    with pytest.raises(GraphFormatError):
        TannerGraph(2, 2, 2, [0, 0, 1, 2])


def test_uniformity_smoke():
    # image of socket 0 over 1e5 samples of N=4, c=2, d=4 (8 sockets)
    n = 100_000
    hits = np.zeros(8, dtype=np.int64)
    for s in range(n):
        hits[sample_graph((4, 2, 4), s).perm[0]] += 1
    p = 1 / 8
    sigma = np.sqrt(n * p * (1 - p))
    assert np.all(np.abs(hits - n * p) < 3 * sigma)


def test_simplify_preserves_degrees():
    g0 = sample_graph((3000, 4, 30), 0)
    assert not g0.is_simple()
    g = sample_simple_graph((3000, 4, 30), 0)
    assert g.is_simple() and g == sample_simple_graph((3000, 4, 30), 0)
    vd, cd = g.degrees()
    assert (vd == 4).all() and (cd == 30).all()
    # only sockets on parallel edges and their swap partners move
    assert np.count_nonzero(g.perm != g0.perm) < 200
    simple = next(sample_graph((60, 3, 4), s) for s in range(100) if sample_graph((60, 3, 4), s).is_simple())
    assert simplify_graph(simple, 1) == simple
