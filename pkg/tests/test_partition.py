import itertools

import numpy as np
import pytest

from gldpc.codes import repetition_code
from gldpc.decoder import iterate
from gldpc.ensemble import TannerGraph, sample_graph
from gldpc.partition import (BudgetExceeded, PartitionCounts, classify, count_candidates,
                             expurgation_scan, is_possibly_bad)
from oracles import brute_bad, brute_classify


def test_singleton_in_simple_graph():
    g = next(sample_graph((60, 3, 4), s) for s in range(100) if sample_graph((60, 3, 4), s).is_simple())
    w = classify(g, [5], c1=2, t=1)
    assert not w.J_b and not w.B_q and not w.G_q
    assert not is_possibly_bad(g, [5], 2, 1)
    assert expurgation_scan(g, 1, 2, 1) == []


def test_everything_corrupt():
    g = sample_graph((12, 3, 4), 0)
    w = classify(g, range(12), c1=2, t=1)
    assert len(w.J_b) == g.J


def test_all_questionable_is_bad():
    g = sample_graph((12, 3, 4), 0)
    for B in itertools.combinations(range(12), 3):
        w = classify(g, B, 2, 1)
        if w.B_q == w.B:
            assert is_possibly_bad(g, B, 2, 1)


def gadget():
    # variable 0 has both edges into check 0 (t = 1 => check 0 is in J_b)
    perm = [0, 1, 2, 4, 3, 5, 6, 8, 7, 9, 10, 12, 11, 13, 14, 15]
    return TannerGraph(8, 2, 4, perm)


def test_gadget_is_bad_and_found():
    g = gadget()
    assert is_possibly_bad(g, [0], c1=1, t=1)
    assert brute_bad(g, [0], 1, 1)
    hits = expurgation_scan(g, 2, 1, 1)
    assert (0,) in hits
    assert set(hits) == {B for b in (1, 2) for B in itertools.combinations(range(8), b)
                         if brute_bad(g, B, 1, 1)}


def test_multigraph_witness_matches_oracle():
    g = sample_graph((6, 2, 4), 3)
    for b in (1, 2, 3):
        for B in itertools.combinations(range(6), b):
            w = classify(g, B, 2, 1)
            assert (w.counts.a, w.counts.g, w.counts.dl, w.counts.ph, w.counts.om_edges) == \
                brute_classify(g, B, 2, 1)


@pytest.mark.parametrize("seed", range(6))
def test_invariants_and_partition_structure(seed):
    g = sample_graph((12, 3, 4), seed)
    for B in itertools.combinations(range(12), 2):
        for c1 in (1, 2, 3):
            w = classify(g, B, c1, 1)
            assert w.counts.violations(g.N, g.c, g.d, c1, 1) == []
            assert w.B_q | w.B_g == w.B and not (w.B_q & w.B_g)
            assert w.G_q | w.G_g == w.G and not (w.B & w.G)
            assert len(w.J_b) + len(w.J_g) == g.J
            # edges from B split between J_b and J_g
            to_jb = sum(1 for i in w.B for j in g.var_checks[i] if j in w.J_b)
            to_jg = sum(1 for i in w.B for j in g.var_checks[i] if j in w.J_g)
            assert to_jb == w.counts.om_edges and to_jb + to_jg == len(B) * g.c


def test_not_bad_shrinks_under_one_iteration():
    code = repetition_code(4)
    rng = np.random.default_rng(0)
    checked = 0
    for seed in range(40):
        g = sample_graph((12, 3, 4), seed)
        for _ in range(25):
            B = rng.choice(12, size=int(rng.integers(1, 5)), replace=False)
            v = np.zeros(12, dtype=np.int64)
            v[B] = 1
            for c1 in (1, 2, 3):
                if not is_possibly_bad(g, B, c1, 1):
                    checked += 1
                    assert np.count_nonzero(iterate(g, code, v, c1)) < len(B)
    assert checked > 100


def test_scan_errors_and_budget():
    g = sample_graph((12, 3, 4), 1)
    with pytest.raises(ValueError):
        expurgation_scan(g, 0, 2, 1)
    with pytest.raises(BudgetExceeded):
        expurgation_scan(g, 3, 2, 1, budget=100)
    assert count_candidates(12, 3) == 12 + 66 + 220
    with pytest.raises(ValueError):
        classify(g, [], 2, 1)
    with pytest.raises(ValueError):
        classify(g, [12], 2, 1)


def test_counts_violation_names():
    bad = PartitionCounts(a=1, g=2, dl=0, ph=1, om_edges=1)
    v = bad.violations(12, 3, 4, 2, 1)
    assert "0<=g<=a" in v and "(t+1)ph<=om" in v
