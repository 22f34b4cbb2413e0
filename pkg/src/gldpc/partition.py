"""Classification of a corrupt set into the eight-set partition and the expurgation scan."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from numba import njit

from .ensemble import TannerGraph


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class PartitionCounts:
    a: int          # |B|
    g: int          # |B_?|
    dl: int         # |G_?|
    ph: int         # |J_b|
    om_edges: int   # edges between B and J_b

    def violations(self, N: int, c: int, d: int, c1: int, t: int) -> list[str]:
        """Names of the structural inequalities that fail (empty for a valid partition)."""
        a, g, dl, ph, om = self.a, self.g, self.dl, self.ph, self.om_edges
        bad = []
        if not (0 <= g <= a):
            bad.append("0<=g<=a")
        if not (0 <= dl <= N - a):
            bad.append("0<=dl<=N-a")
        if (t + 1) * ph > om:
            bad.append("(t+1)ph<=om")
        if om > min(a * c, ph * d):
            bad.append("om<=min(ac,ph d)")
        if a * c - om > N * c - ph * d:
            bad.append("ac-om<=Nc-ph d")
        if dl * c1 > ph * d - om:
            bad.append("dl c1<=ph d-om")
        if g * (c - c1 + 1) > om:
            bad.append("g(c-c1+1)<=om")
        return bad

    def possibly_bad(self) -> bool:
        return self.dl >= self.a - self.g


@dataclass(frozen=True)
class PartitionWitness:
    B: frozenset
    B_q: frozenset      # corrupt, fewer than c1 edges to J_g
    B_g: frozenset
    G: frozenset
    G_q: frozenset      # correct, at least c1 edges to J_b
    G_g: frozenset
    J_b: frozenset      # checks with more than t edges into B
    J_g: frozenset
    counts: PartitionCounts


def _check_set(g: TannerGraph, B) -> np.ndarray:
    Bs = np.unique(np.asarray(list(B), dtype=np.int64))
    if Bs.size == 0:
        raise ValueError("B must be nonempty")
    if Bs[0] < 0 or Bs[-1] >= g.N:
        raise ValueError("variable index out of range")
    return Bs


def classify(g: TannerGraph, B, c1: int, t: int) -> PartitionWitness:
    Bs = _check_set(g, B)
    inB = np.zeros(g.N, dtype=bool)
    inB[Bs] = True
    edges_into_B = np.bincount(g.var_checks[Bs].ravel(), minlength=g.J)
    jb = edges_into_B > t
    to_jb = jb[g.var_checks].sum(axis=1)          # per variable, with multiplicity
    B_q = inB & (g.c - to_jb < c1)
    G_q = ~inB & (to_jb >= c1)
    counts = PartitionCounts(int(Bs.size), int(B_q.sum()), int(G_q.sum()), int(jb.sum()),
                             int(edges_into_B[jb].sum()))

    def fs(mask):
        return frozenset(np.flatnonzero(mask).tolist())

    return PartitionWitness(fs(inB), fs(B_q), fs(inB & ~B_q), fs(~inB), fs(G_q),
                            fs(~inB & ~G_q), fs(jb), fs(~jb), counts)


def is_possibly_bad(g: TannerGraph, B, c1: int, t: int) -> bool:
    return classify(g, B, c1, t).counts.possibly_bad()


@njit(cache=True)
def _scan(var_checks, check_vars, b_max, c1, t, max_hits):
    N, c = var_checks.shape
    J = check_vars.shape[0]
    cnt = np.zeros(J, dtype=np.int64)
    jb = np.zeros(J, dtype=np.bool_)
    stamp = np.zeros(N, dtype=np.int64)
    inB = np.zeros(N, dtype=np.bool_)
    hits = np.full((max_hits, b_max), -1, dtype=np.int64)
    nhits = 0
    visited = 0
    touched = np.empty(b_max * c, dtype=np.int64)
    jbl = np.empty(b_max * c, dtype=np.int64)
    cur = 0
    for b in range(1, b_max + 1):
        if b > N:
            break
        idx = np.arange(b)
        while True:
            visited += 1
            nt = 0
            for k in range(b):
                inB[idx[k]] = True
                for e in range(c):
                    ch = var_checks[idx[k], e]
                    if cnt[ch] == 0:
                        touched[nt] = ch
                        nt += 1
                    cnt[ch] += 1
            nj = 0
            for k in range(nt):
                if cnt[touched[k]] > t:
                    jb[touched[k]] = True
                    jbl[nj] = touched[k]
                    nj += 1
            if nj > 0:
                gq = 0
                for k in range(b):
                    s = 0
                    for e in range(c):
                        if jb[var_checks[idx[k], e]]:
                            s += 1
                    if c - s < c1:
                        gq += 1
                cur += 1
                dl = 0
                for k in range(nj):
                    ch = jbl[k]
                    for m in range(check_vars.shape[1]):
                        u = check_vars[ch, m]
                        if inB[u] or stamp[u] == cur:
                            continue
                        stamp[u] = cur
                        s = 0
                        for e in range(c):
                            if jb[var_checks[u, e]]:
                                s += 1
                        if s >= c1:
                            dl += 1
                if dl >= b - gq:
                    if nhits < max_hits:
                        for k in range(b):
                            hits[nhits, k] = idx[k]
                    nhits += 1
            for k in range(nt):
                cnt[touched[k]] = 0
                jb[touched[k]] = False
            for k in range(b):
                inB[idx[k]] = False
            # next combination in colex order
            k = 0
            while k < b - 1 and idx[k] + 1 == idx[k + 1]:
                idx[k] = k
                k += 1
            if idx[k] + 1 >= N and k == b - 1:
                break
            idx[k] += 1
    return hits, nhits, visited


def count_candidates(N: int, b_max: int) -> int:
    return sum(comb(N, b) for b in range(1, b_max + 1))


def expurgation_scan(g: TannerGraph, b_max: int, c1: int, t: int,
                     budget: int = 50_000_000, max_hits: int = 10_000) -> list[tuple[int, ...]]:
    """Every possibly bad B with 1 <= |B| <= b_max, by exhaustive enumeration.

    Sets are produced size by size in colexicographic order. Raises
    BudgetExceeded when the number of candidate sets exceeds ``budget``.
    """
    if b_max < 1:
        raise ValueError("b_max must be at least 1")
    total = count_candidates(g.N, b_max)
    if total > budget:
        raise BudgetExceeded(f"{total} candidate sets exceed the budget of {budget}")
    hits, nhits, _ = _scan(g.var_checks.astype(np.int64), g.check_vars.astype(np.int64),
                           b_max, c1, t, max_hits)
    if nhits > max_hits:
        raise BudgetExceeded(f"more than {max_hits} possibly bad sets")
    return [tuple(int(x) for x in row if x >= 0) for row in hits[:nhits]]
