"""Parallel bit-flipping decoding with bounded-distance component decoders."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .codes import ComponentCode
from .ensemble import TannerGraph

FIXPOINT = "fixpoint"
ITERATION_CAP = "iteration-cap"


@dataclass(frozen=True)
class DecoderConfig:
    c1: int
    T: int = 100
    q: int = 2

    def validate(self, c: int) -> None:
        if not (1 <= self.c1 <= c):
            raise ValueError(f"c1 = {self.c1} outside 1..{c}")
        if self.q > 2 and 2 * self.c1 <= c:
            raise ValueError(f"q > 2 needs c1 > c/2 (c1={self.c1}, c={c})")
        if self.T < 1:
            raise ValueError("T must be at least 1")


@dataclass
class DecodeResult:
    vector: np.ndarray
    iterations: int
    reason: str
    trace: list = field(default_factory=list)   # corrupt counts, test mode only

    @property
    def converged(self) -> bool:
        return self.reason == FIXPOINT


def check_messages(g: TannerGraph, code: ComponentCode, v: np.ndarray):
    """All flip messages of one iteration as (variable, target value) arrays.

    Each edge carries at most one message, so a variable reached by parallel
    edges can collect several votes from the same check.
    """
    V = v[g.check_vars]
    W, ok = code.bdd_batch(V)
    disagree = (W != V) & ok[:, None]
    return g.check_vars[disagree], W[disagree]


def is_codeword(g: TannerGraph, code: ComponentCode, v) -> bool:
    return bool(code.satisfied(np.asarray(v)[g.check_vars]).all())


def vote_count(g: TannerGraph, j: int, w, v) -> Counter:
    """Flip votes that check j sends when its decoder output is w (one per edge)."""
    nb = g.check_vars[j]
    w = np.asarray(w)
    local = np.asarray(v)[nb]
    return Counter(int(x) for x in nb[w != local])


def iterate(g: TannerGraph, code: ComponentCode, v: np.ndarray, c1: int) -> np.ndarray:
    """One parallel iteration: every decision uses the incoming vector only."""
    targets_var, targets_val = check_messages(g, code, v)
    out = v.copy()
    if targets_var.size == 0:
        return out
    q = code.q
    keys = targets_var * q + targets_val
    uniq, counts = np.unique(keys, return_counts=True)
    win = uniq[counts >= c1]
    if win.size:
        vars_, vals = win // q, win % q
        if np.unique(vars_).size != vars_.size:
            raise RuntimeError("two flip targets reached the threshold at one variable")
        out[vars_] = vals
    return out


def decode(g: TannerGraph, code: ComponentCode, v0, cfg: DecoderConfig,
           reference: Optional[np.ndarray] = None) -> DecodeResult:
    """Iterate until the vector stops changing or T iterations have run."""
    if code.d != g.d:
        raise ValueError(f"code blocklength {code.d} differs from check degree {g.d}")
    if code.q != cfg.q:
        raise ValueError(f"decoder q={cfg.q} differs from code field size {code.q}")
    cfg.validate(g.c)
    v = np.array(v0, dtype=np.int64)
    if v.shape != (g.N,):
        raise ValueError(f"vector length {v.size} differs from N={g.N}")
    if v.size and (v.min() < 0 or v.max() >= code.q):
        raise ValueError("symbols outside the field")
    trace = []
    if reference is not None:
        reference = np.asarray(reference)
        trace.append(int(np.count_nonzero(v != reference)))
    for it in range(1, cfg.T + 1):
        nv = iterate(g, code, v, cfg.c1)
        changed = not np.array_equal(nv, v)
        v = nv
        if reference is not None:
            trace.append(int(np.count_nonzero(v != reference)))
        # a vector satisfying every check is a fixpoint, so stopping is exact
        if not changed or code.satisfied(v[g.check_vars]).all():
            return DecodeResult(v, it, FIXPOINT, trace)
    return DecodeResult(v, cfg.T, ITERATION_CAP, trace)
