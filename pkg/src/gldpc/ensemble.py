"""(c, d)-regular Tanner graphs realized as socket permutations."""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional

import numpy as np
from numba import njit

from .codes import ComponentCode

HEADER = "GLDPC-GRAPH v1"


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class EnsembleParams:
    N: int
    c: int
    d: int
    c1: int
    q: int = 2
    t: int = 1
    code: Optional[ComponentCode] = None

    def __post_init__(self):
        if self.N <= 0 or self.c <= 0 or self.d <= 0:
            raise ValueError("N, c, d must be positive")
        if (self.N * self.c) % self.d:
            raise ValueError(f"N*c = {self.N * self.c} is not divisible by d = {self.d}")
        if not (1 <= self.c1 <= self.c):
            raise ValueError(f"c1 = {self.c1} outside 1..c")
        if self.q > 2 and 2 * self.c1 <= self.c:
            raise ValueError(f"non-binary decoding needs c1 > c/2 (c1={self.c1}, c={self.c})")
        if self.code is not None and (self.code.d != self.d or self.code.q != self.q
                                      or self.code.t != self.t):
            raise ValueError("component code does not match (d, q, t)")

    @property
    def J(self) -> int:
        return self.N * self.c // self.d

    @classmethod
    def for_code(cls, N: int, c: int, code: ComponentCode, c1: int) -> "EnsembleParams":
        return cls(N, c, code.d, c1, code.q, code.t, code)


def nominal_rate(c: int, d: int, k0: int) -> Fraction:
    """Design rate 1 - (1 - k0/d) c, a lower bound on the rate of every member."""
    if not (0 < k0 <= d):
        raise ValueError("need 0 < k0 <= d")
    return 1 - (1 - Fraction(k0, d)) * c


class TannerGraph:
    """Variable socket s = i*c + a (i-th variable, a-th edge) is matched to check
    socket perm[s] = j*d + b. Parallel edges are kept with their multiplicity."""

    def __init__(self, N: int, c: int, d: int, perm):
        perm = np.array(perm, dtype=np.int64)
        if N <= 0 or c <= 0 or d <= 0 or (N * c) % d:
            raise GraphFormatError(f"invalid dimensions N={N} c={c} d={d}")
        if perm.shape != (N * c,):
            raise GraphFormatError(f"permutation has length {perm.size}, expected {N * c}")
        seen = np.zeros(N * c, dtype=bool)
        if perm.min() < 0 or perm.max() >= N * c:
            raise GraphFormatError("permutation entry out of range")
        seen[perm] = True
        if not seen.all():
            raise GraphFormatError("not a permutation")
        self.N, self.c, self.d = N, c, d
        self.perm = perm
        self.perm.flags.writeable = False

    @property
    def J(self) -> int:
        return self.N * self.c // self.d

    @cached_property
    def var_checks(self) -> np.ndarray:
        """(N, c) array: check index of each variable socket."""
        return (self.perm // self.d).reshape(self.N, self.c)

    @cached_property
    def check_vars(self) -> np.ndarray:
        """(J, d) array: variable index on each check socket."""
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.perm.size)
        return (inv // self.c).reshape(self.J, self.d)

    def check_neighbors(self, j: int) -> np.ndarray:
        return self.check_vars[j]

    def var_neighbors(self, i: int) -> np.ndarray:
        return self.var_checks[i]

    def degrees(self) -> tuple[np.ndarray, np.ndarray]:
        vd = np.bincount(np.repeat(np.arange(self.N), self.c), minlength=self.N)
        cd = np.bincount(self.var_checks.ravel(), minlength=self.J)
        return vd, cd

    def is_simple(self) -> bool:
        vc = np.sort(self.var_checks, axis=1)
        return not (vc[:, 1:] == vc[:, :-1]).any()

    def has_parallel_edges(self, i: int) -> bool:
        row = self.var_checks[i]
        return np.unique(row).size < row.size

    def __eq__(self, other):
        return (isinstance(other, TannerGraph) and (self.N, self.c, self.d) == (other.N, other.c, other.d)
                and np.array_equal(self.perm, other.perm))

    def __repr__(self):
        return f"TannerGraph(N={self.N}, c={self.c}, d={self.d})"


def sample_graph(params: EnsembleParams | tuple, seed: int) -> TannerGraph:
    """Uniform socket permutation by a seeded Fisher-Yates shuffle (numpy PCG64)."""
    if isinstance(params, tuple):
        N, c, d = params
    else:
        N, c, d = params.N, params.c, params.d
    if (N * c) % d:
        raise ValueError(f"N*c = {N * c} is not divisible by d = {d}")
    rng = np.random.default_rng(np.random.SeedSequence(seed & (2**64 - 1)))
    perm = np.arange(N * c, dtype=np.int64)
    # explicit Fisher-Yates so the stream-to-permutation map is documented
    r = rng.random(perm.size)
    k = (r * np.arange(1, perm.size + 1)).astype(np.int64)
    _fisher_yates(perm, k)
    return TannerGraph(N, c, d, perm)


@njit(cache=True)
def _fisher_yates(perm, k):
    for i in range(perm.size - 1, 0, -1):
        j = k[i]
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp


def _has_check(row, j, skip):
    for a, x in enumerate(row):
        if a != skip and x == j:
            return True
    return False


def simplify_graph(g: TannerGraph, seed: int, max_sweeps: int = 1000) -> TannerGraph:
    """Remove parallel edges by random socket switches; degrees are preserved.

    Each duplicate edge swaps its check socket with a uniformly chosen socket
    whenever the swap creates no new parallel edge. The result is simple but
    no longer exactly uniform over simple graphs.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed & (2**64 - 1), 0x51]))
    perm = g.perm.copy()
    N, c, d = g.N, g.c, g.d
    checks = (perm // d).reshape(N, c)
    for _ in range(max_sweeps):
        vc = np.sort(checks, axis=1)
        bad_vars = np.flatnonzero((vc[:, 1:] == vc[:, :-1]).any(axis=1))
        if bad_vars.size == 0:
            return TannerGraph(N, c, d, perm)
        for i in bad_vars:
            row = checks[i]
            for a in range(c):
                if not _has_check(row, row[a], a):
                    continue
                s2 = int(rng.integers(N * c))
                i2, a2 = divmod(s2, c)
                if i2 == i:
                    continue
                j1, j2 = row[a], checks[i2, a2]
                if _has_check(row, j2, a) or _has_check(checks[i2], j1, a2):
                    continue
                s1 = i * c + a
                perm[s1], perm[s2] = perm[s2], perm[s1]
                checks[i, a], checks[i2, a2] = j2, j1
    raise RuntimeError("could not remove all parallel edges")


def sample_simple_graph(params: EnsembleParams | tuple, seed: int) -> TannerGraph:
    """A sampled graph, made simple by :func:`simplify_graph` when needed."""
    g = sample_graph(params, seed)
    return g if g.is_simple() else simplify_graph(g, seed)


def serialize_graph(g: TannerGraph) -> bytes:
    body = f"{HEADER}\n{g.N} {g.c} {g.d}\n{' '.join(map(str, g.perm.tolist()))}\n"
    crc = zlib.crc32(body.encode()) & 0xFFFFFFFF
    return (body + f"{crc:08x}\n").encode()


def parse_graph(data: bytes | str) -> TannerGraph:
    text = data.decode() if isinstance(data, (bytes, bytearray)) else data
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) != 4:
        raise GraphFormatError(f"expected 4 lines, found {len(lines)}")
    if lines[0] != HEADER:
        raise GraphFormatError(f"bad header {lines[0]!r}")
    body = "\n".join(lines[:3]) + "\n"
    try:
        crc = int(lines[3], 16)
    except ValueError:
        raise GraphFormatError("malformed checksum line") from None
    if zlib.crc32(body.encode()) & 0xFFFFFFFF != crc:
        raise GraphFormatError("checksum mismatch")
    try:
        N, c, d = (int(x) for x in lines[1].split())
        perm = [int(x) for x in lines[2].split()]
    except ValueError:
        raise GraphFormatError("malformed dimensions or permutation") from None
    if N <= 0 or c <= 0 or d <= 0 or (N * c) % d:
        raise GraphFormatError(f"N*c = {N * c} is not a multiple of d = {d}")
    return TannerGraph(N, c, d, perm)


def save_graph(g: TannerGraph, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_graph(g))


def load_graph(path) -> TannerGraph:
    with open(path, "rb") as fh:
        return parse_graph(fh.read())
