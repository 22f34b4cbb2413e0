"""Component codes with t-bounded-distance decoders."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .fields import GF, FiniteField, rref


class CodeError(ValueError):
    pass


@dataclass(eq=False)
class ComponentCode:
    """Linear code of blocklength d over ``field`` given by a parity-check matrix H.

    Subclasses override :meth:`bdd`; the base class supplies syndromes and a
    systematic encoder derived from the reduced row echelon form of H.
    """

    field: FiniteField
    d: int
    k: int
    t: int
    H: np.ndarray = field(repr=False)
    family: str = "GenericLinear"

    def __post_init__(self):
        self.H = np.asarray(self.H, dtype=np.int64)
        R, piv = rref(self.field, self.H)
        if len(piv) != self.d - self.k:
            raise CodeError(f"H has rank {len(piv)}, expected d - k = {self.d - self.k}")
        if not (0 < self.k <= self.d):
            raise CodeError("need 0 < k <= d")
        self._R = R
        self._parity_pos = np.array(piv, dtype=np.int64)
        self._info_pos = np.array([j for j in range(self.d) if j not in set(piv)], dtype=np.int64)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def rate(self) -> float:
        return self.k / self.d

    @property
    def info_positions(self) -> np.ndarray:
        return self._info_pos

    def _check_word(self, v, n):
        v = np.asarray(v, dtype=np.int64)
        if v.shape != (n,):
            raise CodeError(f"expected a vector of length {n}, got shape {v.shape}")
        if v.size and (v.min() < 0 or v.max() >= self.q):
            raise CodeError(f"symbols outside GF({self.q})")
        return v

    def syndrome(self, v) -> np.ndarray:
        v = self._check_word(v, self.d)
        return self.field.dot(self.H, v)

    def is_codeword(self, v) -> bool:
        return not self.syndrome(v).any()

    def encode(self, message) -> np.ndarray:
        """Systematic encoding: the message occupies :attr:`info_positions`."""
        m = self._check_word(message, self.k)
        F = self.field
        c = np.zeros(self.d, dtype=np.int64)
        c[self._info_pos] = m
        if self._parity_pos.size:
            # R restricted to pivot columns is the identity
            rhs = F.dot(self._R[:, self._info_pos], m) if self.k else np.zeros(len(self._parity_pos), np.int64)
            c[self._parity_pos] = F.neg_arr(rhs)
        return c

    def bdd(self, v) -> Optional[np.ndarray]:
        raise NotImplementedError

    def satisfied(self, V) -> np.ndarray:
        """Per row of V: is it a codeword."""
        V = np.asarray(V, dtype=np.int64)
        if not self.H.size:
            return np.ones(V.shape[0], dtype=bool)
        return ~self.field.dot(V, self.H.T).any(axis=1)

    def bdd_batch(self, V) -> tuple[np.ndarray, np.ndarray]:
        """Decode each row of V; returns (W, ok) with W[r] = V[r] where ok[r] is False."""
        V = np.asarray(V, dtype=np.int64)
        W = V.copy()
        ok = np.zeros(V.shape[0], dtype=bool)
        clean = self.satisfied(V)
        ok[clean] = True
        for r in np.flatnonzero(~clean):
            w = self.bdd(V[r])
            if w is not None:
                W[r] = w
                ok[r] = True
        return W, ok


def hamming_distance(a, b) -> int:
    return int(np.count_nonzero(np.asarray(a) != np.asarray(b)))


class HammingCode(ComponentCode):
    """Binary Hamming code; column j of H is the binary expansion of j + 1."""

    def __init__(self, m: int):
        if not (2 <= m <= 16):
            raise CodeError(f"Hamming parameter m={m} outside 2..16")
        d = (1 << m) - 1
        H = (np.arange(1, d + 1)[None, :] >> np.arange(m)[:, None]) & 1
        self.m = m
        super().__init__(GF(2), d, d - m, 1, H, "Hamming")

    def syndrome_index(self, v) -> int:
        """XOR of (j+1) over the ones of v; 0 iff v is a codeword."""
        v = self._check_word(v, self.d)
        idx = np.flatnonzero(v) + 1
        return int(np.bitwise_xor.reduce(idx)) if idx.size else 0

    def bdd(self, v):
        v = self._check_word(v, self.d)
        s = self.syndrome_index(v)
        w = v.copy()
        if s:
            w[s - 1] ^= 1
        return w

    def satisfied(self, V):
        V = np.asarray(V, dtype=np.int64)
        idx = np.arange(1, self.d + 1, dtype=np.int64)
        return np.bitwise_xor.reduce(V * idx[None, :], axis=1) == 0

    def bdd_batch(self, V):
        V = np.asarray(V, dtype=np.int64)
        idx = np.arange(1, self.d + 1, dtype=np.int64)
        s = np.bitwise_xor.reduce(V * idx[None, :], axis=1)
        W = V.copy()
        rows = np.flatnonzero(s)
        W[rows, s[rows] - 1] ^= 1
        return W, np.ones(V.shape[0], dtype=bool)


def hamming_code(m: int) -> HammingCode:
    return HammingCode(m)


def _poly_eval(F: FiniteField, coeffs, x: int) -> int:
    """Evaluate sum coeffs[i] x^i (Horner)."""
    r = 0
    for a in reversed(coeffs):
        r = F.add(F.mul(r, x), int(a))
    return r


def berlekamp_massey(F: FiniteField, S) -> list[int]:
    """Shortest LFSR connection polynomial C (C[0] = 1) generating the sequence S."""
    n = len(S)
    C = [1] + [0] * n
    B = [1] + [0] * n
    L, m, b = 0, 1, 1
    for r in range(n):
        disc = int(S[r])
        for i in range(1, L + 1):
            disc = F.add(disc, F.mul(C[i], int(S[r - i])))
        if disc == 0:
            m += 1
            continue
        coef = F.div(disc, b)
        T = list(C)
        for i in range(n + 1 - m):
            C[i + m] = F.sub(C[i + m], F.mul(coef, B[i]))
        if 2 * L <= r:
            L = r + 1 - L
            B, b, m = T, disc, 1
        else:
            m += 1
    return C[: L + 1]


class ReedSolomonCode(ComponentCode):
    """(Shortened) narrow-sense RS code: sum_j c_j x_j^i = 0 for i = 1..d-k, x_j = a^j.

    Decoding: syndromes, Berlekamp-Massey, root search over the locators, Forney.
    Any result not within distance t of the input is rejected.
    """

    def __init__(self, d: int, k: int, fld: FiniteField):
        if not (0 < k < d):
            raise CodeError("need 0 < k < d")
        if fld.q < d + 1:
            raise CodeError(f"field order {fld.q} too small for blocklength {d}")
        r = d - k
        self.locators = np.array([fld.alpha_pow(j) for j in range(d)], dtype=np.int64)
        H = np.array([[fld.pow(int(x), i) for x in self.locators] for i in range(1, r + 1)],
                     dtype=np.int64)
        super().__init__(fld, d, k, r // 2, H, "ReedSolomon")
        self._inv_loc = {fld.inv(int(x)): j for j, x in enumerate(self.locators)}

    def bdd(self, v):
        v = self._check_word(v, self.d)
        F = self.field
        S = F.dot(self.H, v)
        if not S.any():
            return v.copy()
        r = self.d - self.k
        lam = berlekamp_massey(F, S)
        nerr = len(lam) - 1
        if nerr > self.t:
            return None
        # error positions: roots of Lambda among the inverse locators
        pos = [j for xinv, j in self._inv_loc.items() if _poly_eval(F, lam, xinv) == 0]
        if len(pos) != nerr:
            return None
        # Omega = S(z) Lambda(z) mod z^r, with S(z) = sum_i S_{i+1} z^i
        omega = [0] * r
        for i in range(r):
            acc = 0
            for j in range(min(i, nerr) + 1):
                acc = F.add(acc, F.mul(lam[j], int(S[i - j])))
            omega[i] = acc
        dlam = [F.mul(lam[i], i % F.p) if F.p != 2 else (lam[i] if i % 2 else 0)
                for i in range(1, len(lam))]
        w = v.copy()
        for j in pos:
            xinv = F.inv(int(self.locators[j]))
            den = _poly_eval(F, dlam, xinv)
            if den == 0:
                return None
            e = F.neg(F.div(_poly_eval(F, omega, xinv), den))
            w[j] = F.sub(int(w[j]), e)
        if F.dot(self.H, w).any() or hamming_distance(w, v) > self.t:
            return None
        return w


def rs_code(d: int, k: int, fld: FiniteField | int) -> ReedSolomonCode:
    return ReedSolomonCode(d, k, GF(fld) if isinstance(fld, int) else fld)


class GenericLinearCode(ComponentCode):
    """Small linear code given by a generator matrix; decoding by coset-leader table."""

    MAX_CODEWORDS = 1 << 16

    def __init__(self, G, fld: FiniteField | int = 2, t: Optional[int] = None):
        fld = GF(fld) if isinstance(fld, int) else fld
        G = np.asarray(G, dtype=np.int64)
        Gr, piv = rref(fld, G)
        k, d = Gr.shape
        if fld.q ** k > self.MAX_CODEWORDS:
            raise CodeError("too many codewords for a generic code")
        self.codewords = np.array([fld.dot(Gr.T, np.array(m, dtype=np.int64))
                                   for m in itertools.product(range(fld.q), repeat=k)])
        weights = np.count_nonzero(self.codewords, axis=1)
        self.dmin = int(weights[weights > 0].min()) if k else d + 1
        tmax = (self.dmin - 1) // 2
        if t is None:
            t = tmax
        if t > tmax:
            raise CodeError(f"minimum distance {self.dmin} cannot correct t={t}")
        H = _dual_basis(fld, Gr, piv)
        super().__init__(fld, d, k, t, H if H.size else np.zeros((0, d), np.int64), "GenericLinear")
        self._table = {}
        for wt in range(t + 1):
            for supp in itertools.combinations(range(d), wt):
                for vals in itertools.product(range(1, fld.q), repeat=wt):
                    e = np.zeros(d, dtype=np.int64)
                    e[list(supp)] = vals
                    self._table.setdefault(self.syndrome(e).tobytes(), e)

    def bdd(self, v):
        v = self._check_word(v, self.d)
        e = self._table.get(self.syndrome(v).tobytes())
        if e is None:
            return None
        return self.field.sub_arr(v, e)


def _dual_basis(F: FiniteField, Gr: np.ndarray, piv: list[int]) -> np.ndarray:
    """Parity-check matrix from an RREF generator matrix."""
    k, d = Gr.shape
    free = [j for j in range(d) if j not in set(piv)]
    H = np.zeros((len(free), d), dtype=np.int64)
    for r, f in enumerate(free):
        H[r, f] = 1
        for i, p in enumerate(piv):
            H[r, p] = F.neg(int(Gr[i, f]))
    return H


def repetition_code(d: int) -> GenericLinearCode:
    return GenericLinearCode(np.ones((1, d), dtype=np.int64), 2)


_SPEC_RE = re.compile(r"^(\w+)(?::(.*))?$")


def code_from_spec(spec: str) -> ComponentCode:
    """Parse names such as ``hamming:m=7``, ``rs:d=30,k=24,q=31`` or ``rep:d=3``."""
    m = _SPEC_RE.match(spec.strip())
    if not m:
        raise CodeError(f"bad code spec {spec!r}")
    kind = m.group(1).lower()
    args = {}
    if m.group(2):
        for part in m.group(2).split(","):
            key, _, val = part.partition("=")
            if not val:
                raise CodeError(f"bad code argument {part!r}")
            args[key.strip()] = int(val)
    try:
        if kind == "hamming":
            return hamming_code(args["m"])
        if kind == "rs":
            return rs_code(args["d"], args["k"], GF(args.get("q", args["d"] + 1)))
        if kind in ("rep", "repetition"):
            return repetition_code(args["d"])
    except KeyError as e:
        raise CodeError(f"missing parameter {e} in {spec!r}") from None
    raise CodeError(f"unknown code family {kind!r}")
