"""Arithmetic in GF(p) and GF(2^m).

Elements are plain integers in [0, q). For GF(2^m) bit j of the integer is the
coefficient of x^j. Multiplication uses exp/log tables built from a primitive
element, so array versions of the operations are simple numpy gathers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# x^m + ... as bit masks (bit m set); standard primitive trinomials/pentanomials
PRIMITIVE_POLYS = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
    16: 0b10001000000001011,
}

MAX_TABLE_ORDER = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _gf2_mulmod(a: int, b: int, mod: int, m: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> m & 1:
            a ^= mod
    return r


class FieldError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteField:
    p: int
    m: int = 1
    modulus: int = 0      # bit mask of the modulus polynomial (GF(2^m) only)
    exp: np.ndarray = field(repr=False, default=None)
    log: np.ndarray = field(repr=False, default=None)

    @property
    def q(self) -> int:
        return self.p ** self.m

    @property
    def modulus_coeffs(self) -> list[int]:
        """Modulus coefficients, constant term first; empty for prime fields."""
        if self.m == 1:
            return []
        return [(self.modulus >> j) & 1 for j in range(self.m + 1)]

    def __eq__(self, other):
        return isinstance(other, FiniteField) and (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus)

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    def __repr__(self):
        return f"GF({self.q})"

    # scalar operations
    def add(self, a: int, b: int) -> int:
        return a ^ b if self.p == 2 else (a + b) % self.p

    def neg(self, a: int) -> int:
        return a if self.p == 2 else (-a) % self.p

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self.exp[(self.q - 1 - self.log[a]) % (self.q - 1)])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("zero to a negative power")
            return 1 if e == 0 else 0
        return int(self.exp[(self.log[a] * e) % (self.q - 1)])

    def alpha_pow(self, e: int) -> int:
        """Power of the primitive element used to build the tables."""
        return int(self.exp[e % (self.q - 1)])

    # array operations
    def add_arr(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        return a ^ b if self.p == 2 else (a + b) % self.p

    def neg_arr(self, a):
        a = np.asarray(a, dtype=np.int64)
        return a if self.p == 2 else (-a) % self.p

    def sub_arr(self, a, b):
        return self.add_arr(a, self.neg_arr(b))

    def mul_arr(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a, b = np.broadcast_arrays(a, b)
        out = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def dot(self, M, v):
        """Matrix-vector (or matrix-matrix) product over the field."""
        M = np.asarray(M, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        if v.ndim == 1:
            prods = self.mul_arr(M, v[None, :])
            return self.sum_arr(prods, axis=1)
        prods = self.mul_arr(M[:, :, None], v[None, :, :])
        return self.sum_arr(prods, axis=1)

    def sum_arr(self, a, axis=None):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return np.bitwise_xor.reduce(a, axis=axis)
        return np.sum(a, axis=axis) % self.p

    def element(self, value: int) -> "FieldElement":
        return FieldElement(self, value)

    def elements(self) -> range:
        return range(self.q)


def _build_prime(p: int) -> FiniteField:
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if p > MAX_TABLE_ORDER:
        raise FieldError(f"p={p} too large for table arithmetic")
    if p == 2:
        g = 1
    else:
        fs = _prime_factors(p - 1)
        g = next(x for x in range(2, p) if all(pow(x, (p - 1) // f, p) != 1 for f in fs))
    exp = np.zeros(2 * (p - 1) + 1, dtype=np.int64)
    log = np.zeros(p, dtype=np.int64)
    x = 1
    for i in range(p - 1):
        exp[i] = x
        log[x] = i
        x = x * g % p
    exp[p - 1: 2 * (p - 1)] = exp[: p - 1]
    return FiniteField(p, 1, 0, exp, log)


def _build_binary_ext(m: int, modulus: int | None = None) -> FiniteField:
    if modulus is None:
        if m not in PRIMITIVE_POLYS:
            raise FieldError(f"no primitive polynomial stored for m={m}")
        modulus = PRIMITIVE_POLYS[m]
    if modulus >> m != 1:
        raise FieldError("modulus must have degree m")
    q = 1 << m
    exp = np.zeros(2 * (q - 1) + 1, dtype=np.int64)
    log = np.zeros(q, dtype=np.int64)
    x = 1
    for i in range(q - 1):
        if i > 0 and x == 1:
            raise FieldError(f"modulus {bin(modulus)} is not primitive")
        exp[i] = x
        log[x] = i
        x = _gf2_mulmod(x, 2, modulus, m)
    if x != 1:
        raise FieldError(f"modulus {bin(modulus)} is not primitive")
    exp[q - 1: 2 * (q - 1)] = exp[: q - 1]
    return FiniteField(2, m, modulus, exp, log)


_CACHE: dict = {}


def GF(q: int, modulus: int | None = None) -> FiniteField:
    """Field of order q (a prime or a power of 2)."""
    key = (q, modulus)
    if key in _CACHE:
        return _CACHE[key]
    if q >= 2 and q & (q - 1) == 0 and q > 2:
        fld = _build_binary_ext(q.bit_length() - 1, modulus)
    elif is_prime(q):
        if modulus is not None:
            raise FieldError("prime fields take no modulus")
        fld = _build_prime(q)
    else:
        raise FieldError(f"GF({q}) is not supported (need a prime or 2^m)")
    _CACHE[key] = fld
    return fld


@dataclass(frozen=True)
class FieldElement:
    field: FiniteField
    value: int

    def __post_init__(self):
        if not (0 <= self.value < self.field.q):
            raise FieldError(f"{self.value} is not an element of {self.field}")

    def _check(self, other):
        if not isinstance(other, FieldElement):
            other = FieldElement(self.field, int(other) % self.field.q if self.field.m == 1 else int(other))
        if other.field != self.field:
            raise FieldError(f"mismatched fields {self.field} and {other.field}")
        return other

    def __add__(self, other):
        o = self._check(other)
        return FieldElement(self.field, self.field.add(self.value, o.value))

    def __sub__(self, other):
        o = self._check(other)
        return FieldElement(self.field, self.field.sub(self.value, o.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __mul__(self, other):
        o = self._check(other)
        return FieldElement(self.field, self.field.mul(self.value, o.value))

    def __truediv__(self, other):
        o = self._check(other)
        return FieldElement(self.field, self.field.div(self.value, o.value))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def inverse(self):
        return FieldElement(self.field, self.field.inv(self.value))

    def __int__(self):
        return self.value

    __radd__ = __add__
    __rmul__ = __mul__


def ff_add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def ff_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def ff_inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def rref(F: FiniteField, M) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F; returns (R, pivot columns), zero rows dropped."""
    A = np.array(M, dtype=np.int64, copy=True)
    rows, cols = A.shape
    pivots = []
    r = 0
    for col in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, col])
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = F.mul_arr(A[r], F.inv(int(A[r, col])))
        for i in range(rows):
            if i != r and A[i, col]:
                A[i] = F.sub_arr(A[i], F.mul_arr(A[r], int(A[i, col])))
        pivots.append(col)
        r += 1
    return A[:r], pivots


def solve(F: FiniteField, M, b) -> np.ndarray | None:
    """One solution x of M x = b over F, or None when inconsistent."""
    M = np.asarray(M, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    R, piv = rref(F, np.hstack([M, b]))
    n = M.shape[1]
    if piv and piv[-1] == n:
        return None
    x = np.zeros(n, dtype=np.int64)
    for row, col in enumerate(piv):
        x[col] = R[row, n]
    return x
