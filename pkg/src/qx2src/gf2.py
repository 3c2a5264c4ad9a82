"""Packed GF(2) linear algebra and the shifted-multiplier matrix family.

Bit vectors and polynomial coefficient strings are packed into Python
ints, bit j of the int being coordinate j (little-endian).  In string
literals such as "1011" the leftmost character is coordinate 0, so
"1011" is the vector (1, 0, 1, 1).

The matrix family used by the multi-bit extractor is built from
multiplication in GF(2^n): matrix i represents multiplication by
alpha^i in the basis (1, alpha, ..., alpha^(n-1)) of GF(2)[x] modulo a
fixed irreducible polynomial.  The XOR of any non-empty subset of the
family is multiplication by a non-zero field element and therefore
invertible, which is the property the extractor needs.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, List, Sequence

from .errors import DimensionError, ParameterError

# --------------------------------------------------------------------------
# bit vectors


@dataclass(frozen=True)
class BitVector:
    """Fixed-length bit string packed into an int (bit j = coordinate j)."""

    length: int
    value: int

    def __post_init__(self):
        if self.length <= 0:
            raise ParameterError("BitVector length must be positive")
        if self.value < 0 or self.value >> self.length:
            raise ParameterError("BitVector value has bits beyond its length")

    @classmethod
    def from_str(cls, bits: str) -> "BitVector":
        """Parse "1011" with the leftmost character as coordinate 0."""
        value = 0
        for j, ch in enumerate(bits):
            if ch == "1":
                value |= 1 << j
            elif ch != "0":
                raise ParameterError(f"invalid bit character {ch!r}")
        return cls(len(bits), value)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        seq = list(bits)
        value = 0
        for j, b in enumerate(seq):
            if b:
                value |= 1 << j
        return cls(len(seq), value)

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length, 0)

    @classmethod
    def from_bytes(cls, data: bytes, length: int) -> "BitVector":
        if 8 * len(data) < length:
            raise ParameterError("not enough bytes for requested length")
        value = int.from_bytes(data, "little") & ((1 << length) - 1)
        return cls(length, value)

    def to_bytes(self) -> bytes:
        return self.value.to_bytes((self.length + 7) // 8, "little")

    def to_str(self) -> str:
        return "".join("1" if (self.value >> j) & 1 else "0" for j in range(self.length))

    def bit(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise ParameterError("bit index out of range")
        return (self.value >> j) & 1

    def weight(self) -> int:
        return self.value.bit_count()

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.length != other.length:
            raise DimensionError("length mismatch in xor")
        return BitVector(self.length, self.value ^ other.value)

    def concat(self, other: "BitVector") -> "BitVector":
        return BitVector(self.length + other.length,
                         self.value | (other.value << self.length))


def inner_product(x: BitVector, y: BitVector) -> int:
    """Parity of the bitwise AND of two equal-length vectors."""
    if x.length != y.length:
        raise DimensionError(f"length mismatch: {x.length} vs {y.length}")
    return (x.value & y.value).bit_count() & 1


# --------------------------------------------------------------------------
# bit matrices


@dataclass(frozen=True)
class BitMatrix:
    """Row-major GF(2) matrix; each row packed like a BitVector."""

    rows: int
    cols: int
    row_values: tuple

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise ParameterError("matrix dimensions must be positive")
        if len(self.row_values) != self.rows:
            raise ParameterError("row count mismatch")
        for r in self.row_values:
            if r < 0 or r >> self.cols:
                raise ParameterError("row has bits beyond cols")

    @classmethod
    def from_rows(cls, rows: Sequence[int], cols: int) -> "BitMatrix":
        return cls(len(rows), cols, tuple(rows))

    @classmethod
    def from_row_strs(cls, rows: Sequence[str]) -> "BitMatrix":
        vecs = [BitVector.from_str(r) for r in rows]
        return cls(len(vecs), vecs[0].length, tuple(v.value for v in vecs))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def zero(cls, rows: int, cols: int | None = None) -> "BitMatrix":
        cols = rows if cols is None else cols
        return cls(rows, cols, (0,) * rows)

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.row_values[i])

    def entry(self, i: int, j: int) -> int:
        return (self.row_values[i] >> j) & 1

    def column(self, j: int) -> BitVector:
        value = 0
        for i, r in enumerate(self.row_values):
            if (r >> j) & 1:
                value |= 1 << i
        return BitVector(self.rows, value)

    def transpose(self) -> "BitMatrix":
        cols = []
        for j in range(self.cols):
            v = 0
            for i, r in enumerate(self.row_values):
                if (r >> j) & 1:
                    v |= 1 << i
            cols.append(v)
        return BitMatrix(self.cols, self.rows, tuple(cols))

    def __xor__(self, other: "BitMatrix") -> "BitMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError("shape mismatch in xor")
        return BitMatrix(self.rows, self.cols,
                         tuple(a ^ b for a, b in zip(self.row_values, other.row_values)))


def mat_vec_mul(a: BitMatrix, x: BitVector) -> BitVector:
    """y with y_i = <row i of a, x> over GF(2)."""
    if a.cols != x.length:
        raise DimensionError(f"matrix cols {a.cols} != vector length {x.length}")
    value = 0
    xv = x.value
    for i, r in enumerate(a.row_values):
        if (r & xv).bit_count() & 1:
            value |= 1 << i
    return BitVector(a.rows, value)


def rank(a: BitMatrix) -> int:
    """GF(2) rank by bitwise Gaussian elimination on packed rows."""
    work = list(a.row_values)
    rk = 0
    for col in range(a.cols):
        pivot = None
        for r in range(rk, len(work)):
            if (work[r] >> col) & 1:
                pivot = r
                break
        if pivot is None:
            continue
        work[rk], work[pivot] = work[pivot], work[rk]
        for r in range(len(work)):
            if r != rk and ((work[r] >> col) & 1):
                work[r] ^= work[rk]
        rk += 1
        if rk == len(work):
            break
    return rk


def is_full_rank(a: BitMatrix) -> bool:
    return rank(a) == min(a.rows, a.cols)


# --------------------------------------------------------------------------
# polynomials over GF(2), packed as ints (bit j = coefficient of x^j)


@dataclass(frozen=True)
class Gf2Poly:
    """Polynomial over GF(2); value bit j is the coefficient of x^j."""

    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ParameterError("polynomial value must be nonnegative")

    @property
    def degree(self) -> int:
        return self.value.bit_length() - 1

    def is_monic(self) -> bool:
        return self.value != 0

    def to_str(self) -> str:
        """Big-endian coefficient string, highest degree first."""
        if self.value == 0:
            return "0"
        return bin(self.value)[2:]


def poly_mod(a: int, b: int) -> int:
    """Remainder of carry-less division of a by b."""
    db = b.bit_length() - 1
    while a and a.bit_length() - 1 >= db:
        a ^= b << (a.bit_length() - 1 - db)
    return a


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def poly_mul(a: int, b: int) -> int:
    """Carry-less product."""
    acc = 0
    while a:
        low = a & -a
        acc ^= b << (low.bit_length() - 1)
        a ^= low
    return acc


# zero-interleave table: squaring a GF(2) polynomial spreads its bits
_SPREAD_BYTES = []
for _b in range(256):
    _s = 0
    for _j in range(8):
        if (_b >> _j) & 1:
            _s |= 1 << (2 * _j)
    _SPREAD_BYTES.append(_s.to_bytes(2, "little"))


def poly_square(p: int) -> int:
    if p == 0:
        return 0
    raw = p.to_bytes((p.bit_length() + 7) // 8, "little")
    return int.from_bytes(b"".join(_SPREAD_BYTES[byte] for byte in raw), "little")


def _make_reducer(modulus: int):
    """Fast reduction mod x^n + tail, exploiting that tail is sparse."""
    n = modulus.bit_length() - 1
    tail = modulus ^ (1 << n)
    shifts = [j for j in range(tail.bit_length()) if (tail >> j) & 1]
    mask = (1 << n) - 1

    def reduce(a: int) -> int:
        while a.bit_length() > n:
            hi = a >> n
            a &= mask
            for j in shifts:
                a ^= hi << j
        return a

    return reduce


def _poly_mulmod(a: int, b: int, reduce) -> int:
    return reduce(poly_mul(a, b))


@functools.lru_cache(maxsize=None)
def _small_irreducibles(max_deg: int) -> tuple:
    """All irreducible polynomials of degree 2..max_deg, by sieve."""
    known: List[int] = []
    out: List[int] = []
    for d in range(1, max_deg + 1):
        for f in range(1 << d, 1 << (d + 1)):
            if not f & 1:
                continue
            if any(poly_mod(f, g) == 0
                   for g in known if 2 * (g.bit_length() - 1) <= d):
                continue
            known.append(f)
            if d >= 2:
                out.append(f)
    return tuple(out)


def is_irreducible(f: int) -> bool:
    """Deterministic irreducibility test for a monic polynomial over GF(2).

    Checks that f has no irreducible factor of degree at most deg(f)/2
    by walking the Frobenius chain x^(2^d) mod f and taking gcds of
    windowed products of x^(2^d) - x with f.
    """
    n = f.bit_length() - 1
    if n <= 0:
        return False
    if n == 1:
        return True
    if not f & 1:          # divisible by x
        return False
    if f.bit_count() % 2 == 0:  # f(1) = 0, divisible by x + 1
        return False
    reduce = _make_reducer(f)
    s = 2  # the polynomial x
    prod = 1
    pending = 0
    window = 16
    for d in range(1, n // 2 + 1):
        s = reduce(poly_square(s))
        prod = _poly_mulmod(prod, s ^ 2, reduce)
        pending += 1
        if pending == window or d == n // 2:
            if prod == 0 or poly_gcd(f, prod) != 1:
                return False
            pending = 0
    return True


# Memoized outputs of find_irreducible for large degrees where the scan
# is slow; each entry is the tail (modulus minus the leading x^n term)
# and was produced by this module's own search.  Verified by tests at
# 1024/2048 and, behind QX2SRC_SLOW_TESTS=1, at 4096.
_KNOWN_TAILS = {1024: 0x2CD, 2048: 0xBC7, 4096: 0xA93}


@functools.lru_cache(maxsize=None)
def find_irreducible(n: int) -> Gf2Poly:
    """Lexicographically smallest monic irreducible polynomial of degree n.

    Polynomials of equal degree are compared as packed coefficient
    integers, so the result is reproducible bit for bit.
    """
    if n < 1:
        raise ParameterError("degree must be at least 1")
    if n == 1:
        return Gf2Poly(2)  # x comes before x + 1
    if n in _KNOWN_TAILS:
        return Gf2Poly((1 << n) | _KNOWN_TAILS[n])

    # Trial divisors: precompute x^n mod p once per small irreducible p,
    # so each candidate x^n + tail only costs a tiny reduction of tail.
    trial = []
    for p in _small_irreducibles(13):
        dp = p.bit_length() - 1
        if dp >= n:
            continue
        red_p = _make_reducer(p)
        r, base, e = 1, 2, n
        while e:
            if e & 1:
                r = _poly_mulmod(r, base, red_p)
            base = _poly_mulmod(base, base, red_p)
            e >>= 1
        trial.append((p, r))

    tail = 1
    while True:
        tail += 2
        f = (1 << n) | tail
        if f.bit_count() % 2 == 0:
            continue
        if any(poly_mod(tail, p) == r for p, r in trial):
            continue
        if is_irreducible(f):
            return Gf2Poly(f)


# --------------------------------------------------------------------------
# the multiplier matrix family


def alpha_powers(n: int, count: int) -> List[int]:
    """Coefficient vectors of alpha^0 .. alpha^(count-1) in GF(2^n)."""
    modulus = find_irreducible(n).value
    powers = [1]
    p = 1
    for _ in range(count - 1):
        p <<= 1
        if p >> n:
            p ^= modulus
        powers.append(p)
    return powers


def multiply_by_alpha(v: int, n: int, modulus: int) -> int:
    """One multiplication by the field generator, reduced."""
    v <<= 1
    if v >> n:
        v ^= modulus
    return v


@functools.lru_cache(maxsize=32)
def multiplier_matrices(n: int, m: int) -> tuple:
    """Matrices of multiplication by alpha^0 .. alpha^(m-1) in GF(2^n).

    Column j of matrix i is the coefficient vector of alpha^(i+j), so
    the XOR of the matrices selected by any non-empty subset S is the
    matrix of multiplication by the non-zero field element
    sum_{i in S} alpha^i, hence full rank.
    """
    if not 1 <= m <= n:
        raise ParameterError(f"need 1 <= m <= n, got m={m}, n={n}")
    powers = alpha_powers(n, n + m - 1)
    mats = []
    for i in range(m):
        rows = [0] * n
        for j in range(n):
            col = powers[i + j]
            while col:
                low = col & -col
                rows[low.bit_length() - 1] |= 1 << j
                col ^= low
        mats.append(BitMatrix(n, n, tuple(rows)))
    return tuple(mats)


def subset_matrix(mats: Sequence[BitMatrix], subset_mask: int) -> BitMatrix:
    """Entrywise XOR of the matrices selected by the bits of subset_mask."""
    if subset_mask == 0:
        raise ParameterError("empty subset is excluded")
    if subset_mask >> len(mats):
        raise ParameterError("subset mask has bits beyond the family")
    shape = (mats[0].rows, mats[0].cols)
    acc = [0] * shape[0]
    for i, mat in enumerate(mats):
        if (subset_mask >> i) & 1:
            if (mat.rows, mat.cols) != shape:
                raise DimensionError("matrices in family differ in shape")
            for r in range(shape[0]):
                acc[r] ^= mat.row_values[r]
    return BitMatrix(shape[0], shape[1], tuple(acc))


# --------------------------------------------------------------------------
# text serialization: first line "n m", then n '0'/'1' rows per matrix,
# matrices separated by blank lines


def matrices_to_text(mats: Sequence[BitMatrix]) -> str:
    n = mats[0].rows
    lines = [f"{n} {len(mats)}"]
    for k, mat in enumerate(mats):
        if mat.rows != n or mat.cols != n:
            raise DimensionError("serialized matrices must be square and uniform")
        if k:
            lines.append("")
        for i in range(n):
            lines.append(mat.row(i).to_str())
    return "\n".join(lines) + "\n"


def matrices_from_text(text: str) -> List[BitMatrix]:
    lines = text.splitlines()
    if not lines:
        raise ParameterError("empty matrix text")
    head = lines[0].split()
    if len(head) != 2:
        raise ParameterError("missing 'n m' header")
    n, m = int(head[0]), int(head[1])
    rows = [ln.strip() for ln in lines[1:] if ln.strip()]
    if len(rows) != n * m:
        raise ParameterError(f"expected {n * m} rows, found {len(rows)}")
    mats = []
    for k in range(m):
        mats.append(BitMatrix.from_row_strs(rows[k * n:(k + 1) * n]))
        if mats[-1].cols != n:
            raise ParameterError("row width disagrees with header")
    return mats
