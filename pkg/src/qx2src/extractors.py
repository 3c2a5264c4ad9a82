"""Two-source and seeded extractors.

The two-source core outputs bits of the form (A_i x) . y for the
multiplier matrix family of :mod:`qx2src.gf2`.  Because matrix i acts
as multiplication by alpha^i, (A_i x) equals alpha^i * x in GF(2^n)
and the whole m-bit output can be produced with one field
multiplication per bit; tests cross-check this against the explicit
matrices at small n.

Two seeded extractors are provided: Toeplitz hashing (simple, seed
longer than the input, used standalone and in unit tests) and a
Trevisan-style construction (short seed, the one actually usable in
the strong-extractor composition, where the seed is produced by the
two-source core and is therefore much shorter than the input).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import List

from . import gf2
from .errors import DimensionError, ParameterError
from .gf2 import BitMatrix, BitVector, inner_product, mat_vec_mul
from .rng import derive_rng

# --------------------------------------------------------------------------
# flat sources


@dataclass(frozen=True)
class FlatSource:
    """Uniform distribution over an explicit support of n-bit strings."""

    n: int
    support: tuple

    def __post_init__(self):
        if not self.support:
            raise ParameterError("support must be nonempty")
        if list(self.support) != sorted(set(self.support)):
            raise ParameterError("support must be sorted and duplicate-free")
        if self.support[0] < 0 or self.support[-1] >> self.n:
            raise ParameterError("support value out of range for n bits")

    @classmethod
    def from_values(cls, n: int, values) -> "FlatSource":
        return cls(n, tuple(sorted(set(int(v) for v in values))))

    @classmethod
    def uniform(cls, n: int) -> "FlatSource":
        return cls(n, tuple(range(1 << n)))

    def min_entropy(self) -> float:
        return math.log2(len(self.support))

    def vectors(self) -> List[BitVector]:
        return [BitVector(self.n, v) for v in self.support]

    def probability(self) -> float:
        return 1.0 / len(self.support)


def random_flat_source(n: int, k: int, seed: int, *streams: int) -> FlatSource:
    """Flat source with support size exactly 2^k, sampled without replacement."""
    if not 0 <= k <= n:
        raise ParameterError("need 0 <= k <= n")
    rng = derive_rng(seed, 0x5053, *streams)
    values = rng.choice(1 << n, size=1 << k, replace=False)
    return FlatSource.from_values(n, values)


# --------------------------------------------------------------------------
# inner-product extractors


def ip_extract(x: BitVector, y: BitVector) -> int:
    """One-bit extractor x . y."""
    return inner_product(x, y)


def transformed_ip_extract(a: BitMatrix, x: BitVector, y: BitVector) -> int:
    """One-bit extractor (A x) . y for a full-rank square matrix."""
    if a.rows != a.cols:
        raise DimensionError("transform matrix must be square")
    return inner_product(mat_vec_mul(a, x), y)


def multibit_extract(x: BitVector, y: BitVector, m: int) -> BitVector:
    """m-bit extractor with bit i = (A_i x) . y over the multiplier family.

    Uses the identity A_i x = alpha^i * x in GF(2^n), so the call costs
    m shift-reduce multiplications plus m inner products regardless of n.
    """
    n = x.length
    if y.length != n:
        raise DimensionError(f"length mismatch: {n} vs {y.length}")
    if not 1 <= m <= n:
        raise ParameterError(f"need 1 <= m <= n, got m={m}")
    modulus = gf2.find_irreducible(n).value
    out = 0
    u = x.value
    yv = y.value
    for i in range(m):
        if (u & yv).bit_count() & 1:
            out |= 1 << i
        u = gf2.multiply_by_alpha(u, n, modulus)
    return BitVector(m, out)


# --------------------------------------------------------------------------
# Toeplitz hashing


def toeplitz_extract(x: BitVector, seed: BitVector, m: int) -> BitVector:
    """Output T x where T is the m-by-n Toeplitz matrix defined by the seed.

    T[i][0] = seed[i] going down the first column and
    T[0][j] = seed[m-1+j] going across the first row, so the seed must
    have n + m - 1 bits.
    """
    n = x.length
    if m < 1:
        raise ParameterError("m must be positive")
    if seed.length != n + m - 1:
        raise ParameterError(
            f"seed length {seed.length} != n + m - 1 = {n + m - 1}")
    out = 0
    for i in range(m):
        row = 0
        for j in range(n):
            bit = seed.bit(i - j) if i >= j else seed.bit(m - 1 + j - i)
            row |= bit << j
        if (row & x.value).bit_count() & 1:
            out |= 1 << i
    return BitVector(m, out)


def toeplitz_row(seed: BitVector, m: int, i: int, n: int) -> BitVector:
    """Row i of the Toeplitz matrix, for tests and inspection."""
    bits = [seed.bit(i - j) if i >= j else seed.bit(m - 1 + j - i)
            for j in range(n)]
    return BitVector.from_bits(bits)


# --------------------------------------------------------------------------
# small finite fields for the weak design


class _SmallField:
    """GF(t) for t prime or a power of two, elements encoded as 0..t-1."""

    def __init__(self, t: int):
        if t < 2:
            raise ParameterError("field size must be at least 2")
        if _is_prime(t):
            self.t = t
            self._binary = False
        elif t & (t - 1) == 0:
            self.t = t
            self._binary = True
            self._w = t.bit_length() - 1
            self._mod = gf2.find_irreducible(self._w).value
        else:
            raise ParameterError(
                f"field size {t} not supported (must be prime or a power of two)")

    def add(self, a: int, b: int) -> int:
        return a ^ b if self._binary else (a + b) % self.t

    def mul(self, a: int, b: int) -> int:
        if self._binary:
            return gf2.poly_mod(gf2.poly_mul(a, b), self._mod)
        return (a * b) % self.t


def _is_prime(t: int) -> bool:
    if t < 2:
        return False
    f = 2
    while f * f <= t:
        if t % f == 0:
            return False
        f += 1
    return True


@functools.lru_cache(maxsize=64)
def weak_design(m: int, t: int, c: int | None = None) -> tuple:
    """Polynomial weak design: m subsets of [t^2], each of size t.

    Set p is the graph {(a, p(a)) : a in GF(t)} of the p-th polynomial
    of degree < c in lexicographic coefficient order, flattened as
    a * t + p(a).  Two distinct polynomials of degree < c agree on at
    most c - 1 points, so pairwise intersections are at most c - 1.
    """
    field = _SmallField(t)
    if c is None:
        c = max(1, math.ceil(math.log(max(m, 2)) / math.log(t)))
    if m > t ** c:
        raise ParameterError(f"m={m} exceeds t^c={t ** c} polynomials")
    sets = []
    for idx in range(m):
        coeffs = []
        v = idx
        for _ in range(c):
            coeffs.append(v % t)
            v //= t
        members = []
        for a in range(t):
            acc = 0
            for coef in reversed(coeffs):
                acc = field.add(field.mul(acc, a), coef)
            members.append(a * t + acc)
        sets.append(tuple(sorted(members)))
    return tuple(sets)


# --------------------------------------------------------------------------
# Trevisan-style seeded extractor


@dataclass(frozen=True)
class SeededExtractorSpec:
    """Parameters of a seeded extractor.

    kind "toeplitz": d = n + m - 1.
    kind "trevisan": d = t^2 where t is the weak-design field size and
    also the sub-seed length; each sub-seed indexes one bit of the
    Reed-Solomon-then-Hadamard encoding of the input, so t = 2w with
    GF(2^w) the Reed-Solomon alphabet.
    """

    kind: str
    n: int
    m: int
    t: int = 0
    c: int = 0

    def __post_init__(self):
        if self.kind not in ("toeplitz", "trevisan"):
            raise ParameterError(f"unknown kind {self.kind!r}")
        if self.n < 1 or self.m < 1:
            raise ParameterError("n and m must be positive")
        if self.kind == "trevisan" and self.m > self.t * self.t + self.n:
            raise ParameterError("cannot output more than d + n bits")
        if self.kind == "trevisan":
            if self.t < 2 or self.t % 2:
                raise ParameterError("trevisan needs even t = 2w >= 2")
            if self.t & (self.t - 1):
                raise ParameterError("trevisan t must be a power of two")
            w = self.t // 2
            if _rs_symbols(self.n, w) > (1 << w):
                raise ParameterError(
                    f"message of {_rs_symbols(self.n, w)} symbols does not fit "
                    f"GF(2^{w}); increase t")
            c = self.c or _default_degree_bound(self.m, self.t)
            if self.m > self.t ** c:
                raise ParameterError("m exceeds the weak design capacity")

    @property
    def d(self) -> int:
        if self.kind == "toeplitz":
            return self.n + self.m - 1
        return self.t * self.t

    @property
    def degree_bound(self) -> int:
        return self.c or _default_degree_bound(self.m, self.t)


def _default_degree_bound(m: int, t: int) -> int:
    return max(1, math.ceil(math.log(max(m, 2)) / math.log(t)))


def _rs_symbols(n: int, w: int) -> int:
    return (n + w - 1) // w


def rs_hadamard_codeword(x: BitVector, w: int) -> BitVector:
    """Concatenated Reed-Solomon/Hadamard encoding of x, as 2^(2w) bits.

    Bit (u, z) (flattened z + u * 2^w) is <p_x(u), z> where p_x is the
    polynomial over GF(2^w) whose coefficients are the w-bit symbols
    of x and u ranges over the field.
    """
    symbols = _message_symbols(x, w)
    modulus = gf2.find_irreducible(w).value if w > 1 else 2
    size = 1 << w
    bits = []
    for u in range(size):
        acc = 0
        for sym in reversed(symbols):
            acc = gf2.poly_mod(gf2.poly_mul(acc, u), modulus) ^ sym
        for z in range(size):
            bits.append((acc & z).bit_count() & 1)
    return BitVector.from_bits(bits)


def _message_symbols(x: BitVector, w: int) -> List[int]:
    count = _rs_symbols(x.length, w)
    mask = (1 << w) - 1
    return [(x.value >> (j * w)) & mask for j in range(count)]


def _code_bit(x: BitVector, w: int, u: int, z: int, modulus: int) -> int:
    acc = 0
    for sym in reversed(_message_symbols(x, w)):
        acc = gf2.poly_mod(gf2.poly_mul(acc, u), modulus) ^ sym
    return (acc & z).bit_count() & 1


def trevisan_extract(x: BitVector, seed: BitVector, spec: SeededExtractorSpec) -> BitVector:
    """Bit i = code bit of x indexed by the seed restricted to design set i."""
    if spec.kind != "trevisan":
        raise ParameterError("spec kind must be 'trevisan'")
    if x.length != spec.n:
        raise DimensionError(f"input length {x.length} != spec n {spec.n}")
    if seed.length != spec.d:
        raise ParameterError(f"seed length {seed.length} != spec d {spec.d}")
    w = spec.t // 2
    modulus = gf2.find_irreducible(w).value if w > 1 else 2
    design = weak_design(spec.m, spec.t, spec.degree_bound)
    out = 0
    for i, positions in enumerate(design):
        sub = 0
        for j, pos in enumerate(positions):
            sub |= seed.bit(pos) << j
        u = sub >> w
        z = sub & ((1 << w) - 1)
        if _code_bit(x, w, u, z, modulus):
            out |= 1 << i
    return BitVector(spec.m, out)


def apply_seeded(spec: SeededExtractorSpec, x: BitVector, seed: BitVector) -> BitVector:
    if spec.kind == "toeplitz":
        return toeplitz_extract(x, seed, spec.m)
    return trevisan_extract(x, seed, spec)


# --------------------------------------------------------------------------
# composition: strong two-source core feeding a seeded extractor


def compose_two_source(x: BitVector, y: BitVector, which: str,
                       spec: SeededExtractorSpec) -> BitVector:
    """E(x, y) = E_seeded(side, multibit_extract(x, y, d)).

    The inner multi-bit extractor supplies the d-bit seed; ``which``
    selects whether the seeded extractor is applied to the x or y side.
    """
    if which not in ("X", "Y"):
        raise ParameterError("which must be 'X' or 'Y'")
    d = spec.d
    n = x.length
    if y.length != n:
        raise DimensionError("source length mismatch")
    if spec.n != n:
        raise ParameterError("seeded extractor input length must equal n")
    if d > n:
        raise ParameterError(
            f"inner extractor emits at most n={n} bits but spec needs d={d}")
    seed = multibit_extract(x, y, d)
    side = x if which == "X" else y
    return apply_seeded(spec, side, seed)
