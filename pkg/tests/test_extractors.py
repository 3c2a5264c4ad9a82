"""Extractor primitives: inner product, multi-bit core, Toeplitz, Trevisan."""

import pytest

from qx2src import bounds, extractors, gf2
from qx2src.errors import DimensionError, ParameterError
from qx2src.extractors import (FlatSource, SeededExtractorSpec,
                               compose_two_source,
                               multibit_extract, rs_hadamard_codeword,
                               toeplitz_extract, toeplitz_row,
                               transformed_ip_extract, trevisan_extract,
                               weak_design)
from qx2src.gf2 import BitMatrix, BitVector
from qx2src.rng import derive_rng


def bv(s):
    return BitVector.from_str(s)


# --------------------------------------------------------------------------
# one-bit extractors


def test_transformed_ip_identity_matrix():
    assert transformed_ip_extract(BitMatrix.identity(4), bv("1011"), bv("1110")) == 0
    assert transformed_ip_extract(BitMatrix.identity(4), bv("0000"), bv("1110")) == 0


def test_transformed_ip_alpha_matrix():
    a1 = gf2.multiplier_matrices(3, 2)[1]
    assert transformed_ip_extract(a1, bv("100"), bv("010")) == 1


# --------------------------------------------------------------------------
# multi-bit extractor


def test_multibit_zero_input():
    assert multibit_extract(bv("000"), bv("101"), 2).to_str() == "00"


def test_multibit_hand_example():
    assert multibit_extract(bv("100"), bv("010"), 2).to_str() == "01"


def test_multibit_matches_explicit_matrices():
    rng = derive_rng(3, 1)
    for n in (3, 5, 8, 16):
        mats = gf2.multiplier_matrices(n, n)
        for _ in range(20):
            x = BitVector(n, int(rng.integers(0, 1 << n)))
            y = BitVector(n, int(rng.integers(0, 1 << n)))
            out = multibit_extract(x, y, n)
            for i in range(n):
                assert out.bit(i) == transformed_ip_extract(mats[i], x, y)


def test_multibit_character_identity_exhaustive_n4():
    # the XOR of any output subset equals the subset-matrix inner product
    n = m = 4
    mats = gf2.multiplier_matrices(n, m)
    for xv in range(1 << n):
        for yv in range(1 << n):
            x, y = BitVector(n, xv), BitVector(n, yv)
            e = multibit_extract(x, y, m)
            for mask in range(1, 1 << m):
                expect = transformed_ip_extract(gf2.subset_matrix(mats, mask), x, y)
                assert ((e.value & mask).bit_count() & 1) == expect


def test_multibit_linearity():
    rng = derive_rng(5, 2)
    n, m = 12, 7
    for _ in range(100):
        x1 = BitVector(n, int(rng.integers(0, 1 << n)))
        x2 = BitVector(n, int(rng.integers(0, 1 << n)))
        y = BitVector(n, int(rng.integers(0, 1 << n)))
        lhs = multibit_extract(x1 ^ x2, y, m)
        rhs = multibit_extract(x1, y, m) ^ multibit_extract(x2, y, m)
        assert lhs.value == rhs.value


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_ip_bias_exhaustive(n):
    zeros = sum((xv & yv).bit_count() % 2 == 0
                for xv in range(1 << n) for yv in range(1 << n))
    # exactly 2^(2n-1) + 2^(n-1) zero pairs
    assert zeros == (1 << (2 * n - 1)) + (1 << (n - 1))


def test_multibit_param_errors():
    with pytest.raises(ParameterError):
        multibit_extract(bv("101"), bv("110"), 4)
    with pytest.raises(DimensionError):
        multibit_extract(bv("101"), bv("1100"), 2)


# --------------------------------------------------------------------------
# Toeplitz hashing


def test_toeplitz_zero_seed():
    out = toeplitz_extract(bv("10110"), BitVector(7, 0), 3)
    assert out.to_str() == "000"


def test_toeplitz_parity_row():
    out = toeplitz_extract(bv("1011"), bv("1111"), 1)
    assert out.bit(0) == 1  # parity of 1011


def test_toeplitz_hand_example():
    seed = bv("1000")
    assert toeplitz_row(seed, 2, 0, 3).to_str() == "100"
    assert toeplitz_row(seed, 2, 1, 3).to_str() == "010"
    assert toeplitz_extract(bv("101"), seed, 2).to_str() == "10"


def test_toeplitz_seed_length_error():
    with pytest.raises(ParameterError):
        toeplitz_extract(bv("101"), bv("10"), 2)


def test_toeplitz_two_universality_exhaustive():
    n, m = 4, 2
    d = n + m - 1
    for xv in range(1 << n):
        for xpv in range(xv + 1, 1 << n):
            x, xp = BitVector(n, xv), BitVector(n, xpv)
            collisions = sum(
                toeplitz_extract(x, BitVector(d, s), m).value
                == toeplitz_extract(xp, BitVector(d, s), m).value
                for s in range(1 << d))
            assert collisions <= (1 << d) >> m


# --------------------------------------------------------------------------
# weak designs


def test_weak_design_t2_exact_sets():
    sets = weak_design(4, 2, 2)
    assert sets == ((0, 2), (1, 3), (0, 3), (1, 2))


def test_weak_design_single_set():
    (only,) = weak_design(1, 2)
    assert len(only) == 2


def test_weak_design_t3_overlaps():
    sets = weak_design(9, 3, 2)
    assert len(sets) == 9
    for i in range(9):
        assert len(sets[i]) == 3
        assert all(0 <= v < 9 for v in sets[i])
        for j in range(i + 1, 9):
            assert len(set(sets[i]) & set(sets[j])) <= 1


def test_weak_design_rejects_non_prime_power():
    with pytest.raises(ParameterError):
        weak_design(4, 6)


def test_weak_design_capacity_error():
    with pytest.raises(ParameterError):
        weak_design(5, 2, 2)


# --------------------------------------------------------------------------
# Reed-Solomon/Hadamard code and the Trevisan extractor


def test_rs_hadamard_distance_exhaustive():
    # n=8 over GF(16): distinct messages differ on >= (1/2 - 2/16) of bits
    w = 4
    words = [rs_hadamard_codeword(BitVector(8, v), w).value for v in range(256)]
    length = 1 << (2 * w)
    min_frac = 0.5 - 2 / 16
    for i in range(256):
        for j in range(i + 1, 256):
            assert (words[i] ^ words[j]).bit_count() >= min_frac * length


def test_trevisan_single_bit_is_code_lookup():
    spec = SeededExtractorSpec(kind="trevisan", n=8, m=1, t=8, c=1)
    rng = derive_rng(9, 3)
    design = weak_design(1, 8, 1)
    w = 4
    for _ in range(50):
        x = BitVector(8, int(rng.integers(0, 256)))
        seed = BitVector(spec.d,
                         int.from_bytes(rng.bytes(spec.d // 8), "little"))
        out = trevisan_extract(x, seed, spec)
        sub = 0
        for k, pos in enumerate(design[0]):
            sub |= seed.bit(pos) << k
        code = rs_hadamard_codeword(x, w)
        assert out.bit(0) == code.bit(sub)


def test_trevisan_deterministic():
    spec = SeededExtractorSpec(kind="trevisan", n=12, m=5, t=8)
    x = bv("101101001110")
    seed = BitVector(64, 0x1234_5678_9ABC_DEF0)
    assert trevisan_extract(x, seed, spec).value == trevisan_extract(x, seed, spec).value


def test_trevisan_spec_validation():
    with pytest.raises(ParameterError):
        SeededExtractorSpec(kind="trevisan", n=8, m=1, t=3)
    with pytest.raises(ParameterError):
        # 2^1 field cannot hold a 4-symbol message
        SeededExtractorSpec(kind="trevisan", n=4, m=1, t=2)


# --------------------------------------------------------------------------
# composition


def test_compose_zero_input_toeplitz():
    n = 5
    spec = SeededExtractorSpec(kind="toeplitz", n=n, m=1)
    assert spec.d == n
    out = compose_two_source(bv("00000"), bv("11010"), "X", spec)
    assert out.value == 0


def test_compose_sides_agree_on_equal_inputs():
    n = 64
    spec = SeededExtractorSpec(kind="trevisan", n=n, m=3, t=8)
    assert spec.d == n
    x = BitVector(n, 0xBEEF_CAFE_1234_5678)
    assert (compose_two_source(x, x, "X", spec).value
            == compose_two_source(x, x, "Y", spec).value)


def test_compose_seed_length_guard():
    spec = SeededExtractorSpec(kind="toeplitz", n=6, m=4)  # d = 9 > n = 6
    with pytest.raises(ParameterError):
        compose_two_source(BitVector(6, 9), BitVector(6, 21), "X", spec)


def test_compose_end_to_end_matches_calculator():
    n = 1024
    p = bounds.ParamSet(n=n, k1=n, k2=n, b1=0, b2=0, eps=2.0 ** -20,
                        c_poly=0.001)
    report = bounds.composed_output_len(p, "storage")
    assert report.satisfied
    m = int(report.value)
    spec = SeededExtractorSpec(kind="trevisan", n=n, m=m, t=16)
    assert spec.d == 256
    rng = derive_rng(17, 4)
    x = BitVector(n, int.from_bytes(rng.bytes(n // 8), "little"))
    y = BitVector(n, int.from_bytes(rng.bytes(n // 8), "little"))
    out = compose_two_source(x, y, "X", spec)
    assert out.length == m


# --------------------------------------------------------------------------
# flat sources


def test_flat_source_validation():
    src = FlatSource.from_values(3, [5, 1, 1])
    assert src.support == (1, 5)
    assert src.min_entropy() == 1.0
    with pytest.raises(ParameterError):
        FlatSource(3, ())
    with pytest.raises(ParameterError):
        FlatSource(2, (1, 7))


def test_random_flat_source_support_size_and_determinism():
    a = extractors.random_flat_source(6, 3, seed=42, )
    b = extractors.random_flat_source(6, 3, seed=42)
    assert a.support == b.support
    assert len(a.support) == 8
    assert a.min_entropy() == 3.0
