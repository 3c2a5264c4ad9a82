"""Concrete storage strategies and attacks.

A storage strategy maps source pairs (x, y) to a joint stored state on
b1 + b2 qubits, Alice's qubits first.  Strategies here cover seeded
random adversaries (product, entangled, classical), the exact
Bell-pair protocol that computes the inner product in the simultaneous
message passing model, superdense coding, and the source/storage
constructions that sit right at the security bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import qsim
from .errors import CapabilityError, DimensionError, ParameterError, SearchExhaustedError
from .extractors import FlatSource, ip_extract
from .gf2 import BitVector
from .rng import derive_rng

# --------------------------------------------------------------------------
# Bell-pair machinery

_EPR = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
_BELL_BASIS = {c: np.kron(qsim.PAULIS[c], np.eye(2)) @ _EPR for c in qsim.PAULIS}


def bell_outcome(a: Tuple[int, int], b: Tuple[int, int]) -> Tuple[Tuple[int, int], float]:
    """Bell measurement after Alice applies sigma_a and Bob sigma_b.

    Returns the most likely outcome and its probability; the encoding
    leaves the pair in an exact Bell state, so the probability is 1 up
    to roundoff and the outcome equals a xor b.
    """
    state = np.kron(qsim.PAULIS[a], qsim.PAULIS[b]) @ _EPR
    best, best_p = None, -1.0
    for c, vec in _BELL_BASIS.items():
        p = abs(np.vdot(vec, state)) ** 2
        if p > best_p:
            best, best_p = c, p
    return best, best_p


@dataclass(frozen=True)
class SmpOutcome:
    output: int
    xor_string: BitVector
    bell_outcomes: tuple
    success_probability: float
    qubits_per_party: int
    weight_a_mod4: int
    weight_b_mod4: int


def smp_ip_protocol(x: BitVector, y: BitVector) -> SmpOutcome:
    """Exact inner product in the entangled SMP model.

    Each party Pauli-encodes two input bits per shared EPR pair and
    additionally sends its Hamming weight mod 4 in two qubits used
    classically.  The referee Bell-measures every pair, recovers
    x xor y, and outputs ((|x| + |y| - |x xor y|) mod 4) / 2, which
    equals the inner product with certainty.
    """
    if x.length != y.length:
        raise DimensionError("input length mismatch")
    n = x.length
    xb = [x.bit(j) for j in range(n)]
    yb = [y.bit(j) for j in range(n)]
    if n % 2:
        xb.append(0)
        yb.append(0)
    outcomes = []
    xor_bits = []
    p_total = 1.0
    for i in range(0, len(xb), 2):
        c, p = bell_outcome((xb[i], xb[i + 1]), (yb[i], yb[i + 1]))
        outcomes.append(c)
        xor_bits.extend(c)
        p_total *= p
    w1 = x.weight() % 4
    w2 = y.weight() % 4
    w_xor = sum(xor_bits)
    output = ((w1 + w2 - w_xor) % 4) // 2
    return SmpOutcome(output=output,
                      xor_string=BitVector.from_bits(xor_bits[:n]),
                      bell_outcomes=tuple(outcomes),
                      success_probability=p_total,
                      qubits_per_party=len(xb) // 2 + 2,
                      weight_a_mod4=w1, weight_b_mod4=w2)


def superdense_roundtrip(bits: str) -> str:
    """Encode a 2-bit message on one EPR half, Bell-decode it."""
    if len(bits) != 2 or any(ch not in "01" for ch in bits):
        raise ParameterError("message must be a 2-bit string")
    a = (int(bits[0]), int(bits[1]))
    c, p = bell_outcome(a, (0, 0))
    if p < 1 - 1e-9:
        raise AssertionError("Bell states failed to be distinguishable")
    return f"{c[0]}{c[1]}"


def superdense_roundtrip_vector(message: BitVector) -> BitVector:
    """Round-trip an even-length message through pairwise superdense coding."""
    if message.length % 2:
        raise ParameterError("message length must be even")
    out_bits = []
    for i in range(0, message.length, 2):
        decoded = superdense_roundtrip(f"{message.bit(i)}{message.bit(i + 1)}")
        out_bits.extend(int(ch) for ch in decoded)
    return BitVector.from_bits(out_bits)


# --------------------------------------------------------------------------
# storage strategies


class StorageStrategy:
    """Map from source pairs to stored states within declared qubit budgets.

    state_for(x, y) returns a density matrix of dimension exactly
    2^(b1+b2), Alice's qubits first.  Strategies that model one party
    keeping its whole state also provide full_state_a / full_state_b
    for superstrong evaluation.
    """

    def __init__(self, n: int, b1: int, b2: int, flavor: str,
                 state_fn: Callable[[BitVector, BitVector], np.ndarray],
                 full_a_fn=None, full_b_fn=None, description: str = ""):
        if flavor not in ("product", "entangled", "classical"):
            raise ParameterError(f"unknown flavor {flavor!r}")
        if b1 < 0 or b2 < 0:
            raise ParameterError("budgets must be nonnegative")
        self.n = n
        self.b1 = b1
        self.b2 = b2
        self.flavor = flavor
        self.description = description
        self._state_fn = state_fn
        self._full_a_fn = full_a_fn
        self._full_b_fn = full_b_fn
        self._cache: Dict[Tuple[int, int], np.ndarray] = {}

    @property
    def dim(self) -> int:
        return 1 << (self.b1 + self.b2)

    def state_for(self, x: BitVector, y: BitVector) -> np.ndarray:
        key = (x.value, y.value)
        rho = self._cache.get(key)
        if rho is None:
            rho = np.asarray(self._state_fn(x, y), dtype=complex)
            if rho.shape != (self.dim, self.dim):
                raise DimensionError(
                    f"strategy produced dim {rho.shape[0]}, budget dim {self.dim}")
            self._cache[key] = rho
        return rho

    def has_full_side(self, side: str) -> bool:
        return (self._full_a_fn if side == "X" else self._full_b_fn) is not None

    def full_state_a(self, x: BitVector, y: BitVector) -> np.ndarray:
        if self._full_a_fn is None:
            raise CapabilityError("strategy retains no full X-side states")
        return np.asarray(self._full_a_fn(x, y), dtype=complex)

    def full_state_b(self, x: BitVector, y: BitVector) -> np.ndarray:
        if self._full_b_fn is None:
            raise CapabilityError("strategy retains no full Y-side states")
        return np.asarray(self._full_b_fn(x, y), dtype=complex)


def trivial_storage(n: int) -> StorageStrategy:
    """Zero-qubit storage; every stored state is the scalar 1."""
    one = qsim.scalar_state()
    return StorageStrategy(n, 0, 0, "product", lambda x, y: one,
                           full_a_fn=lambda x, y: one,
                           full_b_fn=lambda x, y: one,
                           description="trivial")


def product_factorization_error(strategy: StorageStrategy,
                                xs: Sequence[BitVector],
                                ys: Sequence[BitVector]) -> float:
    """Largest deviation of stored states from an x-factor tensor y-factor."""
    da, db = 1 << strategy.b1, 1 << strategy.b2
    worst = 0.0
    for x in xs:
        for y in ys:
            rho = strategy.state_for(x, y)
            rho_a = qsim.partial_trace(rho, [da, db], [0])
            rho_b = qsim.partial_trace(rho, [da, db], [1])
            worst = max(worst, float(np.max(np.abs(rho - np.kron(rho_a, rho_b)))))
    return worst


def random_storage(n: int, b1: int, b2: int, flavor: str, seed: int) -> StorageStrategy:
    """Seeded random strategy of the requested flavor.

    Entangled: a fixed Gaussian-random shared pure state with one extra
    working qubit per side, per-input Haar-ish local unitaries, then a
    partial trace down to the budgets.  Product: an independent
    per-input purification per side, traced to the budget.  Classical:
    per-input uniformly random basis states.
    """
    if flavor == "entangled":
        wa, wb = b1 + 1, b2 + 1
        rng = derive_rng(seed, 0xE27)
        g = rng.normal(size=1 << (wa + wb)) + 1j * rng.normal(size=1 << (wa + wb))
        shared = g / np.linalg.norm(g)
        dims = [2] * (wa + wb)
        keep = list(range(b1)) + [wa + i for i in range(b2)]
        keep_full_a = list(range(wa)) + [wa + i for i in range(b2)]

        def unitaries(x, y):
            ua = qsim.random_unitary(1 << wa, derive_rng(seed, 0xA11CE, x.value))
            ub = qsim.random_unitary(1 << wb, derive_rng(seed, 0xB0B, y.value))
            return np.kron(ua, ub)

        def state_fn(x, y):
            full = qsim.conjugate(unitaries(x, y), np.outer(shared, shared.conj()))
            rho = qsim.partial_trace(full, dims, keep)
            return 0.5 * (rho + rho.conj().T)

        def full_a_fn(x, y):
            full = qsim.conjugate(unitaries(x, y), np.outer(shared, shared.conj()))
            rho = qsim.partial_trace(full, dims, keep_full_a)
            return 0.5 * (rho + rho.conj().T)

        return StorageStrategy(n, b1, b2, "entangled", state_fn,
                               full_a_fn=full_a_fn,
                               description=f"random entangled seed={seed}")

    if flavor == "product":
        def side_states(value, stream, b):
            rng = derive_rng(seed, stream, value)
            g = rng.normal(size=1 << (b + 1)) + 1j * rng.normal(size=1 << (b + 1))
            pure = g / np.linalg.norm(g)
            full = np.outer(pure, pure.conj())
            kept = qsim.partial_trace(full, [1 << b, 2], [0])
            return 0.5 * (kept + kept.conj().T), full

        def state_fn(x, y):
            ra, _ = side_states(x.value, 0xA11CE, b1)
            rb, _ = side_states(y.value, 0xB0B, b2)
            return np.kron(ra, rb)

        def full_a_fn(x, y):
            _, fa = side_states(x.value, 0xA11CE, b1)
            rb, _ = side_states(y.value, 0xB0B, b2)
            return np.kron(fa, rb)

        def full_b_fn(x, y):
            ra, _ = side_states(x.value, 0xA11CE, b1)
            _, fb = side_states(y.value, 0xB0B, b2)
            return np.kron(ra, fb)

        return StorageStrategy(n, b1, b2, "product", state_fn,
                               full_a_fn=full_a_fn, full_b_fn=full_b_fn,
                               description=f"random product seed={seed}")

    if flavor == "classical":
        def state_fn(x, y):
            ha = int(derive_rng(seed, 0xA11CE, x.value).integers(0, 1 << b1)) if b1 else 0
            hb = int(derive_rng(seed, 0xB0B, y.value).integers(0, 1 << b2)) if b2 else 0
            return qsim.basis_state(1 << (b1 + b2), (ha << b2) | hb)

        return StorageStrategy(n, b1, b2, "classical", state_fn,
                               description=f"random classical seed={seed}")

    raise ParameterError(f"unknown flavor {flavor!r}")


def classical_block_storage(n: int, x_bits: Sequence[int], y_bits: Sequence[int],
                            b1: int, b2: int) -> StorageStrategy:
    """Each party stores a fixed block of its own input in basis states.

    Alice stores the x_bits coordinates of x (padded with zeros up to b1
    qubits), Bob the y_bits coordinates of y.  The paired strategy for
    breaking the one-bit extractor on overlapping uniform blocks.
    """
    if len(x_bits) > b1 or len(y_bits) > b2:
        raise ParameterError("block does not fit the declared budget")

    def block_value(v: BitVector, bits: Sequence[int]) -> int:
        acc = 0
        for j, pos in enumerate(bits):
            acc |= v.bit(pos) << j
        return acc

    def state_fn(x, y):
        idx_a = block_value(x, x_bits)
        idx_b = block_value(y, y_bits)
        return qsim.basis_state(1 << (b1 + b2), (idx_a << b2) | idx_b)

    def full_b_fn(x, y):
        # classical storage: the full side equals the stored side
        return state_fn(x, y)

    return StorageStrategy(n, b1, b2, "classical", state_fn,
                           full_a_fn=full_b_fn, full_b_fn=full_b_fn,
                           description=f"classical blocks x={list(x_bits)} y={list(y_bits)}")


def classical_joint_storage(n: int, fn: Callable[[BitVector, BitVector], int],
                            bits: int) -> StorageStrategy:
    """Test helper: store a joint classical function of both inputs.

    Not realizable as a (b1, b2) product storage; used to exercise the
    verifier on states that perfectly encode the extractor output.
    """
    def state_fn(x, y):
        return qsim.basis_state(1 << bits, fn(x, y))

    return StorageStrategy(n, bits, 0, "classical", state_fn,
                           description="joint classical function (test helper)")


def smp_block_storage(n: int, x_bits: Sequence[int], y_bits: Sequence[int],
                      b1: int, b2: int) -> StorageStrategy:
    """Entangled storage realizing the SMP inner-product protocol on a block.

    Alice keeps her Pauli-encoded EPR halves plus her block weight mod 4
    in two qubits; Bob symmetrically.  Qubit order inside each party:
    pair halves, weight dits, zero padding.
    """
    if len(x_bits) != len(y_bits):
        raise ParameterError("blocks must have equal length")
    block = list(x_bits)
    padded = len(block) + (len(block) % 2)
    pairs = padded // 2
    used = pairs + 2
    if used > b1 or used > b2:
        raise ParameterError(
            f"protocol needs {used} qubits per party, budgets are ({b1}, {b2})")
    pad_a = b1 - used
    pad_b = b2 - used

    def state_fn(x, y):
        xa = [x.bit(p) for p in x_bits] + [0] * (padded - len(block))
        yb = [y.bit(p) for p in y_bits] + [0] * (padded - len(block))
        pair_vec = np.array([1.0 + 0j])
        for i in range(0, padded, 2):
            c = (xa[i] ^ yb[i], xa[i + 1] ^ yb[i + 1])
            pair_vec = np.kron(pair_vec, _BELL_BASIS[c])
        def basis_vec(dim, index):
            v = np.zeros(dim, dtype=complex)
            v[index] = 1.0
            return v

        w1 = sum(xa) % 4
        w2 = sum(yb) % 4
        vec = pair_vec
        vec = np.kron(vec, basis_vec(4, w1))
        if pad_a:
            vec = np.kron(vec, basis_vec(1 << pad_a, 0))
        vec = np.kron(vec, basis_vec(4, w2))
        if pad_b:
            vec = np.kron(vec, basis_vec(1 << pad_b, 0))
        # current qubit order: A1 B1 A2 B2 ... AP BP, dits A, pad A, dits B, pad B
        order = []
        order.extend(range(0, 2 * pairs, 2))                       # Alice halves
        order.extend(range(2 * pairs, 2 * pairs + 2 + pad_a))      # Alice dits+pad
        order.extend(range(1, 2 * pairs, 2))                       # Bob halves
        order.extend(range(2 * pairs + 2 + pad_a,
                           2 * pairs + 4 + pad_a + pad_b))         # Bob dits+pad
        vec = qsim.permute_qubits_vector(vec, order)
        return np.outer(vec, vec.conj())

    return StorageStrategy(n, b1, b2, "entangled", state_fn,
                           full_a_fn=state_fn, full_b_fn=state_fn,
                           description=f"SMP protocol on {len(block)}-bit block")


def superdense_block_storage(n: int, x_bits: Sequence[int],
                             b1: int, b2: int) -> StorageStrategy:
    """Alice superdense-encodes a block of x; the halves only pair up with
    Bob's full state.

    Alice's budget holds her encoded EPR halves (two block bits per
    qubit).  The budget-limited joint state traces Bob's halves out, so
    it is maximally mixed on Alice's halves; the Y-side full state
    retains Bob's halves and lets the referee decode the block exactly.
    """
    block = list(x_bits)
    padded = len(block) + (len(block) % 2)
    pairs = padded // 2
    if pairs > b1:
        raise ParameterError(f"need {pairs} qubits for Alice, budget {b1}")
    pad_a = b1 - pairs
    dim_budget = 1 << (b1 + b2)

    def joint_vec(x):
        bits = [x.bit(p) for p in block] + [0] * (padded - len(block))
        pair_vec = np.array([1.0 + 0j])
        for i in range(0, padded, 2):
            c = (bits[i], bits[i + 1])
            pair_vec = np.kron(pair_vec, _BELL_BASIS[c])
        # order: A1 B1 ... AP BP -> A..., B...
        order = list(range(0, 2 * pairs, 2)) + list(range(1, 2 * pairs, 2))
        return qsim.permute_qubits_vector(pair_vec, order)

    def state_fn(x, y):
        vec = joint_vec(x)
        rho_pairs = np.outer(vec, vec.conj())
        dims = [1 << pairs, 1 << pairs]
        alice = qsim.partial_trace(rho_pairs, dims, [0])
        rho = alice
        if pad_a:
            rho = np.kron(rho, qsim.basis_state(1 << pad_a, 0))
        if b2:
            rho = np.kron(rho, qsim.basis_state(1 << b2, 0))
        return rho

    def full_b_fn(x, y):
        # layout [Alice halves, Alice pad, Bob halves]: Alice's budget
        # qubits followed by Bob's entire state
        full_vec = joint_vec(x)
        if pad_a:
            pad_state = np.zeros(1 << pad_a, dtype=complex)
            pad_state[0] = 1.0
            full_vec = np.kron(full_vec, pad_state)
            order = (list(range(pairs)) +
                     list(range(2 * pairs, 2 * pairs + pad_a)) +
                     list(range(pairs, 2 * pairs)))
            full_vec = qsim.permute_qubits_vector(full_vec, order)
        return np.outer(full_vec, full_vec.conj())

    return StorageStrategy(n, b1, b2, "entangled", state_fn,
                           full_b_fn=full_b_fn,
                           description=f"superdense coding of a {len(block)}-bit x-block")


# --------------------------------------------------------------------------
# highly biased product sources


@dataclass(frozen=True)
class BiasedSourcePair:
    x: FlatSource
    y: FlatSource
    prob_zero: float
    bound: float
    l: int


def _ip_zero_table(l: int) -> np.ndarray:
    """table[i, j] = 1 when the l-bit inner product of i and j is zero."""
    vals = np.arange(1 << l, dtype=np.uint32)
    table = np.empty((1 << l, 1 << l), dtype=np.int32)
    for i in range(1 << l):
        anded = vals & np.uint32(i)
        parity = np.zeros_like(anded)
        v = anded.copy()
        while v.any():
            parity ^= v & 1
            v >>= np.uint32(1)
        table[i] = 1 - parity.astype(np.int32)
    return table


def _hill_climb(l: int, seed: int, restarts: int, iters: int) -> Tuple[float, tuple, tuple]:
    size = 1 << (l - 3)
    univ = 1 << l
    table = _ip_zero_table(l)
    best_overall = (-1.0, None, None)
    for restart in range(restarts + 1):
        if restart == 0:
            # orthogonal-subspace seed: X spans the low l-3 coordinates,
            # Y starts from the complementary 3-coordinate span
            xsel = np.zeros(univ, dtype=bool)
            xsel[:size] = True
            ysel = np.zeros(univ, dtype=bool)
            high = np.arange(0, univ, size)
            ysel[high[:min(size, len(high))]] = True
            rng = derive_rng(seed, 0xB1A5, 0)
            need = size - int(ysel.sum())
            if need > 0:
                pool = np.flatnonzero(~ysel)
                ysel[rng.choice(pool, size=need, replace=False)] = True
        else:
            rng = derive_rng(seed, 0xB1A5, restart)
            xsel = np.zeros(univ, dtype=bool)
            xsel[rng.choice(univ, size=size, replace=False)] = True
            ysel = np.zeros(univ, dtype=bool)
            ysel[rng.choice(univ, size=size, replace=False)] = True
        score = int(table[np.ix_(xsel, ysel)].sum())
        for _ in range(iters):
            col = table[:, ysel].sum(axis=1)
            x_out = int(np.argmin(np.where(xsel, col, np.iinfo(np.int32).max)))
            x_in = int(np.argmax(np.where(~xsel, col, -1)))
            gain_x = int(col[x_in] - col[x_out])
            row = table[xsel, :].sum(axis=0)
            y_out = int(np.argmin(np.where(ysel, row, np.iinfo(np.int32).max)))
            y_in = int(np.argmax(np.where(~ysel, row, -1)))
            gain_y = int(row[y_in] - row[y_out])
            if gain_x <= 0 and gain_y <= 0:
                break
            if gain_x >= gain_y:
                xsel[x_out] = False
                xsel[x_in] = True
                score += gain_x
            else:
                ysel[y_out] = False
                ysel[y_in] = True
                score += gain_y
        prob = score / (size * size)
        if prob > best_overall[0]:
            best_overall = (prob, tuple(np.flatnonzero(xsel)), tuple(np.flatnonzero(ysel)))
    return best_overall


def biased_product_sources(l: int, seed: int = 0, restarts: int = 4,
                           iters: int = 4000) -> BiasedSourcePair:
    """Flat l-bit sources of min-entropy l - 3 with Pr[X . Y = 0] beyond
    1/2 + 2^(-(l-1)/2).

    l = 4 is found by exhaustive search over all support pairs; larger l
    (up to 10) by seeded hill-climbing over single-element support
    swaps.  The achieved probability is measured on the returned pair
    and must clear the bound, otherwise a search-exhausted error
    carrying the best value found is raised.
    """
    if l < 4:
        raise ParameterError("need l >= 4")
    bound = 0.5 + 2 ** (-(l - 1) / 2)
    if l == 4:
        from itertools import combinations
        table = _ip_zero_table(4)
        best = (-1, None, None)
        pairs = list(combinations(range(16), 2))
        for xs in pairs:
            col = table[xs[0]] + table[xs[1]]
            for ys in pairs:
                score = int(col[ys[0]] + col[ys[1]])
                if score > best[0]:
                    best = (score, xs, ys)
                    if score == 4:
                        break
            if best[0] == 4:
                break
        prob = best[0] / 4.0
        xsup, ysup = best[1], best[2]
    elif l <= 10:
        prob, xsup, ysup = _hill_climb(l, seed, restarts, iters)
    else:
        raise SearchExhaustedError(f"l={l} beyond the supported search range", best=None)
    if prob <= bound:
        raise SearchExhaustedError(
            f"search stalled at Pr={prob:.6f} <= bound {bound:.6f} for l={l}",
            best=prob)
    return BiasedSourcePair(x=FlatSource.from_values(l, xsup),
                            y=FlatSource.from_values(l, ysup),
                            prob_zero=prob, bound=bound, l=l)


# --------------------------------------------------------------------------
# tightness attacks


@dataclass(frozen=True)
class TightnessAttack:
    x_source: FlatSource
    y_source: FlatSource
    storage: StorageStrategy
    predicted_advantage: float
    branch: str            # "exact" or "biased"
    setting: str
    mode: str              # evaluation mode for the advantage measurement
    effective_block: int   # b, the number of inner-product bits the storage covers
    l: Optional[int] = None
    bias_found: Optional[float] = None


SETTINGS = ("entangled", "non-entangled", "superstrong-entangled",
            "superstrong-non-entangled")


def _effective_block(setting: str, b1: int, b2: int) -> int:
    if setting == "entangled":
        return max(0, 2 * (min(b1, b2) - 2))
    if setting == "non-entangled":
        return min(b1, b2)
    if setting == "superstrong-entangled":
        return 2 * max(b1, b2)
    return max(b1, b2)


def _attack_storage(setting: str, n: int, x_block: List[int], y_block: List[int],
                    b1: int, b2: int) -> Tuple[StorageStrategy, str]:
    """Storage computing the block inner product, and the mode to measure in."""
    if setting == "non-entangled":
        return classical_block_storage(n, x_block, y_block, b1, b2), "weak"
    if setting == "entangled":
        return smp_block_storage(n, x_block, y_block, b1, b2), "weak"
    if setting == "superstrong-non-entangled":
        # one-way: Alice stores her block, the y side is exposed anyway
        strat = classical_block_storage(n, x_block, [], b1, b2)
        return strat, "Y-strong"
    strat = superdense_block_storage(n, x_block, b1, b2)
    return strat, "Y-superstrong"


def tightness_attack(n: int, k1: int, k2: int, b1: int, b2: int,
                     setting: str, branch: str = "auto",
                     seed: int = 0) -> TightnessAttack:
    """Sources plus storage sitting at the security frontier.

    With Delta = k1 + k2 - n not exceeding the block size b the storage
    can afford, the sources overlap on at most b coordinates, the
    storage computes the overlapping inner product outright and the
    advantage is exactly 1/2.  Otherwise the sources are assembled from
    four blocks - a b-bit uniform block covered by the storage, filler
    blocks that keep the min-entropies at k1 and k2, and a highly
    biased pair on l = Delta + 6 - b bits - so that the storage's block
    bit matches the full inner product with probability beyond
    1/2 + 2^(-(Delta + 5 - b)/2).
    """
    if setting not in SETTINGS:
        raise ParameterError(f"unknown setting {setting!r}")
    if not (0 < k1 <= n and 0 < k2 <= n):
        raise ParameterError("need 0 < k1, k2 <= n")
    if branch not in ("auto", "exact", "biased"):
        raise ParameterError("branch must be auto, exact, or biased")
    if setting.startswith("superstrong") and b1 < b2:
        # the construction stores the x side; with the larger budget on the
        # y side, swap the sources and attack the mirrored property instead
        raise ParameterError("superstrong attack assumes b1 >= b2; "
                             "swap the roles of the sources to mirror it")
    b = _effective_block(setting, b1, b2)
    delta = k1 + k2 - n
    if branch == "auto":
        branch = "exact" if delta <= b else "biased"

    if branch == "exact":
        if delta > b:
            raise ParameterError(
                f"exact branch needs Delta={delta} <= covered block b={b}")
        x_source = FlatSource.from_values(n, range(1 << k1))
        y_source = FlatSource.from_values(
            n, (v << (n - k2) for v in range(1 << k2)))
        overlap = list(range(n - k2, k1))  # may be empty when Delta <= 0
        storage, mode = _attack_storage(setting, n, overlap, overlap, b1, b2)
        return TightnessAttack(x_source=x_source, y_source=y_source,
                               storage=storage, predicted_advantage=0.5,
                               branch="exact", setting=setting, mode=mode,
                               effective_block=b)

    l = delta + 6 - b
    len2 = k1 - delta - 3           # equals n - k2 - 3
    len4 = n - k1 - 3               # equals k2 - delta - 3
    if l < 4 or len2 < 0 or len4 < 0:
        raise ParameterError(
            f"biased construction infeasible: l={l}, filler lengths ({len2}, {len4})")
    if b + len2 + l + len4 != n:
        raise ParameterError("internal block accounting error")
    biased = biased_product_sources(l, seed=seed)
    shift3 = b + len2
    x_vals = []
    for x3 in biased.x.support:
        for x2 in range(1 << len2):
            for x1 in range(1 << b):
                x_vals.append(x1 | (x2 << b) | (x3 << shift3))
    y_vals = []
    for y3 in biased.y.support:
        for y4 in range(1 << len4):
            for y1 in range(1 << b):
                y_vals.append(y1 | (y3 << shift3) | (y4 << (shift3 + l)))
    x_source = FlatSource.from_values(n, x_vals)
    y_source = FlatSource.from_values(n, y_vals)
    block = list(range(b))
    storage, mode = _attack_storage(setting, n, block, block, b1, b2)
    predicted = 2.0 ** (-(k1 + k2 - b - n + 5) / 2)
    return TightnessAttack(x_source=x_source, y_source=y_source,
                           storage=storage, predicted_advantage=predicted,
                           branch="biased", setting=setting, mode=mode,
                           effective_block=b, l=l, bias_found=biased.prob_zero)


def measure_attack_advantage(attack: TightnessAttack) -> float:
    """Exact distance from uniform of the inner-product bit given the storage."""
    state = qsim.extractor_output_state(ip_extract, attack.x_source,
                                        attack.y_source, attack.storage,
                                        mode=attack.mode)
    return qsim.cq_distance_from_uniform(state, 1)


# --------------------------------------------------------------------------
# the guessing-entropy counterexample


@dataclass(frozen=True)
class CounterexampleReport:
    n: int
    referee_correct_fraction: float
    triples_checked: int
    guessing_entropy_single: float    # H_g(X <- one adversary's storage), exact
    guessing_entropy_combined: float  # H_g(X <- both adversaries' storage), exact
    weight_classes: int


def guessing_entropy_counterexample(n: int) -> CounterexampleReport:
    """Shared-pad storage that computes x . y while guessing entropy stays high.

    Alice stores (x xor r, |x| mod 4) and Bob (y xor r, |y| mod 4) for a
    shared uniform pad r; the referee reconstructs x xor y and outputs
    ((|x| + |y| - |x xor y|) mod 4) / 2, which equals x . y on every
    input triple.  The guessing entropy of X given Alice's storage is
    exactly n - 2: the pad makes x xor r useless and the posterior is
    uniform on one of the four weight classes.  The combined-storage
    posterior (given both pads and both weights) is also enumerated
    exhaustively for reference.
    """
    if n < 3:
        raise ParameterError("need n >= 3 so all four weight residues occur")
    size = 1 << n
    vals = np.arange(size)
    pop = np.array([int(v).bit_count() for v in range(size)])

    # referee correctness over all (x, y, r)
    x = vals[:, None, None]
    y = vals[None, :, None]
    r = vals[None, None, :]
    recon = (x ^ r) ^ (y ^ r)
    out = ((pop[x] % 4 + pop[y] % 4 - pop[recon]) % 4) // 2
    truth = pop[x & y] % 2
    correct = float(np.mean(out == truth))

    # H_g(X <- (x xor r, |x| mod 4)): the posterior given any transcript is
    # uniform on a weight class, so p_guess = (#classes) / 2^n exactly
    classes = len(set(int(pop[v]) % 4 for v in range(size)))
    h_single = n - math.log2(classes)

    # H_g(X <- combined storage): the transcript (a, w1, b, w2) pins c = a xor b
    # and leaves X uniform on {x : |x| = w1, |x xor c| = w2 (mod 4)}
    total_classes = 0
    for c in range(size):
        pairs = set((int(pop[v]) % 4, int(pop[v ^ c]) % 4) for v in range(size))
        total_classes += len(pairs)
    p_combined = total_classes / size / size
    h_combined = -math.log2(p_combined)

    return CounterexampleReport(n=n,
                                referee_correct_fraction=correct,
                                triples_checked=size ** 3,
                                guessing_entropy_single=float(h_single),
                                guessing_entropy_combined=float(h_combined),
                                weight_classes=classes)
